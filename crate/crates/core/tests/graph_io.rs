mod common;

use isovol::graph_io::{parse_graph, serialize_graph, validate_input, GraphFormat, Validation};
use isovol::AdjacencyMatrix;
use proptest::prelude::*;

#[test]
fn graph6_matches_reference_decoder() {
    let fixture = include_str!("data/graph6_reference.txt");
    let mut checked = 0;
    for line in fixture
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
    {
        let mut cols = line.split('\t');
        let g6 = cols.next().unwrap();
        let n: usize = cols.next().unwrap().parse().unwrap();
        let edges: Vec<(usize, usize)> = cols
            .next()
            .unwrap_or("")
            .split_whitespace()
            .map(|e| {
                let (u, v) = e.split_once('-').unwrap();
                (u.parse().unwrap(), v.parse().unwrap())
            })
            .collect();
        let expected = AdjacencyMatrix::from_edges(n, &edges).unwrap();
        let parsed = parse_graph(g6, GraphFormat::Graph6).unwrap();
        assert_eq!(parsed, expected, "decoding {g6}");
        assert_eq!(
            serialize_graph(&parsed, GraphFormat::Graph6)
                .unwrap()
                .trim(),
            g6,
            "encoding n = {n}"
        );
        checked += 1;
    }
    assert!(checked >= 20);
}

#[test]
fn star_from_reference() {
    let g = parse_graph("D?{", GraphFormat::Graph6).unwrap();
    assert_eq!(g.n(), 5);
    let degrees: Vec<u128> = g.row_sums();
    assert_eq!(degrees, vec![1, 1, 1, 1, 4]);
    assert_eq!(validate_input(&g), Validation::NotRegular);
}

#[test]
fn formats_agree_on_petersen() {
    let p = common::petersen();
    for format in [
        GraphFormat::Graph6,
        GraphFormat::DimacsEdge,
        GraphFormat::EdgeList,
        GraphFormat::DenseMatrix,
    ] {
        let text = serialize_graph(&p, format).unwrap();
        assert_eq!(parse_graph(&text, format).unwrap(), p, "{format:?}");
    }
    assert_eq!(validate_input(&p), Validation::Ok(3));
}

fn simple_graph(max_n: usize) -> impl Strategy<Value = AdjacencyMatrix> {
    (0..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * n.saturating_sub(1) / 2).prop_map(
            move |bits| {
                let mut edges = Vec::new();
                let mut k = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        if bits[k] {
                            edges.push((i, j));
                        }
                        k += 1;
                    }
                }
                AdjacencyMatrix::from_edges(n, &edges).unwrap()
            },
        )
    })
}

fn symmetric_multigraph(max_n: usize) -> impl Strategy<Value = AdjacencyMatrix> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(0u64..4, n * (n + 1) / 2).prop_map(move |vals| {
            let mut entries = vec![0; n * n];
            let mut k = 0;
            for i in 0..n {
                for j in i..n {
                    entries[i * n + j] = vals[k];
                    entries[j * n + i] = vals[k];
                    k += 1;
                }
            }
            AdjacencyMatrix::from_entries(n, entries).unwrap()
        })
    })
}

fn any_matrix(max_n: usize) -> impl Strategy<Value = AdjacencyMatrix> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(0u64..1000, n * n)
            .prop_map(move |e| AdjacencyMatrix::from_entries(n, e).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graph6_round_trip(g in simple_graph(32)) {
        let text = serialize_graph(&g, GraphFormat::Graph6).unwrap();
        prop_assert_eq!(parse_graph(&text, GraphFormat::Graph6).unwrap(), g);
    }

    #[test]
    fn dimacs_and_edge_list_round_trip(g in symmetric_multigraph(32)) {
        for format in [GraphFormat::DimacsEdge, GraphFormat::EdgeList] {
            let text = serialize_graph(&g, format).unwrap();
            prop_assert_eq!(&parse_graph(&text, format).unwrap(), &g);
        }
    }

    #[test]
    fn dense_round_trip(g in any_matrix(32)) {
        let text = serialize_graph(&g, GraphFormat::DenseMatrix).unwrap();
        prop_assert_eq!(parse_graph(&text, GraphFormat::DenseMatrix).unwrap(), g);
    }

    #[test]
    fn permuting_preserves_validation(g in simple_graph(12), seed in any::<u64>()) {
        let p = common::random_permutation(g.n(), &mut common::rng(seed));
        prop_assert_eq!(validate_input(&g.permuted(&p)), validate_input(&g));
    }
}
