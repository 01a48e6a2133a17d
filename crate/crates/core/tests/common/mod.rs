#![allow(dead_code)]

use isovol::AdjacencyMatrix;
use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complete(n: usize) -> AdjacencyMatrix {
    let edges: Vec<_> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    AdjacencyMatrix::from_edges(n, &edges).unwrap()
}

pub fn cycle(n: usize) -> AdjacencyMatrix {
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    AdjacencyMatrix::from_edges(n, &edges).unwrap()
}

pub fn path(n: usize) -> AdjacencyMatrix {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    AdjacencyMatrix::from_edges(n, &edges).unwrap()
}

pub fn two_triangles() -> AdjacencyMatrix {
    AdjacencyMatrix::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap()
}

/// Kneser graph K(5,2).
pub fn petersen() -> AdjacencyMatrix {
    let pairs: Vec<(usize, usize)> = (0..5)
        .flat_map(|i| (i + 1..5).map(move |j| (i, j)))
        .collect();
    let mut edges = Vec::new();
    for (x, p) in pairs.iter().enumerate() {
        for (y, q) in pairs.iter().enumerate().skip(x + 1) {
            if p.0 != q.0 && p.0 != q.1 && p.1 != q.0 && p.1 != q.1 {
                edges.push((x, y));
            }
        }
    }
    AdjacencyMatrix::from_edges(10, &edges).unwrap()
}

/// Cayley graph on Z4 x Z4 with connection set {±(1,0), ±(0,1), ±(1,1)}.
pub fn shrikhande() -> AdjacencyMatrix {
    let id = |a: usize, b: usize| 4 * (a % 4) + b % 4;
    let mut edges = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for (da, db) in [(1, 0), (0, 1), (1, 1)] {
                edges.push((id(a, b), id(a + da, b + db)));
            }
        }
    }
    AdjacencyMatrix::from_edges(16, &edges).unwrap()
}

/// Line graph of K_{4,4}: same row or same column of a 4x4 board.
pub fn rook4() -> AdjacencyMatrix {
    let mut edges = Vec::new();
    for u in 0..16 {
        for v in u + 1..16 {
            if u / 4 == v / 4 || u % 4 == v % 4 {
                edges.push((u, v));
            }
        }
    }
    AdjacencyMatrix::from_edges(16, &edges).unwrap()
}

pub fn gnp(n: usize, p: f64, rng: &mut impl Rng) -> AdjacencyMatrix {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    AdjacencyMatrix::from_edges(n, &edges).unwrap()
}

/// Uniform-ish simple connected k-regular graph by the pairing model with
/// restarts.
pub fn random_regular(n: usize, k: usize, rng: &mut impl Rng) -> AdjacencyMatrix {
    assert!(k < n && (n * k).is_multiple_of(2));
    if 2 * k > n {
        // dense side: complement of a sparse regular graph, connected for k >= n/2
        let sparse = random_regular_any(n, n - 1 - k, rng);
        let edges: Vec<_> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| sparse.get(i, j) == 0)
            .collect();
        return AdjacencyMatrix::from_edges(n, &edges).unwrap();
    }
    loop {
        let g = random_regular_any(n, k, rng);
        if g.is_connected() {
            return g;
        }
    }
}

/// Simple k-regular graph, possibly disconnected, by the pairing model.
fn random_regular_any(n: usize, k: usize, rng: &mut impl Rng) -> AdjacencyMatrix {
    loop {
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, k)).collect();
        stubs.shuffle(rng);
        let mut seen = std::collections::HashSet::new();
        let ok = stubs
            .chunks(2)
            .all(|e| e[0] != e[1] && seen.insert((e[0].min(e[1]), e[0].max(e[1]))));
        if !ok {
            continue;
        }
        let edges: Vec<_> = seen.into_iter().collect();
        return AdjacencyMatrix::from_edges(n, &edges).unwrap();
    }
}

/// Random connected regular graph with `n` in `lo..=hi` and a random valid
/// degree of at least 2.
pub fn any_random_regular(lo: usize, hi: usize, rng: &mut impl Rng) -> AdjacencyMatrix {
    loop {
        let n = rng.gen_range(lo..=hi);
        let k = rng.gen_range(2..n);
        if (n * k) % 2 == 0 {
            return random_regular(n, k, rng);
        }
    }
}

pub fn random_permutation(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn eigenvalues(a: &AdjacencyMatrix) -> Vec<f64> {
    let m: DMatrix<f64> = a.to_dmatrix();
    let mut e: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

pub fn cospectral(a: &AdjacencyMatrix, b: &AdjacencyMatrix) -> bool {
    let (x, y) = (eigenvalues(a), eigenvalues(b));
    x.len() == y.len() && x.iter().zip(&y).all(|(p, q)| (p - q).abs() < 1e-8)
}
