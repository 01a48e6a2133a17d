//! Reading and writing graphs, and classifying them against the regularity and
//! connectivity hypotheses the similarity pipeline relies on.
//!
//! Vertices are 0-based internally. Edge-list and DIMACS files use 1-based
//! vertex numbers on disk.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible entry (edge multiplicity).
pub const MAX_ENTRY: u64 = i64::MAX as u64;

/// Square nonnegative integer matrix, usually the adjacency matrix of an
/// undirected multigraph with loops.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AdjacencyMatrix {
    n: usize,
    entries: Vec<u64>,
    degree: Option<u64>,
    connected: bool,
}

impl AdjacencyMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_entries(n: usize, entries: Vec<u64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Shape(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|&v| v > MAX_ENTRY) {
            return Err(Error::Shape(format!(
                "entry ({}, {}) exceeds the multiplicity cap 2^63-1",
                pos / n,
                pos % n
            )));
        }
        let degree = common_line_sum(n, &entries);
        let connected = strongly_connected(n, &entries);
        Ok(AdjacencyMatrix {
            n,
            entries,
            degree,
            connected,
        })
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let n = rows.len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Shape(format!(
                "row {i} has {} entries, expected {n}",
                r.len()
            )));
        }
        Self::from_entries(n, rows.concat())
    }

    /// Simple undirected graph from a list of 0-based edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut entries = vec![0u64; n * n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Shape(format!(
                    "edge ({u}, {v}) out of range for n = {n}"
                )));
            }
            add_edge(&mut entries, n, u, v)?;
        }
        Self::from_entries(n, entries)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    /// Common row and column sum, if there is one.
    pub fn degree(&self) -> Option<u64> {
        self.degree
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// True for a 0/1 symmetric matrix with zero diagonal.
    pub fn is_simple_graph(&self) -> bool {
        self.is_symmetric()
            && (0..self.n).all(|i| self.get(i, i) == 0)
            && self.entries.iter().all(|&v| v <= 1)
    }

    pub fn row_sums(&self) -> Vec<u128> {
        self.entries
            .chunks(self.n.max(1))
            .take(self.n)
            .map(|r| r.iter().map(|&v| v as u128).sum())
            .collect()
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j) as f64)
    }

    /// Returns `P A P^T` where the permutation matrix sends vertex `i` to
    /// `perm[i]`, i.e. the result has `B[perm[i]][perm[j]] = A[i][j]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n, "permutation length mismatch");
        let n = self.n;
        let mut entries = vec![0u64; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[perm[i] * n + perm[j]] = self.get(i, j);
            }
        }
        AdjacencyMatrix {
            n,
            entries,
            degree: self.degree,
            connected: self.connected,
        }
    }
}

fn add_edge(entries: &mut [u64], n: usize, u: usize, v: usize) -> Result<()> {
    let bump = |x: &mut u64| -> Result<()> {
        *x = x
            .checked_add(1)
            .filter(|&v| v <= MAX_ENTRY)
            .ok_or_else(|| {
                Error::Shape(format!("multiplicity of edge ({u}, {v}) overflows 2^63-1"))
            })?;
        Ok(())
    };
    bump(&mut entries[u * n + v])?;
    if u != v {
        bump(&mut entries[v * n + u])?;
    }
    Ok(())
}

fn common_line_sum(n: usize, entries: &[u64]) -> Option<u64> {
    if n == 0 {
        return None;
    }
    let row = |i: usize| -> u128 { (0..n).map(|j| entries[i * n + j] as u128).sum() };
    let col = |j: usize| -> u128 { (0..n).map(|i| entries[i * n + j] as u128).sum() };
    let d = row(0);
    if (0..n).all(|i| row(i) == d && col(i) == d) {
        u64::try_from(d).ok()
    } else {
        None
    }
}

/// Irreducibility: every vertex reachable from vertex 0 along nonzero
/// entries, both in `A` and in `A^T`.
fn strongly_connected(n: usize, entries: &[u64]) -> bool {
    if n <= 1 {
        return true;
    }
    let reach_all = |transposed: bool| {
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                let w = if transposed {
                    entries[v * n + u]
                } else {
                    entries[u * n + v]
                };
                if w != 0 && !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach_all(false) && reach_all(true)
}

/// Supported on-disk representations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphFormat {
    Graph6,
    DimacsEdge,
    EdgeList,
    DenseMatrix,
}

impl FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "graph6" | "g6" => Ok(GraphFormat::Graph6),
            "dimacs" | "dimacs-edge" | "col" => Ok(GraphFormat::DimacsEdge),
            "edge-list" | "edgelist" | "edges" => Ok(GraphFormat::EdgeList),
            "dense-matrix" | "dense" | "matrix" => Ok(GraphFormat::DenseMatrix),
            other => Err(Error::Unsupported(format!(
                "unknown graph format `{other}`"
            ))),
        }
    }
}

impl GraphFormat {
    /// Guess the format from a file extension.
    pub fn from_extension(ext: &str) -> Option<Self> {
        match ext.to_ascii_lowercase().as_str() {
            "g6" | "graph6" => Some(GraphFormat::Graph6),
            "col" | "dimacs" => Some(GraphFormat::DimacsEdge),
            "edges" | "el" | "txt" => Some(GraphFormat::EdgeList),
            "mat" | "dense" => Some(GraphFormat::DenseMatrix),
            _ => None,
        }
    }
}

pub fn parse_graph(text: &str, format: GraphFormat) -> Result<AdjacencyMatrix> {
    match format {
        GraphFormat::Graph6 => parse_graph6(text),
        GraphFormat::DimacsEdge => parse_dimacs(text),
        GraphFormat::EdgeList => parse_edge_list(text),
        GraphFormat::DenseMatrix => parse_dense(text),
    }
}

pub fn serialize_graph(a: &AdjacencyMatrix, format: GraphFormat) -> Result<String> {
    match format {
        GraphFormat::Graph6 => write_graph6(a),
        GraphFormat::DimacsEdge => Ok(write_dimacs(a)),
        GraphFormat::EdgeList => Ok(write_edge_list(a)),
        GraphFormat::DenseMatrix => Ok(write_dense(a)),
    }
}

// ---------------------------------------------------------------------------
// graph6
// ---------------------------------------------------------------------------

fn parse_graph6(text: &str) -> Result<AdjacencyMatrix> {
    let mut bytes = text.trim().as_bytes();
    let mut offset = text.len() - text.trim_start().len();
    const HEADER: &[u8] = b">>graph6<<";
    if bytes.starts_with(HEADER) {
        bytes = &bytes[HEADER.len()..];
        offset += HEADER.len();
    }
    for (k, &b) in bytes.iter().enumerate() {
        if !(63..=126).contains(&b) {
            return Err(Error::parse_byte(
                offset + k,
                format!("byte {b:#04x} outside the graph6 range 63..=126"),
            ));
        }
    }
    let (n, header_len) = match bytes {
        [] => return Err(Error::parse_byte(offset, "empty graph6 string")),
        [126, 126, rest @ ..] => {
            if rest.len() < 6 {
                return Err(Error::parse_byte(
                    offset + 2,
                    "truncated 36-bit vertex count",
                ));
            }
            (
                rest[..6]
                    .iter()
                    .fold(0usize, |acc, &b| (acc << 6) | (b - 63) as usize),
                8,
            )
        }
        [126, rest @ ..] => {
            if rest.len() < 3 {
                return Err(Error::parse_byte(
                    offset + 1,
                    "truncated 18-bit vertex count",
                ));
            }
            (
                rest[..3]
                    .iter()
                    .fold(0usize, |acc, &b| (acc << 6) | (b - 63) as usize),
                4,
            )
        }
        [b, ..] => ((b - 63) as usize, 1),
    };
    let body = &bytes[header_len..];
    let bits = n * n.saturating_sub(1) / 2;
    let expected = bits.div_ceil(6);
    if body.len() != expected {
        return Err(Error::parse_byte(
            offset + header_len + body.len().min(expected),
            format!(
                "expected {expected} data bytes for n = {n}, found {}",
                body.len()
            ),
        ));
    }
    let mut entries = vec![0u64; n * n];
    let mut k = 0usize;
    for j in 1..n {
        for i in 0..j {
            let byte = body[k / 6] - 63;
            if (byte >> (5 - k % 6)) & 1 == 1 {
                entries[i * n + j] = 1;
                entries[j * n + i] = 1;
            }
            k += 1;
        }
    }
    AdjacencyMatrix::from_entries(n, entries)
}

fn write_graph6(a: &AdjacencyMatrix) -> Result<String> {
    if !a.is_simple_graph() {
        return Err(Error::Unsupported(
            "graph6 encodes simple undirected graphs only".into(),
        ));
    }
    let n = a.n();
    let mut out = Vec::new();
    if n <= 62 {
        out.push(n as u8 + 63);
    } else if n <= 258_047 {
        out.push(126);
        out.extend((0..3).rev().map(|s| ((n >> (6 * s)) & 63) as u8 + 63));
    } else {
        out.extend([126, 126]);
        out.extend((0..6).rev().map(|s| ((n >> (6 * s)) & 63) as u8 + 63));
    }
    let mut acc = 0u8;
    let mut filled = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | a.get(i, j) as u8;
            filled += 1;
            if filled == 6 {
                out.push(acc + 63);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push((acc << (6 - filled)) + 63);
    }
    Ok(String::from_utf8(out).expect("graph6 bytes are ASCII"))
}

// ---------------------------------------------------------------------------
// DIMACS edge format
// ---------------------------------------------------------------------------

fn parse_dimacs(text: &str) -> Result<AdjacencyMatrix> {
    let mut header: Option<(usize, usize)> = None;
    let mut entries = Vec::new();
    let mut seen_edges = 0usize;
    for (lineno, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())) {
        let mut tok = line.split_whitespace();
        match tok.next() {
            None | Some("c") => continue,
            Some("p") => {
                if header.is_some() {
                    return Err(Error::parse_line(lineno, "duplicate problem line"));
                }
                match tok.next() {
                    Some("edge") | Some("col") => {}
                    other => {
                        return Err(Error::parse_line(
                            lineno,
                            format!("expected `p edge`, found {other:?}"),
                        ))
                    }
                }
                let n = parse_tok::<usize>(tok.next(), lineno, "vertex count")?;
                let m = parse_tok::<usize>(tok.next(), lineno, "edge count")?;
                header = Some((n, m));
                entries = vec![0u64; n * n];
            }
            Some("e") => {
                let (n, _) =
                    header.ok_or_else(|| Error::parse_line(lineno, "edge before problem line"))?;
                let u = parse_vertex(tok.next(), n, lineno)?;
                let v = parse_vertex(tok.next(), n, lineno)?;
                add_edge(&mut entries, n, u, v)?;
                seen_edges += 1;
            }
            Some(other) => {
                return Err(Error::parse_line(
                    lineno,
                    format!("unknown line type `{other}`"),
                ))
            }
        }
        if tok.next().is_some() {
            return Err(Error::parse_line(lineno, "trailing tokens"));
        }
    }
    let (n, m) = header.ok_or_else(|| Error::parse_line(1, "missing `p edge n m` line"))?;
    if m != seen_edges {
        return Err(Error::parse_line(
            text.lines().count().max(1),
            format!("header announces {m} edges, found {seen_edges}"),
        ));
    }
    AdjacencyMatrix::from_entries(n, entries)
}

fn write_dimacs(a: &AdjacencyMatrix) -> String {
    let edges = undirected_edges(a);
    let mut out = format!("p edge {} {}\n", a.n(), edges.len());
    for (u, v) in edges {
        let _ = writeln!(out, "e {} {}", u + 1, v + 1);
    }
    out
}

// ---------------------------------------------------------------------------
// Edge list
// ---------------------------------------------------------------------------

/// Records are separated by newlines or `;`. Each record is a 1-based pair
/// `u v`; an optional first record `n <count>` fixes the vertex count.
/// `#` starts a comment.
fn parse_edge_list(text: &str) -> Result<AdjacencyMatrix> {
    let mut declared: Option<usize> = None;
    let mut pairs = Vec::new();
    let mut first = true;
    for (lineno, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        let line = line.split('#').next().unwrap_or("");
        for record in line.split(';').map(str::trim).filter(|r| !r.is_empty()) {
            let mut tok = record.split_whitespace();
            let head = tok.next().unwrap_or_default();
            if head == "n" {
                if !first {
                    return Err(Error::parse_line(
                        lineno,
                        "vertex count must be the first record",
                    ));
                }
                declared = Some(parse_tok(tok.next(), lineno, "vertex count")?);
            } else {
                let u = parse_tok::<usize>(Some(head), lineno, "vertex")?;
                let v = parse_tok::<usize>(tok.next(), lineno, "vertex")?;
                if u == 0 || v == 0 {
                    return Err(Error::parse_line(lineno, "vertices are numbered from 1"));
                }
                pairs.push((lineno, u - 1, v - 1));
            }
            if tok.next().is_some() {
                return Err(Error::parse_line(lineno, "trailing tokens"));
            }
            first = false;
        }
    }
    let max_vertex = pairs
        .iter()
        .map(|&(_, u, v)| u.max(v) + 1)
        .max()
        .unwrap_or(0);
    let n = match declared {
        Some(n) if n < max_vertex => {
            let (line, _, _) = pairs
                .iter()
                .find(|&&(_, u, v)| u.max(v) >= n)
                .copied()
                .unwrap();
            return Err(Error::parse_line(
                line,
                format!("vertex exceeds declared count {n}"),
            ));
        }
        Some(n) => n,
        None => max_vertex,
    };
    let mut entries = vec![0u64; n * n];
    for (_, u, v) in pairs {
        add_edge(&mut entries, n, u, v)?;
    }
    AdjacencyMatrix::from_entries(n, entries)
}

fn write_edge_list(a: &AdjacencyMatrix) -> String {
    let mut out = format!("n {}\n", a.n());
    for (u, v) in undirected_edges(a) {
        let _ = writeln!(out, "{} {}", u + 1, v + 1);
    }
    out
}

// ---------------------------------------------------------------------------
// Dense matrix
// ---------------------------------------------------------------------------

fn parse_dense(text: &str) -> Result<AdjacencyMatrix> {
    let mut rows: Vec<(usize, Vec<u64>)> = Vec::new();
    for (lineno, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| parse_tok::<u64>(Some(t), lineno, "matrix entry"))
            .collect::<Result<Vec<_>>>()?;
        rows.push((lineno, row));
    }
    let n = rows.len();
    if let Some((lineno, row)) = rows.iter().find(|(_, r)| r.len() != n) {
        return Err(Error::Shape(format!(
            "line {lineno}: row has {} entries but the matrix has {n} rows",
            row.len()
        )));
    }
    AdjacencyMatrix::from_entries(n, rows.into_iter().flat_map(|(_, r)| r).collect())
}

fn write_dense(a: &AdjacencyMatrix) -> String {
    let mut out = String::new();
    for i in 0..a.n() {
        let row: Vec<String> = (0..a.n()).map(|j| a.get(i, j).to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Edges `u <= v` repeated by multiplicity. Only meaningful for symmetric
/// matrices; the upper triangle is used.
fn undirected_edges(a: &AdjacencyMatrix) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for u in 0..a.n() {
        for v in u..a.n() {
            edges.extend(std::iter::repeat_n((u, v), a.get(u, v) as usize));
        }
    }
    edges
}

fn parse_tok<T: FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::parse_line(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| Error::parse_line(line, format!("invalid {what} `{tok}`")))
}

fn parse_vertex(tok: Option<&str>, n: usize, line: usize) -> Result<usize> {
    let v: usize = parse_tok(tok, line, "vertex")?;
    if v == 0 || v > n {
        return Err(Error::parse_line(
            line,
            format!("vertex {v} outside 1..={n}"),
        ));
    }
    Ok(v - 1)
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// How an input matrix relates to the hypotheses of the volume test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "degree")]
pub enum Validation {
    /// Symmetric, irreducible and regular of the given degree.
    Ok(u64),
    NotSymmetric,
    Disconnected,
    NotRegular,
}

pub fn validate_input(a: &AdjacencyMatrix) -> Validation {
    if !a.is_symmetric() {
        Validation::NotSymmetric
    } else if !a.is_connected() {
        Validation::Disconnected
    } else {
        match a.degree() {
            Some(d) => Validation::Ok(d),
            None => Validation::NotRegular,
        }
    }
}
