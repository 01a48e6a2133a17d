//! Intertwiner subspaces `P0(S, T) = {X : X1 = X^T 1 = 0, SX = XT}`, their
//! orthonormal bases and the inequality description of the polytopes
//! `P(S, T) = {X in P0(S, T) : X >= -J/n}` in coordinates.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph_io::AdjacencyMatrix;

/// Singular values below this fraction of the largest count as zero.
pub const NULLSPACE_REL_TOL: f64 = 1e-9;
/// Eigenvalues within this multiple of the row sum are one distinct value.
pub const EIGEN_CLUSTER_REL_TOL: f64 = 1e-7;
/// Largest `n` accepted by the exact rational rank computation.
pub const EXACT_MAX_N: usize = 16;

/// Distinct eigenvalues of a regular symmetric matrix with multiplicities.
#[derive(Debug, Clone)]
pub struct SpectralData {
    /// Distinct eigenvalues, strictly decreasing; the first is the row sum.
    pub eigenvalues: Vec<f64>,
    pub multiplicities: Vec<usize>,
    /// Dimension of `P0(A, A)`.
    pub delta: usize,
    /// Orthonormal eigenvectors as columns, grouped like `eigenvalues`; the
    /// first column is `1/sqrt(n)`.
    pub vectors: DMatrix<f64>,
}

pub fn spectral_data(a: &AdjacencyMatrix) -> Result<SpectralData> {
    if !a.is_symmetric() {
        return Err(Error::Precondition(
            "spectral data needs a symmetric matrix".into(),
        ));
    }
    let row_sum = a
        .degree()
        .ok_or_else(|| Error::Precondition("spectral data needs a regular matrix".into()))?;
    let n = a.n();
    let eig = SymmetricEigen::new(a.to_dmatrix());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    let tol = EIGEN_CLUSTER_REL_TOL * (row_sum as f64).max(1.0);
    let mut eigenvalues = Vec::new();
    let mut multiplicities: Vec<usize> = Vec::new();
    let mut members: Vec<f64> = Vec::new();
    for (k, &i) in order.iter().enumerate() {
        let v = eig.eigenvalues[i];
        if k > 0 && eig.eigenvalues[order[k - 1]] - v > tol {
            eigenvalues.push(members.iter().sum::<f64>() / members.len() as f64);
            multiplicities.push(members.len());
            members.clear();
        }
        members.push(v);
    }
    if !members.is_empty() {
        eigenvalues.push(members.iter().sum::<f64>() / members.len() as f64);
        multiplicities.push(members.len());
    }

    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    // Put 1/sqrt(n) first in the top eigenspace and re-orthonormalise the rest of it.
    let m0 = multiplicities.first().copied().unwrap_or(0);
    if m0 > 0 {
        let ones = DVector::from_element(n, 1.0 / (n as f64).sqrt());
        let mut basis: Vec<DVector<f64>> = vec![ones];
        for c in 0..m0 {
            let mut v: DVector<f64> = vectors.column(c).into_owned();
            for b in &basis {
                let proj = b.dot(&v);
                v -= b * proj;
            }
            let norm = v.norm();
            if norm > 1e-6 && basis.len() < m0 {
                basis.push(v / norm);
            }
        }
        if basis.len() != m0 {
            return Err(Error::Inconsistent(
                "top eigenspace does not contain the all-ones vector".into(),
            ));
        }
        for (c, b) in basis.into_iter().enumerate() {
            vectors.set_column(c, &b);
        }
    }
    if (eigenvalues[0] - row_sum as f64).abs() > tol {
        return Err(Error::Inconsistent(format!(
            "largest eigenvalue {} differs from the row sum {row_sum}",
            eigenvalues[0]
        )));
    }
    // Blocks of X commuting with A, minus the all-ones direction on both sides.
    let delta = (m0 - 1).pow(2) + multiplicities[1..].iter().map(|m| m * m).sum::<usize>();
    Ok(SpectralData {
        eigenvalues,
        multiplicities,
        delta,
        vectors,
    })
}

/// Orthonormal basis (Frobenius inner product) of `P0(S, T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutantBasis {
    n: usize,
    matrices: Vec<DMatrix<f64>>,
    inequality: Vec<DVector<f64>>,
}

impl CommutantBasis {
    fn from_matrices(n: usize, matrices: Vec<DMatrix<f64>>) -> Self {
        let delta = matrices.len();
        let inequality = (0..n * n)
            .map(|p| DVector::from_fn(delta, |a, _| matrices[a][(p / n, p % n)]))
            .collect();
        CommutantBasis {
            n,
            matrices,
            inequality,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension of the subspace.
    pub fn delta(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[DMatrix<f64>] {
        &self.matrices
    }

    /// Coordinates of the entry functional `X -> x_ij`; index `i * n + j`.
    pub fn inequality_vector(&self, i: usize, j: usize) -> &DVector<f64> {
        &self.inequality[i * self.n + j]
    }

    /// `sum_a x_a W_a`.
    pub fn reconstruct(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (w, &c) in self.matrices.iter().zip(x.iter()) {
            m += w * c;
        }
        m
    }

    /// Orthogonal projection of `x` onto the subspace, in coordinates.
    pub fn coordinates(&self, x: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_iterator(self.delta(), self.matrices.iter().map(|w| w.dot(x)))
    }

    /// Checks orthonormality, zero line sums and `SW - WT = 0`.
    pub fn check_invariants(&self, s: &AdjacencyMatrix, t: &AdjacencyMatrix) -> Result<()> {
        let (sm, tm) = (s.to_dmatrix(), t.to_dmatrix());
        let scale = sm.norm().max(tm.norm()).max(1.0);
        for (a, w) in self.matrices.iter().enumerate() {
            for (b, v) in self.matrices.iter().enumerate() {
                let expect = if a == b { 1.0 } else { 0.0 };
                if (w.dot(v) - expect).abs() > 1e-10 {
                    return Err(Error::Inconsistent(format!(
                        "basis not orthonormal at ({a}, {b})"
                    )));
                }
            }
            if w.row_sum().amax() > 1e-8 || w.column_sum().amax() > 1e-8 {
                return Err(Error::Inconsistent(format!(
                    "basis matrix {a} has nonzero line sums"
                )));
            }
            if (&sm * w - w * &tm).amax() > 1e-8 * scale {
                return Err(Error::Inconsistent(format!(
                    "basis matrix {a} does not intertwine"
                )));
            }
        }
        Ok(())
    }

    /// Text dump: `delta n`, then each basis matrix row-major on one line,
    /// then each inequality vector on one line.
    pub fn dump(&self) -> String {
        let mut out = format!("{} {}\n", self.delta(), self.n);
        for w in &self.matrices {
            let row: Vec<String> = (0..self.n * self.n)
                .map(|p| format!("{:?}", w[(p / self.n, p % self.n)]))
                .collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        for u in &self.inequality {
            let row: Vec<String> = u.iter().map(|v| format!("{v:?}")).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    /// Parses [`CommutantBasis::dump`] output.
    pub fn from_dump(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, head) = lines
            .next()
            .ok_or_else(|| Error::parse_line(1, "empty dump"))?;
        let nums: Vec<usize> = head
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::parse_line(1, format!("bad header token `{t}`")))
            })
            .collect::<Result<_>>()?;
        let [delta, n] = nums[..] else {
            return Err(Error::parse_line(1, "header must be `delta n`"));
        };
        let mut matrices = Vec::with_capacity(delta);
        for _ in 0..delta {
            let (line, text) = lines
                .next()
                .ok_or_else(|| Error::parse_line(2 + matrices.len(), "missing matrix"))?;
            let vals: Vec<f64> = text
                .split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::parse_line(line, format!("bad number `{t}`")))
                })
                .collect::<Result<_>>()?;
            if vals.len() != n * n {
                return Err(Error::parse_line(
                    line,
                    format!("expected {} entries", n * n),
                ));
            }
            matrices.push(DMatrix::from_row_slice(n, n, &vals));
        }
        // inequality vectors are derived data; they are recomputed
        Ok(CommutantBasis::from_matrices(n, matrices))
    }
}

/// The `(2n + n^2) x n^2` system `[row sums; column sums; SX - XT]` acting on
/// `vec(X)` (row-major).
fn constraint_matrix(s: &DMatrix<f64>, t: &DMatrix<f64>) -> DMatrix<f64> {
    let n = s.nrows();
    let mut c = DMatrix::zeros(2 * n + n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            c[(i, i * n + j)] = 1.0;
            c[(n + j, i * n + j)] = 1.0;
        }
    }
    for i in 0..n {
        for j in 0..n {
            let row = 2 * n + i * n + j;
            for k in 0..n {
                c[(row, k * n + j)] += s[(i, k)];
                c[(row, i * n + k)] -= t[(k, j)];
            }
        }
    }
    c
}

fn check_pair(s: &AdjacencyMatrix, t: &AdjacencyMatrix) -> Result<()> {
    if s.n() != t.n() {
        return Err(Error::Precondition(format!(
            "sizes differ: {} vs {}",
            s.n(),
            t.n()
        )));
    }
    if !s.is_symmetric() || !t.is_symmetric() {
        return Err(Error::Precondition(
            "commutant needs symmetric matrices".into(),
        ));
    }
    match (s.degree(), t.degree()) {
        (Some(a), Some(b)) if a == b => Ok(()),
        _ => Err(Error::Precondition(
            "matrices must be regular with the same row sum".into(),
        )),
    }
}

pub fn commutant_basis(s: &AdjacencyMatrix, t: &AdjacencyMatrix) -> Result<CommutantBasis> {
    check_pair(s, t)?;
    let n = s.n();
    let c = constraint_matrix(&s.to_dmatrix(), &t.to_dmatrix());
    let svd = c.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sigma_max = svd.singular_values.max();
    let cutoff = NULLSPACE_REL_TOL * sigma_max.max(f64::MIN_POSITIVE);
    let mut matrices = Vec::new();
    for (k, &sv) in svd.singular_values.iter().enumerate() {
        if sv <= cutoff {
            matrices.push(DMatrix::from_row_slice(
                n,
                n,
                v_t.row(k).transpose().as_slice(),
            ));
        }
    }
    Ok(CommutantBasis::from_matrices(n, matrices))
}

/// Inequality vectors `u_(i,j)`, indexed `i * n + j`; the polytope in
/// coordinates is `{x : u_(i,j)^T x >= -1/n}`.
pub fn inequality_vectors(basis: &CommutantBasis) -> Vec<DVector<f64>> {
    basis.inequality.clone()
}

/// Dimension of `P0(S, T)` from the numerical nullspace.
pub fn nullity(s: &AdjacencyMatrix, t: &AdjacencyMatrix) -> Result<usize> {
    Ok(commutant_basis(s, t)?.delta())
}

/// Dimension of `P0(S, T)` by exact fraction-free elimination.
pub fn exact_nullity(s: &AdjacencyMatrix, t: &AdjacencyMatrix) -> Result<usize> {
    check_pair(s, t)?;
    let n = s.n();
    if n > EXACT_MAX_N {
        return Err(Error::Refused(format!(
            "exact nullity limited to n <= {EXACT_MAX_N}"
        )));
    }
    let c = constraint_matrix(&s.to_dmatrix(), &t.to_dmatrix());
    let mut rows: Vec<Vec<BigInt>> = (0..c.nrows())
        .map(|i| {
            (0..c.ncols())
                .map(|j| BigInt::from(c[(i, j)] as i64))
                .collect()
        })
        .collect();
    Ok(n * n - bareiss_rank(&mut rows))
}

/// Rank of an integer matrix by Bareiss elimination; destroys the input.
pub(crate) fn bareiss_rank(m: &mut [Vec<BigInt>]) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut r = 0usize;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let (head, tail) = m.split_at_mut(r + 1);
        let pivot_row = &head[r];
        let pivot = pivot_row[col].clone();
        for row in tail.iter_mut() {
            let factor = std::mem::take(&mut row[col]);
            for j in col + 1..cols {
                let v = &pivot * &row[j] - &factor * &pivot_row[j];
                row[j] = if prev.is_one() { v } else { v / &prev };
            }
        }
        prev = pivot;
        r += 1;
    }
    r
}

/// Dimensions of `P0(A, A)`, `P0(A, B)`, `P0(B, B)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionTriple {
    pub aa: usize,
    pub ab: usize,
    pub bb: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DimensionCheck {
    Equal(usize),
    Unequal(DimensionTriple),
}

pub fn dimension_triple(a: &AdjacencyMatrix, b: &AdjacencyMatrix) -> Result<DimensionTriple> {
    Ok(DimensionTriple {
        aa: nullity(a, a)?,
        ab: nullity(a, b)?,
        bb: nullity(b, b)?,
    })
}

pub fn dimension_triple_equal(a: &AdjacencyMatrix, b: &AdjacencyMatrix) -> Result<DimensionCheck> {
    let t = dimension_triple(a, b)?;
    Ok(if t.aa == t.ab && t.ab == t.bb {
        DimensionCheck::Equal(t.aa)
    } else {
        DimensionCheck::Unequal(t)
    })
}

/// `tr(A^k)` for `k = 1..=n`, exactly. Equal lists mean equal
/// characteristic polynomials (Newton's identities over the rationals).
pub fn power_traces(a: &AdjacencyMatrix) -> Vec<BigInt> {
    let n = a.n();
    let base: Vec<BigInt> = a.entries().iter().map(|&v| BigInt::from(v)).collect();
    let mut power = base.clone();
    let mut traces = Vec::with_capacity(n);
    for k in 1..=n {
        traces.push((0..n).map(|i| power[i * n + i].clone()).sum());
        if k < n {
            let mut next = vec![BigInt::zero(); n * n];
            for i in 0..n {
                for l in 0..n {
                    let p = &power[i * n + l];
                    if p.is_zero() {
                        continue;
                    }
                    for j in 0..n {
                        let b = &base[l * n + j];
                        if !b.is_zero() {
                            next[i * n + j] += p * b;
                        }
                    }
                }
            }
            power = next;
        }
    }
    traces
}

/// Eigenvalues sorted in decreasing order.
pub fn sorted_eigenvalues(a: &AdjacencyMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(a.to_dmatrix())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

/// `I - J/n`, the point of `P(A, A)` at maximal distance `sqrt(n - 1)`.
pub fn identity_minus_j(n: usize) -> DMatrix<f64> {
    DMatrix::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> AdjacencyMatrix {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        AdjacencyMatrix::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn c4_spectrum() {
        let s = spectral_data(&cycle(4)).unwrap();
        assert_eq!(s.multiplicities, vec![1, 2, 1]);
        assert_eq!(s.delta, 5);
        for (got, want) in s.eigenvalues.iter().zip([2.0, 0.0, -2.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        let q = &s.vectors;
        assert!((q.transpose() * q - DMatrix::identity(4, 4)).amax() < 1e-10);
        assert!((q.column(0).sum() - 2.0).abs() < 1e-12);
        assert_eq!(nullity(&cycle(4), &cycle(4)).unwrap(), 5);
    }

    #[test]
    fn all_ones_commutes_with_everything() {
        let j3 = AdjacencyMatrix::from_entries(3, vec![1; 9]).unwrap();
        assert_eq!(spectral_data(&j3).unwrap().delta, 4);
        assert_eq!(nullity(&j3, &j3).unwrap(), 4);
        assert_eq!(exact_nullity(&j3, &j3).unwrap(), 4);
    }

    #[test]
    fn k2_basis_by_hand() {
        let k2 = AdjacencyMatrix::from_edges(2, &[(0, 1)]).unwrap();
        let b = commutant_basis(&k2, &k2).unwrap();
        assert_eq!(b.delta(), 1);
        let w = &b.matrices()[0];
        let sign = w[(0, 0)].signum();
        let expect = DMatrix::from_row_slice(2, 2, &[0.5, -0.5, -0.5, 0.5]) * sign;
        assert!((w - expect).amax() < 1e-12);
        let u: Vec<f64> = inequality_vectors(&b).iter().map(|u| u[0] * sign).collect();
        assert_eq!(u.len(), 4);
        for (got, want) in u.iter().zip([0.5, -0.5, -0.5, 0.5]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn asymmetric_input_rejected() {
        let arc = AdjacencyMatrix::from_rows(&[vec![0, 1], vec![0, 0]]).unwrap();
        assert!(matches!(spectral_data(&arc), Err(Error::Precondition(_))));
        let k2 = AdjacencyMatrix::from_edges(2, &[(0, 1)]).unwrap();
        let j2 = AdjacencyMatrix::from_entries(2, vec![1; 4]).unwrap();
        assert!(matches!(
            commutant_basis(&k2, &j2),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn dump_round_trip() {
        let c = cycle(5);
        let b = commutant_basis(&c, &c).unwrap();
        let again = CommutantBasis::from_dump(&b.dump()).unwrap();
        assert_eq!(again, b);
    }

    #[test]
    fn power_traces_of_triangle() {
        let k3 = cycle(3);
        let t: Vec<i64> = power_traces(&k3)
            .iter()
            .map(|v| i64::try_from(v).unwrap())
            .collect();
        // eigenvalues 2, -1, -1
        assert_eq!(t, vec![0, 6, 6]);
    }

    #[test]
    fn bareiss_rank_small() {
        let mut m: Vec<Vec<BigInt>> = [[1, 2, 3], [2, 4, 6], [1, 0, 1]]
            .iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect();
        assert_eq!(bareiss_rank(&mut m), 2);
    }
}
