//! Coherent closure of a set of matrices, its structure constants, algebra
//! isomorphism search and the reduction to a pair of regular symmetric
//! integer matrices.
//!
//! The closure is computed by stable refinement of a colouring of the `n^2`
//! positions: position `(x, y)` is recoloured by its own colour, the colour
//! of `(y, x)` and the multiset of colour pairs `(c(x, z), c(z, y))` over all
//! `z`. The colour classes of the stable colouring are exactly the supports
//! of the canonical (0,1) basis. Colours are renumbered after every round by
//! sorting the signatures, so two inputs related by a permutation receive
//! identical colour numbers.

use std::cmp::Ordering;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph_io::AdjacencyMatrix;

/// Entries closer than this (relative) are treated as one value when the
/// inputs are split into level sets.
pub const VALUE_MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisElement {
    /// Positions `(row, col)` of the ones, sorted.
    pub support: Vec<(usize, usize)>,
    pub is_diagonal: bool,
    pub is_symmetric: bool,
    /// Index of the element equal to this one transposed.
    pub transpose_partner: usize,
    /// Number of ones in every nonzero row.
    pub row_degree: usize,
    /// Number of ones in every nonzero column.
    pub col_degree: usize,
    /// Value taken by each input matrix on this element's support.
    pub values: Vec<f64>,
}

/// The disjoint-support (0,1) basis `E_1..E_d` of a coherent algebra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalBasis {
    n: usize,
    colors: Vec<usize>,
    elements: Vec<BasisElement>,
    rounds: usize,
}

impl CanonicalBasis {
    /// Builds a basis from an arbitrary partition of the positions, given as
    /// a colour per position (row-major). Colours are used as element
    /// indices and must be `0..d` with no gaps. No coherence is assumed;
    /// see [`CanonicalBasis::check_invariants`].
    pub fn from_partition(n: usize, colors: Vec<usize>) -> Result<Self> {
        Self::assemble(n, colors, &[], 0)
    }

    fn assemble(
        n: usize,
        colors: Vec<usize>,
        level_values: &[Vec<f64>],
        rounds: usize,
    ) -> Result<Self> {
        if colors.len() != n * n {
            return Err(Error::Shape(format!(
                "partition has {} cells, expected {}",
                colors.len(),
                n * n
            )));
        }
        let d = colors.iter().max().map_or(0, |&m| m + 1);
        let mut supports = vec![Vec::new(); d];
        for (pos, &c) in colors.iter().enumerate() {
            supports[c].push((pos / n, pos % n));
        }
        if let Some(c) = supports.iter().position(Vec::is_empty) {
            return Err(Error::Shape(format!("colour {c} is unused")));
        }
        let mut elements = Vec::with_capacity(d);
        for (c, support) in supports.into_iter().enumerate() {
            let (x, y) = support[0];
            let partner = colors[y * n + x];
            let is_diagonal = support.iter().all(|&(i, j)| i == j);
            let is_symmetric = support.iter().all(|&(i, j)| colors[j * n + i] == c);
            let row_degree = support.iter().filter(|&&(i, _)| i == x).count();
            let col_degree = support.iter().filter(|&&(_, j)| j == y).count();
            let values = level_values.iter().map(|m| m[x * n + y]).collect();
            elements.push(BasisElement {
                support,
                is_diagonal,
                is_symmetric,
                transpose_partner: partner,
                row_degree,
                col_degree,
                values,
            });
        }
        Ok(CanonicalBasis {
            n,
            colors,
            elements,
            rounds,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension `d` of the algebra.
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[BasisElement] {
        &self.elements
    }

    /// Element index covering position `(i, j)`.
    #[inline]
    pub fn color(&self, i: usize, j: usize) -> usize {
        self.colors[i * self.n + j]
    }

    /// Refinement rounds performed by the closure (0 for hand-built bases).
    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// Number of elements supported on the diagonal.
    pub fn diagonal_count(&self) -> usize {
        self.elements.iter().filter(|e| e.is_diagonal).count()
    }

    /// Element `i` as a dense 0/1 matrix.
    pub fn element_matrix(&self, i: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for &(x, y) in &self.elements[i].support {
            m[(x, y)] = 1.0;
        }
        m
    }

    /// Exhaustive check of the canonical-basis axioms.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.n;
        let total: usize = self.elements.iter().map(|e| e.support.len()).sum();
        if total != n * n {
            return Err(Error::Inconsistent(format!(
                "supports cover {total} of {} positions",
                n * n
            )));
        }
        let mut seen = vec![false; n * n];
        for (c, e) in self.elements.iter().enumerate() {
            for &(i, j) in &e.support {
                if std::mem::replace(&mut seen[i * n + j], true) || self.color(i, j) != c {
                    return Err(Error::Inconsistent(format!(
                        "position ({i}, {j}) covered twice"
                    )));
                }
            }
            let on_diag = e.support.iter().filter(|&&(i, j)| i == j).count();
            if on_diag != 0 && on_diag != e.support.len() {
                return Err(Error::Inconsistent(format!(
                    "element {c} straddles the diagonal"
                )));
            }
            let p = e.transpose_partner;
            let mut transposed: Vec<(usize, usize)> =
                e.support.iter().map(|&(i, j)| (j, i)).collect();
            transposed.sort_unstable();
            if self.elements[p].support != transposed {
                return Err(Error::Inconsistent(format!(
                    "transpose of element {c} is not a basis element"
                )));
            }
            if e.is_symmetric != (p == c) {
                return Err(Error::Inconsistent(format!(
                    "element {c} symmetry flag disagrees with its partner"
                )));
            }
            let mut rows = vec![0usize; n];
            let mut cols = vec![0usize; n];
            for &(i, j) in &e.support {
                rows[i] += 1;
                cols[j] += 1;
            }
            if rows.iter().any(|&r| r != 0 && r != e.row_degree)
                || cols.iter().any(|&k| k != 0 && k != e.col_degree)
            {
                return Err(Error::Inconsistent(format!("element {c} is not balanced")));
            }
        }
        Ok(())
    }

    /// Text dump, one element per block.
    pub fn dump(&self) -> String {
        let mut out = format!(
            "# coherent basis: n = {}, d = {}, rounds = {}; elements 1-based, positions 0-based\n",
            self.n,
            self.dim(),
            self.rounds
        );
        for (c, e) in self.elements.iter().enumerate() {
            let kind = if e.is_diagonal {
                "diagonal"
            } else {
                "off-diagonal"
            };
            let sym = if e.is_symmetric {
                "symmetric"
            } else {
                "asymmetric"
            };
            let _ = write!(
                out,
                "E {} : {kind} {sym} transpose={}, degree r={} c={}, support",
                c + 1,
                e.transpose_partner + 1,
                e.row_degree,
                e.col_degree
            );
            for &(i, j) in &e.support {
                let _ = write!(out, " ({i},{j})");
            }
            out.push('\n');
        }
        out
    }
}

/// Splits each matrix into level sets and records, per position, the
/// representative value of its level in every matrix.
fn level_sets(matrices: &[DMatrix<f64>], n: usize) -> (Vec<Vec<usize>>, Vec<Vec<f64>>) {
    let mut indices = Vec::with_capacity(matrices.len());
    let mut values = Vec::with_capacity(matrices.len());
    for m in matrices {
        let flat: Vec<f64> = (0..n * n).map(|p| m[(p / n, p % n)]).collect();
        let mut order: Vec<usize> = (0..flat.len()).collect();
        order.sort_by(|&a, &b| flat[a].total_cmp(&flat[b]));
        let mut level = vec![0usize; flat.len()];
        let mut repr = vec![0.0; flat.len()];
        let mut current = 0usize;
        let mut anchor = f64::NAN;
        for (k, &p) in order.iter().enumerate() {
            let v = flat[p];
            if k == 0 {
                anchor = v;
            } else if !(v == anchor
                || (v - anchor).abs() <= VALUE_MERGE_TOL * v.abs().max(anchor.abs()))
            {
                current += 1;
                anchor = v;
            }
            level[p] = current;
            repr[p] = anchor;
        }
        indices.push(level);
        values.push(repr);
    }
    (indices, values)
}

/// Renumbers `signatures` by their sorted order. Returns the new colours and
/// the number of distinct signatures.
fn renumber<T: Ord>(signatures: &[T]) -> (Vec<usize>, usize) {
    let mut order: Vec<usize> = (0..signatures.len()).collect();
    order.sort_by(|&a, &b| signatures[a].cmp(&signatures[b]));
    let mut colors = vec![0usize; signatures.len()];
    let mut next = 0usize;
    for (k, &p) in order.iter().enumerate() {
        if k > 0 && signatures[order[k - 1]] != signatures[p] {
            next += 1;
        }
        colors[p] = next;
    }
    (colors, if signatures.is_empty() { 0 } else { next + 1 })
}

/// Minimal coherent algebra containing all `matrices` (and `I`, `J`).
pub fn coherent_closure(matrices: &[DMatrix<f64>]) -> Result<CanonicalBasis> {
    let n = matrices
        .first()
        .map(|m| m.nrows())
        .ok_or_else(|| Error::Shape("no input matrices".into()))?;
    if let Some(m) = matrices.iter().find(|m| m.nrows() != n || m.ncols() != n) {
        return Err(Error::Shape(format!(
            "expected {n}x{n} matrices, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if n == 0 {
        return Err(Error::Shape("empty matrices".into()));
    }
    let (levels, values) = level_sets(matrices, n);

    // Off-diagonal positions sort after diagonal ones, so diagonal elements
    // come first in the final numbering.
    let initial: Vec<Vec<usize>> = (0..n * n)
        .map(|p| {
            let mut sig = Vec::with_capacity(levels.len() + 1);
            sig.push(usize::from(p / n != p % n));
            sig.extend(levels.iter().map(|l| l[p]));
            sig
        })
        .collect();
    let (mut colors, mut count) = renumber(&initial);

    let max_rounds = n * n;
    let mut rounds = 0usize;
    loop {
        let signatures: Vec<Vec<u64>> = (0..n * n)
            .map(|p| {
                let (x, y) = (p / n, p % n);
                let mut pairs: Vec<u64> = (0..n)
                    .map(|z| (colors[x * n + z] as u64) * (count as u64) + colors[z * n + y] as u64)
                    .collect();
                pairs.sort_unstable();
                let mut sig = Vec::with_capacity(n + 2);
                sig.push(colors[p] as u64);
                sig.push(colors[y * n + x] as u64);
                sig.extend(pairs);
                sig
            })
            .collect();
        let (next, next_count) = renumber(&signatures);
        rounds += 1;
        if rounds > max_rounds {
            return Err(Error::Inconsistent(format!(
                "refinement exceeded {max_rounds} rounds"
            )));
        }
        if next_count == count {
            colors = next;
            break;
        }
        colors = next;
        count = next_count;
    }
    let basis = CanonicalBasis::assemble(n, colors, &values, rounds)?;
    basis.check_invariants()?;
    Ok(basis)
}

/// Closure of a single adjacency matrix.
pub fn coherent_closure_of(a: &AdjacencyMatrix) -> Result<CanonicalBasis> {
    coherent_closure(&[a.to_dmatrix()])
}

/// Structure constants `t[i][j][k]` with `E_i E_j = sum_k t[i][j][k] E_k`,
/// stored as sparse slices per `(i, j)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureTensor {
    d: usize,
    slices: Vec<Vec<(usize, u64)>>,
}

impl StructureTensor {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> u64 {
        let slice = &self.slices[i * self.d + j];
        slice
            .binary_search_by_key(&k, |&(kk, _)| kk)
            .map_or(0, |p| slice[p].1)
    }

    /// Nonzero `(k, t)` entries of `E_i E_j`, sorted by `k`.
    pub fn slice(&self, i: usize, j: usize) -> &[(usize, u64)] {
        &self.slices[i * self.d + j]
    }

    pub fn nonzeros(&self) -> impl Iterator<Item = ((usize, usize, usize), u64)> + '_ {
        self.slices.iter().enumerate().flat_map(move |(ij, s)| {
            let (i, j) = (ij / self.d, ij % self.d);
            s.iter().map(move |&(k, t)| ((i, j, k), t))
        })
    }

    /// Sparse dump, one `(i,j,k) t` line per nonzero, 1-based indices.
    pub fn dump(&self) -> String {
        let mut out = format!("# structure tensor: d = {}\n", self.d);
        for ((i, j, k), t) in self.nonzeros() {
            let _ = writeln!(out, "({},{},{}) {t}", i + 1, j + 1, k + 1);
        }
        out
    }
}

pub fn structure_tensor(basis: &CanonicalBasis) -> Result<StructureTensor> {
    let n = basis.n();
    let d = basis.dim();
    let profile = |x: usize, y: usize| -> Vec<(usize, usize)> {
        let mut pairs: Vec<(usize, usize)> = (0..n)
            .map(|z| (basis.color(x, z), basis.color(z, y)))
            .collect();
        pairs.sort_unstable();
        pairs
    };
    let mut slices = vec![Vec::new(); d * d];
    for (k, e) in basis.elements().iter().enumerate() {
        let (x, y) = e.support[0];
        let reference = profile(x, y);
        for &(u, v) in &e.support[1..] {
            if profile(u, v) != reference {
                return Err(Error::Inconsistent(format!(
                    "products are not constant on element {} (positions ({x},{y}) and ({u},{v}))",
                    k + 1
                )));
            }
        }
        let mut run = 0u64;
        for (idx, &pair) in reference.iter().enumerate() {
            run += 1;
            if idx + 1 == reference.len() || reference[idx + 1] != pair {
                slices[pair.0 * d + pair.1].push((k, run));
                run = 0;
            }
        }
    }
    Ok(StructureTensor { d, slices })
}

/// A bijection between two canonical bases preserving every flag, degree,
/// input value and structure constant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraIsomorphism {
    /// `mapping[i]` is the index in the second basis of the image of `E_i`.
    pub mapping: Vec<usize>,
}

impl AlgebraIsomorphism {
    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(i, &m)| i == m)
    }
}

#[derive(Debug, Clone, PartialEq, PartialOrd)]
struct ElementKey {
    diagonal_first: bool,
    symmetric: bool,
    row_degree: usize,
    col_degree: usize,
    size: usize,
    values: Vec<f64>,
}

impl ElementKey {
    fn of(e: &BasisElement) -> Self {
        ElementKey {
            diagonal_first: !e.is_diagonal,
            symmetric: e.is_symmetric,
            row_degree: e.row_degree,
            col_degree: e.col_degree,
            size: e.support.len(),
            values: e.values.clone(),
        }
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or_else(|| {
            let a: Vec<u64> = self.values.iter().map(|v| v.to_bits()).collect();
            let b: Vec<u64> = other.values.iter().map(|v| v.to_bits()).collect();
            a.cmp(&b)
        })
    }
}

struct Matcher<'a> {
    a: &'a CanonicalBasis,
    ta: &'a StructureTensor,
    b: &'a CanonicalBasis,
    tb: &'a StructureTensor,
    keys_a: Vec<ElementKey>,
    keys_b: Vec<ElementKey>,
    order: Vec<usize>,
    mapping: Vec<Option<usize>>,
    used: Vec<bool>,
}

impl Matcher<'_> {
    fn consistent(&self, a: usize, b: usize, assigned: &[usize]) -> bool {
        let ea = &self.a.elements()[a];
        let eb = &self.b.elements()[b];
        if let Some(pb) = self.mapping[ea.transpose_partner] {
            if pb != eb.transpose_partner {
                return false;
            }
        }
        if ea.transpose_partner == a && eb.transpose_partner != b {
            return false;
        }
        let image = |x: usize| {
            if x == a {
                b
            } else {
                self.mapping[x].expect("assigned")
            }
        };
        let check = |i: usize, j: usize, k: usize| {
            self.ta.get(i, j, k) == self.tb.get(image(i), image(j), image(k))
        };
        if self.ta.slice(a, a).len() != self.tb.slice(b, b).len() || !check(a, a, a) {
            return false;
        }
        for &x in assigned {
            if self.ta.slice(a, x).len() != self.tb.slice(b, image(x)).len()
                || self.ta.slice(x, a).len() != self.tb.slice(image(x), b).len()
                || !check(a, a, x)
                || !check(a, x, a)
                || !check(x, a, a)
            {
                return false;
            }
            for &y in assigned {
                if !check(a, x, y) || !check(x, a, y) || !check(x, y, a) {
                    return false;
                }
            }
        }
        true
    }

    fn search(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let a = self.order[depth];
        let assigned: Vec<usize> = self.order[..depth].to_vec();
        // Try the same index first: canonical numbering usually lines up.
        let d = self.b.dim();
        let candidates = std::iter::once(a).chain((0..d).filter(|&c| c != a));
        for b in candidates.collect::<Vec<_>>() {
            if b >= d
                || self.used[b]
                || self.keys_a[a].total_cmp(&self.keys_b[b]) != Ordering::Equal
            {
                continue;
            }
            if !self.consistent(a, b, &assigned) {
                continue;
            }
            self.mapping[a] = Some(b);
            self.used[b] = true;
            if self.search(depth + 1) {
                return true;
            }
            self.mapping[a] = None;
            self.used[b] = false;
        }
        false
    }
}

/// Searches for an isomorphism of coherent algebras. `None` refutes
/// permutational similarity of the generating matrices; `Some` does not
/// establish it.
pub fn match_algebras(
    basis_a: &CanonicalBasis,
    tensor_a: &StructureTensor,
    basis_b: &CanonicalBasis,
    tensor_b: &StructureTensor,
) -> Option<AlgebraIsomorphism> {
    let d = basis_a.dim();
    if d != basis_b.dim()
        || basis_a.n() != basis_b.n()
        || tensor_a.dim() != d
        || tensor_b.dim() != d
    {
        return None;
    }
    let keys_a: Vec<ElementKey> = basis_a.elements().iter().map(ElementKey::of).collect();
    let keys_b: Vec<ElementKey> = basis_b.elements().iter().map(ElementKey::of).collect();
    let mut sorted_a = keys_a.clone();
    let mut sorted_b = keys_b.clone();
    sorted_a.sort_by(ElementKey::total_cmp);
    sorted_b.sort_by(ElementKey::total_cmp);
    if sorted_a
        .iter()
        .zip(&sorted_b)
        .any(|(x, y)| x.total_cmp(y) != Ordering::Equal)
    {
        return None;
    }
    if tensor_a.nonzeros().count() != tensor_b.nonzeros().count() {
        return None;
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&x, &y| keys_a[x].total_cmp(&keys_a[y]).then(x.cmp(&y)));
    let mut matcher = Matcher {
        a: basis_a,
        ta: tensor_a,
        b: basis_b,
        tb: tensor_b,
        keys_a,
        keys_b,
        order,
        mapping: vec![None; d],
        used: vec![false; d],
    };
    if matcher.search(0) {
        Some(AlgebraIsomorphism {
            mapping: matcher
                .mapping
                .into_iter()
                .map(|m| m.expect("complete"))
                .collect(),
        })
    } else {
        None
    }
}

/// Which matrix receives the diagonal completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionReading {
    /// `A_1 = A_2 + D` with `A_2` the weighted sum of off-diagonal classes.
    #[default]
    WeightedClasses,
    /// `A_1 = A + D` with `A` the original input (audit only; the result
    /// need not be connected or have positive entries).
    OriginalPlusDiagonal,
}

/// Output of [`reduce_to_regular_pair`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularPair {
    pub a1: AdjacencyMatrix,
    pub b1: AdjacencyMatrix,
    /// Common row sum `N`.
    pub row_sum: u64,
    /// Weight of each element of the first basis (`None` on diagonal ones).
    pub weights: Vec<Option<u64>>,
}

/// Builds `A_1, B_1`: symmetric, positive-integer, row sums `N`, related by
/// `iso` element for element.
pub fn reduce_to_regular_pair(
    basis_a: &CanonicalBasis,
    basis_b: &CanonicalBasis,
    iso: &AlgebraIsomorphism,
    reading: ReductionReading,
) -> Result<RegularPair> {
    let n = basis_a.n();
    let d = basis_a.dim();
    if basis_b.n() != n || basis_b.dim() != d || iso.mapping.len() != d {
        return Err(Error::Precondition(
            "isomorphism does not fit the bases".into(),
        ));
    }

    let mut offdiag: Vec<usize> = (0..d)
        .filter(|&i| !basis_a.elements()[i].is_diagonal)
        .collect();
    offdiag.sort_by_key(|&i| {
        let e = &basis_a.elements()[i];
        (e.row_degree, e.col_degree, e.support.len(), e.support[0])
    });
    let mut weights: Vec<Option<u64>> = vec![None; d];
    let mut next = 0u64;
    for &i in &offdiag {
        if weights[i].is_none() {
            next += 1;
            weights[i] = Some(next);
            weights[basis_a.elements()[i].transpose_partner] = Some(next);
        }
    }

    let base_a: Vec<u128>;
    let base_b: Vec<u128>;
    match reading {
        ReductionReading::WeightedClasses => {
            base_a = weighted_sum(basis_a, |c| weights[c].unwrap_or(0) as u128);
            let mut inverse = vec![0usize; d];
            for (i, &m) in iso.mapping.iter().enumerate() {
                inverse[m] = i;
            }
            base_b = weighted_sum(basis_b, |c| weights[inverse[c]].unwrap_or(0) as u128);
        }
        ReductionReading::OriginalPlusDiagonal => {
            let value = |b: &CanonicalBasis, c: usize| -> Result<u128> {
                let v = *b.elements()[c]
                    .values
                    .first()
                    .ok_or_else(|| Error::Precondition("basis carries no input values".into()))?;
                if v < 0.0 || v.fract() != 0.0 {
                    return Err(Error::Precondition(
                        "input values are not nonnegative integers".into(),
                    ));
                }
                Ok(v as u128)
            };
            let va = (0..d)
                .map(|c| value(basis_a, c))
                .collect::<Result<Vec<_>>>()?;
            let vb = (0..d)
                .map(|c| value(basis_b, c))
                .collect::<Result<Vec<_>>>()?;
            base_a = weighted_sum(basis_a, |c| va[c]);
            base_b = weighted_sum(basis_b, |c| vb[c]);
        }
    }

    let row_sums = |m: &[u128]| -> Vec<u128> { m.chunks(n).map(|r| r.iter().sum()).collect() };
    let rows_a = row_sums(&base_a);
    let rows_b = row_sums(&base_b);
    let big_n = rows_a.iter().chain(&rows_b).copied().max().unwrap_or(0) + 1;

    let complete = |base: Vec<u128>,
                    rows: &[u128],
                    basis: &CanonicalBasis|
     -> Result<(AdjacencyMatrix, Vec<u128>)> {
        let mut entries = base;
        let mut per_class = vec![None; basis.dim()];
        for x in 0..n {
            let fill = big_n - rows[x];
            let class = basis.color(x, x);
            match per_class[class] {
                None => per_class[class] = Some(fill),
                Some(f) if f != fill => {
                    return Err(Error::Inconsistent(format!(
                        "diagonal completion is not constant on element {}",
                        class + 1
                    )))
                }
                _ => {}
            }
            entries[x * n + x] += fill;
        }
        let entries = entries
            .into_iter()
            .map(|v| {
                u64::try_from(v).map_err(|_| Error::Inconsistent("reduced entry overflows".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((
            AdjacencyMatrix::from_entries(n, entries)?,
            per_class.into_iter().map(|f| f.unwrap_or(0)).collect(),
        ))
    };
    let (a1, fill_a) = complete(base_a, &rows_a, basis_a)?;
    let (b1, fill_b) = complete(base_b, &rows_b, basis_b)?;
    for (i, &m) in iso.mapping.iter().enumerate() {
        if basis_a.elements()[i].is_diagonal && fill_a[i] != fill_b[m] {
            return Err(Error::Inconsistent(format!(
                "diagonal completion differs between element {} and its image",
                i + 1
            )));
        }
    }
    Ok(RegularPair {
        a1,
        b1,
        row_sum: big_n as u64,
        weights,
    })
}

fn weighted_sum(basis: &CanonicalBasis, weight: impl Fn(usize) -> u128) -> Vec<u128> {
    let n = basis.n();
    (0..n * n)
        .map(|p| weight(basis.color(p / n, p % n)))
        .collect()
}
