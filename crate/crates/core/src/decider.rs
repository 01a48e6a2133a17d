//! The full decision procedure and the exact oracles used to validate it.
//!
//! Exact polynomial filters run first (invariants of the raw inputs,
//! coherent-algebra matching, the reduction to a regular pair, spectra and
//! commutant dimensions). Only pairs surviving all of them reach the
//! randomized comparison of the three volume profiles of `P(A,A)`, `P(A,B)`
//! and `P(B,B)`.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coherent::{self, ReductionReading, RegularPair};
use crate::commutant::{self, CommutantBasis, DimensionTriple};
use crate::error::{Error, Result};
use crate::graph_io::{validate_input, AdjacencyMatrix, Validation};
use crate::volume::{self, ConvexBody, ProfileConfig, RadiusSchedule, VolumeProfile};

/// Largest `n` the brute-force oracle accepts by default.
pub const BRUTE_FORCE_MAX_N: usize = 12;
/// In auto mode, inputs up to this size go to the brute-force oracle.
pub const AUTO_EXACT_MAX_N: usize = 8;
/// Tolerance for `max |X|_F = sqrt(n - 1)` in the radius check.
pub const RADIUS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Auto,
    Exact,
    Randomized,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Mode::Auto),
            "exact" => Ok(Mode::Exact),
            "randomized" | "random" => Ok(Mode::Randomized),
            other => Err(Error::Unsupported(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    ExactSimilar,
    EpsilonEtaSimilar,
    NotSimilar,
}

impl Outcome {
    pub fn is_similar(self) -> bool {
        !matches!(self, Outcome::NotSimilar)
    }
}

/// Pipeline stage that produced the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Exact,
    Validation,
    CoherentAlgebra,
    Spectrum,
    Dimension,
    Volume,
}

impl Stage {
    /// True for the stages that run before any sampling.
    pub fn is_exact(self) -> bool {
        !matches!(self, Stage::Volume)
    }
}

/// Which of the equalities between the three bodies failed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseFailure {
    /// `ratio` or `volume`.
    pub quantity: Quantity,
    /// 1-based body indices (1 = P(A,A), 2 = P(A,B), 3 = P(B,B)).
    pub first: usize,
    pub second: usize,
    pub relative_difference: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    Ratio,
    Volume,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "result")]
pub enum PhaseTest {
    Pass,
    Fail(PhaseFailure),
}

impl PhaseTest {
    pub fn passed(&self) -> bool {
        matches!(self, PhaseTest::Pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetestRecord {
    pub phase: usize,
    pub first: PhaseTest,
    pub retest: PhaseTest,
    pub epsilon: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub stage: Stage,
    /// Failing phase for volume refutations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase: Option<usize>,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
    pub epsilon: f64,
    pub eta: f64,
    pub seed: u64,
    pub mode: Mode,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dimensions: Option<DimensionTriple>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub row_sum: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<RadiusSchedule>,
    /// Profiles of P(A,A), P(A,B), P(B,B), when sampling was reached.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub profiles: Vec<VolumeProfile>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub retests: Vec<RetestRecord>,
    pub oracle_queries: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<u64>,
}

impl Verdict {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecideConfig {
    pub epsilon: f64,
    pub eta: f64,
    pub seed: u64,
    pub mode: Mode,
    /// Schedule granularity `N = n^c * delta`.
    pub granularity_exponent: f64,
    /// Per-phase sample count override (testing and budgeted runs).
    pub samples_override: Option<usize>,
    /// Only the first this-many phases are sampled.
    pub max_phases: Option<usize>,
    pub reading: ReductionReading,
    /// Record elapsed time in the verdict (breaks byte-identical reports).
    pub record_timing: bool,
}

impl DecideConfig {
    pub fn new(epsilon: f64, eta: f64, seed: u64) -> Self {
        DecideConfig {
            epsilon,
            eta,
            seed,
            mode: Mode::Auto,
            granularity_exponent: 0.0,
            samples_override: None,
            max_phases: None,
            reading: ReductionReading::WeightedClasses,
            record_timing: false,
        }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    /// Sample multiplier derived from `eta`: 1 at `eta = 0.05`, growing like
    /// `log(1/eta)` below it.
    pub fn eta_sample_factor(&self) -> f64 {
        ((1.0 / self.eta).ln() / 20f64.ln()).max(1.0)
    }

    fn profile_config(&self) -> ProfileConfig {
        let mut cfg = ProfileConfig::new(self.epsilon);
        cfg.samples_override = self.samples_override;
        cfg.sample_factor = self.eta_sample_factor();
        cfg.max_phases = self.max_phases;
        cfg
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Precondition(format!(
                "epsilon {} outside (0, 1)",
                self.epsilon
            )));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(Error::Precondition(format!(
                "eta {} outside (0, 1)",
                self.eta
            )));
        }
        Ok(())
    }
}

struct Report {
    cfg: DecideConfig,
    n: usize,
    started: Instant,
    dimensions: Option<DimensionTriple>,
    row_sum: Option<u64>,
    schedule: Option<RadiusSchedule>,
    profiles: Vec<VolumeProfile>,
    retests: Vec<RetestRecord>,
    oracle_queries: u64,
}

impl Report {
    fn finish(
        self,
        outcome: Outcome,
        stage: Stage,
        phase: Option<usize>,
        detail: String,
        witness: Option<Vec<usize>>,
    ) -> Verdict {
        Verdict {
            outcome,
            stage,
            phase,
            detail,
            witness,
            epsilon: self.cfg.epsilon,
            eta: self.cfg.eta,
            seed: self.cfg.seed,
            mode: self.cfg.mode,
            n: self.n,
            dimensions: self.dimensions,
            row_sum: self.row_sum,
            schedule: self.schedule,
            profiles: self.profiles,
            retests: self.retests,
            oracle_queries: self.oracle_queries,
            wall_clock_ms: self
                .cfg
                .record_timing
                .then(|| self.started.elapsed().as_millis() as u64),
        }
    }

    fn refute(self, stage: Stage, detail: impl Into<String>) -> Verdict {
        self.finish(Outcome::NotSimilar, stage, None, detail.into(), None)
    }
}

/// Decides whether `b = P a P^T` for some permutation `P`.
pub fn decide(a: &AdjacencyMatrix, b: &AdjacencyMatrix, cfg: &DecideConfig) -> Result<Verdict> {
    cfg.validate()?;
    let n = a.n();
    let report = Report {
        cfg: *cfg,
        n,
        started: Instant::now(),
        dimensions: None,
        row_sum: None,
        schedule: None,
        profiles: Vec::new(),
        retests: Vec::new(),
        oracle_queries: 0,
    };
    if b.n() != n {
        return Ok(report.refute(
            Stage::Validation,
            format!("orders differ: {n} vs {}", b.n()),
        ));
    }
    if a == b {
        return Ok(report.finish(
            Outcome::ExactSimilar,
            Stage::Exact,
            None,
            "inputs are identical".into(),
            Some((0..n).collect()),
        ));
    }
    let exact = match cfg.mode {
        Mode::Exact => true,
        Mode::Auto => n <= AUTO_EXACT_MAX_N,
        Mode::Randomized => false,
    };
    if exact {
        return Ok(match brute_force_similar(a, b)? {
            Some(p) => report.finish(
                Outcome::ExactSimilar,
                Stage::Exact,
                None,
                "witness permutation verified".into(),
                Some(p),
            ),
            None => report.refute(
                Stage::Exact,
                "no permutation maps the first matrix onto the second",
            ),
        });
    }

    let mut report = report;
    let (a1, b1, dims) = match exact_filters(a, b, cfg.reading)? {
        Filters::Refuted { stage, detail } => return Ok(report.refute(stage, detail)),
        Filters::Passed { pair, dimensions } => {
            report.row_sum = Some(pair.row_sum);
            report.dimensions = Some(dimensions);
            (pair.a1, pair.b1, dimensions)
        }
    };
    let (a1, b1) = (&a1, &b1);
    let delta = dims.aa;

    // Volumes.
    let granularity = ((n as f64).powf(cfg.granularity_exponent) * delta as f64)
        .round()
        .max(1.0) as usize;
    let schedule = volume::radius_schedule(n, granularity)?;
    let t_max = *schedule.radii.last().expect("nonempty schedule");
    let bases: Vec<CommutantBasis> = [(a1, a1), (a1, b1), (b1, b1)]
        .into_iter()
        .map(|(s, t)| commutant::commutant_basis(s, t))
        .collect::<Result<_>>()?;
    let bodies: Vec<ConvexBody> = bases
        .iter()
        .map(|b| ConvexBody::from_commutant(b, t_max))
        .collect::<Result<_>>()?;
    let pcfg = cfg.profile_config();
    let profiles: Vec<VolumeProfile> = (0..3)
        .into_par_iter()
        .map(|k| {
            volume::volume_profile(
                &bodies[k],
                &schedule,
                &pcfg,
                volume::derive_seed(cfg.seed, &[k as u64 + 1]),
            )
        })
        .collect::<Result<_>>()?;
    let mut profiles: [VolumeProfile; 3] = profiles.try_into().expect("three profiles");
    report.schedule = Some(schedule.clone());

    let bodies: [&ConvexBody; 3] = [&bodies[0], &bodies[1], &bodies[2]];
    let phases = profiles[0].phases.len();
    let mut failed = None;
    for j in 1..=phases {
        let first = test_phase_equalities(&profiles, j, cfg.epsilon);
        if first.passed() {
            continue;
        }
        let seed = volume::derive_seed(cfg.seed, &[0x5245_5445_5354, j as u64]);
        let (outcome, record) = retest(bodies, &mut profiles, j, cfg.epsilon, &pcfg, seed)?;
        report.retests.push(record);
        if !outcome.passed() {
            failed = Some((j, outcome));
            break;
        }
    }
    report.oracle_queries = profiles.iter().map(|p| p.oracle_queries).sum();
    report.profiles = profiles.into();
    Ok(match failed {
        None => {
            let detail = format!(
                "all {phases} phase equalities hold within epsilon = {}",
                cfg.epsilon
            );
            report.finish(
                Outcome::EpsilonEtaSimilar,
                Stage::Volume,
                None,
                detail,
                None,
            )
        }
        Some((j, PhaseTest::Fail(f))) => {
            let detail = format!(
                "{:?} of bodies {} and {} differ by {:.4} after retest",
                f.quantity, f.first, f.second, f.relative_difference
            );
            report.finish(Outcome::NotSimilar, Stage::Volume, Some(j), detail, None)
        }
        Some((_, PhaseTest::Pass)) => unreachable!("only failures are recorded"),
    })
}

/// Result of the exact stages that precede sampling.
#[derive(Debug, Clone)]
pub enum Filters {
    Refuted {
        stage: Stage,
        detail: String,
    },
    Passed {
        pair: RegularPair,
        dimensions: DimensionTriple,
    },
}

impl Filters {
    pub fn is_refuted(&self) -> bool {
        matches!(self, Filters::Refuted { .. })
    }
}

/// Runs every exact filter: raw invariants, coherent-algebra isomorphism,
/// the reduction to a regular pair, characteristic polynomials and the
/// commutant dimension triple.
pub fn exact_filters(
    a: &AdjacencyMatrix,
    b: &AdjacencyMatrix,
    reading: ReductionReading,
) -> Result<Filters> {
    let refuted = |stage, detail: String| Ok(Filters::Refuted { stage, detail });
    if a.n() != b.n() {
        return refuted(
            Stage::Validation,
            format!("orders differ: {} vs {}", a.n(), b.n()),
        );
    }
    if let Some(why) = invariant_mismatch(a, b) {
        return refuted(Stage::Validation, why);
    }

    let basis_a = coherent::coherent_closure_of(a)?;
    let basis_b = coherent::coherent_closure_of(b)?;
    let tensor_a = coherent::structure_tensor(&basis_a)?;
    let tensor_b = coherent::structure_tensor(&basis_b)?;
    let Some(iso) = coherent::match_algebras(&basis_a, &tensor_a, &basis_b, &tensor_b) else {
        return refuted(
            Stage::CoherentAlgebra,
            format!(
                "coherent algebras are not isomorphic (dimensions {} and {})",
                basis_a.dim(),
                basis_b.dim()
            ),
        );
    };
    let pair = coherent::reduce_to_regular_pair(&basis_a, &basis_b, &iso, reading)?;
    for m in [&pair.a1, &pair.b1] {
        let v = validate_input(m);
        if !matches!(v, Validation::Ok(_)) {
            return Err(Error::Inconsistent(format!(
                "reduced matrix fails validation: {v:?}"
            )));
        }
    }

    // spectra and commutant dimensions must tell the same story
    let cospectral = commutant::power_traces(&pair.a1) == commutant::power_traces(&pair.b1);
    let dims = commutant::dimension_triple(&pair.a1, &pair.b1)?;
    let dims_equal = dims.aa == dims.ab && dims.ab == dims.bb;
    if cospectral != dims_equal {
        return Err(Error::Inconsistent(format!(
            "characteristic polynomials {} but dimensions are {:?}",
            if cospectral { "agree" } else { "differ" },
            dims
        )));
    }
    if !cospectral {
        return refuted(
            Stage::Spectrum,
            format!(
                "characteristic polynomials differ; commutant dimensions P(A,A) {}, P(A,B) {}, P(B,B) {}",
                dims.aa, dims.ab, dims.bb
            ),
        );
    }
    if dims.aa == 0 {
        return refuted(Stage::Dimension, "P(A,B) is zero-dimensional".into());
    }
    Ok(Filters::Passed {
        pair,
        dimensions: dims,
    })
}

/// Permutation invariants of the raw inputs; returns a description of the
/// first mismatch.
fn invariant_mismatch(a: &AdjacencyMatrix, b: &AdjacencyMatrix) -> Option<String> {
    if a.is_symmetric() != b.is_symmetric() {
        return Some("exactly one input is symmetric".into());
    }
    if a.is_connected() != b.is_connected() {
        return Some("exactly one input is connected".into());
    }
    let sorted = |mut v: Vec<u128>| {
        v.sort_unstable();
        v
    };
    if sorted(a.row_sums()) != sorted(b.row_sums()) {
        return Some("degree sequences differ".into());
    }
    let col_sums = |m: &AdjacencyMatrix| {
        (0..m.n())
            .map(|j| (0..m.n()).map(|i| m.get(i, j) as u128).sum())
            .collect()
    };
    if sorted(col_sums(a)) != sorted(col_sums(b)) {
        return Some("column sum sequences differ".into());
    }
    let diag = |m: &AdjacencyMatrix| (0..m.n()).map(|i| m.get(i, i) as u128).collect();
    if sorted(diag(a)) != sorted(diag(b)) {
        return Some("diagonals differ as multisets".into());
    }
    let mut ea = a.entries().to_vec();
    let mut eb = b.entries().to_vec();
    ea.sort_unstable();
    eb.sort_unstable();
    if ea != eb {
        return Some("entry multisets differ".into());
    }
    None
}

/// Relative difference `|x - y| / min(x, y)` of two positive numbers.
fn relative_difference(x: f64, y: f64) -> f64 {
    (x - y).abs() / x.min(y)
}

/// Tests, at phase `j`, that the three ratio estimates agree pairwise and
/// that the three cumulative volumes agree pairwise, all within relative
/// error `epsilon`.
pub fn test_phase_equalities(profiles: &[VolumeProfile; 3], j: usize, epsilon: f64) -> PhaseTest {
    const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];
    for &(x, y) in &PAIRS {
        let d = relative_difference(
            profiles[x].phases[j - 1].ratio,
            profiles[y].phases[j - 1].ratio,
        );
        if !(d <= epsilon) {
            return PhaseTest::Fail(PhaseFailure {
                quantity: Quantity::Ratio,
                first: x + 1,
                second: y + 1,
                relative_difference: d,
            });
        }
    }
    for &(x, y) in &PAIRS {
        let d = (profiles[x].log_volumes[j] - profiles[y].log_volumes[j])
            .abs()
            .exp_m1();
        if !(d <= epsilon) {
            return PhaseTest::Fail(PhaseFailure {
                quantity: Quantity::Volume,
                first: x + 1,
                second: y + 1,
                relative_difference: d,
            });
        }
    }
    PhaseTest::Pass
}

/// Second strike for a failed phase: if phase `j` fails at `epsilon`, it is
/// re-estimated on all three bodies with fresh seeds and twice the samples,
/// replacing the stored estimates, and tested again at `epsilon / 2`. A
/// phase that already passes is left untouched.
pub fn retest(
    bodies: [&ConvexBody; 3],
    profiles: &mut [VolumeProfile; 3],
    j: usize,
    epsilon: f64,
    cfg: &ProfileConfig,
    seed: u64,
) -> Result<(PhaseTest, RetestRecord)> {
    let first = test_phase_equalities(profiles, j, epsilon);
    let samples = 2 * cfg.samples(profiles[0].schedule.granularity);
    if first.passed() {
        let record = RetestRecord {
            phase: j,
            first,
            retest: first,
            epsilon,
            samples: 0,
        };
        return Ok((first, record));
    }
    let fresh: Vec<_> = (0..3)
        .into_par_iter()
        .map(|k| {
            volume::estimate_phase(
                bodies[k],
                &profiles[k].schedule,
                j,
                samples,
                cfg,
                volume::derive_seed(seed, &[k as u64]),
            )
        })
        .collect::<Result<_>>()?;
    for (profile, phase) in profiles.iter_mut().zip(fresh) {
        profile.replace_phase(phase);
    }
    let tighter = epsilon / 2.0;
    let second = test_phase_equalities(profiles, j, tighter);
    Ok((
        second,
        RetestRecord {
            phase: j,
            first,
            retest: second,
            epsilon: tighter,
            samples,
        },
    ))
}

/// Exhaustive search for `P` with `B = P A P^T`, returned as the vertex map
/// `perm` with `B[perm[i]][perm[j]] = A[i][j]`.
pub fn brute_force_similar(a: &AdjacencyMatrix, b: &AdjacencyMatrix) -> Result<Option<Vec<usize>>> {
    brute_force_similar_capped(a, b, BRUTE_FORCE_MAX_N)
}

pub fn brute_force_similar_capped(
    a: &AdjacencyMatrix,
    b: &AdjacencyMatrix,
    cap: usize,
) -> Result<Option<Vec<usize>>> {
    let n = a.n();
    if n > cap {
        return Err(Error::Refused(format!(
            "brute force limited to n <= {cap}, got {n}"
        )));
    }
    if b.n() != n {
        return Ok(None);
    }
    // per-vertex invariant: diagonal entry, sorted row, sorted column
    let signature = |m: &AdjacencyMatrix, v: usize| {
        let mut row: Vec<u64> = (0..n).filter(|&j| j != v).map(|j| m.get(v, j)).collect();
        let mut col: Vec<u64> = (0..n).filter(|&i| i != v).map(|i| m.get(i, v)).collect();
        row.sort_unstable();
        col.sort_unstable();
        (m.get(v, v), row, col)
    };
    let sig_a: Vec<_> = (0..n).map(|v| signature(a, v)).collect();
    let sig_b: Vec<_> = (0..n).map(|v| signature(b, v)).collect();
    let mut sa = sig_a.clone();
    let mut sb = sig_b.clone();
    sa.sort();
    sb.sort();
    if sa != sb {
        return Ok(None);
    }
    // assign vertices with the fewest candidates first
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| sig_b.iter().filter(|s| **s == sig_a[v]).count());
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn extend(
        depth: usize,
        order: &[usize],
        a: &AdjacencyMatrix,
        b: &AdjacencyMatrix,
        compatible: &dyn Fn(usize, usize) -> bool,
        perm: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let v = order[depth];
        for w in 0..b.n() {
            if used[w] || !compatible(v, w) {
                continue;
            }
            let consistent = order[..depth]
                .iter()
                .all(|&u| a.get(v, u) == b.get(w, perm[u]) && a.get(u, v) == b.get(perm[u], w));
            if !consistent {
                continue;
            }
            perm[v] = w;
            used[w] = true;
            if extend(depth + 1, order, a, b, compatible, perm, used) {
                return true;
            }
            used[w] = false;
        }
        perm[v] = usize::MAX;
        false
    }

    let compatible = |v: usize, w: usize| sig_a[v] == sig_b[w];
    if extend(0, &order, a, b, &compatible, &mut perm, &mut used) {
        if a.permuted(&perm) != *b {
            return Err(Error::Inconsistent(
                "brute-force witness fails verification".into(),
            ));
        }
        Ok(Some(perm))
    } else {
        Ok(None)
    }
}

/// Whether the radius of `P(S,T)` reaches `sqrt(n-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadiusCheck {
    Attained,
    NotAttained,
    Unknown,
}

/// Largest dimension handled by vertex enumeration.
pub const RADIUS_CHECK_MAX_DIM: usize = 3;

/// Exact radius certificate for `delta <= 3` by enumerating the vertices of
/// the polytope; `Unknown` above that.
pub fn frobenius_radius_check(basis: &CommutantBasis) -> RadiusCheck {
    let delta = basis.delta();
    let n = basis.n();
    let target = ((n as f64) - 1.0).sqrt();
    if delta > RADIUS_CHECK_MAX_DIM {
        return RadiusCheck::Unknown;
    }
    if delta == 0 {
        return if n <= 1 {
            RadiusCheck::Attained
        } else {
            RadiusCheck::NotAttained
        };
    }
    let rhs = -1.0 / n as f64;
    let mut normals: Vec<DVector<f64>> = (0..n * n)
        .map(|p| basis.inequality_vector(p / n, p % n).clone())
        .collect();
    normals.retain(|u| u.amax() > 1e-14);
    normals.sort_by(|x, y| {
        x.iter()
            .zip(y.iter())
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    normals.dedup_by(|x, y| (&*x - &*y).amax() < 1e-12);
    let feasible = |x: &DVector<f64>| normals.iter().all(|u| u.dot(x) >= rhs - 1e-9);

    let mut best: f64 = 0.0;
    let mut idx: Vec<usize> = (0..delta).collect();
    let m = normals.len();
    if m < delta {
        return RadiusCheck::Unknown;
    }
    loop {
        let sys = DMatrix::from_fn(delta, delta, |r, c| normals[idx[r]][c]);
        if let Some(inv) = sys.clone().try_inverse() {
            if sys.determinant().abs() > 1e-12 {
                let x = inv * DVector::from_element(delta, rhs);
                if feasible(&x) {
                    best = best.max(basis.reconstruct(&x).norm());
                }
            }
        }
        // next combination
        let mut k = delta;
        loop {
            if k == 0 {
                return if (best - target).abs() <= RADIUS_TOL {
                    RadiusCheck::Attained
                } else {
                    RadiusCheck::NotAttained
                };
            }
            k -= 1;
            if idx[k] < m - delta + k {
                idx[k] += 1;
                for l in k + 1..delta {
                    idx[l] = idx[l - 1] + 1;
                }
                break;
            }
        }
    }
}
