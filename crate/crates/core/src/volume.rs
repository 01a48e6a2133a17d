//! Multiphase volume estimation for convex bodies of the form
//! `{x : u_k^T x >= b_k} ∩ B(0, t)` with the origin strictly inside.
//!
//! Along the radius schedule `t_j = 2^(j/N) / n`, each phase samples the body
//! capped at `t_j` with a hit-and-run chain and estimates
//! `vol(K ∩ B(t_j)) / vol(K ∩ B(t_{j-1}))` as the inverse fraction of samples
//! that land in the smaller ball. The product of the phase ratios, anchored
//! at the exactly known volume of the inner ball `B(0, 1/n)`, gives absolute
//! volumes.

use std::sync::Arc;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::commutant::CommutantBasis;
use crate::error::{Error, Result};

/// Consecutive degenerate chords tolerated before the chain gives up.
const MAX_DEGENERATE: usize = 10_000;
/// Maximum nesting of phase subdivisions after a zero-hit phase.
const MAX_SUBDIVISION_DEPTH: usize = 12;
/// Incrementally updated constraint values are refreshed this often.
const REFRESH_EVERY: u64 = 512;

#[derive(Debug, Clone, PartialEq)]
struct Halfspaces {
    dim: usize,
    /// Row-major `m x dim`.
    normals: Vec<f64>,
    offsets: Vec<f64>,
}

impl Halfspaces {
    fn len(&self) -> usize {
        self.offsets.len()
    }

    fn row(&self, k: usize) -> &[f64] {
        &self.normals[k * self.dim..(k + 1) * self.dim]
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (k, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(k), x);
        }
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Polytope capped by a centred ball.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexBody {
    halfspaces: Arc<Halfspaces>,
    ball_radius: f64,
    /// Number of constraints before duplicates and vacuous rows were removed.
    raw_constraints: usize,
}

impl ConvexBody {
    /// `{x : u_k^T x >= b_k for all k, |x| <= radius}`. Requires every
    /// `b_k < 0`. Exact duplicates and zero normals are dropped.
    pub fn new(dim: usize, constraints: Vec<(DVector<f64>, f64)>, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Precondition(format!(
                "ball radius {radius} must be positive"
            )));
        }
        let raw_constraints = constraints.len();
        let mut rows: Vec<(Vec<f64>, f64)> = Vec::with_capacity(constraints.len());
        for (u, b) in constraints {
            if u.len() != dim {
                return Err(Error::Shape(format!(
                    "constraint of length {} in dimension {dim}",
                    u.len()
                )));
            }
            if b >= 0.0 {
                return Err(Error::Precondition(
                    "origin must be strictly inside every constraint".into(),
                ));
            }
            if u.amax() <= 1e-14 {
                continue;
            }
            // scale to offset -1 so duplicates compare directly
            let scale = -1.0 / b;
            rows.push((u.iter().map(|v| v * scale).collect(), -1.0));
        }
        rows.sort_by(|a, b| {
            a.0.iter()
                .zip(&b.0)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        rows.dedup_by(|a, b| a.0.iter().zip(&b.0).all(|(x, y)| (x - y).abs() <= 1e-12));
        let offsets = rows.iter().map(|r| r.1).collect();
        let normals = rows.into_iter().flat_map(|r| r.0).collect();
        Ok(ConvexBody {
            halfspaces: Arc::new(Halfspaces {
                dim,
                normals,
                offsets,
            }),
            ball_radius: radius,
            raw_constraints,
        })
    }

    /// The ball `B(0, radius)` in `dim` dimensions.
    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        Self::new(dim, Vec::new(), radius)
    }

    /// The polytope `{x : u_(i,j)^T x >= -1/n}` of a commutant basis.
    pub fn from_commutant(basis: &CommutantBasis, radius: f64) -> Result<Self> {
        let n = basis.n();
        let b = -1.0 / n as f64;
        let constraints = (0..n * n)
            .map(|p| (basis.inequality_vector(p / n, p % n).clone(), b))
            .collect();
        Self::new(basis.delta(), constraints, radius)
    }

    /// Same constraints, different ball cap.
    pub fn with_radius(&self, radius: f64) -> Self {
        ConvexBody {
            halfspaces: Arc::clone(&self.halfspaces),
            ball_radius: radius,
            raw_constraints: self.raw_constraints,
        }
    }

    pub fn dim(&self) -> usize {
        self.halfspaces.dim
    }

    pub fn ball_radius(&self) -> f64 {
        self.ball_radius
    }

    /// Distinct nonvacuous constraints kept.
    pub fn constraint_count(&self) -> usize {
        self.halfspaces.len()
    }

    pub fn raw_constraint_count(&self) -> usize {
        self.raw_constraints
    }

    /// Radius of the largest centred ball inside the polytope part.
    pub fn inner_radius(&self) -> f64 {
        let h = &self.halfspaces;
        (0..h.len())
            .map(|k| -h.offsets[k] / dot(h.row(k), h.row(k)).sqrt())
            .fold(self.ball_radius, f64::min)
    }

    fn shares_constraints(&self, other: &ConvexBody) -> bool {
        Arc::ptr_eq(&self.halfspaces, &other.halfspaces) || self.halfspaces == other.halfspaces
    }
}

/// Membership oracle.
pub fn membership(body: &ConvexBody, x: &DVector<f64>) -> bool {
    membership_within(body, x, 0.0)
}

/// Membership with every constraint relaxed by `tol` (constraints are
/// normalized to offset -1, so `tol` is relative), for certifying points on
/// the boundary.
pub fn membership_within(body: &ConvexBody, x: &DVector<f64>, tol: f64) -> bool {
    assert_eq!(x.len(), body.dim(), "dimension mismatch");
    let xs = x.as_slice();
    dot(xs, xs).sqrt() <= body.ball_radius * (1.0 + tol)
        && (0..body.halfspaces.len())
            .all(|k| dot(body.halfspaces.row(k), xs) >= body.halfspaces.offsets[k] - tol)
}

/// Radii `t_j = 2^(j/N) / n`, `j = 0..=M`, `M = ceil(N log2(n sqrt(n-1)))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusSchedule {
    pub n: usize,
    pub granularity: usize,
    pub radii: Vec<f64>,
}

impl RadiusSchedule {
    /// Number of phases `M`.
    pub fn phases(&self) -> usize {
        self.radii.len() - 1
    }
}

pub fn radius_schedule(n: usize, granularity: usize) -> Result<RadiusSchedule> {
    if n < 2 || granularity == 0 {
        return Err(Error::Precondition(format!(
            "schedule needs n >= 2 and N >= 1 (got n = {n}, N = {granularity})"
        )));
    }
    let span = (n as f64).log2() + 0.5 * ((n - 1) as f64).log2();
    let m = (granularity as f64 * span - 1e-9).ceil().max(0.0) as usize;
    let radii = (0..=m)
        .map(|j| (j as f64 / granularity as f64).exp2() / n as f64)
        .collect();
    Ok(RadiusSchedule {
        n,
        granularity,
        radii,
    })
}

/// Logarithm used in the per-phase sample count `400 eps^-2 N log N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleLog {
    #[default]
    Natural,
    Binary,
}

/// `ceil(400 eps^-2 max(N log N, 1))`.
pub fn samples_per_phase(epsilon: f64, granularity: usize, log: SampleLog) -> usize {
    let nf = granularity as f64;
    let nlog = match log {
        SampleLog::Natural => nf * nf.ln(),
        SampleLog::Binary => nf * nf.log2(),
    };
    (400.0 / (epsilon * epsilon) * nlog.max(1.0)).ceil() as usize
}

/// Mixes a master seed with a path of counters (SplitMix64 finaliser).
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    path.iter().fold(mix(master), |acc, &p| mix(acc ^ mix(p)))
}

/// Hit-and-run chain on a [`ConvexBody`], started at the origin.
pub struct HitAndRun<'a> {
    body: &'a ConvexBody,
    rng: ChaCha8Rng,
    x: Vec<f64>,
    values: Vec<f64>,
    dir: Vec<f64>,
    dir_values: Vec<f64>,
    steps: u64,
}

impl<'a> HitAndRun<'a> {
    pub fn new(body: &'a ConvexBody, seed: u64) -> Self {
        let dim = body.dim();
        let m = body.halfspaces.len();
        HitAndRun {
            body,
            rng: ChaCha8Rng::seed_from_u64(seed),
            x: vec![0.0; dim],
            values: vec![0.0; m],
            dir: vec![0.0; dim],
            dir_values: vec![0.0; m],
            steps: 0,
        }
    }

    pub fn position(&self) -> &[f64] {
        &self.x
    }

    /// Chord steps taken so far (each is one pass over all constraints).
    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Uniform direction, then a uniform point on the feasible chord.
    pub fn step(&mut self) -> Result<()> {
        let h = &*self.body.halfspaces;
        let r2 = self.body.ball_radius * self.body.ball_radius;
        for _ in 0..MAX_DEGENERATE {
            let mut norm2 = 0.0;
            for d in self.dir.iter_mut() {
                let g: f64 = self.rng.sample(StandardNormal);
                *d = g;
                norm2 += g * g;
            }
            if norm2 < 1e-300 {
                continue;
            }
            let inv = norm2.sqrt().recip();
            self.dir.iter_mut().for_each(|d| *d *= inv);

            // sphere: s^2 + 2 s (x.d) + |x|^2 - t^2 <= 0
            let xd = dot(&self.x, &self.dir);
            let xx = dot(&self.x, &self.x);
            let disc = xd * xd - (xx - r2);
            if disc.is_nan() || disc < 0.0 {
                continue;
            }
            let root = disc.sqrt();
            let (mut lo, mut hi) = (-xd - root, -xd + root);
            h.apply(&self.dir, &mut self.dir_values);
            for k in 0..h.len() {
                let ud = self.dir_values[k];
                let slack = h.offsets[k] - self.values[k];
                if ud > 0.0 {
                    lo = lo.max(slack / ud);
                } else if ud < 0.0 {
                    hi = hi.min(slack / ud);
                }
            }
            if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
                continue;
            }
            let s = self.rng.gen_range(lo..hi);
            for (xi, di) in self.x.iter_mut().zip(&self.dir) {
                *xi += s * di;
            }
            self.steps += 1;
            if self.steps.is_multiple_of(REFRESH_EVERY) {
                h.apply(&self.x, &mut self.values);
            } else {
                for (v, dv) in self.values.iter_mut().zip(&self.dir_values) {
                    *v += s * dv;
                }
            }
            return Ok(());
        }
        Err(Error::Sampling(format!(
            "{MAX_DEGENERATE} consecutive degenerate chords"
        )))
    }

    /// Advances `n` steps.
    pub fn advance(&mut self, n: usize) -> Result<()> {
        for _ in 0..n {
            self.step()?;
        }
        Ok(())
    }
}

/// Default burn-in `10 dim^2` steps.
pub fn default_burn_in(dim: usize) -> usize {
    10 * dim * dim
}

/// Default stride `dim` steps.
pub fn default_stride(dim: usize) -> usize {
    dim.max(1)
}

/// Approximately uniform points from `body`: a hit-and-run chain from the
/// origin, every `stride`-th state after `burn_in` steps.
pub fn sample_uniform(
    body: &ConvexBody,
    count: usize,
    burn_in: usize,
    stride: usize,
    seed: u64,
) -> Result<Vec<DVector<f64>>> {
    let mut chain = HitAndRun::new(body, seed);
    chain.advance(burn_in)?;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        chain.advance(stride.max(1))?;
        out.push(DVector::from_column_slice(chain.position()));
    }
    Ok(out)
}

/// `vol(outer) / vol(inner)` estimated from samples of `outer`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    pub ratio: f64,
    pub stderr: f64,
    pub samples: usize,
    pub hits: usize,
}

impl RatioEstimate {
    fn from_counts(samples: usize, hits: usize) -> Result<Self> {
        if hits == 0 {
            return Err(Error::Sampling(format!(
                "no sample of {samples} landed in the inner body"
            )));
        }
        let q = hits as f64 / samples as f64;
        let se_q = (q * (1.0 - q) / samples as f64).sqrt();
        Ok(RatioEstimate {
            ratio: 1.0 / q,
            stderr: se_q / (q * q),
            samples,
            hits,
        })
    }

    /// Relative standard error.
    pub fn rel_stderr(&self) -> f64 {
        self.stderr / self.ratio
    }
}

fn inner_test<'a>(outer: &ConvexBody, inner: &'a ConvexBody) -> impl Fn(&[f64]) -> bool + 'a {
    let shared = outer.shares_constraints(inner);
    let r2 = inner.ball_radius * inner.ball_radius;
    move |x: &[f64]| {
        if shared {
            dot(x, x) <= r2
        } else {
            membership(inner, &DVector::from_column_slice(x))
        }
    }
}

/// Ratio of volumes from samples of the outer body. `inner` must be
/// contained in `outer`.
pub fn estimate_ratio(
    outer: &ConvexBody,
    inner: &ConvexBody,
    samples: &[DVector<f64>],
) -> Result<RatioEstimate> {
    let inside = inner_test(outer, inner);
    let hits = samples.iter().filter(|x| inside(x.as_slice())).count();
    RatioEstimate::from_counts(samples.len(), hits)
}

/// Sampler settings for a volume profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileConfig {
    pub epsilon: f64,
    pub log: SampleLog,
    /// Fixed per-phase sample count instead of the formula.
    pub samples_override: Option<usize>,
    /// Multiplier on the formula's sample count.
    pub sample_factor: f64,
    /// Burn-in steps; `None` means `10 dim^2`.
    pub burn_in: Option<usize>,
    /// Steps between recorded states; `None` means `dim`.
    pub stride: Option<usize>,
    /// Only the first this-many phases are estimated.
    pub max_phases: Option<usize>,
}

impl ProfileConfig {
    pub fn new(epsilon: f64) -> Self {
        ProfileConfig {
            epsilon,
            log: SampleLog::Natural,
            samples_override: None,
            sample_factor: 1.0,
            burn_in: None,
            stride: None,
            max_phases: None,
        }
    }

    pub fn samples(&self, granularity: usize) -> usize {
        self.samples_override.unwrap_or_else(|| {
            (samples_per_phase(self.epsilon, granularity, self.log) as f64 * self.sample_factor)
                .ceil() as usize
        })
    }
}

/// One phase `j`: ratio of the bodies capped at `t_j` and `t_{j-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub j: usize,
    pub t_j: f64,
    pub ratio: f64,
    pub stderr: f64,
    pub samples: usize,
    pub hits: usize,
    /// Extra radii inserted after zero-hit runs.
    pub subdivisions: usize,
    pub steps: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeProfile {
    pub dim: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub schedule: RadiusSchedule,
    pub phases: Vec<Phase>,
    /// `log vol(K ∩ B(t_j))` for `j = 0..=phases.len()`; entry 0 is the exact
    /// inner ball.
    pub log_volumes: Vec<f64>,
    /// Standard error of each cumulative log-volume.
    pub log_volume_stderr: Vec<f64>,
    /// Total hit-and-run steps.
    pub oracle_queries: u64,
}

impl VolumeProfile {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Replace phase `j`'s estimate and recompute the cumulative volumes.
    pub fn replace_phase(&mut self, phase: Phase) {
        let idx = phase.j - 1;
        self.oracle_queries += phase.steps;
        self.phases[idx] = phase;
        self.recompute_cumulative();
    }

    fn recompute_cumulative(&mut self) {
        let base = self.log_volumes[0];
        self.log_volumes.truncate(1);
        self.log_volume_stderr.truncate(1);
        let mut acc = base;
        let mut var = 0.0;
        for p in &self.phases {
            acc += p.ratio.ln();
            var += (p.stderr / p.ratio).powi(2);
            self.log_volumes.push(acc);
            self.log_volume_stderr.push(var.sqrt());
        }
    }
}

/// `log` of the volume of the `dim`-ball of radius `r`.
pub fn log_ball_volume(dim: usize, r: f64) -> f64 {
    let d = dim as f64;
    0.5 * d * std::f64::consts::PI.ln() - ln_gamma(0.5 * d + 1.0) + d * r.ln()
}

fn sample_ratio(
    outer: &ConvexBody,
    inner_radius: f64,
    samples: usize,
    cfg: &ProfileConfig,
    seed: u64,
) -> Result<(usize, u64)> {
    let dim = outer.dim();
    let burn_in = cfg.burn_in.unwrap_or_else(|| default_burn_in(dim));
    let stride = cfg.stride.unwrap_or_else(|| default_stride(dim)).max(1);
    let r2 = inner_radius * inner_radius;
    let mut chain = HitAndRun::new(outer, seed);
    chain.advance(burn_in)?;
    let mut hits = 0usize;
    for _ in 0..samples {
        chain.advance(stride)?;
        let x = chain.position();
        if dot(x, x) <= r2 {
            hits += 1;
        }
    }
    Ok((hits, chain.steps()))
}

/// Estimates `vol(K ∩ B(outer)) / vol(K ∩ B(inner))`, subdividing the
/// radius interval whenever a run sees no inner hits.
fn estimate_between(
    body: &ConvexBody,
    inner: f64,
    outer: f64,
    samples: usize,
    cfg: &ProfileConfig,
    seed: u64,
    depth: usize,
) -> Result<(RatioEstimate, usize, u64)> {
    let capped = body.with_radius(outer);
    let (hits, steps) = sample_ratio(&capped, inner, samples, cfg, seed)?;
    if hits > 0 {
        return Ok((RatioEstimate::from_counts(samples, hits)?, 0, steps));
    }
    if depth >= MAX_SUBDIVISION_DEPTH {
        return Err(Error::Sampling(format!(
            "no inner hits between radii {inner} and {outer} after {depth} subdivisions"
        )));
    }
    let mid = (inner * outer).sqrt();
    let (lower, s1, q1) = estimate_between(
        body,
        inner,
        mid,
        samples,
        cfg,
        derive_seed(seed, &[1]),
        depth + 1,
    )?;
    let (upper, s2, q2) = estimate_between(
        body,
        mid,
        outer,
        samples,
        cfg,
        derive_seed(seed, &[2]),
        depth + 1,
    )?;
    let ratio = lower.ratio * upper.ratio;
    let rel = (lower.rel_stderr().powi(2) + upper.rel_stderr().powi(2)).sqrt();
    let combined = RatioEstimate {
        ratio,
        stderr: rel * ratio,
        samples: samples * 2,
        hits: lower.hits.min(upper.hits),
    };
    Ok((combined, s1 + s2 + 1, steps + q1 + q2))
}

/// Estimates phase `j` of `schedule` on `body` with the given sample count.
pub fn estimate_phase(
    body: &ConvexBody,
    schedule: &RadiusSchedule,
    j: usize,
    samples: usize,
    cfg: &ProfileConfig,
    seed: u64,
) -> Result<Phase> {
    if j == 0 || j > schedule.phases() {
        return Err(Error::Precondition(format!(
            "phase {j} outside 1..={}",
            schedule.phases()
        )));
    }
    if samples == 0 {
        return Err(Error::Precondition(
            "phase needs at least one sample".into(),
        ));
    }
    let (inner, outer) = (schedule.radii[j - 1], schedule.radii[j]);
    let (est, subdivisions, steps) = estimate_between(body, inner, outer, samples, cfg, seed, 0)?;
    let bound = (outer / inner).powi(body.dim() as i32);
    if est.ratio > bound + 5.0 * est.stderr + 1e-9 {
        return Err(Error::Sampling(format!(
            "phase {j} ratio {} exceeds the ball scaling bound {bound} by more than 5 standard errors",
            est.ratio
        )));
    }
    Ok(Phase {
        j,
        t_j: outer,
        ratio: est.ratio,
        stderr: est.stderr,
        samples: est.samples,
        hits: est.hits,
        subdivisions,
        steps,
    })
}

/// Multiphase profile of `body` (its own ball cap is ignored) along
/// `schedule`. Phase `j` uses an independent chain seeded from
/// `(seed, j)`; phases run in parallel and are merged in order.
pub fn volume_profile(
    body: &ConvexBody,
    schedule: &RadiusSchedule,
    cfg: &ProfileConfig,
    seed: u64,
) -> Result<VolumeProfile> {
    if !(cfg.epsilon > 0.0 && cfg.epsilon < 1.0) {
        return Err(Error::Precondition(format!(
            "epsilon {} outside (0, 1)",
            cfg.epsilon
        )));
    }
    let dim = body.dim();
    if dim == 0 {
        return Err(Error::Precondition(
            "zero-dimensional body has no volume profile".into(),
        ));
    }
    let t0 = schedule.radii[0];
    if body.inner_radius() < t0 * (1.0 - 1e-12) && body.constraint_count() > 0 {
        return Err(Error::Precondition(format!(
            "inner ball of radius {t0} is not contained in the body"
        )));
    }
    let samples = cfg.samples(schedule.granularity);
    let phase_count = cfg
        .max_phases
        .map_or(schedule.phases(), |m| m.min(schedule.phases()));
    let phases = (1..=phase_count)
        .into_par_iter()
        .map(|j| {
            estimate_phase(
                body,
                schedule,
                j,
                samples,
                cfg,
                derive_seed(seed, &[j as u64]),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let oracle_queries = phases.iter().map(|p| p.steps).sum();
    let mut profile = VolumeProfile {
        dim,
        seed,
        epsilon: cfg.epsilon,
        schedule: schedule.clone(),
        phases,
        log_volumes: vec![log_ball_volume(dim, t0)],
        log_volume_stderr: vec![0.0],
        oracle_queries,
    };
    profile.recompute_cumulative();
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval() -> ConvexBody {
        // x >= -1 and -x >= -1
        ConvexBody::new(
            1,
            vec![
                (DVector::from_element(1, 1.0), -1.0),
                (DVector::from_element(1, -1.0), -1.0),
            ],
            10.0,
        )
        .unwrap()
    }

    #[test]
    fn schedule_examples() {
        let s = radius_schedule(3, 4).unwrap();
        assert_eq!(s.phases(), 9);
        assert!((s.radii[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((s.radii[9] - 2f64.powf(2.25) / 3.0).abs() < 1e-12);
        assert!(s.radii[9] >= 2f64.sqrt() && s.radii[8] < 2f64.sqrt());
        let s = radius_schedule(2, 1).unwrap();
        assert_eq!(s.radii, vec![0.5, 1.0]);
        let s = radius_schedule(7, 5).unwrap();
        for w in s.radii.windows(2) {
            assert!((w[1] / w[0] - 2f64.powf(0.2)).abs() < 1e-12);
        }
        assert!(radius_schedule(1, 3).is_err());
    }

    #[test]
    fn sample_count_formula() {
        assert_eq!(samples_per_phase(0.1, 10, SampleLog::Natural), 921_035);
        assert_eq!(samples_per_phase(0.1, 10, SampleLog::Binary), 1_328_772);
    }

    #[test]
    fn membership_basics() {
        let body = interval();
        assert!(membership(&body, &DVector::zeros(1)));
        assert!(membership(&body, &DVector::from_element(1, -1.0)));
        assert!(!membership(&body, &DVector::from_element(1, 1.0 + 1e-9)));
        assert!(!membership(
            &body.with_radius(0.5),
            &DVector::from_element(1, 0.6)
        ));
    }

    #[test]
    fn duplicates_and_vacuous_rows_dropped() {
        let u = DVector::from_vec(vec![1.0, 0.0]);
        let body = ConvexBody::new(
            2,
            vec![
                (u.clone(), -0.5),
                (u * 2.0, -1.0),
                (DVector::zeros(2), -0.5),
            ],
            1.0,
        )
        .unwrap();
        assert_eq!(body.constraint_count(), 1);
        assert_eq!(body.raw_constraint_count(), 3);
        assert!(ConvexBody::new(2, vec![(DVector::zeros(2), 0.0)], 1.0).is_err());
    }

    #[test]
    fn sampler_stays_inside() {
        let body = ConvexBody::new(
            3,
            vec![
                (DVector::from_vec(vec![1.0, 0.2, 0.0]), -0.3),
                (DVector::from_vec(vec![-0.5, 1.0, 0.3]), -0.2),
            ],
            1.0,
        )
        .unwrap();
        let pts = sample_uniform(&body, 2000, 100, 3, 9).unwrap();
        assert!(pts.iter().all(|p| membership(&body, p)));
    }

    #[test]
    fn identical_bodies_have_ratio_one() {
        let body = ConvexBody::ball(2, 1.0).unwrap();
        let pts = sample_uniform(&body, 500, 50, 2, 1).unwrap();
        let est = estimate_ratio(&body, &body, &pts).unwrap();
        assert_eq!(est.ratio, 1.0);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn zero_hits_is_an_error() {
        let body = ConvexBody::ball(2, 1.0).unwrap();
        let pts = vec![DVector::from_vec(vec![0.9, 0.0])];
        assert!(matches!(
            estimate_ratio(&body, &body.with_radius(0.1), &pts),
            Err(Error::Sampling(_))
        ));
    }

    #[test]
    fn seeded_profiles_are_identical() {
        let body = ConvexBody::ball(2, 1.0).unwrap();
        let schedule = radius_schedule(3, 2).unwrap();
        let mut cfg = ProfileConfig::new(0.2);
        cfg.samples_override = Some(2000);
        let a = volume_profile(&body, &schedule, &cfg, 5).unwrap();
        let b = volume_profile(&body, &schedule, &cfg, 5).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        let c = volume_profile(&body, &schedule, &cfg, 6).unwrap();
        assert_ne!(a.to_json().unwrap(), c.to_json().unwrap());
    }

    #[test]
    fn under_sampled_phase_is_subdivided() {
        // ratio 2^(10/1) = 1024 per phase: a handful of samples will miss
        let body = ConvexBody::ball(10, 1.0).unwrap();
        let schedule = RadiusSchedule {
            n: 2,
            granularity: 1,
            radii: vec![0.5, 1.0],
        };
        let mut cfg = ProfileConfig::new(0.5);
        cfg.samples_override = Some(20);
        let p = volume_profile(&body, &schedule, &cfg, 3).unwrap();
        assert!(p.phases[0].subdivisions > 0);
        assert!(p.phases[0].ratio >= 1.0);
    }

    #[test]
    fn ball_volume_closed_form() {
        assert!((log_ball_volume(2, 1.0) - std::f64::consts::PI.ln()).abs() < 1e-12);
        assert!(
            (log_ball_volume(3, 2.0).exp() - 4.0 / 3.0 * std::f64::consts::PI * 8.0).abs() < 1e-9
        );
    }
}
