mod common;

use isovol::coherent::ReductionReading;
use isovol::commutant::commutant_basis;
use isovol::decider::{
    brute_force_similar, decide, exact_filters, frobenius_radius_check, retest,
    test_phase_equalities, DecideConfig, Filters, Mode, Outcome, RadiusCheck, Stage,
};
use isovol::volume::{
    derive_seed, estimate_phase, radius_schedule, volume_profile, ConvexBody, ProfileConfig,
};
use isovol::AdjacencyMatrix;
use nalgebra::DVector;
use rand::Rng;

fn reduced(a: &AdjacencyMatrix, b: &AdjacencyMatrix) -> (AdjacencyMatrix, AdjacencyMatrix) {
    match exact_filters(a, b, ReductionReading::WeightedClasses).unwrap() {
        Filters::Passed { pair, .. } => (pair.a1, pair.b1),
        Filters::Refuted { stage, detail } => panic!("refuted at {stage:?}: {detail}"),
    }
}

#[test]
fn exact_stages_never_refute_isomorphic_pairs() {
    let mut rng = common::rng(2024);
    let mut isomorphic = 0;
    let mut refuted = 0;
    for _ in 0..200 {
        let n = rng.gen_range(2..=8);
        let a = common::gnp(n, rng.gen_range(0.2..0.8), &mut rng);
        let b = if rng.gen_bool(0.5) {
            a.permuted(&common::random_permutation(n, &mut rng))
        } else {
            common::gnp(n, rng.gen_range(0.2..0.8), &mut rng)
        };
        let witness = brute_force_similar(&a, &b).unwrap();
        let filters = exact_filters(&a, &b, ReductionReading::WeightedClasses).unwrap();
        if let Some(p) = &witness {
            isomorphic += 1;
            assert_eq!(&a.permuted(p), &b);
            assert!(
                !filters.is_refuted(),
                "isomorphic pair refuted: {filters:?}"
            );
        } else if filters.is_refuted() {
            refuted += 1;
        }
        let v = decide(&a, &b, &DecideConfig::new(0.1, 0.05, 1)).unwrap();
        assert_eq!(v.outcome.is_similar(), witness.is_some());
    }
    assert!(
        isomorphic >= 80 && refuted > 50,
        "{isomorphic} isomorphic, {refuted} refuted"
    );
}

#[test]
fn petersen_exact_mode() {
    let p = common::petersen();
    let mut rng = common::rng(5);
    let q = p.permuted(&common::random_permutation(10, &mut rng));
    let v = decide(
        &p,
        &q,
        &DecideConfig::new(0.1, 0.05, 5).with_mode(Mode::Exact),
    )
    .unwrap();
    assert_eq!(v.outcome, Outcome::ExactSimilar);
    assert_eq!(p.permuted(v.witness.as_ref().unwrap()), q);
}

#[test]
fn petersen_randomized_on_a_phase_budget() {
    // full sample counts are out of reach for a unit test; the first phases
    // are run with a fixed per-phase count
    let p = common::petersen();
    let q = p.permuted(&common::random_permutation(10, &mut common::rng(8)));
    let mut cfg = DecideConfig::new(0.1, 0.05, 8).with_mode(Mode::Randomized);
    cfg.samples_override = Some(6000);
    cfg.max_phases = Some(4);
    let v = decide(&p, &q, &cfg).unwrap();
    assert_eq!(v.outcome, Outcome::EpsilonEtaSimilar, "{}", v.detail);
    assert_eq!(v.dimensions.map(|d| d.aa), Some(41));
    assert_eq!(v.profiles.len(), 3);
    assert!(v.profiles.iter().all(|p| p.phases.len() == 4));
}

#[test]
fn shrikhande_and_rook_reach_sampling() {
    let filters = exact_filters(
        &common::shrikhande(),
        &common::rook4(),
        ReductionReading::WeightedClasses,
    )
    .unwrap();
    match filters {
        Filters::Passed { dimensions, .. } => assert_eq!(dimensions.aa, 117),
        Filters::Refuted { .. } => panic!("cospectral strongly regular pair refuted exactly"),
    }
    assert!(brute_force_similar(&common::shrikhande(), &common::rook4()).is_err());
}

#[test]
fn cycle_versus_triangles() {
    let cfg = DecideConfig::new(0.1, 0.05, 1).with_mode(Mode::Randomized);
    let v = decide(&common::cycle(6), &common::two_triangles(), &cfg).unwrap();
    assert_eq!(v.outcome, Outcome::NotSimilar);
    assert_eq!(v.stage, Stage::Validation);
    assert!(v.profiles.is_empty());
}

fn pair_profiles(
    seed: u64,
    samples: usize,
) -> (
    [ConvexBody; 3],
    [isovol::volume::VolumeProfile; 3],
    ProfileConfig,
) {
    let a = common::cycle(5);
    let b = a.permuted(&[2, 4, 1, 0, 3]);
    let (a1, b1) = reduced(&a, &b);
    let bases = [
        commutant_basis(&a1, &a1),
        commutant_basis(&a1, &b1),
        commutant_basis(&b1, &b1),
    ]
    .map(|b| b.unwrap());
    let schedule = radius_schedule(5, bases[0].delta()).unwrap();
    let t = *schedule.radii.last().unwrap();
    let bodies = bases.map(|b| ConvexBody::from_commutant(&b, t).unwrap());
    let mut cfg = ProfileConfig::new(0.15);
    cfg.samples_override = Some(samples);
    let profiles = [0, 1, 2].map(|k| {
        volume_profile(&bodies[k], &schedule, &cfg, derive_seed(seed, &[k as u64])).unwrap()
    });
    (bodies, profiles, cfg)
}

#[test]
fn retest_recovers_from_a_truncated_phase() {
    let (bodies, mut profiles, cfg) = pair_profiles(3, 20_000);
    let schedule = profiles[0].schedule.clone();
    let j = schedule.phases() - 1;
    assert!(test_phase_equalities(&profiles, j, 0.15).passed());
    // replace one estimate by a handful of samples until it is a fluke
    let mut salt = 0;
    loop {
        let fluke =
            estimate_phase(&bodies[1], &schedule, j, 6, &cfg, derive_seed(99, &[salt])).unwrap();
        let mut trial = profiles.clone();
        trial[1].replace_phase(fluke);
        if !test_phase_equalities(&trial, j, 0.15).passed() {
            profiles = trial;
            break;
        }
        salt += 1;
    }
    let refs = [&bodies[0], &bodies[1], &bodies[2]];
    let (outcome, record) = retest(refs, &mut profiles, j, 0.15, &cfg, 1234).unwrap();
    assert!(!record.first.passed());
    assert!(outcome.passed(), "{record:?}");
    assert_eq!(record.samples, 40_000);
    assert_eq!(record.epsilon, 0.075);
}

#[test]
fn retest_on_a_passing_phase_is_a_no_op() {
    let (bodies, mut profiles, cfg) = pair_profiles(4, 5000);
    let j = 1;
    let before = profiles.clone();
    let refs = [&bodies[0], &bodies[1], &bodies[2]];
    let (outcome, record) = retest(refs, &mut profiles, j, 0.15, &cfg, 1).unwrap();
    assert!(outcome.passed());
    assert_eq!(record.samples, 0);
    assert_eq!(profiles, before);
}

#[test]
fn retest_confirms_genuinely_different_volumes() {
    // a disc, the same disc, and a disc with a chord cut off
    let schedule = radius_schedule(4, 2).unwrap();
    let t = *schedule.radii.last().unwrap();
    let disc = ConvexBody::ball(2, t).unwrap();
    let cut = ConvexBody::new(2, vec![(DVector::from_vec(vec![1.0, 0.0]), -0.4)], t).unwrap();
    let mut cfg = ProfileConfig::new(0.1);
    cfg.samples_override = Some(20_000);
    let bodies = [&disc, &disc, &cut];
    let mut profiles =
        [0u64, 1, 2].map(|k| volume_profile(bodies[k as usize], &schedule, &cfg, k).unwrap());
    let j = (1..=schedule.phases())
        .find(|&j| !test_phase_equalities(&profiles, j, 0.1).passed())
        .expect("a failing phase");
    assert!(schedule.radii[j] > 0.4);
    let (outcome, record) = retest(bodies, &mut profiles, j, 0.1, &cfg, 55).unwrap();
    assert!(!outcome.passed(), "{record:?}");
}

#[test]
fn verdicts_are_deterministic() {
    let a = common::gnp(5, 0.5, &mut common::rng(17));
    let b = a.permuted(&[4, 3, 0, 1, 2]);
    let mut cfg = DecideConfig::new(0.15, 0.05, 31).with_mode(Mode::Randomized);
    cfg.samples_override = Some(3000);
    let x = decide(&a, &b, &cfg).unwrap().to_json().unwrap();
    let y = decide(&a, &b, &cfg).unwrap().to_json().unwrap();
    assert_eq!(x, y);
    assert!(!x.contains("wall_clock"));
    cfg.record_timing = true;
    assert!(decide(&a, &b, &cfg)
        .unwrap()
        .to_json()
        .unwrap()
        .contains("wall_clock_ms"));
}

#[test]
fn radius_certificate_on_small_commutants() {
    let p4 = common::path(4);
    let q4 = p4.permuted(&[3, 1, 0, 2]);
    let (a1, b1) = reduced(&p4, &q4);
    for (s, t) in [(&a1, &a1), (&a1, &b1)] {
        let basis = commutant_basis(s, t).unwrap();
        assert_eq!(basis.delta(), 3);
        assert_eq!(frobenius_radius_check(&basis), RadiusCheck::Attained);
    }
    let c = common::cycle(4);
    assert_eq!(
        frobenius_radius_check(&commutant_basis(&c, &c).unwrap()),
        RadiusCheck::Unknown
    );
}
