//! Property verification over seeded phase grids.
//!
//! Each check evaluates one analytic identity or structural invariant over
//! the corner settings `{0, π/2}³` plus a seeded batch of uniform random
//! phase triples, and reports the largest observed deviation against its
//! tolerance. Checks that consume pair amplitudes accept an injectable
//! source so fault-injection fixtures can prove the suite actually bites.

use alloc::string::String;
use alloc::vec::Vec;

use crate::amplitude::{
    amp_photon1, amp_segment, Arm, Outcome, PairAmplitudeSource, PathPair, PhaseSettings,
    SegmentPair, Sign, Subensemble, TabulatedAmplitudes, ANALYTIC_TOLERANCE,
};
use crate::causal::{
    causal_correlation, causal_joint, causal_joint_bbb, causal_joint_bbb_amplitude_route,
    causal_joint_path_route, causal_singles, causal_singles_bbb, cic_allows, cic_rules,
    verify_nonbefore_contradiction, CausalRule, InterferenceLocation, SeriesStage,
};
use crate::kinematics::{boost_time, select_model_case, Geometry, ImpactEvent};
use crate::qm::{
    qm_correlation, qm_joint_closed_long, qm_joint_with, qm_no_signaling_marginal, qm_singles,
    DetectorSide,
};
use crate::rng::CounterRng;
use crate::sim::{discrimination_phases, run_experiment, ExperimentConfig, Model};

/// Documented fixed seed for the default phase grid.
pub const DEFAULT_PHASE_GRID_SEED: u64 = 1998;
/// Default number of random grid points on top of the eight corners.
pub const DEFAULT_RANDOM_GRID_POINTS: usize = 100;

/// Result of one property check.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyResult {
    pub name: &'static str,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Results of the full suite.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub grid_seed: u64,
    pub grid_points: usize,
    pub properties: Vec<PropertyResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.properties.iter().all(|p| p.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyResult> {
        self.properties.iter().filter(|p| !p.passed)
    }
}

/// The corner settings `{0, π/2}³` followed by `n_random` seeded uniform
/// triples from `[0, 2π)³`.
pub fn phase_grid(seed: u64, n_random: usize) -> Vec<PhaseSettings> {
    let half_pi = core::f64::consts::FRAC_PI_2;
    let mut grid = Vec::with_capacity(8 + n_random);
    for corner in 0..8u32 {
        grid.push(PhaseSettings::new(
            f64::from(corner & 1) * half_pi,
            f64::from((corner >> 1) & 1) * half_pi,
            f64::from((corner >> 2) & 1) * half_pi,
        ));
    }
    let tau = core::f64::consts::TAU;
    for i in 0..n_random {
        let mut rng = CounterRng::for_event(seed, i as u64);
        grid.push(PhaseSettings::new(
            rng.uniform() * tau,
            rng.uniform() * tau,
            rng.uniform() * tau,
        ));
    }
    grid
}

struct Check {
    name: &'static str,
    tolerance: f64,
    max_deviation: f64,
}

impl Check {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            tolerance,
            max_deviation: 0.0,
        }
    }

    fn observe(&mut self, deviation: f64) {
        if deviation.is_nan() {
            self.max_deviation = f64::INFINITY;
        } else if deviation > self.max_deviation {
            self.max_deviation = deviation;
        }
    }

    fn observe_bool(&mut self, ok: bool) {
        self.observe(if ok { 0.0 } else { 1.0 });
    }

    fn finish(self) -> PropertyResult {
        PropertyResult {
            name: self.name,
            max_deviation: self.max_deviation,
            tolerance: self.tolerance,
            passed: self.max_deviation <= self.tolerance,
        }
    }
}

/// Run the full suite with the tabulated amplitudes.
pub fn run_verification(grid_seed: u64, n_random: usize) -> VerifyReport {
    run_verification_with(&TabulatedAmplitudes, grid_seed, n_random)
}

/// Run the full suite against an arbitrary pair-amplitude source.
pub fn run_verification_with(
    amplitudes: &dyn PairAmplitudeSource,
    grid_seed: u64,
    n_random: usize,
) -> VerifyReport {
    let grid = phase_grid(grid_seed, n_random);
    let tol = ANALYTIC_TOLERANCE;
    let mut properties = Vec::new();

    // Amplitude-table structure.
    let mut moduli = Check::new("pair-amplitude-modulus-one-twelfth", tol);
    let mut outcome_sum = Check::new("pair-amplitude-outcome-sum-one-third", tol);
    let mut periodicity = Check::new("pair-amplitude-two-pi-periodicity", tol);
    let mut segment_moduli = Check::new("segment-amplitude-modulus-one-sixth", tol);
    let mut photon1_moduli = Check::new("photon1-amplitude-modulus-one-half", tol);
    for phases in &grid {
        for sub in [Subensemble::Long, Subensemble::Short] {
            for &path in sub.members() {
                let mut sum = 0.0;
                for outcome in Outcome::ALL {
                    match amplitudes.amplitude(path, outcome, phases) {
                        Ok(a) => {
                            let p = a.norm_sqr();
                            moduli.observe((p - 1.0 / 12.0).abs());
                            sum += p;
                        }
                        Err(_) => moduli.observe(f64::INFINITY),
                    }
                }
                outcome_sum.observe((sum - 1.0 / 3.0).abs());
            }
        }
        let tau = core::f64::consts::TAU;
        let shifted = [
            PhaseSettings::new(phases.alpha + tau, phases.beta, phases.gamma),
            PhaseSettings::new(phases.alpha, phases.beta + tau, phases.gamma),
            PhaseSettings::new(phases.alpha, phases.beta, phases.gamma - tau),
        ];
        for &path in Subensemble::Long.members() {
            for outcome in Outcome::ALL {
                if let Ok(base) = amplitudes.amplitude(path, outcome, phases) {
                    for other in &shifted {
                        if let Ok(moved) = amplitudes.amplitude(path, outcome, other) {
                            periodicity.observe((moved - base).norm());
                        }
                    }
                }
            }
        }
        for segment in [
            SegmentPair::new(Arm::Long, Arm::Short),
            SegmentPair::new(Arm::Short, Arm::Long),
            SegmentPair::new(Arm::Long, Arm::Long),
        ] {
            for omega in Sign::ALL {
                let a = amp_segment(segment, omega, phases).expect("tabulated segment");
                segment_moduli.observe((a.norm_sqr() - 1.0 / 6.0).abs());
            }
        }
        for arm in [Arm::Short, Arm::Long] {
            for sigma in Sign::ALL {
                let a = amp_photon1(arm, sigma, phases);
                photon1_moduli.observe((a.norm_sqr() - 0.5).abs());
            }
        }
    }
    properties.push(moduli.finish());
    properties.push(outcome_sum.finish());
    properties.push(periodicity.finish());
    properties.push(segment_moduli.finish());
    properties.push(photon1_moduli.finish());

    // Subensemble partition.
    let mut partition = Check::new("subensemble-partition-1-3-3-1", 0.0);
    let mut counts = [0usize; 4];
    for path in PathPair::ALL {
        let i = Subensemble::ALL
            .iter()
            .position(|s| *s == path.subensemble())
            .unwrap();
        counts[i] += 1;
    }
    partition.observe_bool(counts == [1, 3, 3, 1]);
    properties.push(partition.finish());

    // Quantum model identities.
    let mut oracle = Check::new("qm-closed-form-vs-amplitude-route", tol);
    let mut normalization = Check::new("probability-tables-normalized", tol);
    let mut in_range = Check::new("probabilities-in-unit-interval", tol);
    let mut marginals = Check::new("qm-singles-vs-joint-marginals", tol);
    let mut correlation_sum = Check::new("qm-correlation-vs-table-sum", tol);
    let mut no_signaling = Check::new("qm-no-signaling-marginal-one-half", tol);
    let mut symmetry = Check::new("phase-shift-outcome-swap-symmetry", tol);
    for phases in &grid {
        let closed = qm_joint_closed_long(phases);
        match qm_joint_with(amplitudes, Subensemble::Long, phases) {
            Ok(summed) => oracle.observe(closed.max_abs_diff(&summed)),
            Err(_) => oracle.observe(f64::INFINITY),
        }
        let qm_short = qm_joint_with(amplitudes, Subensemble::Short, phases);
        for table in [
            Some(closed),
            qm_short.ok(),
            Some(causal_joint(phases)),
            Some(causal_joint_bbb(phases)),
        ]
        .into_iter()
        .flatten()
        {
            normalization.observe((table.total() - 1.0).abs());
            for (_, p) in table.iter() {
                in_range.observe((-p).max(p - 1.0).max(0.0));
            }
        }
        for sub in [Subensemble::Long, Subensemble::Short] {
            if let (Ok(joint), Ok(side1), Ok(side2)) = (
                qm_joint_with(amplitudes, sub, phases),
                qm_singles(DetectorSide::D1, sub, phases),
                qm_singles(DetectorSide::D2, sub, phases),
            ) {
                marginals.observe(side1.max_abs_diff(&joint.side1_marginals()));
                marginals.observe(side2.max_abs_diff(&joint.side2_marginals()));
            }
        }
        correlation_sum.observe(
            (qm_correlation(phases).value() - qm_joint_closed_long(phases).correlation().value())
                .abs(),
        );
        no_signaling.observe((qm_no_signaling_marginal(phases) - 0.5).abs());

        let pi = core::f64::consts::PI;
        let alpha_shift =
            qm_joint_closed_long(&PhaseSettings::new(phases.alpha + pi, phases.beta, phases.gamma));
        let gamma_shift =
            qm_joint_closed_long(&PhaseSettings::new(phases.alpha, phases.beta, phases.gamma + pi));
        let causal_alpha =
            causal_joint(&PhaseSettings::new(phases.alpha + pi, phases.beta, phases.gamma));
        let causal_base = causal_joint(phases);
        for outcome in Outcome::ALL {
            let sigma_flipped = Outcome::new(outcome.sigma.flipped(), outcome.omega);
            let omega_flipped = Outcome::new(outcome.sigma, outcome.omega.flipped());
            symmetry.observe((alpha_shift.get(outcome) - closed.get(sigma_flipped)).abs());
            symmetry.observe((gamma_shift.get(outcome) - closed.get(omega_flipped)).abs());
            symmetry.observe((causal_alpha.get(outcome) - causal_base.get(sigma_flipped)).abs());
        }
    }
    properties.push(oracle.finish());
    properties.push(normalization.finish());
    properties.push(in_range.finish());
    properties.push(marginals.finish());
    properties.push(correlation_sum.finish());
    properties.push(no_signaling.finish());
    properties.push(symmetry.finish());

    // Causal model identities.
    let mut dual_route = Check::new("causal-path-sum-vs-closed-form", tol);
    let mut bbb_route = Check::new("all-before-amplitude-route-vs-closed-form", tol);
    let mut causal_corr = Check::new("causal-correlation-vs-table-sum", tol);
    let mut singles_agree = Check::new("causal-singles-match-qm-singles", tol);
    let mut bbb_side1 = Check::new("all-before-side1-singles-one-half", tol);
    let mut contradiction = Check::new("nonbefore-contradiction-discrepancy-identity", tol);
    for phases in &grid {
        dual_route.observe(causal_joint(phases).max_abs_diff(&causal_joint_path_route(phases)));
        match causal_joint_bbb_amplitude_route(phases) {
            Ok(routed) => bbb_route.observe(causal_joint_bbb(phases).max_abs_diff(&routed)),
            Err(_) => bbb_route.observe(f64::INFINITY),
        }
        causal_corr.observe(
            (causal_correlation(phases).value() - causal_joint(phases).correlation().value()).abs(),
        );
        for side in [DetectorSide::D1, DetectorSide::D2] {
            let causal = causal_singles(side, phases);
            let qm = qm_singles(side, Subensemble::Long, phases).expect("subensemble L");
            singles_agree.observe(causal.max_abs_diff(&qm));
        }
        let bbb = causal_singles_bbb(DetectorSide::D1, phases);
        bbb_side1.observe((bbb.plus - 0.5).abs().max((bbb.minus - 0.5).abs()));
        let report = verify_nonbefore_contradiction(phases);
        let expected = (libm::cos(phases.alpha + phases.beta) / 3.0).abs();
        contradiction.observe((report.discrepancy - expected).abs());
    }
    properties.push(dual_route.finish());
    properties.push(bbb_route.finish());
    properties.push(causal_corr.finish());
    properties.push(singles_agree.finish());
    properties.push(bbb_side1.finish());
    properties.push(contradiction.finish());

    // The contradiction pinned at zero phases: discrepancy exactly 1/3.
    let mut at_zero = Check::new("nonbefore-contradiction-one-third-at-zero-phases", tol);
    let report = verify_nonbefore_contradiction(&PhaseSettings::new(0.0, 0.0, 0.0));
    at_zero.observe((report.discrepancy - 1.0 / 3.0).abs());
    at_zero.observe_bool(!report.consistent);
    properties.push(at_zero.finish());

    // Model divergence at the discrimination preset.
    let mut divergence = Check::new("model-divergence-two-thirds-at-preset", tol);
    let preset = discrimination_phases();
    divergence.observe(
        ((qm_correlation(&preset).value() - causal_correlation(&preset).value()).abs()
            - 2.0 / 3.0)
            .abs(),
    );
    properties.push(divergence.finish());

    // Indistinguishability-condition rules from the generic evaluator.
    let mut rules = Check::new("cic-rules-reproduced-by-generic-condition", 0.0);
    for rule in cic_rules().rules {
        let stage = match rule.location {
            InterferenceLocation::Bs11AndBs21 => SeriesStage::Bs21,
            _ => SeriesStage::Bs22,
        };
        rules.observe_bool(cic_allows(&rule.paths, rule.order, stage) == rule.produces);
    }
    rules.observe_bool(!cic_allows(
        Subensemble::Long.members(),
        crate::causal::InterferenceOrder::Second,
        SeriesStage::Bs22,
    ));
    properties.push(rules.finish());

    // Kinematics invariants.
    let mut boost_identity = Check::new("boost-zero-velocity-identity", 1e-15);
    for (i, event_t) in [0.0, 1e-9, 3.2e-6, 0.5].iter().enumerate() {
        let event = ImpactEvent {
            beam_splitter: crate::causal::BeamSplitterId::Bs11,
            t: *event_t,
            x: -7.0 + 3.0 * i as f64,
        };
        let boosted = boost_time(&event, 0.0).expect("v = 0 is physical");
        let scale = event_t.abs().max(1.0);
        boost_identity.observe((boosted - event_t).abs() / scale);
    }
    properties.push(boost_identity.finish());

    let mut at_rest = Check::new("at-rest-orderings-select-indistinguishability-rule", 0.0);
    for geometry in [Geometry::time_ordering_1(), Geometry::time_ordering_2()] {
        match select_model_case(&geometry) {
            Ok(case) => at_rest.observe_bool(case.rule == CausalRule::CausalIndistinguishability),
            Err(_) => at_rest.observe_bool(false),
        }
    }
    match select_model_case(&Geometry::all_before()) {
        Ok(case) => at_rest.observe_bool(case.rule == CausalRule::AllBefore),
        Err(_) => at_rest.observe_bool(false),
    }
    properties.push(at_rest.finish());

    // Cheap simulation contracts: determinism and subensemble priors.
    let mut determinism = Check::new("simulation-determinism-fixed-seed", 0.0);
    let config = ExperimentConfig::preset(Model::Qm, 200, grid_seed);
    match (run_experiment(&config), run_experiment(&config)) {
        (Ok(a), Ok(b)) => determinism.observe_bool(a == b),
        _ => determinism.observe_bool(false),
    }
    properties.push(determinism.finish());

    let mut priors = Check::new("simulation-subensemble-priors-five-sigma", 0.0);
    let config = ExperimentConfig::preset(Model::Qm, 20_000, grid_seed);
    match run_experiment(&config) {
        Ok(records) => {
            let mut counts = [0u64; 4];
            for record in &records {
                let i = Subensemble::ALL
                    .iter()
                    .position(|s| *s == record.true_path.subensemble())
                    .unwrap();
                counts[i] += 1;
            }
            let n = config.n_events as f64;
            for (sub, count) in Subensemble::ALL.iter().zip(counts.iter()) {
                let p = sub.prior();
                let sigma = libm::sqrt(n * p * (1.0 - p));
                priors.observe_bool((*count as f64 - n * p).abs() < 5.0 * sigma);
            }
        }
        Err(_) => priors.observe_bool(false),
    }
    properties.push(priors.finish());

    VerifyReport {
        grid_seed,
        grid_points: grid.len(),
        properties,
    }
}

/// Render one line per property, for terminal output.
pub fn format_summary(report: &VerifyReport) -> Vec<String> {
    report
        .properties
        .iter()
        .map(|p| {
            alloc::format!(
                "{} {} (max deviation {:.3e}, tolerance {:.1e})",
                if p.passed { "PASS" } else { "FAIL" },
                p.name,
                p.max_deviation,
                p.tolerance
            )
        })
        .collect()
}
