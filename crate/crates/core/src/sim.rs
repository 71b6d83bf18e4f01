//! Monte Carlo generation of time-tagged coincidence experiments.
//!
//! Events are drawn path-first: one of the eight path pairs with uniform
//! 1/8 priors (balanced splitters), then an outcome from the active model's
//! conditional table for that path's subensemble, then detector timestamps
//! from the geometry plus independent Gaussian jitter. Event `i` consumes
//! only the [`CounterRng`] stream keyed by `(seed, i)`, which makes runs
//! bit-reproducible at any worker count and merges order-independent.

use core::fmt;

use alloc::string::String;
use alloc::vec::Vec;

use crate::amplitude::{Outcome, PathPair, PhaseSettings, Subensemble};
use crate::causal::{causal_joint, causal_joint_bbb, CausalRule};
use crate::kinematics::{detector_times, select_model_case, Geometry, KinematicsError};
use crate::qm::{qm_correlation, qm_joint, ModelError, ProbabilityTable};
use crate::rng::CounterRng;

/// Which prediction rule drives outcome sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Model {
    Qm,
    Causal,
}

impl Model {
    pub fn label(self) -> &'static str {
        match self {
            Model::Qm => "qm",
            Model::Causal => "causal",
        }
    }
}

/// Outcome rule for non-`L` subensembles under the causal model, which the
/// source material leaves open: reuse the quantum-mechanical tables, or fall
/// back to uniform outcomes. Only out-of-window events are affected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum NonLPolicy {
    Qm,
    Uniform,
}

/// Coincidence window in relative-delay space, seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Window {
    pub center: f64,
    pub half_width: f64,
}

impl Window {
    pub fn contains(&self, delay: f64) -> bool {
        (delay - self.center).abs() <= self.half_width
    }
}

/// Default detector jitter: 0.1 ns, small against the ~1 ns peak spacing.
pub const DEFAULT_JITTER_SIGMA: f64 = 1e-10;
/// Default spectrum bin width: 0.05 ns.
pub const DEFAULT_BIN_WIDTH: f64 = 5e-11;
/// Default coincidence window half-width: 0.25 ns.
pub const DEFAULT_WINDOW_HALF_WIDTH: f64 = 2.5e-10;
/// Default photon-pair coherence length: 10 μm.
pub const DEFAULT_PAIR_COHERENCE: f64 = 1e-5;
/// Default pump coherence length: 30 m.
pub const DEFAULT_PUMP_COHERENCE: f64 = 30.0;

#[cfg(feature = "serde")]
fn default_pair_coherence() -> f64 {
    DEFAULT_PAIR_COHERENCE
}

#[cfg(feature = "serde")]
fn default_pump_coherence() -> f64 {
    DEFAULT_PUMP_COHERENCE
}

/// Full description of one simulated experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExperimentConfig {
    pub geometry: Geometry,
    pub phases: PhaseSettings,
    pub model: Model,
    pub n_events: u64,
    pub seed: u64,
    /// Per-detector Gaussian timestamp jitter, seconds.
    pub jitter_sigma: f64,
    pub window: Window,
    /// Required when `model` is causal; ignored otherwise.
    #[cfg_attr(feature = "serde", serde(default))]
    pub non_l_policy: Option<NonLPolicy>,
    /// Photon-pair coherence length, meters (validation only).
    #[cfg_attr(feature = "serde", serde(default = "default_pair_coherence"))]
    pub pair_coherence: f64,
    /// Pump coherence length, meters (validation only).
    #[cfg_attr(feature = "serde", serde(default = "default_pump_coherence"))]
    pub pump_coherence: f64,
}

impl ExperimentConfig {
    /// A ready-to-run configuration: time-ordering-2 bench, discrimination
    /// phase preset, default jitter and window.
    pub fn preset(model: Model, n_events: u64, seed: u64) -> Self {
        Self {
            geometry: Geometry::time_ordering_2(),
            phases: discrimination_phases(),
            model,
            n_events,
            seed,
            jitter_sigma: DEFAULT_JITTER_SIGMA,
            window: Window {
                center: 0.0,
                half_width: DEFAULT_WINDOW_HALF_WIDTH,
            },
            non_l_policy: match model {
                Model::Qm => None,
                Model::Causal => Some(NonLPolicy::Qm),
            },
            pair_coherence: DEFAULT_PAIR_COHERENCE,
            pump_coherence: DEFAULT_PUMP_COHERENCE,
        }
    }

    /// Validate hard constraints and return soft coherence warnings.
    ///
    /// Interference requires the arm imbalance to sit between the photon-pair
    /// and pump coherence lengths; violations warn rather than fail because
    /// the simulation itself stays well defined.
    pub fn validate(&self) -> Result<Vec<String>, SimError> {
        self.geometry.validate()?;
        self.phases
            .validate()
            .map_err(|_| SimError::InvalidConfig {
                field: "phases",
                message: "phase settings must be finite",
            })?;
        if self.n_events == 0 {
            return Err(SimError::InvalidConfig {
                field: "n_events",
                message: "must be positive",
            });
        }
        if !(self.jitter_sigma.is_finite() && self.jitter_sigma >= 0.0) {
            return Err(SimError::InvalidConfig {
                field: "jitter_sigma",
                message: "must be finite and non-negative",
            });
        }
        if !(self.window.half_width.is_finite() && self.window.half_width > 0.0) {
            return Err(SimError::InvalidConfig {
                field: "window.half_width",
                message: "must be positive",
            });
        }
        if !self.window.center.is_finite() {
            return Err(SimError::InvalidConfig {
                field: "window.center",
                message: "must be finite",
            });
        }
        if self.model == Model::Causal && self.non_l_policy.is_none() {
            return Err(SimError::InvalidConfig {
                field: "non_l_policy",
                message: "required when model = causal",
            });
        }
        let mut warnings = Vec::new();
        let imbalance = self.geometry.long_arm - self.geometry.short_arm;
        if self.pair_coherence * 10.0 > imbalance {
            warnings.push(alloc::format!(
                "pair coherence {} m is not well below the arm imbalance {} m; \
                 time-resolved path discrimination degrades",
                self.pair_coherence,
                imbalance
            ));
        }
        if imbalance * 10.0 > self.pump_coherence {
            warnings.push(alloc::format!(
                "arm imbalance {} m is not well below the pump coherence {} m; \
                 subensemble interference degrades",
                imbalance,
                self.pump_coherence
            ));
        }
        Ok(warnings)
    }
}

/// One simulated photon-pair event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionRecord {
    pub outcome: Outcome,
    /// D1 timestamp, seconds.
    pub t1: f64,
    /// D2 timestamp, seconds.
    pub t2: f64,
    pub true_path: PathPair,
}

/// Simulation errors.
#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    InvalidConfig {
        field: &'static str,
        message: &'static str,
    },
    Kinematics(KinematicsError),
    Model(ModelError),
    /// The coincidence window selected no events.
    NoCoincidences,
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::InvalidConfig { field, message } => {
                write!(f, "invalid config: {field}: {message}")
            }
            SimError::Kinematics(e) => write!(f, "{e}"),
            SimError::Model(e) => write!(f, "{e}"),
            SimError::NoCoincidences => f.write_str("no coincidences in window"),
        }
    }
}

impl core::error::Error for SimError {}

impl From<KinematicsError> for SimError {
    fn from(e: KinematicsError) -> Self {
        SimError::Kinematics(e)
    }
}

impl From<ModelError> for SimError {
    fn from(e: ModelError) -> Self {
        SimError::Model(e)
    }
}

/// Precomputed per-path sampling tables for one configuration.
///
/// `sample(i)` is a pure function of the sampler and the event index, which
/// is the whole determinism contract: callers may evaluate indices in any
/// order, on any number of workers, and concatenate by index.
#[derive(Debug, Clone)]
pub struct EventSampler {
    seed: u64,
    jitter_sigma: f64,
    outcome_cdf: [[f64; 4]; 8],
    t1_geo: [f64; 8],
    t2_geo: [f64; 8],
}

impl EventSampler {
    pub fn new(config: &ExperimentConfig) -> Result<Self, SimError> {
        config.validate()?;
        let long_table = match config.model {
            Model::Qm => qm_joint(Subensemble::Long, &config.phases)?,
            Model::Causal => {
                let case = select_model_case(&config.geometry)?;
                match case.rule {
                    CausalRule::AllBefore => causal_joint_bbb(&config.phases),
                    CausalRule::CausalIndistinguishability => causal_joint(&config.phases),
                }
            }
        };
        let short_table = match config.model {
            Model::Qm => qm_joint(Subensemble::Short, &config.phases)?,
            Model::Causal => match config.non_l_policy.expect("validated") {
                NonLPolicy::Qm => qm_joint(Subensemble::Short, &config.phases)?,
                NonLPolicy::Uniform => ProbabilityTable::uniform(),
            },
        };
        let mut outcome_cdf = [[0.0; 4]; 8];
        let mut t1_geo = [0.0; 8];
        let mut t2_geo = [0.0; 8];
        for (i, &path) in PathPair::ALL.iter().enumerate() {
            let table = match path.subensemble() {
                Subensemble::Long => long_table,
                Subensemble::Short => short_table,
                // No interference partners exist for the singleton paths,
                // so both models use the balanced-splitter uniform table.
                _ => ProbabilityTable::uniform(),
            };
            let mut acc = 0.0;
            for outcome in Outcome::ALL {
                acc += table.get(outcome);
                outcome_cdf[i][outcome.index()] = acc;
            }
            // Make the final step immune to rounding.
            outcome_cdf[i][3] = 1.0;
            let (t1, t2) = detector_times(&config.geometry, path)?;
            t1_geo[i] = t1;
            t2_geo[i] = t2;
        }
        Ok(Self {
            seed: config.seed,
            jitter_sigma: config.jitter_sigma,
            outcome_cdf,
            t1_geo,
            t2_geo,
        })
    }

    /// Draw event `index`. Stream layout: one u64 for the path, one uniform
    /// for the outcome, one Box-Muller pair for the two detector jitters.
    pub fn sample(&self, index: u64) -> DetectionRecord {
        let mut rng = CounterRng::for_event(self.seed, index);
        let path_index = (rng.next_u64() & 7) as usize;
        let u = rng.uniform();
        let cdf = &self.outcome_cdf[path_index];
        let mut outcome = Outcome::ALL[3];
        for candidate in Outcome::ALL {
            if u < cdf[candidate.index()] {
                outcome = candidate;
                break;
            }
        }
        let (j1, j2) = rng.normal_pair();
        DetectionRecord {
            outcome,
            t1: self.t1_geo[path_index] + self.jitter_sigma * j1,
            t2: self.t2_geo[path_index] + self.jitter_sigma * j2,
            true_path: PathPair::ALL[path_index],
        }
    }
}

/// Draw a single event from an explicit stream, building the sampling
/// tables on the fly. [`EventSampler`] is the bulk path.
pub fn sample_event(
    rng: &mut CounterRng,
    config: &ExperimentConfig,
) -> Result<DetectionRecord, SimError> {
    let sampler = EventSampler::new(config)?;
    let path_index = (rng.next_u64() & 7) as usize;
    let u = rng.uniform();
    let cdf = &sampler.outcome_cdf[path_index];
    let mut outcome = Outcome::ALL[3];
    for candidate in Outcome::ALL {
        if u < cdf[candidate.index()] {
            outcome = candidate;
            break;
        }
    }
    let (j1, j2) = rng.normal_pair();
    Ok(DetectionRecord {
        outcome,
        t1: sampler.t1_geo[path_index] + config.jitter_sigma * j1,
        t2: sampler.t2_geo[path_index] + config.jitter_sigma * j2,
        true_path: PathPair::ALL[path_index],
    })
}

/// Generate the full event list for a configuration.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<DetectionRecord>, SimError> {
    let sampler = EventSampler::new(config)?;
    Ok((0..config.n_events).map(|i| sampler.sample(i)).collect())
}

/// Detection delay of a record relative to the subensemble-`L` reference.
pub fn relative_delay(record: &DetectionRecord, reference: f64) -> f64 {
    record.t2 - record.t1 - reference
}

/// Histogram of relative detection delays, per outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct DelaySpectrum {
    bin_width: f64,
    bins: alloc::collections::BTreeMap<i64, [u64; 4]>,
    total: u64,
}

impl DelaySpectrum {
    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn occupied_bins(&self) -> usize {
        self.bins.len()
    }

    /// Rows in ascending bin order: `(bin center, counts per outcome)`.
    pub fn rows(&self) -> impl Iterator<Item = (f64, [u64; 4])> + '_ {
        self.bins
            .iter()
            .map(move |(index, counts)| ((*index as f64 + 0.5) * self.bin_width, *counts))
    }

    /// Total count in `[center - half_width, center + half_width]`, judged
    /// by bin centers.
    pub fn counts_near(&self, center: f64, half_width: f64) -> u64 {
        self.rows()
            .filter(|(bin_center, _)| (bin_center - center).abs() <= half_width)
            .map(|(_, counts)| counts.iter().sum::<u64>())
            .sum()
    }
}

/// Bin records by relative delay. An empty record list yields an empty
/// spectrum.
pub fn delay_spectrum(
    records: &[DetectionRecord],
    bin_width: f64,
    reference: f64,
) -> Result<DelaySpectrum, SimError> {
    if !(bin_width.is_finite() && bin_width > 0.0) {
        return Err(SimError::InvalidConfig {
            field: "bin_width",
            message: "must be positive",
        });
    }
    let mut bins: alloc::collections::BTreeMap<i64, [u64; 4]> = alloc::collections::BTreeMap::new();
    for record in records {
        let delay = relative_delay(record, reference);
        let index = libm::floor(delay / bin_width) as i64;
        bins.entry(index).or_insert([0; 4])[record.outcome.index()] += 1;
    }
    Ok(DelaySpectrum {
        bin_width,
        bins,
        total: records.len() as u64,
    })
}

/// Coincidence counts `R_{σω}` inside one window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoincidenceCounts {
    pub counts: [u64; 4],
    pub window: Window,
}

impl CoincidenceCounts {
    pub fn get(&self, outcome: Outcome) -> u64 {
        self.counts[outcome.index()]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Post-select records whose relative delay falls inside the window.
pub fn coincidence_select(
    records: &[DetectionRecord],
    window: Window,
    reference: f64,
) -> CoincidenceCounts {
    let mut counts = [0u64; 4];
    for record in records {
        if window.contains(relative_delay(record, reference)) {
            counts[record.outcome.index()] += 1;
        }
    }
    CoincidenceCounts { counts, window }
}

/// Correlation estimated from coincidence counts.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CorrelationEstimate {
    pub e_hat: f64,
    pub std_error: f64,
    pub n: u64,
}

/// `ê = Σ (-σω) R_{σω} / ΣR` with standard error `√((1 - ê²)/ΣR)`.
pub fn estimate_correlation(counts: &CoincidenceCounts) -> Result<CorrelationEstimate, SimError> {
    let n = counts.total();
    if n == 0 {
        return Err(SimError::NoCoincidences);
    }
    let signed: f64 = Outcome::ALL
        .iter()
        .map(|o| -o.sign_product() * counts.get(*o) as f64)
        .sum();
    let e_hat = signed / n as f64;
    let std_error = libm::sqrt((1.0 - e_hat * e_hat).max(0.0) / n as f64);
    Ok(CorrelationEstimate {
        e_hat,
        std_error,
        n,
    })
}

/// The phase preset at which the two models separate maximally:
/// `α = β = 45°`, `γ = -45°`, satisfying `α+γ = 0`, `α+β = β-γ = π/2`.
pub fn discrimination_phases() -> PhaseSettings {
    let quarter = core::f64::consts::FRAC_PI_4;
    PhaseSettings::new(quarter, quarter, -quarter)
}

/// How many combined standard errors count as a discriminating result.
pub const SEPARATION_THRESHOLD_SIGMA: f64 = 5.0;

/// Result of a two-model discrimination run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiscriminationReport {
    pub phases: PhaseSettings,
    /// Analytic correlations at the configured phases (QM, causal).
    pub analytic_qm: f64,
    pub analytic_causal: f64,
    pub estimate_qm: CorrelationEstimate,
    pub estimate_causal: CorrelationEstimate,
    /// `|ê_qm - ê_causal|` in combined standard errors.
    pub separation_sigma: f64,
    pub sufficient_separation: bool,
    /// Set when the phases stray from the discrimination preset.
    pub phase_warning: Option<String>,
}

fn wrap_pi(x: f64) -> f64 {
    let tau = core::f64::consts::TAU;
    let mut r = x - tau * libm::floor(x / tau);
    if r > core::f64::consts::PI {
        r -= tau;
    }
    r
}

/// Check the discrimination phase relations `α+γ = 0`, `α+β = π/2`,
/// `β-γ = π/2` modulo 2π.
pub fn phases_satisfy_discrimination_preset(phases: &PhaseSettings, tolerance: f64) -> bool {
    let half_pi = core::f64::consts::FRAC_PI_2;
    wrap_pi(phases.alpha + phases.gamma).abs() <= tolerance
        && wrap_pi(phases.alpha + phases.beta - half_pi).abs() <= tolerance
        && wrap_pi(phases.beta - phases.gamma - half_pi).abs() <= tolerance
}

/// Run both configurations, post-select the `L` window, and compare the
/// estimated correlations against each other and the analytic values.
///
/// Off-preset phases produce a warning in the report, not an error; the
/// analytic row always refers to the phases actually configured.
pub fn discriminate(
    config_qm: &ExperimentConfig,
    config_causal: &ExperimentConfig,
) -> Result<DiscriminationReport, SimError> {
    if config_qm.model != Model::Qm {
        return Err(SimError::InvalidConfig {
            field: "model",
            message: "first configuration must use the qm model",
        });
    }
    if config_causal.model != Model::Causal {
        return Err(SimError::InvalidConfig {
            field: "model",
            message: "second configuration must use the causal model",
        });
    }
    let estimate_for = |config: &ExperimentConfig| -> Result<CorrelationEstimate, SimError> {
        let records = run_experiment(config)?;
        let reference = config.geometry.reference_delay()?;
        let counts = coincidence_select(&records, config.window, reference);
        estimate_correlation(&counts)
    };
    let estimate_qm = estimate_for(config_qm)?;
    let estimate_causal = estimate_for(config_causal)?;

    let analytic_qm = qm_correlation(&config_qm.phases).value();
    let causal_case = select_model_case(&config_causal.geometry)?;
    let analytic_causal = match causal_case.rule {
        CausalRule::AllBefore => causal_joint_bbb(&config_causal.phases),
        CausalRule::CausalIndistinguishability => causal_joint(&config_causal.phases),
    }
    .correlation()
    .value();

    let combined = libm::sqrt(
        estimate_qm.std_error * estimate_qm.std_error
            + estimate_causal.std_error * estimate_causal.std_error,
    );
    let separation_sigma = if combined > 0.0 {
        (estimate_qm.e_hat - estimate_causal.e_hat).abs() / combined
    } else {
        f64::INFINITY
    };

    let preset_ok = phases_satisfy_discrimination_preset(&config_qm.phases, 1e-9)
        && phases_satisfy_discrimination_preset(&config_causal.phases, 1e-9);
    let phase_warning = if preset_ok {
        None
    } else {
        Some(String::from(
            "phases do not satisfy the discrimination preset (α+γ = 0, α+β = β-γ = π/2); \
             analytic values refer to the configured phases",
        ))
    };

    Ok(DiscriminationReport {
        phases: config_qm.phases,
        analytic_qm,
        analytic_causal,
        estimate_qm,
        estimate_causal,
        separation_sigma,
        sufficient_separation: separation_sigma >= SEPARATION_THRESHOLD_SIGMA,
        phase_warning,
    })
}
