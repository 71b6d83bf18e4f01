//! Quantum-mechanical predictions for the interfering subensembles.
//!
//! Under the superposition rule the joint probability of an outcome pair is
//! the squared modulus of the sum of the pair amplitudes over the three
//! indistinguishable paths of the subensemble. For subensemble `L` the sums
//! reduce to closed trigonometric forms, which this module implements
//! alongside the amplitude-sum route so the two can be checked against each
//! other; for subensemble `l` only the amplitude route is exposed.

use core::fmt;

use libm::cos;

use crate::amplitude::{
    AmplitudeError, Outcome, PairAmplitudeSource, PathPair, PhaseSettings, Sign, Subensemble,
    TabulatedAmplitudes,
};

/// The four joint probabilities of one subensemble, indexed by outcome pair
/// in the fixed order `++, +-, -+, --`. Entries lie in `[0, 1]` and sum to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityTable {
    entries: [f64; 4],
}

impl ProbabilityTable {
    pub const fn from_entries(entries: [f64; 4]) -> Self {
        Self { entries }
    }

    /// The no-interference table: 1/4 in every cell.
    pub const fn uniform() -> Self {
        Self::from_entries([0.25; 4])
    }

    pub fn get(&self, outcome: Outcome) -> f64 {
        self.entries[outcome.index()]
    }

    pub fn entries(&self) -> [f64; 4] {
        self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (Outcome, f64)> + '_ {
        Outcome::ALL.into_iter().map(|o| (o, self.get(o)))
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().sum()
    }

    /// Correlation coefficient `E = Σ (-σω) p_{σω}` of this table.
    pub fn correlation(&self) -> CorrelationCoefficient {
        let e = self
            .iter()
            .map(|(o, p)| -o.sign_product() * p)
            .sum::<f64>();
        CorrelationCoefficient(e)
    }

    /// Row sums `P_{σ±}`: single probabilities at detector side 1.
    pub fn side1_marginals(&self) -> SinglesPair {
        SinglesPair {
            plus: self.entries[0] + self.entries[1],
            minus: self.entries[2] + self.entries[3],
        }
    }

    /// Column sums `P_{±ω}`: single probabilities at detector side 2.
    pub fn side2_marginals(&self) -> SinglesPair {
        SinglesPair {
            plus: self.entries[0] + self.entries[2],
            minus: self.entries[1] + self.entries[3],
        }
    }

    /// Largest entrywise absolute difference against another table.
    pub fn max_abs_diff(&self, other: &ProbabilityTable) -> f64 {
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_normalized(&self, tolerance: f64) -> bool {
        (self.total() - 1.0).abs() <= tolerance
            && self
                .entries
                .iter()
                .all(|p| (-tolerance..=1.0 + tolerance).contains(p))
    }
}

/// Correlation coefficient `E ∈ [-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationCoefficient(pub f64);

impl CorrelationCoefficient {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Single-detector probabilities `(P_+, P_-)` at one side; the pair sums
/// to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinglesPair {
    pub plus: f64,
    pub minus: f64,
}

impl SinglesPair {
    pub fn get(&self, sign: Sign) -> f64 {
        match sign {
            Sign::Plus => self.plus,
            Sign::Minus => self.minus,
        }
    }

    pub fn total(&self) -> f64 {
        self.plus + self.minus
    }

    pub fn max_abs_diff(&self, other: &SinglesPair) -> f64 {
        f64::max(
            (self.plus - other.plus).abs(),
            (self.minus - other.minus).abs(),
        )
    }
}

/// Detector side of the setup: side 1 (D1, photon 1, left) or side 2
/// (D2, photon 2, right).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DetectorSide {
    D1,
    D2,
}

/// Errors from the probability models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelError {
    /// The operation covers the two interfering subensembles; singleton
    /// subensembles are handled by the singleton table instead.
    SingletonSubensemble { subensemble: Subensemble },
    /// The singleton table was requested for an interfering path pair.
    NotSingleton { path: PathPair },
    /// The causal model has no stated rule for the request.
    NotSpecifiedByPaper { what: &'static str },
    /// Recognized impact configuration without a probability rule.
    UnsupportedCase,
    Amplitude(AmplitudeError),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::SingletonSubensemble { subensemble } => write!(
                f,
                "subensemble {subensemble} has a single path; use the singleton table"
            ),
            ModelError::NotSingleton { path } => {
                write!(f, "path {path} belongs to an interfering subensemble")
            }
            ModelError::NotSpecifiedByPaper { what } => {
                write!(f, "not specified by paper: {what}")
            }
            ModelError::UnsupportedCase => {
                f.write_str("unsupported case: (b11, b21, a22) has no probability rule here")
            }
            ModelError::Amplitude(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ModelError {}

impl From<AmplitudeError> for ModelError {
    fn from(e: AmplitudeError) -> Self {
        ModelError::Amplitude(e)
    }
}

/// Joint probabilities by the superposition rule: `|Σ_paths A_{σω}(path)|²`
/// over the three paths of an interfering subensemble.
pub fn qm_joint(
    subensemble: Subensemble,
    phases: &PhaseSettings,
) -> Result<ProbabilityTable, ModelError> {
    qm_joint_with(&TabulatedAmplitudes, subensemble, phases)
}

/// [`qm_joint`] with an injectable amplitude source.
pub fn qm_joint_with(
    amplitudes: &dyn PairAmplitudeSource,
    subensemble: Subensemble,
    phases: &PhaseSettings,
) -> Result<ProbabilityTable, ModelError> {
    if !subensemble.interferes() {
        return Err(ModelError::SingletonSubensemble { subensemble });
    }
    let mut entries = [0.0; 4];
    for outcome in Outcome::ALL {
        let mut sum = crate::amplitude::ComplexAmplitude::new(0.0, 0.0);
        for &path in subensemble.members() {
            sum += amplitudes.amplitude(path, outcome, phases)?;
        }
        entries[outcome.index()] = sum.norm_sqr();
    }
    Ok(ProbabilityTable::from_entries(entries))
}

/// Closed-form joint probabilities for subensemble `L`:
/// `(1/12)[3 - 2σ cos(α+β) - 2σω cos(α+γ) + 2ω cos(γ-β)]`.
pub fn qm_joint_closed_long(phases: &PhaseSettings) -> ProbabilityTable {
    let c_ab = cos(phases.alpha + phases.beta);
    let c_ag = cos(phases.alpha + phases.gamma);
    let c_gb = cos(phases.gamma - phases.beta);
    let mut entries = [0.0; 4];
    for outcome in Outcome::ALL {
        let s = outcome.sigma.value();
        let w = outcome.omega.value();
        entries[outcome.index()] = (3.0 - 2.0 * s * c_ab - 2.0 * s * w * c_ag + 2.0 * w * c_gb) / 12.0;
    }
    ProbabilityTable::from_entries(entries)
}

/// Outcome table for the two singleton path pairs `(l,LL)` and `(L,ll)`:
/// with no interference partners and balanced splitters every outcome has
/// probability 1/4, independent of the phases.
pub fn qm_joint_singleton(path: PathPair) -> Result<ProbabilityTable, ModelError> {
    if path.subensemble().interferes() {
        return Err(ModelError::NotSingleton { path });
    }
    Ok(ProbabilityTable::uniform())
}

/// Correlation coefficient for subensemble `L`: `(2/3) cos(α+γ)`.
pub fn qm_correlation(phases: &PhaseSettings) -> CorrelationCoefficient {
    CorrelationCoefficient(2.0 / 3.0 * cos(phases.alpha + phases.gamma))
}

/// Single-detector probabilities for an interfering subensemble.
///
/// Side 2, `L`: `1/2 ± (1/3) cos(β-γ)`; side 1, `L`: `1/2 ∓ (1/3) cos(α+β)`;
/// side 1, `l`: `1/2 ± (1/3) cos(α+β)`. Side 2 of subensemble `l` has no
/// printed closed form and is computed as the marginal of the amplitude
/// route.
pub fn qm_singles(
    side: DetectorSide,
    subensemble: Subensemble,
    phases: &PhaseSettings,
) -> Result<SinglesPair, ModelError> {
    if !subensemble.interferes() {
        return Err(ModelError::SingletonSubensemble { subensemble });
    }
    let c_ab = cos(phases.alpha + phases.beta);
    let c_bg = cos(phases.beta - phases.gamma);
    Ok(match (side, subensemble) {
        (DetectorSide::D1, Subensemble::Long) => SinglesPair {
            plus: 0.5 - c_ab / 3.0,
            minus: 0.5 + c_ab / 3.0,
        },
        (DetectorSide::D2, Subensemble::Long) => SinglesPair {
            plus: 0.5 + c_bg / 3.0,
            minus: 0.5 - c_bg / 3.0,
        },
        (DetectorSide::D1, Subensemble::Short) => SinglesPair {
            plus: 0.5 + c_ab / 3.0,
            minus: 0.5 - c_ab / 3.0,
        },
        (DetectorSide::D2, Subensemble::Short) => {
            qm_joint(Subensemble::Short, phases)?.side2_marginals()
        }
        _ => unreachable!("interfering subensembles only"),
    })
}

/// Unconditioned probability of a `+` count at D1 over the full eight-path
/// ensemble, mixing the subensemble singles with the 1/8-per-path priors.
/// The phase-dependent terms cancel, leaving exactly 1/2: an observer
/// watching only D1 learns nothing about the remote phase settings.
pub fn qm_no_signaling_marginal(phases: &PhaseSettings) -> f64 {
    let long = qm_singles(DetectorSide::D1, Subensemble::Long, phases)
        .expect("interfering subensemble")
        .plus;
    let short = qm_singles(DetectorSide::D1, Subensemble::Short, phases)
        .expect("interfering subensemble")
        .plus;
    let singleton = ProbabilityTable::uniform().side1_marginals().plus;
    Subensemble::Long.prior() * long
        + Subensemble::Short.prior() * short
        + (Subensemble::TwoLongMinusShort.prior() + Subensemble::TwoShortMinusLong.prior())
            * singleton
}
