//! Elementary domain types and the tabulated probability amplitudes.
//!
//! The apparatus sends photon 1 through a single unbalanced interferometer
//! (choice splitter BS11, phase `alpha` on the long arm) and photon 2 through
//! a series of two (BS21 with phase `beta`, then BS22 with phase `gamma`).
//! Eight path pairs lead to detection; they fall into four subensembles
//! labelled by the path difference between the two photons' single paths.
//! The two three-path subensembles carry the tabulated pair amplitudes, the
//! photon-2 segment amplitudes, and the per-arm photon-1 amplitudes used by
//! the probability models.

use core::fmt;

use num_complex::Complex;

use crate::kinematics::{Geometry, KinematicsError};

/// Complex probability amplitude.
pub type ComplexAmplitude = Complex<f64>;

/// Speed of light in vacuum, m/s (exact by definition).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Absolute tolerance for analytic identities. Every closed form in this
/// crate is a low-degree trigonometric expression, so double precision
/// leaves several orders of magnitude of headroom.
pub const ANALYTIC_TOLERANCE: f64 = 1e-12;

const TAU: f64 = core::f64::consts::TAU;

/// The three adjustable phases of the interferometer arms, in radians.
///
/// `alpha` sits on photon 1's long arm, `beta` on the long arm ahead of
/// BS21, and `gamma` on the long arm ahead of BS22. All observable outputs
/// are 2π-periodic in each phase.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhaseSettings {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl PhaseSettings {
    pub const fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }

    /// Convenience constructor for degree inputs; the math core is
    /// radians-only.
    pub fn from_degrees(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self::new(alpha.to_radians(), beta.to_radians(), gamma.to_radians())
    }

    /// All phases must be finite real numbers.
    pub fn validate(&self) -> Result<(), AmplitudeError> {
        if self.alpha.is_finite() && self.beta.is_finite() && self.gamma.is_finite() {
            Ok(())
        } else {
            Err(AmplitudeError::NonFinitePhase)
        }
    }

    /// Canonical form with each phase reduced modulo 2π into `[0, 2π)`.
    /// Probability outputs are invariant under this reduction.
    pub fn canonical(&self) -> Self {
        Self::new(
            wrap_two_pi(self.alpha),
            wrap_two_pi(self.beta),
            wrap_two_pi(self.gamma),
        )
    }
}

fn wrap_two_pi(x: f64) -> f64 {
    let r = x - TAU * libm::floor(x / TAU);
    // Guard the half-open interval against rounding at the upper edge.
    if r >= TAU {
        r - TAU
    } else if r < 0.0 {
        r + TAU
    } else {
        r
    }
}

/// Detector port sign, `+` or `-`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const ALL: [Sign; 2] = [Sign::Plus, Sign::Minus];

    /// The sign as ±1.
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Joint detection outcome: photon 1 in D1(`sigma`), photon 2 in D2(`omega`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Outcome {
    pub sigma: Sign,
    pub omega: Sign,
}

impl Outcome {
    pub const fn new(sigma: Sign, omega: Sign) -> Self {
        Self { sigma, omega }
    }

    /// The four outcomes in fixed iteration order: `++, +-, -+, --`.
    pub const ALL: [Outcome; 4] = [
        Outcome::new(Sign::Plus, Sign::Plus),
        Outcome::new(Sign::Plus, Sign::Minus),
        Outcome::new(Sign::Minus, Sign::Plus),
        Outcome::new(Sign::Minus, Sign::Minus),
    ];

    /// Position of this outcome in [`Outcome::ALL`].
    pub fn index(self) -> usize {
        match (self.sigma, self.omega) {
            (Sign::Plus, Sign::Plus) => 0,
            (Sign::Plus, Sign::Minus) => 1,
            (Sign::Minus, Sign::Plus) => 2,
            (Sign::Minus, Sign::Minus) => 3,
        }
    }

    /// The product σω as ±1.
    pub fn sign_product(self) -> f64 {
        self.sigma.value() * self.omega.value()
    }

    /// Compact label, e.g. `pp` for `++`. Used as a stable key in reports.
    pub fn key(self) -> &'static str {
        ["pp", "pm", "mp", "mm"][self.index()]
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.sigma.symbol(), self.omega.symbol())
    }
}

/// Interferometer arm: short (`l`) or long (`L`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arm {
    Short,
    Long,
}

impl Arm {
    pub fn symbol(self) -> char {
        match self {
            Arm::Short => 'l',
            Arm::Long => 'L',
        }
    }

    pub fn length(self, geometry: &Geometry) -> f64 {
        match self {
            Arm::Short => geometry.short_arm,
            Arm::Long => geometry.long_arm,
        }
    }
}

/// Photon 2's ordered pair of arm choices: the impact on BS21 selects
/// `first`, the later impact on BS22 selects `second`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SegmentPair {
    pub first: Arm,
    pub second: Arm,
}

impl SegmentPair {
    pub const fn new(first: Arm, second: Arm) -> Self {
        Self { first, second }
    }
}

impl fmt::Display for SegmentPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.first.symbol(), self.second.symbol())
    }
}

/// One of the eight two-photon path combinations, e.g. `(l,Ll)`: photon 1
/// took the short arm, photon 2 first the long arm and then the short one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PathPair {
    pub photon1: Arm,
    pub photon2: SegmentPair,
}

impl PathPair {
    pub const fn new(photon1: Arm, first: Arm, second: Arm) -> Self {
        Self {
            photon1,
            photon2: SegmentPair::new(first, second),
        }
    }

    /// All eight path pairs, grouped by subensemble:
    /// `(l,LL) | (L,LL), (l,Ll), (l,lL) | (l,ll), (L,Ll), (L,lL) | (L,ll)`.
    pub const ALL: [PathPair; 8] = [
        PathPair::new(Arm::Short, Arm::Long, Arm::Long),
        PathPair::new(Arm::Long, Arm::Long, Arm::Long),
        PathPair::new(Arm::Short, Arm::Long, Arm::Short),
        PathPair::new(Arm::Short, Arm::Short, Arm::Long),
        PathPair::new(Arm::Short, Arm::Short, Arm::Short),
        PathPair::new(Arm::Long, Arm::Long, Arm::Short),
        PathPair::new(Arm::Long, Arm::Short, Arm::Long),
        PathPair::new(Arm::Long, Arm::Short, Arm::Short),
    ];

    pub fn subensemble(self) -> Subensemble {
        subensemble_of(self)
    }
}

impl fmt::Display for PathPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.photon1.symbol(), self.photon2)
    }
}

/// Subensembles of path pairs sharing one detection time difference,
/// labelled by the path difference between the photons' single paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subensemble {
    /// Path difference `2L - l`: the single pair `(l,LL)`.
    TwoLongMinusShort,
    /// Path difference `L`: the three interfering pairs
    /// `(L,LL), (l,Ll), (l,lL)`.
    Long,
    /// Path difference `l`: the three interfering pairs
    /// `(l,ll), (L,Ll), (L,lL)`.
    Short,
    /// Path difference `2l - L`: the single pair `(L,ll)`.
    TwoShortMinusLong,
}

impl Subensemble {
    pub const ALL: [Subensemble; 4] = [
        Subensemble::TwoLongMinusShort,
        Subensemble::Long,
        Subensemble::Short,
        Subensemble::TwoShortMinusLong,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Subensemble::TwoLongMinusShort => "2L-l",
            Subensemble::Long => "L",
            Subensemble::Short => "l",
            Subensemble::TwoShortMinusLong => "2l-L",
        }
    }

    /// The member path pairs of this subensemble.
    pub fn members(self) -> &'static [PathPair] {
        const TWO_LONG: [PathPair; 1] = [PathPair::new(Arm::Short, Arm::Long, Arm::Long)];
        const LONG: [PathPair; 3] = [
            PathPair::new(Arm::Long, Arm::Long, Arm::Long),
            PathPair::new(Arm::Short, Arm::Long, Arm::Short),
            PathPair::new(Arm::Short, Arm::Short, Arm::Long),
        ];
        const SHORT: [PathPair; 3] = [
            PathPair::new(Arm::Short, Arm::Short, Arm::Short),
            PathPair::new(Arm::Long, Arm::Long, Arm::Short),
            PathPair::new(Arm::Long, Arm::Short, Arm::Long),
        ];
        const TWO_SHORT: [PathPair; 1] = [PathPair::new(Arm::Long, Arm::Short, Arm::Short)];
        match self {
            Subensemble::TwoLongMinusShort => &TWO_LONG,
            Subensemble::Long => &LONG,
            Subensemble::Short => &SHORT,
            Subensemble::TwoShortMinusLong => &TWO_SHORT,
        }
    }

    /// Prior probability of this subensemble with balanced 50/50 splitters:
    /// each of the eight path pairs is equally likely, so 1/8, 3/8, 3/8, 1/8.
    pub fn prior(self) -> f64 {
        self.members().len() as f64 / 8.0
    }

    /// True for the two three-path subensembles whose members interfere.
    pub fn interferes(self) -> bool {
        matches!(self, Subensemble::Long | Subensemble::Short)
    }
}

impl fmt::Display for Subensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Classify a path pair by the path difference between its single paths.
pub fn subensemble_of(path: PathPair) -> Subensemble {
    use Arm::Long;
    // Photon-2 total minus photon-1 arm, counted symbolically in long arms.
    let longs2 = [path.photon2.first, path.photon2.second]
        .iter()
        .filter(|a| **a == Long)
        .count() as i8;
    let long1 = i8::from(path.photon1 == Long);
    match longs2 - long1 {
        2 => Subensemble::TwoLongMinusShort,
        1 => Subensemble::Long,
        0 => Subensemble::Short,
        _ => Subensemble::TwoShortMinusLong,
    }
}

/// Photon-1 per-arm first-order amplitude: modulus 1/√2 on both arms, with
/// the phase factor `e^{iα}` on the long arm. The phase convention is
/// observationally inert (only the squared moduli enter the causal
/// all-before rule) and is chosen σ-independent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Photon1SegmentAmplitude {
    pub arm: Arm,
    pub sigma: Sign,
    pub value: ComplexAmplitude,
}

impl Photon1SegmentAmplitude {
    pub fn evaluate(arm: Arm, sigma: Sign, phases: &PhaseSettings) -> Self {
        Self {
            arm,
            sigma,
            value: amp_photon1(arm, sigma, phases),
        }
    }
}

/// Errors from the amplitude tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmplitudeError {
    /// Pair amplitudes are tabulated only for the two interfering
    /// subensembles; the singleton path pairs have none.
    NoTabulatedPairAmplitude { path: PathPair },
    /// The photon-2 segment table covers the three segments occurring in
    /// the `L` subensemble; `ll` is not among them.
    SegmentNotTabulated { segment: SegmentPair },
    /// A phase setting was NaN or infinite.
    NonFinitePhase,
}

impl fmt::Display for AmplitudeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AmplitudeError::NoTabulatedPairAmplitude { path } => {
                write!(f, "no tabulated pair amplitude for path {path}")
            }
            AmplitudeError::SegmentNotTabulated { segment } => {
                write!(f, "segment {segment} not tabulated for subensemble L")
            }
            AmplitudeError::NonFinitePhase => f.write_str("phase settings must be finite"),
        }
    }
}

impl core::error::Error for AmplitudeError {}

/// Source of two-photon pair amplitudes. The production implementation is
/// [`TabulatedAmplitudes`]; verification code accepts any source so that
/// fault-injection fixtures can exercise the property checks.
pub trait PairAmplitudeSource {
    fn amplitude(
        &self,
        path: PathPair,
        outcome: Outcome,
        phases: &PhaseSettings,
    ) -> Result<ComplexAmplitude, AmplitudeError>;
}

/// The tabulated amplitudes of the apparatus.
#[derive(Debug, Clone, Copy, Default)]
pub struct TabulatedAmplitudes;

impl PairAmplitudeSource for TabulatedAmplitudes {
    fn amplitude(
        &self,
        path: PathPair,
        outcome: Outcome,
        phases: &PhaseSettings,
    ) -> Result<ComplexAmplitude, AmplitudeError> {
        amp_pair(path, outcome, phases)
    }
}

const PLUS_ONE: ComplexAmplitude = Complex::new(1.0, 0.0);
const MINUS_ONE: ComplexAmplitude = Complex::new(-1.0, 0.0);
const PLUS_I: ComplexAmplitude = Complex::new(0.0, 1.0);
const MINUS_I: ComplexAmplitude = Complex::new(0.0, -1.0);

/// Two-photon pair amplitude `A_{σω}(path)` for the six interfering path
/// pairs, normalized within each three-path subensemble. Every entry has
/// modulus `1/(2√3)`.
pub fn amp_pair(
    path: PathPair,
    outcome: Outcome,
    phases: &PhaseSettings,
) -> Result<ComplexAmplitude, AmplitudeError> {
    use Arm::{Long, Short};
    // Unit coefficients in outcome order (++, +-, -+, --).
    let (theta, coeffs) = match (path.photon1, path.photon2.first, path.photon2.second) {
        // Subensemble L.
        (Short, Long, Short) => (phases.beta, [MINUS_ONE, MINUS_I, MINUS_I, PLUS_ONE]),
        (Short, Short, Long) => (phases.gamma, [MINUS_ONE, PLUS_I, MINUS_I, MINUS_ONE]),
        (Long, Long, Long) => (
            phases.alpha + phases.beta + phases.gamma,
            [PLUS_ONE, MINUS_I, MINUS_I, MINUS_ONE],
        ),
        // Subensemble l.
        (Short, Short, Short) => (0.0, [PLUS_ONE, PLUS_I, PLUS_I, MINUS_ONE]),
        (Long, Short, Long) => (
            phases.alpha + phases.gamma,
            [PLUS_ONE, MINUS_I, MINUS_I, MINUS_ONE],
        ),
        (Long, Long, Short) => (
            phases.alpha + phases.beta,
            [PLUS_ONE, PLUS_I, MINUS_I, PLUS_ONE],
        ),
        _ => return Err(AmplitudeError::NoTabulatedPairAmplitude { path }),
    };
    let modulus = 1.0 / libm::sqrt(3.0) * 0.5;
    Ok(coeffs[outcome.index()] * ComplexAmplitude::from_polar(modulus, theta))
}

/// Photon-2 single-photon segment amplitude `A_ω(segment)` for the three
/// segments occurring in subensemble `L`, normalized to those three.
/// Every entry has modulus `1/√6`.
pub fn amp_segment(
    segment: SegmentPair,
    omega: Sign,
    phases: &PhaseSettings,
) -> Result<ComplexAmplitude, AmplitudeError> {
    use Arm::{Long, Short};
    // Unit coefficients in (ω = +, ω = -) order.
    let (theta, coeffs) = match (segment.first, segment.second) {
        (Long, Short) => (phases.beta, [MINUS_ONE, MINUS_I]),
        (Short, Long) => (phases.gamma, [MINUS_ONE, PLUS_I]),
        (Long, Long) => (phases.beta + phases.gamma, [MINUS_ONE, PLUS_I]),
        (Short, Short) => return Err(AmplitudeError::SegmentNotTabulated { segment }),
    };
    let modulus = 1.0 / libm::sqrt(3.0) * core::f64::consts::FRAC_1_SQRT_2;
    let coeff = match omega {
        Sign::Plus => coeffs[0],
        Sign::Minus => coeffs[1],
    };
    Ok(coeff * ComplexAmplitude::from_polar(modulus, theta))
}

/// Photon-1 first-order amplitude per arm: `1/√2` on the short arm and
/// `(1/√2) e^{iα}` on the long one, independent of `sigma`.
pub fn amp_photon1(arm: Arm, _sigma: Sign, phases: &PhaseSettings) -> ComplexAmplitude {
    let modulus = core::f64::consts::FRAC_1_SQRT_2;
    match arm {
        Arm::Short => Complex::new(modulus, 0.0),
        Arm::Long => ComplexAmplitude::from_polar(modulus, phases.alpha),
    }
}

/// Detection time difference of a path pair relative to the subensemble-`L`
/// reference peak: `L → 0`, `l → (l-L)/c`, `2L-l → (L-l)/c`,
/// `2l-L → 2(l-L)/c`.
pub fn detection_delay(path: PathPair, geometry: &Geometry) -> Result<f64, KinematicsError> {
    if !(geometry.long_arm > geometry.short_arm && geometry.short_arm > 0.0) {
        return Err(KinematicsError::DegenerateInterferometer {
            long_arm: geometry.long_arm,
            short_arm: geometry.short_arm,
        });
    }
    let spacing = (geometry.long_arm - geometry.short_arm) / SPEED_OF_LIGHT;
    Ok(match path.subensemble() {
        Subensemble::Long => 0.0,
        Subensemble::Short => -spacing,
        Subensemble::TwoLongMinusShort => spacing,
        Subensemble::TwoShortMinusLong => -2.0 * spacing,
    })
}
