//! The causal impact-timing model and its indistinguishability condition.
//!
//! Outcome choices are taken to be fixed at the arrival times on the beam
//! splitters, judged per splitter in that splitter's own inertial frame.
//! An impact is *before* (`b`) when, in that frame, it precedes the other
//! photon's first impact, and *non-before* (`a`) otherwise. Two impact
//! configurations have probability rules:
//!
//! - all-before `(b11, b21, b22)`: no two-photon interference survives and
//!   only the photon-2 segments `Ll`/`lL` interfere first-order at BS22;
//! - the `(b11, a21, b22)` family selected by the indistinguishability
//!   condition, where `(L,LL)` and `(l,lL)` interfere second-order at
//!   BS11 & BS21 while `(l,Ll)` and `(l,lL)` interfere first-order at BS22.
//!
//! The condition itself: a set of paths can produce an interference of a
//! given order at a splitter only if every one of them took part in any
//! preceding interference of the same order earlier in the series. The
//! remaining configuration `(b11, b21, a22)` is recognized but has no rule
//! here.
//!
//! All probabilities below are for subensemble-`L` post-selection; the model
//! does not specify rules for the other subensembles.

use libm::cos;

use crate::amplitude::{
    amp_photon1, amp_segment, Arm, Outcome, PathPair, PhaseSettings, SegmentPair, Subensemble,
    ANALYTIC_TOLERANCE,
};
use crate::qm::{
    qm_singles, CorrelationCoefficient, DetectorSide, ModelError, ProbabilityTable, SinglesPair,
};

/// Beam splitter identifiers: BS11 on side 1, BS21 and BS22 in series on
/// side 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BeamSplitterId {
    Bs11,
    Bs21,
    Bs22,
}

impl BeamSplitterId {
    pub const ALL: [BeamSplitterId; 3] =
        [BeamSplitterId::Bs11, BeamSplitterId::Bs21, BeamSplitterId::Bs22];

    pub fn label(self) -> &'static str {
        match self {
            BeamSplitterId::Bs11 => "BS11",
            BeamSplitterId::Bs21 => "BS21",
            BeamSplitterId::Bs22 => "BS22",
        }
    }
}

/// Before/non-before label of one impact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ImpactLabel {
    Before,
    NonBefore,
}

impl ImpactLabel {
    pub fn symbol(self) -> char {
        match self {
            ImpactLabel::Before => 'b',
            ImpactLabel::NonBefore => 'a',
        }
    }
}

/// One labelled impact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ImpactClass {
    pub beam_splitter: BeamSplitterId,
    pub label: ImpactLabel,
}

/// Which probability rule applies to a classified configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CausalRule {
    /// All impacts before: the `(b11, b21, b22)` product rule.
    AllBefore,
    /// The indistinguishability-condition rule of the `(b11, a21, b22)`
    /// family; every at-rest configuration lands here.
    CausalIndistinguishability,
}

/// A classified impact configuration together with its resolved rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelCase {
    /// Labels for (BS11, BS21, BS22).
    pub classes: [ImpactClass; 3],
    pub rule: CausalRule,
}

/// Resolve the probability rule for a label triple (BS11, BS21, BS22).
///
/// `(b,b,b)` selects the all-before rule and `(b,b,a)` is rejected as
/// unsupported. Every other triple falls to the indistinguishability rule:
/// whenever the series impacts are not both before ones, the condition
/// forbids second-order interference at BS22, which is exactly the
/// `(b11, a21, b22)` family. Beam splitters at rest can never realize
/// `(b,b,·)` (the two lab-time comparisons are mutually exclusive), so
/// at-rest configurations always land on the indistinguishability rule,
/// whatever the time ordering.
pub fn resolve_model_case(labels: [ImpactLabel; 3]) -> Result<ModelCase, ModelError> {
    use ImpactLabel::{Before, NonBefore};
    let rule = match labels {
        [Before, Before, Before] => CausalRule::AllBefore,
        [Before, Before, NonBefore] => return Err(ModelError::UnsupportedCase),
        _ => CausalRule::CausalIndistinguishability,
    };
    let classes = [
        ImpactClass {
            beam_splitter: BeamSplitterId::Bs11,
            label: labels[0],
        },
        ImpactClass {
            beam_splitter: BeamSplitterId::Bs21,
            label: labels[1],
        },
        ImpactClass {
            beam_splitter: BeamSplitterId::Bs22,
            label: labels[2],
        },
    ];
    Ok(ModelCase { classes, rule })
}

/// Interference order: first order is single-photon (photon 2 with itself),
/// second order is the nonlocal two-photon kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InterferenceOrder {
    First,
    Second,
}

/// Stage of photon 2's splitter series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesStage {
    Bs21,
    Bs22,
}

/// Where an interference assertion applies. Second-order interferences are
/// joint between BS11 and one series splitter; first-order ones are local
/// to BS22.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InterferenceLocation {
    Bs11AndBs21,
    Bs22,
    Bs11AndBs22,
}

/// One interference assertion over a pair of subensemble-`L` paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InterferenceRule {
    pub paths: [PathPair; 2],
    pub order: InterferenceOrder,
    pub location: InterferenceLocation,
    pub produces: bool,
}

/// The fixed rule set the indistinguishability condition yields for the
/// three subensemble-`L` paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InterferenceRuleSet {
    pub rules: [InterferenceRule; 3],
}

const PATH_L_LL: PathPair = PathPair::new(Arm::Long, Arm::Long, Arm::Long);
const PATH_S_LS: PathPair = PathPair::new(Arm::Short, Arm::Long, Arm::Short);
const PATH_S_SL: PathPair = PathPair::new(Arm::Short, Arm::Short, Arm::Long);

/// The three assertions: `(L,LL)`/`(l,lL)` interfere second-order at
/// BS11 & BS21; `(l,Ll)`/`(l,lL)` interfere first-order at BS22; and
/// `(L,LL)`/`(l,Ll)` do not interfere second-order at BS11 & BS22.
pub fn cic_rules() -> InterferenceRuleSet {
    InterferenceRuleSet {
        rules: [
            InterferenceRule {
                paths: [PATH_L_LL, PATH_S_SL],
                order: InterferenceOrder::Second,
                location: InterferenceLocation::Bs11AndBs21,
                produces: true,
            },
            InterferenceRule {
                paths: [PATH_S_LS, PATH_S_SL],
                order: InterferenceOrder::First,
                location: InterferenceLocation::Bs22,
                produces: true,
            },
            InterferenceRule {
                paths: [PATH_L_LL, PATH_S_LS],
                order: InterferenceOrder::Second,
                location: InterferenceLocation::Bs11AndBs22,
                produces: false,
            },
        ],
    }
}

/// Arm lengths counted symbolically as (short arms, long arms) so that
/// indistinguishability is exact for any geometry with `L ≠ l`.
type SymbolicLength = (i8, i8);

fn arm_units(arm: Arm) -> SymbolicLength {
    match arm {
        Arm::Short => (1, 0),
        Arm::Long => (0, 1),
    }
}

fn add(a: SymbolicLength, b: SymbolicLength) -> SymbolicLength {
    (a.0 + b.0, a.1 + b.1)
}

fn sub(a: SymbolicLength, b: SymbolicLength) -> SymbolicLength {
    (a.0 - b.0, a.1 - b.1)
}

/// Photon 2's accumulated path at a series stage.
fn photon2_partial(segments: SegmentPair, stage: SeriesStage) -> SymbolicLength {
    match stage {
        SeriesStage::Bs21 => arm_units(segments.first),
        SeriesStage::Bs22 => add(arm_units(segments.first), arm_units(segments.second)),
    }
}

/// The timing signature that must coincide for an interference of the given
/// order: the accumulated photon-2 length for first order, the two-photon
/// length difference for second order.
fn interference_key(path: PathPair, order: InterferenceOrder, stage: SeriesStage) -> SymbolicLength {
    let partial = photon2_partial(path.photon2, stage);
    match order {
        InterferenceOrder::First => partial,
        InterferenceOrder::Second => sub(partial, arm_units(path.photon1)),
    }
}

/// The branch content that must differ somewhere for the paths to have
/// anything to interfere: photon 2's segment prefix alone for first order,
/// combined with photon 1's arm for second order.
fn branch_signature(path: PathPair, order: InterferenceOrder, stage: SeriesStage) -> (Arm, Arm, Arm) {
    let second = match stage {
        // Mark the untraversed stage with the first arm so it never
        // distinguishes prefixes.
        SeriesStage::Bs21 => path.photon2.first,
        SeriesStage::Bs22 => path.photon2.second,
    };
    match order {
        InterferenceOrder::First => (path.photon2.first, second, path.photon2.first),
        InterferenceOrder::Second => (path.photon2.first, second, path.photon1),
    }
}

/// True when the set is a genuine interference at the stage: at least two
/// paths, equal timing signatures, and differing branches.
fn interferes_at(paths: &[PathPair], order: InterferenceOrder, stage: SeriesStage) -> bool {
    if paths.len() < 2 {
        return false;
    }
    let key = interference_key(paths[0], order, stage);
    if paths
        .iter()
        .any(|p| interference_key(*p, order, stage) != key)
    {
        return false;
    }
    let first_branch = branch_signature(paths[0], order, stage);
    paths
        .iter()
        .any(|p| branch_signature(*p, order, stage) != first_branch)
}

/// Evaluate the indistinguishability condition for a candidate path set at
/// a stage of the series, over the three subensemble-`L` paths: the
/// candidates must form an interference at the stage, and any earlier
/// interference of the same order must have involved all of them.
pub fn cic_allows(candidates: &[PathPair], order: InterferenceOrder, stage: SeriesStage) -> bool {
    if !interferes_at(candidates, order, stage) {
        return false;
    }
    if stage == SeriesStage::Bs22 {
        let ensemble = Subensemble::Long.members();
        // Group the ensemble by timing signature at BS21; each group that
        // interferes there is a preceding interference of this order.
        for (i, &seed) in ensemble.iter().enumerate() {
            let key = interference_key(seed, order, SeriesStage::Bs21);
            if ensemble[..i]
                .iter()
                .any(|p| interference_key(*p, order, SeriesStage::Bs21) == key)
            {
                continue; // group already considered
            }
            let group: alloc::vec::Vec<PathPair> = ensemble
                .iter()
                .copied()
                .filter(|p| interference_key(*p, order, SeriesStage::Bs21) == key)
                .collect();
            if interferes_at(&group, order, SeriesStage::Bs21)
                && !candidates.iter().all(|c| group.contains(c))
            {
                return false;
            }
        }
    }
    true
}

/// Joint probabilities for the all-before case, closed form:
/// `1/4 + ω (1/6) cos(β-γ)`.
pub fn causal_joint_bbb(phases: &PhaseSettings) -> ProbabilityTable {
    let c_bg = cos(phases.beta - phases.gamma);
    let mut entries = [0.0; 4];
    for outcome in Outcome::ALL {
        entries[outcome.index()] = 0.25 + outcome.omega.value() * c_bg / 6.0;
    }
    ProbabilityTable::from_entries(entries)
}

/// The all-before joint probabilities by the amplitude route:
/// `|A_σ(L)|² |A_ω(LL)|² + |A_σ(l)|² |A_ω(Ll) + A_ω(lL)|²`.
///
/// Kept separate from [`causal_joint_bbb`] so the two routes can be checked
/// against each other.
pub fn causal_joint_bbb_amplitude_route(
    phases: &PhaseSettings,
) -> Result<ProbabilityTable, ModelError> {
    let seg_ll = SegmentPair::new(Arm::Long, Arm::Long);
    let seg_ls = SegmentPair::new(Arm::Long, Arm::Short);
    let seg_sl = SegmentPair::new(Arm::Short, Arm::Long);
    let mut entries = [0.0; 4];
    for outcome in Outcome::ALL {
        let p1_long = amp_photon1(Arm::Long, outcome.sigma, phases).norm_sqr();
        let p1_short = amp_photon1(Arm::Short, outcome.sigma, phases).norm_sqr();
        let lone = amp_segment(seg_ll, outcome.omega, phases)?.norm_sqr();
        let interfering = (amp_segment(seg_ls, outcome.omega, phases)?
            + amp_segment(seg_sl, outcome.omega, phases)?)
        .norm_sqr();
        entries[outcome.index()] = p1_long * lone + p1_short * interfering;
    }
    Ok(ProbabilityTable::from_entries(entries))
}

/// Single-detector probabilities for the all-before case: side 2 keeps the
/// first-order fringe `1/2 ± (1/3) cos(β-γ)`, side 1 is flat at 1/2.
pub fn causal_singles_bbb(side: DetectorSide, phases: &PhaseSettings) -> SinglesPair {
    match side {
        DetectorSide::D1 => SinglesPair {
            plus: 0.5,
            minus: 0.5,
        },
        DetectorSide::D2 => {
            let c_bg = cos(phases.beta - phases.gamma);
            SinglesPair {
                plus: 0.5 + c_bg / 3.0,
                minus: 0.5 - c_bg / 3.0,
            }
        }
    }
}

/// Per-path contributions to the indistinguishability-rule joint
/// probabilities, in the order `(L,LL), (l,lL), (l,Ll)`:
///
/// ```text
/// (L,LL): (1/4)[1 - σ cos(α+β)]
/// (l,lL): (1/4)[1 - σ cos(α+β)][1 + ω cos(γ-β)]
/// (l,Ll): (1/4)[1 + ω cos(γ-β)]
/// ```
///
/// The σ factor carries the BS11 & BS21 two-photon interference, the ω
/// factor the BS22 single-photon one; each table sums to 1.
pub fn causal_path_contributions(phases: &PhaseSettings) -> [(PathPair, ProbabilityTable); 3] {
    let c_ab = cos(phases.alpha + phases.beta);
    let c_gb = cos(phases.gamma - phases.beta);
    let mut tables = [[0.0; 4]; 3];
    for outcome in Outcome::ALL {
        let s = outcome.sigma.value();
        let w = outcome.omega.value();
        let two_photon = 1.0 - s * c_ab;
        let one_photon = 1.0 + w * c_gb;
        tables[0][outcome.index()] = 0.25 * two_photon;
        tables[1][outcome.index()] = 0.25 * two_photon * one_photon;
        tables[2][outcome.index()] = 0.25 * one_photon;
    }
    [
        (PATH_L_LL, ProbabilityTable::from_entries(tables[0])),
        (PATH_S_SL, ProbabilityTable::from_entries(tables[1])),
        (PATH_S_LS, ProbabilityTable::from_entries(tables[2])),
    ]
}

/// Joint probabilities under the indistinguishability rule, closed form:
/// `(1/12)[3 - 2σ cos(α+β) + 2ω cos(γ-β) - σω cos(α+β) cos(γ-β)]`.
pub fn causal_joint(phases: &PhaseSettings) -> ProbabilityTable {
    let c_ab = cos(phases.alpha + phases.beta);
    let c_gb = cos(phases.gamma - phases.beta);
    let mut entries = [0.0; 4];
    for outcome in Outcome::ALL {
        let s = outcome.sigma.value();
        let w = outcome.omega.value();
        entries[outcome.index()] =
            (3.0 - 2.0 * s * c_ab + 2.0 * w * c_gb - s * w * c_ab * c_gb) / 12.0;
    }
    ProbabilityTable::from_entries(entries)
}

/// [`causal_joint`] by equal-weight summation of the per-path contributions.
/// The 1/3 weight follows from every involved path contributing the same
/// way to the outcome, and is forced by normalization.
pub fn causal_joint_path_route(phases: &PhaseSettings) -> ProbabilityTable {
    let contributions = causal_path_contributions(phases);
    let mut entries = [0.0; 4];
    for (_, table) in &contributions {
        for outcome in Outcome::ALL {
            entries[outcome.index()] += table.get(outcome) / 3.0;
        }
    }
    ProbabilityTable::from_entries(entries)
}

/// The causal correlation coefficient `(1/3) cos(α+β) cos(γ-β)`.
pub fn causal_correlation(phases: &PhaseSettings) -> CorrelationCoefficient {
    CorrelationCoefficient(
        cos(phases.alpha + phases.beta) * cos(phases.gamma - phases.beta) / 3.0,
    )
}

/// Single-detector probabilities under the indistinguishability rule:
/// side 1 `1/2 ∓ (1/3) cos(α+β)` by σ, side 2 `1/2 ± (1/3) cos(β-γ)` by ω.
/// Both coincide with the quantum-mechanical subensemble-`L` singles.
pub fn causal_singles(side: DetectorSide, phases: &PhaseSettings) -> SinglesPair {
    match side {
        DetectorSide::D1 => {
            let c_ab = cos(phases.alpha + phases.beta);
            SinglesPair {
                plus: 0.5 - c_ab / 3.0,
                minus: 0.5 + c_ab / 3.0,
            }
        }
        DetectorSide::D2 => {
            let c_bg = cos(phases.beta - phases.gamma);
            SinglesPair {
                plus: 0.5 + c_bg / 3.0,
                minus: 0.5 - c_bg / 3.0,
            }
        }
    }
}

/// The causal model is stated for subensemble-`L` post-selection only;
/// requests for any other subensemble are refused rather than guessed.
pub fn causal_joint_for(
    subensemble: Subensemble,
    phases: &PhaseSettings,
    rule: CausalRule,
) -> Result<ProbabilityTable, ModelError> {
    if subensemble != Subensemble::Long {
        return Err(ModelError::NotSpecifiedByPaper {
            what: "causal-model probabilities outside subensemble L",
        });
    }
    Ok(match rule {
        CausalRule::AllBefore => causal_joint_bbb(phases),
        CausalRule::CausalIndistinguishability => causal_joint(phases),
    })
}

/// Outcome of the non-before consistency check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContradictionReport {
    pub consistent: bool,
    /// `|P^QM_{σ±} - P(b11)_σ| = (1/3)|cos(α+β)|`.
    pub discrepancy: f64,
}

/// Demonstrate numerically why the series impacts cannot both be treated as
/// non-before ones: that assumption forces the sum-of-amplitudes rule, whose
/// side-1 marginal `P^QM_{σ±}` must then equal the before-impact singles
/// `P(b11)_σ = 1/2` — yet the two differ by `(1/3)|cos(α+β)|`, which is
/// nonzero except at isolated phase settings.
pub fn verify_nonbefore_contradiction(phases: &PhaseSettings) -> ContradictionReport {
    let qm_side1 = qm_singles(DetectorSide::D1, Subensemble::Long, phases)
        .expect("subensemble L interferes")
        .plus;
    let before_side1 = causal_singles_bbb(DetectorSide::D1, phases).plus;
    let discrepancy = (qm_side1 - before_side1).abs();
    ContradictionReport {
        consistent: discrepancy < ANALYTIC_TOLERANCE,
        discrepancy,
    }
}
