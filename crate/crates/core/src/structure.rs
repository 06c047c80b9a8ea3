//! Closed-form structure of a free product `(M₁,φ₁) ⋆ (M₂,φ₂)`.
//!
//! The product splits as `M_d ⊕ M_c`. The discrete part `M_d` is read off
//! from the largest one-dimensional central summand `p` of either algebra:
//! every matrix block `B(H_j)` of the *other* algebra with
//! `Σ_s 1/λ_s < 1/(1 − φ(p))` survives, with entry weights
//! `λ_s (1 − (1 − φ(p)) Σ_r 1/λ_r)`. The remainder `M_c` is a full factor
//! whose type is fixed by the joint modular data of both inputs.
//!
//! Two interpretive choices are built in and surfaced in every report:
//! only one-dimensional blocks compete for `p`, and a tie between the two
//! algebras at the maximum is evaluated rather than zeroing `M_d` (both
//! choices of maximizer provably give the same atoms when the tied value
//! exceeds 1/2).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraSpec, Dimension, MatrixBlock, ModularDescriptor, SpecDocument, SpecError};
use crate::cite;
use crate::modular::{self, FactorType, ModularError, RatioGroup, TSet};
use crate::rational::Rational;
use crate::two_proj;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StructureError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Modular(#[from] ModularError),
    #[error("non-tracial (ℂ⊕ℂ)⋆(ℂ⊕ℂ) is not supported")]
    UnsupportedNonTracialDim4,
    #[error("expected two algebras of the form ℂ⊕ℂ")]
    NotDim4,
    #[error("internal identity violated: {0}")]
    IdentityViolation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    First,
    Second,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::First => Side::Second,
            Side::Second => Side::First,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Side::First => 1,
            Side::Second => 2,
        }
    }
}

impl Serialize for Side {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(self.number())
    }
}

impl<'de> Deserialize<'de> for Side {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match u8::deserialize(d)? {
            1 => Ok(Side::First),
            2 => Ok(Side::Second),
            n => Err(serde::de::Error::custom(format!("side must be 1 or 2, got {n}"))),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M{}", self.number())
    }
}

/// A block of one input algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BlockRef {
    pub side: Side,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxAtomSelection {
    pub side: Side,
    /// Block index of the one-dimensional block within its algebra.
    pub atom_index: usize,
    pub value: Rational,
    pub co_maximizers: Vec<BlockRef>,
}

impl MaxAtomSelection {
    pub fn maximizer(&self) -> BlockRef {
        BlockRef {
            side: self.side,
            index: self.atom_index,
        }
    }

    /// The maximizer followed by every co-maximizer.
    pub fn all_maximizers(&self) -> Vec<BlockRef> {
        std::iter::once(self.maximizer())
            .chain(self.co_maximizers.iter().copied())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomSource {
    /// A surviving matrix block of one input.
    Block(BlockRef),
    /// `e ∧ f` for one-dimensional summands `e` of `M₁` and `f` of `M₂`.
    Meet { first: usize, second: usize },
    /// A block carried over unchanged from the non-trivial factor of a
    /// product with `ℂ`.
    Verbatim(BlockRef),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomBlock {
    pub source: AtomSource,
    pub dim: usize,
    pub per_entry_weights: Vec<Rational>,
    pub total_weight: Rational,
}

impl AtomBlock {
    fn new(source: AtomSource, per_entry_weights: Vec<Rational>) -> Self {
        AtomBlock {
            source,
            dim: per_entry_weights.len(),
            total_weight: per_entry_weights.iter().sum(),
            per_entry_weights,
        }
    }

    /// Source-independent identity used for multiset comparisons.
    pub fn shape(&self) -> (usize, Vec<Rational>) {
        (self.dim, self.per_entry_weights.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlagStatus {
    Proven(String),
    ClaimedElsewhere(String),
    Unknown,
    /// The continuous part is not a factor, or there is none.
    NotApplicable,
}

impl FlagStatus {
    pub fn is_proven(&self) -> bool {
        matches!(self, FlagStatus::Proven(_))
    }
}

impl fmt::Display for FlagStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlagStatus::Proven(c) => write!(f, "proven [{c}]"),
            FlagStatus::ClaimedElsewhere(c) => write!(f, "claimed [{c}]"),
            FlagStatus::Unknown => f.write_str("unknown"),
            FlagStatus::NotApplicable => f.write_str("n/a"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContinuousKind {
    Factor(FactorType),
    /// `L^∞(0,1) ⊗ M₂(ℂ)` from two free projections.
    NonFactorDim4,
    Absent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SdGroup {
    pub group: RatioGroup,
    pub status: FlagStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContinuousPart {
    pub weight: Rational,
    pub kind: ContinuousKind,
    pub t_set: TSet,
    pub full: FlagStatus,
    pub asymptotic_centralizer_trivial: FlagStatus,
    pub prime: FlagStatus,
    pub no_cartan_in_nonhyperfinite: FlagStatus,
    pub state_centralizer_ergodic: FlagStatus,
    pub sd_group: SdGroup,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub condition: String,
    pub outcome: String,
    pub citation: String,
}

impl TraceStep {
    pub fn new(condition: impl Into<String>, outcome: impl Into<String>, citation: &str) -> Self {
        TraceStep {
            condition: condition.into(),
            outcome: outcome.into(),
            citation: citation.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub atoms: Vec<AtomBlock>,
    pub continuous: ContinuousPart,
    pub amenable: bool,
    #[serde(default)]
    pub selection: Option<MaxAtomSelection>,
    /// Set when one input is `ℂ`: the other input, unchanged.
    #[serde(default)]
    pub passthrough: Option<SpecDocument>,
    pub warnings: Vec<String>,
    pub trace: Vec<TraceStep>,
}

impl StructureReport {
    pub fn atom_total(&self) -> Rational {
        self.atoms.iter().map(|a| &a.total_weight).sum()
    }

    /// Atom shapes sorted, for order-independent comparison.
    pub fn atom_multiset(&self) -> Vec<(usize, Vec<Rational>)> {
        atom_multiset(&self.atoms)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

pub fn atom_multiset(atoms: &[AtomBlock]) -> Vec<(usize, Vec<Rational>)> {
    let mut v: Vec<_> = atoms.iter().map(AtomBlock::shape).collect();
    v.sort();
    v
}

fn spec_of<'a>(side: Side, a: &'a AlgebraSpec, b: &'a AlgebraSpec) -> &'a AlgebraSpec {
    match side {
        Side::First => a,
        Side::Second => b,
    }
}

/// Largest one-dimensional central summand across both algebras. Ties are
/// listed; side 1 and lower block indices win the primary slot.
pub fn select_max_atom(a: &AlgebraSpec, b: &AlgebraSpec) -> Option<MaxAtomSelection> {
    let mut candidates: Vec<(BlockRef, Rational)> = Vec::new();
    for (side, spec) in [(Side::First, a), (Side::Second, b)] {
        for (index, mass) in spec.scalar_atoms() {
            candidates.push((BlockRef { side, index }, mass));
        }
    }
    let value = candidates.iter().map(|(_, m)| m).max()?.clone();
    let mut tied: Vec<BlockRef> = candidates
        .into_iter()
        .filter(|(_, m)| *m == value)
        .map(|(r, _)| r)
        .collect();
    tied.sort();
    let primary = tied.remove(0);
    Some(MaxAtomSelection {
        side: primary.side,
        atom_index: primary.index,
        value,
        co_maximizers: tied,
    })
}

/// Blocks of `other` that survive against a maximal atom of mass `value`,
/// with their entry weights.
pub fn discrete_part(sel: &MaxAtomSelection, other: &AlgebraSpec) -> Vec<AtomBlock> {
    discrete_part_against(&sel.value, sel.side.other(), other)
}

fn discrete_part_against(value: &Rational, other_side: Side, other: &AlgebraSpec) -> Vec<AtomBlock> {
    let deficit = Rational::one() - value.clone();
    if !deficit.is_positive() {
        return Vec::new();
    }
    let threshold = deficit.recip();
    other
        .blocks()
        .iter()
        .enumerate()
        .filter_map(|(j, block)| {
            let recip = block.reciprocal_sum();
            (recip < threshold).then(|| {
                let factor = Rational::one() - &deficit * &recip;
                let weights = block.weights().iter().map(|l| l * &factor).collect();
                AtomBlock::new(
                    AtomSource::Block(BlockRef {
                        side: other_side,
                        index: j,
                    }),
                    weights,
                )
            })
        })
        .collect()
}

/// Discrete part computed as if `maximizer` were the chosen atom.
pub fn discrete_part_from(maximizer: BlockRef, a: &AlgebraSpec, b: &AlgebraSpec) -> Vec<AtomBlock> {
    let own = spec_of(maximizer.side, a, b);
    let value = own.blocks()[maximizer.index].weights()[0].clone();
    let other_side = maximizer.side.other();
    discrete_part_against(&value, other_side, spec_of(other_side, a, b))
}

/// Cross-checks the closed-form entry weights of `block` against the
/// compressed-corner mass `φ(r) = λ₁ max{1 − (1−φ(p)) Σ 1/λ_i, 0}` and
/// `φ(f_ss) = (λ_s/λ₁) φ(r)`.
pub fn case2ii_identity_check(
    value: &Rational,
    block: &MatrixBlock,
    emitted: Option<&AtomBlock>,
) -> Result<bool, StructureError> {
    let lead = &block.weights()[0];
    let raw = Rational::one() - &(Rational::one() - value.clone()) * &block.reciprocal_sum();
    let r_mass = lead * &raw.max(Rational::zero());
    match emitted {
        None if r_mass.is_zero() => Ok(true),
        None => Err(StructureError::IdentityViolation(format!(
            "block {block:?} has corner mass {r_mass} but no atom was emitted"
        ))),
        Some(atom) => {
            let expected: Vec<Rational> = block.weights().iter().map(|l| &(l / lead) * &r_mass).collect();
            let total: Rational = expected.iter().sum();
            if r_mass.is_positive() && atom.per_entry_weights == expected && atom.total_weight == total {
                Ok(true)
            } else {
                Err(StructureError::IdentityViolation(format!(
                    "entry weights {:?} disagree with corner-mass weights {expected:?}",
                    atom.per_entry_weights
                )))
            }
        }
    }
}

fn all_hyperfinite(a: &AlgebraSpec, b: &AlgebraSpec) -> bool {
    a.is_hyperfinite() && b.is_hyperfinite()
}

/// Type, T-set and flag ladder for the diffuse factor part.
pub fn continuous_part(
    a: &AlgebraSpec,
    b: &AlgebraSpec,
    atoms: &[AtomBlock],
) -> Result<ContinuousPart, StructureError> {
    let weight = Rational::one() - atoms.iter().map(|x| &x.total_weight).sum::<Rational>();
    let group = modular::combine(&[modular::group_of(a)?, modular::group_of(b)?])?;
    let no_diffuse = a.diffuse().is_empty() && b.diffuse().is_empty();
    let any_dense = a
        .diffuse()
        .iter()
        .chain(b.diffuse())
        .any(|d| d.modular == ModularDescriptor::Dense);
    let ergodic = if no_diffuse {
        FlagStatus::Proven(cite::ERGODIC.into())
    } else if any_dense {
        FlagStatus::Unknown
    } else {
        FlagStatus::ClaimedElsewhere(cite::ALMOST_PERIODIC.into())
    };
    let no_cartan = if all_hyperfinite(a, b) {
        FlagStatus::Proven(cite::NO_CARTAN.into())
    } else {
        FlagStatus::Unknown
    };
    Ok(ContinuousPart {
        weight,
        kind: ContinuousKind::Factor(modular::type_label(&group)),
        t_set: modular::t_set(&group),
        full: FlagStatus::Proven(cite::FULL.into()),
        asymptotic_centralizer_trivial: FlagStatus::Proven(cite::ASYMPTOTIC_CENTRALIZER.into()),
        prime: FlagStatus::Proven(cite::PRIME.into()),
        no_cartan_in_nonhyperfinite: no_cartan,
        state_centralizer_ergodic: ergodic.clone(),
        sd_group: SdGroup { group, status: ergodic },
    })
}

fn sort_atoms(atoms: &mut [AtomBlock]) {
    atoms.sort_by(|x, y| {
        y.total_weight
            .cmp(&x.total_weight)
            .then(x.dim.cmp(&y.dim))
            .then(x.per_entry_weights.cmp(&y.per_entry_weights))
    });
}

/// Structure of `a ⋆ b`.
pub fn classify_free_product(a: &AlgebraSpec, b: &AlgebraSpec) -> Result<StructureReport, StructureError> {
    if b.is_trivial() {
        return Ok(passthrough(Side::First, a));
    }
    if a.is_trivial() {
        return Ok(passthrough(Side::Second, b));
    }
    if let (Dimension::Finite(x), Dimension::Finite(y)) = (a.dimension(), b.dimension()) {
        if x + y == 4 {
            return two_proj::dim4_structure(a, b);
        }
    }
    general_case(a, b)
}

fn passthrough(side: Side, spec: &AlgebraSpec) -> StructureReport {
    let atoms: Vec<AtomBlock> = spec
        .blocks()
        .iter()
        .enumerate()
        .map(|(index, block)| AtomBlock::new(AtomSource::Verbatim(BlockRef { side, index }), block.weights().to_vec()))
        .collect();
    let weight = Rational::one() - atoms.iter().map(|x| &x.total_weight).sum::<Rational>();
    let mut warnings = Vec::new();
    if weight.is_positive() {
        warnings.push(format!(
            "{side} has geometric or diffuse components of total weight {weight}; they are carried unchanged in `passthrough`"
        ));
    }
    let trace = vec![TraceStep::new(
        format!("M{} = ℂ", side.other().number()),
        format!("free product is {side} itself"),
        cite::SCALAR_FACTOR,
    )];
    StructureReport {
        atoms,
        continuous: ContinuousPart {
            weight,
            kind: ContinuousKind::Absent,
            t_set: TSet::AllReals,
            full: FlagStatus::NotApplicable,
            asymptotic_centralizer_trivial: FlagStatus::NotApplicable,
            prime: FlagStatus::NotApplicable,
            no_cartan_in_nonhyperfinite: FlagStatus::NotApplicable,
            state_centralizer_ergodic: FlagStatus::NotApplicable,
            sd_group: SdGroup {
                group: modular::group_of(spec).unwrap_or(RatioGroup::Dense),
                status: FlagStatus::NotApplicable,
            },
        },
        amenable: spec.is_hyperfinite(),
        selection: None,
        passthrough: Some(spec.to_document()),
        warnings,
        trace,
    }
}

fn general_case(a: &AlgebraSpec, b: &AlgebraSpec) -> Result<StructureReport, StructureError> {
    let mut trace = vec![TraceStep::new(
        format!(
            "dim M1 + dim M2 = {} + {} ≥ 5, neither factor is ℂ",
            a.dimension(),
            b.dimension()
        ),
        "general case",
        cite::STANDING_ASSUMPTION,
    )];
    let mut warnings = Vec::new();
    let selection = select_max_atom(a, b);
    let mut atoms = Vec::new();

    match &selection {
        None => trace.push(TraceStep::new(
            "no one-dimensional central summand in either algebra",
            "M_d = 0",
            cite::NO_DISCRETE_PART,
        )),
        Some(sel) => {
            trace.push(TraceStep::new(
                "candidates for p: one-dimensional central summands (M_{i0,d} p = ℂp)",
                format!("max φ(p) = {} at {} block {}", sel.value, sel.side, sel.atom_index),
                cite::MAXIMIZER,
            ));
            let bigger_matrix_block = [a, b]
                .iter()
                .any(|s| s.blocks().iter().any(|blk| blk.dim() > 1 && blk.mass() > sel.value));
            if bigger_matrix_block {
                warnings.push(format!(
                    "a matrix block outweighs the selected atom {}; only one-dimensional summands compete for p",
                    sel.value
                ));
            }
            if !sel.co_maximizers.is_empty() {
                let others: Vec<String> = sel
                    .co_maximizers
                    .iter()
                    .map(|r| format!("{} block {}", r.side, r.index))
                    .collect();
                warnings.push(format!(
                    "tie: maximum {} is attained by more than one minimal central projection (also at {}); atoms evaluated from every maximizer",
                    sel.value,
                    others.join(", ")
                ));
            }
            let half = Rational::new(1, 2);
            if sel.value <= half {
                trace.push(TraceStep::new(
                    format!("φ(p) = {} ≤ 1/2", sel.value),
                    "no block can satisfy the discrete condition; M_d = 0",
                    cite::MAX_ABOVE_HALF,
                ));
            } else {
                atoms = evaluate_discrete(sel, a, b, &mut trace)?;
                if !sel.co_maximizers.is_empty() {
                    let reference = atom_multiset(&atoms);
                    for m in &sel.co_maximizers {
                        let alt = discrete_part_from(*m, a, b);
                        if atom_multiset(&alt) != reference {
                            return Err(StructureError::IdentityViolation(format!(
                                "maximizer {} block {} yields different atoms",
                                m.side, m.index
                            )));
                        }
                    }
                    trace.push(TraceStep::new(
                        "tied maximizers",
                        format!("all {} maximizers yield identical atoms", sel.co_maximizers.len() + 1),
                        cite::MAXIMIZER,
                    ));
                }
                if atoms.is_empty() {
                    trace.push(TraceStep::new(
                        "no block of the other algebra qualifies",
                        "M_d = 0",
                        cite::NO_DISCRETE_PART,
                    ));
                }
            }
        }
    }
    sort_atoms(&mut atoms);

    let continuous = continuous_part(a, b, &atoms)?;
    if !continuous.weight.is_positive() {
        return Err(StructureError::IdentityViolation(format!(
            "continuous weight {} is not positive",
            continuous.weight
        )));
    }
    let ga = modular::group_of(a)?;
    let gb = modular::group_of(b)?;
    trace.push(TraceStep::new(
        format!("ratio groups: M1 {ga}, M2 {gb}"),
        format!(
            "joint group {}; T(M_c) = {}",
            continuous.sd_group.group, continuous.t_set
        ),
        cite::T_SET,
    ));
    if let ContinuousKind::Factor(t) = &continuous.kind {
        trace.push(TraceStep::new(
            format!("T(M_c) = {}", continuous.t_set),
            format!("M_c is a full factor of type {t}, weight {}", continuous.weight),
            cite::DECOMPOSITION,
        ));
        trace.push(TraceStep::new(
            "type III₀ excluded",
            "type label drawn from II₁ / III_λ / III₁",
            cite::NO_TYPE_III0,
        ));
    }
    trace.push(TraceStep::new(
        "M_c is a full factor",
        "prime; no Cartan subalgebra in non-hyperfinite expected subalgebras when both inputs are hyperfinite",
        cite::PRIME,
    ));
    trace.push(TraceStep::new(
        "dim M1 = dim M2 = 2 required for amenability",
        "not amenable",
        cite::AMENABLE,
    ));

    Ok(StructureReport {
        atoms,
        continuous,
        amenable: false,
        selection,
        passthrough: None,
        warnings,
        trace,
    })
}

fn evaluate_discrete(
    sel: &MaxAtomSelection,
    a: &AlgebraSpec,
    b: &AlgebraSpec,
    trace: &mut Vec<TraceStep>,
) -> Result<Vec<AtomBlock>, StructureError> {
    let other_side = sel.side.other();
    let other = spec_of(other_side, a, b);
    let deficit = Rational::one() - sel.value.clone();
    let threshold = deficit.recip();
    let atoms = discrete_part(sel, other);
    for (j, block) in other.blocks().iter().enumerate() {
        let recip = block.reciprocal_sum();
        let emitted = atoms.iter().find(|x| {
            x.source
                == AtomSource::Block(BlockRef {
                    side: other_side,
                    index: j,
                })
        });
        let outcome = match (&emitted, recip.cmp(&threshold)) {
            (Some(x), _) => format!(
                "B(H) of dim {} survives; entry weights {}",
                x.dim,
                x.per_entry_weights
                    .iter()
                    .map(|w| w.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
            (None, std::cmp::Ordering::Equal) => "boundary equality; excluded (strict inequality)".into(),
            (None, _) => "excluded".into(),
        };
        trace.push(TraceStep::new(
            format!("{other_side} block {j}: Σ 1/λ = {recip} vs 1/(1−φ(p)) = {threshold}"),
            outcome,
            if emitted.is_some() {
                cite::DISCRETE_WEIGHTS
            } else {
                cite::DISCRETE_CONDITION
            },
        ));
        case2ii_identity_check(&sel.value, block, emitted)?;
        if let Some(x) = emitted {
            if Rational::from_integer(x.dim as i64) > threshold {
                return Err(StructureError::IdentityViolation(format!(
                    "block of dim {} exceeds 1/(1−φ(p)) = {threshold}",
                    x.dim
                )));
            }
        }
    }
    for (k, _) in other.geometric_blocks().iter().enumerate() {
        trace.push(TraceStep::new(
            format!("{other_side} geometric block {k}: Σ 1/λ diverges"),
            "excluded",
            cite::DISCRETE_CONDITION,
        ));
    }
    if !atoms.is_empty() {
        trace.push(TraceStep::new(
            format!("emitted blocks have dim ≤ 1/(1−φ(p)) = {threshold}"),
            "holds",
            cite::DIM_BOUND,
        ));
        trace.push(TraceStep::new(
            "entry weights match the corner mass φ(r) of the compressed product",
            "holds",
            cite::CASE_2II,
        ));
    }
    Ok(atoms)
}
