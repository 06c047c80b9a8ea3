//! Exact presentations of `(multi-matrix) ⊕ (diffuse)` algebras with a
//! faithful normal state.
//!
//! An [`AlgebraSpec`] lists full matrix blocks with the eigenvalues of the
//! state's density on each block, infinite blocks with a geometric weight
//! sequence, and diffuse summands described only by their weight and
//! modular data. Everything is validated on construction: weights are
//! strictly positive, sorted non-increasing, and the total mass is exactly 1.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpecError {
    #[error("malformed spec document: {0}")]
    MalformedDocument(String),
    #[error("total state mass is {total}, expected exactly 1")]
    MassMismatch { total: Rational },
    #[error("non-positive weight {value} at {location}")]
    NonPositiveWeight { location: String, value: Rational },
    #[error("{what} {value} must lie strictly between 0 and 1")]
    RatioOutOfRange { what: String, value: Rational },
}

/// `B(H)` with `dim H = d`, carrying the eigenvalues of the state density.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatrixBlock {
    weights: Vec<Rational>,
}

impl MatrixBlock {
    /// Builds a block whose dimension is `weights.len()`; weights are sorted
    /// non-increasing.
    pub fn new(mut weights: Vec<Rational>) -> Result<Self, SpecError> {
        if weights.is_empty() {
            return Err(SpecError::MalformedDocument("matrix block with no weights".into()));
        }
        for (s, w) in weights.iter().enumerate() {
            if !w.is_positive() {
                return Err(SpecError::NonPositiveWeight {
                    location: format!("weights[{s}]"),
                    value: w.clone(),
                });
            }
        }
        weights.sort_by(|a, b| b.cmp(a));
        Ok(MatrixBlock { weights })
    }

    /// `M_d` with all `d` weights equal to `mass / d`.
    pub fn tracial(dim: usize, mass: Rational) -> Result<Self, SpecError> {
        let w = mass / Rational::from_integer(dim as i64);
        MatrixBlock::new(vec![w; dim])
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn mass(&self) -> Rational {
        self.weights.iter().sum()
    }

    pub fn is_tracial(&self) -> bool {
        self.weights.windows(2).all(|w| w[0] == w[1])
    }

    /// `Σ_s 1/λ_s`.
    pub fn reciprocal_sum(&self) -> Rational {
        self.weights.iter().map(Rational::recip).sum()
    }
}

/// Infinite block `B(ℓ²)` whose density has eigenvalues `w(1−q)q^{s−1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeometricBlock {
    pub head: Rational,
    pub ratio: Rational,
}

impl GeometricBlock {
    pub fn new(head: Rational, ratio: Rational) -> Result<Self, SpecError> {
        if !head.is_positive() {
            return Err(SpecError::NonPositiveWeight {
                location: "geometric head".into(),
                value: head,
            });
        }
        if !(ratio.is_positive() && ratio < Rational::one()) {
            return Err(SpecError::RatioOutOfRange {
                what: "geometric ratio".into(),
                value: ratio,
            });
        }
        Ok(GeometricBlock { head, ratio })
    }

    /// Eigenvalue `λ_s` for `s ≥ 1`.
    pub fn eigenvalue(&self, s: u32) -> Rational {
        assert!(s >= 1);
        &(&self.head * &(Rational::one() - self.ratio.clone())) * &self.ratio.pow(s as i32 - 1)
    }

    pub fn mass(&self) -> Rational {
        self.head.clone()
    }
}

/// The set `{t | σ_t = Id}` of a diffuse summand's modular flow.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModularDescriptor {
    /// `σ_t = Id` for every `t`.
    Tracial,
    /// `σ_t = Id` iff `t ∈ (2π/ln(1/λ))ℤ`.
    Cyclic(Rational),
    /// `σ_t = Id` only at `t = 0`.
    Dense,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiffuseSummand {
    pub weight: Rational,
    pub modular: ModularDescriptor,
    #[serde(default = "default_true")]
    pub hyperfinite: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dimension {
    Finite(u64),
    Infinite,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dimension::Finite(n) => write!(f, "{n}"),
            Dimension::Infinite => f.write_str("∞"),
        }
    }
}

/// A validated algebra-with-state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlgebraSpec {
    name: String,
    blocks: Vec<MatrixBlock>,
    geometric_blocks: Vec<GeometricBlock>,
    diffuse: Vec<DiffuseSummand>,
}

impl AlgebraSpec {
    pub fn new(
        name: impl Into<String>,
        blocks: Vec<MatrixBlock>,
        geometric_blocks: Vec<GeometricBlock>,
        diffuse: Vec<DiffuseSummand>,
    ) -> Result<Self, SpecError> {
        if blocks.is_empty() && geometric_blocks.is_empty() && diffuse.is_empty() {
            return Err(SpecError::MalformedDocument(
                "spec has no blocks, geometric blocks or diffuse summands".into(),
            ));
        }
        for (k, d) in diffuse.iter().enumerate() {
            if !d.weight.is_positive() {
                return Err(SpecError::NonPositiveWeight {
                    location: format!("diffuse[{k}].weight"),
                    value: d.weight.clone(),
                });
            }
            if let ModularDescriptor::Cyclic(l) = &d.modular {
                if !(l.is_positive() && *l < Rational::one()) {
                    return Err(SpecError::RatioOutOfRange {
                        what: format!("diffuse[{k}] cyclic modulus"),
                        value: l.clone(),
                    });
                }
            }
        }
        let spec = AlgebraSpec {
            name: name.into(),
            blocks,
            geometric_blocks,
            diffuse,
        };
        let total = spec.total_mass();
        if !total.is_one() {
            return Err(SpecError::MassMismatch { total });
        }
        Ok(spec)
    }

    /// `ℂ_{w_1} ⊕ … ⊕ ℂ_{w_k}`.
    pub fn abelian(name: impl Into<String>, masses: &[Rational]) -> Result<Self, SpecError> {
        let blocks = masses
            .iter()
            .map(|m| MatrixBlock::new(vec![m.clone()]))
            .collect::<Result<Vec<_>, _>>()?;
        AlgebraSpec::new(name, blocks, vec![], vec![])
    }

    /// A single `M_d` block with the given density eigenvalues.
    pub fn matrix(name: impl Into<String>, weights: Vec<Rational>) -> Result<Self, SpecError> {
        AlgebraSpec::new(name, vec![MatrixBlock::new(weights)?], vec![], vec![])
    }

    /// `M_d` with the normalized trace.
    pub fn tracial_matrix(name: impl Into<String>, dim: usize) -> Result<Self, SpecError> {
        AlgebraSpec::new(name, vec![MatrixBlock::tracial(dim, Rational::one())?], vec![], vec![])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn blocks(&self) -> &[MatrixBlock] {
        &self.blocks
    }

    pub fn geometric_blocks(&self) -> &[GeometricBlock] {
        &self.geometric_blocks
    }

    pub fn diffuse(&self) -> &[DiffuseSummand] {
        &self.diffuse
    }

    pub fn total_mass(&self) -> Rational {
        let b: Rational = self.blocks.iter().map(MatrixBlock::mass).sum();
        let g: Rational = self.geometric_blocks.iter().map(GeometricBlock::mass).sum();
        let d: Rational = self.diffuse.iter().map(|d| &d.weight).sum();
        b + g + d
    }

    /// `Σ d²` when the algebra is finite-dimensional.
    pub fn dimension(&self) -> Dimension {
        if !self.geometric_blocks.is_empty() || !self.diffuse.is_empty() {
            return Dimension::Infinite;
        }
        let n = self
            .blocks
            .iter()
            .map(|b| (b.dim() as u64).saturating_mul(b.dim() as u64))
            .fold(0u64, u64::saturating_add);
        Dimension::Finite(n)
    }

    /// The one-dimensional algebra `ℂ`.
    pub fn is_trivial(&self) -> bool {
        self.dimension() == Dimension::Finite(1)
    }

    pub fn is_tracial(&self) -> bool {
        self.blocks.iter().all(MatrixBlock::is_tracial)
            && self.geometric_blocks.is_empty()
            && self.diffuse.iter().all(|d| d.modular == ModularDescriptor::Tracial)
    }

    /// Only one-dimensional finite blocks.
    pub fn is_abelian_atomic(&self) -> bool {
        self.geometric_blocks.is_empty() && self.diffuse.is_empty() && self.blocks.iter().all(|b| b.dim() == 1)
    }

    /// Type I parts are always hyperfinite; diffuse parts as declared.
    pub fn is_hyperfinite(&self) -> bool {
        self.diffuse.iter().all(|d| d.hyperfinite)
    }

    /// Masses of the one-dimensional blocks, largest first, with their block
    /// index.
    pub fn scalar_atoms(&self) -> Vec<(usize, Rational)> {
        let mut out: Vec<(usize, Rational)> = self
            .blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| b.dim() == 1)
            .map(|(j, b)| (j, b.weights[0].clone()))
            .collect();
        out.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        out
    }

    pub fn to_document(&self) -> SpecDocument {
        SpecDocument {
            name: self.name.clone(),
            blocks: self
                .blocks
                .iter()
                .map(|b| BlockDocument {
                    dim: b.dim(),
                    weights: b.weights.clone(),
                })
                .collect(),
            geometric_blocks: self.geometric_blocks.clone(),
            diffuse: self.diffuse.clone(),
        }
    }

    /// Renders the JSON document form.
    pub fn render(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("spec serialization")
    }
}

/// Wire form of an algebra spec; validated into [`AlgebraSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub blocks: Vec<BlockDocument>,
    #[serde(default)]
    pub geometric_blocks: Vec<GeometricBlock>,
    #[serde(default)]
    pub diffuse: Vec<DiffuseSummand>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockDocument {
    pub dim: usize,
    pub weights: Vec<Rational>,
}

impl TryFrom<SpecDocument> for AlgebraSpec {
    type Error = SpecError;

    fn try_from(doc: SpecDocument) -> Result<Self, SpecError> {
        let mut blocks = Vec::with_capacity(doc.blocks.len());
        for (j, b) in doc.blocks.into_iter().enumerate() {
            if b.dim == 0 || b.weights.len() != b.dim {
                return Err(SpecError::MalformedDocument(format!(
                    "blocks[{j}]: dim {} but {} weights",
                    b.dim,
                    b.weights.len()
                )));
            }
            let block = MatrixBlock::new(b.weights).map_err(|e| match e {
                SpecError::NonPositiveWeight { location, value } => SpecError::NonPositiveWeight {
                    location: format!("blocks[{j}].{location}"),
                    value,
                },
                other => other,
            })?;
            blocks.push(block);
        }
        let geometric = doc
            .geometric_blocks
            .into_iter()
            .map(|g| GeometricBlock::new(g.head, g.ratio))
            .collect::<Result<Vec<_>, _>>()?;
        AlgebraSpec::new(doc.name, blocks, geometric, doc.diffuse)
    }
}

/// Parses a spec document (UTF-8 JSON).
pub fn parse_spec(text: &str) -> Result<AlgebraSpec, SpecError> {
    let doc: SpecDocument = serde_json::from_str(text).map_err(|e| SpecError::MalformedDocument(e.to_string()))?;
    AlgebraSpec::try_from(doc)
}

impl fmt::Display for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for b in &self.blocks {
            if b.dim() == 1 {
                parts.push(format!("ℂ_{{{}}}", b.weights[0]));
            } else {
                let w: Vec<String> = b.weights.iter().map(|w| w.to_string()).collect();
                parts.push(format!("M{}({})", b.dim(), w.join(",")));
            }
        }
        for g in &self.geometric_blocks {
            parts.push(format!("B(ℓ²)[head {}, ratio {}]", g.head, g.ratio));
        }
        for d in &self.diffuse {
            let m = match &d.modular {
                ModularDescriptor::Tracial => "tracial".to_string(),
                ModularDescriptor::Cyclic(l) => format!("cyclic {l}"),
                ModularDescriptor::Dense => "dense".to_string(),
            };
            parts.push(format!("diffuse[{}, {m}]", d.weight));
        }
        f.write_str(&parts.join(" ⊕ "))
    }
}
