//! One-parameter sweeps over a spec weight.

use std::str::FromStr;

use freeprod::structure::ContinuousKind;
use freeprod::{classify_free_product, AlgebraSpec, Rational};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Item {
    BlockWeight { block: usize, entry: usize },
    GeometricHead(usize),
    DiffuseWeight(usize),
}

/// A weight of one of the two specs, e.g. `b.blocks[0].weights[1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamPath {
    pub second: bool,
    pub item: Item,
}

fn indexed(segment: &str) -> Option<(&str, usize)> {
    let (name, rest) = segment.split_once('[')?;
    let index = rest.strip_suffix(']')?.parse().ok()?;
    Some((name, index))
}

impl FromStr for ParamPath {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || {
            format!(
                "cannot read parameter {s:?}; expected [a.|b.]blocks[i].weights[s], \
                 geometric_blocks[k].head or diffuse[k].weight"
            )
        };
        let (second, rest) = match s.split_once('.') {
            Some(("a", r)) => (false, r),
            Some(("b", r)) => (true, r),
            _ => (false, s),
        };
        let segments: Vec<&str> = rest.split('.').collect();
        let item = match segments.as_slice() {
            [blk, w] => match (indexed(blk), *w) {
                (Some(("blocks", i)), w) => match indexed(w) {
                    Some(("weights", e)) => Item::BlockWeight { block: i, entry: e },
                    _ => return Err(bad()),
                },
                (Some(("geometric_blocks", k)), "head") => Item::GeometricHead(k),
                (Some(("diffuse", k)), "weight") => Item::DiffuseWeight(k),
                _ => return Err(bad()),
            },
            _ => return Err(bad()),
        };
        Ok(ParamPath { second, item })
    }
}

/// Sets the addressed weight to `value` and rescales every other weight of
/// the same spec by `(1 − value)/(1 − old)`.
pub fn apply_parameter(spec: &AlgebraSpec, item: Item, value: &Rational) -> Result<AlgebraSpec, CliError> {
    let mut doc = spec.to_document();
    let mut masses: Vec<&mut Rational> = Vec::new();
    let mut target = None;
    for (j, b) in doc.blocks.iter_mut().enumerate() {
        for (s, w) in b.weights.iter_mut().enumerate() {
            if item == (Item::BlockWeight { block: j, entry: s }) {
                target = Some(masses.len());
            }
            masses.push(w);
        }
    }
    for (k, g) in doc.geometric_blocks.iter_mut().enumerate() {
        if item == Item::GeometricHead(k) {
            target = Some(masses.len());
        }
        masses.push(&mut g.head);
    }
    for (k, d) in doc.diffuse.iter_mut().enumerate() {
        if item == Item::DiffuseWeight(k) {
            target = Some(masses.len());
        }
        masses.push(&mut d.weight);
    }
    let t = target.ok_or_else(|| CliError::Usage(format!("{item:?} does not exist in {}", spec.name())))?;
    if !(value.is_positive() && *value < Rational::one()) {
        return Err(CliError::Usage(format!("swept value {value} must lie in (0, 1)")));
    }
    let rest = Rational::one() - masses[t].clone();
    if rest.is_zero() {
        return Err(CliError::Usage(
            "the swept weight is the only weight of its algebra".into(),
        ));
    }
    let factor = (Rational::one() - value.clone()) / rest;
    for (k, m) in masses.into_iter().enumerate() {
        *m = if k == t { value.clone() } else { &*m * &factor };
    }
    AlgebraSpec::try_from(doc).map_err(|source| CliError::Spec {
        path: spec.name().to_string(),
        source,
    })
}

pub fn sweep(
    a: &AlgebraSpec,
    b: &AlgebraSpec,
    path: &ParamPath,
    from: &Rational,
    to: &Rational,
    step: &Rational,
) -> Result<String, CliError> {
    if !step.is_positive() {
        return Err(CliError::Usage("step must be positive".into()));
    }
    if from > to {
        return Err(CliError::Usage("--from must not exceed --to".into()));
    }
    let mut out = String::from("parameter,atom_total,atom_weights,continuous_weight,type\n");
    let mut x = from.clone();
    while x <= *to {
        let (sa, sb) = if path.second {
            (a.clone(), apply_parameter(b, path.item, &x)?)
        } else {
            (apply_parameter(a, path.item, &x)?, b.clone())
        };
        let r = classify_free_product(&sa, &sb)?;
        let weights: Vec<String> = r.atoms.iter().map(|x| x.total_weight.to_string()).collect();
        let kind = match &r.continuous.kind {
            ContinuousKind::Factor(t) => t.to_string(),
            ContinuousKind::NonFactorDim4 => "L∞⊗M2".to_string(),
            ContinuousKind::Absent => "none".to_string(),
        };
        out.push_str(&format!(
            "{x},{},{},{},{kind}\n",
            r.atom_total(),
            weights.join(";"),
            r.continuous.weight
        ));
        x = x + step;
    }
    Ok(out)
}
