//! Pairwise atom rule for free products of finite abelian algebras.
//!
//! For `(⊕ ℂ_{α_i}) ⋆ (⊕ ℂ_{β_j})` every pair with `α_i + β_j > 1` gives a
//! minimal projection `e_i ∧ f_j` of trace `α_i + β_j − 1`, and these are
//! all the atoms. This module evaluates that rule directly from the raw
//! masses, sharing nothing with [`crate::structure`], so the two can be
//! compared.

use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraSpec;
use crate::rational::Rational;
use crate::structure::{classify_free_product, StructureError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AbelianError {
    #[error("{0} is not a finite direct sum of ℂ")]
    NotAbelian(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairAtom {
    pub i: usize,
    pub j: usize,
    pub mass: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum CheckResult {
    Agree {
        masses: Vec<Rational>,
    },
    Disagree {
        oracle: Vec<Rational>,
        closed_form: Vec<Rational>,
    },
}

impl CheckResult {
    pub fn agrees(&self) -> bool {
        matches!(self, CheckResult::Agree { .. })
    }
}

fn masses_of(a: &AlgebraSpec) -> Result<Vec<Rational>, AbelianError> {
    if !a.geometric_blocks().is_empty() || !a.diffuse().is_empty() {
        return Err(AbelianError::NotAbelian(a.name().to_string()));
    }
    a.blocks()
        .iter()
        .map(|b| match b.weights() {
            [w] => Ok(w.clone()),
            _ => Err(AbelianError::NotAbelian(a.name().to_string())),
        })
        .collect()
}

/// All `(i, j)` with `α_i + β_j > 1`, heaviest first.
pub fn abelian_atoms(a: &AlgebraSpec, b: &AlgebraSpec) -> Result<Vec<PairAtom>, AbelianError> {
    let alphas = masses_of(a)?;
    let betas = masses_of(b)?;
    let one = Rational::one();
    let mut out = Vec::new();
    for (i, x) in alphas.iter().enumerate() {
        for (j, y) in betas.iter().enumerate() {
            let mass = x + y - one.clone();
            if mass.is_positive() {
                out.push(PairAtom { i, j, mass });
            }
        }
    }
    out.sort_by(|l, r| r.mass.cmp(&l.mass).then((l.i, l.j).cmp(&(r.i, r.j))));
    Ok(out)
}

/// Compares the pairwise rule with [`classify_free_product`] as multisets
/// of atom masses.
pub fn cross_check(a: &AlgebraSpec, b: &AlgebraSpec) -> Result<CheckResult, AbelianError> {
    let mut oracle: Vec<Rational> = abelian_atoms(a, b)?.into_iter().map(|p| p.mass).collect();
    let report = classify_free_product(a, b)?;
    let mut closed_form: Vec<Rational> = report.atoms.iter().map(|x| x.total_weight.clone()).collect();
    let all_scalar = report.atoms.iter().all(|x| x.dim == 1);
    oracle.sort();
    closed_form.sort();
    Ok(if all_scalar && oracle == closed_form {
        CheckResult::Agree { masses: oracle }
    } else {
        CheckResult::Disagree { oracle, closed_form }
    })
}
