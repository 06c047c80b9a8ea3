//! Two free projections: `(ℂ⊕ℂ) ⋆ (ℂ⊕ℂ)` and the law of `pqp`.
//!
//! For projections `p, q` free with traces `α, β`, the generated algebra is
//! four corner atoms `p∧q`, `p∧q⊥`, `p⊥∧q`, `p⊥∧q⊥` plus a copy of
//! `L^∞ ⊗ M₂` on the complement. Each corner `e∧f` has mass
//! `max{τ(e) + τ(f) − 1, 0}`.
//!
//! The spectral law of `pqp` has atoms at 1 (mass `τ(p∧q)`) and at 0, and
//! on `[x₋, x₊]` the density
//!
//! ```text
//! √((x − x₋)(x₊ − x)) / (2π x (1 − x)),   x± = α + β − 2αβ ± 2√(αβ(1−α)(1−β)).
//! ```

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraSpec, Dimension};
use crate::cite;
use crate::modular::{RatioGroup, TSet};
use crate::rational::Rational;
use crate::structure::{
    AtomBlock, AtomSource, ContinuousKind, ContinuousPart, FlagStatus, SdGroup, StructureError, StructureReport,
    TraceStep,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{what} = {value} must lie strictly between 0 and 1")]
pub struct OutOfRange {
    pub what: &'static str,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoProjAtoms {
    /// `τ(p ∧ q)`.
    pub meet_mass: Rational,
    /// `τ(p⊥ ∧ q⊥)`.
    pub co_meet_mass: Rational,
}

fn check_open_unit(what: &'static str, x: &Rational) -> Result<(), OutOfRange> {
    if x.is_positive() && *x < Rational::one() {
        Ok(())
    } else {
        Err(OutOfRange {
            what,
            value: x.to_string(),
        })
    }
}

pub fn two_proj_atoms(alpha: &Rational, beta: &Rational) -> Result<TwoProjAtoms, OutOfRange> {
    check_open_unit("alpha", alpha)?;
    check_open_unit("beta", beta)?;
    let s = alpha + beta;
    Ok(TwoProjAtoms {
        meet_mass: (&s - &Rational::one()).max(Rational::zero()),
        co_meet_mass: (Rational::one() - s).max(Rational::zero()),
    })
}

fn two_atoms(a: &AlgebraSpec) -> Option<[Rational; 2]> {
    if a.is_abelian_atomic() && a.dimension() == Dimension::Finite(2) {
        let b = a.blocks();
        Some([b[0].weights()[0].clone(), b[1].weights()[0].clone()])
    } else {
        None
    }
}

/// Structure of `(ℂ_{α}⊕ℂ_{1−α}) ⋆ (ℂ_{β}⊕ℂ_{1−β})`: the non-zero corner
/// atoms and `L^∞(0,1) ⊗ M₂(ℂ)` on the rest.
pub fn dim4_structure(a: &AlgebraSpec, b: &AlgebraSpec) -> Result<StructureReport, StructureError> {
    let (Some(x), Some(y)) = (two_atoms(a), two_atoms(b)) else {
        return Err(StructureError::NotDim4);
    };
    let mut trace = vec![TraceStep::new(
        "dim M1 = dim M2 = 2",
        "generated by two free projections p, q",
        cite::TWO_PROJECTIONS,
    )];
    let mut atoms = Vec::new();
    for (i, xi) in x.iter().enumerate() {
        for (j, yj) in y.iter().enumerate() {
            let mass = (xi + yj - Rational::one()).max(Rational::zero());
            trace.push(TraceStep::new(
                format!("corner {i}∧{j}: {xi} + {yj} − 1"),
                if mass.is_positive() {
                    format!("atom ℂ of mass {mass}")
                } else {
                    "zero".to_string()
                },
                cite::TWO_PROJECTIONS,
            ));
            if mass.is_positive() {
                atoms.push(AtomBlock {
                    source: AtomSource::Meet { first: i, second: j },
                    dim: 1,
                    per_entry_weights: vec![mass.clone()],
                    total_weight: mass,
                });
            }
        }
    }
    atoms.sort_by(|l, r| r.total_weight.cmp(&l.total_weight));
    let weight = Rational::one() - atoms.iter().map(|x| &x.total_weight).sum::<Rational>();
    trace.push(TraceStep::new(
        format!("remaining weight {weight}"),
        "L^∞(0,1) ⊗ M₂(ℂ)",
        cite::TWO_PROJECTIONS_DIFFUSE,
    ));
    let na = || FlagStatus::NotApplicable;
    Ok(StructureReport {
        atoms,
        continuous: ContinuousPart {
            weight,
            kind: ContinuousKind::NonFactorDim4,
            t_set: TSet::AllReals,
            full: na(),
            asymptotic_centralizer_trivial: na(),
            prime: na(),
            no_cartan_in_nonhyperfinite: na(),
            state_centralizer_ergodic: na(),
            sd_group: SdGroup {
                group: RatioGroup::Trivial,
                status: na(),
            },
        },
        amenable: true,
        selection: None,
        passthrough: None,
        warnings: Vec::new(),
        trace,
    })
}

/// Distribution of `pqp` under the trace, for free `p, q` with `τ(p) = α`,
/// `τ(q) = β`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralLaw {
    pub alpha: f64,
    pub beta: f64,
    /// `(location, mass)` with location 0 or 1; zero masses omitted.
    pub atoms: Vec<(f64, f64)>,
    pub support: (f64, f64),
}

pub fn pqp_law(alpha: f64, beta: f64) -> Result<SpectralLaw, OutOfRange> {
    for (what, v) in [("alpha", alpha), ("beta", beta)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(OutOfRange {
                what,
                value: v.to_string(),
            });
        }
    }
    let centre = alpha + beta - 2.0 * alpha * beta;
    let half = 2.0 * (alpha * beta * (1.0 - alpha) * (1.0 - beta)).sqrt();
    let support = ((centre - half).max(0.0), (centre + half).min(1.0));
    let mut atoms = Vec::new();
    let zero = 1.0 - alpha.min(beta);
    if zero > 0.0 {
        atoms.push((0.0, zero));
    }
    let one = alpha + beta - 1.0;
    if one > 0.0 {
        atoms.push((1.0, one));
    }
    Ok(SpectralLaw {
        alpha,
        beta,
        atoms,
        support,
    })
}

const GL_ORDER: usize = 32;
const PANELS: usize = 8;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_ORDER;
        (0..n)
            .map(|i| {
                let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
                let mut dp = 1.0;
                for _ in 0..100 {
                    let (mut p0, mut p1) = (1.0, x);
                    for k in 2..=n {
                        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                        p0 = p1;
                        p1 = p2;
                    }
                    dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                    let dx = p1 / dp;
                    x -= dx;
                    if dx.abs() < 1e-16 {
                        break;
                    }
                }
                (x, 2.0 / ((1.0 - x * x) * dp * dp))
            })
            .collect()
    })
}

impl SpectralLaw {
    fn centre_half(&self) -> (f64, f64) {
        let (lo, hi) = self.support;
        ((lo + hi) / 2.0, (hi - lo) / 2.0)
    }

    pub fn density(&self, x: f64) -> f64 {
        let (lo, hi) = self.support;
        if x <= lo || x >= hi {
            return 0.0;
        }
        ((x - lo) * (hi - x)).sqrt() / (2.0 * PI * x * (1.0 - x))
    }

    /// `∫ f(x) density(x) dx` over `[x₋, min(x, x₊)]`, with `x = c − h cos θ`
    /// removing the square-root endpoint behaviour.
    fn integrate_to<F: Fn(f64) -> f64>(&self, upper: f64, f: F) -> f64 {
        let (c, h) = self.centre_half();
        if h <= 0.0 || upper <= self.support.0 {
            return 0.0;
        }
        let theta_max = if upper >= self.support.1 {
            PI
        } else {
            ((c - upper) / h).clamp(-1.0, 1.0).acos()
        };
        let panel = theta_max / PANELS as f64;
        let mut total = 0.0;
        for k in 0..PANELS {
            let mid = panel * (k as f64 + 0.5);
            for &(node, w) in gauss_legendre() {
                let theta = mid + 0.5 * panel * node;
                let x = c - h * theta.cos();
                let s = h * theta.sin();
                let g = s * s / (2.0 * PI * x * (1.0 - x));
                total += 0.5 * panel * w * g * f(x);
            }
        }
        total
    }

    pub fn continuous_mass(&self) -> f64 {
        self.integrate_to(f64::INFINITY, |_| 1.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.continuous_mass() + self.atoms.iter().map(|a| a.1).sum::<f64>()
    }

    /// `τ((pqp)^k)`.
    pub fn moment(&self, k: u32) -> f64 {
        let atoms: f64 = self
            .atoms
            .iter()
            .map(|&(loc, m)| if k == 0 { m } else { m * loc.powi(k as i32) })
            .sum();
        atoms + self.integrate_to(f64::INFINITY, |x| x.powi(k as i32))
    }

    /// Right-continuous distribution function.
    pub fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let atoms: f64 = self.atoms.iter().filter(|a| a.0 <= x).map(|a| a.1).sum();
        atoms + self.integrate_to(x, |_| 1.0)
    }

    /// CSV with one comment line per atom followed by `x,density` rows on
    /// an even grid over the support.
    pub fn to_csv(&self, samples: usize) -> String {
        let mut out = String::new();
        for &(loc, m) in &self.atoms {
            out.push_str(&format!("# atom,{loc},{m}\n"));
        }
        out.push_str("x,density\n");
        let (lo, hi) = self.support;
        let n = samples.max(2);
        for i in 0..n {
            let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            out.push_str(&format!("{x},{}\n", self.density(x)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn two_proj_atoms_examples() {
        let t = two_proj_atoms(&rat(3, 5), &rat(3, 5)).unwrap();
        assert_eq!((t.meet_mass, t.co_meet_mass), (rat(1, 5), rat(0, 1)));
        let t = two_proj_atoms(&rat(1, 2), &rat(1, 2)).unwrap();
        assert_eq!((t.meet_mass, t.co_meet_mass), (rat(0, 1), rat(0, 1)));
        let t = two_proj_atoms(&rat(3, 10), &rat(2, 5)).unwrap();
        assert_eq!((t.meet_mass, t.co_meet_mass), (rat(0, 1), rat(3, 10)));
        assert!(two_proj_atoms(&rat(1, 1), &rat(1, 2)).is_err());
        assert!(two_proj_atoms(&rat(1, 2), &rat(0, 1)).is_err());
    }

    fn ab(x: (i64, i64), y: (i64, i64)) -> AlgebraSpec {
        AlgebraSpec::abelian("a", &[rat(x.0, x.1), rat(y.0, y.1)]).unwrap()
    }

    #[test]
    fn dim4_corner_atoms() {
        let r = dim4_structure(&ab((3, 5), (2, 5)), &ab((1, 2), (1, 2))).unwrap();
        let masses: Vec<_> = r.atoms.iter().map(|x| x.total_weight.clone()).collect();
        // p∧q and p∧q⊥ both have mass 1/10
        assert_eq!(masses, vec![rat(1, 10), rat(1, 10)]);
        assert_eq!(r.continuous.weight, rat(4, 5));
        assert_eq!(r.continuous.kind, ContinuousKind::NonFactorDim4);

        let r = dim4_structure(&ab((1, 2), (1, 2)), &ab((1, 2), (1, 2))).unwrap();
        assert!(r.atoms.is_empty());
        assert_eq!(r.continuous.weight, rat(1, 1));

        let r = dim4_structure(&ab((9, 10), (1, 10)), &ab((9, 10), (1, 10))).unwrap();
        assert_eq!(r.atoms.len(), 1);
        assert_eq!(r.atoms[0].total_weight, rat(4, 5));
    }

    #[test]
    fn dim4_rejects_other_shapes() {
        let m2 = AlgebraSpec::tracial_matrix("m2", 2).unwrap();
        assert_eq!(
            dim4_structure(&m2, &ab((1, 2), (1, 2))).unwrap_err(),
            StructureError::NotDim4
        );
    }

    #[test]
    fn law_endpoints_and_atoms() {
        let l = pqp_law(0.8, 0.5).unwrap();
        assert!((l.support.1 - 0.9).abs() < 1e-12);
        assert!((l.support.0 - 0.1).abs() < 1e-12);
        assert_eq!(l.atoms.len(), 2);
        assert!((l.atoms[1].1 - 0.3).abs() < 1e-12);
        assert!((l.atoms[0].1 - 0.5).abs() < 1e-12);
        assert!(pqp_law(0.0, 0.5).is_err());
        assert!(pqp_law(0.5, f64::NAN).is_err());
    }

    #[test]
    fn law_mass_and_first_moment() {
        for &a in &[0.1, 0.3, 0.5, 0.8, 0.95] {
            for &b in &[0.2, 0.5, 0.7, 0.9] {
                let l = pqp_law(a, b).unwrap();
                assert!((l.total_mass() - 1.0).abs() < 1e-9, "mass at ({a},{b})");
                assert!((l.moment(1) - a * b).abs() < 1e-9, "moment at ({a},{b})");
            }
        }
    }

    #[test]
    fn symmetric_half_half_is_arcsine() {
        let l = pqp_law(0.5, 0.5).unwrap();
        assert_eq!(l.support, (0.0, 1.0));
        assert!((l.continuous_mass() - 0.5).abs() < 1e-9);
        let x = 0.3_f64;
        let expected = 1.0 / (2.0 * PI * (x * (1.0 - x)).sqrt());
        assert!((l.density(x) - expected).abs() < 1e-12);
        // arcsine CDF on the continuous half
        let cdf = 0.5 + (2.0 / PI) * x.sqrt().asin() * 0.5;
        assert!((l.cdf(x) - cdf).abs() < 1e-9);
    }

    #[test]
    fn cdf_is_monotone_and_ends_at_one() {
        let l = pqp_law(0.3, 0.8).unwrap();
        let mut prev = 0.0;
        for i in 0..=200 {
            let v = l.cdf(i as f64 / 200.0);
            assert!(v >= prev - 1e-12);
            prev = v;
        }
        assert!((l.cdf(1.0) - 1.0).abs() < 1e-12);
        // everything except the atom at 1 lies at or below x₊
        assert!((l.cdf(l.support.1) - 0.9).abs() < 1e-9);
    }

    #[test]
    fn csv_has_atom_header() {
        let csv = pqp_law(0.8, 0.5).unwrap().to_csv(5);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "# atom,0,0.5");
        assert!(lines[1].starts_with("# atom,1,"));
        assert_eq!(lines[2], "x,density");
        assert_eq!(lines.len(), 8);
    }
}
