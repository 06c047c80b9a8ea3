//! Finite-dimensional models of tracial algebra specs.
//!
//! Components are laid out along the diagonal of `ℂ^n` in spec order: each
//! `M_d` block of multiplicity `k` occupies `d·k` consecutive coordinates,
//! with `e_ss` spanning the `s`-th run of `k`. Diffuse tracial summands
//! become plain diagonal projections. The second algebra of a pair is then
//! rotated by a Haar unitary.

use faer::{c64, Mat};
use freeprod::algebra::{AlgebraSpec, ModularDescriptor};
use freeprod::Rational;

use crate::subspace::Subspace;
use crate::RmtError;

/// `B(H)` with `dim H = d`, realized as `M_d ⊗ 1_k`.
#[derive(Debug, Clone)]
pub struct RealizedBlock {
    pub dim: usize,
    pub multiplicity: usize,
    /// `ran e_ss` for `s = 0..dim`.
    pub diagonal_units: Vec<Subspace>,
}

impl RealizedBlock {
    /// `ran` of the block's central projection.
    pub fn support(&self) -> Subspace {
        let n = self.diagonal_units[0].ambient_dim();
        let cols = self.dim * self.multiplicity;
        let mut m = Mat::<c64>::zeros(n, cols);
        for (s, u) in self.diagonal_units.iter().enumerate() {
            let b = u.basis();
            for j in 0..self.multiplicity {
                for i in 0..n {
                    m[(i, s * self.multiplicity + j)] = b[(i, j)];
                }
            }
        }
        Subspace::from_isometry(m)
    }

    /// The matrix unit `e_st = W_s W_t*` as a dense matrix.
    pub fn matrix_unit(&self, s: usize, t: usize) -> Mat<c64> {
        self.diagonal_units[s].basis() * self.diagonal_units[t].basis().adjoint()
    }
}

#[derive(Debug, Clone)]
pub struct Realization {
    pub n: usize,
    pub blocks: Vec<RealizedBlock>,
    pub diffuse: Vec<Subspace>,
}

/// Fails unless `a` can be modelled with the normalized matrix trace.
pub fn require_tracial(a: &AlgebraSpec) -> Result<(), RmtError> {
    let why = if !a.geometric_blocks().is_empty() {
        Some("it has infinite geometric blocks")
    } else if a.blocks().iter().any(|b| !b.is_tracial()) {
        Some("a matrix block carries unequal weights")
    } else if a.diffuse().iter().any(|d| d.modular != ModularDescriptor::Tracial) {
        Some("a diffuse summand is not tracial")
    } else {
        None
    };
    match why {
        Some(w) => Err(RmtError::NotTracial(format!("{}: {w}", a.name()))),
        None => Ok(()),
    }
}

/// Component ranks for `a` at size `n`: `(unit, count)` pairs whose
/// `unit·count` sum to `n`, rounded by largest remainder in whole units.
pub fn component_ranks(a: &AlgebraSpec, n: usize) -> Result<Vec<(usize, usize)>, RmtError> {
    let mut comps: Vec<(usize, Rational)> = a.blocks().iter().map(|b| (b.dim(), b.mass())).collect();
    comps.extend(a.diffuse().iter().map(|d| (1, d.weight.clone())));
    let n_r = Rational::from_integer(n as i64);
    let mut counts = Vec::with_capacity(comps.len());
    let mut remainders = Vec::with_capacity(comps.len());
    let mut used = 0usize;
    for (unit, mass) in &comps {
        let ideal = &(mass * &n_r) / &Rational::from_integer(*unit as i64);
        let floor = ideal.numer() / ideal.denom();
        let floor: usize = floor.try_into().expect("rank fits in usize");
        used += floor * unit;
        remainders.push(ideal - Rational::from_integer(floor as i64));
        counts.push(floor);
    }
    let mut left = n - used;
    let mut order: Vec<usize> = (0..comps.len()).collect();
    order.sort_by(|&i, &j| remainders[j].cmp(&remainders[i]).then(i.cmp(&j)));
    for &i in &order {
        let unit = comps[i].0;
        if remainders[i].is_positive() && unit <= left {
            counts[i] += 1;
            left -= unit;
        }
    }
    if left > 0 {
        // leftovers only fit components of unit size; give them by remainder order
        if let Some(&i) = order.iter().find(|&&i| comps[i].0 == 1) {
            counts[i] += left;
            left = 0;
        }
    }
    if left > 0 {
        return Err(RmtError::SizeTooSmall(format!(
            "{}: {left} coordinates of ℂ^{n} cannot be assigned to whole blocks",
            a.name()
        )));
    }
    if let Some(k) = counts.iter().position(|&c| c == 0) {
        return Err(RmtError::SizeTooSmall(format!(
            "{}: component {k} rounds to rank 0 at n = {n}",
            a.name()
        )));
    }
    Ok(comps.iter().map(|c| c.0).zip(counts).collect())
}

/// Realizes `a` on `ℂ^n`, in the coordinates given by the columns of
/// `frame` (the identity when `None`).
pub fn realize(a: &AlgebraSpec, n: usize, frame: Option<&Mat<c64>>) -> Result<Realization, RmtError> {
    require_tracial(a)?;
    let ranks = component_ranks(a, n)?;
    let span = |start: usize, len: usize| -> Subspace {
        match frame {
            None => Subspace::coordinate(n, start, len),
            Some(u) => Subspace::from_isometry(u.subcols(start, len).to_owned()),
        }
    };
    let mut offset = 0;
    let mut blocks = Vec::new();
    let mut diffuse = Vec::new();
    for (idx, &(dim, k)) in ranks.iter().enumerate() {
        if idx < a.blocks().len() {
            let diagonal_units = (0..dim).map(|s| span(offset + s * k, k)).collect();
            blocks.push(RealizedBlock {
                dim,
                multiplicity: k,
                diagonal_units,
            });
        } else {
            diffuse.push(span(offset, k));
        }
        offset += dim * k;
    }
    Ok(Realization { n, blocks, diffuse })
}
