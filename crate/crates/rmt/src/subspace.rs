//! Projections stored as orthonormal bases of their ranges, and their
//! meets.
//!
//! A rank-`r` projection on `ℂ^n` is kept as an `n × r` isometry `A` with
//! `P = AA*`. For two ranges `A`, `B` the component of `A` orthogonal to
//! `B` is `R = A − B(B*A)`; the eigenvalues of `R*R` are the squared sines
//! of the principal angles, and the eigenvalues of `PQP` on `ran P` are
//! `1 − sin²`. Measuring `1 − λ` directly keeps the eigenvalues close to 1
//! accurate to about machine precision, well below the meet cutoff.

use faer::{c64, Mat, MatRef};

use crate::RmtError;

/// Eigenvalues in `(1 − AMBIGUITY·δ, 1 − δ]` make a meet ambiguous.
pub const AMBIGUITY_FACTOR: f64 = 1e3;

#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: Mat<c64>,
}

impl Subspace {
    /// Wraps an `n × r` matrix whose columns are assumed orthonormal.
    pub fn from_isometry(basis: Mat<c64>) -> Self {
        Subspace { basis }
    }

    /// Orthonormalizes the columns of `m` (which must have full column rank).
    pub fn orthonormalize(m: Mat<c64>) -> Self {
        if m.ncols() == 0 {
            return Subspace { basis: m };
        }
        Subspace {
            basis: m.qr().compute_thin_Q(),
        }
    }

    /// Span of the standard basis vectors `e_start, …, e_{start+len−1}`.
    pub fn coordinate(n: usize, start: usize, len: usize) -> Self {
        let basis = Mat::<c64>::from_fn(n, len, |i, j| {
            if i == start + j {
                c64::new(1.0, 0.0)
            } else {
                c64::new(0.0, 0.0)
            }
        });
        Subspace { basis }
    }

    pub fn zero(n: usize) -> Self {
        Subspace {
            basis: Mat::zeros(n, 0),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> MatRef<'_, c64> {
        self.basis.as_ref()
    }

    /// The projection `AA*` as a dense `n × n` matrix.
    pub fn projection_matrix(&self) -> Mat<c64> {
        &self.basis * self.basis.adjoint()
    }

    /// Image under the partial isometry `target · source*`, re-orthonormalized.
    /// Used to move a subspace of `ran source` into `ran target`.
    pub fn transport(&self, source: &Subspace, target: &Subspace) -> Subspace {
        if self.rank() == 0 {
            return Subspace::zero(target.ambient_dim());
        }
        let coords = source.basis.adjoint() * &self.basis;
        Subspace::orthonormalize(&target.basis * coords)
    }
}

/// Squared sines of the principal angles between `ran A` and `ran B`,
/// ascending, with the right singular vectors that realize them.
#[derive(Debug, Clone)]
pub struct Angles {
    pub sin2: Vec<f64>,
    directions: Mat<c64>,
}

impl Angles {
    pub fn between(a: &Subspace, b: &Subspace) -> Result<Angles, RmtError> {
        let r = a.rank();
        if r == 0 {
            return Ok(Angles {
                sin2: Vec::new(),
                directions: Mat::zeros(0, 0),
            });
        }
        let residual = if b.rank() == 0 {
            a.basis.clone()
        } else {
            &a.basis - &b.basis * (b.basis.adjoint() * &a.basis)
        };
        // Gram matrix of the residual: its eigenvalues are the squared sines
        let gram = residual.adjoint() * &residual;
        let evd = gram
            .self_adjoint_eigen(faer::Side::Lower)
            .map_err(|e| RmtError::Numerical(format!("{e:?}")))?;
        let s = evd.S().column_vector();
        let mut order: Vec<usize> = (0..r).collect();
        order.sort_by(|&i, &j| s[i].re.total_cmp(&s[j].re));
        let sin2 = order.iter().map(|&i| s[i].re.max(0.0)).collect();
        let v = evd.U();
        let directions = Mat::<c64>::from_fn(r, r, |i, j| v[(i, order[j])]);
        Ok(Angles { sin2, directions })
    }

    /// Eigenvalues of `PQP` on `ran P`, descending.
    pub fn pqp_eigenvalues(&self) -> Vec<f64> {
        self.sin2.iter().map(|s| 1.0 - s).collect()
    }

    /// Number of `PQP` eigenvalues `> 1 − window`.
    pub fn near_one(&self, window: f64) -> usize {
        self.sin2.iter().take_while(|&&s| s < window).count()
    }
}

/// `P ∧ Q`: the span of the principal directions of `ran P` with
/// `sin² < δ`, i.e. the spectral projection of `PQP` on `(1 − δ, 1]`.
///
/// Fails with [`RmtError::IllConditioned`] if any eigenvalue falls in the
/// ambiguity band `(1 − 10³δ, 1 − δ]`.
pub fn meet(a: &Subspace, b: &Subspace, delta: f64) -> Result<Subspace, RmtError> {
    meet_with_angles(a, b, delta).map(|(m, _)| m)
}

pub fn meet_with_angles(a: &Subspace, b: &Subspace, delta: f64) -> Result<(Subspace, Angles), RmtError> {
    let angles = Angles::between(a, b)?;
    let k = angles.sin2.iter().take_while(|&&s| s < delta).count();
    if let Some(&s) = angles.sin2.get(k) {
        if s < AMBIGUITY_FACTOR * delta {
            return Err(RmtError::IllConditioned {
                eigenvalue: 1.0 - s,
                cutoff: delta,
            });
        }
    }
    let m = if k == 0 {
        Subspace::zero(a.ambient_dim())
    } else {
        Subspace::orthonormalize(&a.basis * angles.directions.subcols(0, k))
    };
    Ok((m, angles))
}
