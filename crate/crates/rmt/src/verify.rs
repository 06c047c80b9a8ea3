//! Seeded Monte Carlo comparison of predicted atoms with realized meets.

use freeprod::algebra::AlgebraSpec;
use freeprod::structure::{AtomSource, BlockRef, ContinuousKind, Side, StructureReport};
use freeprod::two_proj::{pqp_law, SpectralLaw};
use freeprod::{classify_free_product, Rational};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::haar::haar_unitary;
use crate::realize::{component_ranks, realize, require_tracial, Realization, RealizedBlock};
use crate::subspace::{meet_with_angles, Angles, Subspace};
use crate::RmtError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmtConfig {
    pub n: usize,
    pub seeds: Vec<u64>,
    /// `δ`: a `PQP` eigenvalue above `1 − δ` counts as lying in the meet.
    pub meet_cutoff: f64,
    pub atom_tolerance: f64,
    /// Width of the window below 1 used to count near-1 eigenvalues when
    /// no atom is predicted.
    pub near_one_window: f64,
    pub histogram_bins: usize,
}

impl Default for RmtConfig {
    fn default() -> Self {
        RmtConfig {
            n: 1000,
            seeds: vec![1, 2, 3, 4, 5],
            meet_cutoff: 1e-12,
            atom_tolerance: 0.02,
            near_one_window: 0.01,
            histogram_bins: 50,
        }
    }
}

impl RmtConfig {
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
    pub fn validate(&self) -> Result<(), RmtError> {
        let bad = |m: &str| Err(RmtError::InvalidConfig(m.to_string()));
        if self.n < 100 {
            return bad("n must be at least 100");
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required");
        }
        if !(self.meet_cutoff > 0.0 && self.meet_cutoff < 1.0) {
            return bad("meet cutoff must lie in (0, 1)");
        }
        if !(self.atom_tolerance >= 0.0) || !(self.near_one_window > 0.0 && self.near_one_window < 1.0) {
            return bad("tolerances must be non-negative and the near-1 window in (0, 1)");
        }
        if self.histogram_bins == 0 {
            return bad("histogram needs at least one bin");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// Normalized rank of the realized projection.
    Rank,
    /// Fraction of `PQP` eigenvalues within the near-1 window, at the last
    /// meet that would produce the atom.
    NearOne,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRow {
    pub description: String,
    pub predicted: Rational,
    pub measure: Measure,
    /// `(seed, value)` for every seed that completed.
    pub per_seed: Vec<(u64, f64)>,
    pub mean: f64,
    /// `max − min` over seeds.
    pub spread: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub left: f64,
    pub right: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bins: Vec<Bin>,
}

impl Histogram {
    fn new(bins: usize) -> Self {
        Histogram {
            bins: (0..bins)
                .map(|k| Bin {
                    left: k as f64 / bins as f64,
                    right: (k + 1) as f64 / bins as f64,
                    count: 0,
                })
                .collect(),
        }
    }

    fn add(&mut self, x: f64) {
        let m = self.bins.len();
        let k = ((x.clamp(0.0, 1.0) * m as f64) as usize).min(m - 1);
        self.bins[k].count += 1;
    }

    pub fn total(&self) -> usize {
        self.bins.iter().map(|b| b.count).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_left,bin_right,count\n");
        for b in &self.bins {
            out.push_str(&format!("{},{},{}\n", b.left, b.right, b.count));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumCheck {
    pub description: String,
    pub alpha: f64,
    pub beta: f64,
    pub x_plus: f64,
    /// Eigenvalues of `PQP` on all of `ℂ^n`, pooled over seeds.
    pub histogram: Histogram,
    /// Eigenvalues found in `(x₊ + tol, 1 − δ)`, per seed.
    pub gap_counts: Vec<(u64, usize)>,
    /// Kolmogorov distance to the free `pqp` law, per seed.
    pub ks_distance: Vec<(u64, f64)>,
    pub first_moment: Vec<(u64, f64)>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedFailure {
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmtReport {
    pub config: RmtConfig,
    pub rows: Vec<PredictionRow>,
    pub spectra: Vec<SpectrumCheck>,
    pub seed_failures: Vec<SeedFailure>,
    pub notes: Vec<String>,
    pub passed: bool,
}

impl RmtReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

/// The corner `f₁₁` of the block `units` cut down by `p`.
#[derive(Debug, Clone)]
pub struct F11 {
    pub f11: Subspace,
    /// Angles between `p` and `ran e_11`.
    pub first_angles: Angles,
    /// Angles at the last meet producing `f₁₁`.
    pub last_angles: Angles,
}

/// `f₁₁` for the matrix units of `block` relative to `p`: each
/// `p ∧ e_{tt}` is moved into `ran e_dd` by `e_{dt}`, the results are met
/// together, and the meet is moved to `ran e_11`. For `d = 1` this is
/// `p ∧ e_11`.
pub fn nested_meet_f11(p: &Subspace, block: &RealizedBlock, delta: f64) -> Result<F11, RmtError> {
    let units = &block.diagonal_units;
    let d = units.len();
    let (first, first_angles) = meet_with_angles(p, &units[0], delta)?;
    if d == 1 {
        return Ok(F11 {
            f11: first,
            last_angles: first_angles.clone(),
            first_angles,
        });
    }
    let last = &units[d - 1];
    let mut pieces = vec![first.transport(&units[0], last)];
    for unit in &units[1..] {
        let (m, _) = meet_with_angles(p, unit, delta)?;
        pieces.push(m.transport(unit, last));
    }
    let mut acc = pieces[0].clone();
    let mut last_angles = None;
    for piece in &pieces[1..] {
        let (m, angles) = meet_with_angles(&acc, piece, delta)?;
        acc = m;
        last_angles = Some(angles);
    }
    Ok(F11 {
        f11: acc.transport(last, &units[0]),
        first_angles,
        last_angles: last_angles.expect("d ≥ 2"),
    })
}

/// Kolmogorov distance between the empirical law of `eigenvalues` and
/// `law`. Values within `snap` of 0 or 1 are moved onto the atoms.
pub fn ks_distance(eigenvalues: &[f64], law: &SpectralLaw, snap: f64) -> f64 {
    let mut xs: Vec<f64> = eigenvalues
        .iter()
        .map(|&x| {
            if x < snap {
                0.0
            } else if x > 1.0 - snap {
                1.0
            } else {
                x
            }
        })
        .collect();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let atom_at = |x: f64| -> f64 { law.atoms.iter().filter(|a| a.0 == x).map(|a| a.1).sum() };
    let mut worst: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let x = xs[i];
        let mut j = i;
        while j < xs.len() && xs[j] == x {
            j += 1;
        }
        let f = law.cdf(x);
        let f_before = f - atom_at(x);
        worst = worst.max((f - j as f64 / n).abs()).max((f_before - i as f64 / n).abs());
        i = j;
    }
    worst
}

/// What is compared: an anchor projection `p` of one algebra against
/// every finite block of the other.
#[derive(Debug, Clone)]
struct Target {
    anchor: BlockRef,
    block: BlockRef,
    predicted: Rational,
    alpha: Rational,
    beta: Rational,
}

fn spec_of<'a>(side: Side, a: &'a AlgebraSpec, b: &'a AlgebraSpec) -> &'a AlgebraSpec {
    match side {
        Side::First => a,
        Side::Second => b,
    }
}

fn targets(a: &AlgebraSpec, b: &AlgebraSpec, report: &StructureReport) -> Vec<Target> {
    let dim4 = report.continuous.kind == ContinuousKind::NonFactorDim4;
    let anchors: Vec<BlockRef> = if dim4 {
        (0..a.blocks().len())
            .map(|index| BlockRef {
                side: Side::First,
                index,
            })
            .collect()
    } else {
        report.selection.iter().map(|s| s.maximizer()).collect()
    };
    let mut out = Vec::new();
    for anchor in anchors {
        let alpha = spec_of(anchor.side, a, b).blocks()[anchor.index].mass();
        let other = anchor.side.other();
        for (j, blk) in spec_of(other, a, b).blocks().iter().enumerate() {
            let block = BlockRef { side: other, index: j };
            let predicted = report
                .atoms
                .iter()
                .find(|x| match &x.source {
                    AtomSource::Block(r) => *r == block,
                    AtomSource::Meet { first, second } => dim4 && *first == anchor.index && *second == j,
                    AtomSource::Verbatim(_) => false,
                })
                .map(|x| x.per_entry_weights[0].clone())
                .unwrap_or_else(Rational::zero);
            out.push(Target {
                anchor,
                block,
                predicted,
                alpha: alpha.clone(),
                beta: blk.weights()[0].clone(),
            });
        }
    }
    out
}

fn describe(t: &Target, a: &AlgebraSpec, b: &AlgebraSpec) -> String {
    let d = spec_of(t.block.side, a, b).blocks()[t.block.index].dim();
    let p = format!("p = {} block {} (mass {})", t.anchor.side, t.anchor.index, t.alpha);
    if d == 1 {
        format!("τ(p ∧ q), {p}, q = {} block {}", t.block.side, t.block.index)
    } else {
        format!("τ(f₁₁), {p}, M_{d} = {} block {}", t.block.side, t.block.index)
    }
}

struct SeedResult {
    values: Vec<(f64, f64)>,
    spectra: Vec<Vec<f64>>,
}

fn run_seed(
    a: &AlgebraSpec,
    b: &AlgebraSpec,
    targets: &[Target],
    config: &RmtConfig,
    seed: u64,
) -> Result<SeedResult, RmtError> {
    let n = config.n;
    let ra = realize(a, n, None)?;
    let u = haar_unitary(n, seed);
    let rb = realize(b, n, Some(&u))?;
    let side = |s: Side| -> &Realization {
        match s {
            Side::First => &ra,
            Side::Second => &rb,
        }
    };
    let mut values = Vec::with_capacity(targets.len());
    let mut spectra = Vec::with_capacity(targets.len());
    for t in targets {
        let p = side(t.anchor.side).blocks[t.anchor.index].support();
        let block = &side(t.block.side).blocks[t.block.index];
        let f = nested_meet_f11(&p, block, config.meet_cutoff)?;
        let rank = f.f11.rank() as f64 / n as f64;
        let near = f.last_angles.near_one(config.near_one_window) as f64 / n as f64;
        values.push((rank, near));
        let mut eig = f.first_angles.pqp_eigenvalues();
        eig.resize(n, 0.0);
        spectra.push(eig);
    }
    Ok(SeedResult { values, spectra })
}

/// Realizes `a ⋆ b` once per seed and compares every predicted entry
/// weight with the measured normalized rank.
pub fn verify(a: &AlgebraSpec, b: &AlgebraSpec, config: &RmtConfig) -> Result<RmtReport, RmtError> {
    config.validate()?;
    for s in [a, b] {
        require_tracial(s)?;
        component_ranks(s, config.n)?;
    }
    let report = classify_free_product(a, b)?;
    let mut notes = Vec::new();
    if report.passthrough.is_some() {
        notes.push("one factor is ℂ; nothing to measure".to_string());
    } else if report.selection.is_none() && report.continuous.kind != ContinuousKind::NonFactorDim4 {
        notes.push("no one-dimensional summand in either algebra; no atoms to measure".to_string());
    }
    let targets = if report.passthrough.is_some() {
        Vec::new()
    } else {
        targets(a, b, &report)
    };
    if let Some(sel) = &report.selection {
        if !sel.co_maximizers.is_empty() {
            notes.push("tied maximizers; measured against the first".to_string());
        }
    }

    let outcomes: Vec<(u64, Result<SeedResult, RmtError>)> = config
        .seeds
        .par_iter()
        .map(|&seed| (seed, run_seed(a, b, &targets, config, seed)))
        .collect();

    let mut seed_failures = Vec::new();
    let mut done = Vec::new();
    for (seed, r) in outcomes {
        match r {
            Ok(r) => done.push((seed, r)),
            Err(e) => seed_failures.push(SeedFailure {
                seed,
                error: e.to_string(),
            }),
        }
    }
    if done.is_empty() {
        return Err(RmtError::AllSeedsFailed(
            seed_failures
                .iter()
                .map(|f| format!("seed {}: {}", f.seed, f.error))
                .collect(),
        ));
    }

    let tol = config.atom_tolerance;
    let mut rows = Vec::new();
    let mut spectra = Vec::new();
    for (k, t) in targets.iter().enumerate() {
        let measure = if t.predicted.is_positive() {
            Measure::Rank
        } else {
            Measure::NearOne
        };
        let per_seed: Vec<(u64, f64)> = done
            .iter()
            .map(|(seed, r)| {
                let (rank, near) = r.values[k];
                (*seed, if measure == Measure::Rank { rank } else { near })
            })
            .collect();
        let vals: Vec<f64> = per_seed.iter().map(|x| x.1).collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let spread = vals.iter().cloned().fold(f64::MIN, f64::max) - vals.iter().cloned().fold(f64::MAX, f64::min);
        let predicted = t.predicted.to_f64();
        let pass = vals.iter().all(|v| (v - predicted).abs() <= tol);
        rows.push(PredictionRow {
            description: describe(t, a, b),
            predicted: t.predicted.clone(),
            measure,
            per_seed,
            mean,
            spread,
            pass,
        });

        // the law needs both traces strictly inside (0, 1)
        let (alpha, beta) = (t.alpha.to_f64(), t.beta.to_f64());
        let Ok(law) = pqp_law(alpha, beta) else { continue };
        let x_plus = law.support.1;
        let mut histogram = Histogram::new(config.histogram_bins);
        let mut gap_counts = Vec::new();
        let mut ks = Vec::new();
        let mut first_moment = Vec::new();
        for (seed, r) in &done {
            let eig = &r.spectra[k];
            for &x in eig {
                histogram.add(x);
            }
            let hi = 1.0 - config.meet_cutoff;
            gap_counts.push((*seed, eig.iter().filter(|&&x| x > x_plus + tol && x < hi).count()));
            ks.push((*seed, ks_distance(eig, &law, config.meet_cutoff)));
            first_moment.push((*seed, eig.iter().sum::<f64>() / eig.len() as f64));
        }
        let pass = gap_counts.iter().all(|g| g.1 == 0);
        spectra.push(SpectrumCheck {
            description: format!("spectrum of pqp, α = {}, β = {}", t.alpha, t.beta),
            alpha,
            beta,
            x_plus,
            histogram,
            gap_counts,
            ks_distance: ks,
            first_moment,
            pass,
        });
    }
    let passed = rows.iter().all(|r| r.pass) && spectra.iter().all(|s| s.pass) && seed_failures.is_empty();
    Ok(RmtReport {
        config: config.clone(),
        rows,
        spectra,
        seed_failures,
        notes,
        passed,
    })
}
