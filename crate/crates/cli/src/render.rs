//! Human-readable output.

use std::fmt::Write;

use freeprod::abelian::CheckResult;
use freeprod::cite;
use freeprod::structure::{AtomBlock, ContinuousKind, FlagStatus, StructureReport};
use freeprod::AlgebraSpec;
use freeprod_rmt::verify::Measure;
use freeprod_rmt::RmtReport;

fn subscript(n: usize) -> String {
    const DIGITS: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];
    n.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).unwrap() as usize])
        .collect()
}

fn atom_phrase(x: &AtomBlock) -> String {
    if x.dim == 1 {
        return format!("ℂ of weight {}", x.total_weight);
    }
    let first = &x.per_entry_weights[0];
    let weights = if x.per_entry_weights.iter().all(|w| w == first) {
        first.to_string()
    } else {
        x.per_entry_weights
            .iter()
            .map(|w| w.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    };
    format!("M{} with entry weights {weights}", subscript(x.dim))
}

/// One-line summary, e.g.
/// `M_d = M₂ with entry weights 1/10; M_c: II₁ factor, full, prime; weight 4/5`.
pub fn summary(report: &StructureReport) -> String {
    let md = if report.atoms.is_empty() {
        "M_d = 0".to_string()
    } else {
        let parts: Vec<String> = report.atoms.iter().map(atom_phrase).collect();
        format!("M_d = {}", parts.join(" ⊕ "))
    };
    let c = &report.continuous;
    let mc = match &c.kind {
        ContinuousKind::Factor(t) => {
            let mut s = format!("M_c: {t} factor");
            if c.full.is_proven() {
                s.push_str(", full");
            }
            if c.prime.is_proven() {
                s.push_str(", prime");
            }
            format!("{s}; weight {}", c.weight)
        }
        ContinuousKind::NonFactorDim4 => format!("M_c: L^∞(0,1) ⊗ M₂(ℂ); weight {}", c.weight),
        ContinuousKind::Absent if c.weight.is_zero() => "M_c = 0".to_string(),
        ContinuousKind::Absent => format!("remaining weight {} carried unchanged", c.weight),
    };
    format!("{md}; {mc}")
}

fn flag_line(out: &mut String, name: &str, f: &FlagStatus) {
    let _ = writeln!(out, "  {name:<34} {f}");
}

pub fn human(a: &AlgebraSpec, b: &AlgebraSpec, report: &StructureReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "M1 = {a}");
    let _ = writeln!(out, "M2 = {b}");
    let _ = writeln!(out, "{}", summary(report));
    if report.passthrough.is_some() {
        let _ = writeln!(
            out,
            "  free product with ℂ is the other algebra [{}]",
            cite::SCALAR_FACTOR
        );
    }
    if !report.atoms.is_empty() {
        let _ = writeln!(out, "discrete part:");
        for x in &report.atoms {
            let c = if report.continuous.kind == ContinuousKind::NonFactorDim4 {
                cite::TWO_PROJECTIONS
            } else if report.passthrough.is_some() {
                cite::SCALAR_FACTOR
            } else {
                cite::DISCRETE_WEIGHTS
            };
            let _ = writeln!(out, "  {}, total {} [{c}]", atom_phrase(x), x.total_weight);
        }
    }
    let c = &report.continuous;
    match &c.kind {
        ContinuousKind::Factor(t) => {
            let _ = writeln!(out, "continuous part: weight {} [{}]", c.weight, cite::DECOMPOSITION);
            let _ = writeln!(out, "  type {t}, T(M_c) = {} [{}]", c.t_set, cite::T_SET);
            flag_line(&mut out, "full", &c.full);
            flag_line(
                &mut out,
                "trivial asymptotic centralizer",
                &c.asymptotic_centralizer_trivial,
            );
            flag_line(&mut out, "prime", &c.prime);
            flag_line(
                &mut out,
                "no Cartan (hyperfinite inputs)",
                &c.no_cartan_in_nonhyperfinite,
            );
            flag_line(&mut out, "ergodic state centralizer", &c.state_centralizer_ergodic);
            let _ = writeln!(out, "  Sd group {}: {}", c.sd_group.group, c.sd_group.status);
        }
        ContinuousKind::NonFactorDim4 => {
            let _ = writeln!(
                out,
                "continuous part: L^∞(0,1) ⊗ M₂(ℂ), weight {} [{}]",
                c.weight,
                cite::TWO_PROJECTIONS_DIFFUSE
            );
        }
        ContinuousKind::Absent => {}
    }
    let _ = writeln!(
        out,
        "amenable: {} [{}]",
        if report.amenable { "yes" } else { "no" },
        cite::AMENABLE
    );
    for w in &report.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

pub fn explain(a: &AlgebraSpec, b: &AlgebraSpec, report: &StructureReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "M1 = {a}");
    let _ = writeln!(out, "M2 = {b}");
    for (k, step) in report.trace.iter().enumerate() {
        let _ = writeln!(out, "{:>2}. {}", k + 1, step.condition);
        let _ = writeln!(out, "    → {} [{}]", step.outcome, step.citation);
    }
    for w in &report.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    let _ = writeln!(out, "{}", summary(report));
    out
}

pub fn verify_human(
    a: &AlgebraSpec,
    b: &AlgebraSpec,
    report: &StructureReport,
    check: Option<&CheckResult>,
    rmt: Option<&RmtReport>,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "M1 = {a}");
    let _ = writeln!(out, "M2 = {b}");
    let _ = writeln!(out, "{}", summary(report));
    match check {
        Some(CheckResult::Agree { masses }) => {
            let m: Vec<String> = masses.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "pairwise atom rule: agree {{{}}}", m.join(", "));
        }
        Some(CheckResult::Disagree { oracle, closed_form }) => {
            let _ = writeln!(
                out,
                "pairwise atom rule: DISAGREE, pairwise {oracle:?} vs closed form {closed_form:?}"
            );
        }
        None => {
            let _ = writeln!(out, "pairwise atom rule: not applicable (inputs not abelian)");
        }
    }
    if let Some(r) = rmt {
        let _ = writeln!(
            out,
            "random matrices: n = {}, seeds {:?}, δ = {:e}, tolerance {}",
            r.config.n, r.config.seeds, r.config.meet_cutoff, r.config.atom_tolerance
        );
        for row in &r.rows {
            let what = match row.measure {
                Measure::Rank => "rank",
                Measure::NearOne => "near-1",
            };
            let _ = writeln!(
                out,
                "  {} {}: predicted {}, {what} mean {:.4} (spread {:.4})",
                if row.pass { "ok  " } else { "FAIL" },
                row.description,
                row.predicted,
                row.mean,
                row.spread
            );
        }
        for s in &r.spectra {
            let worst_ks = s.ks_distance.iter().map(|x| x.1).fold(0.0, f64::max);
            let gaps: usize = s.gap_counts.iter().map(|g| g.1).sum();
            let _ = writeln!(
                out,
                "  {} {}: x₊ = {:.4}, eigenvalues in gap {gaps}, max KS {worst_ks:.4}",
                if s.pass { "ok  " } else { "FAIL" },
                s.description,
                s.x_plus
            );
        }
        for f in &r.seed_failures {
            let _ = writeln!(out, "  seed {} failed: {}", f.seed, f.error);
        }
        for n in &r.notes {
            let _ = writeln!(out, "  note: {n}");
        }
        let _ = writeln!(out, "result: {}", if r.passed { "pass" } else { "FAIL" });
    }
    out
}

pub fn histograms_csv(r: &RmtReport) -> String {
    let mut out = String::new();
    for s in &r.spectra {
        let _ = writeln!(out, "# {}", s.description);
        out.push_str(&s.histogram.to_csv());
    }
    out
}
