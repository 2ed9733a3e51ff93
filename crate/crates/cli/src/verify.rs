//! The `verify` command: every gallery entry against its pinned verdict and bounds.

use std::path::Path;

use helixlab_core::{JetMode, Lemma32Outcome, Tolerances, Verdict};
use rayon::prelude::*;

use crate::analyze::{run_pipeline, AnalysisReport, Problem};
use crate::error::CliError;
use crate::gallery::{Bounds, Entry, Manifest};
use crate::io::{ensure_dir, to_json, write_atomic};

#[derive(Debug, Clone)]
pub struct VerifyRow {
    pub name: String,
    /// Verdict string, or `error` when the pipeline failed.
    pub verdict: String,
    pub thm31_res: f64,
    pub axis_err: f64,
    pub thm33_dev: f64,
    pub cor32_res: f64,
    pub failures: Vec<String>,
    pub report: Option<AnalysisReport>,
}

impl VerifyRow {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub rows: Vec<VerifyRow>,
}

impl VerifyOutcome {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(VerifyRow::passed)
    }

    /// Fixed-format summary table followed by one line per failed assertion.
    pub fn render(&self) -> String {
        let mut out = format!(
            "{:<22} {:<27} {:>10} {:>10} {:>10} {:>10}  {}\n",
            "curve", "verdict", "thm31_res", "axis_err", "thm33_dev", "cor32_res", "status"
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{:<22} {:<27} {:>10.3e} {:>10.3e} {:>10.3e} {:>10.3e}  {}\n",
                r.name,
                r.verdict,
                r.thm31_res,
                r.axis_err,
                r.thm33_dev,
                r.cor32_res,
                if r.passed() { "PASS" } else { "FAIL" }
            ));
        }
        for r in &self.rows {
            for f in &r.failures {
                out.push_str(&format!("FAIL {}: {f}\n", r.name));
            }
        }
        let ok = self.rows.iter().filter(|r| r.passed()).count();
        out.push_str(&format!("{ok}/{} gallery entries passed\n", self.rows.len()));
        out
    }
}

struct Checker<'a> {
    failures: &'a mut Vec<String>,
}

impl Checker<'_> {
    fn below(&mut self, what: &str, value: f64, bound: f64) {
        if !(value < bound) {
            self.failures.push(format!("{what} = {value:.3e} exceeds {bound:.1e}"));
        }
    }

    fn near(&mut self, what: &str, value: f64, expected: f64, tol: f64) {
        if !((value - expected).abs() <= tol) {
            self.failures
                .push(format!("{what} = {value:.12} differs from {expected} by more than {tol:.1e}"));
        }
    }

    fn holds(&mut self, what: &str, ok: bool) {
        if !ok {
            self.failures.push(format!("{what} does not hold"));
        }
    }
}

/// All assertions the gallery pins for one analysed entry.
pub fn check_report(entry: &Entry, b: &Bounds, a: &AnalysisReport) -> Vec<String> {
    let mut failures = Vec::new();
    let mut c = Checker {
        failures: &mut failures,
    };
    let r = &a.report;
    let verdict = r.verdict.to_string();
    if verdict != entry.expected.verdict {
        c.failures
            .push(format!("verdict {verdict}, expected {}", entry.expected.verdict));
    }
    c.below("frenet_residual", a.frenet_residual, b.frenet_residual);
    c.below("orthonormality defect", a.orthonormality_defect, b.orthonormality);
    if r.lemma32.outcome != entry.expected.identity {
        c.failures.push(format!(
            "derivative identity {:?}, expected {:?}",
            r.lemma32.outcome, entry.expected.identity
        ));
    }
    if r.lemma32.outcome == Lemma32Outcome::Evaluated {
        c.holds("signed-sum / derivative-identity agreement", r.lemma32.agree);
    }
    if r.verdict == Verdict::SlantHelix {
        c.holds("eikonal gate", r.eikonal.is_constant);
        c.holds("parallel gate", r.parallel_ok);
        c.holds("slant gate", r.slant.is_constant && r.slant.is_nonzero);
        c.below("thm31 residual", r.thm31_max_residual, b.thm31_residual);
        c.below("g(grad f, V_{n-1})", r.vn1_orthogonality, b.vn1_orthogonality);
        c.below("axis error", r.axis.max_comparison_error, b.axis_error);
        c.below("lambda_{n-1}", r.axis.max_lambda_n1, b.lambda_n1);
        c.holds("signed sum constant", r.thm33.is_constant);
        c.holds("|H*_{n-2}| nonzero", r.last_harmonic.is_nonzero);
        c.holds("signed sum nonzero", !r.thm33_anomalous);
        c.below("cor32 residual", r.cor32_residual, b.cor32_residual);
    }
    if let Some(k) = entry.expected.slant_constant {
        c.near("g(grad f, V_n)", r.slant.mean, k, b.constant);
    }
    if let Some(s) = entry.expected.signed_sum {
        c.near("signed sum", r.thm33.mean, s, b.constant);
    }
    failures
}

pub fn verify_entry(manifest: &Manifest, entry: &Entry, tol: &Tolerances) -> VerifyRow {
    let analysed = (|| -> Result<AnalysisReport, CliError> {
        let curve = entry.curve()?;
        let problem = Problem {
            metric: entry.metric()?,
            field: entry.field(curve.dim())?,
            curve,
        };
        Ok(run_pipeline(&problem, entry.samples, JetMode::Analytic, tol)?.report)
    })();
    match analysed {
        Ok(a) => {
            let r = &a.report;
            VerifyRow {
                name: entry.name.clone(),
                verdict: r.verdict.to_string(),
                thm31_res: r.thm31_max_residual,
                axis_err: r.axis.max_comparison_error,
                thm33_dev: r.thm33.max_abs_dev,
                cor32_res: r.cor32_residual,
                failures: check_report(entry, &manifest.bounds_for(entry), &a),
                report: Some(a),
            }
        }
        Err(e) => VerifyRow {
            name: entry.name.clone(),
            verdict: "error".into(),
            thm31_res: f64::NAN,
            axis_err: f64::NAN,
            thm33_dev: f64::NAN,
            cor32_res: f64::NAN,
            failures: vec![e.to_string()],
            report: None,
        },
    }
}

/// Runs all entries, or only `only`; entries run concurrently and rows keep manifest order.
pub fn cmd_verify(manifest: &Manifest, only: Option<&str>, tol: &Tolerances) -> Result<VerifyOutcome, CliError> {
    let selected: Vec<&Entry> = match only {
        Some(name) => vec![manifest
            .get(name)
            .ok_or_else(|| CliError::UnknownEntry(name.to_string()))?],
        None => manifest.entries.iter().collect(),
    };
    let rows = selected.par_iter().map(|e| verify_entry(manifest, e, tol)).collect();
    Ok(VerifyOutcome { rows })
}

/// One `<entry>.json` report per analysed entry plus `summary.txt`.
pub fn write_verify_outputs(outcome: &VerifyOutcome, dir: &Path) -> Result<(), CliError> {
    ensure_dir(dir)?;
    for r in &outcome.rows {
        if let Some(a) = &r.report {
            write_atomic(&dir.join(format!("{}.json", r.name)), &to_json(a))?;
        }
    }
    write_atomic(&dir.join("summary.txt"), outcome.render().as_bytes())
}
