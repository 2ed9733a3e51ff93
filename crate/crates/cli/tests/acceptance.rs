//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use helixlab::analyze::{run_pipeline, Analysis, Problem};
use helixlab::gallery::Entry;
use helixlab::io::to_json;
use helixlab::{cmd_verify, Manifest};
use helixlab_core::{axis_reconstruct, Hypothesis, JetMode, Lemma32Outcome, Tolerances, Verdict};

#[derive(Default)]
struct Checks {
    failed: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn holds(&mut self, what: &str, ok: bool) {
        if !ok {
            self.failed.push(format!("{what} does not hold"));
        }
    }

    fn below(&mut self, what: &str, value: f64, bound: f64) {
        if !(value < bound) {
            self.failed.push(format!("{what} = {value:.3e}, bound {bound:.0e}"));
        }
    }

    fn within(&mut self, what: &str, value: f64, expected: f64, tol: f64) {
        if !((value - expected).abs() <= tol) {
            self.failed
                .push(format!("{what} = {value:.15}, expected {expected:.15} within {tol:.0e}"));
        }
    }

    /// Every sample of `series` within `tol` of `expected`.
    fn series_within(&mut self, what: &str, series: &[f64], expected: f64, tol: f64) {
        let worst = series.iter().map(|v| (v - expected).abs()).fold(0.0, f64::max);
        if series.is_empty() || !(worst <= tol) {
            self.failed
                .push(format!("{what}: max |x - {expected:.12}| = {worst:.3e}, tolerance {tol:.0e}"));
        }
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }
}

struct Board {
    passed: usize,
    total: usize,
}

impl Board {
    fn report(&mut self, id: usize, title: &str, c: Checks) {
        self.total += 1;
        let ok = c.failed.is_empty();
        if ok {
            self.passed += 1;
        }
        let notes = if c.notes.is_empty() {
            String::new()
        } else {
            format!(" ({})", c.notes.join("; "))
        };
        println!("  [{}] {id} {title}{notes}", if ok { "PASS" } else { "FAIL" });
        for f in &c.failed {
            println!("         {f}");
        }
    }
}

fn problem(entry: &Entry) -> Problem {
    let curve = entry.curve().expect("gallery curve");
    Problem {
        metric: entry.metric().expect("gallery metric"),
        field: entry.field(curve.dim()).expect("gallery field"),
        curve,
    }
}

fn analyse(entry: &Entry, mode: JetMode) -> (Problem, Result<Analysis, String>, Duration) {
    let start = Instant::now();
    let p = problem(entry);
    let a = run_pipeline(&p, entry.samples, mode, &Tolerances::for_mode(mode)).map_err(|e| e.to_string());
    (p, a, start.elapsed())
}

struct HelixTargets {
    k: [f64; 2],
    eps: [i8; 3],
    h1: f64,
    slant: f64,
    sum: f64,
    axis: Option<[f64; 3]>,
}

/// Shared body of the two end-to-end helix criteria and the finite-difference rerun.
fn helix_end_to_end(entry: &Entry, mode: JetMode, want: &HelixTargets, constant_tol: f64, residual_tol: f64, budget: Duration) -> Checks {
    let mut c = Checks::default();
    let start = Instant::now();
    let (p, a, _) = analyse(entry, mode);
    let a = match a {
        Ok(a) => a,
        Err(e) => {
            c.holds(&format!("pipeline ({e})"), false);
            return c;
        }
    };
    let axis = axis_reconstruct(&p.metric, &p.field, &a.frame, &a.harmonic);
    let elapsed = start.elapsed();
    let r = &a.report.report;
    c.holds(&format!("verdict {} is SlantHelix", r.verdict), r.verdict == Verdict::SlantHelix);
    c.series_within("k_1", &a.frame.curvature_series(0), want.k[0], constant_tol);
    c.series_within("k_2", &a.frame.curvature_series(1), want.k[1], constant_tol);
    c.holds(
        &format!("causal characters {:?}", want.eps),
        a.frame.apparatus.iter().all(|ap| ap.epsilons == want.eps),
    );
    c.series_within("H*_1", &a.harmonic.series(1), want.h1, constant_tol);
    c.within("g(grad f, V_3) mean", r.slant.mean, want.slant, constant_tol);
    c.below("g(grad f, V_3) max deviation", r.slant.max_abs_dev, constant_tol);
    c.below("identity system residual", r.thm31_max_residual, residual_tol);
    c.below("axis reconstruction error", r.axis.max_comparison_error, residual_tol);
    c.holds("signed sum constant", r.thm33.is_constant);
    c.within("signed sum", r.thm33.mean, want.sum, constant_tol);
    c.below("derivative identity residual", r.cor32_residual, 1e-6_f64.max(residual_tol));
    if let Some(target) = want.axis {
        match &axis {
            Ok((per, _)) => {
                let worst = per
                    .iter()
                    .flat_map(|d| d.reconstructed_axis.iter().zip(target).map(|(x, y)| (x - y).abs()))
                    .fold(0.0, f64::max);
                c.below(&format!("axis vs {target:?}"), worst, constant_tol);
            }
            Err(e) => c.holds(&format!("axis reconstruction ({e})"), false),
        }
    }
    c.below("runtime [s]", elapsed.as_secs_f64(), budget.as_secs_f64());
    c.note(format!(
        "{:.3} s, thm31 {:.1e}, axis {:.1e}, cor32 {:.1e}",
        elapsed.as_secs_f64(),
        r.thm31_max_residual,
        r.axis.max_comparison_error,
        r.cor32_residual
    ));
    c
}

fn verify_twice_via_binary() -> Result<bool, String> {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut stdouts = Vec::new();
    for run in ["first", "second"] {
        let o = Command::new(env!("CARGO_BIN_EXE_helixlab"))
            .args(["verify", "--out", run])
            .current_dir(tmp.path())
            .env_remove("HELIXLAB_TOL_RTOL")
            .output()
            .map_err(|e| e.to_string())?;
        if o.status.code() != Some(0) {
            return Err(format!("verify exited with {:?}", o.status.code()));
        }
        stdouts.push(o.stdout);
    }
    let files = |d: &Path| -> Result<Vec<(String, Vec<u8>)>, String> {
        let mut out = Vec::new();
        for e in fs::read_dir(d).map_err(|e| e.to_string())? {
            let e = e.map_err(|e| e.to_string())?;
            out.push((
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).map_err(|e| e.to_string())?,
            ));
        }
        out.sort();
        Ok(out)
    };
    let a = files(&tmp.path().join("first"))?;
    let b = files(&tmp.path().join("second"))?;
    Ok(stdouts[0] == stdouts[1] && !a.is_empty() && a == b)
}

fn main() -> ExitCode {
    let manifest = Manifest::builtin();
    let entry = |name: &str| manifest.get(name).unwrap_or_else(|| panic!("gallery entry {name}"));
    let mut board = Board { passed: 0, total: 0 };
    println!("acceptance criteria");

    let euclid = HelixTargets {
        k: [0.5, 0.5],
        eps: [1, 1, 1],
        h1: 1.0,
        slant: FRAC_1_SQRT_2,
        sum: 1.0,
        axis: None,
    };
    board.report(
        1,
        "Euclidean helix end-to-end, analytic jets",
        helix_end_to_end(entry("euclid_helix"), JetMode::Analytic, &euclid, 1e-9, 1e-9, Duration::from_secs(1)),
    );

    let minkowski = HelixTargets {
        k: [1.0, SQRT_2],
        eps: [-1, 1, 1],
        h1: -SQRT_2,
        slant: -1.0,
        sum: -2.0,
        axis: Some([-1.0, 0.0, 0.0]),
    };
    board.report(
        2,
        "Minkowski helix end-to-end, analytic jets",
        helix_end_to_end(entry("minkowski_helix"), JetMode::Analytic, &minkowski, 1e-9, 1e-9, Duration::from_secs(1)),
    );

    let runs: Vec<(&Entry, Result<Analysis, String>)> = manifest
        .entries
        .iter()
        .map(|e| {
            let (_, a, _) = analyse(e, JetMode::Analytic);
            (e, a)
        })
        .collect();

    let mut c3 = Checks::default();
    let mut c4 = Checks::default();
    let (mut worst_res, mut worst_orth) = (0.0_f64, 0.0_f64);
    for (e, a) in &runs {
        match a {
            Ok(a) => {
                c3.below(&format!("{} frenet_residual", e.name), a.report.frenet_residual, 1e-5);
                c4.below(&format!("{} orthonormality defect", e.name), a.report.orthonormality_defect, 1e-9);
                worst_res = worst_res.max(a.report.frenet_residual);
                worst_orth = worst_orth.max(a.report.orthonormality_defect);
            }
            Err(err) => {
                c3.holds(&format!("{} pipeline ({err})", e.name), false);
                c4.holds(&format!("{} pipeline ({err})", e.name), false);
            }
        }
    }
    c3.note(format!("{} curves, worst {worst_res:.1e}", runs.len()));
    c4.note(format!("{} curves, worst {worst_orth:.1e}", runs.len()));
    board.report(3, "Frenet closure on the gallery", c3);
    board.report(4, "orthonormality sweep on the gallery", c4);

    let mut c5 = Checks::default();
    let mut slant4 = 0;
    for (e, a) in runs.iter().filter(|(e, _)| e.metric.len() == 4) {
        let Ok(a) = a else {
            c5.holds(&format!("{} pipeline", e.name), false);
            continue;
        };
        let r = &a.report.report;
        if r.verdict == Verdict::SlantHelix {
            slant4 += 1;
            c5.below(&format!("{} identity system residual", e.name), r.thm31_max_residual, 1e-6);
            c5.below(&format!("{} |g(grad f, V_3)|", e.name), r.vn1_orthogonality, 1e-8);
            c5.note(format!("{} {:.1e}", e.name, r.thm31_max_residual));
        } else {
            c5.note(format!("{} diagnostic, {} residual {:.1e}", e.name, r.verdict, r.thm31_max_residual));
        }
    }
    c5.holds("at least one slant helix at n = 4", slant4 > 0);
    board.report(5, "identity system at n = 4", c5);

    let mut c6 = Checks::default();
    let mut evaluated = 0;
    for (e, a) in &runs {
        let Ok(a) = a else { continue };
        let r = &a.report.report;
        if r.last_harmonic.is_nonzero {
            evaluated += 1;
            c6.holds(
                &format!("{} identity evaluated", e.name),
                r.lemma32.outcome == Lemma32Outcome::Evaluated,
            );
            c6.holds(&format!("{} agree", e.name), r.lemma32.agree);
        }
    }
    let w = runs.iter().find(|(e, _)| e.name == "w_curve").and_then(|(_, a)| a.as_ref().ok());
    c6.holds(
        "w_curve NotApplicable",
        w.is_some_and(|a| a.report.report.lemma32.outcome == Lemma32Outcome::NotApplicable),
    );
    c6.note(format!("{evaluated} curves evaluated"));
    board.report(6, "signed-sum / derivative-identity equivalence", c6);

    let mut c7 = Checks::default();
    for (name, want) in [
        ("cubic", Verdict::NotSlant),
        ("helix_quadratic_field", Verdict::HypothesisFailed(Hypothesis::Eikonal)),
        ("helix_radial_field", Verdict::HypothesisFailed(Hypothesis::Parallel)),
    ] {
        let got = runs
            .iter()
            .find(|(e, _)| e.name == name)
            .and_then(|(_, a)| a.as_ref().ok())
            .map(|a| a.report.report.verdict);
        c7.holds(&format!("{name} -> {want} (got {got:?})"), got == Some(want));
    }
    board.report(7, "negative soundness", c7);

    board.report(
        8,
        "Euclidean helix with finite-difference jets",
        helix_end_to_end(entry("euclid_helix"), JetMode::FiniteDifference, &euclid, 1e-5, 1e-4, Duration::from_secs(5)),
    );

    let mut c9 = Checks::default();
    let tol = Tolerances::default();
    match (cmd_verify(&manifest, None, &tol), cmd_verify(&manifest, None, &tol)) {
        (Ok(a), Ok(b)) => {
            c9.holds("verify table identical", a.render() == b.render());
            let json = |o: &helixlab::VerifyOutcome| -> Vec<Vec<u8>> {
                o.rows.iter().filter_map(|r| r.report.as_ref().map(to_json)).collect()
            };
            c9.holds("per-entry JSON identical", json(&a) == json(&b));
            c9.holds("gallery passes", a.passed());
        }
        _ => c9.holds("cmd_verify runs", false),
    }
    match verify_twice_via_binary() {
        Ok(same) => c9.holds("binary verify stdout and files identical", same),
        Err(e) => c9.holds(&format!("binary verify ({e})"), false),
    }
    board.report(9, "determinism of verify", c9);

    println!("{}/{} criteria passed", board.passed, board.total);
    if board.passed == board.total {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
