//! The `analyze` pipeline: grid, frame field, harmonic profile, report.

use std::path::{Path, PathBuf};

use helixlab_core::{
    build_grid, frame_field, frenet_residual, full_report, harmonic_profile, CurveSpec, FrameField, HarmonicProfile,
    JetMode, NoiseFloor, ScalarField, SignatureMetric, SlantReport, Tolerances, Verdict, BUILTIN_FIELDS,
};
use serde::Serialize;

use crate::error::CliError;
use crate::gallery::{curve_from_value, metric_from_signs, named_curve, Manifest};
use crate::io::{ensure_dir, read_text, to_json, write_atomic};

pub const RTOL_ENV: &str = "HELIXLAB_TOL_RTOL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Both,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Gallery entry name, named curve, inline JSON or path.
    pub curve: String,
    /// Builtin field name, inline JSON or path; defaults to the gallery entry's field.
    pub field: Option<String>,
    /// `-1,1,1`, `{"signs": [...]}`, `euclidean`, `minkowski` or path.
    pub metric: Option<String>,
    pub samples: usize,
    pub jet_mode: JetMode,
    pub tolerances: Tolerances,
    pub output: PathBuf,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn new(curve: impl Into<String>, output: impl Into<PathBuf>) -> Self {
        Self {
            curve: curve.into(),
            field: None,
            metric: None,
            samples: 201,
            jet_mode: JetMode::Analytic,
            tolerances: Tolerances::default(),
            output: output.into(),
            format: OutputFormat::Both,
        }
    }
}

/// Tolerances for `mode`, with rtol taken from the environment when set.
pub fn tolerances_from_env(mode: JetMode) -> Result<Tolerances, CliError> {
    let tol = Tolerances::for_mode(mode);
    match std::env::var(RTOL_ENV) {
        Ok(v) => {
            let rtol: f64 = v
                .trim()
                .parse()
                .map_err(|e| CliError::input(&format!("{RTOL_ENV}={v}"), e))?;
            if !(rtol.is_finite() && rtol >= 0.0) {
                return Err(CliError::Input(format!("{RTOL_ENV} must be a non-negative number")));
            }
            Ok(tol.with_rtol(rtol))
        }
        Err(std::env::VarError::NotPresent) => Ok(tol),
        Err(e) => Err(CliError::input(RTOL_ENV, e)),
    }
}

/// Resolved inputs of one analysis.
#[derive(Debug, Clone)]
pub struct Problem {
    pub metric: SignatureMetric,
    pub curve: CurveSpec,
    pub field: ScalarField,
}

fn looks_inline(s: &str) -> bool {
    s.trim_start().starts_with('{')
}

fn json_source(source: &str, what: &str) -> Result<serde_json::Value, CliError> {
    let text = if looks_inline(source) {
        source.to_string()
    } else {
        read_text(Path::new(source))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::input(&format!("{what} JSON"), e))
}

fn parse_metric(source: &str, dim: usize) -> Result<SignatureMetric, CliError> {
    let s = source.trim();
    match s {
        "euclidean" => return Ok(SignatureMetric::euclidean(dim)),
        "minkowski" => return Ok(SignatureMetric::minkowski(dim)),
        _ => {}
    }
    let list = s.strip_prefix("diag(").and_then(|r| r.strip_suffix(')')).unwrap_or(s);
    if !list.is_empty() && list.chars().all(|c| c.is_ascii_digit() || "+-, ".contains(c)) {
        let signs = list
            .split(',')
            .map(|x| x.trim().parse::<i64>().map_err(|e| CliError::input("metric", e)))
            .collect::<Result<Vec<_>, _>>()?;
        return metric_from_signs(&signs);
    }
    let v = json_source(s, "metric")?;
    serde_json::from_value(v).map_err(|e| CliError::input("metric", e))
}

fn parse_field(source: &str, dim: usize) -> Result<ScalarField, CliError> {
    if BUILTIN_FIELDS.iter().any(|(n, _)| *n == source) {
        return ScalarField::builtin(source, dim).map_err(|e| CliError::input("field", e));
    }
    let v = json_source(source, "field")?;
    ScalarField::from_json(&v.to_string(), dim).map_err(|e| CliError::input("field", e))
}

pub fn resolve(cfg: &RunConfig, manifest: &Manifest) -> Result<Problem, CliError> {
    let entry = manifest.get(&cfg.curve);
    let curve = if let Some(e) = entry {
        e.curve()?
    } else if let Some(c) = named_curve(&cfg.curve) {
        c?
    } else {
        curve_from_value(&json_source(&cfg.curve, "curve")?)?
    };
    let dim = curve.dim();
    let metric = match (&cfg.metric, entry) {
        (Some(m), _) => parse_metric(m, dim)?,
        (None, Some(e)) => e.metric()?,
        (None, None) => SignatureMetric::euclidean(dim),
    };
    let field = match (&cfg.field, entry) {
        (Some(f), _) => parse_field(f, dim)?,
        (None, Some(e)) => e.field(dim)?,
        (None, None) => return Err(CliError::Input("--field is required for curves outside the gallery".into())),
    };
    if metric.dim() != dim || field.dim() != dim {
        return Err(CliError::Input(format!(
            "dimension mismatch: curve {dim}, metric {}, field {}",
            metric.dim(),
            field.dim()
        )));
    }
    Ok(Problem { metric, curve, field })
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub curve: String,
    pub dim: usize,
    pub metric: Vec<i8>,
    pub field: String,
    pub samples: usize,
    pub jet_mode: JetMode,
    pub tolerances: Tolerances,
    pub frenet_residual: f64,
    pub orthonormality_defect: f64,
    pub frame_flips: usize,
    pub noise_floor: NoiseFloor,
    pub report: SlantReport,
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub frame: FrameField,
    pub harmonic: HarmonicProfile,
    pub report: AnalysisReport,
}

pub fn run_pipeline(p: &Problem, samples: usize, mode: JetMode, tol: &Tolerances) -> Result<Analysis, CliError> {
    let grid = build_grid(&p.metric, &p.curve, samples, tol)?;
    let frame = frame_field(&p.metric, &p.curve, &grid, mode, tol)?;
    let harmonic = harmonic_profile(&frame)?;
    let slant = full_report(&p.metric, &p.field, &frame, &harmonic, tol)?;
    let report = AnalysisReport {
        curve: p.curve.label().to_string(),
        dim: p.metric.dim(),
        metric: p.metric.signs().to_vec(),
        field: p.field.label().to_string(),
        samples,
        jet_mode: mode,
        tolerances: *tol,
        frenet_residual: frenet_residual(&frame)?,
        orthonormality_defect: frame.max_orthonormality_defect(&p.metric),
        frame_flips: frame.flips,
        noise_floor: harmonic.noise.clone(),
        report: slant,
    };
    Ok(Analysis {
        frame,
        harmonic,
        report,
    })
}

pub fn write_outputs(a: &Analysis, dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>, CliError> {
    ensure_dir(dir)?;
    let mut written = Vec::new();
    if matches!(format, OutputFormat::Csv | OutputFormat::Both) {
        let mut buf = Vec::new();
        a.frame.write_csv(&mut buf).expect("writing to memory");
        let p = dir.join("frenet.csv");
        write_atomic(&p, &buf)?;
        written.push(p);
        let mut buf = Vec::new();
        a.harmonic.write_csv(&mut buf).expect("writing to memory");
        let p = dir.join("harmonic.csv");
        write_atomic(&p, &buf)?;
        written.push(p);
    }
    if matches!(format, OutputFormat::Json | OutputFormat::Both) {
        let p = dir.join("report.json");
        write_atomic(&p, &to_json(&a.report))?;
        written.push(p);
    }
    Ok(written)
}

pub fn cmd_analyze(cfg: &RunConfig) -> Result<Analysis, CliError> {
    if cfg.samples < helixlab_core::curve::MIN_SAMPLES {
        return Err(CliError::Input(format!(
            "--samples must be at least {}",
            helixlab_core::curve::MIN_SAMPLES
        )));
    }
    let problem = resolve(cfg, &Manifest::builtin())?;
    let analysis = run_pipeline(&problem, cfg.samples, cfg.jet_mode, &cfg.tolerances)?;
    write_outputs(&analysis, &cfg.output, cfg.format)?;
    Ok(analysis)
}

pub fn verdict_exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::SlantHelix => 0,
        Verdict::NotSlant => 1,
        Verdict::HypothesisFailed(_) => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use helixlab_core::Hypothesis;

    #[test]
    fn exit_mapping_is_total() {
        assert_eq!(verdict_exit_code(Verdict::SlantHelix), 0);
        assert_eq!(verdict_exit_code(Verdict::NotSlant), 1);
        assert_eq!(verdict_exit_code(Verdict::HypothesisFailed(Hypothesis::Eikonal)), 2);
        assert_eq!(verdict_exit_code(Verdict::HypothesisFailed(Hypothesis::Parallel)), 2);
        assert_eq!(CliError::Compute(helixlab_core::GeomError::EmptyInput).exit_code(), 3);
        assert_eq!(CliError::Input("x".into()).exit_code(), 4);
        assert_eq!(CliError::UnknownEntry("x".into()).exit_code(), 4);
    }

    #[test]
    fn metric_sources() {
        assert_eq!(parse_metric("-1,1,1", 3).unwrap(), SignatureMetric::minkowski(3));
        assert_eq!(parse_metric("diag(-1, 1, 1)", 3).unwrap(), SignatureMetric::minkowski(3));
        assert_eq!(parse_metric(r#"{"signs": [1, 1, 1]}"#, 3).unwrap(), SignatureMetric::euclidean(3));
        assert_eq!(parse_metric("euclidean", 4).unwrap(), SignatureMetric::euclidean(4));
        assert!(parse_metric("1,0,1", 3).is_err());
        assert!(matches!(parse_metric("/no/such/metric.json", 3), Err(CliError::Io { .. })));
    }

    #[test]
    fn resolution_defaults_from_gallery() {
        let m = Manifest::builtin();
        let p = resolve(&RunConfig::new("minkowski_helix", "out"), &m).unwrap();
        assert_eq!(p.metric, SignatureMetric::minkowski(3));
        assert_eq!(p.field.differential_at(&[0.0; 3]), vec![1.0, 0.0, 0.0]);

        let mut cfg = RunConfig::new(r#"{"dim": 3, "family": "euclid_helix", "params": {"a": 1, "b": 1}, "domain": [0, 1]}"#, "out");
        assert!(matches!(resolve(&cfg, &m), Err(CliError::Input(_))));
        cfg.field = Some("quadratic_x1".into());
        assert_eq!(resolve(&cfg, &m).unwrap().field.label(), "quadratic_x1");
        cfg.metric = Some("1,1,1,1".into());
        assert!(matches!(resolve(&cfg, &m), Err(CliError::Input(_))));
    }

    #[test]
    fn rtol_override() {
        std::env::set_var(RTOL_ENV, "1e-3");
        assert_eq!(tolerances_from_env(JetMode::Analytic).unwrap().rtol, 1e-3);
        std::env::set_var(RTOL_ENV, "abc");
        assert!(tolerances_from_env(JetMode::Analytic).is_err());
        std::env::remove_var(RTOL_ENV);
        assert_eq!(tolerances_from_env(JetMode::FiniteDifference).unwrap().rtol, 1e-4);
    }
}
