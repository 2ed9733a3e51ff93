use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use helixlab::verify::write_verify_outputs;
use helixlab::{cmd_analyze, cmd_verify, gallery, tolerances_from_env, verdict_exit_code, CliError, Manifest, OutputFormat, RunConfig};
use helixlab_core::JetMode;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Jets {
    Analytic,
    Fd,
}

impl From<Jets> for JetMode {
    fn from(j: Jets) -> Self {
        match j {
            Jets::Analytic => JetMode::Analytic,
            Jets::Fd => JetMode::FiniteDifference,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "helixlab", version, about = "Frenet frames, harmonic curvatures and slant-helix detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analyse one curve against one scalar field.
    Analyze {
        /// Gallery entry, named curve, inline JSON or path to a curve file.
        #[arg(long)]
        curve: String,
        /// Builtin field name, inline JSON or path; gallery entries supply a default.
        #[arg(long)]
        field: Option<String>,
        /// Signs such as `-1,1,1`, inline JSON, `euclidean`, `minkowski` or path.
        #[arg(long, allow_hyphen_values = true)]
        metric: Option<String>,
        #[arg(long, default_value_t = 201)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Jets::Analytic)]
        jets: Jets,
        #[arg(long, default_value = "helixlab-out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Both)]
        format: OutputFormat,
    },
    /// Check every gallery entry against its expected verdict and bounds.
    Verify {
        #[arg(long)]
        only: Option<String>,
        /// Also write per-entry reports here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List gallery curves, fields and expected verdicts.
    Gallery,
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Analyze {
            curve,
            field,
            metric,
            samples,
            jets,
            out,
            format,
        } => {
            let jet_mode = JetMode::from(jets);
            let cfg = RunConfig {
                field,
                metric,
                samples,
                jet_mode,
                tolerances: tolerances_from_env(jet_mode)?,
                format,
                ..RunConfig::new(curve, out)
            };
            let a = cmd_analyze(&cfg)?;
            let verdict = a.report.report.verdict;
            println!("{}: {verdict}", a.report.curve);
            Ok(verdict_exit_code(verdict))
        }
        Command::Verify { only, out } => {
            let tol = tolerances_from_env(JetMode::Analytic)?;
            let manifest = Manifest::builtin();
            let outcome = cmd_verify(&manifest, only.as_deref(), &tol)?;
            print!("{}", outcome.render());
            if let Some(dir) = out {
                write_verify_outputs(&outcome, &dir)?;
            }
            Ok(if outcome.passed() { 0 } else { 1 })
        }
        Command::Gallery => {
            print!("{}", gallery::listing(&Manifest::builtin()));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { helixlab::error::EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
