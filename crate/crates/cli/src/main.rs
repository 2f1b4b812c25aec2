use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use isotube::report::{
    cmd_analyze, cmd_classify, cmd_sweep, cmd_verify, parse_config, render_classify, render_tube_report,
    render_verify, AnalysisConfig, FaultInjection, OutputFormat, ReportError, VerifySettings, DEFAULT_SEED,
    DEFAULT_TOL,
};

#[derive(Parser)]
#[command(name = "isotube", version, about = "Isoparametric tubes in complex hyperbolic space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Command {
    /// Per-sample tube analysis at every configured radius.
    Analyze {
        #[arg(long)]
        config: PathBuf,
    },
    /// Radius sweep; same rows as `analyze`, grouped by radius.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Homogeneity classification of the tubes around W_w.
    Classify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Full invariant battery, or the configured subspace only.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fault {
    FlipShapeSign,
}

#[derive(Args)]
struct Common {
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, value_enum, hide = true)]
    inject_fault: Option<Fault>,
}

fn load(path: &Path, common: &Common) -> Result<AnalysisConfig, ReportError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ReportError::Config(format!("{}: {e}", path.display())))?;
    let mut config = parse_config(&text).map_err(|e| match e {
        ReportError::Config(msg) => ReportError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })?;
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(tol) = common.tol {
        config.tol = tol;
    }
    Ok(config)
}

fn output_format(common: &Common, config: Option<&AnalysisConfig>) -> OutputFormat {
    match common.format {
        Some(Format::Json) => OutputFormat::Json,
        Some(Format::Csv) => OutputFormat::Csv,
        None => config.map(|c| c.output_format).unwrap_or_default(),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), ReportError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| ReportError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Returns whether the run passed.
fn run(cli: &Cli) -> Result<bool, ReportError> {
    let common = &cli.common;
    if let Some(tol) = common.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(ReportError::Config(format!("--tol must be positive, got {tol}")));
        }
    }
    let faults = FaultInjection {
        flip_shape_sign: matches!(common.inject_fault, Some(Fault::FlipShapeSign)),
    };
    let out = common.out.as_deref();
    match &cli.command {
        Command::Analyze { config } | Command::Sweep { config } => {
            let config = load(config, common)?;
            config.sorted_radii()?;
            let report = if matches!(cli.command, Command::Sweep { .. }) {
                cmd_sweep(&config, faults)?
            } else {
                cmd_analyze(&config, faults)?
            };
            emit(&render_tube_report(&report, output_format(common, Some(&config)))?, out)?;
            if !report.summary.passed {
                eprintln!("isotube: residuals exceed tol = {:e}", config.tol);
            }
            Ok(report.summary.passed)
        }
        Command::Classify { config } => {
            let config = load(config, common)?;
            let report = cmd_classify(&config)?;
            emit(&render_classify(&report, output_format(common, Some(&config)))?, out)?;
            Ok(true)
        }
        Command::Verify { config } => {
            let (settings, format) = match config {
                Some(path) => {
                    let config = load(path, common)?;
                    (VerifySettings::from_config(&config)?, output_format(common, Some(&config)))
                }
                None => (
                    VerifySettings::shipped(common.seed.unwrap_or(DEFAULT_SEED), common.tol.unwrap_or(DEFAULT_TOL)),
                    output_format(common, None),
                ),
            };
            let report = cmd_verify(&settings, faults)?;
            for s in &report.suites {
                eprintln!(
                    "{:<28} {:>6} checks {:>5} failures  worst {:.3e}  tol {:.1e}  {}",
                    s.suite,
                    s.checks,
                    s.failures,
                    s.worst_residual.0,
                    s.tol.0,
                    if s.passed { "ok" } else { "FAIL" }
                );
            }
            emit(&render_verify(&report, format)?, out)?;
            Ok(report.passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("isotube: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
