use std::path::PathBuf;
use std::process::ExitCode;

use calvs_exp::error::{EXIT_ASSERTION, EXIT_CONFIG};
use calvs_exp::{execute, suites, Command, ExpError, ExperimentConfig};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "calvs", version, about = "Disagreement-based active learning experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Experiment config file (TOML).
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set case.0.class.k=3`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory; defaults to the config, then $CALVS_OUTPUT_DIR, then ./calvs-out.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run CAL and write per-step traces.
    RunCal(Common),
    /// Quantiles of the compression-set size.
    NhatQuantile(Common),
    /// Disagreement coefficient at each `r0`.
    Theta(Common),
    /// Quantiles of the version-space disagreement mass.
    DeltavsQuantile(Common),
    /// Quantiles of the CAL query count.
    NQuantile(Common),
    /// Closed-form bounds over `m` and `n_grid`.
    BoundsEval(Common),
    /// Run a packaged suite, with its own config unless one is given.
    Suite {
        name: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List packaged suites.
    List,
}

fn read(path: &PathBuf) -> Result<String, ExpError> {
    std::fs::read_to_string(path).map_err(|source| ExpError::Io {
        path: path.clone(),
        source,
    })
}

fn load(config: Option<PathBuf>, overrides: &[String]) -> Result<ExperimentConfig, ExpError> {
    let path = config.ok_or_else(|| ExpError::Config("a config file is required".into()))?;
    ExperimentConfig::parse(&read(&path)?, overrides)
        .map_err(|e| ExpError::Config(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<bool, ExpError> {
    let (cmd, cfg, out) = match cli.cmd {
        Cmd::List => {
            for s in suites::registry() {
                println!("{:<22}{}", s.name, s.about);
            }
            return Ok(true);
        }
        Cmd::Suite {
            name,
            config,
            overrides,
            out,
        } => {
            let info = suites::find(&name).ok_or_else(|| ExpError::Config(format!("unknown suite `{name}`")))?;
            let cfg = match config {
                Some(p) => load(Some(p), &overrides)?,
                None => ExperimentConfig::parse(info.default_config, &overrides)?,
            };
            (Command::Suite(name), cfg, out)
        }
        Cmd::RunCal(c) => (Command::RunCal, load(c.config, &c.overrides)?, c.out),
        Cmd::NhatQuantile(c) => (Command::NhatQuantile, load(c.config, &c.overrides)?, c.out),
        Cmd::Theta(c) => (Command::Theta, load(c.config, &c.overrides)?, c.out),
        Cmd::DeltavsQuantile(c) => (Command::DeltaVsQuantile, load(c.config, &c.overrides)?, c.out),
        Cmd::NQuantile(c) => (Command::NQuantile, load(c.config, &c.overrides)?, c.out),
        Cmd::BoundsEval(c) => (Command::BoundsEval, load(c.config, &c.overrides)?, c.out),
    };
    let report = execute(&cmd, &cfg)?;
    let dir = report.write(&cfg.output_dir(out))?;
    for c in &report.summary.checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        let rel = serde_json::to_string(&c.relation).unwrap_or_default();
        println!("{verdict} {} ({} {} {})", c.name, c.value, rel.trim_matches('"'), c.threshold);
    }
    println!("wrote {}", dir.display());
    Ok(report.summary.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_ASSERTION as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
