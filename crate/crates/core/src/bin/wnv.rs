use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wnv_core::harness::{self, output, ConfigMap, RunConfig};
use wnv_core::Error;

#[derive(Parser)]
#[command(name = "wnv", version, about = "West Nile virus free-boundary simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one configuration and write trajectory, snapshots and summary.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Repeat a run over values of one parameter.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        param: String,
        /// Comma-separated values; may be empty.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Print closed-form thresholds and the numeric eigenvalue check.
    Thresholds {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Compute the free-boundary wave speed c_nu.
    Wavespeed {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn out_dir(flag: Option<PathBuf>, cfg: &RunConfig) -> PathBuf {
    flag.or_else(|| cfg.out_dir.clone()).unwrap_or_else(|| PathBuf::from("out"))
}

fn parse_values(text: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Error::Config(format!("--values: bad number `{s}`"))))
        .collect()
}

fn run(config: &Path, flag: Option<PathBuf>) -> Result<(), Error> {
    let cfg = RunConfig::load(config)?;
    let dir = out_dir(flag, &cfg);
    let mut report = harness::run(&cfg)?;
    output::write_run(&mut report, &dir)?;
    let s = &report.summary;
    println!(
        "verdict = {}  t_decided = {}  g = {:.6}  h = {:.6}  steps = {}",
        s.outcome.verdict,
        s.outcome.t_decided.map_or("-".into(), |t| format!("{t:.3}")),
        s.final_g,
        s.final_h,
        s.steps
    );
    if let Some(sp) = &s.speeds {
        println!("left_speed = {:.6}  right_speed = {:.6}", sp.left_speed, sp.right_speed);
    }
    if let Some(w) = &s.wave {
        println!("c_nu = {:.6}", w.c_nu);
    }
    for w in &s.warnings {
        eprintln!("warning: {w}");
    }
    println!("wrote {} files to {}", s.files.len(), dir.display());
    Ok(())
}

fn sweep(config: &Path, param: &str, values: &str, jobs: usize, flag: Option<PathBuf>) -> Result<bool, Error> {
    let map = ConfigMap::load(config)?;
    let cfg = RunConfig::from_map(&map)?;
    let values = parse_values(values)?;
    let dir = out_dir(flag, &cfg);
    let table = harness::sweep(&map, param, &values, jobs)?;
    output::write_sweep(&table, &dir)?;
    print!("{}", output::sweep_csv(&table));
    let failures = table.failures();
    if failures > 0 {
        eprintln!("{failures} of {} runs failed", table.rows.len());
    }
    Ok(failures == 0)
}

fn thresholds(config: &Path, flag: Option<PathBuf>) -> Result<(), Error> {
    let cfg = RunConfig::load(config)?;
    let report = harness::report_thresholds(&cfg)?;
    print!("{}", output::thresholds_text(&report));
    if let Some(dir) = flag {
        output::write_thresholds(&report, &dir)?;
    }
    Ok(())
}

fn wavespeed(config: &Path, flag: Option<PathBuf>) -> Result<(), Error> {
    let cfg = RunConfig::load(config)?;
    let report = harness::report_wavespeed(&cfg)?;
    println!("nu = {}  c_nu = {:.6}  u'(0) = {:.6}", report.nu, report.c_nu, report.uprime0);
    if let Some(c) = report.c_upper {
        println!("no admissible profile at c = {c:.6}");
    }
    output::write_wave(&report, &out_dir(flag, &cfg))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out_dir } => run(&config, out_dir).map(|_| true),
        Command::Sweep {
            config,
            param,
            values,
            jobs,
            out_dir,
        } => sweep(&config, &param, &values, jobs, out_dir),
        Command::Thresholds { config, out_dir } => thresholds(&config, out_dir).map(|_| true),
        Command::Wavespeed { config, out_dir } => wavespeed(&config, out_dir).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
