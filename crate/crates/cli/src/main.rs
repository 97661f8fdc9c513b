use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use viscoflux::runner::{
    blowup_command, execute, expand, paths_command, render_table, run_check, run_sweep, ExecuteOptions, RunConfig,
    SetOverride,
};
use viscoflux::Error;

#[derive(Parser)]
#[command(name = "viscoflux", version, about = "Radial compressible flow with density-dependent viscosity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and write its outputs and manifest.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to `output.dir` of the config.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        snapshot_every: Option<usize>,
    },
    /// Run the built-in acceptance suite.
    Check {
        /// Where to write `check_report.txt`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Criterion ids to run (all when omitted).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
    /// Run many configurations concurrently.
    Sweep {
        /// Glob of config files.
        #[arg(long)]
        config: String,
        #[arg(long)]
        out: PathBuf,
        /// `key=v1,v2,...`; repeated flags form a Cartesian product.
        #[arg(long = "set")]
        sets: Vec<String>,
        #[arg(long, env = "VISCOFLUX_JOBS")]
        jobs: Option<usize>,
        #[arg(long)]
        snapshot_every: Option<usize>,
    },
    /// Particle paths and interfaces through the velocities of a finished run.
    Paths {
        /// Run directory.
        #[arg(long)]
        run: PathBuf,
        /// Defaults to the run directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<f64>>,
    },
    /// Blow-up report from a run directory or a parameter file.
    Blowup {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } | Error::Hypothesis { .. } | Error::Json(_) | Error::Unsupported(_) => 2,
        Error::Integrity(_) | Error::Domain(_) => 3,
        Error::Io { .. } => 1,
    }
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_code(&e))
}

fn verdict(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn run_cmd(config: &Path, out: Option<PathBuf>, snapshot_every: Option<usize>) -> Result<bool, Error> {
    let cfg = RunConfig::load(config)?;
    let dir = out
        .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
        .ok_or_else(|| Error::config("output.dir", "no output directory: pass --out or set output.dir"))?;
    let rep = execute(&cfg, &dir, &ExecuteOptions { snapshot_every })?;
    for (name, c) in &rep.summary.checks {
        let mark = if c.pass { "pass" } else { "FAIL" };
        println!("{mark} {name} = {:.6e} (tol {:.3e})", c.value, c.tolerance);
    }
    println!("wrote {} files to {}", rep.manifest.files.len(), dir.display());
    Ok(rep.passed())
}

fn check_cmd(out: Option<PathBuf>, only: &[u8]) -> Result<bool, Error> {
    let outcomes = run_check(only);
    let table = render_table(&outcomes);
    print!("{table}");
    if let Some(dir) = out {
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let path = dir.join("check_report.txt");
        fs::write(&path, &table).map_err(|e| Error::io(&path, e))?;
    }
    Ok(outcomes.iter().all(|o| o.passed()))
}

fn sweep_cmd(
    pattern: &str,
    out: &Path,
    sets: &[String],
    jobs: Option<usize>,
    snapshot_every: Option<usize>,
) -> Result<bool, Error> {
    let sets = sets.iter().map(|s| SetOverride::parse(s)).collect::<Result<Vec<_>, _>>()?;
    let items = expand(pattern, &sets)?;
    let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let summary = run_sweep(&items, out, jobs, &ExecuteOptions { snapshot_every })?;
    for r in &summary.runs {
        println!("{:<5} {}{}", r.status, r.name, r.error.as_deref().map(|e| format!(": {e}")).unwrap_or_default());
    }
    for p in &summary.delta_pairs {
        println!(
            "delta {:e}/{:e}: peak ratio {:.4} vs delta ratio {:.4} ({})",
            p.delta[0],
            p.delta[1],
            p.peak_ratio,
            p.delta_ratio,
            if p.proportional { "proportional" } else { "not proportional" }
        );
    }
    Ok(summary.all_pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Run {
            config,
            out,
            snapshot_every,
        } => run_cmd(&config, out, snapshot_every),
        Command::Check { out, only } => check_cmd(out, &only),
        Command::Sweep {
            config,
            out,
            sets,
            jobs,
            snapshot_every,
        } => sweep_cmd(&config, &out, &sets, jobs, snapshot_every),
        Command::Paths { run, out, seeds } => {
            let out = out.unwrap_or_else(|| run.clone());
            paths_command(&run, &out, seeds).map(|rep| {
                println!("min gap {:.6e}, ordered: {}", rep.ordering.min_gap, rep.ordering.ordered());
                rep.ordering.ordered()
            })
        }
        Command::Blowup { config, out } => {
            let out = out.unwrap_or_else(|| if config.is_dir() { config.clone() } else { PathBuf::from(".") });
            blowup_command(&config, &out).map(|rep| {
                println!("{}", serde_json::to_string_pretty(&rep.lifespan.t_star).unwrap_or_default());
                true
            })
        }
    };
    match res {
        Ok(ok) => verdict(ok),
        Err(e) => fail(e),
    }
}
