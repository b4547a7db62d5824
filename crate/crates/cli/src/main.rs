use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chiral_core::propagator::Engine;
use chiral_core::selfcheck;
use chiral_core::sweep::{self, recipes, AxisConfig, Mode, RunConfig, SweepResult};
use chiral_core::Error;

const EXIT_FAILURE: u8 = 1;
const EXIT_TRUNCATION: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[derive(Parser)]
#[command(
    name = "chiral",
    version,
    about = "Rotational excitation of diatomics by chiral pulse trains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// (τ, δ) map: CSV, heatmaps, resonance-line overlay and manifest.
    Sweep(RunArgs),
    /// τ scan (one or more δ, one or more species): CSV and manifest.
    Scan(RunArgs),
    /// One (τ, δ) point, printed as a table.
    Single {
        #[command(flatten)]
        run: RunArgs,
        /// ps
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<f64>,
        /// rad
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<f64>,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Resonance lines over the grid of a config, without simulating.
    Lines(RunArgs),
    /// Compare production code paths against the reference implementations.
    Selfcheck {
        /// Smaller oracle sizes.
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML config, or a manifest.json of an earlier run.
    #[arg(short, long, conflicts_with = "recipe")]
    config: Option<PathBuf>,
    /// Built-in recipe (fig4, fig6, fig7, fig8, fig9, fig10).
    #[arg(long)]
    recipe: Option<String>,
    /// Output directory (overrides the config).
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Worker threads, 0 = all cores.
    #[arg(short, long)]
    workers: Option<usize>,
    /// sudden | ode
    #[arg(long)]
    engine: Option<Engine>,
    /// Basis truncation level.
    #[arg(long)]
    level_max: Option<i32>,
    /// Outer-shell population above which a cell fails.
    #[arg(long)]
    truncation_limit: Option<f64>,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig, Error> {
        let mut cfg = match (&self.config, &self.recipe) {
            (Some(path), _) => RunConfig::load(path)?,
            (None, Some(name)) => recipes::by_name(name)?,
            (None, None) => return Err(Error::Config("give --config or --recipe".into())),
        };
        if let Some(dir) = &self.out {
            cfg.output.dir = dir.clone();
        }
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        if let Some(e) = self.engine {
            cfg.engine = e;
        }
        if self.level_max.is_some() {
            cfg.level_max = self.level_max;
        }
        if self.truncation_limit.is_some() {
            cfg.truncation_limit = self.truncation_limit;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_truncation() {
        EXIT_TRUNCATION
    } else if e.is_config() {
        EXIT_CONFIG
    } else {
        EXIT_FAILURE
    }
}

/// Writes whatever the run produced, then reports a failed cell.
fn finish(result: SweepResult, write: bool) -> Result<(), Error> {
    if write {
        let manifest = sweep::write_outputs(&result, &result.config.output.dir)?;
        eprintln!(
            "{} of {} cells in {:.1} s on {} workers; manifest {}",
            result.cells.len(),
            result.expected_cells(),
            result.wall_time,
            result.workers,
            manifest.display()
        );
    }
    result.check().map(drop)
}

fn print_single(result: &SweepResult, json: bool) {
    for cell in &result.cells {
        let sp = &result.species[cell.species];
        let r = &cell.report;
        if json {
            println!(
                "{}",
                serde_json::to_string_pretty(cell).expect("report serializes")
            );
            continue;
        }
        println!(
            "{}  tau = {} ps  delta = {} rad",
            sp.name, cell.tau, cell.delta
        );
        println!("{:>6} {:>22} {:>22}", "level", "Q", "epsilon");
        for level in sweep::reported_levels(&result.config.levels, &sp.molecule, sp.level_max) {
            let eps = r
                .epsilon(level)
                .map_or("undefined".into(), |e| format!("{e:.15e}"));
            println!("{level:>6} {:>22.15e} {eps:>22}", r.q(level));
        }
        println!(
            "Jz = {:.15e}  E_abs = {:.15e} rad/ps",
            r.jz, r.energy_absorbed
        );
    }
}

/// Exit code of a run that did not error.
fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Sweep(args) => finish(sweep::run(&args.config()?, Mode::Sweep)?, true).map(|_| 0),
        Command::Scan(args) => finish(sweep::run(&args.config()?, Mode::Scan)?, true).map(|_| 0),
        Command::Single {
            run,
            tau,
            delta,
            json,
        } => {
            let mut cfg = run.config()?;
            if let Some(t) = tau {
                cfg.tau = AxisConfig::Value(t);
            }
            if let Some(d) = delta {
                cfg.delta = AxisConfig::Value(d);
            }
            let result = sweep::run(&cfg, Mode::Single)?;
            print_single(&result, json);
            finish(result, run.out.is_some()).map(|_| 0)
        }
        Command::Lines(args) => {
            let cfg = args.config()?;
            let result = sweep::prepare(&cfg)?;
            std::fs::create_dir_all(&cfg.output.dir)?;
            let path = cfg.output.dir.join(sweep::LINES_FILE);
            let n = sweep::write_lines(&result, &path)?;
            eprintln!("{n} line points; {}", path.display());
            Ok(0)
        }
        Command::Selfcheck { quick } => {
            let results = selfcheck::run_all(quick)?;
            for r in &results {
                println!("{r}");
            }
            Ok(if results.iter().all(selfcheck::CheckResult::passed) {
                0
            } else {
                EXIT_FAILURE
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
