use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use xxchain_cli::config::{preset, Overrides, RawConfig, Setup, SweepVariable, PRESETS};
use xxchain_cli::state::{
    concurrence_report, flows_report, modes_report, print_state, StateFormat,
};
use xxchain_cli::sweep::{run_sweep, SweepConfig};
use xxchain_cli::verify::{run_verify, VerifyOptions};
use xxchain_cli::CliError;

/// Steady state, transport and entanglement of the open XX chain between two baths.
#[derive(Parser)]
#[command(name = "xxchain", version)]
struct Cli {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    overrides: OverrideArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// TOML configuration file.
    #[arg(long, global = true, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in figure recipe (see `xxchain presets`).
    #[arg(long, global = true)]
    preset: Option<String>,
}

#[derive(Args)]
struct OverrideArgs {
    /// Number of sites.
    #[arg(long, short = 'n', global = true)]
    sites: Option<usize>,
    /// Transverse field Δ.
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// Hopping g (replaces a fraction from the config).
    #[arg(long, global = true, conflicts_with = "fraction")]
    g: Option<f64>,
    /// Hopping as a fraction of the saturation bound.
    #[arg(long, global = true)]
    fraction: Option<f64>,
    #[arg(long, global = true)]
    temp_left: Option<f64>,
    #[arg(long, global = true)]
    temp_right: Option<f64>,
    /// Bath coupling λ.
    #[arg(long, global = true)]
    lambda: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Mode frequencies and end-site amplitudes.
    Modes,
    /// Stationary state as factors, sector traces or a dense matrix.
    Steady {
        #[arg(long, value_enum, default_value = "factors")]
        format: StateFormat,
    },
    /// Sink/source terms per site and heat flows.
    Flows,
    /// X-state coefficients and concurrence for site pairs.
    Concurrence {
        /// Pair "r,s" (1-based); repeatable. Defaults to every pair.
        #[arg(long = "pair", value_parser = parse_pair)]
        pairs: Vec<(usize, usize)>,
        /// Maximize over T_R instead of evaluating at the configured T_R.
        #[arg(long)]
        max: bool,
        /// T_R bracket "lo,hi" for --max.
        #[arg(long, value_parser = parse_bracket, default_value = "0,50")]
        bracket: (f64, f64),
        /// Scan points before the golden-section refinement.
        #[arg(long, default_value_t = 201)]
        grid: usize,
    },
    /// Grid sweep written as CSV.
    Sweep {
        #[arg(long, value_enum)]
        variable: Option<SweepVariable>,
        #[arg(long)]
        start: Option<f64>,
        #[arg(long)]
        stop: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        /// Output file (stdout by default).
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Brute-force Liouvillian checks on seeded random draws.
    Verify {
        #[arg(long, default_value_t = 4)]
        max_n: usize,
        #[arg(long, default_value_t = 20)]
        draws: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Perturb the analytic state; the run must then fail.
        #[arg(long)]
        corrupt: bool,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List the built-in presets.
    Presets,
}

fn parse_two<T: std::str::FromStr>(s: &str) -> Result<(T, T), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected two comma-separated values, got {s:?}"))?;
    let p = |x: &str| {
        x.trim()
            .parse::<T>()
            .map_err(|_| format!("cannot parse {x:?}"))
    };
    Ok((p(a)?, p(b)?))
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (r, s) = parse_two::<usize>(s)?;
    if r == 0 || s <= r {
        return Err(format!("pair needs 1 <= r < s, got {r},{s}"));
    }
    Ok((r - 1, s - 1))
}

fn parse_bracket(s: &str) -> Result<(f64, f64), String> {
    parse_two(s)
}

type GridArgs = (
    Option<SweepVariable>,
    Option<f64>,
    Option<f64>,
    Option<usize>,
);

fn load(cli: &Cli, sweep: Option<GridArgs>) -> Result<RawConfig, CliError> {
    let mut raw = match (&cli.source.config, &cli.source.preset) {
        (Some(path), _) => RawConfig::load(path)?,
        (None, Some(name)) => preset(name)?,
        (None, None) => RawConfig::default(),
    };
    let o = &cli.overrides;
    let (variable, start, stop, points) = sweep.unwrap_or_default();
    Overrides {
        n: o.sites,
        delta: o.delta,
        g: o.g,
        fraction: o.fraction,
        temp_left: o.temp_left,
        temp_right: o.temp_right,
        lambda: o.lambda,
        variable,
        start,
        stop,
        points,
    }
    .apply(&mut raw);
    Ok(raw)
}

fn threads(n: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = n {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(())
}

fn emit(text: &str) -> Result<(), CliError> {
    io::stdout().lock().write_all(text.as_bytes())?;
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Modes => emit(&modes_report(&Setup::from_raw(&load(cli, None)?)?)?),
        Command::Steady { format } => {
            emit(&print_state(&Setup::from_raw(&load(cli, None)?)?, *format)?)
        }
        Command::Flows => emit(&flows_report(&Setup::from_raw(&load(cli, None)?)?)?),
        Command::Concurrence {
            pairs,
            max,
            bracket,
            grid,
        } => {
            let setup = Setup::from_raw(&load(cli, None)?)?;
            emit(&concurrence_report(
                &setup,
                pairs,
                max.then_some((*bracket, *grid)),
            )?)
        }
        Command::Sweep {
            variable,
            start,
            stop,
            points,
            output,
            threads: t,
        } => {
            threads(*t)?;
            let raw = load(cli, Some((*variable, *start, *stop, *points)))?;
            let cfg = SweepConfig::from_raw(&raw)?;
            let summary = match output {
                Some(path) => {
                    let mut file = io::BufWriter::new(std::fs::File::create(path)?);
                    let s = run_sweep(&cfg, &mut file)?;
                    file.flush()?;
                    s
                }
                None => run_sweep(&cfg, &mut io::stdout().lock())?,
            };
            eprintln!("{} rows, {} skipped", summary.rows, summary.skipped);
            Ok(())
        }
        Command::Verify {
            max_n,
            draws,
            seed,
            corrupt,
            threads: t,
        } => {
            threads(*t)?;
            let start = Instant::now();
            let report = run_verify(VerifyOptions {
                max_n: *max_n,
                draws: *draws,
                seed: *seed,
                corrupt: *corrupt,
            })?;
            emit(&report.render())?;
            eprint!("{}", report.render_timings());
            eprintln!("total {:.2}s", start.elapsed().as_secs_f64());
            if report.passed() {
                Ok(())
            } else {
                let failed = report.checks.iter().filter(|c| !c.passed).count();
                Err(CliError::Verification(format!("{failed} checks failed")))
            }
        }
        Command::Presets => {
            let mut s = String::new();
            for p in PRESETS {
                s += &format!("{}\t{}\n", p.name, p.summary);
            }
            emit(&s)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("xxchain: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
