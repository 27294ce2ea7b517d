use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nomasec::analytic_an::{sop_m_an, sop_m_inf, sop_n_an, sop_n_inf, sop_pair_an, sop_pair_inf};
use nomasec::analytic_siso::{sop_m, sop_m_asym, sop_n, sop_n_asym, sop_pair, sop_pair_asym, table_for};
use nomasec::simulator::{an_draws, run_an_with_workers, run_siso_with_workers, siso_outcomes, write_outcomes_csv};
use nomasec::{Method, SopEstimate};
use nomasec_cli::config::{parse_grid, parse_method, Target};
use nomasec_cli::validate::{all_pass, table, validate_an, validate_siso, ValidateOptions};
use nomasec_cli::{parse_config, run_sweep, CliError, CliResult, Scenario, SweepSpec};

const DEFAULT_TRIALS: u64 = 1_000_000;
const DEFAULT_SEED: u64 = 1;

#[derive(Parser)]
#[command(name = "nomasec", version, about = "Secrecy outage of NOMA downlinks with Poisson eavesdroppers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form SOPs for one configuration.
    Analytic {
        #[arg(long)]
        config: PathBuf,
    },
    /// Monte Carlo SOPs for one configuration.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        /// Write per-trial SINRs and outage flags to this CSV.
        #[arg(long)]
        samples: Option<PathBuf>,
    },
    /// Sweeps one parameter and writes a CSV row per grid point.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        param: Option<String>,
        /// `start:stop:step` or a comma list.
        #[arg(long)]
        grid: Option<String>,
        /// Comma list from m, n, pair.
        #[arg(long)]
        outputs: Option<String>,
        /// Comma list from analytic, asymptotic, monte_carlo.
        #[arg(long)]
        methods: Option<String>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compares closed forms with simulation and prints a pass/fail table.
    Validate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Negative control: drop the 1/2 factor from the Chebyshev table.
        #[arg(long)]
        corrupt_chebyshev: bool,
    },
    /// Renders CSV columns as an SVG line chart.
    Plot {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value = "value")]
        x: String,
        /// Comma list of column names.
        #[arg(long)]
        y: String,
        #[arg(long)]
        log_y: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

fn print_estimates(rows: &[(&str, &str, nomasec::Result<SopEstimate>)]) {
    println!("{:<6} {:<12} {:>14} {:>12}", "target", "method", "sop", "stderr");
    for (t, m, r) in rows {
        match r {
            Ok(e) => println!("{t:<6} {m:<12} {:>14.6e} {:>12.3e}", e.value, e.stderr),
            Err(err) => println!("{t:<6} {m:<12} error: {err}"),
        }
    }
}

fn cmd_analytic(config: &Path) -> CliResult<()> {
    let file = parse_config(config)?;
    let rows = match &file.scenario {
        Scenario::Siso(c) => {
            let t = table_for(c)?;
            vec![
                ("m", "analytic", sop_m(c, &t)),
                ("n", "analytic", sop_n(c, &t)),
                ("pair", "analytic", sop_pair(c, &t)),
                ("m", "asymptotic", sop_m_asym(c)),
                ("n", "asymptotic", sop_n_asym(c)),
                ("pair", "asymptotic", sop_pair_asym(c)),
            ]
        }
        Scenario::An(c) => vec![
            ("m", "analytic", sop_m_an(c)),
            ("n", "analytic", sop_n_an(c)),
            ("pair", "analytic", sop_pair_an(c)),
            ("m", "asymptotic", sop_m_inf(c)),
            ("n", "asymptotic", sop_n_inf(c)),
            ("pair", "asymptotic", sop_pair_inf(c)),
        ],
    };
    print_estimates(&rows);
    if let Some((_, _, Err(e))) = rows.iter().take(3).find(|r| r.2.is_err()) {
        return Err(CliError::Numerical(e.to_string()));
    }
    Ok(())
}

fn cmd_simulate(config: &Path, trials: u64, seed: u64, workers: Option<usize>, samples: Option<&Path>) -> CliResult<()> {
    let file = parse_config(config)?;
    let report = match &file.scenario {
        Scenario::Siso(c) => run_siso_with_workers(c, trials, seed, workers)?,
        Scenario::An(c) => run_an_with_workers(c, trials, seed, workers)?,
    };
    print_estimates(&[
        ("m", "monte_carlo", Ok(report.sop_m)),
        ("n", "monte_carlo", Ok(report.sop_n)),
        ("pair", "monte_carlo", Ok(report.sop_pair)),
    ]);
    println!("trials {} seed {} elapsed {:.2}s", report.trials, report.seed, report.elapsed);
    if let Some(path) = samples {
        let outcomes = match &file.scenario {
            Scenario::Siso(c) => siso_outcomes(c, trials, seed)?,
            Scenario::An(c) => an_draws(c, trials, seed)?.into_iter().map(|d| d.outcome).collect(),
        };
        let f = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
        let mut w = std::io::BufWriter::new(f);
        write_outcomes_csv(&outcomes, &mut w).map_err(|e| CliError::io(path, e))?;
        w.flush().map_err(|e| CliError::io(path, e))?;
    }
    Ok(())
}

fn list<T>(s: &str, what: &str, f: impl Fn(&str) -> Option<T>) -> CliResult<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| f(p).ok_or_else(|| CliError::Config(format!("unknown {what} '{p}'"))))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    config: &Path,
    param: Option<String>,
    grid: Option<String>,
    outputs: Option<String>,
    methods: Option<String>,
    trials: Option<u64>,
    seed: Option<u64>,
    workers: Option<usize>,
    out: &Path,
) -> CliResult<()> {
    let file = parse_config(config)?;
    let keys = file.sweep;
    let parameter = param.or(keys.parameter).ok_or_else(|| CliError::Config("no sweep parameter (--param)".into()))?;
    let grid = match grid {
        Some(g) => parse_grid(&g).map_err(CliError::Config)?,
        None => keys.grid.ok_or_else(|| CliError::Config("no sweep grid (--grid)".into()))?,
    };
    let targets = match outputs {
        Some(s) => list(&s, "output", Target::parse)?,
        None => keys.targets.unwrap_or_else(|| vec![Target::M, Target::N, Target::Pair]),
    };
    let methods = match methods {
        Some(s) => list(&s, "method", parse_method)?,
        None => keys.methods.unwrap_or_else(|| vec![Method::Analytic]),
    };
    let spec = SweepSpec { parameter, grid, base: file.scenario, targets, methods };
    let trials = trials.or(keys.trials).unwrap_or(DEFAULT_TRIALS);
    let seed = seed.or(keys.seed).unwrap_or(DEFAULT_SEED);
    let failed = run_sweep(&spec, trials, seed, workers, out)?;
    println!("wrote {} rows to {}", spec.grid.len(), out.display());
    if failed > 0 {
        eprintln!("warning: {failed} row(s) carry errors; see the error column");
    }
    Ok(())
}

fn cmd_validate(config: &Path, trials: u64, seed: u64, corrupt: bool) -> CliResult<()> {
    let file = parse_config(config)?;
    let opts = ValidateOptions { trials, seed, corrupt_chebyshev: corrupt };
    let checks = match &file.scenario {
        Scenario::Siso(c) => validate_siso(c, &opts)?,
        Scenario::An(c) => {
            if corrupt {
                return Err(CliError::Config("--corrupt-chebyshev applies to the siso scenario only".into()));
            }
            validate_an(c, &opts)?
        }
    };
    print!("{}", table(&checks));
    if all_pass(&checks) {
        Ok(())
    } else {
        let n = checks.iter().filter(|c| c.status == nomasec_cli::validate::Status::Fail).count();
        Err(CliError::Validation(format!("{n} check(s) failed")))
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.cmd {
        Cmd::Analytic { config } => cmd_analytic(&config),
        Cmd::Simulate { config, trials, seed, workers, samples } => cmd_simulate(
            &config,
            trials.unwrap_or(DEFAULT_TRIALS),
            seed.unwrap_or(DEFAULT_SEED),
            workers,
            samples.as_deref(),
        ),
        Cmd::Sweep { config, param, grid, outputs, methods, trials, seed, workers, out } => {
            cmd_sweep(&config, param, grid, outputs, methods, trials, seed, workers, &out)
        }
        Cmd::Validate { config, trials, seed, corrupt_chebyshev } => {
            cmd_validate(&config, trials.unwrap_or(DEFAULT_TRIALS), seed.unwrap_or(DEFAULT_SEED), corrupt_chebyshev)
        }
        Cmd::Plot { csv, x, y, log_y, out } => {
            let cols: Vec<String> = y.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
            for w in nomasec_cli::svg::render_svg(&csv, &x, &cols, log_y, &out)? {
                eprintln!("warning: {w}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
