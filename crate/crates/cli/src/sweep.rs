//! Parameter sweeps written as CSV.
//!
//! Columns: `parameter,value`, then `sop_{target}_{method},stderr_{target}_{method}`
//! for every requested pair, then `error`. Analytic and asymptotic cells carry
//! stderr 0. A point that fails leaves its cells empty and records the reason in
//! `error`; the sweep itself still succeeds.

use std::path::Path;

use nomasec::analytic_an::{sop_m_an, sop_m_inf, sop_n_an, sop_n_inf, sop_pair_an, sop_pair_inf};
use nomasec::analytic_siso::{sop_m, sop_m_asym, sop_n, sop_n_asym, sop_pair, sop_pair_asym, table_for};
use nomasec::domain::db_to_linear;
use nomasec::simulator::{run_an, run_siso, RunReport};
use nomasec::{Method, SopEstimate};
use rayon::prelude::*;

use crate::config::{Scenario, Target};
use crate::error::{CliError, CliResult};

pub const SISO_PARAMS: &[&str] = &["rho_b_db", "rho_e_db", "r_p", "lambda_e", "alpha", "R_D", "K", "M"];
pub const AN_PARAMS: &[&str] = &["rho_t_db", "r_p", "lambda_e", "theta", "N_A", "alpha", "R_D1", "R_D2"];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: String,
    pub grid: Vec<f64>,
    pub base: Scenario,
    pub targets: Vec<Target>,
    pub methods: Vec<Method>,
}

impl SweepSpec {
    pub fn check(&self) -> CliResult<()> {
        let params = match self.base {
            Scenario::Siso(_) => SISO_PARAMS,
            Scenario::An(_) => AN_PARAMS,
        };
        if !params.contains(&self.parameter.as_str()) {
            return Err(CliError::Config(format!(
                "sweep parameter '{}' does not apply to scenario {} (allowed: {})",
                self.parameter,
                self.base.name(),
                params.join(", ")
            )));
        }
        if self.grid.is_empty() {
            return Err(CliError::Config("sweep grid is empty".into()));
        }
        let up = self.grid.windows(2).all(|w| w[1] > w[0]);
        let down = self.grid.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            return Err(CliError::Config("sweep grid must be strictly monotone".into()));
        }
        if self.targets.is_empty() || self.methods.is_empty() {
            return Err(CliError::Config("sweep needs at least one output and one method".into()));
        }
        Ok(())
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["parameter".to_string(), "value".to_string()];
        for t in &self.targets {
            for m in &self.methods {
                h.push(format!("sop_{}_{}", t.as_str(), m.as_str()));
                h.push(format!("stderr_{}_{}", t.as_str(), m.as_str()));
            }
        }
        h.push("error".into());
        h
    }
}

fn as_count(v: f64, name: &str) -> nomasec::Result<usize> {
    if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
        Ok(v as usize)
    } else {
        Err(nomasec::Error::InvalidConfig { field: "sweep", rule: format!("{name} must be a nonnegative integer") })
    }
}

/// The base configuration with `parameter` set to `value`, validated.
pub fn apply(base: &Scenario, parameter: &str, value: f64) -> nomasec::Result<Scenario> {
    let mut s = base.clone();
    match &mut s {
        Scenario::Siso(c) => match parameter {
            "rho_b_db" => c.rho_b = db_to_linear(value),
            "rho_e_db" => c.rho_e = db_to_linear(value),
            "r_p" => c.r_p = value,
            "lambda_e" => c.lambda_e = value,
            "alpha" => c.alpha = value,
            "R_D" => c.r_d = value,
            "K" => c.k = as_count(value, "K")?,
            "M" => c.users = as_count(value, "M")?,
            _ => unreachable!("checked by SweepSpec::check"),
        },
        Scenario::An(c) => match parameter {
            "rho_t_db" => c.p_t = db_to_linear(value),
            "r_p" => c.r_p = value,
            "lambda_e" => c.lambda_e = value,
            "theta" => c.theta = value,
            "N_A" => c.n_antennas = as_count(value, "N_A")?,
            "alpha" => c.alpha = value,
            "R_D1" => c.r_d1 = value,
            "R_D2" => c.r_d2 = value,
            _ => unreachable!("checked by SweepSpec::check"),
        },
    }
    s.validate()?;
    Ok(s)
}

/// Seed for grid point `index`; the same for every worker layout.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn pick(r: &RunReport, t: Target) -> SopEstimate {
    match t {
        Target::M => r.sop_m,
        Target::N => r.sop_n,
        Target::Pair => r.sop_pair,
    }
}

fn evaluate(s: &Scenario, t: Target, m: Method, mc: &mut Option<RunReport>, trials: u64, seed: u64) -> nomasec::Result<SopEstimate> {
    if m == Method::MonteCarlo {
        if mc.is_none() {
            *mc = Some(match s {
                Scenario::Siso(c) => run_siso(c, trials, seed)?,
                Scenario::An(c) => run_an(c, trials, seed)?,
            });
        }
        return Ok(pick(mc.as_ref().expect("just set"), t));
    }
    match (s, m) {
        (Scenario::Siso(c), Method::Analytic) => {
            let tab = table_for(c)?;
            match t {
                Target::M => sop_m(c, &tab),
                Target::N => sop_n(c, &tab),
                Target::Pair => sop_pair(c, &tab),
            }
        }
        (Scenario::Siso(c), _) => match t {
            Target::M => sop_m_asym(c),
            Target::N => sop_n_asym(c),
            Target::Pair => sop_pair_asym(c),
        },
        (Scenario::An(c), Method::Analytic) => match t {
            Target::M => sop_m_an(c),
            Target::N => sop_n_an(c),
            Target::Pair => sop_pair_an(c),
        },
        (Scenario::An(c), _) => match t {
            Target::M => sop_m_inf(c),
            Target::N => sop_n_inf(c),
            Target::Pair => sop_pair_inf(c),
        },
    }
}

fn fmt(v: f64) -> String {
    format!("{v:e}")
}

/// One CSV row per grid point, in grid order.
pub fn sweep_rows(spec: &SweepSpec, trials: u64, seed: u64) -> CliResult<Vec<Vec<String>>> {
    spec.check()?;
    let rows = spec
        .grid
        .par_iter()
        .enumerate()
        .map(|(i, &value)| {
            let mut row = vec![spec.parameter.clone(), format!("{value}")];
            let mut errors: Vec<String> = Vec::new();
            match apply(&spec.base, &spec.parameter, value) {
                Err(e) => {
                    row.extend(std::iter::repeat_n(String::new(), 2 * spec.targets.len() * spec.methods.len()));
                    errors.push(e.to_string());
                }
                Ok(s) => {
                    let mut mc = None;
                    for &t in &spec.targets {
                        for &m in &spec.methods {
                            match evaluate(&s, t, m, &mut mc, trials, point_seed(seed, i)) {
                                Ok(est) => {
                                    row.push(fmt(est.value));
                                    row.push(fmt(est.stderr));
                                }
                                Err(e) => {
                                    row.push(String::new());
                                    row.push(String::new());
                                    let msg = format!("{}/{}: {e}", t.as_str(), m.as_str());
                                    if !errors.contains(&msg) {
                                        errors.push(msg);
                                    }
                                }
                            }
                        }
                    }
                }
            }
            row.push(errors.join("; "));
            row
        })
        .collect();
    Ok(rows)
}

/// Runs the sweep on `workers` threads (`None`: default pool) and writes the CSV
/// atomically: rows go to a temporary file next to `out`, renamed on success.
pub fn run_sweep(spec: &SweepSpec, trials: u64, seed: u64, workers: Option<usize>, out: &Path) -> CliResult<usize> {
    let rows = match workers {
        None => sweep_rows(spec, trials, seed)?,
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| CliError::Numerical(e.to_string()))?
            .install(|| sweep_rows(spec, trials, seed))?,
    };
    let dir = out.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    {
        let mut w = csv::Writer::from_writer(tmp.as_file());
        w.write_record(spec.header())?;
        for r in &rows {
            w.write_record(r)?;
        }
        w.flush().map_err(|e| CliError::io(tmp.path(), e))?;
    }
    tmp.persist(out).map_err(|e| CliError::io(out, e.error))?;
    Ok(rows.iter().filter(|r| !r.last().is_some_and(|e| e.is_empty())).count())
}
