//! Flat `key = value` experiment files.
//!
//! ```text
//! # comments start with '#'
//! scenario = siso        # or: an
//! rho_b_db = 40
//! sweep.parameter = rho_b_db
//! sweep.grid = 20:60:5
//! ```
//!
//! SNR and power keys accept a linear form (`rho_b`) or a `_db` form
//! (`rho_b_db`), not both. Keys outside the scenario's table are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use nomasec::domain::db_to_linear;
use nomasec::{AnConfig, Method, SisoConfig};

use crate::error::{CliError, CliResult};

/// A validated base configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    Siso(SisoConfig),
    An(AnConfig),
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Siso(_) => "siso",
            Scenario::An(_) => "an",
        }
    }

    pub fn validate(&self) -> nomasec::Result<()> {
        match self {
            Scenario::Siso(c) => c.validate(),
            Scenario::An(c) => c.validate(),
        }
    }
}

/// Which SOP of the pair a sweep column reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    M,
    N,
    Pair,
}

impl Target {
    pub fn as_str(self) -> &'static str {
        match self {
            Target::M => "m",
            Target::N => "n",
            Target::Pair => "pair",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "m" => Some(Target::M),
            "n" => Some(Target::N),
            "pair" => Some(Target::Pair),
            _ => None,
        }
    }
}

pub fn parse_method(s: &str) -> Option<Method> {
    match s {
        "analytic" => Some(Method::Analytic),
        "asymptotic" => Some(Method::Asymptotic),
        "monte_carlo" | "mc" => Some(Method::MonteCarlo),
        _ => None,
    }
}

/// Sweep settings read from `sweep.*` keys; all optional.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepKeys {
    pub parameter: Option<String>,
    pub grid: Option<Vec<f64>>,
    pub targets: Option<Vec<Target>>,
    pub methods: Option<Vec<Method>>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

/// Parsed file: the scenario plus any sweep settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigFile {
    pub scenario: Scenario,
    pub sweep: SweepKeys,
}

const SISO_KEYS: &[&str] = &[
    "M", "m", "n", "a_m", "a_n", "rho_b", "rho_b_db", "rho_e", "rho_e_db", "alpha", "R_D", "r_p", "lambda_e", "R_m",
    "R_n", "K", "R_E",
];
const AN_KEYS: &[&str] = &[
    "N_A", "theta", "rho_t", "rho_t_db", "a_m", "a_n", "alpha", "R_D1", "R_D2", "r_p", "lambda_e", "R_m", "R_n", "R_E",
];

/// Grid syntax: `start:stop:step` (inclusive) or a comma list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let s = s.trim();
    let grid: Vec<f64> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("grid range '{s}' must be start:stop:step"));
        }
        let num = |p: &str| p.parse::<f64>().map_err(|_| format!("bad number '{p}' in grid"));
        let (a, b, h) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(h > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err("grid step must be positive".into());
        }
        let count = ((b - a) / h + 1e-9).floor();
        if count < 0.0 || count > 1e6 {
            return Err(format!("grid range '{s}' is empty or too long"));
        }
        // 12 significant digits keep `0.1 * 3` from printing as 0.30000000000000004
        (0..=count as usize).map(|i| round_sig(a + h * i as f64)).collect()
    } else {
        s.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad number '{}' in grid", p.trim())))
            .collect::<Result<_, _>>()?
    };
    if grid.is_empty() {
        return Err("grid is empty".into());
    }
    let up = grid.windows(2).all(|w| w[1] > w[0]);
    let down = grid.windows(2).all(|w| w[1] < w[0]);
    if !(up || down) {
        return Err("grid must be strictly monotone".into());
    }
    Ok(grid)
}

fn round_sig(x: f64) -> f64 {
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn split_list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

pub fn parse_config(path: &Path) -> CliResult<ConfigFile> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config_str(&text, &path.display().to_string())
}

/// Parses config text; `origin` names the source in error messages.
pub fn parse_config_str(text: &str, origin: &str) -> CliResult<ConfigFile> {
    let err = |line: usize, msg: String| CliError::Parse { path: origin.to_string(), line, msg };
    let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let mut sweep = SweepKeys::default();
    let mut scenario: Option<(usize, String)> = None;
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| err(ln, format!("expected key = value, got '{line}'")))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(err(ln, "empty key or value".into()));
        }
        if k == "scenario" {
            if scenario.is_some() {
                return Err(err(ln, "duplicate key 'scenario'".into()));
            }
            scenario = Some((ln, v.to_string()));
            continue;
        }
        if let Some(sk) = k.strip_prefix("sweep.") {
            match sk {
                "parameter" => sweep.parameter = Some(v.to_string()),
                "grid" => sweep.grid = Some(parse_grid(v).map_err(|m| err(ln, m))?),
                "outputs" | "users" => {
                    let t = split_list(v)
                        .map(|s| Target::parse(s).ok_or_else(|| err(ln, format!("unknown output '{s}'"))))
                        .collect::<CliResult<Vec<_>>>()?;
                    sweep.targets = Some(t);
                }
                "methods" => {
                    let m = split_list(v)
                        .map(|s| parse_method(s).ok_or_else(|| err(ln, format!("unknown method '{s}'"))))
                        .collect::<CliResult<Vec<_>>>()?;
                    sweep.methods = Some(m);
                }
                "trials" => sweep.trials = Some(v.parse().map_err(|_| err(ln, format!("bad integer '{v}'")))?),
                "seed" => sweep.seed = Some(v.parse().map_err(|_| err(ln, format!("bad integer '{v}'")))?),
                _ => return Err(err(ln, format!("unknown key '{k}'"))),
            }
            continue;
        }
        if entries.insert(k.to_string(), (ln, v.to_string())).is_some() {
            return Err(err(ln, format!("duplicate key '{k}'")));
        }
    }
    let (sln, sname) = scenario.ok_or_else(|| err(0, "missing 'scenario = siso | an'".into()))?;
    let allowed = match sname.as_str() {
        "siso" => SISO_KEYS,
        "an" => AN_KEYS,
        other => return Err(err(sln, format!("unknown scenario '{other}'"))),
    };
    for (k, (ln, _)) in &entries {
        if !allowed.contains(&k.as_str()) {
            return Err(err(*ln, format!("unknown key '{k}' for scenario {sname}")));
        }
    }
    let num = |k: &str| -> CliResult<Option<f64>> {
        entries
            .get(k)
            .map(|(ln, v)| v.parse::<f64>().map_err(|_| err(*ln, format!("bad number '{v}' for {k}"))))
            .transpose()
    };
    let int = |k: &str| -> CliResult<Option<usize>> {
        entries
            .get(k)
            .map(|(ln, v)| v.parse::<usize>().map_err(|_| err(*ln, format!("bad integer '{v}' for {k}"))))
            .transpose()
    };
    let power = |lin: &str, db: &str| -> CliResult<Option<f64>> {
        match (num(lin)?, num(db)?) {
            (Some(_), Some(_)) => {
                let ln = entries[db].0;
                Err(err(ln, format!("both {lin} and {db} given")))
            }
            (Some(v), None) => Ok(Some(v)),
            (None, Some(d)) => Ok(Some(db_to_linear(d))),
            (None, None) => Ok(None),
        }
    };
    let scenario = match sname.as_str() {
        "siso" => {
            let mut c = SisoConfig::default();
            if let Some(v) = int("M")? { c.users = v; }
            if let Some(v) = int("m")? { c.m = v; }
            if let Some(v) = int("n")? { c.n = v; }
            if let Some(v) = num("a_m")? { c.a_m = v; }
            if let Some(v) = num("a_n")? { c.a_n = v; }
            if let Some(v) = power("rho_b", "rho_b_db")? { c.rho_b = v; }
            if let Some(v) = power("rho_e", "rho_e_db")? { c.rho_e = v; }
            if let Some(v) = num("alpha")? { c.alpha = v; }
            if let Some(v) = num("R_D")? { c.r_d = v; }
            if let Some(v) = num("r_p")? { c.r_p = v; }
            if let Some(v) = num("lambda_e")? { c.lambda_e = v; }
            if let Some(v) = num("R_m")? { c.rate_m = v; }
            if let Some(v) = num("R_n")? { c.rate_n = v; }
            if let Some(v) = int("K")? { c.k = v; }
            if let Some(v) = num("R_E")? { c.r_e = v; }
            Scenario::Siso(c)
        }
        _ => {
            let mut c = AnConfig::default();
            if let Some(v) = int("N_A")? { c.n_antennas = v; }
            if let Some(v) = num("theta")? { c.theta = v; }
            if let Some(v) = power("rho_t", "rho_t_db")? { c.p_t = v; }
            if let Some(v) = num("a_m")? { c.a_m = v; }
            if let Some(v) = num("a_n")? { c.a_n = v; }
            if let Some(v) = num("alpha")? { c.alpha = v; }
            if let Some(v) = num("R_D1")? { c.r_d1 = v; }
            if let Some(v) = num("R_D2")? { c.r_d2 = v; }
            if let Some(v) = num("r_p")? { c.r_p = v; }
            if let Some(v) = num("lambda_e")? { c.lambda_e = v; }
            if let Some(v) = num("R_m")? { c.rate_m = v; }
            if let Some(v) = num("R_n")? { c.rate_n = v; }
            if let Some(v) = num("R_E")? { c.r_e = v; }
            Scenario::An(c)
        }
    };
    scenario.validate()?;
    Ok(ConfigFile { scenario, sweep })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_forms() {
        assert_eq!(parse_grid("20:60:20").unwrap(), vec![20.0, 40.0, 60.0]);
        assert_eq!(parse_grid("0.1, 0.2,0.4").unwrap(), vec![0.1, 0.2, 0.4]);
        assert_eq!(parse_grid("0.05:0.95:0.05").unwrap().len(), 19);
        assert!(parse_grid("1,1").is_err());
        assert!(parse_grid("1,3,2").is_err());
        assert!(parse_grid("").is_err());
        assert!(parse_grid("5:1:1").is_err());
    }

    #[test]
    fn duplicate_power_forms_rejected() {
        let e = parse_config_str("scenario = siso\nrho_b = 10\nrho_b_db = 10\n", "t").unwrap_err();
        assert!(matches!(e, CliError::Parse { line: 3, .. }));
    }
}
