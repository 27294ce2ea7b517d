//! Analytic-versus-simulation checks behind `nomasec validate`.

use nomasec::analytic_an::{
    cdf_bm_an, cdf_bm_inf, cdf_bn_an, cdf_bn_inf, cdf_e_an, gig_pdf, pdf_e_an, sop_m_an, sop_n_an, sop_pair_an,
    sop_pair_inf,
};
use nomasec::analytic_siso::{cdf_gamma_bm, cdf_gamma_bn, cdf_gamma_e, pdf_gamma_e, sop_m, sop_n, sop_pair, table_for};
use nomasec::simulator::{an_draws, siso_outcomes, EmpiricalCdf, TrialOutcome};
use nomasec::specfun::{integrate_finite, integrate_semi_infinite_with, ChebyshevTable, QuadOptions};
use nomasec::{AnConfig, SisoConfig, SopEstimate, User};

pub const SOP_ABS_TOL: f64 = 0.01;
pub const SOP_SIGMAS: f64 = 3.0;
pub const KS_EXACT_TOL: f64 = 0.005;
pub const KS_EVE_TOL: f64 = 0.01;
pub const KS_LARGE_TOL: f64 = 0.03;
pub const LARGE_SOP_TOL: f64 = 0.02;
pub const MASS_TOL: f64 = 1e-6;
pub const CHEBYSHEV_TOL: f64 = 1e-3;
/// Antenna count from which the large-antenna checks run.
pub const LARGE_N_A: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

impl Check {
    fn bound(name: impl Into<String>, value: f64, tol: f64) -> Check {
        let ok = value <= tol;
        let status = if ok { Status::Pass } else { Status::Fail };
        Check { name: name.into(), status, detail: format!("{value:.3e} {} {tol:.1e}", relation(ok)) }
    }

    fn skipped(name: impl Into<String>, why: &str) -> Check {
        Check { name: name.into(), status: Status::Skipped, detail: why.to_string() }
    }
}

#[derive(Debug, Clone)]
pub struct ValidateOptions {
    pub trials: u64,
    pub seed: u64,
    /// Replace the Chebyshev table with one missing the Jacobian's 1/2 factor.
    pub corrupt_chebyshev: bool,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions { trials: 1_000_000, seed: 1, corrupt_chebyshev: false }
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.status != Status::Fail)
}

pub fn table(checks: &[Check]) -> String {
    let w = checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
    let mut s = format!("{:<w$}  {:<7}  detail\n", "check", "status");
    for c in checks {
        s.push_str(&format!("{:<w$}  {:<7}  {}\n", c.name, c.status.as_str(), c.detail));
    }
    s
}

/// Kolmogorov distance, cheap strided bound first, exact only when needed.
pub fn ks(e: &EmpiricalCdf, f: impl Fn(f64) -> f64, tol: f64) -> f64 {
    let ub = e.ks_upper_bound(&f, 16);
    if ub <= tol { ub } else { e.ks_distance(&f) }
}

fn sop_check(name: &str, analytic: f64, mc: SopEstimate) -> Check {
    let tol = (SOP_SIGMAS * mc.stderr).max(SOP_ABS_TOL);
    let gap = (analytic - mc.value).abs();
    Check {
        name: name.into(),
        status: if gap <= tol { Status::Pass } else { Status::Fail },
        detail: format!("analytic {analytic:.5e} mc {:.5e} gap {gap:.2e} {} {tol:.2e}", mc.value, relation(gap <= tol)),
    }
}

fn mc_estimates(out: &[TrialOutcome]) -> [SopEstimate; 3] {
    let n = out.len() as u64;
    let c = |f: &dyn Fn(&TrialOutcome) -> bool| out.iter().filter(|o| f(o)).count() as u64;
    [
        SopEstimate::monte_carlo(c(&|o| o.outage_m), n),
        SopEstimate::monte_carlo(c(&|o| o.outage_n), n),
        SopEstimate::monte_carlo(c(&|o| o.outage_m || o.outage_n), n),
    ]
}

fn relation(ok: bool) -> &'static str {
    if ok { "<=" } else { ">" }
}

fn empirical(values: impl Iterator<Item = f64>) -> nomasec::Result<EmpiricalCdf> {
    EmpiricalCdf::new(values.collect())
}

/// Unit mass of a density on (0, ∞), with decade breakpoints.
pub fn mass(pdf: impl Fn(f64) -> f64) -> nomasec::Result<f64> {
    let breaks: Vec<f64> = (-10..=8).map(|e| 10f64.powi(e)).collect();
    Ok(integrate_semi_infinite_with(pdf, &QuadOptions::new(1e-11, 1e-300), &breaks)?.0)
}

/// Direct quadrature of the unordered composite-gain CDF.
pub fn unordered_gain_cdf_direct(y: f64, r_d: f64, alpha: f64) -> nomasec::Result<f64> {
    let (v, _) = integrate_finite(|r| r * -(-(1.0 + r.powf(alpha)) * y).exp_m1(), 0.0, r_d, 1e-13, 1e-300)?;
    Ok(2.0 * v / (r_d * r_d))
}

/// Sup-norm Chebyshev error on `y ∈ [0, 10]`.
pub fn chebyshev_sup_error(table: &ChebyshevTable, r_d: f64, alpha: f64) -> nomasec::Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..=1000 {
        let y = 10.0 * i as f64 / 1000.0;
        worst = worst.max((table.cdf(y) - unordered_gain_cdf_direct(y, r_d, alpha)?).abs());
    }
    Ok(worst)
}

pub fn validate_siso(cfg: &SisoConfig, opts: &ValidateOptions) -> nomasec::Result<Vec<Check>> {
    cfg.validate()?;
    let table = if opts.corrupt_chebyshev {
        ChebyshevTable::without_jacobian_half(cfg.k, cfg.r_d, cfg.alpha)?
    } else {
        table_for(cfg)?
    };
    let mut checks = vec![Check::bound("chebyshev_sup_error", chebyshev_sup_error(&table, cfg.r_d, cfg.alpha)?, CHEBYSHEV_TOL)];
    let out = siso_outcomes(cfg, opts.trials, opts.seed)?;
    let [mm, mn, mp] = mc_estimates(&out);
    checks.push(sop_check("sop_m_vs_mc", sop_m(cfg, &table)?.value, mm));
    checks.push(sop_check("sop_n_vs_mc", sop_n(cfg, &table)?.value, mn));
    checks.push(sop_check("sop_pair_vs_mc", sop_pair(cfg, &table)?.value, mp));
    let bn = empirical(out.iter().map(|o| o.gamma_bn))?;
    checks.push(Check::bound("ks_gamma_bn", ks(&bn, |x| cdf_gamma_bn(x, cfg, &table), KS_EXACT_TOL), KS_EXACT_TOL));
    let bm = empirical(out.iter().map(|o| o.gamma_bm))?;
    checks.push(Check::bound("ks_gamma_bm", ks(&bm, |x| cdf_gamma_bm(x, cfg, &table), KS_EXACT_TOL), KS_EXACT_TOL));
    if cfg.lambda_e > 0.0 {
        let em = empirical(out.iter().map(|o| o.gamma_em))?;
        checks.push(Check::bound("ks_gamma_em", ks(&em, |x| cdf_gamma_e(x, User::M, cfg), KS_EVE_TOL), KS_EVE_TOL));
        for k in [User::M, User::N] {
            let m = mass(|x| pdf_gamma_e(x, k, cfg))?;
            checks.push(Check::bound(format!("pdf_e{}_mass", k.as_str()), (m - 1.0).abs(), MASS_TOL));
        }
    } else {
        checks.push(Check::skipped("ks_gamma_em", "no eavesdroppers (lambda_e = 0)"));
        checks.push(Check::skipped("pdf_e_mass", "no eavesdroppers (lambda_e = 0)"));
    }
    Ok(checks)
}

pub fn validate_an(cfg: &AnConfig, opts: &ValidateOptions) -> nomasec::Result<Vec<Check>> {
    cfg.validate()?;
    let draws = an_draws(cfg, opts.trials, opts.seed)?;
    let out: Vec<TrialOutcome> = draws.iter().map(|d| d.outcome).collect();
    drop(draws);
    let [mm, mn, mp] = mc_estimates(&out);
    let mut checks = vec![
        sop_check("sop_m_an_vs_mc", sop_m_an(cfg)?.value, mm),
        sop_check("sop_n_an_vs_mc", sop_n_an(cfg)?.value, mn),
        sop_check("sop_pair_an_vs_mc", sop_pair_an(cfg)?.value, mp),
    ];
    let bn = empirical(out.iter().map(|o| o.gamma_bn))?;
    let bm = empirical(out.iter().map(|o| o.gamma_bm))?;
    let tol = KS_EXACT_TOL;
    checks.push(Check::bound("ks_gamma_bn_an", ks(&bn, |x| cdf_bn_an(x, cfg).unwrap_or(f64::NAN), tol), tol));
    checks.push(Check::bound("ks_gamma_bm_an", ks(&bm, |x| cdf_bm_an(x, cfg).unwrap_or(f64::NAN), tol), tol));
    if cfg.lambda_e > 0.0 {
        for k in [User::M, User::N] {
            let e = empirical(out.iter().map(|o| if k == User::M { o.gamma_em } else { o.gamma_en }))?;
            let d = ks(&e, |x| cdf_e_an(x, k, cfg), KS_EVE_TOL);
            checks.push(Check::bound(format!("ks_gamma_e{}_an", k.as_str()), d, KS_EVE_TOL));
            let m = mass(|x| pdf_e_an(x, k, cfg))?;
            checks.push(Check::bound(format!("pdf_e{}_an_mass", k.as_str()), (m - 1.0).abs(), MASS_TOL));
        }
    } else {
        checks.push(Check::skipped("ks_gamma_e_an", "no eavesdroppers (lambda_e = 0)"));
        checks.push(Check::skipped("pdf_e_an_mass", "no eavesdroppers (lambda_e = 0)"));
    }
    if cfg.theta < 1.0 {
        let m = mass(|z| gig_pdf(z, cfg).unwrap_or(f64::NAN))?;
        checks.push(Check::bound("gig_mass", (m - 1.0).abs(), MASS_TOL));
    } else {
        checks.push(Check::skipped("gig_mass", "no artificial noise (theta = 1)"));
    }
    if cfg.n_antennas >= LARGE_N_A && cfg.theta < 1.0 {
        let t = KS_LARGE_TOL;
        checks.push(Check::bound("ks_gamma_bn_inf", ks(&bn, |x| cdf_bn_inf(x, cfg).unwrap_or(f64::NAN), t), t));
        checks.push(Check::bound("ks_gamma_bm_inf", ks(&bm, |x| cdf_bm_inf(x, cfg).unwrap_or(f64::NAN), t), t));
        let gap = (sop_pair_inf(cfg)?.value - mp.value).abs();
        checks.push(Check::bound("sop_pair_inf_vs_mc", gap, LARGE_SOP_TOL));
    } else {
        let why = format!("needs N_A >= {LARGE_N_A} and theta < 1");
        checks.push(Check::skipped("large_antenna", &why));
    }
    Ok(checks)
}
