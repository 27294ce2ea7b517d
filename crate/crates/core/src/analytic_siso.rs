//! Closed-form statistics and secrecy outage for the single-antenna scenario.
//!
//! Each SOP is the generic integral `∫ f_E(x) F_B(2^R(1+x) − 1) dx` assembled
//! from the user-side CDF and the most detrimental Eve's SNR density.

use crate::domain::{Method, SisoConfig, SopEstimate, User};
use crate::error::{Error, Result};
use crate::specfun::{
    binomial, chebyshev_table, integrate_semi_infinite_with, ln_gamma_upper, log_multinomial,
    weak_composition_count, ChebyshevTable, QuadOptions, WeakCompositions,
};

/// Default term budget for the multinomial expansion path.
pub const COMPOSITION_BUDGET: u128 = 1_000_000;

/// Below this SNR the Eve CDF and PDF are reported as 0.
pub const EVE_X_FLOOR: f64 = 1e-12;

/// Quadrature settings for SOP integrals. The absolute floor is tiny because
/// SOPs far below 1e-10 occur at high SNR and must keep relative accuracy.
pub fn sop_quad_options() -> QuadOptions {
    QuadOptions::new(1e-8, 1e-100)
}

/// Chebyshev table matching a config's K, R_D and α.
pub fn table_for(cfg: &SisoConfig) -> Result<ChebyshevTable> {
    chebyshev_table(cfg.k, cfg.r_d, cfg.alpha)
}

/// CDF of the unordered composite gain fade/(1+d^α).
pub fn cdf_unordered_gain(y: f64, table: &ChebyshevTable) -> f64 {
    table.cdf(y)
}

/// Evaluation route for the ordered-gain CDF.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderedPath {
    /// Polynomial in the unordered CDF value.
    Direct,
    /// Expand every power of the Chebyshev sum over weak compositions.
    Multinomial { budget: u128 },
}

/// CDF of the k-th smallest of `users` i.i.d. composite gains.
pub fn cdf_ordered_gain(y: f64, k: usize, users: usize, table: &ChebyshevTable, path: OrderedPath) -> Result<f64> {
    if k < 1 || k > users {
        return Err(Error::Domain(format!("order index {k} outside 1..={users}")));
    }
    if y <= 0.0 {
        return Ok(0.0);
    }
    let phi = crate::domain::order_constant(users, k);
    let mut acc = 0.0;
    match path {
        OrderedPath::Direct => {
            let f = table.cdf(y);
            for p in 0..=(users - k) {
                let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * binomial((users - k) as u64, p as u64) / (k + p) as f64 * f.powi((k + p) as i32);
            }
        }
        OrderedPath::Multinomial { budget } => {
            let cells = table.k as u64 + 1;
            let needed: u128 = (0..=(users - k)).map(|p| weak_composition_count((k + p) as u64, cells)).sum();
            if needed > budget {
                return Err(Error::CompositionBudget { needed, budget });
            }
            let ln_b: Vec<f64> = table.b.iter().map(|b| b.abs().ln()).collect();
            for p in 0..=(users - k) {
                let outer = binomial((users - k) as u64, p as u64) / (k + p) as f64;
                let outer = if p % 2 == 0 { outer } else { -outer };
                let mut power = 0.0;
                for q in WeakCompositions::new((k + p) as u64, cells as usize) {
                    let mut ln_mag = log_multinomial(&q);
                    let mut negative = false;
                    let mut rate = 0.0;
                    for (i, &qi) in q.iter().enumerate() {
                        if qi == 0 {
                            continue;
                        }
                        ln_mag += qi as f64 * ln_b[i];
                        negative ^= table.b[i] < 0.0 && qi % 2 == 1;
                        rate += qi as f64 * table.c[i];
                    }
                    let term = (ln_mag - rate * y).exp();
                    power += if negative { -term } else { term };
                }
                acc += outer * power;
            }
        }
    }
    Ok((phi * acc).clamp(0.0, 1.0))
}

/// CDF of user n's SNR.
pub fn cdf_gamma_bn(x: f64, cfg: &SisoConfig, table: &ChebyshevTable) -> f64 {
    // the direct path has no failure modes once k is in range
    cdf_ordered_gain(x / (cfg.rho_b * cfg.a_n), cfg.n, cfg.users, table, OrderedPath::Direct).unwrap_or(f64::NAN)
}

/// CDF of user m's SINR; jumps to 1 at the ceiling a_m/a_n.
pub fn cdf_gamma_bm(x: f64, cfg: &SisoConfig, table: &ChebyshevTable) -> f64 {
    if x >= cfg.a_m / cfg.a_n {
        return 1.0;
    }
    let y = x / ((cfg.a_m - cfg.a_n * x) * cfg.rho_b);
    cdf_ordered_gain(y, cfg.m, cfg.users, table, OrderedPath::Direct).unwrap_or(f64::NAN)
}

/// ln(μ1 Γ(δ, μ2 x)/x^δ), the exponent magnitude of the Eve CDF.
fn ln_eve_exponent(x: f64, mu1: f64, mu2: f64, delta: f64) -> f64 {
    mu1.ln() + ln_gamma_upper(delta, mu2 * x).unwrap_or(f64::NEG_INFINITY) - delta * x.ln()
}

/// `exp(−μ1 Γ(δ, μ2 x)/x^δ)`: the CDF of the strongest Eve SNR over a PPP
/// outside radius r_p. With μ1 = 0 (no Eves) the law is a point mass at 0.
pub fn eve_cdf(x: f64, mu1: f64, mu2: f64, delta: f64) -> f64 {
    if mu1 == 0.0 {
        return if x >= 0.0 { 1.0 } else { 0.0 };
    }
    if x < EVE_X_FLOOR {
        return 0.0;
    }
    (-ln_eve_exponent(x, mu1, mu2, delta).exp()).exp()
}

/// Density matching [`eve_cdf`]; 0 when μ1 = 0.
pub fn eve_pdf(x: f64, mu1: f64, mu2: f64, delta: f64) -> f64 {
    if mu1 == 0.0 || x < EVE_X_FLOOR {
        return 0.0;
    }
    let ln_f = -ln_eve_exponent(x, mu1, mu2, delta).exp();
    let ln_a = delta * mu2.ln() - mu2 * x - x.ln();
    let ln_b = delta.ln() + ln_gamma_upper(delta, mu2 * x).unwrap_or(f64::NEG_INFINITY) - (delta + 1.0) * x.ln();
    (mu1.ln() + ln_f + log_add(ln_a, ln_b)).exp()
}

pub(crate) fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

fn eve_params(kappa: User, cfg: &SisoConfig) -> (f64, f64, f64) {
    let (mu1, mu2) = crate::domain::eve_constants(cfg.lambda_e, cfg.rho_e * cfg.share(kappa), cfg.alpha, cfg.r_p);
    (mu1, mu2, 2.0 / cfg.alpha)
}

/// CDF of the most detrimental Eve's SNR for user `kappa`'s message.
pub fn cdf_gamma_e(x: f64, kappa: User, cfg: &SisoConfig) -> f64 {
    let (mu1, mu2, delta) = eve_params(kappa, cfg);
    eve_cdf(x, mu1, mu2, delta)
}

/// PDF of the most detrimental Eve's SNR for user `kappa`'s message.
pub fn pdf_gamma_e(x: f64, kappa: User, cfg: &SisoConfig) -> f64 {
    let (mu1, mu2, delta) = eve_params(kappa, cfg);
    eve_pdf(x, mu1, mu2, delta)
}

/// Clamp an SOP to [0, 1], warning if quadrature noise pushed it visibly out.
pub fn clamp_probability(raw: f64) -> f64 {
    if !(-1e-6..=1.0 + 1e-6).contains(&raw) {
        eprintln!("warning: probability {raw:e} outside [0, 1] before clamping");
    }
    raw.clamp(0.0, 1.0)
}

/// `∫_0^∞ f_E(x) F_B(2^R(1+x) − 1) dx`, clamped to [0, 1].
pub fn sop_integral<P, C>(pdf_e: P, cdf_b: C, rate: f64) -> Result<f64>
where
    P: Fn(f64) -> f64,
    C: Fn(f64) -> f64,
{
    sop_integral_with(pdf_e, cdf_b, rate, &sop_quad_options(), &[])
}

/// [`sop_integral`] with explicit quadrature options and kinks (in Eve SNR).
pub fn sop_integral_with<P, C>(pdf_e: P, cdf_b: C, rate: f64, opts: &QuadOptions, breaks: &[f64]) -> Result<f64>
where
    P: Fn(f64) -> f64,
    C: Fn(f64) -> f64,
{
    let scale = rate.exp2();
    let f = |x: f64| {
        let d = pdf_e(x);
        if d == 0.0 {
            0.0
        } else {
            d * cdf_b(scale * (1.0 + x) - 1.0)
        }
    };
    let (v, _) = integrate_semi_infinite_with(f, opts, breaks)?;
    Ok(clamp_probability(v))
}

/// Exact SOP of user n.
pub fn sop_n(cfg: &SisoConfig, table: &ChebyshevTable) -> Result<SopEstimate> {
    cfg.validate()?;
    let (mu1, mu2, delta) = eve_params(User::N, cfg);
    let cdf_b = |x: f64| cdf_gamma_bn(x, cfg, table);
    let v = if mu1 == 0.0 {
        cdf_b(cfg.rate_n.exp2() - 1.0)
    } else {
        sop_integral(|x| eve_pdf(x, mu1, mu2, delta), cdf_b, cfg.rate_n)?
    };
    Ok(SopEstimate::exact(v, Method::Analytic))
}

/// Exact SOP of user m. Beyond τ_m the user-side CDF is 1, so the integral
/// splits into the [0, τ_m] part plus the Eve tail mass.
pub fn sop_m(cfg: &SisoConfig, table: &ChebyshevTable) -> Result<SopEstimate> {
    cfg.validate()?;
    let (mu1, mu2, delta) = eve_params(User::M, cfg);
    let cdf_b = |x: f64| cdf_gamma_bm(x, cfg, table);
    let v = if mu1 == 0.0 {
        cdf_b(cfg.rate_m.exp2() - 1.0)
    } else {
        let tau_m = 1.0 / (cfg.rate_m.exp2() * cfg.a_n) - 1.0;
        let breaks: Vec<f64> = [tau_m].into_iter().filter(|t| *t > 0.0).collect();
        sop_integral_with(|x| eve_pdf(x, mu1, mu2, delta), cdf_b, cfg.rate_m, &sop_quad_options(), &breaks)?
    };
    Ok(SopEstimate::exact(v, Method::Analytic))
}

/// `1 − (1 − P_m)(1 − P_n)`.
pub fn pair_probability(p_m: f64, p_n: f64) -> f64 {
    1.0 - (1.0 - p_m) * (1.0 - p_n)
}

/// Exact SOP of the selected pair.
pub fn sop_pair(cfg: &SisoConfig, table: &ChebyshevTable) -> Result<SopEstimate> {
    let p_m = sop_m(cfg, table)?.value;
    let p_n = sop_n(cfg, table)?.value;
    Ok(SopEstimate::exact(pair_probability(p_m, p_n), Method::Analytic))
}

/// The integrals `(Q_1, Q_2)` behind the high-SNR gains G_n and G_m.
pub fn asymptotic_integrals(cfg: &SisoConfig) -> Result<(f64, f64)> {
    let ell = 1.0 + 2.0 * cfg.r_d.powf(cfg.alpha) / (cfg.alpha + 2.0);
    let opts = sop_quad_options();

    let (mu1, mu2, delta) = eve_params(User::N, cfg);
    let s_n = cfg.rate_n.exp2();
    let n = cfg.n as f64;
    let q1 = if mu1 == 0.0 {
        ((s_n - 1.0) * ell / cfg.a_n).powf(n)
    } else {
        let f = |x: f64| {
            let d = eve_pdf(x, mu1, mu2, delta);
            if d == 0.0 {
                0.0
            } else {
                d * ((s_n * (1.0 + x) - 1.0) * ell / cfg.a_n).powf(n)
            }
        };
        integrate_semi_infinite_with(f, &opts, &[])?.0
    };

    let (mu1, mu2, delta) = eve_params(User::M, cfg);
    let s_m = cfg.rate_m.exp2();
    let m = cfg.m as f64;
    let tau_m = 1.0 / (s_m * cfg.a_n) - 1.0;
    let kernel = |x: f64| {
        let g = s_m * (1.0 + x) - 1.0;
        (g * ell / (cfg.a_m - cfg.a_n * g)).powf(m)
    };
    let q2 = if tau_m <= 0.0 {
        0.0
    } else if mu1 == 0.0 {
        kernel(0.0)
    } else {
        let f = |x: f64| {
            let d = eve_pdf(x, mu1, mu2, delta);
            if d == 0.0 || x >= tau_m {
                0.0
            } else {
                d * kernel(x)
            }
        };
        crate::specfun::integrate_finite_with(f, 0.0, tau_m, &opts, &decade_breaks(tau_m))?.0
    };
    Ok((q1, q2))
}

fn decade_breaks(upper: f64) -> Vec<f64> {
    (-14..=10).map(|k| 10f64.powi(k)).filter(|&x| x < upper).collect()
}

/// High-SNR approximation `G_n ρ_b^{−n}`, capped at 1.
pub fn sop_n_asym(cfg: &SisoConfig) -> Result<SopEstimate> {
    let d = cfg.derived()?;
    Ok(SopEstimate::exact((d.g_n * cfg.rho_b.powi(-(d.d_n as i32))).min(1.0), Method::Asymptotic))
}

/// High-SNR approximation `G_m ρ_b^{−m}`, capped at 1.
pub fn sop_m_asym(cfg: &SisoConfig) -> Result<SopEstimate> {
    let d = cfg.derived()?;
    Ok(SopEstimate::exact((d.g_m * cfg.rho_b.powi(-(d.d_m as i32))).min(1.0), Method::Asymptotic))
}

/// `P_m^∞ + P_n^∞ − P_m^∞ P_n^∞`.
pub fn sop_pair_asym(cfg: &SisoConfig) -> Result<SopEstimate> {
    let d = cfg.derived()?;
    let p_m = (d.g_m * cfg.rho_b.powi(-(d.d_m as i32))).min(1.0);
    let p_n = (d.g_n * cfg.rho_b.powi(-(d.d_n as i32))).min(1.0);
    Ok(SopEstimate::exact(p_m + p_n - p_m * p_n, Method::Asymptotic))
}

/// Negated least-squares slope of log10 SOP against ρ_b/10 (dB) over the points
/// whose dB value lies in `window`. Points are `(rho_b_db, sop)`.
pub fn diversity_slope(curve: &[(f64, f64)], window: (f64, f64)) -> Result<f64> {
    let pts: Vec<(f64, f64)> = curve
        .iter()
        .filter(|(db, _)| *db >= window.0 && *db <= window.1)
        .map(|&(db, p)| (db / 10.0, p))
        .collect();
    if pts.len() < 3 {
        return Err(Error::Degenerate(format!("diversity slope needs 3 points in window, got {}", pts.len())));
    }
    if pts.iter().any(|(_, p)| !(*p > 0.0)) {
        return Err(Error::Degenerate("diversity slope needs strictly positive SOP values".into()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1.log10()).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1.log10() - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(-sxy / sxx)
}
