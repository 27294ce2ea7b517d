//! Closed-form statistics and secrecy outage for the multiple-antenna scenario
//! with artificial noise, for finite antenna counts and in the N_A → ∞ limit.
//!
//! The exact user CDFs treat the beamformed gain ‖h‖² ~ Gamma(N_A) as
//! independent of the AN leakage terms and average the resulting Gamma tail
//! over the interference law and the user position.

use crate::analytic_siso::{clamp_probability, log_add, pair_probability, sop_integral_with};
use crate::domain::{AnConfig, DerivedAn, Method, SopEstimate, User};
use crate::error::{Error, Result};
use crate::specfun::{
    binomial, integrate_finite_with, ln_factorial, ln_gamma, ln_gamma_lower, ln_gamma_upper, QuadOptions,
};

/// Relative closeness of 1/P_S and (N_A−1)/P_A below which user m's
/// interference kernel switches to the equal-rate form.
pub const CROSSOVER_TOL: f64 = 1e-9;

fn ln_binomial(n: u64, k: u64) -> f64 {
    binomial(n, k).ln()
}

fn require_an(cfg: &AnConfig, what: &str) -> Result<()> {
    if cfg.theta >= 1.0 {
        return Err(Error::Degenerate(format!("{what} needs artificial noise (theta < 1)")));
    }
    Ok(())
}

/// Partial-fraction terms `(coefficient, rate, power)` of the AN interference
/// Laplace transform `(τ1τ2)^{n}/((s+τ1)(s+τ2))^{n}`, n = N_A − 1, so that
/// `L(s) = Σ c/(s+rate)^power`. Each coefficient is stored as (sign, ln|c|).
fn gig_terms(cfg: &AnConfig) -> Vec<(f64, f64, f64, u64)> {
    let d = cfg.derived();
    let n = cfg.n_antennas as u64 - 1;
    let ln_pref = n as f64 * (d.tau_1.ln() + d.tau_2.ln());
    let mut out = Vec::with_capacity(2 * n as usize);
    for (tau, other) in [(d.tau_1, d.tau_2), (d.tau_2, d.tau_1)] {
        // (2τ_i − L) = τ_i − τ_other
        let diff = tau - other;
        for j in 1..=n {
            let a = ln_binomial(2 * n - j - 1, n - j);
            let expo = j as i64 - 2 * n as i64;
            let mut sign = if n % 2 == 1 { -1.0 } else { 1.0 };
            if diff < 0.0 && expo % 2 != 0 {
                sign = -sign;
            }
            out.push((sign, ln_pref + a + expo as f64 * diff.abs().ln(), tau, j));
        }
    }
    out
}

/// Density of the aggregate AN interference at an Eve,
/// `a_m σ_a² Y_1 + a_n σ_a² Y_2` with `Y_i ~ Gamma(N_A − 1, 1)` independent.
pub fn gig_pdf(z: f64, cfg: &AnConfig) -> Result<f64> {
    require_an(cfg, "the interference density")?;
    if z < 0.0 {
        return Ok(0.0);
    }
    let mut acc = 0.0;
    let mut mag = 0.0;
    for (sign, ln_c, tau, j) in gig_terms(cfg) {
        let ln_z = if j == 1 { 0.0 } else { (j - 1) as f64 * z.ln() };
        let t = (ln_c + ln_z - tau * z - ln_factorial(j - 1)).exp();
        acc += sign * t;
        mag += t;
    }
    if acc.abs() >= 1e-3 * mag {
        return Ok(acc.max(0.0));
    }
    // The expansion cancels near the origin; the Kummer series is positive.
    if z == 0.0 {
        return Ok(0.0);
    }
    let d = cfg.derived();
    let n = cfg.n_antennas as f64 - 1.0;
    let (lo, hi) = if d.tau_1 < d.tau_2 { (d.tau_1, d.tau_2) } else { (d.tau_2, d.tau_1) };
    let w = (hi - lo) * z;
    let (mut term, mut sum, mut k) = (1.0f64, 1.0f64, 0.0f64);
    while term > 1e-17 * sum {
        term *= (n + k) / (2.0 * n + k) * w / (k + 1.0);
        sum += term;
        k += 1.0;
    }
    Ok((n * (lo * hi).ln() + (2.0 * n - 1.0) * z.ln() - hi * z - ln_gamma(2.0 * n) + sum.ln()).exp())
}

/// How the Eve-side interference Laplace transform is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplaceRoute {
    /// `(1 + s/τ1)^{−n}(1 + s/τ2)^{−n}` in log space.
    Product,
    /// Sum over the partial-fraction expansion.
    PartialFractions,
}

/// `E[e^{−s I_e}]` for the aggregate AN interference; 1 without AN.
pub fn eve_interference_laplace(s: f64, cfg: &AnConfig, route: LaplaceRoute) -> f64 {
    if cfg.theta >= 1.0 {
        return 1.0;
    }
    let d = cfg.derived();
    match route {
        LaplaceRoute::Product => {
            let n = cfg.n_antennas as f64 - 1.0;
            (-n * ((s / d.tau_1).ln_1p() + (s / d.tau_2).ln_1p())).exp()
        }
        LaplaceRoute::PartialFractions => gig_terms(cfg)
            .into_iter()
            .map(|(sign, ln_c, tau, j)| sign * (ln_c - j as f64 * (s + tau).ln()).exp())
            .sum(),
    }
}

fn ln_eve_laplace(s: f64, d: &DerivedAn, cfg: &AnConfig) -> (f64, f64) {
    // (ln L, −d ln L/ds)
    if cfg.theta >= 1.0 {
        return (0.0, 0.0);
    }
    let n = cfg.n_antennas as f64 - 1.0;
    let ln_l = -n * ((s / d.tau_1).ln_1p() + (s / d.tau_2).ln_1p());
    (ln_l, n * (1.0 / (s + d.tau_1) + 1.0 / (s + d.tau_2)))
}

/// CDF of the most detrimental Eve's SINR for user `kappa` under AN.
/// Without AN this is the interference-free Eve law.
pub fn cdf_e_an(x: f64, kappa: User, cfg: &AnConfig) -> f64 {
    let d = cfg.derived();
    let (mu1, mu2) = d.mu(kappa);
    if mu1 == 0.0 {
        return 1.0;
    }
    if x < crate::analytic_siso::EVE_X_FLOOR {
        return 0.0;
    }
    let s = x / (cfg.share(kappa) * cfg.p_s());
    let (ln_l, _) = ln_eve_laplace(s, &d, cfg);
    let ln_expo = mu1.ln() + ln_gamma_upper(d.delta, mu2 * x).unwrap_or(f64::NEG_INFINITY) - d.delta * x.ln() + ln_l;
    (-ln_expo.exp()).exp()
}

/// Density matching [`cdf_e_an`].
pub fn pdf_e_an(x: f64, kappa: User, cfg: &AnConfig) -> f64 {
    let d = cfg.derived();
    let (mu1, mu2) = d.mu(kappa);
    if mu1 == 0.0 || x < crate::analytic_siso::EVE_X_FLOOR {
        return 0.0;
    }
    let delta = d.delta;
    let scale = cfg.share(kappa) * cfg.p_s();
    let (ln_l, dlog) = ln_eve_laplace(x / scale, &d, cfg);
    let ln_gu = ln_gamma_upper(delta, mu2 * x).unwrap_or(f64::NEG_INFINITY);
    let ln_expo = mu1.ln() + ln_gu - delta * x.ln() + ln_l;
    let ln_a = delta * mu2.ln() - mu2 * x - x.ln();
    let ln_b = delta.ln() + ln_gu - (delta + 1.0) * x.ln();
    let mut ln_sum = log_add(ln_a, ln_b);
    if dlog > 0.0 {
        ln_sum = log_add(ln_sum, ln_gu - delta * x.ln() + (dlog / scale).ln());
    }
    (mu1.ln() + ln_l + ln_sum - ln_expo.exp()).exp()
}

/// `E[e^{−cZ} Z^q]` for `Z = σ_a² Y`, `Y ~ Gamma(N_A − 1, 1)`; the Kronecker delta without AN.
fn ln_kernel_user_n(q: u64, c: f64, cfg: &AnConfig) -> f64 {
    if cfg.theta >= 1.0 {
        return if q == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let k = cfg.n_antennas as f64 - 1.0;
    let sa = cfg.sigma_a2();
    ln_gamma(k + q as f64) - ln_gamma(k) - k * (c * sa).ln_1p() + q as f64 * (sa / (1.0 + c * sa)).ln()
}

/// CDF of user n's SINR.
pub fn cdf_bn_an(x: f64, cfg: &AnConfig) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    let d = cfg.derived();
    let big_n = cfg.n_antennas as u64;
    let c = d.vartheta * x;
    let beta = c / cfg.a_m;
    let r1a = cfg.r_d1.powf(cfg.alpha);
    let g: Vec<f64> = (0..big_n).map(|u| {
        let s = u as f64 + d.delta;
        ln_gamma_lower(s, beta * r1a).map(|l| l - s * beta.ln())
    }).collect::<Result<_>>()?;
    let kq: Vec<f64> = (0..big_n).map(|q| ln_kernel_user_n(q, c, cfg)).collect();
    let ln_pref = d.delta.ln() - 2.0 * cfg.r_d1.ln() - beta;
    let mut s = 0.0;
    for p in 0..big_n {
        let ln_p = p as f64 * c.ln() - ln_factorial(p);
        for q in 0..=p {
            if kq[q as usize] == f64::NEG_INFINITY {
                continue;
            }
            let ln_pq = ln_p + ln_binomial(p, q) + (q as f64 - p as f64) * cfg.a_m.ln() + kq[q as usize];
            for u in 0..=(p - q) {
                s += (ln_pref + ln_pq + ln_binomial(p - q, u) + g[u as usize]).exp();
            }
        }
    }
    Ok((1.0 - s).clamp(0.0, 1.0))
}

/// Which closed form serves user m's interference kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelBranch {
    /// P_A = 0: only the exponential term.
    NoAn,
    /// Distinct rates 1/P_S and (N_A−1)/P_A.
    Distinct,
    /// Equal rates (θ = 1/N_A).
    Equal,
}

/// Branch used for a configuration.
pub fn kernel_branch(cfg: &AnConfig) -> KernelBranch {
    if cfg.theta >= 1.0 {
        return KernelBranch::NoAn;
    }
    let inv_ps = 1.0 / cfg.p_s();
    let beta = (cfg.n_antennas as f64 - 1.0) / cfg.p_a() - inv_ps;
    if beta.abs() <= CROSSOVER_TOL * inv_ps {
        KernelBranch::Equal
    } else {
        KernelBranch::Distinct
    }
}

/// `E[e^{−cI} I^q]` for `I = P_S X + σ_a² Y`, X ~ Exp(1), Y ~ Gamma(N_A−1, 1),
/// returned as (sign, ln|value|).
///
/// The distinct-rate form `t_1[Γ(q+1)/A^{q+1} − Σ_{l<N_A−1} β^l Γ(q+l+1)/(l!(A+β)^{q+l+1})]`
/// cancels catastrophically as β → 0. Because the full series over l sums to
/// Γ(q+1)/A^{q+1}, the bracket equals the series tail from l = N_A−1, and the tail
/// cancels the β^{1−N_A} in t_1. The tail is used whenever it converges quickly.
pub fn ln_kernel_user_m(q: u64, c: f64, cfg: &AnConfig) -> (f64, f64) {
    let ps = cfg.p_s();
    let a = c + 1.0 / ps;
    let qf = q as f64;
    match kernel_branch(cfg) {
        KernelBranch::NoAn => (1.0, ln_gamma(qf + 1.0) - ps.ln() - (qf + 1.0) * a.ln()),
        KernelBranch::Equal => {
            let n = cfg.n_antennas as f64;
            (1.0, ln_gamma(qf + n) - ln_factorial(cfg.n_antennas as u64 - 1) - n * ps.ln() - (qf + n) * a.ln())
        }
        KernelBranch::Distinct => {
            let k = cfg.n_antennas as u64 - 1;
            let sa = cfg.sigma_a2();
            let beta = 1.0 / sa - 1.0 / ps;
            let ab = a + beta;
            let ratio = beta.abs() / ab;
            if ratio <= 0.75 {
                let ln_pref = -ps.ln() - k as f64 * sa.ln();
                let mut sum = 0.0;
                let mut l = k;
                loop {
                    let mag = (l - k) as f64 * beta.abs().ln() - ln_factorial(l) + ln_gamma(qf + l as f64 + 1.0)
                        - (qf + l as f64 + 1.0) * ab.ln();
                    let sign = if beta < 0.0 && (l - k) % 2 == 1 { -1.0 } else { 1.0 };
                    let term = sign * mag.exp();
                    sum += term;
                    if term.abs() <= 1e-17 * sum.abs() || l > k + 100_000 {
                        break;
                    }
                    l += 1;
                }
                (sum.signum(), ln_pref + sum.abs().ln())
            } else {
                let base = 1.0 - sa / ps;
                let t1 = base.powf(-(k as f64)) / ps;
                let mut bracket = (ln_gamma(qf + 1.0) - (qf + 1.0) * a.ln()).exp();
                for l in 0..k {
                    let mag = l as f64 * beta.abs().ln() - ln_factorial(l) + ln_gamma(qf + l as f64 + 1.0)
                        - (qf + l as f64 + 1.0) * ab.ln();
                    let sign = if beta < 0.0 && l % 2 == 1 { -1.0 } else { 1.0 };
                    bracket -= sign * mag.exp();
                }
                let v = t1 * bracket;
                (v.signum(), v.abs().ln())
            }
        }
    }
}

/// `ln[γ(s, β z_hi) − γ(s, β z_lo)] − s ln β`, differencing on whichever side avoids cancellation.
fn ln_zone_gamma(s: f64, beta: f64, z_lo: f64, z_hi: f64) -> Result<f64> {
    let (lo, hi) = (beta * z_lo, beta * z_hi);
    let v = if lo > s + 1.0 {
        let a = ln_gamma_upper(s, lo)?;
        let b = ln_gamma_upper(s, hi)?;
        a + (-(b - a).exp()).ln_1p()
    } else {
        let a = ln_gamma_lower(s, hi)?;
        let b = ln_gamma_lower(s, lo)?;
        a + (-(b - a).exp()).ln_1p()
    };
    Ok(v - s * beta.ln())
}

/// CDF of user m's SINR.
pub fn cdf_bm_an(x: f64, cfg: &AnConfig) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    let d = cfg.derived();
    let big_n = cfg.n_antennas as u64;
    let c = d.nu * x;
    let beta = c / cfg.a_n;
    let (r1a, r2a) = (cfg.r_d1.powf(cfg.alpha), cfg.r_d2.powf(cfg.alpha));
    let g: Vec<f64> =
        (0..big_n).map(|u| ln_zone_gamma(u as f64 + d.delta, beta, r1a, r2a)).collect::<Result<_>>()?;
    let kq: Vec<(f64, f64)> = (0..big_n).map(|q| ln_kernel_user_m(q, c, cfg)).collect();
    let ring = cfg.r_d2 * cfg.r_d2 - cfg.r_d1 * cfg.r_d1;
    let ln_pref = d.delta.ln() - ring.ln() - beta;
    let mut s = 0.0;
    for p in 0..big_n {
        let ln_p = p as f64 * c.ln() - ln_factorial(p);
        for q in 0..=p {
            let (sign, lk) = kq[q as usize];
            let ln_pq = ln_p + ln_binomial(p, q) + (q as f64 - p as f64) * cfg.a_n.ln() + lk;
            for u in 0..=(p - q) {
                s += sign * (ln_pref + ln_pq + ln_binomial(p - q, u) + g[u as usize]).exp();
            }
        }
    }
    Ok((1.0 - s).clamp(0.0, 1.0))
}

/// Quadrature settings for AN SOP integrals. The user CDFs are assembled as
/// `1 − S` and carry ~1e-16 absolute noise, so no finer absolute floor is reachable.
pub fn an_quad_options() -> QuadOptions {
    QuadOptions::new(1e-8, 1e-15)
}

fn an_sop<C>(cfg: &AnConfig, kappa: User, cdf_b: C, exact: bool) -> Result<SopEstimate>
where
    C: Fn(f64) -> Result<f64>,
{
    cfg.validate()?;
    let rate = cfg.rate(kappa);
    let b = |x: f64| cdf_b(x).unwrap_or(f64::NAN);
    let (mu1, _) = cfg.derived().mu(kappa);
    let (v, method) = if mu1 == 0.0 {
        (b(rate.exp2() - 1.0), if exact { Method::Analytic } else { Method::Asymptotic })
    } else if exact {
        (sop_integral_with(|x| pdf_e_an(x, kappa, cfg), b, rate, &an_quad_options(), &[])?, Method::Analytic)
    } else {
        let breaks = large_breaks(cfg, kappa);
        (sop_integral_with(|x| pdf_e_inf(x, kappa, cfg), b, rate, &an_quad_options(), &breaks)?, Method::Asymptotic)
    };
    Ok(SopEstimate::exact(clamp_probability(v), method))
}

/// Exact SOP of user n.
pub fn sop_n_an(cfg: &AnConfig) -> Result<SopEstimate> {
    an_sop(cfg, User::N, |x| cdf_bn_an(x, cfg), true)
}

/// Exact SOP of user m.
pub fn sop_m_an(cfg: &AnConfig) -> Result<SopEstimate> {
    an_sop(cfg, User::M, |x| cdf_bm_an(x, cfg), true)
}

/// Exact SOP of the pair.
pub fn sop_pair_an(cfg: &AnConfig) -> Result<SopEstimate> {
    let p_m = sop_m_an(cfg)?.value;
    let p_n = sop_n_an(cfg)?.value;
    Ok(SopEstimate::exact(pair_probability(p_m, p_n), Method::Analytic))
}

/// Large-antenna CDF of user n's SINR: piecewise in `[ζ_n, ξ_n]`.
pub fn cdf_bn_inf(x: f64, cfg: &AnConfig) -> Result<f64> {
    require_an(cfg, "the large-antenna analysis")?;
    if x <= 0.0 {
        return Ok(0.0);
    }
    let n = cfg.n_antennas as f64;
    let t = cfg.a_n * cfg.p_s() * n / x - cfg.a_m * cfg.p_a() - 1.0;
    let r1a = cfg.r_d1.powf(cfg.alpha);
    Ok(if t <= 0.0 {
        1.0
    } else if t >= r1a {
        0.0
    } else {
        1.0 - t.powf(2.0 / cfg.alpha) / (cfg.r_d1 * cfg.r_d1)
    })
}

/// Large-antenna CDF of user m's SINR, as the zone average of the exponential
/// interference tail.
pub fn cdf_bm_inf(x: f64, cfg: &AnConfig) -> Result<f64> {
    require_an(cfg, "the large-antenna analysis")?;
    if x <= 0.0 {
        return Ok(0.0);
    }
    let (r1, r2, al) = (cfg.r_d1, cfg.r_d2, cfg.alpha);
    let ans = cfg.a_n * cfg.p_s();
    let c = cfg.a_m * cfg.p_s() * cfg.n_antennas as f64 / x - cfg.a_n * cfg.p_a() - 1.0;
    if c <= r1.powf(al) {
        return Ok(1.0);
    }
    let t = c.powf(1.0 / al).min(r2);
    let f = |r: f64| r * (-((c - r.powf(al)) / ans).max(0.0)).exp();
    let opts = QuadOptions::new(1e-11, 1e-300);
    let (partial, _) = integrate_finite_with(f, r1, t, &opts, &[])?;
    let ring = r2 * r2 - r1 * r1;
    Ok(((2.0 * partial + r2 * r2 - t * t) / ring).clamp(0.0, 1.0))
}

/// The piecewise closed form with `t_m = c^{1/α}` and `b_1 = 2e^{(a_n P_A + 1)/(a_n P_S)}`,
/// kept as a cross-check of [`cdf_bm_inf`]. `e^{r^α/(a_n P_S)}` overflows when
/// `R_D2^α ≫ a_n P_S`, so this is only usable at moderate geometry.
pub fn cdf_bm_inf_piecewise(x: f64, cfg: &AnConfig) -> Result<f64> {
    require_an(cfg, "the large-antenna analysis")?;
    let d = cfg.derived();
    let (r1, r2, al) = (cfg.r_d1, cfg.r_d2, cfg.alpha);
    let ans = cfg.a_n * cfg.p_s();
    let ring = r2 * r2 - r1 * r1;
    if x >= d.zeta_m1 {
        return Ok(1.0);
    }
    let growth = |r: f64| r * (r.powf(al) / ans).exp();
    let opts = QuadOptions::new(1e-12, 1e-300);
    let e = (-cfg.a_m * cfg.n_antennas as f64 / (x * cfg.a_n)).exp();
    if x > d.zeta_m2 {
        let c = cfg.a_m * cfg.p_s() * cfg.n_antennas as f64 / x - cfg.a_n * cfg.p_a() - 1.0;
        let t_m = c.powf(1.0 / al);
        let (lam, _) = integrate_finite_with(growth, r1, t_m, &opts, &[])?;
        Ok((r2 * r2 - t_m * t_m + d.b_1 * e * lam) / ring)
    } else {
        let (lam, _) = integrate_finite_with(growth, r1, r2, &opts, &[])?;
        Ok(d.b_1 * e * lam / ring)
    }
}

fn inf_eve_exponent(x: f64, kappa: User, cfg: &AnConfig) -> (f64, f64, f64, f64) {
    // (μ1, μ2, δ, P_A/(a_κ P_S)); no antenna count enters
    let delta = 2.0 / cfg.alpha;
    let (mu1, mu2) = crate::domain::eve_constants(cfg.lambda_e, cfg.share(kappa) * cfg.p_s(), cfg.alpha, cfg.r_p);
    let _ = x;
    (mu1, mu2, delta, cfg.p_a() / (cfg.share(kappa) * cfg.p_s()))
}

/// Large-antenna CDF of the most detrimental Eve's SINR: the AN leakage
/// concentrates at its mean P_A.
pub fn cdf_e_inf(x: f64, kappa: User, cfg: &AnConfig) -> f64 {
    let (mu1, mu2, delta, k) = inf_eve_exponent(x, kappa, cfg);
    if mu1 == 0.0 {
        return 1.0;
    }
    if x < crate::analytic_siso::EVE_X_FLOOR {
        return 0.0;
    }
    let ln_expo = mu1.ln() + ln_gamma_upper(delta, mu2 * x).unwrap_or(f64::NEG_INFINITY) - delta * x.ln() - k * x;
    (-ln_expo.exp()).exp()
}

/// Density matching [`cdf_e_inf`].
pub fn pdf_e_inf(x: f64, kappa: User, cfg: &AnConfig) -> f64 {
    let (mu1, mu2, delta, k) = inf_eve_exponent(x, kappa, cfg);
    if mu1 == 0.0 || x < crate::analytic_siso::EVE_X_FLOOR {
        return 0.0;
    }
    let ln_gu = ln_gamma_upper(delta, mu2 * x).unwrap_or(f64::NEG_INFINITY);
    let ln_expo = mu1.ln() + ln_gu - delta * x.ln() - k * x;
    let ln_a = delta * mu2.ln() + (delta - 1.0) * x.ln() - mu2 * x;
    let ln_b = ln_gu + (k + delta / x).ln();
    (mu1.ln() - delta * x.ln() - k * x + log_add(ln_a, ln_b) - ln_expo.exp()).exp()
}

/// Eve-SINR thresholds where a large-antenna user CDF has a kink.
fn large_breaks(cfg: &AnConfig, kappa: User) -> Vec<f64> {
    let d = cfg.derived();
    let s = cfg.rate(kappa).exp2();
    let edges = match kappa {
        User::N => [d.zeta_n, d.xi_n],
        User::M => [d.zeta_m2, d.zeta_m1],
    };
    edges.iter().map(|z| (z + 1.0) / s - 1.0).filter(|x| *x > 0.0).collect()
}

/// Large-antenna SOP of user n.
pub fn sop_n_inf(cfg: &AnConfig) -> Result<SopEstimate> {
    require_an(cfg, "the large-antenna analysis")?;
    an_sop(cfg, User::N, |x| cdf_bn_inf(x, cfg), false)
}

/// Large-antenna SOP of user m.
pub fn sop_m_inf(cfg: &AnConfig) -> Result<SopEstimate> {
    require_an(cfg, "the large-antenna analysis")?;
    an_sop(cfg, User::M, |x| cdf_bm_inf(x, cfg), false)
}

/// Large-antenna SOP of the pair.
pub fn sop_pair_inf(cfg: &AnConfig) -> Result<SopEstimate> {
    let p_m = sop_m_inf(cfg)?.value;
    let p_n = sop_n_inf(cfg)?.value;
    Ok(SopEstimate::exact(pair_probability(p_m, p_n), Method::Asymptotic))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::db_to_linear;
    use crate::specfun::{integrate_finite, integrate_semi_infinite};
    use approx::assert_relative_eq;

    fn fig4() -> AnConfig {
        AnConfig::default()
    }

    fn ln_gamma_moment(c: f64, scale: f64, shape: f64, i: u64) -> f64 {
        // ln E[e^{−c s G}(s G)^i], G ~ Gamma(shape, 1)
        ln_gamma(shape + i as f64) - ln_gamma(shape) + i as f64 * scale.ln() - (shape + i as f64) * (1.0 + c * scale).ln()
    }

    fn kernel_m_binomial(q: u64, c: f64, cfg: &AnConfig) -> f64 {
        let k = cfg.n_antennas as f64 - 1.0;
        (0..=q)
            .map(|j| {
                let a = ln_gamma_moment(c, cfg.p_s(), 1.0, j);
                let b = if cfg.theta >= 1.0 {
                    if q - j == 0 { 0.0 } else { f64::NEG_INFINITY }
                } else {
                    ln_gamma_moment(c, cfg.sigma_a2(), k, q - j)
                };
                (ln_binomial(q, j) + a + b).exp()
            })
            .sum()
    }

    fn gamma_tail(n: u64, t: f64) -> f64 {
        // P(Gamma(n) > t)
        (0..n).map(|p| (p as f64 * t.ln() - t - ln_factorial(p)).exp()).sum()
    }

    fn gamma_pdf(shape: f64, y: f64) -> f64 {
        if y <= 0.0 { 0.0 } else { ((shape - 1.0) * y.ln() - y - ln_gamma(shape)).exp() }
    }

    // F_Bn by nested quadrature over the user distance and the leakage Y.
    fn cdf_bn_quadrature(x: f64, cfg: &AnConfig) -> f64 {
        let n = cfg.n_antennas as u64;
        let c = cfg.derived().vartheta * x;
        let sa = cfg.sigma_a2();
        let inner = |r: f64| {
            let dd = (1.0 + r.powf(cfg.alpha)) / cfg.a_m;
            let (v, _) = integrate_semi_infinite(
                |y| gamma_pdf(n as f64 - 1.0, y) * gamma_tail(n, c * (sa * y + dd)),
                1e-11,
                1e-16,
            )
            .unwrap();
            2.0 * r * v / (cfg.r_d1 * cfg.r_d1)
        };
        let (s, _) = integrate_finite(inner, 0.0, cfg.r_d1, 1e-10, 1e-16).unwrap();
        1.0 - s
    }

    #[test]
    fn kernel_m_matches_binomial_route() {
        for theta in [0.1, 0.25 + 1e-4, 0.5, 0.8, 0.95, 1.0] {
            let cfg = AnConfig { theta, ..fig4() };
            for q in 0..4 {
                for c in [1e-6, 1e-3, 0.05, 1.0] {
                    let (sg, lk) = ln_kernel_user_m(q, c, &cfg);
                    assert_relative_eq!(sg * lk.exp(), kernel_m_binomial(q, c, &cfg), max_relative = 1e-9);
                }
            }
        }
    }

    #[test]
    fn kernel_m_large_antennas() {
        for theta in [0.3, 0.8] {
            let cfg = AnConfig { n_antennas: 40, theta, ..fig4() };
            for q in [0, 5, 39] {
                for c in [1e-4, 1e-2] {
                    let (sg, lk) = ln_kernel_user_m(q, c, &cfg);
                    let oracle = kernel_m_binomial(q, c, &cfg);
                    assert_relative_eq!(sg * lk.exp(), oracle, max_relative = 1e-6);
                }
            }
        }
    }

    #[test]
    fn crossover_branch_selected_and_continuous() {
        let base = AnConfig { theta: 0.25, ..fig4() };
        assert_eq!(kernel_branch(&base), KernelBranch::Equal);
        for x in [0.5, 2.0, 10.0, 40.0] {
            let at = cdf_bm_an(x, &base).unwrap();
            for off in [-1e-6, 1e-6] {
                let near = AnConfig { theta: 0.25 + off, ..fig4() };
                assert_eq!(kernel_branch(&near), KernelBranch::Distinct);
                assert!((cdf_bm_an(x, &near).unwrap() - at).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn cdf_bn_matches_nested_quadrature() {
        for theta in [0.5, 0.8] {
            let cfg = AnConfig { theta, ..fig4() };
            for x in [0.3, 3.0, 20.0, 60.0] {
                assert_relative_eq!(cdf_bn_an(x, &cfg).unwrap(), cdf_bn_quadrature(x, &cfg), epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn cdf_bn_without_an_is_the_limit() {
        let on = AnConfig { theta: 1.0 - 1e-9, ..fig4() };
        let off = AnConfig { theta: 1.0, ..fig4() };
        for x in [1.0, 10.0, 100.0] {
            assert_relative_eq!(cdf_bn_an(x, &on).unwrap(), cdf_bn_an(x, &off).unwrap(), epsilon = 1e-6);
            assert_relative_eq!(cdf_bm_an(x, &on).unwrap(), cdf_bm_an(x, &off).unwrap(), epsilon = 1e-6);
        }
    }

    #[test]
    fn user_cdfs_limits_and_monotone() {
        for theta in [0.25, 0.5, 0.8, 1.0] {
            let cfg = AnConfig { theta, ..fig4() };
            assert_eq!(cdf_bn_an(0.0, &cfg).unwrap(), 0.0);
            assert_eq!(cdf_bm_an(0.0, &cfg).unwrap(), 0.0);
            assert!(cdf_bn_an(1e7, &cfg).unwrap() > 1.0 - 1e-9);
            assert!(cdf_bm_an(1e7, &cfg).unwrap() > 1.0 - 1e-9);
            let mut prev = (0.0, 0.0);
            for i in 1..=200 {
                let x = 10f64.powf(-3.0 + 6.0 * i as f64 / 200.0);
                let cur = (cdf_bn_an(x, &cfg).unwrap(), cdf_bm_an(x, &cfg).unwrap());
                assert!(cur.0 >= prev.0 - 1e-12 && cur.1 >= prev.1 - 1e-12, "theta {theta} x {x}");
                prev = cur;
            }
        }
    }

    #[test]
    fn gig_moments() {
        for (n, theta) in [(3, 0.5), (4, 0.8), (8, 0.3)] {
            let cfg = AnConfig { n_antennas: n, theta, ..fig4() };
            let sa = cfg.sigma_a2();
            let opts = QuadOptions::new(1e-12, 1e-300);
            let moment = |k: i32| {
                crate::specfun::integrate_semi_infinite_with(|z| z.powi(k) * gig_pdf(z, &cfg).unwrap(), &opts, &[cfg.p_a()])
                    .unwrap()
                    .0
            };
            assert_relative_eq!(moment(0), 1.0, epsilon = 1e-6);
            let mean = moment(1);
            assert_relative_eq!(mean, cfg.p_a(), max_relative = 1e-9);
            let var = moment(2) - mean * mean;
            let want = (n as f64 - 1.0) * (cfg.a_m.powi(2) + cfg.a_n.powi(2)) * sa * sa;
            assert_relative_eq!(var, want, max_relative = 1e-9);
        }
        assert!(gig_pdf(1.0, &AnConfig { theta: 1.0, ..fig4() }).is_err());
    }

    #[test]
    fn laplace_routes_agree() {
        // the expansion loses about a digit per extra antenna
        for (n, tol) in [(3, 1e-10), (5, 1e-8), (8, 1e-5)] {
            let cfg = AnConfig { n_antennas: n, ..fig4() };
            for s in [1e-4, 1e-2, 0.3, 5.0] {
                let a = eve_interference_laplace(s, &cfg, LaplaceRoute::Product);
                let b = eve_interference_laplace(s, &cfg, LaplaceRoute::PartialFractions);
                assert_relative_eq!(a, b, max_relative = tol, epsilon = tol);
            }
        }
    }

    fn mass(pdf: impl Fn(f64) -> f64) -> f64 {
        let breaks: Vec<f64> = (-8..=8).map(|e| 10f64.powi(e)).collect();
        crate::specfun::integrate_semi_infinite_with(pdf, &QuadOptions::new(1e-11, 1e-300), &breaks).unwrap().0
    }

    #[test]
    fn eve_pdfs_normalized_and_consistent() {
        for (theta, lambda) in [(0.8, 1e-4), (0.5, 1e-3), (1.0, 1e-4)] {
            let cfg = AnConfig { theta, lambda_e: lambda, ..fig4() };
            for k in [User::M, User::N] {
                assert_relative_eq!(mass(|x| pdf_e_an(x, k, &cfg)), 1.0, epsilon = 1e-6);
                if theta < 1.0 {
                    assert_relative_eq!(mass(|x| pdf_e_inf(x, k, &cfg)), 1.0, epsilon = 1e-6);
                }
                for x in [1e-3, 0.05, 1.0] {
                    let h = x * 1e-5;
                    let fd = (cdf_e_an(x + h, k, &cfg) - cdf_e_an(x - h, k, &cfg)) / (2.0 * h);
                    assert_relative_eq!(pdf_e_an(x, k, &cfg), fd, max_relative = 1e-5, epsilon = 1e-12);
                    if theta < 1.0 {
                        let fd = (cdf_e_inf(x + h, k, &cfg) - cdf_e_inf(x - h, k, &cfg)) / (2.0 * h);
                        assert_relative_eq!(pdf_e_inf(x, k, &cfg), fd, max_relative = 1e-5, epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn eve_cdf_limits() {
        let cfg = fig4();
        assert!(cdf_e_an(1e9, User::M, &cfg) > 1.0 - 1e-12);
        assert!(cdf_e_an(1e-8, User::M, &cfg) < 1e-20);
        assert_eq!(cdf_e_an(1.0, User::M, &AnConfig { lambda_e: 0.0, ..cfg }), 1.0);
    }

    #[test]
    fn large_antenna_eve_has_no_antenna_dependence() {
        let a = AnConfig { n_antennas: 8, ..fig4() };
        let b = AnConfig { n_antennas: 128, ..fig4() };
        for x in [1e-4, 0.01, 0.3, 2.0] {
            for k in [User::M, User::N] {
                assert_eq!(pdf_e_inf(x, k, &a).to_bits(), pdf_e_inf(x, k, &b).to_bits());
                assert_eq!(cdf_e_inf(x, k, &a).to_bits(), cdf_e_inf(x, k, &b).to_bits());
            }
        }
    }

    #[test]
    fn large_antenna_user_cdfs_piecewise() {
        let cfg = AnConfig { n_antennas: 64, p_t: db_to_linear(20.0), ..fig4() };
        let d = cfg.derived();
        assert_relative_eq!(cdf_bn_inf(d.zeta_n, &cfg).unwrap(), 0.0, epsilon = 1e-12);
        assert_relative_eq!(cdf_bn_inf(d.xi_n, &cfg).unwrap(), 1.0, epsilon = 1e-6);
        assert_eq!(cdf_bm_inf(d.zeta_m1, &cfg).unwrap(), 1.0);
        assert_eq!(cdf_bm_inf(2.0 * d.zeta_m1, &cfg).unwrap(), 1.0);
        let lo = cdf_bm_inf(d.zeta_m2 * (1.0 - 1e-12), &cfg).unwrap();
        let hi = cdf_bm_inf(d.zeta_m2 * (1.0 + 1e-12), &cfg).unwrap();
        assert!((lo - hi).abs() < 1e-9);
        let mut prev = (0.0, 0.0);
        for i in 1..=200 {
            let x = d.zeta_m2 * 0.2 + (d.xi_n * 1.2) * i as f64 / 200.0;
            let cur = (cdf_bn_inf(x, &cfg).unwrap(), cdf_bm_inf(x, &cfg).unwrap());
            assert!(cur.0 >= prev.0 && cur.1 >= prev.1 - 1e-12);
            prev = cur;
        }
        for i in 1..100 {
            let x = d.zeta_m1 * i as f64 / 100.0;
            let a = cdf_bm_inf(x, &cfg).unwrap();
            let b = cdf_bm_inf_piecewise(x, &cfg).unwrap();
            assert_relative_eq!(a, b, epsilon = 1e-6);
        }
        assert!(cdf_bn_inf(1.0, &AnConfig { theta: 1.0, ..cfg }).is_err());
    }

    #[test]
    fn sop_ordering_and_pair() {
        for r_p in [4.0, 5.0] {
            let cfg = AnConfig { r_p, ..fig4() };
            let m = sop_m_an(&cfg).unwrap().value;
            let n = sop_n_an(&cfg).unwrap().value;
            assert!(n < m, "r_p {r_p}: {n} vs {m}");
            assert_relative_eq!(sop_pair_an(&cfg).unwrap().value, pair_probability(m, n), epsilon = 1e-15);
        }
    }

    #[test]
    fn sop_without_eves_is_user_outage() {
        let cfg = AnConfig { lambda_e: 0.0, ..fig4() };
        let v = sop_n_an(&cfg).unwrap().value;
        assert_relative_eq!(v, cdf_bn_an(0.1f64.exp2() - 1.0, &cfg).unwrap(), epsilon = 1e-15);
        let inf = sop_n_inf(&AnConfig { n_antennas: 64, ..cfg }).unwrap().value;
        assert_eq!(inf, 0.0);
    }

    #[test]
    fn sop_theta_interior_minimum() {
        let grid: Vec<f64> = (1..40).map(|i| 0.025 * i as f64).collect();
        let vals: Vec<f64> =
            grid.iter().map(|&theta| sop_n_an(&AnConfig { theta, ..fig4() }).unwrap().value).collect();
        let (imin, _) = vals.iter().enumerate().fold((0, f64::MAX), |a, (i, v)| if *v < a.1 { (i, *v) } else { a });
        assert!(imin > 0 && imin < grid.len() - 1, "{vals:?}");
    }
}
