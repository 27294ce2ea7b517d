//! Scenario configurations, derived constants and the SINR / secrecy formulas
//! shared by the analytic and Monte Carlo paths.
//!
//! All powers and SNRs are linear. Noise variances are 1, so the AN total
//! power `p_t` doubles as the transmit SNR.

use crate::error::{invalid, Error, Result};
use num_complex::Complex64;

/// dB → linear.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// linear → dB.
pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

/// Which user of the NOMA pair a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum User {
    /// The weaker (cell-edge) user, allotted the larger power share.
    M,
    /// The stronger user, which runs SIC.
    N,
}

impl User {
    pub fn as_str(self) -> &'static str {
        match self {
            User::M => "m",
            User::N => "n",
        }
    }
}

/// How an SOP value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Analytic,
    Asymptotic,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::Asymptotic => "asymptotic",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

/// A secrecy outage probability with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SopEstimate {
    pub value: f64,
    /// Standard error; 0 for closed forms.
    pub stderr: f64,
    /// Trial count; 0 for closed forms.
    pub trials: u64,
    pub method: Method,
}

impl SopEstimate {
    pub fn exact(value: f64, method: Method) -> Self {
        SopEstimate { value, stderr: 0.0, trials: 0, method }
    }

    pub fn monte_carlo(hits: u64, trials: u64) -> Self {
        let p = hits as f64 / trials as f64;
        SopEstimate { value: p, stderr: (p * (1.0 - p) / trials as f64).sqrt(), trials, method: Method::MonteCarlo }
    }
}

/// Single-antenna scenario with M ordered users, of which the m-th and n-th are paired.
#[derive(Debug, Clone, PartialEq)]
pub struct SisoConfig {
    /// Total number of users M.
    pub users: usize,
    pub m: usize,
    pub n: usize,
    pub a_m: f64,
    pub a_n: f64,
    pub rho_b: f64,
    pub rho_e: f64,
    pub alpha: f64,
    pub r_d: f64,
    pub r_p: f64,
    pub lambda_e: f64,
    pub rate_m: f64,
    pub rate_n: f64,
    /// Chebyshev term count.
    pub k: usize,
    /// Radius of the simulated Eve field.
    pub r_e: f64,
}

impl Default for SisoConfig {
    fn default() -> Self {
        SisoConfig {
            users: 2,
            m: 1,
            n: 2,
            a_m: 0.6,
            a_n: 0.4,
            rho_b: db_to_linear(40.0),
            rho_e: db_to_linear(10.0),
            alpha: 4.0,
            r_d: 10.0,
            r_p: 10.0,
            lambda_e: 1e-3,
            rate_m: 0.1,
            rate_n: 0.1,
            k: 20,
            r_e: 1000.0,
        }
    }
}

fn check_shares(a_m: f64, a_n: f64) -> Result<()> {
    if !(a_n > 0.0) {
        return Err(invalid("a_n", "a_n > 0 required"));
    }
    if !(a_m > a_n) {
        return Err(invalid("a_m", "a_m > a_n required"));
    }
    if (a_m + a_n - 1.0).abs() > 1e-9 {
        return Err(invalid("a_m", "a_m + a_n = 1 required"));
    }
    Ok(())
}

fn check_common(alpha: f64, r_p: f64, r_e: f64, lambda_e: f64, rate_m: f64, rate_n: f64) -> Result<()> {
    if !(alpha > 2.0) {
        return Err(invalid("alpha", "alpha > 2 required"));
    }
    if !(r_p > 1.0) {
        return Err(invalid("r_p", "r_p > 1 required"));
    }
    if !(r_e >= r_p) || !r_e.is_finite() {
        return Err(invalid("R_E", "R_E >= r_p required"));
    }
    if !(lambda_e >= 0.0) || !lambda_e.is_finite() {
        return Err(invalid("lambda_e", "lambda_e >= 0 required"));
    }
    if !(rate_m >= 0.0) {
        return Err(invalid("R_m", "R_m >= 0 required"));
    }
    if !(rate_n >= 0.0) {
        return Err(invalid("R_n", "R_n >= 0 required"));
    }
    Ok(())
}

impl SisoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.users < 2 {
            return Err(invalid("M", "M >= 2 required"));
        }
        if !(1 <= self.m && self.m < self.n && self.n <= self.users) {
            return Err(invalid("m", "1 <= m < n <= M required"));
        }
        check_shares(self.a_m, self.a_n)?;
        if !(self.rho_b > 0.0) || !self.rho_b.is_finite() {
            return Err(invalid("rho_b", "rho_b > 0 required"));
        }
        if !(self.rho_e > 0.0) || !self.rho_e.is_finite() {
            return Err(invalid("rho_e", "rho_e > 0 required"));
        }
        if !(self.r_d > 0.0) {
            return Err(invalid("R_D", "R_D > 0 required"));
        }
        if self.k < 1 {
            return Err(invalid("K", "K >= 1 required"));
        }
        check_common(self.alpha, self.r_p, self.r_e, self.lambda_e, self.rate_m, self.rate_n)
    }

    pub fn share(&self, u: User) -> f64 {
        match u {
            User::M => self.a_m,
            User::N => self.a_n,
        }
    }

    pub fn rate(&self, u: User) -> f64 {
        match u {
            User::M => self.rate_m,
            User::N => self.rate_n,
        }
    }

    pub fn derived(&self) -> Result<DerivedSiso> {
        DerivedSiso::new(self)
    }
}

/// Multiple-antenna scenario with artificial noise.
#[derive(Debug, Clone, PartialEq)]
pub struct AnConfig {
    pub n_antennas: usize,
    /// Fraction of `p_t` spent on the information signal.
    pub theta: f64,
    pub p_t: f64,
    pub a_m: f64,
    pub a_n: f64,
    pub alpha: f64,
    pub r_d1: f64,
    pub r_d2: f64,
    pub r_p: f64,
    pub lambda_e: f64,
    pub rate_m: f64,
    pub rate_n: f64,
    pub r_e: f64,
}

impl Default for AnConfig {
    fn default() -> Self {
        AnConfig {
            n_antennas: 4,
            theta: 0.8,
            p_t: db_to_linear(30.0),
            a_m: 0.6,
            a_n: 0.4,
            alpha: 4.0,
            r_d1: 5.0,
            r_d2: 10.0,
            r_p: 4.0,
            lambda_e: 1e-4,
            rate_m: 0.1,
            rate_n: 0.1,
            r_e: 1000.0,
        }
    }
}

impl AnConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_antennas < 3 {
            return Err(invalid("N_A", "N_A > 2 required"));
        }
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(invalid("theta", "theta in (0, 1] required"));
        }
        if !(self.p_t > 0.0) || !self.p_t.is_finite() {
            return Err(invalid("P_T", "P_T > 0 required"));
        }
        check_shares(self.a_m, self.a_n)?;
        if !(self.r_d1 > 0.0) {
            return Err(invalid("R_D1", "R_D1 > 0 required"));
        }
        if !(self.r_d2 > self.r_d1) {
            return Err(invalid("R_D2", "R_D2 > R_D1 required"));
        }
        check_common(self.alpha, self.r_p, self.r_e, self.lambda_e, self.rate_m, self.rate_n)
    }

    pub fn p_s(&self) -> f64 {
        self.theta * self.p_t
    }

    pub fn p_a(&self) -> f64 {
        (1.0 - self.theta) * self.p_t
    }

    pub fn sigma_s2(&self) -> f64 {
        self.p_s()
    }

    /// AN power per null-space dimension.
    pub fn sigma_a2(&self) -> f64 {
        self.p_a() / (self.n_antennas as f64 - 1.0)
    }

    pub fn share(&self, u: User) -> f64 {
        match u {
            User::M => self.a_m,
            User::N => self.a_n,
        }
    }

    pub fn rate(&self, u: User) -> f64 {
        match u {
            User::M => self.rate_m,
            User::N => self.rate_n,
        }
    }

    pub fn derived(&self) -> DerivedAn {
        DerivedAn::new(self)
    }
}

/// Constants derived from a [`SisoConfig`].
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedSiso {
    pub delta: f64,
    pub varphi_m: f64,
    pub varphi_n: f64,
    pub mu_m1: f64,
    pub mu_m2: f64,
    pub mu_n1: f64,
    pub mu_n2: f64,
    pub tau_m: f64,
    pub ell: f64,
    pub g_m: f64,
    pub g_n: f64,
    pub d_m: u32,
    pub d_n: u32,
}

/// `M!/((M−k)!(k−1)!)`.
pub fn order_constant(users: usize, k: usize) -> f64 {
    // k·C(M, k)
    k as f64 * crate::specfun::binomial(users as u64, k as u64)
}

/// `(δπλ(ρa)^δ, r_p^α/(ρa))` for the most detrimental Eve's SNR law.
pub fn eve_constants(lambda_e: f64, power: f64, alpha: f64, r_p: f64) -> (f64, f64) {
    let delta = 2.0 / alpha;
    (delta * std::f64::consts::PI * lambda_e * power.powf(delta), r_p.powf(alpha) / power)
}

impl DerivedSiso {
    pub fn new(cfg: &SisoConfig) -> Result<Self> {
        cfg.validate()?;
        let delta = 2.0 / cfg.alpha;
        let (mu_m1, mu_m2) = eve_constants(cfg.lambda_e, cfg.rho_e * cfg.a_m, cfg.alpha, cfg.r_p);
        let (mu_n1, mu_n2) = eve_constants(cfg.lambda_e, cfg.rho_e * cfg.a_n, cfg.alpha, cfg.r_p);
        let varphi_m = order_constant(cfg.users, cfg.m);
        let varphi_n = order_constant(cfg.users, cfg.n);
        let (q1, q2) = crate::analytic_siso::asymptotic_integrals(cfg)?;
        Ok(DerivedSiso {
            delta,
            varphi_m,
            varphi_n,
            mu_m1,
            mu_m2,
            mu_n1,
            mu_n2,
            tau_m: 1.0 / (2f64.powf(cfg.rate_m) * (1.0 - cfg.a_m)) - 1.0,
            ell: 1.0 + 2.0 * cfg.r_d.powf(cfg.alpha) / (cfg.alpha + 2.0),
            g_m: varphi_m * q2 / cfg.m as f64,
            g_n: varphi_n * q1 / cfg.n as f64,
            d_m: cfg.m as u32,
            d_n: cfg.n as u32,
        })
    }
}

/// Constants derived from an [`AnConfig`]. Prefactors that overflow for large
/// antenna counts are also kept as logarithms.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedAn {
    pub delta: f64,
    pub vartheta: f64,
    pub nu: f64,
    pub b_1: f64,
    pub b_2: f64,
    pub ln_b_2: f64,
    pub a_1: f64,
    pub a_2: f64,
    pub ln_a_2: f64,
    pub tau_1: f64,
    pub tau_2: f64,
    pub mu_an_m1: f64,
    pub mu_an_m2: f64,
    pub mu_an_n1: f64,
    pub mu_an_n2: f64,
    pub zeta_n: f64,
    pub xi_n: f64,
    pub zeta_m1: f64,
    pub zeta_m2: f64,
    /// Upper SINR bound of user m in the large-antenna limit. It does not enter
    /// the CDF itself: the CDF already reaches 1 at `zeta_m1`.
    pub xi_m: f64,
}

impl DerivedAn {
    pub fn new(cfg: &AnConfig) -> Self {
        use crate::specfun::{ln_factorial, ln_gamma};
        let n = cfg.n_antennas as f64;
        let (ps, pa) = (cfg.p_s(), cfg.p_a());
        let delta = 2.0 / cfg.alpha;
        let area1 = cfg.r_d1 * cfg.r_d1;
        let ring = cfg.r_d2 * cfg.r_d2 - area1;
        let ln_b_2 = delta.ln() - area1.ln() - ln_gamma(n - 1.0) - (n - 1.0) * (pa / (n - 1.0)).ln();
        let ln_a_2 = delta.ln() - ring.ln() - n * ps.ln() - ln_factorial(cfg.n_antennas as u64 - 1);
        let a_1 = delta * (1.0 - pa / ((n - 1.0) * ps)).powf(1.0 - n) / (ring * ps);
        let (mu_an_m1, mu_an_m2) = eve_constants(cfg.lambda_e, cfg.a_m * ps, cfg.alpha, cfg.r_p);
        let (mu_an_n1, mu_an_n2) = eve_constants(cfg.lambda_e, cfg.a_n * ps, cfg.alpha, cfg.r_p);
        let r1a = cfg.r_d1.powf(cfg.alpha);
        let r2a = cfg.r_d2.powf(cfg.alpha);
        DerivedAn {
            delta,
            vartheta: cfg.a_m / (cfg.a_n * ps),
            nu: cfg.a_n / (cfg.a_m * ps),
            b_1: 2.0 * ((cfg.a_n * pa + 1.0) / (cfg.a_n * ps)).exp(),
            b_2: ln_b_2.exp(),
            ln_b_2,
            a_1,
            a_2: ln_a_2.exp(),
            ln_a_2,
            tau_1: (n - 1.0) / (cfg.a_m * pa),
            tau_2: (n - 1.0) / (cfg.a_n * pa),
            mu_an_m1,
            mu_an_m2,
            mu_an_n1,
            mu_an_n2,
            zeta_n: cfg.a_n * ps * n / (r1a + cfg.a_m * pa + 1.0),
            xi_n: cfg.a_n * ps * n / (cfg.a_m * pa + 1.0),
            zeta_m1: cfg.a_m * ps * n / (r1a + cfg.a_n * pa + 1.0),
            zeta_m2: cfg.a_m * ps * n / (r2a + cfg.a_n * pa + 1.0),
            xi_m: cfg.a_m * ps * n / (cfg.a_n * pa + 1.0),
        }
    }

    pub fn mu(&self, u: User) -> (f64, f64) {
        match u {
            User::M => (self.mu_an_m1, self.mu_an_m2),
            User::N => (self.mu_an_n1, self.mu_an_n2),
        }
    }
}

/// SINR of user m, which decodes its own signal treating user n's as noise.
pub fn siso_sinr_m(h2_m: f64, cfg: &SisoConfig) -> f64 {
    if h2_m.is_infinite() {
        return cfg.a_m / cfg.a_n;
    }
    cfg.a_m * h2_m / (cfg.a_n * h2_m + 1.0 / cfg.rho_b)
}

/// SNR of user n after perfect SIC.
pub fn siso_snr_n(h2_n: f64, cfg: &SisoConfig) -> f64 {
    cfg.rho_b * cfg.a_n * h2_n
}

/// True iff the secrecy rate `[log2(1+γ_B) − log2(1+γ_E)]⁺` falls below `rate`.
///
/// Evaluated as `1 + γ_B < 2^R (1 + γ_E)`, which is the same event for R > 0
/// and is the threshold the analytic integrals use.
pub fn secrecy_outage(gamma_b: f64, gamma_e: f64, rate: f64) -> bool {
    1.0 + gamma_b < rate.exp2() * (1.0 + gamma_e)
}

/// Beam `u = h†/‖h‖` and an orthonormal basis `v` of its orthogonal complement,
/// stored column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    pub u: Vec<Complex64>,
    pub v: Vec<Vec<Complex64>>,
}

/// Squared Euclidean norm.
pub fn norm_sqr(h: &[Complex64]) -> f64 {
    h.iter().map(|z| z.norm_sqr()).sum()
}

/// Row vector times column vector, no conjugation.
pub fn dot(h: &[Complex64], u: &[Complex64]) -> Complex64 {
    h.iter().zip(u).map(|(a, b)| a * b).sum()
}

/// `‖h V‖²` for a matrix stored by columns.
pub fn proj_norm_sqr(h: &[Complex64], v: &[Vec<Complex64>]) -> f64 {
    v.iter().map(|col| dot(h, col).norm_sqr()).sum()
}

/// Householder construction of `[u, V]`.
pub fn orthonormal_completion(h: &[Complex64]) -> Result<Precoder> {
    let nrm = norm_sqr(h).sqrt();
    if !(nrm > 0.0) || h.is_empty() {
        return Err(Error::Degenerate("channel vector has zero norm".into()));
    }
    let u: Vec<Complex64> = h.iter().map(|z| z.conj() / nrm).collect();
    let phase = if u[0].norm() > 0.0 { u[0] / u[0].norm() } else { Complex64::new(1.0, 0.0) };
    // H = I − 2ww†/‖w‖² with w = u + phase·e_1 maps e_1 onto a multiple of u,
    // so H's remaining columns span the complement.
    let mut w = u.clone();
    w[0] += phase;
    let wn = norm_sqr(&w);
    let dim = h.len();
    let v = (1..dim)
        .map(|j| {
            let s = w[j].conj() * (2.0 / wn);
            (0..dim)
                .map(|i| {
                    let e = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
                    e - w[i] * s
                })
                .collect()
        })
        .collect();
    Ok(Precoder { u, v })
}

/// `(γ_Bm, γ_Bn)` for explicit channels and distances.
pub fn an_sinrs(h_m: &[Complex64], h_n: &[Complex64], d_m: f64, d_n: f64, cfg: &AnConfig) -> Result<(f64, f64)> {
    let pm = orthonormal_completion(h_m)?;
    let pn = orthonormal_completion(h_n)?;
    let (ss, sa) = (cfg.sigma_s2(), cfg.sigma_a2());
    let gm = cfg.a_m * ss * norm_sqr(h_m)
        / (cfg.a_n * ss * dot(h_m, &pn.u).norm_sqr()
            + cfg.a_n * sa * proj_norm_sqr(h_m, &pn.v)
            + 1.0
            + d_m.powf(cfg.alpha));
    let gn = cfg.a_n * ss * norm_sqr(h_n) / (cfg.a_m * sa * proj_norm_sqr(h_n, &pm.v) + 1.0 + d_n.powf(cfg.alpha));
    Ok((gm, gn))
}

/// SINR of one Eve trying to decode user `kappa`.
#[allow(clippy::too_many_arguments)]
pub fn an_eve_sinr(
    h_e: &[Complex64],
    u_m: &[Complex64],
    u_n: &[Complex64],
    v_m: &[Vec<Complex64>],
    v_n: &[Vec<Complex64>],
    d_e: f64,
    kappa: User,
    cfg: &AnConfig,
) -> f64 {
    let sa = cfg.sigma_a2();
    let interference = cfg.a_m * sa * proj_norm_sqr(h_e, v_m) + cfg.a_n * sa * proj_norm_sqr(h_e, v_n);
    let u = match kappa {
        User::M => u_m,
        User::N => u_n,
    };
    cfg.share(kappa) * cfg.sigma_s2() * dot(h_e, u).norm_sqr() / (interference + d_e.powf(cfg.alpha))
}
