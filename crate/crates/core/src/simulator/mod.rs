//! Monte Carlo oracle for both scenarios.
//!
//! Trial `i` of a run draws everything from its own stream
//! [`rng::trial_rng`]`(seed, i)`, and runs aggregate integer counters, so a
//! report depends only on (config, trials, seed).

pub mod empirical;
pub mod eve;
pub mod rng;

use std::io::Write;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use crate::domain::{norm_sqr, secrecy_outage, siso_sinr_m, siso_snr_n, AnConfig, SisoConfig, SopEstimate};
use crate::error::{invalid, Result};

pub use empirical::EmpiricalCdf;
pub use eve::{sample_eve_field, EveGeometry};

const CHUNK: u64 = 4096;

/// One realization of both users and the Eve field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub outage_m: bool,
    pub outage_n: bool,
    pub gamma_bm: f64,
    pub gamma_bn: f64,
    pub gamma_em: f64,
    pub gamma_en: f64,
}

impl TrialOutcome {
    fn new(gamma_bm: f64, gamma_bn: f64, gamma_em: f64, gamma_en: f64, rate_m: f64, rate_n: f64) -> Self {
        TrialOutcome {
            outage_m: secrecy_outage(gamma_bm, gamma_em, rate_m),
            outage_n: secrecy_outage(gamma_bn, gamma_en, rate_n),
            gamma_bm,
            gamma_bn,
            gamma_em,
            gamma_en,
        }
    }
}

/// Aggregated Monte Carlo estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub sop_m: SopEstimate,
    pub sop_n: SopEstimate,
    pub sop_pair: SopEstimate,
    pub seed: u64,
    pub trials: u64,
    pub elapsed: f64,
}

impl RunReport {
    /// Same estimates, ignoring wall-clock time.
    pub fn same_estimates(&self, other: &RunReport) -> bool {
        self.sop_m == other.sop_m && self.sop_n == other.sop_n && self.sop_pair == other.sop_pair
    }
}

/// Per-run state shared by all SISO trials.
struct SisoSampler<'a> {
    cfg: &'a SisoConfig,
    eves: EveGeometry,
}

impl<'a> SisoSampler<'a> {
    fn new(cfg: &'a SisoConfig) -> Self {
        SisoSampler { cfg, eves: EveGeometry::new(cfg.lambda_e, cfg.r_p, cfg.r_e) }
    }

    fn trial<R: Rng>(&self, rng: &mut R, gains: &mut Vec<f64>) -> TrialOutcome {
        let c = self.cfg;
        gains.clear();
        for _ in 0..c.users {
            let d = c.r_d * rng.random::<f64>().sqrt();
            let fade: f64 = Exp1.sample(rng);
            gains.push(fade / (1.0 + d.powf(c.alpha)));
        }
        gains.sort_by(f64::total_cmp);
        let gbm = siso_sinr_m(gains[c.m - 1], c);
        let gbn = siso_snr_n(gains[c.n - 1], c);
        let eve = self.eves.max_exponential_gain(c.alpha, rng);
        TrialOutcome::new(gbm, gbn, c.rho_e * c.a_m * eve, c.rho_e * c.a_n * eve, c.rate_m, c.rate_n)
    }
}

/// Per-trial AN quantities beyond the outcome, kept for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnDraw {
    pub outcome: TrialOutcome,
    /// AN leakage energy `‖h_m V_n‖²` and `‖h_n V_m‖²` before scaling by σ_a².
    pub leak_m: f64,
    pub leak_n: f64,
}

struct AnSampler<'a> {
    cfg: &'a AnConfig,
    eves: EveGeometry,
    residual: Option<rand_distr::Gamma<f64>>,
}

fn channel<R: Rng>(n: usize, rng: &mut R, out: &mut Vec<Complex64>) {
    out.clear();
    out.extend((0..n).map(|_| eve::complex_normal(rng)));
}

impl<'a> AnSampler<'a> {
    fn new(cfg: &'a AnConfig) -> Self {
        AnSampler {
            cfg,
            eves: EveGeometry::new(cfg.lambda_e, cfg.r_p, cfg.r_e),
            residual: eve::residual_energy(cfg.n_antennas as f64 - 2.0),
        }
    }

    fn trial<R: Rng>(&self, rng: &mut R, hm: &mut Vec<Complex64>, hn: &mut Vec<Complex64>) -> AnDraw {
        let c = self.cfg;
        let (r1, r2) = (c.r_d1, c.r_d2);
        let d_n = r1 * rng.random::<f64>().sqrt();
        let d_m = (r1 * r1 + rng.random::<f64>() * (r2 * r2 - r1 * r1)).sqrt();
        channel(c.n_antennas, rng, hm);
        channel(c.n_antennas, rng, hn);
        let (nm, nn) = (norm_sqr(hm), norm_sqr(hn));
        // h_m·u_n = ⟨h_m, h_n⟩/‖h_n‖ with u = h†/‖h‖; [u V] is unitary so
        // ‖h V‖² = ‖h‖² − |h·u|².
        let cross: Complex64 = hm.iter().zip(hn.iter()).map(|(a, b)| a * b.conj()).sum();
        let x2 = cross.norm_sqr();
        let hm_un = x2 / nn;
        let hn_um = x2 / nm;
        let leak_m = (nm - hm_un).max(0.0);
        let leak_n = (nn - hn_um).max(0.0);
        let (ps, sa) = (c.p_s(), c.sigma_a2());
        let gbm = c.a_m * ps * nm / (c.a_n * ps * hm_un + c.a_n * sa * leak_m + 1.0 + d_m.powf(c.alpha));
        let gbn = c.a_n * ps * nn / (c.a_m * sa * leak_n + 1.0 + d_n.powf(c.alpha));

        // Eve channels in the basis {u_m, w, …} with u_n = β u_m + γ w.
        let beta = cross / (nm * nn).sqrt();
        let gamma = (1.0 - beta.norm_sqr()).max(0.0).sqrt();
        let residual = self.residual;
        let eval = |w: f64, d: f64, rng: &mut R| {
            let (c1, c2) = eve::split_c2(w, rng);
            let g = residual.map_or(0.0, |r| r.sample(rng));
            let total = w + g;
            let e_m = c1.norm_sqr();
            let e_n = (beta * c1 + c2 * gamma).norm_sqr();
            let interference = sa * (c.a_m * (total - e_m) + c.a_n * (total - e_n));
            let den = interference + d.powf(c.alpha);
            (c.a_m * ps * e_m / den, c.a_n * ps * e_n / den)
        };
        let bound = |w: f64, a: f64| {
            let base = ps * w / a.powf(c.alpha);
            (c.a_m * base, c.a_n * base)
        };
        let (gem, gen) = self.eves.max_an(rng, eval, bound);
        AnDraw { outcome: TrialOutcome::new(gbm, gbn, gem, gen, c.rate_m, c.rate_n), leak_m, leak_n }
    }
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(invalid("trials", "trials >= 1 required"));
    }
    Ok(())
}

fn in_pool<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> T {
    match workers {
        None => job(),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .expect("thread pool")
            .install(job),
    }
}

fn tally<F>(trials: u64, seed: u64, workers: Option<usize>, per_chunk: F) -> RunReport
where
    F: Fn(std::ops::Range<u64>, &mut [u64; 3]) + Sync + Send,
{
    let start = Instant::now();
    let chunks = trials.div_ceil(CHUNK);
    let counts = in_pool(workers, || {
        (0..chunks)
            .into_par_iter()
            .map(|k| {
                let mut c = [0u64; 3];
                per_chunk(k * CHUNK..((k + 1) * CHUNK).min(trials), &mut c);
                c
            })
            .reduce(|| [0; 3], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2]])
    });
    RunReport {
        sop_m: SopEstimate::monte_carlo(counts[0], trials),
        sop_n: SopEstimate::monte_carlo(counts[1], trials),
        sop_pair: SopEstimate::monte_carlo(counts[2], trials),
        seed,
        trials,
        elapsed: start.elapsed().as_secs_f64(),
    }
}

fn count(c: &mut [u64; 3], o: &TrialOutcome) {
    c[0] += o.outage_m as u64;
    c[1] += o.outage_n as u64;
    c[2] += (o.outage_m || o.outage_n) as u64;
}

/// Secrecy outage estimates for the SISO scenario.
pub fn run_siso(cfg: &SisoConfig, trials: u64, seed: u64) -> Result<RunReport> {
    run_siso_with_workers(cfg, trials, seed, None)
}

/// [`run_siso`] on a dedicated pool of `workers` threads (`None`: global pool).
pub fn run_siso_with_workers(cfg: &SisoConfig, trials: u64, seed: u64, workers: Option<usize>) -> Result<RunReport> {
    cfg.validate()?;
    check_trials(trials)?;
    let s = SisoSampler::new(cfg);
    Ok(tally(trials, seed, workers, |range, c| {
        let mut buf = Vec::with_capacity(cfg.users);
        for i in range {
            count(c, &s.trial(&mut rng::trial_rng(seed, i), &mut buf));
        }
    }))
}

/// Secrecy outage estimates for the AN scenario.
pub fn run_an(cfg: &AnConfig, trials: u64, seed: u64) -> Result<RunReport> {
    run_an_with_workers(cfg, trials, seed, None)
}

/// [`run_an`] on a dedicated pool of `workers` threads (`None`: global pool).
pub fn run_an_with_workers(cfg: &AnConfig, trials: u64, seed: u64, workers: Option<usize>) -> Result<RunReport> {
    cfg.validate()?;
    check_trials(trials)?;
    let s = AnSampler::new(cfg);
    Ok(tally(trials, seed, workers, |range, c| {
        let (mut hm, mut hn) = (Vec::new(), Vec::new());
        for i in range {
            count(c, &s.trial(&mut rng::trial_rng(seed, i), &mut hm, &mut hn).outcome);
        }
    }))
}

/// Every SISO trial outcome, in trial order.
pub fn siso_outcomes(cfg: &SisoConfig, trials: u64, seed: u64) -> Result<Vec<TrialOutcome>> {
    cfg.validate()?;
    check_trials(trials)?;
    let s = SisoSampler::new(cfg);
    Ok((0..trials)
        .into_par_iter()
        .map_init(Vec::new, |buf, i| s.trial(&mut rng::trial_rng(seed, i), buf))
        .collect())
}

/// Every AN trial draw, in trial order.
pub fn an_draws(cfg: &AnConfig, trials: u64, seed: u64) -> Result<Vec<AnDraw>> {
    cfg.validate()?;
    check_trials(trials)?;
    let s = AnSampler::new(cfg);
    Ok((0..trials)
        .into_par_iter()
        .map_init(|| (Vec::new(), Vec::new()), |(hm, hn), i| s.trial(&mut rng::trial_rng(seed, i), hm, hn))
        .collect())
}

/// Raw outcomes as CSV, one row per trial.
pub fn write_outcomes_csv<W: Write>(outcomes: &[TrialOutcome], mut w: W) -> std::io::Result<()> {
    writeln!(w, "trial,gamma_bm,gamma_bn,gamma_em,gamma_en,outage_m,outage_n")?;
    for (i, o) in outcomes.iter().enumerate() {
        writeln!(
            w,
            "{i},{:e},{:e},{:e},{:e},{},{}",
            o.gamma_bm, o.gamma_bn, o.gamma_em, o.gamma_en, o.outage_m as u8, o.outage_n as u8
        )?;
    }
    Ok(())
}
