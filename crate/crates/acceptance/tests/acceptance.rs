//! One line per acceptance criterion. Exits nonzero when any criterion fails.

use std::error::Error;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use nomasec::analytic_an::{
    cdf_bm_an, cdf_bm_inf, cdf_bn_an, cdf_bn_inf, gig_pdf, pdf_e_an, pdf_e_inf, sop_m_an, sop_n_an, sop_pair_an,
    sop_pair_inf,
};
use nomasec::analytic_siso::{
    cdf_gamma_bm, cdf_gamma_bn, diversity_slope, pdf_gamma_e, sop_m, sop_m_asym, sop_n, sop_n_asym, sop_pair, table_for,
};
use nomasec::domain::db_to_linear;
use nomasec::simulator::empirical::EmpiricalCdf;
use nomasec::simulator::{an_draws, run_an, run_siso, siso_outcomes};
use nomasec::specfun::{chebyshev_table, gamma_upper};
use nomasec::{AnConfig, Method, SisoConfig, User};
use nomasec_verification::*;
use nomasec_cli::config::Target;
use nomasec_cli::validate::{ks, mass};
use nomasec_cli::{run_sweep, Scenario, SweepSpec};

type Res = Result<(), Box<dyn Error>>;

const MC_TRIALS: u64 = 1_000_000;

fn run(id: u32, title: &'static str, body: fn(&mut Verdict) -> Res) -> Verdict {
    let mut v = Verdict::new(id, title);
    match catch_unwind(AssertUnwindSafe(|| body(&mut v))) {
        Ok(Ok(())) => {}
        Ok(Err(e)) => v.error(e),
        Err(p) => {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            v.error(format!("panic: {}", msg.unwrap_or_default()));
        }
    }
    v.print();
    v
}

fn siso_at(rho_b_db: f64) -> SisoConfig {
    SisoConfig { rho_b: db_to_linear(rho_b_db), ..SisoConfig::default() }
}

fn large(n_antennas: usize, rho_t_db: f64) -> AnConfig {
    AnConfig { n_antennas, theta: 0.8, r_p: 5.0, lambda_e: 1e-4, p_t: db_to_linear(rho_t_db), ..AnConfig::default() }
}

fn empirical(values: impl Iterator<Item = f64>) -> nomasec::Result<EmpiricalCdf> {
    EmpiricalCdf::new(values.collect())
}

fn argmin(v: &[f64]) -> usize {
    (0..v.len()).min_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap()
}

fn c1(v: &mut Verdict) -> Res {
    for db in [30.0, 40.0, 50.0] {
        let cfg = siso_at(db);
        let t = table_for(&cfg)?;
        let mc = run_siso(&cfg, MC_TRIALS, 100 + db as u64)?;
        v.sop_match(&format!("{db}dB m"), sop_m(&cfg, &t)?.value, mc.sop_m.value, mc.sop_m.stderr);
        v.sop_match(&format!("{db}dB n"), sop_n(&cfg, &t)?.value, mc.sop_n.value, mc.sop_n.stderr);
        v.sop_match(&format!("{db}dB pair"), sop_pair(&cfg, &t)?.value, mc.sop_pair.value, mc.sop_pair.stderr);
    }
    Ok(())
}

fn c2(v: &mut Verdict) -> Res {
    let base = SisoConfig::default();
    for (label, order) in [("m", base.m), ("n", base.n)] {
        let mut scaled = Vec::new();
        for db in (40..=80).step_by(5) {
            let cfg = siso_at(db as f64);
            let p = if label == "m" { sop_m_asym(&cfg)? } else { sop_n_asym(&cfg)? };
            scaled.push(p.value * cfg.rho_b.powi(order as i32));
        }
        let dev = scaled.iter().map(|s| (s / scaled[0] - 1.0).abs()).fold(0.0, f64::max);
        v.bound(&format!("{label} power law"), dev, POWER_LAW_REL_TOL);
    }
    let mut curve = Vec::new();
    for db in (60..=80).step_by(5) {
        let cfg = siso_at(db as f64);
        curve.push((db as f64, sop_pair(&cfg, &table_for(&cfg)?)?.value));
    }
    let d = diversity_slope(&curve, SLOPE_WINDOW_DB)?;
    v.bound(&format!("pair slope {:.4} vs m={}", -d, base.m), (d - base.m as f64).abs(), SLOPE_TOL);
    Ok(())
}

fn c3(v: &mut Verdict) -> Res {
    let cfg = siso_at(80.0);
    let r = sop_n_asym(&cfg)?.value / sop_n(&cfg, &table_for(&cfg)?)?.value;
    let (lo, hi) = ASYM_RATIO_RANGE;
    v.check((lo..=hi).contains(&r), format!("sop_n_asym/sop_n at 80dB = {r:.5} in [{lo}, {hi}]"));
    Ok(())
}

fn c4(v: &mut Verdict) -> Res {
    let cfg = AnConfig::default();
    let (am, an) = (sop_m_an(&cfg)?.value, sop_n_an(&cfg)?.value);
    let mc = run_an(&cfg, MC_TRIALS, 4)?;
    v.sop_match("m", am, mc.sop_m.value, mc.sop_m.stderr);
    v.sop_match("n", an, mc.sop_n.value, mc.sop_n.stderr);
    v.check(an < am, format!("analytic P_n {an:.3e} < P_m {am:.3e}"));
    v.check(mc.sop_n.value < mc.sop_m.value, format!("mc P_n {:.3e} < P_m {:.3e}", mc.sop_n.value, mc.sop_m.value));
    Ok(())
}

fn c5(v: &mut Verdict) -> Res {
    for rt in [20.0, 30.0] {
        let mut gaps = Vec::new();
        for n in [8, 16, 32, 64] {
            let cfg = large(n, rt);
            let inf = sop_pair_inf(&cfg)?.value;
            let mc = run_an(&cfg, MC_TRIALS, 500 + n as u64)?.sop_pair.value;
            gaps.push((n, (inf - mc).abs()));
        }
        v.bound(&format!("{rt}dB N_A=64 gap"), gaps[3].1, LARGE_SOP_TOL);
        let mono = gaps.windows(2).all(|w| w[1].1 <= w[0].1);
        let listed: Vec<String> = gaps.iter().map(|(n, g)| format!("{n}:{g:.2e}")).collect();
        v.check(mono, format!("{rt}dB gap nonincreasing [{}]", listed.join(" ")));
    }
    Ok(())
}

fn c6(v: &mut Verdict) -> Res {
    let base = AnConfig::default();
    let draws = |n: usize, seed: u64| an_draws(&AnConfig { n_antennas: n, ..base.clone() }, 100_000, seed);
    let (d32, d64) = (draws(32, 61)?, draws(64, 62)?);
    for k in [User::M, User::N] {
        let pick = |d: &nomasec::simulator::AnDraw| if k == User::M { d.outcome.gamma_em } else { d.outcome.gamma_en };
        let e32 = empirical(d32.iter().map(pick))?;
        let e64 = empirical(d64.iter().map(pick))?;
        v.bound(&format!("eve {} KS 32 vs 64", k.as_str()), e32.ks_two_sample(&e64), EVE_NA_KS_TOL);
    }
    let mut identical = true;
    for i in 0..200 {
        let x = 10f64.powf(-6.0 + 10.0 * i as f64 / 199.0);
        for k in [User::M, User::N] {
            let a = pdf_e_inf(x, k, &AnConfig { n_antennas: 8, ..base.clone() });
            let b = pdf_e_inf(x, k, &AnConfig { n_antennas: 128, ..base.clone() });
            identical &= a.to_bits() == b.to_bits();
        }
    }
    v.check(identical, "pdf_e_inf bit-identical for N_A 8 vs 128");
    Ok(())
}

fn c7(v: &mut Verdict) -> Res {
    let cfg = SisoConfig::default();
    let t = table_for(&cfg)?;
    let out = siso_outcomes(&cfg, MC_TRIALS, 71)?;
    let bn = empirical(out.iter().map(|o| o.gamma_bn))?;
    v.bound("siso n cdf", ks(&bn, |x| cdf_gamma_bn(x, &cfg, &t), KS_EXACT_TOL), KS_EXACT_TOL);
    let bm = empirical(out.iter().map(|o| o.gamma_bm))?;
    v.bound("siso m cdf", ks(&bm, |x| cdf_gamma_bm(x, &cfg, &t), KS_EXACT_TOL), KS_EXACT_TOL);
    drop((out, bn, bm));
    for k in [User::M, User::N] {
        let m = mass(|x| pdf_gamma_e(x, k, &cfg))?;
        v.bound(&format!("siso eve pdf_e{} mass", k.as_str()), (m - 1.0).abs(), MASS_TOL);
    }

    let cfg = AnConfig::default();
    let out: Vec<_> = an_draws(&cfg, MC_TRIALS, 72)?.into_iter().map(|d| d.outcome).collect();
    let bn = empirical(out.iter().map(|o| o.gamma_bn))?;
    v.bound("an n cdf", ks(&bn, |x| cdf_bn_an(x, &cfg).expect("cdf_bn_an"), KS_EXACT_TOL), KS_EXACT_TOL);
    let bm = empirical(out.iter().map(|o| o.gamma_bm))?;
    v.bound("an m cdf", ks(&bm, |x| cdf_bm_an(x, &cfg).expect("cdf_bm_an"), KS_EXACT_TOL), KS_EXACT_TOL);
    drop((out, bn, bm));
    for k in [User::M, User::N] {
        let m = mass(|x| pdf_e_an(x, k, &cfg))?;
        v.bound(&format!("an eve pdf_e{} mass", k.as_str()), (m - 1.0).abs(), MASS_TOL);
    }
    let m = mass(|z| gig_pdf(z, &cfg).expect("gig_pdf"))?;
    v.bound("gig mass", (m - 1.0).abs(), MASS_TOL);

    for rt in [20.0, 30.0] {
        let cfg = large(64, rt);
        let out: Vec<_> = an_draws(&cfg, MC_TRIALS, 73 + rt as u64)?.into_iter().map(|d| d.outcome).collect();
        let bn = empirical(out.iter().map(|o| o.gamma_bn))?;
        v.bound(&format!("large n cdf {rt}dB"), ks(&bn, |x| cdf_bn_inf(x, &cfg).expect("cdf_bn_inf"), KS_LARGE_TOL), KS_LARGE_TOL);
        let bm = empirical(out.iter().map(|o| o.gamma_bm))?;
        v.bound(&format!("large m cdf {rt}dB"), ks(&bm, |x| cdf_bm_inf(x, &cfg).expect("cdf_bm_inf"), KS_LARGE_TOL), KS_LARGE_TOL);
        for k in [User::M, User::N] {
            let m = mass(|x| pdf_e_inf(x, k, &cfg))?;
            v.bound(&format!("large eve pdf_e{} mass {rt}dB", k.as_str()), (m - 1.0).abs(), MASS_TOL);
        }
    }
    Ok(())
}

/// `F(y) = 1 − (2/R²)∫₀^R r e^{−(1+r^α)y} dr` by composite Simpson.
fn unordered_cdf_oracle(y: f64, r_d: f64, alpha: f64) -> f64 {
    let n = 20_000;
    let h = r_d / n as f64;
    let f = |r: f64| r * (-(1.0 + r.powf(alpha)) * y).exp();
    let mut s = f(0.0) + f(r_d);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    1.0 - 2.0 / (r_d * r_d) * s * h / 3.0
}

fn c8(v: &mut Verdict) -> Res {
    let (r_d, alpha) = (10.0, 4.0);
    let ys: Vec<f64> = (0..=1000).map(|i| 10.0 * i as f64 / 1000.0).collect();
    let oracle: Vec<f64> = ys.iter().map(|&y| unordered_cdf_oracle(y, r_d, alpha)).collect();
    let mut errs = Vec::new();
    for k in [5, 10, 20] {
        let t = chebyshev_table(k, r_d, alpha)?;
        errs.push(ys.iter().zip(&oracle).map(|(&y, o)| (t.cdf(y) - o).abs()).fold(0.0, f64::max));
    }
    v.bound("K=20 sup error", errs[2], CHEBYSHEV_TOL);
    v.check(
        errs[0] > errs[1] && errs[1] > errs[2],
        format!("decreasing K=5,10,20: {:.3e} {:.3e} {:.3e}", errs[0], errs[1], errs[2]),
    );
    Ok(())
}

fn c9(v: &mut Verdict) -> Res {
    // SOP vs r_p
    for lambda_e in [1e-3, 1e-4] {
        let mut prev = f64::INFINITY;
        let mut dec = true;
        for rp in (2..=20).step_by(2) {
            let cfg = SisoConfig {
                rho_b: db_to_linear(50.0),
                rho_e: db_to_linear(40.0),
                r_p: rp as f64,
                lambda_e,
                ..SisoConfig::default()
            };
            let p = sop_pair(&cfg, &table_for(&cfg)?)?.value;
            dec &= p < prev;
            prev = p;
        }
        v.check(dec, format!("pair decreasing in r_p 2..20 at lambda_e={lambda_e:e}"));
    }

    // AN vs no AN over N_A
    let fig6 = |n: usize, theta: f64, r_p: f64| AnConfig {
        n_antennas: n,
        theta,
        r_p,
        alpha: 3.0,
        lambda_e: 1e-3,
        p_t: db_to_linear(30.0),
        ..AnConfig::default()
    };
    let mut beats = Vec::new();
    for r_p in [2.0, 5.0, 10.0] {
        for n in [4, 6, 8, 12] {
            let (with, without) = (sop_pair_an(&fig6(n, 0.9, r_p))?.value, sop_pair_an(&fig6(n, 1.0, r_p))?.value);
            if with > without {
                beats.push(format!("r_p={r_p} N_A={n}: {with:.3e} > {without:.3e}"));
            }
        }
    }
    let note = if beats.is_empty() { String::new() } else { format!(": {}", beats.join(", ")) };
    v.check(beats.is_empty(), format!("analytic theta=0.9 <= theta=1 on 12 points{note}"));
    for n in [4, 8] {
        let with = run_an(&fig6(n, 0.9, 5.0), 200_000, 90 + n as u64)?.sop_pair.value;
        let without = run_an(&fig6(n, 1.0, 5.0), 200_000, 95 + n as u64)?.sop_pair.value;
        v.check(with <= without, format!("mc N_A={n}: {with:.3e} vs {without:.3e}"));
    }

    // pair SOP over rho_t
    let grid: Vec<f64> = (10..=50).step_by(5).map(f64::from).collect();
    let fig7 = |rt: f64| AnConfig { r_p: 10.0, p_t: db_to_linear(rt), ..AnConfig::default() };
    let an: Vec<f64> = grid.iter().map(|&rt| sop_pair_an(&fig7(rt)).map(|e| e.value)).collect::<Result<_, _>>()?;
    let i = argmin(&an);
    v.check(i > 0 && i + 1 < an.len(), format!("analytic rho_t argmin {} dB", grid[i]));
    let mc: Vec<f64> = grid
        .iter()
        .enumerate()
        .map(|(j, &rt)| run_an(&fig7(rt), MC_TRIALS, 700 + j as u64).map(|r| r.sop_pair.value))
        .collect::<Result<_, _>>()?;
    let i = argmin(&mc);
    v.check(i > 0 && i + 1 < mc.len(), format!("mc rho_t argmin {} dB", grid[i]));

    // pair SOP over theta at the theta-sweep figure's rho_t
    let thetas: Vec<f64> = (1..=19).map(|i| 0.05 * i as f64).collect();
    for r_p in [4.0, 5.0] {
        let sops: Vec<f64> = thetas
            .iter()
            .map(|&theta| sop_pair_an(&AnConfig { theta, r_p, ..AnConfig::default() }).map(|e| e.value))
            .collect::<Result<_, _>>()?;
        let i = argmin(&sops);
        v.check(
            i > 0 && i + 1 < sops.len(),
            format!("r_p={r_p} rho_t=30dB theta argmin {:.2} of 0.05..0.95", thetas[i]),
        );
    }
    Ok(())
}

fn c10(v: &mut Verdict) -> Res {
    let dir = tempfile::tempdir()?;
    let specs = [
        SweepSpec {
            parameter: "rho_b_db".into(),
            grid: vec![30.0, 40.0],
            base: Scenario::Siso(SisoConfig::default()),
            targets: vec![Target::M, Target::N, Target::Pair],
            methods: vec![Method::Analytic, Method::MonteCarlo],
        },
        SweepSpec {
            parameter: "theta".into(),
            grid: vec![0.5, 0.8],
            base: Scenario::An(AnConfig::default()),
            targets: vec![Target::Pair],
            methods: vec![Method::MonteCarlo],
        },
    ];
    for spec in &specs {
        let bytes: Vec<Vec<u8>> = [1, 4]
            .iter()
            .map(|&w| {
                let p = dir.path().join(format!("{}-{w}.csv", spec.parameter));
                run_sweep(spec, 50_000, 10, Some(w), &p)?;
                Ok(std::fs::read(&p)?)
            })
            .collect::<Result<_, Box<dyn Error>>>()?;
        v.check(bytes[0] == bytes[1], format!("{} sweep CSV identical for 1 and 4 workers", spec.base.name()));
    }

    let shift = |v: &mut Verdict, label: &str, a: [nomasec::SopEstimate; 3], b: [nomasec::SopEstimate; 3]| {
        for (t, (x, y)) in ["m", "n", "pair"].iter().zip(a.iter().zip(&b)) {
            let d = (x.value - y.value).abs();
            v.check(d < x.stderr || d == 0.0, format!("{label} {t} R_E shift {d:.2e} vs stderr {:.2e}", x.stderr));
        }
    };
    let s = SisoConfig::default();
    let (a, b) = (run_siso(&s, MC_TRIALS, 11)?, run_siso(&SisoConfig { r_e: 2000.0, ..s }, MC_TRIALS, 11)?);
    shift(v, "siso", [a.sop_m, a.sop_n, a.sop_pair], [b.sop_m, b.sop_n, b.sop_pair]);
    let s = AnConfig::default();
    let (a, b) = (run_an(&s, MC_TRIALS, 12)?, run_an(&AnConfig { r_e: 2000.0, ..s }, MC_TRIALS, 12)?);
    shift(v, "an", [a.sop_m, a.sop_n, a.sop_pair], [b.sop_m, b.sop_n, b.sop_pair]);

    let mut worst = 0.0f64;
    for i in 0..=400 {
        let x = 10f64.powf(-8.0 + 10.0 * i as f64 / 400.0);
        let want = std::f64::consts::PI.sqrt() * libm::erfc(x.sqrt());
        worst = worst.max(((gamma_upper(0.5, x)? - want) / want).abs());
    }
    v.bound("Gamma(0.5,x) vs sqrt(pi) erfc(sqrt x) rel", worst, GAMMA_ERFC_TOL);
    Ok(())
}

fn main() -> ExitCode {
    let verdicts = vec![
        run(1, "siso analytic vs monte carlo", c1),
        run(2, "diversity order", c2),
        run(3, "asymptotic/exact convergence", c3),
        run(4, "artificial-noise analytic vs monte carlo", c4),
        run(5, "large-antenna closeness", c5),
        run(6, "eve statistics independent of N_A", c6),
        run(7, "distribution-level checks", c7),
        run(8, "chebyshev approximation", c8),
        run(9, "qualitative figure trends", c9),
        run(10, "engineering", c10),
    ];
    if summarize(&verdicts) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
