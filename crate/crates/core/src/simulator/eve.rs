//! Eavesdropper field: a homogeneous PPP on the annulus `[r_p, R_E]`.
//!
//! The maximum Eve statistic is drawn ring by ring. A ring of `n` Eves first
//! draws its largest fading mark; if even that mark placed on the ring's inner
//! edge cannot beat the running maximum, the ring is skipped, otherwise its
//! Eves are materialized with marks conditioned below the ring maximum.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};

const RING_RATIO: f64 = 1.25;

/// Distances of all Eves in one realization, unordered.
pub fn sample_eve_field<R: Rng + ?Sized>(lambda_e: f64, r_p: f64, r_e: f64, rng: &mut R) -> Vec<f64> {
    let area = std::f64::consts::PI * (r_e * r_e - r_p * r_p);
    let mean = lambda_e * area;
    if !(mean > 0.0) {
        return Vec::new();
    }
    let count = Poisson::new(mean).expect("positive mean").sample(rng) as usize;
    (0..count).map(|_| ring_distance(r_p, r_e, rng)).collect()
}

fn ring_distance<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    (a * a + u * (b * b - a * a)).sqrt()
}

/// Annular decomposition of the Eve region with per-ring Poisson laws.
#[derive(Debug, Clone)]
pub struct EveGeometry {
    rings: Vec<(f64, f64, Poisson<f64>)>,
}

impl EveGeometry {
    pub fn new(lambda_e: f64, r_p: f64, r_e: f64) -> Self {
        let mut rings = Vec::new();
        if lambda_e > 0.0 && r_e > r_p {
            let mut a = r_p;
            while a < r_e {
                let b = if a == 0.0 { r_e.min(1.0) } else { (a * RING_RATIO).min(r_e) };
                let mean = lambda_e * std::f64::consts::PI * (b * b - a * a);
                if mean > 0.0 {
                    rings.push((a, b, Poisson::new(mean).expect("positive mean")));
                }
                a = b;
            }
        }
        EveGeometry { rings }
    }

    pub fn is_empty(&self) -> bool {
        self.rings.is_empty()
    }

    /// `max_e X_e / d_e^α` with unit-mean exponential marks; 0 for an empty field.
    pub fn max_exponential_gain<R: Rng + ?Sized>(&self, alpha: f64, rng: &mut R) -> f64 {
        let mut best = 0.0f64;
        for (a, b, pois) in &self.rings {
            let n = pois.sample(rng) as u64;
            if n == 0 {
                continue;
            }
            let u: f64 = rng.random();
            let top = -(-(u.ln() / n as f64).exp_m1()).ln();
            if top / a.powf(alpha) <= best {
                continue;
            }
            best = best.max(top / ring_distance(*a, *b, rng).powf(alpha));
            let below = -(-top).exp_m1();
            for _ in 1..n {
                let v: f64 = rng.random();
                let x = -(-v * below).ln_1p();
                best = best.max(x / ring_distance(*a, *b, rng).powf(alpha));
            }
        }
        best
    }

    /// Per-user maxima of an AN Eve statistic. `eval(W, d, rng)` draws one Eve
    /// given its energy `W` in the two-dimensional span of the users' beams and
    /// its distance, and returns (value for m, value for n); `bound(W, a)`
    /// dominates both values for every Eve of the ring with inner radius `a`.
    pub fn max_an<R, E, B>(&self, rng: &mut R, mut eval: E, bound: B) -> (f64, f64)
    where
        R: Rng + ?Sized,
        E: FnMut(f64, f64, &mut R) -> (f64, f64),
        B: Fn(f64, f64) -> (f64, f64),
    {
        let mut best = (0.0f64, 0.0f64);
        for (a, b, pois) in &self.rings {
            let n = pois.sample(rng) as u64;
            if n == 0 {
                continue;
            }
            let u: f64 = rng.random();
            let ln_tail = (-(u.ln() / n as f64).exp_m1()).ln();
            let top = gamma2_tail_inverse(ln_tail);
            let (bm, bn) = bound(top, *a);
            if bm <= best.0 && bn <= best.1 {
                continue;
            }
            let cdf_top = -ln_tail.exp_m1();
            for i in 0..n {
                let w = if i == 0 {
                    top
                } else {
                    let v: f64 = rng.random();
                    gamma2_tail_inverse((-v * cdf_top).ln_1p())
                };
                let d = ring_distance(*a, *b, rng);
                let (vm, vn) = eval(w, d, rng);
                best = (best.0.max(vm), best.1.max(vn));
            }
        }
        best
    }
}

/// Solves `ln P(Gamma(2,1) > w) = ln_q` for `w`.
pub fn gamma2_tail_inverse(ln_q: f64) -> f64 {
    if ln_q >= 0.0 {
        return 0.0;
    }
    // g(w) = ln(1+w) − w − ln_q is concave and decreasing; start left of the root
    let mut w = (-ln_q).max((-2.0 * ln_q).sqrt());
    for _ in 0..100 {
        let g = w.ln_1p() - w - ln_q;
        let step = g / (-w / (1.0 + w));
        w -= step;
        if step.abs() <= 1e-15 * w {
            break;
        }
    }
    w
}

/// A standard circularly symmetric complex Gaussian.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Splits energy `w` uniformly over the complex unit sphere of C².
pub fn split_c2<R: Rng + ?Sized>(w: f64, rng: &mut R) -> (Complex64, Complex64) {
    let (z1, z2) = (complex_normal(rng), complex_normal(rng));
    let s = (w / (z1.norm_sqr() + z2.norm_sqr())).sqrt();
    (z1 * s, z2 * s)
}

/// `Gamma(shape, 1)` sampler, or `None` for shape 0.
pub fn residual_energy(shape: f64) -> Option<Gamma<f64>> {
    if shape > 0.0 { Some(Gamma::new(shape, 1.0).expect("positive shape")) } else { None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::rng::trial_rng;
    use crate::simulator::EmpiricalCdf;

    #[test]
    fn empty_fields() {
        let mut rng = trial_rng(1, 0);
        assert!(sample_eve_field(0.0, 10.0, 1000.0, &mut rng).is_empty());
        assert!(EveGeometry::new(0.0, 10.0, 1000.0).is_empty());
        assert_eq!(EveGeometry::new(0.0, 10.0, 1000.0).max_exponential_gain(4.0, &mut rng), 0.0);
    }

    #[test]
    fn distances_stay_in_annulus() {
        let mut rng = trial_rng(2, 0);
        let d = sample_eve_field(1e-3, 10.0, 100.0, &mut rng);
        assert!(!d.is_empty());
        assert!(d.iter().all(|r| (10.0..=100.0).contains(r)));
    }

    #[test]
    fn gamma2_inverse_roundtrip() {
        for w in [1e-6, 1e-3, 0.5, 3.0, 40.0, 500.0] {
            let ln_q = -w + f64::ln_1p(w);
            assert!((gamma2_tail_inverse(ln_q) - w).abs() <= 1e-9 * w.max(1e-3), "{w}");
        }
    }

    #[test]
    fn pruned_maximum_matches_brute_force() {
        let geom = EveGeometry::new(2e-3, 5.0, 200.0);
        let n = 20_000;
        let pruned: Vec<f64> = (0..n).map(|i| geom.max_exponential_gain(4.0, &mut trial_rng(3, i))).collect();
        let brute: Vec<f64> = (0..n)
            .map(|i| {
                let mut rng = trial_rng(4, i);
                let d = sample_eve_field(2e-3, 5.0, 200.0, &mut rng);
                d.iter().map(|r| -(1.0 - rng.random::<f64>()).ln() / r.powi(4)).fold(0.0, f64::max)
            })
            .collect();
        let a = EmpiricalCdf::new(pruned).unwrap();
        let b = EmpiricalCdf::new(brute).unwrap();
        // 0.0136 is the 5% two-sample critical value at n = m = 20000
        assert!(a.ks_two_sample(&b) < 0.0136 * 1.3);
    }
}
