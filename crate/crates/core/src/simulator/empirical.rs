//! Empirical CDFs and Kolmogorov distances.

use crate::error::{Error, Result};

/// Right-continuous step CDF of a sample.
#[derive(Debug, Clone)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty("samples"));
        }
        if samples.iter().any(|x| x.is_nan()) {
            return Err(Error::Domain("NaN sample".into()));
        }
        samples.sort_by(f64::total_cmp);
        Ok(EmpiricalCdf { sorted: samples })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of samples `≤ x`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|s| *s <= x) as f64 / self.len() as f64
    }

    fn below(&self, x: f64) -> f64 {
        self.sorted.partition_point(|s| *s < x) as f64 / self.len() as f64
    }

    /// `sup_x |F_n(x) − F(x)|` for a continuous CDF `f`, evaluating `f` at every sample.
    pub fn ks_distance<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let n = self.len() as f64;
        let mut d = 0.0f64;
        let mut i = 0;
        while i < self.sorted.len() {
            let x = self.sorted[i];
            let mut j = i;
            while j < self.sorted.len() && self.sorted[j] == x {
                j += 1;
            }
            let fx = f(x);
            d = d.max((j as f64 / n - fx).abs()).max((fx - i as f64 / n).abs());
            i = j;
        }
        d
    }

    /// Upper bound on [`Self::ks_distance`] that evaluates `f` only at every
    /// `stride`-th order statistic. Exact monotone bracketing: between grid
    /// points `a < b`, `|F_n − F| ≤ max(F_n(b⁻) − F(a), F(b) − F_n(a))`.
    pub fn ks_upper_bound<F: Fn(f64) -> f64>(&self, f: F, stride: usize) -> f64 {
        let stride = stride.max(1);
        let n = self.len();
        let mut grid: Vec<f64> = self.sorted.iter().step_by(stride).copied().collect();
        if grid.last() != self.sorted.last() {
            grid.push(self.sorted[n - 1]);
        }
        let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
        let mut d = self.below(grid[0]).max(vals[0]).max((self.cdf(grid[0]) - vals[0]).abs());
        for k in 1..grid.len() {
            let (a, b) = (grid[k - 1], grid[k]);
            d = d.max(self.below(b) - vals[k - 1]).max(vals[k] - self.cdf(a));
            d = d.max((self.cdf(b) - vals[k]).abs());
        }
        d.max(1.0 - vals[vals.len() - 1])
    }

    /// Two-sample Kolmogorov–Smirnov statistic.
    pub fn ks_two_sample(&self, other: &EmpiricalCdf) -> f64 {
        self.sorted
            .iter()
            .chain(other.sorted.iter())
            .map(|&x| (self.cdf(x) - other.cdf(x)).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::rng::trial_rng;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn single_sample_is_a_unit_step() {
        let e = EmpiricalCdf::new(vec![2.5]).unwrap();
        assert_eq!(e.cdf(2.4999), 0.0);
        assert_eq!(e.cdf(2.5), 1.0);
        assert!(EmpiricalCdf::new(vec![]).is_err());
    }

    #[test]
    fn exponential_sample_is_close() {
        let mut rng = trial_rng(11, 0);
        let s: Vec<f64> = (0..1_000_000).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let e = EmpiricalCdf::new(s).unwrap();
        let d = e.ks_distance(|x| -(-x).exp_m1());
        assert!(d < 0.002, "{d}");
        let ub = e.ks_upper_bound(|x| -(-x).exp_m1(), 64);
        assert!(ub >= d && ub < d + 1e-4);
    }

    proptest! {
        #[test]
        fn strided_bound_dominates(xs in prop::collection::vec(0.0f64..5.0, 1..300), stride in 1usize..20) {
            let e = EmpiricalCdf::new(xs).unwrap();
            let f = |x: f64| 1.0 - (-x).exp();
            prop_assert!(e.ks_upper_bound(f, stride) >= e.ks_distance(f) - 1e-15);
        }
    }
}
