//! Gauss–Chebyshev table for the CDF of the unordered composite gain
//! `|h|² = fade/(1+d^α)` with d uniform in a disc of radius R_D:
//! `F(y) ≈ Σ_k b_k e^{-c_k y}`.

use crate::error::{Error, Result};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevTable {
    /// Number of Chebyshev nodes.
    pub k: usize,
    /// Weights b_0..b_K.
    pub b: Vec<f64>,
    /// Exponents c_0..c_K.
    pub c: Vec<f64>,
}

/// Build the table with node weights `b_k = −(ω/2)√(1−φ_k²)(φ_k+1)`.
pub fn chebyshev_table(k: usize, r_d: f64, alpha: f64) -> Result<ChebyshevTable> {
    ChebyshevTable::build(k, r_d, alpha, 0.5)
}

impl ChebyshevTable {
    /// Same nodes, weights without the halving from the change of variable.
    /// Its CDF tends to about 2; kept as a negative control for validators.
    pub fn without_jacobian_half(k: usize, r_d: f64, alpha: f64) -> Result<Self> {
        Self::build(k, r_d, alpha, 1.0)
    }

    fn build(k: usize, r_d: f64, alpha: f64, scale: f64) -> Result<Self> {
        if k < 1 {
            return Err(Error::Domain("Chebyshev table needs K >= 1".into()));
        }
        if !(r_d > 0.0) || !(alpha > 2.0) {
            return Err(Error::Domain(format!("Chebyshev table needs R_D > 0 and alpha > 2 (got {r_d}, {alpha})")));
        }
        let omega = PI / k as f64;
        let mut b = vec![0.0; k + 1];
        let mut c = vec![0.0; k + 1];
        for i in 1..=k {
            let phi = ((2 * i - 1) as f64 * PI / (2 * k) as f64).cos();
            b[i] = -scale * omega * (1.0 - phi * phi).sqrt() * (phi + 1.0);
            c[i] = 1.0 + (r_d / 2.0 * (phi + 1.0)).powf(alpha);
        }
        b[0] = -b[1..].iter().sum::<f64>();
        Ok(ChebyshevTable { k, b, c })
    }

    /// `Σ_k b_k e^{-c_k y}` clamped to [0, 1], evaluated as `Σ_{k≥1} (−b_k)(1 − e^{−c_k y})`
    /// so that F(0) = 0 holds exactly.
    pub fn cdf(&self, y: f64) -> f64 {
        self.raw_cdf(y).clamp(0.0, 1.0)
    }

    /// The unclamped approximation.
    pub fn raw_cdf(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        self.b[1..].iter().zip(&self.c[1..]).map(|(&b, &c)| -b * -(-c * y).exp_m1()).sum()
    }
}
