//! Multinomial coefficients and weak compositions.

use crate::specfun::gamma::ln_factorial;

/// ln((Σq)! / Π q_i!).
pub fn log_multinomial(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    ln_factorial(total) - counts.iter().map(|&q| ln_factorial(q)).sum::<f64>()
}

/// Number of weak compositions of `total` into `parts` cells, C(total+parts−1, parts−1),
/// saturating at `u128::MAX`.
pub fn weak_composition_count(total: u64, parts: u64) -> u128 {
    if parts == 0 {
        return u128::from(total == 0);
    }
    let n = total as u128 + parts as u128 - 1;
    let k = (parts as u128 - 1).min(total as u128);
    let mut c: u128 = 1;
    for i in 1..=k {
        // c·(n−k+i) is divisible by i after the multiplication
        match c.checked_mul(n - k + i) {
            Some(v) => c = v / i,
            None => return u128::MAX,
        }
    }
    c
}

/// Lazily enumerates every `(q_0..q_{parts-1})` with `Σ q_i = total`, in lexicographic
/// order starting from `(total, 0, ..., 0)`.
#[derive(Debug, Clone)]
pub struct WeakCompositions {
    cur: Vec<u64>,
    done: bool,
}

impl WeakCompositions {
    pub fn new(total: u64, parts: usize) -> Self {
        if parts == 0 {
            return WeakCompositions { cur: Vec::new(), done: total != 0 };
        }
        let mut cur = vec![0; parts];
        cur[0] = total;
        WeakCompositions { cur, done: false }
    }
}

impl Iterator for WeakCompositions {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        if self.done {
            return None;
        }
        let out = self.cur.clone();
        let p = self.cur.len();
        // rightmost nonzero cell before the last one
        match (0..p.saturating_sub(1)).rev().find(|&i| self.cur[i] > 0) {
            None => self.done = true,
            Some(i) => {
                let tail = self.cur[p - 1];
                self.cur[p - 1] = 0;
                self.cur[i] -= 1;
                self.cur[i + 1] = tail + 1;
            }
        }
        Some(out)
    }
}
