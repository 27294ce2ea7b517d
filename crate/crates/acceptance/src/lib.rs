//! Verdict bookkeeping and pinned tolerances for the `acceptance` test target.
//!
//! The criteria themselves live in `tests/acceptance.rs`; it prints one line per
//! criterion and exits nonzero when any of them fails.

use std::fmt::Write as _;
use std::io::Write as _;

/// Analytic vs Monte Carlo SOP: `|a − mc| ≤ max(3·stderr, 0.01)`.
pub const SOP_SIGMAS: f64 = 3.0;
pub const SOP_ABS_TOL: f64 = 0.01;
/// Relative constancy of `sop_asym(ρ)·ρ^D`.
pub const POWER_LAW_REL_TOL: f64 = 1e-9;
/// Exact pair slope over 60–80 dB vs −m.
pub const SLOPE_TOL: f64 = 0.1;
pub const SLOPE_WINDOW_DB: (f64, f64) = (60.0, 80.0);
/// Range for `sop_n_asym / sop_n` at 80 dB.
pub const ASYM_RATIO_RANGE: (f64, f64) = (0.9, 1.1);
/// Large-antenna pair SOP gap at N_A = 64.
pub const LARGE_SOP_TOL: f64 = 0.02;
/// Two-sample distance between Eve SINRs at N_A = 32 and 64.
pub const EVE_NA_KS_TOL: f64 = 0.01;
/// CDF distances: exact-N_A lemmas, N_A → ∞ lemmas at N_A = 64.
pub const KS_EXACT_TOL: f64 = 0.005;
pub const KS_LARGE_TOL: f64 = 0.03;
/// Density normalization.
pub const MASS_TOL: f64 = 1e-6;
/// Chebyshev sup-norm on y ∈ [0, 10] at K = 20.
pub const CHEBYSHEV_TOL: f64 = 1e-3;
/// `Γ(0.5, x) = √π erfc(√x)`, relative.
pub const GAMMA_ERFC_TOL: f64 = 1e-10;

/// Outcome of one part of a criterion.
#[derive(Debug, Clone)]
pub struct Part {
    pub pass: bool,
    pub note: String,
}

/// Collects parts of one numbered criterion.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub id: u32,
    pub title: &'static str,
    pub parts: Vec<Part>,
}

impl Verdict {
    pub fn new(id: u32, title: &'static str) -> Self {
        Verdict { id, title, parts: Vec::new() }
    }

    pub fn check(&mut self, pass: bool, note: impl Into<String>) -> bool {
        self.parts.push(Part { pass, note: note.into() });
        pass
    }

    /// Records `|analytic − mc| ≤ max(3σ, 0.01)`.
    pub fn sop_match(&mut self, label: &str, analytic: f64, mc: f64, stderr: f64) -> bool {
        let tol = (SOP_SIGMAS * stderr).max(SOP_ABS_TOL);
        let gap = (analytic - mc).abs();
        self.check(gap <= tol, format!("{label}: analytic {analytic:.4e} mc {mc:.4e} gap {gap:.2e} tol {tol:.2e}"))
    }

    /// Records a `value ≤ tol` bound.
    pub fn bound(&mut self, label: &str, value: f64, tol: f64) -> bool {
        let ok = value <= tol;
        self.check(ok, format!("{label}: {value:.3e} {} {tol:.1e}", if ok { "<=" } else { ">" }))
    }

    /// Records an error that stopped evaluation.
    pub fn error(&mut self, e: impl std::fmt::Display) {
        self.check(false, format!("error: {e}"));
    }

    pub fn pass(&self) -> bool {
        !self.parts.is_empty() && self.parts.iter().all(|p| p.pass)
    }

    /// `PASS C1 title | part; part; ...`, failed parts marked with `!`.
    pub fn line(&self) -> String {
        let mut s = format!("{} C{:<2} {}", if self.pass() { "PASS" } else { "FAIL" }, self.id, self.title);
        let notes: Vec<String> =
            self.parts.iter().map(|p| if p.pass { p.note.clone() } else { format!("!{}", p.note) }).collect();
        if !notes.is_empty() {
            let _ = write!(s, " | {}", notes.join("; "));
        }
        s
    }

    pub fn print(&self) {
        println!("{}", self.line());
        let _ = std::io::stdout().flush();
    }
}

/// Prints a summary line; true when every verdict passed.
pub fn summarize(verdicts: &[Verdict]) -> bool {
    let failed: Vec<String> = verdicts.iter().filter(|v| !v.pass()).map(|v| format!("C{}", v.id)).collect();
    if failed.is_empty() {
        println!("acceptance: {} of {} criteria pass", verdicts.len(), verdicts.len());
        true
    } else {
        println!("acceptance: {} of {} criteria pass; failed: {}", verdicts.len() - failed.len(), verdicts.len(), failed.join(" "));
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_verdict_is_not_a_pass() {
        assert!(!Verdict::new(1, "x").pass());
    }

    #[test]
    fn one_failed_part_fails_the_line() {
        let mut v = Verdict::new(2, "t");
        v.bound("a", 1.0, 2.0);
        v.bound("b", 3.0, 2.0);
        assert!(!v.pass());
        assert!(v.line().starts_with("FAIL C2"));
        assert!(v.line().contains("!b: 3.000e0 > 2.0e0"));
    }

    #[test]
    fn sop_tolerance_floor() {
        let mut v = Verdict::new(1, "t");
        assert!(v.sop_match("m", 0.10, 0.109, 1e-4));
        assert!(!v.sop_match("m", 0.10, 0.111, 1e-4));
        assert!(v.sop_match("m", 0.10, 0.115, 6e-3));
    }
}
