//! Secrecy outage of NOMA downlinks with Poisson-distributed eavesdroppers.
//!
//! Two scenarios are covered: a single-antenna base station serving an
//! ordered pair out of M users, and a multi-antenna base station that adds
//! artificial noise in the null space of each user's channel. Every secrecy
//! outage probability can be obtained from closed forms ([`analytic_siso`],
//! [`analytic_an`]) and from Monte Carlo ([`simulator`]).

pub mod analytic_an;
pub mod analytic_siso;
pub mod domain;
pub mod error;
pub mod simulator;
pub mod specfun;

pub use domain::{AnConfig, Method, SisoConfig, SopEstimate, User};
pub use error::{Error, Result};
