use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid config: {field}: {rule}")]
    InvalidConfig { field: &'static str, rule: String },

    #[error("quadrature did not converge after {panels} panels (estimate {value:e}, error {err:e})")]
    NonConvergence { value: f64, err: f64, panels: usize },

    #[error("composition expansion needs {needed} terms, budget is {budget}")]
    CompositionBudget { needed: u128, budget: u128 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("empty input: {0}")]
    Empty(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, rule: impl Into<String>) -> Error {
    Error::InvalidConfig { field, rule: rule.into() }
}
