use thiserror::Error;

/// Unified error type for the whole crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("division by zero {0}")]
    DivisionByZero(&'static str),

    #[error("series has zero constant term and cannot be inverted")]
    SeriesNotInvertible,

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("gamma pole on the summation lattice: {side} row {row} at index {index}")]
    GammaPole {
        side: &'static str,
        row: usize,
        index: String,
    },

    #[error("degenerate step target: {0}")]
    DegenerateStep(String),

    #[error("blocked reduction path: {0}")]
    BlockedPath(String),

    #[error("series certification failed at coefficient {order}: {detail}")]
    CertificationFailed { order: usize, detail: String },

    #[error("degeneracy scan inconsistent with series oracle: {0}")]
    StageDisagreement(String),

    #[error("summation did not converge within {terms} terms (best estimate {estimate:?}, last term magnitude {last_term:.3e})")]
    NonConvergence {
        terms: usize,
        estimate: (f64, f64),
        last_term: f64,
    },

    #[error("numeric evaluation outside the convergence domain: {0}")]
    OutsideDomain(String),

    #[error("unsupported integrand: {0}")]
    UnsupportedIntegrand(String),

    #[error("pole families collide on the lattice: rows {row_a} and {row_b} (higher-order poles not supported)")]
    PoleCollision { row_a: usize, row_b: usize },

    #[error("no convergent closing side for symbolic x: left gives ({left_p}, {left_q}+1), right gives ({right_p}, {right_q}+1)")]
    NoConvergentSide {
        left_p: usize,
        left_q: usize,
        right_p: usize,
        right_q: usize,
    },

    #[error("non-finite sample in quadrature at t = {t}")]
    NonFiniteSample { t: f64 },

    #[error("catalog error: {0}")]
    Catalog(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
