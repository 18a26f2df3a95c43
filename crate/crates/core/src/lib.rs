//! Exact manipulation of generalized hypergeometric series and their
//! multivariable Horn-type relatives.
//!
//! The crate provides, over exact rational arithmetic in a formal parameter
//! `eps`:
//!
//! - truncated series expansion of `pFq` and Horn-type specs with gamma-ratio
//!   coefficients ([`pfq`], [`series`]);
//! - the canonical ordinary differential equation annihilating a `pFq`
//!   ([`ode`]);
//! - parameter-shift reduction: rewriting a shifted function as a
//!   rational-function combination of derivatives of the base function, with
//!   exact per-coefficient certification ([`reduction`]);
//! - counting of independent basis elements under parameter shifts, with a
//!   randomized exact cross-check ([`basis`]);
//! - Mellin-Barnes residue summation and direct contour quadrature ([`mb`]);
//! - Laurent expansion in `eps` of series coefficients ([`eps`]);
//! - a small catalog format for cross-checking tabulated decompositions
//!   ([`catalog`]);
//! - floating-point evaluation for consistency checks ([`eval`], [`gamma`]).

pub mod basis;
pub mod catalog;
pub mod eps;
pub mod error;
pub mod eval;
pub mod gamma;
pub mod linparam;
pub mod mb;
pub mod modp;
pub mod ode;
pub mod parse;
pub mod pfq;
pub mod poly;
pub mod ratfun;
pub mod rational;
pub mod reduction;
pub mod series;

pub use basis::{basis_count, BasisReport};
pub use catalog::{
    check_catalog, check_master_count, check_uniform_basis, load_catalog, parse_catalog,
    CatalogEntry, EntryReport, HyperRepresentation, HyperTerm, MasterCountReport,
    UniformityReport, GAMMA_EXPRESSIBLE,
};
pub use eps::{laurent_expand, pole_order, EpsLaurent};
pub use error::{Error, Result};
pub use eval::{eval_horn, eval_pfq};
pub use mb::{
    contour_quadrature, enumerate_poles, residue_sum, suggested_contour, GammaProducts,
    MBIntegrand, PoleFamily, PoleSide, ResidueSum,
};
pub use linparam::LinearParam;
pub use ode::{hypergeometric_ode, DiffOperator};
pub use pfq::{AnySpec, HornSpec, PFQSpec};
pub use poly::Poly;
pub use ratfun::RatFun;
pub use rational::Rational;
pub use reduction::{
    certify_relation, reduce, shifted_spec, step_operator, ReductionResult, StepDirection,
    StepSide, VERIFIED_ORDER,
};
pub use series::{QSeries, RSeries, Series};
