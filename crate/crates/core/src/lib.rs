//! Exact and stochastic verification of the self-duality of the open ASEP
//! with one closed boundary.
//!
//! Operators live on the `2^L`-dimensional configuration space over either
//! exact Laurent polynomials in `t = τ^{1/2}` or `f64`.

pub mod asep;
pub mod check;
pub mod error;
pub mod expm;
pub mod montecarlo;
pub mod operator;
pub mod scalar;
pub mod symmetry;
pub mod verification;
pub mod xxz;

pub use asep::{Mode, RateParameters};
pub use check::{CheckResult, ALGEBRAIC_TOL, EXPONENTIAL_TOL, SCALAR_TOL};
pub use error::{Error, Result};
pub use montecarlo::{DualityEstimate, SimulationConfig};
pub use operator::{Configuration, Operator, SiteMatrix};
pub use scalar::{LaurentScalar, Rational, Residual, Scalar, Tau};
pub use verification::SuiteConfig;
