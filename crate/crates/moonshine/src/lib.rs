//! Monstrous moonshine by computation.
//!
//! McKay–Thompson series T_g from Rademacher sums, the moonshine tower
//! T_g^(−m), multiplicities of Monster irreducibles in the moonshine
//! modules, and their limiting distribution.
//!
//! The numeric core is generic over [`Real`]; the aliases below fix the
//! scalar for everyday use.

pub mod chartab;
pub mod distrib;
pub mod modgroup;
pub mod qseries;
pub mod rademacher;
pub mod real;

pub use real::{BigReal, Real};

/// Power series with rational coefficients.
pub type RationalSeries = qseries::QSeries<num_rational::BigRational>;
/// Power series with integer coefficients.
pub type IntegerSeries = qseries::ZSeries;
/// A Rademacher partial sum at arbitrary precision.
pub type Estimate = rademacher::CoefficientEstimate<BigReal>;
/// A Rademacher partial sum in machine precision.
pub type FastEstimate = rademacher::CoefficientEstimate<f64>;
