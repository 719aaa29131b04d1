//! Polylogarithms `Li_k`, the multiple polylogarithms `Li_{2,1,...,1}` and
//! zeta values on their principal branches, a checker for the inversion
//! relation that ties them together, and a recursive additive
//! Riemann-Hilbert solver that rebuilds `Li_k` from `zeta(k)` alone.
//!
//! Every numerical routine is generic over the scalar through [`Real`]; the
//! aliases below fix it to `f64`, the precision all tolerances are stated in.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod domain;
pub mod error;
pub mod inversion;
pub mod quadrature;
pub mod report;
pub mod rh;
pub mod scalar;
pub mod specialfn;

pub use domain::{in_domain, log_power_term, principal_log, DomainId};
pub use error::{PolylogError, Result};
pub use scalar::Real;

/// A point of the complex plane in working precision.
pub type ComplexPoint<T> = num_complex::Complex<T>;

/// Double precision point, the default working precision.
pub type Point = ComplexPoint<f64>;
pub type ContourSpec64 = rh::ContourSpec<f64>;
pub type FunctionHandle64 = rh::FunctionHandle<f64>;
pub type SplitResult64 = rh::SplitResult<f64>;
pub type ReconstructionReport64 = rh::ReconstructionReport<f64>;
pub type InversionResidual64 = inversion::InversionResidual<f64>;
pub type ZetaTable64 = specialfn::ZetaTable<f64>;
pub type SeriesConfig64 = specialfn::SeriesConfig<f64>;
