//! Hankel transforms, Hankel convolution, the Bessel operators Δ_μ and S_μ, their
//! resolvents, and complex fractional powers of -S_μ on the half line.
//!
//! Everything is generic over the real scalar ([`Real`], implemented for `f32` and
//! `f64`); the `*64` aliases below fix the scalar to `f64`.

pub mod besselop;
pub mod corpus;
pub mod error;
pub mod fracpow;
pub mod funcspace;
pub mod hankel;
pub mod hconv;
pub mod resolvent;
pub mod scalar;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
pub use funcspace::{HalfLineFunction, NormKind, QuadratureSpec};
pub use scalar::{Cx, Real};
pub use specfun::Order;

pub type Order64 = specfun::Order<f64>;
pub type Function64 = funcspace::HalfLineFunction<f64>;
pub type Spec64 = funcspace::QuadratureSpec<f64>;
pub type NormKind64 = funcspace::NormKind<f64>;
pub type Complex64 = num_complex::Complex<f64>;
pub type Lambda64 = resolvent::Lambda<f64>;
pub type Alpha64 = fracpow::Alpha<f64>;
