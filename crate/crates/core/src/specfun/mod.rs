//! Γ, Bessel J_ν of real order ν ≥ -1/2, and the Macdonald function 𝒦_ν.

mod bessel;
mod gamma;
mod macdonald;

pub use bessel::{bessel_j, bessel_j_scaled, BesselJ};
pub use gamma::{gamma_complex, gamma_fn};
pub use macdonald::{macdonald_k, macdonald_k_scaled};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// The order μ > -1/2 that fixes every kernel and weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Order<T> {
    mu: T,
    c_mu: T,
}

impl<T: Real> Order<T> {
    pub fn new(mu: T) -> Result<Self> {
        if !(mu > lit(-0.5)) || !mu.is_finite() {
            return Err(Error::domain("Order", format!("mu = {mu} must exceed -1/2")));
        }
        let c_mu = lit::<T>(2.0).powf(mu) * gamma_fn(mu + T::one())?;
        Ok(Self { mu, c_mu })
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    /// μ + 1/2, the exponent of the weight r⁻¹.
    pub fn half(&self) -> T {
        self.mu + lit(0.5)
    }

    /// c_μ = 2^μ Γ(μ+1).
    pub fn c_mu(&self) -> T {
        self.c_mu
    }
}
