use crate::error::{Error, Result};
use crate::funcspace::quadrature::adaptive_gk;
use crate::scalar::{lit, Real};

/// 𝒦_ν(x) = ½ (x/2)^ν ∫₀^∞ e^{-t - x²/(4t)} t^{-ν-1} dt for x > 0 and any real ν.
pub fn macdonald_k<T: Real>(nu: T, x: T) -> Result<T> {
    Ok(macdonald_k_scaled(nu, x)? * (-x).exp())
}

/// e^{x} 𝒦_ν(x); avoids underflow for large x.
///
/// With t = (x/2)e^u the integral becomes ½∫ e^{-x cosh u - νu} du over the real
/// line; the two halves are split at u = 0 (t = x/2) and folded onto u ≥ 0.
pub fn macdonald_k_scaled<T: Real>(nu: T, x: T) -> Result<T> {
    if !(x > T::zero()) {
        return Err(Error::domain("macdonald_k", format!("argument {x} is not positive")));
    }
    let a = nu.abs();
    let half: T = lit(0.5);
    // Exponent of the scaled integrand, relative to e^{-x}.
    let expo = |u: T| -> T {
        let s = (u * half).sinh();
        -(x * lit(2.0) * s * s) + a * u
    };
    let u_peak = (a / x).asinh();
    let peak = expo(u_peak);
    // Walk outward until the integrand is ~e^{-46} below its peak.
    let mut u_hi = u_peak + T::one();
    while expo(u_hi) > peak - lit(46.0) {
        u_hi = u_hi + (u_hi - u_peak).max(T::one());
    }
    let mut bps = vec![T::zero()];
    if u_peak > lit(0.25) {
        bps.push(u_peak * half);
        bps.push(u_peak);
    }
    let mid = u_peak + (u_hi - u_peak) * lit(0.25);
    bps.push(mid);
    bps.push(u_hi);
    let shift = peak.max(T::zero());
    let out = adaptive_gk(
        |u: T| {
            let s = (u * half).sinh();
            let base = -(x * lit(2.0) * s * s) - shift;
            Ok(((base + a * u).exp() + (base - a * u).exp()) * half)
        },
        &bps,
        T::zero(),
        lit::<T>(1e-14).max(T::epsilon() * lit(64.0)),
        400,
        "macdonald_k",
    )?;
    Ok(out.value * shift.exp())
}
