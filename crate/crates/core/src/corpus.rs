//! Built-in test functions with exact derivatives.

use crate::error::{Error, Result};
use crate::funcspace::jet::{exp_derivs, gauss_derivs, leibniz_real, power_derivs, to_complex};
use crate::funcspace::HalfLineFunction;
use crate::scalar::{cx, lit, Real};
use crate::specfun::Order;

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 5] = ["gauss", "gauss2", "poly_gauss", "gauss_wide", "exp"];

#[derive(Debug, Clone)]
pub struct CorpusEntry<T: Real> {
    pub name: &'static str,
    pub function: HalfLineFunction<T>,
}

/// `coef · x^a · e^{-b x²}` with all derivatives; a decay hint is set when b > 0.
pub fn power_gaussian<T: Real>(coef: T, a: T, b: T) -> HalfLineFunction<T> {
    let f = HalfLineFunction::with_jet(
        move |x: T| Ok(cx(coef * x.powf(a) * (-b * x * x).exp())),
        usize::MAX,
        move |x, n| {
            let g = to_complex(&gauss_derivs(b, x, n));
            Ok(leibniz_real(&power_derivs(a, x, n), &g, n).into_iter().map(|v| v * coef).collect())
        },
    );
    if b > T::zero() {
        // Smallest X with b X² - a ln X ≥ 80, by fixed-point iteration.
        let mut x = (lit::<T>(80.0) / b).sqrt();
        for _ in 0..8 {
            x = ((lit::<T>(80.0) + a.max(T::zero()) * x.max(T::one()).ln()) / b).sqrt();
        }
        f.with_decay_hint(x)
    } else {
        f
    }
}

/// e^{-c x}, c > 0.
pub fn exp_decay<T: Real>(c: T) -> HalfLineFunction<T> {
    HalfLineFunction::with_jet(
        move |x: T| Ok(cx((-c * x).exp())),
        usize::MAX,
        move |x, n| Ok(to_complex(&exp_derivs(-c, x, n))),
    )
    .with_decay_hint(lit::<T>(80.0) / c)
}

/// sin x with all derivatives (no decay).
pub fn sine<T: Real>() -> HalfLineFunction<T> {
    HalfLineFunction::with_jet(
        |x: T| Ok(cx(x.sin())),
        usize::MAX,
        |x, n| {
            let (s, c) = x.sin_cos();
            Ok((0..=n).map(|k| cx([s, c, -s, -c][k % 4])).collect())
        },
    )
}

/// φ_G = x^{μ+1/2} e^{-x²/2}, its own Hankel transform.
pub fn gauss<T: Real>(mu: &Order<T>) -> HalfLineFunction<T> {
    power_gaussian(T::one(), mu.half(), lit(0.5))
}

/// x^{μ+1/2} e^{-x²}.
pub fn gauss2<T: Real>(mu: &Order<T>) -> HalfLineFunction<T> {
    power_gaussian(T::one(), mu.half(), T::one())
}

/// x^{μ+5/2} e^{-x²/2}.
pub fn poly_gauss<T: Real>(mu: &Order<T>) -> HalfLineFunction<T> {
    power_gaussian(T::one(), mu.half() + lit(2.0), lit(0.5))
}

/// x^{μ+1/2} e^{-x²/8}, a wider Gaussian whose transform is narrower.
pub fn gauss_wide<T: Real>(mu: &Order<T>) -> HalfLineFunction<T> {
    power_gaussian(T::one(), mu.half(), lit(0.125))
}

/// Resolves a built-in name. `exp` is only meaningful for μ = 1/2 but is accepted for any μ.
pub fn builtin<T: Real>(name: &str, mu: &Order<T>) -> Result<HalfLineFunction<T>> {
    Ok(match name {
        "gauss" => gauss(mu),
        "gauss2" => gauss2(mu),
        "poly_gauss" => poly_gauss(mu),
        "gauss_wide" => gauss_wide(mu),
        "exp" => exp_decay(T::one()),
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown builtin '{other}' (expected one of {})",
                BUILTIN_NAMES.join(", ")
            )))
        }
    })
}

/// The four Gaussian-type functions used by the identity checks.
pub fn corpus<T: Real>(mu: &Order<T>) -> Vec<CorpusEntry<T>> {
    vec![
        CorpusEntry { name: "gauss", function: gauss(mu) },
        CorpusEntry { name: "gauss2", function: gauss2(mu) },
        CorpusEntry { name: "poly_gauss", function: poly_gauss(mu) },
        CorpusEntry { name: "gauss_wide", function: gauss_wide(mu) },
    ]
}
