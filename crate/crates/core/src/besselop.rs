//! The Bessel operators Δ_μ, S_μ, T_μ = x^{2μ+1}Δ_μ, and conjugation by multipliers.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::funcspace::function::HalfLineFunction;
use crate::funcspace::grid::log_grid;
use crate::funcspace::jet::{binomial_row, power_derivs};
use crate::funcspace::power;
use crate::scalar::{cx, lit, Cx, Real};
use crate::specfun::Order;

/// One term `coef · x^expo · f^{(deriv)}` of a second-order operator.
#[derive(Debug, Clone, Copy)]
struct Term<T> {
    deriv: usize,
    coef: T,
    expo: T,
}

/// Derivatives 0..=n of Σ coef x^expo f^{(deriv)} from the jet of f to order n+2.
fn op_jet<T: Real>(terms: &[Term<T>], fj: &[Cx<T>], x: T, n: usize) -> Vec<Cx<T>> {
    let mut out = vec![cx(T::zero()); n + 1];
    for t in terms {
        if t.coef == T::zero() {
            continue;
        }
        let p = power_derivs(t.expo, x, n);
        for (k, o) in out.iter_mut().enumerate() {
            let row = binomial_row::<T>(k);
            let mut acc = cx(T::zero());
            for i in 0..=k {
                if p[i] != T::zero() {
                    acc += fj[t.deriv + k - i] * (row[i] * p[i]);
                }
            }
            *o += acc * t.coef;
        }
    }
    out
}

fn apply_terms<T: Real>(f: &HalfLineFunction<T>, terms: Vec<Term<T>>) -> Result<HalfLineFunction<T>> {
    if f.is_zero() {
        return Ok(HalfLineFunction::zero());
    }
    f.require_derivatives(2)?;
    let hint = f.decay_hint();
    let out = if let Some(s) = f.samples() {
        let ys = s
            .xs()
            .iter()
            .map(|&x| Ok(op_jet(&terms, &f.jet(x, 2)?, x, 0)[0]))
            .collect::<Result<Vec<_>>>()?;
        HalfLineFunction::from_samples(s.xs().to_vec(), ys, s.order())?
    } else {
        let order = f.derivative_order().unwrap_or(0).saturating_sub(2);
        let terms = Arc::new(terms);
        let (fv, tv) = (f.clone(), terms.clone());
        let fj = f.clone();
        HalfLineFunction::with_jet(
            move |x| Ok(op_jet(&tv, &fv.jet(x, 2)?, x, 0)[0]),
            order,
            move |x, n| {
                if n > order {
                    return Err(Error::InsufficientDerivatives { required: n, available: order });
                }
                Ok(op_jet(&terms, &fj.jet(x, n + 2)?, x, n))
            },
        )
    };
    Ok(match hint {
        Some(h) => out.with_decay_hint(h),
        None => out,
    })
}

/// Δ_μ f = f'' + (2μ+1) f'/x.
pub fn apply_delta<T: Real>(mu: &Order<T>, f: &HalfLineFunction<T>) -> Result<HalfLineFunction<T>> {
    apply_terms(
        f,
        vec![
            Term { deriv: 2, coef: T::one(), expo: T::zero() },
            Term { deriv: 1, coef: mu.half() * lit(2.0), expo: -T::one() },
        ],
    )
}

/// S_μ f = f'' - (4μ²-1)/(4x²) f.
pub fn apply_s<T: Real>(mu: &Order<T>, f: &HalfLineFunction<T>) -> Result<HalfLineFunction<T>> {
    let m = mu.mu();
    let c = (m - lit(0.5)) * (m + lit(0.5));
    apply_terms(
        f,
        vec![
            Term { deriv: 2, coef: T::one(), expo: T::zero() },
            Term { deriv: 0, coef: -c, expo: lit(-2.0) },
        ],
    )
}

/// S_μ applied `k` times; `k = 0` returns `f`.
pub fn apply_s_power<T: Real>(mu: &Order<T>, f: &HalfLineFunction<T>, k: usize) -> Result<HalfLineFunction<T>> {
    if k > 0 {
        f.require_derivatives(2 * k)?;
    }
    let mut g = f.clone();
    for _ in 0..k {
        g = apply_s(mu, &g)?;
    }
    Ok(g)
}

/// T_μ f = x^{2μ+1} Δ_μ f = (x^{2μ+1} f')'.
pub fn sturm_liouville<T: Real>(mu: &Order<T>, f: &HalfLineFunction<T>) -> Result<HalfLineFunction<T>> {
    let e = mu.half() * lit(2.0);
    apply_terms(
        f,
        vec![
            Term { deriv: 2, coef: T::one(), expo: e },
            Term { deriv: 1, coef: e, expo: e - T::one() },
        ],
    )
}

/// A positive multiplier m(x) together with 1/m(x).
#[derive(Debug, Clone)]
pub struct MultiplierConjugation<T: Real> {
    multiplier: HalfLineFunction<T>,
    inverse: HalfLineFunction<T>,
}

impl<T: Real> MultiplierConjugation<T> {
    /// Checks m > 0 and m · m⁻¹ = 1 on a log sample of (1e-8, 60).
    pub fn new(multiplier: HalfLineFunction<T>, inverse: HalfLineFunction<T>) -> Result<Self> {
        for x in log_grid(lit(1e-8), lit(60.0), 257)? {
            let m = multiplier.eval(x)?;
            let i = inverse.eval(x)?;
            if !(m.re > T::zero()) || m.im != T::zero() {
                return Err(Error::domain("MultiplierConjugation", format!("multiplier not positive at x = {x}")));
            }
            if ((m * i).re - T::one()).abs() > lit(1e-10) {
                return Err(Error::domain("MultiplierConjugation", format!("inverse does not match at x = {x}")));
            }
        }
        Ok(Self { multiplier, inverse })
    }

    /// Multiplication by x^a.
    pub fn power(a: T) -> Self {
        Self { multiplier: power(a), inverse: power(-a) }
    }

    pub fn identity() -> Self {
        Self::power(T::zero())
    }

    pub fn multiplier(&self) -> &HalfLineFunction<T> {
        &self.multiplier
    }

    pub fn inverse(&self) -> &HalfLineFunction<T> {
        &self.inverse
    }

    /// m · f
    pub fn forward(&self, f: &HalfLineFunction<T>) -> Result<HalfLineFunction<T>> {
        self.multiplier.mul(f)
    }

    /// m⁻¹ · f
    pub fn backward(&self, f: &HalfLineFunction<T>) -> Result<HalfLineFunction<T>> {
        self.inverse.mul(f)
    }
}

/// m · A(m⁻¹ · f) for an arbitrary function-to-function operation A.
pub fn conjugate_apply<T, A>(op: A, conj: &MultiplierConjugation<T>, f: &HalfLineFunction<T>) -> Result<HalfLineFunction<T>>
where
    T: Real,
    A: Fn(&HalfLineFunction<T>) -> Result<HalfLineFunction<T>>,
{
    conj.forward(&op(&conj.backward(f)?)?)
}
