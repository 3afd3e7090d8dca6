//! The kernel N_λ and the resolvent (λ - S_μ)⁻¹ f = N_λ ♯ f.

use crate::error::{Error, Result};
use crate::funcspace::function::{HalfLineFunction, DENSE_ORDER};
use crate::funcspace::grid::hybrid_grid;
use crate::funcspace::QuadratureSpec;
use crate::hankel::{hankel_transform, hankel_transform_dense};
use crate::hconv::convolve;
use crate::scalar::{cx, lit, Real};
use crate::specfun::{gamma_fn, macdonald_k_scaled, Order};

/// Resolvent parameter λ > 0.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Lambda<T>(T);

impl<T: Real> Lambda<T> {
    pub fn new(lambda: T) -> Result<Self> {
        if !(lambda > T::zero()) || !lambda.is_finite() {
            return Err(Error::domain("Lambda", format!("lambda = {lambda} must be positive and finite")));
        }
        Ok(Self(lambda))
    }

    pub fn value(&self) -> T {
        self.0
    }
}

/// Points used when a resolvent is materialized.
pub const RESOLVENT_POINTS: usize = 512;

/// N_λ(x) = λ^{μ/2} x^{1/2} 𝒦_μ(√λ x).
pub fn kernel_n<T: Real>(mu: &Order<T>, lambda: Lambda<T>, x: T) -> Result<T> {
    iterated_kernel(mu, lambda, 1, x)
}

/// N_λ as a function, with decay hint 40/√λ.
pub fn kernel_n_function<T: Real>(mu: &Order<T>, lambda: Lambda<T>) -> HalfLineFunction<T> {
    iterated_kernel_function(mu, lambda, 1).expect("m = 1 is valid")
}

/// N_λ^{(m)}(x) = x^{1/2} (x/2)^{m-1} λ^{(μ-m+1)/2} 𝒦_{μ-m+1}(√λ x) / (m-1)!,
/// the kernel of (λ - S_μ)^{-m}; its transform is y^{μ+1/2} / (λ + y²)^m.
pub fn iterated_kernel<T: Real>(mu: &Order<T>, lambda: Lambda<T>, m: usize, x: T) -> Result<T> {
    if m == 0 {
        return Err(Error::InvalidArgument("iterated kernel needs m >= 1".into()));
    }
    if !(x > T::zero()) {
        return Err(Error::domain("kernel_n", format!("x = {x} is not positive")));
    }
    let l = lambda.value();
    let k = lit::<T>((m - 1) as f64);
    let nu = mu.mu() - k;
    let t = l.sqrt() * x;
    let log_pref = k * (x * lit(0.5)).ln() + (nu * lit(0.5)) * l.ln() - gamma_fn(k + T::one())?.ln();
    Ok(x.sqrt() * (log_pref - t).exp() * macdonald_k_scaled(nu, t)?)
}

/// N_λ^{(m)} as a function.
pub fn iterated_kernel_function<T: Real>(mu: &Order<T>, lambda: Lambda<T>, m: usize) -> Result<HalfLineFunction<T>> {
    if m == 0 {
        return Err(Error::InvalidArgument("iterated kernel needs m >= 1".into()));
    }
    let mu = *mu;
    let hint = (lit::<T>(40.0) + lit::<T>(6.0 * (m - 1) as f64)) / lambda.value().sqrt();
    Ok(HalfLineFunction::from_fn(move |x| Ok(cx(iterated_kernel(&mu, lambda, m, x)?))).with_decay_hint(hint))
}

/// N_λ^{(k)}(y) for many (λ, y) pairs: ln(e^t 𝒦_ν(t)) is tabulated on a uniform
/// grid in ln t and interpolated with 8-point Lagrange polynomials.
#[derive(Debug, Clone)]
pub(crate) struct KernelTable<T> {
    nu: T,
    km1: T,
    log_fact: T,
    s0: T,
    inv_h: T,
    vals: Vec<T>,
}

const KT_STEP: f64 = 0.02;
const KT_T_MIN: f64 = 1e-14;
const KT_T_MAX: f64 = 800.0;

impl<T: Real> KernelTable<T> {
    pub(crate) fn new(mu: &Order<T>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("iterated kernel needs m >= 1".into()));
        }
        let km1 = lit::<T>((k - 1) as f64);
        let nu = mu.mu() - km1;
        let s0 = lit::<T>(KT_T_MIN.ln());
        let h = lit::<T>(KT_STEP);
        let n = ((KT_T_MAX.ln() - KT_T_MIN.ln()) / KT_STEP).ceil() as usize + 8;
        let vals = (0..n)
            .map(|i| {
                let t = (s0 + h * lit::<T>(i as f64)).exp();
                Ok(macdonald_k_scaled(nu, t)?.ln())
            })
            .collect::<Result<Vec<T>>>()?;
        Ok(Self { nu, km1, log_fact: gamma_fn(km1 + T::one())?.ln(), s0, inv_h: T::one() / h, vals })
    }

    fn log_scaled_k(&self, t: T) -> Result<T> {
        let p = (t.ln() - self.s0) * self.inv_h;
        let i0 = p.floor().to_isize().unwrap_or(-1) - 3;
        if i0 < 0 || (i0 as usize) + 8 > self.vals.len() {
            return Ok(macdonald_k_scaled(self.nu, t)?.ln());
        }
        let q = p - lit::<T>(i0 as f64);
        let mut acc = T::zero();
        for i in 0..8 {
            let mut w = T::one();
            for j in 0..8 {
                if j != i {
                    w = w * (q - lit::<T>(j as f64)) / lit::<T>(i as f64 - j as f64);
                }
            }
            acc += w * self.vals[i0 as usize + i];
        }
        Ok(acc)
    }

    /// N_λ^{(k)}(y) with λ = e^{ln_lambda}.
    pub(crate) fn eval(&self, ln_lambda: T, y: T) -> Result<T> {
        let half = lit::<T>(0.5);
        let t = (ln_lambda * half).exp() * y;
        let e = self.km1 * (y * half).ln() + self.nu * half * ln_lambda - self.log_fact - t;
        // 𝒦 grows at most like t^{-|ν|} (log for ν = 0) near 0.
        if e - self.nu.abs() * t.ln().min(T::zero()) + T::one() < lit(-745.0) {
            return Ok(T::zero());
        }
        Ok(y.sqrt() * (e + self.log_scaled_k(t)?).exp())
    }
}

/// g = N_λ ♯ f, the solution of (λ - S_μ) g = f, evaluated lazily.
pub fn resolvent_apply<T: Real>(
    mu: &Order<T>,
    lambda: Lambda<T>,
    f: &HalfLineFunction<T>,
    spec: &QuadratureSpec<T>,
) -> Result<HalfLineFunction<T>> {
    if f.is_zero() {
        return Ok(HalfLineFunction::zero());
    }
    convolve(mu, &kernel_n_function(mu, lambda), f, spec)
}

/// The grid used to materialize resolvents and other smooth outputs.
pub fn resolvent_grid<T: Real>(spec: &QuadratureSpec<T>) -> Result<Vec<T>> {
    hybrid_grid(spec.x_min, spec.x_max, RESOLVENT_POINTS, T::one())
}

/// N_λ ♯ f materialized on [`resolvent_grid`], cut off once negligible.
pub fn resolvent_dense<T: Real>(
    mu: &Order<T>,
    lambda: Lambda<T>,
    f: &HalfLineFunction<T>,
    spec: &QuadratureSpec<T>,
) -> Result<HalfLineFunction<T>> {
    let g = resolvent_apply(mu, lambda, f, spec)?;
    if g.is_zero() {
        return Ok(g);
    }
    g.materialize_truncating(&resolvent_grid(spec)?, DENSE_ORDER, spec.abs_tol, 24)
}

/// h_μ((λ + y²)⁻¹ h_μ f): the same resolvent through the transform.
pub fn resolvent_spectral<T: Real>(
    mu: &Order<T>,
    lambda: Lambda<T>,
    f: &HalfLineFunction<T>,
    spec: &QuadratureSpec<T>,
) -> Result<HalfLineFunction<T>> {
    if f.is_zero() {
        return Ok(HalfLineFunction::zero());
    }
    let l = lambda.value();
    let hf = hankel_transform_dense(mu, f, spec)?;
    let damped = hf.mul(&HalfLineFunction::from_real_fn(move |y: T| T::one() / (l + y * y)))?;
    hankel_transform(mu, &damped, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::besselop::apply_s;
    use crate::corpus::{corpus, exp_decay, gauss};
    use crate::funcspace::grid::check_grid;
    use crate::funcspace::{norm, NormKind};
    use crate::hconv::Convolver;

    fn order(mu: f64) -> Order<f64> {
        Order::new(mu).unwrap()
    }

    fn lam(l: f64) -> Lambda<f64> {
        Lambda::new(l).unwrap()
    }

    fn spec() -> QuadratureSpec<f64> {
        QuadratureSpec::default()
    }

    fn rel_on_grid(a: &HalfLineFunction<f64>, b: &HalfLineFunction<f64>) -> f64 {
        let mut d = 0f64;
        let mut m = 0f64;
        for x in check_grid::<f64>() {
            let (u, v) = (a.eval(x).unwrap(), b.eval(x).unwrap());
            d = d.max((u - v).norm());
            m = m.max(v.norm());
        }
        d / m
    }

    #[test]
    fn lambda_must_be_positive() {
        assert!(Lambda::new(0.0).is_err());
        assert!(Lambda::new(-1.0).is_err());
        assert!(Lambda::new(f64::NAN).is_err());
        assert_eq!(Lambda::new(2.0).unwrap().value(), 2.0);
    }

    #[test]
    fn kernel_l1_norm_is_inverse_lambda() {
        for mu in [-0.25, 0.5, 1.5] {
            let h = order(mu);
            for l in [0.5, 1.0, 4.0] {
                let n = norm(&kernel_n_function(&h, lam(l)), &h, NormKind::L1Sr, &spec()).unwrap();
                assert!((l * n - 1.0).abs() < 1e-9, "mu={mu} l={l}: {}", l * n);
            }
        }
    }

    #[test]
    fn half_order_closed_form() {
        let h = order(0.5);
        for l in [0.5, 1.0, 4.0] {
            for x in [1e-3, 0.1, 1.0, 7.0] {
                let v = kernel_n(&h, lam(l), x).unwrap();
                let e = (std::f64::consts::PI / 2.0).sqrt() * (-(l as f64).sqrt() * x).exp();
                assert!((v - e).abs() < 1e-13 * e, "l={l} x={x}");
            }
        }
    }

    #[test]
    fn kernel_transforms() {
        for mu in [-0.25, 0.5, 1.5] {
            let h = order(mu);
            for l in [0.5, 1.0, 4.0] {
                for m in [1, 2] {
                    let t = hankel_transform(&h, &iterated_kernel_function(&h, lam(l), m).unwrap(), &spec()).unwrap();
                    for y in [0.5f64, 1.0, 2.0] {
                        let e = y.powf(mu + 0.5) / (l + y * y).powi(m as i32);
                        let v = t.eval(y).unwrap().re;
                        assert!((v - e).abs() < 1e-9 * e, "mu={mu} l={l} m={m} y={y}: {v} vs {e}");
                    }
                }
            }
        }
    }

    #[test]
    fn kernel_squared_is_iterated_kernel() {
        let s = spec();
        for mu in [-0.25, 1.5] {
            let h = order(mu);
            let n = kernel_n_function(&h, lam(1.0));
            let c = Convolver::new(&h, &n, &n, &s).unwrap();
            for x in [0.2, 1.0, 3.0] {
                let v = c.at(x).unwrap().re;
                let e = iterated_kernel(&h, lam(1.0), 2, x).unwrap();
                assert!((v - e).abs() < 1e-8 * e, "mu={mu} x={x}: {v} vs {e}");
            }
        }
    }

    #[test]
    fn routes_agree() {
        let s = spec();
        for mu in [-0.25, 1.5] {
            let h = order(mu);
            for e in corpus::<f64>(&h).into_iter().take(2) {
                let a = resolvent_dense(&h, lam(1.0), &e.function, &s).unwrap();
                let b = resolvent_spectral(&h, lam(1.0), &e.function, &s).unwrap();
                let r = rel_on_grid(&a, &b);
                assert!(r < 1e-6, "mu={mu} {}: {r}", e.name);
            }
        }
    }

    #[test]
    fn half_order_exponential_closed_form() {
        // S_{1/2} = d²/dx²: (λ - d²/dx²) g = e^{-x}, g(0) = 0 gives
        // g = (e^{-x} - e^{-√λ x}) / (λ - 1).
        let h = order(0.5);
        let s = spec();
        for l in [0.25, 4.0] {
            let g = resolvent_apply(&h, lam(l), &exp_decay(1.0), &s).unwrap();
            for x in [0.05f64, 0.5, 1.0, 3.0] {
                let e = ((-x).exp() - (-(l as f64).sqrt() * x).exp()) / (l - 1.0);
                let v = g.eval(x).unwrap().re;
                assert!((v - e).abs() < 1e-8 * e.abs(), "l={l} x={x}: {v} vs {e}");
            }
        }
    }

    #[test]
    fn defect_and_contraction() {
        let s = spec();
        let h = order(0.5);
        let f = gauss(&h);
        for l in [0.25, 1.0, 4.0] {
            let g = resolvent_dense(&h, lam(l), &f, &s).unwrap();
            let sg = apply_s(&h, &g).unwrap();
            let lhs = g.scale_real(l).sub(&sg).unwrap();
            assert!(rel_on_grid(&lhs, &f) < 1e-4, "l={l}");
            for k in [NormKind::LinfR, NormKind::L1Sr, NormKind::LpSrp(2.0)] {
                let ng = norm(&g, &h, k, &s).unwrap();
                let nf = norm(&f, &h, k, &s).unwrap();
                assert!(l * ng <= nf * (1.0 + 1e-6), "l={l} {k:?}: {} > {nf}", l * ng);
            }
        }
    }

    #[test]
    fn spectral_round_trip() {
        // h_μ((λ+y²) h_μ R_λ f) = f
        let s = spec();
        let h = order(1.5);
        let f = gauss(&h);
        let l = 1.0;
        let g = resolvent_spectral(&h, lam(l), &f, &s).unwrap().materialize(&resolvent_grid(&s).unwrap(), DENSE_ORDER).unwrap();
        let hg = hankel_transform_dense(&h, &g, &s).unwrap();
        let back = hankel_transform(&h, &hg.mul(&HalfLineFunction::from_real_fn(move |y: f64| l + y * y)).unwrap(), &s).unwrap();
        let r = rel_on_grid(&back, &f);
        assert!(r < 1e-5, "{r}");
    }

    #[test]
    fn kernel_table_matches_direct_evaluation() {
        for mu in [-0.25, 0.5, 1.5] {
            let h = order(mu);
            for k in [1, 2, 3] {
                let t = KernelTable::new(&h, k).unwrap();
                for l in [1e-8, 0.3, 1.0, 50.0, 3000.0] {
                    for y in [1e-6, 0.013, 0.4, 1.7, 9.0] {
                        let d = iterated_kernel(&h, lam(l), k, y).unwrap();
                        let v = t.eval(f64::ln(l), y).unwrap();
                        assert!((v - d).abs() <= 1e-12 * d.abs() + 1e-300, "mu={mu} k={k} l={l} y={y}: {v} vs {d}");
                    }
                }
            }
        }
    }

    #[test]
    fn zero_in_zero_out() {
        let h = order(0.5);
        let z = HalfLineFunction::<f64>::zero();
        assert!(resolvent_apply(&h, lam(1.0), &z, &spec()).unwrap().is_zero());
        assert!(resolvent_spectral(&h, lam(1.0), &z, &spec()).unwrap().is_zero());
    }
}
