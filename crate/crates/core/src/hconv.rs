//! Hankel convolution f ♯ g(x) = ∫∫ D_μ(x,y,z) f(y) g(z) dy dz.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::funcspace::function::{HalfLineFunction, DENSE_ORDER};
use crate::funcspace::quadrature::{adaptive_gk, tanh_sinh};
use crate::funcspace::{breakpoints_for, norm, NormKind, QuadratureSpec};
use crate::hankel::dense_grid;
use crate::scalar::{cx, lit, Cx, Real};
use crate::specfun::{gamma_fn, Order};
use crate::corpus::power_gaussian;

/// 1 / (2^μ Γ(μ+1/2) √π).
fn angular_constant<T: Real>(mu: &Order<T>) -> Result<T> {
    let m = mu.mu();
    Ok(T::one() / (lit::<T>(2.0).powf(m) * gamma_fn(m + lit(0.5))? * T::PI().sqrt()))
}

/// D_μ from the two factors of 16A², p = (x+y)² - z² and q = z² - (x-y)².
/// Callers that know the distance to the support edges pass them factored to
/// avoid cancellation.
pub(crate) fn kernel_d_factored<T: Real>(mu: &Order<T>, x: T, y: T, z: T, p: T, q: T) -> T {
    if !(p > T::zero() && q > T::zero()) {
        return T::zero();
    }
    let m = mu.mu();
    let area = lit::<T>(0.25) * (p * q).sqrt();
    let c = lit::<T>(2.0).powf(m - T::one()) / (gamma_fn(m + lit(0.5)).unwrap_or(T::nan()) * T::PI().sqrt());
    c * (x * y * z).powf(lit::<T>(0.5) - m) * area.powf(lit::<T>(2.0) * m - T::one())
}

/// The triangle kernel D_μ(x, y, z); zero unless |x - y| < z < x + y.
pub fn kernel_d<T: Real>(mu: &Order<T>, x: T, y: T, z: T) -> Result<T> {
    if !(x > T::zero() && y > T::zero() && z > T::zero()) {
        return Err(Error::domain("kernel_d", format!("arguments ({x}, {y}, {z}) must be positive")));
    }
    let p = (x + y - z) * (x + y + z);
    let q = (z - (x - y)) * (z + (x - y));
    Ok(kernel_d_factored(mu, x, y, z, p, q))
}

/// ∫ w(z) D_μ(x, y, z) dz over the support |x - y| < z < x + y.
pub fn kernel_d_integral<T: Real>(
    mu: &Order<T>,
    x: T,
    y: T,
    w: impl Fn(T) -> T,
    spec: &QuadratureSpec<T>,
) -> Result<T> {
    if !(x > T::zero() && y > T::zero()) {
        return Err(Error::domain("kernel_d_integral", format!("arguments ({x}, {y}) must be positive")));
    }
    let a = (x - y).abs();
    Ok(tanh_sinh(
        |z: T, dl: T, dr: T| {
            let p = dr * (x + y + z);
            let q = dl * (z + a);
            Ok(w(z) * kernel_d_factored(mu, x, y, z, p, q))
        },
        a,
        x + y,
        spec.abs_tol,
        spec.rel_tol,
        "kernel_d_integral",
    )?
    .value)
}

/// A sampled g is only piecewise smooth, which caps the angular quadrature
/// well above `abs_tol`; for those the target is `rel_tol` times the size of
/// g(z) z^{-μ-1/2}, the factor that enters the angular integrand.
fn inner_tolerance<T: Real>(mu: &Order<T>, g: &HalfLineFunction<T>, spec: &QuadratureSpec<T>) -> T {
    let Some(s) = g.samples() else {
        return spec.abs_tol;
    };
    let scale = s
        .xs()
        .iter()
        .zip(s.ys())
        .map(|(&z, v)| v.norm() * z.powf(-mu.half()))
        .fold(T::zero(), T::max);
    spec.abs_tol.max(spec.rel_tol * scale)
}

/// Evaluates f ♯ g pointwise.
#[derive(Debug, Clone)]
pub struct Convolver<T: Real> {
    half: T,
    two_mu: T,
    c: T,
    f: HalfLineFunction<T>,
    g: HalfLineFunction<T>,
    g_reach: T,
    g_floor: Option<T>,
    /// Absolute tolerance of the angular integral.
    inner_tol: T,
    spec: QuadratureSpec<T>,
}

impl<T: Real> Convolver<T> {
    pub fn new(mu: &Order<T>, f: &HalfLineFunction<T>, g: &HalfLineFunction<T>, spec: &QuadratureSpec<T>) -> Result<Self> {
        spec.validate()?;
        Ok(Self {
            half: mu.half(),
            two_mu: lit::<T>(2.0) * mu.mu(),
            c: angular_constant(mu)?,
            f: f.clone(),
            g: g.clone(),
            g_reach: match g.samples() {
                Some(s) => spec.upper_for(g).min(*s.xs().last().expect("nonempty samples")),
                None => spec.upper_for(g),
            },
            g_floor: g.samples().map(|s| s.xs()[0]),
            inner_tol: inner_tolerance(mu, g, spec),
            spec: *spec,
        })
    }

    /// ∫ D_μ(x, y, z) g(z) dz through z = T(φ), T² = (x-y)² + 4xy sin²(φ/2).
    ///
    /// T increases with φ, so the values of z where g stops being smooth (its
    /// first sample and its cutoff) become breakpoints in φ.
    pub fn inner(&self, x: T, y: T) -> Result<Cx<T>> {
        let d = x - y;
        if d.abs() >= self.g_reach {
            return Ok(cx(T::zero()));
        }
        let xy = x * y;
        let four_xy = lit::<T>(4.0) * xy;
        let pi = T::PI();
        let phi_at = |z: T| -> Option<T> {
            let s = ((z - d.abs()) * (z + d.abs()) / four_xy).sqrt();
            (s > T::zero() && s < T::one()).then(|| lit::<T>(2.0) * s.asin())
        };
        let mut cuts = vec![T::zero()];
        if let Some(z) = self.g_floor {
            if let Some(p) = phi_at(z) {
                cuts.push(p);
            }
        }
        let top = phi_at(self.g_reach);
        cuts.push(top.unwrap_or(pi));
        let mut total = cx(T::zero());
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if !(b > a) {
                continue;
            }
            let out = tanh_sinh(
                |phi: T, dl: T, dr: T| {
                    let from0 = if a == T::zero() { dl } else { phi };
                    let from_pi = if b == pi { dr } else { pi - phi };
                    let sin = from0.min(from_pi).sin();
                    let hs = (phi * lit(0.5)).sin();
                    let t = (d * d + four_xy * hs * hs).sqrt();
                    if t >= self.g_reach {
                        return Ok(cx(T::zero()));
                    }
                    Ok(self.g.eval(t)? * (t.powf(-self.half) * sin.powf(self.two_mu)))
                },
                a,
                b,
                self.inner_tol,
                self.spec.rel_tol,
                "convolve",
            )?;
            total += out.value;
        }
        Ok(total * (self.c * xy.powf(self.half)))
    }

    pub fn at(&self, x: T) -> Result<Cx<T>> {
        if !(x > T::zero()) {
            return Err(Error::domain("convolve", format!("x = {x} is not positive")));
        }
        let lo = self.spec.x_min.max(x - self.g_reach);
        let hi = self.spec.upper_for(&self.f).min(x + self.g_reach);
        if !(hi > lo) {
            return Ok(cx(T::zero()));
        }
        let mut bp = breakpoints_for(lo, hi, &[&self.f]);
        if x > lo && x < hi {
            bp.push(x);
            bp.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
            bp.dedup();
        }
        let out = adaptive_gk(
            |y| Ok(self.f.eval(y)? * self.inner(x, y)?),
            &bp,
            self.spec.abs_tol,
            self.spec.rel_tol,
            self.spec.max_subdivisions,
            "convolve",
        )?;
        Ok(out.value)
    }
}

fn class_check<T: Real>(mu: &Order<T>, f: &HalfLineFunction<T>, spec: &QuadratureSpec<T>) {
    match norm(f, mu, NormKind::L1Sr, spec) {
        Ok(v) if v.is_finite() => {}
        Ok(v) => log::warn!("convolve: left factor has L1(sr) norm {v}; the result may be meaningless"),
        Err(e) => log::warn!("convolve: could not confirm the left factor is in L1(sr): {e}"),
    }
}

/// x ↦ (f ♯ g)(x), evaluated lazily.
pub fn convolve<T: Real>(
    mu: &Order<T>,
    f: &HalfLineFunction<T>,
    g: &HalfLineFunction<T>,
    spec: &QuadratureSpec<T>,
) -> Result<HalfLineFunction<T>> {
    if f.is_zero() || g.is_zero() {
        return Ok(HalfLineFunction::zero());
    }
    class_check(mu, f, spec);
    let reach = spec.upper_for(f) + spec.upper_for(g);
    let c = Arc::new(Convolver::new(mu, f, g, spec)?);
    Ok(HalfLineFunction::from_fn(move |x| c.at(x)).with_decay_hint(reach))
}

/// f ♯ g sampled on `xs`.
pub fn convolve_on<T: Real>(
    mu: &Order<T>,
    f: &HalfLineFunction<T>,
    g: &HalfLineFunction<T>,
    xs: &[T],
    spec: &QuadratureSpec<T>,
) -> Result<HalfLineFunction<T>> {
    convolve(mu, f, g, spec)?.materialize(xs, DENSE_ORDER)
}

/// f ♯ g on a dense grid over the truncation window, cut off once negligible.
pub fn convolve_dense<T: Real>(
    mu: &Order<T>,
    f: &HalfLineFunction<T>,
    g: &HalfLineFunction<T>,
    spec: &QuadratureSpec<T>,
) -> Result<HalfLineFunction<T>> {
    let c = convolve(mu, f, g, spec)?;
    if c.is_zero() {
        return Ok(c);
    }
    c.materialize_truncating(&dense_grid(spec)?, DENSE_ORDER, spec.abs_tol, 24)
}

/// φ_n(x) = n^{2μ+2} x^{μ+1/2} e^{-n²x²/2}: non-negative, unit mass against r s.
pub fn approx_identity_member<T: Real>(mu: &Order<T>, n: usize) -> Result<HalfLineFunction<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("approximate identity index must be at least 1".into()));
    }
    let nf = lit::<T>(n as f64);
    Ok(power_gaussian(nf.powf(lit::<T>(2.0) * mu.mu() + lit(2.0)), mu.half(), nf * nf * lit(0.5)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{corpus, gauss};
    use crate::funcspace::grid::check_grid;
    use crate::funcspace::{integrate, weight_r, weight_s};
    use crate::hankel::hankel_transform;
    use crate::specfun::bessel_j;

    fn order(mu: f64) -> Order<f64> {
        Order::new(mu).unwrap()
    }

    fn spec() -> QuadratureSpec<f64> {
        QuadratureSpec::default()
    }

    fn d_integral(mu: &Order<f64>, x: f64, y: f64, w: impl Fn(f64) -> f64) -> f64 {
        kernel_d_integral(mu, x, y, w, &spec().with_tolerances(1e-11, 1e-13)).unwrap()
    }

    #[test]
    fn kernel_support_and_symmetry() {
        let h = order(0.5);
        assert_eq!(kernel_d(&h, 1.0, 1.0, 3.0).unwrap(), 0.0);
        assert!(kernel_d(&h, 0.0, 1.0, 1.0).is_err());
        for mu in [-0.25, 0.5, 1.5] {
            let h = order(mu);
            for (x, y, z) in [(1.0, 1.3, 0.7), (0.4, 2.0, 1.9), (3.0, 2.5, 1.0)] {
                let d = kernel_d(&h, x, y, z).unwrap();
                assert!((d - kernel_d(&h, x, z, y).unwrap()).abs() < 1e-14 * d);
                assert!((d - kernel_d(&h, y, x, z).unwrap()).abs() < 1e-14 * d);
            }
        }
    }

    #[test]
    fn kernel_moment() {
        for mu in [-0.25, 0.5, 1.5] {
            let h = order(mu);
            let (x, y) = (1.0, 2.0);
            let v = d_integral(&h, x, y, |z| z.powf(mu + 0.5));
            let expect = (x * y).powf(mu + 0.5) / h.c_mu();
            assert!((v - expect).abs() < 1e-10 * expect, "mu={mu}: {v} vs {expect}");
        }
    }

    #[test]
    fn kernel_product_identity() {
        for mu in [-0.25, 0.5, 1.5] {
            let h = order(mu);
            let k = |u: f64| u.sqrt() * bessel_j(mu, u).unwrap();
            for x in [0.5, 1.0, 2.0] {
                for y in [0.5, 1.0, 2.0] {
                    for t in [0.5, 1.0, 2.0] {
                        let v = d_integral(&h, x, y, |z| k(z * t));
                        let expect = k(x * t) * k(y * t) * t.powf(-mu - 0.5);
                        assert!((v - expect).abs() <= 1e-9 * expect.abs().max(1e-3), "mu={mu} ({x},{y},{t}) {v} vs {expect}");
                    }
                }
            }
        }
    }

    #[test]
    fn angular_form_matches_direct_z_quadrature() {
        let h = order(1.5);
        let g = gauss(&h);
        let c = Convolver::new(&h, &g, &g, &spec()).unwrap();
        for (x, y) in [(0.5, 1.0), (1.0, 1.0), (2.0, 0.7), (3.0, 2.0)] {
            let direct = d_integral(&h, x, y, |z| g.eval(z).unwrap().re);
            let angular = c.inner(x, y).unwrap().re;
            assert!((direct - angular).abs() < 1e-11 * direct.abs().max(1e-3), "({x},{y})");
        }
    }

    #[test]
    fn gaussian_convolution_closed_form() {
        // φ_G ♯ φ_G = h_μ(x^{μ+1/2} e^{-x²}) = 2^{-μ-1} x^{μ+1/2} e^{-x²/4}
        for mu in [-0.25, 0.5, 1.5] {
            let h = order(mu);
            let g = gauss(&h);
            let c = convolve(&h, &g, &g, &spec()).unwrap();
            for x in [0.05f64, 0.5, 1.0, 2.0, 4.0] {
                let expect = 2f64.powf(-mu - 1.0) * x.powf(mu + 0.5) * (-x * x / 4.0).exp();
                let v = c.eval(x).unwrap().re;
                assert!((v - expect).abs() < 1e-9 * expect.max(1e-3), "mu={mu} x={x}: {v} vs {expect}");
            }
        }
    }

    #[test]
    fn convolution_theorem() {
        let s = spec();
        let h = order(0.5);
        let c = corpus::<f64>(&h);
        let f = &c[0].function;
        let g = &c[2].function;
        let fg = convolve_dense(&h, f, g, &s).unwrap();
        let lhs = hankel_transform(&h, &fg, &s).unwrap();
        let hf = hankel_transform(&h, f, &s).unwrap();
        let hg = hankel_transform(&h, g, &s).unwrap();
        let mut diff = 0f64;
        let mut scale = 0f64;
        for x in check_grid::<f64>() {
            let rhs = hf.eval(x).unwrap() * hg.eval(x).unwrap() * weight_r(&h, x).unwrap();
            diff = diff.max((lhs.eval(x).unwrap() - rhs).norm());
            scale = scale.max(rhs.norm());
        }
        assert!(diff <= 1e-6 * scale, "{diff} vs {scale}");
    }

    #[test]
    fn commutative_on_check_points() {
        let h = order(0.5);
        let c = corpus::<f64>(&h);
        let ab = convolve(&h, &c[1].function, &c[3].function, &spec()).unwrap();
        let ba = convolve(&h, &c[3].function, &c[1].function, &spec()).unwrap();
        for x in [0.05, 0.3, 1.0, 2.5, 5.0] {
            let (u, v) = (ab.eval(x).unwrap(), ba.eval(x).unwrap());
            assert!((u - v).norm() < 1e-9 * u.norm().max(1e-6), "x={x}");
        }
    }

    #[test]
    fn zero_factor() {
        let h = order(0.5);
        let g = gauss(&h);
        assert!(convolve(&h, &g, &HalfLineFunction::zero(), &spec()).unwrap().is_zero());
    }

    #[test]
    fn approximate_identity_family() {
        let h = order(0.5);
        let s = spec();
        let mut tail_prev = f64::INFINITY;
        for n in [1, 2, 4, 8] {
            let phi = approx_identity_member(&h, n).unwrap();
            let rs = HalfLineFunction::from_fn({
                let phi = phi.clone();
                move |x: f64| Ok(phi.eval(x)? * weight_r(&h, x)? * weight_s(&h, x)?)
            })
            .with_decay_hint(s.upper_for(&phi));
            let mass = integrate(&rs, &s).unwrap().value.re;
            assert!((mass - 1.0).abs() < 1e-8, "n={n}: {mass}");
            let tail = integrate(&rs, &QuadratureSpec { x_min: 0.5, ..s }).unwrap().value.re;
            assert!(tail < tail_prev);
            tail_prev = tail;
            for x in [1e-3, 0.5, 3.0] {
                assert!(phi.eval(x).unwrap().re > 0.0);
            }
        }
        assert!(tail_prev < 5e-3, "{tail_prev}");
        assert!(approx_identity_member::<f64>(&h, 0).is_err());
    }
}
