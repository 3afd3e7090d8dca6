//! Function representations on (0, ∞), the weights r and s, weighted norms and
//! seminorms, and the quadrature engine.

pub mod function;
pub mod grid;
pub mod jet;
pub mod quadrature;

use crate::besselop::apply_s_power;
use crate::error::{Error, Result};
use crate::scalar::{cx, lit, to_f64, Cx, Real};
use crate::specfun::Order;

pub use function::{constant, power, HalfLineFunction, Kind, Samples, DENSE_ORDER, SAMPLE_ORDER};
use grid::{log_grid, window_breakpoints};
use jet::{leibniz_real, power_derivs};
use quadrature::adaptive_gk;

/// Tolerances and truncation window shared by every integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    /// Lower truncation of (0, ∞).
    pub x_min: T,
    /// Upper truncation of (0, ∞).
    pub x_max: T,
    pub max_subdivisions: usize,
}

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        Self {
            rel_tol: lit(1e-9),
            abs_tol: lit(1e-14),
            x_min: lit(1e-8),
            x_max: lit(60.0),
            max_subdivisions: 2000,
        }
    }
}

impl<T: Real> QuadratureSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > T::zero()) || !(self.abs_tol > T::zero()) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        if !(self.x_min > T::zero()) || !(self.x_max > self.x_min) {
            return Err(Error::InvalidArgument(format!(
                "truncation window needs 0 < x_min < x_max (got {} .. {})",
                self.x_min, self.x_max
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidArgument("max_subdivisions must be positive".into()));
        }
        Ok(())
    }

    /// Upper end of the integration window for `f`.
    pub fn upper_for(&self, f: &HalfLineFunction<T>) -> T {
        f.decay_hint().map_or(self.x_max, |h| h.min(self.x_max)).max(self.x_min * lit(2.0))
    }

    pub fn with_tolerances(mut self, rel_tol: T, abs_tol: T) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }
}

/// Selects one of the weighted norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind<T> {
    /// L^p(s r^p), p ≥ 1.
    LpSrp(T),
    /// L^∞(r).
    LinfR,
    /// L^1(s r).
    L1Sr,
    /// max(L^1(s r), L^∞(r)).
    Y,
}

impl<T: Real> NormKind<T> {
    pub fn lp(p: T) -> Result<Self> {
        if !(p >= T::one()) || !p.is_finite() {
            return Err(Error::InvalidArgument(format!("p = {p} must lie in [1, ∞)")));
        }
        Ok(NormKind::LpSrp(p))
    }
}

/// r(x) = x^{-μ-1/2}.
pub fn weight_r<T: Real>(mu: &Order<T>, x: T) -> Result<T> {
    if !(x > T::zero()) {
        return Err(Error::domain("weight_r", format!("x = {x} is not positive")));
    }
    Ok(x.powf(-mu.half()))
}

/// s(x) = x^{2μ+1} / c_μ.
pub fn weight_s<T: Real>(mu: &Order<T>, x: T) -> Result<T> {
    if !(x > T::zero()) {
        return Err(Error::domain("weight_s", format!("x = {x} is not positive")));
    }
    Ok(x.powf(mu.half() * lit(2.0)) / mu.c_mu())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: Cx<T>,
    pub error: T,
}

fn warn_if_truncated<T: Real>(f: &HalfLineFunction<T>, spec: &QuadratureSpec<T>) {
    if let Some(s) = f.samples() {
        let edge = s.ys().last().map(|v| v.norm()).unwrap_or(T::zero());
        if edge > spec.abs_tol {
            log::warn!(
                "grid function ends at x = {} with |f| = {:e}; it is treated as zero beyond",
                to_f64(*s.xs().last().unwrap()),
                to_f64(edge)
            );
        }
    }
}

/// ∫ g over the truncation window (further limited by g's decay hint).
pub fn integrate<T: Real>(g: &HalfLineFunction<T>, spec: &QuadratureSpec<T>) -> Result<Integral<T>> {
    spec.validate()?;
    if g.is_zero() {
        return Ok(Integral { value: cx(T::zero()), error: T::zero() });
    }
    warn_if_truncated(g, spec);
    let bp = breakpoints_for(spec.x_min, spec.upper_for(g), &[g]);
    let out = adaptive_gk(|x| g.eval(x), &bp, spec.abs_tol, spec.rel_tol, spec.max_subdivisions, "integrate")?;
    Ok(Integral { value: out.value, error: out.error })
}

/// Breakpoints on `[lo, hi]`: the standard window split plus the nodes of every
/// grid function involved, so that each panel sees a single interpolating polynomial.
pub(crate) fn breakpoints_for<T: Real>(lo: T, hi: T, fs: &[&HalfLineFunction<T>]) -> Vec<T> {
    let mut bp = window_breakpoints(lo, hi);
    let mut merged = false;
    for f in fs {
        if let Some(s) = f.samples() {
            bp.extend(s.xs().iter().copied().filter(|&x| x > lo && x < hi));
            merged = true;
        }
    }
    if merged {
        bp.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        bp.dedup();
    }
    bp
}

/// Integral of a real function over the truncation window, up to `upper`.
pub(crate) fn integrate_real<T: Real>(
    f: impl Fn(T) -> Result<T>,
    upper: T,
    spec: &QuadratureSpec<T>,
    fs: &[&HalfLineFunction<T>],
    op: &'static str,
) -> Result<T> {
    let bp = breakpoints_for(spec.x_min, upper.min(spec.x_max), fs);
    Ok(adaptive_gk(f, &bp, spec.abs_tol, spec.rel_tol, spec.max_subdivisions, op)?.value)
}

/// The evaluation window for sup-type quantities.
fn sup_window<T: Real>(f: &HalfLineFunction<T>, spec: &QuadratureSpec<T>) -> (T, T) {
    let mut lo = spec.x_min;
    let mut hi = spec.upper_for(f);
    if let Some(s) = f.samples() {
        lo = lo.max(s.xs()[0]);
        hi = hi.min(*s.xs().last().unwrap());
    }
    (lo, hi.max(lo * lit(1.0 + 1e-9)))
}

const SUP_POINTS: usize = 4096;
const SUP_REFINE: usize = 256;

/// Approximate sup of a non-negative function on `[lo, hi]`: a log-uniform scan
/// followed by one local refinement around the largest sample.
pub fn sup_on<T: Real>(f: impl Fn(T) -> Result<T>, lo: T, hi: T) -> Result<T> {
    let xs = log_grid(lo, hi, SUP_POINTS)?;
    let mut best = T::zero();
    let mut arg = 0usize;
    for (i, &x) in xs.iter().enumerate() {
        let v = f(x)?;
        if v.is_nan() {
            return Err(Error::domain("sup", format!("NaN at x = {x}")));
        }
        if v > best {
            best = v;
            arg = i;
        }
    }
    let a = xs[arg.saturating_sub(1)];
    let b = xs[(arg + 1).min(xs.len() - 1)];
    if b > a {
        for x in log_grid(a, b, SUP_REFINE)? {
            best = best.max(f(x)?);
        }
    }
    Ok(best)
}

/// Weighted norm of `f` of the selected kind.
pub fn norm<T: Real>(f: &HalfLineFunction<T>, mu: &Order<T>, kind: NormKind<T>, spec: &QuadratureSpec<T>) -> Result<T> {
    spec.validate()?;
    if f.is_zero() {
        return Ok(T::zero());
    }
    match kind {
        NormKind::LpSrp(p) => {
            if !(p >= T::one()) {
                return Err(Error::InvalidArgument(format!("p = {p} must be at least 1")));
            }
            warn_if_truncated(f, spec);
            let e = mu.half() * (lit::<T>(2.0) - p);
            let c = mu.c_mu();
            let v = integrate_real(|x| Ok(f.eval(x)?.norm().powf(p) * x.powf(e) / c), spec.upper_for(f), spec, &[f], "norm")?;
            Ok(v.powf(T::one() / p))
        }
        NormKind::L1Sr => norm(f, mu, NormKind::LpSrp(T::one()), spec),
        NormKind::LinfR => {
            let (lo, hi) = sup_window(f, spec);
            let h = mu.half();
            sup_on(|x| Ok(f.eval(x)?.norm() * x.powf(-h)), lo, hi)
        }
        NormKind::Y => Ok(norm(f, mu, NormKind::L1Sr, spec)?.max(norm(f, mu, NormKind::LinfR, spec)?)),
    }
}

/// Coefficients a_i with (x⁻¹D)^k g = Σ_i a_i x^{i-2k} g^{(i)}, i = 0..=k.
fn xinv_d_coefficients<T: Real>(k: usize) -> Vec<T> {
    let mut a = vec![T::one()];
    for step in 0..k {
        let mut next = vec![T::zero(); a.len() + 1];
        for (i, &c) in a.iter().enumerate() {
            next[i] += c * lit::<T>(i as f64 - 2.0 * step as f64);
            next[i + 1] += c;
        }
        a = next;
    }
    a
}

/// γ_{m,k}(f) = sup |x^m (x⁻¹D)^k (r f)|, approximated on a dense log grid.
pub fn seminorm_gamma<T: Real>(
    f: &HalfLineFunction<T>,
    mu: &Order<T>,
    m: usize,
    k: usize,
    spec: &QuadratureSpec<T>,
) -> Result<T> {
    spec.validate()?;
    if f.is_zero() {
        return Ok(T::zero());
    }
    f.require_derivatives(k)?;
    let a = xinv_d_coefficients::<T>(k);
    let h = mu.half();
    let (mut lo, hi) = sup_window(f, spec);
    if k >= 1 {
        // The expansion in x^{i-2k} g^{(i)} loses about ε x^{-2k} to cancellation
        // near the origin; start the scan where that stays below 1e-8 relative.
        let floor = (T::epsilon() * lit(1e8)).powf(T::one() / lit::<T>((2 * k) as f64));
        lo = lo.max(floor);
    }
    let mf = lit::<T>(m as f64);
    sup_on(
        |x| {
            let g = leibniz_real(&power_derivs(-h, x, k), &f.jet(x, k)?, k);
            let mut acc = cx(T::zero());
            for (i, &c) in a.iter().enumerate() {
                if c != T::zero() {
                    acc += g[i] * (c * x.powf(lit::<T>(i as f64) - lit::<T>(2.0 * k as f64)));
                }
            }
            Ok(acc.norm() * x.powf(mf))
        },
        lo,
        hi.max(lo * lit(1.0 + 1e-9)),
    )
}

/// ρ_m(f) = max over k ≤ m of ‖S_μ^k f‖_Y.
pub fn seminorm_rho<T: Real>(f: &HalfLineFunction<T>, mu: &Order<T>, m: usize, spec: &QuadratureSpec<T>) -> Result<T> {
    if f.is_zero() {
        return Ok(T::zero());
    }
    f.require_derivatives(2 * m)?;
    let mut best = T::zero();
    for k in 0..=m {
        let g = apply_s_power(mu, f, k)?;
        best = best.max(norm(&g, mu, NormKind::Y, spec)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::specfun::gamma_fn;
    use proptest::prelude::*;

    fn spec() -> QuadratureSpec<f64> {
        QuadratureSpec::default()
    }

    fn order(mu: f64) -> Order<f64> {
        Order::new(mu).unwrap()
    }

    #[test]
    fn weights() {
        let h = order(0.5);
        assert_eq!(weight_r(&h, 1.0).unwrap(), 1.0);
        assert!((weight_r(&h, 4.0).unwrap() - 0.25).abs() < 1e-16);
        assert!((weight_r(&order(-0.25), 2.0).unwrap() - 2f64.powf(-0.25)).abs() < 1e-16);
        let c = 2f64.sqrt() * gamma_fn(1.5).unwrap();
        assert!((weight_s(&h, 1.0).unwrap() - 1.0 / c).abs() < 1e-15);
        assert!((weight_s(&h, 2.0).unwrap() - 4.0 / c).abs() < 1e-15);
        assert!(weight_r(&h, 0.0).is_err());
        assert!(weight_s(&h, -1.0).is_err());
    }

    proptest! {
        #[test]
        fn s_r_identity(mu in -0.49f64..3.0, x in 1e-6f64..50.0) {
            let h = order(mu);
            let r = weight_r(&h, x).unwrap();
            let v = weight_s(&h, x).unwrap() * r * h.c_mu() * r;
            prop_assert!((v - 1.0).abs() < 1e-12);
        }

        #[test]
        fn integrate_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let f = corpus::gauss::<f64>(&order(0.5));
            let g = corpus::exp_decay::<f64>(1.0);
            let s = spec();
            let lhs = integrate(&f.scale_real(a).add(&g.scale_real(b)).unwrap(), &s).unwrap();
            let rf = integrate(&f, &s).unwrap();
            let rg = integrate(&g, &s).unwrap();
            let tol = lhs.error + a.abs() * rf.error + b.abs() * rg.error + 1e-15;
            prop_assert!((lhs.value - (rf.value * a + rg.value * b)).norm() <= tol.max(1e-12));
        }
    }

    #[test]
    fn integrate_examples() {
        let s = QuadratureSpec { x_max: 40.0, ..spec() };
        // The window starts at x_min, so the exact value is e^{-x_min} - e^{-40}.
        let e = integrate(&corpus::exp_decay::<f64>(1.0), &s).unwrap();
        assert!((e.value.re - ((-1e-8f64).exp() - (-40f64).exp())).abs() < 1e-10);
        assert!((e.value.re - 1.0).abs() < 2e-8);
        let h = order(0.5);
        let n = 2.0;
        let g = corpus::power_gaussian::<f64>(1.0, 2.0, n * n / 2.0);
        let v = integrate(&g, &s).unwrap().value.re;
        let expect = h.c_mu() * n.powf(-3.0);
        assert!((v - expect).abs() < 1e-10 * expect);
        assert_eq!(integrate(&HalfLineFunction::<f64>::zero(), &s).unwrap().value, cx(0.0));
    }

    #[test]
    fn norm_examples() {
        let h = order(0.5);
        let g = corpus::gauss::<f64>(&h);
        assert!((norm(&g, &h, NormKind::LinfR, &spec()).unwrap() - 1.0).abs() < 1e-12);
        let z = HalfLineFunction::<f64>::zero();
        for k in [NormKind::LinfR, NormKind::L1Sr, NormKind::Y, NormKind::LpSrp(2.0)] {
            assert_eq!(norm(&z, &h, k, &spec()).unwrap(), 0.0);
        }
        assert!(NormKind::lp(0.5).is_err());
    }

    #[test]
    fn interpolation_bound_between_lp_norms() {
        for mu in [-0.25, 0.5, 1.5] {
            let h = order(mu);
            for f in corpus::corpus::<f64>(&h) {
                let inf = norm(&f.function, &h, NormKind::LinfR, &spec()).unwrap();
                let one = norm(&f.function, &h, NormKind::L1Sr, &spec()).unwrap();
                for p in [1.0, 2.0, 4.0] {
                    let lp = norm(&f.function, &h, NormKind::LpSrp(p), &spec()).unwrap();
                    let bound = inf.powf((p - 1.0) / p) * one.powf(1.0 / p);
                    assert!(lp <= bound * (1.0 + 1e-8), "{} mu={mu} p={p}: {lp} > {bound}", f.name);
                }
            }
        }
    }

    #[test]
    fn gamma_seminorm_examples() {
        let h = order(0.5);
        let g = corpus::gauss::<f64>(&h);
        let s = spec();
        assert!((seminorm_gamma(&g, &h, 0, 0, &s).unwrap() - 1.0).abs() < 1e-12);
        assert!((seminorm_gamma(&g, &h, 0, 1, &s).unwrap() - 1.0).abs() < 1e-7);
        assert!((seminorm_gamma(&g, &h, 2, 0, &s).unwrap() - 2.0 / std::f64::consts::E).abs() < 1e-8);
        // (x⁻¹D)^2 e^{-x²/2} = e^{-x²/2}: the sup 1 sits at the origin, and the
        // scan starts at the cancellation floor near 0.012.
        let g02 = seminorm_gamma(&g, &h, 0, 2, &s).unwrap();
        assert!(g02 <= 1.0 + 1e-12 && g02 > 1.0 - 1e-4, "{g02}");
        let lazy = HalfLineFunction::from_real_fn(|x: f64| (-x * x).exp());
        assert!(matches!(seminorm_gamma(&lazy, &h, 0, 1, &s), Err(Error::InsufficientDerivatives { .. })));
    }

    #[test]
    fn xinv_d_expansion() {
        // (x⁻¹D)^2 g = -x^{-3} g' + x^{-2} g''
        assert_eq!(xinv_d_coefficients::<f64>(2), vec![0.0, -1.0, 1.0]);
        assert_eq!(xinv_d_coefficients::<f64>(1), vec![0.0, 1.0]);
    }

    #[test]
    fn rho_examples() {
        let h = order(0.5);
        let g = corpus::gauss::<f64>(&h);
        let s = spec();
        let y = norm(&g, &h, NormKind::Y, &s).unwrap();
        assert!((seminorm_rho(&g, &h, 0, &s).unwrap() - y).abs() < 1e-14);
        let eig = g.mul(&corpus::power_gaussian(1.0, 2.0, 0.0)).unwrap().sub(&g.scale_real(2.0 * 1.5)).unwrap();
        let expect = y.max(norm(&eig, &h, NormKind::Y, &s).unwrap());
        assert!((seminorm_rho(&g, &h, 1, &s).unwrap() - expect).abs() < 1e-8 * expect);
        assert_eq!(seminorm_rho(&HalfLineFunction::zero(), &h, 3, &s).unwrap(), 0.0);
    }

    #[test]
    fn y_norm_bounded_by_gamma_seminorms() {
        // ‖φ‖_Y ≤ C (γ_{0,0} + γ_{m,0}) with one constant across the corpus.
        let s = spec();
        for mu in [-0.25, 0.5, 1.5] {
            let h = order(mu);
            let m = (2.0 * mu + 3.0).ceil() as usize;
            let mut ratios = vec![];
            for f in corpus::corpus::<f64>(&h) {
                let y = norm(&f.function, &h, NormKind::Y, &s).unwrap();
                let g = seminorm_gamma(&f.function, &h, 0, 0, &s).unwrap() + seminorm_gamma(&f.function, &h, m, 0, &s).unwrap();
                ratios.push(y / g);
            }
            let max = ratios.iter().cloned().fold(0.0, f64::max);
            assert!(max.is_finite() && max < 10.0, "mu={mu}: {ratios:?}");
        }
    }
}
