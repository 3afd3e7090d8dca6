//! The Hankel transform h_μ f(x) = ∫₀^∞ √(xy) J_μ(xy) f(y) dy and the pairing ∫ f g.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::funcspace::function::{HalfLineFunction, DENSE_ORDER};
use crate::funcspace::grid::{hybrid_grid, log_grid, window_breakpoints};
use crate::funcspace::quadrature::adaptive_gk;
use crate::funcspace::{breakpoints_for, QuadratureSpec};
use crate::scalar::{cx, lit, to_f64, Cx, Real};
use crate::specfun::{BesselJ, Order};

/// Default materialization grid: 256 log-uniform points on [1e-3, 30].
pub fn default_output_grid<T: Real>() -> Vec<T> {
    log_grid(lit(1e-3), lit(30.0), 256).expect("valid constants")
}

/// Dense grid over the whole truncation window, used when a transform must be
/// evaluated again inside another integral.
pub(crate) fn dense_grid<T: Real>(spec: &QuadratureSpec<T>) -> Result<Vec<T>> {
    hybrid_grid(spec.x_min, spec.x_max, 1024, T::one())
}

/// Evaluates h_μ f at single points.
#[derive(Debug, Clone)]
pub struct Transformer<T: Real> {
    j: BesselJ<T>,
    half: T,
    f: HalfLineFunction<T>,
    spec: QuadratureSpec<T>,
    lo: T,
    hi: T,
}

impl<T: Real> Transformer<T> {
    pub fn new(mu: &Order<T>, f: &HalfLineFunction<T>, spec: &QuadratureSpec<T>) -> Result<Self> {
        spec.validate()?;
        let mut lo = spec.x_min;
        let mut hi = spec.upper_for(f);
        if let Some(s) = f.samples() {
            lo = lo.max(s.xs()[0]);
            hi = hi.min(*s.xs().last().unwrap());
        }
        Ok(Self { j: BesselJ::new(mu.mu())?, half: mu.half(), f: f.clone(), spec: *spec, lo, hi })
    }

    /// √(xy) J_μ(xy), computed as (xy)^{μ+1/2} · (xy)^{-μ} J_μ(xy) so that small
    /// arguments never form 0 · ∞.
    #[inline]
    pub fn kernel(&self, xy: T) -> T {
        xy.powf(self.half) * self.j.scaled(xy)
    }

    pub fn at(&self, x: T) -> Result<Cx<T>> {
        if !(x > T::zero()) {
            return Err(Error::domain("hankel_transform", format!("x = {x} is not positive")));
        }
        if self.f.is_zero() || !(self.hi > self.lo) {
            return Ok(cx(T::zero()));
        }
        let period = T::PI() / x;
        let panels = ((self.hi - self.lo) / period).ceil().to_usize().unwrap_or(usize::MAX);
        if panels > self.spec.max_subdivisions {
            return Err(Error::OscillationBudget { x: to_f64(x), panels, limit: self.spec.max_subdivisions });
        }
        let head = period.min(self.hi);
        let mut bp = window_breakpoints(self.lo, head);
        let mut y = head + period;
        while y < self.hi {
            bp.push(y);
            y = y + period;
        }
        if *bp.last().unwrap() < self.hi {
            bp.push(self.hi);
        }
        if let Some(s) = self.f.samples() {
            bp.extend(s.xs().iter().copied().filter(|&y| y > self.lo && y < self.hi));
            bp.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
            bp.dedup();
        }
        let out = adaptive_gk(
            |y| Ok(self.f.eval(y)? * self.kernel(x * y)),
            &bp,
            self.spec.abs_tol,
            self.spec.rel_tol,
            self.spec.max_subdivisions.max(2 * bp.len()),
            "hankel_transform",
        )?;
        Ok(out.value)
    }
}

/// x ↦ h_μ f(x), evaluated lazily.
pub fn hankel_transform<T: Real>(
    mu: &Order<T>,
    f: &HalfLineFunction<T>,
    spec: &QuadratureSpec<T>,
) -> Result<HalfLineFunction<T>> {
    if f.is_zero() {
        return Ok(HalfLineFunction::zero());
    }
    let t = Arc::new(Transformer::new(mu, f, spec)?);
    Ok(HalfLineFunction::from_fn(move |x| t.at(x)))
}

/// h_μ f sampled on `xs`.
pub fn hankel_transform_on<T: Real>(
    mu: &Order<T>,
    f: &HalfLineFunction<T>,
    xs: &[T],
    spec: &QuadratureSpec<T>,
) -> Result<HalfLineFunction<T>> {
    if f.is_zero() {
        return Ok(HalfLineFunction::zero());
    }
    let t = Transformer::new(mu, f, spec)?;
    let ys = xs.iter().map(|&x| t.at(x)).collect::<Result<Vec<_>>>()?;
    HalfLineFunction::from_samples(xs.to_vec(), ys, DENSE_ORDER)
}

/// h_μ f on a dense grid covering the truncation window, cut off once it has
/// decayed below `abs_tol`; suitable as input to further integrals.
pub fn hankel_transform_dense<T: Real>(
    mu: &Order<T>,
    f: &HalfLineFunction<T>,
    spec: &QuadratureSpec<T>,
) -> Result<HalfLineFunction<T>> {
    if f.is_zero() {
        return Ok(HalfLineFunction::zero());
    }
    let g = hankel_transform(mu, f, spec)?;
    g.materialize_truncating(&dense_grid(spec)?, DENSE_ORDER, spec.abs_tol, 24)
}

/// ∫₀^∞ f g dx over the truncation window.
pub fn pairing<T: Real>(f: &HalfLineFunction<T>, g: &HalfLineFunction<T>, spec: &QuadratureSpec<T>) -> Result<Cx<T>> {
    spec.validate()?;
    if f.is_zero() || g.is_zero() {
        return Ok(cx(T::zero()));
    }
    let hi = spec.upper_for(f).min(spec.upper_for(g));
    let bp = breakpoints_for(spec.x_min, hi, &[f, g]);
    Ok(adaptive_gk(
        |x| Ok(f.eval(x)? * g.eval(x)?),
        &bp,
        spec.abs_tol,
        spec.rel_tol,
        spec.max_subdivisions,
        "pairing",
    )?
    .value)
}
