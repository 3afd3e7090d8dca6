//! Complex fractional powers (-S_μ)^α: the Balakrishnan integral, the shifted
//! form (1 - S_μ)^n J^α (1 - S_μ)^{-n}, the spectral multiplier y^{2α}, and the
//! transfer to -Δ_μ by similarity.
//!
//! Write A = -S_μ. Both integral routes evaluate λ^{α-1}[A(λ+A)^{-1}]^m f on a
//! log-uniform λ axis, λ = e^u, through convolution with the iterated kernels
//! N_λ^{(k)}. The translations τ_x g(y) = ∫ D_μ(x,y,z) g(z) dz do not depend
//! on λ, so they are tabulated once on a fixed y mesh and every λ sample is a
//! weighted sum over that table.

use crate::besselop::apply_s_power;
use crate::error::{Error, Result};
use crate::funcspace::function::{HalfLineFunction, DENSE_ORDER};
use crate::funcspace::quadrature::{adaptive_gk, gauss_legendre};
use crate::funcspace::QuadratureSpec;
use crate::hankel::{default_output_grid, dense_grid, hankel_transform, hankel_transform_dense};
use crate::hconv::Convolver;
use crate::resolvent::{resolvent_dense, KernelTable, Lambda};
use crate::scalar::{cx, lit, real_pow_complex, Cx, Real};
use crate::specfun::{gamma_complex, Order};

/// Exponent α with Re α > 0, and the integer m > Re α of the Balakrishnan integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alpha<T> {
    value: Cx<T>,
    m: usize,
}

impl<T: Real> Alpha<T> {
    /// α with the smallest admissible m = ⌊Re α⌋ + 1.
    pub fn new(alpha: Cx<T>) -> Result<Self> {
        let m = Self::check(alpha)?.floor().to_usize().unwrap_or(0) + 1;
        Ok(Self { value: alpha, m })
    }

    pub fn real(alpha: T) -> Result<Self> {
        Self::new(cx(alpha))
    }

    pub fn with_order(alpha: Cx<T>, m: usize) -> Result<Self> {
        let re = Self::check(alpha)?;
        if !(lit::<T>(m as f64) > re) {
            return Err(Error::domain("Alpha", format!("m = {m} must exceed Re alpha = {re}")));
        }
        Ok(Self { value: alpha, m })
    }

    fn check(alpha: Cx<T>) -> Result<T> {
        if !(alpha.re > T::zero()) || !alpha.im.is_finite() || !alpha.re.is_finite() {
            return Err(Error::domain("Alpha", format!("alpha = {alpha} needs a positive finite real part")));
        }
        Ok(alpha.re)
    }

    pub fn value(&self) -> Cx<T> {
        self.value
    }

    pub fn m(&self) -> usize {
        self.m
    }
}

/// Discretisation of the λ-integral and of the y-integrals inside it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerOptions<T> {
    /// ln λ range integrated numerically; the rest is covered by asymptotic tails.
    pub u_lo: T,
    pub u_hi: T,
    /// Start of the geometric part of the y mesh.
    pub y_min: T,
    /// Width of the uniform y panels beyond y = 1/2.
    pub panel_width: T,
    /// Gauss-Legendre nodes per y panel.
    pub gl_order: usize,
    pub rel_tol: T,
    pub max_panels: usize,
}

impl<T: Real> Default for PowerOptions<T> {
    fn default() -> Self {
        Self {
            u_lo: lit(-20.0),
            u_hi: lit(8.0),
            y_min: lit(1e-6),
            panel_width: lit(0.25),
            gl_order: 16,
            rel_tol: lit(1e-10),
            max_panels: 400,
        }
    }
}

impl<T: Real> PowerOptions<T> {
    /// Half the y nodes of the default; good to about 1e-6 on the Gaussian corpus.
    pub fn coarse() -> Self {
        Self { panel_width: lit(0.5), gl_order: 12, rel_tol: lit(1e-8), ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.u_lo < T::zero() && self.u_hi > T::zero()) {
            return Err(Error::InvalidArgument("lambda window must contain ln lambda = 0".into()));
        }
        if !(self.y_min > T::zero() && self.y_min < lit(0.5)) || !(self.panel_width > T::zero()) || self.gl_order < 2 {
            return Err(Error::InvalidArgument("invalid y mesh parameters".into()));
        }
        if !(self.rel_tol > T::zero()) || self.max_panels == 0 {
            return Err(Error::InvalidArgument("invalid lambda tolerance".into()));
        }
        Ok(())
    }
}

/// Quadrature nodes and weights in y: ratio-2 panels from y_min to 1/2, then
/// uniform panels up to `y_hi`.
fn y_mesh<T: Real>(opts: &PowerOptions<T>, y_hi: T) -> (Vec<T>, Vec<T>) {
    let (gx, gw) = gauss_legendre(opts.gl_order);
    let mut edges = vec![T::zero(), opts.y_min];
    let half: T = lit(0.5);
    let mut y = opts.y_min;
    while y * lit(2.0) < half {
        y = y * lit(2.0);
        edges.push(y);
    }
    y = half;
    edges.push(y);
    while y < y_hi {
        y = y + opts.panel_width;
        edges.push(y);
    }
    let mut ys = Vec::with_capacity(edges.len() * gx.len());
    let mut ws = Vec::with_capacity(ys.capacity());
    for p in edges.windows(2) {
        let (a, b) = (p[0], p[1]);
        let c = (a + b) * half;
        let r = (b - a) * half;
        for (x, w) in gx.iter().zip(&gw) {
            ys.push(c + r * lit(*x));
            ws.push(r * lit(*w));
        }
    }
    (ys, ws)
}

/// τ_{x_i} g(y_j) on the mesh, restricted to the band |x_i - y_j| < reach(g).
struct Table<T: Real> {
    tau: Vec<Vec<Cx<T>>>,
    start: Vec<usize>,
    at_x: Vec<Cx<T>>,
}

impl<T: Real> Table<T> {
    fn build(mu: &Order<T>, g: &HalfLineFunction<T>, xs: &[T], ys: &[T], spec: &QuadratureSpec<T>) -> Result<Self> {
        let conv = Convolver::new(mu, g, g, spec)?;
        let reach = spec.upper_for(g);
        let mut tau = Vec::with_capacity(xs.len());
        let mut start = Vec::with_capacity(xs.len());
        for &x in xs {
            let lo = ys.partition_point(|&y| y <= x - reach);
            let hi = ys.partition_point(|&y| y < x + reach);
            tau.push(ys[lo..hi].iter().map(|&y| conv.inner(x, y)).collect::<Result<Vec<_>>>()?);
            start.push(lo);
        }
        let at_x = xs.iter().map(|&x| g.eval(x)).collect::<Result<Vec<_>>>()?;
        Ok(Self { tau, start, at_x })
    }

    /// c0 · g(x_i) + Σ_j kw_j τ_{x_i} g(y_j) for every x_i.
    fn apply(&self, c0: T, kw: &[T]) -> Vec<Cx<T>> {
        self.tau
            .iter()
            .zip(&self.start)
            .zip(&self.at_x)
            .map(|((row, &s), &g0)| {
                let mut acc = g0 * c0;
                for (t, &k) in row.iter().zip(&kw[s..]) {
                    acc += t * k;
                }
                acc
            })
            .collect()
    }
}

/// How [A(λ+A)^{-1}]^m is expanded on a stretch of the λ axis.
#[derive(Debug, Clone, Copy)]
enum Form {
    /// (I - λR_λ)^m f = Σ_k C(m,k) (-λ)^k N^{(k)} ♯ f; well conditioned for small λ.
    Bracket,
    /// [(A+1)R_λ]^m w = Σ_k C(m,k) (1-λ)^k N^{(k)} ♯ w with w = (I - R_1)^m f.
    Shifted,
    /// R_λ^m A^m f = N^{(m)} ♯ A^m f; no cancellation for large λ.
    Iterated,
}

struct Segment<'a, T: Real> {
    u: (T, T),
    form: Form,
    table: &'a Table<T>,
}

struct Integrator<'a, T: Real> {
    alpha: Cx<T>,
    m: usize,
    ys: &'a [T],
    ws: &'a [T],
    kernels: Vec<KernelTable<T>>,
    opts: PowerOptions<T>,
    spec: QuadratureSpec<T>,
}

impl<'a, T: Real> Integrator<'a, T> {
    fn kernel_row(&self, k: usize, u: T) -> Result<Vec<T>> {
        let kt = &self.kernels[k - 1];
        self.ys.iter().zip(self.ws).map(|(&y, &w)| Ok(w * kt.eval(u, y)?)).collect()
    }

    fn integrand(&self, seg: &Segment<'_, T>, u: T) -> Result<Vec<Cx<T>>> {
        let l = u.exp();
        let m = self.m;
        let mut binom = T::one();
        let (c0, kw) = match seg.form {
            Form::Iterated => (T::zero(), self.kernel_row(m, u)?),
            Form::Bracket | Form::Shifted => {
                let base = match seg.form {
                    Form::Bracket => -l,
                    _ => T::one() - l,
                };
                let mut kw = vec![T::zero(); self.ys.len()];
                let mut p = T::one();
                for k in 1..=m {
                    binom = binom * lit::<T>((m + 1 - k) as f64) / lit::<T>(k as f64);
                    p = p * base;
                    let c = binom * p;
                    for (a, r) in kw.iter_mut().zip(self.kernel_row(k, u)?) {
                        *a += c * r;
                    }
                }
                (T::one(), kw)
            }
        };
        let weight = (self.alpha * u).exp();
        Ok(seg.table.apply(c0, &kw).into_iter().map(|v| v * weight).collect())
    }

    fn integrate(&self, seg: &Segment<'_, T>) -> Result<Vec<Cx<T>>> {
        let (a, b) = seg.u;
        let pieces = ((b - a) * lit(0.5)).ceil().to_usize().unwrap_or(1).max(1);
        let bp: Vec<T> = (0..=pieces).map(|i| a + (b - a) * lit::<T>(i as f64) / lit::<T>(pieces as f64)).collect();
        let out = adaptive_gk(
            |u| self.integrand(seg, u),
            &bp,
            self.spec.abs_tol,
            self.opts.rel_tol,
            self.opts.max_panels,
            "fractional_power",
        )?;
        Ok(out.value)
    }
}

fn sign<T: Real>(k: usize) -> T {
    if k % 2 == 0 {
        T::one()
    } else {
        -T::one()
    }
}

fn warn_if_not_decaying<T: Real>(f: &HalfLineFunction<T>) {
    if f.decay_hint().is_none() && f.samples().is_none() {
        log::warn!("fractional power: input has no decay hint; it is assumed to decay before x_max");
    }
}

enum Route {
    Balakrishnan,
    Shifted,
}

fn power_on<T: Real>(
    mu: &Order<T>,
    a: &Alpha<T>,
    prefactor: Cx<T>,
    route: Route,
    f: &HalfLineFunction<T>,
    xs: &[T],
    opts: &PowerOptions<T>,
    spec: &QuadratureSpec<T>,
) -> Result<HalfLineFunction<T>> {
    opts.validate()?;
    spec.validate()?;
    if xs.is_empty() {
        return Err(Error::InvalidArgument("empty output grid".into()));
    }
    if f.is_zero() {
        return Ok(HalfLineFunction::zero());
    }
    warn_if_not_decaying(f);
    let m = a.m();
    let alpha = a.value();
    f.require_derivatives(2 * m + 2)?;
    let v = apply_s_power(mu, f, m)?.scale_real(sign(m));
    let av = apply_s_power(mu, f, m + 1)?.scale_real(sign(m + 1));

    let w = match route {
        Route::Shifted => {
            let one = Lambda::new(T::one())?;
            let mut w = f.clone();
            for _ in 0..m {
                w = w.sub(&resolvent_dense(mu, one, &w, spec)?)?;
            }
            Some(w)
        }
        Route::Balakrishnan => None,
    };
    // The shifted form amplifies table errors by about λ^{μ+1-m} at small λ;
    // below the point where that reaches 1e3 the plain bracket takes over.
    let excess = lit::<T>(m as f64) - mu.mu() - T::one();
    let u_switch = match route {
        Route::Shifted if excess > T::zero() => (-(lit::<T>(1e3).ln()) / excess).max(opts.u_lo),
        Route::Shifted => opts.u_lo,
        Route::Balakrishnan => T::zero(),
    };

    let x_max = xs.iter().copied().fold(T::zero(), T::max);
    let mut reach = spec.upper_for(f).max(spec.upper_for(&v));
    if let Some(w) = &w {
        reach = reach.max(spec.upper_for(w));
    }
    let (ys, ws) = y_mesh(opts, x_max + reach);

    let tv = Table::build(mu, &v, xs, &ys, spec)?;
    let tf = if u_switch > opts.u_lo { Some(Table::build(mu, f, xs, &ys, spec)?) } else { None };
    let tw = match &w {
        Some(w) => Some(Table::build(mu, w, xs, &ys, spec)?),
        None => None,
    };
    let mut segments = Vec::new();
    if let Some(t) = &tf {
        segments.push(Segment { u: (opts.u_lo, u_switch), form: Form::Bracket, table: t });
    }
    if let Some(t) = &tw {
        segments.push(Segment { u: (u_switch, T::zero()), form: Form::Shifted, table: t });
    }
    segments.push(Segment { u: (T::zero(), opts.u_hi), form: Form::Iterated, table: &tv });

    let kernels = (1..=m).map(|k| KernelTable::new(mu, k)).collect::<Result<Vec<_>>>()?;
    let integ = Integrator { alpha, m, ys: &ys, ws: &ws, kernels, opts: *opts, spec: *spec };
    let mut total = vec![cx(T::zero()); xs.len()];
    for seg in &segments {
        for (t, v) in total.iter_mut().zip(integ.integrate(seg)?) {
            *t += v;
        }
    }

    // ∫_0^{λ_lo} λ^{α-1} f dλ, and the first two terms of
    // ∫_{Λ}^∞ λ^{α-1-m} (I + A/λ)^{-m} A^m f dλ.
    let mf = lit::<T>(m as f64);
    let low = (alpha * opts.u_lo).exp() / alpha;
    let high1 = ((alpha - mf) * opts.u_hi).exp() / (cx(mf) - alpha);
    let high2 = ((alpha - mf - T::one()) * opts.u_hi).exp() / (cx(mf + T::one()) - alpha) * mf;
    let mut out = Vec::with_capacity(xs.len());
    for (i, &x) in xs.iter().enumerate() {
        let tails = f.eval(x)? * low + tv.at_x[i] * high1 - av.eval(x)? * high2;
        out.push((total[i] + tails) * prefactor);
    }
    HalfLineFunction::from_samples(xs.to_vec(), out, DENSE_ORDER)
}

/// Γ(m) / (Γ(α) Γ(m-α)).
fn balakrishnan_constant<T: Real>(a: &Alpha<T>) -> Result<Cx<T>> {
    let mf = lit::<T>(a.m() as f64);
    let gm = gamma_complex(cx(mf))?;
    Ok(gm / (gamma_complex(a.value())? * gamma_complex(cx(mf) - a.value())?))
}

/// (-S_μ)^α f by the Balakrishnan integral, sampled on `xs`.
pub fn balakrishnan_on<T: Real>(
    mu: &Order<T>,
    a: &Alpha<T>,
    f: &HalfLineFunction<T>,
    xs: &[T],
    opts: &PowerOptions<T>,
    spec: &QuadratureSpec<T>,
) -> Result<HalfLineFunction<T>> {
    power_on(mu, a, balakrishnan_constant(a)?, Route::Balakrishnan, f, xs, opts, spec)
}

/// (-S_μ)^α f by the Balakrishnan integral on the default output grid.
pub fn balakrishnan<T: Real>(
    mu: &Order<T>,
    a: &Alpha<T>,
    f: &HalfLineFunction<T>,
    spec: &QuadratureSpec<T>,
) -> Result<HalfLineFunction<T>> {
    balakrishnan_on(mu, a, f, &default_output_grid(), &PowerOptions::default(), spec)
}

/// The m = 1 form with prefactor sin(απ)/π, for real 0 < α < 1.
pub fn balakrishnan_sine<T: Real>(
    mu: &Order<T>,
    alpha: T,
    f: &HalfLineFunction<T>,
    xs: &[T],
    opts: &PowerOptions<T>,
    spec: &QuadratureSpec<T>,
) -> Result<HalfLineFunction<T>> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::domain("balakrishnan_sine", format!("alpha = {alpha} must lie in (0, 1)")));
    }
    let a = Alpha::with_order(cx(alpha), 1)?;
    power_on(mu, &a, cx((alpha * T::PI()).sin() / T::PI()), Route::Balakrishnan, f, xs, opts, spec)
}

/// (1 - S_μ)^m J^α (1 - S_μ)^{-m} f with m = a.m(), sampled on `xs`.
///
/// The outer power is moved into the integrand, where it turns each bracket
/// into I + (1-λ)R_λ acting on w = (I - R_1)^m f, so nothing computed
/// numerically is differentiated.
pub fn frac_power_on<T: Real>(
    mu: &Order<T>,
    a: &Alpha<T>,
    f: &HalfLineFunction<T>,
    xs: &[T],
    opts: &PowerOptions<T>,
    spec: &QuadratureSpec<T>,
) -> Result<HalfLineFunction<T>> {
    power_on(mu, a, balakrishnan_constant(a)?, Route::Shifted, f, xs, opts, spec)
}

/// [`frac_power_on`] on the default output grid.
pub fn frac_power<T: Real>(
    mu: &Order<T>,
    a: &Alpha<T>,
    f: &HalfLineFunction<T>,
    spec: &QuadratureSpec<T>,
) -> Result<HalfLineFunction<T>> {
    frac_power_on(mu, a, f, &default_output_grid(), &PowerOptions::default(), spec)
}

/// h_μ(y^{2α} h_μ f), principal branch, sampled on the dense window grid.
pub fn frac_power_spectral<T: Real>(
    mu: &Order<T>,
    a: &Alpha<T>,
    f: &HalfLineFunction<T>,
    spec: &QuadratureSpec<T>,
) -> Result<HalfLineFunction<T>> {
    if f.is_zero() {
        return Ok(HalfLineFunction::zero());
    }
    let two_alpha = a.value() * lit::<T>(2.0);
    let hf = hankel_transform_dense(mu, f, spec)?;
    let g = hf.mul(&HalfLineFunction::from_fn(move |y: T| Ok(real_pow_complex(y, two_alpha))))?;
    if let Some(s) = g.samples() {
        let edge = s.ys().last().map(|v| v.norm()).unwrap_or(T::zero());
        let first = s.ys()[0].norm();
        if edge > spec.abs_tol || first > spec.abs_tol.sqrt() {
            log::warn!(
                "spectral power: y^(2 alpha) h f is {:e} at the window ends; the back transform is truncated",
                crate::scalar::to_f64(edge.max(first))
            );
        }
    }
    hankel_transform(mu, &g, spec)?.materialize_truncating(&dense_grid(spec)?, DENSE_ORDER, spec.abs_tol, 24)
}

/// [(-S_μ)(λ - S_μ)^{-1}]^m f = (I - λR_λ)^m f, materialized.
pub fn bracket_power<T: Real>(
    mu: &Order<T>,
    lambda: Lambda<T>,
    f: &HalfLineFunction<T>,
    m: usize,
    spec: &QuadratureSpec<T>,
) -> Result<HalfLineFunction<T>> {
    let mut g = f.clone();
    for _ in 0..m {
        if g.is_zero() {
            break;
        }
        g = g.sub(&resolvent_dense(mu, lambda, &g, spec)?.scale_real(lambda.value()))?;
    }
    Ok(g)
}

/// (-Δ_μ)^α f = x^{-μ-1/2} (-S_μ)^α (x^{μ+1/2} f), sampled on `xs`.
pub fn frac_power_delta_on<T: Real>(
    mu: &Order<T>,
    a: &Alpha<T>,
    f: &HalfLineFunction<T>,
    xs: &[T],
    opts: &PowerOptions<T>,
    spec: &QuadratureSpec<T>,
) -> Result<HalfLineFunction<T>> {
    let h = mu.half();
    frac_power_on(mu, a, &f.mul_power(h), xs, opts, spec).map(|g| g.mul_power(-h))
}

/// [`frac_power_delta_on`] on the default output grid.
pub fn frac_power_delta<T: Real>(
    mu: &Order<T>,
    a: &Alpha<T>,
    f: &HalfLineFunction<T>,
    spec: &QuadratureSpec<T>,
) -> Result<HalfLineFunction<T>> {
    frac_power_delta_on(mu, a, f, &default_output_grid(), &PowerOptions::default(), spec)
}
