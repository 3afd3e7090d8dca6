//! Quadrature engines: adaptive Gauss–Kronrod panels, tanh-sinh for endpoint
//! singularities, and Gauss–Legendre node generation.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Values a quadrature rule can accumulate: scalars, complex numbers and vectors of them.
pub trait QuadValue<T: Real>: Clone {
    fn zero_like(&self) -> Self;
    /// `self += a * x`
    fn add_scaled(&mut self, a: T, x: &Self);
    fn max_abs(&self) -> T;
    fn max_abs_diff(&self, other: &Self) -> T;
}

impl<T: Real> QuadValue<T> for T {
    fn zero_like(&self) -> Self {
        T::zero()
    }
    fn add_scaled(&mut self, a: T, x: &Self) {
        *self += a * *x;
    }
    fn max_abs(&self) -> T {
        self.abs()
    }
    fn max_abs_diff(&self, other: &Self) -> T {
        (*self - *other).abs()
    }
}

impl<T: Real> QuadValue<T> for Complex<T> {
    fn zero_like(&self) -> Self {
        Complex::new(T::zero(), T::zero())
    }
    fn add_scaled(&mut self, a: T, x: &Self) {
        self.re += a * x.re;
        self.im += a * x.im;
    }
    fn max_abs(&self) -> T {
        self.norm()
    }
    fn max_abs_diff(&self, other: &Self) -> T {
        (*self - *other).norm()
    }
}

impl<T: Real> QuadValue<T> for Vec<Complex<T>> {
    fn zero_like(&self) -> Self {
        vec![Complex::new(T::zero(), T::zero()); self.len()]
    }
    fn add_scaled(&mut self, a: T, x: &Self) {
        for (s, v) in self.iter_mut().zip(x) {
            s.re += a * v.re;
            s.im += a * v.im;
        }
    }
    fn max_abs(&self) -> T {
        self.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }
    fn max_abs_diff(&self, other: &Self) -> T {
        self.iter()
            .zip(other)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadOutcome<V, T> {
    pub value: V,
    pub error: T,
    /// Number of panels (GK) or refinement levels (tanh-sinh) used.
    pub subdivisions: usize,
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_703_413_919,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod abscissae.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// One 21-point Kronrod panel with its embedded 10-point Gauss estimate.
/// Returns `(kronrod, |kronrod - gauss|, kronrod estimate of ∫|f|)`.
pub fn gk21<T, V, F>(f: &mut F, a: T, b: T) -> Result<(V, T, T)>
where
    T: Real,
    V: QuadValue<T>,
    F: FnMut(T) -> Result<V>,
{
    let half = (b - a) * lit::<T>(0.5);
    let center = a + half;
    let fc = f(center)?;
    let mut kron = fc.zero_like();
    let mut gauss = fc.zero_like();
    kron.add_scaled(lit(WGK[10]), &fc);
    let mut resabs = lit::<T>(WGK[10]) * fc.max_abs();
    for j in 0..10 {
        let dx = half * lit::<T>(XGK[j]);
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        let wk: T = lit(WGK[j]);
        kron.add_scaled(wk, &f1);
        kron.add_scaled(wk, &f2);
        resabs += wk * (f1.max_abs() + f2.max_abs());
        if j % 2 == 1 {
            let wg: T = lit(WG[j / 2]);
            gauss.add_scaled(wg, &f1);
            gauss.add_scaled(wg, &f2);
        }
    }
    let mut k = kron.zero_like();
    k.add_scaled(half, &kron);
    let mut g = kron.zero_like();
    g.add_scaled(half, &gauss);
    let err = k.max_abs_diff(&g);
    Ok((k, err, resabs * half.abs()))
}

struct Panel<T, V> {
    a: T,
    b: T,
    value: V,
    error: T,
    resabs: T,
    splittable: bool,
}

/// Adaptive Gauss–Kronrod quadrature over `[breakpoints[0], breakpoints[last]]`.
///
/// Every interval between consecutive breakpoints starts as one panel; the panel
/// with the largest error estimate is bisected until the summed estimate meets
/// `max(abs_tol, rel_tol * |total|)` or the panel count reaches `max_panels`.
/// Accuracy below the rounding level of ∫|f| is not demanded.
pub fn adaptive_gk<T, V, F>(
    mut f: F,
    breakpoints: &[T],
    abs_tol: T,
    rel_tol: T,
    max_panels: usize,
    op: &'static str,
) -> Result<QuadOutcome<V, T>>
where
    T: Real,
    V: QuadValue<T>,
    F: FnMut(T) -> Result<V>,
{
    if breakpoints.len() < 2 {
        return Err(Error::InvalidArgument(format!("{op}: need at least two breakpoints")));
    }
    let eps = T::epsilon();
    // Errors below this multiple of ∫|f| are rounding noise.
    let floor = lit::<T>(50.0) * eps;
    let mut panels: Vec<Panel<T, V>> = Vec::with_capacity(breakpoints.len() * 2);
    for w in breakpoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(b > a) {
            continue;
        }
        let (value, error, resabs) = gk21(&mut f, a, b)?;
        let splittable = error > floor * resabs;
        panels.push(Panel { a, b, value, error, resabs, splittable });
    }
    if panels.is_empty() {
        return Err(Error::InvalidArgument(format!("{op}: empty integration range")));
    }
    loop {
        let mut total = panels[0].value.zero_like();
        let mut err = T::zero();
        let mut resabs = T::zero();
        for p in &panels {
            total.add_scaled(T::one(), &p.value);
            err += p.error;
            resabs += p.resabs;
        }
        if err.is_nan() || total.max_abs().is_nan() {
            return Err(Error::Convergence {
                op,
                estimate: f64::NAN,
                error: f64::NAN,
                subdivisions: panels.len(),
            });
        }
        let tol = abs_tol.max(rel_tol * total.max_abs()).max(floor * resabs);
        if err <= tol {
            return Ok(QuadOutcome { value: total, error: err, subdivisions: panels.len() });
        }
        // Panels whose error already sits at the rounding floor are not refined further.
        let mut worst: Option<usize> = None;
        for (i, p) in panels.iter().enumerate() {
            if p.splittable && worst.map_or(true, |w| p.error > panels[w].error) {
                worst = Some(i);
            }
        }
        let Some(w) = worst else {
            // Only rounding-limited panels remain; the estimate is the best available.
            return Ok(QuadOutcome { value: total, error: err, subdivisions: panels.len() });
        };
        if panels.len() >= max_panels {
            return Err(Error::Convergence {
                op,
                estimate: to_f64(total.max_abs()),
                error: to_f64(err),
                subdivisions: panels.len(),
            });
        }
        let (a, b) = (panels[w].a, panels[w].b);
        let mid = a + (b - a) * lit::<T>(0.5);
        let scale = a.abs().max(b.abs());
        if !(mid > a && mid < b) || (b - a) <= lit::<T>(100.0) * eps * scale {
            panels[w].splittable = false;
            continue;
        }
        let (v1, e1, r1) = gk21(&mut f, a, mid)?;
        let (v2, e2, r2) = gk21(&mut f, mid, b)?;
        panels[w] = Panel { a, b: mid, value: v1, error: e1, resabs: r1, splittable: e1 > floor * r1 };
        panels.insert(w + 1, Panel { a: mid, b, value: v2, error: e2, resabs: r2, splittable: e2 > floor * r2 });
    }
}

/// Largest tanh-sinh abscissa parameter such that endpoint distances stay representable.
fn tanh_sinh_tmax<T: Real>() -> T {
    let ln_tiny = -(T::min_positive_value() * lit(1e3)).ln();
    // Endpoint distances down to the smallest normal number for narrow types;
    // for wider ones stop near its square root, so that squaring them stays finite.
    let full = (ln_tiny / T::PI()).asinh();
    let half = (ln_tiny * lit(0.5) / T::PI()).asinh();
    full.min(half.max(lit(4.0)))
}

/// Tanh-sinh (double-exponential) quadrature on `[a, b]`.
///
/// The integrand receives `(x, x - a, b - x)`; the two distances are computed
/// without cancellation, so integrands with singular endpoint factors can use them.
pub fn tanh_sinh<T, V, F>(
    mut f: F,
    a: T,
    b: T,
    abs_tol: T,
    rel_tol: T,
    op: &'static str,
) -> Result<QuadOutcome<V, T>>
where
    T: Real,
    V: QuadValue<T>,
    F: FnMut(T, T, T) -> Result<V>,
{
    const MAX_LEVEL: usize = 10;
    let len = b - a;
    let half_pi = T::FRAC_PI_2();
    let t_max = tanh_sinh_tmax::<T>();
    let one = T::one();

    let node = |t: T, f: &mut F| -> Result<Option<V>> {
        let u = half_pi * t.sinh();
        let e = (-lit::<T>(2.0) * u.abs()).exp();
        let w = len * T::PI() * t.cosh() * e / ((one + e) * (one + e));
        if w == T::zero() {
            return Ok(None);
        }
        let near = len * e / (one + e);
        let far = len / (one + e);
        let (dl, dr) = if t < T::zero() { (near, far) } else { (far, near) };
        let x = if t < T::zero() { a + dl } else { b - dr };
        let v = f(x, dl, dr)?;
        let mut out = v.zero_like();
        out.add_scaled(w, &v);
        Ok(Some(out))
    };

    // Level 0: unit spacing.
    let k_max = t_max.floor().to_i64().unwrap_or(4);
    let mut sum: Option<V> = None;
    for k in -k_max..=k_max {
        let t = lit::<T>(k as f64);
        if let Some(v) = node(t, &mut f)? {
            match sum.as_mut() {
                Some(s) => s.add_scaled(one, &v),
                None => sum = Some(v),
            }
        }
    }
    let mut sum = match sum {
        Some(s) => s,
        None => return Err(Error::InvalidArgument(format!("{op}: degenerate interval"))),
    };
    let mut h = one;
    let mut prev = sum.clone();
    let mut prev_diff: Option<T> = None;
    for level in 1..=MAX_LEVEL {
        h = h * lit(0.5);
        let mut j = 1i64;
        loop {
            let t = h * lit::<T>(j as f64);
            if t > t_max {
                break;
            }
            for s in [-t, t] {
                if let Some(v) = node(s, &mut f)? {
                    sum.add_scaled(one, &v);
                }
            }
            j += 2;
        }
        let mut est = sum.zero_like();
        est.add_scaled(h, &sum);
        let diff = est.max_abs_diff(&prev);
        let mag = est.max_abs();
        let tol = abs_tol.max(rel_tol * mag);
        // Convergence is quadratic once in the asymptotic regime: the next error
        // is roughly diff^2 / previous diff.
        let predicted = match prev_diff {
            Some(pd) if pd > T::zero() && diff < pd => diff * diff / pd,
            _ => diff,
        };
        if level >= 3 && (diff <= tol || predicted <= tol * lit(0.1)) {
            return Ok(QuadOutcome { value: est, error: predicted.max(diff * T::epsilon()), subdivisions: level });
        }
        prev_diff = Some(diff);
        prev = est;
    }
    Err(Error::Convergence {
        op,
        estimate: to_f64(prev.max_abs()),
        error: to_f64(prev_diff.unwrap_or(T::nan())),
        subdivisions: MAX_LEVEL,
    })
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (computed in `f64`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Weights of the finite-difference approximation to derivatives 0..=m at `x0`
/// from values at `xs` (Fornberg's recursion). Row `k` holds the weights for the
/// k-th derivative.
pub fn fd_weights<T: Real>(x0: T, xs: &[T], m: usize) -> Vec<Vec<T>> {
    let n = xs.len();
    let mut c = vec![vec![T::zero(); n]; m + 1];
    c[0][0] = T::one();
    let mut c1 = T::one();
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = T::one();
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    let kf = lit::<T>(k as f64);
                    c[k][i] = c1 * (kf * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                let kf = lit::<T>(k as f64);
                c[k][j] = (c4 * c[k][j] - kf * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}
