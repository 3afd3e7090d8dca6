//! Abscissa builders.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

fn check<T: Real>(a: T, b: T, n: usize) -> Result<()> {
    if !(a > T::zero()) || !(b > a) || n < 2 {
        return Err(Error::InvalidArgument(format!("grid needs 0 < a < b and n >= 2 (a={a}, b={b}, n={n})")));
    }
    Ok(())
}

/// `n` points uniform in ln x on `[a, b]`, both ends included.
pub fn log_grid<T: Real>(a: T, b: T, n: usize) -> Result<Vec<T>> {
    check(a, b, n)?;
    let (la, lb) = (a.ln(), b.ln());
    let step = (lb - la) / lit::<T>((n - 1) as f64);
    let mut v: Vec<T> = (0..n).map(|i| (la + step * lit::<T>(i as f64)).exp()).collect();
    v[0] = a;
    v[n - 1] = b;
    Ok(v)
}

/// `n` uniformly spaced points on `[a, b]`.
pub fn linear_grid<T: Real>(a: T, b: T, n: usize) -> Result<Vec<T>> {
    check(a, b, n)?;
    let step = (b - a) / lit::<T>((n - 1) as f64);
    let mut v: Vec<T> = (0..n).map(|i| a + step * lit::<T>(i as f64)).collect();
    v[n - 1] = b;
    Ok(v)
}

/// `n` points uniform in σ(x) = ln x + x / x_c: geometric near the origin,
/// asymptotically uniform with spacing proportional to x_c.
pub fn hybrid_grid<T: Real>(a: T, b: T, n: usize, xc: T) -> Result<Vec<T>> {
    check(a, b, n)?;
    let sigma = |x: T| x.ln() + x / xc;
    let (sa, sb) = (sigma(a), sigma(b));
    let step = (sb - sa) / lit::<T>((n - 1) as f64);
    let mut out = Vec::with_capacity(n);
    let mut x = a;
    for i in 0..n {
        let target = sa + step * lit::<T>(i as f64);
        // Newton on ln x + x/xc = target, monotone and convex in ln x.
        for _ in 0..60 {
            let f = sigma(x) - target;
            let d = T::one() / x + T::one() / xc;
            let nx = (x - f / d).max(x * lit(0.1));
            let done = (nx - x).abs() <= T::epsilon() * lit::<T>(4.0) * x;
            x = nx;
            if done {
                break;
            }
        }
        out.push(x);
    }
    out[0] = a;
    out[n - 1] = b;
    Ok(out)
}

/// The 64-point log-uniform grid on [0.05, 5] used by the identity checks.
pub fn check_grid<T: Real>() -> Vec<T> {
    log_grid(lit(0.05), lit(5.0), 64).expect("valid constants")
}

/// Breakpoints for integrals over `[lo, hi]`: decades up to 1, unit steps to 16,
/// then doubling widths.
pub fn window_breakpoints<T: Real>(lo: T, hi: T) -> Vec<T> {
    let mut bp = vec![lo];
    let ten: T = lit(10.0);
    let mut d = ten.powf(lo.log10().floor() + T::one());
    while d < T::one() && d < hi {
        if d > lo {
            bp.push(d);
        }
        d = d * ten;
    }
    let mut x = T::one();
    let mut step = T::one();
    while x < hi {
        if x > lo {
            bp.push(x);
        }
        if x >= lit(16.0) {
            step = step + step;
        }
        x = x + step;
    }
    bp.push(hi);
    bp
}
