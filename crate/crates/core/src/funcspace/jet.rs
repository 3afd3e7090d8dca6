//! Derivative arrays ("jets"): index k holds the k-th derivative at a point.

use num_complex::Complex;

use crate::scalar::{lit, Cx, Real};

pub fn binomial_row<T: Real>(n: usize) -> Vec<T> {
    let mut row = vec![T::one(); n + 1];
    for k in 1..n {
        row[k] = row[k - 1] * lit::<T>((n + 1 - k) as f64) / lit::<T>(k as f64);
    }
    row
}

/// Derivatives 0..=n of a product, by Leibniz' rule.
pub fn leibniz<T: Real>(a: &[Cx<T>], b: &[Cx<T>], n: usize) -> Vec<Cx<T>> {
    let mut out = vec![Complex::new(T::zero(), T::zero()); n + 1];
    for (k, o) in out.iter_mut().enumerate() {
        let row = binomial_row::<T>(k);
        for j in 0..=k {
            *o += a[j] * b[k - j] * row[j];
        }
    }
    out
}

/// Leibniz' rule with a real first factor.
pub fn leibniz_real<T: Real>(a: &[T], b: &[Cx<T>], n: usize) -> Vec<Cx<T>> {
    let mut out = vec![Complex::new(T::zero(), T::zero()); n + 1];
    for (k, o) in out.iter_mut().enumerate() {
        let row = binomial_row::<T>(k);
        for j in 0..=k {
            *o += b[k - j] * (a[j] * row[j]);
        }
    }
    out
}

/// Derivatives of x^a.
pub fn power_derivs<T: Real>(a: T, x: T, n: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(n + 1);
    let mut coef = T::one();
    for k in 0..=n {
        let e = a - lit::<T>(k as f64);
        out.push(if coef == T::zero() { T::zero() } else { coef * x.powf(e) });
        coef *= e;
    }
    out
}

/// Derivatives of e^{-b x²}, from g^{(k+1)} = -2b (x g^{(k)} + k g^{(k-1)}).
pub fn gauss_derivs<T: Real>(b: T, x: T, n: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(n + 1);
    out.push((-b * x * x).exp());
    let m2b = -(b + b);
    for k in 0..n {
        let prev = if k == 0 { T::zero() } else { out[k - 1] };
        let next = m2b * (x * out[k] + lit::<T>(k as f64) * prev);
        out.push(next);
    }
    out
}

/// Derivatives of e^{c x}.
pub fn exp_derivs<T: Real>(c: T, x: T, n: usize) -> Vec<T> {
    let e = (c * x).exp();
    let mut out = Vec::with_capacity(n + 1);
    let mut p = T::one();
    for _ in 0..=n {
        out.push(e * p);
        p *= c;
    }
    out
}

pub fn to_complex<T: Real>(v: &[T]) -> Vec<Cx<T>> {
    v.iter().map(|&x| Complex::new(x, T::zero())).collect()
}

/// Signed Stirling numbers of the first kind s(n, j), j = 0..=n, which convert
/// derivatives in s = ln x to derivatives in x: x^n f^{(n)} = Σ_j s(n,j) (d/ds)^j f.
pub fn stirling1<T: Real>(n: usize) -> Vec<T> {
    let mut row = vec![T::one()];
    for k in 0..n {
        let mut next = vec![T::zero(); row.len() + 1];
        let kf = lit::<T>(k as f64);
        for (j, &c) in row.iter().enumerate() {
            next[j + 1] += c;
            next[j] -= kf * c;
        }
        row = next;
    }
    row
}
