use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::funcspace::jet::{leibniz, leibniz_real, power_derivs, stirling1};
use crate::funcspace::quadrature::fd_weights;
use crate::scalar::{cx, lit, Cx, Real};

pub type ValueFn<T> = Arc<dyn Fn(T) -> Result<Cx<T>> + Send + Sync>;
/// `jet(x, n)` returns the derivatives of orders `0..=n` at `x`.
pub type JetFn<T> = Arc<dyn Fn(T, usize) -> Result<Vec<Cx<T>>> + Send + Sync>;

/// Interpolation order used for grids built internally from dense evaluations.
pub const DENSE_ORDER: usize = 7;
/// Interpolation order for grids loaded from user samples.
pub const SAMPLE_ORDER: usize = 3;

/// Points in a finite-difference stencil on a grid (at least this many).
const FD_STENCIL: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Zero,
    Analytic,
    Grid,
}

/// Sampled values on strictly increasing positive abscissae.
#[derive(Debug, Clone)]
pub struct Samples<T> {
    xs: Vec<T>,
    ys: Vec<Cx<T>>,
    ls: Vec<T>,
    order: usize,
}

impl<T: Real> Samples<T> {
    pub fn xs(&self) -> &[T] {
        &self.xs
    }

    pub fn ys(&self) -> &[Cx<T>] {
        &self.ys
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Start index of the `width`-point stencil nearest to `l = ln x`.
    fn stencil(&self, l: T, width: usize) -> usize {
        let n = self.xs.len();
        let width = width.min(n);
        let i = self.ls.partition_point(|&v| v <= l).saturating_sub(1);
        let start = (i + 1).saturating_sub(width / 2);
        start.min(n - width)
    }

    fn interp(&self, x: T) -> Cx<T> {
        let n = self.xs.len();
        if x < self.xs[0] || x > self.xs[n - 1] {
            return cx(T::zero());
        }
        let l = x.ln();
        let start = self.stencil(l, self.order + 1);
        let width = (self.order + 1).min(n);
        let mut acc = cx(T::zero());
        for j in start..start + width {
            if self.xs[j] == x {
                return self.ys[j];
            }
            let mut w = T::one();
            for k in start..start + width {
                if k != j {
                    w *= (l - self.ls[k]) / (self.ls[j] - self.ls[k]);
                }
            }
            acc += self.ys[j] * w;
        }
        acc
    }

    fn fd_jet(&self, x: T, n: usize) -> Result<Vec<Cx<T>>> {
        let len = self.xs.len();
        if len < n + 2 {
            return Err(Error::InsufficientDerivatives { required: n, available: len.saturating_sub(2) });
        }
        if x < self.xs[0] || x > self.xs[len - 1] {
            return Ok(vec![cx(T::zero()); n + 1]);
        }
        let width = FD_STENCIL.max(n + 3).min(len);
        let l = x.ln();
        let start = self.stencil(l, width);
        let w = fd_weights(l, &self.ls[start..start + width], n);
        // Derivatives in s = ln x.
        let ds: Vec<Cx<T>> = (0..=n)
            .map(|k| {
                let mut acc = cx(T::zero());
                for (j, wk) in w[k].iter().enumerate() {
                    acc += self.ys[start + j] * *wk;
                }
                acc
            })
            .collect();
        let mut out = Vec::with_capacity(n + 1);
        out.push(self.interp(x));
        for k in 1..=n {
            let s = stirling1::<T>(k);
            let mut acc = cx(T::zero());
            for j in 1..=k {
                acc += ds[j] * s[j];
            }
            out.push(acc * x.powi(-(k as i32)));
        }
        Ok(out)
    }
}

#[derive(Clone)]
enum Repr<T: Real> {
    Zero,
    Analytic {
        value: ValueFn<T>,
        jet: Option<JetFn<T>>,
        order: usize,
    },
    Grid(Arc<Samples<T>>),
}

/// A complex-valued function on (0, ∞): either a callable (optionally with
/// derivatives) or interpolated samples. Cheap to clone.
#[derive(Clone)]
pub struct HalfLineFunction<T: Real> {
    repr: Repr<T>,
    decay_hint: Option<T>,
}

impl<T: Real> fmt::Debug for HalfLineFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("HalfLineFunction");
        d.field("kind", &self.kind());
        match &self.repr {
            Repr::Analytic { order, jet, .. } => {
                d.field("derivatives", &jet.as_ref().map(|_| *order));
            }
            Repr::Grid(s) => {
                d.field("points", &s.xs.len()).field("interp_order", &s.order);
            }
            Repr::Zero => {}
        }
        d.field("decay_hint", &self.decay_hint).finish()
    }
}

impl<T: Real> HalfLineFunction<T> {
    pub fn zero() -> Self {
        Self { repr: Repr::Zero, decay_hint: None }
    }

    /// A callable without derivative information.
    pub fn from_fn(f: impl Fn(T) -> Result<Cx<T>> + Send + Sync + 'static) -> Self {
        Self { repr: Repr::Analytic { value: Arc::new(f), jet: None, order: 0 }, decay_hint: None }
    }

    pub fn from_real_fn(f: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        Self::from_fn(move |x| Ok(cx(f(x))))
    }

    /// A callable with derivatives up to `order`; `value` must agree with `jet(x, 0)[0]`.
    pub fn with_jet(
        value: impl Fn(T) -> Result<Cx<T>> + Send + Sync + 'static,
        order: usize,
        jet: impl Fn(T, usize) -> Result<Vec<Cx<T>>> + Send + Sync + 'static,
    ) -> Self {
        Self {
            repr: Repr::Analytic { value: Arc::new(value), jet: Some(Arc::new(jet)), order },
            decay_hint: None,
        }
    }

    /// Grid function with Lagrange interpolation of degree `order` in ln x.
    pub fn from_samples(xs: Vec<T>, ys: Vec<Cx<T>>, order: usize) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::InvalidArgument(format!("{} abscissae but {} values", xs.len(), ys.len())));
        }
        if xs.len() < 2 {
            return Err(Error::InvalidArgument("a grid function needs at least two samples".into()));
        }
        if !(xs[0] > T::zero()) || xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("abscissae must be positive and strictly increasing".into()));
        }
        if ys.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidArgument("sample values must be finite".into()));
        }
        let ls = xs.iter().map(|x| x.ln()).collect();
        let order = order.max(1).min(xs.len() - 1);
        let hint = *xs.last().unwrap();
        Ok(Self { repr: Repr::Grid(Arc::new(Samples { xs, ys, ls, order })), decay_hint: Some(hint) })
    }

    /// Declares |f| negligible beyond `x`.
    pub fn with_decay_hint(mut self, x: T) -> Self {
        self.decay_hint = Some(match (&self.repr, self.decay_hint) {
            (Repr::Grid(_), Some(h)) => h.min(x),
            _ => x,
        });
        self
    }

    pub fn decay_hint(&self) -> Option<T> {
        self.decay_hint
    }

    pub fn kind(&self) -> Kind {
        match self.repr {
            Repr::Zero => Kind::Zero,
            Repr::Analytic { .. } => Kind::Analytic,
            Repr::Grid(_) => Kind::Grid,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero)
    }

    pub fn samples(&self) -> Option<&Samples<T>> {
        match &self.repr {
            Repr::Grid(s) => Some(s),
            _ => None,
        }
    }

    /// Highest derivative order available exactly; `None` for grid functions,
    /// whose derivatives come from finite differences.
    pub fn derivative_order(&self) -> Option<usize> {
        match &self.repr {
            Repr::Zero => Some(usize::MAX),
            Repr::Analytic { jet: Some(_), order, .. } => Some(*order),
            Repr::Analytic { jet: None, .. } => Some(0),
            Repr::Grid(_) => None,
        }
    }

    /// Fails with `InsufficientDerivatives` unless derivatives to order `n` can be produced.
    pub fn require_derivatives(&self, n: usize) -> Result<()> {
        match &self.repr {
            Repr::Grid(s) if s.xs.len() < n + 2 => {
                Err(Error::InsufficientDerivatives { required: n, available: s.xs.len().saturating_sub(2) })
            }
            Repr::Analytic { .. } => {
                let have = self.derivative_order().unwrap_or(0);
                if have < n {
                    Err(Error::InsufficientDerivatives { required: n, available: have })
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: T) -> Result<Cx<T>> {
        match &self.repr {
            Repr::Zero => Ok(cx(T::zero())),
            Repr::Analytic { value, .. } => value(x),
            Repr::Grid(s) => Ok(s.interp(x)),
        }
    }

    /// Derivatives of orders `0..=n` at `x`.
    pub fn jet(&self, x: T, n: usize) -> Result<Vec<Cx<T>>> {
        match &self.repr {
            Repr::Zero => Ok(vec![cx(T::zero()); n + 1]),
            Repr::Analytic { value, jet, order } => {
                if n == 0 {
                    return Ok(vec![value(x)?]);
                }
                match jet {
                    Some(j) if *order >= n => j(x, n),
                    _ => Err(Error::InsufficientDerivatives {
                        required: n,
                        available: if jet.is_some() { *order } else { 0 },
                    }),
                }
            }
            Repr::Grid(s) => s.fd_jet(x, n),
        }
    }

    /// Samples `self` on `xs`, giving a grid function with interpolation order `order`.
    pub fn materialize(&self, xs: &[T], order: usize) -> Result<Self> {
        let ys = xs.iter().map(|&x| self.eval(x)).collect::<Result<Vec<_>>>()?;
        Self::from_samples(xs.to_vec(), ys, order)
    }

    /// Like [`materialize`](Self::materialize), but stops once `run` consecutive
    /// samples past the largest one fall below `tol`; the result vanishes beyond.
    pub fn materialize_truncating(&self, xs: &[T], order: usize, tol: T, run: usize) -> Result<Self> {
        let mut ys = Vec::with_capacity(xs.len());
        let mut peak = T::zero();
        let mut quiet = 0usize;
        for &x in xs {
            let v = self.eval(x)?;
            let a = v.norm();
            peak = peak.max(a);
            ys.push(v);
            // Only count quiet samples once the values have fallen well below their peak,
            // so a function that is still rising from tiny values near 0 is never cut.
            if a < tol && a < peak * lit(1e-3) {
                quiet += 1;
                if quiet >= run && ys.len() > order + 1 {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        let n = ys.len();
        Self::from_samples(xs[..n].to_vec(), ys, order)
    }

    /// Multiplies by a complex constant.
    pub fn scale(&self, c: Cx<T>) -> Self {
        let hint = self.decay_hint;
        match &self.repr {
            Repr::Zero => Self::zero(),
            _ if c == cx(T::zero()) => Self::zero(),
            Repr::Analytic { value, jet, order } => {
                let value = value.clone();
                let jet = jet.clone().map(|j| -> JetFn<T> {
                    Arc::new(move |x, n| Ok(j(x, n)?.into_iter().map(|v| v * c).collect()))
                });
                Self {
                    repr: Repr::Analytic { value: Arc::new(move |x| Ok(value(x)? * c)), jet, order: *order },
                    decay_hint: hint,
                }
            }
            Repr::Grid(s) => {
                let ys = s.ys.iter().map(|v| v * c).collect();
                Self {
                    repr: Repr::Grid(Arc::new(Samples { xs: s.xs.clone(), ys, ls: s.ls.clone(), order: s.order })),
                    decay_hint: hint,
                }
            }
        }
    }

    pub fn scale_real(&self, c: T) -> Self {
        self.scale(cx(c))
    }

    pub fn neg(&self) -> Self {
        self.scale_real(-T::one())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, Op::Add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, Op::Sub)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.combine(other, Op::Mul)
    }

    /// Pointwise product with x^a (exact derivatives are kept).
    pub fn mul_power(&self, a: T) -> Self {
        if a == T::zero() {
            return self.clone();
        }
        let hint = self.decay_hint;
        match &self.repr {
            Repr::Zero => Self::zero(),
            Repr::Analytic { value, jet, order } => {
                let value = value.clone();
                let jet = jet.clone().map(|j| -> JetFn<T> {
                    Arc::new(move |x, n| Ok(leibniz_real(&power_derivs(a, x, n), &j(x, n)?, n)))
                });
                Self {
                    repr: Repr::Analytic { value: Arc::new(move |x| Ok(value(x)? * x.powf(a))), jet, order: *order },
                    decay_hint: hint,
                }
            }
            Repr::Grid(s) => {
                let ys = s.xs.iter().zip(&s.ys).map(|(x, v)| v * x.powf(a)).collect();
                Self {
                    repr: Repr::Grid(Arc::new(Samples { xs: s.xs.clone(), ys, ls: s.ls.clone(), order: s.order })),
                    decay_hint: hint,
                }
            }
        }
    }

    /// x ↦ f(l·x) for l > 0.
    pub fn dilate(&self, l: T) -> Result<Self> {
        if !(l > T::zero()) {
            return Err(Error::domain("dilate", format!("factor {l} is not positive")));
        }
        let hint = self.decay_hint.map(|h| h / l);
        Ok(match &self.repr {
            Repr::Zero => Self::zero(),
            Repr::Analytic { value, jet, order } => {
                let value = value.clone();
                let jet = jet.clone().map(|j| -> JetFn<T> {
                    Arc::new(move |x, n| {
                        let mut d = j(l * x, n)?;
                        let mut p = T::one();
                        for v in d.iter_mut() {
                            *v = *v * p;
                            p *= l;
                        }
                        Ok(d)
                    })
                });
                Self {
                    repr: Repr::Analytic { value: Arc::new(move |x| value(l * x)), jet, order: *order },
                    decay_hint: hint,
                }
            }
            Repr::Grid(s) => {
                let xs: Vec<T> = s.xs.iter().map(|&x| x / l).collect();
                Self::from_samples(xs, s.ys.clone(), s.order)?
            }
        })
    }

    fn combine(&self, other: &Self, op: Op) -> Result<Self> {
        let hint = match op {
            Op::Mul => match (self.decay_hint, other.decay_hint) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            },
            _ => match (self.decay_hint, other.decay_hint) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            },
        };
        match (&self.repr, &other.repr) {
            (Repr::Zero, _) => Ok(match op {
                Op::Add => other.clone(),
                Op::Sub => other.neg(),
                Op::Mul => Self::zero(),
            }),
            (_, Repr::Zero) => Ok(match op {
                Op::Mul => Self::zero(),
                _ => self.clone(),
            }),
            (Repr::Grid(s), _) => {
                let ys = s
                    .xs
                    .iter()
                    .zip(&s.ys)
                    .map(|(&x, &a)| Ok(op.apply(a, other.eval(x)?)))
                    .collect::<Result<Vec<_>>>()?;
                let mut out = Self::from_samples(s.xs.clone(), ys, s.order)?;
                out.decay_hint = hint.or(out.decay_hint);
                Ok(out)
            }
            (_, Repr::Grid(s)) => {
                let ys = s
                    .xs
                    .iter()
                    .zip(&s.ys)
                    .map(|(&x, &b)| Ok(op.apply(self.eval(x)?, b)))
                    .collect::<Result<Vec<_>>>()?;
                let mut out = Self::from_samples(s.xs.clone(), ys, s.order)?;
                out.decay_hint = hint.or(out.decay_hint);
                Ok(out)
            }
            (
                Repr::Analytic { value: va, jet: ja, order: oa },
                Repr::Analytic { value: vb, jet: jb, order: ob },
            ) => {
                let (va2, vb2) = (va.clone(), vb.clone());
                let value: ValueFn<T> = Arc::new(move |x| Ok(op.apply(va2(x)?, vb2(x)?)));
                let (jet, order) = match (ja, jb) {
                    (Some(ja), Some(jb)) => {
                        let (ja, jb) = (ja.clone(), jb.clone());
                        let jet: JetFn<T> = Arc::new(move |x, n| {
                            let a = ja(x, n)?;
                            let b = jb(x, n)?;
                            Ok(match op {
                                Op::Mul => leibniz(&a, &b, n),
                                _ => a.iter().zip(&b).map(|(p, q)| op.apply(*p, *q)).collect(),
                            })
                        });
                        (Some(jet), (*oa).min(*ob))
                    }
                    _ => (None, 0),
                };
                Ok(Self { repr: Repr::Analytic { value, jet, order }, decay_hint: hint })
            }
        }
    }
}

#[derive(Clone, Copy)]
enum Op {
    Add,
    Sub,
    Mul,
}

impl Op {
    fn apply<T: Real>(self, a: Cx<T>, b: Cx<T>) -> Cx<T> {
        match self {
            Op::Add => a + b,
            Op::Sub => a - b,
            Op::Mul => a * b,
        }
    }
}

/// The constant function `c`, with all derivatives.
pub fn constant<T: Real>(c: T) -> HalfLineFunction<T> {
    HalfLineFunction::with_jet(
        move |_| Ok(cx(c)),
        usize::MAX,
        move |_, n| {
            let mut v = vec![cx(T::zero()); n + 1];
            v[0] = cx(c);
            Ok(v)
        },
    )
}

/// x ↦ x^a with all derivatives.
pub fn power<T: Real>(a: T) -> HalfLineFunction<T> {
    HalfLineFunction::with_jet(
        move |x: T| Ok(cx(x.powf(a))),
        usize::MAX,
        move |x, n| Ok(power_derivs(a, x, n).into_iter().map(cx).collect()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::grid::log_grid;
    use proptest::prelude::*;

    fn gauss() -> HalfLineFunction<f64> {
        HalfLineFunction::with_jet(
            |x: f64| Ok(cx((-x * x).exp())),
            8,
            |x, n| Ok(crate::funcspace::jet::gauss_derivs(1.0, x, n).into_iter().map(cx).collect()),
        )
    }

    #[test]
    fn grid_rejects_bad_abscissae() {
        let ys = vec![cx(1.0); 3];
        assert!(HalfLineFunction::from_samples(vec![0.0, 1.0, 2.0], ys.clone(), 3).is_err());
        assert!(HalfLineFunction::from_samples(vec![1.0, 1.0, 2.0], ys.clone(), 3).is_err());
        assert!(HalfLineFunction::from_samples(vec![1.0, 2.0], ys, 3).is_err());
    }

    #[test]
    fn grid_reproduces_samples_exactly_and_vanishes_outside() {
        let xs = log_grid(0.01, 5.0, 40).unwrap();
        let f = gauss().materialize(&xs, SAMPLE_ORDER).unwrap();
        for &x in &xs {
            assert_eq!(f.eval(x).unwrap(), gauss().eval(x).unwrap());
        }
        assert_eq!(f.eval(0.001).unwrap(), cx(0.0));
        assert_eq!(f.eval(5.5).unwrap(), cx(0.0));
        assert_eq!(f.decay_hint(), Some(5.0));
    }

    #[test]
    fn dense_grid_interpolation_and_differences() {
        let xs = log_grid(1e-3, 8.0, 600).unwrap();
        let f = gauss().materialize(&xs, DENSE_ORDER).unwrap();
        for x in [0.013, 0.5, 1.234, 3.3] {
            let e = gauss().jet(x, 2).unwrap();
            let g = f.jet(x, 2).unwrap();
            assert!((g[0] - e[0]).norm() < 1e-11);
            assert!((g[1] - e[1]).norm() < 1e-7, "{x}: {:?} {:?}", g[1], e[1]);
            assert!((g[2] - e[2]).norm() < 1e-5, "{x}: {:?} {:?}", g[2], e[2]);
        }
    }

    #[test]
    fn analytic_without_jet_reports_missing_derivatives() {
        let f = HalfLineFunction::from_real_fn(|x: f64| x.sin());
        assert_eq!(f.jet(1.0, 2), Err(Error::InsufficientDerivatives { required: 2, available: 0 }));
        assert!(f.require_derivatives(2).is_err());
        assert!(gauss().require_derivatives(8).is_ok());
    }

    #[test]
    fn products_keep_exact_derivatives() {
        let f = gauss().mul_power(1.5);
        let x = 0.8;
        let h = 1e-4;
        let d = f.jet(x, 1).unwrap()[1].re;
        let fd = (f.eval(x + h).unwrap().re - f.eval(x - h).unwrap().re) / (2.0 * h);
        assert!((d - fd).abs() < 1e-7);
        let p = gauss().mul(&power(2.0)).unwrap();
        assert!((p.jet(x, 2).unwrap()[2] - f.dilate(1.0).unwrap().mul_power(0.5).jet(x, 2).unwrap()[2]).norm() < 1e-12);
    }

    #[test]
    fn dilation_scales_derivatives() {
        let f = gauss().dilate(2.0).unwrap();
        let x = 0.3;
        let d = f.jet(x, 2).unwrap();
        let g = gauss().jet(0.6, 2).unwrap();
        assert!((d[2] - g[2] * 4.0).norm() < 1e-14);
    }

    #[test]
    fn zero_is_absorbing() {
        let z = HalfLineFunction::<f64>::zero();
        assert!(z.mul(&gauss()).unwrap().is_zero());
        assert_eq!(z.add(&gauss()).unwrap().eval(0.5).unwrap(), gauss().eval(0.5).unwrap());
        assert_eq!(gauss().scale(cx(0.0)).kind(), Kind::Zero);
    }

    proptest! {
        #[test]
        fn linear_combination_is_pointwise(a in -3.0f64..3.0, b in -3.0f64..3.0, x in 0.01f64..4.0) {
            let f = gauss();
            let g = power(0.7);
            let h = f.scale_real(a).add(&g.scale_real(b)).unwrap();
            let expect = f.eval(x).unwrap() * a + g.eval(x).unwrap() * b;
            prop_assert!((h.eval(x).unwrap() - expect).norm() <= 1e-14 * (1.0 + expect.norm()));
        }
    }
}
