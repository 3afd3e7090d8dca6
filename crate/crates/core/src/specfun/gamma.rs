use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, Cx, Real};

// Lanczos approximation, g = 7, nine terms.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) for real `x > 0`.
pub fn gamma_fn<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) {
        return Err(Error::domain("gamma_fn", format!("argument {x} is not positive")));
    }
    Ok(gamma_pos(x))
}

fn gamma_pos<T: Real>(x: T) -> T {
    if x < lit(0.5) {
        return gamma_pos(x + T::one()) / x;
    }
    // Exact factorials for small integers.
    if x == x.round() && x <= lit(30.0) {
        let n = x.to_usize().unwrap_or(1);
        let mut acc = T::one();
        for k in 2..n {
            acc *= lit::<T>(k as f64);
        }
        return acc;
    }
    let z = x - T::one();
    let mut a: T = lit(LANCZOS[0]);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += lit::<T>(*c) / (z + lit::<T>(i as f64));
    }
    let t = z + lit::<T>(LANCZOS_G + 0.5);
    let sqrt_2pi = (T::PI() + T::PI()).sqrt();
    // Split the power to keep t^(z+1/2) from overflowing before e^-t compensates.
    let half_pow = t.powf((z + lit(0.5)) * lit(0.5));
    sqrt_2pi * half_pow * ((-t).exp() * half_pow) * a
}

/// Γ(z) for complex `z` with positive real part (all callers need `Re z > 0`).
pub fn gamma_complex<T: Real>(z: Cx<T>) -> Result<Cx<T>> {
    if !(z.re > T::zero()) {
        return Err(Error::domain("gamma_complex", format!("real part {} is not positive", z.re)));
    }
    Ok(gamma_complex_pos(z))
}

fn gamma_complex_pos<T: Real>(z: Cx<T>) -> Cx<T> {
    if z.im == T::zero() {
        return Complex::new(gamma_pos(z.re), T::zero());
    }
    if z.re < lit(0.5) {
        return gamma_complex_pos(z + T::one()) / z;
    }
    let w = z - T::one();
    let mut a = Complex::new(lit::<T>(LANCZOS[0]), T::zero());
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += Complex::new(lit::<T>(*c), T::zero()) / (w + lit::<T>(i as f64));
    }
    let t = w + lit::<T>(LANCZOS_G + 0.5);
    let sqrt_2pi = (T::PI() + T::PI()).sqrt();
    ((w + lit::<T>(0.5)) * t.ln() - t).exp() * a * sqrt_2pi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::quadrature::{adaptive_gk, tanh_sinh};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn integer_and_half_values() {
        assert_eq!(gamma_fn(1.0).unwrap(), 1.0);
        assert_eq!(gamma_fn(5.0).unwrap(), 24.0);
        assert!(rel(gamma_fn(0.5).unwrap(), std::f64::consts::PI.sqrt()) < 1e-14);
        assert!(rel(gamma_fn(1.5).unwrap(), 0.5 * std::f64::consts::PI.sqrt()) < 1e-14);
        assert!(gamma_fn(0.0f64).is_err());
        assert!(gamma_fn(-1.5f64).is_err());
    }

    #[test]
    fn matches_brute_force_integral() {
        // Γ(x) = ∫ t^{x-1} e^{-t} dt split at t = 1.
        for x in [0.5, 0.75, 1.3, 2.25, 3.7, 6.1] {
            let head = tanh_sinh(|_t: f64, dl: f64, _| Ok(dl.powf(x - 1.0) * (-dl).exp()), 0.0, 1.0, 1e-16, 1e-15, "t")
                .unwrap()
                .value;
            let bp: Vec<f64> = (0..=14).map(|k| 1.0 + 5.0 * k as f64).collect();
            let tail = adaptive_gk(|t: f64| Ok(t.powf(x - 1.0) * (-t).exp()), &bp, 1e-18, 1e-15, 2000, "t").unwrap().value;
            let g = gamma_fn(x).unwrap();
            assert!(rel(g, head + tail) < 1e-12, "x={x}: {g} vs {}", head + tail);
        }
    }

    #[test]
    fn recurrence() {
        for x in [0.3, 0.7, 1.5, 4.2, 0.01, 17.3] {
            let l = gamma_fn(x + 1.0).unwrap();
            let r = x * gamma_fn(x).unwrap();
            assert!(rel(l, r) < 1e-12, "x={x}");
        }
    }

    #[test]
    fn complex_reflection_and_real_axis() {
        // |Γ(1/2 + iy)|^2 = π / cosh(πy)
        for y in [0.3, 1.0, 2.5] {
            let g = gamma_complex(Complex::new(0.5, y)).unwrap();
            let expect = std::f64::consts::PI / (std::f64::consts::PI * y).cosh();
            assert!(rel(g.norm_sqr(), expect) < 1e-12);
        }
        let g = gamma_complex(Complex::new(2.3, 0.0)).unwrap();
        assert!(rel(g.re, gamma_fn(2.3).unwrap()) < 1e-15);
        // Γ(z+1) = zΓ(z) off the real axis
        let z = Complex::new(0.2, 0.7);
        let l = gamma_complex(z + 1.0).unwrap();
        let r = z * gamma_complex(z).unwrap();
        assert!((l - r).norm() < 1e-12 * l.norm());
    }

    #[test]
    fn single_precision() {
        let g: f32 = gamma_fn(4.5f32).unwrap();
        assert!((g - 11.631_728).abs() < 4e-6 * 11.631_728, "{g}");
    }
}
