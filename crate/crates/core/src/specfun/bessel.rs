use crate::error::{Error, Result};
use crate::scalar::{lit, Real};
use crate::specfun::gamma::gamma_fn;

/// J_ν for a fixed order ν ≥ -1/2, with the series prefactor precomputed.
#[derive(Debug, Clone, Copy)]
pub struct BesselJ<T> {
    nu: T,
    /// 1 / (2^ν Γ(ν+1)), the value of z^{-ν} J_ν(z) at z = 0.
    lead: T,
    /// Upper end of the power series range.
    series_max: T,
    /// Lower end of the Hankel expansion range; Miller recurrence in between.
    asym_min: T,
}

impl<T: Real> BesselJ<T> {
    pub fn new(nu: T) -> Result<Self> {
        if !(nu >= lit(-0.5)) {
            return Err(Error::domain("bessel_j", format!("order {nu} below -1/2")));
        }
        let two = lit::<T>(2.0);
        let lead = T::one() / (two.powf(nu) * gamma_fn(nu + T::one())?);
        Ok(Self { nu, lead, series_max: lit::<T>(5.0).max(nu), asym_min: lit::<T>(30.0) + nu * nu })
    }

    pub fn order(&self) -> T {
        self.nu
    }

    /// z^{-ν} J_ν(z) at z = 0.
    pub fn scaled_at_zero(&self) -> T {
        self.lead
    }

    /// J_ν(z) for z ≥ 0 (no domain check).
    pub fn eval(&self, z: T) -> T {
        if z < self.asym_min {
            if z == T::zero() {
                return if self.nu == T::zero() {
                    T::one()
                } else if self.nu > T::zero() {
                    T::zero()
                } else {
                    T::infinity()
                };
            }
            z.powf(self.nu) * self.scaled(z)
        } else {
            self.asymptotic(z)
        }
    }

    /// z^{-ν} J_ν(z) for z ≥ 0, finite at z = 0.
    pub fn scaled(&self, z: T) -> T {
        if z <= self.series_max {
            self.series_scaled(z)
        } else if z < self.asym_min {
            self.miller_scaled(z)
        } else {
            self.asymptotic(z) * z.powf(-self.nu)
        }
    }

    fn series_scaled(&self, z: T) -> T {
        let q = -(z * z) * lit(0.25);
        let mut term = T::one();
        let mut sum = T::one();
        let mut k = T::zero();
        for _ in 0..400 {
            k += T::one();
            term = term * q / (k * (k + self.nu));
            sum += term;
            if term.abs() <= T::epsilon() * lit::<T>(0.25) * sum.abs() && k > z * lit(0.5) {
                break;
            }
        }
        self.lead * sum
    }

    // Backward recurrence from order ν+M, normalised with
    // (z/2)^ν = Γ(ν+1) J_ν + Σ_{k≥1} (ν+2k) Γ(ν+k)/k! J_{ν+2k}.
    fn miller_scaled(&self, z: T) -> T {
        let half_m = (z * lit(0.5)).ceil().to_usize().unwrap_or(0) + 25;
        let m = 2 * half_m;
        // r_k = Γ(ν+k) / (k! Γ(ν+1)), walked down from k = M/2.
        let mut r = T::one();
        for k in 2..=half_m {
            let kf = lit::<T>(k as f64);
            r = r * (self.nu + kf - T::one()) / kf;
        }
        let big = lit::<T>(1e15);
        let two_over_z = lit::<T>(2.0) / z;
        let mut next = T::zero();
        let mut cur = lit::<T>(1e-30);
        let mut norm = T::zero();
        for n in (1..=m).rev() {
            if n % 2 == 0 {
                let k = n / 2;
                norm += (self.nu + lit::<T>(n as f64)) * r * cur;
                if k >= 2 {
                    r = r * lit::<T>(k as f64) / (self.nu + lit::<T>((k - 1) as f64));
                }
            }
            let prev = two_over_z * (self.nu + lit::<T>(n as f64)) * cur - next;
            next = cur;
            cur = prev;
            if cur.abs() > big {
                let shrink = T::one() / big;
                cur = cur * shrink;
                next = next * shrink;
                norm = norm * shrink;
            }
        }
        norm += cur;
        self.lead * cur / norm
    }

    // Hankel expansion J ~ sqrt(2/(πz)) (P cos ω - Q sin ω), truncated at its smallest term.
    fn asymptotic(&self, z: T) -> T {
        let mu4 = lit::<T>(4.0) * self.nu * self.nu;
        let eight_z = lit::<T>(8.0) * z;
        let mut p = T::one();
        let mut q = T::zero();
        let mut a = T::one();
        let mut last = T::infinity();
        for k in 1..200usize {
            let kf = lit::<T>(k as f64);
            let odd = lit::<T>((2 * k - 1) as f64);
            let next = a * (mu4 - odd * odd) / (kf * eight_z);
            // Stops at the smallest term, or when a half-integer order terminates the series.
            if next.abs() >= last || next == T::zero() {
                break;
            }
            last = next.abs();
            a = next;
            match k % 4 {
                1 => q += a,
                2 => p -= a,
                3 => q -= a,
                _ => p += a,
            }
            if a.abs() < T::epsilon() * lit::<T>(0.01) {
                break;
            }
        }
        let omega_shift = (self.nu * lit(0.5) + lit(0.25)) * T::PI();
        let (sz, cz) = z.sin_cos();
        let (so, co) = omega_shift.sin_cos();
        let cos_w = cz * co + sz * so;
        let sin_w = sz * co - cz * so;
        (lit::<T>(2.0) / (T::PI() * z)).sqrt() * (p * cos_w - q * sin_w)
    }
}

fn check<T: Real>(nu: T, z: T) -> Result<BesselJ<T>> {
    if !(z >= T::zero()) {
        return Err(Error::domain("bessel_j", format!("argument {z} is negative")));
    }
    BesselJ::new(nu)
}

/// J_ν(z) for ν ≥ -1/2, z ≥ 0.
pub fn bessel_j<T: Real>(nu: T, z: T) -> Result<T> {
    Ok(check(nu, z)?.eval(z))
}

/// z^{-ν} J_ν(z), accurate down to and including z = 0.
pub fn bessel_j_scaled<T: Real>(nu: T, z: T) -> Result<T> {
    Ok(check(nu, z)?.scaled(z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma::gamma_fn;

    // Plain alternating series, summed to convergence in f64.
    fn series_oracle(nu: f64, z: f64) -> f64 {
        let mut s = 0.0;
        for k in 0..200 {
            let kf = k as f64;
            let t = (-1f64).powi(k) * (z / 2.0).powf(2.0 * kf + nu)
                / (gamma_fn(kf + 1.0).unwrap() * gamma_fn(kf + nu + 1.0).unwrap());
            s += t;
            if t.abs() < 1e-18 && kf > z {
                break;
            }
        }
        s
    }

    #[test]
    fn half_order_closed_form() {
        for z in [1e-6, 0.1, 1.0, 3.3, 11.9, 12.1, 25.0, 80.0] {
            let exact = (2.0 / (std::f64::consts::PI * z)).sqrt() * z.sin();
            let j = bessel_j(0.5, z).unwrap();
            assert!((j - exact).abs() < 1e-13 * (1.0 + exact.abs()), "z={z}: {j} vs {exact}");
        }
    }

    #[test]
    fn value_at_origin() {
        assert_eq!(bessel_j(1.5, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
        for nu in [-0.5, -0.25, 0.0, 0.5, 1.5] {
            let expect = 1.0 / (2f64.powf(nu) * gamma_fn(nu + 1.0).unwrap());
            assert!((bessel_j_scaled(nu, 0.0).unwrap() - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn order_one_matches_series() {
        let j = bessel_j(1.0, 1.0).unwrap();
        assert!((j - series_oracle(1.0, 1.0)).abs() < 1e-15);
        assert!((j - 0.440_050_585_744_933_5).abs() < 1e-15);
    }

    #[test]
    fn branches_agree_across_switches() {
        for nu in [-0.5, -0.25, 0.0, 0.3, 1.0, 1.5, 2.7] {
            let b = BesselJ::new(nu).unwrap();
            for i in 0..=20 {
                let z = 3.0 + 0.1 * i as f64;
                let d = (b.series_scaled(z) - b.miller_scaled(z)).abs();
                assert!(d < 5e-15, "nu={nu} z={z} diff={d}");
                let z = b.asym_min - 2.0 + 0.2 * i as f64;
                let d = (b.miller_scaled(z) * z.powf(nu) - b.asymptotic(z)).abs();
                assert!(d < 2e-15, "nu={nu} z={z} diff={d}");
            }
        }
    }

    #[test]
    fn miller_range_matches_bessel_integral() {
        // Integer orders: J_n(z) = (1/2π) ∫_0^{2π} cos(nθ - z sin θ) dθ; the
        // trapezoid rule is spectrally accurate for this periodic integrand.
        let oracle = |n: f64, z: f64| {
            let m = 400;
            let h = 2.0 * std::f64::consts::PI / m as f64;
            (0..m).map(|i| (n * i as f64 * h - z * (i as f64 * h).sin()).cos()).sum::<f64>() / m as f64
        };
        for nu in [0.0, 1.0, 4.0] {
            for z in [9.0, 15.0, 21.5, 29.0] {
                let j = bessel_j(nu, z).unwrap();
                let o = oracle(nu, z);
                assert!((j - o).abs() < 1e-14, "nu={nu} z={z}: {j} vs {o}");
            }
        }
    }

    #[test]
    fn scaled_is_bounded_and_continuous_at_zero() {
        for nu in [-0.5, -0.25, 0.5, 1.5] {
            let b = BesselJ::new(nu).unwrap();
            let mut max = 0.0f64;
            for i in 1..=5000 {
                let z = 50.0 * i as f64 / 5000.0;
                max = max.max(b.scaled(z).abs());
            }
            assert!(max.is_finite());
            assert!(max <= b.scaled_at_zero() * (1.0 + 1e-12));
            assert!((b.scaled(1e-9) - b.scaled_at_zero()).abs() < 1e-8);
        }
    }

    #[test]
    fn recurrence_between_orders() {
        // J_{ν-1} + J_{ν+1} = (2ν/z) J_ν
        for nu in [0.5f64, 1.25, 2.0] {
            for z in [0.7, 5.0, 13.0, 40.0] {
                let l = bessel_j(nu - 1.0, z).unwrap() + bessel_j(nu + 1.0, z).unwrap();
                let r = 2.0 * nu / z * bessel_j(nu, z).unwrap();
                assert!((l - r).abs() < 1e-11, "nu={nu} z={z}");
            }
        }
    }

    #[test]
    fn domain() {
        assert!(bessel_j(-0.6, 1.0).is_err());
        assert!(bessel_j(0.5, -1.0).is_err());
    }
}
