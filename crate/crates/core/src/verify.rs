//! The identity suite: every property the library promises, checked numerically.
//!
//! Each criterion runs one or more checks; a criterion passes when all of its
//! checks do. Errors from the numerics (quadrature failures and the like) are
//! returned rather than folded into a failing check.

use std::time::{Duration, Instant};

use num_complex::Complex;

use crate::besselop::{apply_delta, apply_s, apply_s_power};
use crate::corpus::{corpus, exp_decay, gauss, power_gaussian};
use crate::error::Result;
use crate::fracpow::{
    balakrishnan_on, bracket_power, frac_power_delta_on, frac_power_on, frac_power_spectral, Alpha, PowerOptions,
};
use crate::funcspace::grid::{check_grid, hybrid_grid};
use crate::funcspace::{norm, weight_r, HalfLineFunction, NormKind, QuadratureSpec};
use crate::hankel::{hankel_transform, hankel_transform_dense};
use crate::hconv::{approx_identity_member, convolve_dense, kernel_d_integral, Convolver};
use crate::resolvent::{iterated_kernel_function, kernel_n, kernel_n_function, resolvent_dense, Lambda};
use crate::specfun::{bessel_j, Order};

type F = HalfLineFunction<f64>;

/// Outcome of one check.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: String,
    /// The identity or inequality being checked, in plain notation.
    pub paper_ref: &'static str,
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub runtime: Duration,
}

/// A numbered acceptance criterion and its checks.
#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: usize,
    pub title: &'static str,
    /// Nominal time budget.
    pub budget: Duration,
    pub checks: Vec<CheckReport>,
    pub runtime: Duration,
}

impl CriterionReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// One status line, e.g. for test logs.
    pub fn summary_line(&self) -> String {
        let worst = self
            .checks
            .iter()
            .max_by(|a, b| (a.max_error / a.tolerance).total_cmp(&(b.max_error / b.tolerance)))
            .map(|c| format!("{}: {:.3e} (tol {:.0e})", c.name, c.max_error, c.tolerance))
            .unwrap_or_default();
        format!(
            "{} criterion {:>2} {} [{:.1}s, budget {}s] worst {}",
            if self.pass() { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.runtime.as_secs_f64(),
            self.budget.as_secs(),
            worst
        )
    }
}

/// Builds a check from a measured error; errors that come out NaN fail.
fn check(name: impl Into<String>, paper_ref: &'static str, max_error: f64, tolerance: f64, start: Instant) -> CheckReport {
    CheckReport { name: name.into(), paper_ref, max_error, tolerance, pass: max_error <= tolerance, runtime: start.elapsed() }
}

/// max |a - b| / max |b| over `xs`.
fn rel_on(a: &F, b: &F, xs: &[f64]) -> Result<f64> {
    let mut num = 0f64;
    let mut den = 0f64;
    for &x in xs {
        let (u, v) = (a.eval(x)?, b.eval(x)?);
        num = num.max((u - v).norm());
        den = den.max(v.norm());
    }
    Ok(if num == 0.0 { 0.0 } else { num / den })
}

fn order(mu: f64) -> Result<Order<f64>> {
    Order::new(mu)
}

fn lam(l: f64) -> Result<Lambda<f64>> {
    Lambda::new(l)
}

const ORDERS: [f64; 3] = [-0.25, 0.5, 1.5];
const LAMBDAS: [f64; 3] = [0.5, 1.0, 4.0];

/// 1. λ‖N_λ‖_{L¹(sr)} = 1.
pub fn kernel_norm(spec: &QuadratureSpec<f64>) -> Result<Vec<CheckReport>> {
    let t = Instant::now();
    let mut err = 0f64;
    for mu in ORDERS {
        let h = order(mu)?;
        for l in LAMBDAS {
            let n = norm(&kernel_n_function(&h, lam(l)?), &h, NormKind::L1Sr, spec)?;
            err = err.max((l * n - 1.0).abs());
        }
    }
    Ok(vec![check("kernel_norm", "lambda * ||N_lambda||_{L1(sr)} = 1", err, 1e-6, t)])
}

/// 2. h_μ N_λ(y) = y^{μ+1/2} / (λ + y²).
pub fn kernel_transform(spec: &QuadratureSpec<f64>) -> Result<Vec<CheckReport>> {
    let t = Instant::now();
    let mut err = 0f64;
    for mu in ORDERS {
        let h = order(mu)?;
        for l in LAMBDAS {
            let hn = hankel_transform(&h, &iterated_kernel_function(&h, lam(l)?, 1)?, spec)?;
            for y in [0.5f64, 1.0, 2.0] {
                let e = y.powf(mu + 0.5) / (l + y * y);
                err = err.max((hn.eval(y)?.re - e).abs() / e);
            }
        }
    }
    Ok(vec![check("kernel_transform", "h_mu N_lambda (y) = y^{mu+1/2} / (lambda + y^2)", err, 1e-6, t)])
}

/// 3. h_μ φ_G = φ_G.
pub fn self_reciprocity(spec: &QuadratureSpec<f64>) -> Result<Vec<CheckReport>> {
    let xs = check_grid::<f64>();
    let mut out = Vec::new();
    for mu in ORDERS {
        let t = Instant::now();
        let h = order(mu)?;
        let g = gauss(&h);
        let r = rel_on(&hankel_transform(&h, &g, spec)?, &g, &xs)?;
        out.push(check(format!("self_reciprocity mu={mu}"), "h_mu phi_G = phi_G, phi_G = x^{mu+1/2} e^{-x^2/2}", r, 1e-6, t));
    }
    Ok(out)
}

/// 4. h_μ h_μ f = f on the corpus.
pub fn inversion(spec: &QuadratureSpec<f64>) -> Result<Vec<CheckReport>> {
    let xs = check_grid::<f64>();
    let mut out = Vec::new();
    let h = order(0.5)?;
    for e in corpus::<f64>(&h) {
        let t = Instant::now();
        let hf = hankel_transform_dense(&h, &e.function, spec)?;
        // The inversion statement needs h_μ f in L¹(sr); a non-finite norm would void the check.
        let l1 = norm(&hf, &h, NormKind::L1Sr, spec)?;
        let r = if l1.is_finite() { rel_on(&hankel_transform(&h, &hf, spec)?, &e.function, &xs)? } else { f64::INFINITY };
        out.push(check(format!("inversion {}", e.name), "h_mu h_mu f = f when f, h_mu f lie in L1(sr)", r, 1e-6, t));
    }
    Ok(out)
}

/// 5. h_μ(f ♯ g) = r · h_μ f · h_μ g.
pub fn convolution_theorem(spec: &QuadratureSpec<f64>) -> Result<Vec<CheckReport>> {
    let xs = check_grid::<f64>();
    let h = order(0.5)?;
    let c = corpus::<f64>(&h);
    let mut out = Vec::new();
    for (a, b) in [(0, 1), (0, 2), (1, 3)] {
        let t = Instant::now();
        let (f, g) = (&c[a].function, &c[b].function);
        let lhs = hankel_transform(&h, &convolve_dense(&h, f, g, spec)?, spec)?;
        let hf = hankel_transform(&h, f, spec)?;
        let hg = hankel_transform(&h, g, spec)?;
        let h2 = h;
        let rhs = HalfLineFunction::from_fn(move |x| Ok(hf.eval(x)? * hg.eval(x)? * weight_r(&h2, x)?));
        let r = rel_on(&lhs, &rhs, &xs)?;
        out.push(check(
            format!("convolution_theorem {}#{}", c[a].name, c[b].name),
            "h_mu(f # g) = r h_mu f h_mu g",
            r,
            1e-5,
            t,
        ));
    }
    Ok(out)
}

/// 6. The moment and product identities of the triangle kernel D_μ.
pub fn kernel_identities(spec: &QuadratureSpec<f64>) -> Result<Vec<CheckReport>> {
    let tight = spec.with_tolerances(1e-11, 1e-13);
    let mut out = Vec::new();
    let t = Instant::now();
    let mut err = 0f64;
    for mu in ORDERS {
        let h = order(mu)?;
        let (x, y) = (1.0f64, 2.0f64);
        let v = kernel_d_integral(&h, x, y, |z: f64| z.powf(mu + 0.5), &tight)?;
        let e = (x * y).powf(mu + 0.5) / h.c_mu();
        err = err.max((v - e).abs() / e);
    }
    out.push(check("kernel_moment", "int z^{mu+1/2} D_mu(x,y,z) dz = (xy)^{mu+1/2} / c_mu", err, 1e-6, t));

    let t = Instant::now();
    let mut err = 0f64;
    for mu in ORDERS {
        let h = order(mu)?;
        let k = |u: f64| -> f64 { u.sqrt() * bessel_j(mu, u).unwrap_or(f64::NAN) };
        let (mut num, mut den) = (0f64, 0f64);
        for x in [0.5, 1.0, 2.0] {
            for y in [0.5, 1.0, 2.0] {
                for s in [0.5f64, 1.0, 2.0] {
                    let v = kernel_d_integral(&h, x, y, |z| k(z * s), &tight)?;
                    let e = k(x * s) * k(y * s) * s.powf(-mu - 0.5);
                    num = num.max((v - e).abs());
                    den = den.max(e.abs());
                }
            }
        }
        err = err.max(num / den);
    }
    out.push(check(
        "kernel_product",
        "int sqrt(zt) J_mu(zt) D_mu(x,y,z) dz = sqrt(xt) J_mu(xt) sqrt(yt) J_mu(yt) t^{-mu-1/2}",
        err,
        1e-6,
        t,
    ));
    Ok(out)
}

/// 7. ‖f ♯ g‖ ≤ ‖f‖_{L¹(sr)} ‖g‖ in L^∞(r), L¹(sr) and L²(sr²).
pub fn young_inequalities(spec: &QuadratureSpec<f64>) -> Result<Vec<CheckReport>> {
    let h = order(0.5)?;
    let c = corpus::<f64>(&h);
    let kinds = [("Linf(r)", NormKind::LinfR), ("L1(sr)", NormKind::L1Sr), ("L2(sr^2)", NormKind::LpSrp(2.0))];
    let mut excess = [0f64; 3];
    let t = Instant::now();
    for (a, b) in [(0, 0), (0, 1), (1, 2), (2, 3), (3, 1)] {
        let (f, g) = (&c[a].function, &c[b].function);
        let fg = convolve_dense(&h, f, g, spec)?;
        let nf = norm(f, &h, NormKind::L1Sr, spec)?;
        for (i, (_, k)) in kinds.iter().enumerate() {
            let lhs = norm(&fg, &h, *k, spec)?;
            let rhs = nf * norm(g, &h, *k, spec)?;
            excess[i] = excess[i].max((lhs - rhs) / rhs);
        }
    }
    Ok(kinds
        .iter()
        .zip(excess)
        .map(|((name, _), e)| {
            check(format!("young {name}"), "||f # g|| <= ||f||_{L1(sr)} ||g||", e.max(0.0), 1e-8, t)
        })
        .collect())
}

/// 8. φ_G ♯ φ_n → φ_G pointwise, monotonically over n = 2, 4, 8, 16.
pub fn approximate_identity(spec: &QuadratureSpec<f64>) -> Result<Vec<CheckReport>> {
    let t = Instant::now();
    let h = order(0.5)?;
    let g = gauss(&h);
    let ns = [2usize, 4, 8, 16];
    let mut dist = vec![[0f64; 4]; 3];
    for (j, n) in ns.iter().enumerate() {
        let c = Convolver::new(&h, &g, &approx_identity_member(&h, *n)?, spec)?;
        for (i, x) in [0.5, 1.0, 2.0].into_iter().enumerate() {
            dist[i][j] = (c.at(x)? - g.eval(x)?).norm();
        }
    }
    let last = dist.iter().map(|d| d[3]).fold(0f64, f64::max);
    let monotone = dist.iter().all(|d| d.windows(2).all(|w| w[1] < w[0]));
    // A rise anywhere along n is reported as an infinite error.
    let mono_err = if monotone { 0.0 } else { f64::INFINITY };
    Ok(vec![
        check("approx_identity n=16", "|phi_G # phi_n (x) - phi_G(x)| -> 0", last, 1e-2, t),
        check("approx_identity monotone", "|phi_G # phi_n (x) - phi_G(x)| decreases in n", mono_err, 0.0, t),
    ])
}

/// 9. λ‖R_λ f‖ ≤ ‖f‖ in three norms, and (λ - S_μ) R_λ f = f.
pub fn resolvent_contraction(spec: &QuadratureSpec<f64>) -> Result<Vec<CheckReport>> {
    let h = order(0.5)?;
    let xs = check_grid::<f64>();
    let kinds = [NormKind::LinfR, NormKind::L1Sr, NormKind::LpSrp(2.0)];
    let t = Instant::now();
    let mut excess = 0f64;
    let mut defect = 0f64;
    for e in corpus::<f64>(&h) {
        for l in [0.25, 1.0, 4.0] {
            let g = resolvent_dense(&h, lam(l)?, &e.function, spec)?;
            for k in kinds {
                let ng = norm(&g, &h, k, spec)?;
                let nf = norm(&e.function, &h, k, spec)?;
                excess = excess.max(l * ng / nf - 1.0);
            }
            let back = g.scale_real(l).sub(&apply_s(&h, &g)?)?;
            defect = defect.max(rel_on(&back, &e.function, &xs)?);
        }
    }
    Ok(vec![
        check("resolvent contraction", "lambda ||R_lambda f|| <= ||f||", excess.max(0.0), 1e-6, t),
        check("resolvent defect", "(lambda - S_mu) R_lambda f = f", defect, 1e-4, t),
    ])
}

/// 10. Balakrishnan integral against the multiplier y^{2α}, plus the multiplier
/// of the bracket power it is built from.
pub fn power_oracle_equivalence(spec: &QuadratureSpec<f64>) -> Result<Vec<CheckReport>> {
    let h = order(0.5)?;
    let f = gauss(&h);
    let xs = check_grid::<f64>();
    let opts = PowerOptions::default();
    let mut out = Vec::new();
    for (re, im) in [(0.25, 0.0), (0.5, 0.0), (0.75, 0.0), (1.3, 0.0), (0.5, 0.3)] {
        let t = Instant::now();
        let a = Alpha::new(Complex::new(re, im))?;
        let b = balakrishnan_on(&h, &a, &f, &xs, &opts, spec)?;
        let s = frac_power_spectral(&h, &a, &f, spec)?;
        let tol = if im == 0.0 { 1e-4 } else { 1e-3 };
        out.push(check(
            format!("power oracle alpha={re}{im:+}i"),
            "Balakrishnan integral of -S_mu = h_mu y^{2 alpha} h_mu",
            rel_on(&b, &s, &xs)?,
            tol,
            t,
        ));
    }
    out.extend(bracket_multiplier(spec)?);
    Ok(out)
}

/// 11. α = 1 gives -S_μ on both integral routes; α + β composition.
pub fn power_consistency_and_semigroup(spec: &QuadratureSpec<f64>) -> Result<Vec<CheckReport>> {
    let h = order(0.5)?;
    let f = gauss(&h);
    let xs = check_grid::<f64>();
    let opts = PowerOptions::default();
    let one = Alpha::real(1.0)?;
    let minus_s = apply_s(&h, &f)?.neg();
    let mut out = Vec::new();

    let t = Instant::now();
    let b = balakrishnan_on(&h, &one, &f, &xs, &opts, spec)?;
    out.push(check("alpha=1 balakrishnan", "(-S_mu)^1 = -S_mu", rel_on(&b, &minus_s, &xs)?, 1e-4, t));
    let t = Instant::now();
    let p = frac_power_on(&h, &one, &f, &xs, &opts, spec)?;
    out.push(check("alpha=1 frac_power", "(-S_mu)^1 = -S_mu", rel_on(&p, &minus_s, &xs)?, 1e-4, t));

    let coarse = PowerOptions::coarse();
    let wide = hybrid_grid(1e-4, spec.x_max, 400, 1.0)?;
    for (a, b) in [(0.5, 0.5), (0.25, 0.75)] {
        let (aa, bb, ab) = (Alpha::real(a)?, Alpha::real(b)?, Alpha::real(a + b)?);
        let t = Instant::now();
        let rhs = frac_power_spectral(&h, &ab, &f, spec)?;
        let lhs = frac_power_spectral(&h, &aa, &frac_power_spectral(&h, &bb, &f, spec)?, spec)?;
        out.push(check(
            format!("semigroup spectral {a}+{b}"),
            "(-S_mu)^a (-S_mu)^b = (-S_mu)^{a+b}",
            rel_on(&lhs, &rhs, &xs)?,
            1e-5,
            t,
        ));
        let t = Instant::now();
        let inner = balakrishnan_on(&h, &bb, &f, &wide, &coarse, spec)?;
        let lhs = balakrishnan_on(&h, &aa, &inner, &xs, &coarse, spec)?;
        out.push(check(
            format!("semigroup balakrishnan {a}+{b}"),
            "(-S_mu)^a (-S_mu)^b = (-S_mu)^{a+b}",
            rel_on(&lhs, &rhs, &xs)?,
            1e-3,
            t,
        ));
    }
    Ok(out)
}

/// 12. S_μ = x^{μ+1/2} Δ_μ x^{-μ-1/2}, and the same similarity for the powers.
pub fn similarity(spec: &QuadratureSpec<f64>) -> Result<Vec<CheckReport>> {
    let xs = check_grid::<f64>();
    let t = Instant::now();
    let mut err = 0f64;
    for mu in ORDERS {
        let h = order(mu)?;
        for e in corpus::<f64>(&h) {
            let direct = apply_s(&h, &e.function)?;
            let via = apply_delta(&h, &e.function.mul_power(-h.half()))?.mul_power(h.half());
            err = err.max(rel_on(&via, &direct, &xs)?);
        }
    }
    let mut out = vec![check("similarity S_mu", "S_mu = x^{mu+1/2} Delta_mu x^{-mu-1/2}", err, 1e-8, t)];

    let t = Instant::now();
    let h = order(0.5)?;
    let f = power_gaussian(1.0, 0.0, 0.5);
    let p = frac_power_delta_on(&h, &Alpha::real(1.0)?, &f, &xs, &PowerOptions::default(), spec)?;
    let r = rel_on(&p, &apply_delta(&h, &f)?.neg(), &xs)?;
    out.push(check("similarity power alpha=1", "(-Delta_mu)^1 f = -Delta_mu f, f = e^{-x^2/2}", r, 1e-6, t));
    Ok(out)
}

/// 13. f(x) = g(lx) ⇒ S_μ^k f(x) = l^{2k} (S_μ^k g)(lx).
pub fn scaling_law(_spec: &QuadratureSpec<f64>) -> Result<Vec<CheckReport>> {
    let xs = check_grid::<f64>();
    let t = Instant::now();
    let mut err = 0f64;
    for mu in ORDERS {
        let h = order(mu)?;
        let g = gauss(&h);
        for l in [0.5f64, 2.0] {
            let f = g.dilate(l)?;
            for k in [1usize, 2] {
                let lhs = apply_s_power(&h, &f, k)?;
                let rhs = apply_s_power(&h, &g, k)?.dilate(l)?.scale_real(l.powi(2 * k as i32));
                err = err.max(rel_on(&lhs, &rhs, &xs)?);
            }
        }
    }
    Ok(vec![check("scaling_law", "S_mu^k [g(l.)](x) = l^{2k} (S_mu^k g)(lx)", err, 1e-8, t)])
}

/// 14. Closed forms at μ = 1/2.
pub fn half_order_suite(spec: &QuadratureSpec<f64>) -> Result<Vec<CheckReport>> {
    let xs = check_grid::<f64>();
    let h = order(0.5)?;
    let mut out = Vec::new();

    let t = Instant::now();
    let sine = HalfLineFunction::from_real_fn(|x: f64| (2.0 / std::f64::consts::PI).sqrt() * x / (1.0 + x * x));
    let r = rel_on(&hankel_transform(&h, &exp_decay(1.0), spec)?, &sine, &xs)?;
    out.push(check("mu=1/2 sine transform", "h_{1/2} e^{-x} = sqrt(2/pi) x / (1 + x^2)", r, 1e-6, t));

    let t = Instant::now();
    let mut err = 0f64;
    for l in LAMBDAS {
        for &x in &xs {
            let e = (std::f64::consts::PI / 2.0).sqrt() * (-l.sqrt() * x).exp();
            err = err.max((kernel_n(&h, lam(l)?, x)? - e).abs() / e);
        }
    }
    out.push(check("mu=1/2 resolvent kernel", "N_lambda(x) = sqrt(pi/2) e^{-sqrt(lambda) x}", err, 1e-6, t));

    let t = Instant::now();
    let mut err = 0f64;
    for e in corpus::<f64>(&h) {
        let s = apply_s(&h, &e.function)?;
        let f = e.function.clone();
        let d2 = HalfLineFunction::from_fn(move |x| Ok(f.jet(x, 2)?[2]));
        err = err.max(rel_on(&s, &d2, &xs)?);
    }
    out.push(check("mu=1/2 operator", "S_{1/2} = d^2/dx^2", err, 1e-6, t));
    Ok(out)
}

/// Multiplier identity for the bracket power: h_μ[(I - λR_λ)^m f] = (y²/(λ+y²))^m h_μ f.
pub fn bracket_multiplier(spec: &QuadratureSpec<f64>) -> Result<Vec<CheckReport>> {
    let t = Instant::now();
    let h = order(0.5)?;
    let f = gauss(&h);
    let l = 1.0;
    let b = bracket_power(&h, lam(l)?, &f, 2, spec)?;
    let hb = hankel_transform(&h, &b, spec)?;
    let hf = hankel_transform(&h, &f, spec)?;
    let expect = HalfLineFunction::from_fn(move |y: f64| Ok(hf.eval(y)? * (y * y / (l + y * y)).powi(2)));
    let r = rel_on(&hb, &expect, &check_grid())?;
    Ok(vec![check(
        "bracket multiplier m=2 lambda=1",
        "h_mu [(-S_mu)(lambda - S_mu)^{-1}]^m f = y^{2m} (y^2 + lambda)^{-m} h_mu f",
        r,
        1e-4,
        t,
    )])
}

type CheckFn = fn(&QuadratureSpec<f64>) -> Result<Vec<CheckReport>>;

/// (id, title, budget in seconds, checks)
pub const CRITERIA: [(usize, &str, u64, CheckFn); 14] = [
    (1, "kernel norm", 5, kernel_norm),
    (2, "kernel transform", 20, kernel_transform),
    (3, "self-reciprocity", 10, self_reciprocity),
    (4, "inversion", 30, inversion),
    (5, "convolution theorem", 60, convolution_theorem),
    (6, "kernel identities", 20, kernel_identities),
    (7, "Young inequalities", 30, young_inequalities),
    (8, "approximate identity", 30, approximate_identity),
    (9, "resolvent contraction", 60, resolvent_contraction),
    (10, "fractional power oracles", 90, power_oracle_equivalence),
    (11, "alpha=1 and semigroup", 30, power_consistency_and_semigroup),
    (12, "similarity", 10, similarity),
    (13, "scaling law", 5, scaling_law),
    (14, "mu=1/2 closed forms", 10, half_order_suite),
];

/// Runs criterion `id` (1-based).
pub fn run_criterion(id: usize, spec: &QuadratureSpec<f64>) -> Result<CriterionReport> {
    let (id, title, budget, f) = *CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .ok_or_else(|| crate::Error::InvalidArgument(format!("no criterion {id}")))?;
    let t = Instant::now();
    let checks = f(spec)?;
    Ok(CriterionReport { id, title, budget: Duration::from_secs(budget), checks, runtime: t.elapsed() })
}

/// Every criterion in order.
pub fn run_all(spec: &QuadratureSpec<f64>) -> Result<Vec<CriterionReport>> {
    CRITERIA.iter().map(|c| run_criterion(c.0, spec)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_criteria_pass() {
        let s = QuadratureSpec::default();
        for id in [1, 3, 13] {
            let r = run_criterion(id, &s).unwrap();
            assert!(r.pass(), "{}", r.summary_line());
            assert!(r.summary_line().starts_with("PASS"));
        }
        assert!(run_criterion(15, &s).is_err());
    }

    #[test]
    fn nan_error_fails() {
        let c = check("x", "x", f64::NAN, 1.0, Instant::now());
        assert!(!c.pass);
    }
}
