//! The `x,value_re,value_im` sample format.

use std::fmt::Write as _;
use std::path::Path;

use hankel_core::{Complex64, Function64};
use hankel_core::funcspace::SAMPLE_ORDER;

use crate::error::CliError;

pub const HEADER: &str = "x,value_re,value_im";

/// C's `%.17g`: 17 significant digits, trailing zeros dropped, exponent form
/// outside 1e-4 ≤ |v| < 1e17. Enough digits that parsing gives back the same f64.
pub fn fmt_g17(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn render(xs: &[f64], ys: &[Complex64]) -> String {
    let mut out = String::with_capacity(64 * xs.len());
    out.push_str(HEADER);
    out.push('\n');
    for (x, y) in xs.iter().zip(ys) {
        let _ = writeln!(out, "{},{},{}", fmt_g17(*x), fmt_g17(y.re), fmt_g17(y.im));
    }
    out
}

pub fn parse(text: &str, origin: &str) -> Result<(Vec<f64>, Vec<Complex64>), CliError> {
    let bad = |line: usize, what: &str| CliError::Config(format!("{origin}:{line}: {what}"));
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == HEADER => {}
        _ => return Err(bad(1, &format!("expected header '{HEADER}'"))),
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(bad(i + 1, "expected three fields"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(i + 1, &format!("not a number: '{s}'")));
        xs.push(num(fields[0])?);
        ys.push(Complex64::new(num(fields[1])?, num(fields[2])?));
    }
    Ok((xs, ys))
}

/// Loads a sample file as a grid function.
pub fn load(path: &Path) -> Result<Function64, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    let (xs, ys) = parse(&text, &path.display().to_string())?;
    Ok(Function64::from_samples(xs, ys, SAMPLE_ORDER)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_printf() {
        assert_eq!(fmt_g17(1.0), "1");
        assert_eq!(fmt_g17(0.1), "0.10000000000000001");
        assert_eq!(fmt_g17(-2.5e-7), "-2.4999999999999999e-07");
        assert_eq!(fmt_g17(1e20), "1e+20");
        assert_eq!(fmt_g17(123456.0), "123456");
        assert_eq!(fmt_g17(1e-4), "0.0001");
        assert_eq!(fmt_g17(0.0), "0");
    }

    #[test]
    fn g17_round_trips() {
        for v in [std::f64::consts::PI, 1e-300, 6.02214076e23, -1.0 / 3.0, 5e-324, f64::MAX] {
            assert_eq!(fmt_g17(v).parse::<f64>().unwrap(), v, "{v}");
        }
    }

    #[test]
    fn written_samples_reload_bit_exactly() {
        let xs: Vec<f64> = (1..50).map(|i| 0.013 * i as f64 + 1e-9 * (i * i) as f64).collect();
        let ys: Vec<Complex64> = xs.iter().map(|x| Complex64::new(x.sin() / 3.0, -x.exp() * 1e-17)).collect();
        let text = render(&xs, &ys);
        let (xs2, ys2) = parse(&text, "t").unwrap();
        assert_eq!(xs, xs2);
        assert_eq!(ys, ys2);
        let f = Function64::from_samples(xs2, ys2, SAMPLE_ORDER).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(f.eval(*x).unwrap(), *y);
        }
        assert_eq!(render(&xs, &ys), text);
    }

    #[test]
    fn parse_rejects_bad_rows() {
        assert!(parse("x,y\n1,2,3\n", "t").is_err());
        assert!(parse("x,value_re,value_im\n1,2\n", "t").is_err());
        assert!(parse("x,value_re,value_im\n1,a,0\n", "t").is_err());
        let (xs, ys) = parse("x,value_re,value_im\n0.5,1,-2\n\n", "t").unwrap();
        assert_eq!(xs, vec![0.5]);
        assert_eq!(ys, vec![Complex64::new(1.0, -2.0)]);
    }
}
