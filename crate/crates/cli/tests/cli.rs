use std::path::Path;
use std::process::{Command, Output};

fn hankel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hankel")).args(args).output().expect("binary runs")
}

fn rows(out: &[u8]) -> Vec<[f64; 3]> {
    let text = std::str::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,value_re,value_im"));
    lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
            [v[0], v[1], v[2]]
        })
        .collect()
}

#[test]
fn transform_of_gaussian_is_itself() {
    let out = hankel(&["transform", "--mu", "0.5", "--input", "builtin:gauss"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = rows(&out.stdout);
    assert_eq!(r.len(), 256);
    assert_eq!(r[0][0], 1e-3);
    assert_eq!(r[255][0], 30.0);
    for [x, re, im] in r {
        let g = x * (-x * x / 2.0).exp();
        assert!((re - g).abs() < 1e-6 && im == 0.0, "x={x}");
    }
}

#[test]
fn resolvent_at_two_halves_the_weighted_sup() {
    let out = hankel(&["resolvent", "--mu", "0.5", "--lambda", "2", "--input", "builtin:gauss", "--grid-points", "48"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // ‖φ_G‖_{L∞(r)} = sup e^{-x²/2} = 1 and r = 1/x at μ = 1/2.
    let sup = rows(&out.stdout).iter().map(|[x, re, im]| (re * re + im * im).sqrt() / x).fold(0f64, f64::max);
    assert!(sup > 0.0 && sup <= 0.5, "{sup}");
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("job.json");
    let out_path = dir.path().join("out.csv");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"command": "specfun", "function": "macdonald_k", "nu": 0.5,
                "grid": {{"min": 0.5, "max": 2, "points": 4, "log": false}}, "output": {:?}}}"#,
            out_path
        ),
    )
    .unwrap();
    let out = hankel(&["--config", cfg.to_str().unwrap(), "--nu", "1.5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = rows(&std::fs::read(&out_path).unwrap());
    let xs: Vec<f64> = r.iter().map(|v| v[0]).collect();
    assert_eq!(xs, vec![0.5, 1.0, 1.5, 2.0]);
    for [x, k, _] in r {
        // K_{3/2}(x) = √(π/(2x)) e^{-x} (1 + 1/x)
        let e = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() * (1.0 + 1.0 / x);
        assert!((k - e).abs() < 1e-12 * e, "x={x}: {k} vs {e}");
    }
}

#[test]
fn identical_jobs_give_identical_bytes() {
    let args = ["convolve", "--mu", "1.5", "--input", "gauss", "--input", "poly_gauss", "--grid-points", "24"];
    let a = hankel(&args);
    let b = hankel(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_input_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("in.csv");
    let xs: Vec<f64> = (0..400).map(|i| 1e-3 * (1.03f64).powi(i)).filter(|x| *x < 20.0).collect();
    let mut text = String::from("x,value_re,value_im\n");
    for x in &xs {
        text.push_str(&format!("{x:e},{:e},0\n", x * (-x * x / 2.0).exp()));
    }
    std::fs::write(&path, text).unwrap();
    let out = hankel(&["transform", "--mu", "0.5", "--input", path.to_str().unwrap(), "--grid-min", "0.5", "--grid-max", "2", "--grid-points", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for [x, re, _] in rows(&out.stdout) {
        assert!((re - x * (-x * x / 2.0).exp()).abs() < 1e-4, "x={x}");
    }
}

#[test]
fn exit_codes() {
    let code = |o: Output| o.status.code().unwrap();
    assert_eq!(code(hankel(&["transform", "--mu", "-0.7", "--input", "gauss"])), 2);
    assert_eq!(code(hankel(&["transform", "--mu", "0.5"])), 2);
    assert_eq!(code(hankel(&["transform", "--mu", "0.5", "--input", "nosuchfile.csv"])), 2);
    assert_eq!(code(hankel(&["resolvent", "--mu", "0.5", "--lambda", "0", "--input", "gauss"])), 2);
    assert_eq!(code(hankel(&["fracpow", "--mu", "0.5", "--alpha-re", "-1", "--input", "gauss"])), 2);
    assert_eq!(code(hankel(&["transform", "--mu", "0.5", "--input", "gauss", "--grid-min", "0"])), 2);
    assert_eq!(code(hankel(&["verify", "--criteria", "15"])), 2);
    assert_eq!(code(hankel(&["--bogus"])), 2);
    assert_eq!(code(hankel(&[])), 2);
    let q = hankel(&["transform", "--mu", "0.5", "--input", "gauss", "--max-subdivisions", "3"]);
    assert_eq!(code(q), 3);

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"command": "transform", "mu": 0.5, "sigma": 2}"#).unwrap();
    let o = hankel(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(code(o), 2);
    let bad_csv = dir.path().join("bad.csv");
    std::fs::write(&bad_csv, "a,b,c\n1,2,3\n").unwrap();
    assert_eq!(code(hankel(&["transform", "--mu", "0.5", "--input", bad_csv.to_str().unwrap()])), 2);
    assert!(!Path::new("nosuchfile.csv").exists());
}

#[test]
fn verify_writes_a_passing_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = hankel(&["verify", "--criteria", "1,3,13", "--output", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    let entries = v.as_array().unwrap();
    assert_eq!(entries.len(), 5);
    for e in entries {
        for key in ["check_name", "paper_ref", "max_error", "tolerance", "pass"] {
            assert!(e.get(key).is_some(), "{key}");
        }
        assert_eq!(e["pass"], true);
    }
}

#[test]
fn enum_flags_use_the_json_spelling() {
    let out = hankel(&["specfun", "--function", "bessel_j_scaled", "--nu", "0", "--grid-points", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(rows(&out.stdout).len(), 3);
}
