use std::path::PathBuf;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracheat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fracheat-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn kernel_vanishes_before_zero() {
    let o = bin(&["kernel", "--n", "1", "--alpha", "1", "--x", "0", "--t", "-1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim().parse::<f64>().unwrap(), 0.0);
}

#[test]
fn verify_exact_meets_tolerance() {
    let o = bin(&[
        "verify", "--suite", "exact", "--alpha", "1", "--lambda", "0.5", "--tol", "1e-6",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        rdr.headers().unwrap(),
        vec!["check", "param_json", "measured", "reference", "tol", "pass"]
    );
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        assert_eq!(&rec[5], "true");
        assert!(rec[2].parse::<f64>().unwrap() <= 1e-6);
        let params: serde_json::Value = serde_json::from_str(&rec[1]).unwrap();
        assert_eq!(params["suite"], "exact");
        rows += 1;
    }
    assert!(rows > 0);
}

#[test]
fn failed_verification_exits_one() {
    // a ratio spread bound of 1 cannot hold for a nonconstant ratio
    let o = bin(&["verify", "--suite", "lemma76", "--tol", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains(",false"));
}

#[test]
fn usage_errors_exit_two_and_name_the_flag() {
    for (args, flag) in [
        (vec!["kernel", "--n", "1", "--x", "0", "--t", "1"], "--alpha"),
        (
            vec!["potential", "--n", "1", "--alpha", "1", "--x", "0", "--t", "1"],
            "--field",
        ),
        (
            vec![
                "potential",
                "--n",
                "1",
                "--alpha",
                "1",
                "--x",
                "0",
                "--t",
                "1",
                "--field",
                "nonsense(1)",
            ],
            "--field",
        ),
        (
            vec![
                "kernel", "--n", "1", "--alpha", "1", "--x", "0", "--t", "1", "--shape", "2",
            ],
            "--shape",
        ),
        (
            vec!["regions", "--n", "1", "--p", "1", "--lambda-grid", "6:1:0.1"],
            "--lambda-grid",
        ),
        (
            vec![
                "picard",
                "--n",
                "1",
                "--alpha",
                "1",
                "--lambda",
                "0.5",
                "--field",
                "exact(alpha=1,lambda=0.5)",
                "--grid",
                "1.5",
            ],
            "--grid",
        ),
    ] {
        let o = bin(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(flag), "{args:?}: {err}");
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = scratch("det");
    let runs: Vec<Vec<&str>> = vec![
        vec!["regions", "--n", "2", "--p", "1.5", "--lambda-grid", "1:6:0.05"],
        vec![
            "potential",
            "--n",
            "1",
            "--alpha",
            "0.5",
            "--field",
            "bump(profile=gaussian,t0=0,t1=1,ramp=0.5)",
            "--x",
            "0.25",
            "--t",
            "0.25:1.5:0.25",
        ],
        vec!["limits", "time", "--iters", "3"],
        vec!["blowup", "small"],
        vec!["verify", "--suite", "gamma-rec"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let a = dir.join(format!("{i}-a.csv"));
        let b = dir.join(format!("{i}-b.csv"));
        for out in [&a, &b] {
            let mut full = args.clone();
            full.extend(["--out", out.to_str().unwrap()]);
            assert_eq!(bin(&full).status.code(), Some(0), "{full:?}");
        }
        let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
        assert!(!a.is_empty());
        assert_eq!(a, b, "{args:?}");
        assert!(!a.contains(&b'\r'));
    }
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn sampled_field_from_csv() {
    let dir = scratch("sampled");
    // an x-independent ramp f = t on [-4, 4] × [0, 2]
    let mut csv = String::from("x1,t,value\n");
    for x in [-4.0, 4.0] {
        for t in [0.0, 1.0, 2.0] {
            csv.push_str(&format!("{x},{t},{t}\n"));
        }
    }
    std::fs::write(dir.join("ramp.csv"), csv).unwrap();
    let field = format!("sampled({})", dir.join("ramp.csv").display());
    let o = bin(&[
        "potential",
        "--n",
        "1",
        "--alpha",
        "1",
        "--a",
        "0",
        "--b",
        "1",
        "--field",
        &field,
        "--x",
        "0",
        "--t",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    // Riemann-Liouville of order 1 of t is t²/2
    let v: f64 = String::from_utf8_lossy(&o.stdout).trim().parse().unwrap();
    assert!((v - 0.5).abs() < 1e-8, "{v}");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn config_file_supplies_defaults() {
    let dir = scratch("config");
    let cfg = dir.join("region.cfg");
    std::fs::write(&cfg, "# region label\nn = 1\np = 1\nlambda = 3\nalpha = 0.5\n").unwrap();
    let o = bin(&["regions", "--config", cfg.to_str().unwrap()]);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "C");
    let o = bin(&["regions", "--config", cfg.to_str().unwrap(), "--alpha", "1.5"]);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "A");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn svg_plot_of_region_curve() {
    let o = bin(&[
        "regions",
        "--n",
        "1",
        "--p",
        "1",
        "--lambda-grid",
        "1:6:0.5",
        "--format",
        "svg",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
    assert_eq!(s.matches("<polyline").count(), 1);
}
