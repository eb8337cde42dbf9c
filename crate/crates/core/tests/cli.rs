use std::process::{Command, Output};

use serde_json::Value;

fn icbargain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_icbargain")).args(args).output().expect("run icbargain")
}

fn json(args: &[&str]) -> Value {
    let out = icbargain(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn all_numbers_finite(v: &Value) -> bool {
    match v {
        Value::Null => false,
        Value::Number(n) => n.as_f64().is_some_and(f64::is_finite),
        Value::Array(xs) => xs.iter().all(all_numbers_finite),
        Value::Object(m) => m.values().all(all_numbers_finite),
        _ => true,
    }
}

fn c(x: f64) -> f64 {
    0.5 * (1.0 + x).log2()
}

#[test]
fn nbs_mac_fifteen_twenty_db() {
    let v = json(&["nbs-mac", "--snr1-db", "15", "--snr2-db", "20", "--verify"]);
    assert_eq!(v["schema"], "icbargain/1");
    assert_eq!(v["units"], "bits/channel_use");
    let r = |k: &str, i: &str| v[k][i].as_f64().unwrap();
    let p1 = 10f64.powf(1.5);
    assert!((r("solution", "r1") + r("solution", "r2") - c(p1 + 100.0)).abs() < 1e-12);
    let s1 = r("solution", "r1") - r("disagreement", "r1");
    let s2 = r("solution", "r2") - r("disagreement", "r2");
    assert!((s1 - s2).abs() < 1e-12);
    assert!(v["verify"]["sup_norm_deviation"].as_f64().unwrap() < 1e-3);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 5);
    assert!(v["mu1"].as_f64().unwrap() > 0.0);
    assert!(all_numbers_finite(&v));
}

#[test]
fn nbs_mac_zero_db_is_symmetric() {
    let v = json(&["nbs-mac", "--snr1-db", "0", "--snr2-db", "0"]);
    let r1 = v["solution"]["r1"].as_f64().unwrap();
    let r2 = v["solution"]["r2"].as_f64().unwrap();
    assert!((r1 - 0.396_240_625_180_289).abs() < 1e-12);
    assert_eq!(r1, r2);
    let v = json(&["nbs-mac", "--snr1-db", "-3", "--snr2-db", "-3"]);
    assert_eq!(v["solution"]["r1"], v["solution"]["r2"]);
}

#[test]
fn mechanism_reports_for_figure_cases() {
    let cases = [("3", "5", 0.0, 0.0), ("0.1", "3", 0.0, 0.1), ("0.2", "0.5", 0.02, 0.05)];
    for (a, b, alpha, beta) in cases {
        let v = json(&["mechanism", "--a", a, "--b", b, "--snr1-db", "20", "--snr2-db", "20", "--verify"]);
        assert_eq!(v["schema"], "icbargain/1");
        let res = &v["result"];
        assert_eq!(res["agreed"], true, "a={a} b={b}");
        assert_eq!(res["reason"], "none");
        assert_eq!(res["split"]["alpha"].as_f64().unwrap(), alpha);
        assert_eq!(res["split"]["beta"].as_f64().unwrap(), beta);
        assert_eq!(v["phi"].as_array().unwrap().len(), 5);
        assert_eq!(res["nbs"]["multipliers_mu"].as_array().unwrap().len(), 3);
        assert!(v["verify"]["sup_norm_deviation"].as_f64().unwrap() < 1e-3);
        assert!(all_numbers_finite(&v));
    }
}

#[test]
fn mechanism_breakdown_report() {
    let v = json(&["mechanism", "--a", "0.05", "--b", "3", "--snr1-db", "10", "--snr2-db", "10"]);
    let res = &v["result"];
    assert_eq!(res["agreed"], false);
    assert_eq!(res["reason"], "user1_no_incentive");
    assert_eq!(res["operating_point"], res["disagreement"]);
    assert!(res["nbs"].is_null());
}

fn region_points(csv: &str, curve: &str) -> Vec<(f64, f64)> {
    csv.lines()
        .skip(1)
        .filter(|l| l.starts_with(&format!("{curve},")))
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[2].parse().unwrap(), f[3].parse().unwrap())
        })
        .collect()
}

#[test]
fn region_export_strong_and_weak() {
    let run = |a: &str, b: &str| {
        let out = icbargain(&["region", "--a", a, "--b", b, "--snr1-db", "20", "--snr2-db", "20", "--tdm-samples", "21"]);
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let strong = run("3", "5");
    assert_eq!(strong.lines().next().unwrap(), "curve,index,r1,r2");
    assert_eq!(region_points(&strong, "tdm_frontier").len(), 21);
    assert_eq!(region_points(&strong, "disagreement").len(), 1);
    let hk = region_points(&strong, "hk_nbs")[0];
    let tdm = region_points(&strong, "tdm_nbs")[0];
    assert!(hk.0 >= tdm.0 && hk.1 >= tdm.1);

    // Every exported vertex lies in the region reported by `mechanism`.
    let report = json(&["mechanism", "--a", "3", "--b", "5", "--snr1-db", "20", "--snr2-db", "20"]);
    let phi: Vec<f64> = report["phi"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (r1, r2) in region_points(&strong, "hk_vertex") {
        // 12 significant digits in the CSV.
        let tol = 1e-9;
        assert!(r1 >= -tol && r2 >= -tol && r1 <= phi[0] + tol && r2 <= phi[1] + tol);
        assert!(r1 + r2 <= phi[2] + tol && 2.0 * r1 + r2 <= phi[3] + tol && r1 + 2.0 * r2 <= phi[4] + tol);
    }

    let weak = run("0.2", "0.5");
    let hk = region_points(&weak, "hk_nbs")[0];
    let tdm = region_points(&weak, "tdm_nbs")[0];
    assert!(tdm.0 >= hk.0 && tdm.1 >= hk.1);
}

#[test]
fn sweep_rows_and_header() {
    let out = icbargain(&["sweep-b", "--a", "1.5", "--snr1-db", "20", "--snr2-db", "20", "--b-min", "0", "--b-max", "0.5", "--step", "0.05"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "b,regime,agreed,r1_0,r2_0,r1_star,r2_star,sum_nbs,sum_max,tdm_r1,tdm_r2,tdm_sum");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 11);
    for row in &rows {
        let f = |i: usize| row[i].parse::<f64>().unwrap();
        assert!(f(7) <= f(8) + 1e-9, "sum_nbs > sum_max in {row:?}");
        if row[2] == "true" {
            assert!(f(5) > f(3) && f(6) > f(4));
        }
    }
    assert_eq!(rows[0][2], "false");
}

#[test]
fn sweep_writes_file_and_json() {
    let dir = std::env::temp_dir().join(format!("icbargain-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sweep.json");
    let out = icbargain(&[
        "sweep-b", "--a", "1.5", "--snr1-db", "20", "--snr2-db", "20", "--b-max", "0.2", "--step", "0.1",
        "--format", "json", "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["schema"], "icbargain/1");
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    assert!(all_numbers_finite(&v));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn usage_errors_exit_with_two() {
    let cases: [&[&str]; 5] = [
        &["nbs-mac", "--snr1-db", "abc", "--snr2-db", "0"],
        &["mechanism", "--a", "1"],
        &["mechanism", "--a", "-1", "--b", "1", "--snr1-db", "20", "--snr2-db", "20"],
        &["sweep-b", "--a", "1.5", "--snr1-db", "20", "--snr2-db", "20", "--step", "0"],
        &["region", "--a", "1", "--b", "1", "--snr1-db", "20", "--snr2-db", "20", "--tdm-samples", "1"],
    ];
    for args in cases {
        let out = icbargain(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn report_csv_format() {
    let out = icbargain(&["nbs-mac", "--snr1-db", "0", "--snr2-db", "0", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("key,value\n"));
    assert!(text.contains("\nsolution.r1,0.396240625180\n"));
}
