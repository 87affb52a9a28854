use std::process::{Command, Output};

use nmds_core::code_analysis::WeightDistribution;
use nmds_core::group_designs::DesignCheckReport;
use nmds_core::param_search::{CatalogRecord, ParameterTriple};

fn nmds(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nmds"))
        .args(args)
        .env_remove("NMDS_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = nmds(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

#[test]
fn search_params_rows() {
    let out = ok(&["search-params", "--p-max", "2000", "--json"]);
    let rows: Vec<ParameterTriple> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 38);
    assert_eq!(rows[0], ParameterTriple { q: 7, p: 3, t: 1 });
    let out = ok(&["search-params", "--p-max", "3", "--json"]);
    assert_eq!(out.lines().count(), 1);
    let out = ok(&["search-params", "--p-max", "2", "--json"]);
    assert_eq!(out, "");
}

#[test]
fn build_example_and_gate() {
    let out = ok(&["build", "--q", "7", "--p", "3", "--k", "3"]);
    assert!(out.contains("[9,6,3] NMDS"));
    assert!(out.contains("1 1 1 1 1 1 1 1 1"));

    let o = nmds(&["build", "--q", "7", "--p", "3", "--k", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("k must be divisible by p"));

    let out = ok(&["build", "--q", "13", "--p", "3", "--k", "3", "--ext-poly", "x^2+11", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["ext_modulus"], "x^2+11");
    assert_eq!(v["xQ"], "2");
    assert_eq!((v["n"].as_u64(), v["dim"].as_u64(), v["dmin"].as_u64()), (Some(9), Some(6), Some(3)));
}

#[test]
fn weights_methods_agree() {
    let brute = ok(&["weights", "--q", "7", "--p", "3", "--k", "3", "--method", "brute", "--json"]);
    let formula = ok(&["weights", "--q", "7", "--p", "3", "--k", "3", "--method", "formula", "--json"]);
    let b: serde_json::Value = serde_json::from_str(&brute).unwrap();
    let f: serde_json::Value = serde_json::from_str(&formula).unwrap();
    assert_eq!(b["distribution"], f["distribution"]);
    let dist: WeightDistribution = serde_json::from_value(b["distribution"].clone()).unwrap();
    assert_eq!(
        dist.to_string(),
        "1 + 72z^3 + 324z^4 + 3348z^5 + 10656z^6 + 30024z^7 + 43794z^8 + 29430z^9"
    );
    let out = ok(&["weights", "--q", "31", "--p", "5", "--k", "5", "--method", "formula"]);
    assert!(out.contains("A_15 = 3922800"));
}

#[test]
fn verify_design_example() {
    let out = ok(&["verify-design", "--q", "7", "--p", "3", "--k", "3", "--t", "2", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let r: DesignCheckReport = serde_json::from_value(v["report"].clone()).unwrap();
    assert!(r.is_design);
    assert_eq!((r.v, r.block_size, r.lambda), (9, 3, Some(1)));
    let out = ok(&["verify-design", "--q", "7", "--p", "3", "--k", "3", "--t", "2", "--dual"]);
    assert!(out.starts_with("2-(9,6,5) design"));
}

#[test]
fn budget_refusal_exit_code() {
    let o = Command::new(env!("CARGO_BIN_EXE_nmds"))
        .args(["verify-design", "--q", "31", "--p", "5", "--k", "5"])
        .env("NMDS_BUDGET", "1000")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("exceeds enumeration budget 1000"));
}

#[test]
fn subset_counts() {
    assert_eq!(ok(&["subset-count", "--group", "3x3", "--k", "6", "--x", "0,0"]), "12\n");
    assert_eq!(
        ok(&["subset-count", "--group", "3x3", "--k", "6", "--x", "0,0", "--oracle"]),
        ok(&["subset-count", "--group", "3x3", "--k", "6", "--x", "0,0"])
    );
    assert_eq!(ok(&["subset-count", "--group", "3x3", "--k", "9", "--x", "1,0"]), "0\n");
    let out = ok(&["subset-count", "--group", "3x3", "--k", "4", "--x", "-1,1", "--nonzero", "--oracle"]);
    assert!(out.trim().parse::<u64>().is_ok());
}

#[test]
fn verify_nmds_example() {
    let out = ok(&["verify-nmds", "--q", "7", "--p", "3", "--k", "3"]);
    assert!(out.contains("column conditions hold: true"));
    assert!(out.contains("12 of 12 primal blocks"));
}

#[test]
fn table3_small_rows_and_determinism() {
    let a = ok(&["table3", "--max-q", "31", "--json"]);
    let b = ok(&["table3", "--max-q", "31", "--json"]);
    assert_eq!(a, b);
    let rows: Vec<CatalogRecord> = a.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let summary: Vec<(u64, &str, &str)> = rows.iter().map(|r| (r.q, r.curve.as_str(), r.x_q.as_str())).collect();
    assert_eq!(summary, vec![(7, "y^2=x^3+2", "1"), (13, "y^2=x^3+3", "2"), (31, "y^2=x^3+11", "0")]);
}

#[test]
fn find_curve_output() {
    let out = ok(&["find-curve", "--q", "43", "--p", "7"]);
    assert!(out.starts_with("y^2=x^3+3 over F_43: 49 points, group Z_7 + Z_7"));
}
