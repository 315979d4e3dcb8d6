use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quartic-dirac"))
        .args(args)
        .env_remove("QUARTIC_DIRAC_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).expect("utf-8")
}

fn schema(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(name);
    serde_json::from_str(&std::fs::read_to_string(path).expect("schema file")).expect("schema json")
}

/// Checks the subset of JSON Schema the shipped schemas use: `type`,
/// `required`, `properties`, `items`, `enum` and file `$ref`s.
fn validate(v: &Value, s: &Value, at: &str) -> Result<(), String> {
    if let Some(r) = s.get("$ref").and_then(Value::as_str) {
        return validate(v, &schema(r), at);
    }
    if let Some(t) = s.get("type").and_then(Value::as_str) {
        let ok = match t {
            "object" => v.is_object(),
            "array" => v.is_array(),
            "string" => v.is_string(),
            "integer" => v.is_i64() || v.is_u64(),
            "number" => v.is_number(),
            "boolean" => v.is_boolean(),
            other => return Err(format!("{at}: unsupported schema type {other}")),
        };
        if !ok {
            return Err(format!("{at}: expected {t}, got {v}"));
        }
    }
    if let Some(options) = s.get("enum").and_then(Value::as_array) {
        if !options.contains(v) {
            return Err(format!("{at}: {v} not in {options:?}"));
        }
    }
    if let Some(req) = s.get("required").and_then(Value::as_array) {
        for key in req.iter().filter_map(Value::as_str) {
            if v.get(key).is_none() {
                return Err(format!("{at}: missing {key}"));
            }
        }
    }
    if let (Some(props), Some(obj)) = (s.get("properties").and_then(Value::as_object), v.as_object()) {
        for (k, sub) in props {
            if let Some(x) = obj.get(k) {
                validate(x, sub, &format!("{at}.{k}"))?;
            }
        }
    }
    if let (Some(items), Some(arr)) = (s.get("items"), v.as_array()) {
        for (i, x) in arr.iter().enumerate() {
            validate(x, items, &format!("{at}[{i}]"))?;
        }
    }
    Ok(())
}

fn json_of(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).expect("valid JSON")
}

#[test]
fn second_moment_at_unit_couplings() {
    let out = stdout(&["moments", "--t2", "1", "--t4", "1", "--index", "2"]);
    assert!(out.contains("1/16"), "{out}");
    assert!(out.contains("0.0625"), "{out}");
}

#[test]
fn first_loop_equation() {
    let out = stdout(&["sde", "--word", "A", "--format", "text"]);
    assert_eq!(out.trim(), "1 = 8 t2 m_2 + t4(16 m_4 - 16 m_{1,1,1,1} + 32 m_{2,2} + 64 m_2 m_2)");
}

#[test]
fn sde_system_round_trips_through_the_printed_parser() {
    let out = stdout(&["sde", "--max-degree", "5"]);
    assert_eq!(out.lines().count(), 1 + 3 + 6);
    for line in out.lines() {
        quartic_dirac::sde::parse_printed(line).expect("parses");
    }
}

#[test]
fn validation_errors_exit_one() {
    for args in [
        vec!["moments", "--t2", "1", "--t4", "-1", "--index", "2"],
        vec!["moments", "--t2", "1", "--t4", "x", "--index", "2"],
        vec!["dirac", "--ell", "3", "--t2", "1", "--t4", "1"],
        vec!["frobnicate"],
        vec!["moments", "--t2", "1"],
        vec!["mc", "--steps", "10", "--burn-in", "10"],
        vec!["mc", "--step-scale", "0"],
        vec!["mc", "--signature", "(3,1)"],
        vec!["sde", "--word", "A", "--format", "csv"],
        vec!["--threads", "0", "critical"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["mc", "--help"]).status.code(), Some(0));
}

#[test]
fn verification_failure_exits_two() {
    // At degree 2 and first order the closed forms agree with the solver.
    let out = run(&["verify", "--degree", "2", "--order", "1"]);
    assert_eq!(out.status.code(), Some(0));
    // From second order on they do not.
    let out = run(&["verify", "--degree", "2", "--order", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn json_outputs_match_shipped_schemas() {
    let cases: [(&[&str], &str); 7] = [
        (&["moments", "--t2", "1", "--t4", "2", "--all", "--format", "json"], "moments.schema.json"),
        (&["dirac", "--ell", "4", "--t2", "1", "--t4", "1", "--format", "json"], ""),
        (&["series", "--degree", "4", "--order", "2", "--format", "json"], "series.schema.json"),
        (&["critical", "--t2", "2", "--terms", "4", "--format", "json"], "critical.schema.json"),
        (&["verify", "--degree", "2", "--order", "1", "--format", "json"], "verify.schema.json"),
        (&["sde", "--word", "BAB", "--format", "json"], "sde.schema.json"),
        (
            &["mc", "--n", "2", "--steps", "4000", "--burn-in", "500", "--chains", "2", "--dirac", "2", "--dirac-stride", "1"],
            "mc.schema.json",
        ),
    ];
    for (args, name) in cases {
        let v = json_of(args);
        if !name.is_empty() {
            validate(&v, &schema(name), "$").unwrap_or_else(|e| panic!("{args:?}: {e}"));
        }
    }
    let eqs = json_of(&["sde", "--max-degree", "3", "--format", "json"]);
    for e in eqs.as_array().expect("array") {
        validate(e, &schema("sde.schema.json"), "$").expect("each equation");
    }
}

#[test]
fn mc_is_reproducible_given_seed_and_thread_count_independent() {
    let args = ["mc", "--n", "3", "--steps", "6000", "--burn-in", "1000", "--chains", "3", "--seed", "9"];
    let a = stdout(&args);
    let b = stdout(&args);
    assert_eq!(a, b);
    let mut one_thread = vec!["--threads", "1"];
    one_thread.extend_from_slice(&args);
    assert_eq!(stdout(&one_thread), a);
}

#[test]
fn exact_outputs_are_bit_identical() {
    let args = ["moments", "--t2", "3/2", "--t4", "5", "--all", "--format", "csv"];
    assert_eq!(stdout(&args), stdout(&args));
    let csv = stdout(&args);
    assert!(csv.starts_with("index,degree,a,b,ssq,decimal\n"));
    assert_eq!(csv.lines().count(), 21);
    assert!(!csv.contains(';'));
}

#[test]
fn mc_trace_and_summary_files() {
    let dir = std::env::temp_dir().join(format!("qd-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let trace = dir.join("trace.csv");
    let summary = dir.join("summary.json");
    let out = stdout(&[
        "mc", "--n", "2", "--steps", "3000", "--burn-in", "1000", "--chains", "1",
        "--trace", trace.to_str().expect("utf-8"), "--summary", summary.to_str().expect("utf-8"),
    ]);
    assert!(out.is_empty());
    let csv = std::fs::read_to_string(&trace).expect("trace written");
    assert!(csv.starts_with("chain,step,tr_a2,tr_d2,tr_d4,acceptance\n"));
    assert_eq!(csv.lines().count(), 1 + 200);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&summary).expect("summary")).expect("json");
    validate(&v, &schema("mc.schema.json"), "$").expect("schema");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn enumerate_and_cancellation_report() {
    assert_eq!(stdout(&["enumerate", "--word", "ABAB", "--order", "1"]).trim(), "[t4^1] ABAB = 1/256");
    let r = json_of(&["enumerate", "--word", "ABAB", "--order", "1", "--report-cancellation", "--format", "json"]);
    assert_eq!(r["positive_weight_count"], 2);
    assert_eq!(r["paired"], false);
    let maps = json_of(&["enumerate", "--word", "AA", "--order", "0", "--list", "--format", "json"]);
    assert_eq!(maps.as_array().expect("array").len(), 1);
}
