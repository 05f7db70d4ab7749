use serde_json::Value;
use stickelberger_cli::{run, EXIT_OK, EXIT_USAGE};
use stickelberger_core::{theta, AbelianFieldSpec, GroupRingElement};

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("stickelberger").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn theta_json_golden() {
    let (code, out, _) = invoke(&["theta", "--n", "0", "--b", "5", "--f", "3", "--json"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(
        out.trim(),
        r#"{"f":3,"H":[1],"coeffs":{"1":"1/1","2":"-1/1"}}"#
    );
}

#[test]
fn theta_json_round_trips() {
    let (code, out, _) = invoke(&[
        "theta",
        "--n",
        "2",
        "--b",
        "7",
        "--f",
        "20",
        "--subgroup",
        "1,9",
        "--json",
    ]);
    assert_eq!(code, EXIT_OK);
    let parsed = GroupRingElement::from_json(out.trim()).unwrap();
    let field = AbelianFieldSpec::new(20, &[1, 9]).unwrap();
    assert_eq!(parsed, theta(2, 7, &field).unwrap().value);
}

#[test]
fn lemma21_and_kv_examples() {
    let (code, out, _) = invoke(&[
        "verify", "lemma21", "--n", "0", "--b", "7", "--f", "3", "--fprime", "15",
    ]);
    assert_eq!(code, EXIT_OK, "{out}");
    let (code, out, _) = invoke(&["kv", "--l", "3", "--q", "7", "--n", "3"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim(), "2");
}

#[test]
fn tower_json_schema() {
    let (code, out, _) = invoke(&[
        "tower", "--f", "3", "--l", "5", "--n", "0", "--b", "7", "--depth", "2", "--json",
    ]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["conductors"], serde_json::json!([3, 15, 75]));
    assert_eq!(v["compat"], serde_json::json!([true, true]));
    for level in v["levels"].as_array().unwrap() {
        GroupRingElement::from_json(&level.to_string()).unwrap();
    }
    let f0 = GroupRingElement::from_json(&v["theta_f0"].to_string()).unwrap();
    assert_eq!(f0.field().conductor(), 3);
}

#[test]
fn oracle_commands() {
    let (_, out, _) = invoke(&["hminus", "--f", "23"]);
    assert_eq!(out.trim(), "3");
    let (_, out, _) = invoke(&["index", "--p", "23", "--json"]);
    let v: Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["index"], 3);
    let (_, out, _) = invoke(&["k2order", "--f", "5", "--subgroup", "1,4", "--json"]);
    let v: Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["order"], 4);
    assert_eq!(v["zeta_minus_one"], "1/30");
    let (_, out, _) = invoke(&["wn", "--n", "2", "--f", "1"]);
    assert_eq!(out.trim(), "24");
    let (code, out, _) = invoke(&[
        "divcheck", "--f", "3", "--n", "0", "--b", "5", "--chi", "1", "--l", "3", "--json",
    ]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["norm"], "2/1");
}

#[test]
fn verify_character_and_congruence() {
    let (code, out, _) = invoke(&[
        "verify",
        "character",
        "--f",
        "15",
        "--n",
        "1",
        "--b",
        "7",
        "--json",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().count(), 8);
    let (code, out, _) = invoke(&[
        "verify",
        "congruence",
        "--f",
        "3",
        "--n",
        "1",
        "--b",
        "5",
        "--json",
    ]);
    assert_eq!(code, EXIT_OK);
    let record: Value = serde_json::from_str(out.lines().next().unwrap()).unwrap();
    let info = record["detail"]["informational_failures"]
        .as_array()
        .unwrap();
    assert!(info
        .iter()
        .any(|e| e["a"] == 1 && e["l"] == 2 && e["difference"] == "-3/1"));
}

#[test]
fn usage_errors_exit_one() {
    let (code, _, err) = invoke(&["theta", "--n", "0", "--f", "3"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("--b"));
    let (code, _, err) = invoke(&["theta", "--n", "0", "--b", "3", "--f", "3"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("not coprime"));
    let (code, _, _) = invoke(&["theta", "--n", "0", "--b", "1", "--f", "6"]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _, _) = invoke(&["verify", "congruence", "--f", "9..3"]);
    assert_eq!(code, EXIT_USAGE);
    let (code, out, _) = invoke(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("verify"));
}
