use std::process::{Command, Output};

use cossin::families::{classify, Triple};
use cossin::homomorphisms::Context;
use cossin::semigroup::parse_expr;
use cossin::{Cyclo, Semigroup};
use serde_json::Value;

fn cse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cse"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

const T24: &str =
    r#"{"lambda":1,"rho":1,"c":"1/2","chi1":"char:1","chi2":"char:2","chi3":"char:3"}"#;

fn constructed_t24() -> Value {
    let out = cse(&[
        "cossin", "construct", "--variant", "T2.4", "--delta", "1", "--params", T24, "cyclic(3)",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    json_of(&out)
}

fn fgh(t: &Value) -> [String; 3] {
    ["f", "g", "h"].map(|k| t["triple"][k].to_string())
}

#[test]
fn make_and_check_round_trip() {
    let out = cse(&["sgp", "make", "adjoin_identity", "null(2)"]);
    assert_eq!(code(&out), 0);
    let printed = String::from_utf8(out.stdout).unwrap();
    let s: Semigroup = serde_json::from_str(&printed).unwrap();
    assert_eq!(s, parse_expr("adjoin_identity(null(2))").unwrap());

    let out = cse(&["sgp", "check", &printed]);
    assert_eq!(code(&out), 0);
    let back: Semigroup = serde_json::from_value(json_of(&out)["semigroup"].clone()).unwrap();
    assert_eq!(back, s);
}

#[test]
fn non_associative_table_exits_2() {
    let out = cse(&["sgp", "check", "[[1,0],[0,0]]"]);
    assert_eq!(code(&out), 2);
    assert_eq!(json_of(&out)["associative"], false);
}

#[test]
fn malformed_input_exits_1_with_location() {
    let out = cse(&["sgp", "check", "[[0,1],[1,0]"]);
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 1 column"), "{err}");

    assert_eq!(code(&cse(&["cossin", "verify", "cyclic(2)", "[1]", "[1,1]", "[0,0]"])), 1);
    assert_eq!(code(&cse(&["chars", "enum", "cyclic(0)"])), 1);
    assert_eq!(code(&cse(&["--no-such-flag", "sgp", "enum", "2"])), 1);
}

#[test]
fn enumeration_counts() {
    let out = cse(&["sgp", "enum", "2"]);
    assert_eq!(json_of(&out)["count"], 8);
    let out = cse(&["sgp", "enum", "2", "--dedup"]);
    assert_eq!(json_of(&out)["count"], 5);
    assert_eq!(code(&cse(&["sgp", "enum", "4"])), 1);
}

#[test]
fn constructed_triple_verifies_and_perturbed_fails() {
    let t = constructed_t24();
    assert_eq!(t["residual"], 0.0);
    let [f, g, h] = fgh(&t);
    let out = cse(&["cossin", "verify", "cyclic(3)", &f, &g, &h]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_of(&out)["solves"], true);

    let out = cse(&["cossin", "verify", "cyclic(3)", &f, &g, "[1,0,0]"]);
    assert_eq!(code(&out), 2);
    assert_eq!(code(&cse(&["cossin", "classify", "cyclic(3)", &f, &g, "[1,0,0]"])), 2);
}

#[test]
fn classify_matches_the_library() {
    let t = constructed_t24();
    let [f, g, h] = fgh(&t);
    let out = cse(&["cossin", "classify", "cyclic(3)", &f, &g, &h]);
    assert_eq!(code(&out), 0);

    let s = parse_expr("cyclic(3)").unwrap();
    let ctx = Context::<Cyclo>::new(&s).unwrap();
    let triple: Triple<Cyclo> = Triple::from_json(&t["triple"]).unwrap();
    let direct = classify(&ctx, &triple, 0.0).unwrap();
    assert_eq!(json_of(&out), direct.to_json());
    assert_eq!(direct.primary.reconstruct(), triple);
}

#[test]
fn float_mode_classifies() {
    let t = constructed_t24();
    let [f, g, h] = fgh(&t);
    let out = cse(&["--mode", "float", "cossin", "classify", "cyclic(3)", &f, &g, &h]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json_of(&out)["primary"], "T2.4");
}

#[test]
fn character_references_and_sine_solutions() {
    let out = cse(&["sine", "solve", "truncated_add(3)", "char:0"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_of(&out)["dimension"], 1);

    let out = cse(&["sine", "solve", "cyclic(2)", "[1,2]"]);
    assert_eq!(code(&out), 2);

    let out = cse(&["psi", "solve", "truncated_add(3)", "zero", "sine:0:0"]);
    assert_eq!(code(&out), 0);
    let r = json_of(&out);
    assert_eq!(r["solvable"], true);
    assert_eq!(r["rank"]["rank"], 2);

    let out = cse(&["chars", "enum", "cyclic(3)"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_of(&out)["independence"]["rank"], 3);
}

#[test]
fn sine_pair_decomposition() {
    // 2λf = χ₁ − χ₂ with λ = 1, χ₁ = (1, 1), χ₂ = (1, −1)
    let out = cse(&["sine", "decompose", "cyclic(2)", "[0,1]", "[1,0]"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = json_of(&out);
    assert_eq!(r["lambda"], serde_json::json!({"order": 1, "coeffs": ["1"]}));
}

#[test]
fn corollary_commands() {
    let out = cse(&[
        "cor", "construct", "--family", "4", "--beta", "1", "--chi1", "char:1", "--chi2", "char:2",
        "cyclic(2)",
    ]);
    assert_eq!(code(&out), 0);
    let r = json_of(&out);
    assert_eq!(r["f"], r["g"]);
    assert_eq!(r["lifted"]["solves"], true);

    let out = cse(&["cor", "classify", "cyclic(2)", "[1,1]", "[1,1]"]);
    assert_eq!(code(&out), 0);
    let r = json_of(&out);
    assert_eq!(r["family"], 3);
    assert_eq!(r["agrees_with_reduction"], true);

    let out = cse(&["cor", "construct", "--family", "3", "cyclic(2)"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn census_of_order_2_is_clean_and_deterministic() {
    let a = cse(&["oracle", "census", "2", "--attempts", "60", "--seed", "5"]);
    assert_eq!(code(&a), 0);
    assert_eq!(json_of(&a)["critical"], 0);
    let b = cse(&["oracle", "census", "2", "--attempts", "60", "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn text_format_and_output_file() {
    let dir = std::env::temp_dir().join(format!("cse-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("chars.txt");
    let out = cse(&[
        "chars",
        "enum",
        "cyclic(3)",
        "--format",
        "text",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("values: [1, ζ3^1, -1 - ζ3^1]"), "{text}");
    std::fs::remove_dir_all(dir).unwrap();
}
