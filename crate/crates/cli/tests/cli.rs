//! End-to-end tests of the `bilharm` binary: commands, exit codes, JSON
//! output and the dump/reload fixpoint of the library command.

use std::path::PathBuf;
use std::process::{Command, Output};

use bilharm_core::canon::family_equal;
use bilharm_core::library;
use bilharm_core::parser::parse_specs;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bilharm"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .parent()
        .and_then(|p| p.parent())
        .expect("workspace root")
        .join("fixtures")
}

fn fixture(name: &str) -> String {
    fixtures().join(name).display().to_string()
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

#[test]
fn check_standard_builtins_is_harmonious() {
    let out = run(&[
        "check",
        "--builtin",
        "and",
        "or",
        "imp",
        "neg",
        "bot",
        "top",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.matches("harmonious").count(), 6, "{text}");
}

#[test]
fn check_pathological_builtins_exit_1() {
    for (name, verdict) in [
        ("tonk", "ill-formed"),
        ("conk", "conversion-violation"),
        ("honk", "conversion-violation"),
    ] {
        let out = run(&["check", "--builtin", name]);
        assert_eq!(code(&out), 1, "{name}");
        let text = String::from_utf8_lossy(&out.stdout);
        assert!(text.contains(verdict), "{name}: {text}");
        // The JSON report must carry the same verdict as the text one.
        let out = run(&["check", "--json", "--builtin", name]);
        assert_eq!(code(&out), 1, "{name} (json)");
        let doc: serde_json::Value =
            serde_json::from_slice(&out.stdout).expect("valid JSON report");
        assert_eq!(doc[0]["verdict"], verdict, "{name}");
    }
}

#[test]
fn check_missing_file_exits_2() {
    let out = run(&["check", "nosuchfile.rules"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn check_user_spec_file() {
    let out = run(&["check", &fixture("et.rules")]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("connective et: harmonious"), "{text}");
}

#[test]
fn quiet_suppresses_output_but_keeps_codes() {
    let out = run(&["check", "--quiet", "--builtin", "and"]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let out = run(&["check", "--quiet", "--builtin", "conk"]);
    assert_eq!(code(&out), 1);
    assert!(out.stdout.is_empty());
}

#[test]
fn complete_imp_from_assertive_intro_emits_all_four_families() {
    let out = run(&["complete", "--builtin", "imp", "--from", "assertive-intro"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    let specs = parse_specs(&text).expect("emitted DSL parses");
    assert_eq!(specs.len(), 1);
    let imp = library::builtin("imp").unwrap();
    for (key, family) in imp.families() {
        assert!(
            family_equal(specs[0].family(key), family, imp),
            "family {key} differs:\n{text}"
        );
    }
}

#[test]
fn complete_neg_from_rejective_elim_gives_the_negation_rules() {
    let out = run(&["complete", "--builtin", "neg", "--from", "rejective-elim"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    let specs = parse_specs(&text).expect("emitted DSL parses");
    let neg = library::builtin("neg").unwrap();
    for (key, family) in neg.families() {
        assert!(family_equal(specs[0].family(key), family, neg), "{key}");
    }
}

#[test]
fn complete_tonk_fails_with_exit_1() {
    let out = run(&["complete", "--builtin", "tonk", "--from", "assertive-intro"]);
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("ill-formed"), "{err}");
}

#[test]
fn complete_writes_reloadable_output_file() {
    let dir = std::env::temp_dir().join("bilharm-complete-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("and.rules");
    let out = run(&[
        "complete",
        "--builtin",
        "and",
        "--from",
        "rejective-elim",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let specs = parse_specs(&text).expect("written DSL parses");
    let and = library::builtin("and").unwrap();
    for (key, family) in and.families() {
        assert!(family_equal(specs[0].family(key), family, and), "{key}");
    }
}

#[test]
fn complete_json_embeds_the_dsl() {
    let out = run(&[
        "complete",
        "--json",
        "--builtin",
        "or",
        "--from",
        "assertive-elim",
    ]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["connective"], "or");
    let specs = parse_specs(doc["dsl"].as_str().unwrap()).unwrap();
    let or = library::builtin("or").unwrap();
    for (key, family) in or.families() {
        assert!(family_equal(specs[0].family(key), family, or), "{key}");
    }
}

#[test]
fn verify_negation_fixture_reports_open_assumptions() {
    let out = run(&["verify", &fixture("neg-ii.deriv"), "--lib", "imp", "bot"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("valid"), "{text}");
    assert!(text.contains("(+ (imp p bot))"), "{text}");
}

#[test]
fn verify_collapse_fixtures() {
    let out = run(&["verify", &fixture("conk-collapse.deriv"), "--lib", "conk"]);
    assert_eq!(code(&out), 0);
    let out = run(&[
        "verify",
        "--json",
        &fixture("honk-collapse.deriv"),
        "--lib",
        "honk",
    ]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc[0]["status"], "valid");
    assert_eq!(doc[0]["conclusion"], "(+ q)");
    assert_eq!(doc[0]["open"][0], "(- p)");
}

#[test]
fn verify_bad_major_is_invalid() {
    let out = run(&["verify", &fixture("bad-major.deriv"), "--lib", "imp"]);
    assert_eq!(code(&out), 1);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("major premise mismatch"), "{text}");
}

#[test]
fn verify_parse_failures_exit_2() {
    let out = run(&["verify", "nosuchfile.deriv", "--lib", "imp"]);
    assert_eq!(code(&out), 2);
    let dir = std::env::temp_dir().join("bilharm-verify-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("corrupt.deriv");
    std::fs::write(&path, "(rule \"imp\" (oops").unwrap();
    let out = run(&["verify", path.to_str().unwrap(), "--lib", "imp"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn verify_accepts_library_files() {
    let out = run(&[
        "verify",
        &fixture("neg-iii.deriv"),
        "--lib",
        "imp",
        "bot",
        &fixture("et.rules"),
    ]);
    assert_eq!(code(&out), 0);
}

#[test]
fn library_dump_reloads_to_the_builtins() {
    let out = run(&["library"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    let specs = parse_specs(&text).expect("library dump parses");
    assert_eq!(specs.len(), 9);
    for spec in &specs {
        let original = library::builtin(&spec.name).expect("known builtin");
        for (key, family) in original.families() {
            assert!(
                family_equal(spec.family(key), family, original),
                "{} {key}",
                spec.name
            );
        }
    }
}

#[test]
fn library_single_name_and_unknown_name() {
    let out = run(&["library", "--name", "and"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    let specs = parse_specs(&text).unwrap();
    assert_eq!(specs.len(), 1);
    assert_eq!(specs[0].all_rules().count(), 6);

    let out = run(&["library", "--name", "foo"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn library_json_lists_all_connectives() {
    let out = run(&["library", "--json"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc.as_array().unwrap().len(), 9);
}

#[test]
fn fault_injected_inputs_never_escape_the_exit_contract() {
    // Truncations and byte corruptions of a valid spec must produce exit
    // codes 0, 1 or 2 (never a panic) and exit 2 exactly when parsing
    // fails.
    let source = std::fs::read_to_string(fixture("et.rules")).unwrap();
    let dir = std::env::temp_dir().join("bilharm-fault-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("mangled.rules");

    let mut cases: Vec<String> = Vec::new();
    let step = source.len() / 12;
    for i in 1..12 {
        let cut = i * step;
        if source.is_char_boundary(cut) {
            cases.push(source[..cut].to_string());
        }
    }
    for (from, to) in [("(", ")"), ("polarity +", "polarity *"), ("side", "ride")] {
        cases.push(source.replacen(from, to, 1));
    }
    for case in cases {
        std::fs::write(&path, &case).unwrap();
        let out = run(&["check", path.to_str().unwrap()]);
        let c = code(&out);
        assert!((0..=2).contains(&c), "exit {c} for mangled input:\n{case}");
        if parse_specs(&case).is_err() {
            assert_eq!(c, 2, "parse failure must exit 2:\n{case}");
        }
    }
}

#[test]
fn ambiguous_family_needs_a_type_override() {
    // A negation-like connective with no type annotations: its single-
    // premise intro fits both shapes.
    let dir = std::env::temp_dir().join("bilharm-ambiguous-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("non.rules");
    std::fs::write(
        &path,
        r#"
(connective "non" (arity 1) (args A)
  (rule "+nonI" (polarity +) (role intro) (premises (- A)) (conclusion (+ (non A)))))
"#,
    )
    .unwrap();
    let path = path.to_str().unwrap();

    let out = run(&["complete", path, "--from", "assertive-intro"]);
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--type"), "{err}");

    let out = run(&["complete", path, "--from", "assertive-intro", "--type", "1"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    let specs = parse_specs(&text).unwrap();
    // Same rules as the built-in negation, up to the connective name.
    let neg = library::builtin("neg").unwrap();
    let renamed = parse_specs(&text.replace("non", "neg")).unwrap();
    for (key, family) in neg.families() {
        assert!(family_equal(renamed[0].family(key), family, neg), "{key}");
    }
    assert_eq!(specs[0].name, "non");
}
