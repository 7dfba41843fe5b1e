use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

fn oddl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oddl"))
        .args(args)
        .env_remove("ODDL_IMPORT_ROOTS")
        .output()
        .unwrap()
}

fn fx(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn eval_renders_json_to_stdout_only() {
    let o = oddl(&["eval", "-f", "json", &fx("ODD1_test.odd")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stderr.is_empty());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(
        v["scenery"]["drivable_area"]["drivable_area_lane_specification"]["speed_limit"],
        15.0
    );
}

#[test]
fn eval_formats() {
    let json = stdout(&oddl(&["eval", &fx("ODD1_test.odd")]));
    let yaml = oddl(&["eval", "-f", "yaml", &fx("ODD1_test.odd")]);
    assert_eq!(yaml.status.code(), Some(0));
    let y: serde_yaml::Value = serde_yaml::from_str(&stdout(&yaml)).unwrap();
    let j: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(serde_json::to_value(y).unwrap(), j);
    let uml = stdout(&oddl(&[
        "eval",
        "--format",
        "plantuml",
        &fx("ODD1_test.odd"),
    ]));
    assert_eq!(uml, format!("@startjson\n{}@endjson\n", json));
    let wide = stdout(&oddl(&["eval", "--indent", "4", &fx("ODD1_test.odd")]));
    assert!(wide.starts_with("{\n    \"scenery\""));
}

#[test]
fn constraint_violation_goes_to_stderr() {
    let o = oddl(&["eval", &fx("ODD1_31.odd")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    let err = stderr(&o);
    assert!(
        err.contains("Type constraint 'isBetween(0, speed_limit_global)' violated.\nValue: 31.0\n")
    );
    assert!(err.contains("at ODD.scen_template#Drivable_area_lane_specification.speed_limit (bundled:///scen_template.odd, line "));
}

#[test]
fn missing_required_exits_one() {
    let o = oddl(&["eval", &fx("ODD1_no_direction.odd")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("direction_of_travel"));
}

#[test]
fn load_and_usage_errors_exit_two() {
    for args in [
        vec!["eval".to_string(), fx("missing.odd")],
        vec!["eval".to_string(), fx("broken.odd")],
        vec!["eval".to_string(), fx("two_instances.odd")],
        vec![
            "eval".to_string(),
            "-i".into(),
            "nope".into(),
            fx("ODD1_test.odd"),
        ],
        vec![
            "eval".to_string(),
            "-f".into(),
            "xml".into(),
            fx("ODD1_test.odd"),
        ],
        vec![
            "eval".to_string(),
            "--indent".into(),
            "0".into(),
            fx("ODD1_test.odd"),
        ],
        vec![
            "eval".to_string(),
            "--tool-version".into(),
            "banana".into(),
            fx("ODD1_test.odd"),
        ],
        vec!["frobnicate".to_string()],
    ] {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let o = oddl(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn instance_selection() {
    let slow = oddl(&["eval", "-i", "slow", &fx("two_instances.odd")]);
    let fast = oddl(&["eval", "--instance", "fast", &fx("two_instances.odd")]);
    assert_eq!(slow.status.code(), Some(0));
    assert_eq!(fast.status.code(), Some(0));
    assert_ne!(slow.stdout, fast.stdout);
}

#[test]
fn version_gate_override() {
    assert_eq!(oddl(&["eval", &fx("future.odd")]).status.code(), Some(1));
    let o = oddl(&["eval", "--tool-version", "9.0.0", &fx("future.odd")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn within_exit_codes() {
    let pass = oddl(&["within", &fx("ODD1_test.odd"), &fx("scenario_15.json")]);
    assert_eq!(pass.status.code(), Some(0));
    assert!(stdout(&pass).contains("\"within\": true"));
    let fail = oddl(&[
        "within",
        &fx("ODD1_test.odd"),
        &fx("scenario_16.json"),
        "-p",
        &fx("profile.json"),
    ]);
    assert_eq!(fail.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&fail)).unwrap();
    assert_eq!(v["within"], false);
    assert_eq!(v["per_path"][0]["outcome"], "FAIL");
    assert_eq!(v["per_path"][0]["reason"], "16.0 > 15.0");
    let unknown = oddl(&["within", &fx("ODD1_test.odd"), &fx("scenario_unknown.json")]);
    assert_eq!(unknown.status.code(), Some(0));
    assert!(stdout(&unknown).contains("UNRESOLVED"));
}

#[test]
fn within_rejects_bad_inputs() {
    let dir = std::env::temp_dir().join(format!("oddl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let bad = bad.to_string_lossy().into_owned();
    assert_eq!(
        oddl(&["within", &fx("ODD1_test.odd"), &bad]).status.code(),
        Some(2)
    );
    assert_eq!(
        oddl(&[
            "within",
            &fx("ODD1_test.odd"),
            &fx("scenario_15.json"),
            "-p",
            &bad
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        oddl(&["within", &fx("ODD1_31.odd"), &fx("scenario_15.json")])
            .status
            .code(),
        Some(2)
    );
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn contains_exit_codes() {
    let odd1 = fx("ODD1_test.odd");
    let fast = fx("ODD1_20.odd");
    assert_eq!(oddl(&["contains", &odd1, &odd1]).status.code(), Some(0));
    assert_eq!(oddl(&["contains", &fast, &odd1]).status.code(), Some(0));
    let o = oddl(&["contains", &odd1, &fast]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("\"contains\": false"));
    assert_eq!(
        oddl(&["contains", &odd1, &fx("lane_spec.odd")])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn diff_exit_codes() {
    let odd1 = fx("ODD1_test.odd");
    let same = oddl(&["diff", &odd1, &odd1]);
    assert_eq!(same.status.code(), Some(0));
    assert_eq!(stdout(&same).trim(), "[]");
    let changed = oddl(&["diff", &odd1, &fx("ODD1_20.odd")]);
    assert_eq!(changed.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&changed)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["a"], 15.0);
    assert_eq!(v[0]["b"], 20.0);
    assert_eq!(
        oddl(&["diff", &odd1, &fx("lane_spec.odd")]).status.code(),
        Some(2)
    );
}

#[test]
fn templates_listing() {
    let o = oddl(&["templates"]);
    assert_eq!(o.status.code(), Some(0));
    let names: Vec<String> = stdout(&o)
        .lines()
        .map(|l| l.split('\t').next().unwrap().to_string())
        .collect();
    assert_eq!(
        names,
        [
            "odd_template",
            "scen_template",
            "env_template",
            "dyn_template"
        ]
    );
    let src = oddl(&["templates", "scen_template"]);
    assert!(stdout(&src).contains("class Drivable_area_lane_specification"));
    assert_eq!(oddl(&["templates", "nope"]).status.code(), Some(2));
}

#[test]
fn import_roots_extend_policy() {
    let dir = std::env::temp_dir().join(format!("oddl-roots-{}", std::process::id()));
    let (lib, app) = (dir.join("lib"), dir.join("app"));
    std::fs::create_dir_all(&lib).unwrap();
    std::fs::create_dir_all(&app).unwrap();
    std::fs::write(
        lib.join("shared.odd"),
        "module shared\nclass Box { width : Float = 1.0 }\n",
    )
    .unwrap();
    std::fs::write(
        app.join("main.odd"),
        "import \"../lib/shared.odd\"\nb : shared.Box = new { width = 2.0 }\n",
    )
    .unwrap();
    let main = app.join("main.odd").to_string_lossy().into_owned();
    let denied = oddl(&["eval", &main]);
    assert_eq!(denied.status.code(), Some(2));
    assert!(stderr(&denied).contains("not permitted"));
    let allowed = Command::new(env!("CARGO_BIN_EXE_oddl"))
        .args(["eval", &main])
        .env("ODDL_IMPORT_ROOTS", &lib)
        .output()
        .unwrap();
    assert_eq!(allowed.status.code(), Some(0), "{}", stderr(&allowed));
    assert_eq!(
        String::from_utf8(allowed.stdout).unwrap(),
        "{\n  \"width\": 2.0\n}\n"
    );
    std::fs::remove_dir_all(&dir).unwrap();
}
