use std::process::{Command, Output};

use serde_json::Value;

fn twodim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twodim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn classify_a9_mod_7() {
    let v = json(&twodim(&[
        "classify",
        "--field",
        "7^1",
        "--msc",
        "[[5,0,0,0],[1,3,2,0]]",
    ]));
    assert_eq!(v["label"]["class"], "general");
    assert_eq!(v["label"]["family"], 9);
    assert_eq!(v["witness"], serde_json::json!([[1, 0], [0, 1]]));
    assert_eq!(v["field"], "7^1");
}

#[test]
fn classify_zero_is_trivial() {
    let v = json(&twodim(&[
        "classify",
        "--field",
        "5^1",
        "--msc",
        "[[0,0,0,0],[0,0,0,0]]",
    ]));
    assert_eq!(v["label"]["class"], "trivial");
}

#[test]
fn classify_accepts_a_self_describing_matrix() {
    let msc = r#"{"field":"3^2","entries":[["0,1",1,0,0],[0,0,0,0]]}"#;
    let v = json(&twodim(&["classify", "--msc", msc]));
    assert_eq!(v["label"]["class"], "char3");
    assert_eq!(v["canonical"]["field"], v["field"]);
}

#[test]
fn classify_output_reparses() {
    let v = json(&twodim(&[
        "classify",
        "--field",
        "7^1",
        "--msc",
        "[[0,1,1,0],[3,0,0,6]]",
    ]));
    let back: twodim_core::serial::ClassResultJson = serde_json::from_value(v.clone()).unwrap();
    let r = twodim_core::serial::class_result_from_json(&back).unwrap();
    assert_eq!(
        serde_json::to_value(twodim_core::serial::class_result_to_json(&r)).unwrap(),
        v
    );
}

#[test]
fn isom_sign_pair() {
    let v = json(&twodim(&[
        "isom",
        "--field",
        "7^1",
        "--msc",
        "[[1,0,0,1],[2,0,0,0]]",
        "--msc2",
        "[[1,0,0,1],[5,0,0,0]]",
    ]));
    assert_eq!(v["verdict"], "isomorphic");
    assert!(v["witness"].is_array());
}

#[test]
fn isom_distinct_families() {
    let v = json(&twodim(&[
        "isom",
        "--field",
        "7^1",
        "--msc",
        "[[0,1,1,0],[0,0,0,6]]",
        "--msc2",
        "[[0,1,1,0],[1,0,0,6]]",
    ]));
    assert_eq!(v["isomorphic"], false);
    assert!(v["witness"].is_null());
}

#[test]
fn materialize_round_trips_through_classify() {
    for (field, family, params) in [
        ("7^1", "A2", "3,2,1"),
        ("7^1", "A9", ""),
        ("2^1", "A11", ""),
        ("3^1", "A5", "2"),
        ("5^1", "A1", "1,2,3,4"),
    ] {
        let m = json(&twodim(&[
            "materialize",
            "--field",
            field,
            "--family",
            family,
            "--params",
            params,
        ]));
        let v = json(&twodim(&["classify", "--msc", &m.to_string()]));
        assert_eq!(v["label"]["family"].to_string(), family[1..]);
        assert_eq!(v["canonical"], m);
    }
}

#[test]
fn materialize_extension_params_as_json() {
    let v = json(&twodim(&[
        "materialize",
        "--field",
        "2^2",
        "--family",
        "A3",
        "--params",
        r#"["0,1",1]"#,
    ]));
    assert_eq!(v["entries"][0][0], "0,1");
}

#[test]
fn orbit_of_a12_over_gf2() {
    let v = json(&twodim(&[
        "orbit",
        "--field",
        "2^1",
        "--msc",
        "[[0,0,0,0],[1,0,0,0]]",
    ]));
    assert_eq!(6 % v["size"].as_u64().unwrap(), 0);
    assert_eq!(v["label"]["family"], 12);
}

#[test]
fn census_gf2_json_and_csv() {
    let v = json(&twodim(&["census", "--field", "2^1"]));
    assert_eq!(v["total"], 256);
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
    let out = twodim(&["census", "--field", "2^1", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text.lines().count(),
        v["orbits"].as_u64().unwrap() as usize + 1
    );
}

#[test]
fn census_policy_and_override() {
    assert_eq!(twodim(&["census", "--field", "5^1"]).status.code(), Some(2));
    let v = json(&twodim(&[
        "census", "--field", "5^1", "--sample", "5", "--seed", "3",
    ]));
    assert_eq!(v["exhaustive"], false);
    assert_eq!(
        twodim(&[
            "orbit",
            "--field",
            "7^1",
            "--max-q",
            "5",
            "--msc",
            "[[1,0,0,0],[0,0,0,0]]"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn verify_passes() {
    let v = json(&twodim(&["verify", "--samples", "100"]));
    assert_eq!(v["ok"], true);
    assert_eq!(v["suites"].as_array().unwrap().len(), 5);
    let one = json(&twodim(&[
        "verify",
        "--suite",
        "traces",
        "--seed",
        "7",
        "--samples",
        "50",
    ]));
    assert_eq!(one["suites"][0]["suite"], "traces");
    assert_eq!(one["seed"], 7);
}

#[test]
fn usage_errors_exit_2() {
    let cases: [&[&str]; 8] = [
        &["classify", "--field", "7^1", "--msc", "[[1,2,3],[0,0,0,0]]"],
        &[
            "classify",
            "--field",
            "7^1",
            "--msc",
            "[[9,0,0,0],[0,0,0,0]]",
        ],
        &["classify", "--msc", "[[1,0,0,0],[0,0,0,0]]"],
        &["isom", "--field", "7^1", "--msc", "[[1,0,0,0],[0,0,0,0]]"],
        &["materialize", "--field", "7^1", "--family", "A13"],
        &[
            "materialize",
            "--field",
            "7^1",
            "--family",
            "A2",
            "--params",
            "1",
        ],
        &["verify", "--suite", "nothing"],
        &["frobnicate"],
    ];
    for args in cases {
        assert_eq!(twodim(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn table_format() {
    let out = twodim(&[
        "classify",
        "--field",
        "7^1",
        "--msc",
        "[[5,0,0,0],[1,3,2,0]]",
        "--format",
        "table",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("general/A9"));
    assert!(text.contains("[1 0; 0 1]"));
}
