use std::path::PathBuf;
use std::process::{Command, Output};

use approx::assert_abs_diff_eq;
use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn regdec(args: &[&str], stdin: Option<&str>) -> Output {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_regdec"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn regdec");
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    } else {
        drop(child.stdin.take());
    }
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout));
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn coherent_state_classifies_with_one_term() {
    let out = regdec(&["classify", "--input", &fixture("coherent_n2.json")], None);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["status"], "Classical");
    assert_eq!(v["certificate"]["terms"].as_array().unwrap().len(), 1);
}

#[test]
fn entangled_state_fails_psd_with_witness() {
    let out = regdec(&["check", "psd", "--input", &fixture("entangled_n2.json")], None);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["outcome"], "fail");
    let w = &v["witness"];
    assert_eq!(w["point"].as_array().unwrap().len(), 4);
    assert!(w["value"].as_f64().unwrap() < -1e-3);

    let out = regdec(&["classify", "--input", &fixture("entangled_n2.json")], None);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["witness"]["kind"], "NegativePoint");
}

#[test]
fn spin_up_maps_to_pole_vector() {
    let out = regdec(&["map", "--input", &fixture("rho_n1_up.json")], None);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    assert_eq!(entries[0]["idx"], serde_json::json!([0]));
    assert_abs_diff_eq!(entries[0]["val"].as_f64().unwrap(), 1.0, epsilon = 1e-15);
    assert_eq!(entries[1]["idx"], serde_json::json!([3]));
    assert_abs_diff_eq!(entries[1]["val"].as_f64().unwrap(), 1.0, epsilon = 1e-15);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let mix = regdec(&["gen", "random-classical", "--n", "3", "--terms", "6", "--seed", "11"], None);
    assert_eq!(code(&mix), 0);
    let text = String::from_utf8(mix.stdout.clone()).unwrap();
    let again = regdec(&["gen", "random-classical", "--n", "3", "--terms", "6", "--seed", "11"], None);
    assert_eq!(mix.stdout, again.stdout);

    let a = regdec(&["classify", "--seed", "5"], Some(&text));
    let b = regdec(&["classify", "--seed", "5"], Some(&text));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn generated_fixtures_round_trip_through_map() {
    for n in 1..=4 {
        let n_s = n.to_string();
        let density = regdec(
            &["gen", "random-classical", "--n", &n_s, "--terms", "3", "--seed", "2", "--emit", "density"],
            None,
        );
        assert_eq!(code(&density), 0);
        let tensor = regdec(&["map"], Some(std::str::from_utf8(&density.stdout).unwrap()));
        assert_eq!(code(&tensor), 0);
        let back = regdec(&["map"], Some(std::str::from_utf8(&tensor.stdout).unwrap()));
        assert_eq!(code(&back), 0);

        let (d0, d1) = (json(&density), json(&back));
        assert!(d1.get("regular_symmetric").is_none());
        let (m0, m1) = (d0["matrix"].as_array().unwrap(), d1["matrix"].as_array().unwrap());
        assert_eq!(m0.len(), n + 1);
        for (r0, r1) in m0.iter().zip(m1) {
            for (c0, c1) in r0.as_array().unwrap().iter().zip(r1.as_array().unwrap()) {
                for p in 0..2 {
                    assert_abs_diff_eq!(c0[p].as_f64().unwrap(), c1[p].as_f64().unwrap(), epsilon = 1e-10);
                }
            }
        }

        // mixture -> tensor agrees with mixture -> density -> tensor
        let mix = regdec(&["gen", "random-classical", "--n", &n_s, "--terms", "3", "--seed", "2"], None);
        let direct = regdec(&["map"], Some(std::str::from_utf8(&mix.stdout).unwrap()));
        let (t0, t1) = (json(&tensor), json(&direct));
        for (e0, e1) in t0["entries"].as_array().unwrap().iter().zip(t1["entries"].as_array().unwrap()) {
            assert_eq!(e0["idx"], e1["idx"]);
            assert_abs_diff_eq!(e0["val"].as_f64().unwrap(), e1["val"].as_f64().unwrap(), epsilon = 1e-10);
        }
    }
}

#[test]
fn random_classical_weights_sum_to_one() {
    let out = regdec(&["gen", "random-classical", "--n", "2", "--terms", "10", "--seed", "4"], None);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let total: f64 = v["terms"].as_array().unwrap().iter().map(|t| t["w"].as_f64().unwrap()).sum();
    assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);

    // (N+1)^2 + 1 = 10 is the cap
    let out = regdec(&["gen", "random-classical", "--n", "2", "--terms", "11"], None);
    assert_eq!(code(&out), 64);
    let out = regdec(&["gen", "random-classical", "--n", "2", "--terms", "0"], None);
    assert_eq!(code(&out), 64);
}

#[test]
fn decompose_and_single_checks() {
    let mix = r#"{"N": 3, "terms": [{"w": 0.6, "theta": 0.4, "phi": 0.1}, {"w": 0.4, "theta": 2.0, "phi": -1.2}]}"#;
    let out = regdec(&["decompose"], Some(mix));
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["status"], "found");
    assert_eq!(v["odd_row_check"], true);
    assert!(v["residual"].as_f64().unwrap() <= 1e-6);

    assert_eq!(code(&regdec(&["check", "regsym"], Some(mix))), 0);
    assert_eq!(code(&regdec(&["check", "restricted"], Some(mix))), 0);

    let even = r#"{"N": 2, "terms": [{"w": 1.0, "theta": 0.4, "phi": 0.1}]}"#;
    let out = regdec(&["check", "sos"], Some(even));
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["outcome"], "certified");

    // sos is defined for even order only
    assert_eq!(code(&regdec(&["check", "sos"], Some(mix))), 64);
}

#[test]
fn irregular_tensor_fails_regsym() {
    let t = r#"{"order": 2, "dim": 4, "entries": [{"idx": [0, 0], "val": 1.0}, {"idx": [1, 1], "val": 0.5}]}"#;
    let out = regdec(&["check", "regsym"], Some(t));
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["witness"]["kind"], "NotRegularSymmetric");

    let out = regdec(&["map"], Some(t));
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["regular_symmetric"], false);
}

#[test]
fn overlong_bloch_vector_fails_restricted() {
    let t = r#"{"order": 1, "dim": 4, "entries": [{"idx": [0], "val": 1.0}, {"idx": [3], "val": 1.5}]}"#;
    let out = regdec(&["check", "restricted"], Some(t));
    assert_eq!(code(&out), 1);
    assert_abs_diff_eq!(json(&out)["value"].as_f64().unwrap(), -0.5, epsilon = 1e-8);
    let out = regdec(&["classify"], Some(t));
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["witness"]["kind"], "NegativeRegularPoint");
}

#[test]
fn rotation_moves_the_pole() {
    let up = regdec(&["gen", "coherent", "--n", "2", "--theta", "0", "--phi", "0"], None);
    let text = std::str::from_utf8(&up.stdout).unwrap();
    // a quarter turn about y takes +z to +x
    let by_axis = regdec(&["rotate", "--axis", "0,1,0", "--angle", "1.5707963267948966"], Some(text));
    assert_eq!(code(&by_axis), 0);
    let by_matrix = regdec(&["rotate", "--matrix", "0,0,1,0,1,0,-1,0,0"], Some(text));
    assert_eq!(code(&by_matrix), 0);
    for out in [&by_axis, &by_matrix] {
        let v = json(out);
        let get = |idx: Value| {
            v["entries"]
                .as_array()
                .unwrap()
                .iter()
                .find(|e| e["idx"] == idx)
                .map_or(0.0, |e| e["val"].as_f64().unwrap())
        };
        assert_abs_diff_eq!(get(serde_json::json!([0, 1])), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(get(serde_json::json!([1, 1])), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(get(serde_json::json!([3, 3])), 0.0, epsilon = 1e-12);
    }

    let bad = regdec(&["rotate", "--matrix", "1,1,0,0,1,0,0,0,1"], Some(text));
    assert_eq!(code(&bad), 64);
}

#[test]
fn input_errors_exit_64() {
    assert_eq!(code(&regdec(&["classify"], Some("not json"))), 64);
    assert_eq!(code(&regdec(&["classify"], Some(r#"{"N": 2}"#))), 64);
    assert_eq!(code(&regdec(&["classify", "--input", "/nonexistent/x.json"], None)), 64);
    let bad_psd = r#"{"N": 1, "matrix": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]]}"#;
    assert_eq!(code(&regdec(&["map"], Some(bad_psd))), 64);
    let dup = r#"{"order": 1, "dim": 4, "entries": [{"idx": [0], "val": 1.0}, {"idx": [0], "val": 2.0}]}"#;
    assert_eq!(code(&regdec(&["map"], Some(dup))), 64);
    assert_eq!(code(&regdec(&["classify", "--format", "xml"], Some("{}"))), 64);
}

#[test]
fn output_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("regdec-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("out.json");
    let out = regdec(
        &["map", "--input", &fixture("rho_n1_up.json"), "--output", path.to_str().unwrap()],
        None,
    );
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["order"], 1);
    std::fs::remove_dir_all(&dir).unwrap();
}
