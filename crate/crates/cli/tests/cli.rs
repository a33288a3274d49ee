use std::process::{Command, Output};

use serde_json::Value;

fn koblab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_koblab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn ball_distance_example() {
    let out = koblab(&["dist", "--domain", r#"{"kind":"ball","n":2}"#, "--from", "O", "--to", "(0.5,0)"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["schema"], "koblab/1");
    let k = v["k"].as_f64().unwrap();
    assert!((k - 0.5 * 3f64.ln()).abs() < 1e-11, "{k}");
}

#[test]
fn wolff_example() {
    let out = koblab(&["wolff", "--domain", "disk", "--map", "mobius(1/2)"]);
    assert!(out.status.success());
    let v = json_of(&out);
    let w: Vec<f64> = v["wolff"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((w[0] - 1.0).abs() < 1e-6 && w[1].abs() < 1e-6, "{w:?}");
    assert!(v["residual"].as_f64().unwrap() < 1e-6);
}

#[test]
fn carleson_example() {
    let out = koblab(&[
        "carleson", "--domain", "disk", "--measure", "beta:1", "--theta", "1.5", "--r", "0.5",
    ]);
    assert!(out.status.success());
    assert_eq!(json_of(&out)["verdict"], "carleson");
}

#[test]
fn lempert_on_convex_ball() {
    let d = r#"{"kind":"convex","constraints":[{"type":"ellipsoid","coeffs":[1,1],"exponents":[1,1]}]}"#;
    let out = koblab(&["lempert", "--domain", d, "--from", "O", "--to", "(0.5,0)", "--degree", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    let (lo, up) = (v["lower"].as_f64().unwrap(), v["upper"].as_f64().unwrap());
    assert!(lo <= 0.5 * 3f64.ln() && (up - 0.5 * 3f64.ln()).abs() < 1e-4);
}

#[test]
fn limits_worked_example() {
    let v = json_of(&koblab(&["limits", "--theta", "1/2,1/3"]));
    assert_eq!((v["q"].as_u64(), v["r"].as_u64()), (Some(6), Some(0)));
}

#[test]
fn exit_codes_and_error_category() {
    let parse = koblab(&["dist", "--domain", "nope", "--from", "0", "--to", "0"]);
    assert_eq!(parse.status.code(), Some(2));
    assert_eq!(json_of(&parse)["error"]["category"], "parse");

    let domain = koblab(&["dist", "--domain", "disk", "--from", "1.5", "--to", "0"]);
    assert_eq!(domain.status.code(), Some(3));
    assert_eq!(json_of(&domain)["error"]["category"], "domain");

    let unknown = koblab(&["frobnicate"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn csv_output_to_file() {
    let path = std::env::temp_dir().join(format!("koblab-cli-{}.csv", std::process::id()));
    let p = path.to_str().unwrap();
    let out = koblab(&[
        "iterate", "--domain", "disk", "--map", "mobius(1/2)", "--from", "0", "--steps", "3",
        "--format", "csv", "--out", p,
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,z1_re,z1_im,kob_step,kob_from_start,boundary_gap");
    assert_eq!(lines.len(), 5);
    assert!(lines[2].starts_with("1,0.5,0.0,"));
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = ["berezin", "--domain", "disk", "--measure", "beta:1", "--from", "0.5"];
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_koblab"))
            .args(args)
            .env("KOBLAB_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    let a = run("1");
    assert_eq!(a, run("1"));
    assert_eq!(a, run("3"));
}

#[test]
fn numbers_have_twelve_significant_digits() {
    let v = json_of(&koblab(&["dist", "--domain", "disk", "--from", "0", "--to", "1/3"]));
    let text = v["k"].to_string();
    let digits = text.chars().filter(|c| c.is_ascii_digit()).count();
    assert!(digits <= 13, "{text}");
}
