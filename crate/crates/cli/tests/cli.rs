use std::io::Write;
use std::process::{Command, Output};

fn macjscc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_macjscc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(key).map(|v| v.trim().to_string()))
        .unwrap_or_else(|| panic!("no '{key}' in {text}"))
}

#[test]
fn exponent_report() {
    let out = stdout(&macjscc(&["exponent"]));
    assert_eq!(field(&out, "unit"), "nats");
    let e: f64 = field(&out, "exponent").parse().unwrap();
    assert!((e - 0.1057).abs() < 1e-4, "{e}");
    assert_eq!(field(&out, "lower"), "0.098899");
    assert_eq!(field(&out, "solver"), "nested-bisection");
    let gain = field(&out, "gain");
    assert!(gain.starts_with("6.9"), "{gain}");
}

#[test]
fn tables_csv_layout() {
    let out = stdout(&macjscc(&["tables", "--gamma", "0.815946", "0.712658"]));
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines.iter().all(|l| !l.ends_with('\r')));
    assert_eq!(lines[1], "tau,\"1,1\",\"2,1\",\"1,2\",\"2,2\"");
    assert!(lines.contains(&"{2},0.2597,0.1057,0.2526,0.2087"));
    assert!(lines.contains(&"\"{1,2}\",0.0900,0.1073,0.0900,0.0984"));
    assert!(lines.contains(&"{1},0.1734"));
    assert!(lines.contains(&"\"{1,2}\",0.1073"));
}

#[test]
fn threshold_sweep_stays_below_exponent() {
    let sweep = stdout(&macjscc(&["sweep", "--grid", "64"]));
    let lines: Vec<&str> = sweep.lines().collect();
    assert_eq!(lines.len(), 64 * 64 + 1);
    assert_eq!(lines[0], "gamma1,gamma2,d");
    let max = lines[1..]
        .iter()
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    let e: f64 = field(&stdout(&macjscc(&["exponent"])), "exponent")
        .parse()
        .unwrap();
    assert!(max <= e + 1e-6, "{max} vs {e}");
}

fn rho_column(args: &[&str]) -> Vec<f64> {
    stdout(&macjscc(args))
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn rho_sweeps_are_concave() {
    for (tau, classes, slack) in [("both", ["1", "1"], 1e-10), ("1", ["2", "1"], 1e-10)] {
        let v = rho_column(&[
            "sweep",
            "--rho",
            "--tau",
            tau,
            "--classes",
            classes[0],
            classes[1],
            "--gamma",
            "0.8159",
            "0.7057",
        ]);
        assert_eq!(v.len(), 101);
        for w in v.windows(3) {
            assert!(w[1] >= 0.5 * (w[0] + w[2]) - slack, "{tau}: {w:?}");
            assert!(
                !(w[1] < w[0] - slack && w[1] < w[2] - slack),
                "{tau}: interior dip"
            );
        }
    }
}

#[test]
fn input_errors_exit_with_two() {
    let out = macjscc(&["exponent", "/definitely/missing.model"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/definitely/missing.model"));

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    write!(
        bad,
        "[source.1]\nprobs = 0.5 0.5\n[source.2]\nprobs = 0.5 0.5\n[channel]\ninputs1 = 1\ninputs2 = 1\noutputs = 2\nrow = 0.7 0.2\n"
    )
    .unwrap();
    let out = macjscc(&["validate", bad.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row"));

    let out = macjscc(&["exponent", "--gamma", "1.5", "0.2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_is_reproducible_across_runs_and_thread_counts() {
    let args = ["bounds"];
    let a = stdout(&macjscc(&args));
    assert_eq!(a, stdout(&macjscc(&args)));
    let one = stdout(&macjscc(&["sweep", "--grid", "16", "--jobs", "1"]));
    let two = stdout(&macjscc(&["sweep", "--grid", "16", "--jobs", "2"]));
    assert_eq!(one, two);
}

#[test]
fn fixed_thresholds_and_bits() {
    let out = stdout(&macjscc(&["exponent", "--gamma", "0.5", "0.5", "--bits"]));
    assert_eq!(field(&out, "solver"), "fixed");
    assert_eq!(field(&out, "unit"), "bits");
    let e: f64 = field(&out, "exponent").parse().unwrap();
    let nats: f64 = field(
        &stdout(&macjscc(&["exponent", "--gamma", "0.5", "0.5"])),
        "exponent",
    )
    .parse()
    .unwrap();
    assert!((e - nats / std::f64::consts::LN_2).abs() < 1e-6);
}

#[test]
fn validate_and_file_models() {
    let out = stdout(&macjscc(&["validate"]));
    assert!(out.starts_with("ok"));
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../core/tests/data/paper-example.model"
    );
    let from_file = stdout(&macjscc(&[
        "exponent", "--model", path, "--gamma", "0.8", "0.7",
    ]));
    let builtin = stdout(&macjscc(&["exponent", "--gamma", "0.8", "0.7"]));
    assert_eq!(from_file, builtin);
}
