use std::process::Command;

fn vibcav(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_vibcav")).args(args).output().expect("binary runs")
}

#[test]
fn writes_csv_to_stdout() {
    let out = vibcav(&["trajectory", "--family", "linear-finite", "--M", "2", "--theta", "0.785398", "--samples", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().next().unwrap().starts_with("# model:"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 4);
}

#[test]
fn exit_codes() {
    assert_eq!(vibcav(&["coefficients"]).status.code(), Some(0));

    let bad = vibcav(&["verify", "--family", "homographic", "--M", "1", "--v0", "1", "--v1", "1"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(!bad.stderr.is_empty());

    let ok = vibcav(&["verify", "--family", "inversion", "--M", "1", "--theta", "0.5", "--samples", "50"]);
    assert_eq!(ok.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(report["passed"], true);

    let broken = vibcav(&["verify", "--family", "inversion", "--M", "1", "--theta", "0.5", "--samples", "50", "--map-offset", "1e-4"]);
    assert_eq!(broken.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&broken.stdout).unwrap();
    assert_eq!(report["passed"], false);
}
