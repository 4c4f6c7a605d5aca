//! Acceptance criterion 8: any CLI command rerun with an identical config
//! and seed produces byte-identical report files.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

const CONFIG: &str = r#"
[experiment]
group = "so3"
seed = 42
n_trials = 2000

[experiment.model]
kind = "wahba"
directions = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
sigma = 0.1
"#;

fn run(args: &[&str]) {
    let out = Command::new(env!("CARGO_BIN_EXE_liecrb"))
        .args(args)
        .output()
        .expect("binary runs");
    assert_eq!(
        out.status.code(),
        Some(0),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn assert_identical(a: &Path, b: &Path, label: &str) {
    let bytes_a = std::fs::read(a).unwrap();
    let bytes_b = std::fs::read(b).unwrap();
    assert!(!bytes_a.is_empty());
    assert_eq!(bytes_a, bytes_b, "{label}: reruns differ");
}

#[test]
fn criterion_8_byte_identical_reruns() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("experiment.toml");
    std::fs::write(&config, CONFIG).unwrap();
    let config = config.to_str().unwrap();

    let outcome = std::panic::catch_unwind(|| {
        for format in ["json", "csv"] {
            let a = dir.path().join(format!("compare-a.{format}"));
            let b = dir.path().join(format!("compare-b.{format}"));
            for path in [&a, &b] {
                run(&[
                    "compare",
                    "--config",
                    config,
                    "--format",
                    format,
                    "--out",
                    path.to_str().unwrap(),
                ]);
            }
            assert_identical(&a, &b, &format!("compare/{format}"));
        }

        for cmd in ["simulate", "bound"] {
            let a = dir.path().join(format!("{cmd}-a.json"));
            let b = dir.path().join(format!("{cmd}-b.json"));
            for path in [&a, &b] {
                run(&[cmd, "--config", config, "--out", path.to_str().unwrap()]);
            }
            assert_identical(&a, &b, cmd);
        }

        let a = dir.path().join("verify-a.json");
        let b = dir.path().join("verify-b.json");
        for path in [&a, &b] {
            run(&["verify", "--group", "se3", "--out", path.to_str().unwrap()]);
        }
        assert_identical(&a, &b, "verify");
    });
    let status = if outcome.is_ok() { "PASS" } else { "FAIL" };
    println!(
        "ACCEPTANCE 8 CLI reruns are byte-identical: {status} ({:.2?})",
        start.elapsed()
    );
    if let Err(panic) = outcome {
        std::panic::resume_unwind(panic);
    }
}
