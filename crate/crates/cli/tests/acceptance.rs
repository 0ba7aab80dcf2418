//! Criterion 8: the fixture corpus runs end to end through every subcommand
//! with the documented exit codes, byte-identical reports across repeated
//! runs, no panics on malformed input, and a total wall time under 60 s.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use torsionlab::exterior::{KForm, Space};
use torsionlab::formats::{FormFile, TorsionFile};
use torsionlab::torsion::TorsionTensor;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_torsionlab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn torsionlab")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process terminated by signal")
}

fn check_run(failures: &mut Vec<String>, args: &[&str], expect: i32) -> Output {
    let out = run(args);
    let got = code(&out);
    if got != expect {
        failures.push(format!(
            "`torsionlab {}` exited {got}, expected {expect} (stderr: {})",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    let stderr = String::from_utf8_lossy(&out.stderr);
    if stderr.contains("panicked") {
        failures.push(format!("`torsionlab {}` panicked: {stderr}", args.join(" ")));
    }
    out
}

fn check_deterministic(failures: &mut Vec<String>, args: &[&str]) {
    let a = run(args);
    let b = run(args);
    if a.stdout != b.stdout {
        failures.push(format!(
            "`torsionlab {}` is not byte-deterministic across runs",
            args.join(" ")
        ));
    }
}

fn path_str(dir: &Path, name: &str) -> (PathBuf, String) {
    let p = dir.join(name);
    let s = p.to_string_lossy().into_owned();
    (p, s)
}

#[test]
fn criterion_8_end_to_end_cli() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let dir = tempfile::tempdir().expect("tempdir");

    // fixture emission and re-ingestion: canonical su(2) 3-form
    let (tau_path, tau) = path_str(dir.path(), "tau_su2.json");
    check_run(&mut failures, &["example", "canonical", "su2", "--out", &tau], 0);
    let file: FormFile =
        serde_json::from_str(&std::fs::read_to_string(&tau_path).expect("fixture written"))
            .expect("fixture parses");
    let expected =
        torsionlab::MetricLieAlgebra::su2().canonical_three_form().unwrap();
    let round_trip_ok = file.to_kform().map(|f| {
        f.coeffs().count() == expected.coeffs().count()
            && f.coeffs().zip(expected.coeffs()).all(|((ia, va), (ib, vb))| {
                ia == ib && va.to_bits() == vb.to_bits()
            })
    });
    if !matches!(round_trip_ok, Ok(true)) {
        failures.push("emitted canonical su2 fixture does not re-ingest bit-for-bit".into());
    }

    // check-jacobi and classify on the valid fixture
    let out = check_run(&mut failures, &["check-jacobi", &tau], 0);
    if !String::from_utf8_lossy(&out.stdout).contains("\"verdict\": \"pass\"") {
        failures.push("check-jacobi on canonical su2 did not report verdict pass".into());
    }
    check_deterministic(&mut failures, &["check-jacobi", &tau]);
    let out = check_run(&mut failures, &["classify", &tau], 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    if !(stdout.contains("\"kernel_dim\": 0") && stdout.contains("\"A1\"")) {
        failures.push(format!("classify su2 report missing expected fields: {stdout}"));
    }
    check_deterministic(&mut failures, &["classify", &tau]);
    check_deterministic(&mut failures, &["classify", &tau, "--format", "text"]);

    // volume fixture classifies as a single dim-3 brick
    let (_, vol) = path_str(dir.path(), "vol_su2.json");
    check_run(&mut failures, &["example", "volume", "su2", "--out", &vol], 0);
    check_run(&mut failures, &["classify", &vol], 0);

    // zero 3-form → kernel-only report, exit 0
    let (zero_path, zero) = path_str(dir.path(), "zero.json");
    let zform = FormFile::from_kform(&KForm::zero(Space::new(5).unwrap(), 3));
    std::fs::write(&zero_path, serde_json::to_string_pretty(&zform).unwrap()).unwrap();
    let out = check_run(&mut failures, &["classify", &zero], 0);
    if !String::from_utf8_lossy(&out.stdout).contains("\"kernel_dim\": 5") {
        failures.push("classify of the zero 3-form is not a kernel-only report".into());
    }

    // generic random 3-form (seeded): classification refused, exit 1
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let space5 = Space::new(5).unwrap();
    let mut random = KForm::zero(space5, 3);
    for i in 0..5 {
        for j in (i + 1)..5 {
            for k in (j + 1)..5 {
                random.add_term(vec![i, j, k], rng.gen_range(-1.0..1.0)).unwrap();
            }
        }
    }
    let (rand_path, rand) = path_str(dir.path(), "random.json");
    std::fs::write(
        &rand_path,
        serde_json::to_string_pretty(&FormFile::from_kform(&random)).unwrap(),
    )
    .unwrap();
    let out = check_run(&mut failures, &["check-jacobi", &rand], 1);
    if !String::from_utf8_lossy(&out.stdout).contains("derivation_defect") {
        failures.push("failing check-jacobi report does not print the defect".into());
    }
    check_run(&mut failures, &["classify", &rand], 1);
    check_deterministic(&mut failures, &["classify", &rand]);

    // decompose: ξ = e1 plus τ = e1∧e2∧e3 in n = 4 → type T1⊕T3, pass
    let space4 = Space::new(4).unwrap();
    let xi = KForm::one_form(space4, &space4.basis_vector(0)).unwrap();
    let mut skew = KForm::zero(space4, 3);
    skew.add_term(vec![0, 1, 2], 1.0).unwrap();
    let t = TorsionTensor::embed_vectorial(&xi)
        .unwrap()
        .add(&TorsionTensor::embed_skew(&skew).unwrap())
        .unwrap();
    let (tor_path, tor) = path_str(dir.path(), "torsion.json");
    std::fs::write(
        &tor_path,
        serde_json::to_string_pretty(&TorsionFile::from_torsion(&t)).unwrap(),
    )
    .unwrap();
    let out = check_run(&mut failures, &["decompose", &tor], 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    if !(stdout.contains("T1") && stdout.contains("T3") && stdout.contains("twistor-free")) {
        failures.push(format!("decompose type label missing T1⊕T3: {stdout}"));
    }
    check_deterministic(&mut failures, &["decompose", &tor]);

    // zero tensor → type "zero", exit 0
    let (ztor_path, ztor) = path_str(dir.path(), "zero_torsion.json");
    std::fs::write(
        &ztor_path,
        serde_json::to_string_pretty(&TorsionFile::from_torsion(&TorsionTensor::zero(space4)))
            .unwrap(),
    )
    .unwrap();
    let out = check_run(&mut failures, &["decompose", &ztor], 0);
    if !String::from_utf8_lossy(&out.stdout).contains("\"type\": \"zero\"") {
        failures.push("decompose of the zero tensor did not report type zero".into());
    }

    // symmetric-pair fixtures feed verify-warped
    for kind in ["type2", "type4"] {
        let (_, alg) = path_str(dir.path(), &format!("{kind}_su2.json"));
        check_run(&mut failures, &["example", kind, "su2", "--out", &alg], 0);
        if kind == "type2" {
            // 𝔤 = su(2) ⊕ su(2) is of compact type, so the warped check runs
            let out = check_run(&mut failures, &["verify-warped", &alg], 0);
            if !String::from_utf8_lossy(&out.stdout).contains("\"verdict\": \"pass\"") {
                failures.push("verify-warped on the type-II model did not pass".into());
            }
            check_deterministic(&mut failures, &["verify-warped", &alg]);
            check_run(
                &mut failures,
                &["verify-warped", &alg, "--scale", "2.5", "--t-samples", "7"],
                0,
            );
        }
    }

    // schema violations and usage errors → exit 2, never a panic
    let (bad_path, bad) = path_str(dir.path(), "bad.json");
    std::fs::write(&bad_path, "{not json").unwrap();
    for cmd in ["decompose", "check-jacobi", "classify", "verify-warped"] {
        check_run(&mut failures, &[cmd, &bad], 2);
    }
    let (oob_path, oob) = path_str(dir.path(), "oob.json");
    std::fs::write(
        &oob_path,
        r#"{"dim": 3, "degree": 3, "coeffs": [[1, 2, 9, 1.0]]}"#,
    )
    .unwrap();
    check_run(&mut failures, &["classify", &oob], 2);
    let (dup_path, dup) = path_str(dir.path(), "dup.json");
    std::fs::write(
        &dup_path,
        r#"{"dim": 3, "c": [[1, 2, 3, 1.0], [1, 2, 3, 2.0]]}"#,
    )
    .unwrap();
    check_run(&mut failures, &["verify-warped", &dup], 2);
    check_run(&mut failures, &["example", "canonical", "sl2"], 2);
    check_run(&mut failures, &["classify", &dir.path().join("missing.json").to_string_lossy()], 2);

    let elapsed = start.elapsed().as_secs_f64();
    if elapsed >= 60.0 {
        failures.push(format!("corpus wall time {elapsed:.1}s exceeds 60s"));
    }

    if failures.is_empty() {
        println!("criterion 8 (end-to-end CLI): PASS");
    } else {
        let detail = failures.join("; ");
        println!("criterion 8 (end-to-end CLI): FAIL — {detail}");
        panic!("criterion 8 (end-to-end CLI) failed: {detail}");
    }
}
