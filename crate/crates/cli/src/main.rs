//! Command-line surface: decompose torsion tensors, check the τ-Jacobi
//! condition, classify bricks, emit example fixtures, and verify the
//! warped-product identities. Exit codes: 0 = all checks pass, 1 = a
//! mathematical check failed, 2 = input/usage error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use sha2::{Digest, Sha256};

use torsionlab::formats::{AlgebraFile, FormFile, Report, TorsionFile, Verdict};
use torsionlab::lie::CompactType;
use torsionlab::tau::CaseTag;
use torsionlab::{MetricLieAlgebra, TauStructure, WarpedModel};

#[derive(Parser)]
#[command(name = "torsionlab", version, about = "Torsion-type and τ-Jacobi toolkit")]
struct Cli {
    /// Seed for randomized internals (echoed in reports)
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report to a file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a torsion tensor into its O(n) components
    Decompose {
        torsion: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Report the τ-Jacobi defect of a 3-form
    CheckJacobi {
        tau: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Split a 3-form into its kernel and simple bricks
    Classify {
        tau: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Emit example fixtures (forms, algebras, symmetric-pair models)
    Example {
        #[arg(value_parser = ["type2", "type4", "canonical", "volume"])]
        kind: String,
        /// Generator: su2, su3, so4 or soN:<k>
        algebra: String,
    },
    /// Verify the warped-product identities for a base algebra
    VerifyWarped {
        algebra: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, default_value_t = 50)]
        t_samples: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

enum CliError {
    /// Schema or usage problem → exit 2
    Input(String),
    /// Internal/math construction failure → exit 1
    Math(String),
}

impl From<torsionlab::CoreError> for CliError {
    fn from(e: torsionlab::CoreError) -> Self {
        CliError::Math(e.to_string())
    }
}

struct Output {
    report: Report,
    /// Raw fixture body; when present, `--out` writes this instead of the
    /// report so the file re-ingests through the other subcommands.
    fixture: Option<String>,
}

impl From<Report> for Output {
    fn from(report: Report) -> Self {
        Output {
            report,
            fixture: None,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let report = out.report;
            let verdict = report.verdict;
            if let (Some(path), Some(body)) = (&cli.out, &out.fixture) {
                if let Err(e) = std::fs::write(path, body) {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            } else if let Err(e) = emit(&cli, &report) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            match verdict {
                Verdict::Pass => ExitCode::SUCCESS,
                Verdict::Fail | Verdict::Diagnostic => ExitCode::from(1),
            }
        }
        Err(CliError::Input(msg)) => {
            eprintln!("input error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Math(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn emit(cli: &Cli, report: &Report) -> Result<(), String> {
    let body = match cli.format {
        Format::Json => report.to_json(),
        Format::Text => render_text(report),
    };
    match &cli.out {
        Some(path) => std::fs::write(path, body).map_err(|e| e.to_string()),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn render_text(r: &Report) -> String {
    let mut s = String::new();
    s.push_str(&format!("command: {}\n", r.command));
    for (k, v) in &r.inputs {
        s.push_str(&format!("input {k}: {v}\n"));
    }
    s.push_str(&format!("seed: {}\n", r.seed));
    for (k, v) in &r.tolerances {
        s.push_str(&format!("tolerance {k}: {v:e}\n"));
    }
    s.push_str(&format!(
        "results: {}\n",
        serde_json::to_string(&r.results).unwrap_or_default()
    ));
    for (k, v) in &r.residuals {
        s.push_str(&format!("residual {k}: {v:e}\n"));
    }
    let verdict = match r.verdict {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Diagnostic => "diagnostic",
    };
    s.push_str(&format!("verdict: {verdict}\n"));
    s
}

fn read_input(path: &Path) -> Result<(String, BTreeMap<String, String>), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let hash = hex::encode(Sha256::digest(text.as_bytes()));
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let mut inputs = BTreeMap::new();
    inputs.insert(name, hash);
    Ok((text, inputs))
}

fn parse<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("{what}: {e}")))
}

fn schema_err(e: torsionlab::CoreError) -> CliError {
    CliError::Input(e.to_string())
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Decompose { torsion, tol } => decompose(cli, torsion, *tol).map(Into::into),
        Command::CheckJacobi { tau, tol } => check_jacobi(cli, tau, *tol).map(Into::into),
        Command::Classify { tau, tol } => classify(cli, tau, *tol).map(Into::into),
        Command::Example { kind, algebra } => example(cli, kind, algebra),
        Command::VerifyWarped {
            algebra,
            scale,
            t_samples,
            tol,
        } => verify_warped(cli, algebra, *scale, *t_samples, *tol).map(Into::into),
    }
}

fn decompose(cli: &Cli, path: &Path, tol: f64) -> Result<Report, CliError> {
    let (text, inputs) = read_input(path)?;
    let file: TorsionFile = parse(&text, "torsion file")?;
    let t = file.to_torsion().map_err(schema_err)?;
    let dec = t.decompose()?;
    let (n1, n2, n3) = dec.component_norms()?;
    let label = t.classify_type(Some(tol))?;
    let t2 = TorsionFile::from_torsion(&dec.twistorial);
    let results = json!({
        "type": label.to_string(),
        "component_norms": {"vectorial": n1, "twistorial": n2, "skew": n3},
        "vectorial_form": FormFile::from_kform(&dec.vectorial),
        "twistorial": t2,
        "skew_form": FormFile::from_kform(&dec.skew),
    });
    let mut residuals = BTreeMap::new();
    residuals.insert("reconstruction".to_string(), dec.residual_norm);
    let verdict = if dec.residual_norm <= tol * t.norm().max(1.0) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(Report {
        command: "decompose".into(),
        inputs,
        seed: cli.seed,
        tolerances: [("tol".to_string(), tol)].into(),
        results,
        residuals,
        verdict,
    })
}

fn load_tau(path: &Path) -> Result<(TauStructure, BTreeMap<String, String>), CliError> {
    let (text, inputs) = read_input(path)?;
    let file: FormFile = parse(&text, "form file")?;
    if file.degree != 3 {
        return Err(CliError::Input(format!(
            "expected a 3-form, got degree {}",
            file.degree
        )));
    }
    let form = file.to_kform().map_err(schema_err)?;
    Ok((TauStructure::new(form)?, inputs))
}

fn check_jacobi(cli: &Cli, path: &Path, tol: f64) -> Result<Report, CliError> {
    let (s, inputs) = load_tau(path)?;
    let norm2 = s.tau().norm().powi(2).max(f64::MIN_POSITIVE);
    let derivation = s.tau_jacobi_defect()? / norm2;
    let commutator = s.commutator_defect()? / norm2;
    let four_form = s.four_form_defect()? / norm2;
    let verdict = if derivation <= tol {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(Report {
        command: "check-jacobi".into(),
        inputs,
        seed: cli.seed,
        tolerances: [("defect".to_string(), tol)].into(),
        results: json!({"tau_norm": s.tau().norm()}),
        residuals: [
            ("derivation_defect".to_string(), derivation),
            ("commutator_defect".to_string(), commutator),
            ("four_form_defect".to_string(), four_form),
        ]
        .into(),
        verdict,
    })
}

fn classify(cli: &Cli, path: &Path, tol: f64) -> Result<Report, CliError> {
    let (s, inputs) = load_tau(path)?;
    let tolerances: BTreeMap<String, f64> = [("defect".to_string(), tol)].into();
    match s.classify_bricks(cli.seed, tol) {
        Ok(report) => {
            let bricks: Vec<serde_json::Value> = report
                .bricks
                .iter()
                .map(|b| {
                    json!({
                        "dim": b.dim,
                        "rank": b.rank,
                        "candidates": b.label.candidates,
                        "scale": b.scale,
                        "canonical_scale": b.canonical_scale,
                        "case": match b.case_tag {
                            CaseTag::Dim3Volume => "dim3-volume",
                            CaseTag::SimpleAlgebra => "simple-algebra",
                        },
                    })
                })
                .collect();
            Ok(Report {
                command: "classify".into(),
                inputs,
                seed: cli.seed,
                tolerances,
                results: json!({"kernel_dim": report.kernel_dim, "bricks": bricks}),
                residuals: [
                    ("tau_jacobi".to_string(), report.defects.tau_jacobi),
                    ("four_form".to_string(), report.defects.four_form),
                    ("cross_terms".to_string(), report.defects.cross_terms),
                ]
                .into(),
                verdict: Verdict::Pass,
            })
        }
        Err(torsionlab::CoreError::NotALieStructure(defect)) => Ok(Report {
            command: "classify".into(),
            inputs,
            seed: cli.seed,
            tolerances,
            results: json!({"refused": "τ-Jacobi defect above tolerance"}),
            residuals: [("tau_jacobi".to_string(), defect)].into(),
            verdict: Verdict::Fail,
        }),
        Err(e) => Err(e.into()),
    }
}

fn parse_algebra(name: &str) -> Result<MetricLieAlgebra, CliError> {
    match name {
        "su2" => Ok(MetricLieAlgebra::su2()),
        "su3" => Ok(MetricLieAlgebra::su3()),
        "so4" => MetricLieAlgebra::so(4).map_err(|e| CliError::Input(e.to_string())),
        _ => {
            if let Some(k) = name.strip_prefix("soN:") {
                let k: usize = k
                    .parse()
                    .map_err(|_| CliError::Input(format!("bad so(k) size in '{name}'")))?;
                MetricLieAlgebra::so(k).map_err(|e| CliError::Input(e.to_string()))
            } else {
                Err(CliError::Input(format!(
                    "unknown generator '{name}' (expected su2, su3, so4 or soN:<k>)"
                )))
            }
        }
    }
}

fn example(cli: &Cli, kind: &str, algebra: &str) -> Result<Output, CliError> {
    let h = parse_algebra(algebra)?;
    let (results, fixture) = match kind {
        "canonical" => {
            let omega = h.canonical_three_form()?;
            let file = FormFile::from_kform(&omega);
            (json!({"form": file}), pretty(&file))
        }
        "volume" => {
            let vol = torsionlab::KForm::volume(h.space());
            let file = FormFile::from_kform(&vol);
            (json!({"form": file}), pretty(&file))
        }
        "type2" | "type4" => {
            let model = if kind == "type2" {
                torsionlab::sympair::build_type_ii(&h)?
            } else {
                torsionlab::sympair::build_type_iv(&h)?
            };
            let tau = model.example_tau()?;
            let file = AlgebraFile::from_algebra(&model.g, Some(format!("{kind}-{algebra}")));
            (
                json!({
                    "algebra": file,
                    "epsilon": model.epsilon,
                    "tau": FormFile::from_kform(&tau),
                }),
                pretty(&file),
            )
        }
        _ => unreachable!("clap restricts kind values"),
    };
    let fixture = Some(fixture);
    Ok(Output {
        report: Report {
            command: format!("example {kind} {algebra}"),
            inputs: BTreeMap::new(),
            seed: cli.seed,
            tolerances: BTreeMap::new(),
            results,
            residuals: BTreeMap::new(),
            verdict: Verdict::Pass,
        },
        fixture,
    })
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("fixture serialization");
    s.push('\n');
    s
}

fn verify_warped(
    cli: &Cli,
    path: &Path,
    scale: f64,
    t_samples: usize,
    tol: f64,
) -> Result<Report, CliError> {
    let (text, inputs) = read_input(path)?;
    let file: AlgebraFile = parse(&text, "algebra file")?;
    let base = file.to_algebra().map_err(schema_err)?;
    if !matches!(
        base.is_compact_type(),
        CompactType::CompactSemisimple | CompactType::CompactWithCenter
    ) {
        return Err(CliError::Math(format!(
            "base algebra is {}",
            base.is_compact_type()
        )));
    }
    let samples: Vec<f64> = (0..t_samples.max(1))
        .map(|i| -2.0 + 4.0 * i as f64 / (t_samples.max(2) - 1) as f64)
        .collect();
    let model = WarpedModel::new(base, scale, Some(samples))?;
    let parallel = model.check_connection_parallel()?;
    let elem = model.check_elemprop()?;
    let formxi = model.formxi_defect()?;
    let conformal = model.conformal_defect()?;
    let (_, base_res) = model.base_connection()?;
    let residuals: BTreeMap<String, f64> = [
        ("nabla_xi".to_string(), parallel.nabla_xi),
        ("nabla_nu".to_string(), parallel.nabla_nu),
        ("nu_xi".to_string(), elem.nu_xi),
        ("d_xi".to_string(), elem.d_xi),
        ("four_form".to_string(), elem.four_form),
        ("d_nu_minus_3xi_nu".to_string(), elem.d_nu_minus_3xi_nu),
        ("lie_xi_nu_minus_3nu".to_string(), elem.lie_xi_nu_minus_3nu),
        ("formxi".to_string(), formxi),
        ("base_parallel_tau".to_string(), base_res),
        ("conformal".to_string(), conformal),
    ]
    .into();
    let conformal_tol = 1e-10;
    let pass = residuals
        .iter()
        .all(|(k, &v)| v <= if k == "conformal" { conformal_tol } else { tol });
    Ok(Report {
        command: "verify-warped".into(),
        inputs,
        seed: cli.seed,
        tolerances: [
            ("residual".to_string(), tol),
            ("conformal".to_string(), conformal_tol),
        ]
        .into(),
        results: json!({"tau_scale": scale, "t_samples": t_samples}),
        residuals,
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
    })
}
