//! Command-line front end: JSON in, one JSON certificate out, stable exit
//! codes (0 holds/constructed, 1 refuted/failed, 2 inconclusive, 3 input
//! error). Diagnostics go to stderr only.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex;
use serde_json::{json, Value};

use opclass::error::{Error, Result};
use opclass::hereditary::Verdict;
use opclass::io::{
    BasisDoc, MatrixDoc, SeqDoc, SeriesDoc, SymbolDoc, VectorDoc,
};
use opclass::model::CharFnContext;
use opclass::seq::{InclusionStatus, LimitOutcome};

#[derive(Parser)]
#[command(
    name = "opclass",
    about = "Certificates for operator classes defined by hereditary positivity",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Verification tolerance.
    #[arg(long, global = true, default_value_t = opclass::DEFAULT_TOL, env = "OPCLASS_TOL")]
    tol: f64,

    /// Series truncation length.
    #[arg(long, global = true, default_value_t = opclass::DEFAULT_TRUNCATION, env = "OPCLASS_TRUNCATION")]
    truncation: usize,

    /// Horizon for power iterations and limit probes.
    #[arg(long, global = true, default_value_t = opclass::DEFAULT_HORIZON, env = "OPCLASS_HORIZON")]
    horizon: usize,

    /// Grid resolution for disc and interval scans.
    #[arg(long, global = true, default_value_t = opclass::DEFAULT_GRID, env = "OPCLASS_GRID")]
    grid: usize,

    /// Write the certificate here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Factorize a series positive on [0,1]: find g with g > 0 and fg > 0
    /// coefficientwise.
    Factor {
        /// Series JSON (or rational polynomial JSON).
        #[arg(long)]
        input: PathBuf,
    },
    /// Check admissibility of a symbol (and strong admissibility).
    Admissible {
        #[arg(long)]
        alpha: PathBuf,
        /// Require strong admissibility for exit code 0.
        #[arg(long)]
        strong: bool,
    },
    /// Membership certificate for a matrix in C_alpha.
    Member {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        alpha: PathBuf,
    },
    /// Build the equivalent-norm model and the similarity to a contraction.
    Renorm {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        alpha: PathBuf,
    },
    /// Canonical decomposition into unitary and completely nonunitary parts.
    Decompose {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        alpha: PathBuf,
    },
    /// Characteristic-function diagnostics on a disc mesh.
    Model {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        alpha: PathBuf,
        /// Mesh radius (interior of the disc).
        #[arg(long, default_value_t = 0.95)]
        radius: f64,
    },
    /// Class inclusion C_alpha ⊆ C_tau via the quotient series.
    Include {
        #[arg(long)]
        alpha: PathBuf,
        #[arg(long)]
        tau: PathBuf,
        /// Emit the counterexample shift on refutation (exact data only).
        #[arg(long)]
        counterexample: bool,
    },
    /// Limit-existence probe for |T^n h|^2.
    Limits {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        alpha: PathBuf,
        /// Probe vector JSON; defaults to the first basis vector.
        #[arg(long)]
        vector: Option<PathBuf>,
        /// Also write the per-step trace as CSV to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Print the versioned JSON schemas of all documents.
    Schema,
}

fn read_text(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn read_symbol(path: &PathBuf) -> Result<SymbolDoc> {
    SymbolDoc::parse(&read_text(path)?)
}

fn read_matrix(path: &PathBuf) -> Result<opclass::matrix::OperatorMatrix> {
    let doc: MatrixDoc = serde_json::from_str(&read_text(path)?)?;
    doc.to_operator()
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Member => 0,
        Verdict::Refuted => 1,
        Verdict::Inconclusive => 2,
    }
}

fn run(cli: &Cli) -> Result<(Value, u8)> {
    if !(cli.tol > 0.0) {
        return Err(Error::Input("tol must be positive".into()));
    }
    if cli.truncation < 8 {
        return Err(Error::Input("truncation must be at least 8".into()));
    }
    match &cli.cmd {
        Cmd::Factor { input } => {
            let f = read_symbol(input)?.to_f64_series()?;
            let cert = opclass::factorization::wiener_factorize(&f, cli.tol, cli.truncation)?;
            let doc = json!({
                "verdict_g": cert.verdict_g,
                "verdict_fg": cert.verdict_fg,
                "epsilon": cert.epsilon,
                "n_split": cert.n_split,
                "failed_stage": cert.failed_stage,
                "cofactor": SeriesDoc::from_series(&cert.cofactor),
            });
            let code = if cert.passed() { 0 } else { 2 };
            Ok((doc, code))
        }
        Cmd::Admissible { alpha, strong } => {
            let a = read_symbol(alpha)?.to_f64_series()?;
            let report = opclass::hereditary::check_admissible(&a, cli.tol);
            let doc = json!({
                "admissible": report.admissible,
                "strongly_admissible": report.strongly_admissible,
                "min_on_unit_interval": report.min_on_unit_interval,
                "circle_root_margin": report.circle_root_margin,
                "alpha_tilde": SeriesDoc::from_series(&report.alpha_tilde),
            });
            let ok = if *strong {
                report.strongly_admissible
            } else {
                report.admissible
            };
            Ok((doc, if ok { 0 } else { 1 }))
        }
        Cmd::Member { matrix, alpha } => {
            let t = read_matrix(matrix)?;
            let a = read_symbol(alpha)?.to_f64_series()?;
            let cert = opclass::hereditary::class_membership(&t, &a, cli.tol)?;
            let code = verdict_code(cert.verdict);
            Ok((serde_json::to_value(&cert)?, code))
        }
        Cmd::Renorm { matrix, alpha } => {
            let t = read_matrix(matrix)?;
            let a = read_symbol(alpha)?.to_f64_series()?;
            let model = opclass::renorm::build_renorm(&t, &a, cli.tol)?;
            let norm = opclass::renorm::verify_similarity(&model, &t, cli.tol)?;
            let doc = json!({
                "gram": MatrixDoc::from_cmat(model.gram.matrix()),
                "w": MatrixDoc::from_cmat(model.w.matrix()),
                "d": MatrixDoc::from_cmat(model.d.matrix()),
                "contraction_norm": norm,
                "gram_floor": model.gram_floor,
                "defect_residual": model.defect_residual,
                "f": SeriesDoc::from_series(&model.f),
                "beta_tilde": SeriesDoc::from_series(&model.beta_tilde),
            });
            let code = if norm <= 1.0 + cli.tol { 0 } else { 1 };
            Ok((doc, code))
        }
        Cmd::Decompose { matrix, alpha } => {
            let t = read_matrix(matrix)?;
            let a = read_symbol(alpha)?.to_f64_series()?;
            let model = opclass::renorm::build_renorm(&t, &a, cli.tol)?;
            let dec = opclass::renorm::canonical_decomposition(&model, &t, cli.tol)?;
            let doc = json!({
                "h0_basis": BasisDoc::from_cmat(&dec.h0_basis),
                "h1_basis": BasisDoc::from_cmat(&dec.h1_basis),
                "unitary_residual": dec.unitary_residual,
                "invariance_residual": dec.invariance_residual,
            });
            Ok((doc, 0))
        }
        Cmd::Model {
            matrix,
            alpha,
            radius,
        } => {
            let t = read_matrix(matrix)?;
            let a = read_symbol(alpha)?.to_f64_series()?;
            let model = opclass::renorm::build_renorm(&t, &a, cli.tol)?;
            let ctx = CharFnContext::new(&model, &t, cli.tol)?;
            let (din, dout) = ctx.defect_dims();
            let grid = cli.grid.max(4);
            let mut samples = Vec::new();
            let mut max_theta: f64 = 0.0;
            let mut max_det: Option<f64> = None;
            for i in 0..grid {
                let r = radius * (i + 1) as f64 / grid as f64;
                for k in 0..grid {
                    let angle = std::f64::consts::TAU * k as f64 / grid as f64;
                    let z = Complex::from_polar(r, angle);
                    let s = opclass::model::char_fn_eval_with(&ctx, z)?;
                    max_theta = max_theta.max(s.theta_norm);
                    if let Some(d) = s.det_abs {
                        max_det = Some(max_det.unwrap_or(0.0).max(d));
                    }
                    samples.push(json!({
                        "z_re": s.z_re, "z_im": s.z_im,
                        "theta_norm": s.theta_norm, "det_abs": s.det_abs,
                    }));
                }
            }
            let h = opclass::matrix::CVec::from_element(
                t.dim(),
                Complex::new(1.0 / (t.dim() as f64).sqrt(), 0.0),
            );
            let zs: Vec<Complex<f64>> = (0..8)
                .map(|k| Complex::from_polar(0.5, 0.7 * k as f64))
                .collect();
            let intertwining =
                opclass::model::intertwining_residual(&model, &t, &h, &zs)?;
            let doc = json!({
                "defect_dims": [dout, din],
                "samples": samples,
                "max_theta_norm": max_theta,
                "max_det_abs": max_det,
                "intertwining_residual": intertwining,
            });
            let ok = max_theta <= 1.0 + 10.0 * cli.tol
                && max_det.map_or(true, |d| d <= 1.0 + 10.0 * cli.tol)
                && intertwining <= cli.tol.max(1e-9) * 10.0;
            Ok((doc, if ok { 0 } else { 1 }))
        }
        Cmd::Include {
            alpha,
            tau,
            counterexample,
        } => {
            let a_doc = read_symbol(alpha)?;
            let t_doc = read_symbol(tau)?;
            if a_doc.is_exact() && t_doc.is_exact() {
                let a = a_doc.to_rat_series()?;
                let t = t_doc.to_rat_series()?;
                let v = opclass::seq::inclusion_check(&a, &t, cli.truncation, 0.0)?;
                let ce = if *counterexample {
                    v.counterexample
                        .as_ref()
                        .map(|s| SeqDoc::from_rat_seq(s.lambda()))
                } else {
                    None
                };
                let doc = json!({
                    "status": v.status,
                    "gamma_prefix": opclass::io::gamma_prefix_json(&v.gamma_prefix),
                    "first_negative_index": v.first_negative_index,
                    "bounded_hint": v.bounded_hint,
                    "counterexample": ce,
                });
                let code = match v.status {
                    InclusionStatus::Included => 0,
                    InclusionStatus::Refuted => 1,
                    InclusionStatus::Inconclusive => 2,
                };
                Ok((doc, code))
            } else {
                if *counterexample {
                    return Err(Error::Unsupported(
                        "counterexample emission needs exact rational symbols".into(),
                    ));
                }
                let a = a_doc.to_f64_series()?;
                let t = t_doc.to_f64_series()?;
                let v = opclass::seq::inclusion_check(&a, &t, cli.truncation, cli.tol)?;
                let doc = json!({
                    "status": v.status,
                    "gamma_prefix": v.gamma_prefix,
                    "first_negative_index": v.first_negative_index,
                    "bounded_hint": v.bounded_hint,
                    "counterexample": Value::Null,
                });
                let code = match v.status {
                    InclusionStatus::Included => 0,
                    InclusionStatus::Refuted => 1,
                    InclusionStatus::Inconclusive => 2,
                };
                Ok((doc, code))
            }
        }
        Cmd::Limits {
            matrix,
            alpha,
            vector,
            csv,
        } => {
            let t = read_matrix(matrix)?;
            let a = read_symbol(alpha)?.to_f64_series()?;
            let h = match vector {
                Some(p) => {
                    let doc: VectorDoc = serde_json::from_str(&read_text(p)?)?;
                    let v = doc.to_cvec()?;
                    if v.len() != t.dim() {
                        return Err(Error::Input("vector dimension mismatch".into()));
                    }
                    v
                }
                None => {
                    let mut v = opclass::matrix::CVec::zeros(t.dim());
                    v[0] = Complex::new(1.0, 0.0);
                    v
                }
            };
            let report = opclass::seq::limit_exists_probe_matrix(
                &t, &a, &h, cli.horizon, cli.tol,
            )?;
            if let Some(path) = csv {
                let mut out = String::from("n,norm_sq\n");
                let mut v = h.clone();
                for n in 0..cli.horizon.min(4096) {
                    out.push_str(&format!("{n},{}\n", v.norm_squared()));
                    v = t.matrix() * v;
                }
                fs::write(path, out)?;
            }
            let code = match report.outcome {
                LimitOutcome::Exists { .. } => 0,
                LimitOutcome::Oscillates { .. } => 1,
                LimitOutcome::Inconclusive => 2,
            };
            Ok((serde_json::to_value(&report)?, code))
        }
        Cmd::Schema => Ok((opclass::io::schema_dump(), 0)),
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Input(_)
        | Error::Json(_)
        | Error::Io(_)
        | Error::Precondition(_)
        | Error::WeightMismatch
        | Error::Unsupported(_) => 3,
        Error::Inconclusive(_) => 2,
        Error::NotInvertible(_)
        | Error::Summability(_)
        | Error::Numerical(_)
        | Error::Verification(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((doc, code)) => {
            let text = serde_json::to_string_pretty(&doc).expect("serializable document");
            match &cli.output {
                Some(path) => {
                    if let Err(e) = fs::write(path, text + "\n") {
                        eprintln!("error: cannot write output: {e}");
                        return ExitCode::from(3);
                    }
                }
                None => println!("{text}"),
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
