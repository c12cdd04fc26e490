//! Command-line front end for `regdec-core`.
//!
//! Every command reads one JSON document (tensor, density or mixture; the
//! schema is recognized by its keys) and writes one JSON report. The exit
//! code mirrors the verdict: 0 for Classical or a passed check, 1 for
//! NotClassical or a failed check, 2 for inconclusive results and 64 for
//! usage or input errors.

pub mod error;
pub mod formats;

use std::fmt::Write as _;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use regdec_core::certify::{
    check_odd_regular, classify, min_z_eig, regular_decompose, restricted_min, sos_check, DecompositionStatus,
    SolverConfig, SosStatus, Status,
};
use regdec_core::sample::random_classical;
use regdec_core::spinmap::{classical_mixture, rotation_matrix, CoherentLabel, MixtureTerm};
use regdec_core::symtensor::DEFAULT_STRUCTURAL_TOL;
use regdec_core::{density_to_tensor, tensor_to_density, SymTensor};

pub use error::{CliError, EXIT_INCONCLUSIVE, EXIT_USAGE};
use formats::{
    to_json, CertificateJson, DensityJson, Input, MixtureJson, TensorJson, TermJson, VerdictJson, WitnessJson,
};

const EXIT_OK: i32 = 0;
const EXIT_FAIL: i32 = 1;

#[derive(Debug, Parser)]
#[command(name = "regdec", version, about = "Certify or refute classicality of spin-j states")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Input JSON file (stdin when absent).
    #[arg(long, global = true, value_name = "PATH")]
    pub input: Option<String>,
    /// Report destination (stdout when absent).
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<String>,
    /// Relative tolerance for the PSD and SOS tests.
    #[arg(long, global = true, value_name = "X")]
    pub tol: Option<f64>,
    /// Size of the seed grid for the sphere minimizers.
    #[arg(long, global = true, value_name = "N")]
    pub grid: Option<usize>,
    /// Number of random starts for the sphere minimizers.
    #[arg(long, global = true, value_name = "N")]
    pub starts: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Density or mixture to tensor, or tensor to density.
    Map,
    /// Run the full classicality cascade.
    Classify,
    /// Run a single cone test.
    Check {
        #[arg(value_enum)]
        test: CheckKind,
    },
    /// Search for a regular decomposition.
    Decompose,
    /// Apply diag(1, R) to every slot of the tensor.
    Rotate(RotateArgs),
    /// Generate a state.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Psd,
    Sos,
    Regsym,
    Restricted,
}

#[derive(Debug, Args)]
pub struct RotateArgs {
    /// Rotation as 9 comma-separated entries in row-major order.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with_all = ["axis", "angle"])]
    pub matrix: Option<Vec<f64>>,
    /// Rotation axis as x,y,z.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, requires = "angle")]
    pub axis: Option<Vec<f64>>,
    /// Rotation angle in radians.
    #[arg(long, requires = "axis", allow_negative_numbers = true)]
    pub angle: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// A single spin coherent state.
    Coherent {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_negative_numbers = true)]
        theta: f64,
        #[arg(long, allow_negative_numbers = true)]
        phi: f64,
        #[arg(long, value_enum, default_value_t = Emit::Mixture)]
        emit: Emit,
    },
    /// A mixture of coherent states given as weight,theta,phi triples.
    Mixture {
        #[arg(long)]
        n: usize,
        #[arg(long = "term", value_name = "W,THETA,PHI", required = true, allow_negative_numbers = true)]
        terms: Vec<String>,
        #[arg(long, value_enum, default_value_t = Emit::Mixture)]
        emit: Emit,
    },
    /// A random classical mixture drawn with `--seed`.
    RandomClassical {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        terms: usize,
        #[arg(long, value_enum, default_value_t = Emit::Mixture)]
        emit: Emit,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Mixture,
    Tensor,
    Density,
}

/// A rendered report and the exit code it carries.
struct Report {
    json: String,
    text: String,
    code: i32,
}

impl Report {
    fn new<T: Serialize>(value: &T, text: String, code: i32) -> Self {
        Self {
            json: to_json(value),
            text,
            code,
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli, stdin) {
        Ok(report) => {
            let body = match cli.global.format {
                Format::Json => report.json,
                Format::Text => report.text,
            };
            match emit(&cli.global, stdout, &body) {
                Ok(()) => report.code,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    e.exit_code()
                }
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn emit(global: &GlobalArgs, stdout: &mut dyn Write, body: &str) -> Result<(), CliError> {
    match &global.output {
        Some(path) => std::fs::write(path, body).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => stdout.write_all(body.as_bytes()).map_err(|source| CliError::Io {
            path: "stdout".into(),
            source,
        }),
    }
}

fn config(global: &GlobalArgs) -> Result<SolverConfig, CliError> {
    let mut cfg = SolverConfig::default();
    if let Some(t) = global.tol {
        cfg.tol_psd = t;
        cfg.tol_sos = t;
    }
    if let Some(g) = global.grid {
        cfg.grid_size = g;
    }
    if let Some(s) = global.starts {
        cfg.starts = s;
    }
    if let Some(s) = global.seed {
        cfg.seed = s;
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

fn read_input(global: &GlobalArgs, stdin: &mut dyn Read) -> Result<Input, CliError> {
    let text = match &global.input {
        Some(path) => std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?,
        None => {
            let mut s = String::new();
            stdin.read_to_string(&mut s).map_err(|source| CliError::Io {
                path: "stdin".into(),
                source,
            })?;
            s
        }
    };
    Input::parse(&text)
}

fn execute(cli: &Cli, stdin: &mut dyn Read) -> Result<Report, CliError> {
    // flags are validated before any input is read
    let cfg = config(&cli.global)?;
    match &cli.command {
        Command::Gen(g) => gen(g, &cfg),
        Command::Map => map(read_input(&cli.global, stdin)?),
        Command::Classify => run_classify(&read_input(&cli.global, stdin)?.tensor()?, &cfg),
        Command::Check { test } => check(*test, &read_input(&cli.global, stdin)?.tensor()?, &cfg),
        Command::Decompose => decompose(&read_input(&cli.global, stdin)?.tensor()?, &cfg),
        Command::Rotate(args) => {
            let rot = rotation(args)?;
            let a = read_input(&cli.global, stdin)?.tensor()?;
            if a.dim() != 4 {
                return Err(CliError::Input(format!("rotate needs a dimension-4 tensor, got {}", a.dim())));
            }
            Ok(tensor_report(&a.rotate(&rot)?))
        }
    }
}

fn tensor_report(a: &SymTensor) -> Report {
    let json = TensorJson::from_tensor(a);
    let mut text = format!("tensor order {} dim {}\n", json.order, json.dim);
    for e in &json.entries {
        let _ = writeln!(text, "  {:?} {:.16e}", e.idx, e.val);
    }
    Report::new(&json, text, EXIT_OK)
}

fn density_report(json: DensityJson) -> Report {
    let mut text = format!("density N = {} (rows k = 0..N)\n", json.n);
    if json.regular_symmetric == Some(false) {
        text.push_str("  warning: tensor is not regular symmetric\n");
    }
    for row in &json.matrix {
        let cells: Vec<String> = row.iter().map(|[re, im]| format!("{re:+.6e}{im:+.6e}i")).collect();
        let _ = writeln!(text, "  {}", cells.join(" "));
    }
    Report::new(&json, text, EXIT_OK)
}

fn mixture_report(json: MixtureJson) -> Report {
    let mut text = format!("mixture N = {}\n", json.n);
    for t in &json.terms {
        let _ = writeln!(text, "  w {:.16e} theta {:.16e} phi {:.16e}", t.w, t.theta, t.phi);
    }
    Report::new(&json, text, EXIT_OK)
}

fn map(input: Input) -> Result<Report, CliError> {
    match input {
        Input::Tensor(t) => {
            let a = t.to_tensor()?;
            if a.dim() != 4 {
                return Err(CliError::Input(format!("map needs a dimension-4 tensor, got {}", a.dim())));
            }
            let rec = tensor_to_density(&a)?;
            let mut json = DensityJson::from_matrix(a.order(), rec.density.matrix());
            if !rec.regular_symmetric {
                json.regular_symmetric = Some(false);
            }
            Ok(density_report(json))
        }
        Input::Density(d) => Ok(tensor_report(&density_to_tensor(&d.to_density()?)?)),
        Input::Mixture(m) => Ok(tensor_report(&m.build()?.1)),
    }
}

fn run_classify(a: &SymTensor, cfg: &SolverConfig) -> Result<Report, CliError> {
    let v = classify(a, cfg)?;
    let code = match v.status {
        Status::Classical => EXIT_OK,
        Status::NotClassical => EXIT_FAIL,
        Status::Unknown => EXIT_INCONCLUSIVE,
    };
    let json = VerdictJson::new(&v);
    let mut text = format!("status: {}\n", json.status);
    for s in &json.stages {
        let _ = writeln!(text, "  {:<16} {:<14} {:.6e}", s.name, s.outcome, s.value);
    }
    if let Some(c) = &json.certificate {
        write_certificate(&mut text, c);
    }
    if let Some(w) = &json.witness {
        write_witness(&mut text, w);
    }
    Ok(Report::new(&json, text, code))
}

fn write_certificate(text: &mut String, c: &CertificateJson) {
    let _ = writeln!(text, "certificate: {} terms, residual {:.3e}", c.terms.len(), c.residual);
    for t in &c.terms {
        let _ = writeln!(
            text,
            "  alpha {:.10e} nhat ({:+.10}, {:+.10}, {:+.10})",
            t.alpha, t.nhat[0], t.nhat[1], t.nhat[2]
        );
    }
}

fn write_witness(text: &mut String, w: &WitnessJson) {
    let coords: Vec<String> = w.point.iter().map(|x| format!("{x:+.10}")).collect();
    let _ = writeln!(text, "witness: {} at ({}) value {:.10e}", w.kind, coords.join(", "), w.value);
}

#[derive(Serialize)]
struct CheckJson {
    check: &'static str,
    outcome: &'static str,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<WitnessJson>,
}

#[derive(Serialize)]
struct SosJson {
    check: &'static str,
    outcome: &'static str,
    min_eigenvalue: f64,
    constraint_residual: f64,
    iterations: usize,
}

fn check(kind: CheckKind, a: &SymTensor, cfg: &SolverConfig) -> Result<Report, CliError> {
    let neg_tol = cfg.tol_psd * a.scale();
    let (name, pass, value, witness) = match kind {
        CheckKind::Sos => {
            let s = sos_check(a, cfg)?;
            let certified = s.status == SosStatus::Certified;
            let json = SosJson {
                check: "sos",
                outcome: if certified { "certified" } else { "not_certified" },
                min_eigenvalue: s.min_eigenvalue,
                constraint_residual: s.constraint_residual,
                iterations: s.iterations,
            };
            let text = format!(
                "sos: {} (min eigenvalue {:.6e}, constraint residual {:.3e}, {} iterations)\n",
                json.outcome, json.min_eigenvalue, json.constraint_residual, json.iterations
            );
            // a failed certification proves nothing
            let code = if certified { EXIT_OK } else { EXIT_INCONCLUSIVE };
            return Ok(Report::new(&json, text, code));
        }
        CheckKind::Regsym => {
            let defect = a.regular_symmetry_defect();
            let value = defect.as_ref().map_or(0.0, |(_, d)| *d);
            let pass = value.abs() <= DEFAULT_STRUCTURAL_TOL * a.scale();
            let witness = (!pass).then(|| WitnessJson {
                kind: "NotRegularSymmetric",
                point: defect.expect("defect present").0.iter().map(|&i| f64::from(i)).collect(),
                value,
            });
            ("regsym", pass, value, witness)
        }
        CheckKind::Psd => {
            let z = min_z_eig(a, cfg)?;
            let value = a.eval(&z.point)?;
            let pass = value >= -neg_tol;
            let witness = (!pass).then_some(WitnessJson {
                kind: "NegativePoint",
                point: z.point,
                value,
            });
            ("psd", pass, value, witness)
        }
        CheckKind::Restricted => {
            let r = restricted_min(a, cfg)?;
            let mut x = vec![1.0];
            x.extend_from_slice(&r.point);
            let value = a.eval(&x)?;
            let pass = value >= -neg_tol;
            let witness = (!pass).then_some(WitnessJson {
                kind: "NegativeRegularPoint",
                point: x,
                value,
            });
            ("restricted", pass, value, witness)
        }
    };
    let json = CheckJson {
        check: name,
        outcome: if pass { "pass" } else { "fail" },
        value,
        witness,
    };
    let mut text = format!("{}: {} (value {:.10e})\n", json.check, json.outcome, json.value);
    if let Some(w) = &json.witness {
        write_witness(&mut text, w);
    }
    Ok(Report::new(&json, text, if pass { EXIT_OK } else { EXIT_FAIL }))
}

#[derive(Serialize)]
struct DecomposeJson {
    status: &'static str,
    residual: f64,
    terms: Vec<TermJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    odd_row_check: Option<bool>,
}

fn decompose(a: &SymTensor, cfg: &SolverConfig) -> Result<Report, CliError> {
    let out = regular_decompose(a, cfg)?;
    let found = out.status == DecompositionStatus::Found;
    let terms = out
        .decomposition
        .as_ref()
        .map(|d| CertificateJson::new(d).terms)
        .unwrap_or_default();
    let odd_row_check = match out.found() {
        Some(d) if a.order() % 2 == 1 => Some(check_odd_regular(a, d)?),
        _ => None,
    };
    let json = DecomposeJson {
        status: if found { "found" } else { "not_found" },
        residual: out.best_residual(),
        terms,
        odd_row_check,
    };
    let mut text = format!("decompose: {} (residual {:.3e})\n", json.status, json.residual);
    write_certificate(
        &mut text,
        &CertificateJson {
            terms: json.terms.clone(),
            residual: json.residual,
        },
    );
    if let Some(ok) = json.odd_row_check {
        let _ = writeln!(text, "odd row check: {}", if ok { "pass" } else { "fail" });
    }
    Ok(Report::new(&json, text, if found { EXIT_OK } else { EXIT_INCONCLUSIVE }))
}

fn rotation(args: &RotateArgs) -> Result<DMatrix<f64>, CliError> {
    match (&args.matrix, &args.axis, args.angle) {
        (Some(m), None, None) if m.len() == 9 => Ok(DMatrix::from_row_slice(3, 3, m)),
        (None, Some(axis), Some(angle)) if axis.len() == 3 => rotation_matrix(&[axis[0], axis[1], axis[2]], angle)
            .map_err(|e| CliError::Usage(e.to_string())),
        _ => Err(CliError::Usage(
            "rotate needs --matrix with 9 entries or --axis with 3 entries and --angle".into(),
        )),
    }
}

fn parse_term(s: &str) -> Result<MixtureTerm, CliError> {
    let bad = || CliError::Usage(format!("--term expects w,theta,phi; got {s:?}"));
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let [weight, theta, phi] = parts[..] else {
        return Err(bad());
    };
    Ok(MixtureTerm {
        weight,
        label: CoherentLabel::new(theta, phi).map_err(|e| CliError::Usage(e.to_string()))?,
    })
}

fn gen(g: &GenCommand, cfg: &SolverConfig) -> Result<Report, CliError> {
    let (n, terms, emit) = match g {
        GenCommand::Coherent { n, theta, phi, emit } => (
            *n,
            vec![MixtureTerm {
                weight: 1.0,
                label: CoherentLabel::new(*theta, *phi).map_err(|e| CliError::Usage(e.to_string()))?,
            }],
            *emit,
        ),
        GenCommand::Mixture { n, terms, emit } => {
            (*n, terms.iter().map(|t| parse_term(t)).collect::<Result<_, _>>()?, *emit)
        }
        GenCommand::RandomClassical { n, terms, emit } => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mix = random_classical(&mut rng, *n, *terms).map_err(|e| CliError::Usage(e.to_string()))?;
            (*n, mix, *emit)
        }
    };
    let (rho, a) = classical_mixture(n, &terms).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(match emit {
        Emit::Mixture => mixture_report(MixtureJson::from_terms(n, &terms)),
        Emit::Tensor => tensor_report(&a),
        Emit::Density => density_report(DensityJson::from_matrix(n, rho.matrix())),
    })
}
