//! Batch command-line front end: one JSON job in, one JSON report out.
//!
//! Exit codes: 0 success, 1 malformed input, 2 precondition failure,
//! 3 numeric non-convergence.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::conjugation::{CAlphaBeta, ConjugationSpec, JBetaLambda};
use crate::diffop::{adjoint_symbols, truncated_matrix, SymbolPair};
use crate::error::Error;
use crate::json::{complex, from_pair};
use crate::parse::parse_poly;
use crate::poly::Poly;
use crate::spectrum::{spectrum, zeros_in_disk, DEFAULT_KMAX};
use crate::symmetry::{
    classify, classify_c_selfadjoint, classify_hermitian, classify_j_selfadjoint, hermitian_residual,
    residual, ResidualReport, MIN_RESIDUAL_TRUNCATION,
};

pub const DEFAULT_TRUNCATION: usize = 128;
pub const MIN_TRUNCATION: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Classify,
    Adjoint,
    Conjugate,
    Spectrum,
    Verify,
    Matrix,
}

#[derive(Debug, Parser)]
#[command(name = "hardy-symm", version, about = "First-order differential operators on H^2")]
pub struct Args {
    pub command: Command,
    /// Job file, `-` for stdin.
    #[arg(long, default_value = "-")]
    pub input: String,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub kmax: Option<usize>,
    /// `RE,IM` or `RE`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub beta: Option<Complex64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub alpha: Option<Complex64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub lambda: Option<Complex64>,
    /// Report file, `-` for stdout.
    #[arg(long, default_value = "-")]
    pub output: String,
}

pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("bad number '{t}': {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected RE,IM, got '{s}'")),
    }
}

/// A polynomial given either as ascending `[re, im]` pairs or as text.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum PolyInput {
    Pairs(Vec<[f64; 2]>),
    Text(String),
}

impl PolyInput {
    fn into_poly(self) -> Result<Poly, Error> {
        match self {
            PolyInput::Pairs(p) => Ok(Poly::new(p.into_iter().map(from_pair).collect())),
            PolyInput::Text(s) => parse_poly(&s),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind")]
enum ConjugationInput {
    C {
        #[serde(with = "complex", default = "one")]
        alpha: Complex64,
        #[serde(with = "complex", default = "one")]
        beta: Complex64,
    },
    J {
        #[serde(with = "complex", default = "one")]
        beta: Complex64,
        #[serde(with = "complex")]
        lambda: Complex64,
    },
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct JobInput {
    #[serde(default)]
    command: Option<Command>,
    psi0: Option<PolyInput>,
    psi1: Option<PolyInput>,
    conjugation: Option<ConjugationInput>,
    n: Option<usize>,
    kmax: Option<usize>,
}

/// A fully resolved job.
#[derive(Debug, Clone, PartialEq)]
pub struct JobSpec {
    pub command: Command,
    pub symbols: SymbolPair,
    pub conjugation: Option<ConjugationSpec>,
    /// Unimodular parameter for the `C` classifier, default 1.
    pub beta: Complex64,
    /// Disk point for the `J` classifier, if any.
    pub lambda: Option<Complex64>,
    pub n: usize,
    pub kmax: usize,
}

/// Failure of a job, with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    fn malformed(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            kind: "MalformedInput",
            message: message.into(),
        }
    }

    fn precondition(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            kind: "Precondition",
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::Parse(_) => (1, "Parse"),
            Error::NonConvergence { .. } => (3, "NonConvergence"),
            Error::SeriesDivergence(_) => (3, "SeriesDivergence"),
            Error::OutsideDisk(_) => (2, "OutsideDisk"),
            Error::InvalidParameter(_) => (2, "InvalidParameter"),
            Error::FamilyMismatch(_) => (2, "FamilyMismatch"),
            Error::NotPolynomial { .. } => (2, "NotPolynomial"),
            Error::NotHermitian(_) => (2, "NotHermitian"),
            Error::NotAZero { .. } => (2, "NotAZero"),
            Error::NotSimple(_) => (2, "NotSimple"),
            Error::ZeroPolynomial => (2, "ZeroPolynomial"),
        };
        Self {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

/// Merges a job document with command-line overrides.
pub fn resolve_job(args: &Args, text: &str) -> Result<JobSpec, Failure> {
    let input: JobInput = serde_json::from_str(text).map_err(|e| Failure::malformed(e.to_string()))?;
    if let Some(c) = input.command {
        if c != args.command {
            return Err(Failure::malformed(format!(
                "job file is for {c:?}, command line asks for {:?}",
                args.command
            )));
        }
    }
    let poly = |p: Option<PolyInput>| p.map_or(Ok(Poly::zero()), PolyInput::into_poly);
    let symbols = SymbolPair::new(poly(input.psi0)?, poly(input.psi1)?);

    let mut conjugation = match input.conjugation {
        None => None,
        Some(ConjugationInput::C { alpha, beta }) => Some(ConjugationSpec::C(CAlphaBeta::new(alpha, beta)?)),
        Some(ConjugationInput::J { beta, lambda }) => Some(ConjugationSpec::J(JBetaLambda::new(beta, lambda)?)),
    };
    // flags override the file: --lambda selects J, --alpha/--beta alone select C
    if let Some(lambda) = args.lambda {
        let beta = args.beta.unwrap_or_else(|| match conjugation {
            Some(ConjugationSpec::J(j)) => j.beta(),
            _ => one(),
        });
        conjugation = Some(ConjugationSpec::J(JBetaLambda::new(beta, lambda)?));
    } else if args.alpha.is_some() || args.beta.is_some() {
        let (alpha0, beta0) = match conjugation {
            Some(ConjugationSpec::C(c)) => (c.alpha(), c.beta()),
            _ => (one(), one()),
        };
        conjugation = Some(ConjugationSpec::C(CAlphaBeta::new(
            args.alpha.unwrap_or(alpha0),
            args.beta.unwrap_or(beta0),
        )?));
    }

    let (beta, lambda) = match conjugation {
        Some(ConjugationSpec::C(c)) => (c.beta(), None),
        Some(ConjugationSpec::J(j)) => (one(), Some(j.lambda())),
        None => (one(), None),
    };
    let n = args.n.or(input.n).unwrap_or(DEFAULT_TRUNCATION);
    if n < MIN_TRUNCATION {
        return Err(Failure::precondition(format!("truncation N must be >= {MIN_TRUNCATION}, got {n}")));
    }
    Ok(JobSpec {
        command: args.command,
        symbols,
        conjugation,
        beta,
        lambda,
        n,
        kmax: args.kmax.or(input.kmax).unwrap_or(DEFAULT_KMAX),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub conjugation: ConjugationSpec,
    pub classified: bool,
    pub report: ResidualReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermitianRow {
    pub classified: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub n: usize,
    pub hermitian: HermitianRow,
    pub rows: Vec<VerifyRow>,
}

/// Eight unimodular `beta` for `C_{1,beta}` and twelve `lambda` on three radii
/// for `J_{1,lambda}`.
pub fn verify_grid() -> Vec<ConjugationSpec> {
    let unit = |t: f64| Complex64::from_polar(1.0, std::f64::consts::TAU * t);
    let mut grid: Vec<ConjugationSpec> = (0..8)
        .map(|k| ConjugationSpec::C(CAlphaBeta::new(one(), unit(k as f64 / 8.0)).expect("unimodular")))
        .collect();
    for r in [0.1, 0.25, 0.5] {
        for k in 0..4 {
            let lambda = unit(k as f64 / 4.0) * r;
            grid.push(ConjugationSpec::J(JBetaLambda::new(one(), lambda).expect("inside the disk")));
        }
    }
    grid
}

pub fn verify(symbols: &SymbolPair, n: usize) -> Result<VerifyReport, Error> {
    if n < MIN_RESIDUAL_TRUNCATION {
        return Err(Error::InvalidParameter(format!(
            "verify needs N >= {MIN_RESIDUAL_TRUNCATION}, got {n}"
        )));
    }
    let rows = verify_grid()
        .into_par_iter()
        .map(|conj| {
            let classified = match conj {
                ConjugationSpec::C(c) => classify_c_selfadjoint(symbols, c.beta())?.holds,
                ConjugationSpec::J(j) => classify_j_selfadjoint(symbols, j.lambda())?.holds,
            };
            Ok(VerifyRow {
                conjugation: conj,
                classified,
                report: residual(symbols, &conj, n)?,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(VerifyReport {
        n,
        hermitian: HermitianRow {
            classified: classify_hermitian(symbols).holds,
            residual: hermitian_residual(symbols, n)?,
        },
        rows,
    })
}

fn require_conjugation(job: &JobSpec) -> Result<ConjugationSpec, Failure> {
    job.conjugation
        .ok_or_else(|| Failure::precondition("this command needs a conjugation (job field or --alpha/--beta/--lambda)"))
}

/// Runs a resolved job and returns its report.
pub fn run(job: &JobSpec) -> Result<Value, Failure> {
    let to_value = |v: Result<Value, serde_json::Error>| v.map_err(|e| Failure::malformed(e.to_string()));
    match job.command {
        Command::Classify => {
            let verify = match job.conjugation {
                Some(c) if job.n >= MIN_RESIDUAL_TRUNCATION => Some(c),
                _ => None,
            };
            let report = classify(&job.symbols, job.beta, job.lambda, verify.as_ref().map(|c| (c, job.n)))?;
            to_value(serde_json::to_value(report))
        }
        Command::Adjoint => to_value(serde_json::to_value(adjoint_symbols(&job.symbols)?)),
        Command::Conjugate => {
            let conj = require_conjugation(job)?;
            to_value(serde_json::to_value(conj.conjugated_symbols(&job.symbols)?))
        }
        Command::Spectrum => {
            let zeros = zeros_in_disk(&job.symbols.psi1)?;
            let mut results = Vec::new();
            for z in &zeros {
                if z.multiplicity > 1 {
                    eprintln!("warning: skipping zero {} of multiplicity {}", z.root, z.multiplicity);
                    continue;
                }
                results.push(spectrum(&job.symbols, z.root, job.kmax, job.n)?);
            }
            if results.is_empty() {
                return Err(Failure::precondition("psi1 has no simple zero inside the disk"));
            }
            to_value(serde_json::to_value(results))
        }
        Command::Verify => to_value(serde_json::to_value(verify(&job.symbols, job.n)?)),
        Command::Matrix => to_value(serde_json::to_value(truncated_matrix(&job.symbols, job.n))),
    }
}

/// Replaces `-0.0` by `0.0` so that reports do not depend on the sign of
/// zeros produced by conjugation.
fn clear_negative_zeros(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if n.as_f64() == Some(0.0) && n.is_f64() {
                *v = serde_json::json!(0.0);
            }
        }
        Value::Array(a) => a.iter_mut().for_each(clear_negative_zeros),
        Value::Object(o) => o.values_mut().for_each(clear_negative_zeros),
        _ => {}
    }
}

/// Serializes a report as a single compact JSON line.
pub fn render(mut report: Value) -> String {
    clear_negative_zeros(&mut report);
    let mut s = serde_json::to_string(&report).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn error_document(f: &Failure) -> String {
    render(serde_json::json!({ "error": f.kind, "message": f.message }))
}

fn read_input(path: &str) -> io::Result<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(PathBuf::from(path))
    }
}

fn write_output(path: &str, text: &str) -> io::Result<()> {
    if path == "-" {
        let mut out = io::stdout().lock();
        out.write_all(text.as_bytes())?;
        out.flush()
    } else {
        fs::write(PathBuf::from(path), text)
    }
}

/// Input text to `(exit code, report text)`.
pub fn execute(args: &Args, input: &str) -> (i32, String) {
    match resolve_job(args, input).and_then(|job| run(&job)) {
        Ok(v) => (0, render(v)),
        Err(f) => {
            eprintln!("error: {}", f.message);
            (f.code, error_document(&f))
        }
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with(args: Args) -> i32 {
    let input = match read_input(&args.input) {
        Ok(s) => s,
        Err(e) => {
            let f = Failure::malformed(format!("cannot read {}: {e}", args.input));
            eprintln!("error: {}", f.message);
            let _ = write_output(&args.output, &error_document(&f));
            return f.code;
        }
    };
    let (code, text) = execute(&args, &input);
    if let Err(e) = write_output(&args.output, &text) {
        eprintln!("error: cannot write {}: {e}", args.output);
        return 1;
    }
    code
}
