use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};

use ha_core::algebra::field::parse_prime_power;
use ha_core::algebra::{Fe, Field, Lambda};
use ha_core::arrangement::{Arrangement, CoordinateMarking};
use ha_core::cohomology::Complement;
use ha_core::format::ArrangementFile;
use ha_core::galois::{eta, ftpg_reconstruct, rho, EtaVerdict, GaloisElement, ProjectiveSpace};
use ha_core::local_theory::LocalTheory;
use ha_core::nilpotent::inertia_decomposition;
use ha_core::suites::{run_suite, SuiteParams, DEFAULT_SEED};
use ha_core::symmetry::CandidateSymmetry;
use ha_core::Error;

#[derive(Debug, Parser)]
#[command(name = "ha", version, about = "Exact cohomology and Galois reconstruction for finite hyperplane arrangements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ranks of H^1, H^2 and the relation module
    Cohom { file: PathBuf },
    /// Inertia and decomposition submodules of one hyperplane
    Inertia {
        file: PathBuf,
        #[arg(long)]
        h: usize,
    },
    /// Local detection of a hyperplane from a group element
    Detect {
        file: PathBuf,
        /// JSON array of N coefficients
        #[arg(long)]
        sigma: String,
        /// deleted coordinate, 1-based
        #[arg(long)]
        delete: usize,
    },
    /// Recover (g, ε) from a candidate symmetry of the full arrangement
    Eta {
        file: PathBuf,
        /// JSON (or a path to JSON): dense rows, {"permutation", "scale"}, or {"lambda", "columns"}
        #[arg(long)]
        map: String,
        /// JSON array of field element codes; defaults to the prime field
        #[arg(long)]
        s: Option<String>,
    },
    /// Line permutation of the Frobenius power on the full plane over k
    Rho {
        #[arg(long)]
        k: String,
        #[arg(long)]
        k0: String,
        #[arg(long)]
        frob: u32,
    },
    /// Semilinear map inducing a point permutation of P^n
    Reconstruct {
        #[arg(long)]
        q: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// JSON array (or a path to one)
        #[arg(long)]
        perm: String,
    },
    /// Run a named verification suite and print its JSON report
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        k0: Option<String>,
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        samples: Option<usize>,
        /// report elapsed_ms as 0
        #[arg(long)]
        no_timing: bool,
    },
}

enum Failure {
    /// exit 1
    Verification(String),
    /// exit 2
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::VerificationMismatch { .. }
            | Error::DetectionFailed { .. }
            | Error::NotCollineation { .. }
            | Error::NonScalar(_) => Failure::Verification(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn usage(msg: impl std::fmt::Display) -> Failure {
    Failure::Usage(msg.to_string())
}

/// Inline JSON, or the contents of a file when the argument names one.
fn json_arg<T: for<'de> Deserialize<'de>>(what: &str, raw: &str) -> Result<T, Failure> {
    let text = if Path::new(raw).is_file() {
        std::fs::read_to_string(raw).map_err(|e| usage(format!("{what}: {e}")))?
    } else {
        raw.to_string()
    };
    serde_json::from_str(&text).map_err(|e| usage(format!("{what}: {e}")))
}

fn load(file: &Path) -> Result<ArrangementFile, Failure> {
    let text = std::fs::read_to_string(file).map_err(|e| usage(format!("{}: {e}", file.display())))?;
    ArrangementFile::parse(&text).map_err(|e| usage(format!("{}: {e}", file.display())))
}

fn field_arg(s: &str) -> Result<Arc<Field>, Failure> {
    let (p, m) = parse_prime_power(s)?;
    Ok(Arc::new(Field::new(p, m, None)?))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MapSpec {
    Rows(Vec<Vec<u64>>),
    Permutation { permutation: Vec<usize>, #[serde(default = "one")] scale: u64 },
    Sparse(CandidateSymmetry),
}

fn one() -> u64 {
    1
}

fn run(cli: Cli) -> Result<Value, Failure> {
    match cli.command {
        Command::Cohom { file } => {
            let af = load(&file)?;
            let ctx = af.complement()?;
            let n = ctx.n();
            let relation_rank = ctx.relation_span().ok().map(|r| r.num_generators());
            Ok(json!({
                "hyperplanes": n,
                "h1_rank": ctx.h1_rank(),
                "h2_rank": ctx.h2_rank(),
                "wedge_rank": n * n.saturating_sub(1) / 2,
                "relation_rank": relation_rank,
                "relation_generators": ctx.relation_count(),
                "flats": ctx.arrangement().flats().flats.len(),
                "parallel_classes": ctx.arrangement().flats().classes.len(),
            }))
        }
        Command::Inertia { file, h } => {
            let af = load(&file)?;
            let ctx = af.complement()?;
            if h >= ctx.n() {
                return Err(usage(format!("--h {h} out of range 0..{}", ctx.n())));
            }
            let d = inertia_decomposition(&ctx, h);
            Ok(json!({
                "hyperplane": h,
                "equation": ctx.arrangement().get(h).format(ctx.arrangement().field()),
                "inertia": d.inertia.basis(),
                "decomposition": d.decomposition.basis(),
                "decomposition_rank": d.decomposition.num_generators(),
            }))
        }
        Command::Detect { file, sigma, delete } => {
            let af = load(&file)?;
            let ctx = af.complement()?;
            let sigma: Vec<u64> = json_arg("--sigma", &sigma)?;
            let marking = CoordinateMarking::new(ctx.arrangement().dim(), delete)?;
            let lt = LocalTheory::new(&ctx, marking)?;
            let sigma: Vec<u64> = sigma.iter().map(|&x| ctx.lambda().reduce(x)).collect();
            Ok(serde_json::to_value(lt.detect(&sigma)?).expect("serializable"))
        }
        Command::Eta { file, map, s } => {
            let af = load(&file)?;
            let ctx = af.complement()?;
            let lam = ctx.lambda();
            let cand = match json_arg::<MapSpec>("--map", &map)? {
                MapSpec::Rows(rows) => CandidateSymmetry::from_matrix(lam, &rows)?,
                MapSpec::Permutation { permutation, scale } => CandidateSymmetry::permutation(lam, &permutation, scale),
                MapSpec::Sparse(c) if c.lambda == lam => c,
                MapSpec::Sparse(_) => return Err(usage("--map: coefficient ring differs from the file")),
            };
            let f = ctx.arrangement().field();
            let s: Vec<Fe> = match s {
                Some(raw) => json_arg("--s", &raw)?,
                None => (0..f.p()).collect(),
            };
            let verdict = eta(&ctx, &cand, &s)?;
            let value = serde_json::to_value(&verdict).expect("serializable");
            match verdict {
                EtaVerdict::Accepted { .. } => Ok(value),
                EtaVerdict::Rejected { .. } => Err(Failure::Verification(value.to_string())),
            }
        }
        Command::Rho { k, k0, frob } => {
            let f = field_arg(&k)?;
            let (p0, m0) = parse_prime_power(&k0)?;
            if p0 != f.p() || m0 == 0 || f.m() % m0 != 0 {
                return Err(usage(format!("{k0} is not a subfield of {k}")));
            }
            let s = f.subfield(m0)?;
            let lam = Lambda::new(if f.p() == 2 { 3 } else { 2 }, 1)?;
            let ctx = Complement::new(Arc::new(Arrangement::full(f.clone(), 2)?), lam)?;
            let g = GaloisElement::new(frob, f.m());
            let cand = rho(&ctx, g, &s)?;
            let permutation: Vec<usize> = (0..ctx.n()).map(|h| cand.column(h)[0].0).collect();
            let moved = permutation.iter().enumerate().filter(|(i, &t)| *i != t).count();
            Ok(json!({ "frob": g.power, "permutation": permutation, "scale": 1, "moved": moved }))
        }
        Command::Reconstruct { q, n, perm } => {
            let f = field_arg(&q)?;
            let space = ProjectiveSpace::new(&f, n)?;
            let perm: Vec<usize> = json_arg("--perm", &perm)?;
            let map = ftpg_reconstruct(&f, &space, &perm)?;
            Ok(serde_json::to_value(map).expect("serializable"))
        }
        Command::Verify { suite, q, k, k0, lambda, seed, samples, no_timing } => {
            let params = SuiteParams {
                q: q.as_deref().map(parse_prime_power).transpose()?,
                k: k.as_deref().map(parse_prime_power).transpose()?,
                k0: k0.as_deref().map(parse_prime_power).transpose()?,
                lambda: lambda.as_deref().map(Lambda::parse).transpose()?,
                seed,
                samples,
                timing: !no_timing,
            };
            let report = run_suite(&suite, &params)?;
            if report.passed() {
                Ok(serde_json::to_value(&report).expect("serializable"))
            } else {
                Err(Failure::Verification(report.to_json()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(v) => {
            println!("{v}");
            ExitCode::SUCCESS
        }
        Err(Failure::Verification(msg)) => {
            println!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
