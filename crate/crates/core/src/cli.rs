//! Batch front-end. Each invocation runs one [`Job`] and produces a
//! document plus an exit status: 0 on success, 2 for a mathematical negative
//! (incompatible values, no descent, not in span, no integral dual basis),
//! 1 for anything malformed.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::fan::{multiplicity_excess, resolve_with, Fan, ResolveStrategy, SubdivisionMap};
use crate::io::{
    parse_json, read_basis, read_fan, read_json, to_json, BasisDoc, FanDoc, FanRef, IoError, LaurentDoc, PExpDoc,
    PairingDoc, SubdivisionDoc, ViolationDoc,
};
use crate::ktheory::{decompose, Epsilon, KContext, KTheoryError};
use crate::laurent::LaurentPoly;
use crate::pexp::{gkm_validate, PExpError, PExpFun, Validation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "pexp", version, about = "Piecewise exponential functions on rational fans")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    pub format: Format,
    /// Sign applied to tangent weights (+1 or -1).
    #[arg(long, global = true, default_value = "+1", allow_hyphen_values = true)]
    pub epsilon: Epsilon,
    /// Resolve with a seeded random strategy instead of the canonical one.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct FanArg {
    /// Fan JSON file.
    #[arg(long)]
    pub fan: PathBuf,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Check a fan and report its basic properties.
    ValidateFan(FanArg),
    /// Resolve a fan to a smooth refinement.
    Resolve(FanArg),
    /// Check face compatibility of raw values.
    GkmCheck {
        #[command(flatten)]
        fan: FanArg,
        /// Function JSON file (one value per maximal cone).
        #[arg(long)]
        pexp: PathBuf,
    },
    /// Value of a function on a cone.
    Restrict {
        #[command(flatten)]
        fan: FanArg,
        /// Function JSON file (one value per maximal cone).
        #[arg(long)]
        pexp: PathBuf,
        /// Ray indices as a JSON array, e.g. '[0,2]'.
        #[arg(long)]
        cone: String,
    },
    /// Equivariant Euler characteristic.
    Chi {
        #[command(flatten)]
        fan: FanArg,
        /// Function JSON file (one value per maximal cone).
        #[arg(long)]
        pexp: PathBuf,
    },
    /// Pairing with the structure sheaf of an orbit closure.
    Pair {
        #[command(flatten)]
        fan: FanArg,
        /// Function JSON file (one value per maximal cone).
        #[arg(long)]
        pexp: PathBuf,
        /// Ray indices as a JSON array.
        #[arg(long)]
        cone: String,
    },
    /// Matrix of pairings between functions and cones.
    Gram {
        #[command(flatten)]
        fan: FanArg,
        /// JSON file holding a list of functions.
        #[arg(long)]
        basis: PathBuf,
        /// JSON list of cones, inline or as a file path.
        #[arg(long)]
        cones: String,
    },
    /// Coefficients of a function in a basis.
    Decompose {
        #[command(flatten)]
        fan: FanArg,
        /// Function JSON file (one value per maximal cone).
        #[arg(long)]
        pexp: PathBuf,
        /// JSON file holding a list of functions.
        #[arg(long)]
        basis: PathBuf,
    },
    /// Functions dual to a list of cones.
    DualBasis {
        #[command(flatten)]
        fan: FanArg,
        /// JSON file holding a list of functions.
        #[arg(long)]
        basis: PathBuf,
        /// JSON list of cones, inline or as a file path.
        #[arg(long)]
        cones: String,
    },
    /// Descend a function along a subdivision.
    Descend {
        /// Subdivision JSON file (the `subdivision` object from `resolve`).
        #[arg(long)]
        subdivision: PathBuf,
        /// Function JSON file (one value per maximal cone).
        #[arg(long)]
        pexp: PathBuf,
    },
}

/// One unit of work.
#[derive(Debug, Clone)]
pub struct Job {
    pub command: Command,
    pub format: Format,
    pub epsilon: Epsilon,
    pub strategy: ResolveStrategy,
}

impl From<Cli> for Job {
    fn from(cli: Cli) -> Self {
        Job {
            command: cli.command,
            format: cli.format,
            epsilon: cli.epsilon,
            strategy: cli.seed.map_or(ResolveStrategy::Canonical, ResolveStrategy::Seeded),
        }
    }
}

/// What a job printed and how it exited.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub output: String,
}

struct Report {
    json: Value,
    text: String,
}

enum Failure {
    Structural(String),
    Negative(Report),
}

impl<E: Into<Structural>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Structural(e.into().0)
    }
}

struct Structural(String);

macro_rules! structural {
    ($($t:ty),*) => {$(
        impl From<$t> for Structural {
            fn from(e: $t) -> Self {
                Structural(e.to_string())
            }
        }
    )*};
}
structural!(IoError, crate::fan::FanError, PExpError, KTheoryError, String);

type Res = Result<Report, Failure>;

/// Parses arguments and runs; returns the process exit status after
/// printing.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let outcome = run(&cli.into());
    if outcome.status == 1 {
        eprint!("{}", outcome.output);
    } else {
        print!("{}", outcome.output);
    }
    outcome.status
}

pub fn run(job: &Job) -> Outcome {
    let (status, report) = match execute(job) {
        Ok(r) => (0, r),
        Err(Failure::Negative(r)) => (2, r),
        Err(Failure::Structural(msg)) => {
            (1, Report { json: json!({ "error": msg }), text: format!("error: {msg}\n") })
        }
    };
    let output = match job.format {
        Format::Json => to_json(&report.json),
        Format::Text => report.text,
    };
    Outcome { status, output }
}

fn doc<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("documents serialize")
}

fn laurent(p: &LaurentPoly) -> Value {
    doc(&LaurentDoc::from(p))
}

fn parse_cone(s: &str) -> Result<Vec<usize>, Failure> {
    let mut c: Vec<usize> = parse_json(s, "--cone")?;
    c.sort_unstable();
    Ok(c)
}

fn parse_cones(s: &str) -> Result<Vec<Vec<usize>>, Failure> {
    let mut cones: Vec<Vec<usize>> =
        if s.trim_start().starts_with('[') { parse_json(s, "--cones")? } else { read_json(Path::new(s))? };
    for c in &mut cones {
        c.sort_unstable();
    }
    Ok(cones)
}

fn load_fan(arg: &FanArg) -> Result<Arc<Fan>, Failure> {
    Ok(Arc::new(read_fan(&arg.fan)?))
}

fn load_pexp(path: &Path, fan: &Arc<Fan>) -> Result<PExpFun, Failure> {
    let doc: PExpDoc = read_json(path)?;
    let (fan, values) = crate::io::pexp_values(doc, Some(path), Some(fan))?;
    match gkm_validate(&fan, values)? {
        Validation::Valid(f) => Ok(f),
        Validation::Violations(v) => Err(violation_failure(&fan, &v)),
    }
}

fn violation_failure(fan: &Fan, v: &[crate::pexp::GkmViolation]) -> Failure {
    let docs: Vec<ViolationDoc> = v.iter().map(|x| ViolationDoc::new(fan, x)).collect();
    let mut text = String::from("valid: false\n");
    for x in v {
        let _ = writeln!(text, "violation: {x}");
    }
    Failure::Negative(Report { json: json!({ "valid": false, "violations": docs }), text })
}

fn context(job: &Job, fan: &Arc<Fan>) -> Result<KContext, Failure> {
    Ok(KContext::with_options(fan, job.strategy, job.epsilon)?)
}

fn execute(job: &Job) -> Res {
    match &job.command {
        Command::ValidateFan(arg) => validate_fan(arg),
        Command::Resolve(arg) => resolve(job, arg),
        Command::GkmCheck { fan, pexp } => {
            let fan = load_fan(fan)?;
            load_pexp(pexp, &fan)?;
            Ok(Report { json: json!({ "valid": true }), text: "valid: true\n".into() })
        }
        Command::Restrict { fan, pexp, cone } => {
            let fan = load_fan(fan)?;
            let f = load_pexp(pexp, &fan)?;
            let cone = parse_cone(cone)?;
            let v = f.restrict(&cone)?;
            Ok(Report {
                json: json!({ "cone": cone, "value": laurent(&v) }),
                text: format!("cone: {cone:?}\nvalue: {v}\n"),
            })
        }
        Command::Chi { fan, pexp } => {
            let fan = load_fan(fan)?;
            let f = load_pexp(pexp, &fan)?;
            let chi = context(job, &fan)?.chi(&f)?;
            Ok(Report { json: json!({ "chi": laurent(&chi) }), text: format!("chi: {chi}\n") })
        }
        Command::Pair { fan, pexp, cone } => {
            let fan = load_fan(fan)?;
            let f = load_pexp(pexp, &fan)?;
            let cone = parse_cone(cone)?;
            let p = context(job, &fan)?.kronecker_pair(&f, &cone)?;
            Ok(Report {
                json: json!({ "cone": cone, "pairing": laurent(&p) }),
                text: format!("cone: {cone:?}\npairing: {p}\n"),
            })
        }
        Command::Gram { fan, basis, cones } => {
            let fan = load_fan(fan)?;
            let fs = read_basis(basis, Some(&fan))?;
            let cones = parse_cones(cones)?;
            let m = context(job, &fan)?.gram_matrix(&fs, &cones)?;
            let det = m.determinant();
            let mut json = doc(&PairingDoc::from(&m));
            json["shape"] = json!(m.shape().to_string());
            json["determinant"] = det.as_ref().map_or(Value::Null, laurent);
            let mut text = String::new();
            let width = m.entries.iter().flatten().map(|e| e.to_string().len()).max().unwrap_or(1);
            let _ = writeln!(text, "columns: {:?}", m.columns);
            for (label, row) in m.row_labels.iter().zip(&m.entries) {
                let cells: Vec<String> = row.iter().map(|e| format!("{:<width$}", e.to_string())).collect();
                let _ = writeln!(text, "{label}: {}", cells.join(" | ").trim_end());
            }
            let _ = writeln!(text, "shape: {}", m.shape());
            if let Some(d) = det {
                let _ = writeln!(text, "determinant: {d}");
            }
            Ok(Report { json, text })
        }
        Command::Decompose { fan, pexp, basis } => {
            let fan = load_fan(fan)?;
            let f = load_pexp(pexp, &fan)?;
            let basis = read_basis(basis, Some(&fan))?;
            match decompose(&f, &basis) {
                Ok(c) => {
                    let mut text = String::new();
                    for (i, x) in c.iter().enumerate() {
                        let _ = writeln!(text, "c{i}: {x}");
                    }
                    Ok(Report { json: json!({ "coefficients": c.iter().map(laurent).collect::<Vec<_>>() }), text })
                }
                Err(e @ (KTheoryError::NotInSpan(_) | KTheoryError::NotIntegral { .. } | KTheoryError::DependentBasis)) => {
                    let reason = match &e {
                        KTheoryError::NotInSpan(_) => "NotInSpan",
                        KTheoryError::NotIntegral { .. } => "NotIntegral",
                        _ => "DependentBasis",
                    };
                    Err(Failure::Negative(Report {
                        json: json!({ "decomposable": false, "reason": reason, "detail": e.to_string() }),
                        text: format!("decomposable: false\nreason: {reason}\ndetail: {e}\n"),
                    }))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::DualBasis { fan, basis, cones } => {
            let fan = load_fan(fan)?;
            let fs = read_basis(basis, Some(&fan))?;
            let cones = parse_cones(cones)?;
            let duals = match context(job, &fan)?.dual_basis_solve(&cones, &fs) {
                Ok(d) => d,
                Err(e @ (KTheoryError::NotIntegral { .. } | KTheoryError::SingularGram)) => {
                    let reason = if matches!(e, KTheoryError::SingularGram) { "SingularGram" } else { "NotIntegral" };
                    return Err(Failure::Negative(Report {
                        json: json!({ "dual_basis": false, "reason": reason, "detail": e.to_string() }),
                        text: format!("dual basis: none\nreason: {reason}\ndetail: {e}\n"),
                    }));
                }
                Err(e) => return Err(e.into()),
            };
            let out = BasisDoc {
                fan: Some(FanRef::Inline(fan.as_ref().into())),
                functions: duals
                    .iter()
                    .map(|g| PExpDoc { fan: None, values: g.values().iter().map(Into::into).collect() })
                    .collect(),
            };
            let mut text = String::new();
            for (j, g) in duals.iter().enumerate() {
                let _ = writeln!(text, "g{j}:");
                for (rays, v) in fan.max_cones().iter().zip(g.values()) {
                    let _ = writeln!(text, "  {rays:?}: {v}");
                }
            }
            Ok(Report { json: doc(&out), text })
        }
        Command::Descend { subdivision, pexp } => {
            let s: SubdivisionMap = read_json::<SubdivisionDoc>(subdivision)?.try_into()?;
            let f = load_pexp(pexp, &s.fine)?;
            match f.descend(&s) {
                Ok(g) => {
                    let mut text = String::new();
                    for (rays, v) in s.coarse.max_cones().iter().zip(g.values()) {
                        let _ = writeln!(text, "{rays:?}: {v}");
                    }
                    Ok(Report { json: doc(&PExpDoc::from(&g)), text })
                }
                Err(PExpError::NotDescendable { coarse_cone, first, second }) => Err(Failure::Negative(Report {
                    json: json!({
                        "descendable": false,
                        "coarse_cone": coarse_cone,
                        "first": laurent(&first),
                        "second": laurent(&second),
                    }),
                    text: format!("descendable: false\ncoarse cone: {coarse_cone:?}\nvalues: {first} vs {second}\n"),
                })),
                Err(e) => Err(e.into()),
            }
        }
    }
}

fn validate_fan(arg: &FanArg) -> Res {
    let fan = read_fan(&arg.fan)?;
    let simplicial = fan.is_simplicial();
    let multiplicities: Value = if simplicial {
        Value::Array(
            (0..fan.max_cones().len())
                .map(|i| {
                    let m = fan.multiplicity(fan.max_cone_id(i)).expect("simplicial");
                    serde_json::to_value(crate::io::Int(m)).expect("integers serialize")
                })
                .collect(),
        )
    } else {
        Value::Null
    };
    let (smooth, complete) = (fan.is_smooth(), fan.is_complete());
    let json = json!({
        "valid": true,
        "fan": doc(&FanDoc::from(&fan)),
        "simplicial": simplicial,
        "smooth": smooth,
        "complete": complete,
        "multiplicities": multiplicities,
    });
    let text = format!(
        "valid: true\nrank: {}\nrays: {}\nmaximal cones: {}\nsimplicial: {simplicial}\nsmooth: {smooth}\ncomplete: {complete}\n",
        fan.rank(),
        fan.rays().len(),
        fan.max_cones().len()
    );
    Ok(Report { json, text })
}

fn resolve(job: &Job, arg: &FanArg) -> Res {
    let fan = load_fan(arg)?;
    let r = resolve_with(&fan, job.strategy)?;
    let steps: Vec<Value> = r
        .steps
        .iter()
        .map(|s| {
            json!({
                "ray": doc(&crate::io::Int::vec(s.ray.coords())),
                "excess_before": doc(&crate::io::Int(s.excess_before.clone())),
                "excess_after": doc(&crate::io::Int(s.excess_after.clone())),
            })
        })
        .collect();
    let mut text = String::new();
    for s in &r.steps {
        let _ = writeln!(text, "subdivide at {}: excess {} -> {}", s.ray, s.excess_before, s.excess_after);
    }
    let _ = writeln!(
        text,
        "fine fan: {} rays, {} maximal cones, excess {}",
        r.map.fine.rays().len(),
        r.map.fine.max_cones().len(),
        multiplicity_excess(&r.map.fine)
    );
    Ok(Report { json: json!({ "subdivision": doc(&SubdivisionDoc::from(&r.map)), "steps": steps }), text })
}
