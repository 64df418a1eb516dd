//! `fanforms`: batch access to fans, piecewise algebras, GKM tuples, face
//! rings and the completion, Chern and Boardman transformations.

mod error;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use num_bigint::BigInt as Z;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fanforms::exactalg::{Coefficient, Rational};
use fanforms::facering::{
    face_ring_hilbert, stanley_reisner_nonfaces, verify_xi_star_inverse, xi_star, FaceAlgebraElement,
};
use fanforms::fan::{projective_space_fan, wps_fan, Fan, FanJson, WeightVector};
use fanforms::gkm::{self, GkmJson, GkmTuple};
use fanforms::piecewise::{
    express_in_module_basis, graded_basis, hilbert_function, ordinary_cohomology_ranks, ModuleBound, FanCharts, PiecewiseElement, PiecewiseJson, Theory,
    DEFAULT_TRUNC,
};
use fanforms::transforms::{boardman, chern, complete_k};
use fanforms::verify::{run_all, Fixtures, VerifyConfig};

use error::CliError;

/// Exponent window for K-theory module questions.
const DEFAULT_WINDOW: u32 = 6;

#[derive(Parser)]
#[command(name = "fanforms", version, about = "Piecewise algebras on rational fans")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Clone)]
struct Global {
    /// Largest cohomological degree to compute.
    #[arg(long, global = true)]
    max_degree: Option<u32>,
    /// Truncation order of power series.
    #[arg(long, global = true)]
    trunc_order: Option<u32>,
    /// Exponent window for K-theory module expressions.
    #[arg(long, global = true)]
    window: Option<u32>,
    /// Write the JSON result here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Print nothing; only the exit code reports the outcome.
    #[arg(short, long, global = true)]
    quiet: bool,
}

/// One of the ways to name a fan.
#[derive(Args, Clone, Default)]
struct FanArgs {
    /// Weights of a normalized divisive weighted projective space, e.g. 1,1,2.
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<u64>>,
    /// Dimension of a projective space.
    #[arg(long)]
    projective: Option<usize>,
    /// JSON file with ambient_dim, rays and max_cones.
    #[arg(long)]
    fan_file: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ArithOp {
    Add,
    Sub,
    Mul,
    Neg,
    Pow,
    Augmentation,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformKind {
    /// Completion at the augmentation ideal, K -> BorelK.
    Complete,
    /// Chern transformation, BorelK -> HR.
    Chern,
    /// Completion followed by Chern, K -> HR.
    Cc,
    /// Boardman transformation, MUu -> BorelMU.
    Boardman,
}

#[derive(Subcommand)]
enum Command {
    /// Build a fan and report its predicates.
    Fan(FanArgs),
    /// Check compatibility of a piecewise element or divisibility of a GKM tuple.
    Validate { file: PathBuf },
    /// Ring operations on piecewise elements.
    Arith {
        #[arg(long, value_enum)]
        op: ArithOp,
        /// Exponent for `pow`.
        #[arg(long, default_value_t = 2)]
        exponent: u32,
        a: PathBuf,
        b: Option<PathBuf>,
    },
    /// Integral bases of the graded pieces of the piecewise polynomials.
    Basis {
        #[arg(long, default_value = "H")]
        theory: String,
        #[command(flatten)]
        fan: FanArgs,
    },
    /// Graded ranks of piecewise polynomials next to the face ring's.
    Hilbert {
        #[arg(long, default_value = "H")]
        theory: String,
        #[command(flatten)]
        fan: FanArgs,
    },
    /// Ranks of the quotient by the global linear forms.
    Betti(FanArgs),
    #[command(subcommand)]
    Gkm(GkmCommand),
    #[command(subcommand)]
    Facering(FaceCommand),
    /// Apply a transformation conewise.
    Transform {
        #[arg(long, value_enum)]
        kind: TransformKind,
        file: PathBuf,
    },
    /// Run every check of the worked example and its surrounding claims.
    VerifyPaper {
        /// Directory holding p.json, q.json, epsilon.json and zeta.json.
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GkmCommand {
    /// Euler class of the pair (i, j).
    Euler {
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<u64>,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
        #[arg(long, default_value = "K")]
        theory: String,
    },
    /// Module generators of the GKM ring.
    Generators {
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<u64>,
        #[arg(long, default_value = "K")]
        theory: String,
    },
    /// Piecewise element of a GKM tuple.
    ToPiecewise { file: PathBuf },
    /// Divisibility check of a GKM tuple.
    Validate { file: PathBuf },
    /// Coefficients of a piecewise element in the generator basis, searched
    /// within `--max-degree` (H) or the exponent window `--window` (K).
    Express {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<u64>,
    },
    /// GKM tuple of a piecewise element on a weighted projective fan.
    FromPiecewise {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<u64>,
    },
}

#[derive(Subcommand)]
enum FaceCommand {
    /// Minimal non-faces.
    Nonfaces(FanArgs),
    /// Graded ranks of the face ring.
    Hilbert(FanArgs),
    /// Evaluate a face ring element on every maximal cone.
    Evaluate {
        #[arg(long, default_value = "H")]
        theory: String,
        /// Element in y0, y1, ... (H, HQ) or beta0, beta1, ..., z (K).
        #[arg(long)]
        element: String,
        #[command(flatten)]
        fan: FanArgs,
    },
    /// Face algebra representative of a piecewise element on a smooth fan.
    XiStar { file: PathBuf },
}

fn resolve_fan(args: &FanArgs) -> Result<Fan, CliError> {
    match (&args.weights, args.projective, &args.fan_file) {
        (Some(w), None, None) => Ok(wps_fan(&WeightVector::new(w.clone())?)?),
        (None, Some(n), None) => {
            if n == 0 {
                return Err(CliError::Unsupported("projective space needs n >= 1".into()));
            }
            Ok(projective_space_fan(n))
        }
        (None, None, Some(path)) => {
            let j: FanJson = serde_json::from_str(&read(path)?)?;
            Ok(Fan::from_json(&j)?)
        }
        _ => Err(CliError::Malformed("name the fan with exactly one of --weights, --projective, --fan-file".into())),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))
}

fn theory(tag: &str, trunc: Option<u32>) -> Result<Theory, CliError> {
    Ok(Theory::from_tag(tag, trunc)?)
}

fn load_piecewise_json(path: &Path) -> Result<PiecewiseJson, CliError> {
    Ok(serde_json::from_str(&read(path)?)?)
}

fn load<S: Coefficient>(j: &PiecewiseJson) -> Result<PiecewiseElement<S>, CliError> {
    Ok(PiecewiseElement::from_json(j)?)
}

fn load_z(path: &Path) -> Result<PiecewiseElement<Z>, CliError> {
    load(&load_piecewise_json(path)?)
}

fn is_rational(j: &PiecewiseJson) -> Result<bool, CliError> {
    Ok(theory(&j.theory, j.trunc)?.coefficient_ring() == "Q")
}

fn validation_json<S: Coefficient>(f: &PiecewiseElement<S>) -> Result<(bool, Value), CliError> {
    let report = f.validate()?;
    let failures: Vec<Value> = report
        .failures
        .iter()
        .map(|p| {
            json!({
                "first": p.first.to_string(),
                "second": p.second.to_string(),
                "face": p.face.to_string(),
                "difference": p.difference,
            })
        })
        .collect();
    let ok = report.is_valid();
    Ok((
        ok,
        json!({
            "kind": "piecewise",
            "theory": f.theory().tag(),
            "valid": ok,
            "pairs_checked": report.pairs_checked,
            "failures": failures,
        }),
    ))
}

fn require_valid<S: Coefficient>(f: &PiecewiseElement<S>, name: &str) -> Result<(), CliError> {
    if f.is_valid() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("{name} is not a compatible piecewise element")))
    }
}

/// Result of one command: a JSON document and whether its checks passed.
struct Outcome {
    value: Value,
    passed: bool,
    failure: String,
}

impl Outcome {
    fn ok(value: Value) -> Self {
        Outcome { value, passed: true, failure: String::new() }
    }

    fn checked(value: Value, passed: bool, failure: impl Into<String>) -> Self {
        Outcome { value, passed, failure: failure.into() }
    }
}

fn cmd_fan(args: &FanArgs) -> Result<Outcome, CliError> {
    let mut report = serde_json::Map::new();
    if let Some(w) = &args.weights {
        let chi = WeightVector::new(w.clone())?;
        report.insert("weights".into(), json!(chi.weights()));
        report.insert("normalized".into(), json!(chi.is_normalized()));
        report.insert("weakly_divisive".into(), json!(chi.is_weakly_divisive()));
        report.insert("divisive".into(), json!(chi.is_divisive()));
    }
    let fan = resolve_fan(args)?;
    let smooth: Vec<Value> = fan
        .cone_smoothness()
        .into_iter()
        .map(|(c, ok)| json!({"cone": c.to_string(), "smooth": ok}))
        .collect();
    report.insert("fan".into(), serde_json::to_value(fan.to_json())?);
    report.insert("smooth".into(), json!(fan.is_smooth()));
    report.insert("complete_simplicial".into(), json!(fan.is_complete_simplicial().unwrap_or(false)));
    report.insert("cone_smoothness".into(), Value::Array(smooth));
    Ok(Outcome::ok(Value::Object(report)))
}

fn cmd_validate(path: &Path) -> Result<Outcome, CliError> {
    let value: Value = serde_json::from_str(&read(path)?)?;
    if value.get("entries").is_some() {
        let j: GkmJson = serde_json::from_value(value)?;
        let t = GkmTuple::from_json(&j)?;
        let failures = t.failures()?;
        let ok = failures.is_empty();
        let out = json!({
            "kind": "gkm",
            "theory": t.theory().tag(),
            "valid": ok,
            "failures": failures,
        });
        return Ok(Outcome::checked(out, ok, "GKM tuple fails divisibility"));
    }
    let j: PiecewiseJson = serde_json::from_value(value)?;
    let (ok, out) = if is_rational(&j)? {
        validation_json(&load::<Rational>(&j)?)?
    } else {
        validation_json(&load::<Z>(&j)?)?
    };
    Ok(Outcome::checked(out, ok, "piecewise element is not compatible"))
}

fn arith<S: Coefficient>(op: ArithOp, k: u32, a: &PiecewiseJson, b: Option<&PiecewiseJson>) -> Result<Value, CliError> {
    let fa: PiecewiseElement<S> = load(a)?;
    require_valid(&fa, "first operand")?;
    let second = || -> Result<PiecewiseElement<S>, CliError> {
        let b = b.ok_or_else(|| CliError::Malformed("this operation needs two operands".into()))?;
        let fb: PiecewiseElement<S> = load(b)?;
        require_valid(&fb, "second operand")?;
        Ok(fb)
    };
    let result = match op {
        ArithOp::Add => fa.add(&second()?)?,
        ArithOp::Sub => fa.sub(&second()?)?,
        ArithOp::Mul => fa.mul(&second()?)?,
        ArithOp::Neg => fa.neg(),
        ArithOp::Pow => fa.pow(k),
        ArithOp::Augmentation => return Ok(json!({"augmentation": fa.augmentation()?.to_string()})),
    };
    Ok(serde_json::to_value(result.to_json())?)
}

fn cmd_arith(op: ArithOp, k: u32, a: &Path, b: Option<&Path>) -> Result<Outcome, CliError> {
    let ja = load_piecewise_json(a)?;
    let jb = b.map(load_piecewise_json).transpose()?;
    let value = if is_rational(&ja)? { arith::<Rational>(op, k, &ja, jb.as_ref())? } else { arith::<Z>(op, k, &ja, jb.as_ref())? };
    Ok(Outcome::ok(value))
}

fn components_json<S: Coefficient>(f: &PiecewiseElement<S>) -> Value {
    let map: serde_json::Map<String, Value> = f
        .fan()
        .max_cones()
        .iter()
        .zip(f.components())
        .map(|(c, p)| (c.to_string(), Value::String(p.to_string())))
        .collect();
    Value::Object(map)
}

fn cmd_basis(tag: &str, fan: &FanArgs, g: &Global) -> Result<Outcome, CliError> {
    if theory(tag, None)? != Theory::H {
        return Err(CliError::Unsupported("integral bases are computed for the H theory".into()));
    }
    let charts = FanCharts::new(resolve_fan(fan)?);
    let max = g.max_degree.unwrap_or(8);
    let mut degrees = Vec::new();
    let mut ranks = Vec::new();
    for d in (0..=max).step_by(2) {
        let report = graded_basis(&charts, d)?;
        ranks.push(report.rank);
        degrees.push(json!({
            "degree": d,
            "rank": report.rank,
            "basis": report.basis.iter().map(components_json).collect::<Vec<_>>(),
        }));
    }
    Ok(Outcome::ok(json!({"theory": "H", "ranks": ranks, "degrees": degrees})))
}

fn cmd_hilbert(tag: &str, fan: &FanArgs, g: &Global) -> Result<Outcome, CliError> {
    let t = theory(tag, None)?;
    let fan = resolve_fan(fan)?;
    let max = g.max_degree.unwrap_or(8);
    let face = counts(&face_ring_hilbert(&fan, max));
    let pw = hilbert_function(t, &FanCharts::new(fan), max)?;
    let agree = pw.iter().map(|&v| Value::from(v)).collect::<Vec<_>>() == face;
    Ok(Outcome::ok(json!({"theory": t.tag(), "piecewise": pw, "face_ring": face, "agree": agree})))
}

/// Counts as JSON numbers when they fit, strings otherwise.
fn counts(v: &[Z]) -> Vec<Value> {
    v.iter()
        .map(|c| match u64::try_from(c) {
            Ok(k) => Value::from(k),
            Err(_) => Value::String(c.to_string()),
        })
        .collect()
}

fn cmd_betti(fan: &FanArgs, g: &Global) -> Result<Outcome, CliError> {
    let fan = resolve_fan(fan)?;
    let max = g.max_degree.unwrap_or(2 * fan.ambient_dim() as u32);
    let ranks = ordinary_cohomology_ranks(&FanCharts::new(fan), max)?;
    let torsion: Vec<Value> = ranks
        .iter()
        .map(|r| json!({"degree": r.degree, "factors": r.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>()}))
        .collect();
    Ok(Outcome::ok(json!({
        "ranks": ranks.iter().map(|r| r.rank).collect::<Vec<_>>(),
        "torsion": torsion,
    })))
}

fn gkm_theory(tag: &str) -> Result<Theory, CliError> {
    let t = theory(tag, None)?;
    if !matches!(t, Theory::K | Theory::H) {
        return Err(CliError::Unsupported(format!("GKM tuples are defined for K and H, not {tag}")));
    }
    Ok(t)
}

fn cmd_gkm(c: &GkmCommand, g: &Global) -> Result<Outcome, CliError> {
    match c {
        GkmCommand::Euler { weights, i, j, theory } => {
            let chi = WeightVector::new(weights.clone())?;
            chi.check_normalized_divisive()?;
            let e = gkm::euler_class(*i, *j, &chi, gkm_theory(theory)?)?;
            Ok(Outcome::ok(json!({"i": i, "j": j, "euler_class": e.to_string()})))
        }
        GkmCommand::Generators { weights, theory } => {
            let chi = WeightVector::new(weights.clone())?;
            let gens = gkm::generator_tuples(&chi, gkm_theory(theory)?)?;
            let out: Vec<GkmJson> = gens.iter().map(GkmTuple::to_json).collect();
            Ok(Outcome::ok(serde_json::to_value(out)?))
        }
        GkmCommand::Validate { file } => {
            let j: GkmJson = serde_json::from_str(&read(file)?)?;
            let failures = GkmTuple::from_json(&j)?.failures()?;
            let ok = failures.is_empty();
            let out = json!({"kind": "gkm", "theory": j.theory, "valid": ok, "failures": failures});
            Ok(Outcome::checked(out, ok, "GKM tuple fails divisibility"))
        }
        GkmCommand::Express { file, weights } => {
            let chi = WeightVector::new(weights.clone())?;
            let f = load_z(file)?;
            require_valid(&f, "input")?;
            let t = f.theory();
            let bound = match t {
                Theory::H => ModuleBound::Degree(g.max_degree.unwrap_or(8)),
                Theory::K => ModuleBound::Window(g.window.unwrap_or(DEFAULT_WINDOW)),
                _ => return Err(CliError::Unsupported(format!("module expressions in theory {}", t.tag()))),
            };
            let basis = gkm::generator_tuples(&chi, t)?
                .iter()
                .map(gkm::gkm_to_piecewise)
                .collect::<Result<Vec<_>, _>>()?;
            let found = express_in_module_basis(&f, &basis, bound)?;
            let coefficients = found.as_ref().map(|c| c.iter().map(|p| p.to_string()).collect::<Vec<_>>());
            let ok = found.is_some();
            let out = json!({"theory": t.tag(), "coefficients": coefficients});
            Ok(Outcome::checked(out, ok, "no coefficients within the bound"))
        }
        GkmCommand::ToPiecewise { file } => {
            let j: GkmJson = serde_json::from_str(&read(file)?)?;
            let f = gkm::gkm_to_piecewise(&GkmTuple::from_json(&j)?)?;
            Ok(Outcome::ok(serde_json::to_value(f.to_json())?))
        }
        GkmCommand::FromPiecewise { file, weights } => {
            let chi = WeightVector::new(weights.clone())?;
            let f = load_z(file)?;
            let t = gkm::piecewise_to_gkm(&f, &chi)?;
            Ok(Outcome::ok(serde_json::to_value(t.to_json())?))
        }
    }
}

fn evaluate<S: Coefficient>(t: Theory, charts: Arc<FanCharts>, text: &str) -> Result<Value, CliError> {
    let e = FaceAlgebraElement::<S>::parse(t, charts.clone(), text)?;
    let f = e.to_piecewise()?;
    Ok(json!({"theory": t.tag(), "components": components_json(&f)}))
}

fn cmd_facering(c: &FaceCommand, g: &Global) -> Result<Outcome, CliError> {
    match c {
        FaceCommand::Nonfaces(fan) => {
            let fan = resolve_fan(fan)?;
            let list: Vec<Vec<usize>> = stanley_reisner_nonfaces(&fan).iter().map(|c| c.rays().to_vec()).collect();
            Ok(Outcome::ok(json!({"nonfaces": list})))
        }
        FaceCommand::Hilbert(fan) => {
            let fan = resolve_fan(fan)?;
            let ranks = counts(&face_ring_hilbert(&fan, g.max_degree.unwrap_or(8)));
            Ok(Outcome::ok(json!({"face_ring": ranks})))
        }
        FaceCommand::Evaluate { theory: tag, element, fan } => {
            let t = theory(tag, None)?;
            let charts = FanCharts::new(resolve_fan(fan)?);
            let v = if t.coefficient_ring() == "Q" { evaluate::<Rational>(t, charts, element)? } else { evaluate::<Z>(t, charts, element)? };
            Ok(Outcome::ok(v))
        }
        FaceCommand::XiStar { file } => {
            let j = load_piecewise_json(file)?;
            let (rep, ok) = if is_rational(&j)? {
                let f: PiecewiseElement<Rational> = load(&j)?;
                require_valid(&f, "input")?;
                let e = xi_star(&f)?;
                (e.representative().to_string(), verify_xi_star_inverse(&f, &e)?)
            } else {
                let f: PiecewiseElement<Z> = load(&j)?;
                require_valid(&f, "input")?;
                let e = xi_star(&f)?;
                (e.representative().to_string(), verify_xi_star_inverse(&f, &e)?)
            };
            Ok(Outcome::checked(json!({"representative": rep, "verified": ok}), ok, "cone evaluations disagree"))
        }
    }
}

fn cmd_transform(kind: TransformKind, file: &Path, g: &Global) -> Result<Outcome, CliError> {
    let f = load_z(file)?;
    require_valid(&f, "input")?;
    let d = g.trunc_order.unwrap_or(DEFAULT_TRUNC);
    let value = match kind {
        TransformKind::Complete => serde_json::to_value(complete_k(&f, d)?.to_json())?,
        TransformKind::Chern => serde_json::to_value(chern(&f)?.to_json())?,
        TransformKind::Cc => serde_json::to_value(chern(&complete_k(&f, d)?)?.to_json())?,
        TransformKind::Boardman => serde_json::to_value(boardman(&f)?.to_json())?,
    };
    Ok(Outcome::ok(value))
}

fn cmd_verify(fixtures: Option<&Path>, g: &Global) -> Result<Outcome, CliError> {
    let mut cfg = VerifyConfig::default();
    if let Some(dir) = fixtures {
        cfg.fixtures = Fixtures::from_dir(dir)?;
    }
    if let Some(d) = g.trunc_order {
        if d == 0 {
            return Err(CliError::Unsupported("truncation order must be at least 1".into()));
        }
        cfg = cfg.with_trunc(d);
    }
    let items = run_all(&cfg);
    let failed: Vec<&str> = items.iter().filter(|i| !i.passed).map(|i| i.id.as_str()).collect();
    let passed = failed.is_empty();
    let failure = format!("failed: {}", failed.join(", "));
    Ok(Outcome::checked(json!({"passed": passed, "items": items}), passed, failure))
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let g = &cli.global;
    if g.trunc_order == Some(0) {
        return Err(CliError::Unsupported("truncation order must be at least 1".into()));
    }
    match &cli.command {
        Command::Fan(args) => cmd_fan(args),
        Command::Validate { file } => cmd_validate(file),
        Command::Arith { op, exponent, a, b } => cmd_arith(*op, *exponent, a, b.as_deref()),
        Command::Basis { theory, fan } => cmd_basis(theory, fan, g),
        Command::Hilbert { theory, fan } => cmd_hilbert(theory, fan, g),
        Command::Betti(fan) => cmd_betti(fan, g),
        Command::Gkm(c) => cmd_gkm(c, g),
        Command::Facering(c) => cmd_facering(c, g),
        Command::Transform { kind, file } => cmd_transform(*kind, file, g),
        Command::VerifyPaper { fixtures } => cmd_verify(fixtures.as_deref(), g),
    }
}

fn emit(value: &Value, g: &Global) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match &g.output {
        Some(path) => std::fs::write(path, text)?,
        None if !g.quiet => print!("{text}"),
        None => {}
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| {
        emit(&out.value, &cli.global)?;
        if out.passed {
            Ok(())
        } else {
            Err(CliError::Validation(out.failure))
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !cli.global.quiet {
                eprintln!("fanforms: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
