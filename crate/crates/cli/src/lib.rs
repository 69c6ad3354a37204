//! The `rotnorm` command line tool.
//!
//! Every subcommand writes one JSON document to stdout (or an indented
//! `key: value` rendering with `--format text`). Failures print
//! `{"error": {"kind": ..., "message": ...}}` to stderr; the exit code is 1
//! for invalid input and 2 for an internal inconsistency.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use rotnorm_core::bounds::{
    diameter_ledger, element_ledger, relation_close, verdict, BoundLedger, BoundsError, ManifoldContext,
};
use rotnorm_core::catalog;
use rotnorm_core::circle::{defect_experiment, IsotopySpec, MultiIsotopySpec};
use rotnorm_core::coset::{theta_sup, AffineCoset, ThetaSup};
use rotnorm_core::group::{self, named, FiniteGroup, Permutation};
use rotnorm_core::lattice::{IntLattice, LatticeSpec};
use rotnorm_core::rational::{fmt_q, fmt_q_list, parse_q, parse_q_list, Q};

pub const SEED_ENV: &str = "ROTNORM_SEED";

#[derive(Parser, Debug)]
#[command(name = "rotnorm", version, about = "Exact norms, lattices, coset distances and rotation numbers")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Norms and normal structure of a permutation group.
    Group(GroupArgs),
    /// Quotient invariants of a sublattice of Z^m.
    Lattice(LatticeArgs),
    /// Minimal sup-norm points of a coset x + A, or the sup over all cosets.
    Coset(CosetArgs),
    /// Rotation angle of the trace of a basepoint under an isotopy.
    Mu(MuArgs),
    /// Vector of rotation angles of a multi-circle isotopy.
    Nu(NuArgs),
    /// Randomized check of the defect inequalities.
    Defect(DefectArgs),
    /// Certified bound ledger.
    Bounds(BoundsArgs),
    /// Boundedness verdict for a manifold context and lattice.
    Verdict(VerdictArgs),
    /// Bundled example fixtures.
    Catalog(CatalogArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NormKind {
    /// Commutator length.
    Cl,
    /// Word norm of the conjugacy classes of --element and its inverse.
    Zeta,
    /// Union of proper normal subgroups and the simplicity class.
    WeaklySimple,
    Classes,
}

#[derive(Args, Debug)]
pub struct GroupArgs {
    /// JSON list of generator image arrays, or `-` for stdin.
    #[arg(long = "in", conflicts_with = "named")]
    pub input: Option<PathBuf>,
    /// A standard group: S<n>, A<n>, C<n> or V4.
    #[arg(long)]
    pub named: Option<String>,
    #[arg(long, value_enum, default_value_t = NormKind::Cl)]
    pub norm: NormKind,
    /// Element in cycle notation, for `--norm zeta`.
    #[arg(long)]
    pub element: Option<String>,
    /// Generators (JSON image arrays) of a normal subgroup N; reports q_/N instead of q.
    #[arg(long)]
    pub modulo: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct LatticeArgs {
    /// Lattice JSON `{"m": .., "generators": [[..], ..]}`, or `-` for stdin.
    #[arg(long = "in")]
    pub input: PathBuf,
}

#[derive(Args, Debug)]
pub struct CosetArgs {
    #[arg(long)]
    pub lattice: PathBuf,
    /// Comma separated rationals, e.g. "6/5,-5/2".
    #[arg(long, allow_hyphen_values = true, required_unless_present = "sup")]
    pub offset: Option<String>,
    /// Enclose the supremum of theta over all cosets instead.
    #[arg(long, conflicts_with = "offset")]
    pub sup: bool,
    #[arg(long, default_value = "1/64")]
    pub epsilon: String,
}

#[derive(Args, Debug)]
pub struct MuArgs {
    /// Isotopy JSON, or `-` for stdin.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value = "0")]
    pub basepoint: String,
}

#[derive(Args, Debug)]
pub struct NuArgs {
    /// Multi-isotopy JSON, or `-` for stdin.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Also report the class of nu modulo this lattice and its minimal norm.
    #[arg(long)]
    pub lattice: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DefectArgs {
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// Overridden by the ROTNORM_SEED environment variable.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    /// Minimal coset norm theta_f of an element.
    #[arg(long)]
    pub theta: Option<String>,
    #[arg(long, required_unless_present = "ledger")]
    pub context: Option<PathBuf>,
    /// Add diameter bounds for this lattice.
    #[arg(long)]
    pub lattice: Option<PathBuf>,
    /// Close an existing ledger instead of building one.
    #[arg(long, conflicts_with_all = ["theta", "context", "lattice"])]
    pub ledger: Option<PathBuf>,
    /// Precision for the sup-theta lower bound when m >= 2.
    #[arg(long, default_value = "1/16")]
    pub epsilon: String,
}

#[derive(Args, Debug)]
pub struct VerdictArgs {
    #[arg(long)]
    pub context: PathBuf,
    #[arg(long)]
    pub lattice: PathBuf,
}

#[derive(Args, Debug)]
pub struct CatalogArgs {
    #[command(subcommand)]
    pub action: CatalogAction,
}

#[derive(Subcommand, Debug)]
pub enum CatalogAction {
    List,
    /// Recompute fixtures (all when no name is given).
    Check { name: Option<String> },
    Show { name: String },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
pub enum Failure {
    /// Bad input: exit code 1.
    Invalid(String),
    /// Computation contradicted itself: exit code 2.
    Inconsistent(String),
}

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure::Invalid(e.to_string())
}

type CmdResult = Result<(Value, bool), Failure>;

/// Parses `argv` (including the program name) and runs it.
pub fn run<I, T>(argv: I, env_seed: Option<String>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome { code: 0, stdout: e.to_string(), stderr: String::new() };
            }
            return error_outcome(1, "usage", &e.to_string());
        }
    };
    match dispatch(&cli, env_seed) {
        Ok((value, consistent)) => {
            let stdout = render(&value, cli.format);
            if consistent {
                Outcome { code: 0, stdout, stderr: String::new() }
            } else {
                let err = error_outcome(2, "inconsistent", "result violates a checked property");
                Outcome { stdout, ..err }
            }
        }
        Err(Failure::Invalid(m)) => error_outcome(1, "validation", &m),
        Err(Failure::Inconsistent(m)) => error_outcome(2, "inconsistent", &m),
    }
}

fn error_outcome(code: i32, kind: &str, message: &str) -> Outcome {
    let body = json!({"error": {"kind": kind, "message": message.trim_end()}});
    Outcome { code, stdout: String::new(), stderr: format!("{body}\n") }
}

fn render(value: &Value, format: Format) -> String {
    match format {
        Format::Json => format!("{value}\n"),
        Format::Text => {
            let mut out = String::new();
            text_lines(value, 0, &mut out);
            out
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            Some(a.iter().map(|x| scalar(x).unwrap_or_default()).collect::<Vec<_>>().join(", "))
        }
        Value::Object(_) | Value::Array(_) => None,
        other => Some(other.to_string()),
    }
}

fn text_lines(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        text_lines(x, depth + 1, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        text_lines(x, depth + 1, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(invalid)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read_input(path)?).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn parse_rational(s: &str) -> Result<Q, Failure> {
    parse_q(s).map_err(invalid)
}

fn read_lattice(path: &Path) -> Result<IntLattice, Failure> {
    let spec: LatticeSpec = read_json(path)?;
    IntLattice::from_spec(&spec).map_err(invalid)
}

fn read_context(path: &Path) -> Result<ManifoldContext, Failure> {
    let ctx: ManifoldContext = read_json(path)?;
    ctx.validated().map_err(invalid)
}

fn dispatch(cli: &Cli, env_seed: Option<String>) -> CmdResult {
    match &cli.command {
        Command::Group(a) => cmd_group(a),
        Command::Lattice(a) => cmd_lattice(a),
        Command::Coset(a) => cmd_coset(a),
        Command::Mu(a) => cmd_mu(a),
        Command::Nu(a) => cmd_nu(a),
        Command::Defect(a) => cmd_defect(a, env_seed),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Verdict(a) => cmd_verdict(a),
        Command::Catalog(a) => cmd_catalog(a),
    }
}

fn parse_generators(path: &Path) -> Result<(usize, Vec<Permutation>), Failure> {
    let images: Vec<Vec<usize>> = read_json(path)?;
    let degree = images
        .first()
        .map(Vec::len)
        .ok_or_else(|| Failure::Invalid("generator list is empty".into()))?;
    let gens = images
        .iter()
        .map(|g| Permutation::from_images(g))
        .collect::<Result<Vec<_>, _>>()
        .map_err(invalid)?;
    Ok((degree, gens))
}

fn named_group(name: &str) -> Result<FiniteGroup, Failure> {
    let bad = || Failure::Invalid(format!("unknown group {name:?}; use S<n>, A<n>, C<n> or V4"));
    if name.eq_ignore_ascii_case("v4") {
        return Ok(named::klein_four());
    }
    let (kind, n) = name.split_at(1);
    let n: usize = n.parse().map_err(|_| bad())?;
    if n == 0 || n > 8 {
        return Err(Failure::Invalid(format!("{name}: degree must be in 1..=8")));
    }
    match kind {
        "S" | "s" => Ok(named::symmetric(n)),
        "A" | "a" => Ok(named::alternating(n)),
        "C" | "c" => Ok(named::cyclic(n)),
        _ => Err(bad()),
    }
}

fn cmd_group(a: &GroupArgs) -> CmdResult {
    let g = match (&a.input, &a.named) {
        (Some(path), None) => {
            let (degree, gens) = parse_generators(path)?;
            FiniteGroup::generate(degree, &gens).map_err(invalid)?
        }
        (None, Some(name)) => named_group(name)?,
        _ => return Err(Failure::Invalid("give exactly one of --in or --named".into())),
    };
    let table = match a.norm {
        NormKind::Cl => group::commutator_length(&g),
        NormKind::Zeta => {
            let el = a.element.as_deref().ok_or_else(|| Failure::Invalid("--norm zeta needs --element".into()))?;
            let p = Permutation::parse_cycles(g.degree(), el).map_err(invalid)?;
            group::zeta_norm(&g, &p).map_err(invalid)?
        }
        NormKind::WeaklySimple => {
            let ws = group::weakly_simple_set(&g).map_err(invalid)?;
            let set: Vec<String> = ws.set.iter().map(ToString::to_string).collect();
            return Ok((json!({"order": g.order(), "set": set, "simplicity": ws.simplicity}), true));
        }
        NormKind::Classes => {
            let classes: Vec<Vec<String>> = g
                .conjugacy_classes()
                .iter()
                .map(|c| c.iter().map(ToString::to_string).collect())
                .collect();
            return Ok((json!({"order": g.order(), "classes": classes}), true));
        }
    };
    let table = match &a.modulo {
        None => table,
        Some(path) => {
            let (degree, gens) = parse_generators(path)?;
            if degree != g.degree() {
                return Err(Failure::Invalid("normal subgroup has a different degree".into()));
            }
            let n = FiniteGroup::generate(degree, &gens).map_err(invalid)?;
            if !g.is_normal_subgroup(&n) {
                return Err(Failure::Invalid("--modulo does not generate a normal subgroup".into()));
            }
            group::quotient_table(&table, n.elements()).map_err(invalid)?
        }
    };
    let consistent = group::check_norm_axioms(&g, &table).is_ok() || a.modulo.is_some();
    Ok((to_value(&table), consistent))
}

fn cmd_lattice(a: &LatticeArgs) -> CmdResult {
    let l = read_lattice(&a.input)?;
    Ok((to_value(&l.quotient_info()), true))
}

fn cmd_coset(a: &CosetArgs) -> CmdResult {
    let lattice = read_lattice(&a.lattice)?;
    if a.sup {
        let eps = parse_rational(&a.epsilon)?;
        return match theta_sup(&lattice, &eps).map_err(invalid)? {
            ThetaSup::Infinite => Ok((json!({"theta_sup": "inf"}), true)),
            ThetaSup::Interval { lo, hi } => {
                Ok((json!({"lo": fmt_q(&lo), "hi": fmt_q(&hi), "exact": lo == hi}), lo <= hi))
            }
        };
    }
    let offset = parse_q_list(a.offset.as_deref().expect("required by clap")).map_err(invalid)?;
    let coset = AffineCoset::new(lattice, offset).map_err(invalid)?;
    let near = coset.theta();
    let points: Vec<String> = near.points.iter().map(|p| fmt_q_list(p)).collect();
    Ok((json!({"theta": fmt_q(&near.theta), "points": points}), !points.is_empty()))
}

fn cmd_mu(a: &MuArgs) -> CmdResult {
    let spec: IsotopySpec = read_json(&a.input)?;
    let iso = spec.build().map_err(invalid)?;
    let p = parse_rational(&a.basepoint)?;
    let trace = iso.trace(&p);
    Ok((
        json!({
            "basepoint": fmt_q(&p),
            "mu": fmt_q(&iso.mu(&p)),
            "trace": {"times": fmt_list(trace.times()), "values": fmt_list(trace.values())},
        }),
        true,
    ))
}

fn fmt_list(v: &[Q]) -> Vec<String> {
    v.iter().map(fmt_q).collect()
}

fn cmd_nu(a: &NuArgs) -> CmdResult {
    let spec: MultiIsotopySpec = read_json(&a.input)?;
    let multi = spec.build().map_err(invalid)?;
    let nu = multi.nu();
    let mut out = json!({"nu": fmt_list(&nu), "is_loop": multi.is_loop()});
    let mut consistent = true;
    if let Some(path) = &a.lattice {
        let lattice = read_lattice(path)?;
        let coset = multi.nu_hat(&lattice).map_err(invalid)?;
        let near = coset.theta();
        out["theta"] = json!(fmt_q(&near.theta));
        out["canonical"] = json!(fmt_q_list(&coset.canonical_rep().map_err(invalid)?));
        if multi.is_loop() {
            // based loops have integer rotation numbers lying in A when A is the loop lattice
            consistent = nu.iter().all(|x| x.is_integer());
        }
    }
    Ok((out, consistent))
}

fn cmd_defect(a: &DefectArgs, env_seed: Option<String>) -> CmdResult {
    let seed = match env_seed {
        Some(s) => s.trim().parse().map_err(|_| Failure::Invalid(format!("{SEED_ENV}={s:?} is not a u64")))?,
        None => a.seed,
    };
    if a.trials == 0 {
        return Err(Failure::Invalid("--trials must be at least 1".into()));
    }
    let report = defect_experiment(seed, a.trials);
    let mut out = to_value(&report);
    out["all_hold"] = json!(report.all_hold());
    Ok((out, report.all_hold()))
}

fn bounds_failure(e: BoundsError) -> Failure {
    match e {
        BoundsError::InconsistentLedger { .. } => Failure::Inconsistent(e.to_string()),
        other => invalid(other),
    }
}

fn cmd_bounds(a: &BoundsArgs) -> CmdResult {
    if let Some(path) = &a.ledger {
        let ledger: BoundLedger = read_json(path)?;
        let closed = relation_close(&ledger).map_err(bounds_failure)?;
        return Ok((to_value(&closed), true));
    }
    let ctx = read_context(a.context.as_deref().expect("required by clap"))?;
    if a.theta.is_none() && a.lattice.is_none() {
        return Err(Failure::Invalid("give --theta, --lattice or both".into()));
    }
    let mut ledger = BoundLedger::new();
    if let Some(t) = &a.theta {
        let theta = parse_rational(t)?;
        ledger.merge(&element_ledger(&ctx, &theta).map_err(bounds_failure)?);
    }
    if let Some(path) = &a.lattice {
        let lattice = read_lattice(path)?;
        let eps = parse_rational(&a.epsilon)?;
        let lo = match theta_sup(&lattice, &eps).map_err(invalid)? {
            ThetaSup::Interval { lo, .. } => Some(lo),
            ThetaSup::Infinite => None,
        };
        let d = diameter_ledger(&ctx, &lattice.quotient_info(), lo.as_ref()).map_err(bounds_failure)?;
        ledger.merge(&d);
    }
    let closed = relation_close(&ledger).map_err(bounds_failure)?;
    Ok((to_value(&closed), true))
}

fn cmd_verdict(a: &VerdictArgs) -> CmdResult {
    let ctx = read_context(&a.context)?;
    let lattice = read_lattice(&a.lattice)?;
    let v = verdict(&ctx, &lattice).map_err(bounds_failure)?;
    Ok((to_value(&v), true))
}

fn cmd_catalog(a: &CatalogArgs) -> CmdResult {
    let find = |name: &str| catalog::fixture(name).ok_or_else(|| Failure::Invalid(format!("no fixture named {name:?}")));
    match &a.action {
        CatalogAction::List => {
            let list: Vec<Value> =
                catalog::all().iter().map(|f| json!({"name": f.name, "description": f.description})).collect();
            Ok((Value::Array(list), true))
        }
        CatalogAction::Show { name } => Ok((to_value(&find(name)?), true)),
        CatalogAction::Check { name: Some(name) } => {
            let report = catalog::check(&find(name)?);
            let ok = report.passed;
            Ok((to_value(&report), ok))
        }
        CatalogAction::Check { name: None } => {
            let reports: Vec<_> = catalog::all().iter().map(catalog::check).collect();
            let ok = reports.iter().all(|r| r.passed);
            Ok((to_value(&reports), ok))
        }
    }
}
