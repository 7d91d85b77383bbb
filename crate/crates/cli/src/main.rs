//! `fbl-lab`: command-line front end for the `fbl-core` estimators.
//!
//! Every command prints one JSON document (schema `fbl-lab/1`) unless
//! `--format csv` is requested for a sweep. Exit codes: 0 success, 1 invalid
//! input, 2 numerical failure.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use fbl_core::duals::{self, DEFAULT_PARTITION_CAP};
use fbl_core::experiments::{self, CsvRow, IdRatioConfig, CSV_HEADER};
use fbl_core::fblnorm::{self, FunctionalTuple, DEFAULT_LP_GRID, DEFAULT_TUPLE_CAP};
use fbl_core::pap::{self, FamilyKind, VERIFY_GRID};
use fbl_core::solver::AscentConfig;
use fbl_core::{exponent, fvl};
use fbl_core::{AtomCombination, ControllingFamilySpec, LatticeExpr, NormedSpace, PointedPartition, Vector};

const SCHEMA: &str = "fbl-lab/1";
const THREADS_ENV: &str = "FBL_LAB_THREADS";

#[derive(Parser, Debug)]
#[command(name = "fbl-lab", version, about = "Norms and estimates in free p-convex Banach lattices")]
struct Cli {
    /// Seed for every random choice; identical arguments give identical output.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Include wall-clock runtimes (makes the output run-dependent).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Norm (or dual norm) of a vector.
    Norm {
        #[arg(long)]
        space: String,
        /// Comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Evaluate the dual norm instead.
        #[arg(long)]
        dual: bool,
    },
    /// Weak p-norm of a tuple of dual vectors.
    Weakp {
        #[arg(long)]
        space: String,
        #[arg(long)]
        p: String,
        /// Members separated by `;`, coordinates by `,` (or a JSON array of arrays).
        #[arg(long, allow_hyphen_values = true)]
        tuple: String,
    },
    /// Bounds for the norm of a lattice expression.
    Fblnorm(FblnormArgs),
    /// Norm of a finite combination of atoms in the dual of FBL^(p).
    Atomdual {
        #[command(flatten)]
        atoms: AtomArgs,
        /// Rows of the coefficient matrix searched for 1 < p < inf (default: number of atoms).
        #[arg(long)]
        m_cap: Option<usize>,
    },
    /// Partition lower bound for the dual of the upper p-convex lattice.
    #[command(name = "atomdual-upperp")]
    AtomdualUpperp {
        #[command(flatten)]
        atoms: AtomArgs,
        /// Enumerate partitions exactly up to this many atoms.
        #[arg(long, default_value_t = DEFAULT_PARTITION_CAP)]
        n_cap: usize,
    },
    /// Pointed partitions and positive approximation operators.
    Pap(PapArgs),
    /// Experiments.
    #[command(subcommand)]
    Exp(ExpCommand),
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum Bound {
    Lower,
    Upper,
    Sandwich,
}

#[derive(Args, Debug)]
struct FblnormArgs {
    #[arg(value_enum)]
    bound: Bound,
    #[arg(long)]
    space: String,
    /// Expression as inline JSON, or `@path` to read it from a file.
    #[arg(long)]
    expr: String,
    /// Convexity exponent (not used by `sandwich`).
    #[arg(long)]
    p: Option<String>,
    #[arg(long, default_value_t = DEFAULT_TUPLE_CAP)]
    tuple_cap: usize,
    #[arg(long, default_value_t = DEFAULT_LP_GRID)]
    grid_mass: usize,
    #[arg(long, default_value_t = DEFAULT_LP_GRID)]
    grid_test: usize,
    /// Sup-norm grid for `sandwich` (default depends on the dimension).
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Args, Debug)]
struct AtomArgs {
    #[arg(long)]
    space: String,
    #[arg(long)]
    p: String,
    /// `basis` for the canonical dual basis, inline JSON array of arrays, or `@path`.
    #[arg(long, allow_hyphen_values = true)]
    atoms: String,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum PapAction {
    Build,
    Apply,
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum Family {
    Fblp,
    Upperp,
}

#[derive(Args, Debug)]
struct PapArgs {
    #[arg(value_enum)]
    action: PapAction,
    #[arg(long)]
    space: String,
    #[arg(long, default_value_t = 16)]
    sectors: usize,
    #[arg(long, default_value_t = 0.5)]
    overlap: f64,
    /// Expression (inline JSON or `@path`); `verify` samples a family member when absent.
    #[arg(long)]
    expr: Option<String>,
    /// Exponent of the lattice norm used by `verify`.
    #[arg(long, default_value = "1")]
    p: String,
    #[arg(long, value_enum, default_value_t = Family::Fblp)]
    family: Family,
    /// Exponent of the controlling family (default: `--p`).
    #[arg(long)]
    family_p: Option<String>,
    /// Grid for uniform-distance and partition checks.
    #[arg(long, default_value_t = VERIFY_GRID)]
    grid: usize,
}

#[derive(Subcommand, Debug)]
enum ExpCommand {
    /// Ratio of FBL^(p) and FBL^(q) norms on random expressions.
    #[command(name = "id-ratio")]
    IdRatio {
        #[arg(long)]
        space: String,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0.05)]
        slack: f64,
        #[arg(long, default_value_t = DEFAULT_LP_GRID)]
        grid_mass: usize,
        #[arg(long, default_value_t = DEFAULT_LP_GRID)]
        grid_test: usize,
        #[arg(long, default_value_t = DEFAULT_TUPLE_CAP)]
        tuple_cap: usize,
    },
    /// Atom norms of the canonical basis of l1^n at p = 1 and p = inf.
    Remark67 {
        #[arg(long)]
        n: usize,
    },
    /// Weak-Lorentz witness and its dual growth.
    Remark68 {
        #[arg(long)]
        p: String,
        #[arg(long)]
        n: usize,
    },
    /// Growth of the weak-Lorentz witness against (ln n)^{1/p}.
    Cor65 {
        #[arg(long)]
        p: String,
        /// Comma-separated dimensions.
        #[arg(long, default_value = "2,4,8,16,32,64,128,256")]
        n: String,
    },
}

#[derive(Debug)]
enum CliError {
    Invalid(String),
    Numerical(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<fbl_core::Error> for CliError {
    fn from(e: fbl_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Invalid(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

/// Either a JSON document or CSV text.
enum Output {
    Json(Map<String, Value>),
    Csv(String),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    configure_threads()?;
    let started = Instant::now();
    let output = dispatch(cli)?;
    let text = match output {
        Output::Json(mut doc) => {
            if cli.timing {
                doc.insert("runtime_ms".into(), json!(started.elapsed().as_millis() as u64));
            }
            let mut body = Map::new();
            body.insert("schema".into(), json!(SCHEMA));
            body.extend(doc);
            let mut value = Value::Object(body);
            if !cli.timing {
                strip_runtimes(&mut value);
            }
            serde_json::to_string_pretty(&value).map_err(|e| CliError::Numerical(e.to_string()))? + "\n"
        }
        Output::Csv(text) => text,
    };
    match &cli.out {
        Some(path) => fs::write(path, text).map_err(|e| invalid(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| invalid(format!("cannot write output: {e}"))),
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| invalid(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| invalid(format!("cannot configure worker pool: {e}")))
}

/// Estimators record their own runtimes; drop them so output is reproducible.
fn strip_runtimes(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("runtime_ms");
            map.values_mut().for_each(strip_runtimes);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_runtimes),
        _ => {}
    }
}

fn dispatch(cli: &Cli) -> CliResult<Output> {
    let csv_only_for_sweeps = || invalid("csv output is only available for `exp id-ratio` and `exp cor65`");
    let json_only = |doc: Map<String, Value>| -> CliResult<Output> {
        match cli.format {
            Format::Json => Ok(Output::Json(doc)),
            Format::Csv => Err(csv_only_for_sweeps()),
        }
    };
    let ascent = AscentConfig {
        seed: cli.seed,
        ..AscentConfig::default()
    };
    match &cli.command {
        Command::Norm { space, x, dual } => {
            let space = parse_space(space)?;
            let x = parse_vector(x)?;
            let value = if *dual { space.dual_norm(&x)? } else { space.norm(&x)? };
            let mut doc = header("norm");
            doc.insert("space".into(), json!(space.to_string()));
            doc.insert("dual".into(), json!(dual));
            doc.insert("x".into(), json!(x));
            doc.insert("value".into(), json!(value));
            json_only(doc)
        }
        Command::Weakp { space, p, tuple } => {
            let space = parse_space(space)?;
            let p = parse_exp(p)?;
            let members = parse_vectors(tuple)?;
            let t = FunctionalTuple::new(space, members, p)?;
            let value = t.weak_p_norm(&ascent)?;
            let mut doc = header("weakp");
            doc.insert("space".into(), json!(space.to_string()));
            doc.insert("p".into(), exp_json(p));
            doc.insert("tuple".into(), to_json(&t.members)?);
            doc.insert("value".into(), json!(value));
            json_only(doc)
        }
        Command::Fblnorm(args) => json_only(fblnorm_cmd(args, cli.seed, &ascent)?),
        Command::Atomdual { atoms, m_cap } => {
            let (c, p) = parse_atoms(atoms)?;
            let m_cap = m_cap.unwrap_or(c.len().max(1));
            let est = duals::atom_norm_fbl_p(&c, p, &ascent, m_cap)?;
            let mut doc = header("atomdual");
            doc.insert("space".into(), json!(c.space.to_string()));
            doc.insert("p".into(), exp_json(p));
            doc.insert("atoms".into(), json!(c.len()));
            doc.insert("m_cap".into(), json!(m_cap));
            doc.insert("value".into(), json!(est.lower));
            doc.insert("estimate".into(), to_json(&est)?);
            json_only(doc)
        }
        Command::AtomdualUpperp { atoms, n_cap } => {
            let (c, p) = parse_atoms(atoms)?;
            let pv = duals::atom_norm_upper_p_bound(&c, p, *n_cap)?;
            let mut doc = header("atomdual-upperp");
            doc.insert("space".into(), json!(c.space.to_string()));
            doc.insert("p".into(), exp_json(p));
            doc.insert("atoms".into(), json!(c.len()));
            doc.insert("n_cap".into(), json!(n_cap));
            doc.insert("result".into(), to_json(&pv)?);
            json_only(doc)
        }
        Command::Pap(args) => json_only(pap_cmd(args, cli.seed, &ascent)?),
        Command::Exp(exp) => exp_cmd(exp, cli, &ascent),
    }
}

fn header(command: &str) -> Map<String, Value> {
    let mut doc = Map::new();
    doc.insert("command".into(), json!(command));
    doc
}

fn fblnorm_cmd(args: &FblnormArgs, seed: u64, ascent: &AscentConfig) -> CliResult<Map<String, Value>> {
    let space = parse_space(&args.space)?;
    let f = parse_expr(space, &args.expr)?;
    let need_p = || -> CliResult<f64> {
        let raw = args.p.as_deref().ok_or_else(|| invalid("--p is required for this bound"))?;
        parse_exp(raw)
    };
    let mut doc = header("fblnorm");
    doc.insert("space".into(), json!(space.to_string()));
    doc.insert("expr".into(), serde_json::from_str(&f.to_json()).map_err(|e| invalid(e.to_string()))?);
    match args.bound {
        Bound::Lower => {
            let p = need_p()?;
            let est = fblnorm::fbl_p_lower(&f, p, args.tuple_cap, ascent)?;
            doc.insert("bound".into(), json!("lower"));
            doc.insert("p".into(), exp_json(p));
            doc.insert("estimate".into(), to_json(&est)?);
        }
        Bound::Upper => {
            let p = need_p()?;
            let est = fblnorm::fbl_p_upper_lp(&f, p, args.grid_mass, args.grid_test, seed)?;
            doc.insert("bound".into(), json!("upper"));
            doc.insert("p".into(), exp_json(p));
            doc.insert("estimate".into(), to_json(&est)?);
        }
        Bound::Sandwich => {
            let grid = args.grid.unwrap_or_else(|| fvl::default_sup_grid(space.dim()));
            let (lo, hi) = fblnorm::sandwich_bounds(&f, grid, seed)?;
            doc.insert("bound".into(), json!("sandwich"));
            doc.insert("grid".into(), json!(grid));
            doc.insert("lower".into(), json!(lo));
            doc.insert("upper".into(), json!(hi));
        }
    }
    Ok(doc)
}

fn pap_cmd(args: &PapArgs, seed: u64, ascent: &AscentConfig) -> CliResult<Map<String, Value>> {
    use rand::SeedableRng;

    let space = parse_space(&args.space)?;
    if !(0.0..1.0).contains(&args.overlap) {
        return Err(invalid("--overlap must lie in [0, 1)"));
    }
    let alpha = PointedPartition::build(space, args.sectors, args.overlap)?;
    let mut doc = header("pap");
    doc.insert("space".into(), json!(space.to_string()));
    doc.insert("sectors".into(), json!(alpha.len()));
    doc.insert("overlap".into(), json!(alpha.overlap()));
    doc.insert("diam".into(), json!(alpha.diam()));
    match args.action {
        PapAction::Build => {
            doc.insert("action".into(), json!("build"));
            doc.insert("unity_residual".into(), json!(alpha.unity_residual(args.grid)?));
            doc.insert("peaks".into(), to_json(alpha.peaks())?);
        }
        PapAction::Apply => {
            let raw = args.expr.as_deref().ok_or_else(|| invalid("--expr is required for `pap apply`"))?;
            let f = parse_expr(space, raw)?;
            let image = pap::apply_p(&alpha, &f)?;
            doc.insert("action".into(), json!("apply"));
            doc.insert("coefficients".into(), json!(image.coefficients()));
            doc.insert("sup_deviation".into(), json!(pap::sup_distance(&image, &f, args.grid)?));
        }
        PapAction::Verify => {
            let p = parse_exp(&args.p)?;
            let fp = match &args.family_p {
                Some(raw) => parse_exp(raw)?,
                None => p,
            };
            let kind = match args.family {
                Family::Fblp => FamilyKind::FblP { p: fp },
                Family::Upperp => FamilyKind::UpperP { p: fp },
            };
            let spec = ControllingFamilySpec::new(kind, space.dim())?;
            doc.insert("action".into(), json!("verify"));
            doc.insert("p".into(), exp_json(p));
            doc.insert("family".into(), to_json(&spec)?);
            let report = match &args.expr {
                Some(raw) => {
                    let f = parse_expr(space, raw)?;
                    pap::verify_pap_bound(&alpha, &spec, &f, p, ascent)?
                }
                None => {
                    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                    let member = spec.sample_member(&space, &mut rng)?;
                    pap::verify_pap_bound(&alpha, &spec, &member, p, ascent)?
                }
            };
            doc.insert("report".into(), to_json(&report)?);
        }
    }
    Ok(doc)
}

fn exp_cmd(exp: &ExpCommand, cli: &Cli, ascent: &AscentConfig) -> CliResult<Output> {
    let rows_output = |mut doc: Map<String, Value>, rows: &[CsvRow]| -> CliResult<Output> {
        match cli.format {
            Format::Csv => Ok(Output::Csv(csv_text(rows))),
            Format::Json => {
                doc.insert("rows".into(), to_json(rows)?);
                Ok(Output::Json(doc))
            }
        }
    };
    let not_a_sweep = || invalid("csv output is only available for `exp id-ratio` and `exp cor65`");
    match exp {
        ExpCommand::IdRatio {
            space,
            p,
            q,
            trials,
            slack,
            grid_mass,
            grid_test,
            tuple_cap,
        } => {
            let space = parse_space(space)?;
            let (p, q) = (parse_exp(p)?, parse_exp(q)?);
            if !(*slack >= 0.0) || !slack.is_finite() {
                return Err(invalid("--slack must be a nonnegative number"));
            }
            let config = IdRatioConfig {
                trials: *trials,
                seed: cli.seed,
                slack: *slack,
                grid_mass: *grid_mass,
                grid_test: *grid_test,
                tuple_cap: *tuple_cap,
                ascent: ascent.clone(),
            };
            let report = experiments::check_id_ratio(space, p, q, &config)?;
            let mut doc = header("exp id-ratio");
            doc.insert("space".into(), json!(space.to_string()));
            doc.insert("p".into(), exp_json(p));
            doc.insert("q".into(), exp_json(q));
            doc.insert("alpha".into(), json!(report.alpha));
            doc.insert("bound".into(), json!(report.bound));
            doc.insert("max_ratio".into(), json!(report.max_ratio));
            doc.insert("violations".into(), json!(report.violations));
            doc.insert("config".into(), to_json(&config)?);
            rows_output(doc, &report.rows)
        }
        ExpCommand::Remark67 { n } => {
            if cli.format == Format::Csv {
                return Err(not_a_sweep());
            }
            let r = experiments::remark_6_7(*n)?;
            let mut doc = header("exp remark67");
            doc.insert("result".into(), to_json(&r)?);
            Ok(Output::Json(doc))
        }
        ExpCommand::Remark68 { p, n } => {
            if cli.format == Format::Csv {
                return Err(not_a_sweep());
            }
            let p = parse_exp(p)?;
            let r = experiments::remark_6_8(*n, p)?;
            let mut doc = header("exp remark68");
            doc.insert("R".into(), json!(r.growth));
            doc.insert("result".into(), to_json(&r)?);
            Ok(Output::Json(doc))
        }
        ExpCommand::Cor65 { p, n } => {
            let p = parse_exp(p)?;
            let ns = parse_list(n)?;
            let rows = experiments::cor_6_5_trend(p, &ns)?;
            let mut doc = header("exp cor65");
            doc.insert("p".into(), exp_json(p));
            rows_output(doc, &rows)
        }
    }
}

fn csv_text(rows: &[CsvRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}

fn to_json<T: serde::Serialize + ?Sized>(v: &T) -> CliResult<Value> {
    serde_json::to_value(v).map_err(|e| CliError::Numerical(format!("cannot serialize result: {e}")))
}

/// Exponents go out the way they come in: numbers, or `"inf"`.
fn exp_json(p: f64) -> Value {
    if p.is_infinite() {
        json!("inf")
    } else {
        json!(p)
    }
}

fn parse_space(s: &str) -> CliResult<NormedSpace> {
    Ok(s.parse::<NormedSpace>()?)
}

fn parse_exp(s: &str) -> CliResult<f64> {
    Ok(exponent::parse(s)?)
}

fn parse_vector(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            let v: f64 = t.parse().map_err(|_| invalid(format!("cannot parse coordinate {t:?}")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(invalid(format!("coordinate {t:?} is not finite")))
            }
        })
        .collect()
}

/// Reads `@path` arguments from disk; anything else is returned as is.
fn read_arg(s: &str) -> CliResult<String> {
    match s.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {path}: {e}"))),
        None => Ok(s.to_string()),
    }
}

/// A JSON array of arrays, or `;`-separated comma lists.
fn parse_vectors(s: &str) -> CliResult<Vec<Vector>> {
    let text = read_arg(s)?;
    let raw: Vec<Vec<f64>> = if text.trim_start().starts_with('[') {
        serde_json::from_str(&text).map_err(|e| invalid(format!("malformed JSON vector list: {e}")))?
    } else {
        text.split(';').map(parse_vector).collect::<CliResult<_>>()?
    };
    raw.into_iter().map(|v| Vector::new(v).map_err(CliError::from)).collect()
}

fn parse_atoms(args: &AtomArgs) -> CliResult<(AtomCombination, f64)> {
    let space = parse_space(&args.space)?;
    let p = parse_exp(&args.p)?;
    let c = if args.atoms.trim().eq_ignore_ascii_case("basis") {
        AtomCombination::canonical_basis(space)
    } else {
        AtomCombination::new(space, parse_vectors(&args.atoms)?)?
    };
    Ok((c, p))
}

fn parse_expr(space: NormedSpace, s: &str) -> CliResult<LatticeExpr> {
    Ok(LatticeExpr::from_json(space, &read_arg(s)?)?)
}

fn parse_list(s: &str) -> CliResult<Vec<usize>> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<usize>().map_err(|_| invalid(format!("cannot parse dimension {t:?}")))
        })
        .collect()
}
