//! Command-line front end. [`run`] is what the `clg` binary calls; it is
//! public so that tests and embedders can drive commands in-process.
//!
//! Exit codes: 0 success (battery passed), 1 battery failed, 2 input error,
//! 3 internal disagreement between definitions.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::cache::{resolve_cache_dir, Cache};
use crate::clset::{
    make_hyperplane_family, make_point_pencil, random_family, run_battery, BatteryData, BatteryLevel,
    CLCandidate, SpreadMode,
};
use crate::error::{Error, Result};
use crate::exactmath::{
    bound_fourth_power, count_disjoint, d2prime, eigenvalue_p, hyperplane_parameter, intersection_count,
    klaus_condition, num_kspaces, parameter_range, phi, qbinom, s1, s2prime, size_of_parameter,
    verify_eigenvalue_separation, w_component, w_sigma, w_sigma_bar, w_total, within_classification_bound,
    SchemeParams,
};
use crate::format::{write_atomic, ClksetFile};
use crate::projspace::{GeometryCtx, KFamily};
use crate::scheme::Scheme;
use crate::search::{check_search_cap, nonexistence_window, search_all, SearchConfig};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DISAGREE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "clg", version, about = "Cameron-Liebler sets of k-spaces in PG(n,q)")]
struct Cli {
    /// Cache directory (default: $CLG_CACHE, then ./.clg-cache).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BatteryArg {
    All,
    Fast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpreadsArg {
    Exhaustive,
    Reduced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Pencil,
    Hyperplane,
    Spread,
    Complement,
    Random,
}

#[derive(Debug, Clone)]
struct Rational(BigRational);

impl FromStr for Rational {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        BigRational::from_str(s.trim())
            .map(Rational)
            .map_err(|_| format!("{s:?} is not a rational number (use a or a/b)"))
    }
}

#[derive(Debug, clap::Args)]
struct Geometry {
    /// Projective dimension of the ambient space.
    #[arg(long)]
    n: u32,
    /// Field order, a prime power.
    #[arg(long)]
    q: u64,
    /// Projective dimension of the family members.
    #[arg(long)]
    k: u32,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form counts, eigenvalues and bounds.
    Formulas {
        #[command(flatten)]
        geo: Geometry,
        #[arg(long)]
        x: Option<Rational>,
        /// Relation index for eigenvalue and intersection-count details.
        #[arg(long)]
        i: Option<u32>,
        /// Eigenspace index, used with --i.
        #[arg(long)]
        j: Option<u32>,
        /// Number of mutually disjoint members for the skew-count audit.
        #[arg(long)]
        c: Option<u64>,
    },
    /// Runs the battery of equivalent definitions on a CLKSET file.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = BatteryArg::All)]
        battery: BatteryArg,
        #[arg(long, value_enum, default_value_t = SpreadsArg::Exhaustive)]
        spreads: SpreadsArg,
    },
    /// Writes a family as a CLKSET file.
    Construct {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        k: Option<u32>,
        /// Point id for pencils, hyperplane id for hyperplane families.
        #[arg(long, default_value_t = 0)]
        index: u32,
        /// Input file for --kind complement.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Family size for --kind random.
        #[arg(long)]
        size: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exhaustive search for all families with a parameter or in a window.
    Search {
        #[command(flatten)]
        geo: Geometry,
        #[arg(long, conflicts_with = "window", required_unless_present = "window")]
        x: Option<Rational>,
        /// Open interval (lo, hi) of parameters.
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        window: Option<Vec<Rational>>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long)]
        no_prune: bool,
        #[arg(long)]
        symmetry: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if code == EXIT_PASS { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Disagreement(_) | Error::InexactDivision(_) => EXIT_DISAGREE,
                _ => EXIT_INPUT,
            }
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let cache = Cache::new(resolve_cache_dir(cli.cache_dir.as_deref()));
    match &cli.command {
        Command::Formulas { geo, x, i, j, c } => {
            let params = SchemeParams::new(geo.n, geo.k, geo.q)?;
            let report = formulas_report(&params, x.as_ref().map(|r| &r.0), *i, *j, *c)?;
            emit_pairs(out, cli.format, &report)?;
            Ok(EXIT_PASS)
        }
        Command::Verify { input, battery, spreads } => cmd_verify(out, cli.format, &cache, input, *battery, *spreads),
        Command::Construct { kind, n, q, k, index, input, size, seed, out: path } => {
            cmd_construct(out, *kind, (*n, *q, *k), *index, input.as_deref(), *size, *seed, path)
        }
        Command::Search { geo, x, window, threads, no_prune, symmetry, out: dir } => {
            let params = SchemeParams::new(geo.n, geo.k, geo.q)?;
            let config = SearchConfig { prune: !*no_prune, threads: *threads, symmetry: *symmetry, ..Default::default() };
            let target = match (x, window) {
                (Some(x), _) => Target::Single(x.0.clone()),
                (None, Some(w)) => Target::Window(w[0].0.clone(), w[1].0.clone()),
                (None, None) => unreachable!("clap requires one of --x and --window"),
            };
            cmd_search(out, cli.format, &cache, params, target, &config, dir)
        }
    }
}

fn io(e: std::io::Error) -> Error {
    e.into()
}

fn kspace_word(k: u32) -> String {
    match k {
        0 => "points".into(),
        1 => "lines".into(),
        2 => "planes".into(),
        3 => "solids".into(),
        _ => format!("{k}-spaces"),
    }
}

/// Ordered `key: value` lines of the formulas command.
pub fn formulas_report(
    p: &SchemeParams,
    x: Option<&BigRational>,
    i: Option<u32>,
    j: Option<u32>,
    c: Option<u64>,
) -> Result<Vec<(String, String)>> {
    let mut r: Vec<(String, String)> = Vec::new();
    let mut put = |k: String, v: String| r.push((k, v));
    let SchemeParams { n, k, q } = *p;
    put("geometry".into(), p.to_string());
    put("points".into(), qbinom(n + 1, 1, q)?.to_string());
    put(kspace_word(k), num_kspaces(p).to_string());
    let row: Vec<String> = (0..=n + 1).map(|b| qbinom(n + 1, b, q).map(|v| v.to_string())).collect::<Result<_>>()?;
    put(format!("qbinom({},b) for b=0..{}", n + 1, n + 1), row.join(" "));
    put(format!("qbinom({n},{k})"), qbinom(n, k, q)?.to_string());
    for jj in 0..=k + 1 {
        let cells: Vec<String> = (0..=k + 1)
            .map(|ii| eigenvalue_p(jj, ii, p).map(|v| format!("P[{jj}][{ii}]={v}")))
            .collect::<Result<_>>()?;
        put(format!("P row {jj}"), cells.join(" "));
    }
    put(format!("disjoint from a fixed {k}-space"), count_disjoint(n, q, k, k).to_string());
    let sep: Vec<String> = (1..=k + 1)
        .map(|ii| verify_eigenvalue_separation(ii, p).map(|b| format!("{ii}:{b}")))
        .collect::<Result<_>>()?;
    put("eigenvalue_separation".into(), sep.join(" "));
    if p.has_disjoint_pairs() {
        let ws: Vec<String> = (-1..=k as i64)
            .map(|ii| w_component(ii, p).map(|v| format!("W_{ii}={v}")))
            .collect::<Result<_>>()?;
        put("W_i".into(), ws.join(" "));
        put("W".into(), w_total(p)?.to_string());
        put("W_sigma".into(), w_sigma(p)?.to_string());
        if n > 2 * k + 1 {
            put("W_sigma_bar".into(), w_sigma_bar(p)?.to_string());
        }
    }
    let (lo, hi) = parameter_range(p);
    put("parameter_range".into(), format!("({lo}, {hi})"));
    put("hyperplane_parameter".into(), hyperplane_parameter(p).to_string());
    put("f^4".into(), bound_fourth_power(p).to_string());
    if let (Some(ii), Some(jj)) = (i, j) {
        put(format!("P[{jj}][{ii}]"), eigenvalue_p(jj, ii, p)?.to_string());
        let v = phi(ii, jj, p)?.map_or("inf".to_string(), |e| e.to_string());
        put(format!("phi_{ii}({jj})"), v);
    }
    if let Some(x) = x {
        put("x".into(), x.to_string());
        put("size".into(), size_of_parameter(p, x).map_or("non-integral".into(), |s| s.to_string()));
        if p.has_disjoint_pairs() {
            put("s1".into(), s1(p, x)?.to_string());
            if let Some(ii) = i {
                put(format!("meeting in a ({k}-{ii})-space, member"), intersection_count(p, x, ii, true)?.to_string());
                put(format!("meeting in a ({k}-{ii})-space, non-member"), intersection_count(p, x, ii, false)?.to_string());
            }
        }
        if n > 3 * k + 1 {
            put("d2prime".into(), d2prime(p, x)?.to_string());
            put("s2prime".into(), s2prime(p, x)?.to_string());
        }
        if n >= 3 * k + 2 {
            put("within_bound".into(), within_classification_bound(p, x)?.to_string());
        }
        if let (Some(c), true) = (c, n > 2 * k + 1) {
            let a = klaus_condition(c, p, x)?;
            put(format!("skew_audit(c={c})"), format!("lhs={} rhs={} holds={}", a.lhs, a.rhs, a.holds));
        }
    }
    Ok(r)
}

fn emit_pairs(out: &mut dyn Write, format: OutputFormat, pairs: &[(String, String)]) -> Result<()> {
    match format {
        OutputFormat::Text => {
            for (k, v) in pairs {
                if k.starts_with("P row") {
                    writeln!(out, "{v}").map_err(io)?;
                } else {
                    writeln!(out, "{k}: {v}").map_err(io)?;
                }
            }
        }
        OutputFormat::Json => {
            let obj: Map<String, Value> = pairs.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
            writeln!(out, "{}", Value::Object(obj)).map_err(io)?;
        }
    }
    Ok(())
}

fn load_scheme(ctx: &GeometryCtx, cache: &Cache) -> Result<Scheme> {
    let relations = match cache.relations(ctx) {
        Ok((t, _)) => t,
        // An unwritable cache only costs time.
        Err(Error::Io(_)) => crate::scheme::RelationTable::build(ctx),
        Err(e) => return Err(e),
    };
    Scheme::with_relations(ctx, relations)
}

fn cmd_verify(
    out: &mut dyn Write,
    format: OutputFormat,
    cache: &Cache,
    input: &Path,
    battery: BatteryArg,
    spreads: SpreadsArg,
) -> Result<i32> {
    let file = ClksetFile::read(input)?;
    let ctx = GeometryCtx::enumerate(file.params)?;
    let family = file.to_family(&ctx)?;
    let scheme = load_scheme(&ctx, cache)?;
    let level = if battery == BatteryArg::Fast { BatteryLevel::Fast } else { BatteryLevel::All };
    let data = if level == BatteryLevel::All {
        let mode = if spreads == SpreadsArg::Reduced { SpreadMode::Reduced } else { SpreadMode::Exhaustive };
        BatteryData::generate(&ctx, mode)?
    } else {
        BatteryData::default()
    };
    let cand = CLCandidate::new(&ctx, family)?;
    let report = run_battery(&cand, &scheme, &data, level)?;
    match format {
        OutputFormat::Text => write!(out, "{}", report.render_text()).map_err(io)?,
        OutputFormat::Json => {
            let mut v = serde_json::to_value(&report).map_err(|e| Error::Io(e.to_string()))?;
            v["witness"] = serde_json::to_value(report.witness()).map_err(|e| Error::Io(e.to_string()))?;
            v["passed"] = json!(report.passed());
            writeln!(out, "{v}").map_err(io)?;
        }
    }
    Ok(if report.passed() == Some(true) { EXIT_PASS } else { EXIT_FAIL })
}

#[allow(clippy::too_many_arguments)]
fn cmd_construct(
    out: &mut dyn Write,
    kind: Kind,
    geo: (Option<u32>, Option<u64>, Option<u32>),
    index: u32,
    input: Option<&Path>,
    size: Option<usize>,
    seed: u64,
    path: &Path,
) -> Result<i32> {
    let source = match (kind, input) {
        (Kind::Complement, Some(p)) => Some(ClksetFile::read(p)?),
        (Kind::Complement, None) => return Err(Error::InvalidParams("--kind complement needs --in FILE".into())),
        _ => None,
    };
    let params = match (&source, geo) {
        (Some(f), _) => f.params,
        (None, (Some(n), Some(q), Some(k))) => SchemeParams::new(n, k, q)?,
        _ => return Err(Error::InvalidParams("--n, --q and --k are required".into())),
    };
    let ctx = GeometryCtx::enumerate(params)?;
    let family: KFamily = match kind {
        Kind::Pencil => make_point_pencil(index, &ctx)?.into_family(),
        Kind::Hyperplane => {
            if index as usize >= ctx.num_hyperplanes() {
                return Err(Error::InvalidParams(format!("hyperplane id {index} out of range")));
            }
            make_hyperplane_family(&ctx.hyperplane(index), &ctx)?.into_family()
        }
        Kind::Spread => ctx.construct_spread()?,
        Kind::Complement => {
            let f = source.as_ref().unwrap().to_family(&ctx)?;
            CLCandidate::new(&ctx, f)?.complement().into_family()
        }
        Kind::Random => {
            let size = size.ok_or_else(|| Error::InvalidParams("--kind random needs --size".into()))?;
            if size > ctx.num_kspaces() {
                return Err(Error::InvalidParams(format!("size {size} exceeds {} k-spaces", ctx.num_kspaces())));
            }
            random_family(&ctx, size, &mut ChaCha8Rng::seed_from_u64(seed))
        }
    };
    let cand = CLCandidate::new(&ctx, family)?;
    ClksetFile::from_family(&ctx, cand.family()).write(path)?;
    writeln!(out, "wrote {} k-spaces to {}", cand.len(), path.display()).map_err(io)?;
    writeln!(out, "x = {}", cand.x()).map_err(io)?;
    Ok(EXIT_PASS)
}

enum Target {
    Single(BigRational),
    Window(BigRational, BigRational),
}

fn cmd_search(
    out: &mut dyn Write,
    format: OutputFormat,
    cache: &Cache,
    params: SchemeParams,
    target: Target,
    config: &SearchConfig,
    dir: &Path,
) -> Result<i32> {
    check_search_cap(&params, config)?;
    let ctx = GeometryCtx::enumerate(params)?;
    let scheme = load_scheme(&ctx, cache)?;
    std::fs::create_dir_all(dir)?;
    let mut summary = format!("{params}\n");
    let mut found: Vec<KFamily> = Vec::new();
    let mut json_entries = Vec::new();
    match target {
        Target::Single(x) => {
            let res = search_all(&ctx, &scheme, &x, config)?;
            let size = res.size.map_or("non-integral".to_string(), |s| s.to_string());
            summary.push_str(&format!("x = {x}, size {size}: {} families, {} nodes", res.families.len(), res.stats.nodes));
            if let Some(reason) = &res.reason {
                summary.push_str(&format!(" ({reason})"));
            }
            summary.push('\n');
            json_entries.push(json!({
                "x_num": x.numer().to_string(), "x_den": x.denom().to_string(),
                "size": res.size, "families": res.families.len(), "stats": res.stats, "reason": res.reason,
            }));
            found = res.families;
        }
        Target::Window(lo, hi) => {
            let rep = nonexistence_window(&ctx, &scheme, &lo, &hi, config)?;
            summary.push_str(&format!("window ({lo}, {hi})\n"));
            for e in &rep.entries {
                summary.push_str(&format!("x = {}/{}, size {}: {} families, {} nodes", e.x_num, e.x_den, e.size, e.families, e.nodes));
                if let Some(reason) = &e.reason {
                    summary.push_str(&format!(" ({reason})"));
                }
                if let Some(b) = e.within_bound {
                    summary.push_str(&format!(", within_bound {b}"));
                }
                if let Some(k) = &e.klaus {
                    summary.push_str(&format!(", skew audit c={} holds {}", k.c, k.holds));
                }
                summary.push('\n');
                if e.families > 0 {
                    let x = BigRational::new(e.x_num.parse::<BigInt>().unwrap(), e.x_den.parse::<BigInt>().unwrap());
                    found.extend(search_all(&ctx, &scheme, &x, config)?.families);
                }
            }
            json_entries.push(serde_json::to_value(&rep).map_err(|e| Error::Io(e.to_string()))?);
        }
    }
    for (idx, f) in found.iter().enumerate() {
        ClksetFile::from_family(&ctx, f).write(&dir.join(format!("family-{:04}.clk", idx + 1)))?;
    }
    summary.push_str(&format!("{} families\n", found.len()));
    write_atomic(&dir.join("summary.txt"), summary.as_bytes())?;
    match format {
        OutputFormat::Text => write!(out, "{summary}").map_err(io)?,
        OutputFormat::Json => {
            let v = json!({ "n": params.n, "q": params.q, "k": params.k, "families": found.len(), "entries": json_entries });
            writeln!(out, "{v}").map_err(io)?;
        }
    }
    Ok(EXIT_PASS)
}

/// Entry point for the binary: real arguments and standard streams.
pub fn main_with_env() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["clg"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn formulas_examples() {
        let (code, out, _) = call(&["formulas", "--n", "3", "--q", "2", "--k", "1"]);
        assert_eq!(code, 0);
        assert!(out.contains("lines: 35"), "{out}");
        assert!(out.contains("P[0][1]=18"), "{out}");
        let (code, out, _) = call(&["formulas", "--n", "8", "--q", "2", "--k", "2", "--x", "2"]);
        assert_eq!(code, 0);
        assert!(out.contains("within_bound: true"), "{out}");
        let (code, _, err) = call(&["formulas", "--n", "3", "--q", "6", "--k", "1"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("6 = 2·3 not a prime power"), "{err}");
    }

    #[test]
    fn formulas_json_is_an_object() {
        let (code, out, _) = call(&["formulas", "--n", "5", "--q", "2", "--k", "1", "--x", "3", "--c", "3", "--format", "json"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v["lines"], "651");
        assert_eq!(v["within_bound"], "false");
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(call(&["search", "--n", "3"]).0, EXIT_INPUT);
        assert_eq!(call(&["bogus"]).0, EXIT_INPUT);
        assert_eq!(call(&["--help"]).0, EXIT_PASS);
    }
}
