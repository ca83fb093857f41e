use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use binmat::catalog::{build, list_patterns};
use binmat::detect::{canonical_form, find_induced, find_isomorphism, is_affine, Witness};
use binmat::search::{max_search_dim, minimum_size_search, Forcing, SearchSpec};
use binmat::verify::{run_all_with, run_claim, ClaimId, ClaimParams, ClaimResult, Status};
use binmat::{Flat, Matroid, PatternId, Point};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "binmat", version, about = "Binary matroids in PG(n-1, 2): construct, inspect, search and verify")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Machine-readable output
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every randomized step
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for search and verify
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Config file with `key = value` lines (seed, threads, max_dim, node_limit, time_limit_ms, trials)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a catalog pattern
    Construct {
        #[arg(long)]
        pattern: Option<String>,
        /// Print the pattern grammar and examples
        #[arg(long)]
        list: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Dimension, size, rank and a few properties
    Info { file: PathBuf },
    /// Look for induced copies of patterns
    Check {
        /// Patterns to look for, comma-separated
        #[arg(long)]
        free: String,
        /// Exit 1 if any pattern is present
        #[arg(long)]
        expect_free: bool,
        file: PathBuf,
    },
    /// Canonical form
    Canon { file: PathBuf },
    /// Isomorphism test
    Iso { a: PathBuf, b: PathBuf },
    /// Contract a flat given by generators
    Contract {
        file: PathBuf,
        #[arg(long)]
        flat: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Restrict to a flat given by generators
    Restrict {
        file: PathBuf,
        #[arg(long)]
        flat: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Minimum-size search under forbidden induced restrictions
    Search(SearchArgs),
    /// Check claims from the registry
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long)]
    dim: usize,
    /// Forbidden patterns, comma-separated
    #[arg(long)]
    forbid: String,
    #[arg(long)]
    full_rank: bool,
    /// List all isomorphism classes at the minimum
    #[arg(long)]
    classify: bool,
    /// Plant a pattern on the leading coordinates
    #[arg(long)]
    force: Option<String>,
    #[arg(long)]
    max_size: Option<usize>,
    #[arg(long)]
    node_limit: Option<u64>,
    #[arg(long)]
    time_limit_ms: Option<u64>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Claim id, e.g. MAIN-THM
    #[arg(long, conflicts_with = "all")]
    claim: Option<String>,
    /// Every claim at every registry parameter point
    #[arg(long)]
    all: bool,
    /// List claim ids
    #[arg(long)]
    list: bool,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    max_dim: Option<usize>,
    #[arg(long)]
    node_limit: Option<u64>,
    #[arg(long)]
    time_limit_ms: Option<u64>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Format {
    Text,
    Json,
}

#[derive(Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
struct Config {
    seed: Option<u64>,
    threads: Option<usize>,
    max_dim: Option<usize>,
    node_limit: Option<u64>,
    time_limit_ms: Option<u64>,
    trials: Option<usize>,
}

/// Flags first, then the config file, then defaults.
struct Settings {
    json: bool,
    seed: u64,
    threads: Option<usize>,
    config: Config,
}

/// Errors that map to exit code 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = if e.downcast_ref::<Usage>().is_some() || e.downcast_ref::<binmat::Error>().is_some() { 2 } else { 1 };
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let config = match &cli.global.config {
        Some(p) => {
            let src = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display())).map_err(|e| usage(format!("{e:#}")))?;
            toml::from_str::<Config>(&src).map_err(|e| usage(format!("config {}: {e}", p.display())))?
        }
        None => Config::default(),
    };
    let s = Settings {
        json: cli.global.json,
        seed: cli.global.seed.or(config.seed).unwrap_or(0),
        threads: cli.global.threads.or(config.threads),
        config,
    };
    match cli.command {
        Command::Construct { pattern, list, output, format } => construct(&s, pattern, list, output, format),
        Command::Info { file } => info(&s, &file),
        Command::Check { free, expect_free, file } => check(&s, &free, expect_free, &file),
        Command::Canon { file } => canon(&s, &file),
        Command::Iso { a, b } => iso(&s, &a, &b),
        Command::Contract { file, flat, output } => flat_op(&s, &file, &flat, output, true),
        Command::Restrict { file, flat, output } => flat_op(&s, &file, &flat, output, false),
        Command::Search(a) => search(&s, a),
        Command::Verify(a) => verify(&s, a),
    }
}

fn emit(s: &Settings, mut v: Value, text: impl FnOnce() -> String) {
    let body = if s.json {
        v.as_object_mut().expect("object").insert("schema_version".into(), json!(SCHEMA_VERSION));
        serde_json::to_string_pretty(&v).expect("serializable") + "\n"
    } else {
        text()
    };
    // a closed pipe (e.g. `| head`) is not an error
    let _ = std::io::stdout().lock().write_all(body.as_bytes());
}

fn load(path: &Path) -> Result<Matroid> {
    let src = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Matroid::parse_any(&src).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn patterns(list: &str) -> Result<Vec<PatternId>> {
    PatternId::parse_list(list).map_err(|e| usage(e.to_string()))
}

fn pattern(name: &str) -> Result<PatternId> {
    let p: PatternId = name.parse().map_err(|e: binmat::Error| usage(e.to_string()))?;
    p.validate().map_err(|e| usage(e.to_string()))?;
    Ok(p)
}

fn write_out(m: &Matroid, output: Option<PathBuf>, format: Format) -> Result<()> {
    let body = match format {
        Format::Text => m.to_text(),
        Format::Json => m.to_json() + "\n",
    };
    if let Some(p) = output {
        std::fs::write(&p, body).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn matroid_json(m: &Matroid) -> Value {
    json!({ "dim": m.dim(), "points": m.points() })
}

fn construct(s: &Settings, pattern_name: Option<String>, list: bool, output: Option<PathBuf>, format: Format) -> Result<u8> {
    if list {
        let pats = list_patterns();
        let rows: Vec<Value> = pats.iter().map(|(p, d)| json!({ "name": p.to_string(), "description": d })).collect();
        emit(s, json!({ "patterns": rows }), || pats.iter().map(|(p, d)| format!("{:<10} {d}\n", p.to_string())).collect());
        return Ok(0);
    }
    let Some(name) = pattern_name else { return Err(usage("construct needs --pattern or --list")) };
    let p = pattern(&name)?;
    let m = build(p)?;
    let to_stdout = output.is_none();
    write_out(&m, output, format)?;
    emit(s, json!({ "pattern": p.to_string(), "matroid": matroid_json(&m) }), || {
        if to_stdout {
            match format {
                Format::Text => m.to_text(),
                Format::Json => m.to_json() + "\n",
            }
        } else {
            String::new()
        }
    });
    Ok(0)
}

fn info(s: &Settings, file: &Path) -> Result<u8> {
    let m = load(file)?;
    let triangle_free = find_induced(&m, PatternId::Triangle)?.is_none();
    let (dim, size, rank, full, affine) = (m.dim(), m.len(), m.rank(), m.is_full_rank(), is_affine(&m));
    emit(
        s,
        json!({ "dim": dim, "size": size, "rank": rank, "full_rank": full, "triangle_free": triangle_free, "affine": affine }),
        || {
            format!(
                "dim {dim}\n|E| {size}\nrank {rank}\n{}\ntriangle-free: {}\naffine: {}\n",
                if full { "full-rank" } else { "rank-deficient" },
                yes(triangle_free),
                yes(affine)
            )
        },
    );
    Ok(0)
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn check(s: &Settings, list: &str, expect_free: bool, file: &Path) -> Result<u8> {
    let m = load(file)?;
    let pats = patterns(list)?;
    let mut found: Vec<(PatternId, Option<Witness>)> = Vec::new();
    for &p in &pats {
        found.push((p, find_induced(&m, p)?));
    }
    let free = found.iter().all(|(_, w)| w.is_none());
    let rows: Vec<Value> = found
        .iter()
        .map(|(p, w)| json!({ "pattern": p.to_string(), "present": w.is_some(), "witness": w.as_ref().map(|w| w.to_json_value()) }))
        .collect();
    emit(s, json!({ "free": free, "patterns": rows }), || {
        let mut out = String::new();
        for (p, w) in &found {
            match w {
                Some(w) => out.push_str(&format!("{p}: present on flat {:?}\n", w.flat.basis())),
                None => out.push_str(&format!("{p}: absent\n")),
            }
        }
        out.push_str(&format!("free: {}\n", yes(free)));
        out
    });
    Ok(if expect_free && !free { 1 } else { 0 })
}

fn canon(s: &Settings, file: &Path) -> Result<u8> {
    let m = load(file)?;
    let c = canonical_form(&m);
    emit(s, json!({ "canonical": serde_json::to_value(&c)? }), || {
        format!("rank {} corank {}\npoints {}\n", c.rank, c.corank, c.points.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" "))
    });
    Ok(0)
}

fn iso(s: &Settings, a: &Path, b: &Path) -> Result<u8> {
    let (ma, mb) = (load(a)?, load(b)?);
    let phi = find_isomorphism(&ma, &mb);
    let images = phi.as_ref().map(|p| p.images().to_vec());
    emit(s, json!({ "isomorphic": phi.is_some(), "map": images }), || match &images {
        Some(im) => format!("isomorphic: yes\nmap e_i -> {im:?}\n"),
        None => "isomorphic: no\n".into(),
    });
    Ok(0)
}

fn parse_flat(n: usize, gens: &str) -> Result<Flat> {
    let mut pts: Vec<Point> = Vec::new();
    for g in gens.split(',').map(str::trim).filter(|g| !g.is_empty()) {
        let v: u64 = g.parse().map_err(|_| usage(format!("bad generator `{g}`")))?;
        if v == 0 || v >= 1u64 << n {
            return Err(usage(format!("generator {v} is outside [1, 2^{n} - 1]")));
        }
        pts.push(v as Point);
    }
    Ok(Flat::span(n, pts))
}

fn flat_op(s: &Settings, file: &Path, gens: &str, output: Option<PathBuf>, contract: bool) -> Result<u8> {
    let m = load(file)?;
    let f = parse_flat(m.dim(), gens)?;
    let out = if contract { m.contract(&f) } else { m.restrict(&f) }.map_err(|e| usage(e.to_string()))?;
    let to_stdout = output.is_none();
    write_out(&out, output, Format::Text)?;
    emit(s, json!({ "flat": f.basis(), "matroid": matroid_json(&out) }), || if to_stdout { out.to_text() } else { String::new() });
    Ok(0)
}

fn search(s: &Settings, a: SearchArgs) -> Result<u8> {
    let forbidden = patterns(&a.forbid)?;
    let mut spec = SearchSpec::new(a.dim, forbidden).seed(s.seed);
    spec.require_full_rank = a.full_rank;
    spec.classify = a.classify;
    spec.max_size = a.max_size;
    spec.threads = s.threads;
    spec.node_limit = a.node_limit.or(s.config.node_limit);
    spec.time_limit = a.time_limit_ms.or(s.config.time_limit_ms).map(Duration::from_millis);
    spec.max_dim = s.config.max_dim.unwrap_or_else(max_search_dim);
    if let Some(name) = &a.force {
        let planted = build(pattern(name)?)?;
        spec.forcing = Some(Forcing::on_leading_coordinates(planted, a.dim).map_err(|e| usage(e.to_string()))?);
    }
    spec.validate().map_err(|e| usage(e.to_string()))?;
    let r = minimum_size_search(&spec)?;
    let extremal: Vec<Value> = r.extremal.iter().map(|c| json!({ "points": c.points, "rank": c.rank, "corank": c.corank })).collect();
    emit(
        s,
        json!({
            "dim": a.dim,
            "forbidden": spec.forbidden.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "full_rank": a.full_rank,
            "min_size": r.min_size,
            "lower_bound": r.lower_bound,
            "extremal": extremal,
            "example": r.example.as_ref().map(matroid_json),
            "solutions": r.solutions,
            "nodes": r.nodes,
            "elapsed_ms": r.elapsed_ms,
            "exhaustive": r.exhaustive,
            "seed": s.seed,
        }),
        || {
            let mut out = match r.min_size {
                Some(m) => format!("min size {m}\n"),
                None if r.exhaustive => "no matroid meets the constraints\n".into(),
                None => format!("undecided; sizes below {} excluded\n", r.lower_bound),
            };
            if !r.exhaustive {
                out.push_str("search budget exhausted: result is not exhaustive\n");
            }
            if let Some(ex) = &r.example {
                out.push_str(&format!("example: {:?}\n", ex.points()));
            }
            if a.classify {
                out.push_str(&format!("{} extremal class(es)\n", r.extremal.len()));
                for c in &r.extremal {
                    out.push_str(&format!("  {:?}\n", c.points));
                }
            }
            out.push_str(&format!("nodes {} in {} ms\n", r.nodes, r.elapsed_ms));
            out
        },
    );
    Ok(0)
}

fn verify(s: &Settings, a: VerifyArgs) -> Result<u8> {
    if a.list {
        let rows: Vec<Value> = ClaimId::ALL.iter().map(|c| json!({ "claim": c.name(), "sampled": c.is_sampled(), "statement": c.description() })).collect();
        emit(s, json!({ "claims": rows }), || ClaimId::ALL.iter().map(|c| format!("{:<12} {}\n", c.name(), c.description())).collect());
        return Ok(0);
    }
    let trials = a.trials.or(s.config.trials);
    let max_dim = a.max_dim.or(s.config.max_dim);
    let results: Vec<ClaimResult> = if a.all {
        run_all_with(max_dim.unwrap_or_else(max_search_dim), s.seed, trials)
    } else {
        let Some(name) = &a.claim else { return Err(usage("verify needs --claim, --all or --list")) };
        let id: ClaimId = name.parse().map_err(|e: binmat::Error| usage(e.to_string()))?;
        let params = ClaimParams {
            r: a.r,
            t: a.t,
            n: a.n,
            k: a.k,
            l: a.l,
            trials,
            seed: s.seed,
            threads: s.threads,
            node_limit: a.node_limit.or(s.config.node_limit),
            time_limit_ms: a.time_limit_ms.or(s.config.time_limit_ms),
            max_dim,
        };
        vec![run_claim(id, &params).map_err(|e| match e {
            binmat::Error::UnknownClaim(_) | binmat::Error::ClaimParams(_) | binmat::Error::DimensionTooLarge { .. } => usage(e.to_string()),
            e => e.into(),
        })?]
    };
    let failed = results.iter().any(|r| r.status == Status::Fail);
    let count = |st: Status| results.iter().filter(|r| r.status == st).count();
    emit(
        s,
        json!({
            "results": serde_json::to_value(&results)?,
            "pass": count(Status::Pass),
            "fail": count(Status::Fail),
            "inconclusive": count(Status::Inconclusive),
        }),
        || {
            let mut out = String::new();
            for r in &results {
                out.push_str(&format!("{} ({} ms)\n", r.summary(), r.elapsed_ms));
                if let Some(cx) = &r.counterexample {
                    out.push_str(&format!("  counterexample: {:?} (revalidated: {})\n", cx.matroid.points(), yes(cx.revalidated)));
                }
            }
            if results.len() > 1 {
                out.push_str(&format!("{} pass, {} fail, {} inconclusive\n", count(Status::Pass), count(Status::Fail), count(Status::Inconclusive)));
            }
            out
        },
    );
    Ok(if failed { 1 } else { 0 })
}
