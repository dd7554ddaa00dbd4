//! Command-line driver for exact superorthogonality verification.
//!
//! Exit codes: `0` — every requested check passed; `1` — a mathematical
//! violation was found (a report is still written); `2` — usage, parse,
//! or other operational errors. Malformed input never panics.
//!
//! All randomized campaigns are fully determined by their seed, and every
//! report except the benchmark timings is byte-identical across runs and
//! worker counts. The environment variable `SUPERORTHO_THREADS` caps the
//! number of worker threads.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use superortho::classifier::{classify, classify_naive, ClassificationReport, SuperType};
use superortho::estimates::{
    constant_bound, verify_decoupling, verify_haar_sqfn, verify_intermediate,
    verify_square_estimate, BoundMethod,
};
use superortho::families::{
    haar_grid, indicator_complement_family, typeiv_construction, DyadicInterval, TypeIVConfig,
};
use superortho::qk::{
    equivalence_campaign, equivalence_exhaustive_pm1, inequality_campaign, qk_bruteforce,
    qk_partition, qk_recursive, SequenceSet,
};
use superortho::random;
use superortho::scalar::{Rational, Scalar};
use superortho::stepfn::{Family, FamilyOrdering, StepFunction};

#[derive(Parser)]
#[command(
    name = "superortho",
    version,
    about = "Exact verification of superorthogonality types, distinct-index sums, and square function estimates"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify a family against the superorthogonality type chain.
    Classify(ClassifyArgs),
    /// Construct a built-in family and write it as JSON.
    Construct(ConstructArgs),
    /// Distinct-index sums: evaluation and randomized campaigns.
    #[command(subcommand)]
    Qk(QkCmd),
    /// Square function, two-term split, and decoupling estimates.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Timing comparisons between the fast paths and their oracles.
    #[command(subcommand)]
    Bench(BenchCmd),
}

/// Where a family comes from: a JSON file or a named built-in.
#[derive(Args, Clone)]
struct FamilySource {
    /// Family JSON file.
    #[arg(long, conflicts_with = "builtin")]
    file: Option<PathBuf>,
    /// Built-in constructor: haar_grid, indicator_complement, or typeiv.
    #[arg(long)]
    builtin: Option<String>,
    /// Root interval for haar_grid, e.g. "[0,1)".
    #[arg(long, default_value = "[0,1)")]
    root: String,
    /// Depth for haar_grid.
    #[arg(long)]
    depth: Option<u32>,
    /// Family size for indicator_complement and typeiv.
    #[arg(long)]
    n: Option<u32>,
    /// Half-tuple size for typeiv.
    #[arg(long)]
    k: Option<u32>,
    /// Comma-separated positive rational weights for typeiv.
    #[arg(long, value_delimiter = ',')]
    g: Option<Vec<String>>,
}

impl FamilySource {
    fn load(&self) -> Result<Family> {
        if let Some(path) = &self.file {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let fam: Family = serde_json::from_str(&text)
                .with_context(|| format!("parsing family JSON from {}", path.display()))?;
            return Ok(fam);
        }
        let name = self
            .builtin
            .as_deref()
            .ok_or_else(|| anyhow!("provide a family via --file or --builtin"))?;
        match name {
            "haar_grid" => {
                let root: DyadicInterval = self
                    .root
                    .parse()
                    .map_err(|e| anyhow!("invalid --root: {e}"))?;
                let depth = self.depth.ok_or_else(|| anyhow!("haar_grid needs --depth"))?;
                Ok(haar_grid(&root, depth)?)
            }
            "indicator_complement" => {
                let n = self
                    .n
                    .ok_or_else(|| anyhow!("indicator_complement needs --n"))?;
                Ok(indicator_complement_family(n)?)
            }
            "typeiv" => {
                let k = self.k.ok_or_else(|| anyhow!("typeiv needs --k"))?;
                let n = self.n.ok_or_else(|| anyhow!("typeiv needs --n"))?;
                let mut cfg = TypeIVConfig::new(k, n)?;
                if let Some(g) = &self.g {
                    let weights: Vec<Rational> = g
                        .iter()
                        .map(|s| s.parse::<Rational>())
                        .collect::<Result<_, _>>()
                        .map_err(|e| anyhow!("invalid --g entry: {e}"))?;
                    cfg = cfg.with_g(weights)?;
                }
                Ok(typeiv_construction(&cfg)?)
            }
            other => bail!("unknown builtin {other:?}; expected haar_grid, indicator_complement, or typeiv"),
        }
    }
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    source: FamilySource,
    /// Half-length of the tuples: the classification looks at 2r-tuples.
    #[arg(long)]
    r: u32,
    /// Comma-separated types to check (IV, III, II, I, I*); default all.
    #[arg(long, value_delimiter = ',')]
    types: Option<Vec<String>>,
    /// Use the tuple-by-tuple reference walk instead of class enumeration.
    #[arg(long)]
    naive: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConstructArgs {
    /// Family kind: haar_grid, indicator_complement, or typeiv.
    #[arg(long)]
    kind: String,
    #[arg(long, default_value = "[0,1)")]
    root: String,
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    g: Option<Vec<String>>,
    /// Write the family here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum QkCmd {
    /// Evaluate a distinct-index sum from a sequence file, exactly.
    Eval(QkEvalArgs),
    /// Randomized campaign for the distinct-index comparison.
    Check(QkCheckArgs),
    /// Randomized and exhaustive agreement of the three evaluators.
    Equiv(QkEquivArgs),
}

#[derive(Args)]
struct QkEvalArgs {
    /// Sequence file: {"k": 2, "sequences": [[…], …]}.
    #[arg(long)]
    file: PathBuf,
    /// Evaluator: partition, recursive, or bruteforce.
    #[arg(long, default_value = "partition")]
    method: String,
}

#[derive(Args)]
struct QkCheckArgs {
    /// Smallest number of sequences per instance (must be ≥ 2).
    #[arg(long)]
    k: u32,
    /// Largest number of sequences per instance; defaults to --k.
    #[arg(long)]
    k_max: Option<u32>,
    /// Largest sequence length.
    #[arg(long)]
    dim: usize,
    /// Smallest sequence length.
    #[arg(long, default_value_t = 1)]
    dim_min: usize,
    #[arg(long)]
    trials: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Restrict entries to rationals (no imaginary parts).
    #[arg(long)]
    real_only: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct QkEquivArgs {
    #[arg(long)]
    trials: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    k_max: u32,
    #[arg(long, default_value_t = 6)]
    dim_max: usize,
    /// Also sweep every ±1-entry grid up to this k.
    #[arg(long)]
    pm1_k: Option<u32>,
    /// Sequence-length cap for the ±1 sweep; defaults to 4.
    #[arg(long, default_value_t = 4)]
    pm1_dim: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Square function estimate with a certified constant.
    Square(VerifySquareArgs),
    /// Two-term split of the 2r-th power of the sum.
    Intermediate(VerifyIntermediateArgs),
    /// Decoupling estimate; interval-certified when roots are irrational.
    Decoupling(VerifySquareArgs),
    /// Martingale-difference square estimate for one function.
    HaarSqfn(VerifyHaarArgs),
}

#[derive(Args)]
struct VerifySquareArgs {
    #[command(flatten)]
    source: FamilySource,
    #[arg(long)]
    r: u32,
    /// Constant: baseline, optimized, or user:<rational>.
    #[arg(long, default_value = "baseline")]
    constant: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyIntermediateArgs {
    #[command(flatten)]
    source: FamilySource,
    #[arg(long)]
    r: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyHaarArgs {
    /// Step function JSON file.
    #[arg(long = "fn")]
    function: PathBuf,
    #[arg(long, default_value = "[0,1)")]
    root: String,
    #[arg(long)]
    depth: u32,
    #[arg(long)]
    r: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum BenchCmd {
    /// Class enumeration against the naive tuple walk on disjoint
    /// indicator families of the given sizes.
    Classify(BenchClassifyArgs),
    /// Partition evaluator against brute force on random sequences.
    Qk(BenchQkArgs),
}

#[derive(Args)]
struct BenchClassifyArgs {
    /// Comma-separated family sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    r: u32,
    /// Largest size on which the naive walk also runs.
    #[arg(long, default_value_t = 6)]
    naive_cap: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchQkArgs {
    #[arg(long)]
    k: u32,
    /// Comma-separated sequence lengths.
    #[arg(long, value_delimiter = ',', required = true)]
    dims: Vec<usize>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Brute force also runs while dim^k stays below this.
    #[arg(long, default_value_t = 200_000)]
    brute_cap: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let code = match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    };
    std::process::exit(code);
}

fn run() -> Result<i32> {
    if let Ok(threads) = std::env::var("SUPERORTHO_THREADS") {
        let threads: usize = threads
            .parse()
            .context("SUPERORTHO_THREADS must be a positive integer")?;
        if threads == 0 {
            bail!("SUPERORTHO_THREADS must be a positive integer");
        }
        // Ignore the error if a pool already exists (tests, repeat calls).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Classify(args) => cmd_classify(args),
        Cmd::Construct(args) => cmd_construct(args),
        Cmd::Qk(cmd) => match cmd {
            QkCmd::Eval(args) => cmd_qk_eval(args),
            QkCmd::Check(args) => cmd_qk_check(args),
            QkCmd::Equiv(args) => cmd_qk_equiv(args),
        },
        Cmd::Verify(cmd) => match cmd {
            VerifyCmd::Square(args) => cmd_verify_square(args, false),
            VerifyCmd::Decoupling(args) => cmd_verify_square(args, true),
            VerifyCmd::Intermediate(args) => cmd_verify_intermediate(args),
            VerifyCmd::HaarSqfn(args) => cmd_verify_haar(args),
        },
        Cmd::Bench(cmd) => match cmd {
            BenchCmd::Classify(args) => cmd_bench_classify(args),
            BenchCmd::Qk(args) => cmd_bench_qk(args),
        },
    }
}

/// Write a report to `--out` or stdout, always with a trailing newline.
fn emit(report: &serde_json::Value, out: Option<&Path>) -> Result<()> {
    let text = format!("{}\n", serde_json::to_string_pretty(report)?);
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn parse_types(types: Option<&[String]>) -> Result<Vec<SuperType>> {
    match types {
        None => Ok(SuperType::CHAIN.to_vec()),
        Some(names) => names
            .iter()
            .map(|name| {
                name.parse::<SuperType>()
                    .map_err(|e| anyhow!("invalid type {name:?}: {e}"))
            })
            .collect(),
    }
}

fn cmd_classify(args: ClassifyArgs) -> Result<i32> {
    let fam = args.source.load()?;
    let types = parse_types(args.types.as_deref())?;
    let report: ClassificationReport = if args.naive {
        classify_naive(&fam, args.r, &types)?
    } else {
        classify(&fam, args.r, &types)?
    };
    emit(&report.to_json(), args.out.as_deref())?;
    // A type that could not be evaluated (no ordering) also counts as
    // not established.
    let all_hold = types
        .iter()
        .all(|t| report.verdict(*t).map(|v| v.holds) == Some(Some(true)));
    Ok(if all_hold { 0 } else { 1 })
}

fn cmd_construct(args: ConstructArgs) -> Result<i32> {
    let source = FamilySource {
        file: None,
        builtin: Some(args.kind.clone()),
        root: args.root.clone(),
        depth: args.depth,
        n: args.n,
        k: args.k,
        g: args.g.clone(),
    };
    let fam = source.load()?;
    let json = serde_json::to_value(&fam)?;
    emit(&json, args.out.as_deref())?;
    Ok(0)
}

fn cmd_qk_eval(args: QkEvalArgs) -> Result<i32> {
    let text = std::fs::read_to_string(&args.file)
        .with_context(|| format!("reading {}", args.file.display()))?;
    let set: SequenceSet = serde_json::from_str(&text)
        .with_context(|| format!("parsing sequence JSON from {}", args.file.display()))?;
    let seqs = set.into_sequences()?;
    let value: Scalar = match args.method.as_str() {
        "partition" => qk_partition(&seqs)?,
        "recursive" => qk_recursive(&seqs)?,
        "bruteforce" => qk_bruteforce(&seqs)?,
        other => bail!("unknown method {other:?}; expected partition, recursive, or bruteforce"),
    };
    println!("{value}");
    Ok(0)
}

fn cmd_qk_check(args: QkCheckArgs) -> Result<i32> {
    if args.k < 2 {
        bail!("the distinct-index comparison needs --k at least 2");
    }
    let k_max = args.k_max.unwrap_or(args.k);
    let report = inequality_campaign(
        args.seed,
        args.trials,
        (args.k, k_max),
        (args.dim_min, args.dim),
        !args.real_only,
    )?;
    let clean = report.violations == 0;
    emit(&report.to_json(), args.out.as_deref())?;
    Ok(if clean { 0 } else { 1 })
}

fn cmd_qk_equiv(args: QkEquivArgs) -> Result<i32> {
    let random_part = equivalence_campaign(
        args.seed,
        args.trials,
        (1, args.k_max),
        (1, args.dim_max),
        true,
    )?;
    let mut clean = random_part.mismatches == 0;
    let mut json = serde_json::Map::new();
    json.insert("random".into(), random_part.to_json());
    if let Some(pm1_k) = args.pm1_k {
        let grid = equivalence_exhaustive_pm1(pm1_k, args.pm1_dim)?;
        clean = clean && grid.mismatches == 0;
        json.insert("pm1_grid".into(), grid.to_json());
    }
    emit(&serde_json::Value::Object(json), args.out.as_deref())?;
    Ok(if clean { 0 } else { 1 })
}

fn cmd_verify_square(args: VerifySquareArgs, decoupling: bool) -> Result<i32> {
    let fam = args.source.load()?;
    let method: BoundMethod = args.constant.parse()?;
    let bound = constant_bound(args.r, method)?;
    let (json, holds) = if decoupling {
        let report = verify_decoupling(&fam, args.r, &bound)?;
        (report.to_json(), report.holds)
    } else {
        let report = verify_square_estimate(&fam, args.r, &bound)?;
        (report.to_json(), report.holds)
    };
    emit(&json, args.out.as_deref())?;
    Ok(if holds { 0 } else { 1 })
}

fn cmd_verify_intermediate(args: VerifyIntermediateArgs) -> Result<i32> {
    let fam = args.source.load()?;
    let report = verify_intermediate(&fam, args.r)?;
    emit(&report.to_json(), args.out.as_deref())?;
    Ok(if report.holds { 0 } else { 1 })
}

fn cmd_verify_haar(args: VerifyHaarArgs) -> Result<i32> {
    let text = std::fs::read_to_string(&args.function)
        .with_context(|| format!("reading {}", args.function.display()))?;
    let f: StepFunction = serde_json::from_str(&text)
        .with_context(|| format!("parsing step function JSON from {}", args.function.display()))?;
    let root: DyadicInterval = args
        .root
        .parse()
        .map_err(|e| anyhow!("invalid --root: {e}"))?;
    let report = verify_haar_sqfn(&f, &root, args.depth, args.r)?;
    let holds = report.estimate.holds;
    emit(&report.to_json(), args.out.as_deref())?;
    Ok(if holds { 0 } else { 1 })
}

/// Disjoint unit indicators `[j, j+1)`, labeled by `j`.
fn disjoint_indicator_family(n: usize) -> Result<Family> {
    let members = (0..n)
        .map(|j| {
            let f = StepFunction::indicator(
                Rational::from_int(j as i64),
                Rational::from_int(j as i64 + 1),
            )?;
            Ok((j.to_string(), f))
        })
        .collect::<superortho::Result<Vec<_>>>()?;
    Ok(Family::new(members, FamilyOrdering::Natural)?)
}

fn cmd_bench_classify(args: BenchClassifyArgs) -> Result<i32> {
    if args.sizes.is_empty() {
        bail!("--sizes must not be empty");
    }
    let types = [SuperType::IV];
    let mut rows = Vec::new();
    let mut clean = true;
    for &n in &args.sizes {
        if n < 2 {
            bail!("family sizes must be at least 2");
        }
        let fam = disjoint_indicator_family(n)?;
        let start = Instant::now();
        let fast = classify(&fam, args.r, &types)?;
        let fast_ms = start.elapsed().as_secs_f64() * 1e3;
        let fast_verdict = fast.verdict(SuperType::IV).expect("requested").clone();

        let mut row = serde_json::Map::new();
        row.insert("n".into(), n.into());
        row.insert("classes_checked".into(), fast_verdict.classes_checked.into());
        row.insert("holds".into(), (fast_verdict.holds == Some(true)).into());
        row.insert("class_ms".into(), fast_ms.into());
        if n <= args.naive_cap {
            let start = Instant::now();
            let naive = classify_naive(&fam, args.r, &types)?;
            let naive_ms = start.elapsed().as_secs_f64() * 1e3;
            let agree =
                naive.verdict(SuperType::IV).expect("requested").holds == fast_verdict.holds;
            clean = clean && agree;
            row.insert("naive_ms".into(), naive_ms.into());
            row.insert("agree".into(), agree.into());
        }
        rows.push(serde_json::Value::Object(row));
    }
    emit(&serde_json::Value::Array(rows), args.out.as_deref())?;
    Ok(if clean { 0 } else { 1 })
}

fn cmd_bench_qk(args: BenchQkArgs) -> Result<i32> {
    if args.dims.is_empty() {
        bail!("--dims must not be empty");
    }
    if args.k < 1 {
        bail!("--k must be at least 1");
    }
    let mut rows = Vec::new();
    let mut clean = true;
    for (instance, &dim) in args.dims.iter().enumerate() {
        if dim == 0 {
            bail!("sequence lengths must be at least 1");
        }
        let mut rng = random::rng_for(args.seed, instance as u64);
        let seqs = random::sequences(&mut rng, args.k as usize, dim, true);
        let start = Instant::now();
        let fast = qk_partition(&seqs)?;
        let partition_us = start.elapsed().as_secs_f64() * 1e6;

        let mut row = serde_json::Map::new();
        row.insert("k".into(), args.k.into());
        row.insert("dim".into(), dim.into());
        row.insert("partition_us".into(), partition_us.into());
        if (dim as u64).pow(args.k) <= args.brute_cap {
            let start = Instant::now();
            let brute = qk_bruteforce(&seqs)?;
            let brute_us = start.elapsed().as_secs_f64() * 1e6;
            let equal = brute == fast;
            clean = clean && equal;
            row.insert("brute_us".into(), brute_us.into());
            row.insert("equal".into(), equal.into());
        }
        rows.push(serde_json::Value::Object(row));
    }
    emit(&serde_json::Value::Array(rows), args.out.as_deref())?;
    Ok(if clean { 0 } else { 1 })
}
