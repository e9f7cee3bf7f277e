//! `nsl`: ranks and torsion of Néron–Severi sublattices of Fermat and
//! Delsarte surfaces.

mod input;
mod manifest;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use nsl_core::alexander::{self, BoundsReport, BrieskornReport, TorsionOptions, DEFAULT_GROUP_BUDGET};
use nsl_core::census::{self, CensusConfig, Family};
use nsl_core::characters::{self, FermatParams, DEFAULT_ENUMERATION_BUDGET};
use nsl_core::fermat::{self, FermatRing, Mode, Partition, StabilizationReport, TkOptions, Variant};
use nsl_core::quotient::kernel_matrix;
use nsl_core::report::TorsionReport;
use nsl_core::{Error, FiniteQuotient, QuotientInvariants};

use manifest::{cached, Cache, Report, RunManifest, SCHEMA};

#[derive(Parser)]
#[command(name = "nsl", version, about = "Néron–Severi sublattices of Fermat and Delsarte surfaces")]
struct Cli {
    /// Override the size threshold of the computation
    #[arg(long, global = true)]
    budget: Option<u128>,
    /// Directory for cached results
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Single-line JSON output
    #[arg(long, global = true)]
    compact: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fermat varieties
    #[command(subcommand)]
    Fermat(FermatCmd),
    /// Delsarte surfaces given by a kernel lattice or an exponent matrix
    #[command(subcommand)]
    Delsarte(DelsarteCmd),
    /// The Brieskorn surface x^m1 + y^m2 + z^m3 = 1
    Brieskorn(BrieskornArgs),
    /// Seeded random survey of Delsarte quotients
    Census(CensusArgs),
}

#[derive(Subcommand)]
enum FermatCmd {
    /// Picard rank of the Fermat variety of degree m and dimension d
    Picard {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        d: u32,
        #[arg(long, value_enum, default_value_t = PicardMethod::Both)]
        method: PicardMethod,
    },
    /// Torsion of NS over the span of the linear subspaces in K
    Torsion {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        d: u32,
        /// `all`, or comma-separated indices into the lexicographic list
        #[arg(long, default_value = "all")]
        partitions: String,
        #[arg(long, default_value = "psi", value_parser = parse_variant)]
        variant: Variant,
        #[arg(long, value_enum, default_value_t = ModeArg::Certified)]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare the torsion for K in dimension s with its embedding in dimension d
    Stabilization {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        s: u32,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value = "all")]
        partitions: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PicardMethod {
    Chars,
    Formula,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Certified,
    Evidence,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    Variant::parse(s).map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum DelsarteCmd {
    /// Group structure, height, π1 and the rank of the span K
    Analyze(QuotientArgs),
    /// Everything `analyze` reports plus the torsion T and the bound checks
    Torsion(QuotientArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false, id = "source")]
struct QuotientSource {
    /// Rows of a 3x3 matrix whose columns generate the kernel, e.g. "3,0,0;0,3,0;0,0,3"
    #[arg(long)]
    kernel: Option<String>,
    /// 4x4 exponent matrix: a JSON file, or inline rows "a00,a01,a02,a03;..."
    #[arg(long)]
    matrix: Option<String>,
}

#[derive(Args)]
struct QuotientArgs {
    #[command(flatten)]
    source: QuotientSource,
    /// Always run the full Smith normal form
    #[arg(long)]
    exact: bool,
}

#[derive(Args)]
struct BrieskornArgs {
    /// m1,m2,m3
    #[arg(long)]
    exponents: String,
    #[arg(long)]
    exact: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    General,
    Cyclic,
    Unramified,
    Brieskorn,
}

#[derive(Clone, Copy, ValueEnum)]
enum CensusMethod {
    Exact,
    RankComparison,
}

#[derive(Args)]
struct CensusArgs {
    #[arg(long)]
    count: usize,
    /// Entries of the random kernel bases lie in [-bound, bound]
    #[arg(long, default_value_t = 5)]
    bound: i64,
    #[arg(long, default_value_t = 400)]
    max_order: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSONL output, one record per case
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = FamilyArg::General)]
    family: FamilyArg,
    /// Largest exponent for the Brieskorn family
    #[arg(long, default_value_t = 12)]
    max_exponent: u64,
    #[arg(long, value_enum, default_value_t = CensusMethod::Exact)]
    method: CensusMethod,
}

/// Failures, each with its exit status.
#[derive(Debug)]
enum Failure {
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn exit_status(e: &Error) -> u8 {
    match e {
        Error::TheoryViolation(_) => 2,
        Error::Budget { .. } => 3,
        _ => 1,
    }
}

const THEORY_VIOLATION: u8 = 2;

struct Ctx {
    cache: Option<Cache>,
    budget: Option<u128>,
    compact: bool,
    manifest: RunManifest,
}

impl Ctx {
    fn emit<T: Serialize>(&self, command: &str, result: &T) -> Result<(), Failure> {
        let report = Report { schema: SCHEMA, command, manifest: &self.manifest, result };
        let text = if self.compact { serde_json::to_string(&report) } else { serde_json::to_string_pretty(&report) };
        println!("{}", text.map_err(|e| Failure::Io(e.to_string()))?);
        Ok(())
    }

    fn torsion_options(&mut self, exact: bool) -> TorsionOptions {
        let group_budget = self.budget.map_or(DEFAULT_GROUP_BUDGET, |b| b.min(usize::MAX as u128) as usize);
        self.manifest.budget("group", group_budget);
        TorsionOptions { exact, group_budget }
    }

    fn tk_options(&mut self, mode: Mode, seed: u64) -> TkOptions {
        let mut o = TkOptions { mode, seed, ..TkOptions::default() };
        if let Some(b) = self.budget {
            o.basis_limit = b.min(usize::MAX as u128) as usize;
            o.presentation_budget = b;
            o.enumeration_budget = b;
        }
        self.manifest.budget("basis", o.basis_limit);
        self.manifest.budget("presentation", o.presentation_budget);
        self.manifest.budget("enumeration", o.enumeration_budget);
        self.manifest.seed = Some(seed);
        o
    }
}

fn main() -> ExitCode {
    if let Ok(n) = std::env::var("NSL_THREADS") {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("nsl: cannot set thread count: {e}");
                }
            }
            _ => {
                eprintln!("nsl: NSL_THREADS must be a positive integer, got {n:?}");
                return ExitCode::from(1);
            }
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Core(e)) => {
            eprintln!("nsl: {e}");
            ExitCode::from(exit_status(&e))
        }
        Err(Failure::Io(e)) => {
            eprintln!("nsl: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let cache = cli.cache.as_deref().map(Cache::open).transpose()?;
    let mut ctx = Ctx { cache, budget: cli.budget, compact: cli.compact, manifest: RunManifest::new() };
    match cli.command {
        Command::Fermat(FermatCmd::Picard { m, d, method }) => picard(&mut ctx, m, d, method),
        Command::Fermat(FermatCmd::Torsion { m, d, partitions, variant, mode, seed }) => {
            let mode = match mode {
                ModeArg::Certified => Mode::Certified,
                ModeArg::Evidence => Mode::Evidence,
            };
            fermat_torsion(&mut ctx, m, d, &partitions, variant, mode, seed)
        }
        Command::Fermat(FermatCmd::Stabilization { m, s, d, partitions, seed }) => stabilization(&mut ctx, m, s, d, &partitions, seed),
        Command::Delsarte(DelsarteCmd::Analyze(args)) => delsarte(&mut ctx, args, false),
        Command::Delsarte(DelsarteCmd::Torsion(args)) => delsarte(&mut ctx, args, true),
        Command::Brieskorn(args) => brieskorn(&mut ctx, args),
        Command::Census(args) => census(&mut ctx, args),
    }
}

#[derive(Serialize)]
struct PicardResult {
    m: u32,
    d: u32,
    rank: u64,
    by_characters: Option<u64>,
    by_formula: Option<u64>,
    agree: Option<bool>,
    note: Option<String>,
}

fn picard(ctx: &mut Ctx, m: u32, d: u32, method: PicardMethod) -> Result<u8, Failure> {
    let params = FermatParams::new(m, d)?;
    ctx.manifest.input("params", &format!("m={m};d={d}"));
    let budget = ctx.budget.unwrap_or(DEFAULT_ENUMERATION_BUDGET);
    ctx.manifest.budget("enumeration", budget);
    let want_chars = !matches!(method, PicardMethod::Formula);
    let want_formula = match method {
        PicardMethod::Formula if d != 2 => {
            return Err(Error::InvalidInput(format!("the closed formula is for surfaces, got d = {d}")).into());
        }
        PicardMethod::Formula => true,
        PicardMethod::Both => d == 2,
        PicardMethod::Chars => false,
    };
    let by_characters = if want_chars { Some(ctx.manifest.timed("characters", || characters::picard_rank(params, budget))?) } else { None };
    let by_formula = want_formula.then(|| characters::lines_rank_formula(m as u64));
    let applies = characters::formula_applies(m as u64);
    let mut note = None;
    let agree = match (by_characters, by_formula) {
        (Some(c), Some(f)) if applies => Some(c == f),
        (Some(_), Some(_)) => {
            note = Some(format!("the closed formula is not known to give the Picard rank for m = {m}; it counts only the lines"));
            None
        }
        (None, Some(_)) if !applies => {
            note = Some(format!("for m = {m} the closed formula counts only the lines and may fall short of the Picard rank"));
            None
        }
        _ => None,
    };
    if d == 2 && matches!(method, PicardMethod::Chars) && !applies {
        note = Some(format!("the closed formula alone does not give the Picard rank for m = {m}"));
    }
    let rank = by_characters.or(by_formula).expect("some method ran");
    let result = PicardResult { m, d, rank, by_characters, by_formula, agree, note };
    ctx.emit("fermat picard", &result)?;
    Ok(if agree == Some(false) { THEORY_VIOLATION } else { 0 })
}

#[derive(Debug, Serialize, Deserialize)]
struct FermatTorsionResult {
    m: u32,
    d: u32,
    variant: Variant,
    mode: Mode,
    partitions: Vec<Partition>,
    /// number of linear subspaces spanned
    subspaces: String,
    /// rank over Q of the span
    span_rank: u64,
    torsion: TorsionReport,
    trivial: bool,
    note: Option<String>,
}

fn fermat_torsion(ctx: &mut Ctx, m: u32, d: u32, partitions: &str, variant: Variant, mode: Mode, seed: u64) -> Result<u8, Failure> {
    let ring = FermatRing::new(m, d)?;
    let k = input::parse_partitions(partitions, d)?;
    let opts = ctx.tk_options(mode, seed);
    let canonical = format!(
        "m={m};d={d};variant={};mode={mode:?};seed={seed};k={}",
        variant.name(),
        k.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
    );
    ctx.manifest.input("problem", &canonical);
    let span_rank = ctx.manifest.timed("span rank", || fermat::lines_span_rank(ring, &k, opts.enumeration_budget))?;
    let check = |r: &FermatTorsionResult| {
        let m_big = BigInt::from(m);
        r.span_rank == span_rank
            && r.torsion.torsion().primes_divide(&m_big)
            && r.trivial == r.torsion.is_trivial()
            && (variant != Variant::Psi || r.torsion.relation_rank as u64 == span_rank)
    };
    let cache = ctx.cache.take();
    let result = cached(cache.as_ref(), &mut ctx.manifest, "fermat-torsion", &canonical, check, |manifest| {
        let torsion = manifest.timed("torsion", || fermat::torsion_tk(ring, &k, variant, opts))?.without_timing();
        let note = (mode == Mode::Evidence).then(|| {
            "evidence mode: ranks come from randomized sketches over several primes; \
             this run is not reported as certified"
                .to_string()
        });
        Ok::<_, Error>(FermatTorsionResult {
            m,
            d,
            variant,
            mode,
            subspaces: fermat::subspace_count(ring, &k).to_string(),
            span_rank,
            trivial: torsion.is_trivial(),
            torsion,
            note,
            partitions: k.clone(),
        })
    })?;
    ctx.cache = cache;
    ctx.emit("fermat torsion", &result)?;
    Ok(0)
}

fn stabilization(ctx: &mut Ctx, m: u32, s: u32, d: u32, partitions: &str, seed: u64) -> Result<u8, Failure> {
    let k = input::parse_partitions(partitions, s)?;
    let opts = ctx.tk_options(Mode::Certified, seed);
    ctx.manifest.input("problem", &format!("m={m};s={s};d={d};k={}", k.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")));
    let report: StabilizationReport = ctx.manifest.timed("stabilization", || fermat::verify_stabilization(m, s, d, &k, opts))?;
    ctx.emit("fermat stabilization", &report)?;
    Ok(if report.passed { 0 } else { THEORY_VIOLATION })
}

#[derive(Debug, Serialize, Deserialize)]
struct ExponentInfo {
    matrix: Vec<Vec<i64>>,
    degree: i64,
    det: String,
    /// whether |G| times the degree equals |det A|
    order_identity: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct DelsarteResult {
    /// kernel basis, one entry per column
    kernel: Vec<Vec<i64>>,
    exponent_matrix: Option<ExponentInfo>,
    invariants: QuotientInvariants,
    torsion: Option<TorsionReport>,
    bounds: Option<BoundsReport>,
}

fn read_quotient(ctx: &mut Ctx, source: &QuotientSource) -> Result<(FiniteQuotient, Option<ExponentInfo>), Failure> {
    if let Some(k) = &source.kernel {
        let cols = input::parse_kernel(k)?;
        ctx.manifest.input("kernel", &input::canonical_kernel(&cols));
        return Ok((FiniteQuotient::from_columns(&cols)?, None));
    }
    let given = source.matrix.as_deref().expect("clap requires a source");
    let (a, canonical) = if given.contains(';') { input::parse_exponent_rows(given)? } else { input::read_exponent_matrix(given.as_ref())? };
    ctx.manifest.input("matrix", &canonical);
    let ing = FiniteQuotient::from_exponent_matrix(&a)?;
    let info = ExponentInfo { matrix: a.a.iter().map(|r| r.to_vec()).collect(), degree: ing.degree, det: ing.det.to_string(), order_identity: ing.order_identity };
    Ok((ing.quotient, Some(info)))
}

fn delsarte(ctx: &mut Ctx, args: QuotientArgs, with_torsion: bool) -> Result<u8, Failure> {
    let (q, exponent_matrix) = read_quotient(ctx, &args.source)?;
    let invariants = ctx.manifest.timed("invariants", || q.invariants());
    let kernel = kernel_matrix(&q);
    let (torsion, bounds) = if with_torsion {
        let opts = ctx.torsion_options(args.exact);
        let canonical = format!("kernel={kernel:?};exact={}", args.exact);
        let check = |t: &TorsionReport| {
            t.relation_rank == alexander::expected_rank(&invariants) && (&invariants.exp_t_divisor % t.exponent()) == BigInt::from(0)
        };
        let cache = ctx.cache.take();
        let t = cached(cache.as_ref(), &mut ctx.manifest, "delsarte-torsion", &canonical, check, |manifest| {
            manifest.timed("torsion", || alexander::torsion_t(&q, opts)).map(TorsionReport::without_timing)
        })?;
        ctx.cache = cache;
        let b = alexander::verify_bounds(&q, &invariants, &t);
        (Some(t), Some(b))
    } else {
        (None, None)
    };
    let passed = bounds.as_ref().is_none_or(|b| b.passed);
    let result = DelsarteResult { kernel, exponent_matrix, invariants, torsion, bounds };
    ctx.emit(if with_torsion { "delsarte torsion" } else { "delsarte analyze" }, &result)?;
    Ok(if passed { 0 } else { THEORY_VIOLATION })
}

fn brieskorn(ctx: &mut Ctx, args: BrieskornArgs) -> Result<u8, Failure> {
    let m = input::parse_triple(&args.exponents)?;
    ctx.manifest.input("exponents", &format!("{},{},{}", m[0], m[1], m[2]));
    let opts = ctx.torsion_options(args.exact);
    let mut report: BrieskornReport = ctx.manifest.timed("brieskorn", || alexander::brieskorn(m, opts))?;
    report.torsion.timing = None;
    ctx.emit("brieskorn", &report)?;
    Ok(if report.passed { 0 } else { THEORY_VIOLATION })
}

#[derive(Serialize)]
struct BrieskornSummary {
    count: usize,
    nontrivial: usize,
    failures: usize,
    errors: usize,
    /// equal-exponent triples with nonzero torsion
    equal_exponent_nonzero: usize,
}

fn census(ctx: &mut Ctx, args: CensusArgs) -> Result<u8, Failure> {
    let exact = matches!(args.method, CensusMethod::Exact);
    let opts = ctx.torsion_options(exact);
    ctx.manifest.seed = Some(args.seed);
    let mut out = BufWriter::new(File::create(&args.out)?);
    let code = if let FamilyArg::Brieskorn = args.family {
        if args.max_exponent == 0 {
            return Err(Error::InvalidInput("max-exponent must be positive".into()).into());
        }
        ctx.manifest.input("census", &format!("brieskorn;count={};max_exponent={};seed={};exact={exact}", args.count, args.max_exponent, args.seed));
        let records = ctx.manifest.timed("census", || census::run_brieskorn_census(args.count, args.max_exponent, args.seed, opts));
        for r in &records {
            writeln!(out, "{}", serde_json::to_string(r).map_err(|e| Failure::Io(e.to_string()))?)?;
        }
        let reports: Vec<&BrieskornReport> = records.iter().filter_map(|r| r.report.as_ref()).collect();
        let summary = BrieskornSummary {
            count: records.len(),
            nontrivial: reports.iter().filter(|r| !r.torsion.is_trivial()).count(),
            failures: reports.iter().filter(|r| !r.passed).count(),
            errors: records.iter().filter(|r| r.error.is_some()).count(),
            equal_exponent_nonzero: reports
                .iter()
                .filter(|r| r.exponents[0] == r.exponents[1] && r.exponents[1] == r.exponents[2] && !r.torsion.is_trivial())
                .count(),
        };
        out.flush()?;
        ctx.emit("census", &summary)?;
        let theory_errors = records.iter().filter(|r| r.error.as_deref().is_some_and(|e| e.starts_with("theory violation"))).count();
        if summary.failures + summary.equal_exponent_nonzero + theory_errors > 0 {
            THEORY_VIOLATION
        } else if summary.errors > 0 {
            3
        } else {
            0
        }
    } else {
        if args.bound < 1 {
            return Err(Error::InvalidInput("bound must be positive".into()).into());
        }
        if args.max_order < 1 {
            return Err(Error::InvalidInput("max-order must be positive".into()).into());
        }
        let family = match args.family {
            FamilyArg::General => Family::General,
            FamilyArg::Cyclic => Family::Cyclic,
            _ => Family::Unramified,
        };
        let config = CensusConfig { count: args.count, bound: args.bound, max_order: args.max_order, seed: args.seed, family, torsion: opts };
        ctx.manifest.input("census", &serde_json::to_string(&config).map_err(|e| Failure::Io(e.to_string()))?);
        let records = ctx.manifest.timed("census", || census::run_census(&config));
        for r in &records {
            writeln!(out, "{}", serde_json::to_string(r).map_err(|e| Failure::Io(e.to_string()))?)?;
        }
        out.flush()?;
        let summary = census::summarize(&records);
        ctx.emit("census", &summary)?;
        if summary.violations > 0 {
            THEORY_VIOLATION
        } else if summary.errors > 0 {
            3
        } else {
            0
        }
    };
    Ok(code)
}
