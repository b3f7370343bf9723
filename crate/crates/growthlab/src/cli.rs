//! Command-line front end.
//!
//! `build` emits schedule.json / table.csv / checkpoints.json, `check`
//! replays a verifier against saved artifacts and writes report.json,
//! `witness` extracts the collapsing-inequality violation, `algebra` runs
//! the monomial-algebra oracle. Exit codes: 0 pass, 1 property violation,
//! 2 policy or certification refusal, 3 I/O or malformed artifacts.

use crate::algebra::{self, MonomialAlgebraSpec, SpecFile};
use crate::growthfn::{
    verify_condition_i, verify_lower_bound, ConditionIReport, GrowthError, GrowthTable,
    LowerBoundReport,
};
use crate::io::{self, nat_to_hex, IoError, TableRow};
use crate::omega::Omega;
use crate::schedule::{
    build_schedule, BuildParams, Mode, Schedule, ScheduleError, DEFAULT_SCAN_CAP,
};
use crate::verify::{
    check_derivative_condition, check_dominance, check_increasing, check_submultiplicative,
    find_witness, DerivativeReport, MonotonicityReport, OwnedSeq, SeqView, Strategy, SubmulReport,
    VerifyError, EXHAUSTIVE_LIMIT,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_POLICY: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Rows beyond this go to checkpoints-only CSV unless --force-dense.
const DENSE_ROW_LIMIT: u64 = 100_000;

#[derive(Parser)]
#[command(
    name = "growthlab",
    version,
    about = "exact-arithmetic laboratory for staged growth functions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Build a parameter schedule and its growth table.
    Build(BuildArgs),
    /// Re-verify a property against saved artifacts.
    Check(CheckArgs),
    /// Extract the scheduled collapsing-inequality violation.
    Witness(WitnessArgs),
    /// Exact growth of a monomial algebra with forbidden factors.
    Algebra(AlgebraArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Certified,
    Demo,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Certified => Mode::Certified,
            ModeArg::Demo => Mode::Demo,
        }
    }
}

#[derive(Args)]
pub struct BuildArgs {
    /// Number of schedule stages.
    #[arg(long, default_value_t = 1)]
    pub depth: u32,
    #[arg(long, value_enum, default_value_t = ModeArg::Certified)]
    pub mode: ModeArg,
    /// Stage-ratio overrides (searched minimally when absent).
    #[arg(long)]
    pub d1: Option<u64>,
    #[arg(long)]
    pub d2: Option<u64>,
    #[arg(long)]
    pub d3: Option<u64>,
    /// Stage-length overrides (demo mode requires them).
    #[arg(long)]
    pub n1: Option<u64>,
    #[arg(long)]
    pub n2: Option<u64>,
    #[arg(long)]
    pub n3: Option<u64>,
    /// Decay profile: log, const:U/V, or file:PATH.
    #[arg(long)]
    pub omega: Option<String>,
    /// Table horizon; defaults to 4(n_K + 1).
    #[arg(long)]
    pub cap: Option<u64>,
    /// Abort the n_k search beyond this bound.
    #[arg(long, default_value_t = DEFAULT_SCAN_CAP)]
    pub scan_cap: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Write every table row even beyond the dense-row limit.
    #[arg(long)]
    pub force_dense: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Submul,
    Mono,
    Derivative,
    Lowerbound,
    #[value(name = "conditionI")]
    ConditionI,
    Dominance,
}

impl CheckKind {
    fn name(&self) -> &'static str {
        match self {
            CheckKind::Submul => "submul",
            CheckKind::Mono => "mono",
            CheckKind::Derivative => "derivative",
            CheckKind::Lowerbound => "lowerbound",
            CheckKind::ConditionI => "conditionI",
            CheckKind::Dominance => "dominance",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Exhaustive,
    Sampled,
    Boundary,
}

#[derive(Args)]
pub struct CheckArgs {
    /// Artifact directory holding table.csv (and schedule.json).
    #[arg(long, default_value = "out")]
    pub dir: PathBuf,
    #[arg(long, value_enum)]
    pub check: CheckKind,
    /// Pair enumeration for submul.
    #[arg(long, value_enum, default_value_t = StrategyArg::Exhaustive)]
    pub strategy: StrategyArg,
    #[arg(long, default_value_t = 20_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Boundary window half-width.
    #[arg(long, default_value_t = 64)]
    pub width: u64,
    /// Derivative exponent.
    #[arg(long, default_value_t = 2)]
    pub d: u64,
    /// Upper index bound (defaults to min(5000, horizon); lowerbound and
    /// dominance default to the full horizon).
    #[arg(long)]
    pub n_max: Option<u64>,
    /// Stage index for conditionI.
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    /// Decay profile override for dominance.
    #[arg(long)]
    pub omega: Option<String>,
}

#[derive(Args)]
pub struct WitnessArgs {
    #[arg(long, default_value = "out")]
    pub dir: PathBuf,
    /// Stage whose collapsing inequality is evaluated.
    #[arg(long = "C", default_value_t = 1)]
    pub c: u64,
}

#[derive(Args)]
pub struct AlgebraArgs {
    /// Alphabet size g (letters are digits 0..g-1).
    #[arg(long, conflicts_with = "spec")]
    pub alphabet: Option<u32>,
    /// Comma-separated forbidden words.
    #[arg(long, conflicts_with = "spec")]
    pub forbidden: Option<String>,
    /// JSON presentation {"alphabet": g, "forbidden": [...]}.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Top degree of the growth table.
    #[arg(long = "N", default_value_t = 64)]
    pub n: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

// --- error-to-exit-code plumbing -------------------------------------------

struct Failure {
    code: i32,
    msg: String,
}

type CmdResult<T> = Result<T, Failure>;

fn fail(code: i32, msg: impl Into<String>) -> Failure {
    Failure {
        code,
        msg: msg.into(),
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Failure {
        fail(EXIT_IO, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        fail(EXIT_IO, e.to_string())
    }
}

fn growth_code(e: &GrowthError) -> i32 {
    match e {
        GrowthError::OutOfRange { .. } => EXIT_IO,
        GrowthError::NotIncreasing { .. } => EXIT_VIOLATION,
        _ => EXIT_POLICY,
    }
}

impl From<GrowthError> for Failure {
    fn from(e: GrowthError) -> Failure {
        fail(growth_code(&e), e.to_string())
    }
}

impl From<ScheduleError> for Failure {
    fn from(e: ScheduleError) -> Failure {
        let code = match &e {
            ScheduleError::Table(g) => growth_code(g),
            _ => EXIT_POLICY,
        };
        fail(code, e.to_string())
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Failure {
        let code = match &e {
            VerifyError::OutOfRange { .. } => EXIT_IO,
            VerifyError::NotViolated { .. } => EXIT_VIOLATION,
            VerifyError::Growth(g) => growth_code(g),
            _ => EXIT_POLICY,
        };
        fail(code, e.to_string())
    }
}

impl From<algebra::AlgebraError> for Failure {
    fn from(e: algebra::AlgebraError) -> Failure {
        fail(EXIT_POLICY, e.to_string())
    }
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Build(a) => cmd_build(a),
        Cmd::Check(a) => cmd_check(a),
        Cmd::Witness(a) => cmd_witness(a),
        Cmd::Algebra(a) => cmd_algebra(a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            f.code
        }
    }
}

fn parse_omega(text: &str) -> CmdResult<Omega> {
    Omega::parse(text).map_err(|e| fail(EXIT_POLICY, e.to_string()))
}

fn load_schedule(dir: &Path) -> CmdResult<Schedule> {
    let path = dir.join("schedule.json");
    let body = std::fs::read_to_string(&path)
        .map_err(|e| fail(EXIT_IO, format!("{}: {e}", path.display())))?;
    Schedule::from_json(&body).map_err(|e| fail(EXIT_IO, e.to_string()))
}

// --- build -------------------------------------------------------------------

#[derive(Serialize)]
struct CheckpointRow {
    x: u64,
    f_hex: String,
    segment: String,
}

#[derive(Serialize)]
struct CheckpointsFile {
    boundaries: Vec<CheckpointRow>,
}

fn write_table_artifacts(dir: &Path, table: &GrowthTable, force_dense: bool) -> CmdResult<()> {
    let horizon = table.horizon();
    let label = |x: u64| table.segment_label_at(x).unwrap_or_else(|| "?".into());
    let mut rows: Vec<TableRow> = Vec::new();
    if horizon > 0 && (horizon <= DENSE_ROW_LIMIT || force_dense) {
        let mut x = 1;
        while x <= horizon {
            let hi = (x + 4095).min(horizon);
            for (i, f) in table.values_in(x, hi)?.into_iter().enumerate() {
                let xi = x + i as u64;
                rows.push(TableRow {
                    x: xi,
                    segment: label(xi),
                    f,
                });
            }
            x = hi + 1;
        }
    } else {
        rows.extend(table.checkpoints().iter().map(|(&x, f)| TableRow {
            x,
            segment: label(x),
            f: f.clone(),
        }));
    }
    io::write_table_csv(&dir.join("table.csv"), rows)?;
    let boundaries = table
        .checkpoints()
        .iter()
        .map(|(&x, f)| CheckpointRow {
            x,
            f_hex: nat_to_hex(f),
            segment: label(x),
        })
        .collect();
    io::write_json(&dir.join("checkpoints.json"), &CheckpointsFile { boundaries })?;
    Ok(())
}

fn cmd_build(a: BuildArgs) -> CmdResult<i32> {
    if a.depth > 3 {
        return Err(fail(
            EXIT_POLICY,
            "depth is capped at 3: override flags exist only for stages 1-3",
        ));
    }
    let omega = match &a.omega {
        Some(text) => Some(parse_omega(text)?),
        None => None,
    };
    let mut params = BuildParams {
        depth: a.depth,
        mode: a.mode.into(),
        d_overrides: BTreeMap::new(),
        n_overrides: BTreeMap::new(),
        omega,
        scan_cap: a.scan_cap,
    };
    for (k, v) in [(1u32, a.d1), (2, a.d2), (3, a.d3)] {
        if let Some(v) = v {
            params.d_overrides.insert(k, v);
        }
    }
    for (k, v) in [(1u32, a.n1), (2, a.n2), (3, a.n3)] {
        if let Some(v) = v {
            params.n_overrides.insert(k, v);
        }
    }
    let sched = build_schedule(&params)?;
    std::fs::create_dir_all(&a.out)?;
    io::atomic_write(&a.out.join("schedule.json"), sched.to_json().as_bytes())?;
    for e in &sched.entries {
        println!(
            "stage k={} d={} n={} m={} ledger={}",
            e.k,
            e.d,
            e.n,
            e.m,
            if e.ledger.pass() {
                "pass".to_string()
            } else {
                format!("fail[{}]", e.ledger.failed_ids().join(","))
            }
        );
    }
    let cap = a
        .cap
        .unwrap_or_else(|| sched.entries.last().map(|e| 4 * (e.n + 1)).unwrap_or(0));
    let table = GrowthTable::build(sched, cap, GrowthTable::default_mem_budget())?;
    write_table_artifacts(&a.out, &table, a.force_dense)?;
    println!(
        "build: horizon={} storage={} checkpoints={} out={}",
        table.horizon(),
        table.storage_mode(),
        table.checkpoints().len(),
        a.out.display()
    );
    Ok(EXIT_PASS)
}

// --- check -------------------------------------------------------------------

#[derive(Serialize)]
struct Report<T: Serialize> {
    version: &'static str,
    check: &'static str,
    params: BTreeMap<String, String>,
    result: T,
}

fn write_report<T: Serialize>(
    dir: &Path,
    check: &'static str,
    params: BTreeMap<String, String>,
    result: &T,
) -> CmdResult<()> {
    io::write_json(
        &dir.join("report.json"),
        &Report {
            version: env!("CARGO_PKG_VERSION"),
            check,
            params,
            result,
        },
    )?;
    Ok(())
}

/// Rows must form a contiguous index range to replay sequence checks.
fn contiguous_seq(rows: &[TableRow]) -> CmdResult<OwnedSeq> {
    let start = rows[0].x;
    let mut boundaries = Vec::new();
    for (i, w) in rows.windows(2).enumerate() {
        if w[1].x != w[0].x + 1 {
            return Err(fail(
                EXIT_IO,
                format!(
                    "table.csv jumps from x={} to x={}: sequence checks need dense rows \
                     (re-build with --force-dense)",
                    w[0].x, w[1].x
                ),
            ));
        }
        if w[1].segment != w[0].segment {
            boundaries.push(rows[i].x);
        }
    }
    let values = rows.iter().map(|r| r.f.clone()).collect();
    Ok(OwnedSeq::with_boundaries(start, values, boundaries))
}

fn cmd_check(a: CheckArgs) -> CmdResult<i32> {
    let table_path = a.dir.join("table.csv");
    let rows = io::read_table_csv(&table_path)
        .map_err(|e| fail(EXIT_IO, format!("{}: {e}", table_path.display())))?;
    if rows.is_empty() {
        return Err(fail(EXIT_IO, "table.csv has no data rows"));
    }
    for w in rows.windows(2) {
        if w[1].x <= w[0].x {
            return Err(fail(EXIT_IO, "table.csv rows are not in increasing x order"));
        }
    }
    let mut params = BTreeMap::new();
    params.insert("dir".to_string(), a.dir.display().to_string());
    match a.check {
        CheckKind::Submul | CheckKind::Mono | CheckKind::Derivative => {
            let seq = contiguous_seq(&rows)?;
            let n_max = a.n_max.unwrap_or(5000).min(seq.max_index());
            params.insert("n_max".to_string(), n_max.to_string());
            match a.check {
                CheckKind::Submul => {
                    let strategy = match a.strategy {
                        StrategyArg::Exhaustive => Strategy::Exhaustive,
                        StrategyArg::Sampled => Strategy::Sampled {
                            count: a.samples,
                            seed: a.seed,
                        },
                        StrategyArg::Boundary => Strategy::Boundary { width: a.width },
                    };
                    params.insert("strategy".to_string(), strategy.describe());
                    let report: SubmulReport = check_submultiplicative(&seq, n_max, strategy)?;
                    write_report(&a.dir, a.check.name(), params, &report)?;
                    println!(
                        "check submul: {} (pairs={}, filtered={})",
                        if report.pass { "pass" } else { "VIOLATION" },
                        report.pairs_checked,
                        report.fast_filtered
                    );
                    Ok(if report.pass { EXIT_PASS } else { EXIT_VIOLATION })
                }
                CheckKind::Mono => {
                    let report: MonotonicityReport =
                        check_increasing(&seq, seq.min_index(), n_max);
                    write_report(&a.dir, a.check.name(), params, &report)?;
                    println!(
                        "check mono: {} (checked={})",
                        if report.pass { "pass" } else { "VIOLATION" },
                        report.checked
                    );
                    Ok(if report.pass { EXIT_PASS } else { EXIT_VIOLATION })
                }
                CheckKind::Derivative => {
                    params.insert("d".to_string(), a.d.to_string());
                    let report: DerivativeReport = check_derivative_condition(&seq, a.d, n_max);
                    write_report(&a.dir, a.check.name(), params, &report)?;
                    match &report.violation {
                        None => println!("check derivative: pass (checked={})", report.checked),
                        Some(v) => println!(
                            "check derivative: VIOLATION at (n={}, m={})",
                            v.n, v.m
                        ),
                    }
                    Ok(if report.pass { EXIT_PASS } else { EXIT_VIOLATION })
                }
                _ => unreachable!(),
            }
        }
        CheckKind::Lowerbound | CheckKind::ConditionI | CheckKind::Dominance => {
            let sched = load_schedule(&a.dir)?;
            let horizon = rows.last().unwrap().x;
            let table = GrowthTable::build(sched, horizon, GrowthTable::default_mem_budget())?;
            for r in &rows {
                let rebuilt = table.value_at(r.x)?;
                if rebuilt != r.f {
                    return Err(fail(
                        EXIT_IO,
                        format!(
                            "table.csv row x={} disagrees with the schedule rebuild \
                             ({} vs {})",
                            r.x,
                            nat_to_hex(&r.f),
                            nat_to_hex(&rebuilt)
                        ),
                    ));
                }
            }
            match a.check {
                CheckKind::Lowerbound => {
                    let hi = a.n_max.unwrap_or(horizon);
                    params.insert("hi".to_string(), hi.to_string());
                    let report: LowerBoundReport = verify_lower_bound(&table, 1, hi)?;
                    write_report(&a.dir, a.check.name(), params, &report)?;
                    println!(
                        "check lowerbound: {} (checked={}, weak_at_one={})",
                        if report.pass { "pass" } else { "VIOLATION" },
                        report.checked,
                        report.weak_at_one
                    );
                    Ok(if report.pass { EXIT_PASS } else { EXIT_VIOLATION })
                }
                CheckKind::ConditionI => {
                    params.insert("k".to_string(), a.k.to_string());
                    let report: ConditionIReport = verify_condition_i(&table, a.k)?;
                    write_report(&a.dir, a.check.name(), params, &report)?;
                    println!(
                        "check conditionI: {} (range [{}, {}], route={})",
                        if report.pass { "pass" } else { "VIOLATION" },
                        report.lo,
                        report.hi,
                        report.route
                    );
                    Ok(if report.pass { EXIT_PASS } else { EXIT_VIOLATION })
                }
                CheckKind::Dominance => {
                    let omega = match &a.omega {
                        Some(text) => parse_omega(text)?,
                        None => table.schedule().omega.clone().ok_or_else(|| {
                            fail(
                                EXIT_POLICY,
                                "dominance needs --omega or a schedule built with one",
                            )
                        })?,
                    };
                    params.insert("omega".to_string(), omega.preset_string());
                    let report = check_dominance(&table, &omega)?;
                    write_report(&a.dir, a.check.name(), params, &report)?;
                    println!(
                        "check dominance: {} (range [{}, {}])",
                        if report.pass { "pass" } else { "VIOLATION" },
                        report.lo,
                        report.hi
                    );
                    Ok(if report.pass { EXIT_PASS } else { EXIT_VIOLATION })
                }
                _ => unreachable!(),
            }
        }
    }
}

// --- witness -------------------------------------------------------------------

#[derive(Serialize)]
struct WitnessFile {
    version: &'static str,
    #[serde(rename = "C")]
    c: u64,
    #[serde(rename = "D")]
    d_cap: u64,
    n: u64,
    lhs_hex: String,
    rhs_hex: String,
    lhs_bits: u64,
    rhs_bits: u64,
    /// Whether the collapsing inequality holds; false is the point.
    holds: bool,
}

fn cmd_witness(a: WitnessArgs) -> CmdResult<i32> {
    let sched = load_schedule(&a.dir)?;
    if sched.mode == Mode::Demo {
        return Err(fail(
            EXIT_POLICY,
            "witness extraction needs a certified schedule (demo artifacts are watermarked)",
        ));
    }
    let entry = sched
        .entry(u32::try_from(a.c).map_err(|_| fail(EXIT_POLICY, "C out of range"))?)
        .ok_or_else(|| {
            fail(
                EXIT_IO,
                format!("schedule has no stage k = {} (depth {})", a.c, sched.depth()),
            )
        })?;
    let (d, m) = (entry.d, entry.m);
    let n = m + 1;
    let d_cap = d * m / n;
    let top = 2 * a.c * d_cap * n;
    let table = GrowthTable::build(sched, top, GrowthTable::default_mem_budget())?;
    let w = find_witness(&table, a.c)?;
    io::write_json(
        &a.dir.join("witness.json"),
        &WitnessFile {
            version: env!("CARGO_PKG_VERSION"),
            c: w.c,
            d_cap: w.d_cap,
            n: w.n,
            lhs_hex: w.lhs_hex,
            rhs_hex: w.rhs_hex,
            lhs_bits: w.lhs_bits,
            rhs_bits: w.rhs_bits,
            holds: false,
        },
    )?;
    println!(
        "witness: C={} D={} n={} lhs_bits={} rhs_bits={} (inequality violated)",
        w.c, w.d_cap, w.n, w.lhs_bits, w.rhs_bits
    );
    Ok(EXIT_PASS)
}

// --- algebra -------------------------------------------------------------------

#[derive(Serialize)]
struct AlgebraConfig {
    alphabet: u32,
    forbidden_original: Vec<String>,
    forbidden_reduced: Vec<String>,
    dropped: Vec<String>,
    top_degree: u64,
}

#[derive(Serialize)]
struct BruteForceReport {
    max_len: u32,
    matches: bool,
}

#[derive(Serialize)]
struct AlgebraReport {
    version: &'static str,
    config: AlgebraConfig,
    degenerate: bool,
    /// Skipped (None) for degenerate specs, whose growth is constant.
    increasing: Option<MonotonicityReport>,
    submultiplicative: SubmulReport,
    derivative: Vec<DerivativeReport>,
    brute_force: BruteForceReport,
}

fn cmd_algebra(a: AlgebraArgs) -> CmdResult<i32> {
    let spec = match &a.spec {
        Some(path) => {
            let file: SpecFile = io::read_json(path)?;
            MonomialAlgebraSpec::from_file(&file)?
        }
        None => {
            let alphabet = a.alphabet.ok_or_else(|| {
                fail(EXIT_POLICY, "either --spec or --alphabet is required")
            })?;
            let words = a
                .forbidden
                .as_deref()
                .unwrap_or("")
                .split(',')
                .filter(|w| !w.is_empty())
                .map(String::from)
                .collect();
            MonomialAlgebraSpec::new(alphabet, words)?
        }
    };
    let table = algebra::growth_table(&spec, a.n);
    std::fs::create_dir_all(&a.out)?;
    let rows = table.gamma.iter().enumerate().map(|(x, f)| TableRow {
        x: x as u64,
        segment: "algebra".to_string(),
        f: f.clone(),
    });
    io::write_table_csv(&a.out.join("algebra-table.csv"), rows)?;

    let increasing = if table.degenerate {
        None
    } else {
        Some(check_increasing(&table, 0, a.n))
    };
    let submultiplicative =
        check_submultiplicative(&table, a.n.min(EXHAUSTIVE_LIMIT), Strategy::Exhaustive)?;
    let derivative: Vec<DerivativeReport> = [2u64, 3, 4]
        .iter()
        .map(|&d| check_derivative_condition(&table, d, a.n))
        .collect();

    // Cross-check the automaton against direct enumeration on the lengths
    // that stay cheap.
    let mut max_len = 0u32;
    while (spec.alphabet as u128).pow(max_len + 1) <= 100_000 && u64::from(max_len + 1) <= a.n.min(16)
    {
        max_len += 1;
    }
    let mut matches = true;
    for len in 0..=max_len {
        let brute = algebra::brute_force_count(&spec, len)?;
        if brute != table.counts[len as usize] {
            matches = false;
            break;
        }
    }

    let pass = increasing.as_ref().map_or(true, |r| r.pass)
        && submultiplicative.pass
        && derivative.iter().all(|r| r.pass)
        && matches;
    let report = AlgebraReport {
        version: env!("CARGO_PKG_VERSION"),
        config: AlgebraConfig {
            alphabet: spec.alphabet,
            forbidden_original: spec.forbidden_original.clone(),
            forbidden_reduced: spec.forbidden.clone(),
            dropped: spec.dropped.clone(),
            top_degree: a.n,
        },
        degenerate: table.degenerate,
        increasing,
        submultiplicative,
        derivative,
        brute_force: BruteForceReport { max_len, matches },
    };
    io::write_json(&a.out.join("algebra-report.json"), &report)?;
    println!(
        "algebra: g={} forbidden={:?} degenerate={} checks={}",
        spec.alphabet,
        spec.forbidden,
        table.degenerate,
        if pass { "pass" } else { "VIOLATION" }
    );
    Ok(if pass { EXIT_PASS } else { EXIT_VIOLATION })
}
