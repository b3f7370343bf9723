//! Necessary-condition checkers for growth sequences.
//!
//! Any increasing sequence claiming to be (equivalent to) the growth of a
//! finitely generated algebra must be submultiplicative, satisfy the
//! smoothed derivative bound, and satisfy the collapsing inequality
//! evaluated by `evaluate_p2`. `find_witness` picks the scheduled point
//! where the staged function f provably violates the latter.

use crate::exact::{cmp_nat_pow2, Nat};
use crate::growthfn::{GrowthError, GrowthTable};
use crate::io::nat_to_hex;
use crate::omega::Omega;
use crate::schedule::Mode;
use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::BTreeSet;
use thiserror::Error;

/// Largest n_max accepted for exhaustive pair enumeration.
pub const EXHAUSTIVE_LIMIT: u64 = 20_000;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("witness extraction needs a certified schedule")]
    Uncertified,
    #[error("index {x} outside the sequence range [{lo}, {hi}]")]
    OutOfRange { x: u64, lo: u64, hi: u64 },
    #[error("recipe range check failed: {0}")]
    RecipeRangeViolated(String),
    #[error("the collapsing inequality holds at C={c}, D={d_cap}, n={n}; no violation witnessed")]
    NotViolated { c: u64, d_cap: u64, n: u64 },
    #[error("exhaustive pair enumeration capped at n_max = {limit}, got {n_max}")]
    PairBudget { n_max: u64, limit: u64 },
    #[error("{0}")]
    BadInput(String),
    #[error(transparent)]
    Growth(#[from] GrowthError),
}

/// Read access to an integer-indexed sequence of exact values.
pub trait SeqView {
    fn min_index(&self) -> u64;
    fn max_index(&self) -> u64;
    /// Value at x; callers stay within [min_index, max_index].
    fn value(&self, x: u64) -> Nat;
    /// Distinguished indices (segment ends) for boundary-focused checks.
    fn boundaries(&self) -> Vec<u64> {
        Vec::new()
    }
    fn materialize(&self, lo: u64, hi: u64) -> Vec<Nat> {
        (lo..=hi).map(|x| self.value(x)).collect()
    }
}

/// In-memory sequence, e.g. parsed back from a table file.
#[derive(Debug, Clone)]
pub struct OwnedSeq {
    start: u64,
    values: Vec<Nat>,
    boundaries: Vec<u64>,
}

impl OwnedSeq {
    pub fn new(start: u64, values: Vec<Nat>) -> Self {
        OwnedSeq {
            start,
            values,
            boundaries: Vec::new(),
        }
    }

    pub fn with_boundaries(start: u64, values: Vec<Nat>, boundaries: Vec<u64>) -> Self {
        OwnedSeq {
            start,
            values,
            boundaries,
        }
    }
}

impl SeqView for OwnedSeq {
    fn min_index(&self) -> u64 {
        self.start
    }

    fn max_index(&self) -> u64 {
        self.start + self.values.len() as u64 - 1
    }

    fn value(&self, x: u64) -> Nat {
        self.values[(x - self.start) as usize].clone()
    }

    fn boundaries(&self) -> Vec<u64> {
        self.boundaries.clone()
    }

    fn materialize(&self, lo: u64, hi: u64) -> Vec<Nat> {
        self.values[(lo - self.start) as usize..=(hi - self.start) as usize].to_vec()
    }
}

impl SeqView for GrowthTable {
    fn min_index(&self) -> u64 {
        1
    }

    fn max_index(&self) -> u64 {
        self.horizon()
    }

    fn value(&self, x: u64) -> Nat {
        self.value_at(x).expect("index within [1, horizon]")
    }

    fn boundaries(&self) -> Vec<u64> {
        self.schedule()
            .boundaries()
            .into_iter()
            .filter(|&b| b <= self.horizon())
            .collect()
    }

    fn materialize(&self, lo: u64, hi: u64) -> Vec<Nat> {
        self.values_in(lo, hi).expect("range within [1, horizon]")
    }
}

// --- monotonicity ---------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    pub pass: bool,
    pub lo: u64,
    pub hi: u64,
    pub checked: u64,
    /// First x with f(x+1) ≤ f(x).
    pub first_violation: Option<u64>,
}

pub fn check_increasing(seq: &dyn SeqView, lo: u64, hi: u64) -> MonotonicityReport {
    let lo = lo.max(seq.min_index());
    let hi = hi.min(seq.max_index());
    let mut report = MonotonicityReport {
        pass: true,
        lo,
        hi,
        checked: 0,
        first_violation: None,
    };
    if lo >= hi {
        return report;
    }
    let values = seq.materialize(lo, hi);
    for (i, pair) in values.windows(2).enumerate() {
        report.checked += 1;
        if pair[1] <= pair[0] {
            report.pass = false;
            report.first_violation = Some(lo + i as u64);
            break;
        }
    }
    report
}

// --- submultiplicativity ----------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Every pair p ≤ q with p + q ≤ n_max.
    Exhaustive,
    /// Seeded uniform pairs; identical seeds replay identical pair streams.
    Sampled { count: u64, seed: u64 },
    /// Pairs with p, q, or p+q within `width` of a segment boundary.
    Boundary { width: u64 },
}

impl Strategy {
    pub fn describe(&self) -> String {
        match self {
            Strategy::Exhaustive => "exhaustive".to_string(),
            Strategy::Sampled { count, seed } => format!("sampled(count={count},seed={seed})"),
            Strategy::Boundary { width } => format!("boundary(width={width})"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PairViolation {
    pub p: u64,
    pub q: u64,
    pub lhs_hex: String,
    pub rhs_hex: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SubmulReport {
    pub pass: bool,
    pub n_max: u64,
    pub strategy: String,
    pub pairs_checked: u64,
    pub fast_filtered: u64,
    pub violation: Option<PairViolation>,
}

struct PairScan<'a> {
    values: &'a [Nat],
    bits: &'a [u64],
    start: u64,
    report: &'a mut SubmulReport,
}

impl PairScan<'_> {
    /// Returns true when scanning should stop (violation recorded).
    fn check(&mut self, p: u64, q: u64) -> bool {
        self.report.pairs_checked += 1;
        let (bl, bp, bq) = (
            self.bits[(p + q - self.start) as usize],
            self.bits[(p - self.start) as usize],
            self.bits[(q - self.start) as usize],
        );
        // f(p+q) < 2^bl and f(p)f(q) ≥ 2^(bp+bq−2): bit lengths alone
        // decide all but a two-octave band.
        if bl + 2 <= bp + bq {
            self.report.fast_filtered += 1;
            return false;
        }
        let lhs = &self.values[(p + q - self.start) as usize];
        let rhs = &self.values[(p - self.start) as usize] * &self.values[(q - self.start) as usize];
        if *lhs > rhs {
            self.report.pass = false;
            self.report.violation = Some(PairViolation {
                p,
                q,
                lhs_hex: nat_to_hex(lhs),
                rhs_hex: nat_to_hex(&rhs),
            });
            return true;
        }
        false
    }
}

/// Checks f(p+q) ≤ f(p)·f(q) over pairs p ≤ q, p+q ≤ n_max, under the
/// given enumeration strategy. Deterministic: exhaustive and boundary
/// scans report the lexicographically first violation, sampled scans the
/// first in seeded draw order.
pub fn check_submultiplicative(
    seq: &dyn SeqView,
    n_max: u64,
    strategy: Strategy,
) -> Result<SubmulReport, VerifyError> {
    let start = seq.min_index().max(1);
    let n_max = n_max.min(seq.max_index());
    let mut report = SubmulReport {
        pass: true,
        n_max,
        strategy: strategy.describe(),
        pairs_checked: 0,
        fast_filtered: 0,
        violation: None,
    };
    if n_max < 2 * start {
        return Ok(report);
    }
    if strategy == Strategy::Exhaustive && n_max > EXHAUSTIVE_LIMIT {
        return Err(VerifyError::PairBudget {
            n_max,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    let values = seq.materialize(start, n_max);
    let bits: Vec<u64> = values.iter().map(|v| v.bits()).collect();
    let mut scan = PairScan {
        values: &values,
        bits: &bits,
        start,
        report: &mut report,
    };
    match strategy {
        Strategy::Exhaustive => {
            'outer: for p in start..=n_max / 2 {
                for q in p..=n_max - p {
                    if scan.check(p, q) {
                        break 'outer;
                    }
                }
            }
        }
        Strategy::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..count {
                let p = rng.gen_range(start..=n_max / 2);
                let q = rng.gen_range(p..=n_max - p);
                if scan.check(p, q) {
                    break;
                }
            }
        }
        Strategy::Boundary { width } => {
            let mut window: BTreeSet<u64> = BTreeSet::new();
            for b in seq.boundaries() {
                for x in b.saturating_sub(width)..=b.saturating_add(width) {
                    if x >= start && x <= n_max {
                        window.insert(x);
                    }
                }
            }
            'bouter: for p in start..=n_max / 2 {
                let q_hi = n_max - p;
                if window.contains(&p) {
                    for q in p..=q_hi {
                        if scan.check(p, q) {
                            break 'bouter;
                        }
                    }
                } else {
                    let mut qs: BTreeSet<u64> =
                        window.range(p..=q_hi).copied().collect();
                    for &b in window.iter() {
                        if let Some(q) = b.checked_sub(p) {
                            if q >= p && q <= q_hi {
                                qs.insert(q);
                            }
                        }
                    }
                    for q in qs {
                        if scan.check(p, q) {
                            break 'bouter;
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

// --- derivative condition ---------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct DerivativeViolation {
    pub n: u64,
    pub m: u64,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct DerivativeReport {
    pub pass: bool,
    pub d: u64,
    pub n_max: u64,
    pub checked: u64,
    pub violation: Option<DerivativeViolation>,
}

fn bigint_pow(base: &BigInt, mut e: u64) -> BigInt {
    let mut acc = BigInt::one();
    let mut sq = base.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &sq;
        }
        e >>= 1;
        if e > 0 {
            sq = &sq * &sq;
        }
    }
    acc
}

/// Checks the smoothed derivative bound f'(m) ≤ f'(n)^d for all
/// n ≤ m ≤ d·n within [min_index+1, n_max], reporting the
/// lexicographically first violating (n, m). Derivatives are taken from
/// the sequence's own start: an algebra table contributes f'(1) relative
/// to f(0) = 1, while the staged f contributes from f'(2).
pub fn check_derivative_condition(seq: &dyn SeqView, d: u64, n_max: u64) -> DerivativeReport {
    let n0 = seq.min_index() + 1;
    let n_max = n_max.min(seq.max_index());
    let mut report = DerivativeReport {
        pass: true,
        d,
        n_max,
        checked: 0,
        violation: None,
    };
    if n_max < n0 {
        return report;
    }
    let values = seq.materialize(n0 - 1, n_max);
    let deriv: Vec<BigInt> = values
        .windows(2)
        .map(|w| BigInt::from(w[1].clone()) - BigInt::from(w[0].clone()))
        .collect();
    let at = |x: u64| &deriv[(x - n0) as usize];
    'outer: for n in n0..=n_max {
        let rhs = bigint_pow(at(n), d);
        let m_hi = n.saturating_mul(d).min(n_max);
        for m in n..=m_hi {
            report.checked += 1;
            if *at(m) > rhs {
                report.pass = false;
                report.violation = Some(DerivativeViolation {
                    n,
                    m,
                    lhs: at(m).to_string(),
                    rhs: rhs.to_string(),
                });
                break 'outer;
            }
        }
    }
    report
}

// --- collapsing inequality ----------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct P2Evaluation {
    pub c: u64,
    pub d_cap: u64,
    pub n: u64,
    pub lhs_hex: String,
    pub rhs_hex: String,
    pub lhs_bits: u64,
    pub rhs_bits: u64,
    pub holds: bool,
}

/// Evaluates f(2CDn) − f(2CDn−C) ≤ 2D²n·(f(CDn) − f(Cn−C))^(2D) exactly.
pub fn evaluate_p2(
    seq: &dyn SeqView,
    c: u64,
    d_cap: u64,
    n: u64,
) -> Result<P2Evaluation, VerifyError> {
    if c == 0 || d_cap == 0 || n == 0 {
        return Err(VerifyError::BadInput(
            "C, D, n must all be positive".into(),
        ));
    }
    let cdn = c
        .checked_mul(d_cap)
        .and_then(|v| v.checked_mul(n))
        .ok_or_else(|| VerifyError::BadInput("CDn overflows".into()))?;
    let top = cdn
        .checked_mul(2)
        .ok_or_else(|| VerifyError::BadInput("2CDn overflows".into()))?;
    let lo_point = c
        .checked_mul(n)
        .ok_or_else(|| VerifyError::BadInput("Cn overflows".into()))?
        - c;
    let floor = seq.min_index().max(1);
    if lo_point < floor || top > seq.max_index() {
        return Err(VerifyError::OutOfRange {
            x: if lo_point < floor { lo_point } else { top },
            lo: floor,
            hi: seq.max_index(),
        });
    }
    let lhs = BigInt::from(seq.value(top)) - BigInt::from(seq.value(top - c));
    let base = BigInt::from(seq.value(cdn)) - BigInt::from(seq.value(lo_point));
    let rhs = BigInt::from(2u64) * BigInt::from(d_cap) * BigInt::from(d_cap) * BigInt::from(n)
        * bigint_pow(&base, 2 * d_cap);
    let holds = lhs <= rhs;
    let to_hex = |v: &BigInt| {
        let (sign, mag) = v.clone().into_parts();
        let s = nat_to_hex(&mag);
        if sign == num_bigint::Sign::Minus {
            format!("-{s}")
        } else {
            s
        }
    };
    Ok(P2Evaluation {
        c,
        d_cap,
        n,
        lhs_bits: lhs.bits(),
        rhs_bits: rhs.bits(),
        lhs_hex: to_hex(&lhs),
        rhs_hex: to_hex(&rhs),
        holds,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub c: u64,
    pub d_cap: u64,
    pub n: u64,
    pub lhs_hex: String,
    pub rhs_hex: String,
    pub lhs_bits: u64,
    pub rhs_bits: u64,
}

/// Extracts the scheduled violation of the collapsing inequality at stage
/// C: n = m_C + 1 and D = ⌊d_C·m_C/n⌋ place all four evaluation points
/// inside the C-th arithmetic/geometric window, where the inequality
/// provably fails. Only certified tables qualify.
pub fn find_witness(table: &GrowthTable, c: u64) -> Result<Witness, VerifyError> {
    if table.schedule().mode == Mode::Demo || !table.schedule().is_certified() {
        return Err(VerifyError::Uncertified);
    }
    let entry = table
        .schedule()
        .entry(u32::try_from(c).map_err(|_| VerifyError::BadInput("C out of range".into()))?)
        .ok_or(VerifyError::OutOfRange {
            x: c,
            lo: 1,
            hi: table.schedule().depth() as u64,
        })?;
    let (d, m) = (entry.d, entry.m);
    let n = m + 1;
    let d_cap = d * m / n;
    let nk = entry.n;
    let dnk = d * nk;
    // Range guarantees behind the witness: every failure is a recipe bug
    // or an uncertified schedule slipping through, so check explicitly.
    let checks: [(&str, bool); 5] = [
        ("2D >= d", 2 * d_cap >= d),
        ("D <= d", d_cap <= d),
        ("Cn - C = n_k", c * n - c == nk),
        ("CDn <= d_k n_k", c * d_cap * n <= dnk),
        ("2CDn - C >= d_k n_k", 2 * c * d_cap * n - c >= dnk),
    ];
    for (what, ok) in checks {
        if !ok {
            return Err(VerifyError::RecipeRangeViolated(format!(
                "{what} fails at C={c}, D={d_cap}, n={n}"
            )));
        }
    }
    let top = 2 * c * d_cap * n;
    if table.horizon() < top {
        return Err(VerifyError::OutOfRange {
            x: top,
            lo: 1,
            hi: table.horizon(),
        });
    }
    let eval = evaluate_p2(table, c, d_cap, n)?;
    // Independent read path must reproduce all four sampled values.
    for x in [top, top - c, c * d_cap * n, c * n - c] {
        assert_eq!(
            table.value_at(x).unwrap(),
            table.value_at_recomputed(x).unwrap(),
            "storage and recomputation disagree at x = {x}"
        );
    }
    if eval.holds {
        return Err(VerifyError::NotViolated { c, d_cap, n });
    }
    Ok(Witness {
        c,
        d_cap,
        n,
        lhs_hex: eval.lhs_hex,
        rhs_hex: eval.rhs_hex,
        lhs_bits: eval.lhs_bits,
        rhs_bits: eval.rhs_bits,
    })
}

// --- dominance ---------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct DominanceReport {
    pub pass: bool,
    pub omega: String,
    pub lo: u64,
    pub hi: u64,
    pub checked: u64,
    pub first_failure: Option<u64>,
}

/// Checks f(x) ≥ 2^(x·ω(x)) for n_1 ≤ x ≤ horizon: past the seed range,
/// f dominates every rate the decay profile allows.
pub fn check_dominance(table: &GrowthTable, omega: &Omega) -> Result<DominanceReport, VerifyError> {
    let lo = table
        .schedule()
        .entry(1)
        .map(|e| e.n)
        .unwrap_or(1)
        .max(1);
    let hi = table.horizon();
    let mut report = DominanceReport {
        pass: true,
        omega: omega.preset_string(),
        lo,
        hi,
        checked: 0,
        first_failure: None,
    };
    if lo > hi {
        return Ok(report);
    }
    let values = table.values_in(lo, hi)?;
    for x in lo..=hi {
        let (num, den) = omega.eval(x);
        let scaled = i64::try_from(x as u128 * num as u128)
            .map_err(|_| VerifyError::BadInput(format!("x*omega numerator overflows at {x}")))?;
        let exponent = crate::exact::RationalPow2::new(scaled, den);
        report.checked += 1;
        if cmp_nat_pow2(&values[(x - lo) as usize], &exponent) == Ordering::Less {
            report.pass = false;
            report.first_failure = Some(x);
            break;
        }
    }
    Ok(report)
}
