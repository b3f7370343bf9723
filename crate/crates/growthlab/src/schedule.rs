//! Parameter schedules (d_k, n_k) and their validity ledger.
//!
//! Every "large enough" hypothesis in the construction is a named constraint
//! C1–C15 with a decidable predicate over the schedule prefix and exact
//! f-values. `check_entry` produces a per-constraint verdict ledger;
//! `find_min_d` / `find_min_n` search minimal certified parameters;
//! `build_schedule` assembles full schedules in certified or demo mode.

use crate::exact::{ceil_inv_pow2_gap, cmp_pow2_sums, ExactError, Nat, Pow2Term, RationalPow2};
use crate::growthfn::{GrowthError, GrowthTable};
use crate::io::nat_to_hex;
use crate::omega::{Omega, SupM};
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use thiserror::Error;

pub const DEFAULT_SCAN_CAP: u64 = 10_000_000;

#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error("constraint {id} needs f-values that were not provided for k={k}")]
    MissingTable { k: u32, id: String },
    #[error("exact comparison failed: {0}")]
    Unresolved(#[from] ExactError),
    #[error("no n_{k} within the scan cap {cap} satisfies all constraints")]
    ScanCapExceeded { k: u32, cap: u64 },
    #[error("d_{k} = {d} is invalid: constraint {id} fails ({detail})")]
    InvalidD { k: u32, d: u64, id: String, detail: String },
    #[error("certified entry k={k} fails constraints: {}", failed.join(", "))]
    LedgerFailed { k: u32, failed: Vec<String> },
    #[error("parameter overflow: {0}")]
    Overflow(String),
    #[error("{0}")]
    BadInput(String),
    #[error("table construction failed: {0}")]
    Table(#[from] GrowthError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Certified,
    Demo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    #[serde(rename = "not-applicable")]
    NotApplicable,
}

/// One constraint's outcome with the exact quantities compared. Big
/// naturals render as 0x-hex; quantities of the form a·2^(u/v) keep the
/// symbolic power-of-two factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintVerdict {
    pub id: String,
    pub verdict: Verdict,
    pub lhs: String,
    pub rhs: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct LedgerReport {
    pub verdicts: Vec<ConstraintVerdict>,
}

impl LedgerReport {
    pub fn pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.verdict != Verdict::Fail)
    }

    pub fn failed_ids(&self) -> Vec<String> {
        self.verdicts
            .iter()
            .filter(|v| v.verdict == Verdict::Fail)
            .map(|v| v.id.clone())
            .collect()
    }

    pub fn get(&self, id: &str) -> Option<&ConstraintVerdict> {
        self.verdicts.iter().find(|v| v.id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub k: u32,
    pub d: u64,
    pub n: u64,
    pub m: u64,
    pub ledger: LedgerReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub mode: Mode,
    pub omega: Option<Omega>,
    pub entries: Vec<ScheduleEntry>,
}

impl Schedule {
    pub fn new(mode: Mode, omega: Option<Omega>) -> Self {
        Schedule {
            mode,
            omega,
            entries: Vec::new(),
        }
    }

    pub fn depth(&self) -> u32 {
        self.entries.len() as u32
    }

    pub fn entry(&self, k: u32) -> Option<&ScheduleEntry> {
        self.entries.get(k.checked_sub(1)? as usize)
    }

    /// Product d_1 ⋯ d_k (1 for k = 0).
    pub fn p_through(&self, k: u32) -> Result<u64, ScheduleError> {
        let mut p: u64 = 1;
        for e in self.entries.iter().take(k as usize) {
            p = p
                .checked_mul(e.d)
                .ok_or_else(|| ScheduleError::Overflow(format!("d_1..d_{k} product")))?;
        }
        Ok(p)
    }

    /// Segment boundary points n_1, d_1n_1, n_2, d_2n_2, …
    pub fn boundaries(&self) -> Vec<u64> {
        let mut out = Vec::new();
        for e in &self.entries {
            out.push(e.n);
            out.push(e.d * e.n);
        }
        out
    }

    pub fn all_ledgers_pass(&self) -> bool {
        self.entries.iter().all(|e| e.ledger.pass())
    }

    pub fn is_certified(&self) -> bool {
        self.mode == Mode::Certified && self.all_ledgers_pass()
    }
}

// --- serialized form -------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ScheduleFile {
    mode: Mode,
    omega: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    watermark: Option<String>,
    entries: Vec<ScheduleEntry>,
}

impl Schedule {
    pub fn to_json(&self) -> String {
        let file = ScheduleFile {
            mode: self.mode,
            omega: self
                .omega
                .as_ref()
                .map(|o| o.preset_string())
                .unwrap_or_else(|| "none".to_string()),
            watermark: match self.mode {
                Mode::Demo => Some("uncertified".to_string()),
                Mode::Certified => None,
            },
            entries: self.entries.clone(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("schedule serialization");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Schedule, ScheduleError> {
        let file: ScheduleFile = serde_json::from_str(s)
            .map_err(|e| ScheduleError::BadInput(format!("schedule json: {e}")))?;
        let omega = match file.omega.as_str() {
            "none" => None,
            other => Some(
                Omega::parse(other)
                    .map_err(|e| ScheduleError::BadInput(format!("schedule omega: {e}")))?,
            ),
        };
        Ok(Schedule {
            mode: file.mode,
            omega,
            entries: file.entries,
        })
    }
}

// --- constraint evaluation -------------------------------------------------

/// Candidate entry under validation.
#[derive(Debug, Clone, Copy)]
pub struct Candidate {
    pub k: u32,
    pub d: u64,
    pub n: u64,
}

/// Exact f-values a candidate's value-dependent constraints consume.
#[derive(Debug, Clone)]
pub struct FValues {
    pub f_n: Nat,
    pub f_dn: Nat,
}

/// α_k = f(d_k n_k) − f(n_k) = Σ_{x=n_k+1}^{d_k n_k} (x+1), in closed form.
pub fn alpha_closed_form(d: u64, n: u64) -> Nat {
    let dn = (d as u128) * (n as u128);
    let prod = (dn - n as u128)
        .checked_mul(dn + n as u128 + 3)
        .expect("alpha overflow");
    Nat::from(prod / 2)
}

struct Ctx<'a> {
    k: u32,
    d: u64,
    n: u64,
    m: u64,
    exact_multiple: bool,
    prev: Option<(u64, u64)>, // (d_{k-1}, n_{k-1})
    p_k: u64,
    p_km2: u64,
    omega: Option<&'a Omega>,
    f: Option<&'a FValues>,
}

impl<'a> Ctx<'a> {
    fn two_p(&self) -> u64 {
        2 * self.p_k
    }

    fn fv(&self, id: &str) -> Result<&'a FValues, ScheduleError> {
        self.f.ok_or(ScheduleError::MissingTable {
            k: self.k,
            id: id.to_string(),
        })
    }
}

fn pass(id: &str, lhs: String, rhs: String) -> ConstraintVerdict {
    ConstraintVerdict {
        id: id.into(),
        verdict: Verdict::Pass,
        lhs,
        rhs,
        note: None,
    }
}

fn fail(id: &str, lhs: String, rhs: String) -> ConstraintVerdict {
    ConstraintVerdict {
        id: id.into(),
        verdict: Verdict::Fail,
        lhs,
        rhs,
        note: None,
    }
}

fn na(id: &str, why: &str) -> ConstraintVerdict {
    ConstraintVerdict {
        id: id.into(),
        verdict: Verdict::NotApplicable,
        lhs: "-".into(),
        rhs: "-".into(),
        note: Some(why.into()),
    }
}

fn verdict_if(ok: bool, id: &str, lhs: String, rhs: String) -> ConstraintVerdict {
    if ok {
        pass(id, lhs, rhs)
    } else {
        fail(id, lhs, rhs)
    }
}

fn le(ord: Ordering) -> bool {
    ord != Ordering::Greater
}

fn ge(ord: Ordering) -> bool {
    ord != Ordering::Less
}

fn term(c: Nat, e: RationalPow2) -> Pow2Term {
    (c, e)
}

fn unit() -> RationalPow2 {
    RationalPow2::zero()
}

fn c1(ctx: &Ctx) -> ConstraintVerdict {
    match ctx.prev {
        None => verdict_if(ctx.d > 2, "C1", ctx.d.to_string(), "2".into()),
        Some((dp, _)) => verdict_if(ctx.d > dp, "C1", ctx.d.to_string(), dp.to_string()),
    }
}

fn c2(ctx: &Ctx) -> ConstraintVerdict {
    let dn = ctx.d * ctx.n;
    match ctx.prev {
        None => verdict_if(ctx.n < dn, "C2", ctx.n.to_string(), dn.to_string()),
        Some((dp, np)) => {
            let boundary = dp * np;
            let mut v = verdict_if(
                boundary < ctx.n && ctx.n < dn,
                "C2",
                boundary.to_string(),
                ctx.n.to_string(),
            );
            v.note = Some(format!("interleaving {} < {} < {}", boundary, ctx.n, dn));
            v
        }
    }
}

fn c3(ctx: &Ctx) -> Result<ConstraintVerdict, ScheduleError> {
    if ctx.k != 1 {
        return Ok(na("C3", "alpha_1 bound is a k=1 constraint"));
    }
    let f = ctx.fv("C3")?;
    // f(d_1 n_1) = 2^(n_1) + α_1 ≤ 2^(n_1 + 1/3)
    let lhs = vec![term(f.f_dn.clone(), unit())];
    let rhs = vec![term(
        Nat::one(),
        RationalPow2::new(3 * ctx.n as i64 + 1, 3),
    )];
    let ord = cmp_pow2_sums(&lhs, &rhs)?;
    let alpha = &f.f_dn - &f.f_n;
    let mut v = verdict_if(
        le(ord),
        "C3",
        nat_to_hex(&f.f_dn),
        format!("2^({}+1/3)", ctx.n),
    );
    v.note = Some(format!("alpha_1 = {}", alpha));
    Ok(v)
}

fn c4(ctx: &Ctx) -> Result<ConstraintVerdict, ScheduleError> {
    let f = ctx.fv("C4")?;
    let two_p = ctx.two_p();
    let eps_den = two_p
        .checked_mul(1u64 << (ctx.k + 2))
        .ok_or_else(|| ScheduleError::Overflow("C4 epsilon denominator".into()))?;
    let a = RationalPow2::new(1, two_p);
    let b = RationalPow2::new(-1, eps_den);
    let threshold = ceil_inv_pow2_gap(&a, Some(&b));
    let mut v = verdict_if(
        f.f_dn >= threshold,
        "C4",
        nat_to_hex(&f.f_dn),
        nat_to_hex(&threshold),
    );
    v.note = Some(format!(
        "seed threshold ceil(1/((c-1)(1-c^-eps))), c=2^(1/{two_p}), eps=2^-{}",
        ctx.k + 2
    ));
    Ok(v)
}

fn c5(ctx: &Ctx) -> ConstraintVerdict {
    match ctx.prev {
        None => na("C5", "no previous entry; missing n_0 read as 0"),
        Some((_, np)) => {
            // d_k ≥ n_{k-1} / (2 d_1⋯d_{k-2}), empty product = 1; compared
            // without division as 2·P_{k-2}·d_k ≥ n_{k-1}.
            let lhs = 2u128 * ctx.p_km2 as u128 * ctx.d as u128;
            let mut v = verdict_if(
                lhs >= np as u128,
                "C5",
                lhs.to_string(),
                np.to_string(),
            );
            v.note = Some(format!("2*{}*d_k vs n_(k-1)", ctx.p_km2));
            v
        }
    }
}

fn c6(ctx: &Ctx) -> ConstraintVerdict {
    match ctx.prev {
        None => na("C6", "no previous entry"),
        Some((dp, np)) => {
            let bound = dp as u128 * np as u128 + 1;
            verdict_if(
                (ctx.d as u128) > bound,
                "C6",
                ctx.d.to_string(),
                bound.to_string(),
            )
        }
    }
}

fn c7(ctx: &Ctx) -> Result<ConstraintVerdict, ScheduleError> {
    // 1 + (d n + 1)/2^(n/2P) < 2^(1/2P), cleared to
    // 2^(n/2P) + (d n + 1) < 2^((n+1)/2P).
    let two_p = ctx.two_p();
    let dn1 = Nat::from(ctx.d) * Nat::from(ctx.n) + Nat::one();
    let e_n = RationalPow2::new(ctx.n as i64, two_p);
    let e_n1 = RationalPow2::new(ctx.n as i64 + 1, two_p);
    let lhs = vec![term(Nat::one(), e_n), term(dn1.clone(), unit())];
    let rhs = vec![term(Nat::one(), e_n1)];
    let ord = cmp_pow2_sums(&lhs, &rhs)?;
    Ok(verdict_if(
        ord == Ordering::Less,
        "C7",
        format!("2^({}/{})+{}", ctx.n, two_p, dn1),
        format!("2^({}/{})", ctx.n + 1, two_p),
    ))
}

fn c8(ctx: &Ctx) -> Result<ConstraintVerdict, ScheduleError> {
    let f = ctx.fv("C8")?;
    // f(d_k n_k) ≤ f(n_k)·2^(1/3)
    let lhs = vec![term(f.f_dn.clone(), unit())];
    let rhs = vec![term(f.f_n.clone(), RationalPow2::new(1, 3))];
    let ord = cmp_pow2_sums(&lhs, &rhs)?;
    Ok(verdict_if(
        le(ord),
        "C8",
        nat_to_hex(&f.f_dn),
        format!("{}*2^(1/3)", nat_to_hex(&f.f_n)),
    ))
}

fn c9(ctx: &Ctx) -> ConstraintVerdict {
    match ctx.prev {
        None => na("C9", "no previous entry"),
        Some((dp, np)) => {
            let bound = 2u128 * dp as u128 * np as u128;
            verdict_if(
                (ctx.n as u128) > bound,
                "C9",
                ctx.n.to_string(),
                bound.to_string(),
            )
        }
    }
}

fn c10(ctx: &Ctx) -> Result<ConstraintVerdict, ScheduleError> {
    let f = ctx.fv("C10")?;
    let d2n2 = Nat::from(ctx.d) * Nat::from(ctx.d) * Nat::from(ctx.n) * Nat::from(ctx.n);
    if f.f_n < d2n2 {
        return Ok(fail("C10", nat_to_hex(&f.f_n), nat_to_hex(&d2n2)));
    }
    // Growth-margin part: f(n_k)·2^(n_k/2P + 1) ≥ f(n_k) + d²n².
    let two_p = ctx.two_p();
    let e = RationalPow2::new(ctx.n as i64 + two_p as i64, two_p); // n/2P + 1
    let lhs = vec![term(f.f_n.clone(), e)];
    let rhs = vec![term(&f.f_n + &d2n2, unit())];
    let ord = cmp_pow2_sums(&lhs, &rhs)?;
    let mut v = verdict_if(
        ge(ord),
        "C10",
        format!("{}*2^({}/{}+1)", nat_to_hex(&f.f_n), ctx.n, two_p),
        nat_to_hex(&(&f.f_n + &d2n2)),
    );
    v.note = Some(format!(
        "f(n_k) >= d^2 n^2 holds: {} >= {}",
        nat_to_hex(&f.f_n),
        nat_to_hex(&d2n2)
    ));
    Ok(v)
}

fn c11(ctx: &Ctx) -> Result<ConstraintVerdict, ScheduleError> {
    let f = ctx.fv("C11")?;
    let n2 = Nat::from(ctx.n) * Nat::from(ctx.n);
    let lhs_val = &f.f_n + &n2;
    let lhs = vec![term(lhs_val.clone(), unit())];
    let rhs = vec![term(f.f_n.clone(), RationalPow2::new(1, 2))];
    let ord = cmp_pow2_sums(&lhs, &rhs)?;
    Ok(verdict_if(
        le(ord),
        "C11",
        nat_to_hex(&lhs_val),
        format!("{}*2^(1/2)", nat_to_hex(&f.f_n)),
    ))
}

fn c12(ctx: &Ctx) -> ConstraintVerdict {
    if ctx.k != 1 {
        return na("C12", "n_1 floor is a k=1 constraint");
    }
    verdict_if(ctx.n >= 3, "C12", ctx.n.to_string(), "3".into())
}

fn c13(ctx: &Ctx) -> ConstraintVerdict {
    let two_k = 2 * ctx.k as u64;
    let ok = ctx.exact_multiple && ctx.n > two_k;
    let mut v = verdict_if(ok, "C13", ctx.n.to_string(), two_k.to_string());
    v.note = Some(if ctx.exact_multiple {
        format!("n = k*m with m = {}", ctx.m)
    } else {
        format!("n is not a multiple of k = {}", ctx.k)
    });
    v
}

fn c14(ctx: &Ctx) -> ConstraintVerdict {
    let omega = match ctx.omega {
        None => return na("C14", "no omega supplied"),
        Some(o) => o,
    };
    match omega.sup_m_at_least(ctx.two_p()) {
        SupM::Finite(s) => {
            let mut v = verdict_if(ctx.n > s, "C14", ctx.n.to_string(), s.to_string());
            v.note = Some(format!(
                "max {{m : omega(m) >= 1/{}}} = {}",
                ctx.two_p(),
                s
            ));
            v
        }
        SupM::AboveCap => {
            let mut v = fail(
                "C14",
                ctx.n.to_string(),
                format!("sup {{m : omega(m) >= 1/{}}} exceeds u64", ctx.two_p()),
            );
            v.note = Some("no desk-scale n_k satisfies the dominance prerequisite".into());
            v
        }
    }
}

fn c15(ctx: &Ctx) -> Result<ConstraintVerdict, ScheduleError> {
    let f = ctx.fv("C15")?;
    // Strict increase of x ↦ ⌊c·x⌋ from the segment seed onward needs
    // f(d_k n_k)·(c−1) ≥ 1, i.e. f(d_k n_k) ≥ ceil(1/(c−1)); later values
    // only grow, so the segment-start check covers every geometric x.
    let threshold = ceil_inv_pow2_gap(&RationalPow2::new(1, ctx.two_p()), None);
    let mut v = verdict_if(
        f.f_dn >= threshold,
        "C15",
        nat_to_hex(&f.f_dn),
        nat_to_hex(&threshold),
    );
    v.note = Some(format!("ceil(1/(c-1)), c = 2^(1/{})", ctx.two_p()));
    Ok(v)
}

fn make_ctx<'a>(
    prefix: &Schedule,
    cand: Candidate,
    omega: Option<&'a Omega>,
    f: Option<&'a FValues>,
) -> Result<Ctx<'a>, ScheduleError> {
    if cand.k as usize != prefix.entries.len() + 1 {
        return Err(ScheduleError::BadInput(format!(
            "entry k={} checked against a prefix of depth {}",
            cand.k,
            prefix.depth()
        )));
    }
    if cand.d == 0 || cand.n == 0 {
        return Err(ScheduleError::BadInput("d and n must be positive".into()));
    }
    let p_km1 = prefix.p_through(cand.k - 1)?;
    let p_k = p_km1
        .checked_mul(cand.d)
        .ok_or_else(|| ScheduleError::Overflow("d_1..d_k product".into()))?;
    if p_k > (i64::MAX / 2) as u64 {
        return Err(ScheduleError::Overflow(
            "2*d_1..d_k exceeds exponent range".into(),
        ));
    }
    Ok(Ctx {
        k: cand.k,
        d: cand.d,
        n: cand.n,
        m: cand.n / cand.k as u64,
        exact_multiple: cand.n % cand.k as u64 == 0,
        prev: prefix.entries.last().map(|e| (e.d, e.n)),
        p_k,
        p_km2: prefix.p_through(cand.k.saturating_sub(2))?,
        omega,
        f,
    })
}

/// Exact f-values for a candidate: closed form at depth 1, table extension
/// (through n, then the arithmetic closed form to d·n) beyond.
pub fn candidate_f_values(
    prefix: &Schedule,
    cand: Candidate,
    table: Option<&mut GrowthTable>,
) -> Result<FValues, ScheduleError> {
    let f_n = if cand.k == 1 {
        Nat::one() << cand.n
    } else {
        let table = table.ok_or(ScheduleError::MissingTable {
            k: cand.k,
            id: "f(n_k)".into(),
        })?;
        let table_params: Vec<(u64, u64)> =
            table.schedule().entries.iter().map(|e| (e.d, e.n)).collect();
        let prefix_params: Vec<(u64, u64)> =
            prefix.entries.iter().map(|e| (e.d, e.n)).collect();
        if table_params != prefix_params {
            return Err(ScheduleError::BadInput(
                "table was built for a different schedule prefix".into(),
            ));
        }
        if table.horizon() < cand.n {
            table.extend(cand.n)?;
        }
        table.value_at(cand.n)?
    };
    let f_dn = &f_n + alpha_closed_form(cand.d, cand.n);
    Ok(FValues { f_n, f_dn })
}

/// Evaluates the full constraint catalog for one candidate entry.
///
/// `table` must cover the prefix (only needed for k ≥ 2); it is extended to
/// the candidate n as a side effect. Verdicts come back in catalog order
/// with the exact compared quantities.
pub fn check_entry(
    prefix: &Schedule,
    cand: Candidate,
    table: Option<&mut GrowthTable>,
    omega: Option<&Omega>,
) -> Result<LedgerReport, ScheduleError> {
    let f = candidate_f_values(prefix, cand, table)?;
    let ctx = make_ctx(prefix, cand, omega, Some(&f))?;
    let verdicts = vec![
        c1(&ctx),
        c2(&ctx),
        c3(&ctx)?,
        c4(&ctx)?,
        c5(&ctx),
        c6(&ctx),
        c7(&ctx)?,
        c8(&ctx)?,
        c9(&ctx),
        c10(&ctx)?,
        c11(&ctx)?,
        c12(&ctx),
        c13(&ctx),
        c14(&ctx),
        c15(&ctx)?,
    ];
    Ok(LedgerReport { verdicts })
}

/// Smallest d_k passing the d-side constraints: d_1 = 3 at depth one, and
/// max of the C1/C5/C6 lower bounds afterwards.
pub fn find_min_d(prefix: &Schedule, k: u32) -> Result<u64, ScheduleError> {
    if k as usize != prefix.entries.len() + 1 {
        return Err(ScheduleError::BadInput(format!(
            "find_min_d for k={} on a prefix of depth {}",
            k,
            prefix.depth()
        )));
    }
    if k == 1 {
        return Ok(3);
    }
    let (dp, np) = prefix.entries.last().map(|e| (e.d, e.n)).unwrap();
    let c6_bound = dp
        .checked_mul(np)
        .and_then(|v| v.checked_add(2))
        .ok_or_else(|| ScheduleError::Overflow("C6 bound".into()))?;
    let p_km2 = prefix.p_through(k - 2)?;
    let c5_bound = np.div_ceil(2 * p_km2);
    Ok((dp + 1).max(c6_bound).max(c5_bound))
}

/// Smallest n_k = k·m_k passing the whole catalog, by linear scan over
/// multiples of k with incremental table extension. Cheap structural gates
/// run before any f-value is touched.
pub fn find_min_n(
    prefix: &Schedule,
    k: u32,
    d: u64,
    omega: Option<&Omega>,
    cap: u64,
) -> Result<(u64, LedgerReport), ScheduleError> {
    // d must already be valid: C1/C5/C6 read only the prefix and d.
    {
        let probe = make_ctx(prefix, Candidate { k, d, n: k as u64 }, omega, None)?;
        for v in [c1(&probe), c5(&probe), c6(&probe)] {
            if v.verdict == Verdict::Fail {
                return Err(ScheduleError::InvalidD {
                    k,
                    d,
                    id: v.id,
                    detail: format!("{} vs {}", v.lhs, v.rhs),
                });
            }
        }
    }

    // Structural lower bound; scanning below it would only re-derive the
    // same integer comparisons.
    let mut lb: u64 = 2 * k as u64 + 1; // C13
    if k == 1 {
        lb = lb.max(3); // C12
    }
    if let Some(e) = prefix.entries.last() {
        let dpnp = e
            .d
            .checked_mul(e.n)
            .ok_or_else(|| ScheduleError::Overflow("d_(k-1) n_(k-1)".into()))?;
        lb = lb.max(dpnp + 1); // C2
        lb = lb.max(2 * dpnp + 1); // C9
    }
    if let Some(o) = omega {
        let p_k = prefix
            .p_through(k - 1)?
            .checked_mul(d)
            .ok_or_else(|| ScheduleError::Overflow("d_1..d_k product".into()))?;
        match o.sup_m_at_least(2 * p_k) {
            SupM::Finite(s) => lb = lb.max(s + 1), // C14
            SupM::AboveCap => return Err(ScheduleError::ScanCapExceeded { k, cap }),
        }
    }

    let mut table = if k >= 2 {
        let e = prefix.entries.last().unwrap();
        Some(GrowthTable::build(
            prefix.clone(),
            e.d * e.n,
            GrowthTable::default_mem_budget(),
        )?)
    } else {
        None
    };

    let mut n = lb.div_ceil(k as u64) * k as u64;
    loop {
        if n > cap {
            return Err(ScheduleError::ScanCapExceeded { k, cap });
        }
        let cand = Candidate { k, d, n };
        let structural_ok = {
            let ctx = make_ctx(prefix, cand, omega, None)?;
            [c13(&ctx), c12(&ctx), c2(&ctx), c9(&ctx), c14(&ctx), c7(&ctx)?]
                .iter()
                .all(|v| v.verdict != Verdict::Fail)
        };
        if structural_ok {
            let f = candidate_f_values(prefix, cand, table.as_mut())?;
            let ctx = make_ctx(prefix, cand, omega, Some(&f))?;
            let value_ok = [c3(&ctx)?, c4(&ctx)?, c8(&ctx)?, c10(&ctx)?, c11(&ctx)?, c15(&ctx)?]
                .iter()
                .all(|v| v.verdict != Verdict::Fail);
            if value_ok {
                let ledger = check_entry(prefix, cand, table.as_mut(), omega)?;
                debug_assert!(ledger.pass());
                return Ok((n, ledger));
            }
        }
        n += k as u64;
    }
}

/// Full-schedule assembly.
#[derive(Debug, Clone)]
pub struct BuildParams {
    pub depth: u32,
    pub mode: Mode,
    pub d_overrides: BTreeMap<u32, u64>,
    pub n_overrides: BTreeMap<u32, u64>,
    pub omega: Option<Omega>,
    pub scan_cap: u64,
}

impl BuildParams {
    pub fn certified(depth: u32) -> Self {
        BuildParams {
            depth,
            mode: Mode::Certified,
            d_overrides: BTreeMap::new(),
            n_overrides: BTreeMap::new(),
            omega: None,
            scan_cap: DEFAULT_SCAN_CAP,
        }
    }
}

/// Builds a schedule entry by entry. Certified mode searches minimal
/// parameters (or validates overrides, aborting on any failed constraint);
/// demo mode accepts user parameters and records failures without aborting.
pub fn build_schedule(params: &BuildParams) -> Result<Schedule, ScheduleError> {
    let omega = params.omega.as_ref();
    let mut sched = Schedule::new(params.mode, params.omega.clone());
    for k in 1..=params.depth {
        let d = match params.d_overrides.get(&k) {
            Some(&d) => d,
            None => find_min_d(&sched, k)?,
        };
        let (n, ledger) = match params.n_overrides.get(&k) {
            Some(&n) => {
                if n % k as u64 != 0 {
                    return Err(ScheduleError::BadInput(format!(
                        "n_{k} = {n} is not a multiple of k = {k} (n_k = k*m_k)"
                    )));
                }
                let mut table = if k >= 2 {
                    let e = sched.entries.last().unwrap();
                    Some(GrowthTable::build(
                        sched.clone(),
                        (e.d * e.n).max(n),
                        GrowthTable::default_mem_budget(),
                    )?)
                } else {
                    None
                };
                let ledger = check_entry(&sched, Candidate { k, d, n }, table.as_mut(), omega)?;
                if params.mode == Mode::Certified && !ledger.pass() {
                    return Err(ScheduleError::LedgerFailed {
                        k,
                        failed: ledger.failed_ids(),
                    });
                }
                (n, ledger)
            }
            None => {
                if params.mode == Mode::Demo {
                    return Err(ScheduleError::BadInput(format!(
                        "demo mode requires an explicit n_{k}"
                    )));
                }
                find_min_n(&sched, k, d, omega, params.scan_cap)?
            }
        };
        sched.entries.push(ScheduleEntry {
            k,
            d,
            n,
            m: n / k as u64,
            ledger,
        });
    }
    Ok(sched)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn certified_k1(d: u64, n: u64) -> (Schedule, LedgerReport) {
        let prefix = Schedule::new(Mode::Certified, None);
        let ledger = check_entry(&prefix, Candidate { k: 1, d, n }, None, None).unwrap();
        (prefix, ledger)
    }

    #[test]
    fn c3_boundary_cases() {
        // n_1 = 11 passes: 517 + 2048 ≤ 2048·2^(1/3) (i.e. 2565³ ≤ 2^34);
        // n_1 = 10 fails: 1454³ > 2^31.
        let (_, ledger) = certified_k1(3, 11);
        assert_eq!(ledger.get("C3").unwrap().verdict, Verdict::Pass);
        let (_, ledger) = certified_k1(3, 10);
        assert_eq!(ledger.get("C3").unwrap().verdict, Verdict::Fail);
    }

    #[test]
    fn c7_boundary_cases() {
        let (_, ledger) = certified_k1(3, 64 - 1);
        assert_eq!(ledger.get("C7").unwrap().verdict, Verdict::Fail);
        let (_, ledger) = certified_k1(3, 64);
        assert_eq!(ledger.get("C7").unwrap().verdict, Verdict::Pass);
    }

    #[test]
    fn c4_threshold_at_depth_one() {
        // Threshold 570 = ceil(1/((2^(1/6)-1)(1-2^(-1/48)))): the demo seed
        // f(24) = 536 misses it, n_1 = 9 gives f(27) = 863 and clears it.
        let (_, ledger) = certified_k1(3, 8);
        let v = ledger.get("C4").unwrap();
        assert_eq!(v.verdict, Verdict::Fail);
        assert_eq!(v.rhs, "0x23a"); // 570
        assert_eq!(v.lhs, "0x218"); // 536
        let (_, ledger) = certified_k1(3, 9);
        assert_eq!(ledger.get("C4").unwrap().verdict, Verdict::Pass);
    }

    #[test]
    fn demo_seed_ledger_shape() {
        let (_, ledger) = certified_k1(3, 8);
        assert_eq!(ledger.get("C12").unwrap().verdict, Verdict::Pass);
        assert_eq!(ledger.get("C15").unwrap().verdict, Verdict::Pass);
        assert_eq!(ledger.get("C8").unwrap().verdict, Verdict::Fail);
        assert_eq!(ledger.get("C5").unwrap().verdict, Verdict::NotApplicable);
        assert_eq!(ledger.get("C6").unwrap().verdict, Verdict::NotApplicable);
        assert_eq!(ledger.get("C9").unwrap().verdict, Verdict::NotApplicable);
        assert!(!ledger.pass());
        // alpha_1 for n_1 = 8: 4·64 + 24 = 280.
        assert!(ledger.get("C3").unwrap().note.as_deref() == Some("alpha_1 = 280"));
    }

    #[test]
    fn find_min_d_examples() {
        let prefix = Schedule::new(Mode::Certified, None);
        assert_eq!(find_min_d(&prefix, 1).unwrap(), 3);

        let mut with_127 = Schedule::new(Mode::Certified, None);
        with_127.entries.push(ScheduleEntry {
            k: 1,
            d: 3,
            n: 127,
            m: 127,
            ledger: LedgerReport::default(),
        });
        assert_eq!(find_min_d(&with_127, 2).unwrap(), 383); // C6 dominates

        let mut with_8 = Schedule::new(Mode::Certified, None);
        with_8.entries.push(ScheduleEntry {
            k: 1,
            d: 3,
            n: 8,
            m: 8,
            ledger: LedgerReport::default(),
        });
        assert_eq!(find_min_d(&with_8, 2).unwrap(), 26); // 3·8 + 2
    }

    #[test]
    fn find_min_n_depth_one() {
        let prefix = Schedule::new(Mode::Certified, None);
        // Without omega, C7's minimum dominates everything else.
        let (n, ledger) = find_min_n(&prefix, 1, 3, None, DEFAULT_SCAN_CAP).unwrap();
        assert_eq!(n, 64);
        assert!(ledger.pass());
        // With the log preset, the dominance prerequisite forces 127.
        let omega = Omega::Log;
        let (n, ledger) = find_min_n(&prefix, 1, 3, Some(&omega), DEFAULT_SCAN_CAP).unwrap();
        assert_eq!(n, 127);
        assert!(ledger.pass());
        // Minimality witness: the previous multiple of k fails something.
        let prev = check_entry(
            &prefix,
            Candidate { k: 1, d: 3, n: 126 },
            None,
            Some(&omega),
        )
        .unwrap();
        assert!(!prev.pass());
    }

    #[test]
    fn invalid_d_rejected() {
        let prefix = Schedule::new(Mode::Certified, None);
        let err = find_min_n(&prefix, 1, 2, None, DEFAULT_SCAN_CAP).unwrap_err();
        match err {
            ScheduleError::InvalidD { id, .. } => assert_eq!(id, "C1"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn scan_cap_exceeded_for_depth_two_log_omega() {
        // At k = 2 the log-omega dominance prerequisite needs
        // n_2 > 2^(2·d_1·d_2 + 1) − 2, far beyond any u64-scale scan.
        let params = BuildParams {
            depth: 1,
            mode: Mode::Certified,
            d_overrides: BTreeMap::new(),
            n_overrides: BTreeMap::new(),
            omega: Some(Omega::Log),
            scan_cap: DEFAULT_SCAN_CAP,
        };
        let sched = build_schedule(&params).unwrap();
        let err = find_min_n(&sched, 2, 383, Some(&Omega::Log), DEFAULT_SCAN_CAP).unwrap_err();
        assert!(matches!(err, ScheduleError::ScanCapExceeded { k: 2, .. }));
    }

    #[test]
    fn certified_depth_one_schedule_round_trips() {
        let mut params = BuildParams::certified(1);
        params.omega = Some(Omega::Log);
        let sched = build_schedule(&params).unwrap();
        assert_eq!(sched.entries.len(), 1);
        assert_eq!(sched.entries[0].n, 127);
        assert_eq!(sched.entries[0].d, 3);
        assert_eq!(sched.entries[0].m, 127);
        assert!(sched.is_certified());
        let json = sched.to_json();
        let back = Schedule::from_json(&json).unwrap();
        assert_eq!(back.entries, sched.entries);
        assert_eq!(back.mode, Mode::Certified);
        assert_eq!(back.omega, Some(Omega::Log));
        assert!(json.contains("\"omega\": \"log\""));
        assert!(!json.contains("watermark"));
    }

    #[test]
    fn demo_schedule_records_failures() {
        let mut params = BuildParams {
            depth: 1,
            mode: Mode::Demo,
            d_overrides: BTreeMap::new(),
            n_overrides: BTreeMap::new(),
            omega: None,
            scan_cap: DEFAULT_SCAN_CAP,
        };
        params.d_overrides.insert(1, 3);
        params.n_overrides.insert(1, 8);
        let sched = build_schedule(&params).unwrap();
        assert!(!sched.entries[0].ledger.pass());
        assert!(sched
            .entries[0]
            .ledger
            .failed_ids()
            .contains(&"C3".to_string()));
        assert!(sched.to_json().contains("\"watermark\": \"uncertified\""));
    }

    #[test]
    fn certified_override_failure_aborts() {
        let mut params = BuildParams::certified(1);
        params.d_overrides.insert(1, 3);
        params.n_overrides.insert(1, 8);
        let err = build_schedule(&params).unwrap_err();
        match err {
            ScheduleError::LedgerFailed { k: 1, failed } => {
                assert!(failed.contains(&"C3".to_string()))
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn empty_schedule_is_identity() {
        let sched = build_schedule(&BuildParams::certified(0)).unwrap();
        assert!(sched.entries.is_empty());
        assert!(sched.is_certified());
        assert_eq!(sched.boundaries(), Vec::<u64>::new());
    }

    #[test]
    fn determinism_of_search() {
        let a = build_schedule(&BuildParams::certified(1)).unwrap();
        let b = build_schedule(&BuildParams::certified(1)).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }
}
