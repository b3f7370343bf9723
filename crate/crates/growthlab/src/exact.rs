//! Exact arbitrary-precision arithmetic with certified comparisons against
//! rational powers of two.
//!
//! No floating point enters any certified result: `f64` appears only inside
//! the initial guess of the integer root, whose output is certified by an
//! exact sandwich check before it is returned. Irrational quantities
//! `2^(u/v)` are handled two ways and the two routes cross-check each other:
//!
//! * an oracle route that clears denominators (`floor_mul_pow2_oracle`,
//!   `cmp_nat_pow2`), exact but expensive for large operands;
//! * an interval route that sandwiches `2^(u/v)` between dyadic bounds of
//!   increasing precision (`CertifiedInterval`, `cmp_pow2_sums`), cheap and
//!   refined until the answer is forced.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use thiserror::Error;

/// Arbitrary-precision natural number. All growth values, counts and
/// comparison operands are `Nat`s; arithmetic on them is exact.
pub type Nat = BigUint;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    /// Interval refinement hit its hard cap without separating the two
    /// sides. Mathematically this cannot happen for sums that differ (the
    /// canonical form detects exact ties first), so the cap is a safety
    /// valve that turns a nontermination bug into a visible error.
    #[error("comparison unresolved after {bits} fractional bits of refinement")]
    Unresolved { bits: u64 },
}

/// Initial fractional precision for interval comparisons.
const SUM_START_BITS: u64 = 64;
/// Hard cap on fractional precision in `cmp_pow2_sums`.
const SUM_CAP_BITS: u64 = 1 << 20;
/// Guard bits added on top of `bits(a)` for the floor fast path.
const FLOOR_GUARD_BITS: u64 = 32;
/// Fast-path refinement cap: beyond `bits(a) + FLOOR_CAP_BITS` the floor
/// falls back to the integer-root oracle (total, still exact).
const FLOOR_CAP_BITS: u64 = 4096;

// ---------------------------------------------------------------------------
// RationalPow2
// ---------------------------------------------------------------------------

/// The positive real `2^(numer/denom)`, kept in lowest terms, `denom >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RationalPow2 {
    numer: i64,
    denom: u64,
}

impl RationalPow2 {
    pub fn new(numer: i64, denom: u64) -> Self {
        assert!(denom >= 1, "exponent denominator must be positive");
        if numer == 0 {
            return RationalPow2 { numer: 0, denom: 1 };
        }
        let g = num_integer::gcd(numer.unsigned_abs(), denom);
        RationalPow2 {
            numer: numer / g as i64,
            denom: denom / g,
        }
    }

    pub fn from_int(numer: i64) -> Self {
        RationalPow2 { numer, denom: 1 }
    }

    pub fn zero() -> Self {
        RationalPow2 { numer: 0, denom: 1 }
    }

    pub fn numer(&self) -> i64 {
        self.numer
    }

    pub fn denom(&self) -> u64 {
        self.denom
    }

    /// True when the exponent is an integer, i.e. the value is an exact
    /// (possibly fractional) power of two.
    pub fn is_integral(&self) -> bool {
        self.denom == 1
    }

    pub fn is_positive(&self) -> bool {
        self.numer > 0
    }

    /// Exponent addition: `2^a · 2^b = 2^(a+b)`.
    pub fn add(&self, other: &RationalPow2) -> Self {
        let num = (self.numer as i128) * (other.denom as i128)
            + (other.numer as i128) * (self.denom as i128);
        let den = (self.denom as i128) * (other.denom as i128);
        Self::new(
            i64::try_from(num).expect("exponent numerator overflow"),
            u64::try_from(den).expect("exponent denominator overflow"),
        )
    }

    /// Exponent scaling: `(2^a)^c = 2^(c·a)`.
    pub fn scaled(&self, c: i64) -> Self {
        let num = (self.numer as i128) * (c as i128);
        Self::new(
            i64::try_from(num).expect("exponent numerator overflow"),
            self.denom,
        )
    }

    pub fn negated(&self) -> Self {
        RationalPow2 {
            numer: -self.numer,
            denom: self.denom,
        }
    }

    /// Splits the exponent as `numer/denom = w + r/denom` with `0 <= r < denom`.
    fn split(&self) -> (i64, u64) {
        let v = self.denom as i64;
        let w = self.numer.div_euclid(v);
        let r = self.numer.rem_euclid(v) as u64;
        (w, r)
    }
}

impl fmt::Display for RationalPow2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom == 1 {
            write!(f, "2^({})", self.numer)
        } else {
            write!(f, "2^({}/{})", self.numer, self.denom)
        }
    }
}

// ---------------------------------------------------------------------------
// Integer roots
// ---------------------------------------------------------------------------

/// Floor `m`-th root: the unique `r` with `r^m <= n < (r+1)^m`.
///
/// Newton descent from a certified upper guess; the result is corrected
/// against the exact sandwich before returning, so the postcondition holds
/// regardless of guess quality.
pub fn iroot(n: &Nat, m: u32) -> Nat {
    assert!(m >= 1, "root degree must be at least 1");
    if m == 1 || n.is_zero() || n.is_one() {
        return n.clone();
    }
    let bits = n.bits();
    if bits <= m as u64 {
        // n < 2^m means the root is 1 (n >= 1 here).
        return Nat::one();
    }
    // Power-of-two fast path when the exponent is divisible by m.
    if n.count_ones() == 1 && (bits - 1) % m as u64 == 0 {
        return Nat::one() << ((bits - 1) / m as u64);
    }

    let mut r = root_guess(n, m);
    if r.is_zero() {
        r = Nat::one();
    }
    // Certified lift: make the starting point an upper bound for the root.
    while pow_u32(&r, m) < *n {
        r <<= 1;
    }
    loop {
        let rm1 = pow_u32(&r, m - 1);
        let next = (&r * (m - 1) + n / rm1) / m;
        if next >= r {
            break;
        }
        r = next;
    }
    // Exact correction: the loop above lands within a few units of the root.
    while pow_u32(&r, m) > *n {
        r -= 1u32;
    }
    loop {
        let r1 = &r + 1u32;
        if pow_u32(&r1, m) <= *n {
            r = r1;
        } else {
            break;
        }
    }
    r
}

/// Floor square root, as a convenience alias.
pub fn isqrt(n: &Nat) -> Nat {
    iroot(n, 2)
}

fn pow_u32(base: &Nat, e: u32) -> Nat {
    pow_u64(base, e as u64)
}

/// Binary exponentiation; exact.
pub fn pow_u64(base: &Nat, mut e: u64) -> Nat {
    if e == 0 {
        return Nat::one();
    }
    let mut b = base.clone();
    let mut acc = Nat::one();
    while e > 1 {
        if e & 1 == 1 {
            acc = &acc * &b;
        }
        b = &b * &b;
        e >>= 1;
    }
    acc * b
}

/// Approximate upper starting point for Newton, from the leading 64 bits.
/// Only a performance device: callers certify and correct the result.
fn root_guess(n: &Nat, m: u32) -> Nat {
    let bits = n.bits();
    let take = bits.min(64);
    let top = (n >> (bits - take)).to_u64().unwrap_or(1).max(1);
    let log2n = (top as f64).log2() + (bits - take) as f64;
    let t = log2n / m as f64;
    let ti = t.floor();
    let tf = t - ti;
    // 52-bit mantissa of 2^tf, nudged upward so the guess tends to start
    // above the true root.
    let mant = (tf.exp2() * (1u64 << 52) as f64).ceil() as u64;
    let mant = mant + (mant >> 30) + 2;
    let ti = ti as u64;
    if ti >= 52 {
        Nat::from(mant) << (ti - 52)
    } else {
        (Nat::from(mant) >> (52 - ti)) + 1u32
    }
}

// ---------------------------------------------------------------------------
// Dyadic enclosures of 2^(r/v)
// ---------------------------------------------------------------------------

/// `[lo, hi]` mantissas at `scale` fractional bits enclosing `2^(r/v)`
/// for `1 <= r < v`: `lo·2^-scale <= 2^(r/v) <= hi·2^-scale`.
///
/// Computed by a chain of integer roots over the prime factorization of `v`,
/// starting from the exact value `2^r`; every stage keeps certified outer
/// bounds, so the enclosure is sound at any precision.
fn pow2_fraction_bounds(r: u64, v: u64, scale: u64) -> (Nat, Nat) {
    debug_assert!(r >= 1 && r < v);
    let mut lo = Nat::one() << (r + scale);
    let mut hi = lo.clone();
    for p in factorize(v) {
        let sh = scale * (p as u64 - 1);
        lo = iroot(&(lo << sh), p);
        hi = iroot(&(hi << sh), p) + 1u32;
    }
    (lo, hi)
}

fn factorize(mut v: u64) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= v {
        while v % p == 0 {
            out.push(p as u32);
            v /= p;
        }
        p += 1;
    }
    if v > 1 {
        out.push(u32::try_from(v).expect("root degree too large"));
    }
    // Largest factors first: intermediate mantissas shrink fastest that way.
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

thread_local! {
    /// Cache of base enclosures for 2^(1/v) keyed by (v, scale). Purely a
    /// performance device; entries are immutable once computed.
    static BASE_CACHE: RefCell<HashMap<(u64, u64), (Nat, Nat)>> = RefCell::new(HashMap::new());
}

fn base_bounds_cached(v: u64, scale: u64) -> (Nat, Nat) {
    BASE_CACHE.with(|c| {
        let mut map = c.borrow_mut();
        if map.len() > 64 {
            map.clear();
        }
        map.entry((v, scale))
            .or_insert_with(|| pow2_fraction_bounds(1, v, scale))
            .clone()
    })
}

fn ceil_shift(n: &Nat, t: u64) -> Nat {
    if t == 0 {
        return n.clone();
    }
    let mask = (Nat::one() << t) - 1u32;
    (n + mask) >> t
}

/// Directed-rounding interval power at a fixed scale: given an enclosure of
/// `y`, returns an enclosure of `y^e`.
fn bounds_pow(lo: &Nat, hi: &Nat, e: u64, scale: u64) -> (Nat, Nat) {
    debug_assert!(e >= 1);
    let mut acc_lo = lo.clone();
    let mut acc_hi = hi.clone();
    let nbits = 64 - e.leading_zeros() as u64;
    for i in (0..nbits - 1).rev() {
        acc_lo = (&acc_lo * &acc_lo) >> scale;
        acc_hi = ceil_shift(&(&acc_hi * &acc_hi), scale);
        if (e >> i) & 1 == 1 {
            acc_lo = (&acc_lo * lo) >> scale;
            acc_hi = ceil_shift(&(&acc_hi * hi), scale);
        }
    }
    (acc_lo, acc_hi)
}

/// Enclosure of `2^(a/v)` for `0 <= a < v` at `scale` fractional bits,
/// derived from the cached base enclosure of `2^(1/v)`.
fn residue_bounds(a: u64, v: u64, scale: u64) -> (Nat, Nat) {
    if a == 0 {
        let one = Nat::one() << scale;
        return (one.clone(), one);
    }
    // Extra working precision absorbs the error amplification of the power.
    let pad = 64 - v.leading_zeros() as u64 + 8;
    let sb = scale + pad;
    let (blo, bhi) = base_bounds_cached(v, sb);
    let (plo, phi) = bounds_pow(&blo, &bhi, a, sb);
    (plo >> pad, ceil_shift(&phi, pad))
}

// ---------------------------------------------------------------------------
// CertifiedInterval
// ---------------------------------------------------------------------------

/// Certified dyadic enclosure of `2^e` for a non-integral exponent `e`.
///
/// The value is split as `2^e = 2^w · mu` with `mu = 2^(r/v)` in `(1, 2)`;
/// the struct stores mantissa bounds for `mu` at `scale` fractional bits.
/// `refine` recomputes at doubled precision, so the width at least halves
/// per round.
#[derive(Clone, Debug)]
pub struct CertifiedInterval {
    exponent: RationalPow2,
    int_part: i64,
    scale: u64,
    lo: Nat,
    hi: Nat,
}

impl CertifiedInterval {
    pub fn new(e: &RationalPow2) -> Self {
        assert!(
            !e.is_integral(),
            "integral exponents are exact; no interval needed"
        );
        let (w, r) = e.split();
        let scale = 64;
        let (lo, hi) = pow2_fraction_bounds(r, e.denom(), scale);
        CertifiedInterval {
            exponent: *e,
            int_part: w,
            scale,
            lo,
            hi,
        }
    }

    pub fn exponent(&self) -> &RationalPow2 {
        &self.exponent
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    /// Lower/upper mantissa bounds for the fractional factor in `(1, 2)`.
    pub fn bounds(&self) -> (&Nat, &Nat) {
        (&self.lo, &self.hi)
    }

    /// Width of the enclosure in units of `2^-scale`.
    pub fn width(&self) -> Nat {
        &self.hi - &self.lo
    }

    pub fn refine(&mut self) {
        self.refine_to(self.scale * 2);
    }

    pub fn refine_to(&mut self, scale: u64) {
        if scale <= self.scale {
            return;
        }
        let (_, r) = self.exponent.split();
        let (lo, hi) = pow2_fraction_bounds(r, self.exponent.denom(), scale);
        self.scale = scale;
        self.lo = lo;
        self.hi = hi;
    }

    /// `floor(a · 2^e)` through the interval, refining until the floor is
    /// forced. Guard policy: start at `bits(a) + 32` fractional bits, double
    /// on failure to separate, and past `bits(a) + 4096` fall back to the
    /// integer-root oracle so the operation stays total and exact.
    pub fn floor_mul(&mut self, a: &Nat) -> Nat {
        if a.is_zero() {
            return Nat::zero();
        }
        let needed = a.bits() + FLOOR_GUARD_BITS;
        if self.scale < needed {
            // Jump past the immediate need so a growing caller (the
            // geometric builder) refines O(log) times, not per step.
            self.refine_to(needed + needed / 2);
        }
        loop {
            let p = a * &self.lo;
            let q = &p + a * self.width();
            let sh = self.int_part - self.scale as i64;
            let flo = shift_floor(&p, sh);
            let fhi = shift_floor(&q, sh);
            if flo == fhi {
                return flo;
            }
            if self.scale >= a.bits() + FLOOR_CAP_BITS {
                return floor_mul_pow2_oracle(a, &self.exponent);
            }
            self.refine();
        }
    }
}

fn shift_floor(n: &Nat, t: i64) -> Nat {
    if t >= 0 {
        n << t as u64
    } else {
        n >> t.unsigned_abs()
    }
}

// ---------------------------------------------------------------------------
// floor(a · 2^e)
// ---------------------------------------------------------------------------

/// `floor(a · 2^e)` via the certified interval fast path (oracle fallback
/// past the refinement cap keeps it total).
pub fn floor_mul_pow2(a: &Nat, e: &RationalPow2) -> Nat {
    if a.is_zero() {
        return Nat::zero();
    }
    if e.is_integral() {
        return shift_floor(a, e.numer());
    }
    CertifiedInterval::new(e).floor_mul(a)
}

/// Oracle route: `floor(a · 2^(p/q)) = iroot(floor(2^p · a^q), q)`.
/// Exact by clearing the denominator; cost grows with `q · bits(a)`.
pub fn floor_mul_pow2_oracle(a: &Nat, e: &RationalPow2) -> Nat {
    if a.is_zero() {
        return Nat::zero();
    }
    if e.is_integral() {
        return shift_floor(a, e.numer());
    }
    let q = e.denom();
    let aq = pow_u64(a, q);
    let shifted = shift_floor(&aq, e.numer());
    iroot(&shifted, u32::try_from(q).expect("root degree too large"))
}

/// Dual-route floor: computes both the interval fast path and the oracle
/// and panics on disagreement. A mismatch is an implementation bug, never a
/// data condition, hence the panic.
pub fn floor_mul_pow2_checked(a: &Nat, e: &RationalPow2) -> Nat {
    let fast = floor_mul_pow2(a, e);
    let oracle = floor_mul_pow2_oracle(a, e);
    assert_eq!(
        fast, oracle,
        "floor_mul_pow2 routes disagree for {} bits * {}",
        a.bits(),
        e
    );
    fast
}

// ---------------------------------------------------------------------------
// Comparisons
// ---------------------------------------------------------------------------

/// Exact order of a natural `n` against `2^(u/v)`.
///
/// Defined as the order of `n^v` versus `2^u` for `u >= 0`; for `u < 0` the
/// value `2^(u/v)` lies in `(0, 1)`, so any `n >= 1` compares `Greater`.
/// By convention `n = 0` compares `Less` against every power of two.
///
/// An octave prefilter on bit lengths decides almost all calls without big
/// arithmetic; within the ambiguous octave, small cases clear denominators
/// and large cases refine a dyadic enclosure (the exponent is non-integral
/// there, so the value is irrational and separation is guaranteed).
pub fn cmp_nat_pow2(n: &Nat, e: &RationalPow2) -> Ordering {
    if n.is_zero() {
        return Ordering::Less;
    }
    if e.numer() < 0 {
        return Ordering::Greater;
    }
    let u = e.numer() as u128;
    let v = e.denom() as u128;
    let b = n.bits() as u128; // n in [2^(b-1), 2^b)
    if (b - 1) * v > u {
        return Ordering::Greater;
    }
    if (b - 1) * v == u {
        // 2^(u/v) = 2^(b-1) exactly (the quotient is integral here).
        return if n.count_ones() == 1 {
            Ordering::Equal
        } else {
            Ordering::Greater
        };
    }
    if b * v <= u {
        return Ordering::Less;
    }
    // Same octave: 2^(b-1) < 2^(u/v) < 2^b, and v does not divide u.
    let (u, v) = (e.numer() as u64, e.denom());
    if v <= 64 && n.bits() <= 4096 {
        return pow_u64(n, v).cmp(&(Nat::one() << u));
    }
    let w = u / v;
    let r = u % v;
    let mut scale = SUM_START_BITS;
    loop {
        let (lo, hi) = pow2_fraction_bounds(r, v, scale);
        let a = n << scale;
        if a < lo.clone() << w {
            return Ordering::Less;
        }
        if a > hi << w {
            return Ordering::Greater;
        }
        scale *= 2;
        assert!(
            scale <= SUM_CAP_BITS,
            "unreachable: irrational comparison failed to separate"
        );
    }
}

/// A term `coeff · 2^e` of a comparison sum.
pub type Pow2Term = (Nat, RationalPow2);

/// Exact order of `n` against `sum_i coeff_i · 2^(e_i)`; all coefficients
/// are naturals. Delegates to [`cmp_pow2_sums`].
pub fn cmp_nat_sum_pow2(n: &Nat, terms: &[Pow2Term]) -> Result<Ordering, ExactError> {
    cmp_pow2_sums(&[(n.clone(), RationalPow2::zero())], terms)
}

/// Exact order of two sums of natural multiples of rational powers of two.
///
/// Both sides are first rewritten over the common root `beta = 2^(1/N)`
/// (`N` the lcm of the exponent denominators) as integer combinations of
/// `beta^a`, `0 <= a < N`. Since `1, beta, ..., beta^(N-1)` are linearly
/// independent over the rationals, cancelling matching terms detects exact
/// ties; what remains, if anything, differs, so dyadic interval refinement
/// is guaranteed to separate it. The precision cap is a safety valve only.
pub fn cmp_pow2_sums(lhs: &[Pow2Term], rhs: &[Pow2Term]) -> Result<Ordering, ExactError> {
    // Common denominator.
    let mut n_den: u64 = 1;
    for (c, e) in lhs.iter().chain(rhs.iter()) {
        if !c.is_zero() {
            n_den = num_integer::lcm(n_den, e.denom());
        }
    }

    // Decompose each term as coeff · 2^w · beta^a and find the lowest w so
    // all coefficients can be scaled to integers.
    let decompose = |terms: &[Pow2Term]| -> Vec<(Nat, i64, u64)> {
        terms
            .iter()
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, e)| {
                let scaled = (e.numer() as i128) * ((n_den / e.denom()) as i128);
                let scaled = i64::try_from(scaled).expect("exponent overflow");
                let w = scaled.div_euclid(n_den as i64);
                let a = scaled.rem_euclid(n_den as i64) as u64;
                (c.clone(), w, a)
            })
            .collect()
    };
    let dl = decompose(lhs);
    let dr = decompose(rhs);
    let w_min = dl
        .iter()
        .chain(dr.iter())
        .map(|&(_, w, _)| w)
        .min()
        .unwrap_or(0);

    let collect = |dec: Vec<(Nat, i64, u64)>| -> BTreeMap<u64, Nat> {
        let mut map: BTreeMap<u64, Nat> = BTreeMap::new();
        for (c, w, a) in dec {
            let shifted = c << u64::try_from(w - w_min).expect("exponent span overflow");
            *map.entry(a).or_insert_with(Nat::zero) += shifted;
        }
        map
    };
    let mut ml = collect(dl);
    let mut mr = collect(dr);

    // Cancel shared parts; this is where exact ties resolve to Equal.
    let residues: Vec<u64> = ml.keys().chain(mr.keys()).copied().collect();
    for a in residues {
        let l = ml.get(&a).cloned().unwrap_or_else(Nat::zero);
        let r = mr.get(&a).cloned().unwrap_or_else(Nat::zero);
        let m = l.clone().min(r.clone());
        if !m.is_zero() {
            set_or_remove(&mut ml, a, l - &m);
            set_or_remove(&mut mr, a, r - &m);
        } else {
            if l.is_zero() {
                ml.remove(&a);
            }
            if r.is_zero() {
                mr.remove(&a);
            }
        }
    }

    match (ml.is_empty(), mr.is_empty()) {
        (true, true) => return Ok(Ordering::Equal),
        (true, false) => return Ok(Ordering::Less),
        (false, true) => return Ok(Ordering::Greater),
        _ => {}
    }

    // Interval refinement on the surviving (now disjoint) parts.
    let mut scale = SUM_START_BITS;
    loop {
        let (l_lo, l_hi) = sum_bounds(&ml, n_den, scale);
        let (r_lo, r_hi) = sum_bounds(&mr, n_den, scale);
        if l_hi < r_lo {
            return Ok(Ordering::Less);
        }
        if r_hi < l_lo {
            return Ok(Ordering::Greater);
        }
        if scale >= SUM_CAP_BITS {
            return Err(ExactError::Unresolved { bits: scale });
        }
        scale *= 2;
    }
}

fn set_or_remove(map: &mut BTreeMap<u64, Nat>, key: u64, value: Nat) {
    if value.is_zero() {
        map.remove(&key);
    } else {
        map.insert(key, value);
    }
}

fn sum_bounds(parts: &BTreeMap<u64, Nat>, n_den: u64, scale: u64) -> (Nat, Nat) {
    let mut lo = Nat::zero();
    let mut hi = Nat::zero();
    for (&a, c) in parts {
        let (blo, bhi) = residue_bounds(a, n_den, scale);
        lo += c * blo;
        hi += c * bhi;
    }
    (lo, hi)
}

// ---------------------------------------------------------------------------
// Exact ceilings of reciprocal gaps
// ---------------------------------------------------------------------------

/// Exact `ceil(1 / ((2^a - 1) · (1 - 2^b)))` for `0 < a < 1`; the second
/// factor is included when `b` is given and must satisfy `-1 < b < 0`.
///
/// The quantity is irrational, so refining dyadic bounds pins the ceiling
/// after finitely many rounds.
pub fn ceil_inv_pow2_gap(a: &RationalPow2, b: Option<&RationalPow2>) -> Nat {
    assert!(a.is_positive() && !a.is_integral() && a.numer() > 0);
    assert!(
        cmp_unit_fraction(a),
        "first exponent must lie strictly between 0 and 1"
    );
    if let Some(b) = b {
        assert!(
            b.numer() < 0 && !b.is_integral() && cmp_unit_fraction(&b.negated()),
            "second exponent must lie strictly between -1 and 0"
        );
    }
    let mut scale = 128u64;
    loop {
        // Bounds for 2^a - 1 at `scale`.
        let (alo, ahi) = pow2_fraction_bounds(a.numer() as u64, a.denom(), scale);
        let one = Nat::one() << scale;
        let f1_lo = &alo - &one;
        let f1_hi = &ahi - &one;

        // Bounds for the full gap product at 2·scale.
        let (w_lo, w_hi) = match b {
            None => (&f1_lo << scale, &f1_hi << scale),
            Some(b) => {
                // 1 - 2^b = 1 - 1/2^(-b); bound the reciprocal first.
                let nb = b.negated();
                let (glo, ghi) = pow2_fraction_bounds(nb.numer() as u64, nb.denom(), scale);
                let two_s = Nat::one() << (2 * scale);
                let inv_lo = &two_s / &ghi;
                let inv_hi = ceil_div(&two_s, &glo);
                let f2_lo = &one - &inv_hi;
                let f2_hi = &one - &inv_lo;
                if inv_hi > one {
                    // Not yet enough precision to certify positivity.
                    scale *= 2;
                    continue;
                }
                (&f1_lo * &f2_lo, &f1_hi * &f2_hi)
            }
        };
        if w_lo.is_zero() {
            scale *= 2;
            continue;
        }
        // T = 1/W with W in [w_lo, w_hi]·2^(-2·scale).
        let num = Nat::one() << (2 * scale);
        let t_hi = ceil_div(&num, &w_lo);
        let t_lo = ceil_div(&num, &w_hi);
        if t_lo == t_hi {
            return t_lo;
        }
        scale *= 2;
    }
}

/// True iff `0 < e < 1` for a positive exponent.
fn cmp_unit_fraction(e: &RationalPow2) -> bool {
    e.numer() > 0 && (e.numer() as u64) < e.denom()
}

fn ceil_div(n: &Nat, d: &Nat) -> Nat {
    (n + (d - 1u32)) / d
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
