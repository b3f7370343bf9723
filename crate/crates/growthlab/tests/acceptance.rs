//! Acceptance gate. Each criterion_NN test exercises one headline claim
//! end to end and prints a single PASS/FAIL line (visible with
//! `cargo test -- --nocapture`).

use growthlab::algebra::{self, MonomialAlgebraSpec};
use growthlab::exact::{
    cmp_pow2_sums, floor_mul_pow2, floor_mul_pow2_oracle, iroot, pow_u64, Nat, RationalPow2,
};
use growthlab::growthfn::{verify_condition_i, verify_lower_bound, GrowthTable};
use growthlab::omega::Omega;
use growthlab::schedule::{build_schedule, find_min_d, BuildParams, Mode};
use growthlab::verify::{
    check_derivative_condition, check_dominance, check_increasing, check_submultiplicative,
    find_witness, OwnedSeq, Strategy,
};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::OnceLock;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !($cond) {
            return Err(format!($($arg)+));
        }
    };
}

fn criterion<F>(num: u32, desc: &str, body: F)
where
    F: FnOnce() -> Result<String, String>,
{
    match body() {
        Ok(detail) => println!("criterion {num:02}: PASS - {desc} ({detail})"),
        Err(why) => {
            println!("criterion {num:02}: FAIL - {desc}: {why}");
            panic!("criterion {num:02} failed: {why}");
        }
    }
}

/// Certified staged function, log decay profile, tabulated to 5000.
fn fixture() -> &'static GrowthTable {
    static FIXTURE: OnceLock<GrowthTable> = OnceLock::new();
    FIXTURE.get_or_init(|| {
        let mut params = BuildParams::certified(1);
        params.omega = Some(Omega::Log);
        let sched = build_schedule(&params).expect("certified depth-1 schedule");
        GrowthTable::build(sched, 5000, GrowthTable::default_mem_budget()).expect("table")
    })
}

fn nat(x: u64) -> Nat {
    Nat::from(x)
}

fn algebra_corpus() -> Vec<(u32, Vec<String>)> {
    let words = |ws: &[&str]| ws.iter().map(|s| s.to_string()).collect();
    vec![
        (2, words(&[])),
        (3, words(&[])),
        (2, words(&["11"])),
        (2, words(&["01", "10"])),
        (1, words(&[])),
    ]
}

#[test]
fn criterion_01_cli_builds_certified_artifacts() {
    criterion(1, "CLI builds a certified schedule and table", || {
        let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
        let dir = tmp.path().join("out");
        let started = std::time::Instant::now();
        let out = std::process::Command::new(env!("CARGO_BIN_EXE_growthlab"))
            .args([
                "build",
                "--d1",
                "3",
                "--depth",
                "1",
                "--mode",
                "certified",
                "--omega",
                "log",
                "--out",
                dir.to_str().unwrap(),
            ])
            .output()
            .map_err(|e| e.to_string())?;
        let elapsed = started.elapsed();
        ensure!(
            out.status.code() == Some(0),
            "exit {:?}, stderr: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        );
        ensure!(elapsed.as_secs() < 60, "took {elapsed:?}");
        let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
        ensure!(
            stdout.contains("k=1 d=3 n=127"),
            "unexpected stage line in {stdout:?}"
        );
        let sched = std::fs::read_to_string(dir.join("schedule.json")).map_err(|e| e.to_string())?;
        ensure!(sched.contains("\"n\": 127"), "schedule.json lacks n=127");
        ensure!(sched.contains("\"mode\": \"certified\""), "not certified");
        let table = std::fs::read_to_string(dir.join("table.csv")).map_err(|e| e.to_string())?;
        let rows = table.lines().count() - 1;
        ensure!(rows == 512, "expected 512 rows, got {rows}");
        ensure!(
            dir.join("checkpoints.json").exists(),
            "checkpoints.json missing"
        );
        Ok(format!("n_1=127, 512 rows, {elapsed:?}"))
    });
}

#[test]
fn criterion_02_submultiplicative_exhaustive() {
    criterion(2, "f(p+q) <= f(p)f(q) for all p+q <= 5000", || {
        let report = check_submultiplicative(fixture(), 5000, Strategy::Exhaustive)
            .map_err(|e| e.to_string())?;
        ensure!(report.pass, "violation: {:?}", report.violation);
        ensure!(
            report.pairs_checked == 6_250_000,
            "expected 6250000 pairs, got {}",
            report.pairs_checked
        );
        ensure!(
            report.fast_filtered < report.pairs_checked,
            "filter claimed every pair; exact route never ran"
        );
        Ok(format!(
            "pairs={}, filtered={}",
            report.pairs_checked, report.fast_filtered
        ))
    });
}

#[test]
fn criterion_03_strictly_increasing() {
    criterion(3, "f is strictly increasing over the full horizon", || {
        let report = check_increasing(fixture(), 1, 5000);
        ensure!(
            report.pass,
            "first violation at {:?}",
            report.first_violation
        );
        ensure!(report.checked == 4999, "checked {}", report.checked);
        Ok(format!("checked={}", report.checked))
    });
}

#[test]
fn criterion_04_stage_invariants_hold_and_are_ledgered() {
    criterion(4, "stage invariants verified; demo ledger records failures", || {
        let table = fixture();
        let lower = verify_lower_bound(table, 1, 5000).map_err(|e| e.to_string())?;
        ensure!(lower.pass, "lower bound failures: {:?}", lower.failures);
        ensure!(lower.checked == 381, "lower bound checked {}", lower.checked);
        ensure!(lower.weak_at_one, "x=1 should take the weak form");
        let cond = verify_condition_i(table, 1).map_err(|e| e.to_string())?;
        ensure!(cond.pass, "condition I failures: {:?}", cond.failures);
        ensure!(
            cond.lo == 381 && cond.hi == 5000,
            "condition I range [{}, {}]",
            cond.lo,
            cond.hi
        );

        // An uncertifiable parameter choice is not silently accepted: demo
        // mode records exactly which ledger lines fail.
        let mut params = BuildParams::certified(1);
        params.mode = Mode::Demo;
        params.d_overrides.insert(1, 3);
        params.n_overrides.insert(1, 8);
        let demo = build_schedule(&params).map_err(|e| e.to_string())?;
        let failed = demo.entries[0].ledger.failed_ids();
        ensure!(
            failed == ["C3", "C4", "C7", "C8", "C10"],
            "demo (d=3, n=8) failed ids: {failed:?}"
        );
        Ok(format!(
            "lower bound to 381, condition I to 5000, demo fails {failed:?}"
        ))
    });
}

#[test]
fn criterion_05_collapsing_inequality_witness() {
    criterion(5, "scheduled violation of the collapsing inequality", || {
        let w = find_witness(fixture(), 1).map_err(|e| e.to_string())?;
        ensure!(w.c == 1 && w.d_cap == 2 && w.n == 128, "recipe gave C={} D={} n={}", w.c, w.d_cap, w.n);
        ensure!(
            w.lhs_bits == 146 && w.rhs_bits == 69,
            "bit sizes {} vs {}",
            w.lhs_bits,
            w.rhs_bits
        );
        // The gap is not marginal: the left side exceeds the right by more
        // than ten binary orders of magnitude.
        ensure!(
            w.lhs_bits > w.rhs_bits + 10,
            "gap too small: {} vs {}",
            w.lhs_bits,
            w.rhs_bits
        );
        let lhs = Nat::parse_bytes(w.lhs_hex.trim_start_matches("0x").as_bytes(), 16)
            .ok_or("bad lhs hex")?;
        let rhs = Nat::parse_bytes(w.rhs_hex.trim_start_matches("0x").as_bytes(), 16)
            .ok_or("bad rhs hex")?;
        ensure!(lhs > rhs, "witness does not violate the inequality");
        Ok(format!(
            "C=1 D=2 n=128, lhs {} bits vs rhs {} bits",
            w.lhs_bits, w.rhs_bits
        ))
    });
}

#[test]
fn criterion_06_derivative_condition_separates() {
    criterion(6, "step-size condition holds for algebras, fails for f", || {
        // Free on 2 and 3 letters, one forbidden square (Fibonacci),
        // both mixed products, and a single letter.
        for (g, forbidden) in algebra_corpus() {
            let spec =
                MonomialAlgebraSpec::new(g, forbidden.clone()).map_err(|e| e.to_string())?;
            let gamma = algebra::growth_table(&spec, 40);
            for d in [2u64, 3] {
                let report = check_derivative_condition(&gamma, d, 40);
                ensure!(
                    report.pass,
                    "algebra g={g} {forbidden:?} violates at d={d}: {:?}",
                    report.violation
                );
            }
        }
        let report = check_derivative_condition(fixture(), 2, 512);
        ensure!(!report.pass, "f unexpectedly satisfies the condition");
        let v = report.violation.ok_or("missing violation")?;
        ensure!(
            v.n == 2 && v.m == 4 && v.lhs == "8" && v.rhs == "4",
            "violation was (n={}, m={}, lhs={}, rhs={})",
            v.n,
            v.m,
            v.lhs,
            v.rhs
        );
        Ok("5 algebras pass d=2,3; f fails at (n=2, m=4)".to_string())
    });
}

#[test]
fn criterion_07_dominance_over_the_decay_profile() {
    criterion(7, "f(x) >= 2^(x w(x)) past the seed segment", || {
        let report = check_dominance(fixture(), &Omega::Log).map_err(|e| e.to_string())?;
        ensure!(report.pass, "first failure at {:?}", report.first_failure);
        ensure!(
            report.lo == 127 && report.hi == 5000,
            "range [{}, {}]",
            report.lo,
            report.hi
        );
        Ok(format!("checked={} from x=127", report.checked))
    });
}

#[test]
fn criterion_08_exact_engine_agrees_with_root_oracle() {
    criterion(8, "floor(a 2^(p/q)) fast path == root oracle, certified", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xF100D);
        let rand_nat = |rng: &mut ChaCha8Rng, bits: u64| -> Nat {
            let mut buf = vec![0u8; bits.div_ceil(8) as usize];
            rng.fill_bytes(&mut buf);
            let mask = (Nat::one() << bits) - 1u32;
            (Nat::from_bytes_le(&buf) & mask) | (Nat::one() << (bits - 1))
        };
        let mut cases = 0u32;
        let run_case = |rng: &mut ChaCha8Rng, bits: u64, q: u64, num: i64| -> Result<(), String> {
            let a = rand_nat(rng, bits);
            let e = RationalPow2::new(num, q);
            let fast = floor_mul_pow2(&a, &e);
            let oracle = floor_mul_pow2_oracle(&a, &e);
            ensure!(
                fast == oracle,
                "fast != oracle for {bits}-bit a, e=2^({num}/{q})"
            );
            // Third route: the defining sandwich floor <= a 2^e < floor + 1,
            // decided by the sum comparator.
            let le = cmp_pow2_sums(
                &[(fast.clone(), RationalPow2::from_int(0))],
                &[(a.clone(), e)],
            )
            .map_err(|err| format!("unresolved lower: {err}"))?;
            ensure!(le != Ordering::Greater, "floor exceeds a 2^e");
            let gt = cmp_pow2_sums(
                &[(fast + 1u32, RationalPow2::from_int(0))],
                &[(a, e)],
            )
            .map_err(|err| format!("unresolved upper: {err}"))?;
            ensure!(gt == Ordering::Greater, "floor + 1 <= a 2^e");
            Ok(())
        };
        for _ in 0..800 {
            let bits = rng.gen_range(1..=256);
            let q = rng.gen_range(1..=64);
            let num = rng.gen_range(-(8 * q as i64)..=8 * q as i64);
            run_case(&mut rng, bits, q, num)?;
            cases += 1;
        }
        for _ in 0..200 {
            let bits = rng.gen_range(1..=4096);
            let q = rng.gen_range(1..=3);
            let num = rng.gen_range(-(2 * q as i64)..=2 * q as i64);
            run_case(&mut rng, bits, q, num)?;
            cases += 1;
        }
        // Integer roots: r^m <= x < (r+1)^m.
        for _ in 0..200 {
            let bits = rng.gen_range(1..=512);
            let x = rand_nat(&mut rng, bits);
            let m = rng.gen_range(1..=16u32);
            let r = iroot(&x, m);
            ensure!(pow_u64(&r, m as u64) <= x, "r^m > x");
            ensure!(pow_u64(&(r + 1u32), m as u64) > x, "(r+1)^m <= x");
        }
        Ok(format!("{cases} floor cases + 200 root cases, 0 unresolved"))
    });
}

#[test]
fn criterion_09_checkers_agree_with_naive_oracles() {
    criterion(9, "fast checkers match brute-force re-derivations", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
        for case in 0..200 {
            let len = rng.gen_range(4..=300u64);
            let values: Vec<Nat> = if case % 4 == 0 {
                // Guaranteed-submultiplicative shape A * B^x with A >= 1.
                let a = rng.gen_range(1..=16u64);
                let b = rng.gen_range(2..=5u64);
                (1..=len).map(|x| nat(a) * pow_u64(&nat(b), x)).collect()
            } else {
                (0..len)
                    .map(|_| {
                        let hi = 1u64 << rng.gen_range(1..=48);
                        nat(rng.gen_range(1..=hi))
                    })
                    .collect()
            };
            let n_max = len;
            let seq = OwnedSeq::new(1, values.clone());

            let report = check_submultiplicative(&seq, n_max, Strategy::Exhaustive)
                .map_err(|e| e.to_string())?;
            let naive = naive_submul(&values, n_max);
            ensure!(
                report.pass == naive.is_none(),
                "case {case}: submul pass={} but naive found {naive:?}",
                report.pass
            );
            if let Some((p, q)) = naive {
                let v = report.violation.as_ref().ok_or("missing violation")?;
                ensure!(
                    (v.p, v.q) == (p, q),
                    "case {case}: first violation ({}, {}) vs naive ({p}, {q})",
                    v.p,
                    v.q
                );
            }

            for d in [2u64, 3] {
                let report = check_derivative_condition(&seq, d, n_max);
                let naive = naive_derivative(&values, d, n_max);
                ensure!(
                    report.pass == naive.is_none(),
                    "case {case}: derivative d={d} pass={} vs naive {naive:?}",
                    report.pass
                );
                if let Some((n, m)) = naive {
                    let v = report.violation.as_ref().ok_or("missing violation")?;
                    ensure!(
                        (v.n, v.m) == (n, m),
                        "case {case}: derivative violation ({}, {}) vs naive ({n}, {m})",
                        v.n,
                        v.m
                    );
                }
            }
        }

        // Automaton counting vs direct enumeration, on the standard corpus
        // plus two specs that exercise factor-minimal reduction.
        let mut corpus = algebra_corpus();
        corpus.push((3, vec!["012".to_string()]));
        corpus.push((2, vec!["0110".to_string(), "11".to_string()]));
        for (g, forbidden) in corpus {
            let spec =
                MonomialAlgebraSpec::new(g, forbidden.clone()).map_err(|e| e.to_string())?;
            for len in 0..=10u32 {
                let fast = algebra::word_count(&spec, len as u64);
                let brute = algebra::brute_force_count(&spec, len).map_err(|e| e.to_string())?;
                ensure!(
                    fast == brute,
                    "g={g} {forbidden:?} len={len}: {fast} vs {brute}"
                );
            }
        }

        // Big-denominator geometric segment (ratio 2^(1/80)): replay every
        // step through the plain root oracle.
        let mut params = BuildParams::certified(1);
        params.mode = Mode::Demo;
        params.d_overrides.insert(1, 40);
        params.n_overrides.insert(1, 4);
        let sched = build_schedule(&params).map_err(|e| e.to_string())?;
        let table = GrowthTable::build(sched, 400, GrowthTable::default_mem_budget())
            .map_err(|e| e.to_string())?;
        let mut v = table.value_at(160).map_err(|e| e.to_string())?;
        ensure!(v == nat(13042), "f(160) = {v}, expected 13042");
        let ratio = RationalPow2::new(1, 80);
        for x in 161..=400 {
            v = floor_mul_pow2_oracle(&v, &ratio);
            let got = table.value_at(x).map_err(|e| e.to_string())?;
            ensure!(got == v, "x={x}: table {got} vs oracle chain {v}");
        }
        Ok("200 sequences, 7 algebras, 240-step oracle replay".to_string())
    });
}

fn naive_submul(values: &[Nat], n_max: u64) -> Option<(u64, u64)> {
    let f = |x: u64| &values[(x - 1) as usize];
    for p in 1..=n_max / 2 {
        for q in p..=n_max - p {
            if *f(p + q) > f(p) * f(q) {
                return Some((p, q));
            }
        }
    }
    None
}

fn naive_derivative(values: &[Nat], d: u64, n_max: u64) -> Option<(u64, u64)> {
    let fp = |x: u64| BigInt::from(values[(x - 1) as usize].clone())
        - BigInt::from(values[(x - 2) as usize].clone());
    for n in 2..=n_max {
        let mut rhs = BigInt::one();
        for _ in 0..d {
            rhs *= fp(n);
        }
        for m in n..=(d * n).min(n_max) {
            if fp(m) > rhs {
                return Some((n, m));
            }
        }
    }
    None
}

#[test]
fn criterion_10_deeper_stages_and_scope_statement() {
    criterion(10, "stage-2 parameters derive and verify; scope documented", || {
        let readme = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../README.md"))
            .map_err(|e| format!("README.md: {e}"))?;
        ensure!(
            readme.contains("finite horizon"),
            "README does not state the finite-horizon scope"
        );
        ensure!(
            readme.to_lowercase().contains("asymptotic"),
            "README does not discuss asymptotic scope"
        );

        let sched = build_schedule(&BuildParams::certified(2)).map_err(|e| e.to_string())?;
        let dims: Vec<(u32, u64, u64)> =
            sched.entries.iter().map(|e| (e.k, e.d, e.n)).collect();
        ensure!(
            dims == [(1, 3, 64), (2, 194, 39072)],
            "stages {dims:?}"
        );
        ensure!(sched.all_ledgers_pass(), "a stage ledger failed");
        let p2 = sched.p_through(2).map_err(|e| e.to_string())?;
        ensure!(p2 == 582, "P_2 = {p2}");

        let mut prefix = sched.clone();
        prefix.entries.truncate(1);
        let d2 = find_min_d(&prefix, 2).map_err(|e| e.to_string())?;
        ensure!(d2 == 194, "find_min_d gave {d2}");

        let n2 = 39072u64;
        let table = GrowthTable::build(sched, n2 + 64, GrowthTable::default_mem_budget())
            .map_err(|e| e.to_string())?;
        let at = |x: u64| table.value_at(x).map_err(|e| e.to_string());
        ensure!(at(64)? == Nat::one() << 64, "f(64) != 2^64");
        ensure!(
            at(192)? == (Nat::one() << 64) + nat(16576),
            "f(192) off the closed form"
        );
        let label = |x: u64| table.segment_label_at(x).unwrap_or_default();
        ensure!(label(n2) == "geom:1", "segment at n_2 is {}", label(n2));
        ensure!(
            label(n2 + 1) == "arith:2",
            "segment after n_2 is {}",
            label(n2 + 1)
        );
        // Second arithmetic stage: f(x) - f(x-1) = x + 1.
        ensure!(
            at(n2 + 1)? - at(n2)? == nat(n2 + 2),
            "first arith:2 step has the wrong size"
        );
        let mut span = Nat::zero();
        for x in n2 + 1..=n2 + 64 {
            span += nat(x + 1);
        }
        ensure!(
            at(n2 + 64)? - at(n2)? == span,
            "arith:2 prefix sum disagrees with the recurrence"
        );
        Ok(format!("stages (3,64), (194,39072); P_2=582"))
    });
}

/// Sanity net for the shared fixture itself.
#[test]
fn fixture_matches_frozen_values() {
    let table = fixture();
    assert_eq!(table.value_at(127).unwrap(), Nat::one() << 127);
    assert_eq!(
        table.value_at(381).unwrap(),
        (Nat::one() << 127) + nat(64897)
    );
    assert_eq!(table.horizon(), 5000);
    let entries: BTreeMap<u32, (u64, u64)> = table
        .schedule()
        .entries
        .iter()
        .map(|e| (e.k, (e.d, e.n)))
        .collect();
    assert_eq!(entries[&1], (3, 127));
}
