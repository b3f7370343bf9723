//! Growth of monomial algebras presented by forbidden factors.
//!
//! For an alphabet of g letters and a finite set of forbidden words, the
//! algebra's growth is γ(n) = 1 + Σ_{ℓ=1..n} c(ℓ) with c(ℓ) the number of
//! length-ℓ words avoiding every forbidden factor. Counting runs over the
//! factor automaton (Aho–Corasick with dead-state absorption); a direct
//! enumeration cross-checks it on small instances.

use crate::exact::Nat;
use crate::verify::SeqView;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, VecDeque};
use thiserror::Error;

/// Enumeration ceiling for the brute-force counter.
pub const BRUTE_FORCE_BUDGET: u128 = 10_000_000;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("alphabet size must be between 1 and 10, got {0}")]
    BadAlphabet(u32),
    #[error("forbidden word {0:?} uses a letter outside the {1}-letter alphabet")]
    BadWord(String, u32),
    #[error("an empty forbidden word collapses the algebra")]
    EmptyWord,
    #[error("brute force over g^len = {0} words exceeds the {BRUTE_FORCE_BUDGET} budget")]
    BudgetExceeded(u128),
}

/// On-disk presentation: letters are the digits 0..g-1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecFile {
    pub alphabet: u32,
    pub forbidden: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct MonomialAlgebraSpec {
    pub alphabet: u32,
    /// Forbidden words as given.
    pub forbidden_original: Vec<String>,
    /// Factor-minimal subset actually used: no kept word contains another.
    pub forbidden: Vec<String>,
    /// Redundant words removed by the reduction.
    pub dropped: Vec<String>,
}

fn digits_of(word: &str, alphabet: u32) -> Result<Vec<u8>, AlgebraError> {
    word.chars()
        .map(|c| {
            c.to_digit(10)
                .filter(|&d| d < alphabet)
                .map(|d| d as u8)
                .ok_or_else(|| AlgebraError::BadWord(word.to_string(), alphabet))
        })
        .collect()
}

fn contains_factor(word: &[u8], factor: &[u8]) -> bool {
    !factor.is_empty()
        && word.len() >= factor.len()
        && word.windows(factor.len()).any(|w| w == factor)
}

impl MonomialAlgebraSpec {
    pub fn new(alphabet: u32, forbidden: Vec<String>) -> Result<Self, AlgebraError> {
        if alphabet == 0 || alphabet > 10 {
            return Err(AlgebraError::BadAlphabet(alphabet));
        }
        let mut unique = BTreeSet::new();
        for w in &forbidden {
            if w.is_empty() {
                return Err(AlgebraError::EmptyWord);
            }
            digits_of(w, alphabet)?;
            unique.insert(w.clone());
        }
        // A word containing a shorter forbidden word is already excluded.
        let mut kept = Vec::new();
        let mut dropped = Vec::new();
        for w in &unique {
            let wd = digits_of(w, alphabet)?;
            let redundant = unique.iter().any(|u| {
                u != w && contains_factor(&wd, &digits_of(u, alphabet).expect("validated"))
            });
            if redundant {
                dropped.push(w.clone());
            } else {
                kept.push(w.clone());
            }
        }
        Ok(MonomialAlgebraSpec {
            alphabet,
            forbidden_original: forbidden,
            forbidden: kept,
            dropped,
        })
    }

    pub fn from_file(file: &SpecFile) -> Result<Self, AlgebraError> {
        Self::new(file.alphabet, file.forbidden.clone())
    }
}

/// Deterministic automaton whose live states are exactly the proper
/// suffix-classes of factor-avoiding words; a word avoids every forbidden
/// factor iff its run never leaves the live part.
#[derive(Debug, Clone)]
pub struct FactorAutomaton {
    next: Vec<Vec<u32>>,
    dead: Vec<bool>,
}

impl FactorAutomaton {
    pub fn build(spec: &MonomialAlgebraSpec) -> Self {
        let g = spec.alphabet as usize;
        let mut children: Vec<Vec<Option<u32>>> = vec![vec![None; g]];
        let mut terminal = vec![false];
        for w in &spec.forbidden {
            let mut s = 0usize;
            for &a in &digits_of(w, spec.alphabet).expect("validated") {
                let a = a as usize;
                s = match children[s][a] {
                    Some(t) => t as usize,
                    None => {
                        children.push(vec![None; g]);
                        terminal.push(false);
                        let id = (children.len() - 1) as u32;
                        children[s][a] = Some(id);
                        id as usize
                    }
                };
            }
            terminal[s] = true;
        }
        let n = children.len();
        let mut fail = vec![0u32; n];
        let mut next = vec![vec![0u32; g]; n];
        let mut dead = terminal;
        let mut queue = VecDeque::new();
        for a in 0..g {
            if let Some(t) = children[0][a] {
                next[0][a] = t;
                queue.push_back(t as usize);
            }
        }
        while let Some(v) = queue.pop_front() {
            dead[v] = dead[v] || dead[fail[v] as usize];
            for a in 0..g {
                match children[v][a] {
                    Some(t) => {
                        fail[t as usize] = next[fail[v] as usize][a];
                        next[v][a] = t;
                        queue.push_back(t as usize);
                    }
                    None => next[v][a] = next[fail[v] as usize][a],
                }
            }
        }
        FactorAutomaton { next, dead }
    }

    pub fn num_states(&self) -> usize {
        self.next.len()
    }

    pub fn num_live_states(&self) -> usize {
        self.dead.iter().filter(|&&d| !d).count()
    }

    /// True when the word avoids every forbidden factor.
    pub fn avoids(&self, word: &[u8]) -> bool {
        let mut s = 0usize;
        for &a in word {
            s = self.next[s][a as usize] as usize;
            if self.dead[s] {
                return false;
            }
        }
        true
    }
}

/// Exact growth data: gamma[n] = γ(n) and counts[n] = c(n) for n = 0..=N.
#[derive(Debug, Clone)]
pub struct GrowthSeq {
    pub gamma: Vec<Nat>,
    pub counts: Vec<Nat>,
    /// True when c(1) = 0: every letter is forbidden, so the algebra is
    /// just the ground field and the growth is constant. Not an error.
    pub degenerate: bool,
}

impl SeqView for GrowthSeq {
    fn min_index(&self) -> u64 {
        0
    }

    fn max_index(&self) -> u64 {
        self.gamma.len() as u64 - 1
    }

    fn value(&self, x: u64) -> Nat {
        self.gamma[x as usize].clone()
    }
}

/// γ(0..=n_max) by the transfer recursion on automaton states.
pub fn growth_table(spec: &MonomialAlgebraSpec, n_max: u64) -> GrowthSeq {
    let auto = FactorAutomaton::build(spec);
    let g = spec.alphabet as usize;
    let mut state_counts: Vec<Nat> = vec![Nat::zero(); auto.num_states()];
    state_counts[0] = Nat::one();
    let mut counts = Vec::with_capacity(n_max as usize + 1);
    let mut gamma = Vec::with_capacity(n_max as usize + 1);
    counts.push(Nat::one());
    gamma.push(Nat::one());
    for _ in 1..=n_max {
        let mut fresh: Vec<Nat> = vec![Nat::zero(); auto.num_states()];
        for (s, c) in state_counts.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for a in 0..g {
                let t = auto.next[s][a] as usize;
                if !auto.dead[t] {
                    fresh[t] += c;
                }
            }
        }
        let total: Nat = fresh.iter().sum();
        gamma.push(gamma.last().unwrap() + &total);
        counts.push(total);
        state_counts = fresh;
    }
    let degenerate = counts.len() > 1 && counts[1].is_zero();
    GrowthSeq {
        gamma,
        counts,
        degenerate,
    }
}

/// c(len) from the automaton alone.
pub fn word_count(spec: &MonomialAlgebraSpec, len: u64) -> Nat {
    growth_table(spec, len).counts.swap_remove(len as usize)
}

/// c(len) by enumerating all g^len words against the ORIGINAL forbidden
/// set, independent of both the reduction and the automaton.
pub fn brute_force_count(spec: &MonomialAlgebraSpec, len: u32) -> Result<Nat, AlgebraError> {
    let total = (spec.alphabet as u128)
        .checked_pow(len)
        .ok_or(AlgebraError::BudgetExceeded(u128::MAX))?;
    if total > BRUTE_FORCE_BUDGET {
        return Err(AlgebraError::BudgetExceeded(total));
    }
    let patterns: Vec<Vec<u8>> = spec
        .forbidden_original
        .iter()
        .map(|w| digits_of(w, spec.alphabet).expect("validated"))
        .collect();
    let g = spec.alphabet as u8;
    let mut word = vec![0u8; len as usize];
    let mut count = Nat::zero();
    loop {
        if !patterns.iter().any(|p| contains_factor(&word, p)) {
            count += 1u32;
        }
        // Odometer increment; finished when every digit wraps.
        let mut i = word.len();
        loop {
            if i == 0 {
                return Ok(count);
            }
            i -= 1;
            word[i] += 1;
            if word[i] < g {
                break;
            }
            word[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{check_derivative_condition, check_submultiplicative, Strategy};

    fn nat(x: u64) -> Nat {
        Nat::from(x)
    }

    fn spec(alphabet: u32, forbidden: &[&str]) -> MonomialAlgebraSpec {
        MonomialAlgebraSpec::new(alphabet, forbidden.iter().map(|s| s.to_string()).collect())
            .unwrap()
    }

    #[test]
    fn fibonacci_counts_from_forbidden_square() {
        let fib = spec(2, &["11"]);
        let table = growth_table(&fib, 10);
        let expect = [1u64, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144];
        for (n, &c) in expect.iter().enumerate() {
            assert_eq!(table.counts[n], nat(c), "c({n})");
        }
        assert_eq!(table.gamma[3], nat(11));
        assert!(!table.degenerate);
        // c(n) = c(n−1) + c(n−2) for n ≥ 2.
        for n in 2..=10 {
            assert_eq!(
                table.counts[n],
                &table.counts[n - 1] + &table.counts[n - 2]
            );
        }
    }

    #[test]
    fn free_algebra_counts() {
        let free2 = spec(2, &[]);
        let t2 = growth_table(&free2, 6);
        assert_eq!(t2.counts[3], nat(8));
        assert_eq!(t2.gamma[3], nat(15));
        for n in 1..=6 {
            assert_eq!(t2.counts[n], &t2.counts[n - 1] * &nat(2));
        }
        let free3 = spec(3, &[]);
        assert_eq!(word_count(&free3, 2), nat(9));
    }

    #[test]
    fn alternation_forbidden_gives_constant_counts() {
        let s = spec(2, &["01", "10"]);
        let table = growth_table(&s, 8);
        assert_eq!(table.counts[1], nat(2));
        assert_eq!(table.counts[4], nat(2));
        for n in 2..=8 {
            assert_eq!(table.counts[n], table.counts[n - 1]);
        }
        // γ(n) = 2n + 1.
        assert_eq!(table.gamma[8], nat(17));
    }

    #[test]
    fn single_letter_alphabet() {
        let s = spec(1, &[]);
        let table = growth_table(&s, 5);
        for n in 0..=5u64 {
            assert_eq!(table.gamma[n as usize], nat(n + 1));
        }
    }

    #[test]
    fn degenerate_spec_flagged_not_fatal() {
        let s = spec(1, &["0"]);
        let table = growth_table(&s, 4);
        assert!(table.degenerate);
        assert_eq!(table.gamma, vec![nat(1); 5]);
    }

    #[test]
    fn reduction_drops_redundant_words() {
        let s = spec(2, &["11", "110", "0110"]);
        assert_eq!(s.forbidden, vec!["11".to_string()]);
        assert_eq!(
            s.dropped,
            vec!["0110".to_string(), "110".to_string()]
        );
        // Same growth as the minimal presentation.
        let minimal = spec(2, &["11"]);
        assert_eq!(
            growth_table(&s, 8).counts,
            growth_table(&minimal, 8).counts
        );
    }

    #[test]
    fn automaton_recognizes_factors() {
        let s = spec(2, &["11"]);
        let auto = FactorAutomaton::build(&s);
        assert!(auto.avoids(&[0, 1, 0, 1, 0]));
        assert!(!auto.avoids(&[0, 1, 1, 0]));
        assert_eq!(auto.num_states(), 3);
        assert_eq!(auto.num_live_states(), 2);
    }

    #[test]
    fn brute_force_agrees_with_automaton() {
        let corpus = [
            spec(2, &["11"]),
            spec(2, &[]),
            spec(2, &["01", "10"]),
            spec(3, &["012", "21"]),
            spec(2, &["11", "000"]),
            spec(4, &["00", "123"]),
        ];
        for s in &corpus {
            for len in 0..=10u32 {
                assert_eq!(
                    brute_force_count(s, len).unwrap(),
                    word_count(s, len as u64),
                    "mismatch on {:?} at len {len}",
                    s.forbidden_original
                );
            }
        }
    }

    #[test]
    fn brute_force_budget_guard() {
        let s = spec(10, &["11"]);
        assert!(matches!(
            brute_force_count(&s, 8),
            Err(AlgebraError::BudgetExceeded(_))
        ));
        assert!(brute_force_count(&s, 7).is_ok());
    }

    #[test]
    fn spec_validation_errors() {
        assert!(matches!(
            MonomialAlgebraSpec::new(0, vec![]),
            Err(AlgebraError::BadAlphabet(0))
        ));
        assert!(matches!(
            MonomialAlgebraSpec::new(11, vec![]),
            Err(AlgebraError::BadAlphabet(11))
        ));
        assert!(matches!(
            MonomialAlgebraSpec::new(2, vec!["12".into()]),
            Err(AlgebraError::BadWord(_, 2))
        ));
        assert!(matches!(
            MonomialAlgebraSpec::new(2, vec!["".into()]),
            Err(AlgebraError::EmptyWord)
        ));
    }

    #[test]
    fn gamma_is_submultiplicative_and_smooth() {
        // Positive control: genuine algebra growth passes the checkers
        // that the staged f fails.
        let table = growth_table(&spec(2, &["11"]), 64);
        let submul = check_submultiplicative(&table, 64, Strategy::Exhaustive).unwrap();
        assert!(submul.pass, "violation: {:?}", submul.violation);
        for d in [2, 3, 4] {
            let report = check_derivative_condition(&table, d, 64);
            assert!(report.pass, "d = {d}: {:?}", report.violation);
        }
    }

    #[test]
    fn spec_file_round_trip() {
        let file = SpecFile {
            alphabet: 2,
            forbidden: vec!["11".to_string()],
        };
        let json = serde_json::to_string(&file).unwrap();
        assert_eq!(json, r#"{"alphabet":2,"forbidden":["11"]}"#);
        let back: SpecFile = serde_json::from_str(&json).unwrap();
        let s = MonomialAlgebraSpec::from_file(&back).unwrap();
        assert_eq!(s.alphabet, 2);
        assert_eq!(s.forbidden, vec!["11".to_string()]);
    }
}
