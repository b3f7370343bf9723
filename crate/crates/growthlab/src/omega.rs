//! Oscillation targets ω for the dominance mechanism: exact-rational
//! functions with ω(m) → 0 against which f(x) ≥ 2^(x·ω(x)) is certified.

use std::fmt;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OmegaError {
    #[error("unknown omega preset {0:?} (expected log, const:<u>/<v>, or file:<path>)")]
    BadPreset(String),
    #[error("omega table: {0}")]
    BadTable(String),
    #[error(transparent)]
    Io(#[from] crate::io::IoError),
}

/// An exact-rational ω. Values are nonnegative rationals; the table variant
/// is zero beyond its last entry, so dominance degenerates to f(x) ≥ 1 there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Omega {
    /// ω(m) = 1/⌊log₂(m+1)⌋, defined for m ≥ 1.
    Log,
    /// Constant ω(m) = num/den.
    Const { num: u64, den: u64 },
    /// Explicit table of (m, num, den), sorted by m; zero off-table.
    Table { source: String, entries: Vec<(u64, u64, u64)> },
}

/// Result of the query max{m : ω(m) ≥ 1/two_p}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupM {
    /// The set is bounded with the given maximum (0 when the set is empty,
    /// which constrains nothing).
    Finite(u64),
    /// The set is unbounded or its maximum exceeds u64 — no desk-scale n
    /// can satisfy the dominance prerequisite for this ω and threshold.
    AboveCap,
}

impl Omega {
    pub fn parse(s: &str) -> Result<Omega, OmegaError> {
        if s == "log" {
            return Ok(Omega::Log);
        }
        if let Some(rest) = s.strip_prefix("const:") {
            let (a, b) = rest
                .split_once('/')
                .ok_or_else(|| OmegaError::BadPreset(s.into()))?;
            let num: u64 = a.parse().map_err(|_| OmegaError::BadPreset(s.into()))?;
            let den: u64 = b.parse().map_err(|_| OmegaError::BadPreset(s.into()))?;
            if den == 0 {
                return Err(OmegaError::BadPreset(s.into()));
            }
            return Ok(Omega::Const { num, den });
        }
        if let Some(path) = s.strip_prefix("file:") {
            let raw: Vec<(u64, u64, u64)> = crate::io::read_json(Path::new(path))?;
            let mut entries = raw;
            entries.sort_by_key(|&(m, _, _)| m);
            for w in entries.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(OmegaError::BadTable(format!("duplicate m={}", w[0].0)));
                }
            }
            if entries.iter().any(|&(_, _, den)| den == 0) {
                return Err(OmegaError::BadTable("zero denominator".into()));
            }
            return Ok(Omega::Table {
                source: path.to_string(),
                entries,
            });
        }
        Err(OmegaError::BadPreset(s.into()))
    }

    /// The string form that round-trips through schedule files.
    pub fn preset_string(&self) -> String {
        match self {
            Omega::Log => "log".into(),
            Omega::Const { num, den } => format!("const:{num}/{den}"),
            Omega::Table { source, .. } => format!("file:{source}"),
        }
    }

    /// Exact ω(m) as (num, den); requires m ≥ 1.
    pub fn eval(&self, m: u64) -> (u64, u64) {
        assert!(m >= 1, "omega domain starts at 1");
        match self {
            // ⌊log₂(m+1)⌋ = bitlength(m+1) − 1, and m ≥ 1 makes it ≥ 1.
            Omega::Log => (1, 64 - (m + 1).leading_zeros() as u64 - 1),
            Omega::Const { num, den } => (*num, *den),
            Omega::Table { entries, .. } => entries
                .iter()
                .find(|&&(em, _, _)| em == m)
                .map(|&(_, n, d)| (n, d))
                .unwrap_or((0, 1)),
        }
    }

    /// max{m ≥ 1 : ω(m) ≥ 1/two_p} — the quantity the dominance
    /// prerequisite bounds n_k against.
    pub fn sup_m_at_least(&self, two_p: u64) -> SupM {
        let at_least = |num: u64, den: u64| (num as u128) * (two_p as u128) >= den as u128;
        match self {
            // ω(m) ≥ 1/two_p ⟺ ⌊log₂(m+1)⌋ ≤ two_p ⟺ m ≤ 2^(two_p+1) − 2.
            Omega::Log => {
                if two_p >= 63 {
                    SupM::AboveCap
                } else {
                    SupM::Finite((1u64 << (two_p + 1)) - 2)
                }
            }
            Omega::Const { num, den } => {
                if at_least(*num, *den) {
                    SupM::AboveCap
                } else {
                    SupM::Finite(0)
                }
            }
            Omega::Table { entries, .. } => SupM::Finite(
                entries
                    .iter()
                    .filter(|&&(m, num, den)| m >= 1 && at_least(num, den))
                    .map(|&(m, _, _)| m)
                    .max()
                    .unwrap_or(0),
            ),
        }
    }
}

impl fmt::Display for Omega {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.preset_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_values() {
        // ω(m) = 1/⌊log₂(m+1)⌋
        assert_eq!(Omega::Log.eval(1), (1, 1));
        assert_eq!(Omega::Log.eval(2), (1, 1)); // log2(3) floor 1
        assert_eq!(Omega::Log.eval(3), (1, 2));
        assert_eq!(Omega::Log.eval(126), (1, 6)); // log2(127) floor 6
        assert_eq!(Omega::Log.eval(127), (1, 7)); // log2(128) = 7
    }

    #[test]
    fn log_sup_at_depth_one() {
        // Threshold 1/6: ω(m) ≥ 1/6 iff m ≤ 126, forcing n_1 ≥ 127.
        assert_eq!(Omega::Log.sup_m_at_least(6), SupM::Finite(126));
        // Depth-2 thresholds overflow any desk cap.
        assert_eq!(Omega::Log.sup_m_at_least(2298), SupM::AboveCap);
    }

    #[test]
    fn const_and_table_sup() {
        let tiny = Omega::Const { num: 1, den: 100 };
        assert_eq!(tiny.sup_m_at_least(6), SupM::Finite(0));
        assert_eq!(tiny.sup_m_at_least(100), SupM::AboveCap);
        let t = Omega::Table {
            source: "inline".into(),
            entries: vec![(1, 1, 1), (5, 1, 4), (9, 1, 12)],
        };
        assert_eq!(t.sup_m_at_least(6), SupM::Finite(5));
        assert_eq!(t.sup_m_at_least(12), SupM::Finite(9));
        assert_eq!(t.eval(7), (0, 1));
    }

    #[test]
    fn parse_round_trip() {
        for s in ["log", "const:1/7"] {
            assert_eq!(Omega::parse(s).unwrap().preset_string(), s);
        }
        assert!(Omega::parse("exp").is_err());
        assert!(Omega::parse("const:1/0").is_err());
    }
}
