//! growthlab: exact-arithmetic construction and checking of growth functions.
//!
//! The library builds an increasing, submultiplicative integer sequence `f`
//! from a validated parameter schedule, verifies the necessary conditions a
//! growth function of a finitely generated algebra must satisfy, extracts
//! exact witnesses where `f` violates them, and provides monomial-algebra
//! growth tables as a theorem-backed positive control.
//!
//! All certified results are produced by integer arithmetic only; irrational
//! comparisons go through integer-root sandwiches and dyadic interval
//! refinement in [`exact`].

pub mod algebra;
pub mod cli;
pub mod exact;
pub mod growthfn;
pub mod io;
pub mod omega;
pub mod schedule;
pub mod verify;

pub use exact::{cmp_nat_pow2, cmp_nat_sum_pow2, floor_mul_pow2, iroot, Nat, RationalPow2};
pub use growthfn::GrowthTable;
pub use schedule::{Schedule, ScheduleEntry};
