//! Exact enumerative geometry of plane curves of genus zero and one.
//!
//! * [`invariants`]: the counts `N_d` of rational plane curves, the fixed-`j`
//!   elliptic counts `E_{d,j}`, and the intersection number `Z . T`.
//! * [`cache`]: text persistence for the `N_d` recursion table.
//! * [`strata`]: dual-graph strata of genus-one stable maps, their
//!   dimensions, deformation bounds and enumeration up to isomorphism.
//! * [`series`]: vanishing sequences of nets of polynomials and the root-sum
//!   relation.
//! * [`cli`]: the `jcount` command-line interface.

pub mod cache;
pub mod cli;
pub mod invariants;
pub mod series;
pub mod strata;

pub use invariants::{
    binomial, divisibility_report, elliptic_count, rational_count, zt_invariant, Count, JClass,
    RecursionTable,
};
