//! Perfect codes in 2-valent Cayley digraphs on finite abelian groups.
//!
//! The crate builds Cayley digraphs `Cay(G, {s, s′})` and the family
//! `Γ_{m,l,h}`, constructs and verifies their perfect codes, and sweeps all
//! small instances to compare the arithmetic classification against an
//! exhaustive exact-cover search.

pub mod abelian;
pub mod cayley;
pub mod classify;
pub mod codes;
pub mod digraph;
pub mod gamma;
pub mod numth;

pub use abelian::{AbelianGroup, GenPair, GroupElement};
pub use cayley::{build_cayley, AssignmentParams, CayleyDigraph};
pub use classify::{sweep, SweepOptions, SweepReport};
pub use codes::{enumerate_codes, verify_code, CodeSet, SearchOptions, Verdict};
pub use digraph::{verify_isomorphism, Digraph};
pub use gamma::{build_gamma, canonical_code, check_conditions, realize_as_cayley, GammaParams, Realization};
