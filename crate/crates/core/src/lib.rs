//! Finite combinatorics for the topological Ramsey space R₁.
//!
//! The crate materializes finite approximations of R₁, the canonical
//! equivalence relations given by projection trees, a constructive
//! pigeonhole for one-step extensions, and canonization searches for
//! equivalence relations on `AR_n` and on fronts. Every search returns a
//! certificate that is re-checked by an independent verifier. The classical
//! Ramsey and Erdős–Rado theorems on `[N]^k` are included as a baseline.
//!
//! All infinitary notions are rendered relative to an explicit truncated
//! universe; searches distinguish a refutation from exhausting the universe.

pub mod canon;
pub mod canonize;
pub mod cli;
pub mod ellentuck;
pub mod pigeonhole;
pub mod error;
pub mod fronts;
pub mod space;

pub use error::{Error, Result};
