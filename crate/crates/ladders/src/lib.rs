//! Finite, desk-scale machinery for lower-finite lattices and ladders: order
//! and breadth predicates with brute-force oracles, ideal projections, the
//! cofinal-copy extension, and the staged ladder constructions, plus the file
//! formats and seeded generators behind the `ladders` CLI.

pub mod acceptance;
pub mod bits;
pub mod club;
pub mod cohen;
pub mod diamond;
pub mod extension;
pub mod gen;
pub mod io;
pub mod poset;
pub mod report;
pub mod rho;

pub use poset::{FinitePoset, IdealSet, PosetError};
pub use report::{Report, Verdict, Witness};
