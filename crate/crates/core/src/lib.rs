//! Minimal unsatisfiable subsets of pseudo-Boolean specifications, with
//! constraint symmetries used to speed up extraction, optimal search and
//! enumeration.

pub mod bench;
pub mod formula;
pub mod oracle;
pub mod solver;
pub mod symmetry;
pub mod hitting;
pub mod shrink;
pub mod ocus;
pub mod marco;
pub mod cli;
