//! CCS to CSPmn translation, CSPmn elaboration, operational semantics and
//! bisimulation checking.

pub mod equivalence;
pub mod generate;
pub mod io;
pub mod mn2csp;
pub mod semantics;
pub mod syntax;
pub mod translate;
