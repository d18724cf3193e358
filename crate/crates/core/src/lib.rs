//! Constructive satisfiability for MONOTONE 3-SAT-(3,1).
//!
//! Every variable of such a formula occurs once negated and three times
//! unnegated. The negative clauses (colors) partition the variables into
//! triples; a satisfying assignment picks one false variable per color so
//! that no positive clause ends up all false. The solver builds that choice
//! greedily and repairs dead ends by reassignment.

pub mod cli;
pub mod colorstruct;
pub mod formula;
pub mod fuzz;
pub mod generator;
pub mod oracle;
pub mod solver;

pub use colorstruct::{ColorStatus, ColorStructure, LockState, LockWitness, StructureError};
pub use formula::{
    classify, evaluate, parse_dimacs, parse_vline, Assignment, ClassReport, Clause, ColorId,
    Formula, FormulaError, Literal, ParseError, VarId,
};
pub use generator::{gen_gadget, gen_relaxed, gen_strict, GadgetCase, GenMode, GenSpec};
pub use oracle::{enumerate_selections, normalize};
pub use solver::{
    classify_lock, fallback_search, repair, select_next, solve, LockPattern, RepairTrace,
    SolveStats, SolverConfig,
};
