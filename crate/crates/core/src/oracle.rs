//! Ground truth by exhaustive enumeration.
//!
//! A monotone formula whose variables are each negated exactly once is
//! satisfiable iff some *selection* (one false variable per color, all others
//! true) satisfies every positive clause. Enumerating the 3^|colors|
//! selections therefore decides satisfiability exactly.

use thiserror::Error;

use crate::formula::{evaluate, Assignment, Formula, FormulaError, VarId};

pub const DEFAULT_COLOR_CAP: usize = 18;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{colors} colors exceed the enumeration cap of {cap}")]
    CapExceeded { colors: usize, cap: usize },
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("assignment does not satisfy the formula")]
    NotSatisfying,
    #[error("color {0} has no false variable")]
    NoFalseInColor(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub assignment: Option<Assignment>,
    /// Selections tested, including the satisfying one.
    pub explored: u64,
}

/// First satisfying selection in lexicographic order (color 0 varies
/// slowest, members in clause order), or `None`.
pub fn enumerate_selections(formula: &Formula) -> Result<Option<Assignment>, OracleError> {
    enumerate_with_cap(formula, DEFAULT_COLOR_CAP).map(|e| e.assignment)
}

pub fn enumerate_with_cap(formula: &Formula, cap: usize) -> Result<Enumeration, OracleError> {
    formula.check_partition()?;
    let colors = formula.colors();
    if colors.len() > cap {
        return Err(OracleError::CapExceeded {
            colors: colors.len(),
            cap,
        });
    }
    let n = formula.var_count() as usize;
    let mut digits = vec![0usize; colors.len()];
    let mut is_false = vec![false; n];
    let mut explored = 0u64;
    loop {
        is_false.iter_mut().for_each(|b| *b = false);
        for (color, &d) in colors.iter().zip(&digits) {
            is_false[color.vars()[d].index()] = true;
        }
        explored += 1;
        let ok = formula
            .positives()
            .iter()
            .all(|c| c.vars().iter().any(|v| !is_false[v.index()]));
        if ok {
            let values = is_false.iter().map(|&f| !f).collect();
            return Ok(Enumeration {
                assignment: Some(Assignment::from_values(values)),
                explored,
            });
        }
        // Odometer, last color fastest.
        let mut pos = digits.len();
        loop {
            if pos == 0 {
                return Ok(Enumeration {
                    assignment: None,
                    explored,
                });
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < 3 {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// Reduces a satisfying assignment to exactly one false variable per color
/// by flipping surplus false variables to true, highest number first.
pub fn normalize(formula: &Formula, assignment: &Assignment) -> Result<Assignment, OracleError> {
    formula.check_partition()?;
    if !evaluate(formula, assignment)? {
        return Err(OracleError::NotSatisfying);
    }
    let mut out = assignment.clone();
    for (ci, color) in formula.colors().iter().enumerate() {
        let mut falses: Vec<VarId> = color
            .vars()
            .into_iter()
            .filter(|&v| !out.value(v))
            .collect();
        if falses.is_empty() {
            return Err(OracleError::NoFalseInColor(ci));
        }
        falses.sort();
        for &v in falses.iter().skip(1) {
            out.set(v, true);
        }
    }
    debug_assert_eq!(evaluate(formula, &out), Ok(true));
    Ok(out)
}
