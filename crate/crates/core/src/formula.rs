//! Monotone 3-CNF data model.
//!
//! A [`Formula`] keeps its all-negative clauses (the *colors*) apart from its
//! all-positive clauses. Segregation happens at parse time, so every type
//! downstream can assume monotonicity.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};

use serde::Serialize;
use thiserror::Error;

/// A variable, 1-based as in DIMACS.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct VarId(u32);

impl VarId {
    /// Panics if `number` is zero.
    pub fn new(number: u32) -> Self {
        assert!(number > 0, "variables are numbered from 1");
        VarId(number)
    }

    pub fn number(self) -> u32 {
        self.0
    }

    /// Zero-based position, for indexing per-variable tables.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn from_index(index: usize) -> Self {
        VarId(index as u32 + 1)
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// Index of a negative clause.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ColorId(u32);

impl ColorId {
    pub fn new(index: usize) -> Self {
        ColorId(index as u32)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ColorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    pub var: VarId,
    pub negated: bool,
}

impl Literal {
    pub fn from_dimacs(value: i64) -> Option<Self> {
        if value == 0 || value.unsigned_abs() > u32::MAX as u64 {
            return None;
        }
        Some(Literal {
            var: VarId(value.unsigned_abs() as u32),
            negated: value < 0,
        })
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var.0 as i64;
        if self.negated {
            -v
        } else {
            v
        }
    }
}

/// Three distinct variables sharing one polarity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    vars: [VarId; 3],
    negated: bool,
}

impl Clause {
    pub fn positive(vars: [VarId; 3]) -> Result<Self, FormulaError> {
        Self::new(vars, false)
    }

    pub fn negative(vars: [VarId; 3]) -> Result<Self, FormulaError> {
        Self::new(vars, true)
    }

    fn new(vars: [VarId; 3], negated: bool) -> Result<Self, FormulaError> {
        if vars[0] == vars[1] || vars[0] == vars[2] || vars[1] == vars[2] {
            return Err(FormulaError::DuplicateVariable(
                vars[0].min(vars[1]).min(vars[2]),
            ));
        }
        Ok(Clause { vars, negated })
    }

    pub fn vars(&self) -> [VarId; 3] {
        self.vars
    }

    pub fn is_negated(&self) -> bool {
        self.negated
    }

    pub fn contains(&self, var: VarId) -> bool {
        self.vars.contains(&var)
    }

    pub fn literals(&self) -> [Literal; 3] {
        self.vars.map(|var| Literal {
            var,
            negated: self.negated,
        })
    }

    /// The two members other than `var`, in clause order.
    pub fn others(&self, var: VarId) -> Option<(VarId, VarId)> {
        let [a, b, c] = self.vars;
        if a == var {
            Some((b, c))
        } else if b == var {
            Some((a, c))
        } else if c == var {
            Some((a, b))
        } else {
            None
        }
    }

    pub fn is_satisfied_by(&self, assignment: &Assignment) -> bool {
        self.vars
            .iter()
            .any(|&v| assignment.value(v) != self.negated)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.negated { "-" } else { "" };
        write!(
            f,
            "{sign}{} {sign}{} {sign}{} 0",
            self.vars[0].0, self.vars[1].0, self.vars[2].0
        )
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("variable {0} repeated inside a clause")]
    DuplicateVariable(VarId),
    #[error("variable {var} out of range 1..={var_count}")]
    VarOutOfRange { var: VarId, var_count: u32 },
    #[error("assignment covers {got} variables, formula has {expected}")]
    AssignmentSize { expected: usize, got: usize },
    #[error("variable {0} is not negated exactly once")]
    NotPartitioned(VarId),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: missing or malformed header `p cnf <vars> <clauses>`")]
    BadHeader { line: usize },
    #[error("line {line}: unexpected token `{token}`")]
    BadToken { line: usize, token: String },
    #[error("line {line}: clause mixes negated and unnegated literals")]
    NonMonotone { line: usize },
    #[error("line {line}: clause has {width} literals, expected 3")]
    BadWidth { line: usize, width: usize },
    #[error("line {line}: variable {var} repeated inside a clause")]
    DuplicateVariable { line: usize, var: u32 },
    #[error("line {line}: variable {var} out of range 1..={var_count}")]
    VarOutOfRange {
        line: usize,
        var: u64,
        var_count: u32,
    },
    #[error("line {line}: header declares {declared} clauses, found {found}")]
    ClauseCount {
        line: usize,
        declared: usize,
        found: usize,
    },
    #[error("line {line}: last clause is not terminated by 0")]
    Unterminated { line: usize },
}

/// A monotone 3-CNF formula split into colors and positive clauses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formula {
    var_count: u32,
    colors: Vec<Clause>,
    positives: Vec<Clause>,
    color_of: Vec<Option<ColorId>>,
    pos_clauses_of: Vec<Vec<usize>>,
}

impl Formula {
    /// Builds the formula and its occurrence indices. Variables that occur
    /// in several colors keep their first color in `color_of`; [`classify`]
    /// reports them.
    pub fn new(
        var_count: u32,
        colors: Vec<Clause>,
        positives: Vec<Clause>,
    ) -> Result<Self, FormulaError> {
        let mut color_of = vec![None; var_count as usize];
        let mut pos_clauses_of = vec![Vec::new(); var_count as usize];
        for (ci, clause) in colors.iter().enumerate() {
            debug_assert!(clause.negated);
            for v in clause.vars {
                check_range(v, var_count)?;
                color_of[v.index()].get_or_insert(ColorId::new(ci));
            }
        }
        for (pi, clause) in positives.iter().enumerate() {
            debug_assert!(!clause.negated);
            for v in clause.vars {
                check_range(v, var_count)?;
                pos_clauses_of[v.index()].push(pi);
            }
        }
        Ok(Formula {
            var_count,
            colors,
            positives,
            color_of,
            pos_clauses_of,
        })
    }

    /// Convenience constructor from raw variable numbers.
    pub fn from_triples(
        var_count: u32,
        colors: &[[u32; 3]],
        positives: &[[u32; 3]],
    ) -> Result<Self, FormulaError> {
        let to_vars = |t: &[u32; 3]| t.map(VarId::new);
        let colors = colors
            .iter()
            .map(|t| Clause::negative(to_vars(t)))
            .collect::<Result<_, _>>()?;
        let positives = positives
            .iter()
            .map(|t| Clause::positive(to_vars(t)))
            .collect::<Result<_, _>>()?;
        Formula::new(var_count, colors, positives)
    }

    pub fn var_count(&self) -> u32 {
        self.var_count
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> {
        (1..=self.var_count).map(VarId)
    }

    pub fn colors(&self) -> &[Clause] {
        &self.colors
    }

    pub fn color_ids(&self) -> impl Iterator<Item = ColorId> {
        (0..self.colors.len()).map(ColorId::new)
    }

    pub fn color(&self, id: ColorId) -> &Clause {
        &self.colors[id.index()]
    }

    pub fn positives(&self) -> &[Clause] {
        &self.positives
    }

    pub fn color_of(&self, var: VarId) -> Option<ColorId> {
        self.color_of[var.index()]
    }

    /// Indices into [`Formula::positives`] of the clauses containing `var`.
    pub fn pos_clauses_of(&self, var: VarId) -> &[usize] {
        &self.pos_clauses_of[var.index()]
    }

    /// Fails unless every variable occurs in exactly one color.
    pub fn check_partition(&self) -> Result<(), FormulaError> {
        let mut seen = vec![0u32; self.var_count as usize];
        for clause in &self.colors {
            for v in clause.vars {
                seen[v.index()] += 1;
            }
        }
        match seen.iter().position(|&c| c != 1) {
            Some(i) => Err(FormulaError::NotPartitioned(VarId::from_index(i))),
            None => Ok(()),
        }
    }

    /// Writes DIMACS: colors first, then positive clauses, each in order.
    pub fn write_dimacs<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(
            out,
            "p cnf {} {}",
            self.var_count,
            self.colors.len() + self.positives.len()
        )?;
        for clause in self.colors.iter().chain(&self.positives) {
            writeln!(out, "{clause}")?;
        }
        Ok(())
    }

    pub fn to_dimacs(&self) -> String {
        let mut buf = Vec::new();
        self.write_dimacs(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("DIMACS output is ASCII")
    }

    pub fn clauses(&self) -> impl Iterator<Item = &Clause> {
        self.colors.iter().chain(&self.positives)
    }
}

fn check_range(var: VarId, var_count: u32) -> Result<(), FormulaError> {
    if var.0 > var_count {
        Err(FormulaError::VarOutOfRange { var, var_count })
    } else {
        Ok(())
    }
}

/// Parses DIMACS CNF text. Comment lines are accepted anywhere and dropped.
pub fn parse_dimacs(text: &str) -> Result<Formula, ParseError> {
    let mut header: Option<(u32, usize)> = None;
    let mut colors = Vec::new();
    let mut positives = Vec::new();
    let mut pending: Vec<i64> = Vec::new();
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(ParseError::BadHeader { line });
            }
            header = Some(parse_header(trimmed).ok_or(ParseError::BadHeader { line })?);
            continue;
        }
        let Some((var_count, _)) = header else {
            return Err(ParseError::BadHeader { line });
        };
        for token in trimmed.split_whitespace() {
            let value: i64 = token.parse().map_err(|_| ParseError::BadToken {
                line,
                token: token.to_string(),
            })?;
            if value == 0 {
                let clause = finish_clause(&pending, var_count, line)?;
                if clause.negated {
                    colors.push(clause);
                } else {
                    positives.push(clause);
                }
                pending.clear();
            } else {
                if value.unsigned_abs() > var_count as u64 {
                    return Err(ParseError::VarOutOfRange {
                        line,
                        var: value.unsigned_abs(),
                        var_count,
                    });
                }
                pending.push(value);
            }
        }
    }

    let Some((var_count, declared)) = header else {
        return Err(ParseError::BadHeader {
            line: last_line.max(1),
        });
    };
    if !pending.is_empty() {
        return Err(ParseError::Unterminated { line: last_line });
    }
    let found = colors.len() + positives.len();
    if found != declared {
        return Err(ParseError::ClauseCount {
            line: last_line.max(1),
            declared,
            found,
        });
    }
    Ok(Formula::new(var_count, colors, positives).expect("ranges checked while parsing"))
}

fn parse_header(line: &str) -> Option<(u32, usize)> {
    let mut parts = line.split_whitespace();
    if parts.next()? != "p" || parts.next()? != "cnf" {
        return None;
    }
    let vars = parts.next()?.parse().ok()?;
    let clauses = parts.next()?.parse().ok()?;
    if parts.next().is_some() {
        return None;
    }
    Some((vars, clauses))
}

fn finish_clause(values: &[i64], var_count: u32, line: usize) -> Result<Clause, ParseError> {
    if values.len() != 3 {
        return Err(ParseError::BadWidth {
            line,
            width: values.len(),
        });
    }
    let negated = values[0] < 0;
    if values.iter().any(|&v| (v < 0) != negated) {
        return Err(ParseError::NonMonotone { line });
    }
    let lits: Vec<Literal> = values
        .iter()
        .map(|&v| Literal::from_dimacs(v).expect("nonzero, range-checked"))
        .collect();
    debug_assert!(lits.iter().all(|l| l.var.0 <= var_count));
    let vars = [lits[0].var, lits[1].var, lits[2].var];
    Clause::new(vars, negated).map_err(|e| match e {
        FormulaError::DuplicateVariable(v) => ParseError::DuplicateVariable { line, var: v.0 },
        _ => unreachable!(),
    })
}

/// Membership verdict for the MONOTONE 3-SAT-(k,1) family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    pub is_3cnf: bool,
    pub is_monotone: bool,
    pub negated_once: bool,
    pub pos_occurrence: BTreeMap<u32, u32>,
    pub k_max: u32,
    pub strict_31: bool,
    pub relaxed_31: bool,
}

impl ClassReport {
    pub fn occurrences(&self, var: VarId) -> u32 {
        self.pos_occurrence.get(&var.0).copied().unwrap_or(0)
    }
}

pub fn classify(formula: &Formula) -> ClassReport {
    // Width and polarity are enforced by construction.
    let is_3cnf = true;
    let is_monotone = true;
    let negated_once = formula.check_partition().is_ok();
    let pos_occurrence: BTreeMap<u32, u32> = formula
        .vars()
        .map(|v| (v.0, formula.pos_clauses_of(v).len() as u32))
        .collect();
    let k_max = pos_occurrence.values().copied().max().unwrap_or(0);
    let base = is_3cnf && is_monotone && negated_once;
    let strict_31 = base && pos_occurrence.values().all(|&c| c == 3);
    let relaxed_31 = base && pos_occurrence.values().all(|&c| c <= 3);
    ClassReport {
        is_3cnf,
        is_monotone,
        negated_once,
        pos_occurrence,
        k_max,
        strict_31,
        relaxed_31,
    }
}

/// A total truth assignment.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn all_true(var_count: u32) -> Self {
        Assignment {
            values: vec![true; var_count as usize],
        }
    }

    /// All variables true except those listed.
    pub fn with_false(var_count: u32, false_vars: impl IntoIterator<Item = VarId>) -> Self {
        let mut a = Self::all_true(var_count);
        for v in false_vars {
            a.set(v, false);
        }
        a
    }

    pub fn from_values(values: Vec<bool>) -> Self {
        Assignment { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, var: VarId) -> bool {
        self.values[var.index()]
    }

    pub fn set(&mut self, var: VarId, value: bool) {
        self.values[var.index()] = value;
    }

    pub fn false_vars(&self) -> Vec<VarId> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| !v)
            .map(|(i, _)| VarId::from_index(i))
            .collect()
    }

    /// SAT-competition value line(s): `v 1 -2 3 ... 0`, wrapped at ~78 columns.
    pub fn to_vline(&self) -> String {
        let mut out = String::new();
        let mut line = String::from("v");
        for (i, &value) in self.values.iter().enumerate() {
            let lit = if value {
                format!(" {}", i + 1)
            } else {
                format!(" -{}", i + 1)
            };
            if line.len() + lit.len() > 78 {
                out.push_str(&line);
                out.push('\n');
                line = String::from("v");
            }
            line.push_str(&lit);
        }
        if line.len() + 2 > 78 {
            out.push_str(&line);
            out.push('\n');
            line = String::from("v");
        }
        line.push_str(" 0\n");
        out.push_str(&line);
        out
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VlineError {
    #[error("line {line}: unexpected token `{token}`")]
    BadToken { line: usize, token: String },
    #[error("literal {lit} out of range 1..={var_count}")]
    OutOfRange { lit: i64, var_count: u32 },
    #[error("variable {0} assigned twice")]
    Repeated(u32),
    #[error("variable {0} has no value")]
    Missing(u32),
}

/// Parses `v`-lines into a total assignment. `s` and `c` lines are skipped.
pub fn parse_vline(text: &str, var_count: u32) -> Result<Assignment, VlineError> {
    let mut values: Vec<Option<bool>> = vec![None; var_count as usize];
    for (i, raw) in text.lines().enumerate() {
        let trimmed = raw.trim();
        let Some(rest) = trimmed.strip_prefix('v') else {
            continue;
        };
        for token in rest.split_whitespace() {
            let lit: i64 = token.parse().map_err(|_| VlineError::BadToken {
                line: i + 1,
                token: token.to_string(),
            })?;
            if lit == 0 {
                continue;
            }
            let var = lit.unsigned_abs();
            if var > var_count as u64 {
                return Err(VlineError::OutOfRange { lit, var_count });
            }
            let slot = &mut values[var as usize - 1];
            if slot.is_some() {
                return Err(VlineError::Repeated(var as u32));
            }
            *slot = Some(lit > 0);
        }
    }
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or(VlineError::Missing(i as u32 + 1)))
        .collect::<Result<Vec<_>, _>>()
        .map(Assignment::from_values)
}

/// True iff every clause has a literal made true by `assignment`.
pub fn evaluate(formula: &Formula, assignment: &Assignment) -> Result<bool, FormulaError> {
    Ok(first_unsatisfied(formula, assignment)?.is_none())
}

/// The first clause (colors before positives) falsified by `assignment`.
pub fn first_unsatisfied<'f>(
    formula: &'f Formula,
    assignment: &Assignment,
) -> Result<Option<&'f Clause>, FormulaError> {
    if assignment.len() != formula.var_count as usize {
        return Err(FormulaError::AssignmentSize {
            expected: formula.var_count as usize,
            got: assignment.len(),
        });
    }
    Ok(formula.clauses().find(|c| !c.is_satisfied_by(assignment)))
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn v(n: u32) -> VarId {
        VarId::new(n)
    }

    #[test]
    fn parses_small() {
        let f = small();
        assert_eq!(f.var_count(), 9);
        assert_eq!(f.colors().len(), 3);
        assert_eq!(f.positives().len(), 3);
        assert_eq!(f.color_of(v(8)), Some(ColorId::new(2)));
        assert_eq!(f.pos_clauses_of(v(1)), &[0, 1]);
        assert_eq!(f.pos_clauses_of(v(7)), &[1, 2]);
    }

    #[test]
    fn parses_empty() {
        let f = parse_dimacs("p cnf 0 0\n").unwrap();
        assert_eq!(f.colors().len(), 0);
        assert_eq!(f.positives().len(), 0);
        assert_eq!(f.to_dimacs(), "p cnf 0 0\n");
    }

    #[test]
    fn rejects_mixed_polarity() {
        let err = parse_dimacs("p cnf 3 1\n1 -2 3 0\n").unwrap_err();
        assert_eq!(err, ParseError::NonMonotone { line: 2 });
    }

    #[test]
    fn parse_errors_name_the_line() {
        assert_eq!(
            parse_dimacs("p cnf 3 1\n1 2 0\n").unwrap_err(),
            ParseError::BadWidth { line: 2, width: 2 }
        );
        assert_eq!(
            parse_dimacs("p cnf 3 1\n1 1 2 0\n").unwrap_err(),
            ParseError::DuplicateVariable { line: 2, var: 1 }
        );
        assert_eq!(
            parse_dimacs("c hi\np cnf 3 1\n\n1 2 4 0\n").unwrap_err(),
            ParseError::VarOutOfRange {
                line: 4,
                var: 4,
                var_count: 3
            }
        );
        assert_eq!(
            parse_dimacs("p cnf 3 2\n1 2 3 0\n").unwrap_err(),
            ParseError::ClauseCount {
                line: 2,
                declared: 2,
                found: 1
            }
        );
        assert_eq!(
            parse_dimacs("p cnf 3 1\n1 2 3\n").unwrap_err(),
            ParseError::Unterminated { line: 2 }
        );
        assert_eq!(
            parse_dimacs("p cnf x 1\n").unwrap_err(),
            ParseError::BadHeader { line: 1 }
        );
        assert_eq!(
            parse_dimacs("1 2 3 0\n").unwrap_err(),
            ParseError::BadHeader { line: 1 }
        );
        assert!(matches!(
            parse_dimacs("p cnf 3 1\n1 2 three 0\n").unwrap_err(),
            ParseError::BadToken { line: 2, .. }
        ));
    }

    #[test]
    fn clauses_may_span_lines() {
        let f = parse_dimacs("p cnf 3 2\n-1 -2\n -3 0 1 2\n3 0\n").unwrap();
        assert_eq!(f.colors().len(), 1);
        assert_eq!(f.positives().len(), 1);
    }

    #[test]
    fn duplicate_clauses_are_kept() {
        let f = Formula::from_triples(3, &[[1, 2, 3]], &[[1, 2, 3]; 3]).unwrap();
        assert_eq!(f.positives().len(), 3);
        assert!(classify(&f).strict_31);
    }

    #[test]
    fn small_roundtrips() {
        let f = small();
        let text = f.to_dimacs();
        assert_eq!(parse_dimacs(&text).unwrap(), f);
        assert!(
            !text.lines().any(|l| l.starts_with('c')),
            "comments are dropped on write"
        );
    }

    #[test]
    fn dense_is_out_of_class() {
        let report = classify(&dense());
        assert_eq!(report.k_max, 9);
        assert!(!report.strict_31);
        assert!(!report.relaxed_31);
        assert!(report.negated_once);
    }

    #[test]
    fn small_counts() {
        let report = classify(&small());
        let expected: BTreeMap<u32, u32> = [
            (1, 2),
            (2, 0),
            (3, 1),
            (4, 1),
            (5, 0),
            (6, 0),
            (7, 2),
            (8, 2),
            (9, 1),
        ]
        .into_iter()
        .collect();
        assert_eq!(report.pos_occurrence, expected);
        assert!(report.relaxed_31);
        assert!(!report.strict_31);
    }

    #[test]
    fn partition_violations_are_reported() {
        let f = Formula::from_triples(6, &[[1, 2, 3], [3, 4, 5]], &[]).unwrap();
        let report = classify(&f);
        assert!(!report.negated_once);
        assert!(!report.relaxed_31);
        assert_eq!(f.check_partition(), Err(FormulaError::NotPartitioned(v(3))));
    }

    #[test]
    fn evaluate_dense_counterexample() {
        let f = dense();
        let a = Assignment::with_false(9, [v(1), v(4)]);
        assert_eq!(evaluate(&f, &a), Ok(false));
        let unsat = first_unsatisfied(&f, &a).unwrap().unwrap();
        assert!(unsat.is_negated());
        assert_eq!(unsat.vars(), [v(7), v(8), v(9)]);
    }

    #[test]
    fn evaluate_small_selection() {
        let f = small();
        assert_eq!(
            evaluate(&f, &Assignment::with_false(9, [v(1), v(5), v(7)])),
            Ok(true)
        );
        // {1,4,7} all false falsifies a positive clause.
        assert_eq!(
            evaluate(&f, &Assignment::with_false(9, [v(1), v(4), v(7)])),
            Ok(false)
        );
    }

    #[test]
    fn evaluate_vacuous_and_partial() {
        let empty = Formula::from_triples(3, &[], &[]).unwrap();
        assert_eq!(
            evaluate(&empty, &Assignment::with_false(3, [v(2)])),
            Ok(true)
        );
        assert_eq!(
            evaluate(&small(), &Assignment::all_true(8)),
            Err(FormulaError::AssignmentSize {
                expected: 9,
                got: 8
            })
        );
    }

    #[test]
    fn vline_roundtrip_and_errors() {
        let a = Assignment::with_false(40, [v(1), v(17), v(40)]);
        let text = a.to_vline();
        assert!(text.lines().all(|l| l.starts_with("v ") && l.len() <= 78));
        assert!(text.trim_end().ends_with(" 0"));
        assert_eq!(parse_vline(&text, 40).unwrap(), a);
        assert_eq!(
            parse_vline("s SATISFIABLE\nv 1 -2 0\n", 3),
            Err(VlineError::Missing(3))
        );
        assert_eq!(parse_vline("v 1 -1 2 0", 2), Err(VlineError::Repeated(1)));
        assert!(matches!(
            parse_vline("v 1 9 0", 2),
            Err(VlineError::OutOfRange { lit: 9, .. })
        ));
    }

    #[test]
    fn false_to_true_flips_never_break_positive_clauses() {
        let f = small();
        for mask in 0u32..(1 << 9) {
            let a = Assignment::from_values((0..9).map(|i| mask & (1 << i) == 0).collect());
            for flip in a.false_vars() {
                let mut b = a.clone();
                b.set(flip, true);
                for clause in f.positives() {
                    if clause.is_satisfied_by(&a) {
                        assert!(clause.is_satisfied_by(&b));
                    }
                }
            }
        }
    }
}
