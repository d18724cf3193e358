//! Color-structures: which variable each color currently sets false (its
//! *intersection*), and which variables are *locked* because two other
//! members of one of their positive clauses are already intersections.
//!
//! The structure is kept as per-color state plus a derived lock index. The
//! graph picture (intersections as encircled nodes, contributing clauses as
//! labelled edges) is only rebuilt by [`ColorStructure::to_dot`].

use std::fmt::Write as _;

use thiserror::Error;

use crate::formula::{Assignment, ColorId, Formula, FormulaError, VarId};

/// Proof that a variable is locked: `clause_index` holds the locked variable
/// and two intersections.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LockWitness {
    pub clause_index: usize,
    pub locked_var: VarId,
    /// Ascending.
    pub intersections: (VarId, VarId),
}

impl LockWitness {
    fn new(clause_index: usize, locked_var: VarId, a: VarId, b: VarId) -> Self {
        LockWitness {
            clause_index,
            locked_var,
            intersections: (a.min(b), a.max(b)),
        }
    }

    pub fn involves(&self, var: VarId) -> bool {
        self.intersections.0 == var || self.intersections.1 == var
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LockState<'a> {
    Free,
    Locked(&'a [LockWitness]),
}

impl LockState<'_> {
    pub fn is_locked(&self) -> bool {
        matches!(self, LockState::Locked(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColorStatus {
    Expanded(VarId),
    Open { locked_count: u8, free: Vec<VarId> },
    Dead,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StructureError {
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("{0} is locked")]
    Locked(VarId),
    #[error("color {color} already has intersection {current}")]
    AlreadyExpanded { color: ColorId, current: VarId },
    #[error("color {0} has no intersection")]
    NotExpanded(ColorId),
    #[error("{0} is out of range")]
    UnknownVar(VarId),
}

/// Per-color expansion state over a borrowed formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorStructure<'f> {
    formula: &'f Formula,
    states: Vec<Option<VarId>>,
    locks: Vec<Vec<LockWitness>>,
}

impl<'f> ColorStructure<'f> {
    /// All colors unexpanded. Requires each variable to be negated exactly once.
    pub fn init(formula: &'f Formula) -> Result<Self, StructureError> {
        formula.check_partition()?;
        Ok(ColorStructure {
            formula,
            states: vec![None; formula.colors().len()],
            locks: vec![Vec::new(); formula.var_count() as usize],
        })
    }

    pub fn formula(&self) -> &'f Formula {
        self.formula
    }

    fn color_of(&self, var: VarId) -> ColorId {
        self.formula
            .color_of(var)
            .expect("partition checked at init")
    }

    fn check_var(&self, var: VarId) -> Result<(), StructureError> {
        if var.number() > self.formula.var_count() {
            Err(StructureError::UnknownVar(var))
        } else {
            Ok(())
        }
    }

    pub fn intersection(&self, color: ColorId) -> Option<VarId> {
        self.states[color.index()]
    }

    pub fn is_intersection(&self, var: VarId) -> bool {
        self.states[self.color_of(var).index()] == Some(var)
    }

    /// Current intersections in color order.
    pub fn intersections(&self) -> impl Iterator<Item = VarId> + '_ {
        self.states.iter().flatten().copied()
    }

    pub fn expanded_count(&self) -> usize {
        self.states.iter().filter(|s| s.is_some()).count()
    }

    /// The (color -> intersection) table; equal fingerprints mean equal
    /// structures over the same formula.
    pub fn fingerprint(&self) -> &[Option<VarId>] {
        &self.states
    }

    /// Makes `var` its color's intersection and records the locks this causes.
    pub fn expand(&mut self, var: VarId) -> Result<(), StructureError> {
        self.check_var(var)?;
        let color = self.color_of(var);
        if let Some(current) = self.states[color.index()] {
            return Err(StructureError::AlreadyExpanded { color, current });
        }
        if self.is_locked(var) {
            return Err(StructureError::Locked(var));
        }
        self.states[color.index()] = Some(var);
        let formula = self.formula;
        for &ci in formula.pos_clauses_of(var) {
            let (y, z) = formula.positives()[ci]
                .others(var)
                .expect("index integrity");
            if self.is_intersection(y) {
                insert_sorted(&mut self.locks[z.index()], LockWitness::new(ci, z, var, y));
            }
            if self.is_intersection(z) {
                insert_sorted(&mut self.locks[y.index()], LockWitness::new(ci, y, var, z));
            }
        }
        Ok(())
    }

    /// Clears a color's intersection and drops the locks it supported.
    /// Returns the former intersection.
    pub fn unexpand(&mut self, color: ColorId) -> Result<VarId, StructureError> {
        let var = self.states[color.index()]
            .take()
            .ok_or(StructureError::NotExpanded(color))?;
        let formula = self.formula;
        for &ci in formula.pos_clauses_of(var) {
            let (y, z) = formula.positives()[ci]
                .others(var)
                .expect("index integrity");
            for other in [y, z] {
                self.locks[other.index()].retain(|w| !(w.clause_index == ci && w.involves(var)));
            }
        }
        Ok(var)
    }

    pub fn lock_state(&self, var: VarId) -> LockState<'_> {
        let witnesses = &self.locks[var.index()];
        if witnesses.is_empty() {
            LockState::Free
        } else {
            LockState::Locked(witnesses)
        }
    }

    pub fn witnesses(&self, var: VarId) -> &[LockWitness] {
        &self.locks[var.index()]
    }

    pub fn is_locked(&self, var: VarId) -> bool {
        !self.locks[var.index()].is_empty()
    }

    /// Neither an intersection nor locked.
    pub fn is_free(&self, var: VarId) -> bool {
        !self.is_locked(var) && !self.is_intersection(var)
    }

    pub fn color_status(&self, color: ColorId) -> ColorStatus {
        if let Some(v) = self.states[color.index()] {
            return ColorStatus::Expanded(v);
        }
        let members = self.formula.color(color).vars();
        let free: Vec<VarId> = members
            .into_iter()
            .filter(|&v| !self.is_locked(v))
            .collect();
        if free.is_empty() {
            ColorStatus::Dead
        } else {
            ColorStatus::Open {
                locked_count: (3 - free.len()) as u8,
                free,
            }
        }
    }

    pub fn is_dead(&self, color: ColorId) -> bool {
        self.states[color.index()].is_none()
            && self
                .formula
                .color(color)
                .vars()
                .iter()
                .all(|&v| self.is_locked(v))
    }

    pub fn dead_colors(&self) -> impl Iterator<Item = ColorId> + '_ {
        self.formula.color_ids().filter(|&c| self.is_dead(c))
    }

    /// One intersection per color and no positive clause made of three
    /// intersections.
    pub fn is_satisfying(&self) -> bool {
        self.states.iter().all(Option::is_some) && self.violated_clause().is_none()
    }

    /// A positive clause whose three members are all intersections. Never
    /// present in a state built through [`ColorStructure::expand`].
    pub fn violated_clause(&self) -> Option<usize> {
        self.formula
            .positives()
            .iter()
            .position(|c| c.vars().iter().all(|&v| self.is_intersection(v)))
    }

    /// Intersections false, everything else true.
    pub fn extract_assignment(&self) -> Assignment {
        Assignment::with_false(self.formula.var_count(), self.intersections())
    }

    /// Lock index rebuilt from scratch over every positive clause.
    pub fn recompute_locks(&self) -> Vec<Vec<LockWitness>> {
        let mut locks = vec![Vec::new(); self.formula.var_count() as usize];
        for (ci, clause) in self.formula.positives().iter().enumerate() {
            let [a, b, c] = clause.vars();
            for (locked, p, q) in [(a, b, c), (b, a, c), (c, a, b)] {
                if self.is_intersection(p) && self.is_intersection(q) {
                    locks[locked.index()].push(LockWitness::new(ci, locked, p, q));
                }
            }
        }
        for list in &mut locks {
            list.sort();
        }
        locks
    }

    pub fn locks_consistent(&self) -> bool {
        self.recompute_locks() == self.locks
    }

    /// Graphviz rendering. Intersections are double circles; every positive
    /// clause touching an intersection becomes one edge whose label is a
    /// third clause member. Clauses without intersections are left out.
    pub fn to_dot(&self) -> String {
        const PALETTE: [&str; 10] = [
            "blue",
            "red",
            "darkgreen",
            "orange",
            "purple",
            "teal",
            "brown",
            "gray40",
            "olive",
            "magenta",
        ];
        let color_name = |v: VarId| PALETTE[self.color_of(v).index() % PALETTE.len()];

        let mut out = String::from("digraph colorstructure {\n");
        if self.expanded_count() == 0 {
            out.push_str("  // no intersections\n}\n");
            return out;
        }
        out.push_str("  node [shape=circle];\n");
        for v in self.intersections() {
            let c = color_name(v);
            let _ = writeln!(
                out,
                "  i{n} [label=\"{n}\", shape=doublecircle, color=\"{c}\", fontcolor=\"{c}\"];",
                n = v.number()
            );
        }
        for (ci, clause) in self.formula.positives().iter().enumerate() {
            let vars = clause.vars();
            let ints: Vec<VarId> = vars
                .iter()
                .copied()
                .filter(|&v| self.is_intersection(v))
                .collect();
            let rest: Vec<VarId> = vars
                .iter()
                .copied()
                .filter(|&v| !self.is_intersection(v))
                .collect();
            let (from, to, label) = match (ints.as_slice(), rest.as_slice()) {
                ([a, b], [l]) => (*a, format!("i{}", b.number()), *l),
                ([a], [l, node]) => {
                    let c = color_name(*node);
                    let _ = writeln!(
                        out,
                        "  n{ci}_{n} [label=\"{n}\", color=\"{c}\", fontcolor=\"{c}\"];",
                        n = node.number()
                    );
                    (*a, format!("n{ci}_{}", node.number()), *l)
                }
                _ => continue,
            };
            let c = color_name(label);
            let _ = writeln!(
                out,
                "  i{} -> {to} [label=\"{}\", fontcolor=\"{c}\", arrowhead=none];",
                from.number(),
                label.number()
            );
        }
        out.push_str("}\n");
        out
    }
}

fn insert_sorted(list: &mut Vec<LockWitness>, witness: LockWitness) {
    if let Err(pos) = list.binary_search(&witness) {
        list.insert(pos, witness);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::evaluate;
    use crate::formula::fixtures::{dense, small};

    fn v(n: u32) -> VarId {
        VarId::new(n)
    }

    #[test]
    fn init_is_empty() {
        let f = small();
        let cs = ColorStructure::init(&f).unwrap();
        assert_eq!(cs.expanded_count(), 0);
        assert!(f.vars().all(|x| cs.lock_state(x) == LockState::Free));
        assert_eq!(cs.extract_assignment(), Assignment::all_true(9));
        assert!(!cs.is_satisfying());
    }

    #[test]
    fn empty_formula_is_satisfying() {
        let f = Formula::from_triples(0, &[], &[]).unwrap();
        let cs = ColorStructure::init(&f).unwrap();
        assert!(cs.is_satisfying());
        assert_eq!(
            cs.to_dot(),
            "digraph colorstructure {\n  // no intersections\n}\n"
        );
    }

    #[test]
    fn init_requires_partition() {
        let f = Formula::from_triples(6, &[[1, 2, 3]], &[]).unwrap();
        assert_eq!(
            ColorStructure::init(&f).unwrap_err(),
            StructureError::Formula(FormulaError::NotPartitioned(v(4)))
        );
    }

    #[test]
    fn small_structure() {
        let f = small();
        let mut cs = ColorStructure::init(&f).unwrap();
        cs.expand(v(1)).unwrap();
        assert!(f.vars().all(|x| !cs.is_locked(x)));
        assert_eq!(
            cs.color_status(ColorId::new(1)),
            ColorStatus::Open {
                locked_count: 0,
                free: vec![v(4), v(5), v(6)]
            }
        );
        cs.expand(v(7)).unwrap();
        // {1,4,7}: 4 now sits between two intersections.
        assert!(cs.is_locked(v(4)));
        assert!(!cs.is_satisfying());
        assert_eq!(cs.extract_assignment().false_vars(), vec![v(1), v(7)]);
        assert_eq!(
            cs.color_status(ColorId::new(0)),
            ColorStatus::Expanded(v(1))
        );
    }

    #[test]
    fn dense_locks_green() {
        let f = dense();
        let mut cs = ColorStructure::init(&f).unwrap();
        cs.expand(v(1)).unwrap();
        cs.expand(v(4)).unwrap();
        for x in [7, 8, 9] {
            assert!(cs.is_locked(v(x)), "x{x}");
        }
        let LockState::Locked(ws) = cs.lock_state(v(7)) else {
            panic!("x7 should be locked");
        };
        assert_eq!(ws.len(), 1);
        let clause = f.positives()[ws[0].clause_index];
        let mut members = clause.vars();
        members.sort();
        assert_eq!(members, [v(1), v(4), v(7)]);
        assert_eq!(ws[0].intersections, (v(1), v(4)));
        assert_eq!(cs.lock_state(v(2)), LockState::Free);
        assert_eq!(cs.color_status(ColorId::new(2)), ColorStatus::Dead);
        assert_eq!(cs.dead_colors().collect::<Vec<_>>(), vec![ColorId::new(2)]);
        assert_eq!(cs.expand(v(7)), Err(StructureError::Locked(v(7))));

        let a = cs.extract_assignment();
        assert_eq!(a.false_vars(), vec![v(1), v(4)]);
        assert_eq!(evaluate(&f, &a), Ok(false));

        assert_eq!(cs.unexpand(ColorId::new(1)), Ok(v(4)));
        for x in [7, 8, 9] {
            assert_eq!(cs.lock_state(v(x)), LockState::Free);
        }
        assert!(cs.locks_consistent());
    }

    #[test]
    fn expand_unexpand_inverse() {
        let f = small();
        let init = ColorStructure::init(&f).unwrap();
        let mut cs = init.clone();
        cs.expand(v(1)).unwrap();
        cs.unexpand(ColorId::new(0)).unwrap();
        assert_eq!(cs, init);
    }

    #[test]
    fn precondition_errors() {
        let f = small();
        let mut cs = ColorStructure::init(&f).unwrap();
        assert_eq!(
            cs.unexpand(ColorId::new(0)),
            Err(StructureError::NotExpanded(ColorId::new(0)))
        );
        cs.expand(v(2)).unwrap();
        assert_eq!(
            cs.expand(v(3)),
            Err(StructureError::AlreadyExpanded {
                color: ColorId::new(0),
                current: v(2)
            })
        );
        assert_eq!(cs.expand(v(10)), Err(StructureError::UnknownVar(v(10))));
    }

    #[test]
    fn dot_for_small() {
        let f = small();
        let mut cs = ColorStructure::init(&f).unwrap();
        cs.expand(v(1)).unwrap();
        cs.expand(v(7)).unwrap();
        let dot = cs.to_dot();
        assert_eq!(dot.matches("doublecircle").count(), 2);
        assert!(dot.contains("i1 [label=\"1\""));
        assert!(dot.contains("i7 [label=\"7\""));
        let mut labels: Vec<&str> = dot
            .lines()
            .filter(|l| l.contains("->"))
            .map(|l| {
                l.split("label=\"")
                    .nth(1)
                    .unwrap()
                    .split('"')
                    .next()
                    .unwrap()
            })
            .collect();
        labels.sort();
        assert_eq!(labels, ["3", "4", "8"]);
    }
}
