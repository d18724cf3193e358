//! Greedy expansion with case-based reassignment.
//!
//! The main loop always expands inside the open color with the most locked
//! members, so a color with two locked members gets its last free variable
//! before anything else can lock it. When a color dies anyway, [`repair`]
//! frees one of its members by displacing an intersection, and re-expands the
//! displaced color, cascading through further dead colors as needed. Each
//! reassignment is tagged with the lock pattern ([`LockPattern`]) that forced
//! it.
//!
//! Anything the repair cannot resolve (unclassifiable locks, an exhausted
//! budget, a repeated state) is handed to [`fallback_search`], and counted in
//! [`SolveStats::fallback_invocations`].

use std::collections::{BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::colorstruct::{ColorStatus, ColorStructure, LockWitness, StructureError};
use crate::formula::{classify, Assignment, ColorId, Formula, VarId};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TieBreak {
    #[default]
    LowestVar,
    /// Uniform among tied candidates, driven by [`SolverConfig::seed`].
    Random,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolverConfig {
    pub tie_break: TieBreak,
    /// Maximum reassignments per repair; `None` means 4 * var_count.
    pub repair_budget: Option<usize>,
    pub seed: Option<u64>,
}

impl SolverConfig {
    pub fn seeded(seed: u64) -> Self {
        SolverConfig {
            tie_break: TieBreak::Random,
            repair_budget: None,
            seed: Some(seed),
        }
    }

    pub fn budget_for(&self, formula: &Formula) -> usize {
        self.repair_budget
            .unwrap_or(4 * formula.var_count() as usize)
            .max(1)
    }
}

/// How the locked members of a color are held in place.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum LockPattern {
    /// Three clauses run between `g` and `u`, which occur nowhere else.
    IShape {
        g: VarId,
        u: VarId,
        blocked: [VarId; 3],
    },
    /// Two clauses between `g` and `u`, both blocking this color; `g` or `u`
    /// recurs in `side_occurrences`.
    CShape {
        g: VarId,
        u: VarId,
        blocked: [VarId; 2],
        side_occurrences: Vec<usize>,
    },
    /// A single clause between `g` and `u` blocks this color; neighbouring
    /// intersections lock `companions`.
    Cluster {
        g: VarId,
        u: VarId,
        blocked: VarId,
        companions: Vec<VarId>,
        secondary_intersections: Vec<VarId>,
    },
    Composite {
        parts: Vec<LockPattern>,
    },
}

impl LockPattern {
    pub fn kind(&self) -> PatternKind {
        match self {
            LockPattern::IShape { .. } => PatternKind::IShape,
            LockPattern::CShape { .. } => PatternKind::CShape,
            LockPattern::Cluster { .. } => PatternKind::Cluster,
            LockPattern::Composite { .. } => PatternKind::Composite,
        }
    }

    /// Flattened non-composite parts.
    pub fn parts(&self) -> Vec<&LockPattern> {
        match self {
            LockPattern::Composite { parts } => parts.iter().flat_map(|p| p.parts()).collect(),
            other => vec![other],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PatternKind {
    IShape,
    CShape,
    Cluster,
    Composite,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CaseHistogram {
    pub ishape: u64,
    pub cshape: u64,
    pub cluster: u64,
    pub composite: u64,
}

impl CaseHistogram {
    pub fn record(&mut self, kind: PatternKind) {
        match kind {
            PatternKind::IShape => self.ishape += 1,
            PatternKind::CShape => self.cshape += 1,
            PatternKind::Cluster => self.cluster += 1,
            PatternKind::Composite => self.composite += 1,
        }
    }

    pub fn merge(&mut self, other: &CaseHistogram) {
        self.ishape += other.ishape;
        self.cshape += other.cshape;
        self.cluster += other.cluster;
        self.composite += other.composite;
    }

    pub fn total(&self) -> u64 {
        self.ishape + self.cshape + self.cluster + self.composite
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    pub expansions: u64,
    pub reassignments: u64,
    pub repairs: u64,
    pub fallback_invocations: u64,
    pub loops_detected: u64,
    pub case_histogram: CaseHistogram,
}

impl SolveStats {
    pub fn merge(&mut self, other: &SolveStats) {
        self.expansions += other.expansions;
        self.reassignments += other.reassignments;
        self.repairs += other.repairs;
        self.fallback_invocations += other.fallback_invocations;
        self.loops_detected += other.loops_detected;
        self.case_histogram.merge(&other.case_histogram);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairStep {
    pub unexpanded: VarId,
    pub expanded: VarId,
    pub pattern: LockPattern,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RepairTrace {
    pub steps: Vec<RepairStep>,
    /// Expansions of displaced colors that had a free member.
    pub reexpansions: Vec<VarId>,
    pub visited: HashSet<Vec<Option<VarId>>>,
}

impl RepairTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("no lock pattern matches color {color} ({} witnesses)", witnesses.len())]
pub struct NoMatch {
    pub color: ColorId,
    pub witnesses: Vec<LockWitness>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RepairError {
    #[error("color {0} is not dead")]
    NotDead(ColorId),
    #[error(transparent)]
    NoMatch(NoMatch),
    #[error("no single displacement frees a member of color {color}")]
    NoMove { color: ColorId, trace: RepairTrace },
    #[error("repair budget of {budget} reassignments exhausted")]
    BudgetExhausted { budget: usize, trace: RepairTrace },
    #[error("reassignments returned to an earlier state after {} steps", trace.len())]
    LoopDetected { trace: RepairTrace },
}

impl RepairError {
    pub fn trace(&self) -> Option<&RepairTrace> {
        match self {
            RepairError::NoMove { trace, .. }
            | RepairError::BudgetExhausted { trace, .. }
            | RepairError::LoopDetected { trace } => Some(trace),
            _ => None,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error(
        "formula is outside MONOTONE 3-SAT-(<=3,1): k_max = {k_max}, negated once = {negated_once}"
    )]
    OutOfClass { k_max: u32, negated_once: bool },
    #[error("no selection satisfies the formula")]
    Unsatisfiable,
    #[error("strict (3,1) formula reported unsatisfiable")]
    StrictUnsatisfiable,
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// Number of colors whose intersection is not holding a dead color's member
/// in place.
pub fn progress_metric(cs: &ColorStructure<'_>) -> usize {
    let formula = cs.formula();
    let blocking: HashSet<VarId> = cs
        .dead_colors()
        .flat_map(|c| formula.color(c).vars())
        .flat_map(|m| cs.witnesses(m).iter())
        .flat_map(|w| [w.intersections.0, w.intersections.1])
        .collect();
    cs.intersections().filter(|v| !blocking.contains(v)).count()
}

/// Next variable to expand: a free member of a live, unexpanded color with
/// the most locked members.
pub fn select_next(cs: &ColorStructure<'_>, config: &SolverConfig) -> Option<VarId> {
    let formula = cs.formula();
    let mut best: Option<u8> = None;
    let mut ties: Vec<VarId> = Vec::new();
    for color in formula.color_ids() {
        if let ColorStatus::Open { locked_count, free } = cs.color_status(color) {
            match best {
                Some(b) if locked_count < b => continue,
                Some(b) if locked_count == b => ties.extend(free),
                _ => {
                    best = Some(locked_count);
                    ties = free;
                }
            }
        }
    }
    match config.tie_break {
        TieBreak::LowestVar => ties.into_iter().min(),
        TieBreak::Random if !ties.is_empty() => {
            ties.sort();
            let mix = (cs.expanded_count() as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed.unwrap_or(0) ^ mix);
            Some(ties[rng.random_range(0..ties.len())])
        }
        TieBreak::Random => None,
    }
}

/// Classifies how the locked members of `color` are held.
pub fn classify_lock(cs: &ColorStructure<'_>, color: ColorId) -> Result<LockPattern, NoMatch> {
    classify_members(cs, color, None)
}

fn classify_members(
    cs: &ColorStructure<'_>,
    color: ColorId,
    exclude: Option<VarId>,
) -> Result<LockPattern, NoMatch> {
    let formula = cs.formula();
    let color_vars = formula.color(color).vars();
    let mut members: Vec<VarId> = color_vars
        .iter()
        .copied()
        .filter(|&m| Some(m) != exclude && cs.is_locked(m))
        .collect();
    members.sort();
    let all_witnesses: Vec<LockWitness> = members
        .iter()
        .flat_map(|&m| cs.witnesses(m).iter().copied())
        .collect();
    let no_match = || NoMatch {
        color,
        witnesses: all_witnesses.clone(),
    };
    if members.is_empty() {
        return Err(no_match());
    }

    // Group witness pairs into components that share an intersection.
    let mut components: Vec<Component> = Vec::new();
    for &m in &members {
        for w in cs.witnesses(m) {
            let pair = w.intersections;
            let touching: Vec<usize> = components
                .iter()
                .enumerate()
                .filter(|(_, (pairs, _))| {
                    pairs
                        .iter()
                        .any(|p| p.0 == pair.0 || p.0 == pair.1 || p.1 == pair.0 || p.1 == pair.1)
                })
                .map(|(i, _)| i)
                .collect();
            let mut merged_pairs = vec![pair];
            let mut merged_members = vec![m];
            for &i in touching.iter().rev() {
                let (pairs, ms) = components.remove(i);
                merged_pairs.extend(pairs);
                merged_members.extend(ms);
            }
            merged_pairs.sort();
            merged_pairs.dedup();
            merged_members.sort();
            merged_members.dedup();
            components.push((merged_pairs, merged_members));
        }
    }
    components.sort_by_key(|(_, ms)| ms[0]);

    let mut parts = Vec::with_capacity(components.len());
    for (pairs, ms) in &components {
        let main_member = ms[0];
        let (g, u) = cs
            .witnesses(main_member)
            .iter()
            .map(|w| w.intersections)
            .find(|p| pairs.contains(p))
            .expect("component built from this member's witnesses");
        let shared: Vec<usize> = formula
            .pos_clauses_of(g)
            .iter()
            .copied()
            .filter(|&ci| formula.positives()[ci].contains(u))
            .collect();
        let thirds: Vec<VarId> = shared
            .iter()
            .map(|&ci| {
                let (a, b) = formula.positives()[ci].others(g).expect("g in clause");
                if a == u {
                    b
                } else {
                    a
                }
            })
            .collect();
        let in_color = thirds.iter().filter(|t| color_vars.contains(t)).count();
        let only_these = |x: VarId| formula.pos_clauses_of(x).len() == shared.len();

        let part = if pairs.len() == 1 && shared.len() == 3 && only_these(g) && only_these(u) {
            LockPattern::IShape {
                g,
                u,
                blocked: [thirds[0], thirds[1], thirds[2]],
            }
        } else if pairs.len() == 1 && shared.len() == 2 && in_color == 2 {
            let side_occurrences: Vec<usize> = formula
                .pos_clauses_of(g)
                .iter()
                .chain(formula.pos_clauses_of(u))
                .copied()
                .filter(|ci| !shared.contains(ci))
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            if side_occurrences.is_empty() {
                return Err(no_match());
            }
            LockPattern::CShape {
                g,
                u,
                blocked: [thirds[0], thirds[1]],
                side_occurrences,
            }
        } else {
            let (companions, secondary) = cluster_neighbourhood(cs, g, u, main_member);
            LockPattern::Cluster {
                g,
                u,
                blocked: main_member,
                companions,
                secondary_intersections: secondary,
            }
        };
        parts.push(part);
    }
    if parts.len() == 1 {
        Ok(parts.pop().expect("one part"))
    } else {
        Ok(LockPattern::Composite { parts })
    }
}

/// Variables locked between exactly one of `g`, `u` and some other
/// intersection, plus those other intersections.
fn cluster_neighbourhood(
    cs: &ColorStructure<'_>,
    g: VarId,
    u: VarId,
    blocked: VarId,
) -> (Vec<VarId>, Vec<VarId>) {
    let formula = cs.formula();
    let mut companions = BTreeSet::new();
    let mut secondary = BTreeSet::new();
    for hub in [g, u] {
        for &ci in formula.pos_clauses_of(hub) {
            let (a, b) = formula.positives()[ci].others(hub).expect("hub in clause");
            for (locked, other) in [(a, b), (b, a)] {
                if other != g
                    && other != u
                    && locked != blocked
                    && cs.is_intersection(other)
                    && !cs.is_intersection(locked)
                {
                    companions.insert(locked);
                    secondary.insert(other);
                }
            }
        }
    }
    (
        companions.into_iter().collect(),
        secondary.into_iter().collect(),
    )
}

/// Candidate reassignment: free `member` by displacing `displace`.
#[derive(Clone, Copy, Debug)]
struct Move {
    member: VarId,
    displace: VarId,
}

/// Candidate moves for a dead color, best first.
fn rank_moves<'f>(
    cs: &ColorStructure<'f>,
    color: ColorId,
    exclude: Option<VarId>,
) -> Vec<(Move, ColorStructure<'f>)> {
    let formula = cs.formula();
    let color_vars = formula.color(color).vars();
    let mut members: Vec<VarId> = color_vars
        .iter()
        .copied()
        .filter(|&m| Some(m) != exclude && cs.is_locked(m))
        .collect();
    members.sort();
    members.dedup();

    let mut scored = Vec::new();
    for member in members {
        let witnesses = cs.witnesses(member);
        let mut hitters: Vec<VarId> =
            vec![witnesses[0].intersections.0, witnesses[0].intersections.1];
        hitters.retain(|&i| witnesses.iter().all(|w| w.involves(i)));
        for displace in hitters {
            let mut next = cs.clone();
            let displaced_color = formula.color_of(displace).expect("partitioned");
            next.unexpand(displaced_color)
                .expect("intersection has a color");
            if next.expand(member).is_err() {
                continue;
            }
            let stuck = next.is_dead(displaced_color);
            let new_dead = next.dead_colors().filter(|&c| c != displaced_color).count();
            scored.push((
                (stuck, new_dead, member, displace),
                Move { member, displace },
                next,
            ));
        }
    }
    scored.sort_by_key(|(key, _, _)| *key);
    scored.into_iter().map(|(_, m, next)| (m, next)).collect()
}

/// Best free member of an open color: fewest colors killed, then lowest.
fn best_free_member(cs: &ColorStructure<'_>, free: &[VarId]) -> VarId {
    free.iter()
        .copied()
        .min_by_key(|&v| {
            let mut next = cs.clone();
            next.expand(v).expect("free member expands");
            (next.dead_colors().count(), v)
        })
        .expect("open colors have a free member")
}

/// Witness pairs of one component and the members they block.
type Component = (Vec<(VarId, VarId)>, Vec<VarId>);

/// Resolves `dead_color` (and every other dead color) by reassignment.
pub fn repair<'f>(
    cs: &ColorStructure<'f>,
    dead_color: ColorId,
    config: &SolverConfig,
) -> Result<(ColorStructure<'f>, RepairTrace), RepairError> {
    if !cs.is_dead(dead_color) {
        return Err(RepairError::NotDead(dead_color));
    }
    let budget = config.budget_for(cs.formula());
    let mut cs = cs.clone();
    let mut trace = RepairTrace::default();
    trace.visited.insert(cs.fingerprint().to_vec());
    let mut pending: BTreeSet<ColorId> = cs.dead_colors().collect();
    pending.insert(dead_color);
    // The member a color lost in the reassignment that displaced it.
    let mut displaced_from: Vec<Option<VarId>> = vec![None; cs.formula().colors().len()];

    while let Some(color) = pending.pop_first() {
        match cs.color_status(color) {
            ColorStatus::Expanded(_) => {}
            ColorStatus::Open { free, .. } => {
                let v = best_free_member(&cs, &free);
                cs.expand(v).expect("free member expands");
                trace.reexpansions.push(v);
                pending.extend(cs.dead_colors());
            }
            ColorStatus::Dead => {
                if trace.steps.len() >= budget {
                    return Err(RepairError::BudgetExhausted { budget, trace });
                }
                let exclude = displaced_from[color.index()];
                let pattern =
                    classify_members(&cs, color, exclude).map_err(RepairError::NoMatch)?;
                let Some((mv, next)) = rank_moves(&cs, color, exclude).into_iter().next() else {
                    return Err(RepairError::NoMove { color, trace });
                };
                let displaced_color = cs.formula().color_of(mv.displace).expect("partitioned");
                cs = next;
                displaced_from[displaced_color.index()] = Some(mv.displace);
                trace.steps.push(RepairStep {
                    unexpanded: mv.displace,
                    expanded: mv.member,
                    pattern,
                });
                if !trace.visited.insert(cs.fingerprint().to_vec()) {
                    return Err(RepairError::LoopDetected { trace });
                }
                pending.insert(displaced_color);
                pending.extend(cs.dead_colors());
            }
        }
    }
    debug_assert!(cs.dead_colors().next().is_none());
    debug_assert!(cs.is_intersection(cs.intersection(dead_color).expect("repaired")));
    Ok((cs, trace))
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("no selection satisfies the formula")]
pub struct Unsatisfiable;

/// Exhaustive backtracking over one-false-per-color selections. Branches on
/// the most constrained color first and tries each color's current
/// intersection before its other members.
pub fn fallback_search(
    formula: &Formula,
    cs: &ColorStructure<'_>,
) -> Result<Assignment, Unsatisfiable> {
    let mut search = Search {
        formula,
        false_count: vec![0; formula.positives().len()],
        chosen: vec![None; formula.colors().len()],
        hint: cs.fingerprint().to_vec(),
    };
    if search.descend() {
        let falses = search.chosen.iter().map(|c| c.expect("complete selection"));
        Ok(Assignment::with_false(formula.var_count(), falses))
    } else {
        Err(Unsatisfiable)
    }
}

struct Search<'f> {
    formula: &'f Formula,
    false_count: Vec<u8>,
    chosen: Vec<Option<VarId>>,
    hint: Vec<Option<VarId>>,
}

impl Search<'_> {
    fn blocked(&self, v: VarId) -> bool {
        self.formula
            .pos_clauses_of(v)
            .iter()
            .any(|&ci| self.false_count[ci] >= 2)
    }

    fn descend(&mut self) -> bool {
        let mut target: Option<(usize, usize)> = None;
        for (ci, color) in self.formula.colors().iter().enumerate() {
            if self.chosen[ci].is_some() {
                continue;
            }
            let open = color.vars().iter().filter(|&&v| !self.blocked(v)).count();
            if open == 0 {
                return false;
            }
            if target.is_none_or(|(_, best)| open < best) {
                target = Some((ci, open));
            }
        }
        let Some((ci, _)) = target else {
            return true;
        };
        let mut order = self.formula.colors()[ci].vars().to_vec();
        if let Some(h) = self.hint[ci] {
            order.retain(|&v| v != h);
            order.insert(0, h);
        }
        for v in order {
            if self.blocked(v) {
                continue;
            }
            self.set(ci, v, true);
            if self.descend() {
                return true;
            }
            self.set(ci, v, false);
        }
        false
    }

    fn set(&mut self, ci: usize, v: VarId, on: bool) {
        self.chosen[ci] = on.then_some(v);
        for &pi in self.formula.pos_clauses_of(v) {
            if on {
                self.false_count[pi] += 1;
            } else {
                self.false_count[pi] -= 1;
            }
        }
    }
}

/// Structure whose intersections are exactly the false variables of a
/// one-false-per-color assignment.
pub fn structure_from_selection<'f>(
    formula: &'f Formula,
    assignment: &Assignment,
) -> Result<ColorStructure<'f>, StructureError> {
    let mut cs = ColorStructure::init(formula)?;
    for v in assignment.false_vars() {
        cs.expand(v)?;
    }
    Ok(cs)
}

#[derive(Clone, Debug)]
pub struct Solution<'f> {
    pub assignment: Assignment,
    pub stats: SolveStats,
    pub structure: ColorStructure<'f>,
}

/// Builds a satisfying color-structure for a MONOTONE 3-SAT-(<=3,1) formula.
pub fn solve<'f>(formula: &'f Formula, config: &SolverConfig) -> Result<Solution<'f>, SolveError> {
    let report = classify(formula);
    if !report.relaxed_31 {
        return Err(SolveError::OutOfClass {
            k_max: report.k_max,
            negated_once: report.negated_once,
        });
    }
    let mut stats = SolveStats::default();
    let mut cs = ColorStructure::init(formula)?;
    loop {
        let first_dead = cs.dead_colors().next();
        if let Some(dead) = first_dead {
            stats.repairs += 1;
            match repair(&cs, dead, config) {
                Ok((next, trace)) => {
                    stats.reassignments += trace.steps.len() as u64;
                    stats.expansions += (trace.steps.len() + trace.reexpansions.len()) as u64;
                    for step in &trace.steps {
                        stats.case_histogram.record(step.pattern.kind());
                    }
                    cs = next;
                }
                Err(err) => {
                    if let Some(trace) = err.trace() {
                        stats.reassignments += trace.steps.len() as u64;
                    }
                    if matches!(err, RepairError::LoopDetected { .. }) {
                        stats.loops_detected += 1;
                    }
                    stats.fallback_invocations += 1;
                    let assignment = match fallback_search(formula, &cs) {
                        Ok(a) => a,
                        Err(Unsatisfiable) if report.strict_31 => {
                            return Err(SolveError::StrictUnsatisfiable)
                        }
                        Err(Unsatisfiable) => return Err(SolveError::Unsatisfiable),
                    };
                    cs = structure_from_selection(formula, &assignment)?;
                    break;
                }
            }
            continue;
        }
        match select_next(&cs, config) {
            Some(v) => {
                cs.expand(v)?;
                stats.expansions += 1;
            }
            None => break,
        }
    }
    debug_assert!(cs.is_satisfying());
    Ok(Solution {
        assignment: cs.extract_assignment(),
        stats,
        structure: cs,
    })
}
