//! Randomized cross-checking harness: generate strict instances, solve,
//! verify through the v-line round trip, and compare with the oracle.

use std::fs;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use crate::formula::{evaluate, parse_vline, Assignment, Formula};
use crate::generator::{gen_strict, GenSpec};
use crate::oracle::enumerate_with_cap;
use crate::solver::{solve, SolveStats, SolverConfig};

#[derive(Clone, Debug)]
pub struct FuzzOptions {
    pub count: u64,
    pub n_min: u32,
    pub n_max: u32,
    pub seed: u64,
    /// Oracle runs on instances with at most this many colors.
    pub oracle_cap: usize,
    pub repro_dir: Option<PathBuf>,
}

impl Default for FuzzOptions {
    fn default() -> Self {
        FuzzOptions {
            count: 100,
            n_min: 3,
            n_max: 30,
            seed: 1,
            oracle_cap: 10,
            repro_dir: None,
        }
    }
}

/// The solver under test. Returns the assignment and its run statistics.
pub type SolverFn =
    dyn Fn(&Formula, &SolverConfig) -> Result<(Assignment, SolveStats), String> + Sync;

pub fn default_solver(
    formula: &Formula,
    config: &SolverConfig,
) -> Result<(Assignment, SolveStats), String> {
    solve(formula, config)
        .map(|s| (s.assignment, s.stats))
        .map_err(|e| e.to_string())
}

#[derive(Clone, Debug, Serialize)]
pub struct InstanceOutcome {
    pub index: u64,
    pub n: u32,
    pub seed: u64,
    pub verified: bool,
    /// `Some(satisfiable)` when the oracle ran.
    pub oracle: Option<bool>,
    pub stats: SolveStats,
    pub error: Option<String>,
    pub repro: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct FuzzSummary {
    pub instances: u64,
    pub verified: u64,
    pub oracle_checked: u64,
    pub oracle_disagreements: u64,
    pub stats: SolveStats,
    pub failures: Vec<InstanceOutcome>,
}

impl FuzzSummary {
    pub fn passed(&self) -> bool {
        self.verified == self.instances && self.oracle_disagreements == 0
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// (n, generator seed) of instance `index`.
pub fn instance_params(opts: &FuzzOptions, index: u64) -> (u32, u64) {
    let seed = splitmix64(opts.seed ^ splitmix64(index));
    let lo = opts.n_min.div_ceil(3).max(1);
    let hi = (opts.n_max / 3).max(lo);
    let n = 3 * (lo + (seed % u64::from(hi - lo + 1)) as u32);
    (n, seed)
}

pub fn run_instance(opts: &FuzzOptions, index: u64, solver: &SolverFn) -> InstanceOutcome {
    let (n, seed) = instance_params(opts, index);
    let mut outcome = InstanceOutcome {
        index,
        n,
        seed,
        verified: false,
        oracle: None,
        stats: SolveStats::default(),
        error: None,
        repro: None,
    };
    let formula = match gen_strict(&GenSpec::strict(n, seed)) {
        Ok(f) => f,
        Err(e) => {
            outcome.error = Some(format!("generator: {e}"));
            return outcome;
        }
    };
    let config = SolverConfig::seeded(seed);
    match solver(&formula, &config) {
        Ok((assignment, stats)) => {
            outcome.stats = stats;
            // Same path as `verify`: through the textual v-line.
            let verdict = parse_vline(&assignment.to_vline(), formula.var_count())
                .map_err(|e| e.to_string())
                .and_then(|a| evaluate(&formula, &a).map_err(|e| e.to_string()));
            match verdict {
                Ok(true) => outcome.verified = true,
                Ok(false) => outcome.error = Some("assignment falsifies a clause".into()),
                Err(e) => outcome.error = Some(e),
            }
        }
        Err(e) => outcome.error = Some(e),
    }
    if formula.colors().len() <= opts.oracle_cap {
        if let Ok(e) = enumerate_with_cap(&formula, opts.oracle_cap) {
            outcome.oracle = Some(e.assignment.is_some());
        }
    }
    let disagrees = outcome.oracle.is_some_and(|sat| sat != outcome.verified);
    if !outcome.verified || disagrees {
        if let Some(dir) = &opts.repro_dir {
            let path = dir.join(format!("fuzz-fail-{}-{index}.cnf", opts.seed));
            if fs::create_dir_all(dir).is_ok() && fs::write(&path, formula.to_dimacs()).is_ok() {
                outcome.repro = Some(path);
            }
        }
    }
    outcome
}

/// Runs every instance (in parallel) and merges the results by index.
pub fn run_fuzz(opts: &FuzzOptions, solver: &SolverFn) -> (FuzzSummary, Vec<InstanceOutcome>) {
    let outcomes: Vec<InstanceOutcome> = (0..opts.count)
        .into_par_iter()
        .map(|i| run_instance(opts, i, solver))
        .collect();
    let mut summary = FuzzSummary {
        instances: opts.count,
        ..FuzzSummary::default()
    };
    for o in &outcomes {
        summary.stats.merge(&o.stats);
        if o.verified {
            summary.verified += 1;
        }
        if let Some(sat) = o.oracle {
            summary.oracle_checked += 1;
            if sat != o.verified {
                summary.oracle_disagreements += 1;
            }
        }
        if !o.verified || o.oracle.is_some_and(|sat| sat != o.verified) {
            summary.failures.push(o.clone());
        }
    }
    (summary, outcomes)
}
