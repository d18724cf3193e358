use mono31::solver::{progress_metric, structure_from_selection};
use mono31::{
    enumerate_selections, evaluate, fallback_search, gen_relaxed, gen_strict, repair, solve,
    Assignment, ColorStatus, ColorStructure, Formula, GenSpec, SolverConfig, VarId,
};
use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn strict(n: u32, seed: u64) -> Formula {
    gen_strict(&GenSpec::strict(n, seed)).unwrap()
}

/// Every one-false-per-color selection, as false-variable lists.
fn selections(f: &Formula) -> Vec<Vec<VarId>> {
    let mut out = vec![Vec::new()];
    for color in f.colors() {
        out = out
            .into_iter()
            .flat_map(|s| {
                color.vars().into_iter().map(move |v| {
                    let mut s = s.clone();
                    s.push(v);
                    s
                })
            })
            .collect();
    }
    out
}

/// Expands random free members until no color is open or one dies.
fn random_walk<'f>(f: &'f Formula, rng: &mut ChaCha8Rng) -> ColorStructure<'f> {
    let mut cs = ColorStructure::init(f).unwrap();
    loop {
        if cs.dead_colors().next().is_some() {
            return cs;
        }
        let free: Vec<VarId> = f
            .color_ids()
            .filter_map(|c| match cs.color_status(c) {
                ColorStatus::Open { free, .. } => Some(free),
                _ => None,
            })
            .flatten()
            .collect();
        match free.choose(rng) {
            Some(&v) => cs.expand(v).unwrap(),
            None => return cs,
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn incremental_locks_match_recomputation(k in 1u32..12, seed: u64, ops in prop::collection::vec(any::<u16>(), 1..80)) {
        let f = strict(3 * k, seed);
        let mut cs = ColorStructure::init(&f).unwrap();
        for op in ops {
            let color = mono31::ColorId::new(op as usize % f.colors().len());
            if cs.intersection(color).is_some() {
                cs.unexpand(color).unwrap();
            } else {
                let members = f.color(color).vars();
                let v = members[(op as usize >> 8) % 3];
                if cs.is_locked(v) {
                    prop_assert!(cs.expand(v).is_err());
                } else {
                    cs.expand(v).unwrap();
                }
            }
            prop_assert!(cs.locks_consistent());
            // No positive clause ever has all three members as intersections.
            prop_assert!(cs.violated_clause().is_none());
        }
    }

    #[test]
    fn expand_then_unexpand_is_identity(k in 1u32..12, seed: u64, walk_seed: u64) {
        let f = strict(3 * k, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(walk_seed);
        let cs = random_walk(&f, &mut rng);
        for v in f.vars() {
            let color = f.color_of(v).unwrap();
            if !cs.is_free(v) || cs.intersection(color).is_some() {
                continue;
            }
            let mut probe = cs.clone();
            probe.expand(v).unwrap();
            prop_assert_eq!(probe.unexpand(color).unwrap(), v);
            prop_assert_eq!(probe.fingerprint(), cs.fingerprint());
            prop_assert_eq!(probe.recompute_locks(), cs.recompute_locks());
        }
    }

    #[test]
    fn solve_is_deterministic_and_satisfying(k in 1u32..40, seed: u64) {
        let f = strict(3 * k, seed);
        let a = solve(&f, &SolverConfig::default()).unwrap();
        let b = solve(&f, &SolverConfig::default()).unwrap();
        prop_assert_eq!(&a.assignment, &b.assignment);
        prop_assert_eq!(evaluate(&f, &a.assignment), Ok(true));
        prop_assert_eq!(a.assignment.false_vars().len(), f.colors().len());
        prop_assert_eq!(a.stats.loops_detected, 0);

        let seeded = SolverConfig::seeded(seed);
        let c = solve(&f, &seeded).unwrap();
        let d = solve(&f, &seeded).unwrap();
        prop_assert_eq!(&c.assignment, &d.assignment);
        prop_assert_eq!(evaluate(&f, &c.assignment), Ok(true));
    }

    #[test]
    fn relaxed_instances_agree_with_oracle(k in 1u32..6, kmax in 0u32..4, seed: u64) {
        let f = gen_relaxed(&GenSpec::relaxed(3 * k, kmax, seed)).unwrap();
        let oracle = enumerate_selections(&f).unwrap();
        match solve(&f, &SolverConfig::default()) {
            Ok(sol) => {
                prop_assert_eq!(evaluate(&f, &sol.assignment), Ok(true));
                prop_assert!(oracle.is_some());
            }
            Err(e) => prop_assert!(oracle.is_none(), "{e}"),
        }
    }

    #[test]
    fn fallback_agrees_with_oracle(k in 1u32..6, seed: u64, walk_seed: u64) {
        let f = strict(3 * k, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(walk_seed);
        let cs = random_walk(&f, &mut rng);
        let found = fallback_search(&f, &cs);
        let oracle = enumerate_selections(&f).unwrap();
        prop_assert_eq!(found.is_ok(), oracle.is_some());
        if let Ok(a) = found {
            prop_assert_eq!(evaluate(&f, &a), Ok(true));
        }
    }

    #[test]
    fn repair_from_random_dead_ends(k in 2u32..30, seed: u64, walk_seed: u64) {
        let f = strict(3 * k, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(walk_seed);
        let cs = random_walk(&f, &mut rng);
        let Some(dead) = cs.dead_colors().next() else {
            return Ok(());
        };
        let before = progress_metric(&cs);
        if let Ok((fixed, trace)) = repair(&cs, dead, &SolverConfig::default()) {
            prop_assert!(fixed.dead_colors().next().is_none());
            prop_assert!(fixed.intersection(dead).is_some());
            prop_assert!(fixed.locks_consistent());
            prop_assert!(progress_metric(&fixed) > before);
            prop_assert!(!trace.is_empty());
        }
    }
}

#[test]
fn selection_satisfies_iff_structure_has_no_violated_clause() {
    for k in 1..=6u32 {
        for seed in 0..6 {
            let f = strict(3 * k, seed);
            for sel in selections(&f) {
                let a = Assignment::with_false(f.var_count(), sel.iter().copied());
                let satisfied = evaluate(&f, &a).unwrap();
                // A selection fails to build exactly when some expansion hits a locked member.
                let built = structure_from_selection(&f, &a);
                match built {
                    Ok(cs) => {
                        assert!(satisfied);
                        assert!(cs.is_satisfying());
                        assert_eq!(cs.extract_assignment(), a);
                    }
                    Err(_) => assert!(!satisfied),
                }
            }
        }
    }
}
