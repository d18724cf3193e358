//! Seeded instance construction.
//!
//! Colors are always the consecutive triples {3i+1, 3i+2, 3i+3}. Positive
//! clauses come from a configuration model: each variable is written into a
//! pool once per positive occurrence, the pool is shuffled and cut into
//! triples, and triples with a repeated variable are fixed by seeded swaps.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::formula::{ColorId, Formula, VarId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenMode {
    Strict,
    Relaxed { k_max: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenSpec {
    pub n: u32,
    pub mode: GenMode,
    pub seed: u64,
    pub max_retries: u32,
}

impl GenSpec {
    pub fn strict(n: u32, seed: u64) -> Self {
        GenSpec {
            n,
            mode: GenMode::Strict,
            seed,
            max_retries: 10_000,
        }
    }

    pub fn relaxed(n: u32, k_max: u32, seed: u64) -> Self {
        GenSpec {
            n,
            mode: GenMode::Relaxed { k_max },
            seed,
            max_retries: 10_000,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("variable count {0} must be a positive multiple of 3")]
    BadVarCount(u32),
    #[error("could not remove repeated variables within {0} swaps")]
    RetriesExhausted(u32),
    #[error("generator mode does not match the requested operation")]
    WrongMode,
}

fn check_n(n: u32) -> Result<(), GenError> {
    if n < 3 || !n.is_multiple_of(3) {
        Err(GenError::BadVarCount(n))
    } else {
        Ok(())
    }
}

fn consecutive_colors(n: u32) -> Vec<[u32; 3]> {
    (0..n / 3)
        .map(|i| [3 * i + 1, 3 * i + 2, 3 * i + 3])
        .collect()
}

/// Every variable once negated (in its consecutive triple) and exactly three
/// times unnegated.
pub fn gen_strict(spec: &GenSpec) -> Result<Formula, GenError> {
    if spec.mode != GenMode::Strict {
        return Err(GenError::WrongMode);
    }
    check_n(spec.n)?;
    let colors = consecutive_colors(spec.n);
    if spec.n == 3 {
        // The only option: 9 occurrences over 3 variables.
        return Ok(Formula::from_triples(3, &colors, &[[1, 2, 3]; 3]).expect("valid"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let pool: Vec<u32> = (1..=spec.n).flat_map(|v| [v; 3]).collect();
    let positives = configure(pool, spec.max_retries, &mut rng)?;
    Ok(Formula::from_triples(spec.n, &colors, &positives).expect("valid"))
}

/// Every variable once negated and at most `k_max` times unnegated.
pub fn gen_relaxed(spec: &GenSpec) -> Result<Formula, GenError> {
    let GenMode::Relaxed { k_max } = spec.mode else {
        return Err(GenError::WrongMode);
    };
    check_n(spec.n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut counts: Vec<u32> = (0..spec.n).map(|_| rng.random_range(0..=k_max)).collect();
    // Trim until the pool splits into triples and no variable needs to
    // appear twice in one clause.
    loop {
        let total: u32 = counts.iter().sum();
        let widest = counts.iter().copied().max().unwrap_or(0);
        if total.is_multiple_of(3) && widest <= total / 3 {
            break;
        }
        let candidates: Vec<usize> = if widest > total / 3 {
            (0..counts.len()).filter(|&i| counts[i] == widest).collect()
        } else {
            (0..counts.len()).filter(|&i| counts[i] > 0).collect()
        };
        let i = candidates[rng.random_range(0..candidates.len())];
        counts[i] -= 1;
    }
    let pool: Vec<u32> = counts
        .iter()
        .enumerate()
        .flat_map(|(i, &c)| std::iter::repeat_n(i as u32 + 1, c as usize))
        .collect();
    let positives = configure(pool, spec.max_retries, &mut rng)?;
    Ok(Formula::from_triples(spec.n, &consecutive_colors(spec.n), &positives).expect("valid"))
}

fn has_repeat(t: &[u32]) -> bool {
    t[0] == t[1] || t[0] == t[2] || t[1] == t[2]
}

fn configure(
    mut pool: Vec<u32>,
    max_retries: u32,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<[u32; 3]>, GenError> {
    debug_assert_eq!(pool.len() % 3, 0);
    pool.shuffle(rng);
    let clauses = pool.len() / 3;
    let mut tries = 0;
    while let Some(bad) = (0..clauses).find(|&c| has_repeat(&pool[3 * c..3 * c + 3])) {
        if tries == max_retries {
            return Err(GenError::RetriesExhausted(max_retries));
        }
        tries += 1;
        let t = &pool[3 * bad..3 * bad + 3];
        let slot = 3 * bad + if t[1] == t[0] { 1 } else { 2 };
        let other = rng.random_range(0..pool.len());
        if other / 3 == bad {
            continue;
        }
        pool.swap(slot, other);
        let fine = |p: &[u32], c: usize| !has_repeat(&p[3 * c..3 * c + 3]);
        // Keep the swap only if the partner clause stays clean.
        if !fine(&pool, other / 3) {
            pool.swap(slot, other);
        }
    }
    Ok(pool.chunks(3).map(|c| [c[0], c[1], c[2]]).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GadgetCase {
    IShape,
    CShape,
    Cluster,
}

/// A formula with a scripted expansion prefix. After the prefix, `focus`
/// carries the named lock configuration and `dead` is a dead color whose
/// repair runs into it.
#[derive(Clone, Debug)]
pub struct Gadget {
    pub case: GadgetCase,
    pub formula: Formula,
    pub prefix: Vec<VarId>,
    pub focus: ColorId,
    pub dead: ColorId,
}

/// Builds a lock gadget. The seed permutes variables inside each color.
///
/// Shared frame: color A = {a, a', a''} is held between intersections b and
/// k'' by three clauses, and B's other members are held by p and q, so the
/// cheapest repair of A displaces k''. That leaves k and k' locked in the
/// shape being exercised.
pub fn gen_gadget(case: GadgetCase, seed: u64) -> Gadget {
    use GadgetCase::*;
    let roles: &[&str] = match case {
        IShape => &["K", "A", "B", "G", "U", "T", "P", "Q"],
        CShape => &["K", "A", "B", "G", "U", "P", "Q"],
        Cluster => &["K", "A", "B", "U", "G", "X", "P", "Q", "R", "S"],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let perms: Vec<[u32; 3]> = roles
        .iter()
        .map(|_| {
            let mut p = [0, 1, 2];
            p.shuffle(&mut rng);
            p
        })
        .collect();
    // Role name + member number (0, 1, 2 for x, x', x'') -> variable.
    let var = |role: &str, member: usize| -> u32 {
        let block = roles.iter().position(|r| *r == role).expect("role exists");
        3 * block as u32 + perms[block][member] + 1
    };
    let mut positives = vec![
        [var("B", 0), var("K", 2), var("A", 0)],
        [var("B", 0), var("K", 2), var("A", 1)],
        [var("B", 0), var("K", 2), var("A", 2)],
        [var("P", 0), var("Q", 0), var("B", 1)],
        [var("P", 0), var("Q", 0), var("B", 2)],
    ];
    let mut prefix_roles = vec![("G", 0), ("U", 0)];
    match case {
        IShape => {
            positives.extend([
                [var("G", 0), var("U", 0), var("K", 0)],
                [var("G", 0), var("U", 0), var("T", 0)],
                [var("G", 0), var("U", 0), var("K", 1)],
            ]);
        }
        CShape => {
            positives.extend([
                [var("G", 0), var("U", 0), var("K", 0)],
                [var("G", 0), var("U", 0), var("K", 1)],
                [var("G", 0), var("U", 1), var("P", 0)],
                [var("U", 0), var("G", 1), var("Q", 0)],
            ]);
        }
        Cluster => {
            positives.extend([
                [var("G", 0), var("U", 0), var("K", 0)],
                [var("U", 0), var("X", 0), var("K", 1)],
                [var("G", 0), var("X", 0), var("U", 1)],
                [var("G", 0), var("X", 0), var("U", 2)],
                [var("R", 0), var("S", 0), var("G", 1)],
                [var("R", 0), var("S", 0), var("G", 2)],
            ]);
            prefix_roles.extend([("X", 0), ("R", 0), ("S", 0)]);
        }
    }
    prefix_roles.extend([("P", 0), ("Q", 0), ("K", 2), ("B", 0)]);

    let n = 3 * roles.len() as u32;
    let formula =
        Formula::from_triples(n, &consecutive_colors(n), &positives).expect("valid gadget");
    let block = |role: &str| ColorId::new(roles.iter().position(|r| *r == role).expect("role"));
    Gadget {
        case,
        prefix: prefix_roles
            .iter()
            .map(|&(r, m)| VarId::new(var(r, m)))
            .collect(),
        focus: block("K"),
        dead: block("A"),
        formula,
    }
}
