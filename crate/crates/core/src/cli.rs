//! `mono31` command line.
//!
//! Exit codes: 0 success / class holds, 1 input or usage error, 2 a check
//! failed (class, verification, fuzz), 3 unsatisfiable.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::formula::{classify, first_unsatisfied, parse_dimacs, parse_vline, Formula};
use crate::fuzz::{default_solver, run_fuzz, FuzzOptions};
use crate::generator::{gen_relaxed, gen_strict, GenSpec};
use crate::solver::{solve, SolveError, SolverConfig, TieBreak};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_CHECK: i32 = 2;
pub const EXIT_UNSAT: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "mono31",
    version,
    about = "Color-structure solver for MONOTONE 3-SAT-(3,1)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report which (k,1) class a DIMACS file belongs to.
    Validate(ValidateArgs),
    /// Solve a DIMACS file and print a v-line assignment.
    Solve(SolveArgs),
    /// Check a v-line assignment against a DIMACS file.
    Verify { path: PathBuf, assignment: PathBuf },
    /// Generate a random instance.
    Gen(GenArgs),
    /// Solve and verify many generated strict instances.
    Fuzz(FuzzArgs),
}

#[derive(Args, Debug)]
struct ValidateArgs {
    path: PathBuf,
    /// Require exactly three positive occurrences (default).
    #[arg(long, conflicts_with = "relaxed")]
    strict: bool,
    /// Accept at most three positive occurrences.
    #[arg(long)]
    relaxed: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct SolveArgs {
    path: PathBuf,
    /// Randomize tie-breaking with this seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Reassignment budget per repair (default 4 * vars).
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    stats: bool,
    /// Write the final color-structure as Graphviz DOT.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Strict,
    Relaxed,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, value_enum, default_value = "strict")]
    mode: Mode,
    /// Maximum positive occurrences in relaxed mode.
    #[arg(long, default_value_t = 3)]
    k: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FuzzArgs {
    #[arg(long, default_value_t = 100)]
    count: u64,
    /// Inclusive variable-count range `MIN:MAX`.
    #[arg(long, default_value = "3:30", value_parser = parse_range)]
    n_range: (u32, u32),
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    oracle_cap: usize,
    /// JSON-lines file with one record per instance.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Where failing instances are dumped as DIMACS.
    #[arg(long, default_value = ".")]
    repro_dir: PathBuf,
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected MIN:MAX")?;
    let lo: u32 = lo.parse().map_err(|e| format!("{e}"))?;
    let hi: u32 = hi.parse().map_err(|e| format!("{e}"))?;
    if lo > hi {
        return Err("MIN exceeds MAX".into());
    }
    Ok((lo, hi))
}

pub fn run() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Entry point with injectable streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Validate(a) => cmd_validate(a, out),
        Command::Solve(a) => cmd_solve(a, out),
        Command::Verify { path, assignment } => cmd_verify(path, assignment, out),
        Command::Gen(a) => cmd_gen(a, out),
        Command::Fuzz(a) => cmd_fuzz(a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

struct Failure(i32, String);

fn input_error(msg: impl ToString) -> Failure {
    Failure(EXIT_INPUT, msg.to_string())
}

fn io_err(e: io::Error) -> Failure {
    input_error(e)
}

fn load(path: &PathBuf) -> Result<Formula, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    parse_dimacs(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn cmd_validate(args: ValidateArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let formula = load(&args.path)?;
    let report = classify(&formula);
    if args.json {
        let line = serde_json::to_string(&report).expect("report serializes");
        writeln!(out, "{line}").map_err(io_err)?;
    } else {
        let occ: Vec<String> = report
            .pos_occurrence
            .iter()
            .map(|(v, c)| format!("{v}:{c}"))
            .collect();
        writeln!(
            out,
            "is_3cnf: {}\nis_monotone: {}\nnegated_once: {}\nk_max: {}\nstrict_31: {}\nrelaxed_31: {}\npos_occurrence: {}",
            report.is_3cnf,
            report.is_monotone,
            report.negated_once,
            report.k_max,
            report.strict_31,
            report.relaxed_31,
            occ.join(" ")
        )
        .map_err(io_err)?;
    }
    let holds = if args.relaxed {
        report.relaxed_31
    } else {
        report.strict_31
    };
    Ok(if holds { EXIT_OK } else { EXIT_CHECK })
}

fn cmd_solve(args: SolveArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let formula = load(&args.path)?;
    let config = SolverConfig {
        tie_break: if args.seed.is_some() {
            TieBreak::Random
        } else {
            TieBreak::LowestVar
        },
        repair_budget: args.budget,
        seed: args.seed,
    };
    let solution = match solve(&formula, &config) {
        Ok(s) => s,
        Err(SolveError::Unsatisfiable) => {
            writeln!(out, "s UNSATISFIABLE").map_err(io_err)?;
            return Ok(EXIT_UNSAT);
        }
        Err(e @ SolveError::StrictUnsatisfiable) => {
            writeln!(out, "s UNSATISFIABLE").map_err(io_err)?;
            return Err(Failure(EXIT_UNSAT, e.to_string()));
        }
        Err(e) => return Err(input_error(e)),
    };
    write!(out, "s SATISFIABLE\n{}", solution.assignment.to_vline()).map_err(io_err)?;
    if args.stats {
        let s = &solution.stats;
        let h = &s.case_histogram;
        writeln!(
            out,
            "c expansions {}\nc reassignments {}\nc repairs {}\nc fallback_invocations {}\nc loops_detected {}\nc cases ishape={} cshape={} cluster={} composite={}",
            s.expansions,
            s.reassignments,
            s.repairs,
            s.fallback_invocations,
            s.loops_detected,
            h.ishape,
            h.cshape,
            h.cluster,
            h.composite
        )
        .map_err(io_err)?;
    }
    if let Some(path) = args.dot {
        fs::write(&path, solution.structure.to_dot())
            .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    }
    Ok(EXIT_OK)
}

fn cmd_verify(path: PathBuf, assignment: PathBuf, out: &mut dyn Write) -> Result<i32, Failure> {
    let formula = load(&path)?;
    let text = fs::read_to_string(&assignment)
        .map_err(|e| input_error(format!("{}: {e}", assignment.display())))?;
    let values = parse_vline(&text, formula.var_count())
        .map_err(|e| input_error(format!("{}: {e}", assignment.display())))?;
    match first_unsatisfied(&formula, &values).map_err(input_error)? {
        None => {
            writeln!(out, "s VERIFIED").map_err(io_err)?;
            Ok(EXIT_OK)
        }
        Some(clause) => {
            writeln!(out, "s FALSIFIED\nunsatisfied clause: {clause}").map_err(io_err)?;
            Ok(EXIT_CHECK)
        }
    }
}

fn cmd_gen(args: GenArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let formula = match args.mode {
        Mode::Strict => gen_strict(&GenSpec::strict(args.n, args.seed)),
        Mode::Relaxed => gen_relaxed(&GenSpec::relaxed(args.n, args.k, args.seed)),
    }
    .map_err(input_error)?;
    let text = formula.to_dimacs();
    match args.out {
        Some(path) => {
            fs::write(&path, text).map_err(|e| input_error(format!("{}: {e}", path.display())))?
        }
        None => out.write_all(text.as_bytes()).map_err(io_err)?,
    }
    Ok(EXIT_OK)
}

fn cmd_fuzz(args: FuzzArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let opts = FuzzOptions {
        count: args.count,
        n_min: args.n_range.0,
        n_max: args.n_range.1,
        seed: args.seed,
        oracle_cap: args.oracle_cap,
        repro_dir: Some(args.repro_dir),
    };
    let (summary, outcomes) = run_fuzz(&opts, &default_solver);
    if let Some(path) = &args.report {
        let mut lines = String::new();
        for o in &outcomes {
            lines.push_str(&serde_json::to_string(o).expect("outcome serializes"));
            lines.push('\n');
        }
        fs::write(path, lines).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    }
    print_summary(&summary, out).map_err(io_err)?;
    Ok(if summary.passed() {
        EXIT_OK
    } else {
        EXIT_CHECK
    })
}

fn print_summary(summary: &crate::fuzz::FuzzSummary, out: &mut dyn Write) -> io::Result<()> {
    let s = &summary.stats;
    let h = &s.case_histogram;
    writeln!(out, "instances: {}", summary.instances)?;
    writeln!(out, "verified: {}/{}", summary.verified, summary.instances)?;
    writeln!(
        out,
        "oracle: {} checked, {} disagreements",
        summary.oracle_checked, summary.oracle_disagreements
    )?;
    writeln!(
        out,
        "repairs: {} ({} reassignments)",
        s.repairs, s.reassignments
    )?;
    writeln!(out, "fallback_invocations: {}", s.fallback_invocations)?;
    writeln!(out, "loops_detected: {}", s.loops_detected)?;
    writeln!(
        out,
        "case_histogram: ishape={} cshape={} cluster={} composite={}",
        h.ishape, h.cshape, h.cluster, h.composite
    )?;
    for f in &summary.failures {
        write!(
            out,
            "FAILED instance {} (n={}, seed={})",
            f.index, f.n, f.seed
        )?;
        if let Some(e) = &f.error {
            write!(out, ": {e}")?;
        }
        if let Some(p) = &f.repro {
            write!(out, " [repro: {}]", p.display())?;
        }
        writeln!(out)?;
    }
    Ok(())
}
