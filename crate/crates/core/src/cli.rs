//! The `rulecp` command line.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bench::{self, BenchPlan};
use crate::io::{self, IoError, NamedTable};
use crate::membership::{self, GenConfig, MembershipRule, TableConstraint};
use crate::oracle::{self, OracleBudget};
use crate::par::Execution;
use crate::propagator::{Propagator, PropagatorConfig, PropagatorKind, RuleMode};
use crate::scheduler::SchedulerName;
use crate::search::{self, Mode, SearchConfig, Select, Split, SplitStrategy};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "rulecp", version, about = "Rule-based finite-domain constraint propagation and search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a problem file.
    Solve(SolveArgs),
    /// Generate, minimize or check membership rules of a table.
    #[command(subcommand)]
    Rules(RulesCommand),
    /// Compare schedulers and rule sets on a corpus; CSV on stdout.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct SolveArgs {
    file: PathBuf,
    #[arg(long, default_value = "ac")]
    propagator: PropagatorKind,
    #[arg(long, default_value = "finetuned")]
    scheduler: SchedulerName,
    #[arg(long, default_value = "all")]
    rules: RuleMode,
    #[arg(long, default_value = "enum")]
    split: Split,
    #[arg(long, default_value = "first")]
    select: Select,
    #[arg(long, env = "RULECP_SEED", default_value_t = 0)]
    seed: u64,
    /// Enumerate every solution instead of stopping at the first.
    #[arg(long)]
    all: bool,
    /// Print the root propagation as a derivation trace.
    #[arg(long)]
    trace: bool,
    /// Cross-check against brute-force enumeration.
    #[arg(long)]
    oracle: bool,
}

#[derive(Subcommand, Debug)]
enum RulesCommand {
    /// All minimal membership rules of a table file.
    Gen {
        table: PathBuf,
        /// Display-only propagation-rule notation.
        #[arg(long)]
        chr: bool,
        #[arg(long)]
        minimize: bool,
    },
    /// Drop redundant rules.
    Minimize {
        rules: PathBuf,
        #[arg(long)]
        table: PathBuf,
    },
    /// Report validity and minimality of every rule.
    Check {
        rules: PathBuf,
        #[arg(long)]
        table: PathBuf,
    },
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(required = true)]
    files: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "generic,compound,improved,finetuned")]
    schedulers: Vec<SchedulerName>,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
    seeds: Vec<u64>,
    #[arg(long, value_delimiter = ',', default_value = "all,minimized")]
    rules: Vec<RuleMode>,
    #[arg(long, default_value = "cd")]
    propagator: PropagatorKind,
    /// Exit 3 when a counter ordering is violated.
    #[arg(long)]
    assert: bool,
    #[arg(long)]
    sequential: bool,
}

/// Parses `args` (program name first) and runs the command, writing to the
/// given streams. Returns the process exit code.
pub fn run(args: impl IntoIterator<Item = impl Into<OsString> + Clone>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Solve(a) => solve(&a, out, err),
        Command::Rules(r) => rules(&r, out, err),
        Command::Bench(b) => run_bench(&b, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Search(#[from] search::SearchError),
    #[error(transparent)]
    Oracle(#[from] oracle::OracleError),
    #[error(transparent)]
    Membership(#[from] membership::MembershipError),
    #[error("write failed: {0}")]
    Write(#[from] std::io::Error),
}

fn solve(a: &SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let p = io::read_problem(&a.file)?;
    let prop = Propagator::build(&p, PropagatorConfig::new(a.propagator, a.scheduler).rules(a.rules));
    let cfg = SearchConfig {
        strategy: SplitStrategy {
            select: a.select,
            split: a.split,
        },
        mode: if a.all { Mode::All } else { Mode::First },
        seed: a.seed,
        execution: Execution::best(),
        trace: a.trace,
    };
    let outcome = search::solve(&p, &prop, &cfg)?;
    if let Some(t) = &outcome.trace {
        write!(out, "{}", t.render(&p))?;
    }
    for s in &outcome.solutions {
        writeln!(out, "{}", p.render_assignment(s))?;
    }
    writeln!(out, "{}", outcome.stats)?;
    if a.oracle {
        let expected = oracle::enumerate_solutions(&p, &OracleBudget::default())?;
        let found: BTreeSet<_> = outcome.solutions.iter().cloned().collect();
        let ok = if a.all {
            found == expected
        } else {
            found.is_subset(&expected) && found.is_empty() == expected.is_empty()
        };
        if !ok {
            writeln!(
                err,
                "oracle mismatch: search found {} solutions, enumeration {}",
                found.len(),
                expected.len()
            )?;
            return Ok(EXIT_VERIFY);
        }
        writeln!(err, "oracle: agrees ({} solutions)", expected.len())?;
    }
    Ok(EXIT_OK)
}

fn load_rules(rules: &Path, table: &Path) -> Result<(NamedTable, TableConstraint, Vec<MembershipRule>), CliError> {
    let t = io::read_table(table)?;
    let tc = TableConstraint::from_table(t.table.clone());
    let text = crate::io::read_file(rules)?;
    let parsed = io::parse_rules(&text, &t.names)?;
    Ok((t, tc, parsed))
}

fn table_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| "c".to_string(), |s| s.to_string_lossy().into_owned())
}

fn rules(cmd: &RulesCommand, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        RulesCommand::Gen { table, chr, minimize } => {
            let t = io::read_table(table)?;
            let tc = TableConstraint::from_table(t.table.clone());
            let mut rules = membership::generate_minimal_rules(&tc, &GenConfig::default())?;
            rules.sort();
            writeln!(err, "generated={}", rules.len())?;
            if *minimize {
                rules = membership::remove_redundant(&rules, &tc);
                writeln!(err, "after_redundancy={}", rules.len())?;
            }
            if *chr {
                let name = table_name(table);
                for r in &rules {
                    writeln!(out, "{}", io::render_chr(r, &t.names, &name))?;
                }
            } else {
                write!(out, "{}", io::write_rules(&rules, &t.names))?;
            }
            Ok(EXIT_OK)
        }
        RulesCommand::Minimize { rules, table } => {
            let (t, tc, parsed) = load_rules(rules, table)?;
            let kept = membership::remove_redundant(&parsed, &tc);
            write!(out, "{}", io::write_rules(&kept, &t.names))?;
            writeln!(err, "before={} after={}", parsed.len(), kept.len())?;
            Ok(EXIT_OK)
        }
        RulesCommand::Check { rules, table } => {
            let (t, tc, parsed) = load_rules(rules, table)?;
            let mut bad = 0;
            for r in &parsed {
                let verdict = if !membership::is_valid(r, &tc) {
                    "invalid"
                } else if !membership::is_minimal(r, &tc) {
                    "non-minimal"
                } else {
                    "ok"
                };
                if verdict != "ok" {
                    bad += 1;
                }
                let line = io::write_rules(std::slice::from_ref(r), &t.names);
                write!(out, "{verdict}: {line}")?;
            }
            writeln!(err, "checked={} failed={bad}", parsed.len())?;
            Ok(if bad == 0 { EXIT_OK } else { EXIT_VERIFY })
        }
    }
}

fn run_bench(a: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let mut problems = Vec::new();
    for f in &a.files {
        problems.push((table_name(f), io::read_problem(f)?));
    }
    for (name, p) in &problems {
        let prop = Propagator::build(p, PropagatorConfig::new(a.propagator, SchedulerName::FineTuned).rules(RuleMode::Minimized));
        for r in prop.reports() {
            writeln!(
                err,
                "rules problem={name} constraint={} generated={} single_conclusion={} minimal={} after_redundancy={}",
                r.constraint, r.generated, r.single_conclusion, r.minimal, r.after_redundancy
            )?;
        }
    }
    let plan = BenchPlan {
        problems,
        propagator: a.propagator,
        schedulers: a.schedulers.clone(),
        rules: a.rules.clone(),
        seeds: a.seeds.clone(),
        execution: if a.sequential { Execution::Sequential } else { Execution::best() },
    };
    let rows = bench::run(&plan)?;
    write!(out, "{}", bench::to_csv(&rows))?;
    write!(err, "{}", bench::ratio_report(&rows))?;
    let violations = bench::check_ordering(&rows);
    for v in &violations {
        writeln!(err, "ordering violated: {v}")?;
    }
    if a.assert && !violations.is_empty() {
        return Ok(EXIT_VERIFY);
    }
    Ok(EXIT_OK)
}
