//! Scheduler benchmark: all-solutions search over a corpus with every
//! scheduler, rule mode and seed, reported as CSV. Only the counters are
//! compared; wall time is informational.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use crate::model::Csp;
use crate::par::{self, Execution};
use crate::propagator::{Propagator, PropagatorConfig, PropagatorKind, RuleMode};
use crate::scheduler::SchedulerName;
use crate::search::{solve, Mode, SearchConfig, SearchError, Select, Split, SplitStrategy};

pub const CSV_HEADER: &str = "problem,scheduler,rules,seed,evaluations,reenqueues,nodes,solutions,ms";

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub problem: String,
    pub scheduler: SchedulerName,
    pub rules: RuleMode,
    pub seed: u64,
    pub evaluations: u64,
    pub reenqueues: u64,
    pub nodes: u64,
    pub solutions: u64,
    pub ms: f64,
}

impl BenchRow {
    fn key(&self) -> (&str, usize, usize, u64) {
        let s = SchedulerName::ALL.iter().position(|&n| n == self.scheduler).unwrap_or(0);
        let r = matches!(self.rules, RuleMode::Minimized) as usize;
        (&self.problem, s, r, self.seed)
    }

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{:.3}",
            self.problem,
            self.scheduler,
            self.rules.as_str(),
            self.seed,
            self.evaluations,
            self.reenqueues,
            self.nodes,
            self.solutions,
            self.ms
        )
    }
}

#[derive(Clone, Debug)]
pub struct BenchPlan {
    pub problems: Vec<(String, Csp)>,
    pub propagator: PropagatorKind,
    pub schedulers: Vec<SchedulerName>,
    pub rules: Vec<RuleMode>,
    pub seeds: Vec<u64>,
    pub execution: Execution,
}

/// One all-solutions run with random variable selection and a seeded random
/// value order.
pub fn run_one(p: &Csp, prop: &Propagator, seed: u64) -> Result<(crate::search::SearchStats, f64), SearchError> {
    let cfg = SearchConfig {
        strategy: SplitStrategy {
            select: Select::Random,
            split: Split::Enum,
        },
        mode: Mode::All,
        seed,
        execution: Execution::Sequential,
        trace: false,
    };
    let start = Instant::now();
    let out = solve(p, prop, &cfg)?;
    Ok((out.stats, start.elapsed().as_secs_f64() * 1000.0))
}

/// Runs every combination, in parallel over problems and configurations.
/// Rows come back sorted by problem, scheduler, rule mode and seed.
pub fn run(plan: &BenchPlan) -> Result<Vec<BenchRow>, SearchError> {
    let mut jobs = Vec::new();
    for (name, p) in &plan.problems {
        for &scheduler in &plan.schedulers {
            for &rules in &plan.rules {
                jobs.push((name.clone(), p, scheduler, rules));
            }
        }
    }
    let seeds = plan.seeds.clone();
    let kind = plan.propagator;
    let results = par::map(plan.execution, jobs, move |(name, p, scheduler, rules)| {
        let prop = Propagator::build(p, PropagatorConfig::new(kind, scheduler).rules(rules));
        seeds
            .iter()
            .map(|&seed| {
                let (stats, ms) = run_one(p, &prop, seed)?;
                Ok(BenchRow {
                    problem: name.clone(),
                    scheduler,
                    rules,
                    seed,
                    evaluations: stats.evaluations,
                    reenqueues: stats.reenqueues,
                    nodes: stats.nodes,
                    solutions: stats.solutions,
                    ms,
                })
            })
            .collect::<Result<Vec<_>, SearchError>>()
    });
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    rows.sort_by(|a, b| a.key().cmp(&b.key()));
    Ok(rows)
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv());
        out.push('\n');
    }
    out
}

/// A broken counter ordering between two otherwise identical runs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub problem: String,
    pub seed: u64,
    pub what: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} seed={}: {}", self.problem, self.seed, self.what)
    }
}

fn index(rows: &[BenchRow]) -> BTreeMap<(&str, SchedulerName, RuleMode, u64), u64> {
    rows.iter()
        .map(|r| ((r.problem.as_str(), r.scheduler, r.rules, r.seed), r.evaluations))
        .collect()
}

/// Checks `finetuned <= compound <= generic` evaluations for every problem,
/// rule mode and seed, and `minimized <= all` for every scheduler. Pairs
/// missing from the report are skipped.
pub fn check_ordering(rows: &[BenchRow]) -> Vec<Violation> {
    let idx = index(rows);
    let mut out = Vec::new();
    let chain = [SchedulerName::FineTuned, SchedulerName::Compound, SchedulerName::Generic];
    for (&(problem, scheduler, rules, seed), &evals) in &idx {
        let pos = chain.iter().position(|&s| s == scheduler);
        if let Some(next) = pos.and_then(|k| chain.get(k + 1)) {
            if let Some(&other) = idx.get(&(problem, *next, rules, seed)) {
                if evals > other {
                    out.push(Violation {
                        problem: problem.to_string(),
                        seed,
                        what: format!(
                            "evaluations({scheduler}, {}) = {evals} > evaluations({next}, {}) = {other}",
                            rules.as_str(),
                            rules.as_str()
                        ),
                    });
                }
            }
        }
        if rules == RuleMode::Minimized {
            if let Some(&all) = idx.get(&(problem, scheduler, RuleMode::All, seed)) {
                if evals > all {
                    out.push(Violation {
                        problem: problem.to_string(),
                        seed,
                        what: format!("evaluations({scheduler}, minimized) = {evals} > evaluations({scheduler}, all) = {all}"),
                    });
                }
            }
        }
    }
    out
}

/// Per problem and scheduler: total evaluations with all rules divided by
/// the total with minimized rules, plus generic over fine-tuned.
pub fn ratio_report(rows: &[BenchRow]) -> String {
    let mut sums: BTreeMap<(&str, SchedulerName, RuleMode), u64> = BTreeMap::new();
    for r in rows {
        *sums.entry((&r.problem, r.scheduler, r.rules)).or_default() += r.evaluations;
    }
    let mut out = String::new();
    let problems: std::collections::BTreeSet<&str> = rows.iter().map(|r| r.problem.as_str()).collect();
    for p in problems {
        for s in SchedulerName::ALL {
            let all = sums.get(&(p, s, RuleMode::All));
            let min = sums.get(&(p, s, RuleMode::Minimized));
            if let (Some(&a), Some(&m)) = (all, min) {
                let _ = writeln!(out, "ratio {p} {s} all/minimized = {:.2}", a as f64 / m.max(1) as f64);
            }
        }
        for mode in [RuleMode::All, RuleMode::Minimized] {
            let g = sums.get(&(p, SchedulerName::Generic, mode));
            let f = sums.get(&(p, SchedulerName::FineTuned, mode));
            if let (Some(&g), Some(&f)) = (g, f) {
                let _ = writeln!(out, "ratio {p} {} generic/finetuned = {:.2}", mode.as_str(), g as f64 / f.max(1) as f64);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::and3;

    fn plan(schedulers: Vec<SchedulerName>, seeds: Vec<u64>) -> BenchPlan {
        BenchPlan {
            problems: vec![("and3".into(), and3())],
            propagator: PropagatorKind::Membership,
            schedulers,
            rules: vec![RuleMode::All, RuleMode::Minimized],
            seeds,
            execution: Execution::best(),
        }
    }

    #[test]
    fn one_row_per_combination_sorted() {
        let rows = run(&plan(vec![SchedulerName::FineTuned, SchedulerName::Generic], vec![2, 1])).unwrap();
        assert_eq!(rows.len(), 8);
        assert_eq!(rows[0].scheduler, SchedulerName::Generic);
        assert_eq!(rows[0].seed, 1);
        assert!(rows.iter().all(|r| r.solutions == 9));
    }

    #[test]
    fn single_run_single_row() {
        let mut p = plan(vec![SchedulerName::Compound], vec![7]);
        p.rules = vec![RuleMode::All];
        let rows = run(&p).unwrap();
        assert_eq!(to_csv(&rows).lines().count(), 2);
    }

    #[test]
    fn ordering_holds_on_and3() {
        let rows = run(&plan(SchedulerName::ALL.to_vec(), vec![0, 1, 2])).unwrap();
        assert!(check_ordering(&rows).is_empty(), "{:?}", check_ordering(&rows));
        assert!(ratio_report(&rows).contains("all/minimized"));
    }

    #[test]
    fn violation_is_reported() {
        let mut rows = run(&plan(vec![SchedulerName::FineTuned, SchedulerName::Compound], vec![0])).unwrap();
        for r in rows.iter_mut().filter(|r| r.scheduler == SchedulerName::FineTuned) {
            r.evaluations += 1_000_000;
        }
        assert!(!check_ordering(&rows).is_empty());
    }
}
