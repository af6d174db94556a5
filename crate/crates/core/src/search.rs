//! Depth-first search alternating propagation (even levels) with domain
//! splitting (odd levels).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{Assignment, Csp, Domain, DomainTuple};
use crate::par::{self, Execution};
use crate::propagator::Propagator;
use crate::rule::{DerivationTrace, SplittingRule};
use crate::scheduler::{SchedulerError, SchedulerName};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Select {
    /// First variable with at least two values.
    #[default]
    First,
    /// A variable with the fewest values (at least two), first on ties.
    Smallest,
    /// Uniformly among the variables with at least two values; also shuffles
    /// the children.
    Random,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Split {
    /// Two children: lower and upper half of the ordered domain.
    #[default]
    Bisect,
    /// One child per value.
    Enum,
}

macro_rules! str_enum {
    ($t:ty, $what:literal, $($v:path => $s:literal),+) => {
        impl $t {
            pub fn as_str(self) -> &'static str {
                match self { $($v => $s),+ }
            }
        }

        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $t {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($s => Ok($v),)+
                    _ => Err(format!(concat!("unknown ", $what, " `{}`"), s)),
                }
            }
        }
    };
}

str_enum!(Select, "variable selection", Select::First => "first", Select::Smallest => "smallest", Select::Random => "random");
str_enum!(Split, "split", Split::Bisect => "bisect", Split::Enum => "enum");

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct SplitStrategy {
    pub select: Select,
    pub split: Split,
}

impl SplitStrategy {
    pub fn all() -> Vec<SplitStrategy> {
        let mut out = Vec::new();
        for select in [Select::First, Select::Smallest, Select::Random] {
            for split in [Split::Bisect, Split::Enum] {
                out.push(SplitStrategy { select, split });
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Mode {
    #[default]
    First,
    All,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchConfig {
    pub strategy: SplitStrategy,
    pub mode: Mode,
    pub seed: u64,
    /// Only used with `Mode::All`.
    pub execution: Execution,
    /// Record the root propagation as a derivation trace.
    pub trace: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct SearchStats {
    pub nodes: u64,
    pub evaluations: u64,
    pub reenqueues: u64,
    pub solutions: u64,
    /// Sum over nodes of the stable rules inherited as already removed.
    pub reused_removals: u64,
}

impl std::ops::AddAssign for SearchStats {
    fn add_assign(&mut self, o: SearchStats) {
        self.nodes += o.nodes;
        self.evaluations += o.evaluations;
        self.reenqueues += o.reenqueues;
        self.solutions += o.solutions;
        self.reused_removals += o.reused_removals;
    }
}

impl fmt::Display for SearchStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "nodes={} evals={} solutions={}", self.nodes, self.evaluations, self.solutions)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    /// In depth-first, left-to-right order.
    pub solutions: Vec<Assignment>,
    pub stats: SearchStats,
    pub trace: Option<DerivationTrace>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error(transparent)]
    Scheduler(#[from] SchedulerError),
}

/// Child seeds are a hash of the parent seed and the child index, so that
/// subtrees do not depend on the traversal order.
fn child_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Picks the variable to split, if any domain has two or more values.
pub fn select_variable(d: &DomainTuple, select: Select, rng: &mut impl Rng) -> Option<usize> {
    let open: Vec<usize> = (0..d.len()).filter(|&i| d.get(i).len() >= 2).collect();
    match select {
        Select::First => open.first().copied(),
        Select::Smallest => open.iter().copied().min_by_key(|&i| d.get(i).len()),
        Select::Random => {
            if open.is_empty() {
                None
            } else {
                Some(open[rng.random_range(0..open.len())])
            }
        }
    }
}

/// The parts of `dom` the children get, in visiting order.
pub fn split_domain(dom: &Domain, split: Split, shuffle: bool, rng: &mut impl Rng) -> Vec<Domain> {
    let mut parts = match split {
        Split::Bisect => {
            let (lo, hi) = dom.bisect();
            vec![lo, hi]
        }
        Split::Enum => dom.iter().map(|v| std::iter::once(v.clone()).collect()).collect(),
    };
    if shuffle {
        parts.shuffle(rng);
    }
    parts
}

/// Domain splitting as a splitting rule on a fixed variable.
#[derive(Clone, Copy, Debug)]
pub struct DomainSplit {
    pub var: usize,
    pub split: Split,
}

impl SplittingRule for DomainSplit {
    fn id(&self) -> &str {
        match self.split {
            Split::Bisect => "bisect",
            Split::Enum => "enum",
        }
    }

    fn split(&self, p: &Csp) -> Vec<Csp> {
        let d = p.domains();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        split_domain(d.get(self.var), self.split, false, &mut rng)
            .into_iter()
            .map(|part| {
                let mut child = d.clone();
                child.set(self.var, part);
                p.with_domains(&child).expect("same width")
            })
            .collect()
    }
}

/// Stabilizing derivation of the propagator's rules from the CSP's domains.
pub fn propagate(p: &Csp, prop: &Propagator) -> Result<Csp, SearchError> {
    let fix = prop.run(p.domains(), None, false)?;
    Ok(p.restrict_constraints(&fix.domains).expect("reductions shrink domains"))
}

struct Search<'a> {
    csp: &'a Csp,
    prop: &'a Propagator,
    cfg: SearchConfig,
    reuse: bool,
}

#[derive(Default)]
struct Acc {
    solutions: Vec<Assignment>,
    stats: SearchStats,
}

/// Below this depth, all-solutions search hands children to the pool.
const PARALLEL_DEPTH: usize = 3;

impl Search<'_> {
    /// Returns true when the search should stop (first solution found).
    fn node(&self, d: DomainTuple, inactive: &BTreeSet<usize>, seed: u64, depth: usize, acc: &mut Acc) -> Result<bool, SearchError> {
        acc.stats.nodes += 1;
        acc.stats.reused_removals += inactive.len() as u64;
        let fix = self.prop.run(d, Some(inactive), false)?;
        acc.stats.evaluations += fix.stats.evaluations;
        acc.stats.reenqueues += fix.stats.reenqueues;
        let d = fix.domains;
        if self.csp.is_failed_at(&d) {
            return Ok(false);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let Some(var) = select_variable(&d, self.cfg.strategy.select, &mut rng) else {
            let a = Csp::induced_assignment(&d).expect("all singletons");
            acc.solutions.push(a);
            acc.stats.solutions += 1;
            return Ok(self.cfg.mode == Mode::First);
        };
        let shuffle = self.cfg.strategy.select == Select::Random;
        let parts = split_domain(d.get(var), self.cfg.strategy.split, shuffle, &mut rng);
        let removed = if self.reuse { fix.removed } else { BTreeSet::new() };
        let children: Vec<(usize, DomainTuple)> = parts
            .into_iter()
            .enumerate()
            .map(|(k, part)| {
                let mut child = d.clone();
                child.set(var, part);
                (k, child)
            })
            .collect();

        if self.cfg.mode == Mode::All && self.cfg.execution.is_parallel() && depth < PARALLEL_DEPTH {
            let results = par::map(Execution::Parallel, children, |(k, child)| {
                let mut sub = Acc::default();
                self.node(child, &removed, child_seed(seed, k), depth + 1, &mut sub).map(|_| sub)
            });
            for r in results {
                let sub = r?;
                acc.solutions.extend(sub.solutions);
                acc.stats += sub.stats;
            }
            return Ok(false);
        }
        for (k, child) in children {
            if self.node(child, &removed, child_seed(seed, k), depth + 1, acc)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Propagate-then-split search. With `Mode::All` the solutions are exactly
/// those of `p`.
pub fn solve(p: &Csp, prop: &Propagator, cfg: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    let trace = if cfg.trace {
        let fix = prop.run(p.domains(), None, true)?;
        let steps = fix.steps.unwrap_or_default();
        Some(DerivationTrace::classify(p, &p.domains(), steps, true))
    } else {
        None
    };
    let search = Search {
        csp: p,
        prop,
        cfg: *cfg,
        reuse: prop.config().scheduler == SchedulerName::FineTuned,
    };
    let mut acc = Acc::default();
    search.node(p.domains(), &BTreeSet::new(), cfg.seed, 0, &mut acc)?;
    Ok(SearchOutcome {
        solutions: acc.solutions,
        stats: acc.stats,
        trace,
    })
}
