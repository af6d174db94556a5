//! Fixpoint schedulers for sets of domain reduction rules.
//!
//! All four share one worklist loop and differ only in what they put back on
//! the worklist after a rule changed the domain tuple:
//!
//! - generic iteration: the functions not in the worklist that were at a
//!   fixpoint before the step and are not after it (computed by evaluating
//!   them, so expensive), or simply every function;
//! - compound iteration: every function whose scheme contains a modified
//!   component;
//! - improved iteration: as compound, minus the functions declared to commute
//!   with the one just applied (itself included when idempotent);
//! - fine-tuned: as improved, but woken through trigger components only, and
//!   stable rules that have fired are dropped for good.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::model::{Domain, DomainTuple};
use crate::rule::{RuleRef, TraceStep};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchedulerError {
    #[error("rule `{rule}` enlarged component {index}")]
    NotInflationary { rule: String, index: usize },
    #[error("rule `{rule}` was removed as stable but still changes the fixpoint")]
    StabilityViolation { rule: String },
    #[error("final tuple is not a fixpoint of rule `{rule}`")]
    NotClosed { rule: String },
}

/// How `choose g ∈ G` picks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Choose {
    #[default]
    Fifo,
    Lifo,
    Random(u64),
}

/// Which re-enqueue set generic iteration uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpdatePolicy {
    /// Exactly the functions of `F − G` with `f(d) = d` and `f(g(d)) ≠ g(d)`.
    /// Every check costs two evaluations, which are counted.
    Exhaustive,
    /// All of `F − G`.
    Everything,
}

/// Pairs of functions known to commute, and the idempotent ones.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CommutativityDeclaration {
    comm: Vec<BTreeSet<usize>>,
    idempotent: BTreeSet<usize>,
}

impl CommutativityDeclaration {
    /// No declared pairs among `n` functions.
    pub fn new(n: usize) -> Self {
        CommutativityDeclaration {
            comm: vec![BTreeSet::new(); n],
            idempotent: BTreeSet::new(),
        }
    }

    /// Declares the idempotent rules from their flags and no pairs.
    pub fn from_flags(rules: &[RuleRef]) -> Self {
        let mut c = Self::new(rules.len());
        for (i, r) in rules.iter().enumerate() {
            if r.flags().idempotent {
                c.mark_idempotent(i);
            }
        }
        c
    }

    /// Symmetric declaration.
    pub fn declare(&mut self, f: usize, g: usize) {
        self.comm[f].insert(g);
        self.comm[g].insert(f);
    }

    pub fn mark_idempotent(&mut self, f: usize) {
        self.idempotent.insert(f);
    }

    pub fn commutes(&self, f: usize, g: usize) -> bool {
        (f == g && self.idempotent.contains(&f)) || self.comm.get(f).is_some_and(|s| s.contains(&g))
    }

    pub fn is_idempotent(&self, f: usize) -> bool {
        self.idempotent.contains(&f)
    }

    /// Declared unordered pairs `(f, g)` with `f < g`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.comm
            .iter()
            .enumerate()
            .flat_map(|(f, s)| s.iter().filter(move |&&g| f < g).map(move |&g| (f, g)))
            .collect()
    }

    /// Shifts every index by `offset`, for concatenated rule sets.
    pub fn offset(&self, offset: usize, total: usize) -> Self {
        let mut out = Self::new(total);
        for (f, g) in self.pairs() {
            out.declare(f + offset, g + offset);
        }
        for &f in &self.idempotent {
            out.mark_idempotent(f + offset);
        }
        out
    }

    /// Union of two declarations over the same index space.
    pub fn merged(mut self, other: &Self) -> Self {
        for (f, g) in other.pairs() {
            self.declare(f, g);
        }
        self.idempotent.extend(other.idempotent.iter().copied());
        self
    }
}

/// Rules that need to fire at most once per derivation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StabilityDeclaration {
    stable: BTreeSet<usize>,
}

impl StabilityDeclaration {
    pub fn new(stable: impl IntoIterator<Item = usize>) -> Self {
        StabilityDeclaration {
            stable: stable.into_iter().collect(),
        }
    }

    pub fn from_flags(rules: &[RuleRef]) -> Self {
        Self::new(
            rules
                .iter()
                .enumerate()
                .filter(|(_, r)| r.flags().stable)
                .map(|(i, _)| i),
        )
    }

    pub fn is_stable(&self, f: usize) -> bool {
        self.stable.contains(&f)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Stats {
    /// Calls of a reduction function.
    pub evaluations: u64,
    /// Functions put back into the worklist after having left it.
    pub reenqueues: u64,
    /// Stable rules permanently dropped during the run.
    pub removals: u64,
}

impl std::ops::AddAssign for Stats {
    fn add_assign(&mut self, o: Stats) {
        self.evaluations += o.evaluations;
        self.reenqueues += o.reenqueues;
        self.removals += o.removals;
    }
}

/// Result of a scheduler run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixpoint {
    pub domains: DomainTuple,
    pub stats: Stats,
    /// Rules permanently out of play below this point: those that were
    /// inactive on entry plus the stable rules that fired.
    pub removed: BTreeSet<usize>,
    pub steps: Option<Vec<TraceStep>>,
}

#[derive(Clone, Copy, Debug)]
pub enum SchedulerKind<'a> {
    Generic(UpdatePolicy),
    Compound,
    Improved(&'a CommutativityDeclaration),
    FineTuned(&'a StabilityDeclaration, &'a CommutativityDeclaration),
}

impl SchedulerKind<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            SchedulerKind::Generic(UpdatePolicy::Exhaustive) => "generic",
            SchedulerKind::Generic(UpdatePolicy::Everything) => "generic-all",
            SchedulerKind::Compound => "compound",
            SchedulerKind::Improved(_) => "improved",
            SchedulerKind::FineTuned(..) => "finetuned",
        }
    }
}

/// A configured run over a fixed rule set `F`.
pub struct Scheduler<'a> {
    rules: &'a [RuleRef],
    kind: SchedulerKind<'a>,
    choose: Choose,
    trace: bool,
    validate: bool,
    inactive: Option<&'a BTreeSet<usize>>,
}

struct Worklist {
    queue: VecDeque<usize>,
    member: Vec<bool>,
    rng: Option<ChaCha8Rng>,
    lifo: bool,
}

impl Worklist {
    fn new(n: usize, choose: Choose) -> Self {
        Worklist {
            queue: VecDeque::with_capacity(n),
            member: vec![false; n],
            rng: match choose {
                Choose::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
                _ => None,
            },
            lifo: choose == Choose::Lifo,
        }
    }

    /// Returns whether `f` was newly added.
    fn insert(&mut self, f: usize) -> bool {
        if self.member[f] {
            return false;
        }
        self.member[f] = true;
        self.queue.push_back(f);
        true
    }

    fn contains(&self, f: usize) -> bool {
        self.member[f]
    }

    fn choose(&mut self) -> Option<usize> {
        let f = if let Some(rng) = self.rng.as_mut() {
            if self.queue.is_empty() {
                return None;
            }
            let i = rng.random_range(0..self.queue.len());
            self.queue.swap_remove_back(i)
        } else if self.lifo {
            self.queue.pop_back()
        } else {
            self.queue.pop_front()
        }?;
        self.member[f] = false;
        Some(f)
    }
}

impl<'a> Scheduler<'a> {
    pub fn new(rules: &'a [RuleRef], kind: SchedulerKind<'a>) -> Self {
        Scheduler {
            rules,
            kind,
            choose: Choose::Fifo,
            trace: false,
            validate: false,
            inactive: None,
        }
    }

    pub fn choose(mut self, choose: Choose) -> Self {
        self.choose = choose;
        self
    }

    /// Records every effective step.
    pub fn trace(mut self, on: bool) -> Self {
        self.trace = on;
        self
    }

    /// After the run, checks that the result is closed under every rule,
    /// including permanently removed ones.
    pub fn validate(mut self, on: bool) -> Self {
        self.validate = on;
        self
    }

    /// Rules to leave out entirely, e.g. stable rules an ancestor search
    /// node already fired.
    pub fn inactive(mut self, inactive: &'a BTreeSet<usize>) -> Self {
        self.inactive = Some(inactive);
        self
    }

    fn watchers(&self, by_triggers: bool, width: usize) -> Vec<Vec<usize>> {
        let mut w = vec![Vec::new(); width];
        for (f, r) in self.rules.iter().enumerate() {
            let idx = if by_triggers {
                r.triggers()
            } else {
                r.scheme().indices()
            };
            for &i in idx {
                if i < width {
                    w[i].push(f);
                }
            }
        }
        w
    }

    fn eval(&self, f: usize, d: &DomainTuple, stats: &mut Stats) -> Result<Vec<(usize, Domain)>, SchedulerError> {
        stats.evaluations += 1;
        let changes = self.rules[f].narrow(d);
        for (i, dom) in &changes {
            if !dom.is_subset(d.get(*i)) {
                return Err(SchedulerError::NotInflationary {
                    rule: self.rules[f].id().to_string(),
                    index: *i,
                });
            }
        }
        Ok(changes)
    }

    pub fn run(&self, start: DomainTuple) -> Result<Fixpoint, SchedulerError> {
        let n = self.rules.len();
        let empty = BTreeSet::new();
        let inactive = self.inactive.unwrap_or(&empty);
        let mut removed: BTreeSet<usize> = inactive.clone();
        let mut stats = Stats::default();
        let mut steps = self.trace.then(Vec::new);
        let mut d = start;

        let by_triggers = matches!(self.kind, SchedulerKind::FineTuned(..));
        let watchers = match self.kind {
            SchedulerKind::Generic(_) => Vec::new(),
            _ => self.watchers(by_triggers, d.len()),
        };

        let mut g_set = Worklist::new(n, self.choose);
        for f in 0..n {
            if !removed.contains(&f) {
                g_set.insert(f);
            }
        }

        while let Some(g) = g_set.choose() {
            let changes = self.eval(g, &d, &mut stats)?;
            if changes.is_empty() {
                if let SchedulerKind::FineTuned(stable, _) = self.kind {
                    if stable.is_stable(g) && self.rules[g].has_fired(&d) {
                        removed.insert(g);
                        stats.removals += 1;
                    }
                }
                continue;
            }

            let mut next = d.clone();
            for (i, dom) in &changes {
                next.set(*i, dom.clone());
            }
            if let Some(steps) = steps.as_mut() {
                let idx = self.rules[g].scheme().indices();
                steps.push(TraceStep {
                    rule_id: self.rules[g].id().to_string(),
                    scheme: idx.to_vec(),
                    before: d.project(idx),
                    after: next.project(idx),
                });
            }

            // g has left G. Every function put (back) into G counts as a
            // re-enqueue, g included.
            let mut add: Vec<usize> = Vec::new();
            match self.kind {
                SchedulerKind::Generic(policy) => {
                    for f in 0..n {
                        if g_set.contains(f) || removed.contains(&f) {
                            continue;
                        }
                        match policy {
                            UpdatePolicy::Everything => add.push(f),
                            UpdatePolicy::Exhaustive if f == g => {
                                if !self.eval(g, &next, &mut stats)?.is_empty() {
                                    add.push(g);
                                }
                            }
                            UpdatePolicy::Exhaustive => {
                                let was_fixed = self.eval(f, &d, &mut stats)?.is_empty();
                                let now_fixed = self.eval(f, &next, &mut stats)?.is_empty();
                                if was_fixed && !now_fixed {
                                    add.push(f);
                                }
                            }
                        }
                    }
                }
                SchedulerKind::Compound => {
                    add.extend(changes.iter().flat_map(|(i, _)| watchers[*i].iter().copied()));
                }
                SchedulerKind::Improved(comm) => {
                    add.extend(
                        changes
                            .iter()
                            .flat_map(|(i, _)| watchers[*i].iter().copied())
                            .filter(|&f| !comm.commutes(g, f)),
                    );
                }
                SchedulerKind::FineTuned(stable, comm) => {
                    if stable.is_stable(g) && self.rules[g].has_fired(&next) {
                        removed.insert(g);
                        stats.removals += 1;
                    } else if !comm.is_idempotent(g) {
                        // Triggers need not cover what g itself changed.
                        add.push(g);
                    }
                    add.extend(
                        changes
                            .iter()
                            .flat_map(|(i, _)| watchers[*i].iter().copied())
                            .filter(|&f| !comm.commutes(g, f) && !removed.contains(&f)),
                    );
                }
            }
            for f in add {
                if g_set.insert(f) {
                    stats.reenqueues += 1;
                }
            }
            d = next;
        }

        if self.validate {
            for (f, r) in self.rules.iter().enumerate() {
                if !r.narrow(&d).is_empty() {
                    let rule = r.id().to_string();
                    return Err(if removed.contains(&f) && !inactive.contains(&f) {
                        SchedulerError::StabilityViolation { rule }
                    } else {
                        SchedulerError::NotClosed { rule }
                    });
                }
            }
        }

        Ok(Fixpoint {
            domains: d,
            stats,
            removed,
            steps,
        })
    }
}

/// Generic iteration from `start` with the given update policy.
pub fn generic_iteration(
    rules: &[RuleRef],
    start: DomainTuple,
    update: UpdatePolicy,
    choose: Choose,
) -> Result<Fixpoint, SchedulerError> {
    Scheduler::new(rules, SchedulerKind::Generic(update))
        .choose(choose)
        .run(start)
}

/// Generic iteration for compound domains: wake the functions whose scheme
/// contains a modified component.
pub fn compound_iteration(rules: &[RuleRef], start: DomainTuple, choose: Choose) -> Result<Fixpoint, SchedulerError> {
    Scheduler::new(rules, SchedulerKind::Compound)
        .choose(choose)
        .run(start)
}

/// Compound iteration that skips functions commuting with the one applied.
pub fn improved_iteration(
    rules: &[RuleRef],
    start: DomainTuple,
    comm: &CommutativityDeclaration,
    choose: Choose,
) -> Result<Fixpoint, SchedulerError> {
    Scheduler::new(rules, SchedulerKind::Improved(comm))
        .choose(choose)
        .run(start)
}

/// The fine-tuned scheduler: trigger-based wakeups, idempotence, and
/// permanent removal of fired stable rules (reported in `removed`).
pub fn stability_scheduler(
    rules: &[RuleRef],
    start: DomainTuple,
    stable: &StabilityDeclaration,
    choose: Choose,
) -> Result<Fixpoint, SchedulerError> {
    let comm = CommutativityDeclaration::from_flags(rules);
    Scheduler::new(rules, SchedulerKind::FineTuned(stable, &comm))
        .choose(choose)
        .run(start)
}

/// The schedulers selectable from the command line and the bench.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchedulerName {
    /// Generic iteration with the exhaustive update set.
    Generic,
    Compound,
    Improved,
    FineTuned,
}

impl SchedulerName {
    pub const ALL: [SchedulerName; 4] = [
        SchedulerName::Generic,
        SchedulerName::Compound,
        SchedulerName::Improved,
        SchedulerName::FineTuned,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchedulerName::Generic => "generic",
            SchedulerName::Compound => "compound",
            SchedulerName::Improved => "improved",
            SchedulerName::FineTuned => "finetuned",
        }
    }
}

impl fmt::Display for SchedulerName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SchedulerName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| format!("unknown scheduler `{s}` (expected generic, compound, improved or finetuned)"))
    }
}

/// A rule set with its declarations, ready for any scheduler.
#[derive(Clone, Debug, Default)]
pub struct RuleSet {
    pub rules: Vec<RuleRef>,
    pub comm: CommutativityDeclaration,
    pub stable: StabilityDeclaration,
}

impl RuleSet {
    /// Idempotence and stability taken from the rule flags; no pairs.
    pub fn from_rules(rules: Vec<RuleRef>) -> Self {
        RuleSet {
            comm: CommutativityDeclaration::from_flags(&rules),
            stable: StabilityDeclaration::from_flags(&rules),
            rules,
        }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Appends `other`, keeping its declarations.
    pub fn extend(&mut self, other: RuleSet) {
        let offset = self.rules.len();
        let total = offset + other.rules.len();
        let mut comm = self.comm.offset(0, total);
        comm = comm.merged(&other.comm.offset(offset, total));
        self.comm = comm;
        self.stable
            .stable
            .extend(other.stable.stable.iter().map(|&i| i + offset));
        self.rules.extend(other.rules);
    }

    /// Runs the named scheduler. `inactive` is only honoured by the
    /// fine-tuned one.
    pub fn run(
        &self,
        name: SchedulerName,
        start: DomainTuple,
        choose: Choose,
        inactive: Option<&BTreeSet<usize>>,
        trace: bool,
    ) -> Result<Fixpoint, SchedulerError> {
        let kind = match name {
            SchedulerName::Generic => SchedulerKind::Generic(UpdatePolicy::Exhaustive),
            SchedulerName::Compound => SchedulerKind::Compound,
            SchedulerName::Improved => SchedulerKind::Improved(&self.comm),
            SchedulerName::FineTuned => SchedulerKind::FineTuned(&self.stable, &self.comm),
        };
        let mut s = Scheduler::new(&self.rules, kind).choose(choose).trace(trace);
        if let (SchedulerName::FineTuned, Some(inactive)) = (name, inactive) {
            s = s.inactive(inactive);
        }
        s.run(start)
    }
}

/// Short stable digest of a domain tuple.
pub fn fixpoint_hash(d: &DomainTuple) -> String {
    let digest = Sha256::digest(d.to_string().as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// `scheduler=<name> evaluations=<n> reenqueues=<n> removed=<n> fixpoint_hash=<hex>`
pub struct StatsRecord<'a> {
    pub scheduler: &'a str,
    pub fixpoint: &'a Fixpoint,
}

impl fmt::Display for StatsRecord<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = &self.fixpoint.stats;
        write!(
            f,
            "scheduler={} evaluations={} reenqueues={} removed={} fixpoint_hash={}",
            self.scheduler,
            s.evaluations,
            s.reenqueues,
            self.fixpoint.removed.len(),
            fixpoint_hash(&self.fixpoint.domains)
        )
    }
}
