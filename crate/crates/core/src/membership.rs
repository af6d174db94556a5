//! Membership rules `y1 ∈ S1, …, yk ∈ Sk → z1 ≠ a1, …, zm ≠ am` for
//! extensional constraints: validity, minimality, generation of all minimal
//! rules, redundancy removal, and propagation rules that add constraints.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::model::{Builtin, Constraint, Csp, Domain, DomainTuple, Relation, Table, Value, VarId};
use crate::par::{self, Execution};
use crate::rule::{ReductionRule, RuleFlags, RuleRef, Scheme};
use crate::scheduler::RuleSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MembershipError {
    #[error("variable {0} occurs twice in a premise")]
    RepeatedPremiseVariable(VarId),
    #[error("premise range of {0} is empty")]
    EmptyRange(VarId),
    #[error("conclusion {0} != {1} listed twice")]
    DuplicateConclusion(VarId, Value),
    #[error("rule mentions {0}, which is outside the constraint scope")]
    OutsideScope(VarId),
    #[error(
        "rule generation refused: arity {arity} and {universe} values per variable, \
         limits are arity <= {max_arity} and <= {max_universe} values"
    )]
    TooLarge {
        arity: usize,
        universe: usize,
        max_arity: usize,
        max_universe: usize,
    },
    #[error("constraint {0} is not extensional")]
    NotTable(usize),
    #[error("scope, table and universe disagree on the arity")]
    ShapeMismatch,
}

/// A membership rule in canonical form: premise atoms sorted by variable,
/// conclusions sorted by variable then value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MembershipRule {
    premise: Vec<(VarId, Domain)>,
    conclusion: Vec<(VarId, Value)>,
}

impl MembershipRule {
    pub fn new(mut premise: Vec<(VarId, Domain)>, mut conclusion: Vec<(VarId, Value)>) -> Result<Self, MembershipError> {
        premise.sort();
        conclusion.sort();
        if let Some(w) = premise.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(MembershipError::RepeatedPremiseVariable(w[0].0));
        }
        if let Some((v, _)) = premise.iter().find(|(_, s)| s.is_empty()) {
            return Err(MembershipError::EmptyRange(*v));
        }
        if let Some(w) = conclusion.windows(2).find(|w| w[0] == w[1]) {
            return Err(MembershipError::DuplicateConclusion(w[0].0, w[0].1.clone()));
        }
        Ok(MembershipRule { premise, conclusion })
    }

    pub fn premise(&self) -> &[(VarId, Domain)] {
        &self.premise
    }

    pub fn conclusion(&self) -> &[(VarId, Value)] {
        &self.conclusion
    }

    /// Sum of the premise range sizes.
    pub fn premise_size(&self) -> usize {
        self.premise.iter().map(|(_, s)| s.len()).sum()
    }

    /// Renames variables through `map`, restoring canonical order.
    pub fn relabel(&self, map: &dyn Fn(VarId) -> VarId) -> Self {
        MembershipRule::new(
            self.premise.iter().map(|(v, s)| (map(*v), s.clone())).collect(),
            self.conclusion.iter().map(|(v, a)| (map(*v), a.clone())).collect(),
        )
        .expect("relabelling is injective")
    }

    fn single_conclusions(&self) -> impl Iterator<Item = MembershipRule> + '_ {
        self.conclusion.iter().map(|c| MembershipRule {
            premise: self.premise.clone(),
            conclusion: vec![c.clone()],
        })
    }
}

impl fmt::Display for MembershipRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self.premise.iter().map(|(v, s)| format!("{v} in {s}")).collect();
        let c: Vec<String> = self.conclusion.iter().map(|(v, a)| format!("{v} != {a}")).collect();
        write!(f, "{} -> {}", p.join(", "), c.join(", "))
    }
}

/// An extensional constraint together with the value universe of each scope
/// variable, which is what "expanding a range" refers to.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TableConstraint {
    scope: Vec<VarId>,
    table: Table,
    universe: Vec<Domain>,
}

impl TableConstraint {
    pub fn new(scope: Vec<VarId>, table: Table, universe: Vec<Domain>) -> Result<Self, MembershipError> {
        if scope.len() != table.arity() || universe.len() != scope.len() {
            return Err(MembershipError::ShapeMismatch);
        }
        Ok(TableConstraint { scope, table, universe })
    }

    /// Constraint `ci` of `p`, with the CSP's domains as universe.
    pub fn from_csp(p: &Csp, ci: usize) -> Result<Self, MembershipError> {
        let c = &p.constraints()[ci];
        let table = c.as_table().ok_or(MembershipError::NotTable(ci))?.clone();
        let universe = c.scope().iter().map(|&v| p.domain(v).clone()).collect();
        Self::new(c.scope().to_vec(), table, universe)
    }

    /// A table on its own: variables `0..arity`, every variable ranging over
    /// all values that occur anywhere in the table.
    pub fn from_table(table: Table) -> Self {
        let values = table.values();
        TableConstraint {
            scope: (0..table.arity()).map(VarId).collect(),
            universe: vec![values; table.arity()],
            table,
        }
    }

    pub fn arity(&self) -> usize {
        self.scope.len()
    }

    pub fn scope(&self) -> &[VarId] {
        &self.scope
    }

    pub fn table(&self) -> &Table {
        &self.table
    }

    pub fn universe(&self) -> &[Domain] {
        &self.universe
    }

    fn position(&self, v: VarId) -> Option<usize> {
        self.scope.iter().position(|&s| s == v)
    }

    /// Domain tuple wide enough for every scope variable, the universe at
    /// scope positions and empty elsewhere.
    pub fn full_tuple(&self) -> DomainTuple {
        let width = self.scope.iter().map(|v| v.0 + 1).max().unwrap_or(0);
        let mut d = vec![Domain::empty(); width];
        for (v, u) in self.scope.iter().zip(&self.universe) {
            d[v.0] = u.clone();
        }
        DomainTuple::new(d)
    }

    fn check_vars(&self, r: &MembershipRule) -> Result<(), MembershipError> {
        let vars = r.premise.iter().map(|(v, _)| *v).chain(r.conclusion.iter().map(|(v, _)| *v));
        for v in vars {
            if self.position(v).is_none() {
                return Err(MembershipError::OutsideScope(v));
            }
        }
        Ok(())
    }
}

/// Every premise domain is a subset of its range. An empty domain counts as a
/// subset, which keeps application monotonic.
pub fn rule_applies(r: &MembershipRule, d: &DomainTuple) -> bool {
    r.premise.iter().all(|(v, s)| d.get(v.0).is_subset(s))
}

/// Removes every conclusion value. Call only when the rule applies.
pub fn apply_membership(r: &MembershipRule, d: &DomainTuple) -> DomainTuple {
    let mut out = d.clone();
    for (z, a) in &r.conclusion {
        out.get_mut(z.0).remove(a);
    }
    out
}

fn premise_matches(r: &MembershipRule, tc: &TableConstraint, t: &[Value]) -> bool {
    r.premise.iter().all(|(v, s)| tc.position(*v).is_some_and(|i| s.contains(&t[i])))
}

/// No tuple satisfies the premise while taking a forbidden value.
pub fn is_valid(r: &MembershipRule, tc: &TableConstraint) -> bool {
    if tc.check_vars(r).is_err() {
        return false;
    }
    tc.table.iter().all(|t| {
        !premise_matches(r, tc, t)
            || r.conclusion
                .iter()
                .all(|(z, a)| tc.position(*z).is_some_and(|i| &t[i] != a))
    })
}

/// Valid, and dropping any premise atom or adding any universe value to a
/// range makes it invalid.
pub fn is_minimal(r: &MembershipRule, tc: &TableConstraint) -> bool {
    if !is_valid(r, tc) {
        return false;
    }
    for (k, (v, s)) in r.premise.iter().enumerate() {
        let mut dropped = r.clone();
        dropped.premise.remove(k);
        if is_valid(&dropped, tc) {
            return false;
        }
        let i = tc.position(*v).expect("checked by is_valid");
        for extra in tc.universe[i].iter().filter(|x| !s.contains(x)) {
            let mut wider = r.clone();
            wider.premise[k].1.insert(extra.clone());
            if is_valid(&wider, tc) {
                return false;
            }
        }
    }
    true
}

/// Some tuple of the relation satisfies the premise.
pub fn premise_consistent(r: &MembershipRule, tc: &TableConstraint) -> bool {
    tc.table.iter().any(|t| premise_matches(r, tc, t))
}

type Premise = Vec<(VarId, Domain)>;

/// Joins rules with identical premises into one multi-conclusion rule.
pub fn merge_by_premise(rules: impl IntoIterator<Item = MembershipRule>) -> Vec<MembershipRule> {
    let mut by_premise: BTreeMap<Premise, BTreeSet<(VarId, Value)>> = BTreeMap::new();
    for r in rules {
        by_premise.entry(r.premise).or_default().extend(r.conclusion);
    }
    let mut out: Vec<MembershipRule> = by_premise
        .into_iter()
        .map(|(premise, conclusion)| MembershipRule {
            premise,
            conclusion: conclusion.into_iter().collect(),
        })
        .collect();
    out.sort();
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenConfig {
    pub max_arity: usize,
    pub max_universe: usize,
    pub execution: Execution,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_arity: 4,
            max_universe: 12,
            execution: Execution::best(),
        }
    }
}

/// Maximal boxes over `universe` that contain none of `bad`, every range
/// non-empty. Branches on a bad point inside the current box by deleting one
/// of its coordinates from one range.
fn maximal_empty_boxes(universe: &[Domain], bad: &[Vec<Value>]) -> Vec<Vec<Domain>> {
    let mut found: Vec<Vec<Domain>> = Vec::new();
    let mut seen: HashSet<Vec<Domain>> = HashSet::new();
    let mut stack = vec![universe.to_vec()];
    let within = |small: &[Domain], big: &[Domain]| small.iter().zip(big).all(|(a, b)| a.is_subset(b));
    while let Some(b) = stack.pop() {
        if !seen.insert(b.clone()) || found.iter().any(|f| within(&b, f)) {
            continue;
        }
        let hit = bad
            .iter()
            .find(|p| p.iter().zip(&b).all(|(v, r)| r.contains(v)));
        match hit {
            None => found.push(b),
            Some(p) => {
                for i in (0..b.len()).rev() {
                    if b[i].len() > 1 {
                        let mut child = b.clone();
                        child[i].remove(&p[i]);
                        stack.push(child);
                    }
                }
            }
        }
    }
    let all = found.clone();
    found.retain(|f| !all.iter().any(|g| g != f && within(f, g)));
    found
}

/// Minimal single-conclusion rules for `z ≠ a`, `z` a scope position.
fn rules_for_atom(tc: &TableConstraint, z: usize, a: &Value) -> Vec<MembershipRule> {
    let others: Vec<usize> = (0..tc.arity()).filter(|&i| i != z).collect();
    let universe: Vec<Domain> = others.iter().map(|&i| tc.universe[i].clone()).collect();
    let bad: Vec<Vec<Value>> = tc
        .table
        .iter()
        .filter(|t| &t[z] == a)
        .map(|t| others.iter().map(|&i| t[i].clone()).collect())
        .collect();
    maximal_empty_boxes(&universe, &bad)
        .into_iter()
        .map(|b| {
            let premise = others
                .iter()
                .zip(b)
                .filter(|(&i, r)| r != &tc.universe[i])
                .map(|(&i, r)| (tc.scope[i], r))
                .collect();
            MembershipRule {
                premise,
                conclusion: vec![(tc.scope[z], a.clone())],
            }
        })
        .filter(|r| premise_consistent(r, tc))
        .collect()
}

/// All minimal valid membership rules of `tc` with a satisfiable premise, in
/// canonical order, conclusions merged per premise.
pub fn generate_minimal_rules(tc: &TableConstraint, cfg: &GenConfig) -> Result<Vec<MembershipRule>, MembershipError> {
    let widest = tc.universe.iter().map(Domain::len).max().unwrap_or(0);
    if tc.arity() > cfg.max_arity || widest > cfg.max_universe {
        return Err(MembershipError::TooLarge {
            arity: tc.arity(),
            universe: widest,
            max_arity: cfg.max_arity,
            max_universe: cfg.max_universe,
        });
    }
    let atoms: Vec<(usize, Value)> = (0..tc.arity())
        .flat_map(|z| tc.universe[z].iter().map(move |a| (z, a.clone())))
        .collect();
    let per_atom = par::map(cfg.execution, atoms, |(z, a)| rules_for_atom(tc, z, &a));
    Ok(merge_by_premise(per_atom.into_iter().flatten()))
}

/// Fixpoint of plain membership rule application.
pub fn closure(rules: &[MembershipRule], d: &DomainTuple) -> DomainTuple {
    let mut d = d.clone();
    loop {
        let mut changed = false;
        for r in rules {
            if rule_applies(r, &d) {
                for (z, a) in &r.conclusion {
                    changed |= d.get_mut(z.0).remove(a);
                }
            }
        }
        if !changed {
            return d;
        }
    }
}

/// Whether `rules` without (one copy of) `r` already removes all of `r`'s
/// conclusions from the largest tuple on which `r` applies. By monotonicity
/// this means dropping `r` never changes a closure.
pub fn is_redundant(r: &MembershipRule, rules: &[MembershipRule], tc: &TableConstraint) -> bool {
    let mut rest = rules.to_vec();
    if let Some(i) = rest.iter().position(|x| x == r) {
        rest.remove(i);
    }
    let mut seed = tc.full_tuple();
    for (v, s) in &r.premise {
        let narrowed = seed.get(v.0).intersection(s);
        seed.set(v.0, narrowed);
    }
    let out = closure(&rest, &seed);
    r.conclusion.iter().all(|(z, a)| !out.get(z.0).contains(a))
}

/// Order in which redundancy removal considers rules: more premise atoms
/// first, then smaller ranges, then canonical order.
pub fn removal_order(rules: &[MembershipRule]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..rules.len()).collect();
    idx.sort_by(|&i, &j| {
        let key = |r: &MembershipRule| (Reverse(r.premise.len()), r.premise_size());
        key(&rules[i]).cmp(&key(&rules[j])).then_with(|| rules[i].cmp(&rules[j]))
    });
    idx
}

/// Rules over a table with at most 64 values per column, as bit masks over
/// scope positions. Only used to speed up redundancy removal.
struct Masks {
    premise: Vec<Vec<(usize, u64)>>,
    conclusion: Vec<Vec<(usize, u64)>>,
    full: Vec<u64>,
}

impl Masks {
    fn compile(rules: &[MembershipRule], tc: &TableConstraint) -> Option<Masks> {
        if tc.universe.iter().any(|u| u.len() > 64) {
            return None;
        }
        let bit = |i: usize, v: &Value| tc.universe[i].iter().position(|u| u == v).map(|b| 1u64 << b);
        let mut premise = Vec::with_capacity(rules.len());
        let mut conclusion = Vec::with_capacity(rules.len());
        for r in rules {
            let mut p = Vec::new();
            for (v, s) in &r.premise {
                let i = tc.position(*v)?;
                // values outside the universe can never be in a domain
                p.push((i, s.iter().filter_map(|x| bit(i, x)).fold(0, |m, b| m | b)));
            }
            let mut c = Vec::new();
            for (z, a) in &r.conclusion {
                let i = tc.position(*z)?;
                if let Some(b) = bit(i, a) {
                    c.push((i, b));
                }
            }
            premise.push(p);
            conclusion.push(c);
        }
        let full = tc.universe.iter().map(|u| if u.len() == 64 { u64::MAX } else { (1u64 << u.len()) - 1 }).collect();
        Some(Masks { premise, conclusion, full })
    }

    fn closure(&self, active: &[bool], mut d: Vec<u64>) -> Vec<u64> {
        loop {
            let mut changed = false;
            for (k, on) in active.iter().enumerate() {
                if *on && self.premise[k].iter().all(|&(i, s)| d[i] & !s == 0) {
                    for &(i, b) in &self.conclusion[k] {
                        if d[i] & b != 0 {
                            d[i] &= !b;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return d;
            }
        }
    }

    fn redundant(&self, k: usize, active: &mut [bool]) -> bool {
        let mut seed = self.full.clone();
        for &(i, s) in &self.premise[k] {
            seed[i] &= s;
        }
        let was = std::mem::replace(&mut active[k], false);
        let out = self.closure(active, seed);
        active[k] = was;
        self.conclusion[k].iter().all(|&(i, b)| out[i] & b == 0)
    }
}

/// Greedily drops redundant rules in [`removal_order`].
pub fn remove_redundant(rules: &[MembershipRule], tc: &TableConstraint) -> Vec<MembershipRule> {
    let mut keep = vec![true; rules.len()];
    let masks = Masks::compile(rules, tc);
    for i in removal_order(rules) {
        let redundant = match &masks {
            Some(m) => m.redundant(i, &mut keep),
            None => {
                let rest: Vec<MembershipRule> = rules
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| keep[j] && j != i)
                    .map(|(_, r)| r.clone())
                    .collect();
                let mut with_r = rest;
                with_r.push(rules[i].clone());
                is_redundant(&rules[i], &with_r, tc)
            }
        };
        if redundant {
            keep[i] = false;
        }
    }
    rules
        .iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(r, _)| r.clone())
        .collect()
}

/// Counts along the generation pipeline for one constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleSetReport {
    pub constraint: usize,
    /// Single-conclusion minimal rules before merging.
    pub single_conclusion: usize,
    /// Rules after merging by premise.
    pub generated: usize,
    /// Generated rules passing the minimality check.
    pub minimal: usize,
    pub after_redundancy: usize,
}

/// Generates, checks and minimizes the rules of one constraint.
pub fn build_report(
    tc: &TableConstraint,
    constraint: usize,
    cfg: &GenConfig,
) -> Result<(Vec<MembershipRule>, Vec<MembershipRule>, RuleSetReport), MembershipError> {
    let generated = generate_minimal_rules(tc, cfg)?;
    let single_conclusion = generated.iter().map(|r| r.conclusion.len()).sum();
    let minimal = generated
        .iter()
        .filter(|r| r.single_conclusions().all(|s| is_minimal(&s, tc)))
        .count();
    let reduced = remove_redundant(&generated, tc);
    let report = RuleSetReport {
        constraint,
        single_conclusion,
        generated: generated.len(),
        minimal,
        after_redundancy: reduced.len(),
    };
    Ok((generated, reduced, report))
}

/// A membership rule as a schedulable domain reduction rule. Triggered by its
/// premise variables only, and stable.
#[derive(Clone, Debug)]
pub struct MembershipReduction {
    id: String,
    rule: MembershipRule,
    scheme: Scheme,
    triggers: Vec<usize>,
}

impl MembershipReduction {
    pub fn new(id: impl Into<String>, rule: MembershipRule) -> Self {
        let vars: Vec<usize> = rule
            .premise
            .iter()
            .map(|(v, _)| v.0)
            .chain(rule.conclusion.iter().map(|(v, _)| v.0))
            .collect();
        MembershipReduction {
            id: id.into(),
            scheme: Scheme::from_unsorted(vars).expect("a rule has a conclusion"),
            triggers: rule.premise.iter().map(|(v, _)| v.0).collect(),
            rule,
        }
    }

    pub fn rule(&self) -> &MembershipRule {
        &self.rule
    }
}

impl ReductionRule for MembershipReduction {
    fn id(&self) -> &str {
        &self.id
    }

    fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    fn flags(&self) -> RuleFlags {
        RuleFlags::MONOTONIC.idempotent().stable()
    }

    fn reduce(&self, domains: &[Domain]) -> Vec<Domain> {
        let at = |v: VarId| self.scheme.position(v.0).expect("in scheme");
        let applies = self.rule.premise.iter().all(|(v, s)| domains[at(*v)].is_subset(s));
        let mut out = domains.to_vec();
        if applies {
            for (z, a) in &self.rule.conclusion {
                out[at(*z)].remove(a);
            }
        }
        out
    }

    fn triggers(&self) -> &[usize] {
        &self.triggers
    }

    fn narrow(&self, d: &DomainTuple) -> Vec<(usize, Domain)> {
        if !rule_applies(&self.rule, d) {
            return Vec::new();
        }
        let mut changes: BTreeMap<usize, Domain> = BTreeMap::new();
        for (z, a) in &self.rule.conclusion {
            let cur = changes.get(&z.0).unwrap_or(d.get(z.0));
            if cur.contains(a) {
                let mut next = cur.clone();
                next.remove(a);
                changes.insert(z.0, next);
            }
        }
        changes.into_iter().collect()
    }

    fn has_fired(&self, d: &DomainTuple) -> bool {
        rule_applies(&self.rule, d)
    }
}

/// Wraps rules of constraint `ci` for the schedulers.
pub fn reduction_rules(rules: &[MembershipRule], ci: usize) -> RuleSet {
    RuleSet::from_rules(
        rules
            .iter()
            .enumerate()
            .map(|(k, r)| Arc::new(MembershipReduction::new(format!("mr#{ci}.{k}"), r.clone())) as RuleRef)
            .collect(),
    )
}

/// `B / C`: in the presence of the constraints in `B`, add those in `C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropagationRule {
    pub body: Vec<Constraint>,
    pub head: Vec<Constraint>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PropagationError {
    #[error("head constraint {0} is outside the allowed set")]
    HeadNotAllowed(String),
    #[error("body constraint {0} is not present")]
    BodyMissing(String),
}

/// Adds the head constraints that are not already present; domains stay.
pub fn apply_propagation_rule(pr: &PropagationRule, allowed: &[Constraint], p: &Csp) -> Result<Csp, PropagationError> {
    if let Some(h) = pr.head.iter().find(|h| !allowed.contains(h)) {
        return Err(PropagationError::HeadNotAllowed(h.to_string()));
    }
    if let Some(b) = pr.body.iter().find(|b| !p.constraints().contains(b)) {
        return Err(PropagationError::BodyMissing(b.to_string()));
    }
    let mut out = p.clone();
    for h in &pr.head {
        if !out.constraints().contains(h) {
            out.add_constraint(h.clone()).expect("allowed constraints use known variables");
        }
    }
    Ok(out)
}

fn lt_pair(c: &Constraint) -> Option<(VarId, VarId)> {
    match c.relation() {
        Relation::Builtin(Builtin::Lt) => Some((c.scope()[0], c.scope()[1])),
        _ => None,
    }
}

/// Closes `p` under the transitivity rule `x<y, y<z / x<z`, the allowed set
/// being all `<` constraints between distinct variables.
pub fn lt_transitive_closure(p: &Csp) -> Csp {
    let n = p.num_vars();
    let allowed: Vec<Constraint> = (0..n)
        .flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
        .map(|(a, b)| Constraint::builtin(Builtin::Lt, vec![VarId(a), VarId(b)]).expect("binary"))
        .collect();
    let mut p = p.clone();
    loop {
        let lts: Vec<(Constraint, (VarId, VarId))> = p
            .constraints()
            .iter()
            .filter_map(|c| lt_pair(c).map(|xy| (c.clone(), xy)))
            .collect();
        let mut next = p.clone();
        for (c1, (x, y)) in &lts {
            for (c2, (y2, z)) in &lts {
                if y == y2 && x != z {
                    let pr = PropagationRule {
                        body: vec![c1.clone(), c2.clone()],
                        head: vec![Constraint::builtin(Builtin::Lt, vec![*x, *z]).expect("binary")],
                    };
                    next = apply_propagation_rule(&pr, &allowed, &next).expect("body present, head allowed");
                }
            }
        }
        if next.constraints().len() == p.constraints().len() {
            return p;
        }
        p = next;
    }
}
