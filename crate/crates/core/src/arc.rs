//! Arc consistency as a pair of domain reduction rules per binary constraint,
//! scheduled with the commutativity-aware iteration to obtain AC-3.

use std::sync::Arc;

use thiserror::Error;

use crate::model::{Constraint, Csp, Domain, DomainTuple, Relation, Value};
use crate::rule::{ReductionRule, RuleFlags, RuleRef, Scheme};
use crate::scheduler::{self, Choose, CommutativityDeclaration, Fixpoint, SchedulerError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArcError {
    #[error("arc rules need a binary table or builtin constraint, got {0}")]
    NotBinary(String),
    #[error("node rules need a unary table or builtin constraint, got {0}")]
    NotUnary(String),
}

/// Which scope position an arc rule reduces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Rule 1: reduce the domain of the first variable.
    First,
    /// Rule 2: reduce the domain of the second variable.
    Second,
}

/// Retains exactly the supported values of one variable of a binary
/// constraint.
#[derive(Debug, Clone)]
pub struct ArcRule {
    id: String,
    constraint: Arc<Constraint>,
    constraint_index: usize,
    direction: Direction,
    scheme: Scheme,
    target: usize,
    other: usize,
    trigger: [usize; 1],
}

impl ArcRule {
    pub fn new(c: &Constraint, constraint_index: usize, direction: Direction) -> Result<Self, ArcError> {
        Self::shared(Arc::new(c.clone()), constraint_index, direction)
    }

    pub fn first(c: &Constraint, constraint_index: usize) -> Result<Self, ArcError> {
        Self::new(c, constraint_index, Direction::First)
    }

    pub fn second(c: &Constraint, constraint_index: usize) -> Result<Self, ArcError> {
        Self::new(c, constraint_index, Direction::Second)
    }

    fn shared(c: Arc<Constraint>, constraint_index: usize, direction: Direction) -> Result<Self, ArcError> {
        if c.arity() != 2 || c.as_disjunction().is_some() {
            return Err(ArcError::NotBinary(c.to_string()));
        }
        let (x, y) = (c.scope()[0].0, c.scope()[1].0);
        let (target, other, tag) = match direction {
            Direction::First => (x, y, 1),
            Direction::Second => (y, x, 2),
        };
        Ok(ArcRule {
            id: format!("ac{tag}#{constraint_index}"),
            scheme: Scheme::from_unsorted(vec![x, y]).expect("distinct scope"),
            constraint: c,
            constraint_index,
            direction,
            target,
            other,
            trigger: [other],
        })
    }

    /// Both rules of a binary constraint, sharing the relation.
    pub fn pair(c: &Constraint, constraint_index: usize) -> Result<(Self, Self), ArcError> {
        let shared = Arc::new(c.clone());
        Ok((
            Self::shared(shared.clone(), constraint_index, Direction::First)?,
            Self::shared(shared, constraint_index, Direction::Second)?,
        ))
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn constraint_index(&self) -> usize {
        self.constraint_index
    }

    /// Variable index whose domain this rule reduces.
    pub fn target(&self) -> usize {
        self.target
    }

    fn related(&self, target_value: &Value, other_value: &Value) -> bool {
        let pair = match self.direction {
            Direction::First => [target_value.clone(), other_value.clone()],
            Direction::Second => [other_value.clone(), target_value.clone()],
        };
        match self.constraint.relation() {
            Relation::Table(t) => t.contains(&pair),
            Relation::Builtin(b) => b.holds(&pair),
            Relation::Disjunction(_) => unreachable!("rejected at construction"),
        }
    }

    fn supported(&self, target: &Domain, other: &Domain) -> Domain {
        target
            .iter()
            .filter(|a| other.iter().any(|b| self.related(a, b)))
            .cloned()
            .collect()
    }
}

impl ReductionRule for ArcRule {
    fn id(&self) -> &str {
        &self.id
    }

    fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    fn flags(&self) -> RuleFlags {
        RuleFlags::MONOTONIC.idempotent()
    }

    fn reduce(&self, domains: &[Domain]) -> Vec<Domain> {
        let t = self.scheme.position(self.target).expect("target in scheme");
        let o = self.scheme.position(self.other).expect("other in scheme");
        let mut out = domains.to_vec();
        out[t] = self.supported(&domains[t], &domains[o]);
        out
    }

    fn triggers(&self) -> &[usize] {
        &self.trigger
    }

    fn narrow(&self, d: &DomainTuple) -> Vec<(usize, Domain)> {
        let reduced = self.supported(d.get(self.target), d.get(self.other));
        if reduced.len() == d.get(self.target).len() {
            Vec::new()
        } else {
            vec![(self.target, reduced)]
        }
    }
}

/// Revises the rule's target domain against the other variable.
pub fn revise(rule: &ArcRule, d: &DomainTuple) -> DomainTuple {
    let mut out = d.clone();
    for (i, dom) in rule.narrow(d) {
        out.set(i, dom);
    }
    out
}

/// Node consistency for a unary constraint: keeps the values satisfying it.
/// Stable, since after one application the domain never regains a value.
#[derive(Debug, Clone)]
pub struct UnaryRule {
    id: String,
    scheme: Scheme,
    relation: Relation,
}

impl UnaryRule {
    pub fn new(c: &Constraint, constraint_index: usize) -> Result<Self, ArcError> {
        if c.arity() != 1 || c.as_disjunction().is_some() {
            return Err(ArcError::NotUnary(c.to_string()));
        }
        Ok(UnaryRule {
            id: format!("node#{constraint_index}"),
            scheme: Scheme::new(vec![c.scope()[0].0]).expect("one index"),
            relation: c.relation().clone(),
        })
    }

    fn allows(&self, v: &Value) -> bool {
        let arg = std::slice::from_ref(v);
        match &self.relation {
            Relation::Table(t) => t.contains(arg),
            Relation::Builtin(b) => b.holds(arg),
            Relation::Disjunction(_) => unreachable!("rejected at construction"),
        }
    }
}

impl ReductionRule for UnaryRule {
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
        vec![domains[0].iter().filter(|v| self.allows(v)).cloned().collect()]
    }

    fn has_fired(&self, d: &DomainTuple) -> bool {
        d.get(self.scheme.indices()[0]).iter().all(|v| self.allows(v))
    }
}

/// Both support conditions hold for every binary (non-disjunctive)
/// constraint, checked directly on the definition.
pub fn is_arc_consistent(p: &Csp) -> bool {
    is_arc_consistent_at(p, &p.domains())
}

pub fn is_arc_consistent_at(p: &Csp, d: &DomainTuple) -> bool {
    p.constraints()
        .iter()
        .filter(|c| c.arity() == 2 && c.as_disjunction().is_none())
        .all(|c| {
            let (x, y) = (c.scope()[0].0, c.scope()[1].0);
            let mut full: Vec<Value> = d
                .iter()
                .map(|dom| dom.first().cloned().unwrap_or(Value::Int(0)))
                .collect();
            let mut holds = |a: &Value, b: &Value| {
                full[x] = a.clone();
                full[y] = b.clone();
                c.holds(&full)
            };
            d.get(x).iter().all(|a| d.get(y).iter().any(|b| holds(a, b)))
                && d.get(y).iter().all(|b| d.get(x).iter().any(|a| holds(a, b)))
        })
}

/// The arc rules of every binary constraint plus the commutativity structure
/// AC-3 exploits:
/// - rules 1 and 2 of the same constraint commute;
/// - rules 1 of constraints sharing their first variable commute, and rules 2
///   of constraints sharing their second variable;
/// - every rule is idempotent.
pub fn arc_rules(p: &Csp) -> (Vec<ArcRule>, CommutativityDeclaration) {
    let mut rules = Vec::new();
    for (ci, c) in p.constraints().iter().enumerate() {
        if c.arity() == 2 && c.as_disjunction().is_none() {
            let (r1, r2) = ArcRule::pair(c, ci).expect("binary");
            rules.push(r1);
            rules.push(r2);
        }
    }
    let comm = arc_commutativity(&rules);
    (rules, comm)
}

pub fn arc_commutativity(rules: &[ArcRule]) -> CommutativityDeclaration {
    let mut comm = CommutativityDeclaration::new(rules.len());
    for (i, f) in rules.iter().enumerate() {
        comm.mark_idempotent(i);
        for (j, g) in rules.iter().enumerate().skip(i + 1) {
            let same_constraint = f.constraint_index == g.constraint_index;
            let same_side = f.direction == g.direction && f.target == g.target;
            if same_constraint || same_side {
                comm.declare(i, j);
            }
        }
    }
    comm
}

/// AC-3: the improved iteration over all arc rules. Returns the restricted,
/// arc consistent CSP (possibly failed) and the run.
pub fn ac3_with_stats(p: &Csp, choose: Choose) -> Result<(Csp, Fixpoint), SchedulerError> {
    let (rules, comm) = arc_rules(p);
    let rules: Vec<RuleRef> = rules.into_iter().map(|r| Arc::new(r) as RuleRef).collect();
    let fix = scheduler::improved_iteration(&rules, p.domains(), &comm, choose)?;
    let out = p
        .restrict_constraints(&fix.domains)
        .expect("reductions only shrink domains");
    Ok((out, fix))
}

pub fn ac3(p: &Csp) -> Csp {
    ac3_with_stats(p, Choose::Fifo)
        .expect("arc rules are inflationary")
        .0
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{abs_diff_disjunctive, lt_chain};
    use crate::model::{Builtin, Table, VarId};
    use crate::rule::{apply_reduction, is_closed_under};

    fn abs_branch() -> Csp {
        let mut p = Csp::default();
        let x = p.add_var("x", Domain::range(4, 10));
        let y = p.add_var("y", Domain::range(2, 7));
        p.add_constraint(Constraint::builtin(Builtin::EqOffset(1), vec![x, y]).unwrap())
            .unwrap();
        p
    }

    #[test]
    fn revise_eq_offset_first() {
        let p = abs_branch();
        let r = ArcRule::first(&p.constraints()[0], 0).unwrap();
        let out = revise(&r, &p.domains());
        assert_eq!(out.get(0), &Domain::range(4, 8));
        assert_eq!(out.get(1), &Domain::range(2, 7));
        assert_eq!(revise(&r, &out), out);
    }

    #[test]
    fn revise_table() {
        let mut p = Csp::default();
        let x = p.add_var("x", [1, 3].into_iter().map(Value::Int).collect());
        let y = p.add_var("y", Domain::range(1, 3));
        let t = Table::new(2, vec![vec![Value::Int(1), Value::Int(2)]]).unwrap();
        p.add_constraint(Constraint::table(vec![x, y], t).unwrap()).unwrap();
        let r = ArcRule::first(&p.constraints()[0], 0).unwrap();
        assert_eq!(revise(&r, &p.domains()).get(0), &Domain::range(1, 1));
    }

    #[test]
    fn reduce_matches_narrow() {
        let p = abs_branch();
        let (r1, r2) = ArcRule::pair(&p.constraints()[0], 0).unwrap();
        for r in [&r1, &r2] {
            assert_eq!(apply_reduction(r, &p.domains()).unwrap(), revise(r, &p.domains()));
        }
    }

    #[test]
    fn arc_consistency_definition() {
        let mut closed = abs_branch();
        closed = closed
            .with_domains(&DomainTuple::new(vec![Domain::range(4, 8), Domain::range(3, 7)]))
            .unwrap();
        assert!(is_arc_consistent(&closed));
        assert!(!is_arc_consistent(&lt_chain(2, 5)));
        let mut unary_only = Csp::default();
        let x = unary_only.add_var("x", Domain::range(1, 3));
        unary_only
            .add_constraint(Constraint::builtin(Builtin::NotEqualValue(Value::Int(2)), vec![x]).unwrap())
            .unwrap();
        assert!(is_arc_consistent(&unary_only));
    }

    #[test]
    fn ac3_chain() {
        let out = ac3(&lt_chain(3, 5));
        assert_eq!(out.domain(VarId(0)), &Domain::range(1, 3));
        assert_eq!(out.domain(VarId(1)), &Domain::range(2, 4));
        assert_eq!(out.domain(VarId(2)), &Domain::range(3, 5));
        assert_eq!(ac3(&out), out);
    }

    #[test]
    fn ac3_failure() {
        let mut p = Csp::default();
        let x = p.add_var("x", Domain::range(5, 5));
        let y = p.add_var("y", Domain::range(1, 1));
        p.add_constraint(Constraint::builtin(Builtin::Lt, vec![x, y]).unwrap()).unwrap();
        assert!(ac3(&p).domains().has_empty());
    }

    #[test]
    fn closure_iff_arc_consistent() {
        let p = lt_chain(3, 4);
        let out = ac3(&p);
        let (rules, _) = arc_rules(&out);
        let rules: Vec<RuleRef> = rules.into_iter().map(|r| Arc::new(r) as RuleRef).collect();
        assert!(is_closed_under(&out.domains(), &rules));
        assert!(is_arc_consistent(&out));
    }

    #[test]
    fn disjunctions_get_no_arc_rules() {
        assert!(arc_rules(&abs_diff_disjunctive()).0.is_empty());
        assert!(ArcRule::first(&abs_diff_disjunctive().constraints()[0], 0).is_err());
    }

    #[test]
    fn unary_rule_is_stable() {
        let c = Constraint::builtin(Builtin::InSet(Domain::range(2, 3)), vec![VarId(0)]).unwrap();
        let r = UnaryRule::new(&c, 0).unwrap();
        let d = DomainTuple::new(vec![Domain::range(1, 5)]);
        assert!(!r.has_fired(&d));
        let out = apply_reduction(&r, &d).unwrap();
        assert_eq!(out.get(0), &Domain::range(2, 3));
        assert!(r.has_fired(&out));
    }
}
