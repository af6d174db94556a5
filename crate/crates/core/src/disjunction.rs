//! Constructive disjunction: close each branch separately, keep the union of
//! what survives. Plus the case-analysis splitting rule `C1 ∨ C2 / C1 | C2`.

use std::fmt;

use crate::model::{Constraint, Csp, Domain, DomainTuple, Relation, VarId};
use crate::rule::{ReductionRule, RuleFlags, Scheme, SplittingRule};
use crate::scheduler::{Choose, RuleSet, SchedulerName};

/// Outcome of one branch's auxiliary derivation, over the disjunction scope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisjunctReduction {
    pub branch: usize,
    pub domains: DomainTuple,
    pub failed: bool,
}

/// Builds the inner rules for a branch CSP whose variables are the
/// disjunction scope, in order.
pub type InnerRules<'a> = &'a dyn Fn(&Csp) -> RuleSet;

/// The CONSTRUCTIVE DISJUNCTION rule for one disjunctive constraint.
pub struct ConstructiveDisjunction {
    id: String,
    scheme: Scheme,
    branches: [RuleSet; 2],
    scheduler: SchedulerName,
}

impl fmt::Debug for ConstructiveDisjunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConstructiveDisjunction")
            .field("id", &self.id)
            .field("scheme", &self.scheme)
            .field("rules", &[self.branches[0].len(), self.branches[1].len()])
            .finish()
    }
}

/// The two branches as CSPs over the scope variables `0..k`, named after the
/// parent variables and with domains taken from `d`.
pub fn branch_csps(c: &Constraint, names: &dyn Fn(VarId) -> String, d: &DomainTuple) -> Option<[Csp; 2]> {
    let disj = c.as_disjunction()?;
    let scope = c.scope();
    let local = |v: VarId| VarId(scope.iter().position(|&s| s == v).expect("branch variable in scope"));
    let make = |branch: &[Constraint]| {
        let mut p = Csp::default();
        for &v in scope {
            p.add_var(&names(v), d.get(v.0).clone());
        }
        for b in branch {
            p.add_constraint(b.remapped(&local)).expect("local scope");
        }
        p
    };
    Some([make(&disj.branches[0]), make(&disj.branches[1])])
}

impl ConstructiveDisjunction {
    /// `d` supplies the universes the inner rules are built for. Returns
    /// `None` when `c` is not a disjunction.
    pub fn new(
        c: &Constraint,
        ci: usize,
        names: &dyn Fn(VarId) -> String,
        d: &DomainTuple,
        inner: InnerRules<'_>,
        scheduler: SchedulerName,
    ) -> Option<Self> {
        let [first, second] = branch_csps(c, names, d)?;
        Some(ConstructiveDisjunction {
            id: format!("cd#{ci}"),
            scheme: Scheme::new(c.scope().iter().map(|v| v.0).collect()).expect("disjunction scope is sorted"),
            branches: [inner(&first), inner(&second)],
            scheduler,
        })
    }

    /// Both auxiliary derivations from the scope domains `local`.
    pub fn branch_reductions(&self, local: &[Domain]) -> [DisjunctReduction; 2] {
        let run = |k: usize| {
            let fix = self.branches[k]
                .run(self.scheduler, DomainTuple::new(local.to_vec()), Choose::Fifo, None, false)
                .expect("inner rules are inflationary");
            DisjunctReduction {
                branch: k,
                failed: fix.domains.has_empty(),
                domains: fix.domains,
            }
        };
        [run(0), run(1)]
    }
}

/// Componentwise union of the branches that did not fail; all empty when
/// both failed.
pub fn join_branches(width: usize, reductions: &[DisjunctReduction]) -> Vec<Domain> {
    let mut out = vec![Domain::empty(); width];
    for r in reductions.iter().filter(|r| !r.failed) {
        for (o, d) in out.iter_mut().zip(r.domains.iter()) {
            *o = o.union(d);
        }
    }
    out
}

impl ReductionRule for ConstructiveDisjunction {
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
        join_branches(domains.len(), &self.branch_reductions(domains))
    }
}

/// Applies constructive disjunction once to `d`, returning the new tuple and
/// both side derivations.
pub fn cd_reduce(
    c: &Constraint,
    d: &DomainTuple,
    inner: InnerRules<'_>,
    scheduler: SchedulerName,
) -> Option<(DomainTuple, [DisjunctReduction; 2])> {
    let names = |v: VarId| format!("v{}", v.0);
    let rule = ConstructiveDisjunction::new(c, 0, &names, d, inner, scheduler)?;
    let idx = rule.scheme.indices().to_vec();
    let local = d.project(&idx);
    let sides = rule.branch_reductions(&local);
    let joined = join_branches(local.len(), &sides);
    let mut out = d.clone();
    for (&i, dom) in idx.iter().zip(joined) {
        out.set(i, dom);
    }
    Some((out, sides))
}

/// Replaces disjunction `ci` of `p` by each of its branches in turn.
pub fn split_disjunction(ci: usize, p: &Csp) -> Option<[Csp; 2]> {
    let disj = p.constraints().get(ci)?.as_disjunction()?;
    let make = |branch: &[Constraint]| {
        let others = p
            .constraints()
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != ci)
            .map(|(_, c)| c.clone());
        Csp::new(p.variables().to_vec(), others.chain(branch.iter().cloned()).collect()).expect("same variables")
    };
    Some([make(&disj.branches[0]), make(&disj.branches[1])])
}

/// `C1 ∨ C2 / C1 | C2` on the first disjunction of a CSP.
#[derive(Clone, Copy, Debug, Default)]
pub struct DisjunctionSplit;

impl SplittingRule for DisjunctionSplit {
    fn id(&self) -> &str {
        "split-or"
    }

    fn split(&self, p: &Csp) -> Vec<Csp> {
        let first = p
            .constraints()
            .iter()
            .position(|c| matches!(c.relation(), Relation::Disjunction(_)));
        match first.and_then(|ci| split_disjunction(ci, p)) {
            Some(children) => children.into(),
            None => vec![p.clone()],
        }
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::arc::arc_rules;
    use crate::instances::abs_diff_disjunctive;
    use crate::model::Builtin;
    use crate::oracle::{self, OracleBudget};
    use crate::rule::{check_equivalence_preserving, check_monotonic, nested_pairs_exhaustive, ProofRule, RuleRef};

    fn ac_inner(p: &Csp) -> RuleSet {
        let (rules, comm) = arc_rules(p);
        let rules: Vec<RuleRef> = rules.into_iter().map(|r| Arc::new(r) as RuleRef).collect();
        let mut set = RuleSet::from_rules(rules);
        set.comm = comm;
        set
    }

    #[test]
    fn worked_example() {
        let p = abs_diff_disjunctive();
        let c = &p.constraints()[0];
        let (out, sides) = cd_reduce(c, &p.domains(), &ac_inner, SchedulerName::Compound).unwrap();
        assert_eq!(out.get(0), &Domain::range(4, 8));
        assert_eq!(out.get(1), &Domain::range(3, 7));
        assert_eq!(sides[0].domains.as_slice(), &[Domain::range(4, 8), Domain::range(3, 7)]);
        assert_eq!(sides[1].domains.as_slice(), &[Domain::range(4, 6), Domain::range(5, 7)]);
        assert!(!sides[0].failed && !sides[1].failed);
    }

    #[test]
    fn closed_branches_leave_domains() {
        let p = abs_diff_disjunctive();
        let c = &p.constraints()[0];
        let (once, _) = cd_reduce(c, &p.domains(), &ac_inner, SchedulerName::Compound).unwrap();
        let (twice, _) = cd_reduce(c, &once, &ac_inner, SchedulerName::Compound).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn failed_branch_contributes_nothing() {
        let mut p = Csp::default();
        let x = p.add_var("x", Domain::range(1, 5));
        let y = p.add_var("y", Domain::range(1, 5));
        let impossible = Constraint::builtin(Builtin::EqOffset(10), vec![x, y]).unwrap();
        let lt = Constraint::builtin(Builtin::Lt, vec![x, y]).unwrap();
        p.add_constraint(Constraint::disjunction(vec![impossible], vec![lt]).unwrap()).unwrap();
        let (out, sides) = cd_reduce(&p.constraints()[0], &p.domains(), &ac_inner, SchedulerName::Compound).unwrap();
        assert!(sides[0].failed);
        assert_eq!(out.as_slice(), sides[1].domains.as_slice());
        assert_eq!(out.get(0), &Domain::range(1, 4));
    }

    #[test]
    fn both_failed_is_failure() {
        let mut p = Csp::default();
        let x = p.add_var("x", Domain::range(1, 3));
        let y = p.add_var("y", Domain::range(1, 3));
        let a = Constraint::builtin(Builtin::EqOffset(10), vec![x, y]).unwrap();
        let b = Constraint::builtin(Builtin::EqOffset(-10), vec![x, y]).unwrap();
        p.add_constraint(Constraint::disjunction(vec![a], vec![b]).unwrap()).unwrap();
        let (out, _) = cd_reduce(&p.constraints()[0], &p.domains(), &ac_inner, SchedulerName::Compound).unwrap();
        assert!(out.iter().all(Domain::is_empty));
    }

    #[test]
    fn rule_is_monotonic_and_equivalence_preserving() {
        let mut p = Csp::default();
        let x = p.add_var("x", Domain::range(1, 3));
        let y = p.add_var("y", Domain::range(1, 3));
        p.add_constraint(crate::instances::abs_diff_as_disjunction(x, y)).unwrap();
        let names = |v: VarId| p.name(v).to_string();
        let rule = ConstructiveDisjunction::new(&p.constraints()[0], 0, &names, &p.domains(), &ac_inner, SchedulerName::Compound).unwrap();
        let pairs = nested_pairs_exhaustive(p.domains().as_slice());
        check_monotonic(&rule, &pairs).unwrap();
        assert!(check_equivalence_preserving(ProofRule::Deterministic(&rule), &p).unwrap());
    }

    #[test]
    fn split_preserves_solutions() {
        let p = abs_diff_disjunctive();
        let [a, b] = split_disjunction(0, &p).unwrap();
        assert_eq!(a.constraints()[0].relation(), &Relation::Builtin(Builtin::EqOffset(1)));
        assert_eq!(a.constraints()[0].scope(), &[VarId(0), VarId(1)]);
        assert_eq!(b.constraints()[0].scope(), &[VarId(1), VarId(0)]);
        assert!(check_equivalence_preserving(ProofRule::Splitting(&DisjunctionSplit), &p).unwrap());
        let budget = OracleBudget::default();
        let mut union = oracle::enumerate_solutions(&a, &budget).unwrap();
        union.extend(oracle::enumerate_solutions(&b, &budget).unwrap());
        assert_eq!(union, oracle::enumerate_solutions(&p, &budget).unwrap());
    }
}
