//! Brute-force reference implementations. Deliberately naive: each one is a
//! direct transcription of a definition and serves as the trust anchor for
//! the optimized code paths.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::{any_in_product, Assignment, Constraint, Csp, Domain, DomainTuple, Value};
use crate::membership::{self, MembershipRule, TableConstraint};
use crate::rule::RuleRef;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_assignments: u128,
    pub max_sub_tuples: u128,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_assignments: 1_000_000,
            max_sub_tuples: 1_000_000,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("search space of {needed} exceeds the oracle budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("exhaustive rule enumeration needs arity <= 3 and at most 3 values per variable")]
    TooLarge,
}

fn check_space(d: &DomainTuple, budget: u128) -> Result<(), OracleError> {
    let needed = d.search_space();
    if needed > budget {
        return Err(OracleError::BudgetExceeded { needed, budget });
    }
    Ok(())
}

/// Every assignment within the domains that satisfies all constraints.
pub fn enumerate_solutions(p: &Csp, budget: &OracleBudget) -> Result<BTreeSet<Assignment>, OracleError> {
    let d = p.domains();
    check_space(&d, budget.max_assignments)?;
    let doms: Vec<&Domain> = d.iter().collect();
    let mut out = BTreeSet::new();
    any_in_product(&doms, |vals| {
        if p.constraints().iter().all(|c| c.holds(vals)) {
            out.insert(Assignment(vals.to_vec()));
        }
        false
    });
    Ok(out)
}

/// Keeps, for every scope variable, exactly the values that occur in some
/// tuple of `c` lying within the current domains; repeated to a fixpoint.
pub fn hyper_arc_closure(c: &Constraint, d: &DomainTuple, budget: &OracleBudget) -> Result<DomainTuple, OracleError> {
    let scope: Vec<usize> = c.scope().iter().map(|v| v.0).collect();
    let mut d = d.clone();
    loop {
        let doms: Vec<Domain> = d.project(&scope);
        let space: u128 = doms.iter().map(|x| x.len() as u128).product();
        if space > budget.max_assignments {
            return Err(OracleError::BudgetExceeded {
                needed: space,
                budget: budget.max_assignments,
            });
        }
        let mut supported = vec![Domain::empty(); scope.len()];
        let mut full: Vec<Value> = d.iter().map(|x| x.first().cloned().unwrap_or(Value::Int(0))).collect();
        let refs: Vec<&Domain> = doms.iter().collect();
        any_in_product(&refs, |vals| {
            for (&i, v) in scope.iter().zip(vals) {
                full[i] = v.clone();
            }
            if c.holds(&full) {
                for (s, v) in supported.iter_mut().zip(vals) {
                    s.insert(v.clone());
                }
            }
            false
        });
        if supported == doms {
            return Ok(d);
        }
        for (&i, s) in scope.iter().zip(supported) {
            d.set(i, s);
        }
    }
}

/// Largest arc consistent sub-tuple: repeatedly drops values without support
/// in a binary non-disjunctive constraint.
pub fn arc_consistent_closure(p: &Csp) -> DomainTuple {
    let mut d = p.domains();
    let binary: Vec<&Constraint> = p
        .constraints()
        .iter()
        .filter(|c| c.arity() == 2 && c.as_disjunction().is_none())
        .collect();
    let mut changed = true;
    while changed {
        changed = false;
        for c in &binary {
            let (x, y) = (c.scope()[0].0, c.scope()[1].0);
            for (t, o) in [(x, y), (y, x)] {
                let mut full: Vec<Value> = d.iter().map(|x| x.first().cloned().unwrap_or(Value::Int(0))).collect();
                let keep: Domain = d
                    .get(t)
                    .iter()
                    .filter(|a| {
                        d.get(o).iter().any(|b| {
                            full[t] = (*a).clone();
                            full[o] = b.clone();
                            c.holds(&full)
                        })
                    })
                    .cloned()
                    .collect();
                if keep.len() != d.get(t).len() {
                    d.set(t, keep);
                    changed = true;
                }
            }
        }
    }
    d
}

/// Round-robin application of every rule until a full pass changes nothing.
pub fn naive_rule_closure(rules: &[RuleRef], d: &DomainTuple) -> DomainTuple {
    let mut d = d.clone();
    loop {
        let mut changed = false;
        for r in rules {
            for (i, dom) in r.narrow(&d) {
                d.set(i, dom);
                changed = true;
            }
        }
        if !changed {
            return d;
        }
    }
}

/// All minimal membership rules of `tc` found by trying every syntactically
/// possible single-conclusion rule, keeping the valid and minimal ones with a
/// satisfiable premise, and merging conclusions that share a premise.
pub fn enumerate_all_minimal_rules(tc: &TableConstraint) -> Result<BTreeSet<MembershipRule>, OracleError> {
    let arity = tc.arity();
    if arity > 3 || tc.universe().iter().any(|u| u.len() > 3) {
        return Err(OracleError::TooLarge);
    }
    let vars = tc.scope().to_vec();
    let mut singles = Vec::new();
    for z in 0..arity {
        for a in tc.universe()[z].iter() {
            let others: Vec<usize> = (0..arity).filter(|&i| i != z).collect();
            for mask in 0..(1usize << others.len()) {
                let chosen: Vec<usize> = others
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask & (1 << k) != 0)
                    .map(|(_, &i)| i)
                    .collect();
                let range_choices: Vec<Vec<Domain>> = chosen
                    .iter()
                    .map(|&i| tc.universe()[i].subsets().into_iter().filter(|s| !s.is_empty()).collect())
                    .collect();
                for ranges in cartesian(&range_choices) {
                    let premise = chosen.iter().map(|&i| vars[i]).zip(ranges).collect();
                    let r = MembershipRule::new(premise, vec![(vars[z], a.clone())]).expect("well-formed");
                    if membership::is_valid(&r, tc) && membership::is_minimal(&r, tc) && membership::premise_consistent(&r, tc) {
                        singles.push(r);
                    }
                }
            }
        }
    }
    Ok(membership::merge_by_premise(singles).into_iter().collect())
}

fn cartesian(choices: &[Vec<Domain>]) -> Vec<Vec<Domain>> {
    let mut out = vec![Vec::new()];
    for c in choices {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<Domain>| {
                c.iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x.clone());
                    p
                })
            })
            .collect();
    }
    out
}

/// Closure of `rules` from every sub-tuple of `universe`, as a list aligned
/// with [`crate::rule::sub_tuples`]. Fails beyond the sub-tuple budget.
pub fn closures_from_all_sub_tuples(
    rules: &[RuleRef],
    universe: &[Domain],
    budget: &OracleBudget,
) -> Result<Vec<DomainTuple>, OracleError> {
    let needed: u128 = universe.iter().map(|d| 1u128 << d.len()).product();
    if needed > budget.max_sub_tuples {
        return Err(OracleError::BudgetExceeded {
            needed,
            budget: budget.max_sub_tuples,
        });
    }
    Ok(crate::rule::sub_tuples(universe)
        .into_iter()
        .map(|t| naive_rule_closure(rules, &DomainTuple::new(t)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{abs_diff_disjunctive, and3, lt_chain};
    use crate::model::VarId;

    #[test]
    fn and3_has_nine_solutions() {
        let sols = enumerate_solutions(&and3(), &OracleBudget::default()).unwrap();
        assert_eq!(sols.len(), 9);
    }

    #[test]
    fn empty_domain_has_no_solutions() {
        let mut p = lt_chain(2, 3);
        let mut d = p.domains();
        d.set(0, Domain::empty());
        p = p.with_domains(&d).unwrap();
        assert!(enumerate_solutions(&p, &OracleBudget::default()).unwrap().is_empty());
    }

    #[test]
    fn abs_diff_count() {
        let p = abs_diff_disjunctive();
        let d = DomainTuple::new(vec![Domain::range(4, 8), Domain::range(3, 7)]);
        let sols = enumerate_solutions(&p.with_domains(&d).unwrap(), &OracleBudget::default()).unwrap();
        assert_eq!(sols.len(), 8);
    }

    #[test]
    fn budget_is_enforced() {
        let p = lt_chain(8, 10);
        let tight = OracleBudget {
            max_assignments: 1000,
            ..OracleBudget::default()
        };
        assert!(matches!(
            enumerate_solutions(&p, &tight),
            Err(OracleError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn hyper_arc_on_and3() {
        let p = and3();
        let mut d = p.domains();
        d.set(1, Domain::symbols(&["u", "f"]));
        let out = hyper_arc_closure(&p.constraints()[0], &d, &OracleBudget::default()).unwrap();
        assert_eq!(out.get(2), &Domain::symbols(&["f", "u"]));
        assert_eq!(out.get(0), &Domain::symbols(&["t", "f", "u"]));
    }

    #[test]
    fn hyper_arc_binary_is_arc() {
        let p = lt_chain(2, 5);
        let hac = hyper_arc_closure(&p.constraints()[0], &p.domains(), &OracleBudget::default()).unwrap();
        assert_eq!(hac, arc_consistent_closure(&p));
    }

    #[test]
    fn naive_closure_of_nothing() {
        let d = lt_chain(3, 3).domains();
        assert_eq!(naive_rule_closure(&[], &d), d);
    }

    #[test]
    fn and3_minimal_rule_count() {
        let p = and3();
        let tc = TableConstraint::from_csp(&p, 0).unwrap();
        let rules = enumerate_all_minimal_rules(&tc).unwrap();
        assert_eq!(rules.len(), 18);
        let yz = MembershipRule::new(vec![(VarId(1), Domain::symbols(&["u", "f"]))], vec![(VarId(2), Value::sym("t"))]).unwrap();
        assert!(rules.contains(&yz));
    }
}
