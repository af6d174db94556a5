//! Random instances for the property tests, the acceptance suite and the
//! bench corpus. Everything is driven by a caller-supplied RNG.

use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::arc::arc_rules;
use crate::membership::{self, MembershipRule, TableConstraint};
use crate::model::{Builtin, Constraint, Csp, Domain, DomainTuple, Table, Value, VarId};
use crate::rule::{random_subset, FnRule, RuleFlags, RuleRef, Scheme};
use crate::scheduler::RuleSet;

/// A random non-empty subset of `0..size`.
fn int_domain(size: i64, rng: &mut impl Rng) -> Domain {
    loop {
        let d: Domain = (0..size).filter(|_| rng.random_bool(0.7)).map(Value::Int).collect();
        if !d.is_empty() {
            return d;
        }
    }
}

fn distinct_pair(n: usize, rng: &mut impl Rng) -> (VarId, VarId) {
    let a = rng.random_range(0..n);
    let mut b = rng.random_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    (VarId(a), VarId(b))
}

fn distinct_vars(n: usize, k: usize, rng: &mut impl Rng) -> Vec<VarId> {
    let all: Vec<usize> = (0..n).collect();
    all.choose_multiple(rng, k).map(|&i| VarId(i)).collect()
}

/// A random table over the given column universes with at least one tuple.
pub fn random_table(universe: &[Domain], density: f64, rng: &mut impl Rng) -> Table {
    let cols: Vec<&Domain> = universe.iter().collect();
    let mut tuples = Vec::new();
    crate::model::any_in_product(&cols, |t| {
        if rng.random_bool(density) {
            tuples.push(t.to_vec());
        }
        false
    });
    if tuples.is_empty() {
        tuples.push(cols.iter().map(|d| d.iter().nth(rng.random_range(0..d.len())).cloned().expect("non-empty")).collect());
    }
    Table::new(universe.len(), tuples).expect("tuples match the arity")
}

/// Extensional constraint of random arity in `1..=max_arity` with
/// `2..=max_size` symbolic values per column.
pub fn random_table_constraint(max_arity: usize, max_size: usize, rng: &mut impl Rng) -> TableConstraint {
    let arity = rng.random_range(1..=max_arity);
    let names = ["a", "b", "c", "d", "e", "f"];
    let universe: Vec<Domain> = (0..arity)
        .map(|_| Domain::symbols(&names[..rng.random_range(2..=max_size)]))
        .collect();
    let density = rng.random_range(0.2..0.8);
    let table = random_table(&universe, density, rng);
    TableConstraint::new((0..arity).map(VarId).collect(), table, universe).expect("consistent shape")
}

fn random_binary_constraint(n: usize, size: i64, rng: &mut impl Rng) -> Constraint {
    let (x, y) = distinct_pair(n, rng);
    let b = match rng.random_range(0..4) {
        0 => Builtin::Lt,
        1 => Builtin::EqOffset(rng.random_range(-2..=2)),
        2 => Builtin::AbsDiffEq(rng.random_range(0..=2)),
        _ => {
            let u = vec![Domain::range(0, size - 1); 2];
            return Constraint::table(vec![x, y], random_table(&u, 0.4, rng)).expect("binary");
        }
    };
    Constraint::builtin(b, vec![x, y]).expect("binary")
}

/// Binary CSP with `2..=max_vars` integer variables over subsets of
/// `0..max_size` and a mix of builtin and table constraints.
pub fn random_binary_csp(max_vars: usize, max_size: i64, rng: &mut impl Rng) -> Csp {
    let n = rng.random_range(2..=max_vars);
    let mut p = Csp::default();
    for i in 0..n {
        p.add_var(&format!("x{i}"), int_domain(max_size, rng));
    }
    for _ in 0..rng.random_range(1..=n + 2) {
        p.add_constraint(random_binary_constraint(n, max_size, rng)).expect("declared variables");
    }
    p
}

/// Mixed CSP: unary, binary, ternary table and disjunctive constraints over
/// `1..=max_vars` integer variables with at most `max_size` values.
pub fn random_mixed_csp(max_vars: usize, max_size: i64, rng: &mut impl Rng) -> Csp {
    let n = rng.random_range(1..=max_vars);
    let mut p = Csp::default();
    for i in 0..n {
        p.add_var(&format!("v{i}"), int_domain(max_size, rng));
    }
    for _ in 0..rng.random_range(0..=n + 1) {
        let kind = rng.random_range(0..5);
        let c = match kind {
            0 => {
                let v = VarId(rng.random_range(0..n));
                if rng.random_bool(0.5) {
                    Constraint::builtin(Builtin::NotEqualValue(Value::Int(rng.random_range(0..max_size))), vec![v])
                } else {
                    Constraint::builtin(Builtin::InSet(int_domain(max_size, rng)), vec![v])
                }
                .expect("unary")
            }
            3 if n >= 3 => {
                let scope = distinct_vars(n, 3, rng);
                let u = vec![Domain::range(0, max_size - 1); 3];
                Constraint::table(scope, random_table(&u, 0.4, rng)).expect("ternary")
            }
            4 if n >= 2 => {
                let first = vec![random_binary_constraint(n, max_size, rng)];
                let second = vec![random_binary_constraint(n, max_size, rng)];
                Constraint::disjunction(first, second).expect("distinct scopes")
            }
            _ if n >= 2 => random_binary_constraint(n, max_size, rng),
            _ => continue,
        };
        p.add_constraint(c).expect("declared variables");
    }
    p
}

/// `if |D_i| <= k then drop max D_j`: monotonic, inflationary, and neither
/// idempotent nor stable.
fn threshold_rule(id: String, i: usize, j: usize, k: usize) -> FnRule {
    let scheme = Scheme::from_unsorted(vec![i, j]).expect("distinct");
    let (pi, pj) = (scheme.position(i).expect("in scheme"), scheme.position(j).expect("in scheme"));
    FnRule::new(id, scheme, RuleFlags::MONOTONIC, move |d| {
        let mut out = d.to_vec();
        if d[pi].len() <= k {
            if let Some(top) = d[pj].last().cloned() {
                out[pj].remove(&top);
            }
        }
        out
    })
}

/// A random mix of monotonic rules over a random universe: membership rules
/// of a random table, arc consistency rules of random binary constraints
/// and non-idempotent threshold rules. Returns the universe as the start.
pub fn random_monotonic_rule_set(rng: &mut impl Rng) -> (DomainTuple, RuleSet) {
    let n = rng.random_range(2..=5);
    let size = rng.random_range(2..=4);
    let mut p = Csp::default();
    for i in 0..n {
        p.add_var(&format!("x{i}"), int_domain(size, rng));
    }
    for _ in 0..rng.random_range(1..=n) {
        p.add_constraint(random_binary_constraint(n, size, rng)).expect("declared variables");
    }
    let (arcs, comm) = arc_rules(&p);
    let mut set = RuleSet::from_rules(arcs.into_iter().map(|r| Arc::new(r) as RuleRef).collect());
    set.comm = comm;

    if n >= 3 && rng.random_bool(0.7) {
        let scope = distinct_vars(n, 3, rng);
        let universe: Vec<Domain> = scope.iter().map(|v| p.domain(*v).clone()).collect();
        let table = random_table(&universe, 0.5, rng);
        if let Ok(tc) = TableConstraint::new(scope, table, universe) {
            let cfg = membership::GenConfig::default();
            if let Ok(rules) = membership::generate_minimal_rules(&tc, &cfg) {
                set.extend(membership::reduction_rules(&rules, p.constraints().len()));
            }
        }
    }

    let thresholds: Vec<RuleRef> = (0..rng.random_range(0..=3))
        .map(|t| {
            let (i, j) = distinct_pair(n, rng);
            Arc::new(threshold_rule(format!("thr#{t}"), i.0, j.0, rng.random_range(1..=2))) as RuleRef
        })
        .collect();
    set.extend(RuleSet::from_rules(thresholds));
    (p.domains(), set)
}

/// Random membership rules valid for `tc`: each premise is a random
/// sub-box, each conclusion a value with no support in that box.
pub fn random_valid_rules(tc: &TableConstraint, count: usize, rng: &mut impl Rng) -> Vec<MembershipRule> {
    let mut out = Vec::new();
    for _ in 0..count * 10 {
        if out.len() == count {
            break;
        }
        let mut premise: Vec<(VarId, Domain)> = Vec::new();
        for (&v, u) in tc.scope().iter().zip(tc.universe()) {
            let s = random_subset(u, rng);
            if rng.random_bool(0.5) && !s.is_empty() {
                premise.push((v, s));
            }
        }
        let z = rng.random_range(0..tc.arity());
        let zv = tc.scope()[z];
        if premise.iter().any(|(v, _)| *v == zv) {
            continue;
        }
        let Some(a) = tc.universe()[z].iter().nth(rng.random_range(0..tc.universe()[z].len())).cloned() else {
            continue;
        };
        let Ok(r) = MembershipRule::new(premise, vec![(zv, a)]) else {
            continue;
        };
        if membership::is_valid(&r, tc) {
            out.push(r);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn tables_are_never_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let tc = random_table_constraint(3, 4, &mut rng);
            assert!(!tc.table().is_empty());
        }
    }

    #[test]
    fn threshold_rule_contract() {
        let r = threshold_rule("t".into(), 0, 1, 1);
        let u = vec![Domain::range(0, 2), Domain::range(0, 2)];
        crate::rule::check_monotonic(&r, &crate::rule::nested_pairs_exhaustive(&u)).unwrap();
        crate::rule::check_inflationary(&r, &crate::rule::sub_tuples(&u)).unwrap();
        assert!(crate::rule::check_idempotent(&r, &crate::rule::sub_tuples(&u)).is_err());
    }

    #[test]
    fn generators_are_deterministic() {
        let a = random_mixed_csp(5, 4, &mut ChaCha8Rng::seed_from_u64(9));
        let b = random_mixed_csp(5, 4, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn valid_rules_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let tc = random_table_constraint(3, 3, &mut rng);
        for r in random_valid_rules(&tc, 5, &mut rng) {
            assert!(membership::is_valid(&r, &tc));
        }
    }
}
