//! Deterministic (domain reduction) and splitting proof rules, their
//! contracts, and derivation traces.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::model::{Csp, Domain, DomainTuple, ModelError};
use crate::oracle::{self, OracleBudget, OracleError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("rule `{rule}` enlarged component {index}")]
    NotInflationary { rule: String, index: usize },
    #[error("rule `{rule}` returned {found} domains for a scheme of {expected}")]
    WrongWidth {
        rule: String,
        expected: usize,
        found: usize,
    },
    #[error("scheme must be non-empty and strictly increasing: {0:?}")]
    BadScheme(Vec<usize>),
    #[error("scheme index {index} out of range for {len} variables")]
    SchemeOutOfRange { index: usize, len: usize },
}

/// Strictly increasing subsequence of variable indices a rule reads and
/// writes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scheme(Vec<usize>);

impl Scheme {
    pub fn new(indices: Vec<usize>) -> Result<Self, RuleError> {
        if indices.is_empty() || indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(RuleError::BadScheme(indices));
        }
        Ok(Scheme(indices))
    }

    /// Sorts and deduplicates.
    pub fn from_unsorted(mut indices: Vec<usize>) -> Result<Self, RuleError> {
        indices.sort_unstable();
        indices.dedup();
        Self::new(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    /// Position of variable `i` within the scheme.
    pub fn position(&self, i: usize) -> Option<usize> {
        self.0.binary_search(&i).ok()
    }
}

/// Declared properties. Schedulers trust them; the contract suite checks them.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RuleFlags {
    pub monotonic: bool,
    pub idempotent: bool,
    /// Needs to fire at most once per derivation.
    pub stable: bool,
}

impl RuleFlags {
    pub const MONOTONIC: RuleFlags = RuleFlags {
        monotonic: true,
        idempotent: false,
        stable: false,
    };

    pub fn idempotent(mut self) -> Self {
        self.idempotent = true;
        self
    }

    pub fn stable(mut self) -> Self {
        self.stable = true;
        self
    }
}

/// A domain reduction rule: a reduction function on the sub-tuple selected by
/// its scheme. Reductions only ever shrink domains.
pub trait ReductionRule: Send + Sync + fmt::Debug {
    fn id(&self) -> &str;

    fn scheme(&self) -> &Scheme;

    fn flags(&self) -> RuleFlags;

    /// Maps `d[s]` to the reduced sub-tuple, same width and order.
    fn reduce(&self, domains: &[Domain]) -> Vec<Domain>;

    /// Components whose change can turn a fixpoint of this rule into a
    /// non-fixpoint. Defaults to the whole scheme.
    fn triggers(&self) -> &[usize] {
        self.scheme().indices()
    }

    /// The reduction lifted to the whole tuple, reporting only the components
    /// that change. Override to avoid the projection round-trip.
    fn narrow(&self, d: &DomainTuple) -> Vec<(usize, Domain)> {
        let idx = self.scheme().indices();
        let before = d.project(idx);
        let after = self.reduce(&before);
        idx.iter()
            .zip(before.into_iter().zip(after))
            .filter(|(_, (b, a))| b != a)
            .map(|(&i, (_, a))| (i, a))
            .collect()
    }

    /// For stable rules: once this holds at some tuple, the rule has done all
    /// it ever will on every tuple below it.
    fn has_fired(&self, _d: &DomainTuple) -> bool {
        false
    }
}

pub type RuleRef = Arc<dyn ReductionRule>;

type ReduceFn = dyn Fn(&[Domain]) -> Vec<Domain> + Send + Sync;

/// A rule given by a closure; handy for tests and generated rule sets.
#[derive(Clone)]
pub struct FnRule {
    id: String,
    scheme: Scheme,
    flags: RuleFlags,
    f: Arc<ReduceFn>,
}

impl FnRule {
    pub fn new(
        id: impl Into<String>,
        scheme: Scheme,
        flags: RuleFlags,
        f: impl Fn(&[Domain]) -> Vec<Domain> + Send + Sync + 'static,
    ) -> Self {
        FnRule {
            id: id.into(),
            scheme,
            flags,
            f: Arc::new(f),
        }
    }
}

impl fmt::Debug for FnRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnRule")
            .field("id", &self.id)
            .field("scheme", &self.scheme)
            .finish()
    }
}

impl ReductionRule for FnRule {
    fn id(&self) -> &str {
        &self.id
    }

    fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    fn flags(&self) -> RuleFlags {
        self.flags
    }

    fn reduce(&self, domains: &[Domain]) -> Vec<Domain> {
        (self.f)(domains)
    }
}

fn check_scheme(rule: &dyn ReductionRule, d: &DomainTuple) -> Result<(), RuleError> {
    match rule.scheme().indices().last() {
        Some(&i) if i >= d.len() => Err(RuleError::SchemeOutOfRange { index: i, len: d.len() }),
        _ => Ok(()),
    }
}

/// Replaces the scheme components of `d` by the rule's reduction of them.
pub fn apply_reduction(rule: &dyn ReductionRule, d: &DomainTuple) -> Result<DomainTuple, RuleError> {
    check_scheme(rule, d)?;
    let idx = rule.scheme().indices();
    let before = d.project(idx);
    let after = rule.reduce(&before);
    if after.len() != before.len() {
        return Err(RuleError::WrongWidth {
            rule: rule.id().to_string(),
            expected: before.len(),
            found: after.len(),
        });
    }
    let mut out = d.clone();
    for ((&i, b), a) in idx.iter().zip(&before).zip(after) {
        if !a.is_subset(b) {
            return Err(RuleError::NotInflationary {
                rule: rule.id().to_string(),
                index: i,
            });
        }
        out.set(i, a);
    }
    Ok(out)
}

/// Every rule leaves `d` unchanged.
pub fn is_closed_under(d: &DomainTuple, rules: &[RuleRef]) -> bool {
    rules.iter().all(|r| r.narrow(d).is_empty())
}

/// A pair `(smaller, larger)` of scheme-projected tuples with
/// `smaller[i] ⊆ larger[i]`.
pub type NestedPair = (Vec<Domain>, Vec<Domain>);

/// Falsifying witness for monotonicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonMonotonic {
    pub smaller: Vec<Domain>,
    pub larger: Vec<Domain>,
    pub reduced_smaller: Vec<Domain>,
    pub reduced_larger: Vec<Domain>,
}

/// For every `D ⊆ E` sample, `reduce(D) ⊆ reduce(E)` componentwise.
pub fn check_monotonic(rule: &dyn ReductionRule, samples: &[NestedPair]) -> Result<(), NonMonotonic> {
    for (smaller, larger) in samples {
        let rs = rule.reduce(smaller);
        let rl = rule.reduce(larger);
        if rs.iter().zip(&rl).any(|(a, b)| !a.is_subset(b)) {
            return Err(NonMonotonic {
                smaller: smaller.clone(),
                larger: larger.clone(),
                reduced_smaller: rs,
                reduced_larger: rl,
            });
        }
    }
    Ok(())
}

/// `reduce(D) ⊆ D` on every sample; returns the first violating sample.
pub fn check_inflationary(rule: &dyn ReductionRule, samples: &[Vec<Domain>]) -> Result<(), Vec<Domain>> {
    for s in samples {
        let r = rule.reduce(s);
        if r.len() != s.len() || r.iter().zip(s).any(|(a, b)| !a.is_subset(b)) {
            return Err(s.clone());
        }
    }
    Ok(())
}

/// `reduce(reduce(D)) = reduce(D)` on every sample.
pub fn check_idempotent(rule: &dyn ReductionRule, samples: &[Vec<Domain>]) -> Result<(), Vec<Domain>> {
    for s in samples {
        let once = rule.reduce(s);
        if rule.reduce(&once) != once {
            return Err(s.clone());
        }
    }
    Ok(())
}

/// `f(g(d)) = g(f(d))` on every full tuple sample.
pub fn check_commute(f: &dyn ReductionRule, g: &dyn ReductionRule, samples: &[DomainTuple]) -> Result<(), DomainTuple> {
    for d in samples {
        let fg = apply_reduction(f, &apply_reduction(g, d).map_err(|_| d.clone())?).map_err(|_| d.clone())?;
        let gf = apply_reduction(g, &apply_reduction(f, d).map_err(|_| d.clone())?).map_err(|_| d.clone())?;
        if fg != gf {
            return Err(d.clone());
        }
    }
    Ok(())
}

/// Every sub-tuple of `universe` (each component ranging over all subsets of
/// the corresponding domain). Exponential; only for tiny universes.
pub fn sub_tuples(universe: &[Domain]) -> Vec<Vec<Domain>> {
    let mut out: Vec<Vec<Domain>> = vec![Vec::new()];
    for dom in universe {
        let subs = dom.subsets();
        out = out
            .into_iter()
            .flat_map(|prefix| {
                subs.iter().map(move |s| {
                    let mut p = prefix.clone();
                    p.push(s.clone());
                    p
                })
            })
            .collect();
    }
    out
}

/// All nested pairs `D ⊆ E` within `universe`.
pub fn nested_pairs_exhaustive(universe: &[Domain]) -> Vec<NestedPair> {
    let all = sub_tuples(universe);
    let mut out = Vec::new();
    for small in &all {
        for large in &all {
            if small.iter().zip(large).all(|(a, b)| a.is_subset(b)) {
                out.push((small.clone(), large.clone()));
            }
        }
    }
    out
}

/// Random subset of `dom`, each element kept with probability 1/2.
pub fn random_subset(dom: &Domain, rng: &mut impl Rng) -> Domain {
    dom.iter().filter(|_| rng.random_bool(0.5)).cloned().collect()
}

/// `count` random nested pairs within `universe`.
pub fn nested_pairs_random(universe: &[Domain], count: usize, rng: &mut impl Rng) -> Vec<NestedPair> {
    (0..count)
        .map(|_| {
            let larger: Vec<Domain> = universe.iter().map(|d| random_subset(d, rng)).collect();
            let smaller = larger.iter().map(|d| random_subset(d, rng)).collect();
            (smaller, larger)
        })
        .collect()
}

/// A splitting rule `φ / ψ1 | … | ψn`.
pub trait SplittingRule: Send + Sync {
    fn id(&self) -> &str;

    fn split(&self, p: &Csp) -> Vec<Csp>;
}

/// Either kind of proof rule, for equivalence checks.
pub enum ProofRule<'a> {
    Deterministic(&'a dyn ReductionRule),
    Splitting(&'a dyn SplittingRule),
}

#[derive(Debug, Error)]
pub enum EquivalenceError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Deterministic rule: `p` and its image have the same solutions. Splitting
/// rule: the union of the children's solutions equals `p`'s.
pub fn check_equivalence_preserving(rule: ProofRule<'_>, p: &Csp) -> Result<bool, EquivalenceError> {
    let budget = OracleBudget::default();
    let before = oracle::enumerate_solutions(p, &budget)?;
    let after = match rule {
        ProofRule::Deterministic(r) => {
            let d = apply_reduction(r, &p.domains())?;
            oracle::enumerate_solutions(&p.restrict_constraints(&d)?, &budget)?
        }
        ProofRule::Splitting(s) => {
            let mut union = std::collections::BTreeSet::new();
            for child in s.split(p) {
                union.extend(oracle::enumerate_solutions(&child, &budget)?);
            }
            union
        }
    };
    Ok(before == after)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceStatus {
    Successful,
    Failed,
    Stabilizing,
    Ongoing,
}

impl fmt::Display for TraceStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TraceStatus::Successful => "successful",
            TraceStatus::Failed => "failed",
            TraceStatus::Stabilizing => "stabilizing",
            TraceStatus::Ongoing => "ongoing",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub rule_id: String,
    pub scheme: Vec<usize>,
    pub before: Vec<Domain>,
    pub after: Vec<Domain>,
}

/// Ordered log of rule applications ending in a classified status.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationTrace {
    pub steps: Vec<TraceStep>,
    pub status: TraceStatus,
}

impl DerivationTrace {
    /// Replays `steps` from `start`, cutting the derivation at the first
    /// failed or manifestly solved CSP. `closed` says whether the last state
    /// is closed under the rules that produced the steps.
    pub fn classify(csp: &Csp, start: &DomainTuple, steps: Vec<TraceStep>, closed: bool) -> Self {
        let verdict = |d: &DomainTuple| {
            if csp.is_failed_at(d) {
                Some(TraceStatus::Failed)
            } else if csp.is_manifestly_solved_at(d) {
                Some(TraceStatus::Successful)
            } else {
                None
            }
        };
        if let Some(status) = verdict(start) {
            return DerivationTrace {
                steps: Vec::new(),
                status,
            };
        }
        let mut d = start.clone();
        let mut kept = Vec::with_capacity(steps.len());
        for step in steps {
            for (&i, a) in step.scheme.iter().zip(&step.after) {
                d.set(i, a.clone());
            }
            kept.push(step);
            if let Some(status) = verdict(&d) {
                return DerivationTrace { steps: kept, status };
            }
        }
        DerivationTrace {
            steps: kept,
            status: if closed {
                TraceStatus::Stabilizing
            } else {
                TraceStatus::Ongoing
            },
        }
    }

    /// `step <k>: <rule-id> [<scheme>] <var>:<before>-><after>…` lines and a
    /// final `status:` line.
    pub fn render(&self, csp: &Csp) -> String {
        let name = |i: usize| csp.variables()[i].name.as_str();
        let mut out = String::new();
        for (k, step) in self.steps.iter().enumerate() {
            let scheme: Vec<&str> = step.scheme.iter().map(|&i| name(i)).collect();
            out.push_str(&format!("step {}: {} [{}]", k + 1, step.rule_id, scheme.join(",")));
            for ((&i, b), a) in step.scheme.iter().zip(&step.before).zip(&step.after) {
                if b != a {
                    out.push_str(&format!(" {}:{}->{}", name(i), b.compact(), a.compact()));
                }
            }
            out.push('\n');
        }
        out.push_str(&format!("status: {}\n", self.status));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arc::ArcRule;
    use crate::instances::lt_chain;
    use crate::model::{Builtin, Constraint, Value, VarId};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn identity_rule() -> FnRule {
        FnRule::new("id", Scheme::new(vec![0]).unwrap(), RuleFlags::MONOTONIC, |d| d.to_vec())
    }

    /// Keeps only the maximum once a domain has more than two elements.
    fn max_when_large() -> FnRule {
        FnRule::new("max>2", Scheme::new(vec![0]).unwrap(), RuleFlags::default(), |d| {
            if d[0].len() > 2 {
                vec![d[0].last().cloned().into_iter().collect()]
            } else {
                d.to_vec()
            }
        })
    }

    #[test]
    fn scheme_validation() {
        assert!(Scheme::new(vec![]).is_err());
        assert!(Scheme::new(vec![2, 1]).is_err());
        assert_eq!(Scheme::from_unsorted(vec![3, 1, 3]).unwrap().indices(), &[1, 3]);
    }

    #[test]
    fn apply_arc_rule_first() {
        let p = lt_chain(2, 5);
        let rule = ArcRule::first(&p.constraints()[0], 0).unwrap();
        let out = apply_reduction(&rule, &p.domains()).unwrap();
        assert_eq!(out.get(0), &Domain::range(1, 4));
        assert_eq!(out.get(1), &Domain::range(1, 5));
        assert_eq!(apply_reduction(&rule, &out).unwrap(), out);
    }

    #[test]
    fn apply_reports_non_subset_with_rule_id() {
        let grow = FnRule::new("grow", Scheme::new(vec![0]).unwrap(), RuleFlags::default(), |d| {
            let mut g = d[0].clone();
            g.insert(Value::Int(99));
            vec![g]
        });
        let d = DomainTuple::new(vec![Domain::range(1, 2)]);
        assert_eq!(
            apply_reduction(&grow, &d),
            Err(RuleError::NotInflationary {
                rule: "grow".into(),
                index: 0
            })
        );
    }

    #[test]
    fn monotonic_checks() {
        let universe = vec![Domain::range(1, 4)];
        let pairs = nested_pairs_exhaustive(&universe);
        assert!(check_monotonic(&identity_rule(), &pairs).is_ok());
        let witness = check_monotonic(&max_when_large(), &pairs).unwrap_err();
        assert!(!witness.reduced_smaller[0].is_empty());
        assert!(!witness.reduced_smaller[0].is_subset(&witness.reduced_larger[0]));

        let p = lt_chain(2, 4);
        let rule = ArcRule::first(&p.constraints()[0], 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let random = nested_pairs_random(p.domains().as_slice(), 500, &mut rng);
        assert!(check_monotonic(&rule, &random).is_ok());
    }

    #[test]
    fn equivalence_preservation() {
        let mut p = crate::model::Csp::default();
        let x = p.add_var("x", Domain::range(1, 3));
        let y = p.add_var("y", Domain::range(1, 3));
        let table = crate::model::Table::new(
            2,
            vec![vec![Value::Int(1), Value::Int(2)], vec![Value::Int(3), Value::Int(3)]],
        )
        .unwrap();
        p.add_constraint(Constraint::table(vec![x, y], table).unwrap()).unwrap();
        let second = ArcRule::second(&p.constraints()[0], 0).unwrap();
        assert!(check_equivalence_preserving(ProofRule::Deterministic(&second), &p).unwrap());

        // Dropping the value 3 from x loses the solution (3, 3).
        let lossy = FnRule::new("drop3", Scheme::new(vec![0]).unwrap(), RuleFlags::default(), |d| {
            let mut k = d[0].clone();
            k.remove(&Value::Int(3));
            vec![k]
        });
        assert!(!check_equivalence_preserving(ProofRule::Deterministic(&lossy), &p).unwrap());
    }

    #[test]
    fn closure_predicate() {
        let p = lt_chain(2, 5);
        let c = &p.constraints()[0];
        let rules: Vec<RuleRef> = vec![
            Arc::new(ArcRule::first(c, 0).unwrap()),
            Arc::new(ArcRule::second(c, 0).unwrap()),
        ];
        assert!(!is_closed_under(&p.domains(), &rules));
        assert!(is_closed_under(&p.domains(), &[]));
        let closed = DomainTuple::new(vec![Domain::range(1, 4), Domain::range(2, 5)]);
        assert!(is_closed_under(&closed, &rules));
    }

    #[test]
    fn trace_classification_and_rendering() {
        let mut p = crate::model::Csp::default();
        let x = p.add_var("x", Domain::range(5, 5));
        let y = p.add_var("y", Domain::range(1, 1));
        p.add_constraint(Constraint::builtin(Builtin::Lt, vec![x, y]).unwrap()).unwrap();
        let start = p.domains();
        let step = TraceStep {
            rule_id: "ac1#0".into(),
            scheme: vec![0, 1],
            before: vec![Domain::range(5, 5), Domain::range(1, 1)],
            after: vec![Domain::empty(), Domain::range(1, 1)],
        };
        // Already failed at the start: zero steps.
        let t = DerivationTrace::classify(&p, &start, vec![step.clone()], true);
        assert_eq!(t.status, TraceStatus::Failed);
        assert!(t.steps.is_empty());

        let q = crate::instances::lt_chain(2, 3);
        let step = TraceStep {
            rule_id: "ac1#0".into(),
            scheme: vec![0, 1],
            before: vec![Domain::range(1, 3), Domain::range(1, 3)],
            after: vec![Domain::range(1, 2), Domain::range(1, 3)],
        };
        let t = DerivationTrace::classify(&q, &q.domains(), vec![step], false);
        assert_eq!(t.status, TraceStatus::Ongoing);
        assert_eq!(t.render(&q), "step 1: ac1#0 [x1,x2] x1:[1..3]->[1..2]\nstatus: ongoing\n");
        let _ = VarId(0);
    }
}
