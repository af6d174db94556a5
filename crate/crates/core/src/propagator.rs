//! Turns a CSP into the rule set a propagator kind stands for.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::arc::{arc_commutativity, ArcRule, UnaryRule};
use crate::disjunction::ConstructiveDisjunction;
use crate::membership::{self, GenConfig, MembershipRule, RuleSetReport, TableConstraint};
use crate::model::{Constraint, Csp, Domain, DomainTuple, Relation, Table, Value, VarId};
use crate::rule::{ReductionRule, RuleFlags, RuleRef, Scheme};
use crate::scheduler::{Choose, Fixpoint, RuleSet, SchedulerError, SchedulerName};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropagatorKind {
    /// Arc rules for binary constraints, membership rules for wider tables.
    Ac,
    /// Membership rules for every table, arc rules for binary builtins.
    Membership,
    /// As `Ac`, plus constructive disjunction for disjunctive constraints.
    Cd,
    None,
}

impl PropagatorKind {
    pub const ALL: [PropagatorKind; 4] = [
        PropagatorKind::Ac,
        PropagatorKind::Membership,
        PropagatorKind::Cd,
        PropagatorKind::None,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PropagatorKind::Ac => "ac",
            PropagatorKind::Membership => "membership",
            PropagatorKind::Cd => "cd",
            PropagatorKind::None => "none",
        }
    }
}

impl fmt::Display for PropagatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PropagatorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown propagator `{s}` (expected ac, membership, cd or none)"))
    }
}

/// Which membership rules to schedule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleMode {
    All,
    Minimized,
}

impl RuleMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleMode::All => "all",
            RuleMode::Minimized => "minimized",
        }
    }
}

impl fmt::Display for RuleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RuleMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "all" => Ok(RuleMode::All),
            "minimized" => Ok(RuleMode::Minimized),
            _ => Err(format!("unknown rule mode `{s}` (expected all or minimized)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PropagatorConfig {
    pub kind: PropagatorKind,
    pub scheduler: SchedulerName,
    pub rules: RuleMode,
    pub choose: Choose,
    pub generation: GenConfig,
}

impl PropagatorConfig {
    pub fn new(kind: PropagatorKind, scheduler: SchedulerName) -> Self {
        PropagatorConfig {
            kind,
            scheduler,
            rules: RuleMode::All,
            choose: Choose::Fifo,
            generation: GenConfig::default(),
        }
    }

    pub fn rules(mut self, rules: RuleMode) -> Self {
        self.rules = rules;
        self
    }
}

/// A configured rule set for one CSP.
#[derive(Clone, Debug)]
pub struct Propagator {
    config: PropagatorConfig,
    set: RuleSet,
    reports: Vec<RuleSetReport>,
}

impl Propagator {
    pub fn build(p: &Csp, config: PropagatorConfig) -> Self {
        let mut builder = Builder {
            config,
            cache: HashMap::new(),
            reports: Vec::new(),
        };
        let set = builder.rules_for(p, config.kind, true);
        Propagator {
            config,
            set,
            reports: builder.reports,
        }
    }

    pub fn config(&self) -> &PropagatorConfig {
        &self.config
    }

    pub fn rules(&self) -> &RuleSet {
        &self.set
    }

    /// Generation counts for every table that got membership rules.
    pub fn reports(&self) -> &[RuleSetReport] {
        &self.reports
    }

    pub fn run(&self, d: DomainTuple, inactive: Option<&BTreeSet<usize>>, trace: bool) -> Result<Fixpoint, SchedulerError> {
        self.set.run(self.config.scheduler, d, self.config.choose, inactive, trace)
    }
}

type RuleCache = HashMap<TableConstraint, (Vec<MembershipRule>, Option<RuleSetReport>)>;

struct Builder {
    config: PropagatorConfig,
    cache: RuleCache,
    reports: Vec<RuleSetReport>,
}

impl Builder {
    fn rules_for(&mut self, p: &Csp, kind: PropagatorKind, top: bool) -> RuleSet {
        let mut arcs: Vec<ArcRule> = Vec::new();
        let mut others = RuleSet::default();
        if kind == PropagatorKind::None {
            return others;
        }
        for (ci, c) in p.constraints().iter().enumerate() {
            match c.relation() {
                Relation::Disjunction(_) => {
                    if kind == PropagatorKind::Cd {
                        let names = |v: VarId| p.name(v).to_string();
                        let config = self.config;
                        let inner = |branch: &Csp| {
                            let mut b = Builder {
                                config,
                                cache: HashMap::new(),
                                reports: Vec::new(),
                            };
                            b.rules_for(branch, PropagatorKind::Cd, false)
                        };
                        let cd = ConstructiveDisjunction::new(c, ci, &names, &p.domains(), &inner, self.config.scheduler)
                            .expect("disjunction");
                        others.extend(RuleSet::from_rules(vec![Arc::new(cd) as RuleRef]));
                    }
                }
                _ if c.arity() == 0 => {}
                _ if c.arity() == 1 => {
                    let r = UnaryRule::new(c, ci).expect("unary");
                    others.extend(RuleSet::from_rules(vec![Arc::new(r) as RuleRef]));
                }
                Relation::Table(_) if c.arity() > 2 || kind == PropagatorKind::Membership => {
                    others.extend(self.table_rules(p, ci, top));
                }
                _ => {
                    let (r1, r2) = ArcRule::pair(c, ci).expect("binary");
                    arcs.push(r1);
                    arcs.push(r2);
                }
            }
        }
        let comm = arc_commutativity(&arcs);
        let mut set = RuleSet::from_rules(arcs.into_iter().map(|r| Arc::new(r) as RuleRef).collect());
        set.comm = comm;
        set.extend(others);
        set
    }

    fn table_rules(&mut self, p: &Csp, ci: usize, top: bool) -> RuleSet {
        let global = TableConstraint::from_csp(p, ci).expect("table constraint");
        let scope = global.scope().to_vec();
        let local = TableConstraint::new(
            (0..scope.len()).map(VarId).collect(),
            global.table().clone(),
            global.universe().to_vec(),
        )
        .expect("same shape");
        if !self.cache.contains_key(&local) {
            let entry = match membership::build_report(&local, ci, &self.config.generation) {
                Ok((all, minimized, report)) => {
                    let rules = match self.config.rules {
                        RuleMode::All => all,
                        RuleMode::Minimized => minimized,
                    };
                    (rules, Some(report))
                }
                Err(_) => (Vec::new(), None),
            };
            self.cache.insert(local.clone(), entry);
        }
        let (rules, report) = self.cache[&local].clone();
        match report {
            Some(mut report) => {
                if top {
                    report.constraint = ci;
                    self.reports.push(report);
                }
                let rules: Vec<MembershipRule> = rules.iter().map(|r| r.relabel(&|v| scope[v.0])).collect();
                membership::reduction_rules(&rules, ci)
            }
            None => {
                let c = &p.constraints()[ci];
                RuleSet::from_rules(vec![Arc::new(HyperArcRule::new(c, ci)) as RuleRef])
            }
        }
    }
}

/// Hyper-arc consistency for one table, used when rule generation is out of
/// bounds.
#[derive(Clone, Debug)]
pub struct HyperArcRule {
    id: String,
    scheme: Scheme,
    order: Vec<usize>,
    table: Table,
}

impl HyperArcRule {
    pub fn new(c: &Constraint, ci: usize) -> Self {
        let table = c.as_table().expect("table").clone();
        let idx: Vec<usize> = c.scope().iter().map(|v| v.0).collect();
        let scheme = Scheme::from_unsorted(idx.clone()).expect("non-empty scope");
        let order = idx.iter().map(|&i| scheme.position(i).expect("in scheme")).collect();
        HyperArcRule {
            id: format!("gac#{ci}"),
            scheme,
            order,
            table,
        }
    }
}

impl ReductionRule for HyperArcRule {
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
        let mut out = vec![Domain::empty(); domains.len()];
        let inside = |t: &Vec<Value>| t.iter().zip(&self.order).all(|(v, &k)| domains[k].contains(v));
        for t in self.table.iter().filter(|t| inside(t)) {
            for (v, &k) in t.iter().zip(&self.order) {
                out[k].insert(v.clone());
            }
        }
        out
    }
}
