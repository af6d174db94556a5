//! Values, domains, constraints and CSPs, plus the status predicates every
//! proof rule and search node is classified by.

mod constraint;
mod domain;
mod value;

use std::fmt;

use thiserror::Error;

pub use constraint::{Builtin, Constraint, Disjunction, Relation, Table};
pub use domain::{any_in_product, CompactDomain, Domain, DomainTuple};
pub use value::{Value, VarId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("constraint refers to undeclared variable {0}")]
    UnknownVariable(VarId),
    #[error("a variable occurs twice in one constraint scope")]
    RepeatedScopeVariable,
    #[error("domain of `{var}` is not a subset of the current domain")]
    NotSubset { var: String },
    #[error("domain tuple has {found} components, CSP has {expected} variables")]
    TupleLength { expected: usize, found: usize },
    #[error("integers and symbols mixed in one CSP")]
    MixedValues,
    #[error("duplicate variable name `{0}`")]
    DuplicateName(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Variable {
    pub name: String,
    pub domain: Domain,
}

/// One value per variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(pub Vec<Value>);

impl Assignment {
    pub fn values(&self) -> &[Value] {
        &self.0
    }
}

/// Whether the projection of `a` onto the constraint's scope belongs to its
/// relation. A disjunction holds when every constraint of one branch does.
pub fn satisfies(a: &Assignment, c: &Constraint) -> Result<bool, ModelError> {
    if let Some(max) = c.max_var() {
        if max >= a.0.len() {
            return Err(ModelError::ArityMismatch {
                expected: max + 1,
                found: a.0.len(),
            });
        }
    }
    Ok(c.holds(&a.0))
}

/// `⟨C ; x1 ∈ D1, …, xn ∈ Dn⟩`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Csp {
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
}

impl Csp {
    pub fn new(variables: Vec<Variable>, constraints: Vec<Constraint>) -> Result<Self, ModelError> {
        let mut csp = Csp::default();
        for v in variables {
            csp.try_add_var(&v.name, v.domain)?;
        }
        for c in constraints {
            csp.add_constraint(c)?;
        }
        Ok(csp)
    }

    /// Adds a variable; panics on a duplicate name or mixed value kinds.
    /// Use [`Csp::try_add_var`] for untrusted input.
    pub fn add_var(&mut self, name: &str, domain: Domain) -> VarId {
        self.try_add_var(name, domain).expect("invalid variable")
    }

    pub fn try_add_var(&mut self, name: &str, domain: Domain) -> Result<VarId, ModelError> {
        if self.var_by_name(name).is_some() {
            return Err(ModelError::DuplicateName(name.to_string()));
        }
        let integral = domain.is_integral();
        let symbolic = domain.iter().all(|v| !v.is_int());
        if !integral && !symbolic {
            return Err(ModelError::MixedValues);
        }
        if !domain.is_empty() {
            if let Some(kind) = self.value_kind() {
                if kind != integral {
                    return Err(ModelError::MixedValues);
                }
            }
        }
        self.variables.push(Variable {
            name: name.to_string(),
            domain,
        });
        Ok(VarId(self.variables.len() - 1))
    }

    /// `Some(true)` for integer CSPs, `Some(false)` for symbolic ones.
    fn value_kind(&self) -> Option<bool> {
        self.variables
            .iter()
            .find_map(|v| v.domain.first().map(Value::is_int))
    }

    pub fn add_constraint(&mut self, c: Constraint) -> Result<(), ModelError> {
        if let Some(max) = c.max_var() {
            if max >= self.variables.len() {
                return Err(ModelError::UnknownVariable(VarId(max)));
            }
        }
        self.constraints.push(c);
        Ok(())
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.variables[v.0].name
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.variables.iter().position(|v| v.name == name).map(VarId)
    }

    pub fn domain(&self, v: VarId) -> &Domain {
        &self.variables[v.0].domain
    }

    pub fn domains(&self) -> DomainTuple {
        DomainTuple::new(self.variables.iter().map(|v| v.domain.clone()).collect())
    }

    /// Same constraints, new domains; no restriction of the relations.
    pub fn with_domains(&self, d: &DomainTuple) -> Result<Csp, ModelError> {
        self.check_len(d)?;
        let mut out = self.clone();
        for (var, dom) in out.variables.iter_mut().zip(d.iter()) {
            var.domain = dom.clone();
        }
        Ok(out)
    }

    fn check_len(&self, d: &DomainTuple) -> Result<(), ModelError> {
        if d.len() != self.num_vars() {
            return Err(ModelError::TupleLength {
                expected: self.num_vars(),
                found: d.len(),
            });
        }
        Ok(())
    }

    pub fn is_solution(&self, a: &Assignment) -> bool {
        a.0.len() == self.num_vars()
            && a.0.iter().zip(&self.variables).all(|(v, var)| var.domain.contains(v))
            && self.constraints.iter().all(|c| c.holds(&a.0))
    }

    /// Some domain is empty or some constraint has no tuple within the
    /// current domains.
    pub fn is_failed(&self) -> bool {
        self.is_failed_at(&self.domains())
    }

    pub fn is_failed_at(&self, d: &DomainTuple) -> bool {
        d.has_empty() || self.constraints.iter().any(|c| !c.has_support_within(d))
    }

    /// Every domain a singleton and the induced assignment a solution.
    pub fn is_manifestly_solved(&self) -> bool {
        self.is_manifestly_solved_at(&self.domains())
    }

    pub fn is_manifestly_solved_at(&self, d: &DomainTuple) -> bool {
        match Self::induced_assignment(d) {
            Some(a) => self.constraints.iter().all(|c| c.holds(&a.0)),
            None => false,
        }
    }

    /// The unique assignment of an all-singleton tuple.
    pub fn induced_assignment(d: &DomainTuple) -> Option<Assignment> {
        d.iter()
            .map(|dom| dom.single().cloned())
            .collect::<Option<Vec<_>>>()
            .map(Assignment)
    }

    /// The CSP with new domains and every extensional relation filtered to
    /// them. New domains must be subsets of the current ones.
    pub fn restrict_constraints(&self, new_domains: &DomainTuple) -> Result<Csp, ModelError> {
        self.check_len(new_domains)?;
        for (var, dom) in self.variables.iter().zip(new_domains.iter()) {
            if !dom.is_subset(&var.domain) {
                return Err(ModelError::NotSubset {
                    var: var.name.clone(),
                });
            }
        }
        let mut out = self.with_domains(new_domains)?;
        out.constraints = self
            .constraints
            .iter()
            .map(|c| c.restricted(new_domains))
            .collect();
        Ok(out)
    }

    pub fn render_assignment(&self, a: &Assignment) -> String {
        self.variables
            .iter()
            .zip(&a.0)
            .map(|(var, v)| format!("{}={}", var.name, v))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// `x∈D` pairs for display.
    pub fn render_domains(&self, d: &DomainTuple) -> String {
        self.variables
            .iter()
            .zip(d.iter())
            .map(|(var, dom)| format!("{}∈{}", var.name, dom.compact()))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl fmt::Display for Csp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cs: Vec<String> = self.constraints.iter().map(|c| c.to_string()).collect();
        write!(f, "⟨{} ; {}⟩", cs.join(", "), self.render_domains(&self.domains()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{and3, and3_table};

    fn sym(s: &str) -> Value {
        Value::sym(s)
    }

    fn a(vals: &[&str]) -> Assignment {
        Assignment(vals.iter().map(|s| sym(s)).collect())
    }

    #[test]
    fn satisfies_and3_rows() {
        let p = and3();
        let c = &p.constraints()[0];
        assert!(satisfies(&a(&["t", "f", "f"]), c).unwrap());
        assert!(!satisfies(&a(&["t", "t", "f"]), c).unwrap());
        assert!(satisfies(&a(&["t", "t", "t"]), c).unwrap());
        assert_eq!(and3_table().len(), 9);
    }

    #[test]
    fn satisfies_empty_scope_identity() {
        let c = Constraint::table(vec![], Table::new(0, vec![vec![]]).unwrap()).unwrap();
        assert!(satisfies(&Assignment(vec![Value::Int(3)]), &c).unwrap());
    }

    #[test]
    fn satisfies_short_assignment_is_structural_error() {
        let p = and3();
        assert!(matches!(
            satisfies(&a(&["t"]), &p.constraints()[0]),
            Err(ModelError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn failed_predicates() {
        let mut p = Csp::default();
        p.add_var("x", Domain::empty());
        assert!(p.is_failed());

        let mut p = Csp::default();
        let x = p.add_var("x", Domain::range(1, 1));
        let y = p.add_var("y", Domain::range(1, 1));
        p.add_constraint(Constraint::builtin(Builtin::Lt, vec![x, y]).unwrap())
            .unwrap();
        assert!(p.is_failed());

        let mut p = Csp::default();
        let x = p.add_var("x", Domain::range(1, 1));
        let y = p.add_var("y", Domain::range(2, 2));
        p.add_constraint(Constraint::builtin(Builtin::Lt, vec![x, y]).unwrap())
            .unwrap();
        assert!(!p.is_failed());
    }

    #[test]
    fn manifestly_solved() {
        let p = and3();
        let single = |vals: &[&str]| {
            DomainTuple::new(vals.iter().map(|v| Domain::symbols(&[v])).collect())
        };
        assert!(p.is_manifestly_solved_at(&single(&["t", "f", "f"])));
        assert!(!p.is_manifestly_solved_at(&single(&["t", "t", "f"])));

        let mut q = Csp::default();
        q.add_var("x", Domain::range(1, 2));
        assert!(!q.is_manifestly_solved());
    }

    #[test]
    fn restrict_filters_tables() {
        let p = and3();
        let mut d = p.domains();
        d.set(2, Domain::symbols(&["f"]));
        let r = p.restrict_constraints(&d).unwrap();
        assert_eq!(r.constraints()[0].as_table().unwrap().len(), 5);

        let same = p.restrict_constraints(&p.domains()).unwrap();
        assert_eq!(same, p);

        let mut wiped = p.domains();
        wiped.set(0, Domain::empty());
        let r = p.restrict_constraints(&wiped).unwrap();
        assert!(r.constraints()[0].as_table().unwrap().is_empty());
    }

    #[test]
    fn restrict_rejects_supersets() {
        let p = and3();
        let mut d = p.domains();
        d.set(0, Domain::symbols(&["t", "f", "u", "x"]));
        assert!(matches!(
            p.restrict_constraints(&d),
            Err(ModelError::NotSubset { .. })
        ));
    }

    #[test]
    fn mixed_values_rejected() {
        let mut p = Csp::default();
        p.add_var("x", Domain::range(1, 2));
        assert_eq!(
            p.try_add_var("y", Domain::symbols(&["a"])),
            Err(ModelError::MixedValues)
        );
    }
}
