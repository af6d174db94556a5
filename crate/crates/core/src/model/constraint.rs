use std::collections::BTreeSet;
use std::fmt;

use super::domain::{any_in_product, Domain, DomainTuple};
use super::value::{Value, VarId};
use super::ModelError;

/// Catalog of intensional constraints.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    /// `x < y` in the value order.
    Lt,
    /// `x - y = c`.
    EqOffset(i64),
    /// `|x - y| = c`.
    AbsDiffEq(i64),
    /// Unary `x ≠ a`.
    NotEqualValue(Value),
    /// Unary `x ∈ S`.
    InSet(Domain),
}

impl Builtin {
    pub fn arity(&self) -> usize {
        match self {
            Builtin::Lt | Builtin::EqOffset(_) | Builtin::AbsDiffEq(_) => 2,
            Builtin::NotEqualValue(_) | Builtin::InSet(_) => 1,
        }
    }

    pub fn holds(&self, args: &[Value]) -> bool {
        match self {
            Builtin::Lt => args[0] < args[1],
            Builtin::EqOffset(c) => match (args[0].as_int(), args[1].as_int()) {
                (Some(x), Some(y)) => x.checked_sub(y) == Some(*c),
                _ => false,
            },
            Builtin::AbsDiffEq(c) => match (args[0].as_int(), args[1].as_int()) {
                (Some(x), Some(y)) => x.checked_sub(y).map(i64::abs) == Some(*c),
                _ => false,
            },
            Builtin::NotEqualValue(a) => &args[0] != a,
            Builtin::InSet(s) => s.contains(&args[0]),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Builtin::Lt => "lt",
            Builtin::EqOffset(_) => "eq_offset",
            Builtin::AbsDiffEq(_) => "abs_diff_eq",
            Builtin::NotEqualValue(_) => "ne_value",
            Builtin::InSet(_) => "in_set",
        }
    }
}

/// An explicitly listed relation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Table {
    arity: usize,
    tuples: BTreeSet<Vec<Value>>,
}

impl Table {
    pub fn new(arity: usize, tuples: impl IntoIterator<Item = Vec<Value>>) -> Result<Self, ModelError> {
        let tuples: BTreeSet<Vec<Value>> = tuples.into_iter().collect();
        if let Some(bad) = tuples.iter().find(|t| t.len() != arity) {
            return Err(ModelError::ArityMismatch {
                expected: arity,
                found: bad.len(),
            });
        }
        Ok(Table { arity, tuples })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, t: &[Value]) -> bool {
        self.tuples.contains(t)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<Value>> {
        self.tuples.iter()
    }

    /// Keeps the tuples whose every component lies in the matching domain.
    pub fn restricted(&self, domains: &[&Domain]) -> Table {
        Table {
            arity: self.arity,
            tuples: self
                .tuples
                .iter()
                .filter(|t| t.iter().zip(domains).all(|(v, d)| d.contains(v)))
                .cloned()
                .collect(),
        }
    }

    /// Values occurring in any column.
    pub fn values(&self) -> Domain {
        self.tuples.iter().flatten().cloned().collect()
    }
}

/// Two alternative constraint sets over a shared variable universe.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Disjunction {
    pub branches: [Vec<Constraint>; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Table(Table),
    Builtin(Builtin),
    Disjunction(Box<Disjunction>),
}

/// A relation over a sequence of distinct variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    scope: Vec<VarId>,
    relation: Relation,
}

impl Constraint {
    pub fn table(scope: Vec<VarId>, table: Table) -> Result<Self, ModelError> {
        if table.arity() != scope.len() {
            return Err(ModelError::ArityMismatch {
                expected: scope.len(),
                found: table.arity(),
            });
        }
        Self::checked(scope, Relation::Table(table))
    }

    pub fn builtin(builtin: Builtin, scope: Vec<VarId>) -> Result<Self, ModelError> {
        if builtin.arity() != scope.len() {
            return Err(ModelError::ArityMismatch {
                expected: builtin.arity(),
                found: scope.len(),
            });
        }
        Self::checked(scope, Relation::Builtin(builtin))
    }

    /// `C1 ∨ C2`. The scope is the sorted union of the branch scopes.
    pub fn disjunction(first: Vec<Constraint>, second: Vec<Constraint>) -> Result<Self, ModelError> {
        let scope: BTreeSet<VarId> = first
            .iter()
            .chain(&second)
            .flat_map(|c| c.scope.iter().copied())
            .collect();
        Self::checked(
            scope.into_iter().collect(),
            Relation::Disjunction(Box::new(Disjunction {
                branches: [first, second],
            })),
        )
    }

    fn checked(scope: Vec<VarId>, relation: Relation) -> Result<Self, ModelError> {
        let distinct: BTreeSet<VarId> = scope.iter().copied().collect();
        if distinct.len() != scope.len() {
            return Err(ModelError::RepeatedScopeVariable);
        }
        Ok(Constraint { scope, relation })
    }

    pub fn scope(&self) -> &[VarId] {
        &self.scope
    }

    pub fn relation(&self) -> &Relation {
        &self.relation
    }

    pub fn arity(&self) -> usize {
        self.scope.len()
    }

    pub fn as_table(&self) -> Option<&Table> {
        match &self.relation {
            Relation::Table(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_disjunction(&self) -> Option<&Disjunction> {
        match &self.relation {
            Relation::Disjunction(d) => Some(d),
            _ => None,
        }
    }

    /// Largest variable index referenced, including inside disjunctions.
    pub fn max_var(&self) -> Option<usize> {
        self.scope.iter().map(|v| v.0).max()
    }

    /// Evaluates the constraint on a full-length assignment. Positions outside
    /// the scope are ignored.
    pub fn holds(&self, full: &[Value]) -> bool {
        match &self.relation {
            Relation::Table(t) => {
                let projected: Vec<Value> = self.scope.iter().map(|v| full[v.0].clone()).collect();
                t.contains(&projected)
            }
            Relation::Builtin(b) => {
                let projected: Vec<Value> = self.scope.iter().map(|v| full[v.0].clone()).collect();
                b.holds(&projected)
            }
            Relation::Disjunction(d) => d
                .branches
                .iter()
                .any(|branch| branch.iter().all(|c| c.holds(full))),
        }
    }

    /// Whether some tuple of the relation lies within the current domains.
    pub fn has_support_within(&self, d: &DomainTuple) -> bool {
        let doms: Vec<&Domain> = self.scope.iter().map(|v| d.get(v.0)).collect();
        if let Relation::Table(t) = &self.relation {
            return t
                .iter()
                .any(|tuple| tuple.iter().zip(&doms).all(|(v, dom)| dom.contains(v)));
        }
        let mut full: Vec<Value> = d
            .iter()
            .map(|dom| dom.first().cloned().unwrap_or(Value::Int(0)))
            .collect();
        any_in_product(&doms, |vals| {
            for (var, val) in self.scope.iter().zip(vals) {
                full[var.0] = val.clone();
            }
            self.holds(&full)
        })
    }

    /// Filters extensional relations (also inside disjunction branches) to
    /// the given domains.
    pub fn restricted(&self, d: &DomainTuple) -> Constraint {
        let relation = match &self.relation {
            Relation::Table(t) => {
                let doms: Vec<&Domain> = self.scope.iter().map(|v| d.get(v.0)).collect();
                Relation::Table(t.restricted(&doms))
            }
            Relation::Builtin(b) => Relation::Builtin(b.clone()),
            Relation::Disjunction(disj) => Relation::Disjunction(Box::new(Disjunction {
                branches: [
                    disj.branches[0].iter().map(|c| c.restricted(d)).collect(),
                    disj.branches[1].iter().map(|c| c.restricted(d)).collect(),
                ],
            })),
        };
        Constraint {
            scope: self.scope.clone(),
            relation,
        }
    }

    /// Renames every variable, branches included. `map` must be injective on
    /// the scope.
    pub fn remapped(&self, map: &dyn Fn(VarId) -> VarId) -> Constraint {
        let relation = match &self.relation {
            Relation::Disjunction(disj) => Relation::Disjunction(Box::new(Disjunction {
                branches: [
                    disj.branches[0].iter().map(|c| c.remapped(map)).collect(),
                    disj.branches[1].iter().map(|c| c.remapped(map)).collect(),
                ],
            })),
            other => other.clone(),
        };
        let mut scope: Vec<VarId> = self.scope.iter().map(|&v| map(v)).collect();
        if matches!(relation, Relation::Disjunction(_)) {
            scope.sort();
        }
        Constraint { scope, relation }
    }

    pub fn kind(&self) -> &'static str {
        match &self.relation {
            Relation::Table(_) => "table",
            Relation::Builtin(_) => "builtin",
            Relation::Disjunction(_) => "disjunction",
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let scope: Vec<String> = self.scope.iter().map(|v| v.to_string()).collect();
        match &self.relation {
            Relation::Table(t) => write!(f, "table[{}]({})", t.len(), scope.join(",")),
            Relation::Builtin(b) => write!(f, "{}({})", b.name(), scope.join(",")),
            Relation::Disjunction(_) => write!(f, "or({})", scope.join(",")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_semantics() {
        let i = Value::Int;
        assert!(Builtin::Lt.holds(&[i(1), i(2)]));
        assert!(!Builtin::Lt.holds(&[i(2), i(2)]));
        assert!(Builtin::EqOffset(1).holds(&[i(5), i(4)]));
        assert!(Builtin::AbsDiffEq(1).holds(&[i(4), i(5)]));
        assert!(!Builtin::AbsDiffEq(1).holds(&[i(4), i(6)]));
        assert!(!Builtin::NotEqualValue(i(3)).holds(&[i(3)]));
        assert!(Builtin::InSet(Domain::range(1, 2)).holds(&[i(2)]));
    }

    #[test]
    fn arity_is_checked() {
        assert!(Constraint::builtin(Builtin::Lt, vec![VarId(0)]).is_err());
        assert!(Table::new(2, vec![vec![Value::Int(1)]]).is_err());
        assert!(Constraint::builtin(Builtin::Lt, vec![VarId(0), VarId(0)]).is_err());
    }

    #[test]
    fn disjunction_scope_is_union() {
        let a = Constraint::builtin(Builtin::EqOffset(1), vec![VarId(2), VarId(0)]).unwrap();
        let b = Constraint::builtin(Builtin::Lt, vec![VarId(1), VarId(2)]).unwrap();
        let d = Constraint::disjunction(vec![a], vec![b]).unwrap();
        assert_eq!(d.scope(), &[VarId(0), VarId(1), VarId(2)]);
    }
}
