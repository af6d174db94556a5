use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::table::{read_table, NamedTable};
use super::{read_file, IoError};
use crate::model::{Builtin, Constraint, Csp, Domain, Relation, Value, VarId};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    variables: Vec<VarSpec>,
    #[serde(default)]
    constraints: Vec<ConstraintSpec>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VarSpec {
    name: String,
    domain: DomainSpec,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum DomainSpec {
    Range { from: i64, to: i64 },
    List(Vec<ValueSpec>),
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum ValueSpec {
    Int(i64),
    Str(String),
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Table,
    Builtin,
    Disjunction,
}

#[derive(Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Op {
    Lt,
    EqOffset,
    AbsDiffEq,
    NeValue,
    InSet,
}

#[derive(Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Payload {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tuples: Option<Vec<Vec<ValueSpec>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    op: Option<Op>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<ValueSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values: Option<Vec<ValueSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    branches: Option<Vec<Vec<ConstraintSpec>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintSpec {
    kind: Kind,
    #[serde(default)]
    scope: Vec<String>,
    #[serde(default)]
    payload: Payload,
}

impl ValueSpec {
    fn value(&self) -> Value {
        match self {
            ValueSpec::Int(n) => Value::Int(*n),
            ValueSpec::Str(s) => Value::parse(s),
        }
    }

    fn of(v: &Value) -> Self {
        match v {
            Value::Int(n) => ValueSpec::Int(*n),
            Value::Sym(s) => ValueSpec::Str(s.to_string()),
        }
    }
}

struct Builder<'a> {
    csp: Csp,
    base: Option<&'a Path>,
}

impl Builder<'_> {
    fn scope(&self, at: &str, names: &[String]) -> Result<Vec<VarId>, IoError> {
        names
            .iter()
            .map(|n| {
                self.csp
                    .var_by_name(n)
                    .ok_or_else(|| IoError::invalid(at, format!("unknown variable `{n}`")))
            })
            .collect()
    }

    fn constraint(&self, at: &str, spec: &ConstraintSpec) -> Result<Constraint, IoError> {
        let p = &spec.payload;
        let c = match spec.kind {
            Kind::Table => {
                let scope = self.scope(at, &spec.scope)?;
                let table = match (&p.tuples, &p.file) {
                    (Some(rows), None) => {
                        let tuples = rows.iter().map(|r| r.iter().map(ValueSpec::value).collect());
                        crate::model::Table::new(scope.len(), tuples).map_err(|e| IoError::invalid(at, e))?
                    }
                    (None, Some(file)) => {
                        let path = self.base.map_or_else(|| Path::new(file).to_path_buf(), |b| b.join(file));
                        let NamedTable { table, .. } = read_table(&path)?;
                        table
                    }
                    _ => return Err(IoError::invalid(at, "table payload needs exactly one of `tuples` or `file`")),
                };
                Constraint::table(scope, table)
            }
            Kind::Builtin => {
                let scope = self.scope(at, &spec.scope)?;
                let need_c = || p.c.ok_or_else(|| IoError::invalid(at, "missing `c`"));
                let b = match p.op.ok_or_else(|| IoError::invalid(at, "missing `op`"))? {
                    Op::Lt => Builtin::Lt,
                    Op::EqOffset => Builtin::EqOffset(need_c()?),
                    Op::AbsDiffEq => Builtin::AbsDiffEq(need_c()?),
                    Op::NeValue => Builtin::NotEqualValue(
                        p.value.as_ref().ok_or_else(|| IoError::invalid(at, "missing `value`"))?.value(),
                    ),
                    Op::InSet => Builtin::InSet(
                        p.values
                            .as_ref()
                            .ok_or_else(|| IoError::invalid(at, "missing `values`"))?
                            .iter()
                            .map(ValueSpec::value)
                            .collect(),
                    ),
                };
                Constraint::builtin(b, scope)
            }
            Kind::Disjunction => {
                let branches = p
                    .branches
                    .as_ref()
                    .ok_or_else(|| IoError::invalid(at, "missing `branches`"))?;
                if branches.len() < 2 {
                    return Err(IoError::invalid(at, "a disjunction needs at least two branches"));
                }
                let mut built = Vec::new();
                for (b, branch) in branches.iter().enumerate() {
                    let cs = branch
                        .iter()
                        .enumerate()
                        .map(|(k, s)| self.constraint(&format!("{at}.branches[{b}][{k}]"), s))
                        .collect::<Result<Vec<_>, _>>()?;
                    built.push(cs);
                }
                let mut acc = built.pop().expect("two branches");
                // b0 ∨ (b1 ∨ (… ∨ bn))
                while let Some(prev) = built.pop() {
                    let d = Constraint::disjunction(prev, acc).map_err(|e| IoError::invalid(at, e))?;
                    acc = vec![d];
                }
                let c = acc.pop().expect("folded");
                if !spec.scope.is_empty() {
                    let given: BTreeSet<VarId> = self.scope(at, &spec.scope)?.into_iter().collect();
                    let union: BTreeSet<VarId> = c.scope().iter().copied().collect();
                    if given != union {
                        return Err(IoError::invalid(at, "scope differs from the variables of the branches"));
                    }
                }
                return Ok(c);
            }
        };
        c.map_err(|e| IoError::invalid(at, e))
    }
}

fn domain_spec(d: &Domain) -> DomainSpec {
    if d.len() >= 2 && d.is_integral() {
        let lo = d.first().and_then(Value::as_int).unwrap_or_default();
        let hi = d.last().and_then(Value::as_int).unwrap_or_default();
        if (hi - lo) as usize + 1 == d.len() {
            return DomainSpec::Range { from: lo, to: hi };
        }
    }
    DomainSpec::List(d.iter().map(ValueSpec::of).collect())
}

/// Parses a problem document. Relative table `file` paths resolve against
/// `base`.
pub fn parse_problem(text: &str, base: Option<&Path>) -> Result<Csp, IoError> {
    let file: ProblemFile =
        serde_json::from_str(text).map_err(|e| IoError::syntax(e.line(), e.column(), e.to_string()))?;
    let mut b = Builder { csp: Csp::default(), base };
    for (i, v) in file.variables.iter().enumerate() {
        let domain: Domain = match &v.domain {
            DomainSpec::Range { from, to } => Domain::range(*from, *to),
            DomainSpec::List(vals) => vals.iter().map(ValueSpec::value).collect(),
        };
        b.csp
            .try_add_var(&v.name, domain)
            .map_err(|e| IoError::invalid(format!("variables[{i}]"), e))?;
    }
    for (i, spec) in file.constraints.iter().enumerate() {
        let at = format!("constraints[{i}]");
        let c = b.constraint(&at, spec)?;
        b.csp.add_constraint(c).map_err(|e| IoError::invalid(&at, e))?;
    }
    Ok(b.csp)
}

pub fn read_problem(path: &Path) -> Result<Csp, IoError> {
    parse_problem(&read_file(path)?, path.parent())
}

fn constraint_spec(p: &Csp, c: &Constraint) -> ConstraintSpec {
    let scope = c.scope().iter().map(|&v| p.name(v).to_string()).collect();
    let values = |d: &Domain| d.iter().map(ValueSpec::of).collect();
    let (kind, payload) = match c.relation() {
        Relation::Table(t) => (
            Kind::Table,
            Payload {
                tuples: Some(t.iter().map(|r| r.iter().map(ValueSpec::of).collect()).collect()),
                ..Payload::default()
            },
        ),
        Relation::Builtin(b) => {
            let mut payload = Payload::default();
            payload.op = Some(match b {
                Builtin::Lt => Op::Lt,
                Builtin::EqOffset(k) => {
                    payload.c = Some(*k);
                    Op::EqOffset
                }
                Builtin::AbsDiffEq(k) => {
                    payload.c = Some(*k);
                    Op::AbsDiffEq
                }
                Builtin::NotEqualValue(a) => {
                    payload.value = Some(ValueSpec::of(a));
                    Op::NeValue
                }
                Builtin::InSet(s) => {
                    payload.values = Some(values(s));
                    Op::InSet
                }
            });
            (Kind::Builtin, payload)
        }
        Relation::Disjunction(d) => (
            Kind::Disjunction,
            Payload {
                branches: Some(
                    d.branches
                        .iter()
                        .map(|b| b.iter().map(|c| constraint_spec(p, c)).collect())
                        .collect(),
                ),
                ..Payload::default()
            },
        ),
    };
    ConstraintSpec { kind, scope, payload }
}

/// Pretty JSON that [`parse_problem`] reads back to an identical CSP. Tables
/// are written inline.
pub fn write_problem(p: &Csp) -> String {
    let file = ProblemFile {
        variables: p
            .variables()
            .iter()
            .map(|v| VarSpec {
                name: v.name.clone(),
                domain: domain_spec(&v.domain),
            })
            .collect(),
        constraints: p.constraints().iter().map(|c| constraint_spec(p, c)).collect(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("plain data serializes");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{abs_diff_disjunctive, and3, lt_chain};

    #[test]
    fn round_trips() {
        for p in [and3(), abs_diff_disjunctive(), lt_chain(4, 5)] {
            let text = write_problem(&p);
            assert_eq!(parse_problem(&text, None).unwrap(), p, "{text}");
        }
    }

    #[test]
    fn range_and_list_domains() {
        let p = parse_problem(
            r#"{"variables":[{"name":"x","domain":{"from":1,"to":3}},{"name":"y","domain":[3,"1",2]}],
                "constraints":[{"kind":"builtin","scope":["x","y"],"payload":{"op":"lt"}}]}"#,
            None,
        )
        .unwrap();
        assert_eq!(p.domain(VarId(0)), p.domain(VarId(1)));
        assert_eq!(p.constraints()[0].relation(), &Relation::Builtin(Builtin::Lt));
    }

    #[test]
    fn nary_disjunction_nests() {
        let p = parse_problem(
            r#"{"variables":[{"name":"x","domain":{"from":0,"to":5}},{"name":"y","domain":{"from":0,"to":5}}],
                "constraints":[{"kind":"disjunction","payload":{"branches":[
                  [{"kind":"builtin","scope":["x","y"],"payload":{"op":"eq_offset","c":1}}],
                  [{"kind":"builtin","scope":["y","x"],"payload":{"op":"eq_offset","c":1}}],
                  [{"kind":"builtin","scope":["x"],"payload":{"op":"ne_value","value":0}}]]}}]}"#,
            None,
        )
        .unwrap();
        let d = p.constraints()[0].as_disjunction().unwrap();
        assert!(d.branches[1][0].as_disjunction().is_some());
        assert_eq!(parse_problem(&write_problem(&p), None).unwrap(), p);
    }

    #[test]
    fn unknown_kind_has_position() {
        let err = parse_problem(
            "{\"variables\": [],\n \"constraints\": [{\"kind\": \"global\", \"scope\": []}]}",
            None,
        )
        .unwrap_err();
        assert!(matches!(err, IoError::Syntax { line: 2, .. }), "{err}");
    }

    #[test]
    fn semantic_errors_name_the_constraint() {
        let err = parse_problem(
            r#"{"variables":[{"name":"x","domain":[1,2]}],
                "constraints":[{"kind":"builtin","scope":["x","q"],"payload":{"op":"lt"}}]}"#,
            None,
        )
        .unwrap_err();
        assert!(err.to_string().contains("constraints[0]"), "{err}");
        let mixed = parse_problem(r#"{"variables":[{"name":"x","domain":[1,"a"]}]}"#, None);
        assert!(mixed.is_err());
    }

    #[test]
    fn table_file_reference() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("t.table"), "a b\n1 2\n2 1\n").unwrap();
        let json = r#"{"variables":[{"name":"x","domain":[1,2]},{"name":"y","domain":[1,2]}],
            "constraints":[{"kind":"table","scope":["x","y"],"payload":{"file":"t.table"}}]}"#;
        std::fs::write(dir.path().join("p.json"), json).unwrap();
        let p = read_problem(&dir.path().join("p.json")).unwrap();
        assert_eq!(p.constraints()[0].as_table().unwrap().len(), 2);
    }
}
