//! Small named problems used by tests, the bench corpus and the CLI docs.

use crate::model::{Builtin, Constraint, Csp, Domain, Table, Value, VarId};

/// Kleene conjunction over `{t, f, u}` as a table of 9 triples `(x, y, x∧y)`.
pub fn and3_table() -> Table {
    let rank = |v: &str| match v {
        "f" => 0,
        "u" => 1,
        _ => 2,
    };
    let vals = ["t", "f", "u"];
    let tuples = vals.iter().flat_map(|x| {
        vals.iter().map(move |y| {
            let z = if rank(x) <= rank(y) { x } else { y };
            vec![Value::sym(x), Value::sym(y), Value::sym(z)]
        })
    });
    Table::new(3, tuples).expect("and3 arity")
}

/// `⟨and3(x, y, z) ; x, y, z ∈ {t, f, u}⟩`.
pub fn and3() -> Csp {
    let mut p = Csp::default();
    let dom = Domain::symbols(&["t", "f", "u"]);
    let x = p.add_var("x", dom.clone());
    let y = p.add_var("y", dom.clone());
    let z = p.add_var("z", dom);
    p.add_constraint(Constraint::table(vec![x, y, z], and3_table()).unwrap())
        .unwrap();
    p
}

/// `z = min(x, y)` over the chain `0 < 1 < … < levels-1`: a many-valued
/// conjunction. `levels = 3` is and3 up to renaming.
pub fn chain_and_table(levels: i64) -> Table {
    let tuples = (0..levels).flat_map(|x| {
        (0..levels).map(move |y| vec![Value::Int(x), Value::Int(y), Value::Int(x.min(y))])
    });
    Table::new(3, tuples).expect("ternary")
}

/// Two-valued conjunction `z = x ∧ y` over `{0, 1}`.
pub fn bool_and_table() -> Table {
    chain_and_table(2)
}

/// `⟨|x−y| = 1 ; x ∈ [4..10], y ∈ [2..7]⟩` with the absolute difference
/// written as the disjunction `(x − y = 1) ∨ (y − x = 1)`.
pub fn abs_diff_disjunctive() -> Csp {
    let mut p = Csp::default();
    let x = p.add_var("x", Domain::range(4, 10));
    let y = p.add_var("y", Domain::range(2, 7));
    p.add_constraint(abs_diff_as_disjunction(x, y)).unwrap();
    p
}

pub fn abs_diff_as_disjunction(x: VarId, y: VarId) -> Constraint {
    let first = Constraint::builtin(Builtin::EqOffset(1), vec![x, y]).unwrap();
    let second = Constraint::builtin(Builtin::EqOffset(1), vec![y, x]).unwrap();
    Constraint::disjunction(vec![first], vec![second]).unwrap()
}

/// `x1 < x2 < … < xn` over `[1..size]`.
pub fn lt_chain(n: usize, size: i64) -> Csp {
    let mut p = Csp::default();
    let vars: Vec<VarId> = (0..n)
        .map(|i| p.add_var(&format!("x{}", i + 1), Domain::range(1, size)))
        .collect();
    for w in vars.windows(2) {
        p.add_constraint(Constraint::builtin(Builtin::Lt, vec![w[0], w[1]]).unwrap())
            .unwrap();
    }
    p
}
