use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use rulecp::instances::{chain_and_table, lt_chain};
use rulecp::membership::{generate_minimal_rules, GenConfig, TableConstraint};
use rulecp::model::{Constraint, Csp, Domain, VarId};
use rulecp::par::Execution;
use rulecp::propagator::{Propagator, PropagatorConfig, PropagatorKind};
use rulecp::scheduler::SchedulerName;
use rulecp::search::{solve, Mode, SearchConfig, Select, Split, SplitStrategy};

fn modes() -> Vec<(&'static str, Execution)> {
    let mut out = vec![("sequential", Execution::Sequential)];
    if Execution::Parallel.is_parallel() {
        out.push(("parallel", Execution::Parallel));
    }
    out
}

fn and_n(levels: i64) -> Csp {
    let mut p = Csp::default();
    for n in ["x", "y", "z"] {
        p.add_var(n, Domain::range(0, levels - 1));
    }
    let scope = (0..3).map(VarId).collect();
    p.add_constraint(Constraint::table(scope, chain_and_table(levels)).unwrap()).unwrap();
    p
}

fn rule_generation(c: &mut Criterion) {
    let mut group = c.benchmark_group("generate_minimal_rules");
    let tc = TableConstraint::from_table(chain_and_table(9));
    for (name, execution) in modes() {
        let cfg = GenConfig {
            execution,
            ..GenConfig::default()
        };
        group.bench_with_input(BenchmarkId::new(name, "and9"), &tc, |b, tc| {
            b.iter(|| generate_minimal_rules(black_box(tc), &cfg).unwrap().len())
        });
    }
    group.finish();
}

fn all_solutions(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_all");
    group.sample_size(20);
    let problems = [("and7", and_n(7)), ("lt_chain_6", lt_chain(6, 9))];
    for (pname, p) in &problems {
        let prop = Propagator::build(p, PropagatorConfig::new(PropagatorKind::Cd, SchedulerName::FineTuned));
        for (name, execution) in modes() {
            let cfg = SearchConfig {
                strategy: SplitStrategy {
                    select: Select::Random,
                    split: Split::Enum,
                },
                mode: Mode::All,
                seed: 1,
                execution,
                trace: false,
            };
            group.bench_with_input(BenchmarkId::new(name, pname), p, |b, p| {
                b.iter(|| solve(black_box(p), &prop, &cfg).unwrap().stats.solutions)
            });
        }
    }
    group.finish();
}

criterion_group!(benches, rule_generation, all_solutions);
criterion_main!(benches);
