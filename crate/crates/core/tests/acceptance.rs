//! The nine acceptance criteria, one PASS/FAIL line each. Runs without the
//! libtest harness so the lines come out in order; exits nonzero on any FAIL.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rulecp::arc::{ac3, arc_rules, is_arc_consistent_at};
use rulecp::bench::{self, BenchPlan};
use rulecp::cli;
use rulecp::disjunction::cd_reduce;
use rulecp::generate;
use rulecp::instances::abs_diff_disjunctive;
use rulecp::io;
use rulecp::membership::{self, GenConfig};
use rulecp::model::{Constraint, Csp, Domain, DomainTuple, VarId};
use rulecp::oracle::{self, OracleBudget};
use rulecp::par::Execution;
use rulecp::propagator::{Propagator, PropagatorConfig, PropagatorKind, RuleMode};
use rulecp::rule::{
    check_commute, check_idempotent, check_inflationary, check_monotonic, is_closed_under, nested_pairs_exhaustive,
    random_subset, sub_tuples, RuleRef,
};
use rulecp::scheduler::{Choose, RuleSet, SchedulerName};
use rulecp::search::{solve, Mode, SearchConfig, SplitStrategy};

type Verdict = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Verdict);

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name)
}

fn run_cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("rulecp").chain(args.iter().copied());
    let code = cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn and3_minimal_rules() -> Verdict {
    let table = corpus("and3.table");
    let (code, out, _) = run_cli(&["rules", "gen", table.to_str().unwrap()]);
    ensure(code == 0, || format!("rules gen exited {code}"))?;
    let lines: Vec<&str> = out.lines().collect();
    ensure(lines.len() == 18, || format!("{} rules, expected 18", lines.len()))?;
    ensure(lines.contains(&"y in {f,u} -> z != t"), || "y in {u,f} -> z != t missing".into())?;

    let names: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    let tc = membership::TableConstraint::from_table(io::read_table(&table).unwrap().table);
    let exhaustive = oracle::enumerate_all_minimal_rules(&tc).map_err(|e| e.to_string())?;
    let generated: BTreeSet<_> = io::parse_rules(&out, &names).map_err(|e| e.to_string())?.into_iter().collect();
    ensure(generated == exhaustive, || "generated set differs from the exhaustive enumeration".into())?;

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.rules");
    std::fs::write(&bad, "x in {u}, y in {u,f} -> z != t\ny in {u} -> z != t\n").unwrap();
    let (code, out, _) = run_cli(&["rules", "check", bad.to_str().unwrap(), "--table", table.to_str().unwrap()]);
    let flagged = out.lines().filter(|l| l.starts_with("non-minimal:")).count();
    ensure(code == 3 && flagged == 2, || format!("check exited {code}, flagged {flagged} of 2"))?;
    Ok("18 rules equal to the exhaustive enumeration; both counterexamples non-minimal".into())
}

fn ac_inner(p: &Csp) -> RuleSet {
    let (rules, comm) = arc_rules(p);
    let mut set = RuleSet::from_rules(rules.into_iter().map(|r| Arc::new(r) as RuleRef).collect());
    set.comm = comm;
    set
}

fn cd_worked_example() -> Verdict {
    let p = abs_diff_disjunctive();
    let (out, sides) = cd_reduce(&p.constraints()[0], &p.domains(), &ac_inner, SchedulerName::FineTuned)
        .ok_or("not a disjunction")?;
    let want = [Domain::range(4, 8), Domain::range(3, 7)];
    ensure(out.as_slice() == want, || format!("result {out}"))?;
    ensure(sides[0].domains.as_slice() == want, || format!("first side {}", sides[0].domains))?;
    let second = [Domain::range(4, 6), Domain::range(5, 7)];
    ensure(sides[1].domains.as_slice() == second, || format!("second side {}", sides[1].domains))?;
    Ok(format!("{} (sides {} and {})", p.render_domains(&out), p.render_domains(&sides[0].domains), p.render_domains(&sides[1].domains)))
}

fn ac3_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked_tuples = 0;
    for k in 0..200 {
        let p = generate::random_binary_csp(6, 5, &mut rng);
        let got = ac3(&p).domains();
        let want = oracle::arc_consistent_closure(&p);
        ensure(got == want, || format!("csp {k}: ac3 {got} vs closure {want}"))?;
        let rules: Vec<RuleRef> = arc_rules(&p).0.into_iter().map(|r| Arc::new(r) as RuleRef).collect();
        let mut samples = vec![got];
        samples.extend((0..20).map(|_| DomainTuple::new(p.domains().iter().map(|d| random_subset(d, &mut rng)).collect())));
        for d in samples {
            let consistent = is_arc_consistent_at(&p, &d);
            let closed = is_closed_under(&d, &rules);
            ensure(consistent == closed, || format!("csp {k} at {d}: arc consistent {consistent}, closed {closed}"))?;
            checked_tuples += 1;
        }
    }
    Ok(format!("200 CSPs, {checked_tuples} tuples checked both ways"))
}

fn fixpoint_uniqueness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for k in 0..50 {
        let (start, set) = generate::random_monotonic_rule_set(&mut rng);
        let naive = oracle::naive_rule_closure(&set.rules, &start);
        for name in SchedulerName::ALL {
            for seed in 0..20 {
                let fix = set
                    .run(name, start.clone(), Choose::Random(seed), None, false)
                    .map_err(|e| format!("set {k}: {e}"))?;
                ensure(fix.domains == naive, || {
                    format!("set {k}, {name}, seed {seed}: {} vs round-robin {naive}", fix.domains)
                })?;
            }
        }
    }
    Ok("50 rule sets x 4 schedulers x 20 seeds agree with round-robin".into())
}

fn hyper_arc_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let budget = OracleBudget::default();
    let (mut exact, mut failed) = (0, 0);
    for k in 0..100 {
        let tc = generate::random_table_constraint(3, 4, &mut rng);
        let rules = membership::generate_minimal_rules(&tc, &GenConfig::default()).map_err(|e| e.to_string())?;
        let mut p = Csp::default();
        for (i, u) in tc.universe().iter().enumerate() {
            p.add_var(&format!("v{i}"), u.clone());
        }
        p.add_constraint(Constraint::table(tc.scope().to_vec(), tc.table().clone()).unwrap()).unwrap();
        let scheduled = membership::reduction_rules(&rules, 0);
        for s in 0..10 {
            let start = DomainTuple::new(tc.universe().iter().map(|u| random_subset(u, &mut rng)).collect());
            let hac = oracle::hyper_arc_closure(&p.constraints()[0], &start, &budget).map_err(|e| e.to_string())?;
            let plain = membership::closure(&rules, &start);
            let fix = scheduled
                .run(SchedulerName::FineTuned, start.clone(), Choose::Fifo, None, false)
                .map_err(|e| e.to_string())?
                .domains;
            ensure(plain == fix, || format!("table {k} start {s}: scheduler {fix} vs plain closure {plain}"))?;
            ensure(plain.failure_normalized() == hac.failure_normalized(), || {
                format!("table {k} start {start}: rules {plain} vs hyper-arc {hac}")
            })?;
            if hac.has_empty() {
                failed += 1;
            }
            if plain == hac {
                exact += 1;
            }
        }
    }
    Ok(format!(
        "1000 starts equal up to failure; {exact} identical as tuples, {failed} failed starts compared as failure"
    ))
}

fn redundancy_soundness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let universe = vec![Domain::symbols(&["a", "b", "c"]); 3];
    let starts: Vec<DomainTuple> = sub_tuples(&universe).into_iter().map(DomainTuple::new).collect();
    let mut tables = vec![membership::TableConstraint::from_table(rulecp::instances::and3_table())];
    for _ in 0..40 {
        let density = rng.random_range(0.15..0.85);
        let table = generate::random_table(&universe, density, &mut rng);
        tables.push(membership::TableConstraint::new((0..3).map(VarId).collect(), table, universe.clone()).unwrap());
    }
    let (mut before, mut after) = (0, 0);
    for (k, tc) in tables.iter().enumerate() {
        let rules = membership::generate_minimal_rules(tc, &GenConfig::default()).map_err(|e| e.to_string())?;
        let pruned = membership::remove_redundant(&rules, tc);
        before += rules.len();
        after += pruned.len();
        let starts: Vec<DomainTuple> = if k == 0 {
            sub_tuples(tc.universe()).into_iter().map(DomainTuple::new).collect()
        } else {
            starts.clone()
        };
        for d in &starts {
            let a = membership::closure(&rules, d);
            let b = membership::closure(&pruned, d);
            ensure(a == b, || format!("table {k} from {d}: {a} vs {b}"))?;
        }
    }
    Ok(format!(
        "{} tables x {} start tuples; {before} rules reduced to {after}",
        tables.len(),
        starts.len()
    ))
}

fn search_completeness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let budget = OracleBudget::default();
    let mut runs = 0;
    for k in 0..100 {
        let p = generate::random_mixed_csp(5, 4, &mut rng);
        let want: BTreeSet<_> = oracle::enumerate_solutions(&p, &budget).map_err(|e| e.to_string())?;
        for (j, kind) in PropagatorKind::ALL.into_iter().enumerate() {
            let scheduler = SchedulerName::ALL[(k + j) % 4];
            let prop = Propagator::build(&p, PropagatorConfig::new(kind, scheduler));
            for strategy in SplitStrategy::all() {
                let cfg = SearchConfig {
                    strategy,
                    mode: Mode::All,
                    seed: k as u64,
                    execution: Execution::best(),
                    trace: false,
                };
                let out = solve(&p, &prop, &cfg).map_err(|e| e.to_string())?;
                let got: BTreeSet<_> = out.solutions.iter().cloned().collect();
                ensure(got.len() == out.solutions.len(), || format!("csp {k}: duplicate solutions"))?;
                ensure(got == want, || {
                    format!("csp {k} {kind} {scheduler} {strategy:?}: {} solutions vs {}", got.len(), want.len())
                })?;
                runs += 1;
            }
        }
    }
    Ok(format!("100 CSPs, {runs} runs over 4 propagators x 6 strategies"))
}

fn scheduler_ordering() -> Verdict {
    let files = ["and3.json", "and3_circuit.json", "and11.json", "abs_diff.json", "lt_chain.json", "unsat.json"];
    let problems = files
        .iter()
        .map(|f| Ok((f.trim_end_matches(".json").to_string(), io::read_problem(&corpus(f)).map_err(|e| e.to_string())?)))
        .collect::<Result<Vec<_>, String>>()?;
    let plan = BenchPlan {
        problems,
        propagator: PropagatorKind::Cd,
        schedulers: SchedulerName::ALL.to_vec(),
        rules: vec![RuleMode::All, RuleMode::Minimized],
        seeds: (0..4).collect(),
        execution: Execution::best(),
    };
    let rows = bench::run(&plan).map_err(|e| e.to_string())?;
    let violations = bench::check_ordering(&rows);
    ensure(violations.is_empty(), || {
        violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
    })?;
    let ratios: Vec<String> = bench::ratio_report(&rows)
        .lines()
        .filter(|l| l.contains("and11 finetuned all/minimized") || l.contains("and11 all generic/finetuned"))
        .map(|l| l.trim_start_matches("ratio ").to_string())
        .collect();
    Ok(format!("{} rows, no violations; {}", rows.len(), ratios.join(", ")))
}

/// Local samples over the scheme of `r` within `universe`.
fn local(r: &dyn rulecp::rule::ReductionRule, universe: &[Domain]) -> Vec<Domain> {
    r.scheme().indices().iter().map(|&i| universe[i].clone()).collect()
}

fn contract_suite() -> Verdict {
    let mut problems: Vec<Csp> = ["and3.json", "abs_diff.json", "unsat.json"]
        .iter()
        .map(|f| io::read_problem(&corpus(f)).unwrap())
        .collect();
    let mut small = abs_diff_disjunctive();
    small = small.with_domains(&DomainTuple::new(vec![Domain::range(4, 6), Domain::range(4, 6)])).unwrap();
    problems[1] = small;
    problems.push(rulecp::instances::lt_chain(3, 3));
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    while problems.len() < 24 {
        let p = generate::random_mixed_csp(3, 3, &mut rng);
        if p.num_vars() >= 2 {
            problems.push(p);
        }
    }
    let (mut rules_checked, mut pairs_checked) = (0, 0);
    for (k, p) in problems.iter().enumerate() {
        let universe = p.domains().into_inner();
        ensure(universe.iter().all(|d| d.len() <= 3), || format!("problem {k} exceeds |D| <= 3"))?;
        let full: Vec<DomainTuple> = sub_tuples(&universe).into_iter().map(DomainTuple::new).collect();
        for kind in PropagatorKind::ALL {
            for mode in [RuleMode::All, RuleMode::Minimized] {
                let prop = Propagator::build(p, PropagatorConfig::new(kind, SchedulerName::FineTuned).rules(mode));
                let set = prop.rules();
                for r in &set.rules {
                    let u = local(r.as_ref(), &universe);
                    let subs = sub_tuples(&u);
                    check_inflationary(r.as_ref(), &subs).map_err(|d| format!("{} not inflationary at {d:?}", r.id()))?;
                    if r.flags().monotonic {
                        check_monotonic(r.as_ref(), &nested_pairs_exhaustive(&u))
                            .map_err(|e| format!("{} not monotonic: {e:?}", r.id()))?;
                    }
                    if r.flags().idempotent {
                        check_idempotent(r.as_ref(), &subs).map_err(|d| format!("{} not idempotent at {d:?}", r.id()))?;
                    }
                    rules_checked += 1;
                }
                for (f, g) in set.comm.pairs() {
                    check_commute(set.rules[f].as_ref(), set.rules[g].as_ref(), &full).map_err(|d| {
                        format!("{} and {} declared commuting but differ at {d}", set.rules[f].id(), set.rules[g].id())
                    })?;
                    pairs_checked += 1;
                }
            }
        }
    }
    Ok(format!("{rules_checked} rule instances, {pairs_checked} declared commuting pairs"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("and3 minimal-rule count", 1, and3_minimal_rules),
        ("constructive disjunction worked example", 1, cd_worked_example),
        ("AC-3 equivalence", 30, ac3_equivalence),
        ("least-fixpoint uniqueness", 60, fixpoint_uniqueness),
        ("hyper-arc equivalence", 60, hyper_arc_equivalence),
        ("redundancy soundness", 60, redundancy_soundness),
        ("search completeness", 60, search_completeness),
        ("scheduler ordering", 120, scheduler_ordering),
        ("contract suite", 120, contract_suite),
    ];
    let mut failures = 0;
    for (k, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = run();
        let took = start.elapsed();
        let verdict = match verdict {
            Ok(detail) if took > Duration::from_secs(*limit) => {
                Err(format!("{detail}; took {:.2}s, limit {limit}s", took.as_secs_f64()))
            }
            v => v,
        };
        match verdict {
            Ok(detail) => println!("PASS {} {name}: {detail} ({:.2}s <= {limit}s)", k + 1, took.as_secs_f64()),
            Err(why) => {
                failures += 1;
                println!("FAIL {} {name}: {why}", k + 1);
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
