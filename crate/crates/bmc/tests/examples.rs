mod common;

use bmc::{
    check_bounded, check_with, encode_cnf, evaluate, to_ssa, unroll, version_chains, BmcConfig,
    BmcError, CheckKind, EncodeOptions, UnrolledOutcome, UnwindPolicy, Verdict,
};
use common::checked;
use minic::{interpret_main, load, Limits, RuntimeErrorKind, Status};
use solver::{solve_cnf, CnfOutcome};

fn prog(src: &str) -> minic::CheckedProgram {
    load(src).unwrap_or_else(|e| panic!("{}", e.render("input")))
}

fn violation_formula(src: &str) -> bmc::TraceFormula {
    let u = unroll(&prog(src), 4, 4).unwrap();
    encode_cnf(&to_ssa(&u), &EncodeOptions::default()).unwrap()
}

#[test]
fn while_loop_unrolls_to_nested_ifs() {
    let p = prog("int main() { int x = nondet_int(); while (x > 0) { x = x - 1; } return 0; }");
    let u = unroll(&p, 2, 1).unwrap();
    assert_eq!(u.count_checks(CheckKind::Unwinding), 1);
    // Concrete runs agree with the unrolled program inside the bound and
    // trip the unwinding check beyond it.
    for (x, fails) in [(0, false), (2, false), (3, true), (100, true)] {
        let out = evaluate(&u, &[x]);
        assert_eq!(
            matches!(
                out,
                UnrolledOutcome::CheckFailed {
                    kind: CheckKind::Unwinding,
                    ..
                }
            ),
            fails,
            "x={x}"
        );
    }
}

#[test]
fn unrolled_algorithm_matches_interpreter() {
    for name in ["distribute_candies_buggy.c", "distribute_candies_fixed.c"] {
        let p = checked(name);
        let u = unroll(&p, 8, 8).unwrap();
        let concrete = interpret_main(&p, &Limits::default()).unwrap();
        let unrolled = evaluate(&u, &[]);
        match concrete.status {
            Status::AssertionViolated { span } => assert_eq!(
                unrolled,
                UnrolledOutcome::CheckFailed {
                    kind: CheckKind::Assertion,
                    span
                },
                "{name}"
            ),
            Status::Completed { .. } => assert_eq!(unrolled, UnrolledOutcome::Completed, "{name}"),
            other => panic!("{name}: unexpected {other:?}"),
        }
    }
}

#[test]
fn self_recursion_hits_inline_bound() {
    let p = prog("int f(int n) { return f(n); }\nint main() { return f(1); }");
    assert!(
        matches!(unroll(&p, 4, 2), Err(BmcError::RecursionBound { ref function, .. }) if function == "f")
    );
}

#[test]
fn straight_line_ssa() {
    let u = unroll(
        &prog("int main() { int x = 1; x = x + 1; return 0; }"),
        1,
        1,
    )
    .unwrap();
    let text = to_ssa(&u).to_string();
    assert!(text.contains("x#1 = 1\n"), "{text}");
    assert!(text.contains("x#2 = x#1 + 1\n"), "{text}");
}

#[test]
fn branches_merge_by_condition() {
    let src = "int main() { int c = nondet_int(); int x; if (c) x = 1; else x = 2; int y = x; return 0; }";
    let text = to_ssa(&unroll(&prog(src), 1, 1).unwrap()).to_string();
    assert!(text.contains("x#2 = 1  [if pc#"), "{text}");
    assert!(text.contains("x#3 = 2  [if pc#"), "{text}");
    assert!(text.contains("x#4 = merge(cond#1, x#2, x#3)"), "{text}");
    assert!(text.contains("y#1 = x#4"), "{text}");
}

#[test]
fn accumulator_has_one_version_chain() {
    let p = checked("distribute_candies_buggy.c");
    let line_id = |line: u32| {
        p.statements()
            .iter()
            .find(|s| s.span.line == line)
            .unwrap()
            .id
    };
    let (init, dup) = (line_id(3), line_id(4));
    let u = unroll(&p, 8, 8).unwrap();
    let ssa = to_ssa(&u);
    let chains = version_chains(&ssa);
    let ans: Vec<_> = (0..u.vars.len() as u32)
        .map(bmc::VarId)
        .filter(|v| u.var(*v).name == "ans")
        .collect();
    assert_eq!(ans.len(), 1);
    let origins: Vec<_> = chains[&ans[0]]
        .iter()
        .filter_map(|v| ssa.def(*v).origin)
        .collect();
    assert_eq!(&origins[..2], &[init, dup]);
    for w in chains[&ans[0]].windows(2) {
        assert!(w[0] < w[1], "versions are defined in order");
    }
}

#[test]
fn implied_assertion_is_unsat() {
    let tf = violation_formula(
        "int main() { int x = nondet_int(); assume(x > 0); assert(x >= 1); return 0; }",
    );
    assert!(matches!(
        solve_cnf(&tf.cnf(), &[]).unwrap(),
        CnfOutcome::Unsat(_)
    ));
}

#[test]
fn unique_violating_input_is_found() {
    let tf = violation_formula("int main() { int x = nondet_int(); assert(x != 5); return 0; }");
    let CnfOutcome::Sat(model) = solve_cnf(&tf.cnf(), &[]).unwrap() else {
        panic!("expected SAT");
    };
    assert_eq!(tf.value("x#1", &model), Some(5));
    assert_eq!(tf.decode_inputs(&model), vec![5]);
}

#[test]
fn false_assertion_needs_no_inputs() {
    let tf = violation_formula("int main() { assert(0); return 0; }");
    let CnfOutcome::Sat(model) = solve_cnf(&tf.cnf(), &[]).unwrap() else {
        panic!("expected SAT");
    };
    assert!(tf.decode_inputs(&model).is_empty());
}

#[test]
fn algorithm_as_printed_is_violated_through_duplicate_line() {
    let p = checked("distribute_candies_buggy.c");
    let dup = p
        .statements()
        .iter()
        .find(|s| s.text == "ans = 0 + 1;")
        .unwrap()
        .id;
    match check_bounded(&p, 8, 8).unwrap() {
        Verdict::Violated(cex) => {
            assert!(cex.inputs.is_empty());
            assert!(cex.path.contains(&dup));
            assert_eq!(cex.failed.kind, CheckKind::Assertion);
            assert_eq!(cex.failed.span.line, 16);
        }
        v => panic!("expected violation, got {v:?}"),
    }
}

#[test]
fn corrected_algorithm_is_verified() {
    assert_eq!(
        check_bounded(&checked("distribute_candies_fixed.c"), 8, 8).unwrap(),
        Verdict::Verified { bound: 8 }
    );
}

#[test]
fn short_bound_reports_unwinding() {
    let p = prog("int main(){int i=0; while(i<100) i=i+1; assert(i==100);}");
    assert!(
        matches!(check_bounded(&p, 10, 8).unwrap(), Verdict::BoundExceeded { span } if span.line == 1)
    );
    let assume = BmcConfig {
        unwind: 10,
        unwind_policy: UnwindPolicy::Assume,
        ..BmcConfig::default()
    };
    assert_eq!(
        check_with(&p, &assume).unwrap(),
        Verdict::Verified { bound: 10 }
    );
    assert_eq!(
        check_bounded(&p, 100, 8).unwrap(),
        Verdict::Verified { bound: 100 }
    );
}

#[test]
fn capacity_limit_is_reported() {
    let p = prog("int main() { int x = nondet_int(); int y = nondet_int(); assert(x * y != 77 / y); return 0; }");
    let cfg = BmcConfig {
        max_vars: 1000,
        ..BmcConfig::default()
    };
    assert!(matches!(
        check_with(&p, &cfg),
        Err(BmcError::Capacity { limit: 1000, .. })
    ));
}

#[test]
fn runtime_errors_are_violations() {
    let p = prog("int main() { int x = nondet_int(); int y = 10 / x; return 0; }");
    match check_bounded(&p, 4, 4).unwrap() {
        Verdict::Violated(cex) => {
            assert_eq!(cex.failed.kind, CheckKind::DivByZero);
            assert_eq!(cex.inputs, vec![0]);
        }
        v => panic!("{v:?}"),
    }
    let p = prog(
        "int main() { char s[] = \"ab\"; int i = nondet_int(); assume(i >= 0); return s[i]; }",
    );
    match check_bounded(&p, 4, 4).unwrap() {
        Verdict::Violated(cex) => {
            assert_eq!(cex.failed.kind, CheckKind::OutOfBounds);
            assert!(cex.inputs[0] > 2);
        }
        v => panic!("{v:?}"),
    }
}

#[test]
fn dimacs_dump_and_sidecar() {
    let tf = violation_formula("int main() { int x = nondet_int(); assert(x != 5); return 0; }");
    let text = tf.to_dimacs();
    assert!(text.starts_with(&format!("p cnf {} {}\n", tf.num_vars, tf.clauses.len())));
    let map = tf.var_map();
    assert!(map.lines().any(|l| l.ends_with("= x#1[0]")), "{map}");
}

#[test]
fn fixtures_verdicts_match_interpreter() {
    for name in common::FIXTURES {
        let p = checked(name);
        let concrete = interpret_main(&p, &Limits::default()).unwrap();
        let verdict = check_bounded(&p, 64, 8).unwrap();
        match concrete.status {
            Status::RuntimeError {
                kind: RuntimeErrorKind::StepLimit,
                ..
            } => assert!(
                matches!(verdict, Verdict::BoundExceeded { .. }),
                "{name}: {verdict:?}"
            ),
            Status::AssertionViolated { .. } | Status::RuntimeError { .. } => {
                assert!(verdict.is_violated(), "{name}: {verdict:?}")
            }
            _ => assert!(
                matches!(verdict, Verdict::Verified { .. }),
                "{name}: {verdict:?}"
            ),
        }
    }
}
