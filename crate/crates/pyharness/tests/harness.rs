use std::time::Duration;

use proptest::prelude::*;
use pyharness::{
    apply_record, mutate, mutate_adc, mutate_wbo, run_python, scan_mutation_sites, validate_mutant,
    EnvError, HangPolicy, MutationKind, PythonConfig, PythonProblem, RejectReason, RunStatus,
    SiteSelection, Validation,
};

fn fixture(name: &str) -> String {
    let path = format!(
        "{}/../../fixtures/python/{name}",
        env!("CARGO_MANIFEST_DIR")
    );
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn problem(source: String) -> PythonProblem {
    PythonProblem {
        id: "t".into(),
        description: None,
        source,
        ground_truth: None,
    }
}

fn quick() -> PythonConfig {
    PythonConfig {
        timeout: Duration::from_millis(1500),
        ..PythonConfig::default()
    }
}

#[test]
fn corrected_program_passes() {
    let out = run_python(&fixture("distribute_candies.py"), &quick()).unwrap();
    assert_eq!(out.status, RunStatus::Pass);
}

#[test]
fn injected_duplicate_fails_the_module_assert() {
    let out = run_python(&fixture("distribute_candies_adc.py"), &quick()).unwrap();
    assert_eq!(out.status, RunStatus::AssertionFailed { line: Some(11) });
}

#[test]
fn busy_loop_times_out() {
    let cfg = PythonConfig {
        timeout: Duration::from_millis(100),
        ..PythonConfig::default()
    };
    let out = run_python("while True: pass\n", &cfg).unwrap();
    assert_eq!(out.status, RunStatus::Timeout);
    assert!(out.duration_ms < 1000);
}

#[test]
fn runtime_errors_are_not_assertion_failures() {
    let out = run_python("x = 1 // 0\n", &quick()).unwrap();
    assert!(
        matches!(out.status, RunStatus::RuntimeError { ref message } if message.starts_with("ZeroDivisionError"))
    );
}

#[test]
fn missing_interpreter_is_an_environment_error() {
    let cfg = PythonConfig {
        interpreter: "/nonexistent/python".into(),
        ..PythonConfig::default()
    };
    assert!(matches!(
        run_python("pass\n", &cfg),
        Err(EnvError::InterpreterMissing(_))
    ));
}

#[test]
fn sites_of_the_candies_program() {
    let src = fixture("distribute_candies_adc.py");
    let wbo = scan_mutation_sites(&src, MutationKind::Wbo).unwrap();
    assert!(wbo
        .iter()
        .any(|s| s.text == ">" && s.line == 6 && !s.on_assert_line));
    assert!(wbo
        .iter()
        .any(|s| s.text == "==" && s.line == 11 && s.on_assert_line));
    let adc: Vec<_> = scan_mutation_sites(&src, MutationKind::Adc)
        .unwrap()
        .into_iter()
        .map(|s| s.text)
        .collect();
    assert!(adc.contains(&"ans = 0".to_string()));
    assert!(adc.contains(&"limit = min(limit, n)".to_string()));
    assert!(!adc.iter().any(|s| s.starts_with("ans +=")));
    assert!(scan_mutation_sites("x += 1\n", MutationKind::Adc)
        .unwrap()
        .is_empty());
}

#[test]
fn explicit_wbo_site_flips_the_loop_guard() {
    let src = fixture("distribute_candies_adc.py");
    let sites: Vec<_> = scan_mutation_sites(&src, MutationKind::Wbo)
        .unwrap()
        .into_iter()
        .filter(|s| !s.on_assert_line)
        .collect();
    let idx = sites.iter().position(|s| s.line == 6).unwrap();
    let (mutant, rec) = mutate_wbo(&src, SiteSelection::Index(idx)).unwrap();
    assert_eq!(rec.mutated, "        if n - i <= limit * 2:");
    assert_eq!(mutant.lines().nth(5).unwrap(), rec.mutated);
}

/// Applies `kind` at the eligible site on `line` and checks the printed
/// mutant is reproduced and accepted.
fn reproduce(original: &str, mutant: &str, kind: MutationKind, line: u32) -> Validation {
    let (src, printed) = (fixture(original), fixture(mutant));
    let eligible: Vec<_> = scan_mutation_sites(&src, kind)
        .unwrap()
        .into_iter()
        .filter(|s| !s.on_assert_line)
        .collect();
    let idx = eligible
        .iter()
        .position(|s| s.line == line)
        .expect("site on line");
    let (m, rec) = mutate(&src, kind, SiteSelection::Index(idx)).unwrap();
    assert_eq!(m, printed, "{original}");
    assert_eq!(apply_record(&src, &rec).unwrap(), printed);
    validate_mutant(&problem(src), &m, &quick(), HangPolicy::Accept).unwrap()
}

#[test]
fn printed_mutants_are_reproduced_and_accepted() {
    let v = reproduce(
        "distribute_candies.py",
        "distribute_candies_adc.py",
        MutationKind::Adc,
        3,
    );
    assert_eq!(v, Validation::Accepted { timed_out: false });
    let v = reproduce(
        "distribute_candies_463.py",
        "distribute_candies_463_adc.py",
        MutationKind::Adc,
        3,
    );
    assert_eq!(v, Validation::Accepted { timed_out: false });
    let v = reproduce(
        "furthest_distance.py",
        "furthest_distance_adc.py",
        MutationKind::Adc,
        2,
    );
    assert_eq!(v, Validation::Accepted { timed_out: false });
    // The flipped fuel check drives `a` below zero and the loop never ends.
    let v = reproduce(
        "distance_traveled.py",
        "distance_traveled_wbo.py",
        MutationKind::Wbo,
        4,
    );
    assert_eq!(v, Validation::Accepted { timed_out: true });
    let v = reproduce(
        "make_integer_zero.py",
        "make_integer_zero_wbo.py",
        MutationKind::Wbo,
        4,
    );
    assert!(v.is_accepted());
}

#[test]
fn adc_inserts_the_printed_lines() {
    let (_, rec) = mutate_adc(&fixture("distribute_candies.py"), SiteSelection::Index(1)).unwrap();
    assert_eq!((rec.line, rec.mutated.as_str()), (4, "    ans = 0 + 1"));
    let (_, rec) = mutate_adc(&fixture("furthest_distance.py"), SiteSelection::Index(0)).unwrap();
    assert_eq!((rec.line, rec.mutated.as_str()), (3, "    left = 0 + 1"));
}

#[test]
fn hang_policy_reject() {
    let src = fixture("distance_traveled.py");
    let v = validate_mutant(
        &problem(src),
        &fixture("distance_traveled_wbo.py"),
        &quick(),
        HangPolicy::Reject,
    )
    .unwrap();
    assert_eq!(v, Validation::Rejected(RejectReason::Timeout));
}

#[test]
fn dead_code_mutant_is_equivalent() {
    let src = "def f():\n    x = 1\n    return 2\n\nassert f() == 2\n".to_string();
    let (m, _) = mutate_adc(&src, SiteSelection::Index(0)).unwrap();
    let v = validate_mutant(&problem(src), &m, &quick(), HangPolicy::Accept).unwrap();
    assert_eq!(v, Validation::Rejected(RejectReason::EquivalentMutant));
}

#[test]
fn seeded_choice_is_stable() {
    let src = fixture("make_integer_zero.py");
    let picks: Vec<usize> = (0..8)
        .map(|seed| {
            mutate_adc(&src, SiteSelection::Seed(seed))
                .unwrap()
                .1
                .site_index
        })
        .collect();
    let again: Vec<usize> = (0..8)
        .map(|seed| {
            mutate_adc(&src, SiteSelection::Seed(seed))
                .unwrap()
                .1
                .site_index
        })
        .collect();
    assert_eq!(picks, again);
    assert!(
        picks
            .iter()
            .collect::<std::collections::BTreeSet<_>>()
            .len()
            > 1
    );
}

fn line_strategy() -> impl Strategy<Value = String> {
    let name = prop::sample::select(vec!["a", "b", "total", "x1"]);
    let op = prop::sample::select(vec!["==", "!=", "<", "<=", ">", ">=", "+", "-"]);
    prop_oneof![
        (name.clone(), 0..50i32).prop_map(|(n, v)| format!("{n} = {v}")),
        (name.clone(), op.clone(), name.clone()).prop_map(|(a, o, b)| format!("{a} = {a} {o} {b}")),
        (name.clone(), op.clone(), 0..9i32)
            .prop_map(|(a, o, v)| format!("if {a} {o} {v}:\n    {a} += 1")),
        (name.clone(), op, name.clone()).prop_map(|(a, o, b)| format!("assert {a} {o} {b}")),
        Just("s = 'a < b == c'  # x >= y".to_string()),
    ]
}

proptest! {
    #[test]
    fn mutants_change_exactly_one_line(lines in prop::collection::vec(line_strategy(), 1..10), seed in any::<u64>()) {
        let src = lines.join("\n") + "\n";
        let orig: Vec<&str> = src.lines().collect();
        if let Ok((m, rec)) = mutate_wbo(&src, SiteSelection::Seed(seed)) {
            let mutated: Vec<&str> = m.lines().collect();
            prop_assert_eq!(mutated.len(), orig.len());
            let diff: Vec<usize> = (0..orig.len()).filter(|&i| orig[i] != mutated[i]).collect();
            prop_assert_eq!(diff, vec![rec.line as usize - 1]);
            prop_assert!(!orig[rec.line as usize - 1].trim_start().starts_with("assert"));
            prop_assert_eq!(apply_record(&src, &rec).unwrap(), m);
        }
        if let Ok((m, rec)) = mutate_adc(&src, SiteSelection::Seed(seed)) {
            let mut expect: Vec<&str> = orig.clone();
            expect.insert(rec.line as usize - 1, &rec.mutated);
            prop_assert_eq!(m.lines().collect::<Vec<_>>(), expect);
            prop_assert!(rec.mutated.ends_with(" + 1"));
            prop_assert_eq!(apply_record(&src, &rec).unwrap(), m);
        }
    }
}
