//! Acceptance suite: one check per criterion, each printed as PASS or FAIL.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bmc::{check_bounded, CheckKind, Verdict};
use common::*;
use faultloc::{localize_counterexample, GuardedFormula, LocalizeConfig};
use llm_bridge::{render_prompt, LlmConfig, PromptKind};
use minic::gen::{random_program, GenConfig};
use minic::{
    call_function, interpret_with_inputs, CheckedProgram, Limits, RuntimeErrorKind, StatementId,
    Status, Value,
};
use pipeline::{
    compute_metrics, render_metrics, run_batch, validate_candidate, zero_timings, GateDecision,
    MetricsError, OutcomeClass, RetryKind,
};
use pyharness::{
    mutate, validate_mutant, HangPolicy, MutationKind, RunOutcome, RunStatus, SiteSelection,
    Validation,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solver::{solve_partial_maxsat, CnfInstance, OptResult, PartialMaxSatInstance, SoftClause};

fn golden_motivating_example() {
    let started = Instant::now();
    let r = replay_run("qwen", "motivating");
    let elapsed = started.elapsed();
    assert!(
        matches!(r.verdict, Some(Verdict::Violated(_))),
        "{:?}",
        r.verdict
    );
    let ds = r.diagnoses.as_ref().expect("diagnoses");
    assert_eq!(ds.cost, 1);
    assert!(
        ds.diagnoses.iter().any(|d| d.statements.len() == 1
            && d.statements[0].line == 4
            && d.statements[0].text == "ans = 0 + 1;"),
        "{ds:?}"
    );
    let b = r.backmapped();
    assert!(
        b.iter()
            .any(|s| s.text == "ans = 0 + 1" && s.line == Some(4)),
        "{b:?}"
    );
    assert_eq!(r.outcome, OutcomeClass::CorrectBugLocalised);
    assert!(elapsed < Duration::from_secs(10), "{elapsed:?}");
}

fn golden_verification() {
    let started = Instant::now();
    let mut cfg = config("qwen");
    cfg.unwind = 8;
    let r = pipeline::run_pipeline(
        &problem("motivating-fixed"),
        &cfg,
        &store("qwen"),
        &llm_bridge::ManualClock::default(),
    )
    .unwrap();
    assert_eq!(r.verdict, Some(Verdict::Verified { bound: 8 }));
    assert_eq!(r.outcome, OutcomeClass::Verified);
    assert!(r.python.program.as_ref().unwrap().passed());
    let c = minic::load(r.c_source().unwrap()).unwrap();
    let v = call_function(
        &c,
        "distributeCandies",
        &[Value::Int(5), Value::Int(2)],
        &Limits::default(),
    )
    .unwrap();
    assert_eq!(v, Value::Int(3));
    assert!(
        started.elapsed() < Duration::from_secs(5),
        "{:?}",
        started.elapsed()
    );
}

fn concrete_failure(p: &CheckedProgram, inputs: &[i32]) -> Option<CheckKind> {
    match interpret_with_inputs(p, &Limits::default(), inputs)
        .unwrap()
        .status
    {
        Status::AssertionViolated { .. } => Some(CheckKind::Assertion),
        Status::RuntimeError {
            kind: RuntimeErrorKind::DivByZero,
            ..
        } => Some(CheckKind::DivByZero),
        Status::RuntimeError {
            kind: RuntimeErrorKind::OutOfBounds,
            ..
        } => Some(CheckKind::OutOfBounds),
        Status::RuntimeError { kind, .. } => panic!("generated program hit {kind:?}"),
        Status::Completed { .. } | Status::AssumeViolated { .. } => None,
    }
}

fn input_domain(n: usize, range: i32) -> Vec<Vec<i32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-range..range).map(move |x| {
                    let mut v = v.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}

/// Checks one program against exhaustive interpretation of its input domain.
fn agrees(src: &str, inputs: usize, range: i32) -> bool {
    let p = minic::load(src).unwrap();
    let failing = input_domain(inputs, range)
        .into_iter()
        .find(|xs| concrete_failure(&p, xs).is_some());
    match check_bounded(&p, 8, 8).unwrap() {
        Verdict::Violated(cex) => {
            assert_eq!(
                concrete_failure(&p, &cex.inputs),
                Some(cex.failed.kind),
                "{cex:?}\n{src}"
            );
            true
        }
        Verdict::Verified { .. } => {
            assert!(failing.is_none(), "missed {failing:?}\n{src}");
            false
        }
        v => panic!("{v:?}\n{src}"),
    }
}

fn bmc_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc3);
    let closed = GenConfig {
        big_constants: false,
        max_trip: 6,
        ..GenConfig::default()
    };
    let mut violated = 0;
    for _ in 0..100 {
        let src = random_program(&mut rng, &closed);
        violated += agrees(&src, 0, 0) as usize;
    }
    assert!(
        (10..90).contains(&violated),
        "{violated} of 100 closed programs violated"
    );
    // Two inputs over 64 values each: 2^12 points.
    let open = GenConfig {
        inputs: 2,
        input_range: 32,
        max_trip: 6,
        max_depth: 1,
        big_constants: false,
        ..GenConfig::default()
    };
    let mut violated = 0;
    for _ in 0..50 {
        let src = random_program(&mut rng, &open);
        violated += agrees(&src, 2, 32) as usize;
    }
    assert!(
        (5..45).contains(&violated),
        "{violated} of 50 open programs violated"
    );
}

fn brute_min_cost(inst: &PartialMaxSatInstance) -> Option<u64> {
    let mask = |c: &[i32]| {
        c.iter().fold((0u32, 0u32), |(p, n), &l| {
            let bit = 1u32 << (l.unsigned_abs() - 1);
            if l > 0 {
                (p | bit, n)
            } else {
                (p, n | bit)
            }
        })
    };
    let hard: Vec<(u32, u32)> = inst.hard.clauses.iter().map(|c| mask(c)).collect();
    let soft: Vec<((u32, u32), u64)> = inst
        .soft
        .iter()
        .map(|s| (mask(&s.lits), s.weight))
        .collect();
    let sat = |m: u32, (p, n): (u32, u32)| (m & p) | (!m & n) != 0;
    (0u32..1 << inst.hard.num_vars)
        .filter(|&m| hard.iter().all(|&c| sat(m, c)))
        .map(|m| {
            soft.iter()
                .filter(|(c, _)| !sat(m, *c))
                .map(|(_, w)| w)
                .sum()
        })
        .min()
}

fn random_lits(rng: &mut ChaCha8Rng, v: u32, len: usize) -> Vec<i32> {
    (0..len)
        .map(|_| {
            let x = rng.random_range(1..=v as i32);
            if rng.random_bool(0.5) {
                x
            } else {
                -x
            }
        })
        .collect()
}

fn maxsat_optimality() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x3a5);
    let mut unsat = 0;
    for i in 0..200 {
        let v = if i % 10 == 0 {
            20
        } else {
            rng.random_range(2..=20)
        };
        let n_hard = rng.random_range(0..=(2 * v as usize));
        let hard = (0..n_hard)
            .map(|_| {
                let len = rng.random_range(2..=3);
                random_lits(&mut rng, v, len)
            })
            .collect();
        let soft = (0..rng.random_range(0..=16))
            .map(|_| {
                let len = rng.random_range(1..=2);
                SoftClause {
                    lits: random_lits(&mut rng, v, len),
                    weight: rng.random_range(1..=3),
                }
            })
            .collect();
        let inst = PartialMaxSatInstance {
            hard: CnfInstance {
                num_vars: v,
                clauses: hard,
            },
            soft,
        };
        match (solve_partial_maxsat(&inst).unwrap(), brute_min_cost(&inst)) {
            (OptResult::HardUnsat, None) => unsat += 1,
            (OptResult::Optimal { model, cost }, Some(best)) => {
                assert_eq!(cost, best, "instance {i}");
                assert!(inst.hard.is_satisfied_by(&model));
                assert_eq!(inst.cost(&model), cost);
            }
            (got, want) => panic!("instance {i}: solver {got:?}, brute force {want:?}"),
        }
    }
    assert!(unsat < 50, "{unsat} hard-unsat instances");
}

fn subsets(items: &[StatementId], k: usize) -> Vec<BTreeSet<StatementId>> {
    if k == 0 {
        return vec![BTreeSet::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = subsets(&items[1..], k - 1);
    for s in &mut out {
        s.insert(items[0]);
    }
    out.extend(subsets(&items[1..], k));
    out
}

fn minimum_correction_sets(g: &GuardedFormula) -> BTreeSet<BTreeSet<StatementId>> {
    let ids: Vec<StatementId> = g.guards().keys().copied().collect();
    (0..=ids.len())
        .map(|k| {
            subsets(&ids, k)
                .into_iter()
                .filter(|s| g.relaxation_holds(s).unwrap())
                .collect::<BTreeSet<_>>()
        })
        .find(|h| !h.is_empty())
        .expect("relaxing everything holds")
}

fn diagnosis_soundness_and_minimality() {
    let dir = fixtures().join("faults");
    let mut corpus: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "c"))
        .collect();
    corpus.sort();
    assert!(corpus.len() >= 20);
    let mut found = 0;
    for path in &corpus {
        let name = path.display();
        let src = std::fs::read_to_string(path).unwrap();
        let line = src
            .lines()
            .position(|l| l.contains("// FAULT"))
            .expect("marked fault") as u32
            + 1;
        let p = minic::load(&src).unwrap();
        let Verdict::Violated(cex) = check_bounded(&p, 64, 8).unwrap() else {
            panic!("{name}: fault not observable")
        };
        let (g, ds) = localize_counterexample(&p, &LocalizeConfig::default(), &cex).unwrap();
        assert!(
            g.guards().len() <= 12,
            "{name}: {} guards",
            g.guards().len()
        );
        assert!(!ds.truncated, "{name}");
        let reported: BTreeSet<_> = ds.diagnoses.iter().map(|d| d.ids()).collect();
        for d in &reported {
            assert!(
                g.relaxation_holds(d).unwrap(),
                "{name}: {d:?} does not hold"
            );
        }
        assert_eq!(reported, minimum_correction_sets(&g), "{name}");
        if ds
            .diagnoses
            .iter()
            .any(|d| d.statements.iter().any(|s| s.line == line))
        {
            found += 1;
        } else {
            assert!(
                ds.diagnoses.iter().any(|d| d.output_sink),
                "{name}: line {line} missed, no sink"
            );
        }
    }
    assert!(found * 100 >= corpus.len() * 95, "{found}/{}", corpus.len());
}

fn prompt_byte_equality() {
    let p = problem("motivating");
    let golden = |n: &str| std::fs::read_to_string(fixtures().join("prompts").join(n)).unwrap();
    let cfg = LlmConfig::default();
    let nodesc = LlmConfig {
        include_description: false,
        ..LlmConfig::default()
    };
    let cases = [
        (PromptKind::Transpile, &cfg, "motivating_transpile.txt"),
        (
            PromptKind::Transpile,
            &nodesc,
            "motivating_transpile_no_description.txt",
        ),
        (
            PromptKind::Retry {
                reason: "assertion distributeCandies(5,2)==3 failed".into(),
            },
            &cfg,
            "motivating_retry.txt",
        ),
        (
            PromptKind::Backmap {
                statements: vec!["ans = 0 + 1;".into()],
            },
            &cfg,
            "motivating_backmap.txt",
        ),
    ];
    for (kind, c, file) in cases {
        let got = render_prompt(&kind, &p, c).unwrap();
        assert_eq!(got.as_bytes(), golden(file).as_bytes(), "{file}");
    }
}

fn mutation_fidelity() {
    let py = pyharness::PythonConfig {
        timeout: Duration::from_secs(1),
        ..pyharness::PythonConfig::default()
    };
    let cases = [
        (
            "motivating",
            "distribute_candies.py",
            "    ans = 0 + 1",
            false,
        ),
        ("lcb-188", "furthest_distance.py", "    left = 0 + 1", false),
        (
            "lcb-463",
            "distribute_candies_463.py",
            "  ans = 0 + 1",
            false,
        ),
        ("lcb-57", "distance_traveled.py", "        if a < 5:", true),
        ("lcb-76", "make_integer_zero.py", "    while x < y:", true),
    ];
    for (id, original, line, hangs) in cases {
        let mutant = problem(id);
        let gt = mutant.ground_truth.clone().unwrap();
        let source = std::fs::read_to_string(fixtures().join("python").join(original)).unwrap();
        let (got, rec) = mutate(&source, gt.kind, SiteSelection::Index(gt.site_index)).unwrap();
        assert_eq!(got, mutant.source, "{id}");
        assert_eq!(rec, gt, "{id}");
        assert_eq!(got.lines().nth(gt.line as usize - 1), Some(line), "{id}");
        let orig = pyharness::PythonProblem {
            source,
            ..mutant.clone()
        };
        let v = validate_mutant(&orig, &got, &py, HangPolicy::Accept).unwrap();
        assert_eq!(v, Validation::Accepted { timed_out: hangs }, "{id}");
    }
    let wbo = problem("lcb-57").ground_truth.unwrap();
    assert_eq!(
        (wbo.kind, wbo.original.trim(), wbo.mutated.trim()),
        (MutationKind::Wbo, "if a >= 5:", "if a < 5:")
    );
}

fn gate_and_classification() {
    let c = |f: &str| std::fs::read_to_string(fixtures().join("c").join(f)).unwrap();
    let (pass, fail) = (
        c("distribute_candies_fixed.c"),
        c("distribute_candies_buggy.c"),
    );
    let py = |status| RunOutcome {
        status,
        duration_ms: 0,
    };
    let py_pass = py(RunStatus::Pass);
    let py_fail = py(RunStatus::AssertionFailed { line: Some(11) });
    let limits = Limits {
        step_limit: 1_000_000,
        timeout: Duration::from_secs(5),
    };
    assert_eq!(
        validate_candidate(&py_pass, &pass, &limits),
        GateDecision::ToVerifier
    );
    assert_eq!(
        validate_candidate(&py_fail, &fail, &limits),
        GateDecision::ToVerifier
    );
    assert_eq!(
        validate_candidate(&py_fail, &pass, &limits),
        GateDecision::FixedCodeSuspected
    );
    assert!(matches!(
        validate_candidate(&py_pass, &fail, &limits),
        GateDecision::Retry {
            kind: RetryKind::Differential,
            ..
        }
    ));
    assert!(matches!(
        validate_candidate(&py_pass, "int main( {", &limits),
        GateDecision::Retry {
            kind: RetryKind::Parse,
            ..
        }
    ));
    let r188 = replay_run("deepseek", "lcb-188");
    assert_eq!(r188.gate, Some(GateDecision::FixedCodeSuspected));
    assert_eq!(r188.outcome, OutcomeClass::TranspiledFixedCode);
    let r463 = replay_run("deepseek", "lcb-463");
    assert_eq!(r463.outcome, OutcomeClass::OtherBugsLocalised);
    assert!(r463.backmapped().iter().any(|s| s.line == Some(8)));
    assert!(r463.backmapped().iter().all(|s| s.line != Some(4)));
}

fn metrics_and_determinism() {
    let t = compute_metrics(&ten_reports()).unwrap();
    let g = &t.groups[0];
    assert_eq!(
        [
            g.correct_bug_localised,
            g.other_bugs_localised,
            g.transpiled_fixed_code,
            g.compilation_errors
        ],
        [40.0, 20.0, 30.0, 10.0]
    );
    let text = render_metrics(&t);
    assert!(text.contains("Bug: Wrong Binary Operator (WBO)"), "{text}");
    let header = text.lines().find(|l| l.starts_with("LLMs")).unwrap();
    let cols: Vec<&str> = header.split(" | ").map(str::trim).collect();
    assert_eq!(
        &cols[1..5],
        [
            "% Correct Bug Localised",
            "% Other Bugs Localised",
            "% Transpiled Fixed Code",
            "% Compilation Errors"
        ]
    );
    let row = text.lines().find(|l| l.starts_with("qwen")).unwrap();
    let cells: Vec<&str> = row.split(" | ").map(str::trim).collect();
    assert_eq!(&cells[1..5], ["40.0%", "20.0%", "30.0%", "10.0%"], "{row}");

    let verified: Vec<_> = (0..4)
        .map(|i| bare_report(&format!("v{i}"), "qwen", None, OutcomeClass::Verified))
        .collect();
    assert_eq!(
        compute_metrics(&verified).unwrap().groups[0].verified,
        100.0
    );
    assert_eq!(compute_metrics(&[]), Err(MetricsError::EmptyGroup));

    let problems: Vec<_> = ["motivating", "motivating-fixed", "lcb-76"]
        .into_iter()
        .map(problem)
        .collect();
    let (cfg, replay) = (config("qwen"), store("qwen"));
    let batch = || {
        let reports = run_batch(&problems, &cfg, &replay, 2).unwrap();
        let v = serde_json::to_value(&reports).unwrap();
        serde_json::to_string_pretty(&zero_timings(&v)).unwrap()
    };
    assert_eq!(batch(), batch());
}

fn main() -> ExitCode {
    let criteria: [(&str, fn()); 9] = [
        ("golden motivating example", golden_motivating_example),
        ("golden verification", golden_verification),
        ("BMC oracle equivalence", bmc_oracle_equivalence),
        ("MaxSAT optimality", maxsat_optimality),
        (
            "diagnosis soundness and minimality",
            diagnosis_soundness_and_minimality,
        ),
        ("prompt byte-equality", prompt_byte_equality),
        ("mutation fidelity", mutation_fidelity),
        (
            "gate and classification conformance",
            gate_and_classification,
        ),
        (
            "metrics arithmetic and replay determinism",
            metrics_and_determinism,
        ),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let ok = catch_unwind(AssertUnwindSafe(check)).is_ok();
        failed += !ok as usize;
        println!(
            "criterion {} {} {name} ({:.1} s)",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            started.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
