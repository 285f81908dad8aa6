mod common;

use std::collections::BTreeSet;

use common::checked;
use faultloc::{
    encode_guarded, enumerate_diagnoses, localize, localize_counterexample,
    map_diagnosis_to_source, unwind_for_path, LocalizeConfig, LocalizeError,
};

fn cfg() -> LocalizeConfig {
    LocalizeConfig {
        unwind: 10,
        ..LocalizeConfig::default()
    }
}

#[test]
fn printed_algorithm_guards_and_fails() {
    let p = checked("distribute_candies_buggy.c");
    let g = encode_guarded(&p, &cfg(), None).unwrap();
    let lines: BTreeSet<u32> = g.statements.values().map(|s| s.span.line).collect();
    for line in [2, 3, 4, 5, 6, 9] {
        assert!(lines.contains(&line), "line {line} unguarded: {lines:?}");
    }
    assert!(!lines.contains(&16), "main's assertion stays hard");
    assert!(!g.all_healthy_sat().unwrap());
}

#[test]
fn corrected_algorithm_needs_no_relaxation() {
    let p = checked("distribute_candies_fixed.c");
    let (g, ds) = localize(&p, &cfg(), None).unwrap();
    assert!(g.all_healthy_sat().unwrap());
    assert_eq!(ds.cost, 0);
    assert!(ds.diagnoses.is_empty());
    assert!(map_diagnosis_to_source(&ds, &p).is_empty());
}

#[test]
fn contradictory_specification() {
    let p = minic::load("int main() { assert(0 == 1); return 0; }").unwrap();
    assert!(matches!(
        encode_guarded(&p, &cfg(), None),
        Err(LocalizeError::UnsatSpecification)
    ));
}

#[test]
fn duplicated_assignment_is_a_diagnosis() {
    let p = checked("distribute_candies_buggy.c");
    let (g, ds) = localize(&p, &cfg(), None).unwrap();
    assert_eq!(ds.cost, 1);
    assert!(!ds.truncated);
    assert!(
        ds.diagnoses.iter().any(|d| d.statements[0].line == 4),
        "{ds:#?}"
    );
    for d in &ds.diagnoses {
        assert_eq!(d.statements.len(), 1);
        assert!(g.relaxation_holds(&d.ids()).unwrap());
    }
    let mapped = map_diagnosis_to_source(&ds, &p);
    assert!(
        mapped.contains(&(4, "ans = 0 + 1;".to_string())),
        "{mapped:?}"
    );
    let sinks: Vec<_> = ds
        .diagnoses
        .iter()
        .filter(|d| d.output_sink)
        .map(|d| d.statements[0].line)
        .collect();
    assert!(
        sinks.contains(&12),
        "return ans is an output sink: {sinks:?}"
    );
}

#[test]
fn fuel_loop_condition_is_localised() {
    let p = checked("distance_traveled_granite.c");
    let g = encode_guarded(&p, &cfg(), None).unwrap();
    let ds = enumerate_diagnoses(&g, 16).unwrap();
    assert_eq!(ds.cost, 1);
    assert!(
        ds.diagnoses
            .iter()
            .any(|d| d.statements[0].text == "if (mainTank < 5)" && d.statements[0].line == 6),
        "{ds:#?}"
    );
}

#[test]
fn shared_statements_are_listed_once() {
    let p = checked("distribute_candies_buggy.c");
    let (_, mut ds) = localize(&p, &cfg(), None).unwrap();
    let first = ds.diagnoses[0].clone();
    ds.diagnoses.push(first);
    let mapped = map_diagnosis_to_source(&ds, &p);
    let mut sorted = mapped.clone();
    sorted.dedup();
    assert_eq!(mapped, sorted);
    assert!(mapped.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn cap_truncates_enumeration() {
    let p = checked("distribute_candies_buggy.c");
    let g = encode_guarded(&p, &cfg(), None).unwrap();
    let ds = enumerate_diagnoses(&g, 1).unwrap();
    assert_eq!(ds.diagnoses.len(), 1);
    assert!(ds.truncated);
}

#[test]
fn counterexample_bound_is_derived_from_the_path() {
    let p = checked("distribute_candies_buggy.c");
    let bmc::Verdict::Violated(cex) = bmc::check_bounded(&p, 64, 8).unwrap() else {
        panic!("expected a violation")
    };
    let k = unwind_for_path(&p, &cex.path, 64);
    assert!(k >= 4 && k < 64, "{k}");
    assert_eq!(unwind_for_path(&p, &cex.path, 3), 3);
    let (g, ds) = localize_counterexample(&p, &LocalizeConfig::default(), &cex).unwrap();
    assert_eq!(ds.cost, 1);
    assert!(
        ds.diagnoses.iter().any(|d| d.statements[0].line == 4),
        "{ds:#?}"
    );
    for d in &ds.diagnoses {
        assert!(g.relaxation_holds(&d.ids()).unwrap());
    }
}
