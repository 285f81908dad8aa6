//! Single-fault programs: every diagnosis must be a real correction set, no
//! smaller one may exist, and the injected statement should be found.

use std::collections::BTreeSet;

use faultloc::{localize_counterexample, GuardedFormula, LocalizeConfig};
use minic::StatementId;

fn corpus() -> Vec<(String, String)> {
    let dir = format!("{}/../../fixtures/faults", env!("CARGO_MANIFEST_DIR"));
    let mut out: Vec<(String, String)> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "c"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read_to_string(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

fn fault_line(src: &str) -> u32 {
    src.lines()
        .position(|l| l.contains("// FAULT"))
        .expect("marked fault") as u32
        + 1
}

/// Every subset of `items` with exactly `k` elements.
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

/// Minimum-size correction sets by brute force.
fn brute_force(g: &GuardedFormula) -> (usize, BTreeSet<BTreeSet<StatementId>>) {
    let ids: Vec<StatementId> = g.guards().keys().copied().collect();
    for k in 0..=ids.len() {
        let holding: BTreeSet<_> = subsets(&ids, k)
            .into_iter()
            .filter(|s| g.relaxation_holds(s).unwrap())
            .collect();
        if !holding.is_empty() {
            return (k, holding);
        }
    }
    panic!("relaxing everything must hold");
}

#[test]
fn crafted_faults_are_localised_soundly_and_minimally() {
    let corpus = corpus();
    assert!(corpus.len() >= 20);
    let mut found = 0;
    for (name, src) in &corpus {
        let p = minic::load(src).unwrap_or_else(|e| panic!("{}", e.render(name)));
        let bmc::Verdict::Violated(cex) = bmc::check_bounded(&p, 64, 8).unwrap() else {
            panic!("{name}: fault not observable")
        };
        let (g, ds) = localize_counterexample(&p, &LocalizeConfig::default(), &cex).unwrap();
        assert!(
            g.guards().len() <= 12,
            "{name}: {} guards",
            g.guards().len()
        );
        assert!(!ds.truncated, "{name}");

        let (min, holding) = brute_force(&g);
        assert_eq!(ds.cost as usize, min, "{name}");
        let reported: BTreeSet<_> = ds.diagnoses.iter().map(|d| d.ids()).collect();
        for d in &reported {
            assert!(g.relaxation_holds(d).unwrap(), "{name}: {d:?}");
        }
        assert_eq!(reported, holding, "{name}");

        let line = fault_line(src);
        if ds
            .diagnoses
            .iter()
            .any(|d| d.statements.iter().any(|s| s.span.line == line))
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
