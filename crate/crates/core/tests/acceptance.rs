use std::collections::HashSet;
use std::io::Write;
use std::sync::OnceLock;
use std::time::Instant;

use intgraph::complexes::{atom_nerve, betti, coatom_nerve, greedy_collapse, order_complex, intersection_complex, CollapseOutcome, DEFAULT_FACE_BUDGET};
use intgraph::corpus::{abelian_label, abelian_types, default_corpus};
use intgraph::domgraph::{domination_oracle, sum_number};
use intgraph::lattice::{characteristic_subgroups, classify_group, enumerate_subgroups_all_pairs};
use intgraph::suite::{run_suite, SuiteOptions, SuiteReport};
use intgraph::theorems::{gamma_abelian_formula, gamma_dihedral_formula, theta, verify_bounds, BoundsInput, GroupFamily, Prediction, Verdict};
use intgraph::{build_group, enumerate_subgroups, gamma_exact, intersection_graph, parse_group_spec, Budget, GammaValue, GroupTable, Lattice, SearchLimits, DEFAULT_ELEMENT_CAP};

fn load(spec: &str) -> (GroupTable, Lattice) {
    let g = build_group(&parse_group_spec(spec).unwrap(), DEFAULT_ELEMENT_CAP).unwrap();
    let lat = enumerate_subgroups(&g, &Budget::unlimited()).unwrap();
    (g, lat)
}

fn exact(spec: &str) -> GammaValue {
    let (_, lat) = load(spec);
    let c = gamma_exact(&lat, SearchLimits::default());
    assert!(c.optimal, "{spec}");
    c.gamma
}

fn verdict(n: usize, title: &str, failures: &[String], detail: String) {
    let ok = failures.is_empty();
    let mut out = std::io::stdout().lock();
    writeln!(out, "criterion {n} {}: {title} ({detail})", if ok { "PASS" } else { "FAIL" }).unwrap();
    for f in failures.iter().take(10) {
        writeln!(out, "    {f}").unwrap();
    }
    out.flush().unwrap();
    assert!(ok, "criterion {n} failed: {failures:?}");
}

fn suite() -> &'static SuiteReport {
    static REPORT: OnceLock<SuiteReport> = OnceLock::new();
    REPORT.get_or_init(|| {
        let opts = SuiteOptions { order_max: usize::MAX, ..SuiteOptions::default() };
        run_suite(&default_corpus(), &opts).unwrap()
    })
}

/// Failures of the named check over groups of order at most `order_max`,
/// plus the number of groups where it ran.
fn suite_check(names: &[&str], order_max: usize) -> (Vec<String>, usize) {
    let mut failures = Vec::new();
    let mut ran = 0;
    for g in suite().groups.iter().filter(|g| g.order <= order_max) {
        if let Some(a) = &g.aborted {
            failures.push(format!("{} aborted: {a}", g.group));
            continue;
        }
        let mut any = false;
        for c in g.checks.iter().filter(|c| names.contains(&c.name)) {
            any = true;
            if !c.passed {
                failures.push(format!("{} {}: {}", g.group, c.name, c.detail));
            }
        }
        ran += any as usize;
    }
    (failures, ran)
}

#[test]
fn criterion_1_abelian_formula() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut count = 0;
    for n in 2..=100 {
        for t in abelian_types(n) {
            let spec = abelian_label(&t);
            let (g, lat) = load(&spec);
            let c = gamma_exact(&lat, SearchLimits::default());
            let expected = if lat.vertex_set().is_empty() { GammaValue::Aleph0 } else { gamma_abelian_formula(&g).unwrap() };
            if !c.optimal || c.gamma != expected {
                failures.push(format!("{spec}: computed {}, formula {expected}", c.gamma));
            }
            count += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 60.0 {
        failures.push(format!("took {secs:.1} s"));
    }
    verdict(1, "abelian formula", &failures, format!("{count} types, {secs:.2} s"));
}

#[test]
fn criterion_2_dihedral_formula() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for n in 2..=100 {
        let spec = format!("D{}", 2 * n);
        let got = exact(&spec);
        let want = gamma_dihedral_formula(n).unwrap();
        if got != want {
            failures.push(format!("{spec}: computed {got}, formula {want}"));
        }
    }
    for (spec, want) in [("D8", 2), ("D36", 3)] {
        if exact(spec) != GammaValue::Finite(want) {
            failures.push(format!("{spec} should have gamma {want}"));
        }
    }
    let (g, lat) = load("D36");
    let s = sum_number(&g, &lat, SearchLimits::default());
    if !(s.optimal && s.value == GammaValue::Finite(3)) {
        failures.push(format!("sum number of D36 is {}", s.value));
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 120.0 {
        failures.push(format!("took {secs:.1} s"));
    }
    verdict(2, "dihedral formula", &failures, format!("n = 2..100, {secs:.2} s"));
}

#[test]
fn criterion_3_symmetric_groups() {
    let mut failures = Vec::new();
    for (spec, want) in [("S3", 4), ("S4", 4)] {
        let (_, lat) = load(spec);
        let c = gamma_exact(&lat, SearchLimits::default());
        let oracle = domination_oracle(&intersection_graph(&lat), 6).map(|(v, _)| v);
        if !c.optimal || c.gamma != GammaValue::Finite(want) || oracle != Some(c.gamma) {
            failures.push(format!("{spec}: set cover {}, oracle {oracle:?}, expected {want}", c.gamma));
        }
    }
    let s5 = exact("S5");
    if s5 > GammaValue::Finite(theta(5).unwrap()) {
        failures.push(format!("S5: {s5} > {}", theta(5).unwrap()));
    }

    let start = Instant::now();
    let (g6, lat6) = load("S6");
    let enum_secs = start.elapsed().as_secs_f64();
    let pairs = enumerate_subgroups_all_pairs(&g6, &Budget::unlimited()).unwrap();
    let a: HashSet<_> = lat6.subgroups().iter().map(|s| s.members().clone()).collect();
    let b: HashSet<_> = pairs.into_iter().collect();
    if lat6.len() != 1455 || a != b {
        failures.push(format!("S6: {} subgroups, all-pairs {}, equal sets {}", lat6.len(), b.len(), a == b));
    }
    if enum_secs > 600.0 {
        failures.push(format!("S6 enumeration took {enum_secs:.1} s"));
    }
    let c6 = gamma_exact(&lat6, SearchLimits::default());
    let upper6 = c6.gamma;
    if upper6 > GammaValue::Finite(7) || upper6 > GammaValue::Finite(theta(6).unwrap()) {
        failures.push(format!("S6: {upper6} exceeds 7 or {}", theta(6).unwrap()));
    }

    let mut not_one = 0;
    for spec in ["S2", "S3", "S4", "S5", "S6", "A3", "A4", "A5", "A6"] {
        let v = if spec == "S6" { c6.gamma } else { exact(spec) };
        if v.is_one() {
            failures.push(format!("{spec} has gamma 1"));
        }
        not_one += 1;
    }
    verdict(
        3,
        "symmetric groups",
        &failures,
        format!("S5 gamma {s5}, S6 gamma {} (optimal {}), S6 lattice {} in {enum_secs:.2} s, {not_one} groups not 1", c6.gamma, c6.optimal, lat6.len()),
    );
}

#[test]
fn criterion_4_frobenius_counterexample() {
    let mut failures = Vec::new();
    let spec = parse_group_spec("A4").unwrap();
    let (g, lat) = load("A4");
    let cert = gamma_exact(&lat, SearchLimits::default());
    let chars = characteristic_subgroups(&g, &lat);
    let class = classify_group(&g, &lat);
    let reports = verify_bounds(&BoundsInput {
        group: &g,
        lattice: &lat,
        chars: &chars,
        class: &class,
        gamma: &cert,
        family: GroupFamily::of(&spec),
    });
    let frob = reports.iter().find(|r| r.theorem == "frobenius-exact").unwrap();
    if cert.gamma != GammaValue::Finite(5) || frob.verdict != Verdict::Match || frob.predicted != Some(Prediction::Exact(GammaValue::Finite(5))) {
        failures.push(format!("gamma {}, report {:?}", cert.gamma, frob.verdict));
    }
    let kernel_order = frob.witness.get("kernel_order").copied().unwrap_or(0);
    let p = 2;
    let q = frob.witness.get("q").copied().unwrap_or(0);
    if kernel_order != 4 || q != 3 {
        failures.push(format!("kernel order {kernel_order}, complement order {q}"));
    }
    let gamma = cert.gamma.finite().unwrap_or(0) as u64;
    if !(gamma > p + 1 && gamma > q + 1) {
        failures.push(format!("{gamma} does not exceed both {} and {}", p + 1, q + 1));
    }
    verdict(4, "Frobenius counterexample", &failures, format!("gamma(A4) = {gamma} = {kernel_order} + 1 > {} and > {}", p + 1, q + 1));
}

#[test]
fn criterion_5_oracle_equivalence() {
    let (failures, ran) = suite_check(&["oracle-equivalence"], usize::MAX);
    verdict(5, "oracle equivalence", &failures, format!("{ran} groups with at most 25 vertices"));
}

#[test]
fn criterion_6_quotient_lemma() {
    let (mut failures, ran) = suite_check(&["quotient-lemma"], 48);
    let expected = suite().groups.iter().filter(|g| g.order <= 48).count();
    if ran != expected {
        failures.push(format!("ran on {ran} of {expected} groups"));
    }
    verdict(6, "quotient lemma", &failures, format!("{ran} groups of order at most 48"));
}

#[test]
fn criterion_7_burnside() {
    let names = ["burnside-cardinality", "marks-multiplicative", "index-bound", "gamma-one-criterion", "gset-sum-graph"];
    let (mut failures, ran) = suite_check(&names, 48);
    for g in suite().groups.iter().filter(|g| g.order <= 48) {
        for n in ["burnside-cardinality", "marks-multiplicative", "gamma-one-criterion", "gset-sum-graph"] {
            if g.check(n).is_none() {
                failures.push(format!("{} missing {n}", g.group));
            }
        }
    }
    verdict(7, "Burnside ring", &failures, format!("{ran} groups of order at most 48"));
}

#[test]
fn criterion_8_topology() {
    let names = [
        "betti-profiles-agree",
        "frattini-iff-coatom-nerve-simplex",
        "gamma-one-iff-atom-nerve-simplex",
        "gamma-one-acyclic",
    ];
    let (mut failures, ran) = suite_check(&names, 24);
    let gamma_one = suite().groups.iter().filter(|g| g.order <= 24 && g.check("gamma-one-acyclic").is_some()).count();

    let (_, q8) = load("Q8");
    let k = intersection_complex(&q8);
    if !(k.facets().len() == 1 && k.facets()[0].count_ones(..) == 4) {
        failures.push(format!("K(Q8) facets {:?}", k.facet_labels()));
    }
    if greedy_collapse(&k, DEFAULT_FACE_BUDGET) != CollapseOutcome::ContractibilityConfirmed {
        failures.push("K(Q8) did not collapse".to_string());
    }

    let (_, c2) = load("C2xC2xC2");
    let models = [
        intersection_complex(&c2),
        order_complex(&c2, |i| c2.is_proper_nontrivial(i)),
        atom_nerve(&c2),
        coatom_nerve(&c2),
    ];
    for (m, name) in models.iter().zip(["intersection", "order", "atom nerve", "coatom nerve"]) {
        let b = betti(m, DEFAULT_FACE_BUDGET).trimmed();
        if b != vec![0, 8] {
            failures.push(format!("C2^3 {name} complex: {b:?}"));
        }
    }
    verdict(8, "topology", &failures, format!("{ran} groups of order at most 24, {gamma_one} with gamma 1"));
}

#[test]
fn criterion_9_sp_lemma() {
    let (mut failures, ran) = suite_check(&["sp-lemma"], 48);
    let expected = suite().groups.iter().filter(|g| g.order <= 48).count();
    if ran != expected {
        failures.push(format!("ran on {ran} of {expected} groups"));
    }
    verdict(9, "p-subgroup lemma", &failures, format!("{ran} groups of order at most 48"));
}
