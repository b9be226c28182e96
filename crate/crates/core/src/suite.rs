//! Runs every invariant over a corpus of groups.

use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::burnside::{characterization_report, marks_of, product_table, prop_index_bound, table_of_marks};
use crate::complexes::{betti, intersection_complex, order_complex, topology_report, DEFAULT_FACE_BUDGET};
use crate::corpus::CorpusEntry;
use crate::domgraph::{
    above_carrier, domination_oracle, gamma_exact, graph_gamma, gset_intersection_graph, intersection_graph,
    is_dominating, p_subgroup_carrier, restricted_graph, sum_number, DominationCertificate, GammaValue,
};
use crate::error::{Error, Result};
use crate::group::{build_group, parse_group_spec, quotient_group, GroupTable};
use crate::lattice::{
    characteristic_subgroups, classify_group, enumerate_subgroups, prime_factors, subgroup_classes, Budget, Lattice,
};
use crate::setcover::SearchLimits;
use crate::theorems::{verify_bounds, BoundsInput, GroupFamily, TheoremReport, Verdict};

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub order_max: usize,
    pub cap: usize,
    pub deadline: Option<Instant>,
    /// Graph-level brute force only up to this many vertices.
    pub oracle_vertex_limit: usize,
    pub structure_order_max: usize,
    pub topology_order_max: usize,
    pub face_budget: usize,
    pub random_subsets: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            order_max: 48,
            cap: crate::group::DEFAULT_ELEMENT_CAP,
            deadline: None,
            oracle_vertex_limit: 25,
            structure_order_max: 48,
            topology_order_max: 24,
            face_budget: DEFAULT_FACE_BUDGET,
            random_subsets: 200,
        }
    }
}

impl SuiteOptions {
    fn limits(&self) -> SearchLimits {
        SearchLimits { deadline: self.deadline, max_nodes: None }
    }

    fn budget(&self) -> Budget {
        Budget { deadline: self.deadline, max_subgroups: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupVerification {
    pub group: String,
    pub order: usize,
    pub subgroups: usize,
    pub gamma: GammaValue,
    pub gamma_optimal: bool,
    pub sum_number: GammaValue,
    pub checks: Vec<Check>,
    pub reports: Vec<TheoremReport>,
    /// Counterexamples to the non-abelian product characterizations.
    pub characterization_notes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aborted: Option<String>,
}

impl GroupVerification {
    pub fn violations(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
            + self.reports.iter().filter(|r| r.verdict == Verdict::Violation).count()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub groups: Vec<GroupVerification>,
    pub violations: usize,
    pub aborted: usize,
}

struct Analysed {
    g: GroupTable,
    lat: Lattice,
    gamma: DominationCertificate,
}

fn analyse(g: GroupTable, opts: &SuiteOptions) -> Result<Analysed> {
    let lat = enumerate_subgroups(&g, &opts.budget())?;
    let gamma = gamma_exact(&lat, opts.limits());
    Ok(Analysed { g, lat, gamma })
}

fn check(name: &'static str, passed: bool, detail: impl Into<String>) -> Check {
    Check { name, passed, detail: if passed { String::new() } else { detail.into() } }
}

/// Upper and lower ends of a certificate.
fn bracket(c: &DominationCertificate) -> (GammaValue, GammaValue) {
    let lower = if c.optimal { c.gamma } else { GammaValue::Finite(c.lower_bound) };
    (lower, c.gamma)
}

fn seed_of(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

/// Every invariant that applies to one group.
pub fn verify_group(entry: &CorpusEntry, opts: &SuiteOptions) -> Result<GroupVerification> {
    let spec = parse_group_spec(&entry.spec)?;
    let g = build_group(&spec, opts.cap)?;
    let Analysed { g, lat, gamma } = analyse(g, opts)?;
    let n = g.order();
    let graph = intersection_graph(&lat);
    let sum = sum_number(&g, &lat, opts.limits());
    let chars = characteristic_subgroups(&g, &lat);
    let class = classify_group(&g, &lat);
    let mut checks = Vec::new();

    if let Some(e) = entry.gamma {
        checks.push(check("expected-gamma", gamma.optimal && gamma.gamma == e.value, format!("expected {}, got {}", e.value, gamma.gamma)));
    }
    if let Some(e) = entry.sum_number {
        checks.push(check("expected-sum-number", sum.optimal && sum.value == e.value, format!("expected {}, got {}", e.value, sum.value)));
    }
    if let Some(e) = entry.subgroup_count {
        checks.push(check("expected-subgroup-count", lat.len() == e.value, format!("expected {}, got {}", e.value, lat.len())));
    }

    // brute force on the graph itself
    if graph.len() <= opts.oracle_vertex_limit {
        let oracle = domination_oracle(&graph, graph.len()).map(|(v, _)| v);
        checks.push(check(
            "oracle-equivalence",
            gamma.optimal && oracle == Some(gamma.gamma),
            format!("oracle {:?}, set cover {}", oracle, gamma.gamma),
        ));
    }

    // domination of the whole graph is the same as covering the atoms
    if !graph.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed_of(g.label()));
        let mut bad = None;
        for _ in 0..opts.random_subsets {
            let k = rng.gen_range(1..=graph.len().min(6));
            let picks: Vec<usize> = sample(&mut rng, graph.len(), k).into_vec();
            let by_atoms = lat
                .atoms()
                .iter()
                .all(|&a| picks.iter().any(|&p| lat.leq(a, graph.vertices()[p])));
            if is_dominating(&graph, &picks) != by_atoms {
                bad = Some(picks);
                break;
            }
        }
        checks.push(check("random-subset-domination", bad.is_none(), format!("{bad:?}")));
    }

    if gamma.optimal && sum.optimal {
        checks.push(check("gamma-at-most-sum-number", gamma.gamma <= sum.value, format!("{} > {}", gamma.gamma, sum.value)));
    }

    // γ = 1 iff the subgroup generated by the minimal subgroups is proper,
    // i.e. it has no complement
    if !graph.is_empty() && gamma.optimal {
        let ng = chars.n_g;
        let proper = ng != lat.whole();
        let has_complement = (0..lat.len())
            .any(|h| lat.order_of(h) * lat.order_of(ng) == n && lat.meet(h, ng) == lat.trivial());
        checks.push(check(
            "gamma-one-iff-nonsplit",
            gamma.gamma.is_one() == proper && proper == !has_complement,
            format!("gamma {}, proper {proper}, complement {has_complement}", gamma.gamma),
        ));
    }

    // edges of Γ(S_p) are those of Γ(G)
    for p in prime_factors(n) {
        let sp = restricted_graph(&lat, p_subgroup_carrier(&lat, p));
        let induced = sp.edges().iter().all(|&(a, b)| {
            graph.adjacent(graph.position(sp.vertices()[a]).unwrap(), graph.position(sp.vertices()[b]).unwrap())
        }) && sp.edge_count()
            == sp
                .vertices()
                .iter()
                .enumerate()
                .flat_map(|(i, &a)| sp.vertices()[i + 1..].iter().map(move |&b| (a, b)))
                .filter(|&(a, b)| graph.adjacent(graph.position(a).unwrap(), graph.position(b).unwrap()))
                .count();
        checks.push(check("sp-graph-is-induced", induced, format!("p = {p}")));
    }

    let structural = n <= opts.structure_order_max;
    if structural {
        quotient_checks(&g, &lat, &gamma, opts, &mut checks)?;
        sp_lemma_checks(&g, &lat, opts, &mut checks);
    }

    let mut characterization_notes = 0;
    if structural {
        let cls = subgroup_classes(&g, &lat);
        let products = product_table(&g, &lat, &cls);
        let marks = table_of_marks(&g, &lat, &cls);
        let c = cls.len();
        let mut card_ok = true;
        let mut marks_ok = true;
        for a in 0..c {
            for b in 0..c {
                let ia = n / lat.order_of(cls.rep(a));
                let ib = n / lat.order_of(cls.rep(b));
                card_ok &= products[a][b].cardinality(&lat, &cls) == ia * ib;
                let lhs = marks_of(&products[a][b], &marks);
                marks_ok &= lhs.iter().zip(&marks[a]).zip(&marks[b]).all(|((l, x), y)| *l == x * y);
            }
        }
        checks.push(check("burnside-cardinality", card_ok, ""));
        checks.push(check("marks-multiplicative", marks_ok, ""));
        let ib = prop_index_bound(&lat, &cls, &products);
        if !graph.is_empty() {
            let (lower, _) = bracket(&gamma);
            checks.push(check(
                "index-bound",
                !ib.anomaly && ib.bound.is_some_and(|b| lower <= GammaValue::Finite(b)),
                format!("bound {:?}, gamma {}", ib.bound, gamma.gamma),
            ));
        }
        if gamma.optimal {
            checks.push(check(
                "gamma-one-criterion",
                ib.gamma1_criterion == gamma.gamma.is_one(),
                format!("criterion {}, gamma {}", ib.gamma1_criterion, gamma.gamma),
            ));
        }
        let reps: Vec<usize> = cls.classes.iter().map(|k| k.rep).collect();
        checks.push(check("gset-sum-graph", gset_intersection_graph(&g, &lat, &reps).same_graph(&graph), ""));
        let report = characterization_report(&g, &lat, &cls, &products);
        characterization_notes = report.counterexamples.len();
        if report.abelian {
            checks.push(check("abelian-characterizations", report.all_hold(), format!("{:?}", report.counterexamples)));
        }
    }

    if n <= opts.topology_order_max {
        let t = topology_report(&lat, &chars, gamma.gamma, opts.face_budget);
        checks.push(check("betti-profiles-agree", t.profiles_agree == Some(true), format!("{:?}", t.profiles_agree)));
        checks.push(check(
            "frattini-iff-coatom-nerve-simplex",
            t.frattini_nontrivial == t.coatom_nerve_is_simplex,
            "",
        ));
        checks.push(check("gamma-one-iff-atom-nerve-simplex", t.gamma_is_one == t.atom_nerve_is_simplex, ""));
        if t.gamma_is_one {
            checks.push(check("gamma-one-acyclic", t.acyclic_when_gamma_one == Some(true), ""));
        }
        let euler_ok = [&t.intersection, &t.order, &t.atom_nerve, &t.coatom_nerve].iter().all(|p| {
            p.dimension < 0
                || p.euler
                    == Some(1 + p.reduced_betti.iter().enumerate().map(|(i, &b)| if i % 2 == 0 { b } else { -b }).sum::<i64>())
        });
        checks.push(check("euler-characteristic", euler_ok, ""));
        let k = intersection_complex(&lat);
        checks.push(check("skeleton-is-graph", k.edges() == graph.edges(), ""));
        // the same equivalence for the p-subgroup poset
        for p in prime_factors(n) {
            let sp = p_subgroup_carrier(&lat, p);
            let kc = crate::complexes::intersection_complex_of(&lat, &sp);
            let oc = order_complex(&lat, &sp);
            let (a, b) = (betti(&kc, opts.face_budget), betti(&oc, opts.face_budget));
            checks.push(check("sp-complexes-agree", a.comparable() && b.comparable() && a.agrees_with(&b), format!("p = {p}")));
        }
    }

    let reports = verify_bounds(&BoundsInput {
        group: &g,
        lattice: &lat,
        chars: &chars,
        class: &class,
        gamma: &gamma,
        family: GroupFamily::of(&spec),
    });

    Ok(GroupVerification {
        group: entry.spec.clone(),
        order: n,
        subgroups: lat.len(),
        gamma: gamma.gamma,
        gamma_optimal: gamma.optimal,
        sum_number: sum.value,
        checks,
        reports,
        characterization_notes,
        aborted: None,
    })
}

fn quotient_checks(g: &GroupTable, lat: &Lattice, gamma: &DominationCertificate, opts: &SuiteOptions, checks: &mut Vec<Check>) -> Result<()> {
    let graph_degrees = |gr: &crate::domgraph::IntersectionGraph| (gr.len(), gr.degree_sequence());
    let mut lemma_ok = true;
    let mut corr_ok = true;
    let mut detail = String::new();
    for nidx in 0..lat.len() {
        if !lat.is_normal(g, nidx) {
            continue;
        }
        let (q, _) = quotient_group(g, lat.subgroup(nidx).members())?;
        let qa = analyse(q, opts)?;
        let (lower, _) = bracket(gamma);
        let (_, q_upper) = bracket(&qa.gamma);
        if lower > q_upper {
            lemma_ok = false;
            detail = format!("normal subgroup {nidx}: {} > {}", gamma.gamma, qa.gamma.gamma);
        }
        if lat.is_proper_nontrivial(nidx) {
            let above = restricted_graph(lat, above_carrier(lat, nidx, |_| true));
            corr_ok &= graph_degrees(&above) == graph_degrees(&intersection_graph(&qa.lat));
        }
    }
    checks.push(check("quotient-lemma", lemma_ok, detail));
    checks.push(check("correspondence-graph", corr_ok, ""));
    Ok(())
}

fn sp_lemma_checks(g: &GroupTable, lat: &Lattice, opts: &SuiteOptions, checks: &mut Vec<Check>) {
    let mut ok = true;
    let mut detail = String::new();
    for p in prime_factors(g.order()) {
        let sp_carrier = p_subgroup_carrier(lat, p);
        let sp = restricted_graph(lat, &sp_carrier);
        if sp.is_empty() {
            continue;
        }
        let whole = graph_gamma(&sp, opts.limits());
        for nidx in lat.p_subgroups(p) {
            if nidx == lat.trivial() || !lat.is_proper_nontrivial(nidx) || !lat.is_normal(g, nidx) {
                continue;
            }
            let above = restricted_graph(lat, above_carrier(lat, nidx, &sp_carrier));
            if above.is_empty() {
                continue;
            }
            let part = graph_gamma(&above, opts.limits());
            if bracket(&whole).0 > bracket(&part).1 {
                ok = false;
                detail = format!("p = {p}, normal {nidx}: {} > {}", whole.gamma, part.gamma);
            }
        }
    }
    checks.push(check("sp-lemma", ok, detail));
}

/// Result for one entry, turning budget aborts into a marked record.
pub fn verify_entry(entry: &CorpusEntry, opts: &SuiteOptions) -> Result<GroupVerification> {
    match verify_group(entry, opts) {
        Err(Error::BudgetExceeded { stage, progress }) => Ok(GroupVerification {
            group: entry.spec.clone(),
            order: 0,
            subgroups: 0,
            gamma: GammaValue::Aleph0,
            gamma_optimal: false,
            sum_number: GammaValue::Aleph0,
            checks: Vec::new(),
            reports: Vec::new(),
            characterization_notes: 0,
            aborted: Some(format!("{stage}: {progress}")),
        }),
        other => other,
    }
}

/// Entries whose group order is at most `opts.order_max`, checked in
/// parallel and reported in corpus order.
pub fn run_suite(corpus: &[CorpusEntry], opts: &SuiteOptions) -> Result<SuiteReport> {
    let selected: Vec<&CorpusEntry> = corpus
        .iter()
        .filter(|e| {
            parse_group_spec(&e.spec)
                .and_then(|s| build_group(&s, opts.cap))
                .is_ok_and(|g| g.order() <= opts.order_max)
        })
        .collect();
    let groups: Vec<GroupVerification> =
        selected.par_iter().map(|e| verify_entry(e, opts)).collect::<Result<Vec<_>>>()?;
    let violations = groups.iter().map(GroupVerification::violations).sum();
    let aborted = groups.iter().filter(|g| g.aborted.is_some()).count();
    Ok(SuiteReport { groups, violations, aborted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::default_corpus;

    fn run(spec: &str) -> GroupVerification {
        verify_entry(&CorpusEntry::plain(spec), &SuiteOptions::default()).unwrap()
    }

    #[test]
    fn small_groups_pass_every_check() {
        for spec in ["C2xC2", "C6", "D8", "Q8", "S3", "A4", "S4", "D12", "C3xC3", "SD(7,3)"] {
            let v = run(spec);
            assert_eq!(v.violations(), 0, "{spec}: {:?}", v.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>());
            assert!(v.aborted.is_none());
        }
    }

    #[test]
    fn checks_present_for_small_group() {
        let v = run("D8");
        for name in ["oracle-equivalence", "random-subset-domination", "quotient-lemma", "sp-lemma", "burnside-cardinality", "betti-profiles-agree"] {
            assert!(v.check(name).is_some(), "missing {name}");
        }
        assert_eq!(v.gamma, GammaValue::Finite(2));
    }

    #[test]
    fn expired_deadline_is_recorded() {
        let opts = SuiteOptions { deadline: Some(Instant::now()), ..SuiteOptions::default() };
        let v = verify_entry(&CorpusEntry::plain("S5"), &opts).unwrap();
        assert!(v.aborted.is_some());
    }

    #[test]
    fn suite_order_is_stable() {
        let corpus: Vec<CorpusEntry> = default_corpus().into_iter().filter(|e| e.spec.len() <= 3).take(30).collect();
        let opts = SuiteOptions { order_max: 16, ..SuiteOptions::default() };
        let a = run_suite(&corpus, &opts).unwrap();
        let b = run_suite(&corpus, &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.violations, 0);
        assert!(a.groups.iter().all(|g| g.order <= 16));
    }
}
