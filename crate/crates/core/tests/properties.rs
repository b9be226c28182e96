use std::collections::HashSet;

use fixedbitset::FixedBitSet;
use proptest::prelude::*;

use intgraph::burnside::{marks_of, product_table, table_of_marks};
use intgraph::complexes::{betti, SimplicialComplex, DEFAULT_FACE_BUDGET};
use intgraph::domgraph::{domination_oracle, is_dominating};
use intgraph::group::{quotient_group, Permutation};
use intgraph::lattice::{enumerate_subgroups_all_pairs, subgroup_classes};
use intgraph::theorems::{gamma_abelian_formula, gamma_dihedral_formula};
use intgraph::{build_group, enumerate_subgroups, gamma_exact, intersection_graph, Budget, GammaValue, GroupSpec, GroupTable, Lattice, SearchLimits, DEFAULT_ELEMENT_CAP};

const SMALL: [&str; 12] = ["C2xC2", "C12", "D8", "D12", "Q8", "S3", "A4", "C2xC2xC2", "D18", "SD(7,3)", "C3xC6", "D16"];

fn load_spec(spec: &GroupSpec) -> (GroupTable, Lattice) {
    let g = build_group(spec, DEFAULT_ELEMENT_CAP).unwrap();
    let lat = enumerate_subgroups(&g, &Budget::unlimited()).unwrap();
    (g, lat)
}

fn load(text: &str) -> (GroupTable, Lattice) {
    load_spec(&intgraph::parse_group_spec(text).unwrap())
}

fn permutation(degree: usize) -> impl Strategy<Value = Permutation> {
    Just((0..degree as u32).collect::<Vec<u32>>())
        .prop_shuffle()
        .prop_map(|images| Permutation::new(images).unwrap())
}

fn prime_power() -> impl Strategy<Value = usize> {
    prop::sample::select(vec![2usize, 3, 4, 5, 7, 8, 9, 11])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn abelian_gamma_matches_formula(factors in prop::collection::vec(prime_power(), 1..4)) {
        let order: usize = factors.iter().product();
        prop_assume!(order <= 200);
        let (g, lat) = load_spec(&GroupSpec::Abelian(factors));
        let c = gamma_exact(&lat, SearchLimits::default());
        prop_assert!(c.optimal);
        if lat.vertex_set().is_empty() {
            prop_assert_eq!(c.gamma, GammaValue::Aleph0);
        } else {
            prop_assert_eq!(c.gamma, gamma_abelian_formula(&g).unwrap());
        }
    }

    #[test]
    fn dihedral_gamma_matches_formula(n in 2usize..80) {
        let (_, lat) = load_spec(&GroupSpec::Dihedral(2 * n));
        prop_assert_eq!(gamma_exact(&lat, SearchLimits::default()).gamma, gamma_dihedral_formula(n).unwrap());
    }

    #[test]
    fn permutation_groups_enumerate_consistently(gens in prop::collection::vec(permutation(5), 1..3)) {
        let (g, lat) = load_spec(&GroupSpec::Generators { degree: 5, gens });
        let a: HashSet<FixedBitSet> = lat.subgroups().iter().map(|s| s.members().clone()).collect();
        let b: HashSet<FixedBitSet> = enumerate_subgroups_all_pairs(&g, &Budget::unlimited()).unwrap().into_iter().collect();
        prop_assert_eq!(&a, &b);
        for s in lat.subgroups() {
            prop_assert_eq!(g.order() % s.order(), 0);
        }
        let graph = intersection_graph(&lat);
        if graph.len() <= 20 {
            let c = gamma_exact(&lat, SearchLimits::default());
            let oracle = domination_oracle(&graph, graph.len()).map(|(v, _)| v).unwrap_or(GammaValue::Aleph0);
            prop_assert_eq!(c.gamma, oracle);
        }
    }

    #[test]
    fn meet_and_join_bound_their_arguments(k in 0usize..SMALL.len(), i in 0usize..64, j in 0usize..64) {
        let (g, lat) = load(SMALL[k]);
        let (i, j) = (i % lat.len(), j % lat.len());
        let m = lat.meet(i, j);
        let u = lat.join(&g, i, j);
        prop_assert!(lat.leq(m, i) && lat.leq(m, j));
        prop_assert!(lat.leq(i, u) && lat.leq(j, u));
        let mut both = lat.subgroup(i).members().clone();
        both.intersect_with(lat.subgroup(j).members());
        prop_assert_eq!(&both, lat.subgroup(m).members());
        prop_assert_eq!(lat.meet(i, j), lat.meet(j, i));
    }

    #[test]
    fn domination_is_atom_coverage(k in 0usize..SMALL.len(), picks in prop::collection::vec(0usize..64, 1..5)) {
        let (_, lat) = load(SMALL[k]);
        let graph = intersection_graph(&lat);
        prop_assume!(!graph.is_empty());
        let mut picks: Vec<usize> = picks.into_iter().map(|p| p % graph.len()).collect();
        picks.sort_unstable();
        picks.dedup();
        let covers = lat.atoms().iter().all(|&a| picks.iter().any(|&p| lat.leq(a, graph.vertices()[p])));
        prop_assert_eq!(is_dominating(&graph, &picks), covers);
    }

    #[test]
    fn quotients_do_not_lower_gamma(k in 0usize..SMALL.len(), n in 0usize..64) {
        let (g, lat) = load(SMALL[k]);
        let normals: Vec<usize> = (0..lat.len()).filter(|&i| lat.is_normal(&g, i)).collect();
        let n = normals[n % normals.len()];
        let (q, _) = quotient_group(&g, lat.subgroup(n).members()).unwrap();
        let qlat = enumerate_subgroups(&q, &Budget::unlimited()).unwrap();
        let gamma = gamma_exact(&lat, SearchLimits::default()).gamma;
        prop_assert!(gamma <= gamma_exact(&qlat, SearchLimits::default()).gamma);
    }

    #[test]
    fn burnside_products_commute_and_respect_marks(k in 0usize..SMALL.len()) {
        let (g, lat) = load(SMALL[k]);
        let cls = subgroup_classes(&g, &lat);
        let products = product_table(&g, &lat, &cls);
        let marks = table_of_marks(&g, &lat, &cls);
        for a in 0..cls.len() {
            for b in 0..cls.len() {
                prop_assert_eq!(&products[a][b], &products[b][a]);
                let m = marks_of(&products[a][b], &marks);
                for h in 0..cls.len() {
                    prop_assert_eq!(m[h], marks[a][h] * marks[b][h]);
                }
            }
        }
    }

    #[test]
    fn euler_characteristic_matches_betti(facets in prop::collection::vec(prop::collection::btree_set(0usize..7, 1..5), 1..7)) {
        let sets: Vec<FixedBitSet> = facets.iter().map(|f| {
            let mut b = FixedBitSet::with_capacity(7);
            f.iter().for_each(|&v| b.insert(v));
            b
        }).collect();
        let k = SimplicialComplex::from_sets((0..7).collect(), sets.clone());
        let p = betti(&k, DEFAULT_FACE_BUDGET);
        let alternating: i64 = p.reduced_betti.iter().enumerate().map(|(i, &b)| if i % 2 == 0 { b } else { -b }).sum();
        prop_assert_eq!(p.euler, Some(1 + alternating));
        prop_assert!(p.reduced_betti.iter().all(|&b| b >= 0));

        // coning off any complex kills its homology
        let cone: Vec<FixedBitSet> = sets.into_iter().map(|mut b| { b.grow(8); b.insert(7); b }).collect();
        let c = SimplicialComplex::from_sets((0..8).collect(), cone);
        prop_assert!(betti(&c, DEFAULT_FACE_BUDGET).is_acyclic());
    }
}

#[test]
fn aleph0_is_the_top_value() {
    assert!(GammaValue::Finite(usize::MAX) < GammaValue::Aleph0);
    assert_eq!(serde_json::to_string(&GammaValue::Aleph0).unwrap(), "\"aleph0\"");
    assert_eq!(serde_json::to_string(&GammaValue::Finite(3)).unwrap(), "3");
}
