//! Products of transitive G-sets, marks, and the index bound on domination.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use itertools::Itertools;
use serde::Serialize;

use crate::group::GroupTable;
use crate::lattice::{Lattice, Subgroup, SubgroupClasses};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DoubleCosetSet {
    /// Smallest element of each double coset, ascending.
    pub reps: Vec<u32>,
    pub sizes: Vec<usize>,
}

/// The `(H, K)`-double cosets `HgK`, found by a sweep in element order.
pub fn double_cosets(g: &GroupTable, h: &Subgroup, k: &Subgroup) -> DoubleCosetSet {
    let n = g.order();
    let mut seen = FixedBitSet::with_capacity(n);
    let mut reps = Vec::new();
    let mut sizes = Vec::new();
    for x in 0..n as u32 {
        if seen.contains(x as usize) {
            continue;
        }
        let mut size = 0;
        for &a in h.elements() {
            let ax = g.mul(a, x);
            for &b in k.elements() {
                let y = g.mul(ax, b) as usize;
                if !seen.put(y) {
                    size += 1;
                }
            }
        }
        reps.push(x);
        sizes.push(size);
    }
    DoubleCosetSet { reps, sizes }
}

/// A G-set as multiplicities of transitive pieces `G/H_j` keyed by class.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GSetDecomposition {
    pub coeffs: BTreeMap<usize, usize>,
}

impl GSetDecomposition {
    pub fn cardinality(&self, lat: &Lattice, cls: &SubgroupClasses) -> usize {
        self.coeffs.iter().map(|(&c, &a)| a * lat.group_order() / lat.order_of(cls.rep(c))).sum()
    }

    /// No summand other than the regular one `G/1`.
    pub fn is_regular(&self, cls: &SubgroupClasses, lat: &Lattice) -> bool {
        let trivial = cls.class_of[lat.trivial()];
        self.coeffs.keys().all(|&c| c == trivial)
    }

    pub fn coefficient(&self, class: usize) -> usize {
        self.coeffs.get(&class).copied().unwrap_or(0)
    }
}

/// `[G/H][G/K]` as a sum over double coset representatives `g` of
/// `[G/(H ∩ gKg⁻¹)]`.
pub fn burnside_product(g: &GroupTable, lat: &Lattice, cls: &SubgroupClasses, a: usize, b: usize) -> GSetDecomposition {
    let (h, k) = (cls.rep(a), cls.rep(b));
    let dc = double_cosets(g, lat.subgroup(h), lat.subgroup(k));
    let mut out = GSetDecomposition::default();
    for &x in &dc.reps {
        let meet = lat.meet(h, lat.conjugate(g, x, k));
        *out.coeffs.entry(cls.class_of[meet]).or_insert(0) += 1;
    }
    out
}

/// All class-pair products, indexed `[a][b]`.
pub fn product_table(g: &GroupTable, lat: &Lattice, cls: &SubgroupClasses) -> Vec<Vec<GSetDecomposition>> {
    let c = cls.len();
    let mut table = vec![vec![GSetDecomposition::default(); c]; c];
    for a in 0..c {
        for b in a..c {
            let p = burnside_product(g, lat, cls, a, b);
            table[b][a] = p.clone();
            table[a][b] = p;
        }
    }
    table
}

/// `marks[k][h]` is the number of cosets of `K_k` fixed by `H_h`; row `k`
/// is the mark vector of `G/K_k` and the matrix is lower triangular.
pub fn table_of_marks(g: &GroupTable, lat: &Lattice, cls: &SubgroupClasses) -> Vec<Vec<usize>> {
    let n = g.order();
    (0..cls.len())
        .map(|kc| {
            let k = lat.subgroup(cls.rep(kc));
            let mut seen = FixedBitSet::with_capacity(n);
            let mut coset_reps = Vec::new();
            for x in 0..n as u32 {
                if !seen.contains(x as usize) {
                    coset_reps.push(x);
                    for &y in k.elements() {
                        seen.insert(g.mul(x, y) as usize);
                    }
                }
            }
            (0..cls.len())
                .map(|hc| {
                    let h = lat.subgroup(cls.rep(hc));
                    // hxK = xK iff x⁻¹hx ∈ K
                    coset_reps
                        .iter()
                        .filter(|&&x| {
                            let xi = g.inv(x);
                            h.elements().iter().all(|&e| k.contains(g.mul(g.mul(xi, e), x)))
                        })
                        .count()
                })
                .collect()
        })
        .collect()
}

/// Mark vector of a decomposition, from the rows of the table of marks.
pub fn marks_of(decomp: &GSetDecomposition, marks: &[Vec<usize>]) -> Vec<usize> {
    let width = marks.first().map_or(0, Vec::len);
    let mut out = vec![0; width];
    for (&c, &a) in &decomp.coeffs {
        for (o, m) in out.iter_mut().zip(&marks[c]) {
            *o += a * m;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bullet {
    Normal,
    Minimal,
    Maximal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub bullet: Bullet,
    /// Lattice index of the class representative tested.
    pub subgroup: usize,
    /// A `K` (class representative) where the identity fails, if any.
    pub k: Option<usize>,
    pub predicate: bool,
    pub truth: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BulletVerdict {
    pub bullet: Bullet,
    pub holds: bool,
    pub tested: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharacterizationReport {
    pub abelian: bool,
    pub verdicts: Vec<BulletVerdict>,
    pub counterexamples: Vec<Counterexample>,
}

impl CharacterizationReport {
    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(|v| v.holds)
    }
}

/// Evaluate the three product characterizations (normal, minimal, maximal)
/// on every class and compare with the lattice.
pub fn characterization_report(
    g: &GroupTable,
    lat: &Lattice,
    cls: &SubgroupClasses,
    products: &[Vec<GSetDecomposition>],
) -> CharacterizationReport {
    let n = g.order();
    let c = cls.len();
    let whole = cls.class_of[lat.whole()];
    let trivial = cls.class_of[lat.trivial()];
    let mut counterexamples = Vec::new();
    let mut verdicts = Vec::new();

    // [G/K][G/N] = |G:NK| [G/N∩K] for every K
    let mut tested = 0;
    for x in 0..c {
        tested += 1;
        let xi = cls.rep(x);
        let failing = (0..c).find(|&kc| {
            let ki = cls.rep(kc);
            let meet = lat.meet(xi, ki);
            let num = n * lat.order_of(meet);
            let den = lat.order_of(xi) * lat.order_of(ki);
            if !num.is_multiple_of(den) {
                return true;
            }
            let expected: BTreeMap<usize, usize> = [(cls.class_of[meet], num / den)].into_iter().collect();
            products[kc][x].coeffs != expected
        });
        let predicate = failing.is_none();
        let truth = lat.is_normal(g, xi);
        if predicate != truth {
            counterexamples.push(Counterexample { bullet: Bullet::Normal, subgroup: xi, k: failing.map(|k| cls.rep(k)), predicate, truth });
        }
    }
    verdicts.push(BulletVerdict { bullet: Bullet::Normal, holds: !counterexamples.iter().any(|e| e.bullet == Bullet::Normal), tested });

    // [G/K][G/A] = |G:K| [G/A], or purely regular, for every K ≠ 1
    let mut tested = 0;
    for x in 0..c {
        if x == trivial {
            continue;
        }
        tested += 1;
        let xi = cls.rep(x);
        let failing = (0..c).filter(|&kc| kc != trivial).find(|&kc| {
            let p = &products[kc][x];
            let scaled: BTreeMap<usize, usize> = [(x, n / lat.order_of(cls.rep(kc)))].into_iter().collect();
            p.coeffs != scaled && !p.is_regular(cls, lat)
        });
        let predicate = failing.is_none();
        let truth = lat.atoms().contains(&xi);
        if predicate != truth {
            counterexamples.push(Counterexample { bullet: Bullet::Minimal, subgroup: xi, k: failing.map(|k| cls.rep(k)), predicate, truth });
        }
    }
    verdicts.push(BulletVerdict { bullet: Bullet::Minimal, holds: !counterexamples.iter().any(|e| e.bullet == Bullet::Minimal), tested });

    // [G/K][G/H] has no [G/H] summand unless K = G or K is conjugate to H
    let mut tested = 0;
    for x in 0..c {
        if x == whole {
            continue;
        }
        tested += 1;
        let xi = cls.rep(x);
        let failing = (0..c).filter(|&kc| kc != whole && kc != x).find(|&kc| products[kc][x].coefficient(x) > 0);
        let predicate = failing.is_none();
        let truth = lat.coatoms().contains(&xi);
        if predicate != truth {
            counterexamples.push(Counterexample { bullet: Bullet::Maximal, subgroup: xi, k: failing.map(|k| cls.rep(k)), predicate, truth });
        }
    }
    verdicts.push(BulletVerdict { bullet: Bullet::Maximal, holds: !counterexamples.iter().any(|e| e.bullet == Bullet::Maximal), tested });

    CharacterizationReport { abelian: g.is_abelian(), verdicts, counterexamples }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexBound {
    /// Class representatives (lattice indices) of the chosen family.
    pub family: Vec<usize>,
    /// Sum of the class sizes, i.e. of the normalizer indices.
    pub bound: Option<usize>,
    /// Some normal proper non-trivial `H` has a non-regular product with
    /// every proper non-trivial `K`.
    pub gamma1_criterion: bool,
    /// No family qualified although the vertex set is non-empty.
    pub anomaly: bool,
}

/// Cheapest family `{H_i}` such that every proper non-trivial `K` has a
/// non-regular product with some `H_i`; exhaustive up to three members,
/// greedy beyond.
pub fn prop_index_bound(lat: &Lattice, cls: &SubgroupClasses, products: &[Vec<GSetDecomposition>]) -> IndexBound {
    let vertex_classes: Vec<usize> = (0..cls.len()).filter(|&c| lat.is_proper_nontrivial(cls.rep(c))).collect();
    if vertex_classes.is_empty() {
        return IndexBound { family: Vec::new(), bound: None, gamma1_criterion: false, anomaly: false };
    }
    let m = vertex_classes.len();
    // meets[i] = vertex classes K whose product with H_i is not purely regular
    let meets: Vec<FixedBitSet> = vertex_classes
        .iter()
        .map(|&h| {
            let mut b = FixedBitSet::with_capacity(m);
            for (j, &k) in vertex_classes.iter().enumerate() {
                if !products[k][h].is_regular(cls, lat) {
                    b.insert(j);
                }
            }
            b
        })
        .collect();
    let cost: Vec<usize> = vertex_classes.iter().map(|&c| cls.classes[c].members.len()).collect();
    let full = |family: &[usize]| {
        let mut u = FixedBitSet::with_capacity(m);
        for &i in family {
            u.union_with(&meets[i]);
        }
        u.count_ones(..) == m
    };

    let mut best: Option<(usize, Vec<usize>)> = None;
    for size in 1..=3.min(m) {
        for family in (0..m).combinations(size) {
            let total: usize = family.iter().map(|&i| cost[i]).sum();
            if best.as_ref().is_none_or(|b| total < b.0) && full(&family) {
                best = Some((total, family));
            }
        }
    }
    // greedy: most newly met classes per unit cost
    let mut covered = FixedBitSet::with_capacity(m);
    let mut greedy = Vec::new();
    while covered.count_ones(..) < m {
        let pick = (0..m)
            .filter(|i| !greedy.contains(i))
            .max_by(|&a, &b| {
                let ga = meets[a].difference(&covered).count() * cost[b];
                let gb = meets[b].difference(&covered).count() * cost[a];
                ga.cmp(&gb).then(b.cmp(&a))
            });
        match pick {
            Some(i) if meets[i].difference(&covered).count() > 0 => {
                covered.union_with(&meets[i]);
                greedy.push(i);
            }
            _ => break,
        }
    }
    if covered.count_ones(..) == m {
        let total: usize = greedy.iter().map(|&i| cost[i]).sum();
        if best.as_ref().is_none_or(|b| total < b.0) {
            greedy.sort_unstable();
            best = Some((total, greedy));
        }
    }

    let gamma1_criterion = (0..m).any(|i| cost[i] == 1 && meets[i].count_ones(..) == m);
    match best {
        Some((total, family)) => IndexBound {
            family: family.iter().map(|&i| cls.rep(vertex_classes[i])).collect(),
            bound: Some(total),
            gamma1_criterion,
            anomaly: false,
        },
        None => IndexBound { family: Vec::new(), bound: None, gamma1_criterion, anomaly: true },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_group, parse_group_spec, DEFAULT_ELEMENT_CAP};
    use crate::lattice::{enumerate_subgroups, subgroup_classes, Budget};

    struct Ctx {
        g: GroupTable,
        lat: Lattice,
        cls: SubgroupClasses,
    }

    fn setup(text: &str) -> Ctx {
        let g = build_group(&parse_group_spec(text).unwrap(), DEFAULT_ELEMENT_CAP).unwrap();
        let lat = enumerate_subgroups(&g, &Budget::unlimited()).unwrap();
        let cls = subgroup_classes(&g, &lat);
        Ctx { g, lat, cls }
    }

    fn class_of_order(c: &Ctx, order: usize) -> Vec<usize> {
        (0..c.cls.len()).filter(|&k| c.lat.order_of(c.cls.rep(k)) == order).collect()
    }

    fn sub_with(c: &Ctx, elems: &[u32]) -> usize {
        let mut seed = FixedBitSet::with_capacity(c.g.order());
        for &e in elems {
            seed.insert(e as usize);
        }
        c.lat.index_of(crate::lattice::generated_subgroup(&c.g, &seed).members()).unwrap()
    }

    #[test]
    fn double_coset_examples() {
        let c = setup("C6");
        let h = class_of_order(&c, 2)[0];
        let k = class_of_order(&c, 3)[0];
        let dc = double_cosets(&c.g, c.lat.subgroup(c.cls.rep(h)), c.lat.subgroup(c.cls.rep(k)));
        assert_eq!(dc.sizes, vec![6]);

        let c = setup("S3");
        let a3 = class_of_order(&c, 3)[0];
        let a3s = c.lat.subgroup(c.cls.rep(a3));
        assert_eq!(double_cosets(&c.g, a3s, a3s).reps.len(), 2);

        // two different transpositions
        let order2: Vec<usize> = c.lat.atoms().iter().copied().filter(|&a| c.lat.order_of(a) == 2).collect();
        let dc = double_cosets(&c.g, c.lat.subgroup(order2[0]), c.lat.subgroup(order2[1]));
        let mut sizes = dc.sizes.clone();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 4]);
        assert_eq!(dc.sizes.iter().sum::<usize>(), 6);
    }

    #[test]
    fn product_examples() {
        let c = setup("C2xC2");
        let maxes = class_of_order(&c, 2);
        let triv = c.cls.class_of[c.lat.trivial()];
        // in C2xC2 every order-2 subgroup is both an atom and maximal
        let p = burnside_product(&c.g, &c.lat, &c.cls, maxes[0], maxes[0]);
        assert_eq!(p.coeffs, [(maxes[0], 2)].into_iter().collect());
        let p = burnside_product(&c.g, &c.lat, &c.cls, maxes[0], maxes[1]);
        assert_eq!(p.coeffs, [(triv, 1)].into_iter().collect());

        let c = setup("S3");
        let a3 = class_of_order(&c, 3)[0];
        let t = class_of_order(&c, 2)[0];
        let p = burnside_product(&c.g, &c.lat, &c.cls, a3, t);
        assert_eq!(p.coeffs, [(c.cls.class_of[0], 1)].into_iter().collect());
        assert_eq!(p.cardinality(&c.lat, &c.cls), 6);
    }

    #[test]
    fn marks_c4() {
        let c = setup("C4");
        let m = table_of_marks(&c.g, &c.lat, &c.cls);
        assert_eq!(m, vec![vec![4, 0, 0], vec![2, 2, 0], vec![1, 1, 1]]);
        let c = setup("S3");
        let m = table_of_marks(&c.g, &c.lat, &c.cls);
        // classes: 1, (order 2), A3, S3
        assert_eq!(m, vec![vec![6, 0, 0, 0], vec![3, 1, 0, 0], vec![2, 0, 2, 0], vec![1, 1, 1, 1]]);
    }

    #[test]
    fn marks_are_multiplicative() {
        for text in ["S4", "D12", "Q8", "C2xC4", "A4"] {
            let c = setup(text);
            let marks = table_of_marks(&c.g, &c.lat, &c.cls);
            let products = product_table(&c.g, &c.lat, &c.cls);
            for a in 0..c.cls.len() {
                for b in 0..c.cls.len() {
                    let lhs = marks_of(&products[a][b], &marks);
                    let rhs: Vec<usize> = marks[a].iter().zip(&marks[b]).map(|(x, y)| x * y).collect();
                    assert_eq!(lhs, rhs, "{text} {a} {b}");
                    let n = c.g.order();
                    let ia = n / c.lat.order_of(c.cls.rep(a));
                    let ib = n / c.lat.order_of(c.cls.rep(b));
                    assert_eq!(products[a][b].cardinality(&c.lat, &c.cls), ia * ib);
                }
            }
        }
    }

    #[test]
    fn characterization_abelian_and_s3() {
        for text in ["C2xC2", "C12", "C2xC2xC2", "C3xC3", "C4xC2"] {
            let c = setup(text);
            let products = product_table(&c.g, &c.lat, &c.cls);
            let r = characterization_report(&c.g, &c.lat, &c.cls, &products);
            assert!(r.all_hold(), "{text}: {:?}", r.counterexamples);
        }
        let c = setup("S3");
        let products = product_table(&c.g, &c.lat, &c.cls);
        let r = characterization_report(&c.g, &c.lat, &c.cls, &products);
        assert!(r.verdicts.iter().find(|v| v.bullet == Bullet::Normal).unwrap().holds);
        assert!(r.verdicts.iter().find(|v| v.bullet == Bullet::Maximal).unwrap().holds);
        // a transposition subgroup meets its own conjugates in a mixed way
        assert!(r.counterexamples.iter().any(|e| e.bullet == Bullet::Minimal && c.lat.order_of(e.subgroup) == 2));
    }

    #[test]
    fn normality_fails_for_transposition() {
        let c = setup("S3");
        let t = class_of_order(&c, 2)[0];
        let k = class_of_order(&c, 2)[0];
        let p = burnside_product(&c.g, &c.lat, &c.cls, k, t);
        // |G:NK| is not even an integer here: 6*1/(2*2)
        assert_ne!(p.coeffs.len(), 1);
    }

    #[test]
    fn index_bound_examples() {
        let c = setup("Q8");
        let products = product_table(&c.g, &c.lat, &c.cls);
        let r = prop_index_bound(&c.lat, &c.cls, &products);
        assert_eq!(r.bound, Some(1));
        assert_eq!(c.lat.order_of(r.family[0]), 2);
        assert!(r.gamma1_criterion);

        let c = setup("D8");
        let products = product_table(&c.g, &c.lat, &c.cls);
        let r = prop_index_bound(&c.lat, &c.cls, &products);
        assert_eq!(r.bound, Some(2));
        assert!(!r.gamma1_criterion);
        // a = 1, b = 4 in the dihedral element numbering
        let klein1 = sub_with(&c, &[2, 4]);
        let klein2 = sub_with(&c, &[2, 5]);
        let mut fam = r.family.clone();
        fam.sort_unstable();
        let mut expect = vec![klein1, klein2];
        expect.sort_unstable();
        assert_eq!(fam, expect);

        let c = setup("S3");
        let products = product_table(&c.g, &c.lat, &c.cls);
        let r = prop_index_bound(&c.lat, &c.cls, &products);
        assert_eq!(r.bound, Some(4));
        let orders: Vec<usize> = r.family.iter().map(|&h| c.lat.order_of(h)).sorted().collect();
        assert_eq!(orders, vec![2, 3]);

        let c = setup("C7");
        let products = product_table(&c.g, &c.lat, &c.cls);
        let r = prop_index_bound(&c.lat, &c.cls, &products);
        assert_eq!((r.bound, r.anomaly, r.gamma1_criterion), (None, false, false));
    }
}
