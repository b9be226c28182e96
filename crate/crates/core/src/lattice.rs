//! Subgroup lattices: enumeration, inclusion, conjugacy classes and the
//! characteristic subgroups used throughout the crate.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet, VecDeque};
use std::time::Instant;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{GroupTable, NormalKind};

/// A subgroup stored as a bitset over element indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    members: FixedBitSet,
    elems: Vec<u32>,
    gens: Vec<u32>,
}

impl Subgroup {
    pub fn trivial(group_order: usize) -> Self {
        let mut members = FixedBitSet::with_capacity(group_order);
        members.insert(0);
        Self { members, elems: vec![0], gens: Vec::new() }
    }

    fn from_parts(members: FixedBitSet, mut elems: Vec<u32>, gens: Vec<u32>) -> Self {
        elems.sort_unstable();
        Self { members, elems, gens }
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    pub fn members(&self) -> &FixedBitSet {
        &self.members
    }

    /// Elements in increasing index order.
    pub fn elements(&self) -> &[u32] {
        &self.elems
    }

    pub fn generators(&self) -> &[u32] {
        &self.gens
    }

    pub fn contains(&self, g: u32) -> bool {
        self.members.contains(g as usize)
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.members.is_subset(&other.members)
    }

    fn join_element(&self, g: &GroupTable, x: u32) -> Subgroup {
        if self.contains(x) {
            return self.clone();
        }
        let (members, elems) = g.extend_closure(&self.members, &self.elems, &self.gens, x);
        let mut gens = self.gens.clone();
        gens.push(x);
        Subgroup::from_parts(members, elems, gens)
    }
}

/// Orders subgroups by size, then by their sorted element lists.
pub fn canonical_cmp(a: &Subgroup, b: &Subgroup) -> Ordering {
    a.order().cmp(&b.order()).then_with(|| a.elems.cmp(&b.elems))
}

/// Smallest subgroup containing every element of `seed`.
pub fn generated_subgroup(g: &GroupTable, seed: &FixedBitSet) -> Subgroup {
    let mut h = Subgroup::trivial(g.order());
    for x in seed.ones() {
        h = h.join_element(g, x as u32);
    }
    h
}

/// Limits for the exponential parts of the pipeline.
#[derive(Debug, Clone, Copy, Default)]
pub struct Budget {
    pub deadline: Option<Instant>,
    pub max_subgroups: Option<usize>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn with_deadline(deadline: Instant) -> Self {
        Self { deadline: Some(deadline), max_subgroups: None }
    }

    pub fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

/// The full subgroup lattice of a finite group.
#[derive(Debug, Clone)]
pub struct Lattice {
    group_order: usize,
    subgroups: Vec<Subgroup>,
    index: HashMap<FixedBitSet, usize>,
    below: Vec<FixedBitSet>,
    above: Vec<FixedBitSet>,
    atoms: Vec<usize>,
    coatoms: Vec<usize>,
    vertex_set: Vec<usize>,
}

fn cyclic_subgroups(g: &GroupTable) -> Vec<Subgroup> {
    let mut seen: HashSet<FixedBitSet> = HashSet::new();
    let mut out = Vec::new();
    for x in 0..g.order() as u32 {
        let mut members = FixedBitSet::with_capacity(g.order());
        let mut elems = Vec::new();
        let mut y = 0;
        loop {
            members.insert(y as usize);
            elems.push(y);
            y = g.mul(y, x);
            if y == 0 {
                break;
            }
        }
        if seen.insert(members.clone()) {
            let gens = if x == 0 { vec![] } else { vec![x] };
            out.push(Subgroup::from_parts(members, elems, gens));
        }
    }
    out
}

fn check_budget(budget: &Budget, found: usize, stage: &'static str) -> Result<()> {
    if budget.expired() || budget.max_subgroups.is_some_and(|m| found > m) {
        return Err(Error::BudgetExceeded { stage, progress: format!("{found} subgroups found so far") });
    }
    Ok(())
}

/// Enumerates every subgroup: seed with the cyclic subgroups, then close
/// under "join with a cyclic subgroup" until nothing new appears.
pub fn enumerate_subgroups(g: &GroupTable, budget: &Budget) -> Result<Lattice> {
    let cyclic = cyclic_subgroups(g);
    let mut list: Vec<Subgroup> = Vec::new();
    let mut found: HashSet<FixedBitSet> = HashSet::new();
    let mut queue = VecDeque::new();
    for c in &cyclic {
        found.insert(c.members.clone());
        queue.push_back(list.len());
        list.push(c.clone());
    }
    let mut processed = 0usize;
    while let Some(i) = queue.pop_front() {
        processed += 1;
        if processed.is_multiple_of(32) {
            check_budget(budget, list.len(), "subgroup enumeration")?;
        }
        for c in &cyclic {
            let Some(&x) = c.gens.first() else { continue };
            if list[i].contains(x) {
                continue;
            }
            let k = list[i].join_element(g, x);
            if found.insert(k.members.clone()) {
                queue.push_back(list.len());
                list.push(k);
            }
        }
    }
    check_budget(budget, list.len(), "subgroup enumeration")?;
    Ok(Lattice::from_subgroups(g.order(), list))
}

/// Second, independent enumeration: repeatedly join every pair of known
/// subgroups (naive product closure) until a fixed point. Returns member
/// bitsets sorted canonically.
pub fn enumerate_subgroups_all_pairs(g: &GroupTable, budget: &Budget) -> Result<Vec<FixedBitSet>> {
    // generators per subgroup kept small by construction: union of two lists
    let mut subs: Vec<(FixedBitSet, Vec<u32>)> = Vec::new();
    let mut found: HashSet<FixedBitSet> = HashSet::new();
    for x in 0..g.order() as u32 {
        let (bits, _) = naive_closure(g, &[x]);
        if found.insert(bits.clone()) {
            subs.push((bits, if x == 0 { vec![] } else { vec![x] }));
        }
    }
    let mut k = 0;
    while k < subs.len() {
        if k % 16 == 0 {
            check_budget(budget, subs.len(), "all-pairs enumeration")?;
        }
        for j in 0..k {
            let (a, b) = (&subs[k], &subs[j]);
            if a.0.is_subset(&b.0) || b.0.is_subset(&a.0) {
                continue;
            }
            let mut gens = a.1.clone();
            for &s in &b.1 {
                if !a.0.contains(s as usize) && !gens.contains(&s) {
                    gens.push(s);
                }
            }
            let (bits, _) = naive_closure(g, &gens);
            if !found.contains(&bits) {
                let gens = prune_generators(g, &gens);
                found.insert(bits.clone());
                subs.push((bits, gens));
            }
        }
        k += 1;
    }
    let mut out: Vec<(usize, Vec<u32>, FixedBitSet)> = subs
        .into_iter()
        .map(|(b, _)| {
            let elems: Vec<u32> = b.ones().map(|x| x as u32).collect();
            (elems.len(), elems, b)
        })
        .collect();
    out.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    Ok(out.into_iter().map(|(_, _, b)| b).collect())
}

/// Right-multiplication closure of `gens` starting from the identity.
fn naive_closure(g: &GroupTable, gens: &[u32]) -> (FixedBitSet, usize) {
    let mut bits = FixedBitSet::with_capacity(g.order());
    bits.insert(0);
    let mut stack = vec![0u32];
    let mut count = 1;
    while let Some(x) = stack.pop() {
        for &s in gens {
            let y = g.mul(x, s);
            if !bits.contains(y as usize) {
                bits.insert(y as usize);
                stack.push(y);
                count += 1;
            }
        }
    }
    (bits, count)
}

fn prune_generators(g: &GroupTable, gens: &[u32]) -> Vec<u32> {
    let mut kept: Vec<u32> = Vec::new();
    let mut bits = naive_closure(g, &[]).0;
    for &s in gens {
        if !bits.contains(s as usize) {
            kept.push(s);
            bits = naive_closure(g, &kept).0;
        }
    }
    kept
}

impl Lattice {
    fn from_subgroups(group_order: usize, mut subgroups: Vec<Subgroup>) -> Self {
        subgroups.sort_by(canonical_cmp);
        let n = subgroups.len();
        let index: HashMap<FixedBitSet, usize> =
            subgroups.iter().enumerate().map(|(i, s)| (s.members.clone(), i)).collect();
        let mut below = vec![FixedBitSet::with_capacity(n); n];
        let mut above = vec![FixedBitSet::with_capacity(n); n];
        for i in 0..n {
            for j in 0..=i {
                if subgroups[i].order().is_multiple_of(subgroups[j].order()) && subgroups[j].is_subgroup_of(&subgroups[i]) {
                    below[i].insert(j);
                    above[j].insert(i);
                }
            }
        }
        let whole = n - 1;
        let atoms = (0..n).filter(|&i| is_prime(subgroups[i].order())).collect();
        let coatoms = if n == 1 {
            Vec::new()
        } else {
            (0..whole).filter(|&i| above[i].count_ones(..) == 2).collect()
        };
        let vertex_set = if n <= 2 { Vec::new() } else { (1..whole).collect() };
        Self { group_order, subgroups, index, below, above, atoms, coatoms, vertex_set }
    }

    pub fn group_order(&self) -> usize {
        self.group_order
    }

    pub fn len(&self) -> usize {
        self.subgroups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subgroups.is_empty()
    }

    pub fn subgroups(&self) -> &[Subgroup] {
        &self.subgroups
    }

    pub fn subgroup(&self, i: usize) -> &Subgroup {
        &self.subgroups[i]
    }

    pub fn order_of(&self, i: usize) -> usize {
        self.subgroups[i].order()
    }

    pub fn trivial(&self) -> usize {
        0
    }

    pub fn whole(&self) -> usize {
        self.subgroups.len() - 1
    }

    pub fn index_of(&self, members: &FixedBitSet) -> Option<usize> {
        self.index.get(members).copied()
    }

    /// `S_i ⊆ S_j`.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.below[j].contains(i)
    }

    /// Subgroups contained in `i`, including `i`.
    pub fn below(&self, i: usize) -> &FixedBitSet {
        &self.below[i]
    }

    /// Subgroups containing `i`, including `i`.
    pub fn above(&self, i: usize) -> &FixedBitSet {
        &self.above[i]
    }

    /// Minimal subgroups, i.e. the subgroups of prime order.
    pub fn atoms(&self) -> &[usize] {
        &self.atoms
    }

    /// Maximal subgroups.
    pub fn coatoms(&self) -> &[usize] {
        &self.coatoms
    }

    /// Proper non-trivial subgroups.
    pub fn vertex_set(&self) -> &[usize] {
        &self.vertex_set
    }

    pub fn is_proper_nontrivial(&self, i: usize) -> bool {
        i != 0 && i != self.whole()
    }

    pub fn meet(&self, i: usize, j: usize) -> usize {
        let mut m = self.subgroups[i].members.clone();
        m.intersect_with(&self.subgroups[j].members);
        self.index[&m]
    }

    pub fn join(&self, g: &GroupTable, i: usize, j: usize) -> usize {
        let mut h = self.subgroups[i].clone();
        for &x in self.subgroups[j].elements() {
            h = h.join_element(g, x);
        }
        self.index[&h.members]
    }

    /// Index of `x S_i x⁻¹`.
    pub fn conjugate(&self, g: &GroupTable, x: u32, i: usize) -> usize {
        let mut m = FixedBitSet::with_capacity(self.group_order);
        for &h in self.subgroups[i].elements() {
            m.insert(g.conj(x, h) as usize);
        }
        self.index[&m]
    }

    pub fn is_normal(&self, g: &GroupTable, i: usize) -> bool {
        let s = &self.subgroups[i];
        g.generators().iter().all(|&x| s.gens.iter().all(|&h| s.contains(g.conj(x, h))))
    }

    /// Subgroups whose order is a power of `p` (including the trivial one).
    pub fn p_subgroups(&self, p: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| is_power_of(self.order_of(i), p)).collect()
    }

    /// Sylow `p`-subgroups (empty when `p` does not divide the order).
    pub fn sylow_subgroups(&self, p: usize) -> Vec<usize> {
        if !self.group_order.is_multiple_of(p) {
            return Vec::new();
        }
        let mut pk = 1;
        while self.group_order.is_multiple_of(pk * p) {
            pk *= p;
        }
        (0..self.len()).filter(|&i| self.order_of(i) == pk).collect()
    }
}

pub(crate) fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn is_power_of(mut n: usize, p: usize) -> bool {
    while n.is_multiple_of(p) {
        n /= p;
    }
    n == 1
}

pub fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn elems_to_bits(n: usize, elems: impl IntoIterator<Item = u32>) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(n);
    for x in elems {
        b.insert(x as usize);
    }
    b
}

/// `[A, B]` for subgroups given by element lists.
pub fn commutator_subgroup(g: &GroupTable, a: &[u32], b: &[u32]) -> Subgroup {
    let mut seed = FixedBitSet::with_capacity(g.order());
    for &x in a {
        for &y in b {
            seed.insert(g.commutator(x, y) as usize);
        }
    }
    generated_subgroup(g, &seed)
}

pub fn center(g: &GroupTable) -> Subgroup {
    let members =
        elems_to_bits(g.order(), (0..g.order() as u32).filter(|&z| g.generators().iter().all(|&x| g.mul(x, z) == g.mul(z, x))));
    generated_subgroup(g, &members)
}

fn whole_group(g: &GroupTable) -> Subgroup {
    generated_subgroup(g, &elems_to_bits(g.order(), g.generators().iter().copied()))
}

/// `G = G⁽⁰⁾ ≥ G⁽¹⁾ ≥ ...` down to its fixed point.
pub fn derived_series(g: &GroupTable) -> Vec<Subgroup> {
    let mut series = vec![whole_group(g)];
    loop {
        let last = series.last().unwrap();
        let next = commutator_subgroup(g, last.elements(), last.elements());
        if next.order() == last.order() {
            return series;
        }
        series.push(next);
    }
}

/// `γ₁ = G, γ_{k+1} = [γ_k, G]` down to its fixed point.
pub fn lower_central_series(g: &GroupTable) -> Vec<Subgroup> {
    let all: Vec<u32> = (0..g.order() as u32).collect();
    let mut series = vec![whole_group(g)];
    loop {
        let last = series.last().unwrap();
        let next = commutator_subgroup(g, last.elements(), &all);
        if next.order() == last.order() {
            return series;
        }
        series.push(next);
    }
}

/// Member bitset of the normal subgroup named by `kind`.
pub fn resolve_normal(g: &GroupTable, kind: NormalKind) -> Result<FixedBitSet> {
    Ok(match kind {
        NormalKind::Center => center(g).members,
        NormalKind::Derived(k) => {
            let series = derived_series(g);
            let k = (k as usize).min(series.len() - 1);
            series[k].members.clone()
        }
        NormalKind::NilpotentResidual => lower_central_series(g).pop().unwrap().members,
        NormalKind::Frattini | NormalKind::MinimalJoin => {
            let lat = enumerate_subgroups(g, &Budget::unlimited())?;
            let chars = characteristic_subgroups(g, &lat);
            let i = if kind == NormalKind::Frattini { chars.frattini } else { chars.n_g };
            lat.subgroup(i).members.clone()
        }
    })
}

/// Characteristic subgroups, as lattice indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharacteristicSubgroups {
    /// Join of all minimal subgroups.
    pub n_g: usize,
    pub frattini: usize,
    pub nilpotent_residual: usize,
    pub center: usize,
    pub derived: usize,
    /// Identity plus every element lying in a minimal subgroup.
    #[serde(skip)]
    pub prime_order_elements: FixedBitSet,
}

pub fn characteristic_subgroups(g: &GroupTable, lat: &Lattice) -> CharacteristicSubgroups {
    let n = g.order();
    let mut union = FixedBitSet::with_capacity(n);
    union.insert(0);
    for &a in lat.atoms() {
        union.union_with(lat.subgroup(a).members());
    }
    let n_g = lat.index[&generated_subgroup(g, &union).members];
    let frattini = if lat.coatoms().is_empty() {
        lat.whole()
    } else {
        let mut m = lat.subgroup(lat.coatoms()[0]).members.clone();
        for &c in lat.coatoms() {
            m.intersect_with(lat.subgroup(c).members());
        }
        lat.index[&m]
    };
    let residual = lower_central_series(g).pop().unwrap();
    let derived = derived_series(g).get(1).cloned().unwrap_or_else(|| whole_group(g));
    CharacteristicSubgroups {
        n_g,
        frattini,
        nilpotent_residual: lat.index[&residual.members],
        center: lat.index[&center(g).members],
        derived: lat.index[&derived.members],
        prime_order_elements: union,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupClassification {
    pub is_abelian: bool,
    pub is_nilpotent: bool,
    pub is_solvable: bool,
    pub is_supersolvable: bool,
    pub is_p_group: bool,
    pub prime: Option<usize>,
    pub exponent: u64,
    /// Product of the distinct primes dividing the order.
    pub sfp: u64,
}

pub fn classify_group(g: &GroupTable, lat: &Lattice) -> GroupClassification {
    let n = g.order();
    let primes = prime_factors(n);
    let exponent = g.elem_orders().iter().fold(1u64, |acc, &o| acc / gcd(acc, o as u64) * o as u64);
    let sfp = primes.iter().map(|&p| p as u64).product();
    let is_nilpotent = primes.iter().all(|&p| lat.sylow_subgroups(p).len() == 1);
    let is_solvable = derived_series(g).last().unwrap().order() == 1;
    let is_supersolvable = lat.coatoms().iter().all(|&c| is_prime(n / lat.order_of(c)));
    GroupClassification {
        is_abelian: g.is_abelian(),
        is_nilpotent,
        is_solvable,
        is_supersolvable,
        is_p_group: primes.len() == 1,
        prime: if primes.len() == 1 { Some(primes[0]) } else { None },
        exponent,
        sfp,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupClass {
    /// Member with the smallest lattice index.
    pub rep: usize,
    pub members: Vec<usize>,
    /// Normalizer of the representative.
    pub normalizer: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupClasses {
    pub classes: Vec<SubgroupClass>,
    /// Class index of every lattice subgroup.
    pub class_of: Vec<usize>,
}

impl SubgroupClasses {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn rep(&self, c: usize) -> usize {
        self.classes[c].rep
    }
}

pub fn normalizer(g: &GroupTable, lat: &Lattice, i: usize) -> usize {
    let s = lat.subgroup(i);
    let bits = elems_to_bits(
        g.order(),
        (0..g.order() as u32).filter(|&x| s.gens.iter().all(|&h| s.contains(g.conj(x, h)))),
    );
    lat.index[&bits]
}

/// Partitions the lattice into conjugacy classes, ordered by representative.
pub fn subgroup_classes(g: &GroupTable, lat: &Lattice) -> SubgroupClasses {
    let n = lat.len();
    let mut class_of = vec![usize::MAX; n];
    let mut classes = Vec::new();
    for i in 0..n {
        if class_of[i] != usize::MAX {
            continue;
        }
        let c = classes.len();
        class_of[i] = c;
        let mut members = vec![i];
        let mut stack = vec![i];
        while let Some(j) = stack.pop() {
            for &x in g.generators() {
                let k = lat.conjugate(g, x, j);
                if class_of[k] == usize::MAX {
                    class_of[k] = c;
                    members.push(k);
                    stack.push(k);
                }
            }
        }
        members.sort_unstable();
        classes.push(SubgroupClass { rep: i, members, normalizer: normalizer(g, lat, i) });
    }
    SubgroupClasses { classes, class_of }
}
