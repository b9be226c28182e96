//! Simplicial complexes attached to the subgroup poset and their rational
//! homology.

use std::collections::{BTreeSet, HashMap, HashSet};

use fixedbitset::FixedBitSet;
use itertools::Itertools;
use serde::Serialize;

use crate::domgraph::GammaValue;
use crate::lattice::{CharacteristicSubgroups, Lattice};

pub const DEFAULT_FACE_BUDGET: usize = 2_000_000;
/// Largest complex (in faces) on which a collapse is attempted.
pub const COLLAPSE_FACE_LIMIT: usize = 300_000;

type Face = Vec<u32>;

/// A complex stored by its facets over vertex positions `0..labels.len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    labels: Vec<usize>,
    facets: Vec<FixedBitSet>,
}

impl SimplicialComplex {
    /// Keeps only the inclusion-maximal sets; empty sets are dropped.
    pub fn from_sets(labels: Vec<usize>, sets: Vec<FixedBitSet>) -> Self {
        let mut sets: Vec<FixedBitSet> = sets.into_iter().filter(|s| !s.is_clear()).collect();
        sets.sort_by_key(|s| std::cmp::Reverse(s.count_ones(..)));
        let mut facets: Vec<FixedBitSet> = Vec::new();
        for s in sets {
            if !facets.iter().any(|f| s.is_subset(f)) {
                facets.push(s);
            }
        }
        facets.sort_by(|a, b| a.ones().cmp(b.ones()));
        Self { labels, facets }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn facets(&self) -> &[FixedBitSet] {
        &self.facets
    }

    /// Facets as lists of labels.
    pub fn facet_labels(&self) -> Vec<Vec<usize>> {
        self.facets.iter().map(|f| f.ones().map(|v| self.labels[v]).collect()).collect()
    }

    /// `-1` for the empty complex.
    pub fn dimension(&self) -> i64 {
        self.facets.iter().map(|f| f.count_ones(..) as i64 - 1).max().unwrap_or(-1)
    }

    pub fn is_empty(&self) -> bool {
        self.facets.is_empty()
    }

    /// A single facet holding every vertex.
    pub fn is_simplex(&self) -> bool {
        self.facets.len() == 1 && self.facets[0].count_ones(..) == self.labels.len()
    }

    pub fn contains_face(&self, face: &[usize]) -> bool {
        self.facets.iter().any(|f| face.iter().all(|&v| f.contains(v)))
    }

    /// Vertex pairs spanning an edge, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut set = BTreeSet::new();
        for f in &self.facets {
            for (a, b) in f.ones().collect::<Vec<_>>().into_iter().tuple_combinations() {
                set.insert((a, b));
            }
        }
        set.into_iter().collect()
    }

    /// Faces of every dimension in lexicographic order, stopping once the
    /// running total would pass `max_faces`. The flag says whether all
    /// dimensions were produced.
    fn faces(&self, max_faces: usize) -> (Vec<Vec<Face>>, bool) {
        let mut out = Vec::new();
        let mut total = 0usize;
        for d in 0..=self.dimension().max(-1) {
            let d = d as usize;
            let mut set: HashSet<Face> = HashSet::new();
            for f in &self.facets {
                if f.count_ones(..) <= d {
                    continue;
                }
                for combo in f.ones().map(|v| v as u32).combinations(d + 1) {
                    set.insert(combo);
                    if total + set.len() > max_faces {
                        return (out, false);
                    }
                }
            }
            total += set.len();
            let mut faces: Vec<Face> = set.into_iter().collect();
            faces.sort_unstable();
            out.push(faces);
        }
        (out, true)
    }

    /// Face counts `f_0, f_1, …`; `None` if over budget.
    pub fn f_vector(&self, max_faces: usize) -> Option<Vec<usize>> {
        let (faces, complete) = self.faces(max_faces);
        complete.then(|| faces.iter().map(Vec::len).collect())
    }
}

/// Facets `V(G)_{≥A}` over the atoms, restricted to a carrier.
pub fn intersection_complex_of(lat: &Lattice, carrier: impl Fn(usize) -> bool) -> SimplicialComplex {
    let labels: Vec<usize> = lat.vertex_set().iter().copied().filter(|&v| carrier(v)).collect();
    let sets = lat
        .atoms()
        .iter()
        .map(|&a| {
            let mut s = FixedBitSet::with_capacity(labels.len());
            for (p, &v) in labels.iter().enumerate() {
                if lat.leq(a, v) {
                    s.insert(p);
                }
            }
            s
        })
        .collect();
    SimplicialComplex::from_sets(labels, sets)
}

/// `K(G)`: sets of proper non-trivial subgroups with non-trivial common
/// intersection.
pub fn intersection_complex(lat: &Lattice) -> SimplicialComplex {
    intersection_complex_of(lat, |_| true)
}

/// Chains of the subposet of `V(G)` picked out by `selector`.
pub fn order_complex(lat: &Lattice, selector: impl Fn(usize) -> bool) -> SimplicialComplex {
    let labels: Vec<usize> = lat.vertex_set().iter().copied().filter(|&v| selector(v)).collect();
    let m = labels.len();
    let less = |a: usize, b: usize| a != b && lat.leq(labels[a], labels[b]);
    // covering relation within the subposet
    let covers: Vec<Vec<usize>> = (0..m)
        .map(|a| (0..m).filter(|&b| less(a, b) && !(0..m).any(|c| less(a, c) && less(c, b))).collect())
        .collect();
    let minimal: Vec<usize> = (0..m).filter(|&b| !(0..m).any(|a| less(a, b))).collect();
    let mut sets = Vec::new();
    let mut stack: Vec<Vec<usize>> = minimal.into_iter().map(|v| vec![v]).collect();
    while let Some(chain) = stack.pop() {
        let top = *chain.last().unwrap();
        if covers[top].is_empty() {
            let mut s = FixedBitSet::with_capacity(m);
            for &v in &chain {
                s.insert(v);
            }
            sets.push(s);
        } else {
            for &next in covers[top].iter().rev() {
                let mut c = chain.clone();
                c.push(next);
                stack.push(c);
            }
        }
    }
    SimplicialComplex::from_sets(labels, sets)
}

/// Nerve of a cover of a finite set: `J` is a face iff the members indexed
/// by `J` share a point. Facets are the maximal sets `{i : x ∈ C_i}`.
pub fn nerve(labels: Vec<usize>, cover: &[FixedBitSet], universe: usize) -> SimplicialComplex {
    let sets = (0..universe)
        .map(|x| {
            let mut s = FixedBitSet::with_capacity(cover.len());
            for (i, c) in cover.iter().enumerate() {
                if c.contains(x) {
                    s.insert(i);
                }
            }
            s
        })
        .collect();
    SimplicialComplex::from_sets(labels, sets)
}

/// `N(A)`: nerve of the up-sets `V(G)_{≥A}` over the atoms.
pub fn atom_nerve(lat: &Lattice) -> SimplicialComplex {
    if lat.vertex_set().is_empty() {
        return SimplicialComplex::from_sets(Vec::new(), Vec::new());
    }
    let cover: Vec<FixedBitSet> = lat
        .atoms()
        .iter()
        .map(|&a| {
            let mut s = lat.above(a).clone();
            s.set(lat.whole(), false);
            s
        })
        .collect();
    nerve(lat.atoms().to_vec(), &cover, lat.len())
}

/// `N(M)`: nerve of the down-sets `V(G)_{≤M}` over the maximal subgroups.
pub fn coatom_nerve(lat: &Lattice) -> SimplicialComplex {
    if lat.vertex_set().is_empty() {
        return SimplicialComplex::from_sets(Vec::new(), Vec::new());
    }
    let cover: Vec<FixedBitSet> = lat
        .coatoms()
        .iter()
        .map(|&m| {
            let mut s = lat.below(m).clone();
            s.set(lat.trivial(), false);
            s
        })
        .collect();
    nerve(lat.coatoms().to_vec(), &cover, lat.len())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologyProfile {
    /// `b̃_0, b̃_1, …`; shorter than `dimension + 1` when truncated.
    pub reduced_betti: Vec<i64>,
    pub euler: Option<i64>,
    pub dimension: i64,
    pub f_vector: Vec<usize>,
    pub complete: bool,
    /// Integer growth overflowed during elimination.
    pub overflow: bool,
}

impl HomologyProfile {
    /// Reduced Betti numbers with trailing zeros removed, for comparing
    /// complexes of different dimension.
    pub fn trimmed(&self) -> Vec<i64> {
        let mut b = self.reduced_betti.clone();
        while b.last() == Some(&0) {
            b.pop();
        }
        b
    }

    pub fn is_acyclic(&self) -> bool {
        self.complete && self.dimension >= 0 && self.reduced_betti.iter().all(|&b| b == 0)
    }

    pub fn comparable(&self) -> bool {
        self.complete && !self.overflow
    }

    /// Homologically the same: equal trimmed Betti numbers (the empty complex
    /// only matches itself).
    pub fn agrees_with(&self, other: &HomologyProfile) -> bool {
        (self.dimension < 0) == (other.dimension < 0) && self.trimmed() == other.trimmed()
    }
}

#[derive(Debug)]
struct Overflow;

type Column = Vec<(u32, i128)>;

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `lb * a - la * b` where `la`, `lb` are the entries of `a`, `b` in their
/// shared lowest row; the result has that row eliminated and is divided by
/// the gcd of its entries.
fn eliminate(a: &Column, b: &Column) -> Result<Column, Overflow> {
    let la = a.last().unwrap().1;
    let lb = b.last().unwrap().1;
    let g = gcd(la, lb);
    let (fa, fb) = (lb / g, la / g);
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let (row, val) = if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            let r = (a[i].0, a[i].1.checked_mul(fa).ok_or(Overflow)?);
            i += 1;
            r
        } else if i == a.len() || b[j].0 < a[i].0 {
            let r = (b[j].0, b[j].1.checked_mul(fb).ok_or(Overflow)?.checked_neg().ok_or(Overflow)?);
            j += 1;
            r
        } else {
            let x = a[i].1.checked_mul(fa).ok_or(Overflow)?;
            let y = b[j].1.checked_mul(fb).ok_or(Overflow)?;
            let r = (a[i].0, x.checked_sub(y).ok_or(Overflow)?);
            i += 1;
            j += 1;
            r
        };
        if val != 0 {
            out.push((row, val));
        }
    }
    let g = out.iter().fold(0, |g, &(_, v)| gcd(g, v));
    if g > 1 {
        for e in &mut out {
            e.1 /= g;
        }
    }
    Ok(out)
}

/// Ranks of `∂_k` for `k = 1..faces.len()-1` (index `k`), by column
/// reduction from the top dimension down, skipping columns already known to
/// be pivots of the dimension above.
fn boundary_ranks(faces: &[Vec<Face>]) -> Result<Vec<usize>, Overflow> {
    let top = faces.len();
    let mut ranks = vec![0usize; top];
    let mut cleared = FixedBitSet::new();
    for k in (1..top).rev() {
        let rows: HashMap<&[u32], u32> = faces[k - 1].iter().enumerate().map(|(i, f)| (f.as_slice(), i as u32)).collect();
        let mut pivot_of: Vec<Option<u32>> = vec![None; faces[k - 1].len()];
        let mut reduced: Vec<Column> = Vec::new();
        let mut next_cleared = FixedBitSet::with_capacity(faces[k - 1].len());
        let mut buf: Vec<u32> = Vec::with_capacity(k);
        for (j, face) in faces[k].iter().enumerate() {
            if cleared.contains(j) {
                continue;
            }
            let mut col: Column = (0..face.len())
                .map(|i| {
                    buf.clear();
                    buf.extend(face.iter().enumerate().filter(|&(p, _)| p != i).map(|(_, &v)| v));
                    (rows[buf.as_slice()], if i % 2 == 0 { 1i128 } else { -1 })
                })
                .collect();
            col.sort_unstable_by_key(|e| e.0);
            while let Some(&(low, _)) = col.last() {
                match pivot_of[low as usize] {
                    Some(p) => col = eliminate(&col, &reduced[p as usize])?,
                    None => {
                        pivot_of[low as usize] = Some(reduced.len() as u32);
                        next_cleared.insert(low as usize);
                        reduced.push(col);
                        break;
                    }
                }
            }
        }
        ranks[k] = reduced.len();
        cleared = next_cleared;
    }
    Ok(ranks)
}

/// Reduced rational homology, faces enumerated up to `max_faces`.
pub fn betti(complex: &SimplicialComplex, max_faces: usize) -> HomologyProfile {
    let dimension = complex.dimension();
    let (faces, complete) = complex.faces(max_faces);
    let f_vector: Vec<usize> = faces.iter().map(Vec::len).collect();
    if dimension < 0 {
        return HomologyProfile { reduced_betti: Vec::new(), euler: Some(0), dimension, f_vector, complete: true, overflow: false };
    }
    let euler = complete.then(|| f_vector.iter().enumerate().map(|(i, &f)| if i % 2 == 0 { f as i64 } else { -(f as i64) }).sum());
    let (ranks, overflow) = match boundary_ranks(&faces) {
        Ok(r) => (r, false),
        Err(Overflow) => (vec![0; faces.len()], true),
    };
    // b̃_k = f_k - rank ∂_k - rank ∂_{k+1}, with rank ∂_0 = 1 (augmentation)
    let known = if complete { faces.len() } else { faces.len().saturating_sub(1) };
    let reduced_betti = if overflow {
        Vec::new()
    } else {
        (0..known)
            .map(|k| {
                let down = if k == 0 { 1 } else { ranks[k] };
                let up = ranks.get(k + 1).copied().unwrap_or(0);
                (f_vector[k] - down - up) as i64
            })
            .collect()
    };
    HomologyProfile { reduced_betti, euler, dimension, f_vector, complete, overflow }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CollapseOutcome {
    /// Collapsed to a single vertex.
    ContractibilityConfirmed,
    /// Got stuck before reaching a point.
    Inconclusive,
    NotAttempted,
}

/// Greedy elementary collapses, always removing the free face of least
/// dimension and then least label.
pub fn greedy_collapse(complex: &SimplicialComplex, max_faces: usize) -> CollapseOutcome {
    let (by_dim, complete) = complex.faces(max_faces);
    if !complete || by_dim.is_empty() {
        return CollapseOutcome::NotAttempted;
    }
    let n = complex.vertex_count() as u32;
    let mut present: HashSet<Face> = by_dim.iter().flatten().cloned().collect();
    let cofaces = |face: &Face, present: &HashSet<Face>| -> Vec<Face> {
        (0..n)
            .filter(|v| face.binary_search(v).is_err())
            .map(|v| {
                let mut c = face.clone();
                let pos = c.binary_search(&v).unwrap_err();
                c.insert(pos, v);
                c
            })
            .filter(|c| present.contains(c))
            .collect()
    };
    let boundary = |face: &Face| -> Vec<Face> {
        if face.len() < 2 {
            return Vec::new();
        }
        (0..face.len()).map(|i| face.iter().enumerate().filter(|&(p, _)| p != i).map(|(_, &v)| v).collect()).collect()
    };
    let mut count: HashMap<Face, usize> = HashMap::new();
    for faces in &by_dim {
        for f in faces {
            count.entry(f.clone()).or_insert(0);
            for b in boundary(f) {
                *count.entry(b).or_insert(0) += 1;
            }
        }
    }
    let mut queue: BTreeSet<(usize, Face)> = count.iter().filter(|(_, &c)| c == 1).map(|(f, _)| (f.len(), f.clone())).collect();
    while let Some((_, sigma)) = queue.pop_first() {
        if !present.contains(&sigma) || count[&sigma] != 1 {
            continue;
        }
        let tau = cofaces(&sigma, &present).pop().expect("count says one coface");
        if count[&tau] != 0 {
            continue;
        }
        present.remove(&sigma);
        present.remove(&tau);
        let mut touched: Vec<Face> = Vec::new();
        for rho in boundary(&tau).into_iter().filter(|r| *r != sigma).chain(boundary(&sigma)) {
            let c = count.get_mut(&rho).unwrap();
            *c -= 1;
            if *c == 0 {
                touched.extend(boundary(&rho));
            }
            touched.push(rho);
        }
        for t in touched {
            if present.contains(&t) {
                queue.insert((t.len(), t));
            }
        }
    }
    if present.len() == 1 {
        CollapseOutcome::ContractibilityConfirmed
    } else {
        CollapseOutcome::Inconclusive
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TopologyReport {
    pub intersection: HomologyProfile,
    pub order: HomologyProfile,
    pub atom_nerve: HomologyProfile,
    pub coatom_nerve: HomologyProfile,
    /// `None` when some profile is incomplete.
    pub profiles_agree: Option<bool>,
    pub frattini_nontrivial: bool,
    pub coatom_nerve_is_simplex: bool,
    pub gamma_is_one: bool,
    pub atom_nerve_is_simplex: bool,
    /// `Some` only when γ = 1: all reduced Betti numbers of `K(G)` vanish.
    pub acyclic_when_gamma_one: Option<bool>,
    pub collapse: CollapseOutcome,
    pub intersection_facets: usize,
}

impl TopologyReport {
    /// The two simplex equivalences and the γ = 1 acyclicity claim.
    pub fn claims_hold(&self) -> bool {
        self.frattini_nontrivial == self.coatom_nerve_is_simplex
            && self.gamma_is_one == self.atom_nerve_is_simplex
            && self.acyclic_when_gamma_one != Some(false)
    }
}

pub fn topology_report(lat: &Lattice, chars: &CharacteristicSubgroups, gamma: GammaValue, max_faces: usize) -> TopologyReport {
    let k = intersection_complex(lat);
    let o = order_complex(lat, |_| true);
    let na = atom_nerve(lat);
    let nm = coatom_nerve(lat);
    let profiles = [&k, &o, &na, &nm].map(|c| betti(c, max_faces));
    let profiles_agree = profiles
        .iter()
        .all(HomologyProfile::comparable)
        .then(|| profiles.windows(2).all(|w| w[0].agrees_with(&w[1])));
    let gamma_is_one = gamma.is_one();
    let acyclic_when_gamma_one = gamma_is_one.then(|| profiles[0].comparable() && profiles[0].is_acyclic());
    let collapse = if gamma_is_one { greedy_collapse(&k, max_faces.min(COLLAPSE_FACE_LIMIT)) } else { CollapseOutcome::NotAttempted };
    let [intersection, order, atom_nerve, coatom_nerve] = profiles;
    TopologyReport {
        intersection,
        order,
        atom_nerve,
        coatom_nerve,
        profiles_agree,
        frattini_nontrivial: chars.frattini != lat.trivial(),
        coatom_nerve_is_simplex: nm.is_simplex() && !nm.is_empty(),
        gamma_is_one,
        atom_nerve_is_simplex: na.is_simplex() && !na.is_empty(),
        acyclic_when_gamma_one,
        collapse,
        intersection_facets: k.facets().len(),
    }
}
