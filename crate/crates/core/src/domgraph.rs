//! Intersection graphs and their domination numbers.

use std::cmp::Ordering;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Serialize, Serializer};

use crate::group::GroupTable;
use crate::lattice::Lattice;
use crate::setcover::{min_set_cover, SearchLimits};

/// A domination number; `Aleph0` marks the empty graph and sits above every
/// finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GammaValue {
    Finite(usize),
    Aleph0,
}

impl GammaValue {
    pub fn finite(self) -> Option<usize> {
        match self {
            GammaValue::Finite(k) => Some(k),
            GammaValue::Aleph0 => None,
        }
    }

    pub fn is_one(self) -> bool {
        self == GammaValue::Finite(1)
    }
}

impl Ord for GammaValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (GammaValue::Finite(a), GammaValue::Finite(b)) => a.cmp(b),
            (GammaValue::Finite(_), GammaValue::Aleph0) => Ordering::Less,
            (GammaValue::Aleph0, GammaValue::Finite(_)) => Ordering::Greater,
            (GammaValue::Aleph0, GammaValue::Aleph0) => Ordering::Equal,
        }
    }
}

impl PartialOrd for GammaValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GammaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaValue::Finite(k) => write!(f, "{k}"),
            GammaValue::Aleph0 => write!(f, "aleph0"),
        }
    }
}

impl Serialize for GammaValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            GammaValue::Finite(k) => s.serialize_u64(*k as u64),
            GammaValue::Aleph0 => s.serialize_str("aleph0"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphMode {
    /// Edge iff the intersection is non-trivial.
    Full,
    /// Edge iff the intersection lies in the carrier set.
    Restricted,
    /// Point stabilizers of a G-set, edge iff non-trivial intersection.
    Gset,
}

/// Simple undirected graph on subgroups (vertices are lattice indices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionGraph {
    vertices: Vec<usize>,
    adjacency: Vec<FixedBitSet>,
    mode: GraphMode,
}

impl IntersectionGraph {
    fn build(vertices: Vec<usize>, mode: GraphMode, mut edge: impl FnMut(usize, usize) -> bool) -> Self {
        let n = vertices.len();
        let mut adjacency = vec![FixedBitSet::with_capacity(n); n];
        for i in 0..n {
            for j in i + 1..n {
                if edge(vertices[i], vertices[j]) {
                    adjacency[i].insert(j);
                    adjacency[j].insert(i);
                }
            }
        }
        Self { vertices, adjacency, mode }
    }

    /// Graph on explicit positions `0..n` with the given edges; vertex
    /// labels are the positions themselves.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adjacency = vec![FixedBitSet::with_capacity(n); n];
        for &(a, b) in edges {
            if a != b {
                adjacency[a].insert(b);
                adjacency[b].insert(a);
            }
        }
        Self { vertices: (0..n).collect(), adjacency, mode: GraphMode::Restricted }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn mode(&self) -> GraphMode {
        self.mode
    }

    /// Lattice index of every vertex position.
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn position(&self, subgroup: usize) -> Option<usize> {
        self.vertices.binary_search(&subgroup).ok()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].contains(j)
    }

    pub fn neighbors(&self, i: usize) -> &FixedBitSet {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].count_ones(..)
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d: Vec<usize> = (0..self.len()).map(|i| self.degree(i)).collect();
        d.sort_unstable();
        d
    }

    /// Edges as pairs of positions `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.len()).flat_map(|i| self.adjacency[i].ones().filter(move |&j| j > i).map(move |j| (i, j))).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(|a| a.count_ones(..)).sum::<usize>() / 2
    }

    pub fn closed_neighborhood(&self, i: usize) -> FixedBitSet {
        let mut n = self.adjacency[i].clone();
        n.insert(i);
        n
    }

    /// Same vertex set (as subgroups) and same edges.
    pub fn same_graph(&self, other: &IntersectionGraph) -> bool {
        self.vertices == other.vertices && self.adjacency == other.adjacency
    }

    /// Graphviz export with vertices labelled `H<order>_<index>`.
    pub fn to_dot(&self, lat: &Lattice, name: &str) -> String {
        let label = |p: usize| {
            let v = self.vertices[p];
            format!("H{}_{}", lat.order_of(v), v)
        };
        let mut out = format!("graph \"{}\" {{\n", name.replace('"', "'"));
        for p in 0..self.len() {
            out.push_str(&format!("  {};\n", label(p)));
        }
        for (a, b) in self.edges() {
            out.push_str(&format!("  {} -- {};\n", label(a), label(b)));
        }
        out.push_str("}\n");
        out
    }
}

fn nontrivial_meet(lat: &Lattice, a: usize, b: usize) -> bool {
    lat.subgroup(a).members().intersection_count(lat.subgroup(b).members()) > 1
}

/// `Γ(G)`: proper non-trivial subgroups, adjacent iff they meet non-trivially.
pub fn intersection_graph(lat: &Lattice) -> IntersectionGraph {
    IntersectionGraph::build(lat.vertex_set().to_vec(), GraphMode::Full, |a, b| nontrivial_meet(lat, a, b))
}

/// `Γ(S)` for a carrier `S ⊆ V(G)`: adjacent iff the intersection is in `S`.
pub fn restricted_graph(lat: &Lattice, carrier: impl Fn(usize) -> bool) -> IntersectionGraph {
    let vertices: Vec<usize> = lat.vertex_set().iter().copied().filter(|&v| carrier(v)).collect();
    IntersectionGraph::build(vertices, GraphMode::Restricted, |a, b| carrier(lat.meet(a, b)))
}

/// Proper non-trivial `p`-subgroups.
pub fn p_subgroup_carrier(lat: &Lattice, p: usize) -> impl Fn(usize) -> bool + '_ {
    let ps: FixedBitSet = {
        let mut b = FixedBitSet::with_capacity(lat.len());
        for i in lat.p_subgroups(p) {
            if lat.is_proper_nontrivial(i) {
                b.insert(i);
            }
        }
        b
    };
    move |i| ps.contains(i)
}

/// Proper subgroups strictly containing `n` that also satisfy `base`.
pub fn above_carrier<'a>(lat: &'a Lattice, n: usize, base: impl Fn(usize) -> bool + 'a) -> impl Fn(usize) -> bool + 'a {
    move |i| i != n && lat.leq(n, i) && i != lat.whole() && base(i)
}

/// Point stabilizers of the G-set `⊔ G/H_j` (one transitive component per
/// entry of `components`).
pub fn point_stabilizers(g: &GroupTable, lat: &Lattice, components: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    for &h in components {
        let sub = lat.subgroup(h);
        let mut seen = FixedBitSet::with_capacity(g.order());
        for x in 0..g.order() as u32 {
            if seen.contains(x as usize) {
                continue;
            }
            for &y in sub.elements() {
                seen.insert(g.mul(x, y) as usize);
            }
            // stabilizer of the coset xH is xHx⁻¹
            out.push(lat.conjugate(g, x, h));
        }
    }
    out
}

/// `Γ[Ω]`: the distinct proper non-trivial point stabilizers of `Ω`.
pub fn gset_intersection_graph(g: &GroupTable, lat: &Lattice, components: &[usize]) -> IntersectionGraph {
    let mut vertices: Vec<usize> = point_stabilizers(g, lat, components)
        .into_iter()
        .filter(|&s| lat.is_proper_nontrivial(s))
        .collect();
    vertices.sort_unstable();
    vertices.dedup();
    IntersectionGraph::build(vertices, GraphMode::Gset, |a, b| nontrivial_meet(lat, a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Setcover,
    Bruteforce,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DominationCertificate {
    pub gamma: GammaValue,
    /// Lattice indices of the dominating subgroups.
    pub witness: Vec<usize>,
    pub optimal: bool,
    pub lower_bound: usize,
    pub method: Method,
}

impl DominationCertificate {
    fn aleph0(method: Method) -> Self {
        Self { gamma: GammaValue::Aleph0, witness: Vec::new(), optimal: true, lower_bound: 0, method }
    }
}

/// Exact `γ(G)` as a set cover of the atoms by maximal subgroups.
pub fn gamma_exact(lat: &Lattice, limits: SearchLimits) -> DominationCertificate {
    if lat.vertex_set().is_empty() {
        return DominationCertificate::aleph0(Method::Setcover);
    }
    let atoms = lat.atoms();
    let sets: Vec<FixedBitSet> = lat
        .coatoms()
        .iter()
        .map(|&m| {
            let mut b = FixedBitSet::with_capacity(atoms.len());
            for (k, &a) in atoms.iter().enumerate() {
                if lat.leq(a, m) {
                    b.insert(k);
                }
            }
            b
        })
        .collect();
    let sol = min_set_cover(atoms.len(), &sets, limits).expect("every atom lies in a maximal subgroup");
    DominationCertificate {
        gamma: GammaValue::Finite(sol.chosen.len()),
        witness: sol.chosen.iter().map(|&i| lat.coatoms()[i]).collect(),
        optimal: sol.optimal,
        lower_bound: sol.lower_bound,
        method: Method::Setcover,
    }
}

/// Exact domination number of an arbitrary graph (closed neighbourhood cover).
pub fn graph_gamma(graph: &IntersectionGraph, limits: SearchLimits) -> DominationCertificate {
    if graph.is_empty() {
        return DominationCertificate::aleph0(Method::Setcover);
    }
    let sets: Vec<FixedBitSet> = (0..graph.len()).map(|i| graph.closed_neighborhood(i)).collect();
    let sol = min_set_cover(graph.len(), &sets, limits).expect("closed neighbourhoods cover");
    DominationCertificate {
        gamma: GammaValue::Finite(sol.chosen.len()),
        witness: sol.chosen.iter().map(|&p| graph.vertices[p]).collect(),
        optimal: sol.optimal,
        lower_bound: sol.lower_bound,
        method: Method::Setcover,
    }
}

/// Every vertex outside `set` (positions) has a neighbour inside it.
pub fn is_dominating(graph: &IntersectionGraph, set: &[usize]) -> bool {
    let mut inside = FixedBitSet::with_capacity(graph.len());
    for &p in set {
        inside.insert(p);
    }
    (0..graph.len()).all(|v| inside.contains(v) || !graph.adjacency[v].is_disjoint(&inside))
}

/// Brute-force search over all vertex subsets of size `≤ k_max` in
/// lexicographic order. `None` if no dominating set that small exists.
pub fn domination_oracle(graph: &IntersectionGraph, k_max: usize) -> Option<(GammaValue, Vec<usize>)> {
    if graph.is_empty() {
        return Some((GammaValue::Aleph0, Vec::new()));
    }
    let n = graph.len();
    for k in 1..=k_max.min(n) {
        let mut combo: Vec<usize> = (0..k).collect();
        loop {
            if is_dominating(graph, &combo) {
                return Some((GammaValue::Finite(k), combo));
            }
            // next combination in lexicographic order
            let mut i = k;
            while i > 0 && combo[i - 1] == n - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            combo[i - 1] += 1;
            for j in i..k {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SumNumber {
    pub value: GammaValue,
    pub lower_bound: usize,
    pub optimal: bool,
    pub witness: Vec<usize>,
}

/// Fewest proper subgroups whose union is the whole group.
pub fn sum_number(g: &GroupTable, lat: &Lattice, limits: SearchLimits) -> SumNumber {
    if g.is_cyclic() {
        return SumNumber { value: GammaValue::Aleph0, lower_bound: 0, optimal: true, witness: Vec::new() };
    }
    let n = g.order();
    let sets: Vec<FixedBitSet> = lat
        .coatoms()
        .iter()
        .map(|&m| {
            let mut b = FixedBitSet::with_capacity(n - 1);
            for &x in lat.subgroup(m).elements() {
                if x != 0 {
                    b.insert(x as usize - 1);
                }
            }
            b
        })
        .collect();
    let sol = min_set_cover(n - 1, &sets, limits).expect("non-cyclic groups are unions of maximal subgroups");
    SumNumber {
        value: GammaValue::Finite(sol.chosen.len()),
        lower_bound: sol.lower_bound,
        optimal: sol.optimal,
        witness: sol.chosen.iter().map(|&i| lat.coatoms()[i]).collect(),
    }
}
