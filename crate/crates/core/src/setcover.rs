//! Exact minimum set cover by branch and bound.
//!
//! Used for the domination number (atoms covered by maximal subgroups), the
//! sum number (elements covered by maximal subgroups) and graph-level
//! domination (vertices covered by closed neighbourhoods).

use std::time::Instant;

use fixedbitset::FixedBitSet;

#[derive(Debug, Clone, Copy, Default)]
pub struct SearchLimits {
    pub deadline: Option<Instant>,
    pub max_nodes: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverSolution {
    /// Indices into the original candidate list, ascending.
    pub chosen: Vec<usize>,
    /// False when the search stopped early; `chosen` is then the incumbent.
    pub optimal: bool,
    pub lower_bound: usize,
    pub nodes: u64,
}

/// `None` if some element lies in no candidate set.
pub fn min_set_cover(universe: usize, sets: &[FixedBitSet], limits: SearchLimits) -> Option<CoverSolution> {
    if universe == 0 {
        return Some(CoverSolution { chosen: Vec::new(), optimal: true, lower_bound: 0, nodes: 0 });
    }
    let reduced = Reduced::new(universe, sets)?;
    let mut search = Search {
        p: &reduced,
        best: reduced.greedy(),
        chosen: Vec::new(),
        nodes: 0,
        limits,
        aborted: false,
    };
    let root_lb = reduced.lower_bound(&reduced.all_elements());
    if root_lb < search.best.len() {
        let all = reduced.all_elements();
        search.branch(&all);
    }
    let optimal = !search.aborted;
    let mut chosen: Vec<usize> = search.best.iter().map(|&s| reduced.set_ids[s]).collect();
    chosen.sort_unstable();
    let lower_bound = if optimal { chosen.len() } else { root_lb };
    Some(CoverSolution { chosen, optimal, lower_bound, nodes: search.nodes })
}

/// Problem after removing dominated sets and implied elements.
struct Reduced {
    /// element -> sets containing it (over reduced set indices)
    elem_sets: Vec<FixedBitSet>,
    /// reduced set -> elements (over reduced element indices)
    set_elems: Vec<FixedBitSet>,
    set_ids: Vec<usize>,
}

impl Reduced {
    fn new(universe: usize, sets: &[FixedBitSet]) -> Option<Self> {
        // drop sets contained in another set (keep the lowest index among equals)
        let mut keep: Vec<usize> = Vec::new();
        for (i, s) in sets.iter().enumerate() {
            if s.is_clear() {
                continue;
            }
            let dominated = sets.iter().enumerate().any(|(j, t)| {
                j != i && s.is_subset(t) && (!t.is_subset(s) || j < i)
            });
            if !dominated {
                keep.push(i);
            }
        }
        let mut elem_sets: Vec<FixedBitSet> = (0..universe).map(|_| FixedBitSet::with_capacity(keep.len())).collect();
        for (k, &i) in keep.iter().enumerate() {
            for e in sets[i].ones() {
                if e < universe {
                    elem_sets[e].insert(k);
                }
            }
        }
        if elem_sets.iter().any(|s| s.is_clear()) {
            return None;
        }
        // an element whose set list contains another's is covered for free
        let mut elems: Vec<usize> = Vec::new();
        for e in 0..universe {
            let implied = (0..universe).any(|f| {
                f != e && elem_sets[f].is_subset(&elem_sets[e]) && (!elem_sets[e].is_subset(&elem_sets[f]) || f < e)
            });
            if !implied {
                elems.push(e);
            }
        }
        let elem_sets: Vec<FixedBitSet> = elems.iter().map(|&e| elem_sets[e].clone()).collect();
        let mut set_elems: Vec<FixedBitSet> = (0..keep.len()).map(|_| FixedBitSet::with_capacity(elems.len())).collect();
        for (e, s) in elem_sets.iter().enumerate() {
            for k in s.ones() {
                set_elems[k].insert(e);
            }
        }
        Some(Self { elem_sets, set_elems, set_ids: keep })
    }

    fn all_elements(&self) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(self.elem_sets.len());
        b.insert_range(..);
        b
    }

    fn greedy(&self) -> Vec<usize> {
        let mut uncovered = self.all_elements();
        let mut chosen = Vec::new();
        while !uncovered.is_clear() {
            let (best, _) = self
                .set_elems
                .iter()
                .enumerate()
                .map(|(k, s)| (k, s.intersection_count(&uncovered)))
                .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
                .expect("feasible");
            chosen.push(best);
            uncovered.difference_with(&self.set_elems[best]);
        }
        chosen
    }

    /// Greedy packing of uncovered elements no two of which share a set.
    fn lower_bound(&self, uncovered: &FixedBitSet) -> usize {
        let mut order: Vec<usize> = uncovered.ones().collect();
        order.sort_by_key(|&e| (self.elem_sets[e].count_ones(..), e));
        let mut used = FixedBitSet::with_capacity(self.set_elems.len());
        let mut count = 0;
        for e in order {
            if self.elem_sets[e].is_disjoint(&used) {
                used.union_with(&self.elem_sets[e]);
                count += 1;
            }
        }
        count
    }
}

struct Search<'a> {
    p: &'a Reduced,
    best: Vec<usize>,
    chosen: Vec<usize>,
    nodes: u64,
    limits: SearchLimits,
    aborted: bool,
}

impl Search<'_> {
    fn out_of_budget(&mut self) -> bool {
        if self.aborted {
            return true;
        }
        if self.limits.max_nodes.is_some_and(|m| self.nodes >= m)
            || (self.nodes.is_multiple_of(256) && self.limits.deadline.is_some_and(|d| Instant::now() >= d))
        {
            self.aborted = true;
        }
        self.aborted
    }

    fn branch(&mut self, uncovered: &FixedBitSet) {
        self.nodes += 1;
        if self.out_of_budget() {
            return;
        }
        if uncovered.is_clear() {
            if self.chosen.len() < self.best.len() {
                self.best = self.chosen.clone();
            }
            return;
        }
        if self.chosen.len() + self.p.lower_bound(uncovered) >= self.best.len() {
            return;
        }
        // the uncovered element in the fewest candidate sets, smallest index on ties
        let pivot = uncovered
            .ones()
            .min_by_key(|&e| (self.p.elem_sets[e].count_ones(..), e))
            .expect("non-empty");
        let options: Vec<usize> = self.p.elem_sets[pivot].ones().collect();
        for k in options {
            let mut rest = uncovered.clone();
            rest.difference_with(&self.p.set_elems[k]);
            self.chosen.push(k);
            self.branch(&rest);
            self.chosen.pop();
            if self.aborted {
                return;
            }
        }
    }
}
