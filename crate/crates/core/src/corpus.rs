//! The built-in list of groups checked by the verification suite.

use serde::Serialize;

use crate::domgraph::GammaValue;
use crate::lattice::prime_factors;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Stated outright in the literature the tool follows.
    Published,
    /// Computed once by the brute-force oracle and pinned.
    Regression,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Expected<T> {
    pub value: T,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusEntry {
    pub spec: String,
    pub gamma: Option<Expected<GammaValue>>,
    pub sum_number: Option<Expected<GammaValue>>,
    pub subgroup_count: Option<Expected<usize>>,
}

impl CorpusEntry {
    pub fn plain(spec: impl Into<String>) -> Self {
        Self { spec: spec.into(), gamma: None, sum_number: None, subgroup_count: None }
    }

    fn gamma(mut self, v: GammaValue, provenance: Provenance) -> Self {
        self.gamma = Some(Expected { value: v, provenance });
        self
    }

    fn sum(mut self, v: GammaValue, provenance: Provenance) -> Self {
        self.sum_number = Some(Expected { value: v, provenance });
        self
    }

    fn subgroups(mut self, v: usize, provenance: Provenance) -> Self {
        self.subgroup_count = Some(Expected { value: v, provenance });
        self
    }
}

fn partitions(n: usize, max: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in (1..=n.min(max)).rev() {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Every isomorphism type of abelian group of order `n`, as lists of
/// prime-power cyclic factors (primes ascending, exponents descending).
pub fn abelian_types(n: usize) -> Vec<Vec<usize>> {
    let mut types: Vec<Vec<usize>> = vec![Vec::new()];
    for p in prime_factors(n) {
        let mut a = 0;
        let mut m = n;
        while m.is_multiple_of(p) {
            m /= p;
            a += 1;
        }
        let mut next = Vec::new();
        for t in &types {
            for part in partitions(a, a) {
                let mut t = t.clone();
                t.extend(part.iter().map(|&e| p.pow(e as u32)));
                next.push(t);
            }
        }
        types = next;
    }
    types
}

/// Spec text for an abelian type, e.g. `C4xC2xC3`.
pub fn abelian_label(factors: &[usize]) -> String {
    if factors.is_empty() {
        return "C1".to_string();
    }
    factors.iter().map(|f| format!("C{f}")).collect::<Vec<_>>().join("x")
}

pub const SEMIDIRECT_PAIRS: [(usize, usize); 5] = [(3, 2), (5, 2), (7, 2), (7, 3), (13, 3)];

pub const QUOTIENTS: [&str; 10] =
    ["S4/D2", "Q8/Z", "D16/Z", "D24/D", "A4/D", "S4/D", "D36/R", "SD(7,3)/D", "D16/F", "S5/D"];

/// The default corpus, in a fixed order.
pub fn default_corpus() -> Vec<CorpusEntry> {
    use GammaValue::{Aleph0, Finite};
    use Provenance::{Published, Regression};
    let mut out = Vec::new();
    for n in 2..=100 {
        for t in abelian_types(n) {
            let label = abelian_label(&t);
            let mut e = CorpusEntry::plain(&label);
            match label.as_str() {
                "C3" => e = e.gamma(Aleph0, Published),
                "C2xC2" => e = e.gamma(Finite(3), Published).sum(Finite(3), Published),
                "C3xC3" => e = e.sum(Finite(4), Published),
                "C2xC2xC2" => e = e.subgroups(16, Regression),
                "C4" => e = e.gamma(Finite(1), Published),
                _ => {}
            }
            out.push(e);
        }
    }
    for m in 2..=100 {
        let mut e = CorpusEntry::plain(format!("D{}", 2 * m));
        if m == 4 {
            e = e.gamma(Finite(2), Published);
        }
        if m == 18 {
            e = e.gamma(Finite(3), Published).sum(Finite(3), Published);
        }
        out.push(e);
    }
    for n in 2..=6 {
        let mut e = CorpusEntry::plain(format!("S{n}"));
        match n {
            3 => e = e.gamma(Finite(4), Regression).subgroups(6, Regression),
            4 => e = e.gamma(Finite(4), Regression).subgroups(30, Regression),
            6 => e = e.subgroups(1455, Regression),
            _ => {}
        }
        out.push(e);
    }
    for n in 3..=6 {
        let mut e = CorpusEntry::plain(format!("A{n}"));
        if n == 4 {
            e = e.gamma(Finite(5), Published);
        }
        out.push(e);
    }
    out.push(CorpusEntry::plain("Q8").gamma(Finite(1), Regression));
    for (p, q) in SEMIDIRECT_PAIRS {
        out.push(CorpusEntry::plain(format!("SD({p},{q})")));
    }
    for q in QUOTIENTS {
        out.push(CorpusEntry::plain(q));
    }
    out
}
