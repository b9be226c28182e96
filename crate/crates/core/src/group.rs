//! Finite groups as explicit multiplication tables.
//!
//! Elements are dense indices `0..n` with index 0 the identity. Tables come
//! either from a closed-form builder (cyclic, abelian, dihedral, quaternion)
//! or from the breadth-first closure of permutation generators.

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice;

/// Default cap on the number of elements a closure may produce (7!).
pub const DEFAULT_ELEMENT_CAP: usize = 5040;

/// A permutation of `{0, .., degree-1}`, stored by images.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn new(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            let i = i as usize;
            if i >= n || seen[i] {
                return Err(Error::InvalidSpec(format!("images {images:?} do not form a permutation")));
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(degree: usize) -> Self {
        Self { images: (0..degree as u32).collect() }
    }

    /// Builds a permutation from 1-based cycles.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for &p in cycle {
                if p == 0 || p > degree {
                    return Err(Error::InvalidSpec(format!("point {p} outside 1..={degree}")));
                }
                if touched[p - 1] {
                    return Err(Error::InvalidSpec(format!("point {p} appears in two cycles")));
                }
                touched[p - 1] = true;
            }
            for (k, &p) in cycle.iter().enumerate() {
                let next = cycle[(k + 1) % cycle.len()];
                images[p - 1] = (next - 1) as u32;
            }
        }
        Ok(Self { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn apply(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation { images: self.images.iter().map(|&i| other.images[i as usize]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j as usize] = i as u32;
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    /// Non-trivial cycles, 0-based, each starting at its smallest point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.images.len()];
        let mut out = Vec::new();
        for start in 0..self.images.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut p = self.apply(start);
            while p != start {
                seen[p] = true;
                cycle.push(p);
                p = self.apply(p);
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }

    pub fn is_odd(&self) -> bool {
        self.cycles().iter().map(|c| c.len() - 1).sum::<usize>() % 2 == 1
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let pts: Vec<String> = c.iter().map(|p| (p + 1).to_string()).collect();
            write!(f, "({})", pts.join(","))?;
        }
        Ok(())
    }
}

/// Normal subgroups a quotient spec may refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalKind {
    /// `Z`: the center.
    Center,
    /// `D`, `D2`, ..: the k-th term of the derived series.
    Derived(u32),
    /// `F`: the Frattini subgroup.
    Frattini,
    /// `N`: the subgroup generated by all minimal subgroups.
    MinimalJoin,
    /// `R`: the nilpotent residual.
    NilpotentResidual,
}

impl fmt::Display for NormalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormalKind::Center => write!(f, "Z"),
            NormalKind::Derived(1) => write!(f, "D"),
            NormalKind::Derived(k) => write!(f, "D{k}"),
            NormalKind::Frattini => write!(f, "F"),
            NormalKind::MinimalJoin => write!(f, "N"),
            NormalKind::NilpotentResidual => write!(f, "R"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    Cyclic(usize),
    Abelian(Vec<usize>),
    /// Dihedral group of the given order (not degree).
    Dihedral(usize),
    Symmetric(usize),
    Alternating(usize),
    Quaternion8,
    /// `C_p ⋊ C_q` acting on `p` points.
    SemidirectCyclic { p: usize, q: usize },
    Generators { degree: usize, gens: Vec<Permutation> },
    Quotient { base: Box<GroupSpec>, by: NormalKind },
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic(n) => write!(f, "C{n}"),
            GroupSpec::Abelian(fs) => {
                let parts: Vec<String> = fs.iter().map(|n| format!("C{n}")).collect();
                write!(f, "{}", parts.join("x"))
            }
            GroupSpec::Dihedral(m) => write!(f, "D{m}"),
            GroupSpec::Symmetric(n) => write!(f, "S{n}"),
            GroupSpec::Alternating(n) => write!(f, "A{n}"),
            GroupSpec::Quaternion8 => write!(f, "Q8"),
            GroupSpec::SemidirectCyclic { p, q } => write!(f, "SD({p},{q})"),
            GroupSpec::Generators { degree, gens } => {
                let parts: Vec<String> = gens.iter().map(|g| g.to_string()).collect();
                write!(f, "perm:{degree}:{}", parts.join(";"))
            }
            GroupSpec::Quotient { base, by } => write!(f, "{base}/{by}"),
        }
    }
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Self { text, pos: 0 }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { position: self.pos, message: message.into() })
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn eat_str(&mut self, s: &str) -> bool {
        if self.text[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<usize> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        self.text[start..self.pos]
            .parse()
            .map_err(|_| Error::Syntax { position: start, message: "number out of range".into() })
    }

    fn at_end(&self) -> bool {
        self.pos == self.text.len()
    }
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// Parses the ASCII group grammar: `C6`, `C2xC2xC3`, `D8`, `S4`, `A5`, `Q8`,
/// `SD(7,3)`, `perm:3:(1,2);(1,2,3)`, optionally followed by quotient
/// suffixes such as `S4/D2` or `Q8/Z`.
pub fn parse_group_spec(text: &str) -> Result<GroupSpec> {
    let text = text.trim();
    let mut cur = Cursor::new(text);
    let mut spec = parse_base(&mut cur)?;
    while cur.eat('/') {
        let by = if cur.eat('Z') {
            NormalKind::Center
        } else if cur.eat('D') {
            if matches!(cur.peek(), Some(c) if c.is_ascii_digit()) {
                let k = cur.number()?;
                if k == 0 {
                    return cur.err("derived series index starts at 1");
                }
                NormalKind::Derived(k as u32)
            } else {
                NormalKind::Derived(1)
            }
        } else if cur.eat('F') {
            NormalKind::Frattini
        } else if cur.eat('N') {
            NormalKind::MinimalJoin
        } else if cur.eat('R') {
            NormalKind::NilpotentResidual
        } else {
            return cur.err("expected one of Z, D, D<k>, F, N, R after '/'");
        };
        spec = GroupSpec::Quotient { base: Box::new(spec), by };
    }
    if !cur.at_end() {
        return cur.err("unexpected trailing input");
    }
    Ok(spec)
}

fn parse_base(cur: &mut Cursor<'_>) -> Result<GroupSpec> {
    if cur.eat_str("perm:") {
        return parse_perm(cur);
    }
    if cur.eat_str("SD(") {
        let p = cur.number()?;
        cur.expect(',')?;
        let q = cur.number()?;
        cur.expect(')')?;
        if !is_prime(p) || !is_prime(q) {
            return Err(Error::InvalidSpec(format!("SD({p},{q}) needs prime parameters")));
        }
        if (p - 1) % q != 0 {
            return Err(Error::InvalidSpec(format!("SD({p},{q}): {q} does not divide {}", p - 1)));
        }
        return Ok(GroupSpec::SemidirectCyclic { p, q });
    }
    if cur.eat_str("Q8") {
        return Ok(GroupSpec::Quaternion8);
    }
    let start = cur.pos;
    match cur.peek() {
        Some('C') => {
            cur.pos += 1;
            let mut factors = vec![cur.number()?];
            while cur.eat('x') {
                cur.eat('C');
                factors.push(cur.number()?);
            }
            if factors.contains(&0) {
                return Err(Error::Syntax { position: start, message: "cyclic factor of order 0".into() });
            }
            if factors.len() == 1 {
                Ok(GroupSpec::Cyclic(factors[0]))
            } else {
                Ok(GroupSpec::Abelian(factors))
            }
        }
        Some('D') => {
            cur.pos += 1;
            let m = cur.number()?;
            if m % 2 != 0 || m < 4 {
                return Err(Error::Syntax {
                    position: start,
                    message: format!("D{m}: dihedral order must be even and at least 4"),
                });
            }
            Ok(GroupSpec::Dihedral(m))
        }
        Some('S') => {
            cur.pos += 1;
            let n = cur.number()?;
            if n == 0 {
                return Err(Error::Syntax { position: start, message: "S0 is degenerate".into() });
            }
            Ok(GroupSpec::Symmetric(n))
        }
        Some('A') => {
            cur.pos += 1;
            let n = cur.number()?;
            if n == 0 {
                return Err(Error::Syntax { position: start, message: "A0 is degenerate".into() });
            }
            Ok(GroupSpec::Alternating(n))
        }
        _ => cur.err("expected C, D, S, A, Q8, SD( or perm:"),
    }
}

fn parse_perm(cur: &mut Cursor<'_>) -> Result<GroupSpec> {
    let degree = cur.number()?;
    if degree == 0 {
        return cur.err("degree 0 is degenerate");
    }
    cur.expect(':')?;
    let mut gens = Vec::new();
    loop {
        let gen_start = cur.pos;
        let mut cycles = Vec::new();
        while cur.eat('(') {
            let mut cycle = Vec::new();
            if !cur.eat(')') {
                loop {
                    cycle.push(cur.number()?);
                    if cur.eat(')') {
                        break;
                    }
                    cur.expect(',')?;
                }
            }
            if cycle.len() > 1 {
                cycles.push(cycle);
            }
        }
        if cur.pos == gen_start {
            return cur.err("expected a cycle '('");
        }
        let perm = Permutation::from_cycles(degree, &cycles)
            .map_err(|e| Error::Syntax { position: gen_start, message: e.to_string() })?;
        gens.push(perm);
        if !cur.eat(';') {
            break;
        }
    }
    Ok(GroupSpec::Generators { degree, gens })
}

/// A finite group given by its full multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    order: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
    elem_order: Vec<u32>,
    generators: Vec<u32>,
    label: String,
    perms: Option<Vec<Permutation>>,
}

impl GroupTable {
    /// Wraps a raw row-major table whose row/column 0 is the identity.
    pub fn from_table(label: impl Into<String>, order: usize, mul: Vec<u32>) -> Result<Self> {
        if order == 0 || mul.len() != order * order {
            return Err(Error::InvalidSpec("table shape does not match order".into()));
        }
        let mut inv = vec![u32::MAX; order];
        for a in 0..order {
            for b in 0..order {
                if mul[a * order + b] == 0 {
                    inv[a] = b as u32;
                    break;
                }
            }
            if inv[a] == u32::MAX {
                return Err(Error::InvalidSpec(format!("element {a} has no inverse")));
            }
        }
        let mut elem_order = vec![0u32; order];
        for g in 0..order {
            let mut x = g;
            let mut k = 1u32;
            while x != 0 {
                x = mul[x * order + g] as usize;
                k += 1;
                if k as usize > order {
                    return Err(Error::InvalidSpec(format!("element {g} has no finite order")));
                }
            }
            elem_order[g] = k;
        }
        let mut table = Self {
            order,
            mul,
            inv,
            elem_order,
            generators: Vec::new(),
            label: label.into(),
            perms: None,
        };
        table.generators = table.greedy_generators();
        Ok(table)
    }

    fn greedy_generators(&self) -> Vec<u32> {
        let mut members = FixedBitSet::with_capacity(self.order);
        members.insert(0);
        let mut elems = vec![0u32];
        let mut gens = Vec::new();
        // Prefer high-order elements so the set stays small.
        let mut candidates: Vec<u32> = (1..self.order as u32).collect();
        candidates.sort_by_key(|&g| (std::cmp::Reverse(self.elem_order[g as usize]), g));
        for g in candidates {
            if members.contains(g as usize) {
                continue;
            }
            let (m, e) = self.extend_closure(&members, &elems, &gens, g);
            members = m;
            elems = e;
            gens.push(g);
            if elems.len() == self.order {
                break;
            }
        }
        gens
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    pub fn identity(&self) -> u32 {
        0
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    pub fn elem_order(&self, a: u32) -> u32 {
        self.elem_order[a as usize]
    }

    pub fn elem_orders(&self) -> &[u32] {
        &self.elem_order
    }

    /// `g h g⁻¹`.
    #[inline]
    pub fn conj(&self, g: u32, h: u32) -> u32 {
        self.mul(self.mul(g, h), self.inv(g))
    }

    /// `a⁻¹ b⁻¹ a b`.
    pub fn commutator(&self, a: u32, b: u32) -> u32 {
        self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))
    }

    pub fn pow(&self, g: u32, k: u64) -> u32 {
        let mut acc = 0;
        for _ in 0..(k % self.elem_order(g) as u64) {
            acc = self.mul(acc, g);
        }
        acc
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    pub fn permutation(&self, g: u32) -> Option<&Permutation> {
        self.perms.as_ref().map(|p| &p[g as usize])
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (a + 1..self.order).all(|b| self.mul[a * self.order + b] == self.mul[b * self.order + a]))
    }

    pub fn is_cyclic(&self) -> bool {
        self.elem_order.iter().any(|&o| o as usize == self.order)
    }

    /// Smallest subgroup containing `members` (assumed closed) and `g`.
    ///
    /// Dimino-style extension: the result is a union of right cosets `H·r`,
    /// grown until closed under right multiplication by every generator.
    pub(crate) fn extend_closure(
        &self,
        members: &FixedBitSet,
        elems: &[u32],
        gens: &[u32],
        g: u32,
    ) -> (FixedBitSet, Vec<u32>) {
        if members.contains(g as usize) {
            return (members.clone(), elems.to_vec());
        }
        let mut set = members.clone();
        let mut out = elems.to_vec();
        let mut all_gens = gens.to_vec();
        all_gens.push(g);
        let mut reps = vec![0u32];
        let mut i = 0;
        while i < reps.len() {
            let r = reps[i];
            i += 1;
            for &s in &all_gens {
                let x = self.mul(r, s);
                if set.contains(x as usize) {
                    continue;
                }
                for &h in elems {
                    let y = self.mul(h, x);
                    set.insert(y as usize);
                    out.push(y);
                }
                reps.push(x);
            }
        }
        (set, out)
    }

    /// Checks identity, inverses, Lagrange and associativity (exhaustive up to
    /// 64 elements, 10 000 seeded random triples beyond).
    pub fn validate(&self) -> Result<()> {
        let n = self.order;
        for a in 0..n as u32 {
            if self.mul(0, a) != a || self.mul(a, 0) != a {
                return Err(Error::InvalidSpec(format!("index 0 is not an identity for {a}")));
            }
            if self.mul(a, self.inv(a)) != 0 || self.mul(self.inv(a), a) != 0 {
                return Err(Error::InvalidSpec(format!("bad inverse for {a}")));
            }
            if !n.is_multiple_of(self.elem_order(a) as usize) {
                return Err(Error::InvalidSpec(format!("order of {a} does not divide {n}")));
            }
        }
        let assoc = |a: u32, b: u32, c: u32| self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c));
        if n <= 64 {
            for a in 0..n as u32 {
                for b in 0..n as u32 {
                    for c in 0..n as u32 {
                        if !assoc(a, b, c) {
                            return Err(Error::InvalidSpec(format!("not associative at ({a},{b},{c})")));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            for _ in 0..10_000 {
                let (a, b, c) = (rng.gen_range(0..n as u32), rng.gen_range(0..n as u32), rng.gen_range(0..n as u32));
                if !assoc(a, b, c) {
                    return Err(Error::InvalidSpec(format!("not associative at ({a},{b},{c})")));
                }
            }
        }
        Ok(())
    }
}

fn cyclic_table(n: usize) -> Vec<u32> {
    let mut mul = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            mul.push(((a + b) % n) as u32);
        }
    }
    mul
}

/// Direct product of cyclic groups; element index is the mixed-radix number
/// whose first digit is the coordinate in the first factor.
fn abelian_table(factors: &[usize]) -> Vec<u32> {
    let n: usize = factors.iter().product();
    let digits = |mut x: usize| {
        let mut d = Vec::with_capacity(factors.len());
        for &f in factors {
            d.push(x % f);
            x /= f;
        }
        d
    };
    let all: Vec<Vec<usize>> = (0..n).map(digits).collect();
    let mut mul = Vec::with_capacity(n * n);
    for a in &all {
        for b in &all {
            let mut idx = 0;
            let mut stride = 1;
            for (k, &f) in factors.iter().enumerate() {
                idx += ((a[k] + b[k]) % f) * stride;
                stride *= f;
            }
            mul.push(idx as u32);
        }
    }
    mul
}

/// `D_{2n}`: index `i < n` is `a^i`, index `n + i` is `a^i b`.
fn dihedral_table(n: usize) -> Vec<u32> {
    let m = 2 * n;
    let mut mul = Vec::with_capacity(m * m);
    for x in 0..m {
        let (i, xb) = (x % n, x >= n);
        for y in 0..m {
            let (j, yb) = (y % n, y >= n);
            let e = match (xb, yb) {
                (false, false) => (i + j) % n,
                (false, true) => n + (i + j) % n,
                (true, false) => n + (i + n - j) % n,
                (true, true) => (i + n - j) % n,
            };
            mul.push(e as u32);
        }
    }
    mul
}

/// `Q8` ordered as `1, -1, i, -i, j, -j, k, -k`.
fn quaternion_table() -> Vec<u32> {
    // unit index 0..4 for 1,i,j,k; product as (sign, unit)
    let unit_mul = |u: usize, v: usize| -> (bool, usize) {
        match (u, v) {
            (0, v) => (false, v),
            (u, 0) => (false, u),
            (u, v) if u == v => (true, 0),
            (1, 2) => (false, 3),
            (2, 3) => (false, 1),
            (3, 1) => (false, 2),
            (2, 1) => (true, 3),
            (3, 2) => (true, 1),
            (1, 3) => (true, 2),
            _ => unreachable!(),
        }
    };
    let mut mul = Vec::with_capacity(64);
    for x in 0..8 {
        let (ux, sx) = (x / 2, x % 2 == 1);
        for y in 0..8 {
            let (uy, sy) = (y / 2, y % 2 == 1);
            let (s, u) = unit_mul(ux, uy);
            let neg = s ^ sx ^ sy;
            mul.push((2 * u + neg as usize) as u32);
        }
    }
    mul
}

/// Breadth-first closure of permutation generators under right
/// multiplication; each BFS layer is numbered in lexicographic image order.
pub fn closure_from_generators(
    label: impl Into<String>,
    degree: usize,
    gens: &[Permutation],
    cap: usize,
) -> Result<GroupTable> {
    if degree == 0 {
        return Err(Error::InvalidSpec("degree 0 is degenerate".into()));
    }
    if gens.iter().any(|g| g.degree() != degree) {
        return Err(Error::InvalidSpec("generator degree mismatch".into()));
    }
    let gens: Vec<&Permutation> = gens.iter().filter(|g| !g.is_identity()).collect();
    let mut elements = vec![Permutation::identity(degree)];
    let mut index: HashMap<Permutation, u32> = HashMap::new();
    index.insert(elements[0].clone(), 0);
    // parent[b] = (b', s) with b = b' * gens[s]
    let mut parent: Vec<(u32, usize)> = vec![(0, usize::MAX)];
    let mut frontier = vec![0u32];
    while !frontier.is_empty() {
        let mut layer: Vec<(Permutation, u32, usize)> = Vec::new();
        let mut layer_seen: HashMap<Permutation, ()> = HashMap::new();
        for &x in &frontier {
            for (s, g) in gens.iter().enumerate() {
                let y = elements[x as usize].then(g);
                if index.contains_key(&y) || layer_seen.contains_key(&y) {
                    continue;
                }
                layer_seen.insert(y.clone(), ());
                layer.push((y, x, s));
            }
        }
        layer.sort_by(|a, b| a.0.cmp(&b.0));
        frontier.clear();
        for (y, x, s) in layer {
            if elements.len() >= cap {
                return Err(Error::CapExceeded { cap });
            }
            let id = elements.len() as u32;
            index.insert(y.clone(), id);
            elements.push(y);
            parent.push((x, s));
            frontier.push(id);
        }
    }
    let n = elements.len();
    // right multiplication by each generator
    let right: Vec<Vec<u32>> = gens
        .iter()
        .map(|g| elements.iter().map(|x| index[&x.then(g)]).collect())
        .collect();
    let mut mul = vec![0u32; n * n];
    for a in 0..n {
        mul[a * n] = a as u32;
    }
    for b in 1..n {
        let (bp, s) = parent[b];
        for a in 0..n {
            let ab = mul[a * n + bp as usize];
            mul[a * n + b] = right[s][ab as usize];
        }
    }
    let mut table = GroupTable::from_table(label, n, mul)?;
    table.perms = Some(elements);
    Ok(table)
}

fn cycle_perm(degree: usize, cycle: &[usize]) -> Permutation {
    Permutation::from_cycles(degree, &[cycle.to_vec()]).expect("valid cycle")
}

fn smallest_root_of_order(p: usize, q: usize) -> usize {
    (2..p)
        .find(|&g| {
            let mut x = 1;
            let mut k = 0;
            loop {
                x = x * g % p;
                k += 1;
                if x == 1 {
                    break k == q;
                }
            }
        })
        .expect("q divides p-1")
}

/// Builds the multiplication table described by `spec`.
pub fn build_group(spec: &GroupSpec, cap: usize) -> Result<GroupTable> {
    let label = spec.to_string();
    let table = match spec {
        GroupSpec::Cyclic(n) => {
            if *n == 0 {
                return Err(Error::InvalidSpec("C0".into()));
            }
            check_cap(*n, cap)?;
            GroupTable::from_table(label, *n, cyclic_table(*n))?
        }
        GroupSpec::Abelian(fs) => {
            if fs.is_empty() || fs.contains(&0) {
                return Err(Error::InvalidSpec("abelian factors must be positive".into()));
            }
            let n = fs.iter().try_fold(1usize, |acc, &f| acc.checked_mul(f)).unwrap_or(usize::MAX);
            check_cap(n, cap)?;
            GroupTable::from_table(label, n, abelian_table(fs))?
        }
        GroupSpec::Dihedral(m) => {
            if m % 2 != 0 || *m < 4 {
                return Err(Error::InvalidSpec(format!("D{m}: order must be even and at least 4")));
            }
            check_cap(*m, cap)?;
            GroupTable::from_table(label, *m, dihedral_table(m / 2))?
        }
        GroupSpec::Quaternion8 => GroupTable::from_table(label, 8, quaternion_table())?,
        GroupSpec::Symmetric(n) => {
            let n = *n;
            if n == 0 {
                return Err(Error::InvalidSpec("S0".into()));
            }
            let mut gens = Vec::new();
            if n >= 2 {
                gens.push(cycle_perm(n, &[1, 2]));
            }
            if n >= 3 {
                gens.push(cycle_perm(n, &(1..=n).collect::<Vec<_>>()));
            }
            closure_from_generators(label, n, &gens, cap)?
        }
        GroupSpec::Alternating(n) => {
            let n = *n;
            if n == 0 {
                return Err(Error::InvalidSpec("A0".into()));
            }
            let gens: Vec<Permutation> = (3..=n).map(|k| cycle_perm(n, &[1, 2, k])).collect();
            closure_from_generators(label, n, &gens, cap)?
        }
        GroupSpec::SemidirectCyclic { p, q } => {
            let (p, q) = (*p, *q);
            if !is_prime(p) || !is_prime(q) || (p - 1) % q != 0 {
                return Err(Error::InvalidSpec(format!("SD({p},{q}) needs primes with q | p-1")));
            }
            let g = smallest_root_of_order(p, q);
            let shift = Permutation::new((0..p).map(|x| ((x + 1) % p) as u32).collect())?;
            let scale = Permutation::new((0..p).map(|x| (x * g % p) as u32).collect())?;
            closure_from_generators(label, p, &[shift, scale], cap)?
        }
        GroupSpec::Generators { degree, gens } => closure_from_generators(label, *degree, gens, cap)?,
        GroupSpec::Quotient { base, by } => {
            let g = build_group(base, cap)?;
            let n = lattice::resolve_normal(&g, *by)?;
            let (mut q, _) = quotient_group(&g, &n)?;
            q.set_label(label);
            return Ok(q);
        }
    };
    table.validate()?;
    Ok(table)
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::CapExceeded { cap })
    } else {
        Ok(())
    }
}

/// Quotient by a normal subgroup given as a member bitset.
///
/// Cosets are numbered by their smallest element, so the identity coset is 0.
/// Returns the quotient table and the projection `element -> coset`.
pub fn quotient_group(g: &GroupTable, normal: &FixedBitSet) -> Result<(GroupTable, Vec<u32>)> {
    let n = g.order();
    let members: Vec<u32> = normal.ones().map(|x| x as u32).collect();
    if !normal.contains(0) || members.iter().any(|&a| members.iter().any(|&b| !normal.contains(g.mul(a, b) as usize))) {
        return Err(Error::InvalidArgument("not a subgroup".into()));
    }
    for &x in g.generators() {
        if members.iter().any(|&h| !normal.contains(g.conj(x, h) as usize)) {
            return Err(Error::NotNormal);
        }
    }
    let mut proj = vec![u32::MAX; n];
    let mut reps = Vec::new();
    for x in 0..n as u32 {
        if proj[x as usize] != u32::MAX {
            continue;
        }
        let c = reps.len() as u32;
        reps.push(x);
        for &h in &members {
            proj[g.mul(x, h) as usize] = c;
        }
    }
    let m = reps.len();
    let mut mul = Vec::with_capacity(m * m);
    for &a in &reps {
        for &b in &reps {
            mul.push(proj[g.mul(a, b) as usize]);
        }
    }
    let q = GroupTable::from_table(format!("{}/N", g.label()), m, mul)?;
    if n <= 64 {
        for a in 0..n as u32 {
            for b in 0..n as u32 {
                if proj[g.mul(a, b) as usize] != q.mul(proj[a as usize], proj[b as usize]) {
                    return Err(Error::NotNormal);
                }
            }
        }
    }
    Ok((q, proj))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(text: &str) -> GroupTable {
        build_group(&parse_group_spec(text).unwrap(), DEFAULT_ELEMENT_CAP).unwrap()
    }

    fn bits(n: usize, xs: &[u32]) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(n);
        for &x in xs {
            b.insert(x as usize);
        }
        b
    }

    #[test]
    fn parses_grammar() {
        assert_eq!(parse_group_spec("D8").unwrap(), GroupSpec::Dihedral(8));
        assert_eq!(parse_group_spec("C2xC2xC3").unwrap(), GroupSpec::Abelian(vec![2, 2, 3]));
        assert_eq!(parse_group_spec("C2x2x3").unwrap(), GroupSpec::Abelian(vec![2, 2, 3]));
        assert_eq!(parse_group_spec("C12").unwrap(), GroupSpec::Cyclic(12));
        assert_eq!(parse_group_spec("SD(7,3)").unwrap(), GroupSpec::SemidirectCyclic { p: 7, q: 3 });
        assert_eq!(
            parse_group_spec("S4/D2").unwrap(),
            GroupSpec::Quotient { base: Box::new(GroupSpec::Symmetric(4)), by: NormalKind::Derived(2) }
        );
        match parse_group_spec("perm:3:(1,2);(1,2,3)").unwrap() {
            GroupSpec::Generators { degree: 3, gens } => {
                assert_eq!(gens.len(), 2);
                assert_eq!(gens[0].images(), &[1, 0, 2]);
                assert_eq!(gens[1].images(), &[1, 2, 0]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!(parse_group_spec("D7"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_group_spec("D2"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_group_spec("SD(7,5)"), Err(Error::InvalidSpec(_))));
        assert!(matches!(parse_group_spec("SD(5,4)"), Err(Error::InvalidSpec(_))));
        assert!(matches!(parse_group_spec("X3"), Err(Error::Syntax { position: 0, .. })));
        assert!(matches!(parse_group_spec("C3y"), Err(Error::Syntax { position: 2, .. })));
        assert!(matches!(parse_group_spec("perm:0:()"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_group_spec("perm:3:(1,4)"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_group_spec("S4/Q"), Err(Error::Syntax { position: 3, .. })));
    }

    #[test]
    fn display_round_trips() {
        for text in ["C6", "C2xC2xC3", "D36", "S5", "A4", "Q8", "SD(13,3)", "perm:4:(1,2)(3,4);(1,3)", "S4/D2/Z"] {
            let spec = parse_group_spec(text).unwrap();
            assert_eq!(spec.to_string(), text);
            assert_eq!(parse_group_spec(&spec.to_string()).unwrap(), spec);
        }
    }

    #[test]
    fn cyclic_orders_in_power_order() {
        let g = build("C6");
        assert_eq!(g.order(), 6);
        assert_eq!(g.elem_orders(), &[1, 6, 3, 2, 3, 6]);
    }

    #[test]
    fn quaternion_has_six_elements_of_order_four() {
        let g = build("Q8");
        assert_eq!(g.order(), 8);
        assert_eq!(g.elem_orders().iter().filter(|&&o| o == 4).count(), 6);
        assert_eq!(g.elem_orders().iter().filter(|&&o| o == 2).count(), 1);
        assert!(!g.is_abelian());
    }

    #[test]
    fn closed_form_orders() {
        let fact = |n: usize| (1..=n).product::<usize>();
        for n in 1..=6 {
            assert_eq!(build(&format!("S{n}")).order(), fact(n));
            let alt = if n < 2 { 1 } else { fact(n) / 2 };
            assert_eq!(build(&format!("A{n}")).order(), alt);
        }
        for m in (4..=40).step_by(2) {
            assert_eq!(build(&format!("D{m}")).order(), m);
        }
        for (p, q) in [(3, 2), (5, 2), (7, 2), (7, 3), (13, 3)] {
            assert_eq!(build(&format!("SD({p},{q})")).order(), p * q);
        }
        assert_eq!(build("C2xC3xC4").order(), 24);
    }

    #[test]
    fn perm_spec_generates_s3() {
        let g = build("perm:3:(1,2);(1,2,3)");
        assert_eq!(g.order(), 6);
        assert!(!g.is_abelian());
        assert_eq!(g.permutation(0).unwrap(), &Permutation::identity(3));
    }

    #[test]
    fn cap_is_enforced() {
        let spec = parse_group_spec("S6").unwrap();
        assert_eq!(build_group(&spec, 100), Err(Error::CapExceeded { cap: 100 }));
        assert!(matches!(build_group(&GroupSpec::Cyclic(200), 100), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn building_is_deterministic() {
        for text in ["S5", "A5", "SD(13,3)", "perm:5:(1,2,3,4,5);(1,2)"] {
            assert_eq!(build(text), build(text));
        }
    }

    #[test]
    fn quaternion_mod_center_is_klein() {
        let g = build("Q8");
        let (q, proj) = quotient_group(&g, &bits(8, &[0, 1])).unwrap();
        assert_eq!(q.order(), 4);
        assert!(q.elem_orders()[1..].iter().all(|&o| o == 2));
        assert_eq!(proj[0], 0);
        assert_eq!(proj[1], 0);
    }

    #[test]
    fn quotient_by_whole_group_is_trivial() {
        let g = build("S3");
        let all: Vec<u32> = (0..6).collect();
        let (q, _) = quotient_group(&g, &bits(6, &all)).unwrap();
        assert_eq!(q.order(), 1);
        let (same, proj) = quotient_group(&g, &bits(6, &[0])).unwrap();
        assert_eq!(same.order(), 6);
        assert_eq!(proj, (0..6).collect::<Vec<u32>>());
    }

    #[test]
    fn quotient_rejects_non_normal() {
        let g = build("S3");
        let t = (1..6u32).find(|&x| g.elem_order(x) == 2).unwrap();
        assert_eq!(quotient_group(&g, &bits(6, &[0, t])).unwrap_err(), Error::NotNormal);
    }

    #[test]
    fn s4_mod_klein_is_nonabelian_of_order_six() {
        let g = build("S4/D2");
        assert_eq!(g.order(), 6);
        assert!(!g.is_abelian());
        assert_eq!(g.label(), "S4/D2");
    }

    #[test]
    fn validate_catches_broken_tables() {
        // order-3 table with a non-associative twist
        let mul = vec![0, 1, 2, 1, 1, 0, 2, 0, 1];
        let t = GroupTable::from_table("bad", 3, mul);
        assert!(t.is_err() || t.unwrap().validate().is_err());
    }
}
