//! The effective Burnside category of finite sets.
//!
//! Objects are the standard sets `⟨k⟩ = {0, …, k-1}`; morphisms are spans
//! `X ← A → Y` composed by pullback. Spans are compared up to a bijection of
//! apexes commuting with both legs, which is the only 2-categorical data kept.
//!
//! The functor `M̃_S` on the arrow category of Φ_S is realized by
//! [`m_simplex`]. Its edge maps are the two surjections `⟨n⟩ → ⟨m⟩` for
//! `m | n`: [`pmap`] (`i ↦ ⌊i/k⌋`, `k = n/m`) and [`jmap`] (`i ↦ i mod m`).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::smooth::SmoothNumber;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BurnsideError {
    #[error("{0} does not divide {1}")]
    NotDivisible(u64, u64),
    #[error("boundary mismatch: {0}")]
    Boundary(String),
    #[error("map table entry {entry} out of range for target of size {target}")]
    OutOfRange { entry: usize, target: usize },
    #[error("map table has length {len}, expected {src}")]
    TableLength { len: usize, src: usize },
    #[error("invalid chain: {0}")]
    InvalidChain(String),
    #[error("square does not commute at element {0}")]
    NotCommuting(usize),
}

pub type Result<T> = std::result::Result<T, BurnsideError>;

/// A map of standard finite sets `⟨src⟩ → ⟨dst⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawFinMap")]
pub struct FinMap {
    src: usize,
    dst: usize,
    table: Vec<usize>,
}

#[derive(Deserialize)]
struct RawFinMap {
    src: usize,
    dst: usize,
    table: Vec<usize>,
}

impl TryFrom<RawFinMap> for FinMap {
    type Error = BurnsideError;

    fn try_from(r: RawFinMap) -> Result<Self> {
        FinMap::new(r.src, r.dst, r.table)
    }
}

impl FinMap {
    pub fn new(src: usize, dst: usize, table: Vec<usize>) -> Result<Self> {
        if table.len() != src {
            return Err(BurnsideError::TableLength { len: table.len(), src });
        }
        if let Some(&entry) = table.iter().find(|&&e| e >= dst) {
            return Err(BurnsideError::OutOfRange { entry, target: dst });
        }
        Ok(FinMap { src, dst, table })
    }

    pub fn identity(n: usize) -> Self {
        FinMap { src: n, dst: n, table: (0..n).collect() }
    }

    pub fn src(&self) -> usize {
        self.src
    }

    pub fn dst(&self) -> usize {
        self.dst
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, i: usize) -> usize {
        self.table[i]
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &FinMap) -> Result<FinMap> {
        if first.dst != self.src {
            return Err(BurnsideError::Boundary(format!(
                "cannot compose ⟨{}⟩→⟨{}⟩ after ⟨{}⟩→⟨{}⟩",
                self.src, self.dst, first.src, first.dst
            )));
        }
        Ok(FinMap {
            src: first.src,
            dst: self.dst,
            table: first.table.iter().map(|&i| self.table[i]).collect(),
        })
    }

    pub fn is_bijective(&self) -> bool {
        if self.src != self.dst {
            return false;
        }
        let mut seen = vec![false; self.dst];
        self.table.iter().all(|&i| !std::mem::replace(&mut seen[i], true))
    }
}

fn quotient(m: &SmoothNumber, n: &SmoothNumber) -> Result<usize> {
    m.divides(n)
        .map(|k| k.as_usize())
        .ok_or(BurnsideError::NotDivisible(m.value(), n.value()))
}

/// `p_{m|n} : ⟨n⟩ → ⟨m⟩`, `i ↦ ⌊i/k⌋` where `n = mk`.
pub fn pmap(m: &SmoothNumber, n: &SmoothNumber) -> Result<FinMap> {
    let k = quotient(m, n)?;
    Ok(FinMap { src: n.as_usize(), dst: m.as_usize(), table: (0..n.as_usize()).map(|i| i / k).collect() })
}

/// `j_{m|n} : ⟨n⟩ → ⟨m⟩`, `i ↦ i mod m`.
pub fn jmap(m: &SmoothNumber, n: &SmoothNumber) -> Result<FinMap> {
    quotient(m, n)?;
    let mv = m.as_usize();
    Ok(FinMap { src: n.as_usize(), dst: mv, table: (0..n.as_usize()).map(|i| i % mv).collect() })
}

/// A span `X ← A → Y`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpan")]
pub struct Span {
    left: FinMap,
    right: FinMap,
}

#[derive(Deserialize)]
struct RawSpan {
    left: FinMap,
    right: FinMap,
}

impl TryFrom<RawSpan> for Span {
    type Error = BurnsideError;

    fn try_from(r: RawSpan) -> Result<Self> {
        Span::new(r.left, r.right)
    }
}

impl Span {
    pub fn new(left: FinMap, right: FinMap) -> Result<Self> {
        if left.src != right.src {
            return Err(BurnsideError::Boundary(format!(
                "legs have different apexes ⟨{}⟩ and ⟨{}⟩",
                left.src, right.src
            )));
        }
        Ok(Span { left, right })
    }

    pub fn identity(n: usize) -> Self {
        Span { left: FinMap::identity(n), right: FinMap::identity(n) }
    }

    /// The image of `k : m → n` under `M_S`: `⟨1⟩ ← ⟨k⟩ → ⟨1⟩`.
    pub fn multiplication(k: usize) -> Self {
        let c = FinMap { src: k, dst: 1, table: vec![0; k] };
        Span { left: c.clone(), right: c }
    }

    pub fn left(&self) -> &FinMap {
        &self.left
    }

    pub fn right(&self) -> &FinMap {
        &self.right
    }

    pub fn apex(&self) -> usize {
        self.left.src
    }

    pub fn source(&self) -> usize {
        self.left.dst
    }

    pub fn target(&self) -> usize {
        self.right.dst
    }

    /// The duality `D`: swap the legs.
    pub fn dual(&self) -> Span {
        Span { left: self.right.clone(), right: self.left.clone() }
    }

    /// `g ∘ self` for `self: X → Y`, `g: Y → Z`.
    ///
    /// The apex is `{(a, b) : self.right(a) = g.left(b)}` in lexicographic order.
    pub fn then(&self, g: &Span) -> Result<Span> {
        span_compose(g, self)
    }
}

/// `g ∘ f` by pullback.
pub fn span_compose(g: &Span, f: &Span) -> Result<Span> {
    if f.target() != g.source() {
        return Err(BurnsideError::Boundary(format!(
            "span into ⟨{}⟩ composed with span out of ⟨{}⟩",
            f.target(),
            g.source()
        )));
    }
    // index g's apex by its left leg so the product scan is linear in the output
    let mut by_mid: Vec<Vec<usize>> = vec![Vec::new(); g.source()];
    for (b, &y) in g.left.table.iter().enumerate() {
        by_mid[y].push(b);
    }
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (a, &y) in f.right.table.iter().enumerate() {
        for &b in &by_mid[y] {
            left.push(f.left.table[a]);
            right.push(g.right.table[b]);
        }
    }
    let n = left.len();
    Ok(Span {
        left: FinMap { src: n, dst: f.source(), table: left },
        right: FinMap { src: n, dst: g.target(), table: right },
    })
}

pub fn span_dual(s: &Span) -> Span {
    s.dual()
}

/// A bijection `σ` of apexes with `t.left ∘ σ = s.left` and `t.right ∘ σ = s.right`.
///
/// Apex elements are bucketed by their pair of leg values; within a bucket any
/// matching works, so the search never backtracks across buckets.
pub fn span_iso(s: &Span, t: &Span) -> Result<Option<FinMap>> {
    if s.source() != t.source() || s.target() != t.target() {
        return Err(BurnsideError::Boundary(format!(
            "⟨{}⟩→⟨{}⟩ vs ⟨{}⟩→⟨{}⟩",
            s.source(),
            s.target(),
            t.source(),
            t.target()
        )));
    }
    if s.apex() != t.apex() {
        return Ok(None);
    }
    let mut fibers: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for b in (0..t.apex()).rev() {
        fibers.entry((t.left.table[b], t.right.table[b])).or_default().push(b);
    }
    let mut table = Vec::with_capacity(s.apex());
    for a in 0..s.apex() {
        match fibers.get_mut(&(s.left.table[a], s.right.table[a])).and_then(Vec::pop) {
            Some(b) => table.push(b),
            None => return Ok(None),
        }
    }
    Ok(Some(FinMap { src: s.apex(), dst: t.apex(), table }))
}

pub fn span_equiv(s: &Span, t: &Span) -> Result<bool> {
    span_iso(s, t).map(|w| w.is_some())
}

/// A p-simplex `(m₀|n₀) | … | (m_p|n_p)` of the arrow category of Φ_S.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OChain {
    pairs: Vec<(SmoothNumber, SmoothNumber)>,
}

impl OChain {
    pub fn new(pairs: Vec<(SmoothNumber, SmoothNumber)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(BurnsideError::InvalidChain("empty chain".into()));
        }
        for (i, (m, n)) in pairs.iter().enumerate() {
            if m.divides(n).is_none() {
                return Err(BurnsideError::InvalidChain(format!("m_{i} = {m} does not divide n_{i} = {n}")));
            }
        }
        for (i, w) in pairs.windows(2).enumerate() {
            if w[0].0.divides(&w[1].0).is_none() {
                return Err(BurnsideError::InvalidChain(format!("m_{i} ∤ m_{}", i + 1)));
            }
            if w[0].1.divides(&w[1].1).is_none() {
                return Err(BurnsideError::InvalidChain(format!("n_{i} ∤ n_{}", i + 1)));
            }
        }
        Ok(OChain { pairs })
    }

    /// The simplicial dimension p.
    pub fn dim(&self) -> usize {
        self.pairs.len() - 1
    }

    pub fn pairs(&self) -> &[(SmoothNumber, SmoothNumber)] {
        &self.pairs
    }

    /// `k_{s,t} = n_t / m_s` for `s <= t`.
    pub fn k(&self, s: usize, t: usize) -> usize {
        self.pairs[s].0.divides(&self.pairs[t].1).expect("m_s | m_t | n_t").as_usize()
    }
}

/// A commuting square
///
/// ```text
///   apex --top--> right
///    |              |
///   left          down_right
///    v              v
///   left ---------> bottom
/// ```
///
/// stored as the two legs out of the apex and the two maps into the bottom.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Square {
    pub to_left: FinMap,
    pub to_right: FinMap,
    pub left_down: FinMap,
    pub right_down: FinMap,
}

/// The diagram `M̃_S(chain)`: vertices `⟨k_{s,t}⟩` for `s <= t`, edges
/// `(s,t) → (s,t-1)` of j-type and `(s,t) → (s+1,t)` of p-type.
#[derive(Debug, Clone)]
pub struct Simplex {
    pub chain: OChain,
    pub vertices: BTreeMap<(usize, usize), usize>,
    /// keyed by (s, t): the map `⟨k_{s,t}⟩ → ⟨k_{s,t-1}⟩`
    pub j_edges: BTreeMap<(usize, usize), FinMap>,
    /// keyed by (s, t): the map `⟨k_{s,t}⟩ → ⟨k_{s+1,t}⟩`
    pub p_edges: BTreeMap<(usize, usize), FinMap>,
    /// keyed by the apex (s, t), `t - s >= 2`
    pub diamonds: BTreeMap<(usize, usize), Square>,
}

impl Simplex {
    /// The span on the edge from vertex `(s,s)` to `(t,t)`, obtained by
    /// composing the left and right boundaries of the sub-triangle.
    pub fn edge_span(&self, s: usize, t: usize) -> Span {
        let apex = self.vertices[&(s, t)];
        let mut left = FinMap::identity(apex);
        for tt in (s + 1..=t).rev() {
            left = self.j_edges[&(s, tt)].after(&left).expect("chain of j-edges");
        }
        let mut right = FinMap::identity(apex);
        for ss in s..t {
            right = self.p_edges[&(ss, t)].after(&right).expect("chain of p-edges");
        }
        Span { left, right }
    }
}

pub fn m_simplex(chain: &OChain) -> Simplex {
    let p = chain.dim();
    let mut vertices = BTreeMap::new();
    for s in 0..=p {
        for t in s..=p {
            vertices.insert((s, t), chain.k(s, t));
        }
    }
    let sn = |v: usize| SmoothNumber::from_exponents(factor_small(v)).expect("vertex size is smooth");
    let mut j_edges = BTreeMap::new();
    let mut p_edges = BTreeMap::new();
    for s in 0..=p {
        for t in s..=p {
            let here = sn(vertices[&(s, t)]);
            if t > s {
                let there = sn(vertices[&(s, t - 1)]);
                j_edges.insert((s, t), jmap(&there, &here).expect("k_{s,t-1} | k_{s,t}"));
                let there = sn(vertices[&(s + 1, t)]);
                p_edges.insert((s, t), pmap(&there, &here).expect("k_{s+1,t} | k_{s,t}"));
            }
        }
    }
    let mut diamonds = BTreeMap::new();
    for s in 0..=p {
        for t in s + 2..=p {
            diamonds.insert(
                (s, t),
                Square {
                    to_left: j_edges[&(s, t)].clone(),
                    to_right: p_edges[&(s, t)].clone(),
                    left_down: p_edges[&(s, t - 1)].clone(),
                    right_down: j_edges[&(s + 1, t)].clone(),
                },
            );
        }
    }
    Simplex { chain: chain.clone(), vertices, j_edges, p_edges, diamonds }
}

fn factor_small(mut v: usize) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= v {
        let mut e = 0;
        while v.is_multiple_of(d) {
            v /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d as u64, e));
        }
        d += 1;
    }
    if v > 1 {
        out.push((v as u64, 1));
    }
    out
}

/// Is the commuting square a pullback? Non-commuting squares are an error.
pub fn is_pullback(sq: &Square) -> Result<bool> {
    let apex = sq.to_left.src;
    if sq.to_right.src != apex
        || sq.left_down.src != sq.to_left.dst
        || sq.right_down.src != sq.to_right.dst
        || sq.left_down.dst != sq.right_down.dst
    {
        return Err(BurnsideError::Boundary("square maps do not fit together".into()));
    }
    for a in 0..apex {
        if sq.left_down.apply(sq.to_left.apply(a)) != sq.right_down.apply(sq.to_right.apply(a)) {
            return Err(BurnsideError::NotCommuting(a));
        }
    }
    // comparison map into the fiber product must hit every pair exactly once
    let mut hits: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for a in 0..apex {
        *hits.entry((sq.to_left.apply(a), sq.to_right.apply(a))).or_default() += 1;
    }
    if hits.values().any(|&c| c != 1) {
        return Ok(false);
    }
    let mut fiber_product = 0usize;
    let mut right_over: BTreeMap<usize, usize> = BTreeMap::new();
    for c in 0..sq.right_down.src {
        *right_over.entry(sq.right_down.apply(c)).or_default() += 1;
    }
    for b in 0..sq.left_down.src {
        fiber_product += right_over.get(&sq.left_down.apply(b)).copied().unwrap_or(0);
    }
    Ok(fiber_product == apex)
}
