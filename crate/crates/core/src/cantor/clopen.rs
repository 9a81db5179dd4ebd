//! Clopen subsets of Ω_S as finite unions of cylinders.
//!
//! A clopen set is stored at a depth `d: prime → n_p` as a set of flat
//! prefixes: the first `n_p` digits of each coordinate, concatenated in
//! increasing prime order. The canonical form has the least depth, obtained by
//! merging complete families of siblings.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{act, mult as mult_point, CantorError, CantorPoint, Result, TorsionElement};
use crate::smooth::{PrimeSet, SmoothNumber};

pub type Depth = BTreeMap<u64, usize>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Clopen {
    depth: Depth,
    prefixes: BTreeSet<Vec<u32>>,
}

/// Every flat prefix at `depth`, in lexicographic order.
pub fn cells(depth: &Depth) -> Vec<Vec<u32>> {
    let radices: Vec<u32> =
        depth.iter().flat_map(|(&p, &n)| std::iter::repeat_n(p as u32, n)).collect();
    let mut out = vec![Vec::with_capacity(radices.len())];
    for &r in &radices {
        out = out
            .into_iter()
            .flat_map(|pre| {
                (0..r).map(move |d| {
                    let mut v = pre.clone();
                    v.push(d);
                    v
                })
            })
            .collect();
    }
    out
}

/// Depth-wise maximum.
pub(crate) fn join(a: &Depth, b: &Depth) -> Depth {
    let mut out = a.clone();
    for (&p, &n) in b {
        let e = out.entry(p).or_insert(0);
        *e = (*e).max(n);
    }
    out.retain(|_, n| *n > 0);
    out
}

/// Splits a flat prefix into per-prime segments.
pub(crate) fn split(depth: &Depth, prefix: &[u32]) -> BTreeMap<u64, Vec<u32>> {
    let mut at = 0;
    depth
        .iter()
        .map(|(&p, &n)| {
            let seg = prefix[at..at + n].to_vec();
            at += n;
            (p, seg)
        })
        .collect()
}

/// The point with the given prefix and zero tail.
pub(crate) fn prefix_point(depth: &Depth, prefix: &[u32]) -> CantorPoint {
    CantorPoint::trimmed(split(depth, prefix))
}

/// Flat prefix of a point at `depth`.
pub(crate) fn point_prefix(depth: &Depth, x: &CantorPoint) -> Vec<u32> {
    depth.iter().flat_map(|(&p, &n)| x.prefix(p, n)).collect()
}

/// All refinements of `prefix` from depth `from` to the deeper depth `to`.
pub(crate) fn lift_prefix(from: &Depth, to: &Depth, prefix: &[u32]) -> Vec<Vec<u32>> {
    let segs = split(from, prefix);
    let mut out = vec![Vec::new()];
    for (&p, &n) in to {
        let seg = segs.get(&p).cloned().unwrap_or_default();
        let extra = n - seg.len();
        let tails = cells(&BTreeMap::from([(p, extra)]));
        out = out
            .into_iter()
            .flat_map(|pre: Vec<u32>| {
                let seg = seg.clone();
                tails.iter().map(move |t| {
                    let mut v = pre.clone();
                    v.extend_from_slice(&seg);
                    v.extend_from_slice(t);
                    v
                })
            })
            .collect();
    }
    out
}

/// Offset of a prime's segment inside a flat prefix.
pub(crate) fn segment_start(depth: &Depth, p: u64) -> usize {
    depth.range(..p).map(|(_, &n)| n).sum()
}

impl Clopen {
    pub fn empty() -> Self {
        Clopen { depth: Depth::new(), prefixes: BTreeSet::new() }
    }

    pub fn full() -> Self {
        Clopen { depth: Depth::new(), prefixes: BTreeSet::from([Vec::new()]) }
    }

    pub fn new(depth: Depth, prefixes: impl IntoIterator<Item = Vec<u32>>, primes: &PrimeSet) -> Result<Self> {
        let mut depth = depth;
        depth.retain(|_, n| *n > 0);
        if let Some(&p) = depth.keys().find(|&&p| !primes.contains(p)) {
            return Err(CantorError::UnknownPrime(p));
        }
        let radices: Vec<u64> =
            depth.iter().flat_map(|(&p, &n)| std::iter::repeat_n(p, n)).collect();
        let mut set = BTreeSet::new();
        for pre in prefixes {
            let ok = pre.len() == radices.len() && pre.iter().zip(&radices).all(|(&d, &r)| (d as u64) < r);
            if !ok {
                return Err(CantorError::Prefix(pre, depth));
            }
            set.insert(pre);
        }
        Ok(Clopen { depth, prefixes: set }.canonical())
    }

    /// The cylinder of points whose coordinates start with the given digits.
    pub fn cylinder(start: &BTreeMap<u64, Vec<u32>>, primes: &PrimeSet) -> Result<Self> {
        let depth: Depth = start.iter().map(|(&p, d)| (p, d.len())).collect();
        let flat: Vec<u32> = start.values().flatten().copied().collect();
        Self::new(depth, [flat], primes)
    }

    pub(crate) fn from_parts(depth: Depth, prefixes: impl IntoIterator<Item = Vec<u32>>) -> Self {
        Clopen { depth, prefixes: prefixes.into_iter().collect() }.canonical()
    }

    pub fn depth(&self) -> &Depth {
        &self.depth
    }

    pub fn prefixes(&self) -> &BTreeSet<Vec<u32>> {
        &self.prefixes
    }

    pub fn is_empty(&self) -> bool {
        self.prefixes.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.depth.is_empty() && !self.prefixes.is_empty()
    }

    /// The same set described at a deeper depth.
    pub fn lift(&self, to: &Depth) -> BTreeSet<Vec<u32>> {
        let to = join(&self.depth, to);
        self.prefixes.iter().flat_map(|pre| lift_prefix(&self.depth, &to, pre)).collect()
    }

    pub fn contains(&self, x: &CantorPoint) -> bool {
        self.prefixes.contains(&point_prefix(&self.depth, x))
    }

    fn combine(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Self {
        let d = join(&self.depth, &other.depth);
        let a = self.lift(&d);
        let b = other.lift(&d);
        let prefixes = cells(&d).into_iter().filter(|c| op(a.contains(c), b.contains(c))).collect();
        Clopen { depth: d, prefixes }.canonical()
    }

    pub fn union(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> Self {
        Self::full().difference(self)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    /// Image under the action of `t`.
    pub fn translate(&self, t: &TorsionElement) -> Self {
        let need: Depth = t.components().into_iter().map(|(p, _, n)| (p, n as usize)).collect();
        let d = join(&self.depth, &need);
        let prefixes = self
            .lift(&d)
            .into_iter()
            .map(|pre| point_prefix(&d, &act(t, &prefix_point(&d, &pre))))
            .collect();
        Clopen { depth: d, prefixes }.canonical()
    }

    /// Image under multiplication by `m`.
    pub fn mult(&self, m: &SmoothNumber) -> Self {
        let mut d = self.depth.clone();
        for &(p, e) in m.factorization() {
            *d.entry(p).or_insert(0) += e as usize;
        }
        // the image of a cylinder is a cylinder with a zero block in front
        let prefixes = self
            .prefixes
            .iter()
            .map(|pre| point_prefix(&d, &mult_point(m, &prefix_point(&self.depth, pre))))
            .collect();
        Clopen { depth: d, prefixes }.canonical()
    }

    /// Merges complete sibling families until none remain.
    pub fn canonical(mut self) -> Self {
        if self.prefixes.is_empty() {
            return Self::empty();
        }
        loop {
            let mut changed = false;
            for (&p, &n) in self.depth.clone().iter() {
                let pos = segment_start(&self.depth, p) + n - 1;
                let mut families: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
                for pre in &self.prefixes {
                    let mut parent = pre.clone();
                    parent.remove(pos);
                    *families.entry(parent).or_default() += 1;
                }
                if families.values().all(|&c| c as u64 == p) {
                    self.prefixes = families.into_keys().collect();
                    if n == 1 {
                        self.depth.remove(&p);
                    } else {
                        self.depth.insert(p, n - 1);
                    }
                    changed = true;
                }
            }
            if !changed {
                return self;
            }
        }
    }
}

/// Wire form: `{"depth":{"2":2},"prefixes":[[0,1]]}`.
#[derive(Debug, Clone, Deserialize)]
pub struct RawClopen {
    pub depth: BTreeMap<String, usize>,
    pub prefixes: Vec<Vec<u32>>,
}

impl RawClopen {
    pub fn validate(&self, primes: &PrimeSet) -> Result<Clopen> {
        let mut depth = Depth::new();
        for (k, &n) in &self.depth {
            let p = k.parse().map_err(|_| CantorError::Parse(format!("prime key {k:?}")))?;
            depth.insert(p, n);
        }
        Clopen::new(depth, self.prefixes.iter().cloned(), primes)
    }
}
