//! Locally constant ℤ-valued functions on Ω_S.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use super::clopen::{cells, join, lift_prefix, point_prefix, segment_start, Depth};
use super::{CantorPoint, Clopen};

/// A function constant on the cells of some depth, stored in canonical
/// (least-depth) form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LCFunction {
    depth: Depth,
    values: BTreeMap<Vec<u32>, BigInt>,
}

impl LCFunction {
    pub fn constant(c: impl Into<BigInt>) -> Self {
        LCFunction { depth: Depth::new(), values: BTreeMap::from([(Vec::new(), c.into())]) }
    }

    pub fn zero() -> Self {
        Self::constant(0)
    }

    pub fn indicator(u: &Clopen) -> Self {
        let values = cells(u.depth())
            .into_iter()
            .map(|c| {
                let v = if u.prefixes().contains(&c) { BigInt::one() } else { BigInt::zero() };
                (c, v)
            })
            .collect();
        LCFunction { depth: u.depth().clone(), values }.canonical()
    }

    pub fn depth(&self) -> &Depth {
        &self.depth
    }

    pub fn eval(&self, x: &CantorPoint) -> &BigInt {
        &self.values[&point_prefix(&self.depth, x)]
    }

    /// Values on every cell of a deeper depth.
    fn lift(&self, to: &Depth) -> BTreeMap<Vec<u32>, BigInt> {
        self.values
            .iter()
            .flat_map(|(c, v)| lift_prefix(&self.depth, to, c).into_iter().map(move |d| (d, v.clone())))
            .collect()
    }

    fn combine(&self, other: &Self, op: impl Fn(&BigInt, &BigInt) -> BigInt) -> Self {
        let d = join(&self.depth, &other.depth);
        let a = self.lift(&d);
        let b = other.lift(&d);
        let values = a.iter().map(|(c, x)| (c.clone(), op(x, &b[c]))).collect();
        LCFunction { depth: d, values }.canonical()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a + b)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a * b)
    }

    pub fn neg(&self) -> Self {
        let values = self.values.iter().map(|(c, v)| (c.clone(), -v)).collect();
        LCFunction { depth: self.depth.clone(), values }
    }

    /// The clopen set where the function is nonzero.
    pub fn support(&self) -> Clopen {
        let prefixes: Vec<_> = self.values.iter().filter(|(_, v)| !v.is_zero()).map(|(c, _)| c.clone()).collect();
        let mut s = Clopen::empty();
        for c in prefixes {
            s = s.union(&Clopen::from_cell(&self.depth, c));
        }
        s
    }

    fn canonical(mut self) -> Self {
        loop {
            let mut changed = false;
            for (&p, &n) in self.depth.clone().iter() {
                let pos = segment_start(&self.depth, p) + n - 1;
                let mut parents: BTreeMap<Vec<u32>, Option<&BigInt>> = BTreeMap::new();
                let mut uniform = true;
                for (c, v) in &self.values {
                    let mut parent = c.clone();
                    parent.remove(pos);
                    match parents.entry(parent).or_insert(None) {
                        slot @ None => *slot = Some(v),
                        Some(w) if *w != v => {
                            uniform = false;
                            break;
                        }
                        _ => {}
                    }
                }
                if uniform {
                    let values = parents.into_iter().map(|(c, v)| (c, v.unwrap().clone())).collect();
                    self.values = values;
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

impl Clopen {
    pub(crate) fn from_cell(depth: &Depth, cell: Vec<u32>) -> Clopen {
        Clopen::from_parts(depth.clone(), [cell])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smooth::PrimeSet;

    fn cyl(digits: &[u32]) -> Clopen {
        Clopen::cylinder(&BTreeMap::from([(2, digits.to_vec())]), &PrimeSet::new(vec![2]).unwrap()).unwrap()
    }

    #[test]
    fn indicators_add_up() {
        let f = LCFunction::indicator(&cyl(&[0])).add(&LCFunction::indicator(&cyl(&[1])));
        assert_eq!(f, LCFunction::constant(1));
        assert!(f.depth().is_empty());
    }

    #[test]
    fn products_and_support() {
        let a = LCFunction::indicator(&cyl(&[0]));
        let b = LCFunction::indicator(&cyl(&[0, 1]));
        assert_eq!(a.mul(&b), b);
        assert_eq!(b.support(), cyl(&[0, 1]));
        assert_eq!(a.add(&a.neg()), LCFunction::zero());
        let x = CantorPoint::new(BTreeMap::from([(2, vec![0, 1])]), &PrimeSet::new(vec![2]).unwrap()).unwrap();
        assert_eq!(*a.add(&b).eval(&x), BigInt::from(2));
    }
}
