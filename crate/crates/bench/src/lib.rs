//! Fixtures shared by the benchmarks.

use catdiv_core::{CantorPoint, LocObject, PrimeSet, SmoothNumber, TorsionElement};

pub fn primes(ps: &[u64]) -> PrimeSet {
    PrimeSet::new(ps.to_vec()).expect("valid primes")
}

pub fn object(s: &PrimeSet, dim: usize, level: u64) -> LocObject {
    LocObject::sigma(dim, s.smooth(level).expect("smooth level"))
}

/// A point with `depth` digits per prime, cycling through the digit range.
pub fn point(s: &PrimeSet, depth: usize) -> CantorPoint {
    let coords = s.primes().iter().map(|&p| (p, (0..depth).map(|i| (i as u64 % p) as u32).collect()));
    CantorPoint::new(coords.collect(), s).expect("valid point")
}

pub fn element(s: &PrimeSet, num: u64, den: u64) -> TorsionElement {
    let den: SmoothNumber = s.smooth(den).expect("smooth denominator");
    TorsionElement::from_parts(num, &den)
}
