//! Exact arithmetic for S-smooth numbers and for the localized integers S⁻¹ℤ.
//!
//! A [`SmoothNumber`] carries its factorization, so divisibility, `lcm` and
//! `gcd` are computed exponentwise. Values are stored as `u64` with checked
//! arithmetic: every smooth number in this crate eventually sizes a finite
//! set, so anything beyond `u64` could not be enumerated anyway. Numerators of
//! [`SRational`] are arbitrary precision.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmoothError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime set must be non-empty")]
    EmptyPrimeSet,
    #[error("{value} has prime factor {prime} outside S")]
    NotSmooth { value: u64, prime: u64 },
    #[error("smooth numbers are positive, got 0")]
    Zero,
    #[error("arithmetic overflow computing {0}")]
    Overflow(&'static str),
    #[error("{0} does not divide {1}")]
    NotDivisible(u64, u64),
    #[error("cannot parse prime set from {0:?}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, SmoothError>;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The session's effective set of primes S: non-empty, strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct PrimeSet(Vec<u64>);

impl PrimeSet {
    pub fn new(mut primes: Vec<u64>) -> Result<Self> {
        if primes.is_empty() {
            return Err(SmoothError::EmptyPrimeSet);
        }
        if let Some(&p) = primes.iter().find(|&&p| !is_prime(p)) {
            return Err(SmoothError::NotPrime(p));
        }
        primes.sort_unstable();
        primes.dedup();
        Ok(PrimeSet(primes))
    }

    /// All primes `<= bound`, the finite stand-in for "every prime".
    pub fn up_to(bound: u64) -> Result<Self> {
        Self::new((2..=bound).filter(|&n| is_prime(n)).collect())
    }

    /// Parses `"2,3,5"` or `"<=7"`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(b) = s.strip_prefix("<=") {
            let b = b.trim().parse().map_err(|_| SmoothError::Parse(s.into()))?;
            return Self::up_to(b);
        }
        let primes = s
            .split(',')
            .map(|t| t.trim().parse::<u64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| SmoothError::Parse(s.into()))?;
        Self::new(primes)
    }

    pub fn primes(&self) -> &[u64] {
        &self.0
    }

    pub fn contains(&self, p: u64) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    pub fn smooth(&self, value: u64) -> Result<SmoothNumber> {
        SmoothNumber::new(value, self)
    }

    /// All S-smooth numbers `<= bound`, increasing.
    pub fn smooth_up_to(&self, bound: u64) -> Vec<SmoothNumber> {
        let mut out = vec![SmoothNumber::one()];
        for &p in &self.0 {
            let mut next = Vec::new();
            for m in &out {
                let mut cur = m.clone();
                loop {
                    next.push(cur.clone());
                    match cur.value.checked_mul(p) {
                        Some(v) if v <= bound => cur = cur.mul_prime(p),
                        _ => break,
                    }
                }
            }
            out = next;
        }
        out.sort();
        out
    }
}

impl fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// A positive integer all of whose prime factors lie in S: an object of Φ_S.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SmoothNumber {
    value: u64,
    // (prime, exponent) with exponent > 0, sorted by prime
    exps: Vec<(u64, u32)>,
}

impl SmoothNumber {
    pub fn one() -> Self {
        SmoothNumber { value: 1, exps: Vec::new() }
    }

    pub fn new(value: u64, primes: &PrimeSet) -> Result<Self> {
        if value == 0 {
            return Err(SmoothError::Zero);
        }
        let mut rest = value;
        let mut exps = Vec::new();
        for &p in primes.primes() {
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            if e > 0 {
                exps.push((p, e));
            }
        }
        if rest != 1 {
            let prime = (2..=rest).find(|d| rest.is_multiple_of(*d)).unwrap_or(rest);
            return Err(SmoothError::NotSmooth { value, prime });
        }
        Ok(SmoothNumber { value, exps })
    }

    /// `p^e` for a prime `p` (not checked against any S).
    pub fn prime_power(p: u64, e: u32) -> Result<Self> {
        if e == 0 {
            return Ok(Self::one());
        }
        let value = p.checked_pow(e).ok_or(SmoothError::Overflow("prime power"))?;
        Ok(SmoothNumber { value, exps: vec![(p, e)] })
    }

    pub fn from_exponents(exps: impl IntoIterator<Item = (u64, u32)>) -> Result<Self> {
        let mut value = 1u64;
        let mut out = Vec::new();
        for (p, e) in exps {
            if e == 0 {
                continue;
            }
            let pe = p.checked_pow(e).ok_or(SmoothError::Overflow("prime power"))?;
            value = value.checked_mul(pe).ok_or(SmoothError::Overflow("product"))?;
            out.push((p, e));
        }
        out.sort_unstable();
        Ok(SmoothNumber { value, exps: out })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn as_usize(&self) -> usize {
        usize::try_from(self.value).expect("smooth number exceeds usize")
    }

    /// ν_p(m).
    pub fn nu(&self, p: u64) -> u32 {
        self.exps.iter().find(|(q, _)| *q == p).map_or(0, |&(_, e)| e)
    }

    pub fn factorization(&self) -> &[(u64, u32)] {
        &self.exps
    }

    pub fn is_one(&self) -> bool {
        self.value == 1
    }

    fn mul_prime(&self, p: u64) -> Self {
        let mut exps = self.exps.clone();
        match exps.iter_mut().find(|(q, _)| *q == p) {
            Some((_, e)) => *e += 1,
            None => {
                exps.push((p, 1));
                exps.sort_unstable();
            }
        }
        SmoothNumber { value: self.value * p, exps }
    }

    fn combine(&self, other: &Self, f: impl Fn(u32, u32) -> u32) -> Result<Self> {
        let mut primes: Vec<u64> = self.exps.iter().chain(&other.exps).map(|&(p, _)| p).collect();
        primes.sort_unstable();
        primes.dedup();
        Self::from_exponents(primes.into_iter().map(|p| (p, f(self.nu(p), other.nu(p)))))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a + b)
    }

    /// Returns `k` with `other = self * k`, if `self | other`.
    pub fn divides(&self, other: &Self) -> Option<Self> {
        if self.exps.iter().any(|&(p, e)| other.nu(p) < e) {
            return None;
        }
        self.combine(other, |a, b| b - a).ok()
    }

    /// `self / d`, if `d | self`.
    pub fn divides_by(&self, d: &Self) -> Option<Self> {
        d.divides(self)
    }

    /// `self / d`, failing unless `d | self`.
    pub fn div_exact(&self, d: &Self) -> Result<Self> {
        d.divides(self).ok_or(SmoothError::NotDivisible(d.value, self.value))
    }

    pub fn lcm(&self, other: &Self) -> Result<Self> {
        self.combine(other, u32::max)
    }

    pub fn gcd(&self, other: &Self) -> Self {
        self.combine(other, u32::min).expect("gcd never overflows")
    }

    /// All divisors, increasing.
    pub fn divisors(&self) -> Vec<SmoothNumber> {
        let mut out = vec![SmoothNumber::one()];
        for &(p, e) in &self.exps {
            let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
            for d in &out {
                let mut cur = d.clone();
                next.push(cur.clone());
                for _ in 0..e {
                    cur = cur.mul_prime(p);
                    next.push(cur.clone());
                }
            }
            out = next;
        }
        out.sort();
        out
    }
}

impl PartialOrd for SmoothNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SmoothNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.cmp(&other.value)
    }
}

impl fmt::Display for SmoothNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Serialize for SmoothNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u64(self.value)
    }
}

/// An element of S⁻¹ℤ in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SRational {
    num: BigInt,
    den: SmoothNumber,
}

impl SRational {
    pub fn zero() -> Self {
        SRational { num: BigInt::zero(), den: SmoothNumber::one() }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        SRational { num: n.into(), den: SmoothNumber::one() }
    }

    /// Builds `num/den` and reduces; rejects denominators that stay non-smooth after reduction.
    pub fn new(num: impl Into<BigInt>, den: u64, primes: &PrimeSet) -> Result<Self> {
        if den == 0 {
            return Err(SmoothError::Zero);
        }
        let num = num.into();
        let g = num.gcd(&BigInt::from(den));
        let g = if g.is_zero() { den } else { u64::try_from(g).expect("gcd divides den") };
        let den = den / g;
        let num = num / BigInt::from(g);
        let den = SmoothNumber::new(den, primes)?;
        Ok(SRational { num, den })
    }

    /// `num/den` with an already-smooth denominator.
    pub fn from_parts(num: impl Into<BigInt>, den: &SmoothNumber) -> Self {
        Self::reduced(num.into(), den.clone())
    }

    fn reduced(num: BigInt, den: SmoothNumber) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        // strip common prime factors; the gcd is itself smooth
        let mut exps = Vec::new();
        let mut num = num;
        for &(p, e) in den.factorization() {
            let bp = BigInt::from(p);
            let mut k = 0;
            while k < e && (&num % &bp).is_zero() {
                num /= &bp;
                k += 1;
            }
            if k > 0 {
                exps.push((p, k));
            }
        }
        let g = SmoothNumber::from_exponents(exps).expect("divisor of a smooth number");
        let den = den.div_exact(&g).expect("g | den");
        SRational { num, den }
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn denom(&self) -> &SmoothNumber {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let den = self.den.lcm(&other.den)?;
        let a = &self.num * BigInt::from(den.value() / self.den.value());
        let b = &other.num * BigInt::from(den.value() / other.den.value());
        Ok(Self::reduced(a + b, den))
    }

    pub fn neg(&self) -> Self {
        SRational { num: -&self.num, den: self.den.clone() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let den = self.den.checked_mul(&other.den)?;
        Ok(Self::reduced(&self.num * &other.num, den))
    }

    /// Multiplies by an integer.
    pub fn scale(&self, k: impl Into<BigInt>) -> Self {
        Self::reduced(&self.num * k.into(), self.den.clone())
    }

    /// Divides by a smooth number.
    pub fn div_smooth(&self, m: &SmoothNumber) -> Result<Self> {
        Ok(Self::reduced(self.num.clone(), self.den.checked_mul(m)?))
    }

    /// Is this an integer multiple of `1/m`?
    pub fn has_denominator_dividing(&self, m: &SmoothNumber) -> bool {
        self.den.divides(m).is_some()
    }
}

impl PartialOrd for SRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let l = &self.num * BigInt::from(other.den.value());
        let r = &other.num * BigInt::from(self.den.value());
        l.cmp(&r)
    }
}

impl fmt::Display for SRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl Serialize for SRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("SRational", 2)?;
        st.serialize_field("num", &IntWire(&self.num))?;
        st.serialize_field("den", &self.den.value())?;
        st.end()
    }
}

/// Serializes a `BigInt` as a plain JSON integer when it fits in 128 bits and
/// as a decimal string otherwise.
pub struct IntWire<'a>(pub &'a BigInt);

impl Serialize for IntWire<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_i128() {
            Some(v) => s.serialize_i128(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

/// `serialize_with` helpers for integer vectors.
pub mod int_wire {
    use num_bigint::BigInt;
    use serde::ser::{SerializeSeq, Serializer};

    use super::IntWire;

    pub fn vec<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&IntWire(x))?;
        }
        seq.end()
    }

    pub fn matrix<S: Serializer>(m: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        struct Row<'a>(&'a [BigInt]);
        impl serde::Serialize for Row<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                vec(self.0, s)
            }
        }
        let mut seq = s.serialize_seq(Some(m.len()))?;
        for r in m {
            seq.serialize_element(&Row(r))?;
        }
        seq.end()
    }
}

/// `a^{-1} mod m` for coprime `a`, `m`.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (g, x, _) = ext_gcd(a as i128 % m as i128, m as i128);
    (g == 1).then(|| x.rem_euclid(m as i128) as u64)
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a.abs(), a.signum(), 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}
