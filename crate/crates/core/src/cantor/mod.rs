//! The Cantor space Ω_S = ∏_{p∈S} Map(ℕ, ⟨p⟩) and the S-adic circle
//! 𝕋_S = S⁻¹ℤ/ℤ acting on it.
//!
//! Points have finite support: a digit array per prime followed by an implicit
//! zero tail. Digits are indexed from 1.
//!
//! An element `a/pⁿ` of 𝕋_p acts on the first `n` digits of the p-coordinate
//! only, by adding `a` to the number `Σ xᵢ·p^{n−i}` (digit 1 most significant)
//! modulo `pⁿ`. This is the encoding under which `a/pⁿ` and `pa/p^{n+1}` act
//! identically, so the actions of the finite groups `C_{pⁿ}` glue to 𝕋_p.

mod clopen;
mod lcf;

pub use clopen::{cells, Clopen, Depth, RawClopen};
pub use lcf::LCFunction;
pub(crate) use clopen::{point_prefix, prefix_point};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::smooth::{mod_inverse, PrimeSet, SmoothError, SmoothNumber};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CantorError {
    #[error(transparent)]
    Smooth(#[from] SmoothError),
    #[error("prime {0} is not in S")]
    UnknownPrime(u64),
    #[error("digit {digit} at position {pos} is not below {prime}")]
    Digit { prime: u64, pos: usize, digit: u32 },
    #[error("prefix {0:?} has the wrong length or digits for depth {1:?}")]
    Prefix(Vec<u32>, BTreeMap<u64, usize>),
    #[error("cannot parse {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, CantorError>;

/// An element `num/den` of 𝕋_S in reduced form, `0 <= num < den`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorsionElement {
    den: SmoothNumber,
    num: u64,
}

impl TorsionElement {
    pub fn zero() -> Self {
        TorsionElement { num: 0, den: SmoothNumber::one() }
    }

    /// Reduces `num/den` modulo 1; the denominator must be S-smooth.
    pub fn new(num: i64, den: u64, primes: &PrimeSet) -> Result<Self> {
        if den == 0 {
            return Err(SmoothError::Zero.into());
        }
        let den_s = SmoothNumber::new(den, primes)?;
        Ok(Self::from_parts(num.rem_euclid(den as i64) as u64, &den_s))
    }

    /// `num/den mod 1` for an already-smooth denominator.
    pub fn from_parts(num: u64, den: &SmoothNumber) -> Self {
        let d = den.value();
        let num = num % d;
        if num == 0 {
            return Self::zero();
        }
        let g = num.gcd(&d);
        let g_s = SmoothNumber::from_exponents(
            den.factorization().iter().map(|&(p, e)| {
                let mut k = 0;
                let mut gg = g;
                while k < e && gg.is_multiple_of(p) {
                    gg /= p;
                    k += 1;
                }
                (p, k)
            }),
        )
        .expect("divisor of a smooth number");
        TorsionElement { num: num / g, den: den.div_exact(&g_s).expect("g | den") }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> &SmoothNumber {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let den = self.den.lcm(&other.den)?;
        let d = den.value() as u128;
        let a = self.num as u128 * (d / self.den.value() as u128);
        let b = other.num as u128 * (d / other.den.value() as u128);
        Ok(Self::from_parts(((a + b) % d) as u64, &den))
    }

    pub fn neg(&self) -> Self {
        if self.num == 0 {
            return self.clone();
        }
        TorsionElement { num: self.den.value() - self.num, den: self.den.clone() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// `k·t`.
    pub fn times(&self, k: u64) -> Self {
        let d = self.den.value() as u128;
        Self::from_parts(((self.num as u128 * k as u128) % d) as u64, &self.den)
    }

    /// Membership in the cyclic subgroup `C_m = (1/m)ℤ/ℤ`.
    pub fn in_subgroup(&self, m: &SmoothNumber) -> bool {
        self.den.divides(m).is_some()
    }

    /// The p-primary components `(p, a, n)` with `t = Σ a/pⁿ mod 1`.
    pub fn components(&self) -> Vec<(u64, u64, u32)> {
        let d = self.den.value();
        self.den
            .factorization()
            .iter()
            .map(|&(p, e)| {
                let q = p.pow(e);
                let rest = d / q;
                let inv = mod_inverse(rest % q, q).expect("coprime parts");
                let a = ((self.num as u128 % q as u128) * inv as u128 % q as u128) as u64;
                (p, a, e)
            })
            .collect()
    }
}

impl fmt::Display for TorsionElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl Serialize for TorsionElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("TorsionElement", 2)?;
        st.serialize_field("num", &self.num)?;
        st.serialize_field("den", &self.den.value())?;
        st.end()
    }
}

/// Wire form of a torsion element before validation against S.
#[derive(Debug, Clone, Deserialize)]
pub struct RawTorsion {
    pub num: i64,
    pub den: u64,
}

impl RawTorsion {
    pub fn validate(&self, primes: &PrimeSet) -> Result<TorsionElement> {
        TorsionElement::new(self.num, self.den, primes)
    }
}

/// Parses `"a/b"` or `"a"`.
pub fn parse_torsion(s: &str, primes: &PrimeSet) -> Result<TorsionElement> {
    let bad = || CantorError::Parse(s.to_string());
    match s.split_once('/') {
        Some((a, b)) => TorsionElement::new(
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
            primes,
        ),
        None => TorsionElement::new(s.trim().parse().map_err(|_| bad())?, 1, primes),
    }
}

/// A finite-support point of Ω_S.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CantorPoint {
    // trimmed digit arrays; primes with all-zero coordinates are absent
    digits: BTreeMap<u64, Vec<u32>>,
}

impl CantorPoint {
    pub fn zero() -> Self {
        CantorPoint { digits: BTreeMap::new() }
    }

    pub fn new(digits: BTreeMap<u64, Vec<u32>>, primes: &PrimeSet) -> Result<Self> {
        for (&p, ds) in &digits {
            if !primes.contains(p) {
                return Err(CantorError::UnknownPrime(p));
            }
            if let Some((i, &d)) = ds.iter().enumerate().find(|(_, &d)| d as u64 >= p) {
                return Err(CantorError::Digit { prime: p, pos: i + 1, digit: d });
            }
        }
        Ok(Self::trimmed(digits))
    }

    fn trimmed(mut digits: BTreeMap<u64, Vec<u32>>) -> Self {
        for ds in digits.values_mut() {
            while ds.last() == Some(&0) {
                ds.pop();
            }
        }
        digits.retain(|_, ds| !ds.is_empty());
        CantorPoint { digits }
    }

    /// `x_i` for the p-coordinate, 1-based.
    pub fn digit(&self, p: u64, i: usize) -> u32 {
        assert!(i >= 1, "digits are 1-based");
        self.digits.get(&p).and_then(|ds| ds.get(i - 1)).copied().unwrap_or(0)
    }

    /// The stored (trimmed) digits of the p-coordinate.
    pub fn digits(&self, p: u64) -> &[u32] {
        self.digits.get(&p).map_or(&[], Vec::as_slice)
    }

    pub fn coordinates(&self) -> &BTreeMap<u64, Vec<u32>> {
        &self.digits
    }

    /// Number of digits up to the last nonzero one.
    pub fn support_depth(&self, p: u64) -> usize {
        self.digits(p).len()
    }

    /// First `n` digits of the p-coordinate, zero padded.
    pub fn prefix(&self, p: u64, n: usize) -> Vec<u32> {
        (1..=n).map(|i| self.digit(p, i)).collect()
    }

    fn with_coordinate(&self, p: u64, ds: Vec<u32>) -> Self {
        let mut digits = self.digits.clone();
        digits.insert(p, ds);
        Self::trimmed(digits)
    }
}

impl Serialize for CantorPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(self.digits.len()))?;
        for (p, ds) in &self.digits {
            m.serialize_entry(&p.to_string(), ds)?;
        }
        m.end()
    }
}

/// Wire form of a point before validation against S.
#[derive(Debug, Clone, Deserialize)]
#[serde(transparent)]
pub struct RawPoint(pub BTreeMap<String, Vec<u32>>);

impl RawPoint {
    pub fn validate(&self, primes: &PrimeSet) -> Result<CantorPoint> {
        let mut digits = BTreeMap::new();
        for (k, v) in &self.0 {
            let p = k.parse().map_err(|_| CantorError::Parse(format!("prime key {k:?}")))?;
            digits.insert(p, v.clone());
        }
        CantorPoint::new(digits, primes)
    }
}

/// How an element `a/pⁿ` acts on the first `n` digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActionEncoding {
    /// digit 1 is the most significant; the action in use
    #[default]
    MostSignificantFirst,
    /// digit 1 is the least significant; a negative control that breaks the
    /// compatibility of `a/pⁿ` with `pa/p^{n+1}`
    LeastSignificantFirst,
}

fn base_p_digits(mut a: u64, p: u64, n: usize) -> Vec<u32> {
    // least significant first
    let mut out = vec![0u32; n];
    for d in out.iter_mut() {
        *d = (a % p) as u32;
        a /= p;
    }
    out
}

/// Adds `a` to the block `x₁…xₙ` of one coordinate.
fn add_block(ds: &[u32], p: u64, a: u64, n: usize, enc: ActionEncoding) -> Vec<u32> {
    let mut out: Vec<u32> = (1..=n.max(ds.len())).map(|i| ds.get(i - 1).copied().unwrap_or(0)).collect();
    let add = base_p_digits(a, p, n);
    let positions: Vec<usize> = match enc {
        ActionEncoding::MostSignificantFirst => (0..n).rev().collect(),
        ActionEncoding::LeastSignificantFirst => (0..n).collect(),
    };
    let mut carry = 0u64;
    for (k, &pos) in positions.iter().enumerate() {
        let s = out[pos] as u64 + add[k] as u64 + carry;
        out[pos] = (s % p) as u32;
        carry = s / p;
    }
    out
}

/// `t · x`.
pub fn act(t: &TorsionElement, x: &CantorPoint) -> CantorPoint {
    act_with(ActionEncoding::MostSignificantFirst, t, x)
}

pub fn act_with(enc: ActionEncoding, t: &TorsionElement, x: &CantorPoint) -> CantorPoint {
    let mut y = x.clone();
    for (p, a, n) in t.components() {
        let ds = add_block(x.digits(p), p, a, n as usize, enc);
        y = y.with_coordinate(p, ds);
    }
    y
}

/// The unreduced action of `a/pⁿ` on the p-coordinate.
///
/// [`act`] always reduces `t` first, so the law `a/pⁿ = pa/p^{n+1}` can
/// only be observed through this function.
pub fn act_component(enc: ActionEncoding, p: u64, a: u64, n: usize, x: &CantorPoint) -> CantorPoint {
    x.with_coordinate(p, add_block(x.digits(p), p, a, n, enc))
}

/// Multiplication by `m`: shift each p-coordinate up by `ν_p(m)`.
pub fn mult(m: &SmoothNumber, x: &CantorPoint) -> CantorPoint {
    let mut y = x.clone();
    for &(p, e) in m.factorization() {
        if x.digits(p).is_empty() {
            continue;
        }
        let mut ds = vec![0; e as usize];
        ds.extend_from_slice(x.digits(p));
        y = y.with_coordinate(p, ds);
    }
    y
}

/// `f_m`: zero the first `ν_p(m)` digits of each p-coordinate.
pub fn f(m: &SmoothNumber, x: &CantorPoint) -> CantorPoint {
    let mut y = x.clone();
    for &(p, e) in m.factorization() {
        let mut ds = x.digits(p).to_vec();
        for d in ds.iter_mut().take(e as usize) {
            *d = 0;
        }
        y = y.with_coordinate(p, ds);
    }
    y
}

/// `(x, y) ∈ R_m`.
pub fn related(m: &SmoothNumber, x: &CantorPoint, y: &CantorPoint) -> bool {
    f(m, x) == f(m, y)
}

/// Certificate that `y = t·x` and `f_level(x) = f_level(y)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitWitness {
    pub t: TorsionElement,
    pub level: SmoothNumber,
}

impl OrbitWitness {
    pub fn verify(&self, x: &CantorPoint, y: &CantorPoint) -> bool {
        act(&self.t, x) == *y && related(&self.level, x, y) && self.t.in_subgroup(&self.level)
    }
}

fn block_value(ds: &[u32], p: u64, n: usize) -> u128 {
    (1..=n).fold(0u128, |acc, i| acc * p as u128 + ds.get(i - 1).copied().unwrap_or(0) as u128)
}

/// Decides whether `x` and `y` share a 𝕋_S-orbit.
///
/// The returned level is the least `m` with `f_m(x) = f_m(y)`: per prime, the
/// last position where the coordinates differ. For finite-support points this
/// always exists, so `None` only arises through [`same_orbit_bounded`].
pub fn same_orbit(x: &CantorPoint, y: &CantorPoint) -> Result<Option<OrbitWitness>> {
    let primes: BTreeSet<u64> = x.digits.keys().chain(y.digits.keys()).copied().collect();
    let mut level_exps = Vec::new();
    let mut parts = Vec::new();
    for p in primes {
        let (dx, dy) = (x.digits(p), y.digits(p));
        let n = (0..dx.len().max(dy.len()))
            .rev()
            .find(|&i| dx.get(i) != dy.get(i))
            .map_or(0, |i| i + 1);
        if n == 0 {
            continue;
        }
        let q = (p as u128).checked_pow(n as u32).filter(|&q| q <= u64::MAX as u128);
        let q = q.ok_or(SmoothError::Overflow("orbit level"))?;
        let a = (block_value(dy, p, n) + q - block_value(dx, p, n)) % q;
        level_exps.push((p, n as u32));
        parts.push((a as u64, SmoothNumber::prime_power(p, n as u32)?));
    }
    let level = SmoothNumber::from_exponents(level_exps)?;
    let mut t = TorsionElement::zero();
    for (a, q) in parts {
        t = t.add(&TorsionElement::from_parts(a, &q))?;
    }
    Ok(Some(OrbitWitness { t, level }))
}

/// As [`same_orbit`], but only levels `<= bound` count.
pub fn same_orbit_bounded(x: &CantorPoint, y: &CantorPoint, bound: u64) -> Result<Option<OrbitWitness>> {
    Ok(same_orbit(x, y)?.filter(|w| w.level.value() <= bound))
}

/// Elements of 𝕋_S by increasing denominator, then increasing numerator.
pub fn torsion_elements(primes: &PrimeSet) -> impl Iterator<Item = TorsionElement> + '_ {
    (1u64..)
        .filter_map(move |q| SmoothNumber::new(q, primes).ok())
        .flat_map(|q| {
            let qv = q.value();
            (0..qv)
                .filter(move |&a| if qv == 1 { true } else { a.gcd(&qv) == 1 })
                .map(move |a| TorsionElement { num: a, den: q.clone() })
        })
}

/// The first `count` cosets of `𝕋_S/C_m`, each named by its first representative
/// in [`torsion_elements`] order.
pub fn coset_representatives(primes: &PrimeSet, m: &SmoothNumber, count: usize) -> Vec<TorsionElement> {
    let mut seen = BTreeSet::new();
    torsion_elements(primes)
        .filter(|t| seen.insert(t.times(m.value())))
        .take(count)
        .collect()
}
