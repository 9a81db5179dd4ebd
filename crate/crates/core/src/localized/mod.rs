//! The filtered-colimit model of S⁻¹E over finite-dimensional vector spaces.
//!
//! An object `(V, m)` stands for `V/m`. A morphism `(V, m) → (W, n)` is
//! represented at a level `r` divisible by `m` and `n` by a matrix from
//! `(r/m)·V` to `(r/n)·W`. Refinement by `s` replaces a matrix by its
//! interleaved block-diagonal: copy `i` at level `rs` is replica `i mod s` of
//! copy `⌊i/s⌋` at level `r`.

mod div;
mod k0;

pub use div::{DivError, DivPresentation};
pub use k0::{k0_presentation, smith_normal_form, K0Presentation, SmithForm};

use serde::Serialize;
use thiserror::Error;

use crate::cantor::{coset_representatives, TorsionElement};
use crate::linalg::{Field, LinalgError, Matrix};
use crate::smooth::{PrimeSet, SRational, SmoothError, SmoothNumber};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocError {
    #[error(transparent)]
    Smooth(#[from] SmoothError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("cannot compose: target {0} differs from source {1}")]
    Boundary(LocObject, LocObject),
    #[error("level {level} is not a multiple of {needed}")]
    Level { level: u64, needed: u64 },
    #[error("matrix is {got:?}, expected {expected:?}")]
    Shape { got: (usize, usize), expected: (usize, usize) },
}

pub type Result<T> = std::result::Result<T, LocError>;

/// An additive base category with finite dimension data and matrix morphisms.
pub trait BaseCategory {
    type Object: Clone + PartialEq + std::fmt::Debug;
    type Morphism: Clone + PartialEq + std::fmt::Debug;

    fn zero_object(&self) -> Self::Object;
    fn dim(&self, x: &Self::Object) -> usize;
    fn dsum(&self, x: &Self::Object, y: &Self::Object) -> Self::Object;
    fn identity(&self, x: &Self::Object) -> Self::Morphism;
    fn compose(&self, g: &Self::Morphism, f: &Self::Morphism) -> Result<Self::Morphism>;
    fn rank(&self, f: &Self::Morphism) -> usize;

    fn is_iso(&self, f: &Self::Morphism, source: &Self::Object, target: &Self::Object) -> bool {
        let (d, e) = (self.dim(source), self.dim(target));
        d == e && self.rank(f) == d
    }
}

/// Finite-dimensional vector spaces over `F`, objects named by dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct FinVect<F: Field> {
    pub field: F,
}

impl<F: Field> BaseCategory for FinVect<F> {
    type Object = usize;
    type Morphism = Matrix<F>;

    fn zero_object(&self) -> usize {
        0
    }

    fn dim(&self, x: &usize) -> usize {
        *x
    }

    fn dsum(&self, x: &usize, y: &usize) -> usize {
        x + y
    }

    fn identity(&self, x: &usize) -> Matrix<F> {
        Matrix::identity(&self.field, *x)
    }

    fn compose(&self, g: &Matrix<F>, f: &Matrix<F>) -> Result<Matrix<F>> {
        Ok(g.mul(&self.field, f)?)
    }

    fn rank(&self, f: &Matrix<F>) -> usize {
        f.rank(&self.field)
    }
}

/// The object `V/m` with `dim V = dim`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LocObject {
    pub dim: usize,
    pub level: SmoothNumber,
}

impl std::fmt::Display for LocObject {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "k^{}/{}", self.dim, self.level)
    }
}

impl LocObject {
    /// `σ_m(V)`.
    pub fn sigma(dim: usize, level: SmoothNumber) -> Self {
        LocObject { dim, level }
    }

    pub fn refine(&self, s: &SmoothNumber) -> Result<Self> {
        Ok(LocObject { dim: self.dim * s.as_usize(), level: self.level.checked_mul(s)? })
    }

    /// `dim V / m` in lowest terms.
    pub fn rational_dim(&self) -> SRational {
        SRational::from_parts(self.dim as i64, &self.level)
    }

    /// Number of copies of `V` at level `r`.
    pub fn copies_at(&self, r: &SmoothNumber) -> Result<usize> {
        r.divides_by(&self.level)
            .map(|k| k.as_usize())
            .ok_or(LocError::Level { level: r.value(), needed: self.level.value() })
    }

    /// Total dimension at level `r`.
    pub fn size_at(&self, r: &SmoothNumber) -> Result<usize> {
        Ok(self.copies_at(r)? * self.dim)
    }
}

/// A morphism of S⁻¹E presented at a level.
#[derive(Debug, Clone, PartialEq)]
pub struct LocMorphism<F: Field> {
    pub source: LocObject,
    pub target: LocObject,
    pub level: SmoothNumber,
    pub matrix: Matrix<F>,
}

/// Interleaved block-diagonal refinement of a matrix with `bs×bc` blocks.
fn refine_blocks<F: Field>(field: &F, m: &Matrix<F>, block_rows: usize, block_cols: usize, s: usize) -> Matrix<F> {
    let (rows, cols) = m.shape();
    let mut out = Matrix::zeros(field, rows * s, cols * s);
    let (nr, nc) = (rows / block_rows.max(1), cols / block_cols.max(1));
    if block_rows == 0 || block_cols == 0 {
        return out;
    }
    for bi in 0..nr * s {
        for bj in 0..nc * s {
            if bi % s != bj % s {
                continue;
            }
            let blk = m.block((bi / s) * block_rows, (bj / s) * block_cols, block_rows, block_cols);
            out.set_block(bi * block_rows, bj * block_cols, &blk);
        }
    }
    out
}

/// The localized category over `FinVect<F>`.
#[derive(Debug, Clone, PartialEq)]
pub struct Localized<F: Field> {
    pub base: FinVect<F>,
    pub primes: PrimeSet,
}

impl<F: Field> Localized<F> {
    pub fn new(field: F, primes: PrimeSet) -> Self {
        Localized { base: FinVect { field }, primes }
    }

    pub fn field(&self) -> &F {
        &self.base.field
    }

    /// Builds a morphism after checking levels and shape.
    pub fn morphism(&self, source: LocObject, target: LocObject, level: SmoothNumber, matrix: Matrix<F>) -> Result<LocMorphism<F>> {
        let expected = (target.size_at(&level)?, source.size_at(&level)?);
        if matrix.shape() != expected {
            return Err(LocError::Shape { got: matrix.shape(), expected });
        }
        Ok(LocMorphism { source, target, level, matrix })
    }

    pub fn identity(&self, x: &LocObject) -> LocMorphism<F> {
        LocMorphism {
            source: x.clone(),
            target: x.clone(),
            level: x.level.clone(),
            matrix: self.base.identity(&x.dim),
        }
    }

    pub fn zero_morphism(&self, x: &LocObject, y: &LocObject) -> Result<LocMorphism<F>> {
        let level = x.level.lcm(&y.level)?;
        let matrix = Matrix::zeros(self.field(), y.size_at(&level)?, x.size_at(&level)?);
        Ok(self.normalize(&LocMorphism { source: x.clone(), target: y.clone(), level, matrix }))
    }

    /// Presents `f` at level `f.level · s`.
    pub fn refine(&self, f: &LocMorphism<F>, s: &SmoothNumber) -> Result<LocMorphism<F>> {
        let matrix = refine_blocks(self.field(), &f.matrix, f.target.dim, f.source.dim, s.as_usize());
        Ok(LocMorphism {
            source: f.source.clone(),
            target: f.target.clone(),
            level: f.level.checked_mul(s)?,
            matrix,
        })
    }

    /// Presents `f` at a level `r` divisible by `f.level`.
    pub fn refine_to(&self, f: &LocMorphism<F>, r: &SmoothNumber) -> Result<LocMorphism<F>> {
        let s = r.divides_by(&f.level).ok_or(LocError::Level { level: r.value(), needed: f.level.value() })?;
        self.refine(f, &s)
    }

    /// If `f` is the refinement by `p` of a morphism at level `r/p`, that morphism.
    fn descend(&self, f: &LocMorphism<F>, p: u64) -> Option<LocMorphism<F>> {
        let ps = SmoothNumber::prime_power(p, 1).ok()?;
        let lower = f.level.divides_by(&ps)?;
        // both objects must live at the lower level
        let (nr, nc) = (f.target.copies_at(&lower).ok()?, f.source.copies_at(&lower).ok()?);
        let (br, bc) = (f.target.dim, f.source.dim);
        let p = p as usize;
        let field = self.field();
        if br == 0 || bc == 0 {
            let matrix = Matrix::zeros(field, nr * br, nc * bc);
            return Some(LocMorphism { level: lower, matrix, ..f.clone() });
        }
        let mut g = Matrix::zeros(field, nr * br, nc * bc);
        for bi in 0..nr * p {
            for bj in 0..nc * p {
                let blk = f.matrix.block(bi * br, bj * bc, br, bc);
                if bi % p != bj % p {
                    if !blk.is_zero(field) {
                        return None;
                    }
                } else if bi % p == 0 {
                    g.set_block((bi / p) * br, (bj / p) * bc, &blk);
                } else if blk != f.matrix.block((bi - bi % p) * br, (bj - bj % p) * bc, br, bc) {
                    return None;
                }
            }
        }
        Some(LocMorphism { source: f.source.clone(), target: f.target.clone(), level: lower, matrix: g })
    }

    /// The representative at the least possible level.
    ///
    /// Descent by different primes commutes, so the greedy result is unique.
    pub fn normalize(&self, f: &LocMorphism<F>) -> LocMorphism<F> {
        let mut cur = f.clone();
        loop {
            let primes: Vec<u64> = cur.level.factorization().iter().map(|&(p, _)| p).collect();
            match primes.into_iter().find_map(|p| self.descend(&cur, p)) {
                Some(g) => cur = g,
                None => return cur,
            }
        }
    }

    /// Equality in the colimit.
    pub fn equal(&self, f: &LocMorphism<F>, g: &LocMorphism<F>) -> bool {
        self.normalize(f) == self.normalize(g)
    }

    /// `g ∘ f`.
    pub fn compose(&self, g: &LocMorphism<F>, f: &LocMorphism<F>) -> Result<LocMorphism<F>> {
        if f.target != g.source {
            return Err(LocError::Boundary(f.target.clone(), g.source.clone()));
        }
        let level = f.level.lcm(&g.level)?;
        let (fr, gr) = (self.refine_to(f, &level)?, self.refine_to(g, &level)?);
        let matrix = self.base.compose(&gr.matrix, &fr.matrix)?;
        Ok(self.normalize(&LocMorphism { source: f.source.clone(), target: g.target.clone(), level, matrix }))
    }

    pub fn add(&self, f: &LocMorphism<F>, g: &LocMorphism<F>) -> Result<LocMorphism<F>> {
        if f.source != g.source || f.target != g.target {
            return Err(LocError::Boundary(f.target.clone(), g.target.clone()));
        }
        let level = f.level.lcm(&g.level)?;
        let (fr, gr) = (self.refine_to(f, &level)?, self.refine_to(g, &level)?);
        let matrix = fr.matrix.add(self.field(), &gr.matrix)?;
        Ok(self.normalize(&LocMorphism { level, matrix, ..f.clone() }))
    }

    /// `X ⊕ Y`, presented at `lcm` of the levels.
    pub fn dsum_objects(&self, x: &LocObject, y: &LocObject) -> Result<LocObject> {
        let level = x.level.lcm(&y.level)?;
        Ok(LocObject { dim: x.size_at(&level)? + y.size_at(&level)?, level })
    }

    /// `f ⊕ g`.
    ///
    /// At level `r`, copy `c` of the sum object `U` (level `L`) contains
    /// V-copy `a`, which is copy `a·(r/L) + c` of `V` at level `r`.
    pub fn dsum(&self, f: &LocMorphism<F>, g: &LocMorphism<F>) -> Result<LocMorphism<F>> {
        let src = self.dsum_objects(&f.source, &g.source)?;
        let tgt = self.dsum_objects(&f.target, &g.target)?;
        let level = f.level.lcm(&g.level)?.lcm(&src.level)?.lcm(&tgt.level)?;
        let (fr, gr) = (self.refine_to(f, &level)?, self.refine_to(g, &level)?);
        let sx = src.copies_at(&level)?;
        let sy = tgt.copies_at(&level)?;
        // positions of (copy of the sum, summand, inner copy) in the big matrices
        let layout = |obj_a: &LocObject, obj_b: &LocObject, s: usize, sum: &LocObject| -> Result<Vec<(usize, usize)>> {
            // returns, for each basis vector of s·U, (which summand 0/1, index in that summand at level r)
            let (ca, cb) = (obj_a.copies_at(&sum.level)?, obj_b.copies_at(&sum.level)?);
            let mut out = Vec::with_capacity(s * sum.dim);
            for c in 0..s {
                for a in 0..ca {
                    for k in 0..obj_a.dim {
                        out.push((0, (a * s + c) * obj_a.dim + k));
                    }
                }
                for b in 0..cb {
                    for k in 0..obj_b.dim {
                        out.push((1, (b * s + c) * obj_b.dim + k));
                    }
                }
            }
            Ok(out)
        };
        let cols = layout(&f.source, &g.source, sx, &src)?;
        let rows = layout(&f.target, &g.target, sy, &tgt)?;
        let field = self.field();
        let matrix = Matrix::from_fn(rows.len(), cols.len(), |i, j| {
            let ((ri, r), (ci, c)) = (rows[i], cols[j]);
            match (ri, ci) {
                (0, 0) => fr.matrix.get(r, c).clone(),
                (1, 1) => gr.matrix.get(r, c).clone(),
                _ => field.zero(),
            }
        });
        Ok(self.normalize(&LocMorphism { source: src, target: tgt, level, matrix }))
    }

    /// `k · id_X`.
    pub fn mult_by_k(&self, x: &LocObject, k: &SmoothNumber) -> LocMorphism<F> {
        let field = self.field();
        LocMorphism {
            source: x.clone(),
            target: x.clone(),
            level: x.level.clone(),
            matrix: Matrix::scalar(field, x.dim, field.from_int(k.value() as i64)),
        }
    }

    pub fn is_iso(&self, f: &LocMorphism<F>) -> bool {
        match (f.source.size_at(&f.level), f.target.size_at(&f.level)) {
            (Ok(a), Ok(b)) => self.base.is_iso(&f.matrix, &a, &b),
            _ => false,
        }
    }

    pub fn inverse(&self, f: &LocMorphism<F>) -> Result<LocMorphism<F>> {
        let matrix = f.matrix.inverse(self.field())?;
        Ok(self.normalize(&LocMorphism {
            source: f.target.clone(),
            target: f.source.clone(),
            level: f.level.clone(),
            matrix,
        }))
    }

    /// An isomorphism `X → Y` presented at a level `<= bound`, if one exists.
    ///
    /// Candidate levels are the multiples of `lcm(level X, level Y)`. At each,
    /// the identity matrix is tried when the two sides have equal size and
    /// accepted once the base category confirms it is invertible.
    pub fn find_iso(&self, x: &LocObject, y: &LocObject, bound: u64) -> Result<Option<LocMorphism<F>>> {
        let l = x.level.lcm(&y.level)?;
        if l.value() > bound {
            return Ok(None);
        }
        for s in self.primes.smooth_up_to(bound / l.value()) {
            let r = l.checked_mul(&s)?;
            let (a, b) = (x.size_at(&r)?, y.size_at(&r)?);
            if a != b {
                continue;
            }
            let f = LocMorphism { source: x.clone(), target: y.clone(), level: r, matrix: self.base.identity(&a) };
            if self.is_iso(&f) {
                return Ok(Some(self.normalize(&f)));
            }
        }
        Ok(None)
    }

    /// Dimension of the Hom space presented at level `r`.
    pub fn hom_dim_at(&self, x: &LocObject, y: &LocObject, r: &SmoothNumber) -> Result<usize> {
        Ok(x.size_at(r)? * y.size_at(r)?)
    }

    /// The slot-`m` component of `X` as a truncated sum over `𝕋_S/C_m`.
    pub fn omega(&self, x: &LocObject, m: &SmoothNumber, truncation: usize) -> Result<FormalIndObject> {
        let dim = x.size_at(m)?;
        let summands = coset_representatives(&self.primes, m, truncation)
            .into_iter()
            .map(|coset| Summand { coset, dim })
            .collect();
        Ok(FormalIndObject { level: m.clone(), summands, truncated: true })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Summand {
    pub coset: TorsionElement,
    pub dim: usize,
}

/// A finite part of a countable direct sum indexed by `𝕋_S/C_level`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormalIndObject {
    pub level: SmoothNumber,
    pub summands: Vec<Summand>,
    pub truncated: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{PrimeField, Rationals};
    use num_rational::BigRational;

    fn cat23() -> Localized<Rationals> {
        Localized::new(Rationals, PrimeSet::new(vec![2, 3]).unwrap())
    }

    fn obj(c: &Localized<Rationals>, dim: usize, level: u64) -> LocObject {
        LocObject::sigma(dim, c.primes.smooth(level).unwrap())
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn dims() {
        let c = cat23();
        assert_eq!(obj(&c, 1, 1).rational_dim().to_string(), "1");
        assert_eq!(obj(&c, 3, 6).rational_dim().to_string(), "1/2");
        assert!(obj(&c, 0, 4).rational_dim().is_zero());
        let r = obj(&c, 1, 2).refine(&c.primes.smooth(3).unwrap()).unwrap();
        assert_eq!(r, obj(&c, 3, 6));
    }

    #[test]
    fn normalize_descends() {
        let c = cat23();
        let x = obj(&c, 1, 1);
        let g = c.morphism(x.clone(), x.clone(), SmoothNumber::one(), Matrix::from_fn(1, 1, |_, _| q(5))).unwrap();
        let up = c.refine(&g, &c.primes.smooth(6).unwrap()).unwrap();
        assert_eq!(up.matrix.shape(), (6, 6));
        assert_eq!(c.normalize(&up), g);
        // distinct blocks stay put
        let two = c.primes.smooth(2).unwrap();
        let d = Matrix::from_fn(2, 2, |i, j| if i == j { q(i as i64 + 1) } else { q(0) });
        let f = c.morphism(x.clone(), x, two, d).unwrap();
        assert_eq!(c.normalize(&f), f);
    }

    #[test]
    fn compose_at_mismatched_levels() {
        let c = cat23();
        let (x2, x3) = (obj(&c, 1, 2), obj(&c, 1, 3));
        let x6 = obj(&c, 1, 1);
        let f = c.identity(&x6);
        let f2 = c.refine(&f, &c.primes.smooth(2).unwrap()).unwrap();
        let f3 = c.refine(&f, &c.primes.smooth(3).unwrap()).unwrap();
        assert_eq!(c.compose(&f3, &f2).unwrap(), f);
        assert!(c.compose(&c.identity(&x2), &c.identity(&x3)).is_err());
    }

    #[test]
    fn dsum_of_identities() {
        let c = cat23();
        let (x, y) = (obj(&c, 1, 2), obj(&c, 2, 3));
        let s = c.dsum(&c.identity(&x), &c.identity(&y)).unwrap();
        let u = c.dsum_objects(&x, &y).unwrap();
        assert_eq!(s, c.identity(&u));
        let total = x.rational_dim().add(&y.rational_dim()).unwrap();
        assert_eq!(u.rational_dim(), total);
    }

    #[test]
    fn find_iso_examples() {
        let c = cat23();
        let iso = c.find_iso(&obj(&c, 1, 2), &obj(&c, 2, 4), 4).unwrap().unwrap();
        assert_eq!(iso.level.value(), 4);
        assert!(c.find_iso(&obj(&c, 1, 2), &obj(&c, 1, 3), 36).unwrap().is_none());
        let x = obj(&c, 2, 6);
        assert_eq!(c.find_iso(&x, &x, 6).unwrap().unwrap(), c.identity(&x));
    }

    #[test]
    fn mult_by_p_over_prime_field() {
        let c = Localized::new(PrimeField::new(2).unwrap(), PrimeSet::new(vec![2]).unwrap());
        let x = LocObject::sigma(2, SmoothNumber::one());
        assert!(!c.is_iso(&c.mult_by_k(&x, &c.primes.smooth(2).unwrap())));
        let r = cat23();
        let y = obj(&r, 2, 6);
        assert!(r.is_iso(&r.mult_by_k(&y, &r.primes.smooth(12).unwrap())));
    }

    #[test]
    fn omega_examples() {
        let c = Localized::new(Rationals, PrimeSet::new(vec![2]).unwrap());
        let two = c.primes.smooth(2).unwrap();
        let w = c.omega(&LocObject::sigma(1, two.clone()), &two, 3).unwrap();
        let cosets: Vec<String> = w.summands.iter().map(|s| s.coset.to_string()).collect();
        assert_eq!(cosets, ["0/1", "1/4", "1/8"]);
        assert!(w.summands.iter().all(|s| s.dim == 1));
        assert!(c.omega(&LocObject::sigma(1, two), &SmoothNumber::one(), 1).is_err());
        assert!(c.omega(&LocObject::sigma(1, SmoothNumber::one()), &SmoothNumber::one(), 0).unwrap().summands.is_empty());
    }
}
