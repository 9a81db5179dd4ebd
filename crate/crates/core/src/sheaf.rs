//! 𝕋_S-equivariant sheaves on Ω_S at finite depth.
//!
//! At depth `d` every prime gets `d` digits, so the cells are the depth-`d`
//! prefixes and `R = ∏ p^d`. The group `C_R` acts on cells freely and
//! transitively; cell `a` is the prefix of `(a/R)·0`. The generator `V/m`
//! (for `m | R`) is modelled by the stalk `⊕_{j ∈ ℤ/(R/m)} V` over every cell,
//! summand `j` carrying the coset of `j/R` in `C_R/C_m`, so `a/R` sends summand
//! `j` to `j + a`.
//!
//! A map `V/m → W/n` is a kernel: one `(R/n)·dim W × (R/m)·dim V` block matrix
//! per cell, subject to `K(a+b) = P_n(b)·K(a)·P_m(b)⁻¹`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::cantor::{act, point_prefix, prefix_point, torsion_elements, CantorPoint, Clopen, Depth, TorsionElement};
use crate::linalg::{Field, LinalgError, Matrix};
use crate::localized::{LocError, LocMorphism, LocObject, Localized};
use crate::smooth::{PrimeSet, SRational, SmoothError, SmoothNumber};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SheafError {
    #[error(transparent)]
    Smooth(#[from] SmoothError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Loc(#[from] LocError),
    #[error("depth {depth} does not resolve level {level}")]
    Unresolved { depth: usize, level: u64 },
    #[error("{0} is not in C_R at depth {1}")]
    NotVisible(TorsionElement, usize),
    #[error("maps do not compose: {0}")]
    Mismatch(String),
    #[error("sections disagree on the overlap")]
    Overlap,
}

pub type Result<T> = std::result::Result<T, SheafError>;

/// The generator `V/m`, or a formal sum of generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct EqSheaf {
    pub summands: Vec<LocObject>,
}

impl EqSheaf {
    pub fn induce(dim: usize, level: SmoothNumber) -> Self {
        EqSheaf { summands: vec![LocObject { dim, level }] }
    }

    pub fn sum(&self, other: &Self) -> Self {
        EqSheaf { summands: self.summands.iter().chain(&other.summands).cloned().collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.summands.iter().all(|x| x.dim == 0)
    }

    /// Class in S⁻¹ℤ: `Σ dim V / m`.
    pub fn dim(&self) -> SRational {
        self.summands.iter().fold(SRational::zero(), |acc, x| {
            acc.add(&x.rational_dim()).expect("sum of S-rationals")
        })
    }
}

/// The cell decomposition at a uniform depth.
#[derive(Debug, Clone)]
pub struct Resolution {
    pub depth: usize,
    pub r: SmoothNumber,
    digit_depth: Depth,
    /// prefix of cell `a`
    prefixes: Vec<Vec<u32>>,
    index: BTreeMap<Vec<u32>, usize>,
}

impl Resolution {
    pub fn new(primes: &PrimeSet, depth: usize) -> Result<Self> {
        let r = SmoothNumber::from_exponents(primes.primes().iter().map(|&p| (p, depth as u32)))?;
        let digit_depth: Depth = primes.primes().iter().map(|&p| (p, depth)).filter(|_| depth > 0).collect();
        let prefixes: Vec<Vec<u32>> = (0..r.value())
            .map(|a| {
                point_prefix(&digit_depth, &act(&TorsionElement::from_parts(a, &r), &CantorPoint::zero()))
            })
            .collect();
        let index = prefixes.iter().enumerate().map(|(a, c)| (c.clone(), a)).collect();
        Ok(Resolution { depth, r, digit_depth, prefixes, index })
    }

    /// Least depth whose `R` is divisible by every given level.
    pub fn separating(primes: &PrimeSet, levels: &[&SmoothNumber]) -> Result<Self> {
        let depth = levels
            .iter()
            .flat_map(|l| l.factorization().iter().map(|&(_, e)| e as usize))
            .max()
            .unwrap_or(0);
        Self::new(primes, depth)
    }

    pub fn cell_count(&self) -> usize {
        self.prefixes.len()
    }

    pub fn prefix(&self, a: usize) -> &[u32] {
        &self.prefixes[a]
    }

    pub fn cell_of(&self, prefix: &[u32]) -> Option<usize> {
        self.index.get(prefix).copied()
    }

    pub fn digit_depth(&self) -> &Depth {
        &self.digit_depth
    }

    /// Number of summands of `V/m` over a cell.
    pub fn cosets(&self, m: &SmoothNumber) -> Result<usize> {
        self.r
            .divides_by(m)
            .map(|k| k.as_usize())
            .ok_or(SheafError::Unresolved { depth: self.depth, level: m.value() })
    }

    /// `a` with `t = a/R`, if `t ∈ C_R`.
    pub fn coordinate(&self, t: &TorsionElement) -> Result<usize> {
        let k = self.r.divides_by(t.den()).ok_or(SheafError::NotVisible(t.clone(), self.depth))?;
        Ok((t.num() * k.value()) as usize)
    }

    /// The cells of `U`, which must be no deeper than this resolution.
    pub fn cells_of(&self, u: &Clopen) -> Vec<usize> {
        let mut out: Vec<usize> =
            u.lift(&self.digit_depth).iter().filter_map(|c| self.cell_of(c)).collect();
        out.sort_unstable();
        out
    }
}

/// Permutation of `(cell, summand)` pairs of `V/m` induced by `a/R`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SheafTranslation {
    pub depth: usize,
    /// `perm[a·(R/m) + j]` is the image pair, flattened the same way
    pub perm: Vec<usize>,
}

impl SheafTranslation {
    pub fn then(&self, next: &Self) -> Self {
        SheafTranslation { depth: self.depth, perm: self.perm.iter().map(|&i| next.perm[i]).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &j)| i == j)
    }
}

/// A map between generators at a fixed depth.
#[derive(Debug, Clone, PartialEq)]
pub struct EqSheafMap<F: Field> {
    pub source: LocObject,
    pub target: LocObject,
    pub depth: usize,
    /// kernel block matrix over cell `a`
    pub blocks: Vec<Matrix<F>>,
}

/// The Hom space between two sheaves at a depth, with its stabilization
/// certificate against the next depth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomSpace {
    pub depth: usize,
    pub dim: usize,
    pub orbits: usize,
    /// `dim / R²`
    pub normalized_dim: SRational,
    pub next_dim: usize,
    pub next_normalized_dim: SRational,
    /// the refinement into the next depth is injective
    pub refinement_injective: bool,
    pub stabilized: bool,
}

/// Sections of a generator over a clopen set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SectionSpace {
    pub depth: usize,
    pub cells: Vec<Vec<u32>>,
    pub cosets: Vec<TorsionElement>,
    pub stalk_dim: usize,
    pub dim: usize,
    pub truncated: bool,
}

/// A concrete section: a vector in `V` for each (cell, coset) in range.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionDatum<F: Field> {
    pub depth: usize,
    pub cosets: Vec<TorsionElement>,
    pub values: BTreeMap<Vec<u32>, Vec<Vec<F::Elem>>>,
}

impl<F: Field> SectionDatum<F> {
    pub fn domain(&self) -> BTreeSet<Vec<u32>> {
        self.values.keys().cloned().collect()
    }

    pub fn restrict(&self, cells: &BTreeSet<Vec<u32>>) -> Self {
        let values = self.values.iter().filter(|(c, _)| cells.contains(*c)).map(|(c, v)| (c.clone(), v.clone())).collect();
        SectionDatum { depth: self.depth, cosets: self.cosets.clone(), values }
    }

    /// Glues two sections that agree where both are defined.
    pub fn glue(&self, other: &Self) -> Result<Self> {
        if self.depth != other.depth || self.cosets != other.cosets {
            return Err(SheafError::Mismatch("sections at different depths or coset ranges".into()));
        }
        let mut values = self.values.clone();
        for (c, v) in &other.values {
            match values.get(c) {
                Some(w) if w != v => return Err(SheafError::Overlap),
                _ => {
                    values.insert(c.clone(), v.clone());
                }
            }
        }
        Ok(SectionDatum { depth: self.depth, cosets: self.cosets.clone(), values })
    }
}

/// Equivariant sheaves over `FinVect<F>`, compared against the localized model.
#[derive(Debug, Clone)]
pub struct Sheaves<F: Field> {
    pub loc: Localized<F>,
}

fn block_perm<F: Field>(field: &F, copies: usize, dim: usize, shift: usize) -> Matrix<F> {
    // basis vector (j, k) goes to (j + shift, k)
    let n = copies * dim;
    let mut p = Matrix::zeros(field, n, n);
    for j in 0..copies {
        for k in 0..dim {
            p.set(((j + shift) % copies) * dim + k, j * dim + k, field.one());
        }
    }
    p
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut i = i;
        while self.0[i] != r {
            let next = self.0[i];
            self.0[i] = r;
            i = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl<F: Field> Sheaves<F> {
    pub fn new(field: F, primes: PrimeSet) -> Self {
        Sheaves { loc: Localized::new(field, primes) }
    }

    pub fn primes(&self) -> &PrimeSet {
        &self.loc.primes
    }

    pub fn field(&self) -> &F {
        self.loc.field()
    }

    pub fn resolution(&self, depth: usize) -> Result<Resolution> {
        Resolution::new(self.primes(), depth)
    }

    /// `V/m` on objects.
    pub fn psi_object(&self, x: &LocObject) -> EqSheaf {
        EqSheaf::induce(x.dim, x.level.clone())
    }

    /// Number of equivariant kernels `V/m → W/n` at a depth, counted as
    /// orbits of `C_R` on (cell, target summand, source summand) triples.
    pub fn count_orbits(&self, res: &Resolution, x: &LocObject, y: &LocObject) -> Result<usize> {
        let (cm, cn) = (res.cosets(&x.level)?, res.cosets(&y.level)?);
        let r = res.cell_count();
        let idx = |a: usize, h: usize, g: usize| (a * cn + h) * cm + g;
        let mut uf = UnionFind((0..r * cn * cm).collect());
        // C_R is cyclic on 1/R
        for a in 0..r {
            for h in 0..cn {
                for g in 0..cm {
                    uf.union(idx(a, h, g), idx((a + 1) % r, (h + 1) % cn, (g + 1) % cm));
                }
            }
        }
        let mut roots = BTreeSet::new();
        for i in 0..r * cn * cm {
            roots.insert(uf.find(i));
        }
        Ok(roots.len())
    }

    fn hom_dim_generators(&self, res: &Resolution, x: &LocObject, y: &LocObject) -> Result<(usize, usize)> {
        let orbits = self.count_orbits(res, x, y)?;
        Ok((orbits, orbits * x.dim * y.dim))
    }

    /// Whether the refinement of kernels from depth `d` to `d+1` is injective.
    ///
    /// An equivariant kernel is fixed by its block over cell 0, and the
    /// refinement interleaves that block. The images of elementary blocks are
    /// checked to have nonempty, pairwise disjoint supports.
    fn refinement_injective(&self, res: &Resolution, next: &Resolution, x: &LocObject, y: &LocObject) -> Result<bool> {
        let s = next.r.divides_by(&res.r).expect("deeper resolution").as_usize();
        let (cm, cn) = (res.cosets(&x.level)?, res.cosets(&y.level)?);
        let mut seen = BTreeSet::new();
        for i in 0..cn * y.dim {
            for j in 0..cm * x.dim {
                let (bi, ki) = (i / y.dim.max(1), i % y.dim.max(1));
                let (bj, kj) = (j / x.dim.max(1), j % x.dim.max(1));
                for e in 0..s {
                    let row = (bi * s + e) * y.dim + ki;
                    let col = (bj * s + e) * x.dim + kj;
                    if !seen.insert((row, col)) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(s > 0)
    }

    /// The Hom space between two sheaves at `depth`.
    pub fn sheaf_hom(&self, f: &EqSheaf, g: &EqSheaf, depth: usize) -> Result<HomSpace> {
        let res = self.resolution(depth)?;
        let next = self.resolution(depth + 1)?;
        let (mut dim, mut orbits, mut next_dim, mut injective) = (0, 0, 0, true);
        for x in &f.summands {
            for y in &g.summands {
                let (o, d) = self.hom_dim_generators(&res, x, y)?;
                orbits += o;
                dim += d;
                next_dim += self.hom_dim_generators(&next, x, y)?.1;
                injective &= self.refinement_injective(&res, &next, x, y)?;
            }
        }
        let r2 = res.r.checked_mul(&res.r)?;
        let n2 = next.r.checked_mul(&next.r)?;
        let normalized_dim = SRational::from_parts(dim as i64, &r2);
        let next_normalized_dim = SRational::from_parts(next_dim as i64, &n2);
        Ok(HomSpace {
            depth,
            dim,
            orbits,
            stabilized: injective && normalized_dim == next_normalized_dim,
            normalized_dim,
            next_dim,
            next_normalized_dim,
            refinement_injective: injective,
        })
    }

    /// `Ψ(f)` at `depth`: `f` refined to level `R`, placed over cell 0 and
    /// spread by equivariance.
    pub fn psi(&self, f: &LocMorphism<F>, depth: usize) -> Result<EqSheafMap<F>> {
        let res = self.resolution(depth)?;
        let fr = self.loc.refine_to(f, &res.r).map_err(|_| SheafError::Unresolved { depth, level: f.level.value() })?;
        self.spread(&res, &f.source, &f.target, &fr.matrix)
    }

    fn spread(&self, res: &Resolution, x: &LocObject, y: &LocObject, k0: &Matrix<F>) -> Result<EqSheafMap<F>> {
        let field = self.field();
        let (cm, cn) = (res.cosets(&x.level)?, res.cosets(&y.level)?);
        let blocks = (0..res.cell_count())
            .map(|a| {
                let pn = block_perm(field, cn, y.dim, a % cn.max(1));
                let pm_inv = block_perm(field, cm, x.dim, (cm - a % cm) % cm);
                pn.mul(field, k0).and_then(|m| m.mul(field, &pm_inv))
            })
            .collect::<std::result::Result<_, _>>()?;
        Ok(EqSheafMap { source: x.clone(), target: y.clone(), depth: res.depth, blocks })
    }

    pub fn identity(&self, x: &LocObject, depth: usize) -> Result<EqSheafMap<F>> {
        self.psi(&self.loc.identity(x), depth)
    }

    /// Checks `K(a+1) = P_n(1)·K(a)·P_m(1)⁻¹` for every cell.
    pub fn is_equivariant(&self, k: &EqSheafMap<F>) -> Result<bool> {
        let res = self.resolution(k.depth)?;
        let field = self.field();
        let (cm, cn) = (res.cosets(&k.source.level)?, res.cosets(&k.target.level)?);
        let pn = block_perm(field, cn, k.target.dim, 1 % cn);
        let pm_inv = block_perm(field, cm, k.source.dim, (cm - 1 % cm) % cm);
        let r = res.cell_count();
        for a in 0..r {
            let moved = pn.mul(field, &k.blocks[a])?.mul(field, &pm_inv)?;
            if moved != k.blocks[(a + 1) % r] {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Cellwise composite `g ∘ f`.
    pub fn compose(&self, g: &EqSheafMap<F>, f: &EqSheafMap<F>) -> Result<EqSheafMap<F>> {
        if f.target != g.source || f.depth != g.depth {
            return Err(SheafError::Mismatch(format!("{} at depth {} vs {} at depth {}", f.target, f.depth, g.source, g.depth)));
        }
        let field = self.field();
        let blocks = g.blocks.iter().zip(&f.blocks).map(|(b, a)| b.mul(field, a)).collect::<std::result::Result<_, _>>()?;
        Ok(EqSheafMap { source: f.source.clone(), target: g.target.clone(), depth: f.depth, blocks })
    }

    /// Invertibility detected on stalks: every cell's block is invertible.
    pub fn is_invertible(&self, k: &EqSheafMap<F>) -> bool {
        k.blocks.iter().all(|b| b.rows() == b.cols() && b.is_invertible(self.field()))
    }

    /// The cellwise inverse, which is again equivariant.
    pub fn inverse(&self, k: &EqSheafMap<F>) -> Result<EqSheafMap<F>> {
        let field = self.field();
        let blocks = k.blocks.iter().map(|b| b.inverse(field)).collect::<std::result::Result<_, _>>()?;
        Ok(EqSheafMap { source: k.target.clone(), target: k.source.clone(), depth: k.depth, blocks })
    }

    /// The action of `t ∈ C_R` on `V/m` at `depth`, as a permutation of
    /// (cell, summand) pairs.
    pub fn translate_sheaf(&self, t: &TorsionElement, x: &LocObject, depth: usize) -> Result<SheafTranslation> {
        let res = self.resolution(depth)?;
        let b = res.coordinate(t)?;
        let cm = res.cosets(&x.level)?;
        let r = res.cell_count();
        // cell a goes to the cell of t·(prefix of a), which is a + b
        let perm = (0..r)
            .flat_map(|a| {
                let img = act(t, &prefix_point(res.digit_depth(), res.prefix(a)));
                let target = res.cell_of(&point_prefix(res.digit_depth(), &img)).expect("cells are closed under C_R");
                (0..cm).map(move |j| target * cm + (j + b) % cm)
            })
            .collect();
        Ok(SheafTranslation { depth, perm })
    }

    /// Sections of `V/m` over `U` at `depth`, keeping the first
    /// `coset_bound` visible cosets in enumeration order.
    pub fn sections(&self, x: &LocObject, u: &Clopen, depth: usize, coset_bound: usize) -> Result<SectionSpace> {
        let res = self.resolution(depth)?;
        if u.depth().values().any(|&n| n > depth) {
            return Err(SheafError::Unresolved { depth, level: 0 });
        }
        let visible = res.cosets(&x.level)?;
        let cosets = self.visible_cosets(&res, &x.level, coset_bound)?;
        let cells: Vec<Vec<u32>> = u.lift(res.digit_depth()).into_iter().collect();
        Ok(SectionSpace {
            depth,
            dim: cells.len() * cosets.len() * x.dim,
            truncated: cosets.len() < visible,
            cells,
            cosets,
            stalk_dim: x.dim,
        })
    }

    /// Representatives of `C_R/C_m`, first in enumeration order.
    fn visible_cosets(&self, res: &Resolution, m: &SmoothNumber, bound: usize) -> Result<Vec<TorsionElement>> {
        let total = res.cosets(m)?;
        let mut seen = BTreeSet::new();
        Ok(torsion_elements(self.primes())
            .filter(|t| t.in_subgroup(&res.r))
            .filter(|t| seen.insert(t.times(m.value())))
            .take(bound.min(total))
            .collect())
    }

    /// The section whose value on (cell, coset, basis index) is given by `f`.
    pub fn section_from_fn(&self, space: &SectionSpace, mut f: impl FnMut(&[u32], usize, usize) -> F::Elem) -> SectionDatum<F> {
        let values = space
            .cells
            .iter()
            .map(|c| {
                let v = (0..space.cosets.len()).map(|g| (0..space.stalk_dim).map(|k| f(c, g, k)).collect()).collect();
                (c.clone(), v)
            })
            .collect();
        SectionDatum { depth: space.depth, cosets: space.cosets.clone(), values }
    }

    pub fn sheaf_dim(&self, f: &EqSheaf) -> SRational {
        f.dim()
    }

    /// Negative control: `V/m` read as `V` on the finite set `⟨m⟩`, Hom dimension.
    pub fn skyscraper_hom_dim(&self, x: &LocObject, y: &LocObject) -> usize {
        x.dim * y.dim
    }

    /// Negative control: the class of `V/m` under the skyscraper reading.
    pub fn skyscraper_class(&self, x: &LocObject) -> SRational {
        SRational::from_int(x.dim as i64)
    }
}
