//! Property suites run by `catdiv verify`.
//!
//! Exhaustive items enumerate in increasing order, so the reported
//! counterexample is the first one in that order. Randomized items draw from a
//! ChaCha stream keyed by the seed and the item name, so items are independent
//! and the report does not depend on execution order.

use std::collections::{BTreeMap, BTreeSet};

use clap::ValueEnum;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use catdiv_core::burnside::{is_pullback, jmap, m_simplex, pmap, span_compose, span_equiv, FinMap, OChain, Span};
use catdiv_core::cantor::{act, act_component, cells, f as f_map, related, same_orbit, torsion_elements, ActionEncoding};
use catdiv_core::localized::k0_presentation;
use catdiv_core::sheaf::Resolution;
use catdiv_core::{
    CantorPoint, Clopen, DivPresentation, EqSheaf, Field, FieldTag, LCFunction, LocMorphism, LocObject, Localized, Matrix,
    PrimeSet, SRational, Sheaves, SmoothNumber, TorsionElement,
};

use crate::commands::with_field;
use crate::wire::{chain_to_string, object_to_value, point_to_value, to_value, torsion_to_value};
use crate::{Config, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Burnside,
    Cantor,
    Loccat,
    Sheaf,
    Cross,
}

#[derive(Debug, Clone, Serialize)]
pub struct Item {
    pub name: String,
    /// whether the law held on every case
    pub passed: bool,
    /// negative controls are expected to fail
    pub negative_control: bool,
    pub as_expected: bool,
    pub cases: usize,
    pub counterexample: Option<Value>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub items: Vec<Item>,
    pub passed: usize,
    pub failed: usize,
    pub all_as_expected: bool,
}

struct Check {
    name: String,
    negative_control: bool,
    cases: usize,
    counterexample: Option<Value>,
}

impl Check {
    fn new(name: &str) -> Self {
        Check { name: name.into(), negative_control: false, cases: 0, counterexample: None }
    }

    fn control(name: &str) -> Self {
        Check { negative_control: true, ..Check::new(name) }
    }

    fn case(&mut self, ok: bool, counterexample: impl FnOnce() -> Value) {
        self.cases += 1;
        if !ok && self.counterexample.is_none() {
            self.counterexample = Some(counterexample());
        }
    }

    fn done(self) -> Item {
        let passed = self.counterexample.is_none();
        Item {
            name: self.name,
            passed,
            negative_control: self.negative_control,
            as_expected: passed != self.negative_control,
            cases: self.cases,
            counterexample: self.counterexample,
        }
    }
}

/// A ChaCha stream keyed by the seed and an item name.
fn rng(seed: u64, item: &str) -> ChaCha8Rng {
    // FNV-1a, stable across platforms and releases
    let salt = item.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    ChaCha8Rng::seed_from_u64(seed ^ salt)
}

pub fn run_suite(suite: Suite, cfg: &Config) -> Result<SuiteReport> {
    let mut items = match suite {
        Suite::Burnside => burnside(cfg)?,
        Suite::Cantor => cantor(cfg)?,
        Suite::Loccat => with_field!(cfg, |field| loccat(&Localized::new(field, cfg.primes.clone()), cfg)?),
        Suite::Sheaf => with_field!(cfg, |field| sheaf(&Sheaves::new(field, cfg.primes.clone()), cfg)?),
        Suite::Cross => with_field!(cfg, |field| cross(&Sheaves::new(field, cfg.primes.clone()), cfg)?),
    };
    items.sort_by(|a, b| a.name.cmp(&b.name));
    let passed = items.iter().filter(|i| i.passed).count();
    Ok(SuiteReport {
        suite,
        passed,
        failed: items.len() - passed,
        all_as_expected: items.iter().all(|i| i.as_expected),
        items,
    })
}

/// All chains of length `1..=max_len` with entries `<= bound`.
pub fn chains(primes: &PrimeSet, bound: u64, max_len: usize) -> Vec<OChain> {
    let nums = primes.smooth_up_to(bound);
    let mut layer: Vec<Vec<(SmoothNumber, SmoothNumber)>> = vec![vec![]];
    let mut out = Vec::new();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for prefix in &layer {
            for m in &nums {
                for n in nums.iter().filter(|n| m.divides(n).is_some()) {
                    if let Some((pm, pn)) = prefix.last() {
                        if pm.divides(m).is_none() || pn.divides(n).is_none() {
                            continue;
                        }
                    }
                    let mut c = prefix.clone();
                    c.push((m.clone(), n.clone()));
                    next.push(c);
                }
            }
        }
        out.extend(next.iter().cloned().map(|c| OChain::new(c).expect("valid by construction")));
        layer = next;
    }
    out
}

fn random_span(rng: &mut ChaCha8Rng, x: usize, y: usize) -> Span {
    let a = rng.gen_range(0..6);
    let left = FinMap::new(a, x, (0..a).map(|_| rng.gen_range(0..x)).collect()).expect("in range");
    let right = FinMap::new(a, y, (0..a).map(|_| rng.gen_range(0..y)).collect()).expect("in range");
    Span::new(left, right).expect("same apex")
}

fn burnside(cfg: &Config) -> Result<Vec<Item>> {
    let nums = cfg.primes.smooth_up_to(cfg.level_bound);
    let mut p_check = Check::new("pmap-functoriality");
    let mut j_check = Check::new("jmap-functoriality");
    for m in &nums {
        for n in nums.iter().filter(|n| m.divides(n).is_some()) {
            for r in nums.iter().filter(|r| n.divides(r).is_some()) {
                let ce = || json!({ "m": m.value(), "n": n.value(), "r": r.value() });
                let mr = pmap(m, r)?;
                // oracle: the closed forms i ↦ ⌊i/(r/m)⌋ and i ↦ i mod m
                let k = (r.value() / m.value()) as usize;
                let formula = mr.table().iter().enumerate().all(|(i, &v)| v == i / k);
                p_check.case(formula && pmap(m, n)?.after(&pmap(n, r)?)? == mr, ce);
                let jr = jmap(m, r)?;
                let formula = jr.table().iter().enumerate().all(|(i, &v)| v == i % m.as_usize());
                j_check.case(formula && jmap(m, n)?.after(&jmap(n, r)?)? == jr, ce);
            }
        }
    }

    let mut diamonds = Check::new("simplex-diamonds-are-pullbacks");
    for c in chains(&cfg.primes, cfg.level_bound, cfg.depth_bound.min(3)) {
        for ((s, t), sq) in &m_simplex(&c).diamonds {
            diamonds.case(is_pullback(sq)?, || json!({ "chain": chain_to_string(&c), "s": s, "t": t }));
        }
    }

    let mut ms = Check::new("ms-composition");
    for k in &nums {
        for k2 in nums.iter().filter(|k2| k.value() * k2.value() <= cfg.level_bound) {
            let (a, b) = (k.as_usize(), k2.as_usize());
            let c = span_compose(&Span::multiplication(b), &Span::multiplication(a))?;
            let ok = c.apex() == a * b && span_equiv(&c, &Span::multiplication(a * b))?;
            ms.case(ok, || json!({ "k": a, "k2": b }));
        }
    }

    let mut assoc = Check::new("span-associativity");
    let mut r = rng(cfg.seed, "span-associativity");
    for _ in 0..200 {
        let (x, y, z, w) = (r.gen_range(1..4), r.gen_range(1..4), r.gen_range(1..4), r.gen_range(1..4));
        let (f, g, h) = (random_span(&mut r, x, y), random_span(&mut r, y, z), random_span(&mut r, z, w));
        let lhs = span_compose(&h, &span_compose(&g, &f)?)?;
        let rhs = span_compose(&span_compose(&h, &g)?, &f)?;
        assoc.case(span_equiv(&lhs, &rhs)?, || json!({ "f": to_value(&f), "g": to_value(&g), "h": to_value(&h) }));
    }

    let mut unit = Check::new("span-unit-and-duality");
    let mut r = rng(cfg.seed, "span-unit-and-duality");
    for _ in 0..200 {
        let (x, y) = (r.gen_range(1..4), r.gen_range(1..4));
        let f = random_span(&mut r, x, y);
        let ok = span_equiv(&span_compose(&Span::identity(f.target()), &f)?, &f)?
            && span_equiv(&span_compose(&f, &Span::identity(f.source()))?, &f)?
            && f.dual().dual() == f
            && f.dual().source() == f.target();
        unit.case(ok, || to_value(&f));
    }
    Ok(vec![p_check.done(), j_check.done(), diamonds.done(), ms.done(), assoc.done(), unit.done()])
}

/// Every point whose coordinates have at most `depth` digits, or a seeded
/// sample of `cap` of them when there are more.
pub fn points(primes: &PrimeSet, depth: usize, cap: usize, rng: &mut ChaCha8Rng) -> Vec<CantorPoint> {
    let total: Option<usize> =
        primes.primes().iter().try_fold(1usize, |acc, &p| acc.checked_mul((p as usize).checked_pow(depth as u32)?));
    match total {
        Some(t) if t <= cap => {
            let d: BTreeMap<u64, usize> = primes.primes().iter().map(|&p| (p, depth)).filter(|_| depth > 0).collect();
            cells(&d).into_iter().map(|flat| split_point(primes, depth, &flat)).collect()
        }
        _ => (0..cap).map(|_| random_point(primes, depth, rng)).collect(),
    }
}

fn split_point(primes: &PrimeSet, depth: usize, flat: &[u32]) -> CantorPoint {
    let coords = primes.primes().iter().enumerate().map(|(i, &p)| (p, flat[i * depth..(i + 1) * depth].to_vec()));
    CantorPoint::new(coords.collect(), primes).expect("digits in range")
}

pub fn random_point(primes: &PrimeSet, depth: usize, rng: &mut ChaCha8Rng) -> CantorPoint {
    let coords = primes.primes().iter().map(|&p| {
        let len = rng.gen_range(0..=depth);
        (p, (0..len).map(|_| rng.gen_range(0..p as u32)).collect())
    });
    CantorPoint::new(coords.collect(), primes).expect("digits in range")
}

pub fn random_torsion(primes: &PrimeSet, bound: u64, rng: &mut ChaCha8Rng) -> TorsionElement {
    let dens = primes.smooth_up_to(bound);
    let d = &dens[rng.gen_range(0..dens.len())];
    TorsionElement::from_parts(rng.gen_range(0..d.value()), d)
}

/// A random clopen with at most `max_depth` digits per prime.
pub fn random_clopen(primes: &PrimeSet, max_depth: usize, rng: &mut ChaCha8Rng) -> Clopen {
    let depth: BTreeMap<u64, usize> = primes.primes().iter().map(|&p| (p, rng.gen_range(0..=max_depth))).collect();
    let flat: BTreeMap<u64, usize> = depth.iter().filter(|(_, &n)| n > 0).map(|(&p, &n)| (p, n)).collect();
    let chosen: Vec<Vec<u32>> = cells(&flat).into_iter().filter(|_| rng.gen_bool(0.5)).collect();
    Clopen::new(depth, chosen, primes).expect("cells at their own depth")
}

/// Digit-level oracle: value of the first `n` p-digits, most significant first.
fn block(x: &CantorPoint, p: u64, n: usize) -> u64 {
    (1..=n).fold(0, |acc, i| acc * p + x.digit(p, i) as u64)
}

fn cantor(cfg: &Config) -> Result<Vec<Item>> {
    let primes = &cfg.primes;
    let depth = cfg.depth_bound;
    let elems: Vec<TorsionElement> =
        torsion_elements(primes).take_while(|t| t.den().value() <= cfg.level_bound).collect();
    let pts = points(primes, depth, 512, &mut rng(cfg.seed, "points"));

    let mut identity = Check::new("action-identity");
    let mut free = Check::new("action-freeness");
    let mut blocks = Check::new("action-block-addition");
    for x in &pts {
        identity.case(act(&TorsionElement::zero(), x) == *x, || point_to_value(x));
        for t in &elems {
            let y = act(t, x);
            let ce = || json!({ "t": torsion_to_value(t), "x": point_to_value(x) });
            free.case(t.is_zero() || y != *x, ce);
            // oracle: each prime component adds a to the first n digits mod pⁿ
            let ok = t.components().iter().all(|&(p, a, n)| {
                let n = n as usize;
                let q = p.pow(n as u32);
                block(&y, p, n) == (block(x, p, n) + a) % q && (n + 1..=n + depth).all(|i| y.digit(p, i) == x.digit(p, i))
            });
            blocks.case(ok, ce);
        }
    }

    let mut additive = Check::new("action-additivity");
    let mut r = rng(cfg.seed, "action-additivity");
    for x in &pts {
        for _ in 0..32 {
            let (t, u) = (&elems[r.gen_range(0..elems.len())], &elems[r.gen_range(0..elems.len())]);
            let ok = act(t, &act(u, x)) == act(&t.add(u)?, x);
            additive.case(ok, || json!({ "t": torsion_to_value(t), "u": torsion_to_value(u), "x": point_to_value(x) }));
        }
    }

    let consistency = |name: &str, enc: ActionEncoding, mut check: Check| {
        for &p in primes.primes() {
            let single = PrimeSet::new(vec![p]).expect("prime");
            for x in points(&single, depth, 4096, &mut rng(cfg.seed, name)) {
                for n in 0..depth {
                    for a in 0..p.pow(n as u32) {
                        let ok = act_component(enc, p, a, n, &x) == act_component(enc, p, p * a, n + 1, &x);
                        check.case(ok, || json!({ "p": p, "a": a, "n": n, "x": point_to_value(&x) }));
                    }
                }
            }
        }
        check.done()
    };

    let mut f_laws = Check::new("f-laws");
    let mut r = rng(cfg.seed, "f-laws");
    let levels = primes.smooth_up_to(cfg.level_bound);
    for _ in 0..500 {
        let x = random_point(primes, depth, &mut r);
        let (m, n) = (&levels[r.gen_range(0..levels.len())], &levels[r.gen_range(0..levels.len())]);
        let t = TorsionElement::from_parts(r.gen_range(0..m.value()), m);
        let (lcm, mn) = (m.lcm(n)?, m.checked_mul(n)?);
        let y = random_point(primes, depth, &mut r);
        // f_m zeroes ν_p(m) leading digits, C_m acts inside them, R_m ⊂ R_mn
        let ok = f_map(m, &f_map(n, &x)) == f_map(&lcm, &x)
            && f_map(m, &act(&t, &x)) == f_map(m, &x)
            && (!related(m, &x, &y) || related(&mn, &x, &y));
        f_laws.case(ok, || json!({ "m": m.value(), "n": n.value(), "x": point_to_value(&x) }));
    }

    let mut orbit = Check::new("orbit-criterion");
    let mut r = rng(cfg.seed, "orbit-criterion");
    // every point of depth <= d is fixed by f at the top level ∏ p^d
    let top = SmoothNumber::from_exponents(primes.primes().iter().map(|&p| (p, depth as u32)))?;
    for _ in 0..500 {
        let (x, y) = (random_point(primes, depth, &mut r), random_point(primes, depth, &mut r));
        let ce = || json!({ "x": point_to_value(&x), "y": point_to_value(&y) });
        let ok = match same_orbit(&x, &y)? {
            Some(w) => {
                let minimal = w.level.factorization().iter().all(|&(p, _)| {
                    let smaller = w.level.div_exact(&SmoothNumber::prime_power(p, 1).expect("prime")).expect("p | level");
                    !related(&smaller, &x, &y)
                });
                w.verify(&x, &y) && minimal && w.level.divides(&top).is_some()
            }
            None => !related(&top, &x, &y),
        };
        orbit.case(ok, ce);
    }

    let mut boolean = Check::new("clopen-boolean-algebra");
    let mut translate = Check::new("clopen-translate-automorphism");
    let mut ring = Check::new("lc-function-ring");
    let mut r = rng(cfg.seed, "clopens");
    let cdepth = depth.min(2);
    for _ in 0..1000 {
        let (a, b, c) = (
            random_clopen(primes, cdepth, &mut r),
            random_clopen(primes, cdepth, &mut r),
            random_clopen(primes, cdepth, &mut r),
        );
        let x = random_point(primes, depth, &mut r);
        let t = random_torsion(primes, cfg.level_bound, &mut r);
        let ce = || json!({ "a": to_value(&a), "b": to_value(&b), "c": to_value(&c), "x": point_to_value(&x) });
        let ok = a.union(&b.intersection(&c)) == a.union(&b).intersection(&a.union(&c))
            && a.union(&b).complement() == a.complement().intersection(&b.complement())
            && a.complement().complement() == a
            && a.union(&a.complement()).is_full()
            && a.intersection(&a.complement()).is_empty()
            && a.union(&a.intersection(&b)) == a
            && a.union(&b).contains(&x) == (a.contains(&x) || b.contains(&x))
            && a.intersection(&b).contains(&x) == (a.contains(&x) && b.contains(&x))
            && a.difference(&b).contains(&x) == (a.contains(&x) && !b.contains(&x));
        boolean.case(ok, ce);
        let ok = a.union(&b).translate(&t) == a.translate(&t).union(&b.translate(&t))
            && a.complement().translate(&t) == a.translate(&t).complement()
            && a.translate(&t).contains(&act(&t, &x)) == a.contains(&x)
            && a.translate(&t).translate(&t.neg()) == a;
        translate.case(ok, || json!({ "a": to_value(&a), "b": to_value(&b), "t": torsion_to_value(&t) }));
        let k = r.gen_range(-3i64..=3);
        let (ia, ib) = (LCFunction::indicator(&a), LCFunction::indicator(&b));
        let expected = |v: bool| v as i64;
        let ok = *ia.mul(&ib).eval(&x) == BigInt::from(expected(a.intersection(&b).contains(&x)))
            && *ia.add(&ib).mul(&LCFunction::constant(k)).eval(&x)
                == BigInt::from(k * (expected(a.contains(&x)) + expected(b.contains(&x))))
            && ia.support() == a;
        ring.case(ok, ce);
    }

    let mut items = vec![
        identity.done(),
        free.done(),
        blocks.done(),
        additive.done(),
        consistency("action-colimit-consistency", ActionEncoding::MostSignificantFirst, Check::new("action-colimit-consistency")),
        f_laws.done(),
        orbit.done(),
        boolean.done(),
        translate.done(),
        ring.done(),
    ];
    if cfg.negative_controls {
        let name = "negative-control/lsb-action-consistency";
        items.push(consistency(name, ActionEncoding::LeastSignificantFirst, Check::control(name)));
    }
    Ok(items)
}

fn random_matrix<F: Field>(field: &F, rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix<F> {
    Matrix::from_fn(rows, cols, |_, _| field.from_int(rng.gen_range(-2i64..=2)))
}

fn random_object(levels: &[SmoothNumber], max_dim: usize, rng: &mut ChaCha8Rng) -> LocObject {
    LocObject::sigma(rng.gen_range(0..=max_dim), levels[rng.gen_range(0..levels.len())].clone())
}

/// A morphism presented at `lcm · e`, refined further half the time.
pub fn random_morphism<F: Field>(
    loc: &Localized<F>,
    x: &LocObject,
    y: &LocObject,
    extra: &[SmoothNumber],
    rng: &mut ChaCha8Rng,
) -> Result<LocMorphism<F>> {
    let e = &extra[rng.gen_range(0..extra.len())];
    let level = x.level.lcm(&y.level)?.checked_mul(e)?;
    let m = random_matrix(loc.field(), y.size_at(&level)?, x.size_at(&level)?, rng);
    let f = loc.morphism(x.clone(), y.clone(), level, m)?;
    if rng.gen_bool(0.5) {
        Ok(loc.refine(&f, &extra[rng.gen_range(0..extra.len())])?)
    } else {
        Ok(f)
    }
}

fn equal_by_refinement<F: Field>(loc: &Localized<F>, f: &LocMorphism<F>, g: &LocMorphism<F>) -> Result<bool> {
    let l = f.level.lcm(&g.level)?;
    Ok(loc.refine_to(f, &l)?.matrix == loc.refine_to(g, &l)?.matrix)
}

fn morphism_summary<F: Field>(f: &LocMorphism<F>, tag: FieldTag) -> Value {
    json!({ "source": object_to_value(&f.source, tag), "target": object_to_value(&f.target, tag), "level": f.level.value() })
}

fn loccat<F: Field>(loc: &Localized<F>, cfg: &Config) -> Result<Vec<Item>> {
    let primes = &loc.primes;
    let tag = loc.field().tag();
    let levels = primes.smooth_up_to(cfg.level_bound);
    let small: Vec<SmoothNumber> = primes.smooth_up_to(cfg.level_bound.min(6));

    let mut complete = Check::new("dim-completeness");
    let mut r = rng(cfg.seed, "dim-completeness");
    for _ in 0..200 {
        let (x, y) = (random_object(&levels, 8, &mut r), random_object(&levels, 8, &mut r));
        // oracle: cross multiplication of dim/level
        let same = x.dim as u64 * y.level.value() == y.dim as u64 * x.level.value();
        let found = loc.find_iso(&x, &y, x.level.lcm(&y.level)?.value())?;
        let ok = found.is_some() == same && found.is_none_or(|f| loc.is_iso(&f));
        complete.case(ok, || json!({ "x": object_to_value(&x, tag), "y": object_to_value(&y, tag) }));
    }

    let mut refinement = Check::new("refinement-soundness");
    for x in small.iter().flat_map(|l| (0..=4).map(move |d| LocObject::sigma(d, l.clone()))) {
        for s in primes.smooth_up_to(cfg.level_bound.min(12)) {
            let y = x.refine(&s)?;
            let ok = loc.find_iso(&x, &y, y.level.value())?.is_some() && x.rational_dim() == y.rational_dim();
            refinement.case(ok, || json!({ "x": object_to_value(&x, tag), "s": s.value() }));
        }
    }

    let mut normalize = Check::new("normalize-idempotent-and-sound");
    let mut compose = Check::new("composition-by-refinement");
    let mut dsum = Check::new("dsum-functoriality");
    let mut r = rng(cfg.seed, "morphisms");
    for _ in 0..200 {
        let (x, y, z) = (random_object(&small, 2, &mut r), random_object(&small, 2, &mut r), random_object(&small, 2, &mut r));
        let f = random_morphism(loc, &x, &y, &small, &mut r)?;
        let g = random_morphism(loc, &y, &z, &small, &mut r)?;
        let n = loc.normalize(&f);
        let ok = loc.normalize(&n) == n && equal_by_refinement(loc, &n, &f)? && f.level.value() % n.level.value() == 0;
        normalize.case(ok, || morphism_summary(&f, tag));
        // oracle: refine both to a common level and multiply matrices directly
        let gf = loc.compose(&g, &f)?;
        let l = f.level.lcm(&g.level)?;
        let direct = loc.refine_to(&g, &l)?.matrix.mul(loc.field(), &loc.refine_to(&f, &l)?.matrix)?;
        compose.case(loc.refine_to(&gf, &l)?.matrix == direct, || json!({ "f": morphism_summary(&f, tag), "g": morphism_summary(&g, tag) }));
        let f2 = random_morphism(loc, &y, &z, &small, &mut r)?;
        let g2 = random_morphism(loc, &z, &x, &small, &mut r)?;
        let lhs = loc.compose(&loc.dsum(&f2, &g2)?, &loc.dsum(&f, &g)?)?;
        let rhs = loc.dsum(&loc.compose(&f2, &f)?, &loc.compose(&g2, &g)?)?;
        dsum.case(loc.equal(&lhs, &rhs), || json!({ "f": morphism_summary(&f, tag), "g": morphism_summary(&g, tag) }));
    }

    let mut mult = Check::new("mult-functoriality-and-invertibility");
    for x in small.iter().map(|l| LocObject::sigma(2, l.clone())) {
        for k in &small {
            for k2 in &small {
                let lhs = loc.compose(&loc.mult_by_k(&x, k2), &loc.mult_by_k(&x, k))?;
                let ok = loc.equal(&lhs, &loc.mult_by_k(&x, &k.checked_mul(k2)?));
                // oracle: k is invertible in the field unless the characteristic divides it
                let invertible = match tag {
                    FieldTag::Rationals => true,
                    FieldTag::Prime(p) => k.value() % p != 0,
                };
                let ok = ok && loc.is_iso(&loc.mult_by_k(&x, k)) == invertible;
                mult.case(ok, || json!({ "x": object_to_value(&x, tag), "k": k.value(), "k2": k2.value() }));
            }
        }
    }

    let mut k0 = Check::new("k0-truncation");
    for m in &levels {
        let k = k0_presentation(m);
        let mv = m.value();
        // oracle: the relations span the kernel of x ↦ Σ x_g·(M/g), so K₀ ≅ ℤ with g ↦ M/g
        let ok = k.free_rank == 1
            && k.torsion.is_empty()
            && k.generator_class[0] == SRational::from_parts(1, m)
            && k.generators.iter().zip(&k.coordinates).all(|(g, c)| c[0] == BigInt::from(mv / g.value()))
            && k.relations.iter().all(|row| {
                row.iter().zip(&k.generators).map(|(c, g)| c * BigInt::from(mv / g.value())).sum::<BigInt>() == BigInt::from(0)
            });
        k0.case(ok, || json!({ "bound": mv }));
    }

    let w = levels.iter().max().expect("1 is smooth").clone();
    let pres = DivPresentation::standard(LocObject::sigma(2, SmoothNumber::one()), w.clone());
    let divs = w.divisors();
    let triples: Vec<[u64; 3]> = divs
        .iter()
        .flat_map(|a| divs.iter().filter(move |b| b.value() % a.value() == 0).map(move |b| (a.value(), b.value())))
        .flat_map(|(a, b)| divs.iter().filter(move |c| c.value() % b == 0).map(move |c| [a, b, c.value()]))
        .collect();
    let mut coherence = Check::new("div-coherence");
    for t in &triples {
        coherence.case(pres.coherence_check(t)?, || json!({ "window": w.value(), "chain": t }));
    }

    let mut items = vec![
        complete.done(),
        refinement.done(),
        normalize.done(),
        compose.done(),
        dsum.done(),
        mult.done(),
        k0.done(),
        coherence.done(),
    ];
    if cfg.negative_controls {
        let mut control = Check::control("negative-control/corrupted-div-witness");
        let mut bad = pres.clone();
        let corrupted = primes.primes().iter().any(|&p| w.value().is_multiple_of(p) && bad.corrupt(1, p));
        if corrupted {
            for t in &triples {
                control.case(bad.coherence_check(t)?, || json!({ "window": w.value(), "chain": t }));
            }
        }
        items.push(control.done());
    }
    Ok(items)
}

/// Generators `V/m` with `dim V <= 2` and `m` among the divisors of `∏ p^e`
/// small enough for the brute-force oracles.
fn generators(primes: &PrimeSet, bound: u64) -> Vec<LocObject> {
    let levels: Vec<SmoothNumber> = primes.smooth_up_to(bound.min(4));
    (1..=2).flat_map(|d| levels.iter().map(move |l| LocObject::sigma(d, l.clone()))).collect()
}

/// Brute force: unknowns are all kernel entries on all cells, and each
/// equation says the kernel commutes with the generator `1/R` of `C_R`.
fn constraint_nullity(res: &Resolution, x: &LocObject, y: &LocObject) -> Result<usize> {
    let (cm, cn) = (res.cosets(&x.level)?, res.cosets(&y.level)?);
    let (rows, cols) = (cn * y.dim, cm * x.dim);
    let r = res.cell_count();
    let var = |a: usize, i: usize, j: usize| (a * rows + i) * cols + j;
    let n = r * rows * cols;
    let q = catdiv_core::Rationals;
    let mut m = Matrix::<catdiv_core::Rationals>::zeros(&q, n, n);
    for a in 0..r {
        for i in 0..rows {
            for j in 0..cols {
                let i2 = ((i / y.dim + 1) % cn) * y.dim + i % y.dim;
                let j2 = ((j / x.dim + 1) % cm) * x.dim + j % x.dim;
                let e = var(a, i, j);
                let next = var((a + 1) % r, i2, j2);
                m.set(e, next, q.add(m.get(e, next), &q.one()));
                m.set(e, e, q.sub(m.get(e, e), &q.one()));
            }
        }
    }
    Ok(n - m.rank(&q))
}

fn sheaf<F: Field>(sh: &Sheaves<F>, cfg: &Config) -> Result<Vec<Item>> {
    let primes = sh.primes();
    let tag = sh.field().tag();
    let gens = generators(primes, cfg.level_bound);

    let mut oracle = Check::new("hom-vs-constraint-oracle");
    for depth in 0..=cfg.depth_bound {
        let res = sh.resolution(depth)?;
        for x in &gens {
            for y in &gens {
                let (Ok(cm), Ok(cn)) = (res.cosets(&x.level), res.cosets(&y.level)) else { continue };
                // keep the dense oracle small
                if res.cell_count() * cm * cn * x.dim * y.dim > 300 {
                    continue;
                }
                let h = sh.sheaf_hom(&sh.psi_object(x), &sh.psi_object(y), depth)?;
                let expected = constraint_nullity(&res, x, y)?;
                oracle.case(h.dim == expected, || {
                    json!({ "x": object_to_value(x, tag), "y": object_to_value(y, tag), "depth": depth, "dim": h.dim, "oracle": expected })
                });
            }
        }
    }

    let mut equivariant = Check::new("psi-equivariance-and-stalks");
    let mut r = rng(cfg.seed, "psi-equivariance-and-stalks");
    let levels: Vec<SmoothNumber> = gens.iter().map(|x| x.level.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    for _ in 0..50 {
        let x = &gens[r.gen_range(0..gens.len())];
        let f = random_morphism(&sh.loc, x, x, &levels[..1], &mut r)?;
        let depth = Resolution::separating(primes, &[&f.level])?.depth;
        let k = sh.psi(&f, depth)?;
        // oracle: an inverse exists in the localized model and maps to a two-sided inverse
        let has_inverse = sh.loc.is_iso(&f)
            && sh.compose(&sh.psi(&sh.loc.inverse(&f)?, depth)?, &k)? == sh.identity(x, depth)?;
        let ok = sh.is_equivariant(&k)? && sh.is_invertible(&k) == has_inverse;
        equivariant.case(ok, || morphism_summary(&f, tag));
    }

    let mut action = Check::new("translations-form-an-action");
    let depth = cfg.depth_bound.min(2);
    let res = sh.resolution(depth)?;
    let elems: Vec<TorsionElement> = torsion_elements(primes).filter(|t| t.in_subgroup(&res.r)).take(24).collect();
    for x in gens.iter().filter(|x| res.cosets(&x.level).is_ok()) {
        for t in &elems {
            let a = sh.translate_sheaf(t, x, depth)?;
            for u in &elems {
                let b = sh.translate_sheaf(u, x, depth)?;
                let ok = a.then(&b) == sh.translate_sheaf(&t.add(u)?, x, depth)?;
                action.case(ok, || json!({ "x": object_to_value(x, tag), "t": torsion_to_value(t), "u": torsion_to_value(u) }));
            }
        }
    }

    let mut gluing = Check::new("sections-glue-over-partitions");
    let mut r = rng(cfg.seed, "sections-glue-over-partitions");
    let x = LocObject::sigma(2, SmoothNumber::one());
    for depth in 0..=cfg.depth_bound.min(3) {
        let d: BTreeMap<u64, usize> = primes.primes().iter().map(|&p| (p, depth)).collect();
        let flat: BTreeMap<u64, usize> = d.iter().filter(|(_, &n)| n > 0).map(|(&p, &n)| (p, n)).collect();
        let all = cells(&flat);
        if all.len() > 512 {
            continue;
        }
        for _ in 0..8 {
            let (left, right): (Vec<_>, Vec<_>) = all.iter().cloned().partition(|_| r.gen_bool(0.5));
            let ua = Clopen::new(d.clone(), left, primes)?;
            let ub = Clopen::new(d.clone(), right, primes)?;
            let whole = sh.sections(&x, &Clopen::full(), depth, 4)?;
            let (sa, sb) = (sh.sections(&x, &ua, depth, 4)?, sh.sections(&x, &ub, depth, 4)?);
            let mut k = 0i64;
            let sec = sh.section_from_fn(&whole, |_, _, _| {
                k += 1;
                sh.field().from_int(k)
            });
            let ca: BTreeSet<_> = sa.cells.iter().cloned().collect();
            let cb: BTreeSet<_> = sb.cells.iter().cloned().collect();
            let ok = whole.dim == sa.dim + sb.dim && sec.restrict(&ca).glue(&sec.restrict(&cb))? == sec;
            gluing.case(ok, || json!({ "depth": depth, "a": to_value(&ua), "b": to_value(&ub) }));
        }
    }
    Ok(vec![oracle.done(), equivariant.done(), action.done(), gluing.done()])
}

fn cross<F: Field>(sh: &Sheaves<F>, cfg: &Config) -> Result<Vec<Item>> {
    let primes = sh.primes();
    let tag = sh.field().tag();
    let gens = generators(primes, cfg.level_bound);

    let mut hom = Check::new("hom-comparison");
    for x in &gens {
        for y in &gens {
            let res = Resolution::separating(primes, &[&x.level, &y.level])?;
            let h = sh.sheaf_hom(&sh.psi_object(x), &sh.psi_object(y), res.depth)?;
            // both sides presented at the resolution level R
            let loc_dim = sh.loc.hom_dim_at(x, y, &res.r)?;
            hom.case(h.stabilized && h.dim == loc_dim, || {
                json!({ "x": object_to_value(x, tag), "y": object_to_value(y, tag), "sheaf": h.dim, "localized": loc_dim })
            });
        }
    }

    let mut psi = Check::new("psi-preserves-composition");
    let mut r = rng(cfg.seed, "psi-preserves-composition");
    let one = [SmoothNumber::one()];
    for _ in 0..50 {
        let pick = |r: &mut ChaCha8Rng| gens[r.gen_range(0..gens.len())].clone();
        let (x, y, z) = (pick(&mut r), pick(&mut r), pick(&mut r));
        let f = random_morphism(&sh.loc, &x, &y, &one, &mut r)?;
        let g = random_morphism(&sh.loc, &y, &z, &one, &mut r)?;
        let depth = Resolution::separating(primes, &[&f.level, &g.level])?.depth;
        let lhs = sh.psi(&sh.loc.compose(&g, &f)?, depth)?;
        let rhs = sh.compose(&sh.psi(&g, depth)?, &sh.psi(&f, depth)?)?;
        psi.case(lhs == rhs, || json!({ "f": morphism_summary(&f, tag), "g": morphism_summary(&g, tag) }));
    }

    let mut dims = Check::new("sheaf-dim-matches-dim");
    let mut k0 = Check::new("k0-class-agreement");
    for x in primes.smooth_up_to(cfg.level_bound).iter().flat_map(|l| (0..=3).map(move |d| LocObject::sigma(d, l.clone()))) {
        let class = sh.sheaf_dim(&sh.psi_object(&x));
        dims.case(class == x.rational_dim(), || object_to_value(&x, tag));
        // the K₀ class map at the object's own level, scaled by its dimension
        let k = k0_presentation(&x.level);
        let idx = k.generators.iter().position(|g| *g == x.level).expect("level divides itself");
        k0.case(k.class_map[idx].scale(x.dim as i64) == class, || object_to_value(&x, tag));
    }
    let mut sums = Check::new("sheaf-dim-additive");
    for x in &gens {
        for y in &gens {
            let s = EqSheaf::induce(x.dim, x.level.clone()).sum(&EqSheaf::induce(y.dim, y.level.clone()));
            sums.case(sh.sheaf_dim(&s) == x.rational_dim().add(&y.rational_dim())?, || {
                json!({ "x": object_to_value(x, tag), "y": object_to_value(y, tag) })
            });
        }
    }

    let mut items = vec![hom.done(), psi.done(), dims.done(), k0.done(), sums.done()];
    if cfg.negative_controls {
        let mut sky = Check::control("negative-control/skyscraper-hom");
        let mut sky_class = Check::control("negative-control/skyscraper-class");
        for x in &gens {
            for y in &gens {
                let r = Resolution::separating(primes, &[&x.level, &y.level])?.r;
                let loc_dim = sh.loc.hom_dim_at(x, y, &r)?;
                sky.case(sh.skyscraper_hom_dim(x, y) == loc_dim, || {
                    json!({ "x": object_to_value(x, tag), "y": object_to_value(y, tag) })
                });
            }
            sky_class.case(sh.skyscraper_class(x) == x.rational_dim(), || object_to_value(x, tag));
        }
        items.push(sky.done());
        items.push(sky_class.done());
    }
    Ok(items)
}
