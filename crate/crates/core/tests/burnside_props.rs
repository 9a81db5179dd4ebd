use catdiv_core::burnside::{is_pullback, jmap, m_simplex, pmap, span_compose, span_equiv, FinMap, OChain, Span};
use catdiv_core::smooth::{PrimeSet, SmoothNumber};
use proptest::prelude::*;

fn span() -> impl Strategy<Value = (usize, usize, Vec<usize>, Vec<usize>)> {
    (1usize..4, 1usize..4, 0usize..7).prop_flat_map(|(x, y, a)| {
        (Just(x), Just(y), proptest::collection::vec(0..x, a), proptest::collection::vec(0..y, a))
    })
}

fn mk(x: usize, y: usize, l: Vec<usize>, r: Vec<usize>) -> Span {
    let a = l.len();
    Span::new(FinMap::new(a, x, l).unwrap(), FinMap::new(a, y, r).unwrap()).unwrap()
}

fn with_source(s: Span, x: usize) -> Option<Span> {
    (s.source() == x).then_some(s)
}

proptest! {
    #[test]
    fn composition_is_associative((x, y, l1, r1) in span(), (_, z, l2, r2) in span(), (_, w, l3, r3) in span()) {
        let f = mk(x, y, l1, r1);
        let g = with_source(mk(y, z, l2.iter().map(|&i| i % y).collect(), r2), y).unwrap();
        let h = with_source(mk(z, w, l3.iter().map(|&i| i % z).collect(), r3), z).unwrap();
        let a = span_compose(&h, &span_compose(&g, &f).unwrap()).unwrap();
        let b = span_compose(&span_compose(&h, &g).unwrap(), &f).unwrap();
        prop_assert!(span_equiv(&a, &b).unwrap());
        prop_assert!(span_equiv(&b, &a).unwrap());
        prop_assert!(span_equiv(&a, &a).unwrap());
    }

    #[test]
    fn identity_is_a_unit((x, y, l, r) in span()) {
        let f = mk(x, y, l, r);
        let left = span_compose(&Span::identity(y), &f).unwrap();
        prop_assert!(span_equiv(&left, &f).unwrap());
        prop_assert_eq!(f.dual().dual(), f);
    }
}

#[test]
fn p_and_j_are_functorial_up_to_48() {
    let s = PrimeSet::new(vec![2, 3]).unwrap();
    let nums = s.smooth_up_to(48);
    for m in &nums {
        for n in nums.iter().filter(|n| m.divides(n).is_some()) {
            for r in nums.iter().filter(|r| n.divides(r).is_some()) {
                let (mr, nr) = (pmap(m, r).unwrap(), pmap(n, r).unwrap());
                assert_eq!(pmap(m, n).unwrap().after(&nr).unwrap(), mr);
                // oracle: the formula ⌊i/k⌋ directly
                let k = (r.value() / m.value()) as usize;
                assert!(mr.table().iter().enumerate().all(|(i, &v)| v == i / k));
                let jr = jmap(n, r).unwrap();
                assert_eq!(jmap(m, n).unwrap().after(&jr).unwrap(), jmap(m, r).unwrap());
            }
        }
    }
}

fn chains(nums: &[SmoothNumber], len: usize) -> Vec<Vec<(SmoothNumber, SmoothNumber)>> {
    if len == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for prefix in chains(nums, len - 1) {
        for m in nums {
            for n in nums {
                if m.divides(n).is_none() {
                    continue;
                }
                if let Some((pm, pn)) = prefix.last() {
                    if pm.divides(m).is_none() || pn.divides(n).is_none() {
                        continue;
                    }
                }
                let mut c = prefix.clone();
                c.push((m.clone(), n.clone()));
                out.push(c);
            }
        }
    }
    out
}

#[test]
fn simplex_diamonds_are_pullbacks() {
    let s = PrimeSet::new(vec![2, 3]).unwrap();
    let nums = s.smooth_up_to(12);
    for len in 1..=3 {
        for c in chains(&nums, len) {
            let simplex = m_simplex(&OChain::new(c).unwrap());
            for sq in simplex.diamonds.values() {
                assert!(is_pullback(sq).unwrap());
            }
        }
    }
}

#[test]
fn ms_spans_compose_to_products() {
    // oracle: apex sizes multiply and the bijection i ↦ (i mod k, ⌊i/k⌋) exists
    for k in 1..7 {
        for k2 in 1..7 {
            let c = span_compose(&Span::multiplication(k2), &Span::multiplication(k)).unwrap();
            assert_eq!(c.apex(), k * k2);
            assert!(span_equiv(&c, &Span::multiplication(k * k2)).unwrap());
        }
    }
}
