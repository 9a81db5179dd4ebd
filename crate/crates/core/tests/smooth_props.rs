use catdiv_core::smooth::{PrimeSet, SRational, SmoothNumber};
use proptest::prelude::*;

fn s23() -> PrimeSet {
    PrimeSet::new(vec![2, 3]).unwrap()
}

fn smooth() -> impl Strategy<Value = SmoothNumber> {
    (0u32..6, 0u32..4).prop_map(|(a, b)| SmoothNumber::from_exponents([(2, a), (3, b)]).unwrap())
}

fn srat() -> impl Strategy<Value = SRational> {
    (-50i64..50, smooth()).prop_map(|(n, d)| SRational::from_parts(n, &d))
}

proptest! {
    #[test]
    fn divisibility_composes(m in smooth(), a in smooth(), b in smooth()) {
        let n = m.checked_mul(&a).unwrap();
        let r = n.checked_mul(&b).unwrap();
        let k = m.divides(&n).unwrap();
        let k2 = n.divides(&r).unwrap();
        prop_assert_eq!(m.divides(&r).unwrap(), k.checked_mul(&k2).unwrap());
    }

    #[test]
    fn lcm_is_an_upper_bound(m in smooth(), n in smooth()) {
        let l = m.lcm(&n).unwrap();
        prop_assert!(m.divides(&l).is_some() && n.divides(&l).is_some());
        // oracle: integer lcm
        let (a, b) = (m.value(), n.value());
        let g = (1..=a.min(b)).rev().find(|d| a % d == 0 && b % d == 0).unwrap();
        prop_assert_eq!(l.value(), a / g * b);
    }

    #[test]
    fn ring_axioms(a in srat(), b in srat(), c in srat()) {
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.add(&b).unwrap().add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
        let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert!(a.add(&a.neg()).unwrap().is_zero());
        prop_assert_eq!(a.add(&SRational::zero()).unwrap(), a.clone());
    }

    #[test]
    fn reduction_matches_float(n in -200i64..200, d in smooth()) {
        let q = SRational::from_parts(n, &d);
        let back = q.numer().to_string().parse::<f64>().unwrap() / q.denom().value() as f64;
        prop_assert!((back - n as f64 / d.value() as f64).abs() < 1e-12);
        prop_assert_eq!(SRational::from_parts(q.numer().clone(), q.denom()), q);
    }
}

#[test]
fn spec_examples() {
    let s = s23();
    let (two, six) = (s.smooth(2).unwrap(), s.smooth(6).unwrap());
    assert_eq!(two.divides(&six).unwrap().value(), 3);
    assert!(s.smooth(4).unwrap().divides(&six).is_none());
    assert_eq!(s.smooth(4).unwrap().lcm(&six).unwrap().value(), 12);
    let sum = SRational::new(1, 2, &s).unwrap().add(&SRational::new(1, 3, &s).unwrap()).unwrap();
    assert_eq!(sum.to_string(), "5/6");
    assert!(SRational::new(1, 2, &PrimeSet::new(vec![3]).unwrap()).is_err());
}
