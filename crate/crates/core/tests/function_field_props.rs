use kgroups::finite_field::Tower;
use kgroups::function_field::{Curve, Divisor, FuncElement};
use kgroups::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn curves() -> Vec<Curve> {
    let f5 = Tower::for_prime(5).unwrap().field(1).unwrap();
    let f7 = Tower::for_prime(7).unwrap().field(1).unwrap();
    let f9 = Tower::for_prime(3).unwrap().field(2).unwrap();
    vec![
        Curve::rational_line(&f5).unwrap(),
        Curve::rational_line(&f9).unwrap(),
        Curve::elliptic(&f5, f5.zero(), f5.one()).unwrap(),
        Curve::elliptic(&f5, f5.one(), f5.zero()).unwrap(),
        Curve::elliptic(&f7, f7.from_int(3), f7.from_int(2)).unwrap(),
        Curve::elliptic(&f9, f9.one(), f9.generator()).unwrap(),
    ]
}

/// `None` when a support place lies beyond the residue-degree cap.
fn div(c: &Curve, f: &FuncElement) -> Option<Divisor> {
    match c.divisor(f) {
        Ok(d) => Some(d),
        Err(Error::DegreeOverflow { .. }) => None,
        Err(e) => panic!("{e:?}"),
    }
}

#[test]
fn ord_is_additive_and_divisors_have_degree_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for c in curves() {
        for _ in 0..60 {
            let f = c.random_element(&mut rng, 3);
            let g = c.random_element(&mut rng, 3);
            let fg = c.mul(&f, &g);
            let (Some(df), Some(dg), Some(dfg)) = (div(&c, &f), div(&c, &g), div(&c, &fg)) else { continue };
            assert_eq!(df.degree(), 0);
            let mut places: Vec<_> = df.support().chain(dg.support()).chain(dfg.support()).cloned().collect();
            places.sort();
            places.dedup();
            for v in &places {
                let (a, b, ab) = (c.ord(v, &f).unwrap(), c.ord(v, &g).unwrap(), c.ord(v, &fg).unwrap());
                assert_eq!(a + b, ab, "{:?} at {v:?}", c);
                assert_eq!(df.multiplicity(v), a);
            }
        }
    }
}

#[test]
fn reduce_is_a_ring_map() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for c in curves() {
        for _ in 0..40 {
            let f = c.random_element(&mut rng, 2);
            let g = c.random_element(&mut rng, 2);
            let (Some(d), Some(df), Some(dg)) = (div(&c, &c.mul(&f, &g)), div(&c, &f), div(&c, &g)) else { continue };
            for v in d.support().chain(df.support()).chain(dg.support()) {
                let l = v.residue_field();
                let (Ok(rf), Ok(rg)) = (c.reduce(v, &f), c.reduce(v, &g)) else { continue };
                assert_eq!(c.reduce(v, &c.mul(&f, &g)).unwrap(), l.mul(rf, rg));
                if let Ok(s) = c.reduce(v, &c.add(&f, &g)) {
                    assert_eq!(s, l.add(rf, rg));
                }
            }
        }
    }
}

#[test]
fn principal_divisors_are_trivial_in_pic0() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for c in curves().into_iter().filter(|c| c.is_elliptic()) {
        for _ in 0..40 {
            let f = c.random_element(&mut rng, 3);
            let Some(d) = div(&c, &f) else { continue };
            assert!(c.divisor_class(&d).unwrap().is_infinity(), "{}", c.format(&f));
        }
    }
}
