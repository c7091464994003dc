use kgroups::elliptic::EcPoint;
use kgroups::finite_field::Tower;
use kgroups::function_field::{Curve, FuncElement};
use kgroups::milnor_k::tame2;
use kgroups::semiabelian::{GPoint, SemiAbelian};
use kgroups::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn skip_overflow<T>(r: kgroups::Result<T>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(Error::DegreeOverflow { .. }) => None,
        Err(e) => panic!("{e:?}"),
    }
}

#[test]
fn reciprocity_over_p1_and_elliptic_function_fields() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let k = Tower::for_prime(5).unwrap().field(1).unwrap();
    for (a, b) in [(0, 1), (1, 0)] {
        let g = SemiAbelian::new(&k, 1, Some((k.from_int(a), k.from_int(b)))).unwrap();
        let e = g.elliptic_curve().unwrap().unwrap();
        let p1 = Curve::rational_line(&k).unwrap();
        let pts = e.rational_points().unwrap();
        let mut checked = 0;
        for i in 0..40 {
            // over P^1: constant elliptic point, torus function
            let p = &pts.points()[i % pts.points().len()];
            let f = p1.random_element(&mut rng, 2);
            let h = p1.random_element(&mut rng, 2);
            let pt = GPoint { torus: vec![f], ell: Some(p.map(|&c| p1.constant(c))) };
            if let Some(s) = skip_overflow(g.reciprocity_sum(&p1, &pt, &h, 6)) {
                assert!(g.is_identity(&k, &s));
                checked += 1;
            }
            // over k(E): generic point multiple
            let law = e.law().unwrap();
            let gen: EcPoint<FuncElement> = law.scalar(&e.generic_point().unwrap(), 1 + (i as i64 % 2)).unwrap();
            let f = e.random_element(&mut rng, 1);
            let h = e.random_element(&mut rng, 1);
            let pt = GPoint { torus: vec![f], ell: Some(gen) };
            if let Some(s) = skip_overflow(g.reciprocity_sum(&e, &pt, &h, 6)) {
                assert!(g.is_identity(&k, &s), "{:?}", s);
                checked += 1;
            }
        }
        assert!(checked > 40, "{checked}");
    }
}

#[test]
fn gm_specializes_to_classical_tame() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for p in [3, 5] {
        let k = Tower::for_prime(p).unwrap().field(1).unwrap();
        let c = Curve::rational_line(&k).unwrap();
        let g = SemiAbelian::gm(&k).unwrap();
        for _ in 0..50 {
            let f = c.random_element(&mut rng, 3);
            let h = c.random_element(&mut rng, 3);
            let d = c.divisor(&c.mul(&f, &h)).unwrap();
            for v in d.support() {
                let pt = GPoint { torus: vec![f.clone()], ell: None };
                let s = g.extended_tame(&c, v, &pt, &h).unwrap();
                assert_eq!(s.torus[0], tame2(&c, v, &f, &h).unwrap());
            }
        }
    }
}
