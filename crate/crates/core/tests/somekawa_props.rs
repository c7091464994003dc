use kgroups::elliptic::{EcPoint, EllipticGroup};
use kgroups::finite_field::FieldExtension;
use kgroups::literal::{parse_curve, parse_function};
use kgroups::milnor_k::steinberg_k2_oracle;
use kgroups::poly::PolyRing;
use kgroups::semiabelian::GPoint;
use kgroups::somekawa::{
    cycle_round_trip, cycle_symbol, phi_homotopy_check, BlochV, ConfigFile, CurvePoint, Enumeration, HomotopyShape,
    RelationKind, SecondMap, SomekawaApprox, SymbolTerm, TruncationConfig,
};
use num_bigint::BigInt;

fn config(field: &str, groups: &[&str], d: usize, e: Enumeration) -> TruncationConfig {
    let f = ConfigFile {
        field: field.into(),
        groups: groups.iter().map(|s| s.to_string()).collect(),
        degree_bound: d,
        enumeration: e,
        threads: Some(4),
        seed: None,
    };
    TruncationConfig::from_file(&f).unwrap()
}

fn build(field: &str, groups: &[&str], d: usize) -> SomekawaApprox {
    SomekawaApprox::build(&config(field, groups, d, Enumeration::default())).unwrap()
}

fn unit(x: kgroups::finite_field::FFElement) -> GPoint<kgroups::finite_field::FFElement> {
    GPoint { torus: vec![x], ell: None }
}

fn ext(a: &SomekawaApprox, m: usize) -> FieldExtension {
    a.config().groups[0].extension(m).unwrap()
}

#[test]
fn gm_truncation_is_the_unit_group_with_dlog_symbols() {
    let a = build("GF(5)", &["Gm"], 2);
    assert_eq!(a.group().invariants_u64(), vec![4]);
    let k = ext(&a, 1);
    let g = a.group();
    let sym = |l: &FieldExtension, x| a.symbol_eval(&[SymbolTerm::new(l, vec![unit(x)])]).unwrap();
    let gen = sym(&k, k.generator());
    assert_eq!(g.element_order(&gen).unwrap(), Some(BigInt::from(4)));
    for x in k.units() {
        let e = k.dlog(x).unwrap();
        assert!(g.eq(&sym(&k, x), &g.scale(&gen, &BigInt::from(e)).unwrap()).unwrap());
    }
    let l = ext(&a, 2);
    let emb = a.config().groups[0].embedding_to(&l).unwrap();
    for x in l.units() {
        assert!(g.eq(&sym(&l, x), &sym(&k, emb.norm(x))).unwrap());
        assert!(g.eq(&sym(&l, x), &sym(&l, l.frobenius(x))).unwrap());
    }
    let rep = a.check_r1_collapse().unwrap();
    assert!(rep.isomorphism, "{rep:?}");
    assert!(a.verify_r1_rows().unwrap() > 0);
}

#[test]
fn gm_gm_agrees_with_the_steinberg_oracle() {
    for (lit, q) in [("GF(2)", 2), ("GF(3)", 3)] {
        let a = build(lit, &["Gm", "Gm"], 2);
        assert!(a.group().isomorphic(&steinberg_k2_oracle(q).unwrap()), "q = {q}: {}", a.group());
        assert!(a.stats().reciprocity_checks > 0);
    }
}

#[test]
fn raw_tensor_is_multilinear() {
    let e = Enumeration { p1_sources: Some(vec![]), elliptic_sources: false, ..Enumeration::default() };
    let a = SomekawaApprox::build(&config("GF(7)", &["Gm", "Gm"], 1, e)).unwrap();
    assert_eq!(a.group().invariants_u64(), vec![6]);
    let k = ext(&a, 1);
    let g = a.group();
    let s = |x, y| a.symbol_eval(&[SymbolTerm::new(&k, vec![unit(x), unit(y)])]).unwrap();
    for x1 in k.units() {
        for x2 in k.units() {
            for y in k.units() {
                let lhs = s(k.mul(x1, x2), y);
                assert!(g.eq(&lhs, &g.add(&s(x1, y), &s(x2, y)).unwrap()).unwrap());
                let rhs = s(y, k.mul(x1, x2));
                assert!(g.eq(&rhs, &g.add(&s(y, x1), &s(y, x2)).unwrap()).unwrap());
            }
        }
    }
}

#[test]
fn elliptic_truncation_collapses_onto_rational_points() {
    for lit in ["E(GF(5); 0,1)", "E(GF(5); 1,0)"] {
        let a = build("GF(5)", &[lit], 2);
        let rep = a.check_r1_collapse().unwrap();
        assert!(rep.isomorphism, "{lit}: {rep:?}");
        assert_eq!(rep.quotient, rep.target);
        assert!(a.verify_r1_rows().unwrap() > 0);
        assert!(a.rows().iter().any(|r| r.kind == RelationKind::R2));

        let c = a.config().groups[0].elliptic_curve().unwrap().unwrap();
        let (ca, cb) = c.coefficients().unwrap();
        for m in 1..=2 {
            let l = ext(&a, m);
            let emb = a.config().groups[0].embedding_to(&l).unwrap();
            let eg = EllipticGroup::new(&l, emb.apply(ca), emb.apply(cb)).unwrap();
            for p in eg.points() {
                let rt = cycle_round_trip(&a, &c, &l, p).unwrap();
                assert!(rt.agree, "{lit}: {rt:?}");
            }
        }
        let p1 = parse_curve("P1(GF(5))").unwrap();
        let k = ext(&a, 1);
        let z = cycle_symbol(&a, &[p1], &k, &[CurvePoint::Line(Some(k.from_int(2)))]).unwrap();
        assert!(a.group().is_zero(&z).unwrap());
    }
}

#[test]
fn coarser_g_families_give_larger_quotients() {
    let e0 = Enumeration { g_degree: 0, ..Enumeration::default() };
    let a0 = SomekawaApprox::build(&config("GF(3)", &["Gm", "Gm"], 2, e0)).unwrap();
    let a1 = build("GF(3)", &["Gm", "Gm"], 2);
    let (o0, o1) = (a0.group().order().unwrap(), a1.group().order().unwrap());
    assert!(&o0 % &o1 == BigInt::from(0), "{o0} vs {o1}");
}

#[test]
fn config_round_trips_through_json() {
    let c = config("GF(3^2)", &["Gm", "E(GF(3^2); 1,0)"], 2, Enumeration { g_degree: 2, ..Enumeration::default() });
    let s = serde_json::to_string(&c.to_file()).unwrap();
    let back = TruncationConfig::from_json(&s).unwrap();
    assert_eq!(back.base, c.base);
    assert_eq!(back.degree_bound, c.degree_bound);
    assert_eq!(back.enumeration, c.enumeration);
    assert_eq!(back.seed, c.seed);
    assert_eq!(
        back.groups.iter().map(|g| g.literal()).collect::<Vec<_>>(),
        c.groups.iter().map(|g| g.literal()).collect::<Vec<_>>()
    );
    assert!(TruncationConfig::from_json("{\"field\": \"GF(3)\"}").is_err());
}

#[test]
fn builds_do_not_depend_on_the_thread_count() {
    let c = config("GF(4)", &["Gm", "Gm"], 2, Enumeration::default());
    let a = SomekawaApprox::build(&c.clone().with_threads(1)).unwrap();
    let b = SomekawaApprox::build(&c.with_threads(6)).unwrap();
    assert_eq!(a.group().to_string(), b.group().to_string());
    assert_eq!(a.rows().len(), b.rows().len());
    for (x, y) in a.rows().iter().zip(b.rows()) {
        assert_eq!((&x.label, &x.vector), (&y.label, &y.vector));
    }
}

#[test]
fn homotopy_invariance_on_explicit_families() {
    let a = build("GF(5)", &["Gm"], 2);
    let k = ext(&a, 1);
    let r = PolyRing::new(&k);
    // u^2 + (t + 1) u + 2 and u^2 + 3t u + 1
    for coeffs in [vec![r.from_ints(&[2]), r.from_ints(&[1, 1]), r.one()], vec![r.one(), r.from_ints(&[0, 3]), r.one()]]
    {
        let rep = phi_homotopy_check(&a, &HomotopyShape::TorusHypersurface { coeffs, second: None }).unwrap();
        assert!(rep.equal, "{rep:?}");
        assert_eq!(rep.collapse_equal, Some(true));
    }
    let l = ext(&a, 2);
    let rep =
        phi_homotopy_check(&a, &HomotopyShape::ConstantSection { field: l.clone(), points: vec![unit(l.generator())] })
            .unwrap();
    assert!(rep.equal);

    let e = build("GF(5)", &["E(GF(5); 0,1)"], 2);
    let c = e.config().groups[0].elliptic_curve().unwrap().unwrap();
    for h in ["x", "x^2 + x", "3x^2 + 1"] {
        let z = HomotopyShape::EllipticFunction { curve: c.clone(), h: parse_function(&c, h).unwrap(), second: None };
        let rep = phi_homotopy_check(&e, &z).unwrap();
        assert!(rep.equal, "{h}: {rep:?}");
    }

    let b = build("GF(3)", &["Gm", "Gm"], 2);
    let k = ext(&b, 1);
    let r = PolyRing::new(&k);
    let coeffs = vec![r.from_ints(&[2]), r.from_ints(&[0, 1]), r.one()];
    for second in [SecondMap::Constant(k.from_int(2)), SecondMap::Power(1)] {
        let rep =
            phi_homotopy_check(&b, &HomotopyShape::TorusHypersurface { coeffs: coeffs.clone(), second: Some(second) })
                .unwrap();
        assert!(rep.equal, "{rep:?}");
    }
}

#[test]
fn bloch_comparison_is_well_defined_and_surjective() {
    let c = parse_curve("E(GF(5); 0,1)").unwrap();
    let v = BlochV::build(&c, 2, 2).unwrap();
    let cfg = config("GF(5)", &["E(GF(5); 0,1)", "Gm"], 2, Enumeration::default());
    let a = SomekawaApprox::build(&cfg).unwrap();
    let cmp = v.compare(&a).unwrap();
    assert!(cmp.kills_all_rows, "{:?}", cmp.failing_rows);
    assert!(cmp.surjective);
    assert!(cmp.rows_needing_residue_relations > 0);
    let k = ext(&a, 1);
    let img = v.symbol_image(&k, &EcPoint::Infinity, k.generator()).unwrap();
    assert!(img.iter().all(|x| *x == BigInt::from(0)));
}
