//! Zero-cycles on products of pointed curves as symbols, and the
//! homotopy invariance `phi_0 = phi_1` on explicit curve families.

use rand::Rng;
use serde::Serialize;

use super::build::{SomekawaApprox, SymbolTerm};
use crate::abelian::GroupElement;
use crate::elliptic::EcPoint;
use crate::error::{Error, Result};
use crate::finite_field::{FFElement, FieldExtension};
use crate::function_field::{element_string, Curve, Divisor, FuncElement, PlaceKind};
use crate::poly::{Poly, PolyRing};
use crate::semiabelian::GPoint;

/// A point of a pointed curve over an extension `L`: on `P^1` the base point
/// is infinity, on an elliptic curve it is `O`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CurvePoint {
    Line(Option<FFElement>),
    Elliptic(EcPoint<FFElement>),
}

fn check_pointed(c: &Curve, l: &FieldExtension, p: &CurvePoint, a: &SomekawaApprox) -> Result<()> {
    match (p, c.coefficients()) {
        (CurvePoint::Line(x), None) => {
            if x.is_some_and(|x| !l.contains(x)) {
                return Err(Error::FieldMismatch);
            }
            Ok(())
        }
        (CurvePoint::Elliptic(pt), Some(_)) => {
            let g = &a.config().groups[0];
            let law = c.law_over(&g.tower_embedding(c.base_field(), l)?).expect("elliptic curve");
            if !law.contains(pt) {
                return Err(Error::Config(format!("point is not on {}", c.literal())));
            }
            Ok(())
        }
        _ => Err(Error::Config("point does not match the curve type".into())),
    }
}

/// The class of the closed point `x = (x_1, ..., x_n)` of `C_1 x ... x C_n`
/// over `L`, i.e. `{x_1 - a_1, ..., x_n - a_n}_{L/k}`. A `P^1` factor has
/// trivial Jacobian, so such points map to zero.
pub fn cycle_symbol(
    a: &SomekawaApprox,
    curves: &[Curve],
    l: &FieldExtension,
    x: &[CurvePoint],
) -> Result<GroupElement> {
    if curves.len() != x.len() {
        return Err(Error::GroupMismatch);
    }
    let k = a.config().base.clone();
    for (c, p) in curves.iter().zip(x) {
        if *c.base_field() != k {
            return Err(Error::FieldMismatch);
        }
        check_pointed(c, l, p, a)?;
    }
    if curves.iter().any(|c| !c.is_elliptic()) {
        return Ok(a.group().zero());
    }
    if curves.len() != a.config().rank() {
        return Err(Error::GroupMismatch);
    }
    let mut pts = Vec::with_capacity(x.len());
    for ((c, p), g) in curves.iter().zip(x).zip(&a.config().groups) {
        if g.torus_rank() != 0 || g.curve_coefficients() != c.coefficients() {
            return Err(Error::Config(format!("slot {} is not the Jacobian of {}", g.literal(), c.literal())));
        }
        let CurvePoint::Elliptic(pt) = p else { unreachable!() };
        pts.push(GPoint { torus: Vec::new(), ell: Some(pt.clone()) });
    }
    a.symbol_eval(&[SymbolTerm::new(l, pts)])
}

/// Round trip on one elliptic curve: the push-forward `e [x] - e deg(x) [O]` of
/// `Spec L -> E` given by `P`, `e = [L : k(x)]`, sent through `cycle_symbol` and the norm collapse, must give
/// its class in `Pic^0(E) = E(k)`.
#[derive(Clone, Debug, Serialize)]
pub struct CycleRoundTrip {
    pub place: String,
    pub degree: usize,
    pub via_symbol: String,
    pub via_divisor: String,
    pub agree: bool,
}

pub fn cycle_round_trip(
    a: &SomekawaApprox,
    c: &Curve,
    l: &FieldExtension,
    p: &EcPoint<FFElement>,
) -> Result<CycleRoundTrip> {
    let g = &a.config().groups[0];
    let k = g.base_field().clone();
    let class = cycle_symbol(a, std::slice::from_ref(c), l, &[CurvePoint::Elliptic(p.clone())])?;
    // collapse: evaluate the norm directly, then compare classes in the quotient
    let collapsed = g.g_norm(&k, l, &GPoint { torus: Vec::new(), ell: Some(p.clone()) })?;
    let back = a.symbol_eval(&[SymbolTerm::new(&k, vec![collapsed.clone()])])?;
    let (place, degree, div_class) = match p {
        EcPoint::Infinity => ("v(O)".to_string(), 1, EcPoint::Infinity),
        EcPoint::Affine(x0, y0) => {
            let v = c.place_at_point(l, *x0, *y0)?;
            // Spec L -> C pushes forward to [L : k(x)] [x]
            let e = (g.relative_degree(l)? / v.degree()) as i64;
            let mut d = Divisor::new();
            d.add_term(v.clone(), e);
            d.add_term(c.origin()?, -e * v.degree() as i64);
            (v.literal(), v.degree(), c.divisor_class(&d)?)
        }
    };
    let via_divisor = GPoint { torus: Vec::new(), ell: Some(div_class) };
    let agree = a.group().eq(&class, &back)? && via_divisor == collapsed;
    Ok(CycleRoundTrip {
        place,
        degree,
        via_symbol: g.format_point(&k, &collapsed),
        via_divisor: g.format_point(&k, &via_divisor),
        agree,
    })
}

/// Second slot of a two-slot family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SecondMap {
    /// `f_2 = c` for a unit `c` of `k`.
    Constant(FFElement),
    /// `f_2 = u^e` (torus families only).
    Power(i64),
}

/// Supported curves `Z` with a finite surjective `p: Z -> A^1`.
#[derive(Clone, Debug)]
pub enum HomotopyShape {
    /// `Z = A^1 x {P}`, `P` a point of `G_1 x ... x G_r` over `L`.
    ConstantSection { field: FieldExtension, points: Vec<GPoint<FFElement>> },
    /// `Z: P(t, u) = 0` in `A^1 x G_m`, `P = sum_i c_i(t) u^i` monic in `u` with
    /// nonzero constant `c_0`; `f_1 = u`.
    TorusHypersurface { coeffs: Vec<Poly>, second: Option<SecondMap> },
    /// `Z = E` with `p = h` a regular function on `E - O`; `f_1` the inclusion.
    EllipticFunction { curve: Curve, h: FuncElement, second: Option<SecondMap> },
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberPoint {
    pub multiplicity: i64,
    pub degree: usize,
    pub point: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct HomotopyReport {
    pub fiber0: Vec<FiberPoint>,
    pub fiber1: Vec<FiberPoint>,
    pub phi0: String,
    pub phi1: String,
    pub equal: bool,
    /// For `r = 1`: whether both sides have the same norm image in `G(k)`.
    pub collapse_equal: Option<bool>,
}

fn fibers_torus(
    a: &SomekawaApprox,
    coeffs: &[Poly],
    second: &Option<SecondMap>,
    j: i64,
) -> Result<(Vec<SymbolTerm>, Vec<FiberPoint>)> {
    let cfg = a.config();
    let k = &cfg.base;
    let ring = PolyRing::new(k);
    let jj = k.from_int(j);
    let fiber = ring.from_coeffs(coeffs.iter().map(|c| ring.eval(c, jj)).collect());
    let mut terms = Vec::new();
    let mut log = Vec::new();
    for (phi, n) in ring.factor(&fiber) {
        let deg = phi.degree().unwrap_or(0);
        if deg > cfg.degree_bound {
            return Err(Error::DegreeOverflow { degree: deg, bound: cfg.degree_bound });
        }
        let l = cfg.groups[0].extension(deg)?;
        let emb = cfg.groups[0].embedding_to(&l)?;
        let lr = PolyRing::new(&l);
        let root = *lr
            .roots(&ring.map_to(&phi, &emb))
            .first()
            .ok_or_else(|| Error::Invariant("irreducible factor without a root in its splitting field".into()))?;
        let mut pts = vec![GPoint { torus: vec![root], ell: None }];
        match second {
            None => {}
            Some(SecondMap::Constant(c)) => pts.push(GPoint { torus: vec![emb.apply(*c)], ell: None }),
            Some(SecondMap::Power(e)) => pts.push(GPoint { torus: vec![l.pow(root, *e)?], ell: None }),
        }
        log.push(FiberPoint {
            multiplicity: n as i64,
            degree: deg,
            point: format!("u = {}", element_string(&l, root)),
        });
        terms.push(SymbolTerm::new(&l, pts).times(n as i64));
    }
    Ok((terms, log))
}

fn fibers_elliptic(
    a: &SomekawaApprox,
    c: &Curve,
    h: &FuncElement,
    second: &Option<SecondMap>,
    j: i64,
) -> Result<(Vec<SymbolTerm>, Vec<FiberPoint>)> {
    let cfg = a.config();
    let k = &cfg.base;
    let hj = c.sub(h, &c.constant(k.from_int(j)));
    if hj.is_zero() {
        return Err(Error::UnsupportedShape("p must be non-constant".into()));
    }
    let div = c.divisor_bounded(&hj, cfg.degree_bound)?;
    let mut terms = Vec::new();
    let mut log = Vec::new();
    for (v, &n) in div.terms() {
        if matches!(v.kind(), PlaceKind::Origin) {
            continue;
        }
        if n < 0 {
            return Err(Error::UnsupportedShape("p has a pole away from O".into()));
        }
        let l = v.residue_field();
        let pt = v.point().expect("affine place");
        let mut pts = vec![GPoint { torus: Vec::new(), ell: Some(pt.clone()) }];
        match second {
            None => {}
            Some(SecondMap::Constant(cst)) => {
                let emb = cfg.groups[0].embedding_to(l)?;
                pts.push(GPoint { torus: vec![emb.apply(*cst)], ell: None });
            }
            Some(SecondMap::Power(_)) => return Err(Error::UnsupportedShape("powers of u need a torus family".into())),
        }
        log.push(FiberPoint { multiplicity: n, degree: v.degree(), point: v.literal() });
        terms.push(SymbolTerm::new(l, pts).times(n));
    }
    Ok((terms, log))
}

fn check_slots(a: &SomekawaApprox, want: &[(usize, bool)]) -> Result<()> {
    let gs = &a.config().groups;
    let ok =
        gs.len() == want.len() && gs.iter().zip(want).all(|(g, &(n, e))| g.torus_rank() == n && g.has_elliptic() == e);
    if !ok {
        return Err(Error::UnsupportedShape("the build's groups do not match the family".into()));
    }
    Ok(())
}

/// Compute `phi_j = sum n_i {f_1, ..., f_r}(z_i)` over the fibers `j = 0, 1`
/// and compare their classes.
pub fn phi_homotopy_check(a: &SomekawaApprox, z: &HomotopyShape) -> Result<HomotopyReport> {
    let (t0, l0, t1, l1) = match z {
        HomotopyShape::ConstantSection { field, points } => {
            let t = vec![SymbolTerm::new(field, points.clone())];
            let fp = vec![FiberPoint {
                multiplicity: 1,
                degree: a.config().groups[0].relative_degree(field)?,
                point: "P".into(),
            }];
            (t.clone(), fp.clone(), t, fp)
        }
        HomotopyShape::TorusHypersurface { coeffs, second } => {
            check_slots(a, if second.is_some() { &[(1, false), (1, false)] } else { &[(1, false)] })?;
            let k = &a.config().base;
            let lead = coeffs.last().ok_or_else(|| Error::UnsupportedShape("empty polynomial".into()))?;
            if coeffs.len() < 2 || *lead != PolyRing::new(k).one() {
                return Err(Error::UnsupportedShape("P must be monic in u of positive degree".into()));
            }
            if coeffs[0].degree() != Some(0) {
                return Err(Error::UnsupportedShape("c_0 must be a nonzero constant so that u is a unit on Z".into()));
            }
            if let Some(SecondMap::Constant(c)) = second {
                if k.is_zero(*c) {
                    return Err(Error::ZeroElement);
                }
            }
            let (t0, l0) = fibers_torus(a, coeffs, second, 0)?;
            let (t1, l1) = fibers_torus(a, coeffs, second, 1)?;
            (t0, l0, t1, l1)
        }
        HomotopyShape::EllipticFunction { curve, h, second } => {
            check_slots(a, if second.is_some() { &[(0, true), (1, false)] } else { &[(0, true)] })?;
            if a.config().groups[0].curve_coefficients() != curve.coefficients() {
                return Err(Error::UnsupportedShape("the family lives on a different curve".into()));
            }
            if !h.a().is_polynomial() || !h.b().is_polynomial() {
                return Err(Error::UnsupportedShape("p must be regular away from O".into()));
            }
            let (t0, l0) = fibers_elliptic(a, curve, h, second, 0)?;
            let (t1, l1) = fibers_elliptic(a, curve, h, second, 1)?;
            (t0, l0, t1, l1)
        }
    };
    let phi0 = a.symbol_eval(&t0)?;
    let phi1 = a.symbol_eval(&t1)?;
    let equal = a.group().eq(&phi0, &phi1)?;
    let collapse_equal = if a.config().rank() == 1 {
        let g = &a.config().groups[0];
        let k = g.base_field();
        let image = |ts: &[SymbolTerm]| -> Result<GPoint<FFElement>> {
            let mut acc = g.identity(k);
            for t in ts {
                let n = g.g_norm(k, &t.field, &t.points[0])?;
                acc = g.add(k, &acc, &g.scalar(k, &n, t.coeff)?)?;
            }
            Ok(acc)
        };
        Some(image(&t0)? == image(&t1)?)
    } else {
        None
    };
    Ok(HomotopyReport {
        fiber0: l0,
        fiber1: l1,
        phi0: format!("{:?}", phi0.coords()),
        phi1: format!("{:?}", phi1.coords()),
        equal,
        collapse_equal,
    })
}

/// Random supported families for the groups of `b`: torus hypersurfaces of
/// `u`-degree at most 2 with linear coefficients when the first slot is `G_m`,
/// functions `a(x) + c y` with `deg a <= 2` when it is `E`.
pub fn random_homotopy_shapes<R: Rng>(b: &SomekawaApprox, n: usize, rng: &mut R) -> Result<Vec<HomotopyShape>> {
    let cfg = b.config();
    let k = &cfg.base;
    let units: Vec<_> = k.units().collect();
    let shape: Vec<(usize, bool)> = cfg.groups.iter().map(|g| (g.torus_rank(), g.has_elliptic())).collect();
    let mut out = Vec::with_capacity(n);
    let line = Curve::rational_line(k)?;
    for _ in 0..n {
        let two = shape.len() == 2;
        match shape[0] {
            (1, false) => {
                let deg = rng.gen_range(1..=2);
                let r = line.poly_ring();
                let mut coeffs = vec![r.constant(units[rng.gen_range(0..units.len())])];
                for _ in 1..deg {
                    coeffs.push(line.random_poly(rng, 1));
                }
                coeffs.push(r.one());
                let second = two.then(|| {
                    if rng.gen_bool(0.5) {
                        SecondMap::Constant(units[rng.gen_range(0..units.len())])
                    } else {
                        SecondMap::Power(rng.gen_range(-2..=2))
                    }
                });
                out.push(HomotopyShape::TorusHypersurface { coeffs, second });
            }
            (0, true) => {
                let curve = cfg.groups[0].elliptic_curve()?.expect("elliptic slot");
                let h = loop {
                    let p = curve.random_poly(rng, 2);
                    let h = curve
                        .add(&curve.from_poly(p), &curve.scale(&curve.y(), k.from_index(rng.gen_range(0..k.order()))));
                    if !curve.is_constant(&h) {
                        break h;
                    }
                };
                let second = two.then(|| SecondMap::Constant(units[rng.gen_range(0..units.len())]));
                out.push(HomotopyShape::EllipticFunction { curve, h, second });
            }
            _ => return Err(Error::UnsupportedShape("random families need Gm or E in the first slot".into())),
        }
    }
    Ok(out)
}
