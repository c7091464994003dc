use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::curve::{element_string, format_poly, Curve, FuncElement};
use super::rational::RatOps;
use super::series::{add_series, mul_series, rat_series, sqrt_series, taylor_shift, Laurent};
use crate::elliptic::EcPoint;
use crate::error::{Error, Result};
use crate::finite_field::{Embedding, FFElement, FieldExtension};
use crate::poly::{Poly, PolyRing};

#[derive(Clone, Debug)]
pub enum PlaceKind {
    /// Zero of the monic irreducible `pi(t)`; `root` is the least root in the residue field.
    Finite {
        pi: Poly,
        root: FFElement,
    },
    Infinity,
    /// Frobenius orbit of `(x0, y0)`, canonical (least) representative; `pi` is
    /// the minimal polynomial of `x0` over `k`.
    Point {
        pi: Poly,
        x0: FFElement,
        y0: FFElement,
    },
    /// The point at infinity of an elliptic curve.
    Origin,
}

type PlaceKey = (usize, u8, Vec<u32>, Vec<u32>, Vec<u32>);

struct PlaceData {
    curve: u64,
    kind: PlaceKind,
    degree: usize,
    residue: FieldExtension,
    emb: Embedding,
    key: PlaceKey,
}

/// A closed point of a curve, with its residue field `k(v)` and `k -> k(v)`.
#[derive(Clone)]
pub struct Place(Arc<PlaceData>);

impl Place {
    pub fn kind(&self) -> &PlaceKind {
        &self.0.kind
    }

    /// Residue degree over `k`.
    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn residue_field(&self) -> &FieldExtension {
        &self.0.residue
    }

    /// The embedding `k -> k(v)`.
    pub fn embedding(&self) -> &Embedding {
        &self.0.emb
    }

    pub fn curve_id(&self) -> u64 {
        self.0.curve
    }

    pub fn is_two_torsion(&self) -> bool {
        matches!(&self.0.kind, PlaceKind::Point { y0, .. } if self.0.residue.is_zero(*y0))
    }

    /// The representative point over `k(v)` (elliptic places only).
    pub fn point(&self) -> Option<EcPoint<FFElement>> {
        match &self.0.kind {
            PlaceKind::Point { x0, y0, .. } => Some(EcPoint::Affine(*x0, *y0)),
            PlaceKind::Origin => Some(EcPoint::Infinity),
            _ => None,
        }
    }

    pub fn literal(&self) -> String {
        let l = &self.0.residue;
        match &self.0.kind {
            PlaceKind::Finite { pi, .. } => format!("v({})", format_poly(self.0.emb.src(), pi, "t")),
            PlaceKind::Infinity => "v(inf)".into(),
            PlaceKind::Point { x0, y0, .. } => format!("v({},{})", element_string(l, *x0), element_string(l, *y0)),
            PlaceKind::Origin => "v(O)".into(),
        }
    }
}

impl PartialEq for Place {
    fn eq(&self, other: &Self) -> bool {
        self.0.curve == other.0.curve && self.0.key == other.0.key
    }
}

impl Eq for Place {}

impl PartialOrd for Place {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Place {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.0.curve, &self.0.key).cmp(&(other.0.curve, &other.0.key))
    }
}

impl Hash for Place {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.0.curve.hash(h);
        self.0.key.hash(h);
    }
}

impl fmt::Debug for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[deg {}]", self.literal(), self.0.degree)
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.literal())
    }
}

impl Curve {
    fn make_place(&self, kind: PlaceKind, degree: usize) -> Result<Place> {
        let (residue, emb) = self.residue_field(degree)?;
        let key = match &kind {
            PlaceKind::Finite { pi, .. } => (degree, 1, pi.key(), vec![], vec![]),
            PlaceKind::Infinity => (degree, 0, vec![], vec![], vec![]),
            PlaceKind::Point { pi, x0, y0 } => (degree, 1, pi.key(), residue.coeffs(*x0), residue.coeffs(*y0)),
            PlaceKind::Origin => (degree, 0, vec![], vec![], vec![]),
        };
        Ok(Place(Arc::new(PlaceData { curve: self.id(), kind, degree, residue, emb, key })))
    }

    fn check_place(&self, v: &Place) -> Result<()> {
        if v.0.curve != self.id() {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    /// The finite place `(pi)` of `P^1`; `pi` must be monic irreducible.
    pub fn place_finite(&self, pi: &Poly) -> Result<Place> {
        if self.is_elliptic() {
            return Err(Error::Config("finite places of P1 requested on an elliptic curve".into()));
        }
        let r = self.poly_ring();
        if !r.is_monic(pi) {
            return Err(Error::NotMonic);
        }
        if !r.is_irreducible(pi) {
            return Err(Error::Reducible { witness: pi.key() });
        }
        let deg = pi.degree().unwrap_or(0);
        let (l, emb) = self.residue_field(deg)?;
        let root = lowest_root(&l, &r.map_to(pi, &emb));
        self.make_place(PlaceKind::Finite { pi: pi.clone(), root }, deg)
    }

    pub fn place_infinity(&self) -> Result<Place> {
        if self.is_elliptic() {
            return Err(Error::Config("use the origin O on an elliptic curve".into()));
        }
        self.make_place(PlaceKind::Infinity, 1)
    }

    pub fn origin(&self) -> Result<Place> {
        if !self.is_elliptic() {
            return Err(Error::Config("O is only defined on an elliptic curve".into()));
        }
        self.make_place(PlaceKind::Origin, 1)
    }

    /// The places of an elliptic curve over `pi(x) = 0`, each of residue
    /// degree at most `bound`.
    pub fn places_over(&self, pi: &Poly, bound: usize) -> Result<Vec<Place>> {
        let rhs = self.weierstrass_rhs().ok_or(Error::Config("places over x need an elliptic curve".into()))?;
        let r = self.poly_ring();
        let delta = pi.degree().unwrap_or(0);
        if delta == 0 || !r.is_monic(pi) || !r.is_irreducible(pi) {
            return Err(Error::Reducible { witness: pi.key() });
        }
        if delta > bound {
            return Err(Error::DegreeOverflow { degree: delta, bound });
        }
        let (l, emb) = self.residue_field(delta)?;
        let x0 = lowest_root(&l, &r.map_to(pi, &emb));
        let fx = r.eval_in(&rhs, &emb, x0);
        if l.is_zero(fx) {
            return Ok(vec![self.canonical_point(pi, &l, x0, fx, delta)?]);
        }
        if let Some(s) = l.sqrt(fx) {
            let mut out =
                vec![self.canonical_point(pi, &l, x0, s, delta)?, self.canonical_point(pi, &l, x0, l.neg(s), delta)?];
            out.sort();
            return Ok(out);
        }
        if 2 * delta > bound {
            return Err(Error::DegreeOverflow { degree: 2 * delta, bound });
        }
        let (l2, emb2) = self.residue_field(2 * delta)?;
        let up = self.tower().embedding(l.degree(), l2.degree())?;
        let x0 = up.apply(x0);
        let s = l2
            .sqrt(r.eval_in(&rhs, &emb2, x0))
            .expect("every element of the quadratic extension's subfield is a square");
        Ok(vec![self.canonical_point(pi, &l2, x0, s, 2 * delta)?])
    }

    fn canonical_point(
        &self,
        pi: &Poly,
        l: &FieldExtension,
        x0: FFElement,
        y0: FFElement,
        deg: usize,
    ) -> Result<Place> {
        let q = self.base_field().order() as u64;
        let mut best = (x0, y0);
        let (mut x, mut y) = (x0, y0);
        for _ in 1..deg {
            x = l.pow_u(x, q);
            y = l.pow_u(y, q);
            if (l.coeffs(x), l.coeffs(y)) < (l.coeffs(best.0), l.coeffs(best.1)) {
                best = (x, y);
            }
        }
        self.make_place(PlaceKind::Point { pi: pi.clone(), x0: best.0, y0: best.1 }, deg)
    }

    /// The place at a point `(x0, y0)` with coordinates in the tower field
    /// `l` (any extension of `k` in the tower), canonicalized.
    pub fn place_at_point(&self, l: &FieldExtension, x0: FFElement, y0: FFElement) -> Result<Place> {
        let rhs = self.weierstrass_rhs().ok_or(Error::Config("points need an elliptic curve".into()))?;
        let k = self.base_field();
        if !l.degree().is_multiple_of(k.degree()) {
            return Err(Error::NoEmbedding { src: k.degree(), dst: l.degree() });
        }
        let big = l.degree() / k.degree();
        let (lb, embb) = self.residue_field(big)?;
        if lb != *l {
            return Err(Error::FieldMismatch);
        }
        if l.mul(y0, y0) != PolyRing::new(k).eval_in(&rhs, &embb, x0) {
            return Err(Error::InvalidCurve("point is not on the curve".into()));
        }
        let q = k.order() as u64;
        let mut deg = 1;
        let (mut x, mut y) = (l.pow_u(x0, q), l.pow_u(y0, q));
        while (x, y) != (x0, y0) {
            x = l.pow_u(x, q);
            y = l.pow_u(y, q);
            deg += 1;
        }
        let (ld, _) = self.residue_field(deg)?;
        let down = self.tower().embedding(ld.degree(), l.degree())?;
        let (xd, yd) = (down.preimage(x0).ok_or(Error::FieldMismatch)?, down.preimage(y0).ok_or(Error::FieldMismatch)?);
        let pi = self.min_poly(&ld, xd)?;
        self.canonical_point(&pi, &ld, xd, yd, deg)
    }

    /// Minimal polynomial over `k` of an element of the residue field `l`.
    fn min_poly(&self, l: &FieldExtension, a: FFElement) -> Result<Poly> {
        let k = self.base_field();
        let deg = l.degree() / k.degree();
        let (_, emb) = self.residue_field(deg)?;
        let q = k.order() as u64;
        let rl = PolyRing::new(l);
        let mut f = rl.one();
        let mut c = a;
        loop {
            f = rl.mul(&f, &rl.linear(c));
            c = l.pow_u(c, q);
            if c == a {
                break;
            }
        }
        let coeffs: Option<Vec<FFElement>> = f.coeffs().iter().map(|&z| emb.preimage(z)).collect();
        Ok(self.poly_ring().from_coeffs(coeffs.ok_or(Error::Invariant("minimal polynomial not over k".into()))?))
    }

    /// A global function with `ord_v = 1`.
    pub fn uniformizer(&self, v: &Place) -> Result<FuncElement> {
        self.check_place(v)?;
        Ok(match &v.0.kind {
            PlaceKind::Finite { pi, .. } => self.from_poly(pi.clone()),
            PlaceKind::Infinity => self.inv(&self.var())?,
            PlaceKind::Point { pi, .. } if !v.is_two_torsion() => self.from_poly(pi.clone()),
            PlaceKind::Point { .. } => self.y(),
            PlaceKind::Origin => self.div(&self.var(), &self.y())?,
        })
    }

    /// The discrete valuation `ord_v(f)`.
    pub fn ord(&self, v: &Place, f: &FuncElement) -> Result<i64> {
        self.check_place(v)?;
        self.check(f)?;
        if f.is_zero() {
            return Err(Error::ZeroElement);
        }
        let (a, b) = (f.a(), f.b());
        let big = i64::MAX / 4;
        Ok(match &v.0.kind {
            PlaceKind::Finite { pi, .. } => self.rat_ord(a, pi),
            PlaceKind::Infinity => -a.degree().expect("nonzero"),
            PlaceKind::Origin => {
                let oa = a.degree().map_or(big, |d| -2 * d);
                let ob = b.degree().map_or(big, |d| -2 * d - 3);
                oa.min(ob)
            }
            PlaceKind::Point { pi, .. } if v.is_two_torsion() => {
                let oa = if a.is_zero() { big } else { 2 * self.rat_ord(a, pi) };
                let ob = if b.is_zero() { big } else { 2 * self.rat_ord(b, pi) + 1 };
                oa.min(ob)
            }
            PlaceKind::Point { pi, .. } => {
                if b.is_zero() {
                    return Ok(self.rat_ord(a, pi));
                }
                let bound = self.expansion_bound(pi, f);
                let s = self.expand(v, f, bound + 1);
                let l = v.residue_field();
                (s.val..=bound)
                    .find(|&i| !l.is_zero(s.at(l, i)))
                    .ok_or(Error::Invariant("local expansion exhausted its precision bound".into()))?
            }
        })
    }

    /// `ord_x0(N f) - min(ord_x0 a, ord_x0 b)` bounds `ord_P(f)` above.
    fn expansion_bound(&self, pi: &Poly, f: &FuncElement) -> i64 {
        let n = self.norm_down(f);
        let lo = [f.a(), f.b()].iter().filter(|r| !r.is_zero()).map(|r| self.rat_ord(r, pi)).min().unwrap_or(0);
        self.rat_ord(&n, pi) - lo
    }

    /// Expansion of `f` in `u = x - x0` at a non-2-torsion point, through index `upto - 1`.
    fn expand(&self, v: &Place, f: &FuncElement, upto: i64) -> Laurent {
        let PlaceKind::Point { x0, y0, .. } = &v.0.kind else { unreachable!("affine place") };
        let l = v.residue_field();
        let emb = v.embedding();
        let empty = Laurent { val: upto, c: Vec::new() };
        let sa = if f.a().is_zero() { empty.clone() } else { rat_series(l, emb, f.a(), *x0, upto) };
        if f.b().is_zero() {
            return sa;
        }
        let sb = rat_series(l, emb, f.b(), *x0, upto);
        let g = taylor_shift(l, emb, &self.weierstrass_rhs().expect("elliptic"), *x0);
        let ylen = (upto - sb.val).max(0) as usize;
        let ys = sqrt_series(l, &g, *y0, ylen);
        let by = mul_series(l, &sb, &ys, upto);
        add_series(l, &sa, &by, upto)
    }

    /// The image of `f` in `k(v)`; requires `ord_v(f) >= 0`.
    pub fn reduce(&self, v: &Place, f: &FuncElement) -> Result<FFElement> {
        self.check_place(v)?;
        self.check(f)?;
        let l = v.residue_field();
        if f.is_zero() {
            return Ok(l.zero());
        }
        let o = self.ord(v, f)?;
        if o < 0 {
            return Err(Error::PoleAtPlace);
        }
        if o > 0 {
            return Ok(l.zero());
        }
        let emb = v.embedding();
        let r = self.poly_ring();
        let k = self.base_field();
        Ok(match &v.0.kind {
            PlaceKind::Finite { root, .. } => {
                let a = f.a();
                l.div(r.eval_in(a.num(), emb, *root), r.eval_in(a.den(), emb, *root))?
            }
            PlaceKind::Infinity | PlaceKind::Origin => {
                let a = f.a();
                emb.apply(k.div(a.num().lc().expect("nonzero"), a.den().lc().expect("monic"))?)
            }
            PlaceKind::Point { x0, .. } if v.is_two_torsion() => {
                let a = f.a();
                l.div(r.eval_in(a.num(), emb, *x0), r.eval_in(a.den(), emb, *x0))?
            }
            PlaceKind::Point { .. } => self.expand(v, f, 1).at(l, 0),
        })
    }
}

/// Least root (by coefficient vector) of a polynomial over `l`.
fn lowest_root(l: &FieldExtension, f: &Poly) -> FFElement {
    let roots = PolyRing::new(l).roots(f);
    roots.into_iter().min_by(|a, b| l.lex_cmp(*a, *b)).expect("irreducible polynomial splits in its residue field")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_field::Tower;

    fn f(p: u64, m: usize) -> FieldExtension {
        Tower::for_prime(p).unwrap().field(m).unwrap()
    }

    #[test]
    fn p1_orders_and_reductions() {
        let k = f(5, 1);
        let c = Curve::rational_line(&k).unwrap();
        let r = c.poly_ring();
        let t = c.var();
        let inf = c.place_infinity().unwrap();
        assert_eq!(c.ord(&inf, &t).unwrap(), -1);
        let v0 = c.place_finite(&r.x()).unwrap();
        let g = c.fraction(r.from_ints(&[0, 0, 1]), r.from_ints(&[-1, 1])).unwrap();
        assert_eq!(c.ord(&v0, &g).unwrap(), 2);
        let h = c.fraction(r.one(), r.from_ints(&[1, -1])).unwrap();
        assert_eq!(c.reduce(&v0, &h).unwrap(), k.one());
        assert!(matches!(c.reduce(&inf, &t), Err(Error::PoleAtPlace)));
    }

    #[test]
    fn reduction_at_degree_two_place() {
        let k = f(3, 1);
        let c = Curve::rational_line(&k).unwrap();
        let v = c.place_finite(&c.poly_ring().from_ints(&[1, 0, 1])).unwrap();
        assert_eq!(v.degree(), 2);
        let red = c.reduce(&v, &c.var()).unwrap();
        assert_eq!(v.residue_field().element_order(red), Some(4));
    }

    #[test]
    fn y_has_triple_pole_at_origin() {
        let k = f(5, 1);
        let c = Curve::elliptic(&k, k.zero(), k.one()).unwrap();
        let o = c.origin().unwrap();
        assert_eq!(c.ord(&o, &c.y()).unwrap(), -3);
        assert_eq!(c.ord(&o, &c.var()).unwrap(), -2);
        let u = c.uniformizer(&o).unwrap();
        assert_eq!(c.ord(&o, &u).unwrap(), 1);
    }

    #[test]
    fn places_over_x_zero() {
        // y^2 = x^3 + 1 over F_5: x = 0 gives y = +-1, two rational places
        let k = f(5, 1);
        let c = Curve::elliptic(&k, k.zero(), k.one()).unwrap();
        let ps = c.places_over(&c.poly_ring().x(), 4).unwrap();
        assert_eq!(ps.len(), 2);
        for v in &ps {
            assert_eq!(c.ord(v, &c.var()).unwrap(), 1);
            assert_eq!(c.ord(v, &c.sub(&c.y(), &c.one())).unwrap() + c.ord(v, &c.add(&c.y(), &c.one())).unwrap(), 3);
        }
        // x = -1 is 2-torsion: y = 0
        let ps = c.places_over(&c.poly_ring().from_ints(&[1, 1]), 4).unwrap();
        assert_eq!(ps.len(), 1);
        assert!(ps[0].is_two_torsion());
        assert_eq!(c.ord(&ps[0], &c.y()).unwrap(), 1);
        assert_eq!(c.ord(&ps[0], &c.add(&c.var(), &c.one())).unwrap(), 2);
    }

    #[test]
    fn inert_place_has_degree_two() {
        // y^2 = x^3 + 1 over F_5 at x = 2: 9 = 4 is a square; at x = 3: 28 = 3 is not
        let k = f(5, 1);
        let c = Curve::elliptic(&k, k.zero(), k.one()).unwrap();
        let ps = c.places_over(&c.poly_ring().from_ints(&[-3, 1]), 4).unwrap();
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].degree(), 2);
        assert!(matches!(c.places_over(&c.poly_ring().from_ints(&[-3, 1]), 1), Err(Error::DegreeOverflow { .. })));
    }
}
