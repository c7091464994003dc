//! Split semi-abelian varieties `G = G_m^n x E` over a finite field `k`:
//! points over extensions and over function fields, norms, reductions and
//! the extended tame symbol.

use std::sync::Arc;

use crate::elliptic::{trace_point, EcPoint, Weierstrass};
use crate::error::{Error, Result};
use crate::finite_field::{Embedding, FFElement, FieldExtension, Tower};
use crate::function_field::{element_string, Curve, FuncElement, Place};

/// A point of `G`: `n` torus coordinates and, if `G` has an elliptic part,
/// a point of `E`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GPoint<T> {
    pub torus: Vec<T>,
    pub ell: Option<EcPoint<T>>,
}

/// `G_m^n x E` (or `G_m^n`) over a tower field `k`.
#[derive(Clone, Debug)]
pub struct SemiAbelian {
    k: FieldExtension,
    tower: Arc<Tower>,
    n: usize,
    ell: Option<(FFElement, FFElement)>,
}

impl SemiAbelian {
    pub fn new(k: &FieldExtension, n: usize, ell: Option<(FFElement, FFElement)>) -> Result<Self> {
        let tower = Tower::for_prime(k.characteristic() as u64)?;
        if tower.field(k.degree())? != *k {
            return Err(Error::Config("the base field of a group must be a canonical tower field".into()));
        }
        if let Some((a, b)) = ell {
            crate::elliptic::check_nonsingular(k, a, b)?;
        }
        if n == 0 && ell.is_none() {
            return Err(Error::Config("empty group".into()));
        }
        Ok(SemiAbelian { k: k.clone(), tower, n, ell })
    }

    pub fn gm(k: &FieldExtension) -> Result<Self> {
        Self::new(k, 1, None)
    }

    pub fn elliptic(k: &FieldExtension, a: FFElement, b: FFElement) -> Result<Self> {
        Self::new(k, 0, Some((a, b)))
    }

    pub fn torus_rank(&self) -> usize {
        self.n
    }

    pub fn has_elliptic(&self) -> bool {
        self.ell.is_some()
    }

    pub fn base_field(&self) -> &FieldExtension {
        &self.k
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn curve_coefficients(&self) -> Option<(FFElement, FFElement)> {
        self.ell
    }

    /// The elliptic part as a curve over `k`, whose function field is a relation source.
    pub fn elliptic_curve(&self) -> Result<Option<Curve>> {
        self.ell.map(|(a, b)| Curve::elliptic(&self.k, a, b)).transpose()
    }

    pub fn literal(&self) -> String {
        let mut parts = Vec::new();
        if self.n > 0 {
            parts.push(if self.n == 1 { "Gm".to_string() } else { format!("Gm^{}", self.n) });
        }
        if let Some((a, b)) = self.ell {
            parts.push(format!(
                "E({}; {},{})",
                self.k.literal(),
                element_string(&self.k, a),
                element_string(&self.k, b)
            ));
        }
        parts.join(" x ")
    }

    /// The tower embedding `src -> dst`.
    pub fn tower_embedding(&self, src: &FieldExtension, dst: &FieldExtension) -> Result<Embedding> {
        if src.characteristic() != self.k.characteristic() {
            return Err(Error::FieldMismatch);
        }
        self.tower.embedding(src.degree(), dst.degree())
    }

    /// `k -> l`.
    pub fn embedding_to(&self, l: &FieldExtension) -> Result<Embedding> {
        self.tower_embedding(&self.k, l)
    }

    /// The tower field of degree `m` over `k`.
    pub fn extension(&self, m: usize) -> Result<FieldExtension> {
        self.tower.field(self.k.degree() * m)
    }

    /// Degree of a tower field `l` over `k`.
    pub fn relative_degree(&self, l: &FieldExtension) -> Result<usize> {
        if !l.degree().is_multiple_of(self.k.degree()) {
            return Err(Error::NoEmbedding { src: self.k.degree(), dst: l.degree() });
        }
        Ok(l.degree() / self.k.degree())
    }

    pub fn law_over(&self, l: &FieldExtension) -> Result<Option<Weierstrass<FieldExtension>>> {
        let Some((a, b)) = self.ell else { return Ok(None) };
        let e = self.embedding_to(l)?;
        Ok(Some(Weierstrass::new(l.clone(), e.apply(a), e.apply(b))))
    }

    /// The law of `E` over the function field of `c` (constants of `c` must contain `k`).
    pub fn law_over_function_field(&self, c: &Curve) -> Result<Option<Weierstrass<Curve>>> {
        let Some((a, b)) = self.ell else { return Ok(None) };
        let e = self.embedding_to(c.base_field())?;
        Ok(Some(Weierstrass::new(c.clone(), c.constant(e.apply(a)), c.constant(e.apply(b)))))
    }

    // ---- points over finite fields ----

    pub fn identity(&self, l: &FieldExtension) -> GPoint<FFElement> {
        GPoint { torus: vec![l.one(); self.n], ell: self.ell.map(|_| EcPoint::Infinity) }
    }

    pub fn contains(&self, l: &FieldExtension, p: &GPoint<FFElement>) -> Result<bool> {
        if p.torus.len() != self.n || p.ell.is_some() != self.ell.is_some() {
            return Ok(false);
        }
        if p.torus.iter().any(|&x| !l.contains(x) || l.is_zero(x)) {
            return Ok(false);
        }
        Ok(match (&p.ell, self.law_over(l)?) {
            (Some(pt), Some(law)) => law.contains(pt),
            _ => true,
        })
    }

    fn check_shape<T>(&self, p: &GPoint<T>) -> Result<()> {
        if p.torus.len() != self.n || p.ell.is_some() != self.ell.is_some() {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn add(&self, l: &FieldExtension, p: &GPoint<FFElement>, q: &GPoint<FFElement>) -> Result<GPoint<FFElement>> {
        self.check_shape(p)?;
        self.check_shape(q)?;
        let torus = p.torus.iter().zip(&q.torus).map(|(&a, &b)| l.mul(a, b)).collect();
        let ell = match (&p.ell, &q.ell, self.law_over(l)?) {
            (Some(a), Some(b), Some(law)) => Some(law.add(a, b)?),
            _ => None,
        };
        Ok(GPoint { torus, ell })
    }

    pub fn neg(&self, l: &FieldExtension, p: &GPoint<FFElement>) -> Result<GPoint<FFElement>> {
        self.scalar(l, p, -1)
    }

    pub fn scalar(&self, l: &FieldExtension, p: &GPoint<FFElement>, m: i64) -> Result<GPoint<FFElement>> {
        self.check_shape(p)?;
        let torus = p.torus.iter().map(|&a| l.pow(a, m)).collect::<Result<Vec<_>>>()?;
        let ell = match (&p.ell, self.law_over(l)?) {
            (Some(a), Some(law)) => Some(law.scalar(a, m)?),
            _ => None,
        };
        Ok(GPoint { torus, ell })
    }

    pub fn is_identity(&self, l: &FieldExtension, p: &GPoint<FFElement>) -> bool {
        *p == self.identity(l)
    }

    /// Image of a point along the tower embedding `sub -> sup`.
    pub fn embed_point(
        &self,
        sub: &FieldExtension,
        sup: &FieldExtension,
        p: &GPoint<FFElement>,
    ) -> Result<GPoint<FFElement>> {
        let e = self.tower_embedding(sub, sup)?;
        Ok(GPoint {
            torus: p.torus.iter().map(|&x| e.apply(x)).collect(),
            ell: p.ell.as_ref().map(|q| q.map(|&c| e.apply(c))),
        })
    }

    /// Apply `x -> x^{|k|^j}` to every coordinate (a `k`-automorphism of `l`).
    pub fn frobenius_point(&self, l: &FieldExtension, p: &GPoint<FFElement>, j: usize) -> GPoint<FFElement> {
        let qj = (self.k.order() as u64).pow(j as u32);
        let f = |x: &FFElement| l.pow_u(*x, qj);
        GPoint { torus: p.torus.iter().map(f).collect(), ell: p.ell.as_ref().map(|q| q.map(f)) }
    }

    /// The norm `G(sup) -> G(sub)`: field norm on the torus, Galois trace on `E`.
    pub fn g_norm(
        &self,
        sub: &FieldExtension,
        sup: &FieldExtension,
        p: &GPoint<FFElement>,
    ) -> Result<GPoint<FFElement>> {
        self.check_shape(p)?;
        let e = self.tower_embedding(sub, sup)?;
        let torus = p.torus.iter().map(|&x| e.norm(x)).collect();
        let ell = match (&p.ell, self.law_over(sup)?) {
            (Some(pt), Some(law)) => Some(trace_point(&law, &e, pt)?),
            _ => None,
        };
        Ok(GPoint { torus, ell })
    }

    pub fn format_point(&self, l: &FieldExtension, p: &GPoint<FFElement>) -> String {
        let t: Vec<String> = p.torus.iter().map(|&x| element_string(l, x)).collect();
        let e = match &p.ell {
            None => String::new(),
            Some(EcPoint::Infinity) => ",O".into(),
            Some(EcPoint::Affine(x, y)) => format!(",({},{})", element_string(l, *x), element_string(l, *y)),
        };
        format!("(({}){})", t.join(","), e)
    }

    // ---- points over function fields ----

    /// A point with coordinates in the constants of `c`, viewed over `k(c)`.
    pub fn constant_point(&self, c: &Curve, p: &GPoint<FFElement>) -> GPoint<FuncElement> {
        GPoint {
            torus: p.torus.iter().map(|&x| c.constant(x)).collect(),
            ell: p.ell.as_ref().map(|q| q.map(|&x| c.constant(x))),
        }
    }

    pub fn contains_over(&self, c: &Curve, g: &GPoint<FuncElement>) -> Result<bool> {
        if g.torus.len() != self.n || g.ell.is_some() != self.ell.is_some() || g.torus.iter().any(|f| f.is_zero()) {
            return Ok(false);
        }
        Ok(match (&g.ell, self.law_over_function_field(c)?) {
            (Some(pt), Some(law)) => law.contains(pt),
            _ => true,
        })
    }

    /// `r_v(g)`: valuations of the torus coordinates.
    pub fn r_map(&self, c: &Curve, v: &Place, g: &GPoint<FuncElement>) -> Result<Vec<i64>> {
        g.torus.iter().map(|f| c.ord(v, f)).collect()
    }

    fn reduce_ec(&self, c: &Curve, v: &Place, p: &EcPoint<FuncElement>) -> Result<EcPoint<FFElement>> {
        match p {
            EcPoint::Infinity => Ok(EcPoint::Infinity),
            EcPoint::Affine(x, y) => {
                if !x.is_zero() && c.ord(v, x)? < 0 {
                    return Ok(EcPoint::Infinity);
                }
                let (rx, ry) = (c.reduce(v, x), c.reduce(v, y));
                match (rx, ry) {
                    (Ok(rx), Ok(ry)) => Ok(EcPoint::Affine(rx, ry)),
                    _ => Err(Error::Invariant("elliptic coordinate failed to reduce".into())),
                }
            }
        }
    }

    /// `g(v)` in `G(k(v))`; torus coordinates must be `v`-units.
    pub fn reduce_point(&self, c: &Curve, v: &Place, g: &GPoint<FuncElement>) -> Result<GPoint<FFElement>> {
        self.check_shape(g)?;
        let l = v.residue_field();
        let mut torus = Vec::with_capacity(self.n);
        for f in &g.torus {
            if f.is_zero() || c.ord(v, f)? != 0 {
                return Err(Error::NotIntegral);
            }
            torus.push(c.reduce(v, f)?);
        }
        let ell = match &g.ell {
            Some(p) => Some(self.reduce_ec(c, v, p)?),
            None => None,
        };
        let out = GPoint { torus, ell };
        if let (Some(pt), Some(law)) = (&out.ell, self.law_over(l)?) {
            if !law.contains(pt) {
                return Err(Error::Invariant("reduced elliptic point is off the curve".into()));
            }
        }
        Ok(out)
    }

    /// Whether `g` lies in `G(O_v)` (torus coordinates are `v`-units).
    pub fn is_integral(&self, c: &Curve, v: &Place, g: &GPoint<FuncElement>) -> Result<bool> {
        for f in &g.torus {
            if c.ord(v, f)? != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `d_v(g, h)`: torus coordinate `i` becomes `(-1)^{m r_i} g_i^m h^{-r_i}`,
    /// the elliptic coordinate `m * g_E`, with `m = ord_v(h)` and `r = r_v(g)`;
    /// the result is reduced into `G(k(v))`.
    pub fn extended_tame(
        &self,
        c: &Curve,
        v: &Place,
        g: &GPoint<FuncElement>,
        h: &FuncElement,
    ) -> Result<GPoint<FFElement>> {
        self.check_shape(g)?;
        if h.is_zero() {
            return Err(Error::ZeroElement);
        }
        let m = c.ord(v, h)?;
        let r = self.r_map(c, v, g)?;
        let mut torus = Vec::with_capacity(self.n);
        for (gi, &ri) in g.torus.iter().zip(&r) {
            let mut u = c.div(&c.pow(gi, m)?, &c.pow(h, ri)?)?;
            if (m * ri) % 2 != 0 {
                u = c.neg(&u);
            }
            torus.push(c.reduce(v, &u)?);
        }
        let ell = match (&g.ell, self.law_over_function_field(c)?) {
            (Some(p), Some(law)) => {
                let mp = if m == 0 { EcPoint::Infinity } else { law.scalar(p, m)? };
                Some(self.reduce_ec(c, v, &mp)?)
            }
            _ => None,
        };
        Ok(GPoint { torus, ell })
    }

    /// `sum_v Norm_{k(v)/k} d_v(g, h)` over the places where the symbol can
    /// be nontrivial; reciprocity says this is the identity of `G(k)`.
    pub fn reciprocity_sum(
        &self,
        c: &Curve,
        g: &GPoint<FuncElement>,
        h: &FuncElement,
        bound: usize,
    ) -> Result<GPoint<FFElement>> {
        let mut places: Vec<Place> = c.divisor_bounded(h, bound)?.support().cloned().collect();
        for f in &g.torus {
            places.extend(c.divisor_bounded(f, bound)?.support().cloned());
        }
        places.sort();
        places.dedup();
        let mut acc = self.identity(&self.k);
        for v in places {
            let s = self.extended_tame(c, &v, g, h)?;
            let n = self.g_norm(&self.k, v.residue_field(), &s)?;
            acc = self.add(&self.k, &acc, &n)?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64, m: usize) -> FieldExtension {
        Tower::for_prime(p).unwrap().field(m).unwrap()
    }

    #[test]
    fn torus_and_curve_ops() {
        let k = f(5, 1);
        let g = SemiAbelian::gm(&k).unwrap();
        let a = GPoint { torus: vec![k.from_int(2)], ell: None };
        let b = GPoint { torus: vec![k.from_int(3)], ell: None };
        assert_eq!(g.add(&k, &a, &b).unwrap().torus, vec![k.one()]);
        let e = SemiAbelian::elliptic(&k, k.zero(), k.one()).unwrap();
        let p = GPoint { torus: vec![], ell: Some(EcPoint::Affine(k.zero(), k.one())) };
        assert!(e.is_identity(&k, &e.add(&k, &p, &e.neg(&k, &p).unwrap()).unwrap()));
        assert!(e.is_identity(&k, &e.scalar(&k, &p, 3).unwrap()));
    }

    #[test]
    fn norm_of_rational_point_is_multiple() {
        let k = f(5, 1);
        let k2 = f(5, 2);
        let e = SemiAbelian::new(&k, 1, Some((k.zero(), k.one()))).unwrap();
        let p = GPoint { torus: vec![k.from_int(2)], ell: Some(EcPoint::Affine(k.from_int(2), k.from_int(2))) };
        assert!(e.contains(&k, &p).unwrap());
        let up = e.embed_point(&k, &k2, &p).unwrap();
        assert_eq!(e.g_norm(&k, &k2, &up).unwrap(), e.scalar(&k, &p, 2).unwrap());
    }

    #[test]
    fn extended_tame_examples() {
        let k3 = f(3, 1);
        let c = Curve::rational_line(&k3).unwrap();
        let g = SemiAbelian::gm(&k3).unwrap();
        let v = c.place_finite(&c.poly_ring().x()).unwrap();
        let pt = GPoint { torus: vec![c.var()], ell: None };
        assert_eq!(g.extended_tame(&c, &v, &pt, &c.var()).unwrap().torus, vec![k3.from_int(2)]);

        let k = f(5, 1);
        let c = Curve::rational_line(&k).unwrap();
        let e = SemiAbelian::elliptic(&k, k.zero(), k.one()).unwrap();
        let p = GPoint { torus: vec![], ell: Some(EcPoint::Affine(k.from_int(2), k.from_int(2))) };
        let pk = e.constant_point(&c, &p);
        let t = c.var();
        let v0 = c.place_finite(&c.poly_ring().x()).unwrap();
        let inf = c.place_infinity().unwrap();
        let v1 = c.place_finite(&c.poly_ring().from_ints(&[-1, 1])).unwrap();
        assert_eq!(e.extended_tame(&c, &v0, &pk, &t).unwrap(), p);
        assert_eq!(e.extended_tame(&c, &inf, &pk, &t).unwrap(), e.neg(&k, &p).unwrap());
        assert!(e.is_identity(&k, &e.extended_tame(&c, &v1, &pk, &t).unwrap()));
    }

    #[test]
    fn generic_point_reduces_to_itself() {
        let k = f(5, 1);
        let e = SemiAbelian::elliptic(&k, k.zero(), k.one()).unwrap();
        let c = e.elliptic_curve().unwrap().unwrap();
        let g = GPoint { torus: vec![], ell: c.generic_point() };
        let v = c.place_at_point(&k, k.from_int(2), k.from_int(2)).unwrap();
        let r = e.reduce_point(&c, &v, &g).unwrap();
        assert_eq!(r.ell, Some(EcPoint::Affine(k.from_int(2), k.from_int(2))));
        let o = c.origin().unwrap();
        assert_eq!(e.reduce_point(&c, &o, &g).unwrap().ell, Some(EcPoint::Infinity));
    }
}
