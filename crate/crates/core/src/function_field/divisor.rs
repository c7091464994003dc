use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;

use super::curve::{Curve, FuncElement};
use super::place::{Place, PlaceKind};
use crate::abelian::FinAbGroup;
use crate::elliptic::{trace_point, EcPoint, EllipticGroup};
use crate::error::{Error, Result};
use crate::finite_field::FFElement;
use crate::poly::Poly;

/// A finitely supported formal sum of places.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Divisor {
    terms: BTreeMap<Place, i64>,
}

impl Divisor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_term(&mut self, v: Place, m: i64) {
        let e = self.terms.entry(v.clone()).or_insert(0);
        *e += m;
        if *e == 0 {
            self.terms.remove(&v);
        }
    }

    pub fn terms(&self) -> &BTreeMap<Place, i64> {
        &self.terms
    }

    pub fn support(&self) -> impl Iterator<Item = &Place> {
        self.terms.keys()
    }

    pub fn multiplicity(&self, v: &Place) -> i64 {
        self.terms.get(v).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> i64 {
        self.terms.iter().map(|(v, m)| m * v.degree() as i64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn literal(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self.terms.iter().map(|(v, m)| format!("{m}*{v}")).collect();
        parts.join(" + ")
    }
}

impl Curve {
    /// Candidate places where `f` may have a zero or pole (excluding infinity / O).
    fn candidate_polys(&self, f: &FuncElement) -> Vec<Poly> {
        let r = self.poly_ring();
        let mut polys = BTreeSet::new();
        let n = self.norm_down(f);
        for p in [n.num(), n.den(), f.a().den(), f.b().den()] {
            if p.degree().unwrap_or(0) > 0 {
                for (g, _) in r.factor(p) {
                    polys.insert(g);
                }
            }
        }
        let mut out: Vec<Poly> = polys.into_iter().collect();
        out.sort_by_key(|a| (a.degree(), a.key()));
        out
    }

    /// Principal divisor of `f`, with every support place of residue degree at most `bound`.
    pub fn divisor_bounded(&self, f: &FuncElement, bound: usize) -> Result<Divisor> {
        self.check(f)?;
        if f.is_zero() {
            return Err(Error::ZeroElement);
        }
        let mut d = Divisor::new();
        let candidates = self.candidate_polys(f);
        if self.is_elliptic() {
            for pi in candidates {
                for v in self.places_over(&pi, bound)? {
                    let m = self.ord(&v, f)?;
                    d.add_term(v, m);
                }
            }
            let o = self.origin()?;
            let m = self.ord(&o, f)?;
            d.add_term(o, m);
        } else {
            for pi in candidates {
                let deg = pi.degree().unwrap_or(0);
                if deg > bound {
                    return Err(Error::DegreeOverflow { degree: deg, bound });
                }
                let v = self.place_finite(&pi)?;
                let m = self.ord(&v, f)?;
                d.add_term(v, m);
            }
            let inf = self.place_infinity()?;
            let m = self.ord(&inf, f)?;
            d.add_term(inf, m);
        }
        if d.degree() != 0 {
            return Err(Error::Invariant(format!("principal divisor of degree {}", d.degree())));
        }
        Ok(d)
    }

    /// Principal divisor with the largest residue degree the field cap allows.
    pub fn divisor(&self, f: &FuncElement) -> Result<Divisor> {
        self.divisor_bounded(f, self.max_residue_degree())
    }

    /// `Pic^0`: trivial for `P^1`, `E(k)` for an elliptic curve.
    pub fn pic0_structure(&self) -> Result<FinAbGroup> {
        match self.coefficients() {
            None => Ok(FinAbGroup::trivial()),
            Some((a, b)) => {
                let g = EllipticGroup::new(self.base_field(), a, b)?;
                let (n1, n2) = g.invariants();
                FinAbGroup::new(vec![BigInt::from(n1), BigInt::from(n2)], 0)
            }
        }
    }

    /// The group `E(k)` with explicit coordinates (elliptic curves only).
    pub fn rational_points(&self) -> Result<EllipticGroup> {
        let (a, b) = self.coefficients().ok_or(Error::Config("rational points need an elliptic curve".into()))?;
        EllipticGroup::new(self.base_field(), a, b)
    }

    /// Sum map `Div(E) -> E(k)`: `[v] -> Tr_{k(v)/k}(P_v)`; `O` maps to `O`.
    /// On degree-zero divisors this is the isomorphism `Pic^0(E) = E(k)`.
    pub fn divisor_class(&self, d: &Divisor) -> Result<EcPoint<FFElement>> {
        let k = self.base_field();
        let law = self
            .law_over(&crate::finite_field::Embedding::identity(k))
            .ok_or(Error::Config("divisor classes need an elliptic curve".into()))?;
        let mut acc = EcPoint::Infinity;
        for (v, &m) in d.terms() {
            if v.curve_id() != self.id() {
                return Err(Error::FieldMismatch);
            }
            if matches!(v.kind(), PlaceKind::Origin) {
                continue;
            }
            let p = v.point().expect("elliptic place");
            let sup = self.law_over(v.embedding()).expect("elliptic");
            let t = trace_point(&sup, v.embedding(), &p)?;
            acc = law.add(&acc, &law.scalar(&t, m)?)?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_field::Tower;

    #[test]
    fn p1_divisor_example() {
        let k = Tower::for_prime(5).unwrap().field(1).unwrap();
        let c = Curve::rational_line(&k).unwrap();
        let r = c.poly_ring();
        let f = c.fraction(r.from_ints(&[0, 0, 1]), r.from_ints(&[-1, 1])).unwrap();
        let d = c.divisor(&f).unwrap();
        assert_eq!(d.terms().len(), 3);
        assert_eq!(d.multiplicity(&c.place_finite(&r.x()).unwrap()), 2);
        assert_eq!(d.multiplicity(&c.place_finite(&r.from_ints(&[-1, 1])).unwrap()), -1);
        assert_eq!(d.multiplicity(&c.place_infinity().unwrap()), -1);
        assert!(c.divisor(&c.constant(k.from_int(3))).unwrap().is_empty());
    }

    #[test]
    fn elliptic_divisor_of_x() {
        let k = Tower::for_prime(5).unwrap().field(1).unwrap();
        let c = Curve::elliptic(&k, k.zero(), k.one()).unwrap();
        let d = c.divisor(&c.var()).unwrap();
        let o = c.origin().unwrap();
        assert_eq!(d.multiplicity(&o), -2);
        let finite: i64 = d.terms().iter().filter(|(v, _)| **v != o).map(|(v, m)| m * v.degree() as i64).sum();
        assert_eq!(finite, 2);
        assert_eq!(d.degree(), 0);
        assert!(c.divisor_class(&d).unwrap().is_infinity());
    }

    #[test]
    fn pic0_matches_enumeration() {
        let k = Tower::for_prime(5).unwrap().field(1).unwrap();
        let c = Curve::elliptic(&k, k.one(), k.zero()).unwrap();
        let g = c.pic0_structure().unwrap();
        assert_eq!(g.order(), Some(BigInt::from(4)));
        assert!(Curve::rational_line(&k).unwrap().pic0_structure().unwrap().is_trivial());
    }
}
