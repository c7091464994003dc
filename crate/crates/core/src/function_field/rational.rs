use crate::error::{Error, Result};
use crate::finite_field::FFElement;
use crate::poly::{Poly, PolyRing};

/// A reduced fraction `num / den` over `k`, `den` monic; zero is `0 / 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `deg num - deg den`; `None` for zero.
    pub fn degree(&self) -> Option<i64> {
        (!self.num.is_zero()).then(|| self.num.deg_i() - self.den.deg_i())
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    pub fn is_constant(&self) -> bool {
        self.num.degree().unwrap_or(0) == 0 && self.is_polynomial()
    }
}

/// Arithmetic on [`RatFunc`] over one coefficient field.
pub(crate) trait RatOps {
    fn ring(&self) -> &PolyRing;

    fn rat(&self, num: Poly, den: Poly) -> Result<RatFunc> {
        let r = self.ring();
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFunc { num, den: r.one() });
        }
        let g = r.gcd(&num, &den);
        let (mut n, mut d) = (r.div_exact(&num, &g), r.div_exact(&den, &g));
        let l = d.lc().expect("nonzero denominator");
        if l != r.field().one() {
            let li = r.field().inv(l)?;
            n = r.scale(&n, li);
            d = r.scale(&d, li);
        }
        Ok(RatFunc { num: n, den: d })
    }

    fn rat_poly(&self, p: Poly) -> RatFunc {
        RatFunc { num: p, den: self.ring().one() }
    }

    fn rat_const(&self, c: FFElement) -> RatFunc {
        self.rat_poly(self.ring().constant(c))
    }

    fn rat_zero(&self) -> RatFunc {
        self.rat_poly(self.ring().zero())
    }

    fn rat_one(&self) -> RatFunc {
        self.rat_poly(self.ring().one())
    }

    fn rat_add(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        let r = self.ring();
        if a.is_zero() {
            return b.clone();
        }
        if b.is_zero() {
            return a.clone();
        }
        if a.den == b.den {
            return self.rat(r.add(&a.num, &b.num), a.den.clone()).expect("nonzero denominator");
        }
        let g = r.gcd(&a.den, &b.den);
        let ad = r.div_exact(&a.den, &g);
        let bd = r.div_exact(&b.den, &g);
        let num = r.add(&r.mul(&a.num, &bd), &r.mul(&b.num, &ad));
        let den = r.mul(&ad, &b.den);
        self.rat(num, den).expect("nonzero denominator")
    }

    fn rat_neg(&self, a: &RatFunc) -> RatFunc {
        RatFunc { num: self.ring().neg(&a.num), den: a.den.clone() }
    }

    fn rat_sub(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        self.rat_add(a, &self.rat_neg(b))
    }

    fn rat_mul(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        let r = self.ring();
        if a.is_zero() || b.is_zero() {
            return self.rat_zero();
        }
        // cross-cancel before multiplying
        let g1 = r.gcd(&a.num, &b.den);
        let g2 = r.gcd(&b.num, &a.den);
        let num = r.mul(&r.div_exact(&a.num, &g1), &r.div_exact(&b.num, &g2));
        let den = r.mul(&r.div_exact(&a.den, &g2), &r.div_exact(&b.den, &g1));
        self.rat(num, den).expect("nonzero denominator")
    }

    fn rat_inv(&self, a: &RatFunc) -> Result<RatFunc> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        self.rat(a.den.clone(), a.num.clone())
    }

    fn rat_scale(&self, a: &RatFunc, c: FFElement) -> RatFunc {
        RatFunc { num: self.ring().scale(&a.num, c), den: a.den.clone() }.normalized_zero(self.ring())
    }

    fn rat_pow(&self, a: &RatFunc, e: i64) -> Result<RatFunc> {
        let r = self.ring();
        let base = if e < 0 { self.rat_inv(a)? } else { a.clone() };
        let k = e.unsigned_abs();
        Ok(RatFunc { num: r.pow(&base.num, k), den: r.pow(&base.den, k) })
    }

    /// `(multiplicity of pi in num) - (multiplicity in den)`.
    fn rat_ord(&self, a: &RatFunc, pi: &Poly) -> i64 {
        let r = self.ring();
        r.valuation(&a.num, pi).0 as i64 - r.valuation(&a.den, pi).0 as i64
    }
}

impl RatFunc {
    fn normalized_zero(self, r: &PolyRing) -> RatFunc {
        if self.num.is_zero() {
            RatFunc { num: self.num, den: r.one() }
        } else {
            self
        }
    }
}

impl RatOps for PolyRing {
    fn ring(&self) -> &PolyRing {
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_field::Tower;

    #[test]
    fn reduced_and_monic() {
        let k = Tower::for_prime(5).unwrap().field(1).unwrap();
        let r = PolyRing::new(&k);
        // (2t^2 - 2) / (2t - 2) = t + 1
        let f = r.rat(r.from_ints(&[-2, 0, 2]), r.from_ints(&[-2, 2])).unwrap();
        assert_eq!(f.num(), &r.from_ints(&[1, 1]));
        assert_eq!(f.den(), &r.one());
        let z = r.rat(r.zero(), r.from_ints(&[3, 1])).unwrap();
        assert_eq!(z, r.rat_zero());
        let g = r.rat(r.from_ints(&[1]), r.from_ints(&[0, 3])).unwrap();
        assert!(r.is_monic(g.den()));
        let h = r.rat_mul(&g, &r.rat_inv(&g).unwrap());
        assert_eq!(h, r.rat_one());
        let s = r.rat_sub(&r.rat_add(&f, &g), &g);
        assert_eq!(s, f);
    }
}
