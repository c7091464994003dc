//! Chord-tangent arithmetic on `y^2 = x^3 + a x + b`, generic over the
//! coefficient field, and the structure of `E(F_q)`.

use std::collections::HashMap;
use std::fmt::Debug;

use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::finite_field::{Embedding, FFElement, FieldExtension};

/// The field operations the group law needs.
pub trait FieldOps {
    type Elem: Clone + PartialEq + Debug;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_int(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
}

impl FieldOps for FieldExtension {
    type Elem = FFElement;
    fn zero(&self) -> FFElement {
        FieldExtension::zero(self)
    }
    fn one(&self) -> FFElement {
        FieldExtension::one(self)
    }
    fn from_int(&self, n: i64) -> FFElement {
        FieldExtension::from_int(self, n)
    }
    fn add(&self, a: &FFElement, b: &FFElement) -> FFElement {
        FieldExtension::add(self, *a, *b)
    }
    fn sub(&self, a: &FFElement, b: &FFElement) -> FFElement {
        FieldExtension::sub(self, *a, *b)
    }
    fn mul(&self, a: &FFElement, b: &FFElement) -> FFElement {
        FieldExtension::mul(self, *a, *b)
    }
    fn neg(&self, a: &FFElement) -> FFElement {
        FieldExtension::neg(self, *a)
    }
    fn inv(&self, a: &FFElement) -> Result<FFElement> {
        FieldExtension::inv(self, *a)
    }
    fn is_zero(&self, a: &FFElement) -> bool {
        FieldExtension::is_zero(self, *a)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum EcPoint<T> {
    Infinity,
    Affine(T, T),
}

impl<T> EcPoint<T> {
    pub fn is_infinity(&self) -> bool {
        matches!(self, EcPoint::Infinity)
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> EcPoint<U> {
        match self {
            EcPoint::Infinity => EcPoint::Infinity,
            EcPoint::Affine(x, y) => EcPoint::Affine(f(x), f(y)),
        }
    }
}

/// The group law of `y^2 = x^3 + a x + b` over a field `F`.
#[derive(Clone, Debug)]
pub struct Weierstrass<F: FieldOps> {
    pub field: F,
    pub a: F::Elem,
    pub b: F::Elem,
}

impl<F: FieldOps> Weierstrass<F> {
    pub fn new(field: F, a: F::Elem, b: F::Elem) -> Self {
        Weierstrass { field, a, b }
    }

    /// `x^3 + a x + b`
    pub fn rhs(&self, x: &F::Elem) -> F::Elem {
        let f = &self.field;
        let x2 = f.mul(x, x);
        f.add(&f.mul(&f.add(&x2, &self.a), x), &self.b)
    }

    pub fn contains(&self, p: &EcPoint<F::Elem>) -> bool {
        match p {
            EcPoint::Infinity => true,
            EcPoint::Affine(x, y) => self.field.mul(y, y) == self.rhs(x),
        }
    }

    pub fn neg(&self, p: &EcPoint<F::Elem>) -> EcPoint<F::Elem> {
        match p {
            EcPoint::Infinity => EcPoint::Infinity,
            EcPoint::Affine(x, y) => EcPoint::Affine(x.clone(), self.field.neg(y)),
        }
    }

    pub fn add(&self, p: &EcPoint<F::Elem>, q: &EcPoint<F::Elem>) -> Result<EcPoint<F::Elem>> {
        let f = &self.field;
        let (x1, y1, x2, y2) = match (p, q) {
            (EcPoint::Infinity, _) => return Ok(q.clone()),
            (_, EcPoint::Infinity) => return Ok(p.clone()),
            (EcPoint::Affine(x1, y1), EcPoint::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let lambda = if x1 == x2 {
            if f.is_zero(&f.add(y1, y2)) {
                return Ok(EcPoint::Infinity);
            }
            let num = f.add(&f.mul(&f.from_int(3), &f.mul(x1, x1)), &self.a);
            f.mul(&num, &f.inv(&f.add(y1, y1))?)
        } else {
            f.mul(&f.sub(y2, y1), &f.inv(&f.sub(x2, x1))?)
        };
        let x3 = f.sub(&f.sub(&f.mul(&lambda, &lambda), x1), x2);
        let y3 = f.sub(&f.mul(&lambda, &f.sub(x1, &x3)), y1);
        Ok(EcPoint::Affine(x3, y3))
    }

    /// `n * p` by double-and-add; negative `n` negates first.
    pub fn scalar(&self, p: &EcPoint<F::Elem>, n: i64) -> Result<EcPoint<F::Elem>> {
        let mut base = if n < 0 { self.neg(p) } else { p.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = EcPoint::Infinity;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base)?;
            }
            k >>= 1;
            if k > 0 {
                base = self.add(&base, &base)?;
            }
        }
        Ok(acc)
    }
}

/// Check `-16(4a^3 + 27b^2) != 0` and odd characteristic.
pub fn check_nonsingular(k: &FieldExtension, a: FFElement, b: FFElement) -> Result<()> {
    if k.characteristic() == 2 {
        return Err(Error::InvalidCurve("short Weierstrass form needs odd characteristic".into()));
    }
    let a3 = k.mul(k.mul(a, a), a);
    let disc = k.add(k.mul(k.from_int(4), a3), k.mul(k.from_int(27), k.mul(b, b)));
    if k.is_zero(disc) {
        return Err(Error::InvalidCurve("discriminant vanishes".into()));
    }
    Ok(())
}

/// `E(L)` for a finite field `L`, with an explicit basis and discrete logs.
///
/// `E(L) = <P2> + <P1>` with `ord(P2) = n1 | n2 = ord(P1)`; coordinates of
/// a point are `(c2 mod n1, c1 mod n2)`, matching the invariant-factor order.
#[derive(Clone, Debug)]
pub struct EllipticGroup {
    law: Weierstrass<FieldExtension>,
    points: Vec<EcPoint<FFElement>>,
    n1: u64,
    n2: u64,
    basis: (EcPoint<FFElement>, EcPoint<FFElement>),
    dlog: HashMap<EcPoint<FFElement>, (u64, u64)>,
}

impl EllipticGroup {
    /// Enumerate `E(L)` for `y^2 = x^3 + a x + b` with `a, b` in `L`.
    pub fn new(field: &FieldExtension, a: FFElement, b: FFElement) -> Result<Self> {
        check_nonsingular(field, a, b)?;
        let law = Weierstrass::new(field.clone(), a, b);
        let mut points = vec![EcPoint::Infinity];
        for x in field.elements() {
            let r = law.rhs(&x);
            if field.is_zero(r) {
                points.push(EcPoint::Affine(x, r));
            } else if let Some(y) = field.sqrt(r) {
                let (y0, y1) =
                    if field.lex_cmp(y, field.neg(y)).is_le() { (y, field.neg(y)) } else { (field.neg(y), y) };
                points.push(EcPoint::Affine(x, y0));
                points.push(EcPoint::Affine(x, y1));
            }
        }
        let n = points.len() as u64;
        let order_of = |p: &EcPoint<FFElement>| -> Result<u64> {
            for d in arith::divisors(n) {
                if law.scalar(p, d as i64)?.is_infinity() {
                    return Ok(d);
                }
            }
            unreachable!("Lagrange")
        };
        let mut p1 = EcPoint::Infinity;
        let mut n2 = 1;
        for p in &points {
            let o = order_of(p)?;
            if o > n2 {
                n2 = o;
                p1 = p.clone();
            }
        }
        let n1 = n / n2;
        let mut basis2 = EcPoint::Infinity;
        if n1 > 1 {
            let mut found = false;
            for q in &points {
                if !law.scalar(q, n1 as i64)?.is_infinity() {
                    continue;
                }
                let span = span(&law, &p1, n2, q, n1)?;
                if span.len() as u64 == n {
                    basis2 = q.clone();
                    found = true;
                    break;
                }
            }
            if !found {
                return Err(Error::Invariant("no complementary basis point found".into()));
            }
        }
        let mut dlog = HashMap::new();
        let mut row = EcPoint::Infinity;
        for c2 in 0..n1 {
            let mut pt = row.clone();
            for c1 in 0..n2 {
                dlog.insert(pt.clone(), (c2, c1));
                pt = law.add(&pt, &p1)?;
            }
            row = law.add(&row, &basis2)?;
        }
        if dlog.len() as u64 != n {
            return Err(Error::Invariant("elliptic basis does not span".into()));
        }
        Ok(EllipticGroup { law, points, n1, n2, basis: (basis2, p1), dlog })
    }

    pub fn law(&self) -> &Weierstrass<FieldExtension> {
        &self.law
    }

    pub fn field(&self) -> &FieldExtension {
        &self.law.field
    }

    pub fn points(&self) -> &[EcPoint<FFElement>] {
        &self.points
    }

    pub fn order(&self) -> u64 {
        self.points.len() as u64
    }

    /// Cyclic orders `(n1, n2)`, `n1 | n2`.
    pub fn invariants(&self) -> (u64, u64) {
        (self.n1, self.n2)
    }

    pub fn basis(&self) -> &(EcPoint<FFElement>, EcPoint<FFElement>) {
        &self.basis
    }

    /// Coordinates `(c2, c1)` with `P = c2*P2 + c1*P1`.
    pub fn coords(&self, p: &EcPoint<FFElement>) -> Result<(u64, u64)> {
        self.dlog.get(p).copied().ok_or(Error::FieldMismatch)
    }

    pub fn from_coords(&self, c2: u64, c1: u64) -> Result<EcPoint<FFElement>> {
        let a = self.law.scalar(&self.basis.0, (c2 % self.n1.max(1)) as i64)?;
        let b = self.law.scalar(&self.basis.1, (c1 % self.n2.max(1)) as i64)?;
        self.law.add(&a, &b)
    }

    pub fn add(&self, p: &EcPoint<FFElement>, q: &EcPoint<FFElement>) -> Result<EcPoint<FFElement>> {
        self.law.add(p, q)
    }

    pub fn element_order(&self, p: &EcPoint<FFElement>) -> Result<u64> {
        for d in arith::divisors(self.order()) {
            if self.law.scalar(p, d as i64)?.is_infinity() {
                return Ok(d);
            }
        }
        Err(Error::Invariant("point order does not divide group order".into()))
    }
}

fn span(
    law: &Weierstrass<FieldExtension>,
    p: &EcPoint<FFElement>,
    np: u64,
    q: &EcPoint<FFElement>,
    nq: u64,
) -> Result<std::collections::HashSet<EcPoint<FFElement>>> {
    let mut out = std::collections::HashSet::new();
    let mut row = EcPoint::Infinity;
    for _ in 0..nq {
        let mut pt = row.clone();
        for _ in 0..np {
            out.insert(pt.clone());
            pt = law.add(&pt, p)?;
        }
        row = law.add(&row, q)?;
    }
    Ok(out)
}

/// Map a point along a field embedding.
pub fn embed_point(emb: &Embedding, p: &EcPoint<FFElement>) -> EcPoint<FFElement> {
    p.map(|c| emb.apply(*c))
}

/// Galois trace `sum_{j < e} Frob^j(P)` over the source of `emb`, pulled back.
pub fn trace_point(
    law_sup: &Weierstrass<FieldExtension>,
    emb: &Embedding,
    p: &EcPoint<FFElement>,
) -> Result<EcPoint<FFElement>> {
    let mut acc = EcPoint::Infinity;
    let mut conj = p.clone();
    for _ in 0..emb.relative_degree() {
        acc = law_sup.add(&acc, &conj)?;
        conj = conj.map(|c| emb.frobenius(*c));
    }
    match acc {
        EcPoint::Infinity => Ok(EcPoint::Infinity),
        EcPoint::Affine(x, y) => {
            let xs = emb.preimage(x).ok_or(Error::Invariant("trace not Frobenius-fixed".into()))?;
            let ys = emb.preimage(y).ok_or(Error::Invariant("trace not Frobenius-fixed".into()))?;
            Ok(EcPoint::Affine(xs, ys))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_field::Tower;

    #[test]
    fn point_counts_small() {
        let f5 = Tower::for_prime(5).unwrap().field(1).unwrap();
        // y^2 = x^3 + 1 over F_5 has 6 points
        let g = EllipticGroup::new(&f5, f5.zero(), f5.one()).unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(g.invariants(), (1, 6));
        // y^2 = x^3 + x over F_5: 4 points, Z/2 x Z/2
        let g = EllipticGroup::new(&f5, f5.one(), f5.zero()).unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(g.invariants(), (2, 2));
        for p in g.points() {
            let (c2, c1) = g.coords(p).unwrap();
            assert_eq!(&g.from_coords(c2, c1).unwrap(), p);
        }
    }

    #[test]
    fn inverse_and_order() {
        let f5 = Tower::for_prime(5).unwrap().field(1).unwrap();
        let g = EllipticGroup::new(&f5, f5.zero(), f5.one()).unwrap();
        let p = EcPoint::Affine(f5.zero(), f5.one());
        assert!(g.add(&p, &g.law().neg(&p)).unwrap().is_infinity());
        let o = g.element_order(&p).unwrap();
        assert_eq!(g.order() % o, 0);
        assert_eq!(o, 3);
    }

    #[test]
    fn singular_rejected() {
        let f5 = Tower::for_prime(5).unwrap().field(1).unwrap();
        assert!(EllipticGroup::new(&f5, f5.zero(), f5.zero()).is_err());
    }
}
