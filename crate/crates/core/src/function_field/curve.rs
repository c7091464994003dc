use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use super::rational::{RatFunc, RatOps};
use crate::elliptic::{check_nonsingular, EcPoint, FieldOps, Weierstrass};
use crate::error::{Error, Result};
use crate::finite_field::{Embedding, FFElement, FieldExtension, Tower, FIELD_ORDER_CAP};
use crate::poly::{Poly, PolyRing};

static NEXT_CURVE: AtomicU64 = AtomicU64::new(1);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveKind {
    /// `P^1` with function field `k(t)`.
    RationalLine,
    /// `y^2 = x^3 + a x + b` with function field `k(x, y)`.
    Elliptic { a: FFElement, b: FFElement },
}

struct CurveData {
    id: u64,
    kind: CurveKind,
    k: FieldExtension,
    ring: PolyRing,
    tower: Arc<Tower>,
    /// degree of `k` over `F_p`, and whether `k` is the tower field of that degree
    k_degree: usize,
    in_tower: bool,
    residue: Mutex<HashMap<usize, (FieldExtension, Embedding)>>,
}

/// A smooth projective curve over a finite field `k` together with its
/// function field.
#[derive(Clone)]
pub struct Curve(Arc<CurveData>);

/// `a(x) + b(x) y` with reduced fractions `a`, `b`; on `P^1` `b = 0` and
/// the variable is `t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FuncElement {
    curve: u64,
    a: RatFunc,
    b: RatFunc,
}

impl FuncElement {
    pub fn a(&self) -> &RatFunc {
        &self.a
    }

    pub fn b(&self) -> &RatFunc {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn curve_id(&self) -> u64 {
        self.curve
    }
}

impl PartialEq for Curve {
    fn eq(&self, other: &Self) -> bool {
        self.0.id == other.0.id
    }
}

impl fmt::Debug for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.literal())
    }
}

impl RatOps for Curve {
    fn ring(&self) -> &PolyRing {
        &self.0.ring
    }
}

impl Curve {
    fn build(kind: CurveKind, k: &FieldExtension) -> Result<Curve> {
        let tower = Tower::for_prime(k.characteristic() as u64)?;
        let k_degree = k.degree();
        let in_tower = tower.field(k_degree)? == *k;
        Ok(Curve(Arc::new(CurveData {
            id: NEXT_CURVE.fetch_add(1, Ordering::Relaxed),
            kind,
            k: k.clone(),
            ring: PolyRing::new(k),
            tower,
            k_degree,
            in_tower,
            residue: Mutex::new(HashMap::new()),
        })))
    }

    pub fn rational_line(k: &FieldExtension) -> Result<Curve> {
        Self::build(CurveKind::RationalLine, k)
    }

    pub fn elliptic(k: &FieldExtension, a: FFElement, b: FFElement) -> Result<Curve> {
        if !k.contains(a) || !k.contains(b) {
            return Err(Error::FieldMismatch);
        }
        check_nonsingular(k, a, b)?;
        Self::build(CurveKind::Elliptic { a, b }, k)
    }

    pub fn id(&self) -> u64 {
        self.0.id
    }

    pub fn kind(&self) -> CurveKind {
        self.0.kind
    }

    pub fn is_elliptic(&self) -> bool {
        matches!(self.0.kind, CurveKind::Elliptic { .. })
    }

    pub fn base_field(&self) -> &FieldExtension {
        &self.0.k
    }

    pub fn poly_ring(&self) -> &PolyRing {
        &self.0.ring
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.0.tower
    }

    /// Weierstrass coefficients, for elliptic curves.
    pub fn coefficients(&self) -> Option<(FFElement, FFElement)> {
        match self.0.kind {
            CurveKind::Elliptic { a, b } => Some((a, b)),
            CurveKind::RationalLine => None,
        }
    }

    /// `x^3 + a x + b` as a polynomial over `k`.
    pub fn weierstrass_rhs(&self) -> Option<Poly> {
        let (a, b) = self.coefficients()?;
        let k = &self.0.k;
        Some(self.0.ring.from_coeffs(vec![b, a, k.zero(), k.one()]))
    }

    /// The group law on the constant curve over a finite extension `L`.
    pub fn law_over(&self, emb: &Embedding) -> Option<Weierstrass<FieldExtension>> {
        let (a, b) = self.coefficients()?;
        Some(Weierstrass::new(emb.dst().clone(), emb.apply(a), emb.apply(b)))
    }

    /// The group law over the function field itself.
    pub fn law(&self) -> Option<Weierstrass<Curve>> {
        let (a, b) = self.coefficients()?;
        Some(Weierstrass::new(self.clone(), self.constant(a), self.constant(b)))
    }

    /// The generic point `(x, y)` of an elliptic curve.
    pub fn generic_point(&self) -> Option<EcPoint<FuncElement>> {
        self.is_elliptic().then(|| EcPoint::Affine(self.var(), self.y()))
    }

    /// Largest residue degree (over `k`) whose field fits under the cap.
    pub fn max_residue_degree(&self) -> usize {
        let p = self.0.k.characteristic() as u64;
        let mut d = 1;
        while crate::arith::checked_pow(p, self.0.k_degree * (d + 1)).is_some_and(|q| q <= FIELD_ORDER_CAP) {
            d += 1;
        }
        d
    }

    /// The residue field of degree `deg` over `k` and the embedding of `k`.
    pub fn residue_field(&self, deg: usize) -> Result<(FieldExtension, Embedding)> {
        if deg == 0 {
            return Err(Error::Config("residue degree must be positive".into()));
        }
        if let Some(hit) = self.0.residue.lock().expect("residue cache poisoned").get(&deg) {
            return Ok(hit.clone());
        }
        let out = if deg == 1 {
            (self.0.k.clone(), Embedding::identity(&self.0.k))
        } else {
            let m = self.0.k_degree * deg;
            let big = self.0.tower.field(m).map_err(|e| match e {
                Error::FieldTooLarge { .. } => Error::DegreeOverflow { degree: deg, bound: self.max_residue_degree() },
                other => other,
            })?;
            let emb = if self.0.in_tower {
                self.0.tower.embedding(self.0.k_degree, m)?
            } else {
                Embedding::distinguished(&self.0.k, &big)?
            };
            (big, emb)
        };
        self.0.residue.lock().expect("residue cache poisoned").insert(deg, out.clone());
        Ok(out)
    }

    pub fn literal(&self) -> String {
        match self.0.kind {
            CurveKind::RationalLine => format!("P1({})", self.0.k.literal()),
            CurveKind::Elliptic { a, b } => {
                format!("E({}; {},{})", self.0.k.literal(), element_string(&self.0.k, a), element_string(&self.0.k, b))
            }
        }
    }

    // ---- elements ----

    fn elem(&self, a: RatFunc, b: RatFunc) -> FuncElement {
        FuncElement { curve: self.0.id, a, b }
    }

    pub fn from_parts(&self, a: RatFunc, b: RatFunc) -> Result<FuncElement> {
        if !b.is_zero() && !self.is_elliptic() {
            return Err(Error::Config("y-part on a rational line".into()));
        }
        Ok(self.elem(a, b))
    }

    pub fn from_rat(&self, a: RatFunc) -> FuncElement {
        self.elem(a, self.rat_zero())
    }

    /// `num / den` in the variable `t` (or `x`).
    pub fn fraction(&self, num: Poly, den: Poly) -> Result<FuncElement> {
        Ok(self.from_rat(self.rat(num, den)?))
    }

    pub fn from_poly(&self, p: Poly) -> FuncElement {
        self.from_rat(self.rat_poly(p))
    }

    pub fn constant(&self, c: FFElement) -> FuncElement {
        self.from_rat(self.rat_const(c))
    }

    pub fn zero(&self) -> FuncElement {
        self.elem(self.rat_zero(), self.rat_zero())
    }

    pub fn one(&self) -> FuncElement {
        self.constant(self.0.k.one())
    }

    /// `t` on `P^1`, `x` on an elliptic curve.
    pub fn var(&self) -> FuncElement {
        self.from_poly(self.0.ring.x())
    }

    /// `y` (zero on `P^1`, where it is not defined).
    pub fn y(&self) -> FuncElement {
        self.elem(self.rat_zero(), self.rat_one())
    }

    pub fn check(&self, f: &FuncElement) -> Result<()> {
        if f.curve != self.0.id {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn add(&self, f: &FuncElement, g: &FuncElement) -> FuncElement {
        self.elem(self.rat_add(&f.a, &g.a), self.rat_add(&f.b, &g.b))
    }

    pub fn sub(&self, f: &FuncElement, g: &FuncElement) -> FuncElement {
        self.elem(self.rat_sub(&f.a, &g.a), self.rat_sub(&f.b, &g.b))
    }

    pub fn neg(&self, f: &FuncElement) -> FuncElement {
        self.elem(self.rat_neg(&f.a), self.rat_neg(&f.b))
    }

    fn rhs_rat(&self) -> RatFunc {
        self.rat_poly(self.weierstrass_rhs().unwrap_or_else(|| self.0.ring.zero()))
    }

    pub fn mul(&self, f: &FuncElement, g: &FuncElement) -> FuncElement {
        if f.b.is_zero() && g.b.is_zero() {
            return self.from_rat(self.rat_mul(&f.a, &g.a));
        }
        let bb = self.rat_mul(&self.rat_mul(&f.b, &g.b), &self.rhs_rat());
        let a = self.rat_add(&self.rat_mul(&f.a, &g.a), &bb);
        let b = self.rat_add(&self.rat_mul(&f.a, &g.b), &self.rat_mul(&f.b, &g.a));
        self.elem(a, b)
    }

    /// `N(f) = f * conj(f) = a^2 - b^2 F(x)`, an element of `k(x)`.
    pub fn norm_down(&self, f: &FuncElement) -> RatFunc {
        if f.b.is_zero() {
            return f.a.clone();
        }
        let a2 = self.rat_mul(&f.a, &f.a);
        let b2 = self.rat_mul(&self.rat_mul(&f.b, &f.b), &self.rhs_rat());
        self.rat_sub(&a2, &b2)
    }

    /// `a - b y`
    pub fn conjugate(&self, f: &FuncElement) -> FuncElement {
        self.elem(f.a.clone(), self.rat_neg(&f.b))
    }

    pub fn inv(&self, f: &FuncElement) -> Result<FuncElement> {
        if f.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if f.b.is_zero() {
            return Ok(self.from_rat(self.rat_inv(&f.a)?));
        }
        let n = self.rat_inv(&self.norm_down(f))?;
        let c = self.conjugate(f);
        Ok(self.elem(self.rat_mul(&c.a, &n), self.rat_mul(&c.b, &n)))
    }

    pub fn div(&self, f: &FuncElement, g: &FuncElement) -> Result<FuncElement> {
        Ok(self.mul(f, &self.inv(g)?))
    }

    pub fn pow(&self, f: &FuncElement, e: i64) -> Result<FuncElement> {
        if f.b.is_zero() {
            return Ok(self.from_rat(self.rat_pow(&f.a, e)?));
        }
        let mut base = if e < 0 { self.inv(f)? } else { f.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = self.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base);
            }
        }
        Ok(acc)
    }

    pub fn scale(&self, f: &FuncElement, c: FFElement) -> FuncElement {
        self.elem(self.rat_scale(&f.a, c), self.rat_scale(&f.b, c))
    }

    /// The constant value, if `f` lies in `k`.
    pub fn as_constant(&self, f: &FuncElement) -> Option<FFElement> {
        if !f.b.is_zero() || !f.a.is_constant() {
            return None;
        }
        Some(f.a.num().coeff(0).unwrap_or_else(|| self.0.k.zero()))
    }

    pub fn is_constant(&self, f: &FuncElement) -> bool {
        self.as_constant(f).is_some()
    }

    /// Human-readable form over `t` (or `x`, `y`), base-field generator `w`.
    pub fn format(&self, f: &FuncElement) -> String {
        let var = if self.is_elliptic() { "x" } else { "t" };
        let a = format_rat(&self.0.k, &f.a, var);
        if f.b.is_zero() {
            return a;
        }
        let b = format_rat(&self.0.k, &f.b, var);
        let by = if b == "1" { "y".to_string() } else { format!("({b})*y") };
        if f.a.is_zero() {
            by
        } else {
            format!("{a} + {by}")
        }
    }
}

impl FieldOps for Curve {
    type Elem = FuncElement;
    fn zero(&self) -> FuncElement {
        Curve::zero(self)
    }
    fn one(&self) -> FuncElement {
        Curve::one(self)
    }
    fn from_int(&self, n: i64) -> FuncElement {
        self.constant(self.0.k.from_int(n))
    }
    fn add(&self, a: &FuncElement, b: &FuncElement) -> FuncElement {
        Curve::add(self, a, b)
    }
    fn sub(&self, a: &FuncElement, b: &FuncElement) -> FuncElement {
        Curve::sub(self, a, b)
    }
    fn mul(&self, a: &FuncElement, b: &FuncElement) -> FuncElement {
        Curve::mul(self, a, b)
    }
    fn neg(&self, a: &FuncElement) -> FuncElement {
        Curve::neg(self, a)
    }
    fn inv(&self, a: &FuncElement) -> Result<FuncElement> {
        Curve::inv(self, a)
    }
    fn is_zero(&self, a: &FuncElement) -> bool {
        a.is_zero()
    }
}

/// An element written as a polynomial in the generator `w` (integers for prime fields).
pub fn element_string(k: &FieldExtension, e: FFElement) -> String {
    let c = k.coeffs(e);
    if k.degree() == 1 {
        return c[0].to_string();
    }
    let mut terms = Vec::new();
    for (i, &ci) in c.iter().enumerate().rev() {
        if ci == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => "w".to_string(),
            _ => format!("w^{i}"),
        };
        terms.push(match (ci, mono.is_empty()) {
            (_, true) => ci.to_string(),
            (1, false) => mono,
            (_, false) => format!("{ci}*{mono}"),
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

pub fn format_poly(k: &FieldExtension, p: &Poly, var: &str) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut terms = Vec::new();
    for (i, &c) in p.coeffs().iter().enumerate().rev() {
        if k.is_zero(c) {
            continue;
        }
        let cs = element_string(k, c);
        let cs = if cs.contains('+') { format!("({cs})") } else { cs };
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        terms.push(match (cs.as_str(), mono.is_empty()) {
            (_, true) => cs,
            ("1", false) => mono,
            (_, false) => format!("{cs}*{mono}"),
        });
    }
    terms.join(" + ")
}

fn format_rat(k: &FieldExtension, r: &RatFunc, var: &str) -> String {
    let n = format_poly(k, r.num(), var);
    if r.is_polynomial() {
        return n;
    }
    let d = format_poly(k, r.den(), var);
    let wrap = |s: String| if s.contains(' ') { format!("({s})") } else { s };
    format!("{}/{}", wrap(n), wrap(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e5() -> Curve {
        let k = Tower::for_prime(5).unwrap().field(1).unwrap();
        Curve::elliptic(&k, k.zero(), k.one()).unwrap()
    }

    #[test]
    fn y_squared_reduces() {
        let c = e5();
        let y2 = c.mul(&c.y(), &c.y());
        let x = c.var();
        let expect = c.add(&c.pow(&x, 3).unwrap(), &c.one());
        assert_eq!(y2, expect);
    }

    #[test]
    fn inverse_in_function_field() {
        let c = e5();
        let f = c.add(&c.var(), &c.y());
        let g = c.inv(&f).unwrap();
        assert_eq!(c.mul(&f, &g), c.one());
        assert!(c.inv(&c.zero()).is_err());
    }

    #[test]
    fn generic_point_law() {
        let c = e5();
        let law = c.law().unwrap();
        let p = c.generic_point().unwrap();
        let p2 = law.add(&p, &p).unwrap();
        assert!(law.contains(&p2));
        let back = law.add(&p2, &law.neg(&p)).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn formatting() {
        let k = Tower::for_prime(5).unwrap().field(1).unwrap();
        let c = Curve::rational_line(&k).unwrap();
        let r = c.poly_ring();
        let f = c.fraction(r.from_ints(&[0, 0, 1]), r.from_ints(&[-1, 1])).unwrap();
        assert_eq!(c.format(&f), "t^2/(t + 4)");
    }
}
