//! Milnor K-theory symbols: tame residues at places of a function field,
//! a Steinberg presentation of `K_2(F_q)`, and Weil reciprocity products.

use num_bigint::BigInt;
use serde::Serialize;

use crate::abelian::{quotient_rows, tensor_cyclic, FinAbGroup};
use crate::error::{Error, Result};
use crate::finite_field::{FFElement, FieldExtension, Tower};
use crate::function_field::{element_string, Curve, FuncElement, Place};

/// A formal multiple `coeff * {e_1, ..., e_n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MilnorSymbol<T> {
    pub entries: Vec<T>,
    pub coeff: i64,
}

impl<T> MilnorSymbol<T> {
    pub fn new(entries: Vec<T>) -> Self {
        MilnorSymbol { entries, coeff: 1 }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A formal sum of symbols over a residue field `k(v)`.
#[derive(Clone, Debug)]
pub struct ResidueSum {
    pub field: FieldExtension,
    pub terms: Vec<MilnorSymbol<FFElement>>,
}

impl ResidueSum {
    /// Length-0 terms: the integer they sum to (`K_0 = Z`).
    pub fn as_integer(&self) -> Option<i64> {
        self.terms.iter().all(|t| t.is_empty()).then(|| self.terms.iter().map(|t| t.coeff).sum())
    }

    /// Length-1 terms collapse to one unit of `k(v)` (`K_1 = k(v)^x`).
    pub fn as_unit(&self) -> Option<FFElement> {
        let f = &self.field;
        let mut acc = f.one();
        for t in &self.terms {
            if t.len() != 1 {
                return None;
            }
            acc = f.mul(acc, f.pow(t.entries[0], t.coeff).ok()?);
        }
        Some(acc)
    }

    pub fn format(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                let es: Vec<String> = t.entries.iter().map(|&e| element_string(&self.field, e)).collect();
                format!("{}*{{{}}}", t.coeff, es.join(","))
            })
            .collect();
        parts.join(" + ")
    }
}

/// The residue `d_v {f_1, ..., f_n}` in `K_{n-1}(k(v))`, with the
/// normalization `d_v {u_1, ..., u_{n-1}, pi} = {u_1, ..., u_{n-1}}`.
///
/// Each entry is written `w_i * pi^{m_i}` with a global uniformizer `pi`;
/// the symbol is expanded multilinearly, repeated `pi`'s are rewritten with
/// `{pi, pi} = {-1, pi}`, and the remaining `pi` is moved to the end.
pub fn tame(c: &Curve, v: &Place, entries: &[FuncElement]) -> Result<ResidueSum> {
    if entries.iter().any(|f| f.is_zero()) {
        return Err(Error::ZeroEntry);
    }
    let n = entries.len();
    let pi = c.uniformizer(v)?;
    let mut ms = Vec::with_capacity(n);
    let mut ws = Vec::with_capacity(n);
    for f in entries {
        let m = c.ord(v, f)?;
        let w = c.div(f, &c.pow(&pi, m)?)?;
        ws.push(c.reduce(v, &w)?);
        ms.push(m);
    }
    let l = v.residue_field().clone();
    let minus_one = l.neg(l.one());
    let mut terms = Vec::new();
    for mask in 1u32..(1 << n) {
        let coeff: i64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ms[i]).product();
        if coeff == 0 {
            continue;
        }
        let j = 31 - mask.leading_zeros() as usize;
        let sign = if (n - 1 - j).is_multiple_of(2) { 1 } else { -1 };
        let entries: Vec<FFElement> =
            (0..n).filter(|&i| i != j).map(|i| if mask >> i & 1 == 1 { minus_one } else { ws[i] }).collect();
        terms.push(MilnorSymbol { entries, coeff: sign * coeff });
    }
    Ok(ResidueSum { field: l, terms })
}

/// `d_v {f, g} = (-1)^{ab} f^b g^{-a}` reduced at `v`, with `a = ord f`, `b = ord g`.
pub fn tame2(c: &Curve, v: &Place, f: &FuncElement, g: &FuncElement) -> Result<FFElement> {
    if f.is_zero() || g.is_zero() {
        return Err(Error::ZeroEntry);
    }
    let a = c.ord(v, f)?;
    let b = c.ord(v, g)?;
    let mut u = c.div(&c.pow(f, b)?, &c.pow(g, a)?)?;
    if (a * b) % 2 != 0 {
        u = c.neg(&u);
    }
    c.reduce(v, &u)
}

/// `K_2^M(F_q)` presented as `F_q^x (x) F_q^x` modulo `a (x) (1 - a)`.
pub fn steinberg_k2_oracle(q: u64) -> Result<FinAbGroup> {
    if q > 256 {
        return Err(Error::Config(format!("q = {q} exceeds 2^8")));
    }
    let (p, m) = crate::arith::prime_power(q).ok_or(Error::NotPrime(q))?;
    let k = Tower::for_prime(p)?.field(m)?;
    steinberg_k2_of(&k)
}

pub fn steinberg_k2_of(k: &FieldExtension) -> Result<FinAbGroup> {
    let n = BigInt::from(k.unit_order());
    let t = tensor_cyclic(&[vec![n.clone()], vec![n]])?;
    let moduli = t.moduli();
    let width = moduli.len();
    if width == 0 {
        return Ok(FinAbGroup::trivial());
    }
    let mut rows = Vec::new();
    for (i, d) in moduli.iter().enumerate() {
        let mut r = vec![BigInt::from(0); width];
        r[i] = d.clone();
        rows.push(r);
    }
    for a in k.units() {
        let b = k.sub(k.one(), a);
        if k.is_zero(b) {
            continue;
        }
        let la = BigInt::from(k.dlog(a).expect("unit"));
        let lb = BigInt::from(k.dlog(b).expect("unit"));
        rows.push(t.raw(&[&[la], &[lb]])?);
    }
    quotient_rows(width, rows)
}

/// One place's contribution to a reciprocity product.
#[derive(Clone, Debug, Serialize)]
pub struct LocalFactor {
    pub place: String,
    pub degree: usize,
    pub residue: String,
    pub norm: String,
}

#[derive(Clone, Debug)]
pub struct WeilReport {
    pub product: FFElement,
    pub factors: Vec<LocalFactor>,
}

/// `prod_v Norm_{k(v)/k}(d_v {f, g})` over the union of the supports of
/// `div f` and `div g`, which must lie within residue degree `bound`.
pub fn weil_check(c: &Curve, f: &FuncElement, g: &FuncElement, bound: usize) -> Result<WeilReport> {
    if f.is_zero() || g.is_zero() {
        return Err(Error::ZeroEntry);
    }
    let df = c.divisor_bounded(f, bound)?;
    let dg = c.divisor_bounded(g, bound)?;
    let mut places: Vec<Place> = df.support().chain(dg.support()).cloned().collect();
    places.sort();
    places.dedup();
    let k = c.base_field();
    let mut product = k.one();
    let mut factors = Vec::new();
    for v in places {
        let r = tame2(c, &v, f, g)?;
        let nr = v.embedding().norm(r);
        product = k.mul(product, nr);
        factors.push(LocalFactor {
            place: v.literal(),
            degree: v.degree(),
            residue: element_string(v.residue_field(), r),
            norm: element_string(k, nr),
        });
    }
    Ok(WeilReport { product, factors })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1(p: u64) -> Curve {
        Curve::rational_line(&Tower::for_prime(p).unwrap().field(1).unwrap()).unwrap()
    }

    #[test]
    fn tame_examples() {
        let c = p1(5);
        let r = c.poly_ring();
        let v = c.place_finite(&r.x()).unwrap();
        let t = c.var();
        let one_minus_t = c.sub(&c.one(), &t);
        assert_eq!(tame2(&c, &v, &t, &one_minus_t).unwrap(), c.base_field().one());
        let c3 = p1(3);
        let v3 = c3.place_finite(&c3.poly_ring().x()).unwrap();
        let t3 = c3.var();
        let k3 = c3.base_field();
        assert_eq!(tame2(&c3, &v3, &t3, &t3).unwrap(), k3.from_int(2));
        let s = tame(&c3, &v3, &[t3.clone(), t3.clone()]).unwrap();
        assert_eq!(s.as_unit(), Some(k3.from_int(2)));
        let u = c3.add(&t3, &c3.one());
        assert_eq!(tame(&c3, &v3, &[u.clone(), u]).unwrap().as_unit(), Some(k3.one()));
    }

    #[test]
    fn length_one_residue_is_valuation() {
        let c = p1(5);
        let v = c.place_finite(&c.poly_ring().x()).unwrap();
        let f = c.pow(&c.var(), 3).unwrap();
        assert_eq!(tame(&c, &v, &[f]).unwrap().as_integer(), Some(3));
    }

    #[test]
    fn k2_of_small_fields_is_trivial() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            assert!(steinberg_k2_oracle(q).unwrap().is_trivial(), "q = {q}");
        }
    }

    #[test]
    fn reciprocity_examples() {
        let c = p1(5);
        let t = c.var();
        let f = c.sub(&c.one(), &t);
        let rep = weil_check(&c, &t, &f, 4).unwrap();
        assert_eq!(rep.product, c.base_field().one());
        assert_eq!(rep.factors.len(), 3);
        let c3 = p1(3);
        let rep = weil_check(&c3, &c3.var(), &c3.var(), 4).unwrap();
        assert_eq!(rep.product, c3.base_field().one());
        let vals: Vec<&str> = rep.factors.iter().map(|f| f.norm.as_str()).collect();
        assert_eq!(vals, vec!["2", "2"]);
    }
}
