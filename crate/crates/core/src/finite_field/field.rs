use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::arith;
use crate::error::{Error, Result};

/// Largest field order the crate will build tables for.
pub const FIELD_ORDER_CAP: u64 = 1 << 20;

const NO_LOG: u32 = u32::MAX;

/// An element of a finite field, stored as the base-`p` encoding of its
/// coefficient vector: `idx = c_0 + c_1 p + ... + c_{m-1} p^{m-1}`.
///
/// The element carries the fingerprint of its field so that mixing fields is
/// detected by the checked operations.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FFElement {
    idx: u32,
    tag: u64,
}

impl FFElement {
    pub fn index(&self) -> u32 {
        self.idx
    }

    pub fn tag(&self) -> u64 {
        self.tag
    }
}

impl fmt::Debug for FFElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.idx)
    }
}

struct FieldData {
    p: u32,
    m: usize,
    q: u32,
    modulus: Vec<u32>,
    tag: u64,
    generator: u32,
    log: Vec<u32>,
    exp: Vec<u32>,
    zech: Vec<u32>,
}

/// The field `F_p[x]/(f)` with `f` monic irreducible of degree `m`.
///
/// Arithmetic goes through discrete-log, antilog and Zech tables that are
/// built once in the constructor, so clones are cheap and the value is
/// immutable afterwards.
#[derive(Clone)]
pub struct FieldExtension(Arc<FieldData>);

impl fmt::Debug for FieldExtension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}; {:?})", self.0.p, self.0.m, self.0.modulus)
    }
}

impl PartialEq for FieldExtension {
    fn eq(&self, other: &Self) -> bool {
        self.0.tag == other.0.tag && self.0.modulus == other.0.modulus && self.0.p == other.0.p
    }
}
impl Eq for FieldExtension {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Inv,
    Pow,
}

#[derive(Clone, Copy, Debug)]
pub enum Operand {
    Element(FFElement),
    Exponent(i64),
    None,
}

fn fingerprint(p: u32, modulus: &[u32]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in std::iter::once(p).chain(modulus.iter().copied()) {
        for b in v.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

/// Dense polynomial arithmetic over `F_p` on plain coefficient vectors,
/// used only while constructing fields.
pub(crate) mod slow {
    pub fn trim(mut a: Vec<u32>) -> Vec<u32> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn rem(a: &[u32], f: &[u32], p: u32) -> Vec<u32> {
        let mut r = trim(a.to_vec());
        let df = f.len() - 1;
        let lc_inv = inv(f[df], p);
        while r.len() > df {
            let shift = r.len() - 1 - df;
            let c = (r[r.len() - 1] as u64 * lc_inv as u64 % p as u64) as u32;
            for (i, &fi) in f.iter().enumerate() {
                let t = (c as u64 * fi as u64) % p as u64;
                r[shift + i] = ((r[shift + i] as u64 + p as u64 - t) % p as u64) as u32;
            }
            r = trim(r);
        }
        r
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        trim(out.into_iter().map(|v| v as u32).collect())
    }

    pub fn mulmod(a: &[u32], b: &[u32], f: &[u32], p: u32) -> Vec<u32> {
        rem(&mul(a, b, p), f, p)
    }

    pub fn powmod(a: &[u32], mut e: u128, f: &[u32], p: u32) -> Vec<u32> {
        let mut base = rem(a, f, p);
        let mut acc = rem(&[1], f, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(&acc, &base, f, p);
            }
            base = mulmod(&base, &base, f, p);
            e >>= 1;
        }
        acc
    }

    pub fn inv(a: u32, p: u32) -> u32 {
        let mut r = 1u64;
        let mut b = a as u64 % p as u64;
        let mut e = p as u64 - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p as u64;
            }
            b = b * b % p as u64;
            e >>= 1;
        }
        r as u32
    }

    /// Evaluate a polynomial over `F_p` at an element given as a
    /// polynomial residue modulo `f`.
    pub fn eval_at(g: &[u32], at: &[u32], f: &[u32], p: u32) -> Vec<u32> {
        let mut acc: Vec<u32> = Vec::new();
        for &c in g.iter().rev() {
            acc = mulmod(&acc, at, f, p);
            if acc.is_empty() {
                acc.push(0);
            }
            acc[0] = (acc[0] + c) % p;
            acc = trim(acc);
        }
        acc
    }

    pub fn is_one(a: &[u32]) -> bool {
        a.len() == 1 && a[0] == 1
    }
}

fn encode(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0u32, |acc, &c| acc * p + c)
}

fn decode(mut idx: u32, p: u32, m: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        out.push(idx % p);
        idx /= p;
    }
    out
}

/// `x` mod `f` is a primitive element of `F_p[x]/(f)`; this also certifies
/// irreducibility because a reducible quotient has fewer than `p^m - 1` units.
pub(crate) fn x_is_primitive(f: &[u32], p: u32) -> bool {
    let m = f.len() - 1;
    let q = (p as u128).pow(m as u32);
    let order = q - 1;
    let x: Vec<u32> = if m == 1 { slow::rem(&[0, 1], f, p) } else { vec![0, 1] };
    if x.is_empty() {
        return false;
    }
    if !slow::is_one(&slow::powmod(&x, order, f, p)) {
        return false;
    }
    for r in arith::prime_factors(order as u64) {
        if slow::is_one(&slow::powmod(&x, order / r as u128, f, p)) {
            return false;
        }
    }
    true
}

impl FieldExtension {
    /// Build `F_p[x]/(f)`, `f` given low-to-high and monic.
    pub fn new(p: u64, f: &[u32]) -> Result<Self> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let f = slow::trim(f.iter().map(|&c| c % p as u32).collect());
        if f.len() < 2 || f[f.len() - 1] != 1 {
            return Err(Error::NotMonic);
        }
        let m = f.len() - 1;
        let order = arith::checked_pow(p, m).filter(|&q| q <= FIELD_ORDER_CAP);
        let Some(q) = order else {
            return Err(Error::FieldTooLarge {
                order: arith::checked_pow(p, m).unwrap_or(u64::MAX),
                cap: FIELD_ORDER_CAP,
            });
        };
        if let Some(w) = find_factor(&f, p as u32) {
            return Err(Error::Reducible { witness: w });
        }
        Ok(Self::build_tables(p as u32, f, q as u32))
    }

    /// Build from a modulus already known to be irreducible with `x` primitive.
    pub(crate) fn from_primitive_modulus(p: u32, f: Vec<u32>) -> Self {
        let q = (p as u64).pow((f.len() - 1) as u32) as u32;
        Self::build_tables(p, f, q)
    }

    fn build_tables(p: u32, f: Vec<u32>, q: u32) -> Self {
        let m = f.len() - 1;
        let n = (q - 1) as usize;
        // find a primitive element: try x first, then everything else
        let x_idx = encode(&slow::rem(&[0, 1], &f, p), p);
        let generator = if x_is_primitive(&f, p) {
            x_idx
        } else {
            (2..q).find(|&g| is_primitive_slow(&decode(g, p, m), &f, p)).unwrap_or(1)
        };
        let g = slow::trim(decode(generator, p, m));
        let mut exp = vec![0u32; 2 * n.max(1)];
        let mut log = vec![NO_LOG; q as usize];
        let mut cur: Vec<u32> = vec![1];
        for i in 0..n.max(1) {
            let idx = encode(&cur, p);
            exp[i] = idx;
            if i < n || q == 2 {
                log[idx as usize] = i as u32;
            }
            cur = if generator == x_idx && m > 1 { times_x(&cur, &f, p) } else { slow::mulmod(&cur, &g, &f, p) };
        }
        if q == 2 {
            exp[0] = 1;
            log[1] = 0;
        }
        for i in 0..n.max(1) {
            exp[n.max(1) + i] = exp[i];
        }
        let mut zech = vec![NO_LOG; n.max(1)];
        if p != 2 {
            for (j, z) in zech.iter_mut().enumerate().take(n) {
                let e = exp[j];
                let c0 = e % p;
                let v = e - c0 + (c0 + 1) % p;
                *z = if v == 0 { NO_LOG } else { log[v as usize] };
            }
        }
        let tag = fingerprint(p, &f);
        FieldExtension(Arc::new(FieldData { p, m, q, modulus: f, tag, generator, log, exp, zech }))
    }

    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> usize {
        self.0.m
    }

    pub fn order(&self) -> u32 {
        self.0.q
    }

    pub fn unit_order(&self) -> u64 {
        self.0.q as u64 - 1
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn tag(&self) -> u64 {
        self.0.tag
    }

    fn mk(&self, idx: u32) -> FFElement {
        FFElement { idx, tag: self.0.tag }
    }

    pub fn zero(&self) -> FFElement {
        self.mk(0)
    }

    pub fn one(&self) -> FFElement {
        self.mk(1)
    }

    /// Stored primitive element (generator of the unit group).
    pub fn generator(&self) -> FFElement {
        self.mk(self.0.generator)
    }

    pub fn from_int(&self, n: i64) -> FFElement {
        self.mk(n.rem_euclid(self.0.p as i64) as u32)
    }

    pub fn from_index(&self, idx: u32) -> FFElement {
        assert!(idx < self.0.q, "index out of range");
        self.mk(idx)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FFElement> {
        let mut c: Vec<u32> = coeffs.iter().map(|&v| v % self.0.p).collect();
        let r = slow::rem(&slow::trim(std::mem::take(&mut c)), &self.0.modulus, self.0.p);
        Ok(self.mk(encode(&r, self.0.p)))
    }

    pub fn coeffs(&self, x: FFElement) -> Vec<u32> {
        decode(x.idx, self.0.p, self.0.m)
    }

    pub fn contains(&self, x: FFElement) -> bool {
        x.tag == self.0.tag && x.idx < self.0.q
    }

    pub fn elements(&self) -> impl Iterator<Item = FFElement> + '_ {
        (0..self.0.q).map(move |i| self.mk(i))
    }

    pub fn units(&self) -> impl Iterator<Item = FFElement> + '_ {
        (1..self.0.q).map(move |i| self.mk(i))
    }

    pub fn is_zero(&self, x: FFElement) -> bool {
        x.idx == 0
    }

    pub fn is_prime_field_element(&self, x: FFElement) -> bool {
        x.idx < self.0.p
    }

    fn n(&self) -> u32 {
        (self.0.q - 1).max(1)
    }

    /// Discrete logarithm with respect to [`Self::generator`].
    pub fn dlog(&self, x: FFElement) -> Option<u64> {
        debug_assert!(self.contains(x));
        if x.idx == 0 {
            return None;
        }
        Some(self.0.log[x.idx as usize] as u64)
    }

    pub fn exp(&self, e: u64) -> FFElement {
        self.mk(self.0.exp[(e % self.n() as u64) as usize])
    }

    pub fn add(&self, a: FFElement, b: FFElement) -> FFElement {
        debug_assert!(self.contains(a) && self.contains(b));
        if self.0.p == 2 {
            return self.mk(a.idx ^ b.idx);
        }
        if a.idx == 0 {
            return b;
        }
        if b.idx == 0 {
            return a;
        }
        let n = self.n();
        let la = self.0.log[a.idx as usize];
        let lb = self.0.log[b.idx as usize];
        let d = (lb + n - la) % n;
        let z = self.0.zech[d as usize];
        if z == NO_LOG {
            self.zero()
        } else {
            self.mk(self.0.exp[(la + z) as usize])
        }
    }

    pub fn neg(&self, a: FFElement) -> FFElement {
        if self.0.p == 2 || a.idx == 0 {
            return a;
        }
        let la = self.0.log[a.idx as usize];
        self.mk(self.0.exp[(la + self.n() / 2) as usize])
    }

    pub fn sub(&self, a: FFElement, b: FFElement) -> FFElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FFElement, b: FFElement) -> FFElement {
        debug_assert!(self.contains(a) && self.contains(b));
        if a.idx == 0 || b.idx == 0 {
            return self.zero();
        }
        let l = self.0.log[a.idx as usize] + self.0.log[b.idx as usize];
        self.mk(self.0.exp[l as usize])
    }

    pub fn inv(&self, a: FFElement) -> Result<FFElement> {
        if a.idx == 0 {
            return Err(Error::DivisionByZero);
        }
        let n = self.n();
        let la = self.0.log[a.idx as usize];
        Ok(self.mk(self.0.exp[((n - la) % n) as usize]))
    }

    pub fn div(&self, a: FFElement, b: FFElement) -> Result<FFElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e`; negative exponents go through the inverse.
    pub fn pow(&self, a: FFElement, e: i64) -> Result<FFElement> {
        if a.idx == 0 {
            return match e.cmp(&0) {
                Ordering::Greater => Ok(self.zero()),
                Ordering::Equal => Ok(self.one()),
                Ordering::Less => Err(Error::DivisionByZero),
            };
        }
        let n = self.n() as i128;
        let l = (self.0.log[a.idx as usize] as i128 * e as i128).rem_euclid(n);
        Ok(self.mk(self.0.exp[l as usize]))
    }

    /// `a^e` for a nonzero exponent range that cannot fail.
    pub fn pow_u(&self, a: FFElement, e: u64) -> FFElement {
        if e == 0 {
            return self.one();
        }
        if a.idx == 0 {
            return self.zero();
        }
        let n = self.n() as u128;
        let l = (self.0.log[a.idx as usize] as u128 * e as u128) % n;
        self.mk(self.0.exp[l as usize])
    }

    pub fn frobenius(&self, a: FFElement) -> FFElement {
        self.pow_u(a, self.0.p as u64)
    }

    /// Multiplicative order of a unit.
    pub fn element_order(&self, a: FFElement) -> Option<u64> {
        let l = self.dlog(a)?;
        let n = self.unit_order();
        Some(n / arith::gcd(l, n))
    }

    pub fn is_square(&self, a: FFElement) -> bool {
        if a.idx == 0 || self.0.p == 2 {
            return true;
        }
        self.0.log[a.idx as usize].is_multiple_of(2)
    }

    /// A square root, if one exists; for odd `q` the other root is its negative.
    pub fn sqrt(&self, a: FFElement) -> Option<FFElement> {
        if a.idx == 0 {
            return Some(a);
        }
        let l = self.0.log[a.idx as usize] as u64;
        let n = self.unit_order();
        if self.0.p == 2 {
            // squaring is bijective; its inverse halves the log mod n (n odd)
            let half = arith::mod_inverse(2, n).unwrap_or(0);
            return Some(self.exp(l * half % n.max(1)));
        }
        l.is_multiple_of(2).then(|| self.exp(l / 2))
    }

    /// Lexicographic comparison of coefficient vectors `(c_0, c_1, ...)`.
    pub fn lex_cmp(&self, a: FFElement, b: FFElement) -> Ordering {
        self.coeffs(a).cmp(&self.coeffs(b))
    }

    pub fn lex_key(&self, a: FFElement) -> Vec<u32> {
        self.coeffs(a)
    }

    fn check(&self, x: FFElement) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    /// Checked arithmetic entry point: operands are validated against this field.
    pub fn arith(&self, op: ArithOp, x: FFElement, y: Operand) -> Result<FFElement> {
        self.check(x)?;
        let elem = |y: Operand| -> Result<FFElement> {
            match y {
                Operand::Element(e) => {
                    self.check(e)?;
                    Ok(e)
                }
                _ => Err(Error::Parse("binary operation needs an element operand".into())),
            }
        };
        match op {
            ArithOp::Add => Ok(self.add(x, elem(y)?)),
            ArithOp::Sub => Ok(self.sub(x, elem(y)?)),
            ArithOp::Mul => Ok(self.mul(x, elem(y)?)),
            ArithOp::Div => self.div(x, elem(y)?),
            ArithOp::Inv => self.inv(x),
            ArithOp::Pow => match y {
                Operand::Exponent(e) => self.pow(x, e),
                _ => Err(Error::Parse("pow needs an integer exponent".into())),
            },
        }
    }

    /// Primitive element and unit-group order.
    pub fn group_structure(&self) -> (FFElement, u64) {
        (self.generator(), self.unit_order())
    }

    /// Render as `GF(p)` or `GF(p^m)` for tower fields, else `GF(p^m; f0,f1,...)`.
    pub fn literal(&self) -> String {
        let in_tower = super::Tower::for_prime(self.0.p as u64).ok().and_then(|t| t.degree_of(self)).is_some();
        match (in_tower, self.0.m) {
            (true, 1) => format!("GF({})", self.0.p),
            (true, m) => format!("GF({}^{m})", self.0.p),
            _ => {
                let cs: Vec<String> = self.0.modulus.iter().map(|c| c.to_string()).collect();
                format!("GF({}^{}; {})", self.0.p, self.0.m, cs.join(","))
            }
        }
    }
}

fn times_x(a: &[u32], f: &[u32], p: u32) -> Vec<u32> {
    let mut s = Vec::with_capacity(a.len() + 1);
    s.push(0);
    s.extend_from_slice(a);
    slow::rem(&s, f, p)
}

fn is_primitive_slow(g: &[u32], f: &[u32], p: u32) -> bool {
    let m = f.len() - 1;
    let order = (p as u128).pow(m as u32) - 1;
    let g = slow::trim(g.to_vec());
    if g.is_empty() {
        return false;
    }
    if !slow::is_one(&slow::powmod(&g, order, f, p)) {
        return false;
    }
    arith::prime_factors(order as u64).into_iter().all(|r| !slow::is_one(&slow::powmod(&g, order / r as u128, f, p)))
}

/// Returns a monic proper factor of `f` if one exists (trial division).
fn find_factor(f: &[u32], p: u32) -> Option<Vec<u32>> {
    let m = f.len() - 1;
    for d in 1..=m / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut g = decode(idx as u32, p, d);
            g.push(1);
            if slow::rem(f, &g, p).is_empty() {
                return Some(g);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_degree_one() {
        let f2 = FieldExtension::new(2, &[1, 1]).unwrap();
        assert_eq!(f2.order(), 2);
        assert_eq!(f2.degree(), 1);
        assert_eq!(f2.group_structure().1, 1);
        assert_eq!(f2.add(f2.one(), f2.one()), f2.zero());
    }

    #[test]
    fn construction_errors() {
        assert_eq!(FieldExtension::new(4, &[1, 1]).unwrap_err(), Error::NotPrime(4));
        match FieldExtension::new(3, &[2, 0, 1]).unwrap_err() {
            Error::Reducible { witness } => {
                // x^2 - 1 = (x - 1)(x + 1): first witness found is x + 1 or x - 1
                assert!(witness == vec![1, 1] || witness == vec![2, 1]);
            }
            e => panic!("unexpected {e:?}"),
        }
        assert_eq!(FieldExtension::new(3, &[1, 0, 2]).unwrap_err(), Error::NotMonic);
    }

    #[test]
    fn small_arithmetic() {
        let f5 = FieldExtension::new(5, &[3, 1]).unwrap();
        assert_eq!(f5.inv(f5.from_int(2)).unwrap(), f5.from_int(3));
        let f7 = FieldExtension::new(7, &[4, 1]).unwrap();
        assert_eq!(f7.pow(f7.from_int(3), -1).unwrap(), f7.from_int(5));
        assert_eq!(f7.inv(f7.zero()), Err(Error::DivisionByZero));
        let f9 = FieldExtension::new(3, &[1, 0, 1]).unwrap();
        let x = f9.from_coeffs(&[0, 1]).unwrap();
        assert_eq!(f9.mul(x, x), f9.from_int(2));
    }

    #[test]
    fn f9_generator_has_order_eight() {
        let f9 = FieldExtension::new(3, &[1, 0, 1]).unwrap();
        let (g, n) = f9.group_structure();
        assert_eq!(n, 8);
        assert_eq!(f9.pow_u(g, 4), f9.from_int(2));
        assert_eq!(f9.element_order(g), Some(8));
    }

    #[test]
    fn mismatched_fields_are_rejected() {
        let f5 = FieldExtension::new(5, &[3, 1]).unwrap();
        let f7 = FieldExtension::new(7, &[4, 1]).unwrap();
        let r = f5.arith(ArithOp::Add, f5.one(), Operand::Element(f7.one()));
        assert_eq!(r, Err(Error::FieldMismatch));
    }

    #[test]
    fn exhaustive_field_axioms_f27() {
        let f = FieldExtension::new(3, &[1, 2, 0, 1]).unwrap();
        let els: Vec<_> = f.elements().collect();
        for &a in &els {
            assert_eq!(f.add(a, f.neg(a)), f.zero());
            for &b in &els {
                let s = f.add(a, b);
                assert_eq!(s, f.add(b, a));
                // coefficientwise oracle for addition
                let want: Vec<u32> = f.coeffs(a).iter().zip(f.coeffs(b)).map(|(x, y)| (x + y) % 3).collect();
                assert_eq!(f.coeffs(s), want);
                for &c in els.iter().step_by(5) {
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }
}
