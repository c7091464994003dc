//! Dense univariate polynomials over a finite field, with factorization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::finite_field::{Embedding, FFElement, FieldExtension};

/// Coefficients low-to-high with no trailing zeros; the zero polynomial is empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    c: Vec<FFElement>,
}

impl Poly {
    pub fn coeffs(&self) -> &[FFElement] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn deg_i(&self) -> i64 {
        self.c.len() as i64 - 1
    }

    pub fn lc(&self) -> Option<FFElement> {
        self.c.last().copied()
    }

    pub fn coeff(&self, i: usize) -> Option<FFElement> {
        self.c.get(i).copied()
    }

    pub fn key(&self) -> Vec<u32> {
        self.c.iter().map(|e| e.index()).collect()
    }
}

/// Polynomial arithmetic over a fixed coefficient field.
#[derive(Clone, Debug)]
pub struct PolyRing {
    k: FieldExtension,
}

impl PolyRing {
    pub fn new(k: &FieldExtension) -> Self {
        PolyRing { k: k.clone() }
    }

    pub fn field(&self) -> &FieldExtension {
        &self.k
    }

    pub fn from_coeffs(&self, mut c: Vec<FFElement>) -> Poly {
        while c.last().is_some_and(|e| self.k.is_zero(*e)) {
            c.pop();
        }
        Poly { c }
    }

    pub fn from_ints(&self, c: &[i64]) -> Poly {
        self.from_coeffs(c.iter().map(|&v| self.k.from_int(v)).collect())
    }

    pub fn zero(&self) -> Poly {
        Poly { c: Vec::new() }
    }

    pub fn one(&self) -> Poly {
        self.constant(self.k.one())
    }

    pub fn constant(&self, a: FFElement) -> Poly {
        self.from_coeffs(vec![a])
    }

    pub fn x(&self) -> Poly {
        Poly { c: vec![self.k.zero(), self.k.one()] }
    }

    /// `x - a`.
    pub fn linear(&self, a: FFElement) -> Poly {
        Poly { c: vec![self.k.neg(a), self.k.one()] }
    }

    pub fn is_one(&self, a: &Poly) -> bool {
        a.c.len() == 1 && a.c[0] == self.k.one()
    }

    pub fn add(&self, a: &Poly, b: &Poly) -> Poly {
        let n = a.c.len().max(b.c.len());
        let z = self.k.zero();
        let c = (0..n).map(|i| self.k.add(*a.c.get(i).unwrap_or(&z), *b.c.get(i).unwrap_or(&z))).collect();
        self.from_coeffs(c)
    }

    pub fn neg(&self, a: &Poly) -> Poly {
        Poly { c: a.c.iter().map(|&e| self.k.neg(e)).collect() }
    }

    pub fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &Poly, s: FFElement) -> Poly {
        self.from_coeffs(a.c.iter().map(|&e| self.k.mul(e, s)).collect())
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return self.zero();
        }
        let mut out = vec![self.k.zero(); a.c.len() + b.c.len() - 1];
        for (i, &x) in a.c.iter().enumerate() {
            if self.k.is_zero(x) {
                continue;
            }
            for (j, &y) in b.c.iter().enumerate() {
                out[i + j] = self.k.add(out[i + j], self.k.mul(x, y));
            }
        }
        self.from_coeffs(out)
    }

    pub fn pow(&self, a: &Poly, mut e: u64) -> Poly {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Division with remainder; panics on a zero divisor.
    pub fn divrem(&self, a: &Poly, b: &Poly) -> (Poly, Poly) {
        assert!(!b.is_zero(), "polynomial division by zero");
        let db = b.c.len() - 1;
        if a.c.len() <= db {
            return (self.zero(), a.clone());
        }
        let lc_inv = self.k.inv(b.c[db]).expect("nonzero leading coefficient");
        let mut r = a.c.clone();
        let mut q = vec![self.k.zero(); a.c.len() - db];
        for i in (0..q.len()).rev() {
            let coef = self.k.mul(r[i + db], lc_inv);
            q[i] = coef;
            if self.k.is_zero(coef) {
                continue;
            }
            for (j, &bj) in b.c.iter().enumerate() {
                r[i + j] = self.k.sub(r[i + j], self.k.mul(coef, bj));
            }
        }
        r.truncate(db);
        (self.from_coeffs(q), self.from_coeffs(r))
    }

    pub fn rem(&self, a: &Poly, b: &Poly) -> Poly {
        self.divrem(a, b).1
    }

    /// Exact quotient; debug-asserts zero remainder.
    pub fn div_exact(&self, a: &Poly, b: &Poly) -> Poly {
        let (q, r) = self.divrem(a, b);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn monic(&self, a: &Poly) -> Poly {
        match a.lc() {
            None => a.clone(),
            Some(l) => self.scale(a, self.k.inv(l).expect("nonzero")),
        }
    }

    pub fn is_monic(&self, a: &Poly) -> bool {
        a.lc() == Some(self.k.one())
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, a: &Poly, b: &Poly) -> Poly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = self.rem(&x, &y);
            x = y;
            y = r;
        }
        self.monic(&x)
    }

    pub fn derivative(&self, a: &Poly) -> Poly {
        let c = a.c.iter().enumerate().skip(1).map(|(i, &e)| self.k.mul(e, self.k.from_int(i as i64))).collect();
        self.from_coeffs(c)
    }

    pub fn eval(&self, a: &Poly, at: FFElement) -> FFElement {
        a.c.iter().rev().fold(self.k.zero(), |acc, &c| self.k.add(self.k.mul(acc, at), c))
    }

    /// Evaluate at a point of an extension, mapping coefficients along `emb`.
    pub fn eval_in(&self, a: &Poly, emb: &Embedding, at: FFElement) -> FFElement {
        let l = emb.dst();
        a.c.iter().rev().fold(l.zero(), |acc, &c| l.add(l.mul(acc, at), emb.apply(c)))
    }

    /// Map coefficients into an extension field.
    pub fn map_to(&self, a: &Poly, emb: &Embedding) -> Poly {
        PolyRing::new(emb.dst()).from_coeffs(a.c.iter().map(|&c| emb.apply(c)).collect())
    }

    pub fn mulmod(&self, a: &Poly, b: &Poly, m: &Poly) -> Poly {
        self.rem(&self.mul(a, b), m)
    }

    pub fn powmod(&self, a: &Poly, mut e: u128, m: &Poly) -> Poly {
        let mut acc = self.rem(&self.one(), m);
        let mut base = self.rem(a, m);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mulmod(&acc, &base, m);
            }
            e >>= 1;
            if e > 0 {
                base = self.mulmod(&base, &base, m);
            }
        }
        acc
    }

    /// Multiplicity of `p` in `a` (a nonzero) and the cofactor.
    pub fn valuation(&self, a: &Poly, p: &Poly) -> (u32, Poly) {
        let mut v = 0;
        let mut cur = a.clone();
        loop {
            let (q, r) = self.divrem(&cur, p);
            if !r.is_zero() || cur.is_zero() {
                return (v, cur);
            }
            v += 1;
            cur = q;
        }
    }

    fn q(&self) -> u128 {
        self.k.order() as u128
    }

    /// Rabin-style irreducibility test.
    pub fn is_irreducible(&self, f: &Poly) -> bool {
        let Some(n) = f.degree() else { return false };
        if n == 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        let f = self.monic(f);
        let x = self.x();
        let mut h = x.clone();
        for i in 1..=n / 2 {
            h = self.powmod(&h, self.q(), &f);
            let g = self.gcd(&f, &self.sub(&h, &x));
            if !self.is_one(&g) {
                return false;
            }
            let _ = i;
        }
        true
    }

    fn pth_root(&self, a: &Poly) -> Poly {
        let p = self.k.characteristic() as usize;
        let e = self.k.order() as u64 / p as u64;
        let c = a.c.iter().step_by(p).map(|&v| self.k.pow_u(v, e)).collect();
        self.from_coeffs(c)
    }

    /// Square-free decomposition of a monic polynomial: `(factor, multiplicity)`.
    pub fn squarefree(&self, f: &Poly) -> Vec<(Poly, u32)> {
        let f = self.monic(f);
        let mut out = Vec::new();
        if f.degree().unwrap_or(0) == 0 {
            return out;
        }
        let d = self.derivative(&f);
        if d.is_zero() {
            let r = self.pth_root(&f);
            let p = self.k.characteristic();
            return self.squarefree(&r).into_iter().map(|(g, m)| (g, m * p)).collect();
        }
        let mut c = self.gcd(&f, &d);
        let mut w = self.div_exact(&f, &c);
        let mut i = 1;
        while w.degree().unwrap_or(0) > 0 {
            let y = self.gcd(&w, &c);
            let z = self.div_exact(&w, &y);
            if z.degree().unwrap_or(0) > 0 {
                out.push((z, i));
            }
            i += 1;
            w = y;
            c = self.div_exact(&c, &w);
        }
        if c.degree().unwrap_or(0) > 0 {
            let r = self.pth_root(&c);
            let p = self.k.characteristic();
            out.extend(self.squarefree(&r).into_iter().map(|(g, m)| (g, m * p)));
        }
        out
    }

    /// Distinct-degree factorization of a monic square-free polynomial.
    pub fn distinct_degree(&self, f: &Poly) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        let mut f = self.monic(f);
        let x = self.x();
        let mut h = self.rem(&x, &f);
        let mut i = 0;
        while f.degree().unwrap_or(0) >= 2 * (i + 1) {
            i += 1;
            h = self.powmod(&h, self.q(), &f);
            let g = self.gcd(&f, &self.sub(&h, &x));
            if !self.is_one(&g) {
                f = self.div_exact(&f, &g);
                h = self.rem(&h, &f);
                out.push((g, i));
            }
        }
        if let Some(d) = f.degree() {
            if d > 0 {
                out.push((f, d));
            }
        }
        out
    }

    fn random_poly(&self, rng: &mut ChaCha8Rng, below: usize) -> Poly {
        let q = self.k.order();
        self.from_coeffs((0..below).map(|_| self.k.from_index(rng.gen_range(0..q))).collect())
    }

    /// Equal-degree splitting of a product of irreducibles of degree `d`.
    pub fn equal_degree(&self, f: &Poly, d: usize) -> Vec<Poly> {
        let n = f.degree().unwrap_or(0);
        if n == d {
            return vec![self.monic(f)];
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ (n as u64) << 8 ^ d as u64);
        let p = self.k.characteristic();
        let qd = self.q().pow(d as u32);
        loop {
            let a = self.random_poly(&mut rng, n);
            if a.degree().unwrap_or(0) == 0 {
                continue;
            }
            let b = if p == 2 {
                // trace map a + a^2 + ... + a^{2^{md-1}}
                let bits = (self.k.degree() * d) as u32;
                let mut t = self.rem(&a, f);
                let mut acc = t.clone();
                for _ in 1..bits {
                    t = self.mulmod(&t, &t, f);
                    acc = self.add(&acc, &t);
                }
                acc
            } else {
                self.sub(&self.powmod(&a, (qd - 1) / 2, f), &self.one())
            };
            let g = self.gcd(f, &b);
            let dg = g.degree().unwrap_or(0);
            if dg > 0 && dg < n {
                let h = self.div_exact(f, &g);
                let mut out = self.equal_degree(&g, d);
                out.extend(self.equal_degree(&h, d));
                return out;
            }
        }
    }

    /// Full factorization into monic irreducibles with multiplicities,
    /// sorted by (degree, coefficients). Constant factors are dropped.
    pub fn factor(&self, f: &Poly) -> Vec<(Poly, u32)> {
        let mut out = Vec::new();
        for (g, m) in self.squarefree(f) {
            for (h, d) in self.distinct_degree(&g) {
                for irr in self.equal_degree(&h, d) {
                    out.push((irr, m));
                }
            }
        }
        out.sort_by_key(|a| (a.0.degree(), a.0.key()));
        // merge equal factors that arose from different square-free layers
        let mut merged: Vec<(Poly, u32)> = Vec::new();
        for (g, m) in out {
            match merged.last_mut() {
                Some((h, k)) if *h == g => *k += m,
                _ => merged.push((g, m)),
            }
        }
        merged
    }

    /// All roots in the field (with repetition removed).
    pub fn roots(&self, f: &Poly) -> Vec<FFElement> {
        self.factor(f).into_iter().filter(|(g, _)| g.degree() == Some(1)).map(|(g, _)| self.k.neg(g.c[0])).collect()
    }

    /// Every monic polynomial of degree `n` (the count is `q^n`).
    pub fn monic_of_degree(&self, n: usize) -> impl Iterator<Item = Poly> + '_ {
        let q = self.k.order() as u64;
        let count = q.pow(n as u32);
        (0..count).map(move |mut idx| {
            let mut c = Vec::with_capacity(n + 1);
            for _ in 0..n {
                c.push(self.k.from_index((idx % q) as u32));
                idx /= q;
            }
            c.push(self.k.one());
            Poly { c }
        })
    }

    pub fn monic_irreducibles(&self, n: usize) -> Vec<Poly> {
        self.monic_of_degree(n).filter(|f| self.is_irreducible(f)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_field::Tower;

    fn ring(p: u64, m: usize) -> PolyRing {
        PolyRing::new(&Tower::for_prime(p).unwrap().field(m).unwrap())
    }

    #[test]
    fn factor_reconstructs_input() {
        for (p, m) in [(2, 1), (2, 2), (3, 1), (5, 1), (3, 2), (7, 1)] {
            let r = ring(p, m);
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            for _ in 0..40 {
                let deg = rng.gen_range(1..9);
                let mut f = r.random_poly(&mut rng, deg + 1);
                if f.degree().unwrap_or(0) == 0 {
                    continue;
                }
                f = r.monic(&f);
                let fac = r.factor(&f);
                let mut prod = r.one();
                for (g, e) in &fac {
                    assert!(r.is_irreducible(g), "{g:?} not irreducible");
                    prod = r.mul(&prod, &r.pow(g, *e as u64));
                }
                assert_eq!(prod, f);
            }
        }
    }

    #[test]
    fn repeated_factors_in_char_p() {
        let r = ring(3, 1);
        let x = r.x();
        // (x+1)^3 (x^2+1)^2 : derivative issues in characteristic 3
        let a = r.pow(&r.add(&x, &r.one()), 3);
        let b = r.pow(&r.from_ints(&[1, 0, 1]), 2);
        let f = r.mul(&a, &b);
        let fac = r.factor(&f);
        assert_eq!(fac, vec![(r.from_ints(&[1, 1]), 3), (r.from_ints(&[1, 0, 1]), 2)]);
    }

    #[test]
    fn irreducible_counts_match_necklace_formula() {
        // number of monic irreducibles of degree 2 over F_q is (q^2 - q)/2
        for (p, m) in [(2, 1), (3, 1), (5, 1), (2, 2)] {
            let r = ring(p, m);
            let q = r.field().order() as usize;
            assert_eq!(r.monic_irreducibles(2).len(), (q * q - q) / 2);
            assert_eq!(r.monic_irreducibles(3).len(), (q * q * q - q) / 3);
        }
    }
}
