use super::field::{FFElement, FieldExtension};
use crate::arith;
use crate::error::{Error, Result};

/// A field homomorphism `src -> dst`, stored as the discrete log (in `dst`)
/// of the image of `src`'s primitive element.
#[derive(Clone, Debug)]
pub struct Embedding {
    src: FieldExtension,
    dst: FieldExtension,
    image_log: u64,
}

impl Embedding {
    pub(crate) fn from_image_log(src: FieldExtension, dst: FieldExtension, image_log: u64) -> Self {
        Embedding { src, dst, image_log }
    }

    fn check_degrees(src: &FieldExtension, dst: &FieldExtension) -> Result<()> {
        if src.characteristic() != dst.characteristic() || !dst.degree().is_multiple_of(src.degree()) {
            return Err(Error::NoEmbedding { src: src.degree(), dst: dst.degree() });
        }
        Ok(())
    }

    /// The embedding sending `x` to the lexicographically least root of
    /// `src`'s defining polynomial inside `dst`.
    pub fn distinguished(src: &FieldExtension, dst: &FieldExtension) -> Result<Self> {
        Self::check_degrees(src, dst)?;
        let roots = roots_of_prime_poly(src.modulus(), dst);
        let root = roots
            .into_iter()
            .min_by(|a, b| dst.lex_cmp(*a, *b))
            .ok_or(Error::NoEmbedding { src: src.degree(), dst: dst.degree() })?;
        Ok(Self::with_root(src, dst, root))
    }

    /// The embedding sending the class of `x` in `src` to `root`.
    pub fn with_root(src: &FieldExtension, dst: &FieldExtension, root: FFElement) -> Self {
        let g = src.coeffs(src.generator());
        let image = eval_prime_poly(&g, dst, root);
        let image_log = dst.dlog(image).unwrap_or(0);
        Embedding { src: src.clone(), dst: dst.clone(), image_log }
    }

    pub fn identity(f: &FieldExtension) -> Self {
        Embedding { src: f.clone(), dst: f.clone(), image_log: 1 }
    }

    pub fn src(&self) -> &FieldExtension {
        &self.src
    }

    pub fn dst(&self) -> &FieldExtension {
        &self.dst
    }

    pub fn relative_degree(&self) -> usize {
        self.dst.degree() / self.src.degree()
    }

    pub fn apply(&self, x: FFElement) -> FFElement {
        match self.src.dlog(x) {
            None => self.dst.zero(),
            Some(l) => {
                let n = self.dst.unit_order() as u128;
                let e = (l as u128 * self.image_log as u128) % n.max(1);
                self.dst.exp(e as u64)
            }
        }
    }

    /// Preimage of `y` under the embedding, if `y` lies in the image.
    pub fn preimage(&self, y: FFElement) -> Option<FFElement> {
        let Some(ly) = self.dst.dlog(y) else {
            return Some(self.src.zero());
        };
        let n_dst = self.dst.unit_order();
        let n_src = self.src.unit_order();
        if n_src == 0 || n_dst == 0 {
            return Some(self.src.one());
        }
        let c = n_dst / n_src.max(1);
        if ly % c != 0 {
            return None;
        }
        // image_log = c * u with u a unit mod n_src
        let u = (self.image_log / c) % n_src.max(1);
        let u_inv = arith::mod_inverse(u, n_src)?;
        let k = ((ly / c) as u128 * u_inv as u128 % n_src as u128) as u64;
        Some(self.src.exp(k))
    }

    /// Composition `self` after `inner`: `inner.src -> inner.dst = self.src -> self.dst`.
    pub fn compose(&self, inner: &Embedding) -> Result<Embedding> {
        if inner.dst != self.src {
            return Err(Error::FieldMismatch);
        }
        let g_img = self.apply(inner.dst.exp(inner.image_log));
        let image_log = self.dst.dlog(g_img).unwrap_or(0);
        Ok(Embedding { src: inner.src.clone(), dst: self.dst.clone(), image_log })
    }

    /// Relative norm `dst -> src`: the product of the Frobenius conjugates
    /// `x^{q^i}` over `src`, pulled back along the embedding.
    pub fn norm(&self, x: FFElement) -> FFElement {
        let qs = self.src.order() as u64;
        let mut acc = self.dst.one();
        let mut conj = x;
        for _ in 0..self.relative_degree() {
            acc = self.dst.mul(acc, conj);
            conj = self.dst.pow_u(conj, qs);
        }
        self.preimage(acc).expect("norm is fixed by the relative Frobenius")
    }

    /// Relative trace `dst -> src`: the sum of the Frobenius conjugates.
    pub fn trace(&self, x: FFElement) -> FFElement {
        let qs = self.src.order() as u64;
        let mut acc = self.dst.zero();
        let mut conj = x;
        for _ in 0..self.relative_degree() {
            acc = self.dst.add(acc, conj);
            conj = self.dst.pow_u(conj, qs);
        }
        self.preimage(acc).expect("trace is fixed by the relative Frobenius")
    }

    /// Relative Frobenius `x -> x^{|src|}` on `dst`.
    pub fn frobenius(&self, x: FFElement) -> FFElement {
        self.dst.pow_u(x, self.src.order() as u64)
    }

    pub fn same_map(&self, other: &Embedding) -> bool {
        self.src == other.src && self.dst == other.dst && {
            let g = self.src.generator();
            self.apply(g) == other.apply(g)
        }
    }
}

/// Evaluate a polynomial with prime-field coefficients at `at` in `field`.
pub(crate) fn eval_prime_poly(coeffs: &[u32], field: &FieldExtension, at: FFElement) -> FFElement {
    coeffs.iter().rev().fold(field.zero(), |acc, &c| field.add(field.mul(acc, at), field.from_int(c as i64)))
}

/// All roots in `field` of a polynomial with prime-field coefficients (exhaustive).
pub(crate) fn roots_of_prime_poly(coeffs: &[u32], field: &FieldExtension) -> Vec<FFElement> {
    field.elements().filter(|&z| field.is_zero(eval_prime_poly(coeffs, field, z))).collect()
}

/// Image of `x` under the distinguished embedding.
pub fn embed(src: &FieldExtension, dst: &FieldExtension, x: FFElement) -> Result<FFElement> {
    if !src.contains(x) {
        return Err(Error::FieldMismatch);
    }
    Ok(Embedding::distinguished(src, dst)?.apply(x))
}

/// Relative norm from `sup` down to `sub` along the distinguished embedding.
pub fn norm(sub: &FieldExtension, sup: &FieldExtension, x: FFElement) -> Result<FFElement> {
    if !sup.contains(x) {
        return Err(Error::FieldMismatch);
    }
    Ok(Embedding::distinguished(sub, sup)?.norm(x))
}

/// Relative trace from `sup` down to `sub` along the distinguished embedding.
pub fn trace(sub: &FieldExtension, sup: &FieldExtension, x: FFElement) -> Result<FFElement> {
    if !sup.contains(x) {
        return Err(Error::FieldMismatch);
    }
    Ok(Embedding::distinguished(sub, sup)?.trace(x))
}

pub fn lex_min<'a>(field: &FieldExtension, xs: impl IntoIterator<Item = &'a FFElement>) -> Option<FFElement> {
    xs.into_iter().copied().min_by(|a, b| field.lex_cmp(*a, *b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64, c: &[u32]) -> FieldExtension {
        FieldExtension::new(p, c).unwrap()
    }

    #[test]
    fn prime_subfield_is_fixed() {
        let f3 = f(3, &[1, 1]);
        let f9 = f(3, &[1, 0, 1]);
        assert_eq!(embed(&f3, &f9, f3.from_int(2)).unwrap(), f9.from_int(2));
        let x = f9.from_coeffs(&[0, 1]).unwrap();
        assert_eq!(embed(&f9, &f9, x).unwrap(), x);
    }

    #[test]
    fn f4_into_f16_lands_on_order_three() {
        let f4 = f(2, &[1, 1, 1]);
        let f16 = f(2, &[1, 1, 0, 0, 1]);
        let g = f4.generator();
        let img = embed(&f4, &f16, g).unwrap();
        assert_eq!(f16.element_order(img), Some(3));
        // homomorphism, exhaustively
        let e = Embedding::distinguished(&f4, &f16).unwrap();
        for a in f4.elements() {
            for b in f4.elements() {
                assert_eq!(e.apply(f4.add(a, b)), f16.add(e.apply(a), e.apply(b)));
                assert_eq!(e.apply(f4.mul(a, b)), f16.mul(e.apply(a), e.apply(b)));
            }
        }
    }

    #[test]
    fn degree_mismatch() {
        let f4 = f(2, &[1, 1, 1]);
        let f8 = f(2, &[1, 1, 0, 1]);
        assert!(matches!(embed(&f4, &f8, f4.one()), Err(Error::NoEmbedding { .. })));
    }

    #[test]
    fn f9_norm_of_generator_is_minus_one() {
        let f3 = f(3, &[1, 1]);
        let f9 = f(3, &[1, 0, 1]);
        let g = f9.generator();
        assert_eq!(norm(&f3, &f9, g).unwrap(), f3.from_int(2));
        // surjective onto F_3^x by brute force over all 8 units
        let imgs: std::collections::BTreeSet<_> = f9.units().map(|u| norm(&f3, &f9, u).unwrap()).collect();
        assert_eq!(imgs.len(), 2);
        assert_eq!(norm(&f9, &f9, g).unwrap(), g);
    }

    #[test]
    fn norm_transitive_f2_f4_f16() {
        let f2 = f(2, &[1, 1]);
        let f4 = f(2, &[1, 1, 1]);
        let f16 = f(2, &[1, 1, 0, 0, 1]);
        let e24 = Embedding::distinguished(&f2, &f4).unwrap();
        let e416 = Embedding::distinguished(&f4, &f16).unwrap();
        let e216 = e416.compose(&e24).unwrap();
        for x in f16.elements() {
            assert_eq!(e216.norm(x), e24.norm(e416.norm(x)));
            assert_eq!(norm(&f2, &f16, x).unwrap(), e24.norm(e416.norm(x)));
        }
    }

    #[test]
    fn preimage_roundtrip() {
        let f5 = f(5, &[3, 1]);
        let f25 = f(5, &[2, 1, 1]);
        let e = Embedding::distinguished(&f5, &f25).unwrap();
        for a in f5.elements() {
            assert_eq!(e.preimage(e.apply(a)), Some(a));
        }
        let outside = f25.units().filter(|&y| e.preimage(y).is_none()).count();
        assert_eq!(outside, 25 - 5);
    }
}
