use rand::Rng;

use super::curve::{Curve, FuncElement};
use crate::poly::Poly;

impl Curve {
    /// A random polynomial of degree at most `deg`.
    pub fn random_poly<R: Rng>(&self, rng: &mut R, deg: usize) -> Poly {
        let k = self.base_field();
        let n = rng.gen_range(0..=deg);
        let c = (0..=n).map(|_| k.from_index(rng.gen_range(0..k.order()))).collect();
        self.poly_ring().from_coeffs(c)
    }

    /// A random nonzero element: a fraction of polynomials of degree at
    /// most `deg`, plus (on elliptic curves, with probability 1/2) a
    /// polynomial multiple of `y`.
    pub fn random_element<R: Rng>(&self, rng: &mut R, deg: usize) -> FuncElement {
        loop {
            let num = self.random_poly(rng, deg);
            let mut den = self.random_poly(rng, deg);
            if den.is_zero() {
                den = self.poly_ring().one();
            }
            let mut f = self.fraction(num, den).expect("nonzero denominator");
            if self.is_elliptic() && rng.gen_bool(0.5) {
                let b = self.random_poly(rng, deg.saturating_sub(1));
                f = self.add(&f, &self.mul(&self.from_poly(b), &self.y()));
            }
            if !f.is_zero() {
                return f;
            }
        }
    }
}
