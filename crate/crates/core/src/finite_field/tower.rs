use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use super::embed::Embedding;
use super::field::{slow, x_is_primitive, FieldExtension, FIELD_ORDER_CAP};
use crate::arith;
use crate::error::{Error, Result};

/// The compatible family of fields `F_{p^m}` for one prime `p`.
///
/// Each `F_{p^m}` is presented by the first monic polynomial `f_m` (in
/// index order of its lower coefficients) such that `x` is primitive modulo
/// `f_m` and `x^{(p^m-1)/(p^d-1)}` is a root of `f_d` for every proper
/// divisor `d` of `m`. The embedding `F_{p^d} -> F_{p^m}` is then
/// `x -> x^{(p^m-1)/(p^d-1)}`, and these embeddings compose exactly.
pub struct Tower {
    p: u32,
    fields: Mutex<BTreeMap<usize, FieldExtension>>,
}

static TOWERS: OnceLock<Mutex<HashMap<u32, Arc<Tower>>>> = OnceLock::new();

impl std::fmt::Debug for Tower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Tower(p={})", self.p)
    }
}

impl Tower {
    /// The shared tower for prime `p`.
    pub fn for_prime(p: u64) -> Result<Arc<Tower>> {
        if !arith::is_prime(p) || p > u32::MAX as u64 {
            return Err(Error::NotPrime(p));
        }
        let map = TOWERS.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = map.lock().expect("tower registry poisoned");
        Ok(guard
            .entry(p as u32)
            .or_insert_with(|| Arc::new(Tower { p: p as u32, fields: Mutex::new(BTreeMap::new()) }))
            .clone())
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    /// The tower field of degree `m` over `F_p`.
    pub fn field(&self, m: usize) -> Result<FieldExtension> {
        if m == 0 {
            return Err(Error::Config("field degree must be positive".into()));
        }
        match arith::checked_pow(self.p as u64, m) {
            Some(q) if q <= FIELD_ORDER_CAP => {}
            other => return Err(Error::FieldTooLarge { order: other.unwrap_or(u64::MAX), cap: FIELD_ORDER_CAP }),
        }
        if let Some(f) = self.fields.lock().expect("tower poisoned").get(&m) {
            return Ok(f.clone());
        }
        // subfields first, without holding the lock
        let mut sub = Vec::new();
        for d in arith::divisors(m as u64) {
            let d = d as usize;
            if d < m {
                sub.push((d, self.field(d)?));
            }
        }
        let modulus = self.search_modulus(m, &sub);
        let field = FieldExtension::from_primitive_modulus(self.p, modulus);
        let mut guard = self.fields.lock().expect("tower poisoned");
        Ok(guard.entry(m).or_insert(field).clone())
    }

    fn search_modulus(&self, m: usize, sub: &[(usize, FieldExtension)]) -> Vec<u32> {
        let p = self.p;
        let q = (p as u128).pow(m as u32);
        let count = (p as u64).pow(m as u32);
        for idx in 0..count {
            let mut f: Vec<u32> = Vec::with_capacity(m + 1);
            let mut v = idx;
            for _ in 0..m {
                f.push((v % p as u64) as u32);
                v /= p as u64;
            }
            f.push(1);
            if f[0] == 0 || !x_is_primitive(&f, p) {
                continue;
            }
            let compatible = sub.iter().all(|(d, fd)| {
                let qd = (p as u128).pow(*d as u32);
                let z = slow::powmod(&[0, 1], (q - 1) / (qd - 1), &f, p);
                slow::eval_at(fd.modulus(), &z, &f, p).is_empty()
            });
            if compatible {
                return f;
            }
        }
        unreachable!("compatible primitive polynomials exist in every degree")
    }

    /// The canonical embedding `F_{p^d} -> F_{p^m}` for `d | m`.
    pub fn embedding(&self, d: usize, m: usize) -> Result<Embedding> {
        if d == 0 || !m.is_multiple_of(d) {
            return Err(Error::NoEmbedding { src: d, dst: m });
        }
        let src = self.field(d)?;
        let dst = self.field(m)?;
        let c = (dst.unit_order()) / src.unit_order().max(1);
        // for d = 1 the generator of F_p is the root of f_1, still x mod f_1
        Ok(Embedding::from_image_log(src, dst, c))
    }

    /// The degree of `f` over `F_p` if `f` is one of this tower's fields.
    pub fn degree_of(&self, f: &FieldExtension) -> Option<usize> {
        let guard = self.fields.lock().expect("tower poisoned");
        guard.iter().find(|(_, g)| *g == f).map(|(m, _)| *m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tower_fields_and_embeddings_compose() {
        let t = Tower::for_prime(2).unwrap();
        let e12 = t.embedding(1, 2).unwrap();
        let e24 = t.embedding(2, 4).unwrap();
        let e14 = t.embedding(1, 4).unwrap();
        assert!(e24.compose(&e12).unwrap().same_map(&e14));
        let f4 = t.field(2).unwrap();
        let f16 = t.field(4).unwrap();
        for a in f4.elements() {
            for b in f4.elements() {
                assert_eq!(e24.apply(f4.mul(a, b)), f16.mul(e24.apply(a), e24.apply(b)));
                assert_eq!(e24.apply(f4.add(a, b)), f16.add(e24.apply(a), e24.apply(b)));
            }
        }
    }

    #[test]
    fn tower_generator_is_x() {
        let t = Tower::for_prime(3).unwrap();
        let f9 = t.field(2).unwrap();
        assert_eq!(f9.coeffs(f9.generator()), vec![0, 1]);
        assert_eq!(f9.element_order(f9.generator()), Some(8));
        let f3 = t.field(1).unwrap();
        assert_eq!(f3.element_order(f3.generator()), Some(2));
    }

    #[test]
    fn cap_is_enforced() {
        let t = Tower::for_prime(2).unwrap();
        assert!(matches!(t.field(21), Err(Error::FieldTooLarge { .. })));
    }
}
