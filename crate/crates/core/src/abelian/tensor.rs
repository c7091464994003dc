use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::group::{quotient_rows, FinAbGroup, GroupElement};
use crate::error::{Error, Result};

/// `A_1 ⊗ ... ⊗ A_r` for finite groups given by cyclic decompositions.
///
/// Raw coordinates live in `⊕ Z/gcd(d_{i_1}, ..., d_{i_r})`, one component
/// per index tuple with gcd > 1; `group` is that sum in invariant-factor
/// form with a projection from the raw coordinates.
#[derive(Clone, Debug)]
pub struct TensorProduct {
    factors: Vec<Vec<BigInt>>,
    components: Vec<(Vec<usize>, BigInt)>,
    group: FinAbGroup,
}

impl TensorProduct {
    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    pub fn factors(&self) -> &[Vec<BigInt>] {
        &self.factors
    }

    /// Moduli of the raw components, in component order.
    pub fn moduli(&self) -> Vec<BigInt> {
        self.components.iter().map(|(_, g)| g.clone()).collect()
    }

    pub fn components(&self) -> &[(Vec<usize>, BigInt)] {
        &self.components
    }

    /// Raw coordinates of the pure tensor `x_1 ⊗ ... ⊗ x_r`, where `x_i` is
    /// given by its coordinates in the cyclic decomposition of factor `i`.
    pub fn raw(&self, xs: &[&[BigInt]]) -> Result<Vec<BigInt>> {
        if xs.len() != self.factors.len() || xs.iter().zip(&self.factors).any(|(x, f)| x.len() != f.len()) {
            return Err(Error::GroupMismatch);
        }
        Ok(self
            .components
            .iter()
            .map(|(idx, g)| {
                let mut acc = BigInt::one();
                for (x, &i) in xs.iter().zip(idx) {
                    acc = (acc * &x[i]).mod_floor(g);
                    if acc.is_zero() {
                        break;
                    }
                }
                acc
            })
            .collect())
    }

    /// The class of the pure tensor in [`TensorProduct::group`].
    pub fn eval(&self, xs: &[&[BigInt]]) -> Result<GroupElement> {
        self.group.project(&self.raw(xs)?)
    }

    /// Evaluator on elements of the factor groups.
    pub fn eval_elements(&self, factors: &[&FinAbGroup], xs: &[&GroupElement]) -> Result<GroupElement> {
        if factors.len() != xs.len() {
            return Err(Error::GroupMismatch);
        }
        for (g, x) in factors.iter().zip(xs) {
            // ownership check
            g.is_zero(x)?;
        }
        let coords: Vec<&[BigInt]> = xs.iter().map(|x| x.coords()).collect();
        self.eval(&coords)
    }
}

/// Tensor product of finite groups given as lists of cyclic orders.
pub fn tensor_cyclic(factors: &[Vec<BigInt>]) -> Result<TensorProduct> {
    let mut components: Vec<(Vec<usize>, BigInt)> = vec![(Vec::new(), BigInt::zero())];
    for f in factors {
        let mut next = Vec::new();
        for (idx, g) in &components {
            for (i, d) in f.iter().enumerate() {
                let h = if idx.is_empty() { d.clone() } else { g.gcd(d) };
                if h.is_one() {
                    continue;
                }
                let mut j = idx.clone();
                j.push(i);
                next.push((j, h));
            }
        }
        components = next;
    }
    if factors.is_empty() {
        // empty tensor product is Z, not needed here
        return Err(Error::Config("tensor product of no factors".into()));
    }
    let k = components.len();
    let rows = components.iter().enumerate().map(|(i, (_, g))| {
        let mut r = vec![BigInt::zero(); k];
        r[i] = g.clone();
        r
    });
    let group = quotient_rows(k, rows)?;
    Ok(TensorProduct { factors: factors.to_vec(), components, group })
}

/// Tensor product of finite groups with the multilinear evaluator.
pub fn tensor(factors: &[&FinAbGroup]) -> Result<TensorProduct> {
    if factors.iter().any(|g| !g.is_finite()) {
        return Err(Error::InfiniteFactor);
    }
    let cyc: Vec<Vec<BigInt>> = factors.iter().map(|g| g.invariants().to_vec()).collect();
    tensor_cyclic(&cyc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[u64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn gcd_rule() {
        let t = tensor_cyclic(&[big(&[4]), big(&[6])]).unwrap();
        assert_eq!(t.group().invariants_u64(), vec![2]);
        let t = tensor_cyclic(&[big(&[4])]).unwrap();
        assert_eq!(t.group().invariants_u64(), vec![4]);
        let e = t.eval(&[&big(&[3])]).unwrap();
        assert_eq!(e.coords(), &big(&[3])[..]);
        let t = tensor_cyclic(&[big(&[2, 4]), big(&[8])]).unwrap();
        assert_eq!(t.group().invariants_u64(), vec![2, 4]);
        let t = tensor_cyclic(&[big(&[3]), big(&[4])]).unwrap();
        assert!(t.group().is_trivial());
    }

    #[test]
    fn infinite_factor_rejected() {
        let z = FinAbGroup::cyclic(0);
        assert!(matches!(tensor(&[&z]), Err(Error::InfiniteFactor)));
    }
}
