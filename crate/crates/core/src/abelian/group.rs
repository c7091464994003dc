use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::matrix::IntMatrix;
use super::snf::{row_lattice_basis, snf};
use crate::error::{Error, Result};

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

fn fresh_id() -> u64 {
    NEXT_ID.fetch_add(1, Ordering::Relaxed)
}

/// A finitely generated abelian group `Z/d1 x ... x Z/ds x Z^r` with
/// `d1 | d2 | ...`, each `d_i >= 2`.
#[derive(Clone)]
pub struct FinAbGroup {
    id: u64,
    invariants: Vec<BigInt>,
    free_rank: usize,
    projection: Option<IntMatrix>,
}

/// An element of a [`FinAbGroup`] in normalized coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement {
    group: u64,
    coords: Vec<BigInt>,
}

impl GroupElement {
    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }
}

impl FinAbGroup {
    /// The group with the given invariant factors and free rank. Factors
    /// equal to 1 are dropped; the chain must be divisible.
    pub fn new(invariants: Vec<BigInt>, free_rank: usize) -> Result<Self> {
        let invariants: Vec<BigInt> = invariants.into_iter().filter(|d| !d.is_one()).collect();
        for w in invariants.windows(2) {
            if w[0] < BigInt::from(2) || !w[1].is_multiple_of(&w[0]) {
                return Err(Error::Invariant("invariant factors must form a divisibility chain".into()));
            }
        }
        if invariants.last().is_some_and(|d| d < &BigInt::from(2)) {
            return Err(Error::Invariant("invariant factors must be at least 2".into()));
        }
        Ok(FinAbGroup { id: fresh_id(), invariants, free_rank, projection: None })
    }

    pub fn trivial() -> Self {
        FinAbGroup { id: fresh_id(), invariants: Vec::new(), free_rank: 0, projection: None }
    }

    pub fn cyclic(n: u64) -> Self {
        match n {
            0 => FinAbGroup { id: fresh_id(), invariants: Vec::new(), free_rank: 1, projection: None },
            1 => Self::trivial(),
            _ => FinAbGroup { id: fresh_id(), invariants: vec![BigInt::from(n)], free_rank: 0, projection: None },
        }
    }

    pub fn invariants(&self) -> &[BigInt] {
        &self.invariants
    }

    /// Invariant factors as machine integers (panics past `u64`).
    pub fn invariants_u64(&self) -> Vec<u64> {
        self.invariants.iter().map(|d| d.to_u64().expect("invariant factor exceeds u64")).collect()
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn rank(&self) -> usize {
        self.invariants.len() + self.free_rank
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn is_trivial(&self) -> bool {
        self.invariants.is_empty() && self.free_rank == 0
    }

    /// The order, or `None` for infinite groups.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.invariants.iter().product())
    }

    /// Projection matrix from the ambient generator lattice, if any.
    pub fn projection(&self) -> Option<&IntMatrix> {
        self.projection.as_ref()
    }

    pub fn ambient_rank(&self) -> Option<usize> {
        self.projection.as_ref().map(|p| p.rows())
    }

    pub fn same_group(&self, other: &FinAbGroup) -> bool {
        self.id == other.id
    }

    /// Structural equality: same invariant factors and free rank.
    pub fn isomorphic(&self, other: &FinAbGroup) -> bool {
        self.invariants == other.invariants && self.free_rank == other.free_rank
    }

    fn normalize(&self, mut coords: Vec<BigInt>) -> Vec<BigInt> {
        for (c, d) in coords.iter_mut().zip(&self.invariants) {
            *c = c.mod_floor(d);
        }
        coords
    }

    pub fn element(&self, coords: Vec<BigInt>) -> Result<GroupElement> {
        if coords.len() != self.rank() {
            return Err(Error::GroupMismatch);
        }
        Ok(GroupElement { group: self.id, coords: self.normalize(coords) })
    }

    pub fn element_i64(&self, coords: &[i64]) -> Result<GroupElement> {
        self.element(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement { group: self.id, coords: vec![BigInt::zero(); self.rank()] }
    }

    fn check(&self, e: &GroupElement) -> Result<()> {
        if e.group != self.id {
            return Err(Error::GroupMismatch);
        }
        Ok(())
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        let c = a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect();
        Ok(GroupElement { group: self.id, coords: self.normalize(c) })
    }

    pub fn neg(&self, a: &GroupElement) -> Result<GroupElement> {
        self.scale(a, &BigInt::from(-1))
    }

    pub fn scale(&self, a: &GroupElement, k: &BigInt) -> Result<GroupElement> {
        self.check(a)?;
        let c = a.coords.iter().map(|x| x * k).collect();
        Ok(GroupElement { group: self.id, coords: self.normalize(c) })
    }

    pub fn is_zero(&self, e: &GroupElement) -> Result<bool> {
        self.check(e)?;
        Ok(e.coords.iter().all(|c| c.is_zero()))
    }

    pub fn eq(&self, a: &GroupElement, b: &GroupElement) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        Ok(a.coords == b.coords)
    }

    /// Order of an element, `None` if it has infinite order.
    pub fn element_order(&self, e: &GroupElement) -> Result<Option<BigInt>> {
        self.check(e)?;
        let mut acc = BigInt::one();
        for (i, c) in e.coords.iter().enumerate() {
            if i >= self.invariants.len() {
                if !c.is_zero() {
                    return Ok(None);
                }
                continue;
            }
            let d = &self.invariants[i];
            acc = acc.lcm(&(d / c.gcd(d)));
        }
        Ok(Some(acc))
    }

    /// Image of an ambient lattice vector in this group.
    pub fn project(&self, v: &[BigInt]) -> Result<GroupElement> {
        let p = self.projection.as_ref().ok_or(Error::GroupMismatch)?;
        if v.len() != p.rows() {
            return Err(Error::GroupMismatch);
        }
        Ok(GroupElement { group: self.id, coords: self.normalize(p.left_apply(v)) })
    }

    pub fn project_i64(&self, v: &[i64]) -> Result<GroupElement> {
        self.project(&v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>())
    }

    /// Image of the `i`-th ambient basis vector.
    pub fn project_basis(&self, i: usize) -> Result<GroupElement> {
        let p = self.projection.as_ref().ok_or(Error::GroupMismatch)?;
        if i >= p.rows() {
            return Err(Error::GroupMismatch);
        }
        Ok(GroupElement { group: self.id, coords: self.normalize(p.row(i).to_vec()) })
    }

    /// All elements of a finite group in coordinate order (small groups only).
    pub fn elements(&self) -> Result<Vec<GroupElement>> {
        if !self.is_finite() {
            return Err(Error::InfiniteFactor);
        }
        let mut out = vec![self.zero()];
        for (i, d) in self.invariants.iter().enumerate() {
            let d = d.to_u64().ok_or(Error::Config("group too large to enumerate".into()))?;
            let mut next = Vec::with_capacity(out.len() * d as usize);
            for e in &out {
                for k in 0..d {
                    let mut c = e.coords.clone();
                    c[i] = BigInt::from(k);
                    next.push(GroupElement { group: self.id, coords: c });
                }
            }
            out = next;
        }
        Ok(out)
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = self.invariants.iter().map(|d| format!("Z/{d}")).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        write!(f, "{}", parts.join(" x "))
    }
}

impl fmt::Debug for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinAbGroup({self})")
    }
}

#[derive(Serialize)]
struct GroupJson {
    structure: String,
    invariant_factors: Vec<String>,
    free_rank: usize,
    order: Option<String>,
}

impl Serialize for FinAbGroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GroupJson {
            structure: self.to_string(),
            invariant_factors: self.invariants.iter().map(|d| d.to_string()).collect(),
            free_rank: self.free_rank,
            order: self.order().map(|o| o.to_string()),
        }
        .serialize(s)
    }
}

/// `Z^n / rowspace(relations)` with projection from `Z^n`.
pub fn quotient(n: usize, relations: &IntMatrix) -> Result<FinAbGroup> {
    if relations.cols() != n {
        return Err(Error::Config(format!("relation matrix has {} columns, expected {n}", relations.cols())));
    }
    quotient_rows(n, relations.row_vecs())
}

/// As [`quotient`], streaming the relation rows.
pub fn quotient_rows(n: usize, rows: impl IntoIterator<Item = Vec<BigInt>>) -> Result<FinAbGroup> {
    let basis = row_lattice_basis(n, rows);
    let m = IntMatrix::from_rows(n, basis);
    let s = snf(&m)?;
    let diag = s.diagonal();
    let mut invariants = Vec::new();
    let mut keep = Vec::new();
    for j in 0..n {
        let d = diag.get(j).cloned().unwrap_or_default();
        if d.is_one() {
            continue;
        }
        if !d.is_zero() {
            invariants.push(d.abs());
        }
        keep.push(j);
    }
    let free_rank = keep.len() - invariants.len();
    let mut proj = IntMatrix::zeros(n, keep.len());
    for i in 0..n {
        for (c, &j) in keep.iter().enumerate() {
            proj[(i, c)] = s.v[(i, j)].clone();
        }
    }
    // zero diagonal entries sort last in the SNF, so torsion precedes free coordinates
    Ok(FinAbGroup { id: fresh_id(), invariants, free_rank, projection: Some(proj) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inv(g: &FinAbGroup) -> Vec<u64> {
        g.invariants_u64()
    }

    #[test]
    fn quotient_examples() {
        let g = quotient(2, &IntMatrix::from_i64(&[vec![2, 0]])).unwrap();
        assert_eq!((inv(&g), g.free_rank()), (vec![2], 1));
        assert_eq!(g.to_string(), "Z/2 x Z");
        let g = quotient(1, &IntMatrix::from_i64(&[vec![4]])).unwrap();
        assert_eq!((inv(&g), g.free_rank()), (vec![4], 0));
        let g = quotient(3, &IntMatrix::from_i64(&[vec![1, 1, 0], vec![0, 1, 1]])).unwrap();
        assert_eq!((inv(&g), g.free_rank()), (vec![], 1));
    }

    #[test]
    fn relation_rows_project_to_zero() {
        let m = IntMatrix::from_i64(&[vec![2, 4, 6], vec![3, 3, 0], vec![0, 5, 10]]);
        let g = quotient(3, &m).unwrap();
        for r in m.row_vecs() {
            assert!(g.is_zero(&g.project(&r).unwrap()).unwrap());
        }
    }

    #[test]
    fn element_equality() {
        let z4 = FinAbGroup::cyclic(4);
        let three = z4.element_i64(&[3]).unwrap();
        let two = z4.element_i64(&[2]).unwrap();
        assert!(z4.eq(&z4.add(&three, &three).unwrap(), &two).unwrap());
        let g = quotient(2, &IntMatrix::from_i64(&[vec![2, 0]])).unwrap();
        let a = g.element_i64(&[1, 5]).unwrap();
        assert!(g.eq(&a, &a.clone()).unwrap());
        let other = FinAbGroup::cyclic(4);
        assert!(matches!(z4.eq(&three, &other.zero()), Err(Error::GroupMismatch)));
    }

    #[test]
    fn display_forms() {
        assert_eq!(FinAbGroup::trivial().to_string(), "0");
        let g = FinAbGroup::new(vec![BigInt::from(2), BigInt::from(4)], 2).unwrap();
        assert_eq!(g.to_string(), "Z/2 x Z/4 x Z^2");
        assert!(FinAbGroup::new(vec![BigInt::from(2), BigInt::from(3)], 0).is_err());
    }
}
