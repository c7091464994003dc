//! The free part of the presentation: for every degree `m <= d`, the raw
//! components of `G_1(F_{q^m}) (x) ... (x) G_r(F_{q^m})` written through
//! explicit cyclic decompositions.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::abelian::{tensor_cyclic, TensorProduct};
use crate::elliptic::{EcPoint, EllipticGroup};
use crate::error::{Error, Result};
use crate::finite_field::{FFElement, FieldExtension};
use crate::semiabelian::{GPoint, SemiAbelian};

/// Cyclic decomposition of `G(L)`: `n` copies of `L^x` (via discrete logs),
/// then `E(L) = Z/n1 x Z/n2` if `G` has an elliptic part.
#[derive(Clone, Debug)]
pub(crate) struct SlotFrame {
    n: usize,
    ell: Option<EllipticGroup>,
    orders: Vec<BigInt>,
}

impl SlotFrame {
    fn new(g: &SemiAbelian, l: &FieldExtension) -> Result<Self> {
        let n = g.torus_rank();
        let mut orders = vec![BigInt::from(l.unit_order()); n];
        let ell = match g.law_over(l)? {
            Some(law) => {
                let eg = EllipticGroup::new(l, law.a, law.b)?;
                let (n1, n2) = eg.invariants();
                orders.push(BigInt::from(n1));
                orders.push(BigInt::from(n2));
                Some(eg)
            }
            None => None,
        };
        Ok(SlotFrame { n, ell, orders })
    }

    pub fn orders(&self) -> &[BigInt] {
        &self.orders
    }

    pub fn coords(&self, l: &FieldExtension, p: &GPoint<FFElement>) -> Result<Vec<BigInt>> {
        if p.torus.len() != self.n || p.ell.is_some() != self.ell.is_some() {
            return Err(Error::GroupMismatch);
        }
        let mut out = Vec::with_capacity(self.orders.len());
        for &x in &p.torus {
            out.push(BigInt::from(l.dlog(x).ok_or(Error::ZeroElement)?));
        }
        if let (Some(eg), Some(pt)) = (&self.ell, &p.ell) {
            let (c2, c1) = eg.coords(pt)?;
            out.push(BigInt::from(c2));
            out.push(BigInt::from(c1));
        }
        Ok(out)
    }

    /// Generators of the nontrivial cyclic factors, with their factor index.
    pub fn generators(&self, l: &FieldExtension) -> Vec<(usize, GPoint<FFElement>)> {
        let mut out = Vec::new();
        let ident = GPoint { torus: vec![l.one(); self.n], ell: self.ell.as_ref().map(|_| EcPoint::Infinity) };
        for j in 0..self.n {
            if self.orders[j] > BigInt::from(1) {
                let mut p = ident.clone();
                p.torus[j] = l.generator();
                out.push((j, p));
            }
        }
        if let Some(eg) = &self.ell {
            let (p2, p1) = eg.basis();
            for (i, pt) in [p2, p1].into_iter().enumerate() {
                if self.orders[self.n + i] > BigInt::from(1) {
                    let mut p = ident.clone();
                    p.ell = Some(pt.clone());
                    out.push((self.n + i, p));
                }
            }
        }
        out
    }
}

/// The summand of degree `m`.
#[derive(Clone, Debug)]
pub(crate) struct Block {
    pub m: usize,
    pub field: FieldExtension,
    pub frames: Vec<SlotFrame>,
    pub tensor: TensorProduct,
    pub offset: usize,
}

impl Block {
    pub fn width(&self) -> usize {
        self.tensor.components().len()
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Lattice {
    pub groups: Vec<SemiAbelian>,
    pub blocks: Vec<Block>,
    pub width: usize,
}

impl Lattice {
    pub fn new(groups: &[SemiAbelian], d: usize) -> Result<Self> {
        let mut blocks = Vec::with_capacity(d);
        let mut offset = 0;
        for m in 1..=d {
            let field = groups[0].extension(m)?;
            let frames = groups.iter().map(|g| SlotFrame::new(g, &field)).collect::<Result<Vec<_>>>()?;
            let tensor = tensor_cyclic(&frames.iter().map(|f| f.orders.clone()).collect::<Vec<_>>())?;
            let b = Block { m, field, frames, tensor, offset };
            offset += b.width();
            blocks.push(b);
        }
        Ok(Lattice { groups: groups.to_vec(), blocks, width: offset })
    }

    pub fn rank(&self) -> usize {
        self.groups.len()
    }

    pub fn block(&self, m: usize) -> Option<&Block> {
        self.blocks.get(m.wrapping_sub(1))
    }

    /// Degree of a tower field over the base field, if a block of that degree exists.
    pub fn block_of(&self, l: &FieldExtension) -> Result<&Block> {
        let m = self.groups[0].relative_degree(l)?;
        self.block(m).ok_or(Error::DegreeOverflow { degree: m, bound: self.blocks.len() })
    }

    /// Moduli of all lattice coordinates.
    pub fn moduli(&self) -> Vec<BigInt> {
        self.blocks.iter().flat_map(|b| b.tensor.moduli()).collect()
    }

    pub fn zero(&self) -> Vec<BigInt> {
        vec![BigInt::zero(); self.width]
    }

    /// Add `coeff * {p_1, ..., p_r}_{L/k}` to `acc`.
    pub fn add_symbol(
        &self,
        acc: &mut [BigInt],
        coeff: i64,
        l: &FieldExtension,
        pts: &[GPoint<FFElement>],
    ) -> Result<()> {
        if pts.len() != self.rank() {
            return Err(Error::GroupMismatch);
        }
        let b = self.block_of(l)?;
        if b.field != *l {
            return Err(Error::FieldMismatch);
        }
        let coords = b.frames.iter().zip(pts).map(|(f, p)| f.coords(l, p)).collect::<Result<Vec<_>>>()?;
        let refs: Vec<&[BigInt]> = coords.iter().map(|c| c.as_slice()).collect();
        let raw = b.tensor.raw(&refs)?;
        let c = BigInt::from(coeff);
        for (i, x) in raw.into_iter().enumerate() {
            acc[b.offset + i] += &c * x;
        }
        Ok(())
    }

    /// Reduce every coordinate into `[0, modulus)`.
    pub fn normalize(&self, v: &mut [BigInt]) {
        let mut i = 0;
        for b in &self.blocks {
            for (_, g) in b.tensor.components() {
                v[i] = ((&v[i] % g) + g) % g;
                i += 1;
            }
        }
    }
}
