//! R1 rows recomputed without `Embedding::norm` or the Galois trace helper:
//! relative norms are explicit products of Frobenius conjugates, traces are
//! explicit sums, and pull-backs go through discrete logarithms.

use num_bigint::BigInt;

use super::lattice::Lattice;
use super::relations::cartesian;
use crate::elliptic::EcPoint;
use crate::error::{Error, Result};
use crate::finite_field::{Embedding, FFElement, FieldExtension};
use crate::semiabelian::{GPoint, SemiAbelian};

fn pull_back(emb: &Embedding, x: FFElement) -> Result<FFElement> {
    emb.preimage(x).ok_or_else(|| Error::Invariant("conjugate product left the subfield".into()))
}

/// `N_{E2/E1}` as `prod_t sigma_{E1}^t`, pulled back to `E1`.
fn norm_by_conjugates(
    g: &SemiAbelian,
    e1: &FieldExtension,
    e2: &FieldExtension,
    p: &GPoint<FFElement>,
) -> Result<GPoint<FFElement>> {
    let emb = g.tower_embedding(e1, e2)?;
    let rel = e2.degree() / e1.degree();
    let q1 = e1.order() as u64;
    let mut torus = Vec::with_capacity(p.torus.len());
    for &x in &p.torus {
        let mut acc = e2.one();
        let mut c = x;
        for _ in 0..rel {
            acc = e2.mul(acc, c);
            c = e2.pow_u(c, q1);
        }
        torus.push(pull_back(&emb, acc)?);
    }
    let ell = match (&p.ell, g.law_over(e2)?) {
        (Some(pt), Some(law)) => {
            let mut acc = EcPoint::Infinity;
            let mut c = pt.clone();
            for _ in 0..rel {
                acc = law.add(&acc, &c)?;
                c = c.map(|&v| e2.pow_u(v, q1));
            }
            Some(match acc {
                EcPoint::Infinity => EcPoint::Infinity,
                EcPoint::Affine(x, y) => EcPoint::Affine(pull_back(&emb, x)?, pull_back(&emb, y)?),
            })
        }
        _ => None,
    };
    Ok(GPoint { torus, ell })
}

fn frob(g: &SemiAbelian, l: &FieldExtension, p: &GPoint<FFElement>, j: usize) -> GPoint<FFElement> {
    let q = g.base_field().order() as u64;
    let f = |x: &FFElement| {
        let mut y = *x;
        for _ in 0..j {
            y = l.pow_u(y, q);
        }
        y
    };
    GPoint { torus: p.torus.iter().map(f).collect(), ell: p.ell.as_ref().map(|e| e.map(f)) }
}

pub(crate) fn r1_rows_by_conjugates(lat: &Lattice) -> Result<Vec<Vec<BigInt>>> {
    let r = lat.rank();
    let mut out = Vec::new();
    for b2 in &lat.blocks {
        for b1 in lat.blocks.iter().filter(|b1| b2.m % b1.m == 0) {
            let (e1, e2) = (&b1.field, &b2.field);
            let js: Vec<usize> = if b1.m == b2.m { (1..b1.m).collect() } else { (0..b1.m).collect() };
            for j in js {
                for i0 in 0..r {
                    let lists: Vec<Vec<GPoint<FFElement>>> = (0..r)
                        .map(|i| {
                            let (frame, field) = if i == i0 { (&b2.frames[i], e2) } else { (&b1.frames[i], e1) };
                            frame.generators(field).into_iter().map(|(_, p)| p).collect()
                        })
                        .collect();
                    for tuple in cartesian(&lists) {
                        let mut up = Vec::with_capacity(r);
                        let mut down = Vec::with_capacity(r);
                        for (i, p) in tuple.iter().enumerate() {
                            let g = &lat.groups[i];
                            if i == i0 {
                                up.push(p.clone());
                                let back = frob(g, e2, p, (b2.m - j) % b2.m);
                                down.push(norm_by_conjugates(g, e1, e2, &back)?);
                            } else {
                                let emb = g.tower_embedding(e1, e2)?;
                                let lifted = GPoint {
                                    torus: p.torus.iter().map(|&x| emb.apply(x)).collect(),
                                    ell: p.ell.as_ref().map(|e| e.map(|&x| emb.apply(x))),
                                };
                                up.push(frob(g, e2, &lifted, j));
                                down.push(p.clone());
                            }
                        }
                        let mut v = lat.zero();
                        lat.add_symbol(&mut v, 1, e2, &up)?;
                        lat.add_symbol(&mut v, -1, e1, &down)?;
                        lat.normalize(&mut v);
                        out.push(v);
                    }
                }
            }
        }
    }
    Ok(out)
}
