//! A truncation of `V(E) = Ker(sum_x Norm: (+)_x k(x)^x -> k^x) / (residues of K_2)`
//! and the comparison map from the `(E, G_m)` presentation,
//! `{P, u}_{L/k} -> N_{L/k(P)}(u) [P] - N_{L/k}(u) [O]`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use super::build::SomekawaApprox;
use super::config::{Enumeration, TruncationConfig};
use crate::abelian::{quotient_rows, row_lattice_basis, snf, FinAbGroup, IntMatrix};
use crate::elliptic::{EcPoint, EllipticGroup};
use crate::error::{Error, Result};
use crate::finite_field::{FFElement, FieldExtension};
use crate::function_field::{Curve, FuncElement, Place};
use crate::milnor_k::tame2;
use crate::semiabelian::SemiAbelian;

/// The truncated `V(E)`: units at places of degree at most `d`.
#[derive(Clone, Debug)]
pub struct BlochV {
    curve: Curve,
    d: usize,
    places: Vec<Place>,
    index: BTreeMap<Place, usize>,
    /// `dlog_k N(gamma_x)` for the generator `gamma_x` of each `k(x)^x`.
    norm_weights: Vec<BigInt>,
    /// Echelon basis of the kernel lattice.
    kernel_basis: Vec<Vec<BigInt>>,
    relations: Vec<Vec<BigInt>>,
    pairs_admitted: usize,
    pairs_rejected: usize,
    group: FinAbGroup,
}

fn places_up_to(c: &Curve, d: usize) -> Result<Vec<Place>> {
    let (a, b) = c.coefficients().ok_or_else(|| Error::Config("V(E) needs an elliptic curve".into()))?;
    let k = c.base_field();
    let tower = c.tower();
    if tower.field(k.degree())? != *k {
        return Err(Error::Config("the curve must be defined over a canonical tower field".into()));
    }
    let mut out = vec![c.origin()?];
    for e in 1..=d {
        let l = tower.field(k.degree() * e)?;
        let emb = tower.embedding(k.degree(), l.degree())?;
        let g = EllipticGroup::new(&l, emb.apply(a), emb.apply(b))?;
        for p in g.points() {
            if let EcPoint::Affine(x0, y0) = p {
                let v = c.place_at_point(&l, *x0, *y0)?;
                if v.degree() == e {
                    out.push(v);
                }
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Functions whose pairs supply the `K_2` residue relations.
fn relation_family(c: &Curve, h_bound: usize) -> Vec<FuncElement> {
    let k = c.base_field();
    let r = c.poly_ring();
    let mut out = vec![c.constant(k.generator()), c.y()];
    for a in k.elements() {
        out.push(c.from_poly(r.linear(a)));
    }
    for l in k.elements() {
        for mu in k.elements() {
            let line = c.sub(&c.y(), &c.from_poly(r.from_coeffs(vec![mu, l])));
            if !out.contains(&line) {
                out.push(line);
            }
        }
    }
    for deg in 2..=h_bound {
        out.extend(r.monic_irreducibles(deg).into_iter().map(|p| c.from_poly(p)));
    }
    out
}

/// Exact coordinates of `v` in a full-rank echelon basis.
fn solve_echelon(basis: &[Vec<BigInt>], v: &[BigInt]) -> Result<Vec<BigInt>> {
    let mut rest = v.to_vec();
    let mut coords = Vec::with_capacity(basis.len());
    for b in basis {
        let c = b.iter().position(|x| !x.is_zero()).expect("nonzero basis row");
        if !(&rest[c] % &b[c]).is_zero() {
            return Err(Error::Invariant("vector outside the kernel lattice".into()));
        }
        let q = &rest[c] / &b[c];
        for (r, x) in rest.iter_mut().zip(b) {
            *r -= &q * x;
        }
        coords.push(q);
    }
    if rest.iter().any(|x| !x.is_zero()) {
        return Err(Error::Invariant("vector outside the kernel lattice".into()));
    }
    Ok(coords)
}

impl BlochV {
    pub fn build(c: &Curve, d: usize, h_bound: usize) -> Result<Self> {
        let places = places_up_to(c, d)?;
        let index: BTreeMap<Place, usize> = places.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let k = c.base_field();
        let n = places.len();
        let q1 = BigInt::from(k.unit_order());
        let norm_weights: Vec<BigInt> = places
            .iter()
            .map(|v| BigInt::from(k.dlog(v.embedding().norm(v.residue_field().generator())).expect("unit")))
            .collect();

        // kernel of Z^n -> Z/(q-1): integer kernel of [w | q-1], last coordinate dropped
        let mut row = norm_weights.clone();
        row.push(q1.clone());
        let s = snf(&IntMatrix::from_rows(n + 1, vec![row]))?;
        let gens: Vec<Vec<BigInt>> = (1..=n).map(|j| (0..n).map(|i| s.v[(i, j)].clone()).collect()).collect();
        let kernel_basis = row_lattice_basis(n, gens);
        if kernel_basis.len() != n {
            return Err(Error::Invariant("kernel lattice is not of full rank".into()));
        }

        let mut relations = Vec::new();
        for (i, v) in places.iter().enumerate() {
            let mut r = vec![BigInt::zero(); n];
            r[i] = BigInt::from(v.residue_field().unit_order());
            relations.push(r);
        }
        let fam = relation_family(c, h_bound);
        let (mut admitted, mut rejected) = (0, 0);
        for i in 0..fam.len() {
            for j in i + 1..fam.len() {
                match residue_vector(c, &index, d, &fam[i], &fam[j])? {
                    Some(r) => {
                        admitted += 1;
                        relations.push(r);
                    }
                    None => rejected += 1,
                }
            }
        }
        let mut out = BlochV {
            curve: c.clone(),
            d,
            places,
            index,
            norm_weights,
            kernel_basis,
            relations,
            pairs_admitted: admitted,
            pairs_rejected: rejected,
            group: FinAbGroup::trivial(),
        };
        let coord_rows = out.relations.iter().map(|r| out.kernel_coords(r)).collect::<Result<Vec<_>>>()?;
        out.group = quotient_rows(n, coord_rows)?;
        Ok(out)
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    pub fn places(&self) -> &[Place] {
        &self.places
    }

    pub fn degree_bound(&self) -> usize {
        self.d
    }

    /// `sum_x Norm(u_x)` as a discrete log in `k`.
    pub fn norm_sum(&self, v: &[BigInt]) -> BigInt {
        let q1 = BigInt::from(self.curve.base_field().unit_order());
        let s: BigInt = v.iter().zip(&self.norm_weights).map(|(a, b)| a * b).sum();
        ((s % &q1) + &q1) % &q1
    }

    fn kernel_coords(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if !self.norm_sum(v).is_zero() {
            return Err(Error::Invariant("vector is not in the kernel of the summed norm".into()));
        }
        solve_echelon(&self.kernel_basis, v)
    }

    /// `N_{L/k(P)}(u) [P] - N_{L/k}(u) [O]` as a unit vector.
    pub fn symbol_image(&self, l: &FieldExtension, p: &EcPoint<FFElement>, u: FFElement) -> Result<Vec<BigInt>> {
        let n = self.places.len();
        let mut out = vec![BigInt::zero(); n];
        let EcPoint::Affine(x0, y0) = p else { return Ok(out) };
        let c = &self.curve;
        let k = c.base_field();
        let tower = c.tower();
        let v = c.place_at_point(l, *x0, *y0)?;
        let &i = self.index.get(&v).ok_or(Error::DegreeOverflow { degree: v.degree(), bound: self.d })?;
        let kv = v.residue_field();
        let iota = tower.embedding(kv.degree(), l.degree())?;
        let pv = v.point().expect("affine place");
        // phi = sigma^j o iota sends P_v to P
        let q = k.order() as u64;
        let mut img = pv.map(|&a| iota.apply(a));
        let mut j = 0;
        while img != *p {
            j += 1;
            if j > v.degree() {
                return Err(Error::Invariant("point is not conjugate to its place representative".into()));
            }
            img = img.map(|&a| l.pow_u(a, q));
        }
        // N_phi(u) = sigma^{-j} N_iota(u)
        let nu = iota.norm(u);
        let e = kv.degree() / k.degree();
        let back = kv.pow_u(nu, q.pow(((e - j % e) % e) as u32));
        out[i] += BigInt::from(kv.dlog(back).ok_or(Error::ZeroElement)?);
        let o = self.index[&c.origin()?];
        let nk = tower.embedding(k.degree(), l.degree())?.norm(u);
        out[o] -= BigInt::from(k.dlog(nk).ok_or(Error::ZeroElement)?);
        Ok(out)
    }

    /// Compare with an `(E, G_m)` presentation at the same bound.
    pub fn compare(&self, a: &SomekawaApprox) -> Result<BlochComparison> {
        let cfg = a.config();
        let ok = cfg.rank() == 2
            && cfg.groups[0].torus_rank() == 0
            && cfg.groups[0].curve_coefficients() == self.curve.coefficients()
            && cfg.groups[1].torus_rank() == 1
            && !cfg.groups[1].has_elliptic();
        if !ok {
            return Err(Error::Config("the comparison needs a build of (E, Gm) on the same curve".into()));
        }
        let n = self.places.len();
        // image of every lattice column (a pure tensor of generators)
        let mut columns = Vec::with_capacity(a.lattice.width);
        for b in &a.lattice.blocks {
            let ge = b.frames[0].generators(&b.field);
            let gt = b.frames[1].generators(&b.field);
            for (idx, _) in b.tensor.components() {
                let (_, pe) = ge.iter().find(|(j, _)| *j == idx[0]).expect("elliptic generator");
                let (_, pt) = gt.iter().find(|(j, _)| *j == idx[1]).expect("torus generator");
                let img = self.symbol_image(&b.field, pe.ell.as_ref().expect("elliptic slot"), pt.torus[0])?;
                columns.push(self.kernel_coords(&img)?);
            }
        }
        let apply = |v: &[BigInt]| -> Vec<BigInt> {
            let mut acc = vec![BigInt::zero(); n];
            for (x, col) in v.iter().zip(&columns) {
                if x.is_zero() {
                    continue;
                }
                for (a, c) in acc.iter_mut().zip(col) {
                    *a += x * c;
                }
            }
            acc
        };
        let coord_rows = self.relations.iter().map(|r| self.kernel_coords(r)).collect::<Result<Vec<_>>>()?;
        // the norm kernel modulo the unit orders only, without residue relations
        let bare = quotient_rows(n, coord_rows[..self.places.len()].iter().cloned())?;
        let mut failing = Vec::new();
        let mut needing = 0;
        for r in a.rows() {
            let img = apply(&r.vector);
            if !self.group.is_zero(&self.group.project(&img)?)? {
                failing.push(format!("{:?} {} {}", r.kind, r.source, r.label));
            }
            if !bare.is_zero(&bare.project(&img)?)? {
                needing += 1;
            }
        }
        let cokernel = quotient_rows(n, coord_rows.into_iter().chain(columns.iter().cloned()))?;
        Ok(BlochComparison {
            v_group: self.group.to_string(),
            norm_kernel_group: bare.to_string(),
            rows_needing_residue_relations: needing,
            somekawa_group: a.group().to_string(),
            places: self.places.len(),
            relation_pairs: self.pairs_admitted,
            rejected_pairs: self.pairs_rejected,
            rows_checked: a.rows().len(),
            kills_all_rows: failing.is_empty(),
            failing_rows: failing,
            surjective: cokernel.is_trivial(),
        })
    }
}

/// `sum_x d_x{f, g} [x]`, or `None` if a support place exceeds the bound.
fn residue_vector(
    c: &Curve,
    index: &BTreeMap<Place, usize>,
    d: usize,
    f: &FuncElement,
    g: &FuncElement,
) -> Result<Option<Vec<BigInt>>> {
    let mut support = Vec::new();
    for h in [f, g] {
        match c.divisor_bounded(h, d) {
            Ok(div) => support.extend(div.support().cloned()),
            Err(Error::DegreeOverflow { .. }) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    support.sort();
    support.dedup();
    let mut r = vec![BigInt::zero(); index.len()];
    for v in support {
        let &i = index.get(&v).ok_or_else(|| Error::Invariant(format!("place {v} missing from the enumeration")))?;
        let t = tame2(c, &v, f, g)?;
        r[i] += BigInt::from(v.residue_field().dlog(t).ok_or(Error::ZeroElement)?);
    }
    Ok(Some(r))
}

#[derive(Clone, Debug, Serialize)]
pub struct BlochComparison {
    pub v_group: String,
    /// The norm kernel before the residue relations are imposed.
    pub norm_kernel_group: String,
    /// Rows whose image vanishes only because of residue relations.
    pub rows_needing_residue_relations: usize,
    pub somekawa_group: String,
    pub places: usize,
    pub relation_pairs: usize,
    pub rejected_pairs: usize,
    pub rows_checked: usize,
    pub kills_all_rows: bool,
    pub failing_rows: Vec<String>,
    pub surjective: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Stabilization {
    pub d: usize,
    pub d_next: usize,
    pub v: (String, String),
    pub somekawa: (String, String),
    pub v_stable: bool,
    pub somekawa_stable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlochReport {
    pub comparison: BlochComparison,
    pub stabilization: Option<Stabilization>,
}

fn eg_config(c: &Curve, d: usize, h_bound: usize, threads: usize, seed: u64) -> Result<TruncationConfig> {
    let (a, b) = c.coefficients().ok_or_else(|| Error::Config("V(E) needs an elliptic curve".into()))?;
    let k = c.base_field();
    let groups = vec![SemiAbelian::elliptic(k, a, b)?, SemiAbelian::gm(k)?];
    let e = Enumeration { h_degree: Some(h_bound.min(d)), ..Enumeration::default() };
    Ok(TruncationConfig::new(k, groups, d)?.with_enumeration(e)?.with_threads(threads).with_seed(seed))
}

/// Build `V(E)` and the `(E, G_m)` presentation at bound `d`, compare them,
/// and (if `stabilize`) rebuild both at `d + 1`.
pub fn bloch_v_approx(
    c: &Curve,
    d: usize,
    h_bound: usize,
    stabilize: bool,
    threads: usize,
    seed: u64,
) -> Result<(FinAbGroup, BlochReport)> {
    let v = BlochV::build(c, d, h_bound)?;
    let a = SomekawaApprox::build(&eg_config(c, d, h_bound, threads, seed)?)?;
    let comparison = v.compare(&a)?;
    let stabilization = if stabilize {
        let v2 = BlochV::build(c, d + 1, h_bound.max(d + 1))?;
        let a2 = SomekawaApprox::build(&eg_config(c, d + 1, h_bound.max(d + 1), threads, seed)?)?;
        Some(Stabilization {
            d,
            d_next: d + 1,
            v: (v.group().to_string(), v2.group().to_string()),
            somekawa: (a.group().to_string(), a2.group().to_string()),
            v_stable: v.group().isomorphic(v2.group()),
            somekawa_stable: a.group().isomorphic(a2.group()),
        })
    } else {
        None
    };
    Ok((v.group().clone(), BlochReport { comparison, stabilization }))
}
