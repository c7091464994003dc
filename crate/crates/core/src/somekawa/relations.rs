use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{ChoiceStrategy, TruncationConfig};
use super::lattice::Lattice;
use crate::elliptic::EcPoint;
use crate::error::{Error, Result};
use crate::finite_field::FFElement;
use crate::function_field::{Curve, Divisor, FuncElement, Place};
use crate::semiabelian::GPoint;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    Modulus,
    R1,
    R2,
}

/// One relation of the presentation, with its provenance.
#[derive(Clone, Debug, Serialize)]
pub struct RelationRow {
    pub kind: RelationKind,
    pub source: String,
    pub label: String,
    #[serde(skip)]
    pub vector: Vec<BigInt>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    /// Two slots are non-integral at the same place.
    Inadmissible,
    /// Some place of the candidate has residue degree above `d`.
    ResidueDegree,
}

impl RejectReason {
    pub fn key(&self) -> &'static str {
        match self {
            RejectReason::Inadmissible => "inadmissible",
            RejectReason::ResidueDegree => "residue_degree",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Rejection {
    pub source: String,
    pub candidate: String,
    pub reason: RejectReason,
}

pub(crate) fn cartesian<T: Clone>(lists: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    for l in lists {
        let mut next = Vec::with_capacity(out.len() * l.len());
        for prefix in &out {
            for x in l {
                let mut p = prefix.clone();
                p.push(x.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// `{phi(g_1), .., g_i, .., phi(g_r)}_{E_2} - {g_1, .., N_phi(g_i), .., g_r}_{E_1}` for
/// every `k`-embedding `phi = sigma^j o iota: E_1 -> E_2`, every slot `i` and
/// every tuple of cyclic generators.
pub(crate) fn r1_rows(lat: &Lattice) -> Result<Vec<RelationRow>> {
    let r = lat.rank();
    let mut rows = Vec::new();
    for b2 in &lat.blocks {
        for b1 in lat.blocks.iter().filter(|b1| b2.m % b1.m == 0) {
            let (e1, e2) = (&b1.field, &b2.field);
            let js: Vec<usize> = if b1.m == b2.m { (1..b1.m).collect() } else { (0..b1.m).collect() };
            for j in js {
                for i0 in 0..r {
                    let g = &lat.groups[i0];
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
                            let gi = &lat.groups[i];
                            if i == i0 {
                                up.push(p.clone());
                                let back = gi.frobenius_point(e2, p, (b2.m - j) % b2.m);
                                down.push(g.g_norm(e1, e2, &back)?);
                            } else {
                                let emb = gi.embed_point(e1, e2, p)?;
                                up.push(gi.frobenius_point(e2, &emb, j));
                                down.push(p.clone());
                            }
                        }
                        let mut v = lat.zero();
                        lat.add_symbol(&mut v, 1, e2, &up)?;
                        lat.add_symbol(&mut v, -1, e1, &down)?;
                        lat.normalize(&mut v);
                        rows.push(RelationRow {
                            kind: RelationKind::R1,
                            source: format!("F_q^{} -> F_q^{}", b1.m, b2.m),
                            label: format!("sigma^{j}, slot {i0}"),
                            vector: v,
                        });
                    }
                }
            }
        }
    }
    Ok(rows)
}

/// A curve whose function field supplies R2 relations, with its candidate families.
pub(crate) struct Source {
    pub curve: Curve,
    pub label: String,
    /// Degree of the constant field over `k`.
    pub m: usize,
    pub hs: Vec<FuncElement>,
    pub families: Vec<Vec<GPoint<FuncElement>>>,
}

fn torus_functions(cfg: &TruncationConfig, c: &Curve) -> Vec<FuncElement> {
    let f = c.base_field();
    let r = c.poly_ring();
    let e = &cfg.enumeration;
    let mut out = Vec::new();
    if e.g_degree >= 1 {
        for a in f.elements() {
            out.push(c.from_poly(r.linear(a)));
        }
        if (f.order() as u64) <= e.ratios_max_field {
            for a in f.elements() {
                for b in f.elements() {
                    if a != b {
                        out.push(c.fraction(r.linear(a), r.linear(b)).expect("nonzero denominator"));
                    }
                }
            }
        }
    }
    for deg in 2..=e.g_degree {
        out.extend(r.monic_irreducibles(deg).into_iter().map(|p| c.from_poly(p)));
    }
    out
}

impl Source {
    pub fn build(cfg: &TruncationConfig, lat: &Lattice, curve: Curve, m: usize) -> Result<Self> {
        let f = curve.base_field().clone();
        let block = lat.block(m).ok_or(Error::DegreeOverflow { degree: m, bound: cfg.degree_bound })?;
        let r = curve.poly_ring();
        let hdeg = cfg.h_degree().min(cfg.degree_bound / m);
        let mut hs = vec![curve.constant(f.generator())];
        for deg in 1..=hdeg {
            hs.extend(r.monic_irreducibles(deg).into_iter().map(|p| curve.from_poly(p)));
        }
        if curve.is_elliptic() {
            hs.push(curve.y());
            if cfg.enumeration.lines {
                for l in f.elements() {
                    for mu in f.elements() {
                        let line = curve.sub(&curve.y(), &curve.from_poly(r.from_coeffs(vec![mu, l])));
                        hs.push(line);
                    }
                }
            }
        }
        let tf = torus_functions(cfg, &curve);
        let mut families = Vec::with_capacity(lat.rank());
        for (i, g) in lat.groups.iter().enumerate() {
            let mut fam: Vec<GPoint<FuncElement>> =
                block.frames[i].generators(&f).into_iter().map(|(_, p)| g.constant_point(&curve, &p)).collect();
            let one = GPoint {
                torus: vec![curve.one(); g.torus_rank()],
                ell: g.curve_coefficients().map(|_| EcPoint::Infinity),
            };
            for j in 0..g.torus_rank() {
                for t in &tf {
                    let mut p = one.clone();
                    p.torus[j] = t.clone();
                    fam.push(p);
                }
            }
            let same_curve = match (g.curve_coefficients(), curve.coefficients()) {
                (Some(ab), Some(cd)) => m == 1 && ab == cd,
                _ => false,
            };
            if same_curve {
                let mut p = one.clone();
                p.ell = curve.generic_point();
                fam.push(p);
            }
            families.push(fam);
        }
        let label = curve.literal();
        Ok(Source { curve, label, m, hs, families })
    }

    pub fn candidate_count(&self) -> u128 {
        self.families.iter().fold(self.hs.len() as u128, |acc, f| acc * f.len() as u128)
    }

    /// Mixed-radix decoding: `(h, g_1, .., g_r)` indices.
    fn decode(&self, mut idx: u128) -> (usize, Vec<usize>) {
        let mut gs = vec![0; self.families.len()];
        for i in (0..self.families.len()).rev() {
            let n = self.families[i].len() as u128;
            gs[i] = (idx % n) as usize;
            idx /= n;
        }
        (idx as usize, gs)
    }

    /// Candidate indices, subsampled with a seeded generator above `cap`.
    pub fn candidate_indices(&self, cap: usize, seed: u64) -> (Vec<u128>, u128) {
        let total = self.candidate_count();
        if total <= cap as u128 {
            return ((0..total).collect(), total);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picked = BTreeSet::new();
        // rejection sampling; cap is far below total here
        while picked.len() < cap {
            let x: u128 = rand::Rng::gen_range(&mut rng, 0..total);
            picked.insert(x);
        }
        (picked.into_iter().collect(), total)
    }
}

/// Outcome of one R2 candidate.
pub(crate) enum Outcome {
    Admitted(Vec<(String, Vec<BigInt>)>),
    Rejected(String, RejectReason),
}

pub(crate) struct SourceContext<'a> {
    pub cfg: &'a TruncationConfig,
    pub lat: &'a Lattice,
    pub src: &'a Source,
    /// Divisors of every `h` and torus coordinate (`None`: a place above the bound).
    pub divisors: HashMap<FuncElement, Option<Divisor>>,
}

impl<'a> SourceContext<'a> {
    pub fn new(cfg: &'a TruncationConfig, lat: &'a Lattice, src: &'a Source) -> Result<Self> {
        let bound = cfg.degree_bound / src.m;
        let mut funcs: BTreeSet<FuncElement> = src.hs.iter().cloned().collect();
        for fam in &src.families {
            for g in fam {
                funcs.extend(g.torus.iter().cloned());
            }
        }
        let funcs: Vec<FuncElement> = funcs.into_iter().collect();
        let c = &src.curve;
        let divs: Vec<Result<Option<Divisor>>> = funcs
            .par_iter()
            .map(|f| match c.divisor_bounded(f, bound) {
                Ok(d) => Ok(Some(d)),
                Err(Error::DegreeOverflow { .. }) => Ok(None),
                Err(e) => Err(e),
            })
            .collect();
        let mut divisors = HashMap::with_capacity(funcs.len());
        for (f, d) in funcs.into_iter().zip(divs) {
            divisors.insert(f, d?);
        }
        Ok(SourceContext { cfg, lat, src, divisors })
    }

    fn describe(&self, h: usize, gs: &[usize]) -> String {
        let c = &self.src.curve;
        let g: Vec<String> = gs
            .iter()
            .enumerate()
            .map(|(i, &j)| {
                let p = &self.src.families[i][j];
                let mut parts: Vec<String> = p.torus.iter().map(|f| c.format(f)).collect();
                if let Some(e) = &p.ell {
                    parts.push(match e {
                        EcPoint::Infinity => "O".into(),
                        EcPoint::Affine(x, y) => format!("({},{})", c.format(x), c.format(y)),
                    });
                }
                format!("({})", parts.join(","))
            })
            .collect();
        format!("h={} g=[{}]", c.format(&self.src.hs[h]), g.join(", "))
    }

    pub fn evaluate(&self, idx: u128) -> Result<Outcome> {
        let (hi, gi) = self.src.decode(idx);
        let c = &self.src.curve;
        let lat = self.lat;
        let r = lat.rank();
        let h = &self.src.hs[hi];
        let gs: Vec<&GPoint<FuncElement>> = gi.iter().enumerate().map(|(i, &j)| &self.src.families[i][j]).collect();
        let div = |f: &FuncElement| self.divisors.get(f).expect("precomputed divisor");
        let Some(dh) = div(h) else {
            return Ok(Outcome::Rejected(self.describe(hi, &gi), RejectReason::ResidueDegree));
        };
        let mut slot_divs: Vec<Vec<&Divisor>> = Vec::with_capacity(r);
        for g in &gs {
            let mut ds = Vec::new();
            for f in &g.torus {
                match div(f) {
                    Some(d) => ds.push(d),
                    None => return Ok(Outcome::Rejected(self.describe(hi, &gi), RejectReason::ResidueDegree)),
                }
            }
            slot_divs.push(ds);
        }
        let mut places: BTreeSet<Place> = dh.support().cloned().collect();
        for ds in &slot_divs {
            for d in ds {
                places.extend(d.support().cloned());
            }
        }
        // per place: forced slot, or None if every slot is integral
        let mut forced: Vec<(Place, Option<usize>, i64)> = Vec::with_capacity(places.len());
        for v in places {
            let ni: Vec<usize> = (0..r).filter(|&i| slot_divs[i].iter().any(|d| d.multiplicity(&v) != 0)).collect();
            if ni.len() > 1 {
                return Ok(Outcome::Rejected(self.describe(hi, &gi), RejectReason::Inadmissible));
            }
            let mh = dh.multiplicity(&v);
            if ni.is_empty() && mh == 0 {
                continue;
            }
            forced.push((v, ni.first().copied(), mh));
        }
        let k = lat.groups[0].base_field();
        // reciprocity for every slot separately
        for i in 0..r {
            let g = &lat.groups[i];
            let mut acc = g.identity(k);
            for (v, _, _) in &forced {
                let s = g.extended_tame(c, v, gs[i], h)?;
                acc = g.add(k, &acc, &g.g_norm(k, v.residue_field(), &s)?)?;
            }
            if !g.is_identity(k, &acc) {
                return Err(Error::Invariant(format!(
                    "reciprocity fails on {} for {} in slot {i}: {}",
                    self.src.label,
                    self.describe(hi, &gi),
                    g.format_point(k, &acc)
                )));
            }
        }
        let free = forced.iter().any(|(_, f, _)| f.is_none());
        let mut choices: Vec<(String, usize)> = Vec::new();
        for s in &self.cfg.enumeration.choice {
            match s {
                ChoiceStrategy::Constant => {
                    let n = if free { r } else { 1 };
                    choices.extend((0..n).map(|i0| (format!("constant {i0}"), i0)));
                }
                ChoiceStrategy::FirstNonIntegral => choices.push(("first non-integral".into(), 0)),
            }
        }
        let mut seen = BTreeSet::new();
        let mut rows = Vec::new();
        for (label, i0) in choices {
            if !seen.insert(i0) {
                continue;
            }
            let mut vec = lat.zero();
            for (v, f, _) in &forced {
                let chosen = f.unwrap_or(i0);
                let l = v.residue_field();
                let mut pts = Vec::with_capacity(r);
                let mut trivial = false;
                for i in 0..r {
                    let g = &lat.groups[i];
                    let p = if i == chosen { g.extended_tame(c, v, gs[i], h)? } else { g.reduce_point(c, v, gs[i])? };
                    trivial |= g.is_identity(l, &p);
                    pts.push(p);
                }
                if trivial {
                    continue;
                }
                match lat.add_symbol(&mut vec, 1, l, &pts) {
                    Ok(()) => {}
                    Err(Error::DegreeOverflow { .. }) => {
                        return Ok(Outcome::Rejected(self.describe(hi, &gi), RejectReason::ResidueDegree))
                    }
                    Err(e) => return Err(e),
                }
            }
            lat.normalize(&mut vec);
            rows.push((format!("{} [{label}]", self.describe(hi, &gi)), vec));
        }
        Ok(Outcome::Admitted(rows))
    }
}
