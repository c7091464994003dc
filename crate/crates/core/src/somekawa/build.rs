use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use super::config::TruncationConfig;
use super::lattice::Lattice;
use super::relations::{r1_rows, Outcome, RejectReason, Rejection, RelationKind, RelationRow, Source, SourceContext};
use crate::abelian::{quotient_rows, FinAbGroup, GroupElement};
use crate::error::{Error, Result};
use crate::finite_field::{FFElement, FieldExtension};
use crate::function_field::Curve;
use crate::semiabelian::GPoint;

/// Per-source statistics of the R2 enumeration.
#[derive(Clone, Debug, Default, Serialize)]
pub struct SourceStats {
    pub source: String,
    pub candidates_total: String,
    pub candidates_evaluated: usize,
    pub admitted: usize,
    pub rows: usize,
    pub rejected: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct BuildStats {
    pub lattice_rank: usize,
    pub modulus_rows: usize,
    pub r1_rows: usize,
    pub r2_rows: usize,
    pub distinct_rows: usize,
    pub reciprocity_checks: usize,
    pub sources: Vec<SourceStats>,
}

/// Up to this many rejections are kept verbatim; all are counted.
const REJECTION_LOG: usize = 200;

/// The truncated presentation and its quotient group.
#[derive(Clone, Debug)]
pub struct SomekawaApprox {
    config: TruncationConfig,
    pub(crate) lattice: Lattice,
    rows: Vec<RelationRow>,
    rejections: Vec<Rejection>,
    stats: BuildStats,
    group: FinAbGroup,
}

/// `coeff * {p_1, ..., p_r}_{L/k}` with `L` a tower field of degree at most `d` over `k`.
#[derive(Clone, Debug)]
pub struct SymbolTerm {
    pub field: FieldExtension,
    pub points: Vec<GPoint<FFElement>>,
    pub coeff: i64,
}

impl SymbolTerm {
    pub fn new(field: &FieldExtension, points: Vec<GPoint<FFElement>>) -> Self {
        SymbolTerm { field: field.clone(), points, coeff: 1 }
    }

    pub fn times(mut self, c: i64) -> Self {
        self.coeff *= c;
        self
    }
}

impl SomekawaApprox {
    pub fn build(config: &TruncationConfig) -> Result<Self> {
        config.validate()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        pool.install(|| Self::build_inner(config))
    }

    fn build_inner(config: &TruncationConfig) -> Result<Self> {
        let lat = Lattice::new(&config.groups, config.degree_bound)?;
        let mut rows = Vec::new();
        let mut stats = BuildStats { lattice_rank: lat.width, ..Default::default() };
        for (i, g) in lat.moduli().into_iter().enumerate() {
            let mut v = lat.zero();
            v[i] = g;
            rows.push(RelationRow {
                kind: RelationKind::Modulus,
                source: String::new(),
                label: format!("column {i}"),
                vector: v,
            });
        }
        stats.modulus_rows = rows.len();
        let r1 = r1_rows(&lat)?;
        stats.r1_rows = r1.len();
        rows.extend(r1);

        let mut rejections = Vec::new();
        for (si, src) in sources(config, &lat)?.iter().enumerate() {
            let ctx = SourceContext::new(config, &lat, src)?;
            let (indices, total) =
                src.candidate_indices(config.enumeration.max_candidates_per_source, config.seed ^ si as u64);
            let outcomes: Vec<Result<Outcome>> = indices.par_iter().map(|&i| ctx.evaluate(i)).collect();
            let first_r2 = rows.len();
            let mut st = SourceStats {
                source: src.label.clone(),
                candidates_total: total.to_string(),
                candidates_evaluated: indices.len(),
                ..Default::default()
            };
            for o in outcomes {
                match o? {
                    Outcome::Admitted(rs) => {
                        st.admitted += 1;
                        stats.reciprocity_checks += config.rank();
                        for (label, vector) in rs {
                            st.rows += 1;
                            rows.push(RelationRow { kind: RelationKind::R2, source: src.label.clone(), label, vector });
                        }
                    }
                    Outcome::Rejected(candidate, reason) => {
                        *st.rejected.entry(reason.key().to_string()).or_insert(0) += 1;
                        if rejections.len() < REJECTION_LOG {
                            rejections.push(Rejection { source: src.label.clone(), candidate, reason });
                        }
                    }
                }
            }
            // deterministic merge: rows of a source sorted by provenance key
            rows[first_r2..].sort_by(|a, b| a.label.cmp(&b.label));
            stats.r2_rows += st.rows;
            stats.sources.push(st);
        }

        let mut seen = HashSet::new();
        rows.retain(|r| r.vector.iter().any(|x| !x.is_zero()) && seen.insert(r.vector.clone()));
        stats.distinct_rows = rows.len();
        let group = quotient_rows(lat.width, rows.iter().map(|r| r.vector.clone()))?;
        Ok(SomekawaApprox { config: config.clone(), lattice: lat, rows, rejections, stats, group })
    }

    pub fn config(&self) -> &TruncationConfig {
        &self.config
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    pub fn rows(&self) -> &[RelationRow] {
        &self.rows
    }

    pub fn rejections(&self) -> &[Rejection] {
        &self.rejections
    }

    pub fn stats(&self) -> &BuildStats {
        &self.stats
    }

    pub fn rejected_count(&self, reason: RejectReason) -> usize {
        self.stats.sources.iter().map(|s| s.rejected.get(reason.key()).copied().unwrap_or(0)).sum()
    }

    /// Lattice vector of a formal sum of symbols.
    pub fn symbol_vector(&self, terms: &[SymbolTerm]) -> Result<Vec<BigInt>> {
        let mut v = self.lattice.zero();
        for t in terms {
            if t.points.len() != self.config.rank() {
                return Err(Error::GroupMismatch);
            }
            for (g, p) in self.config.groups.iter().zip(&t.points) {
                if !g.contains(&t.field, p)? {
                    return Err(Error::Config(format!(
                        "{} is not a point of {}",
                        g.format_point(&t.field, p),
                        g.literal()
                    )));
                }
            }
            self.lattice.add_symbol(&mut v, t.coeff, &t.field, &t.points)?;
        }
        Ok(v)
    }

    /// The class of a sum of symbols in the quotient.
    pub fn symbol_eval(&self, terms: &[SymbolTerm]) -> Result<GroupElement> {
        self.group.project(&self.symbol_vector(terms)?)
    }

    /// Image of a lattice column (a pure tensor of cyclic generators) in `G(k)`
    /// under `{p}_{L/k} -> N_{L/k}(p)`; only for `r = 1`.
    fn collapse_column(&self) -> Result<Vec<GPoint<FFElement>>> {
        let g = &self.config.groups[0];
        let k = g.base_field();
        let mut out = Vec::with_capacity(self.lattice.width);
        for b in &self.lattice.blocks {
            let gens = b.frames[0].generators(&b.field);
            for (idx, _) in b.tensor.components() {
                let (_, p) = gens.iter().find(|(j, _)| *j == idx[0]).expect("component of a nontrivial factor");
                out.push(g.g_norm(k, &b.field, p)?);
            }
        }
        Ok(out)
    }

    fn collapse_vector(&self, images: &[GPoint<FFElement>], v: &[BigInt]) -> Result<GPoint<FFElement>> {
        let g = &self.config.groups[0];
        let k = g.base_field();
        let mut acc = g.identity(k);
        for (x, p) in v.iter().zip(images) {
            if x.is_zero() {
                continue;
            }
            let c = i64::try_from(x).map_err(|_| Error::Invariant("coefficient overflow".into()))?;
            acc = g.add(k, &acc, &g.scalar(k, p, c)?)?;
        }
        Ok(acc)
    }

    /// For `r = 1`: check that every relation row maps to the identity under
    /// the norm map to `G(k)` and that the induced map from the quotient is
    /// an isomorphism.
    pub fn check_r1_collapse(&self) -> Result<CollapseReport> {
        if self.config.rank() != 1 {
            return Err(Error::Config("the R1 collapse is defined for a single group".into()));
        }
        let g = &self.config.groups[0];
        let k = g.base_field();
        let images = self.collapse_column()?;
        let mut failures = Vec::new();
        for r in &self.rows {
            let p = self.collapse_vector(&images, &r.vector)?;
            if !g.is_identity(k, &p) {
                failures.push(format!("{:?} {} {}: {}", r.kind, r.source, r.label, g.format_point(k, &p)));
            }
        }
        // G(k) through its own cyclic decomposition
        let base = &self.lattice.blocks[0];
        let frame = &base.frames[0];
        let width = frame.orders().len();
        let mut rels: Vec<Vec<BigInt>> = Vec::new();
        for (i, o) in frame.orders().iter().enumerate() {
            let mut v = vec![BigInt::zero(); width];
            v[i] = o.clone();
            rels.push(v);
        }
        let target = quotient_rows(width, rels.clone())?;
        // surjectivity: G(k) modulo the images of the generators
        for p in &images {
            rels.push(frame.coords(k, p)?);
        }
        let cokernel = quotient_rows(width, rels)?;
        let surjective = cokernel.is_trivial();
        let iso =
            failures.is_empty() && surjective && self.group.order().is_some() && self.group.order() == target.order();
        Ok(CollapseReport {
            quotient: self.group.to_string(),
            target: target.to_string(),
            rows_checked: self.rows.len(),
            failures,
            surjective,
            isomorphism: iso,
        })
    }

    /// Re-derive each R1 row with norms computed as explicit products of
    /// Frobenius conjugates and compare with the stored row.
    pub fn verify_r1_rows(&self) -> Result<usize> {
        let recomputed = super::independent::r1_rows_by_conjugates(&self.lattice)?;
        let stored: HashSet<&Vec<BigInt>> =
            self.rows.iter().filter(|r| r.kind == RelationKind::R1).map(|r| &r.vector).collect();
        for v in &recomputed {
            if v.iter().all(|x| x.is_zero()) {
                continue;
            }
            if !stored.contains(v) {
                return Err(Error::Invariant("an R1 row differs from its independent recomputation".into()));
            }
        }
        Ok(recomputed.len())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CollapseReport {
    pub quotient: String,
    pub target: String,
    pub rows_checked: usize,
    pub failures: Vec<String>,
    pub surjective: bool,
    pub isomorphism: bool,
}

fn sources(cfg: &TruncationConfig, lat: &Lattice) -> Result<Vec<Source>> {
    let mut out = Vec::new();
    for m in cfg.p1_source_degrees() {
        let f = cfg.groups[0].extension(m)?;
        out.push(Source::build(cfg, lat, Curve::rational_line(&f)?, m)?);
    }
    if cfg.enumeration.elliptic_sources {
        let mut done = Vec::new();
        for g in &cfg.groups {
            if let Some(ab) = g.curve_coefficients() {
                if done.contains(&ab) {
                    continue;
                }
                done.push(ab);
                let c = g.elliptic_curve()?.expect("elliptic part");
                out.push(Source::build(cfg, lat, c, 1)?);
            }
        }
    }
    Ok(out)
}
