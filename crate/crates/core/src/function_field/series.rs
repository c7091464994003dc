//! Truncated expansions in a local parameter `u = x - x0` over a residue field.

use super::rational::RatFunc;
use crate::finite_field::{Embedding, FFElement, FieldExtension};
use crate::poly::Poly;

/// Coefficients of `p(x0 + u)` in `u`, low to high.
pub(crate) fn taylor_shift(l: &FieldExtension, emb: &Embedding, p: &Poly, x0: FFElement) -> Vec<FFElement> {
    let mut a: Vec<FFElement> = p.coeffs().iter().map(|&c| emb.apply(c)).collect();
    let n = a.len();
    for i in 0..n.saturating_sub(1) {
        for j in (i..n - 1).rev() {
            a[j] = l.add(a[j], l.mul(x0, a[j + 1]));
        }
    }
    a
}

/// A Laurent expansion `sum_{i >= val} c_{i-val} u^i`, known up to (but not
/// including) absolute index `val + c.len()`.
#[derive(Clone, Debug)]
pub(crate) struct Laurent {
    pub val: i64,
    pub c: Vec<FFElement>,
}

impl Laurent {
    /// Coefficient at absolute index `i` (zero below `val`).
    pub fn at(&self, l: &FieldExtension, i: i64) -> FFElement {
        if i < self.val {
            return l.zero();
        }
        self.c.get((i - self.val) as usize).copied().unwrap_or_else(|| l.zero())
    }
}

fn first_nonzero(l: &FieldExtension, c: &[FFElement]) -> usize {
    c.iter().position(|&e| !l.is_zero(e)).unwrap_or(c.len())
}

/// Expansion of a nonzero rational function up to absolute index `upto`.
pub(crate) fn rat_series(l: &FieldExtension, emb: &Embedding, r: &RatFunc, x0: FFElement, upto: i64) -> Laurent {
    let n = taylor_shift(l, emb, r.num(), x0);
    let d = taylor_shift(l, emb, r.den(), x0);
    let vn = first_nonzero(l, &n);
    let vd = first_nonzero(l, &d);
    let n = &n[vn..];
    let d = &d[vd..];
    let val = vn as i64 - vd as i64;
    let len = (upto - val).max(0) as usize;
    let d0_inv = l.inv(d[0]).expect("shifted denominator has a nonzero constant term");
    let mut q: Vec<FFElement> = Vec::with_capacity(len);
    for k in 0..len {
        let mut s = n.get(k).copied().unwrap_or_else(|| l.zero());
        for i in 1..=k.min(d.len() - 1) {
            s = l.sub(s, l.mul(d[i], q[k - i]));
        }
        q.push(l.mul(s, d0_inv));
    }
    Laurent { val, c: q }
}

/// The branch of `sqrt(G(u))` with constant term `y0 != 0`, `len` terms.
pub(crate) fn sqrt_series(l: &FieldExtension, g: &[FFElement], y0: FFElement, len: usize) -> Vec<FFElement> {
    let mut c = Vec::with_capacity(len);
    if len == 0 {
        return c;
    }
    c.push(y0);
    let inv2y = l.inv(l.add(y0, y0)).expect("odd characteristic and y0 != 0");
    for k in 1..len {
        let mut s = g.get(k).copied().unwrap_or_else(|| l.zero());
        for i in 1..k {
            s = l.sub(s, l.mul(c[i], c[k - i]));
        }
        c.push(l.mul(s, inv2y));
    }
    c
}

pub(crate) fn mul_series(l: &FieldExtension, a: &Laurent, b: &[FFElement], upto: i64) -> Laurent {
    let len = (upto - a.val).max(0) as usize;
    let mut c = vec![l.zero(); len];
    for (i, &ai) in a.c.iter().enumerate().take(len) {
        if l.is_zero(ai) {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(len - i) {
            c[i + j] = l.add(c[i + j], l.mul(ai, bj));
        }
    }
    Laurent { val: a.val, c }
}

pub(crate) fn add_series(l: &FieldExtension, a: &Laurent, b: &Laurent, upto: i64) -> Laurent {
    let val = a.val.min(b.val);
    let len = (upto - val).max(0) as usize;
    let c = (0..len).map(|i| l.add(a.at(l, val + i as i64), b.at(l, val + i as i64))).collect();
    Laurent { val, c }
}
