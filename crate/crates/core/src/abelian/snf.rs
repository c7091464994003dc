use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;
use crate::error::{Error, Result};

/// Smith normal form `U * M * V = D` with `U`, `V` unimodular.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl Snf {
    /// Diagonal entries of `D` (length `min(rows, cols)`).
    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.d.rows().min(self.d.cols());
        (0..n).map(|i| self.d[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|v| !v.is_zero()).count()
    }
}

fn smallest_nonzero(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let v = a[(i, j)].abs();
            if v.is_zero() {
                continue;
            }
            if best.as_ref().is_none_or(|b| v < b.2) {
                let one = v.is_one();
                best = Some((i, j, v));
                if one {
                    return best.map(|b| (b.0, b.1));
                }
            }
        }
    }
    best.map(|b| (b.0, b.1))
}

/// Compute the Smith normal form with transforms, pivoting on the smallest
/// nonzero absolute value. Without `verify` the round-trip and
/// unimodularity checks are skipped.
pub fn snf_with(m: &IntMatrix, verify: bool) -> Result<Snf> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = smallest_nonzero(&a, t) else { break };
        a.swap_rows(t, pi);
        u.swap_rows(t, pi);
        a.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = -a[(i, t)].div_floor(&a[(t, t)]);
                a.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                if !a[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = -a[(t, j)].div_floor(&a[(t, t)]);
                a.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                if !a[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                // bring the smallest remainder in row/column t to the pivot
                let mut best = (t, t, a[(t, t)].abs());
                for i in t + 1..rows {
                    let x = a[(i, t)].abs();
                    if !x.is_zero() && x < best.2 {
                        best = (i, t, x);
                    }
                }
                for j in t + 1..cols {
                    let x = a[(t, j)].abs();
                    if !x.is_zero() && x < best.2 {
                        best = (t, j, x);
                    }
                }
                a.swap_rows(t, best.0);
                u.swap_rows(t, best.0);
                a.swap_cols(t, best.1);
                v.swap_cols(t, best.1);
                continue;
            }
            let piv = a[(t, t)].clone();
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[(i, j)].is_multiple_of(&piv)));
            match bad {
                Some(i) => {
                    let one = BigInt::one();
                    a.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    let out = Snf { u, d: a, v };
    if verify {
        check(m, &out)?;
    }
    Ok(out)
}

/// Smith normal form, verified: `U * M * V == D`, `D` diagonal with a
/// divisibility chain, `|det U| = |det V| = 1`.
pub fn snf(m: &IntMatrix) -> Result<Snf> {
    snf_with(m, true)
}

fn check(m: &IntMatrix, s: &Snf) -> Result<()> {
    if s.u.mul(m).mul(&s.v) != s.d {
        return Err(Error::Invariant("SNF round trip U*M*V != D".into()));
    }
    if !s.d.is_diagonal() {
        return Err(Error::Invariant("SNF result is not diagonal".into()));
    }
    let diag = s.diagonal();
    for w in diag.windows(2) {
        let ok = if w[0].is_zero() { w[1].is_zero() } else { w[1].is_multiple_of(&w[0]) };
        if !ok || w[0].is_negative() {
            return Err(Error::Invariant("SNF divisibility chain broken".into()));
        }
    }
    if !s.u.is_unimodular() || !s.v.is_unimodular() {
        return Err(Error::Invariant("SNF transform is not unimodular".into()));
    }
    Ok(())
}

/// Echelon basis of the row lattice spanned by `rows`, built incrementally
/// with gcd row operations; entries right of each pivot are reduced modulo
/// the pivots below when possible.
pub fn row_lattice_basis(cols: usize, rows: impl IntoIterator<Item = Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    // basis[c] = row with pivot in column c
    let mut basis: Vec<Option<Vec<BigInt>>> = vec![None; cols];
    for mut r in rows {
        assert_eq!(r.len(), cols, "row length mismatch");
        let mut c = 0;
        while c < cols {
            if r[c].is_zero() {
                c += 1;
                continue;
            }
            match basis[c].take() {
                None => {
                    if r[c].is_negative() {
                        r.iter_mut().for_each(|x| *x = -std::mem::take(x));
                    }
                    reduce_against(&mut r, &basis, c + 1);
                    basis[c] = Some(r);
                    break;
                }
                Some(mut b) => {
                    let g = b[c].extended_gcd(&r[c]);
                    let (bs, rs) = (&b[c] / &g.gcd, &r[c] / &g.gcd);
                    let new_b: Vec<BigInt> = b.iter().zip(&r).map(|(x, y)| &g.x * x + &g.y * y).collect();
                    let new_r: Vec<BigInt> = b.iter().zip(&r).map(|(x, y)| &bs * y - &rs * x).collect();
                    b = new_b;
                    if b[c].is_negative() {
                        b.iter_mut().for_each(|x| *x = -std::mem::take(x));
                    }
                    reduce_against(&mut b, &basis, c + 1);
                    basis[c] = Some(b);
                    r = new_r;
                    c += 1;
                }
            }
        }
    }
    basis.into_iter().flatten().collect()
}

fn reduce_against(r: &mut [BigInt], basis: &[Option<Vec<BigInt>>], from: usize) {
    for c in from..r.len() {
        if let Some(b) = &basis[c] {
            if r[c].is_zero() {
                continue;
            }
            let q = r[c].div_floor(&b[c]);
            if !q.is_zero() {
                for (x, y) in r.iter_mut().zip(b) {
                    *x -= &q * y;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diag_two_three() {
        let m = IntMatrix::from_i64(&[vec![2, 0], vec![0, 3]]);
        let s = snf(&m).unwrap();
        assert_eq!(s.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn zero_and_identity() {
        let s = snf(&IntMatrix::zeros(2, 2)).unwrap();
        assert_eq!(s.d, IntMatrix::zeros(2, 2));
        assert_eq!(s.u, IntMatrix::identity(2));
        assert_eq!(s.v, IntMatrix::identity(2));
        let s = snf(&IntMatrix::from_i64(&[vec![1]])).unwrap();
        assert_eq!(s.d, IntMatrix::from_i64(&[vec![1]]));
        let s = snf(&IntMatrix::zeros(0, 3)).unwrap();
        assert_eq!(s.v, IntMatrix::identity(3));
    }

    #[test]
    fn lattice_basis_spans_same_quotient() {
        let rows = vec![
            vec![BigInt::from(4), BigInt::from(6)],
            vec![BigInt::from(6), BigInt::from(9)],
            vec![BigInt::from(2), BigInt::from(0)],
        ];
        let b = row_lattice_basis(2, rows);
        let m = IntMatrix::from_rows(2, b);
        let s = snf(&m).unwrap();
        // Z^2 / <(4,6),(6,9),(2,0)> : det of {(2,0),(0,3)} span
        assert_eq!(s.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
    }
}
