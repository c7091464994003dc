use kgroups::abelian::{snf, tensor, tensor_cyclic, FinAbGroup, IntMatrix};
use kgroups::finite_field::Tower;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=12, 1usize..=12)
        .prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-1000i64..=1000, c), r))
}

/// gcd of all k x k minors, by cofactor expansion (small matrices only).
fn det_divisor(m: &[Vec<i64>], k: usize) -> BigInt {
    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        if n < k {
            return vec![];
        }
        let mut out = subsets(n - 1, k);
        for mut s in subsets(n - 1, k - 1) {
            s.push(n - 1);
            out.push(s);
        }
        out
    }
    fn det(a: &[Vec<BigInt>]) -> BigInt {
        if a.len() == 1 {
            return a[0][0].clone();
        }
        let mut acc = BigInt::zero();
        for j in 0..a.len() {
            let minor: Vec<Vec<BigInt>> = a[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
                .collect();
            let t = &a[0][j] * det(&minor);
            if j % 2 == 0 {
                acc += t
            } else {
                acc -= t
            }
        }
        acc
    }
    let mut g = BigInt::zero();
    for rows in subsets(m.len(), k) {
        for cols in subsets(m[0].len(), k) {
            let sub: Vec<Vec<BigInt>> =
                rows.iter().map(|&i| cols.iter().map(|&j| BigInt::from(m[i][j])).collect()).collect();
            g = g.gcd(&det(&sub));
        }
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn snf_round_trips_with_unimodular_transforms(rows in matrix()) {
        let m = IntMatrix::from_i64(&rows);
        let s = snf(&m).unwrap();
        prop_assert_eq!(s.u.mul(&m).mul(&s.v), s.d.clone());
        prop_assert!(s.u.is_unimodular());
        prop_assert!(s.v.is_unimodular());
        prop_assert!(s.d.is_diagonal());
        let diag = s.diagonal();
        for w in diag.windows(2) {
            prop_assert!(!w[0].is_negative());
            if !w[0].is_zero() {
                prop_assert!((&w[1] % &w[0]).is_zero());
            } else {
                prop_assert!(w[1].is_zero());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn snf_matches_determinantal_divisors(rows in (1usize..=4, 1usize..=4)
        .prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-30i64..=30, c), r))) {
        let s = snf(&IntMatrix::from_i64(&rows)).unwrap();
        let diag = s.diagonal();
        let mut prev = BigInt::from(1);
        for (k, d) in diag.iter().enumerate() {
            let dk = det_divisor(&rows, k + 1);
            if dk.is_zero() {
                prop_assert!(d.is_zero());
                continue;
            }
            prop_assert_eq!(&prev * d, dk.clone());
            prev = dk;
        }
    }
}

fn cyclic(ds: &[u64]) -> FinAbGroup {
    FinAbGroup::new(ds.iter().map(|&d| BigInt::from(d)).collect(), 0).unwrap()
}

/// All coordinate vectors of `Z/d_1 x ... x Z/d_n`.
fn all_coords(ds: &[u64]) -> Vec<Vec<BigInt>> {
    let mut out = vec![vec![]];
    for &d in ds {
        out = out.into_iter().flat_map(|v| (0..d).map(move |x| [v.clone(), vec![BigInt::from(x)]].concat())).collect();
    }
    out
}

#[test]
fn tensor_is_multilinear_on_small_groups() {
    let cases: [(&[u64], &[u64]); 5] =
        [(&[2, 4], &[8]), (&[4, 6], &[6]), (&[2, 2, 2], &[2, 4]), (&[3, 9], &[3, 3]), (&[64], &[12])];
    for (a, b) in cases {
        let big = |ds: &[u64]| ds.iter().map(|&d| BigInt::from(d)).collect::<Vec<_>>();
        let t = tensor_cyclic(&[big(a), big(b)]).unwrap();
        let g = t.group();
        let ea = all_coords(a);
        let eb = all_coords(b);
        let add = |ds: &[u64], x: &[BigInt], y: &[BigInt]| -> Vec<BigInt> {
            x.iter().zip(y).zip(ds).map(|((p, q), &d)| (p + q).mod_floor(&BigInt::from(d))).collect()
        };
        for x1 in &ea {
            for x2 in &ea {
                for y in &eb {
                    let lhs = t.eval(&[&add(a, x1, x2), y]).unwrap();
                    let rhs = g.add(&t.eval(&[x1, y]).unwrap(), &t.eval(&[x2, y]).unwrap()).unwrap();
                    assert!(g.eq(&lhs, &rhs).unwrap());
                }
            }
        }
        for x in &ea {
            for y1 in &eb {
                for y2 in &eb {
                    let lhs = t.eval(&[x, &add(b, y1, y2)]).unwrap();
                    let rhs = g.add(&t.eval(&[x, y1]).unwrap(), &t.eval(&[x, y2]).unwrap()).unwrap();
                    assert!(g.eq(&lhs, &rhs).unwrap());
                }
            }
        }
        // |A (x) B| = |Bil(A x B, Z/N)| for N a common multiple of the exponents
        let n = a.iter().chain(b).fold(1u64, |acc, &d| acc.lcm(&d));
        let mut count = BigInt::from(1);
        for &da in a {
            for &db in b {
                count *= (0..n).filter(|v| (da * v) % n == 0 && (db * v) % n == 0).count();
            }
        }
        assert_eq!(g.order().unwrap(), count, "{a:?} (x) {b:?}");
    }
    let t = tensor(&[&cyclic(&[2, 4]), &cyclic(&[8])]).unwrap();
    assert_eq!(t.group().invariants_u64(), vec![2, 4]);
}

#[test]
fn norm_and_trace_are_transitive_in_towers() {
    for (p, top) in [(2u64, 12usize), (3, 6)] {
        let tower = Tower::for_prime(p).unwrap();
        let divs: Vec<usize> = (1..=top).filter(|d| top % d == 0).collect();
        for &a in &divs {
            for &b in divs.iter().filter(|&&b| b % a == 0 && b > a) {
                for &c in divs.iter().filter(|&&c| c % b == 0 && c > b) {
                    let ab = tower.embedding(a, b).unwrap();
                    let bc = tower.embedding(b, c).unwrap();
                    let ac = tower.embedding(a, c).unwrap();
                    assert!(ac.same_map(&bc.compose(&ab).unwrap()), "p={p}: {a} | {b} | {c}");
                    for x in tower.field(c).unwrap().elements() {
                        if x != tower.field(c).unwrap().zero() {
                            assert_eq!(ac.norm(x), ab.norm(bc.norm(x)));
                        }
                        assert_eq!(ac.trace(x), ab.trace(bc.trace(x)));
                    }
                }
            }
        }
    }
}
