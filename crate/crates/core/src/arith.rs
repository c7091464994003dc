//! Small-integer number theory used while building fields and groups.

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime divisors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();
    out.sort_unstable();
    out
}

pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Inverse of `a` modulo `m` when it exists.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let qt = old_r / r;
        (old_r, r) = (r, old_r - qt * r);
        (old_s, s) = (s, old_s - qt * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

pub fn checked_pow(base: u64, exp: usize) -> Option<u64> {
    let mut acc = 1u64;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Integer log: returns `m` with `p^m == q`, if any.
pub fn exact_log(p: u64, q: u64) -> Option<usize> {
    if p < 2 || q == 0 {
        return None;
    }
    let (mut acc, mut m) = (1u64, 0usize);
    while acc < q {
        acc = acc.checked_mul(p)?;
        m += 1;
    }
    (acc == q).then_some(m)
}

/// Prime-power decomposition `q = p^m` for a prime `p`.
pub fn prime_power(q: u64) -> Option<(u64, usize)> {
    let ps = prime_factors(q);
    if ps.len() != 1 {
        return None;
    }
    exact_log(ps[0], q).map(|m| (ps[0], m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_powers() {
        assert!(is_prime(2) && is_prime(7) && !is_prime(9) && !is_prime(1));
        assert_eq!(prime_factors(360), vec![2, 3, 5]);
        assert_eq!(prime_power(81), Some((3, 4)));
        assert_eq!(prime_power(12), None);
        assert_eq!(mod_inverse(3, 7), Some(5));
        assert_eq!(mod_inverse(2, 4), None);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
    }
}
