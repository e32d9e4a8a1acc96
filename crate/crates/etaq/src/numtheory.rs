//! Exact elementary number-theoretic primitives: Kronecker-Jacobi symbols,
//! Möbius and totient functions, radicals, squarefree parts and divisor lists.
//!
//! Everything here is exact integer arithmetic. Factorization is plain trial
//! division; the arguments showing up in this crate are either small (levels,
//! divisor indices) or smooth (products of small prime powers), where trial
//! division terminates quickly.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

/// Kronecker-Jacobi symbol `(a/b)`, total over all integer pairs.
///
/// Conventions: `(a/0) = 1` iff `a = ±1`, else 0; `(a/2) = 0` for even `a`,
/// `+1` for `a ≡ ±1 (mod 8)`, `-1` for `a ≡ ±3 (mod 8)`; `(a/-1) = -1` iff
/// `a < 0`; completely multiplicative in the denominator.
pub fn kronecker(a: &BigInt, b: &BigInt) -> i32 {
    if b.is_zero() {
        return if a.abs().is_one() { 1 } else { 0 };
    }
    let mut acc = 1i32;
    let mut b = b.clone();
    if b.is_negative() {
        b = -b;
        if a.is_negative() {
            acc = -acc;
        }
    }
    // Split off the even part of b; each factor 2 contributes (a/2).
    let two_exp = b.trailing_zeros().unwrap_or(0);
    if two_exp > 0 {
        if a.is_even() {
            return 0;
        }
        b >>= two_exp;
        if two_exp % 2 == 1 {
            let a8 = a.mod_floor(&BigInt::from(8));
            if a8 == BigInt::from(3) || a8 == BigInt::from(5) {
                acc = -acc;
            }
        }
    }
    if b.is_one() {
        return acc;
    }
    // Jacobi symbol for odd b > 1 by binary reciprocity.
    let mut a = a.mod_floor(&b);
    while !a.is_zero() {
        let v = a.trailing_zeros().unwrap_or(0);
        if v > 0 {
            a >>= v;
            if v % 2 == 1 {
                let b8 = b.mod_floor(&BigInt::from(8));
                if b8 == BigInt::from(3) || b8 == BigInt::from(5) {
                    acc = -acc;
                }
            }
        }
        // Both odd now: quadratic reciprocity, then reduce.
        if (&a % 4i32) == BigInt::from(3) && (&b % 4i32) == BigInt::from(3) {
            acc = -acc;
        }
        std::mem::swap(&mut a, &mut b);
        a = a.mod_floor(&b);
    }
    if b.is_one() {
        acc
    } else {
        0
    }
}

/// Convenience wrapper for machine-sized arguments.
pub fn kronecker_i64(a: i64, b: i64) -> i32 {
    kronecker(&BigInt::from(a), &BigInt::from(b))
}

/// Trial-division factorization of `n ≥ 1` into `(prime, exponent)` pairs,
/// primes increasing.
pub fn factor(n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "factor requires n >= 1, got {n}");
    let mut n = n;
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0u32;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Möbius function μ(n) for `n ≥ 1`.
pub fn moebius(n: u64) -> i32 {
    assert!(n >= 1, "moebius requires n >= 1, got {n}");
    let mut m = 1i32;
    for (_, e) in factor(n) {
        if e > 1 {
            return 0;
        }
        m = -m;
    }
    m
}

/// Euler totient φ(n) for `n ≥ 1`.
pub fn euler_phi(n: u64) -> u64 {
    assert!(n >= 1, "euler_phi requires n >= 1, got {n}");
    let mut phi = n;
    for (p, _) in factor(n) {
        phi = phi / p * (p - 1);
    }
    phi
}

/// rad(a, b): the product of the primes dividing gcd(a, b), i.e. the radical
/// of the common part. Returns 1 for coprime arguments. Panics when both
/// arguments are zero (the gcd has no radical).
pub fn rad_common(a: &BigInt, b: &BigInt) -> BigInt {
    assert!(
        !(a.is_zero() && b.is_zero()),
        "rad_common requires at least one nonzero argument"
    );
    let mut g = a.gcd(b);
    let mut rad = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= g {
        if g.is_multiple_of(&p) {
            rad *= &p;
            while g.is_multiple_of(&p) {
                g /= &p;
            }
        }
        p += 1i32;
    }
    if g > BigInt::one() {
        rad *= &g;
    }
    rad
}

/// Largest squarefree divisor `d` of `n ≥ 1` such that `n/d` is a perfect
/// square. Works for arbitrarily large smooth inputs (all primes are divided
/// out as they are found).
pub fn squarefree_part(n: &BigInt) -> BigInt {
    assert!(n.is_positive(), "squarefree_part requires n >= 1");
    let mut n = n.clone();
    let mut sf = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        if n.is_multiple_of(&p) {
            let mut e = 0u64;
            while n.is_multiple_of(&p) {
                n /= &p;
                e += 1;
            }
            if e % 2 == 1 {
                sf *= &p;
            }
        }
        p += 1i32;
    }
    if n > BigInt::one() {
        sf *= &n;
    }
    sf
}

/// 2-adic valuation of a nonzero integer.
pub fn v2(n: &BigInt) -> u64 {
    assert!(!n.is_zero(), "v2 requires a nonzero argument");
    n.trailing_zeros().unwrap()
}

/// All positive divisors of `n ≥ 1` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    assert!(n >= 1, "divisors requires n >= 1, got {n}");
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn kronecker_known_values() {
        assert_eq!(kronecker_i64(1, 1), 1);
        // (2/15) = (2/3)(2/5) = (-1)(-1)
        assert_eq!(kronecker_i64(2, 15), 1);
        assert_eq!(kronecker_i64(-4, 2), 0);
        // squares mod 5 are {1,4}
        assert_eq!(kronecker_i64(3, 5), -1);
    }

    #[test]
    fn kronecker_edge_conventions() {
        assert_eq!(kronecker_i64(1, 0), 1);
        assert_eq!(kronecker_i64(-1, 0), 1);
        assert_eq!(kronecker_i64(2, 0), 0);
        assert_eq!(kronecker_i64(0, 1), 1);
        assert_eq!(kronecker_i64(0, -1), 1);
        assert_eq!(kronecker_i64(0, 7), 0);
        assert_eq!(kronecker_i64(7, 2), 1); // 7 ≡ -1 (mod 8)
        assert_eq!(kronecker_i64(3, 2), -1);
        assert_eq!(kronecker_i64(5, 2), -1);
        assert_eq!(kronecker_i64(-1, 5), 1);
        assert_eq!(kronecker_i64(-1, 3), -1);
        assert_eq!(
            kronecker_i64(-3, -5),
            kronecker_i64(-3, -1) * kronecker_i64(-3, 5)
        );
    }

    /// Euler-criterion Legendre oracle for odd primes.
    fn legendre_oracle(a: i64, p: i64) -> i32 {
        let a = a.rem_euclid(p);
        if a == 0 {
            return 0;
        }
        let mut acc = 1i64;
        let mut base = a % p;
        let mut e = (p - 1) / 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        if acc == 1 {
            1
        } else {
            -1
        }
    }

    #[test]
    fn kronecker_matches_euler_criterion() {
        let odd_primes = [
            3i64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83,
            89, 97,
        ];
        for &p in &odd_primes {
            for a in -99i64..100 {
                assert_eq!(
                    kronecker_i64(a, p),
                    legendre_oracle(a, p),
                    "disagreement at ({a}/{p})"
                );
            }
        }
    }

    #[test]
    fn moebius_known_values() {
        assert_eq!(moebius(1), 1);
        assert_eq!(moebius(6), 1);
        assert_eq!(moebius(12), 0);
        assert_eq!(moebius(30), -1);
    }

    #[test]
    #[should_panic]
    fn moebius_rejects_zero() {
        moebius(0);
    }

    #[test]
    fn euler_phi_known_values() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(6), 2);
        assert_eq!(euler_phi(9), 6);
    }

    #[test]
    fn rad_common_values() {
        assert_eq!(rad_common(&big(12), &big(18)), big(6));
        assert_eq!(rad_common(&big(5), &big(7)), big(1));
        assert_eq!(rad_common(&big(8), &big(4)), big(2));
        assert_eq!(rad_common(&big(0), &big(12)), big(6));
        assert_eq!(rad_common(&big(-12), &big(18)), big(6));
    }

    #[test]
    #[should_panic]
    fn rad_common_rejects_double_zero() {
        rad_common(&big(0), &big(0));
    }

    #[test]
    fn squarefree_part_values() {
        assert_eq!(squarefree_part(&big(1)), big(1));
        assert_eq!(squarefree_part(&BigInt::from(2).pow(18)), big(1));
        assert_eq!(squarefree_part(&big(27)), big(3));
        assert_eq!(squarefree_part(&big(12)), big(3));
        // huge but smooth
        let pi = BigInt::from(2).pow(9) * BigInt::from(3).pow(6);
        assert_eq!(squarefree_part(&pi), big(2));
    }

    #[test]
    fn v2_values() {
        assert_eq!(v2(&big(1)), 0);
        assert_eq!(v2(&big(48)), 4);
        assert_eq!(v2(&big(-6)), 1);
    }

    #[test]
    fn divisors_values() {
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(32), vec![1, 2, 4, 8, 16, 32]);
    }

    #[test]
    fn totient_and_moebius_divisor_sums() {
        for n in 1..=10_000u64 {
            let ds = divisors(n);
            let phi_sum: u64 = ds.iter().map(|&d| euler_phi(d)).sum();
            assert_eq!(phi_sum, n);
            let mu_sum: i32 = ds.iter().map(|&d| moebius(d)).sum();
            assert_eq!(mu_sum, i32::from(n == 1));
        }
    }

    #[test]
    fn squarefree_part_structure() {
        for n in 1..=10_000i64 {
            let sf = squarefree_part(&big(n));
            // n / sf is a perfect square
            let q = big(n) / &sf;
            let r = q.sqrt();
            assert_eq!(&r * &r, q, "n={n}");
            // sf is squarefree
            let sf_u = u64::try_from(&sf).unwrap();
            assert!(factor(sf_u).iter().all(|&(_, e)| e == 1), "n={n}");
        }
    }

    proptest! {
        #[test]
        fn kronecker_multiplicative_in_numerator(a1 in -300i64..300, a2 in -300i64..300, b in 1i64..300) {
            prop_assert_eq!(
                kronecker_i64(a1 * a2, b),
                kronecker_i64(a1, b) * kronecker_i64(a2, b)
            );
        }

        #[test]
        fn kronecker_multiplicative_in_denominator(a in -300i64..300, b1 in 1i64..300, b2 in 1i64..300) {
            prop_assert_eq!(
                kronecker_i64(a, b1 * b2),
                kronecker_i64(a, b1) * kronecker_i64(a, b2)
            );
        }

        #[test]
        fn kronecker_periodic_for_odd_positive_denominator(a in -500i64..500, b in 1i64..200) {
            let b = 2 * b + 1;
            prop_assert_eq!(kronecker_i64(a, b), kronecker_i64(a + 4 * b, b));
        }
    }
}
