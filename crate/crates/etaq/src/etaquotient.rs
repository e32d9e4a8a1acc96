//! The level/exponent data model for eta-quotients and every invariant that
//! is a pure function of it: weight, the auxiliary product and its squarefree
//! part, the coefficient modulus, and the cusp numbers.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::numtheory::{divisors, squarefree_part, v2};
use crate::{Error, Result};

/// An eta-quotient, described by its level `N` and one integer exponent per
/// positive divisor of `N`. Zero exponents are stored explicitly so that the
/// printed exponent string round-trips byte for byte.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EtaQuotient {
    level: u64,
    divs: Vec<u64>,
    exps: Vec<i64>,
}

/// All symbols derived from an [`EtaQuotient`] alone: the weight `k`, the
/// auxiliary product `Π` and its squarefree part `Π'`, the coefficient
/// modulus `m_r`, the sign selector `δ`, the order datum `x_N` and the full
/// family of cusp numbers `x_c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedInvariants {
    /// Half the exponent sum. Integral exactly for integral-weight quotients.
    pub k: BigRational,
    /// `Π = prod over n|N of (N/n)^|r_n|`.
    pub pi: BigInt,
    /// Squarefree part of `Π`.
    pub pi_sf: BigInt,
    /// `m_r = 24 / gcd(24, Σ n·r_n, Σ (N/n)·r_n)`; always divides 24.
    pub m_r: u64,
    /// 0 when the odd part of `Π` is ≡ 1 (mod 4), 1 when it is ≡ 3 (mod 4).
    pub delta: u8,
    /// `x_N = Σ n·r_n`, 24 times the vanishing order at infinity.
    pub x_n: i64,
    /// Cusp numbers `x_c` for each divisor `c` of the level, in divisor order.
    pub x_c: Vec<(u64, i64)>,
}

impl DerivedInvariants {
    /// The cusp number attached to divisor `c`. Panics when `c` is not a
    /// divisor of the level.
    pub fn x_at(&self, c: u64) -> i64 {
        self.x_c
            .iter()
            .find(|&&(d, _)| d == c)
            .map(|&(_, x)| x)
            .unwrap_or_else(|| panic!("{c} is not a divisor of the level"))
    }

    /// The weight as a machine integer, when it is integral.
    pub fn integral_k(&self) -> Option<i64> {
        if self.k.is_integer() {
            Some(i64::try_from(self.k.to_integer()).expect("weight fits i64"))
        } else {
            None
        }
    }
}

/// Integer matrix `M[c][n]` with `x_c = Σ_n M[c][n]·r_n`, rows and columns
/// both indexed by the divisors of `level` in increasing order. Each entry
/// `N/gcd(N,c²)·gcd(n,c)²/n` is an integer (checked).
pub(crate) fn cusp_matrix(level: u64) -> Vec<Vec<i64>> {
    let divs = divisors(level);
    divs.iter()
        .map(|&c| {
            let pref = level / num_integer::gcd(level, c * c);
            divs.iter()
                .map(|&n| {
                    let g = num_integer::gcd(n, c);
                    let num = (pref as u128) * (g as u128) * (g as u128);
                    assert!(
                        num.is_multiple_of(n as u128),
                        "cusp matrix entry not integral at N={level}, c={c}, n={n}"
                    );
                    i64::try_from(num / (n as u128)).expect("cusp matrix entry fits i64")
                })
                .collect()
        })
        .collect()
}

impl EtaQuotient {
    /// Builds an eta-quotient from the exponent vector aligned with the
    /// divisors of `level` in increasing order.
    pub fn new(level: u64, exponents: Vec<i64>) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidLevel);
        }
        let divs = divisors(level);
        if exponents.len() != divs.len() {
            return Err(Error::ExponentCount {
                level,
                expected: divs.len(),
                got: exponents.len(),
            });
        }
        Ok(Self {
            level,
            divs,
            exps: exponents,
        })
    }

    /// Builds an eta-quotient from `(divisor, exponent)` pairs; divisors not
    /// mentioned get exponent 0. Rejects keys that do not divide the level
    /// and repeated keys.
    pub fn from_pairs(level: u64, pairs: &[(u64, i64)]) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidLevel);
        }
        let divs = divisors(level);
        let mut exps = vec![0i64; divs.len()];
        let mut seen = vec![false; divs.len()];
        for &(n, r) in pairs {
            let idx = divs
                .binary_search(&n)
                .map_err(|_| Error::NotADivisor { level, n })?;
            if seen[idx] {
                return Err(Error::ParseRString(format!("divisor {n} listed twice")));
            }
            seen[idx] = true;
            exps[idx] = r;
        }
        Ok(Self { level, divs, exps })
    }

    /// Parses an exponent string such as `1^{-4}2^{10}4^{-4}`: a
    /// concatenation of `n^{e}` items, `e` a decimal integer with optional
    /// leading minus.
    pub fn parse(level: u64, s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::ParseRString(format!("{msg} in {s:?}"));
        let mut pairs = Vec::new();
        let mut chars = s.chars().peekable();
        while chars.peek().is_some() {
            let mut n_str = String::new();
            while let Some(c) = chars.peek() {
                if c.is_ascii_digit() {
                    n_str.push(*c);
                    chars.next();
                } else {
                    break;
                }
            }
            if n_str.is_empty() {
                return Err(bad("expected a divisor"));
            }
            if chars.next() != Some('^') || chars.next() != Some('{') {
                return Err(bad("expected ^{ after a divisor"));
            }
            let mut e_str = String::new();
            if chars.peek() == Some(&'-') {
                e_str.push('-');
                chars.next();
            }
            while let Some(c) = chars.peek() {
                if c.is_ascii_digit() {
                    e_str.push(*c);
                    chars.next();
                } else {
                    break;
                }
            }
            if e_str.is_empty() || e_str == "-" {
                return Err(bad("expected an exponent"));
            }
            if chars.next() != Some('}') {
                return Err(bad("expected } after an exponent"));
            }
            let n: u64 = n_str.parse().map_err(|_| bad("divisor out of range"))?;
            let e: i64 = e_str.parse().map_err(|_| bad("exponent out of range"))?;
            pairs.push((n, e));
        }
        if pairs.is_empty() {
            return Err(bad("empty exponent string"));
        }
        Self::from_pairs(level, &pairs)
    }

    /// The exponent string over all divisors in increasing order, zero
    /// entries included.
    pub fn r_string(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        for (&n, &r) in self.divs.iter().zip(&self.exps) {
            write!(out, "{n}^{{{r}}}").unwrap();
        }
        out
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn divisors(&self) -> &[u64] {
        &self.divs
    }

    pub fn exponents(&self) -> &[i64] {
        &self.exps
    }

    /// Exponent attached to divisor `n`; panics when `n` does not divide the
    /// level.
    pub fn exponent(&self, n: u64) -> i64 {
        let idx = self
            .divs
            .binary_search(&n)
            .unwrap_or_else(|_| panic!("{n} does not divide level {}", self.level));
        self.exps[idx]
    }

    /// Computes every derived invariant in one pass.
    pub fn derive(&self) -> DerivedInvariants {
        let level = self.level;
        let k = BigRational::new(BigInt::from(self.exps.iter().sum::<i64>()), BigInt::from(2));

        let mut pi = BigInt::one();
        for (&n, &r) in self.divs.iter().zip(&self.exps) {
            pi *= BigInt::from(level / n)
                .pow(u32::try_from(r.unsigned_abs()).expect("exponent fits u32"));
        }
        let pi_sf = squarefree_part(&pi);

        let x_n: i128 = self
            .divs
            .iter()
            .zip(&self.exps)
            .map(|(&n, &r)| n as i128 * r as i128)
            .sum();
        let x_n = i64::try_from(x_n).expect("x_N fits i64");
        let co_sum: i128 = self
            .divs
            .iter()
            .zip(&self.exps)
            .map(|(&n, &r)| (level / n) as i128 * r as i128)
            .sum();
        let g = num_integer::gcd(
            24u64,
            num_integer::gcd(
                x_n.unsigned_abs(),
                i64::try_from(co_sum).expect("fits i64").unsigned_abs(),
            ),
        );
        let m_r = 24 / g;

        let delta = if pi.is_one() {
            0
        } else {
            let odd = &pi >> v2(&pi);
            match u8::try_from(odd.mod_floor_u64(4)) {
                Ok(1) => 0,
                Ok(3) => 1,
                _ => unreachable!("odd part is odd"),
            }
        };

        let matrix = cusp_matrix(level);
        let x_c = self
            .divs
            .iter()
            .enumerate()
            .map(|(ci, &c)| {
                let x: i128 = matrix[ci]
                    .iter()
                    .zip(&self.exps)
                    .map(|(&m, &r)| m as i128 * r as i128)
                    .sum();
                (c, i64::try_from(x).expect("x_c fits i64"))
            })
            .collect();

        DerivedInvariants {
            k,
            pi,
            pi_sf,
            m_r,
            delta,
            x_n,
            x_c,
        }
    }

    /// True when the exponent sum is even, i.e. the weight is an integer.
    pub fn is_integral_weight(&self) -> bool {
        self.exps.iter().sum::<i64>() % 2 == 0
    }

    /// True when every cusp number `x_c` is nonnegative.
    pub fn is_holomorphic(&self) -> bool {
        self.derive().x_c.iter().all(|&(_, x)| x >= 0)
    }

    /// The vanishing order at infinity, `x_N / 24`.
    pub fn vanishing_order_at_infinity(&self) -> BigRational {
        let inv = self.derive();
        BigRational::new(BigInt::from(inv.x_n), BigInt::from(24))
    }

    /// Parity condition for the simplified coefficient transform: for an even
    /// transform index the level must not be even with `N(k+δ) ≡ 2 (mod 4)`;
    /// for an odd index there is no constraint. Requires integral weight.
    pub fn condition7_holds(&self, l_even: bool) -> bool {
        if !l_even {
            return true;
        }
        let inv = self.derive();
        let k = inv
            .integral_k()
            .expect("condition7_holds requires integral weight");
        let nkd = (self.level as i128) * (k as i128 + inv.delta as i128);
        !(self.level.is_multiple_of(2) && nkd.rem_euclid(4) == 2)
    }

    /// True when the fourth-root factor of the transform is multiplicative
    /// for this quotient: even level, or even `k + δ`.
    pub fn psi_mult_ok(&self) -> bool {
        if self.level.is_multiple_of(2) {
            return true;
        }
        let inv = self.derive();
        match inv.integral_k() {
            Some(k) => (k + inv.delta as i64) % 2 == 0,
            None => false,
        }
    }
}

impl fmt::Display for EtaQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.r_string())
    }
}

/// Small helper: nonnegative residue of a positive big integer mod a small
/// modulus.
trait ModFloorU64 {
    fn mod_floor_u64(&self, m: u64) -> u64;
}

impl ModFloorU64 for BigInt {
    fn mod_floor_u64(&self, m: u64) -> u64 {
        use num_integer::Integer as _;
        let r = self.mod_floor(&BigInt::from(m));
        u64::try_from(&r).expect("residue fits u64")
    }
}
