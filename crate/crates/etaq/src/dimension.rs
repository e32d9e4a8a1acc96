//! Exact dimension values for the spaces of modular forms an eta-quotient
//! lives in, computed by a closed rational formula together with its
//! applicability test (a strict lower bound on the weight).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::etaquotient::EtaQuotient;
use crate::numtheory::{euler_phi, factor, kronecker_i64};
use crate::{Error, Result};

/// Everything the formula produces for one eta-quotient: the subgroup index,
/// the elliptic-point counts, the per-cusp contributions, whether the
/// formula applies, and (when it does) the dimension itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionData {
    pub index_m: u64,
    pub eps2: i64,
    pub eps3: i64,
    /// Per divisor `c` of the level: `φ(gcd(c, N/c)) · (1/2 - {x_c/24})`.
    pub cusp_terms: Vec<(u64, BigRational)>,
    pub applicable: bool,
    /// Formula value; present exactly when `applicable` holds.
    pub dim: Option<BigRational>,
}

/// Index of the level-`N` congruence subgroup in the full modular group:
/// `N·Π_{p|N}(1 + 1/p)`.
pub fn index(level: u64) -> u64 {
    assert!(level >= 1, "index requires a positive level");
    let mut m = level;
    for (p, _) in factor(level) {
        m = m / p * (p + 1);
    }
    m
}

/// Number of order-2 elliptic points: `Π_{p|N}(1 + (-4/p))`, zeroed when
/// `4 | N`.
pub fn eps2(level: u64) -> i64 {
    assert!(level >= 1);
    if level.is_multiple_of(4) {
        return 0;
    }
    factor(level)
        .iter()
        .map(|&(p, _)| 1 + i64::from(kronecker_i64(-4, p as i64)))
        .product()
}

/// Number of order-3 elliptic points: `Π_{p|N}(1 + (-3/p))`, zeroed when
/// `9 | N`.
pub fn eps3(level: u64) -> i64 {
    assert!(level >= 1);
    if level.is_multiple_of(9) {
        return 0;
    }
    factor(level)
        .iter()
        .map(|&(p, _)| 1 + i64::from(kronecker_i64(-3, p as i64)))
        .product()
}

/// Fractional part with the floor convention: `{x} = x - ⌊x⌋ ∈ [0, 1)`,
/// also for negative arguments.
pub(crate) fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

fn rat(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

/// The strict lower bound the weight must exceed for the formula to apply.
pub fn threshold(e: &EtaQuotient) -> BigRational {
    let level = e.level();
    let m = rat(index(level) as i64);
    let inv = e.derive();
    let mut cusp_sum = BigRational::zero();
    for &(c, x) in &inv.x_c {
        let phi = euler_phi(num_integer::gcd(c, level / c)) as i64;
        let f = frac(&BigRational::new(BigInt::from(x), BigInt::from(24)));
        cusp_sum += rat(phi) * (BigRational::one() - f);
    }
    rat(2) - rat(6 * eps2(level)) / &m - rat(8 * eps3(level)) / &m - rat(12) / &m * cusp_sum
}

/// Whether the dimension formula applies: the weight strictly exceeds
/// [`threshold`]. Equality is not enough.
pub fn applicable(e: &EtaQuotient) -> bool {
    e.derive().k > threshold(e)
}

/// Computes the full [`DimensionData`] for an eta-quotient.
pub fn analyze(e: &EtaQuotient) -> DimensionData {
    let level = e.level();
    let inv = e.derive();
    let m = index(level);
    let e2 = eps2(level);
    let e3 = eps3(level);
    let cusp_terms: Vec<(u64, BigRational)> = inv
        .x_c
        .iter()
        .map(|&(c, x)| {
            let phi = euler_phi(num_integer::gcd(c, level / c)) as i64;
            let f = frac(&BigRational::new(BigInt::from(x), BigInt::from(24)));
            (
                c,
                rat(phi) * (BigRational::new(BigInt::from(1), BigInt::from(2)) - f),
            )
        })
        .collect();
    let applicable = inv.k > threshold(e);
    let dim = applicable.then(|| {
        let cusp_sum: BigRational = cusp_terms.iter().map(|(_, t)| t.clone()).sum();
        (&inv.k - BigRational::one()) / rat(12) * rat(m as i64)
            + rat(e2) / rat(4)
            + rat(e3) / rat(3)
            + cusp_sum
    });
    DimensionData {
        index_m: m,
        eps2: e2,
        eps3: e3,
        cusp_terms,
        applicable,
        dim,
    }
}

/// The dimension of the ambient space, when the formula applies.
pub fn dim(e: &EtaQuotient) -> Result<BigRational> {
    analyze(e).dim.ok_or(Error::FormulaNotApplicable)
}
