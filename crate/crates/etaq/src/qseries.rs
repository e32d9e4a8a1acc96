//! Exact truncated q-series arithmetic and eta-quotient expansion.
//!
//! A [`QSeries`] is a dense vector of arbitrary-precision integer
//! coefficients attached to the exponent lattice `offset + Z≥0`, where the
//! offset is a rational with denominator dividing 24. The expansions computed
//! here are the ground truth against which every closed coefficient formula
//! in the crate is checked, so everything is exact: no modular shortcuts, no
//! floating point.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::etaquotient::EtaQuotient;
use crate::{Error, Result};

/// A truncated formal power series `Σ_j coeffs[j]·q^(offset + j)` whose
/// coefficients are correct for all exponents below `offset + precision`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    offset: BigRational,
    coeffs: Vec<BigInt>,
}

/// Wire form of a [`QSeries`]: coefficients as decimal strings so that
/// arbitrary-precision values survive JSON integer limits.
#[derive(Serialize, Deserialize)]
struct QSeriesJson {
    offset_num: i64,
    offset_den: i64,
    precision: usize,
    coeffs: Vec<String>,
}

impl QSeries {
    /// Builds a series from an offset in `(1/24)Z` and a nonempty dense
    /// coefficient vector (whose length is the precision).
    pub fn new(offset: BigRational, coeffs: Vec<BigInt>) -> Result<Self> {
        if !(BigRational::from(BigInt::from(24)) * &offset).is_integer() {
            return Err(Error::OffsetDenominator(Box::new(offset)));
        }
        assert!(!coeffs.is_empty(), "a series needs precision at least 1");
        Ok(Self { offset, coeffs })
    }

    /// The constant series 1 with integer offset 0.
    pub fn one(precision: usize) -> Self {
        assert!(precision >= 1);
        let mut coeffs = vec![BigInt::zero(); precision];
        coeffs[0] = BigInt::one();
        Self {
            offset: BigRational::zero(),
            coeffs,
        }
    }

    pub fn offset(&self) -> &BigRational {
        &self.offset
    }

    /// Number of stored coefficients; exponents `offset + j` for
    /// `0 <= j < precision` are trustworthy.
    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `q^n`. Exponents off the lattice `offset + Z` are
    /// certain zeros regardless of precision; on-lattice exponents below the
    /// offset are zeros; on-lattice exponents at or beyond
    /// `offset + precision` are unknown and reported as an error.
    pub fn coefficient(&self, n: &BigRational) -> Result<BigInt> {
        let rel = n - &self.offset;
        if !rel.is_integer() {
            return Ok(BigInt::zero());
        }
        let j = rel.to_integer();
        if j.is_negative() {
            return Ok(BigInt::zero());
        }
        match usize::try_from(&j).ok().filter(|&j| j < self.coeffs.len()) {
            Some(j) => Ok(self.coeffs[j].clone()),
            None => Err(Error::InsufficientPrecision {
                exponent: Box::new(n.clone()),
                limit: Box::new(&self.offset + BigRational::from(BigInt::from(self.coeffs.len()))),
            }),
        }
    }

    /// Convenience lookup at an integer exponent.
    pub fn coefficient_at(&self, n: i64) -> Result<BigInt> {
        self.coefficient(&BigRational::from(BigInt::from(n)))
    }

    /// Product of two series: offsets add, precision is the minimum of the
    /// two, coefficients are the exact convolution.
    pub fn multiply(&self, other: &QSeries) -> Result<QSeries> {
        let offset = &self.offset + &other.offset;
        let prec = self.coeffs.len().min(other.coeffs.len());
        let mut coeffs = vec![BigInt::zero(); prec];
        for (i, a) in self.coeffs.iter().take(prec).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (b, c) in other.coeffs[..prec - i].iter().zip(coeffs[i..].iter_mut()) {
                if !b.is_zero() {
                    *c += a * b;
                }
            }
        }
        QSeries::new(offset, coeffs)
    }

    /// JSON wire form: `{offset_num, offset_den, precision, coeffs}` with
    /// stringified coefficients.
    pub fn to_json(&self) -> serde_json::Value {
        let dto = QSeriesJson {
            offset_num: i64::try_from(self.offset.numer()).expect("offset numerator fits i64"),
            offset_den: i64::try_from(self.offset.denom()).expect("offset denominator fits i64"),
            precision: self.coeffs.len(),
            coeffs: self.coeffs.iter().map(|c| c.to_string()).collect(),
        };
        serde_json::to_value(dto).expect("series serializes")
    }

    /// Parses the JSON wire form back into a series.
    pub fn from_json(value: &serde_json::Value) -> Result<QSeries> {
        let dto: QSeriesJson = serde_json::from_value(value.clone())
            .map_err(|e| Error::BadSeriesJson(e.to_string()))?;
        if dto.offset_den == 0 {
            return Err(Error::BadSeriesJson("offset_den must be nonzero".into()));
        }
        if dto.precision != dto.coeffs.len() {
            return Err(Error::BadSeriesJson(format!(
                "precision {} does not match {} coefficients",
                dto.precision,
                dto.coeffs.len()
            )));
        }
        let coeffs = dto
            .coeffs
            .iter()
            .map(|s| {
                s.parse::<BigInt>()
                    .map_err(|e| Error::BadSeriesJson(e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        QSeries::new(
            BigRational::new(BigInt::from(dto.offset_num), BigInt::from(dto.offset_den)),
            coeffs,
        )
    }
}

/// Sparse polynomial `(1-x^t)^r` truncated below `prec`, as `(exponent,
/// coefficient)` pairs. Negative `r` uses the binomial series
/// `(1-x)^{-s} = Σ_j C(s-1+j, j) x^j`.
fn single_factor(t: usize, r: i64, prec: usize) -> Vec<(usize, BigInt)> {
    let mut terms = vec![(0usize, BigInt::one())];
    let mut c = BigInt::one();
    if r >= 0 {
        let r = r as u64;
        let mut j = 0u64;
        while j < r && (j as usize + 1) * t < prec {
            // C(r, j+1) = C(r, j) * (r - j) / (j + 1), alternating sign
            c = c * BigInt::from(r - j) / BigInt::from(j + 1);
            j += 1;
            let signed = if j % 2 == 1 { -c.clone() } else { c.clone() };
            terms.push((j as usize * t, signed));
        }
    } else {
        let s = r.unsigned_abs();
        let mut j = 0u64;
        while (j as usize + 1) * t < prec {
            // C(s-1+j+1, j+1) = C(s-1+j, j) * (s + j) / (j + 1)
            c = c * BigInt::from(s + j) / BigInt::from(j + 1);
            j += 1;
            terms.push((j as usize * t, c.clone()));
        }
    }
    terms
}

/// Multiplies `dense` in place by a sparse polynomial whose constant term is
/// 1, highest indices first so lower ones are still unmodified when read.
fn mul_sparse_in_place(dense: &mut [BigInt], sparse: &[(usize, BigInt)]) {
    debug_assert!(sparse[0] == (0, BigInt::one()));
    for i in (0..dense.len()).rev() {
        let mut acc = dense[i].clone();
        for (e, c) in &sparse[1..] {
            if *e > i {
                break;
            }
            if !dense[i - e].is_zero() {
                acc += c * &dense[i - e];
            }
        }
        dense[i] = acc;
    }
}

/// Truncation below `prec` of the full product `Π_{m≥1} (1-q^{nm})^r`,
/// multiplied out factor by factor. Offset 0.
pub fn binomial_factor(n: u64, r: i64, prec: usize) -> QSeries {
    assert!(n >= 1, "binomial_factor requires n >= 1");
    assert!(prec >= 1, "binomial_factor requires precision >= 1");
    let mut dense = vec![BigInt::zero(); prec];
    dense[0] = BigInt::one();
    if r != 0 {
        let mut m = 1usize;
        while m * (n as usize) < prec {
            let terms = single_factor(m * n as usize, r, prec);
            mul_sparse_in_place(&mut dense, &terms);
            m += 1;
        }
    }
    QSeries {
        offset: BigRational::zero(),
        coeffs: dense,
    }
}

/// Table of `σ₁(w)` for `1 <= w < bound` (index 0 unused).
fn sigma1_table(bound: usize) -> Vec<i64> {
    let mut sigma = vec![0i64; bound.max(1)];
    for d in 1..bound {
        for m in (d..bound).step_by(d) {
            sigma[m] += d as i64;
        }
    }
    sigma
}

/// Expansion of the eta-quotient attached to `(N, r)`: the coefficients of
/// `Π_{n|N} Π_{m≥1} (1-q^{nm})^{r_n}` below `q^prec`, carried at offset
/// `x_N/24`.
///
/// Internally this integrates the logarithmic derivative
/// `q·f'/f = -Σ_{n|N} r_n·n·Σ_w σ₁(w)·q^{nw}`, which yields the coefficient
/// recurrence `j·f_j = Σ_i L_i·f_{j-i}` with machine-sized `L_i`. Every
/// division is exact; the result is identical to multiplying out the factors
/// but avoids the huge intermediate coefficients of the negative-exponent
/// factor series.
pub fn eta_quotient_expansion(e: &EtaQuotient, prec: usize) -> QSeries {
    assert!(prec >= 1, "eta_quotient_expansion requires precision >= 1");
    let inv = e.derive();
    let offset = BigRational::new(BigInt::from(inv.x_n), BigInt::from(24));

    let sigma = sigma1_table(prec);
    let mut log_deriv = vec![0i64; prec];
    for (&n, &r) in e.divisors().iter().zip(e.exponents()) {
        if r == 0 {
            continue;
        }
        let n = n as usize;
        let mut j = n;
        let mut w = 1usize;
        while j < prec {
            let contrib = -(r as i128) * (n as i128) * (sigma[w] as i128);
            log_deriv[j] = i64::try_from(log_deriv[j] as i128 + contrib)
                .expect("log-derivative coefficient fits i64");
            j += n;
            w += 1;
        }
    }

    let mut coeffs = vec![BigInt::zero(); prec];
    coeffs[0] = BigInt::one();
    for j in 1..prec {
        let mut acc = BigInt::zero();
        for i in 1..=j {
            if log_deriv[i] != 0 && !coeffs[j - i].is_zero() {
                acc += &coeffs[j - i] * log_deriv[i];
            }
        }
        let (q, rem) = acc.div_rem(&BigInt::from(j));
        debug_assert!(rem.is_zero(), "non-integral coefficient at q^{j}");
        coeffs[j] = q;
    }

    QSeries { offset, coeffs }
}
