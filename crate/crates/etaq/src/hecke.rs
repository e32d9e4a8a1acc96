//! The closed divisor-sum formula for catalogued eta-quotient coefficients,
//! the fourth-root factor ψ, and the coefficient action of the extended
//! Hecke operators: an exact simplified form, an exact special form under a
//! radical condition, a recursive evaluation used for cross-checking, and a
//! floating-point evaluation of the unsimplified double sum kept purely as a
//! redundancy oracle.
//!
//! Scale convention: the operator's coefficient carries a factor `l^{1-k/2}`
//! that is irrational for odd weights, so every exact routine here returns
//! the rescaled quantity `l^{k/2-1}·c_{T_l f}(n)`, which is always
//! Gaussian-rational. [`transform_general`] returns the `l^{k/2}`-scaled
//! double sum, i.e. `l` times the value of the exact routines.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::etaquotient::{DerivedInvariants, EtaQuotient};
use crate::numtheory::{divisors, kronecker, moebius, rad_common};
use crate::qseries::QSeries;
use crate::{Error, Result};

/// A fourth root of unity `i^t`, stored as the exponent mod 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FourthRoot(u8);

impl FourthRoot {
    pub const ONE: FourthRoot = FourthRoot(0);
    pub const I: FourthRoot = FourthRoot(1);
    pub const MINUS_ONE: FourthRoot = FourthRoot(2);
    pub const MINUS_I: FourthRoot = FourthRoot(3);

    /// `i^t` for any integer exponent.
    pub fn from_exponent(t: i64) -> Self {
        FourthRoot(t.rem_euclid(4) as u8)
    }

    pub fn quarter_turns(self) -> u8 {
        self.0
    }

    pub fn inv(self) -> FourthRoot {
        FourthRoot((4 - self.0) % 4)
    }

    /// `+1` or `-1` when the value is real, `None` for `±i`.
    pub fn real_sign(self) -> Option<i32> {
        match self.0 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn to_gaussian(self) -> GaussianRational {
        let one = BigRational::one();
        match self.0 {
            0 => GaussianRational {
                re: one,
                im: BigRational::zero(),
            },
            1 => GaussianRational {
                re: BigRational::zero(),
                im: one,
            },
            2 => GaussianRational {
                re: -one,
                im: BigRational::zero(),
            },
            _ => GaussianRational {
                re: BigRational::zero(),
                im: -one,
            },
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl std::ops::Mul for FourthRoot {
    type Output = FourthRoot;

    fn mul(self, other: FourthRoot) -> FourthRoot {
        FourthRoot((self.0 + other.0) % 4)
    }
}

/// An exact Gaussian rational `re + im·i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn zero() -> Self {
        Self {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn from_rational(re: BigRational) -> Self {
        Self {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn from_int(n: &BigInt) -> Self {
        Self::from_rational(BigRational::from(n.clone()))
    }

    pub fn scale(&self, factor: &BigRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * factor,
            im: &self.im * factor,
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().expect("finite rational"),
            self.im.to_f64().expect("finite rational"),
        )
    }

    /// The value as an ordinary integer, when it is one.
    pub fn as_integer(&self) -> Option<BigInt> {
        if self.is_real() && self.re.is_integer() {
            Some(self.re.to_integer())
        } else {
            None
        }
    }
}

impl std::ops::AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, other: &GaussianRational) {
        self.re += &other.re;
        self.im += &other.im;
    }
}

impl std::ops::Add for &GaussianRational {
    type Output = GaussianRational;

    fn add(self, other: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re + &other.re,
            im: &self.im + &other.im,
        }
    }
}

impl std::ops::Sub for &GaussianRational {
    type Output = GaussianRational;

    fn sub(self, other: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re - &other.re,
            im: &self.im - &other.im,
        }
    }
}

impl std::ops::Mul for &GaussianRational {
    type Output = GaussianRational;

    fn mul(self, other: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * &other.re - &self.im * &other.im,
            im: &self.re * &other.im + &self.im * &other.re,
        }
    }
}

impl std::ops::Neg for &GaussianRational {
    type Output = GaussianRational;

    fn neg(self) -> GaussianRational {
        GaussianRational {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

impl std::fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}*i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{} - {}*i", self.re, -&self.im)
        } else {
            write!(f, "{} + {}*i", self.re, self.im)
        }
    }
}

/// Where an eta-quotient handed to the closed formula comes from. The closed
/// formula is established only for rows of the embedded catalog; anything
/// else must be opted into explicitly and is the caller's responsibility.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trust {
    /// The quotient is a row of the embedded catalog.
    CatalogRow,
    /// Explicit opt-in for a quotient not known to be catalogued.
    Unverified,
}

/// An eta-quotient paired with a transform index `l ≡ 1 (mod m_r)` and its
/// precomputed invariants. Only integral weights are admitted.
#[derive(Clone, Debug)]
pub struct HeckeContext<'a> {
    entry: &'a EtaQuotient,
    inv: DerivedInvariants,
    l: u64,
    k: i64,
    trust: Trust,
}

impl<'a> HeckeContext<'a> {
    /// Context for a quotient the caller has checked against the catalog.
    pub fn for_catalog(entry: &'a EtaQuotient, l: u64) -> Result<Self> {
        Self::build(entry, l, Trust::CatalogRow)
    }

    /// Context for an arbitrary quotient; the closed formula is then used at
    /// the caller's risk.
    pub fn unverified(entry: &'a EtaQuotient, l: u64) -> Result<Self> {
        Self::build(entry, l, Trust::Unverified)
    }

    fn build(entry: &'a EtaQuotient, l: u64, trust: Trust) -> Result<Self> {
        let inv = entry.derive();
        let k = inv.integral_k().ok_or(Error::HalfIntegralWeight)?;
        if l == 0 || l % inv.m_r != 1 % inv.m_r {
            return Err(Error::NonAdmissibleIndex { l, m_r: inv.m_r });
        }
        Ok(Self {
            entry,
            inv,
            l,
            k,
            trust,
        })
    }

    pub fn entry(&self) -> &EtaQuotient {
        self.entry
    }

    pub fn invariants(&self) -> &DerivedInvariants {
        &self.inv
    }

    pub fn index(&self) -> u64 {
        self.l
    }

    pub fn weight(&self) -> i64 {
        self.k
    }

    pub fn trust(&self) -> Trust {
        self.trust
    }

    fn level(&self) -> u64 {
        self.entry.level()
    }

    fn k_plus_delta(&self) -> i64 {
        self.k + self.inv.delta as i64
    }
}

/// `a^e` as an exact rational, for any integer `e`.
fn rational_power(a: u64, e: i64) -> BigRational {
    let p = BigInt::from(a).pow(u32::try_from(e.unsigned_abs()).expect("exponent fits u32"));
    if e >= 0 {
        BigRational::from(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// The sign `ε_{l,a} ∈ {±1}` of the closed formula: 1 when the index is even
/// and the level odd, `(-1)^{(k+δ)(a-1)/2}` otherwise. Requires
/// `gcd(a, N) = 1`.
pub fn epsilon_la(ctx: &HeckeContext, a: u64) -> Result<i32> {
    let level = ctx.level();
    if num_integer::gcd(a, level) != 1 {
        return Err(Error::NotCoprime { a, level });
    }
    if ctx.l.is_multiple_of(2) && level % 2 == 1 {
        return Ok(1);
    }
    let t = ctx.k_plus_delta() as i128 * (a as i128 - 1);
    assert!(
        t % 2 == 0,
        "epsilon exponent must be even; is a a divisor of l?"
    );
    Ok(if (t / 2).rem_euclid(2) == 0 { 1 } else { -1 })
}

/// The fourth-root factor `ψ_{l,r}(a, b)` of the transform, for `a | l`
/// coprime to the level. The half-integral-weight branch that could flip the
/// auxiliary `δ₁` is out of scope here (contexts only admit integral
/// weights), so `δ₁ = 0` throughout.
pub fn psi(ctx: &HeckeContext, a: u64, b: i64) -> FourthRoot {
    assert!(a >= 1 && ctx.l.is_multiple_of(a), "psi requires a | l");
    assert!(
        num_integer::gcd(a, ctx.level()) == 1,
        "psi requires gcd(a, N) = 1"
    );
    let kd = ctx.k_plus_delta() as i128;
    let level = ctx.level() as i128;
    let l = ctx.l as i128;
    let t: i128 = if ctx.l % 2 == 1 {
        let d = l / a as i128;
        -kd * (d - 1) + kd * (l - 1) * (level - 1)
    } else if ctx.level().is_multiple_of(2) {
        -kd * (a as i128 - 1) - level * kd * (b as i128)
    } else {
        0
    };
    FourthRoot::from_exponent(i64::try_from(t.rem_euclid(4)).unwrap())
}

/// `ψ_l(a,1) / ψ_l(1,1)`, the normalized fourth-root ratio.
fn psi_ratio(ctx: &HeckeContext, a: u64) -> FourthRoot {
    psi(ctx, a, 1) * psi(ctx, 1, 1).inv()
}

/// The closed formula for the coefficient at the context index:
/// `c_f(l) = -r_1 · Σ_{a|l, gcd(a,N)=1} (a/Π) a^{k-1} ε_{l,a}`.
///
/// Established only for catalog rows; see [`Trust`]. Requires weight ≥ 1.
pub fn closed_coefficient(ctx: &HeckeContext) -> Result<BigInt> {
    if ctx.k < 1 {
        return Err(Error::WeightTooSmall { k: ctx.k });
    }
    let level = ctx.level();
    let r1 = ctx.entry.exponent(1);
    let mut sum = BigInt::zero();
    for a in divisors(ctx.l) {
        if num_integer::gcd(a, level) != 1 {
            continue;
        }
        let kr = kronecker(&BigInt::from(a), &ctx.inv.pi);
        debug_assert_eq!(
            kr,
            kronecker(&BigInt::from(a), &ctx.inv.pi_sf),
            "symbol against the auxiliary product must match its squarefree part"
        );
        if kr == 0 {
            continue;
        }
        let eps = epsilon_la(ctx, a)?;
        let pow = BigInt::from(a).pow(u32::try_from(ctx.k - 1).expect("weight fits u32"));
        sum += BigInt::from(kr * eps) * pow;
    }
    Ok(BigInt::from(-r1) * sum)
}

/// Inner Möbius sum `Σ_{t | gcd(a,d), (a/t) | w} μ(t)/t`.
fn moebius_sum(a: u64, d: u64, w: &BigInt) -> BigRational {
    let g = num_integer::gcd(a, d);
    let mut acc = BigRational::zero();
    for t in divisors(g) {
        let mu = moebius(t);
        if mu == 0 {
            continue;
        }
        if w.is_multiple_of(&BigInt::from(a / t)) {
            acc += BigRational::new(BigInt::from(mu), BigInt::from(t));
        }
    }
    acc
}

/// Checks `n` lies on the exponent lattice and returns the integer
/// `w = n - l·x_N/24`.
fn lattice_point(ctx: &HeckeContext, n: &BigRational) -> Result<BigInt> {
    let offset = BigRational::new(BigInt::from(ctx.inv.x_n), BigInt::from(24));
    if !(n - &offset).is_integer() {
        return Err(Error::OffLattice {
            n: Box::new(n.clone()),
            offset: Box::new(offset),
        });
    }
    let w = n - BigRational::from(BigInt::from(ctx.l)) * &offset;
    assert!(
        w.is_integer(),
        "admissible indices keep n - l*x_N/24 integral"
    );
    Ok(w.to_integer())
}

/// The simplified exact transform value `l^{k/2-1}·c_{T_l f}(n)`:
///
/// `Σ_{a|l, gcd(a,N)=1, d=l/a} (a/Π) a^{k-1} ψ_l(a,1) c_f(ln/a²)
///   Σ_{t|(a,d), (a/t)|n-l·x_N/24} μ(t)/t`.
///
/// Off-lattice arguments `ln/a²` contribute zero; on-lattice arguments
/// beyond the precision of `cf` are an error, not a zero.
pub fn scaled_transform_simplified(
    ctx: &HeckeContext,
    n: &BigRational,
    cf: &QSeries,
) -> Result<GaussianRational> {
    if ctx.l.is_multiple_of(2) && !ctx.entry.condition7_holds(true) {
        return Err(Error::Condition7Violated {
            l: ctx.l,
            level: ctx.level(),
        });
    }
    let w = lattice_point(ctx, n)?;
    let level = ctx.level();
    let l_rat = BigRational::from(BigInt::from(ctx.l));
    let mut acc = GaussianRational::zero();
    for a in divisors(ctx.l) {
        if num_integer::gcd(a, level) != 1 {
            continue;
        }
        let d = ctx.l / a;
        let kr = kronecker(&BigInt::from(a), &ctx.inv.pi);
        if kr == 0 {
            continue;
        }
        let exponent = &l_rat * n / rational_power(a, 2);
        let coeff = cf.coefficient(&exponent)?;
        if coeff.is_zero() {
            continue;
        }
        let msum = moebius_sum(a, d, &w);
        if msum.is_zero() {
            continue;
        }
        let factor = BigRational::from(BigInt::from(kr))
            * rational_power(a, ctx.k - 1)
            * BigRational::from(coeff)
            * msum;
        acc += &psi(ctx, a, 1).to_gaussian().scale(&factor);
    }
    Ok(acc)
}

/// The special form of the transform under the radical condition
/// `rad(n - l·x_N/24, l) | N`:
///
/// `l^{k/2-1}·c_{T_l f}(n) = Σ_{a²|l, gcd(a,N)=1} (a/Π) μ(a) a^{k-2}
///   ψ_l(a,1) c_f(ln/a²)`.
///
/// Agrees exactly with [`scaled_transform_simplified`] wherever both apply.
pub fn scaled_transform_special(
    ctx: &HeckeContext,
    n: &BigRational,
    cf: &QSeries,
) -> Result<GaussianRational> {
    if ctx.l.is_multiple_of(2) && !ctx.entry.condition7_holds(true) {
        return Err(Error::Condition7Violated {
            l: ctx.l,
            level: ctx.level(),
        });
    }
    let w = lattice_point(ctx, n)?;
    let level = ctx.level();
    let rad = rad_common(&w, &BigInt::from(ctx.l));
    if !BigInt::from(level).is_multiple_of(&rad) {
        return Err(Error::RadConditionViolated {
            w: Box::new(w),
            l: ctx.l,
            level,
        });
    }
    let l_rat = BigRational::from(BigInt::from(ctx.l));
    let mut acc = GaussianRational::zero();
    let mut a = 1u64;
    while a * a <= ctx.l {
        if ctx.l.is_multiple_of(a * a) && num_integer::gcd(a, level) == 1 {
            let mu = moebius(a);
            if mu != 0 {
                let kr = kronecker(&BigInt::from(a), &ctx.inv.pi);
                if kr != 0 {
                    let exponent = &l_rat * n / rational_power(a, 2);
                    let coeff = cf.coefficient(&exponent)?;
                    if !coeff.is_zero() {
                        let factor = BigRational::from(BigInt::from(kr * mu))
                            * rational_power(a, ctx.k - 2)
                            * BigRational::from(coeff);
                        acc += &psi(ctx, a, 1).to_gaussian().scale(&factor);
                    }
                }
            }
        }
        a += 1;
    }
    Ok(acc)
}

/// Floating-point evaluation of the unsimplified double sum, scaled by
/// `l^{k/2}` (so it equals `l` times the exact routines). Kept as a
/// redundancy oracle only; requires weight ≥ 1 so that the even symbol power
/// sends 0 to 0 and ±1 to 1.
pub fn transform_general(ctx: &HeckeContext, n: &BigRational, cf: &QSeries) -> Result<Complex64> {
    if ctx.k < 1 {
        return Err(Error::WeightTooSmall { k: ctx.k });
    }
    let w = lattice_point(ctx, n)?;
    let level = ctx.level();
    let l_rat = BigRational::from(BigInt::from(ctx.l));
    let mut acc = Complex64::new(0.0, 0.0);
    for a in divisors(ctx.l) {
        if num_integer::gcd(a, level) != 1 {
            continue;
        }
        let d = ctx.l / a;
        let kr = kronecker(&BigInt::from(a), &ctx.inv.pi);
        if kr == 0 {
            continue;
        }
        let exponent = &l_rat * n / rational_power(a, 2);
        let coeff = cf.coefficient(&exponent)?;
        if coeff.is_zero() {
            continue;
        }
        let g_ad = num_integer::gcd(a, d);
        let mut inner = Complex64::new(0.0, 0.0);
        for b in 0..d {
            if num_integer::gcd(num_integer::gcd(a, b), d) != 1 {
                continue;
            }
            // (-Nb / (a,d))^{2k}: zero kills the term, any unit contributes 1.
            let sym = kronecker(
                &BigInt::from(-(level as i64) * b as i64),
                &BigInt::from(g_ad),
            );
            if sym == 0 {
                continue;
            }
            // e(b·d·(n/l - x_N/24)) = e(b·d·w/l), reduced mod l for accuracy
            let phase_num = (b as i128 * d as i128).rem_euclid(ctx.l as i128)
                * (w.mod_floor(&BigInt::from(ctx.l)))
                    .to_i128()
                    .expect("residue fits i128");
            let angle =
                std::f64::consts::TAU * (phase_num.rem_euclid(ctx.l as i128) as f64) / ctx.l as f64;
            let e = Complex64::new(angle.cos(), angle.sin());
            inner += e * psi(ctx, a, b as i64).to_complex();
        }
        let scale = kr as f64
            * (a as f64).powi(i32::try_from(ctx.k).expect("weight fits i32"))
            * coeff.to_f64().expect("coefficient fits f64 range");
        acc += scale * inner;
    }
    Ok(acc)
}

/// Evaluates the coefficient recursion obtained from the transform's
/// eigenvalue relation: the closed formula's first sum plus correction terms
/// over `a² | l`, recursing into strictly smaller indices. Must agree with
/// [`closed_coefficient`] everywhere; the two follow different algebraic
/// routes.
pub fn closed_coefficient_recursive(ctx: &HeckeContext) -> Result<BigInt> {
    let mut memo: HashMap<u64, BigInt> = HashMap::new();
    recursive_value(ctx.entry, ctx.trust, ctx.l, &mut memo)
}

fn recursive_value(
    entry: &EtaQuotient,
    trust: Trust,
    l: u64,
    memo: &mut HashMap<u64, BigInt>,
) -> Result<BigInt> {
    if let Some(v) = memo.get(&l) {
        return Ok(v.clone());
    }
    let ctx = HeckeContext::build(entry, l, trust)?;
    if ctx.k < 1 {
        return Err(Error::WeightTooSmall { k: ctx.k });
    }
    let level = entry.level();
    let r1 = entry.exponent(1);

    // First sum: divisor terms weighted by the Möbius sum over t | (a, l/a).
    let mut first = GaussianRational::zero();
    for a in divisors(l) {
        if num_integer::gcd(a, level) != 1 {
            continue;
        }
        let kr = kronecker(&BigInt::from(a), &ctx.inv.pi);
        if kr == 0 {
            continue;
        }
        let d = l / a;
        let g = num_integer::gcd(a, d);
        let mut msum = BigRational::zero();
        for t in divisors(g) {
            let mu = moebius(t);
            if mu != 0 {
                msum += BigRational::new(BigInt::from(mu), BigInt::from(t));
            }
        }
        if msum.is_zero() {
            continue;
        }
        let factor = BigRational::from(BigInt::from(kr)) * rational_power(a, ctx.k - 1) * msum;
        first += &psi_ratio(&ctx, a).to_gaussian().scale(&factor);
    }

    // Correction sum over a² | l with a > 1, recursing into l/a².
    let mut second = GaussianRational::zero();
    let mut a = 2u64;
    while a * a <= l {
        if l.is_multiple_of(a * a) && num_integer::gcd(a, level) == 1 {
            let mu = moebius(a);
            if mu != 0 {
                let kr = kronecker(&BigInt::from(a), &ctx.inv.pi);
                if kr != 0 {
                    let smaller = l / (a * a);
                    debug_assert!(
                        smaller % ctx.inv.m_r == 1 % ctx.inv.m_r,
                        "recursive index stays admissible"
                    );
                    let tail = recursive_value(entry, trust, smaller, memo)?;
                    let factor = BigRational::from(BigInt::from(kr * mu))
                        * rational_power(a, ctx.k - 2)
                        * BigRational::from(tail);
                    second += &psi_ratio(&ctx, a).to_gaussian().scale(&factor);
                }
            }
        }
        a += 1;
    }

    let minus_r1 = BigRational::from(BigInt::from(-r1));
    let total = &first.scale(&minus_r1) - &second;
    let value = total
        .as_integer()
        .expect("recursion evaluates to a rational integer");
    memo.insert(l, value.clone());
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::eta_quotient_expansion;

    fn eq(level: u64, exps: &[i64]) -> EtaQuotient {
        EtaQuotient::new(level, exps.to_vec()).unwrap()
    }

    fn rat(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    #[test]
    fn fourth_root_arithmetic() {
        assert_eq!(FourthRoot::I * FourthRoot::I, FourthRoot::MINUS_ONE);
        assert_eq!(FourthRoot::from_exponent(-1), FourthRoot::MINUS_I);
        assert_eq!(FourthRoot::MINUS_I.inv(), FourthRoot::I);
        assert_eq!(FourthRoot::ONE.real_sign(), Some(1));
        assert_eq!(FourthRoot::MINUS_ONE.real_sign(), Some(-1));
        assert_eq!(FourthRoot::I.real_sign(), None);
        for t in -9i64..9 {
            let r = FourthRoot::from_exponent(t);
            assert_eq!(r * r.inv(), FourthRoot::ONE);
        }
    }

    #[test]
    fn context_rejects_bad_indices() {
        let e = eq(3, &[3, -1]); // m_r = 3
        assert!(HeckeContext::for_catalog(&e, 4).is_ok());
        assert!(matches!(
            HeckeContext::for_catalog(&e, 5),
            Err(Error::NonAdmissibleIndex { l: 5, m_r: 3 })
        ));
        assert!(HeckeContext::for_catalog(&e, 0).is_err());
        let half = eq(1, &[1]);
        assert!(matches!(
            HeckeContext::unverified(&half, 1),
            Err(Error::HalfIntegralWeight)
        ));
    }

    #[test]
    fn epsilon_values() {
        let e4 = eq(4, &[-4, 10, -4]);
        let ctx = HeckeContext::for_catalog(&e4, 5).unwrap();
        assert_eq!(epsilon_la(&ctx, 1).unwrap(), 1);
        assert_eq!(epsilon_la(&ctx, 3).unwrap(), -1); // k+delta = 1, (a-1)/2 = 1
        assert!(matches!(
            epsilon_la(&ctx, 2),
            Err(Error::NotCoprime { a: 2, level: 4 })
        ));

        let e3 = eq(3, &[3, -1]);
        let ctx = HeckeContext::for_catalog(&e3, 4).unwrap();
        assert_eq!(epsilon_la(&ctx, 2).unwrap(), 1); // even l, odd N
    }

    #[test]
    fn psi_values() {
        let e3 = eq(3, &[3, -1]);
        let ctx = HeckeContext::for_catalog(&e3, 1).unwrap();
        assert_eq!(psi(&ctx, 1, 0), FourthRoot::ONE);

        let ctx = HeckeContext::for_catalog(&e3, 7).unwrap();
        // k+delta = 2, d = 7: -2*6 + 2*6*2 = 12 = 0 (mod 4)
        assert_eq!(psi(&ctx, 1, 1), FourthRoot::ONE);

        let e4 = eq(4, &[-4, 10, -4]);
        let ctx = HeckeContext::for_catalog(&e4, 2).unwrap();
        assert_eq!(psi(&ctx, 1, 0), FourthRoot::ONE);
    }

    #[test]
    fn epsilon_is_psi_ratio() {
        for (level, exps) in [
            (3u64, vec![3i64, -1]),
            (4, vec![-4, 10, -4]),
            (2, vec![4, -2]),
            (9, vec![0, 6, -2]),
        ] {
            let e = eq(level, &exps);
            let m_r = e.derive().m_r;
            for l in (1..=60u64).filter(|l| l % m_r == 1 % m_r) {
                let ctx = HeckeContext::for_catalog(&e, l).unwrap();
                for a in divisors(l) {
                    if num_integer::gcd(a, level) != 1 {
                        continue;
                    }
                    let ratio = psi_ratio(&ctx, a)
                        .real_sign()
                        .expect("ratio is real for integral weight");
                    assert_eq!(ratio, epsilon_la(&ctx, a).unwrap(), "N={level} l={l} a={a}");
                }
            }
        }
    }

    #[test]
    fn closed_coefficient_values() {
        let e3 = eq(3, &[3, -1]);
        let ctx = HeckeContext::for_catalog(&e3, 4).unwrap();
        assert_eq!(closed_coefficient(&ctx).unwrap(), BigInt::from(-3));

        let e4 = eq(4, &[-4, 10, -4]);
        let ctx = HeckeContext::for_catalog(&e4, 9).unwrap();
        assert_eq!(closed_coefficient(&ctx).unwrap(), BigInt::from(4));

        let e10 = eq(10, &[2, -1, 2, -1]);
        let ctx = HeckeContext::for_catalog(&e10, 1).unwrap();
        assert_eq!(closed_coefficient(&ctx).unwrap(), BigInt::from(-2));
    }

    #[test]
    fn closed_coefficient_matches_series_spot_checks() {
        for (level, exps) in [
            (3u64, vec![3i64, -1]),
            (2, vec![4, -2]),
            (4, vec![-4, 10, -4]),
        ] {
            let e = eq(level, &exps);
            let m_r = e.derive().m_r;
            let f = eta_quotient_expansion(&e, 200);
            for l in (1..200u64).filter(|l| l % m_r == 1 % m_r) {
                let ctx = HeckeContext::for_catalog(&e, l).unwrap();
                assert_eq!(
                    closed_coefficient(&ctx).unwrap(),
                    f.coefficient_at(l as i64).unwrap(),
                    "N={level} l={l}"
                );
            }
        }
    }

    #[test]
    fn simplified_transform_at_index_one_is_identity() {
        let e = eq(3, &[3, -1]);
        let f = eta_quotient_expansion(&e, 60);
        let ctx = HeckeContext::for_catalog(&e, 1).unwrap();
        for n in 0..50i64 {
            let s = scaled_transform_simplified(&ctx, &rat(n), &f).unwrap();
            assert_eq!(s, GaussianRational::from_int(&f.coefficient_at(n).unwrap()));
        }
    }

    #[test]
    fn simplified_transform_eigen_spot_check() {
        let e = eq(3, &[3, -1]);
        let f = eta_quotient_expansion(&e, 60);
        let ctx = HeckeContext::for_catalog(&e, 4).unwrap();
        let s0 = scaled_transform_simplified(&ctx, &rat(0), &f).unwrap();
        let s1 = scaled_transform_simplified(&ctx, &rat(1), &f).unwrap();
        // c_f(1) = -3
        assert_eq!(s1, s0.scale(&rat(-3)));
    }

    #[test]
    fn special_matches_simplified_where_applicable() {
        let e = eq(2, &[4, -2]);
        let f = eta_quotient_expansion(&e, 120);
        let ctx = HeckeContext::for_catalog(&e, 9).unwrap();
        // n = 0: rad(0 - 0, 9) = 3 does not divide 2 -> rejected
        assert!(matches!(
            scaled_transform_special(&ctx, &rat(0), &f),
            Err(Error::RadConditionViolated { .. })
        ));
        // n = 3: w = 3, rad(3, 9) = 3 still does not divide 2
        // n = 1: w = 1, rad(1, 9) = 1 divides 2
        let special = scaled_transform_special(&ctx, &rat(1), &f).unwrap();
        let simplified = scaled_transform_simplified(&ctx, &rat(1), &f).unwrap();
        assert_eq!(special, simplified);
    }

    #[test]
    fn special_form_reduces_to_single_term_for_squarefree_indices() {
        // a² | l forces a = 1, so the sum collapses to ψ_l(1,1)·c_f(ln)
        let e = eq(2, &[4, -2]);
        let f = eta_quotient_expansion(&e, 500);
        for l in [5u64, 13, 21, 33] {
            let ctx = HeckeContext::for_catalog(&e, l).unwrap();
            for n in 1..=8i64 {
                if num_integer::gcd(n.unsigned_abs(), l) != 1 {
                    continue; // keep rad(n, l) = 1
                }
                let got = scaled_transform_special(&ctx, &rat(n), &f).unwrap();
                let expect = psi(&ctx, 1, 1)
                    .to_gaussian()
                    .scale(&BigRational::from(f.coefficient_at(l as i64 * n).unwrap()));
                assert_eq!(got, expect, "l={l} n={n}");
            }
        }
    }

    #[test]
    fn transform_value_at_zero_matches_standalone_sum() {
        // With x_N = 0 every divisibility condition in the inner Möbius sum
        // holds at n = 0, leaving Σ_a (a/Π) a^{k-1} ψ_l(a,1) Σ_{t|(a,l/a)} μ(t)/t.
        for (level, exps) in [
            (3u64, vec![3i64, -1]),
            (2, vec![4, -2]),
            (4, vec![-4, 10, -4]),
            (9, vec![0, 6, -2]),
        ] {
            let e = eq(level, &exps);
            let inv = e.derive();
            let f = eta_quotient_expansion(&e, 40);
            let k = inv.integral_k().unwrap();
            for l in (1..=30u64).filter(|l| l % inv.m_r == 1 % inv.m_r) {
                let ctx = HeckeContext::for_catalog(&e, l).unwrap();
                let mut expect = GaussianRational::zero();
                for a in divisors(l) {
                    if num_integer::gcd(a, level) != 1 {
                        continue;
                    }
                    let kr = kronecker(&BigInt::from(a), &inv.pi);
                    let mut msum = BigRational::zero();
                    for t in divisors(num_integer::gcd(a, l / a)) {
                        msum += BigRational::new(BigInt::from(moebius(t)), BigInt::from(t));
                    }
                    let factor =
                        BigRational::from(BigInt::from(kr)) * rational_power(a, k - 1) * msum;
                    expect += &psi(&ctx, a, 1).to_gaussian().scale(&factor);
                }
                let got = scaled_transform_simplified(&ctx, &rat(0), &f).unwrap();
                assert_eq!(got, expect, "N={level} l={l}");
            }
        }
    }

    #[test]
    fn transform_requires_lattice_points() {
        let e = eq(2, &[1, 1]); // offset 1/8
        let f = eta_quotient_expansion(&e, 40);
        let ctx = HeckeContext::unverified(&e, 9).unwrap(); // m_r = 8
        assert!(matches!(
            scaled_transform_simplified(&ctx, &rat(0), &f),
            Err(Error::OffLattice { .. })
        ));
        let on_lattice = BigRational::new(BigInt::from(9), BigInt::from(8));
        assert!(scaled_transform_simplified(&ctx, &on_lattice, &f).is_ok());
    }

    #[test]
    fn transform_reports_precision_shortfall() {
        let e = eq(3, &[3, -1]);
        let f = eta_quotient_expansion(&e, 10);
        let ctx = HeckeContext::for_catalog(&e, 4).unwrap();
        // needs c_f(4*3) = c_f(12), have only 10 coefficients
        assert!(matches!(
            scaled_transform_simplified(&ctx, &rat(3), &f),
            Err(Error::InsufficientPrecision { .. })
        ));
    }

    #[test]
    fn general_transform_at_index_one() {
        let e = eq(3, &[3, -1]);
        let f = eta_quotient_expansion(&e, 30);
        let ctx = HeckeContext::for_catalog(&e, 1).unwrap();
        for n in 0..20i64 {
            let g = transform_general(&ctx, &rat(n), &f).unwrap();
            let expect = f.coefficient_at(n).unwrap().to_f64().unwrap();
            assert!((g.re - expect).abs() < 1e-9, "n={n}");
            assert!(g.im.abs() < 1e-9);
        }
    }

    #[test]
    fn general_transform_matches_simplified() {
        let e = eq(3, &[3, -1]);
        let f = eta_quotient_expansion(&e, 300);
        for l in [4u64, 7, 10, 13] {
            let ctx = HeckeContext::for_catalog(&e, l).unwrap();
            for n in 0..20i64 {
                let g = transform_general(&ctx, &rat(n), &f).unwrap();
                let s = scaled_transform_simplified(&ctx, &rat(n), &f).unwrap();
                let expect = s.to_complex() * l as f64;
                let scale = expect.norm().max(1.0);
                assert!((g - expect).norm() / scale < 1e-9, "l={l} n={n}");
            }
        }
    }

    #[test]
    fn recursion_consumes_smaller_coefficients() {
        let e2 = eq(2, &[4, -2]);
        let f = eta_quotient_expansion(&e2, 20);
        let ctx = HeckeContext::for_catalog(&e2, 9).unwrap();
        let rec = closed_coefficient_recursive(&ctx).unwrap();
        assert_eq!(rec, f.coefficient_at(9).unwrap());
        assert_eq!(rec, closed_coefficient(&ctx).unwrap());

        let e4 = eq(4, &[-4, 10, -4]);
        let ctx = HeckeContext::for_catalog(&e4, 25).unwrap();
        assert_eq!(
            closed_coefficient_recursive(&ctx).unwrap(),
            BigInt::from(12)
        );
    }

    #[test]
    fn psi_identity_under_stated_conditions() {
        // multiplicativity of the normalized ratio across the recursion step
        for (level, exps) in [
            (3u64, vec![3i64, -1]),
            (2, vec![4, -2]),
            (4, vec![-4, 10, -4]),
            (9, vec![0, 6, -2]),
            (6, vec![0, 3, 0, -1]),
        ] {
            let e = eq(level, &exps);
            let inv = e.derive();
            let m_r = inv.m_r;
            let kd = inv.integral_k().unwrap() + inv.delta as i64;
            for l in (1..=120u64).filter(|l| l % m_r == 1 % m_r) {
                let cond = l % 2 == 1
                    || (l % 2 == 0 && level % 2 == 0)
                    || (l % 4 == 2 && level % 2 == 1)
                    || kd % 2 == 0;
                if !cond {
                    continue;
                }
                let ctx_l = HeckeContext::for_catalog(&e, l).unwrap();
                let mut a1 = 2u64;
                while a1 * a1 <= l {
                    if l % (a1 * a1) == 0 && num_integer::gcd(a1, level) == 1 {
                        let l2 = l / (a1 * a1);
                        let ctx_l2 = HeckeContext::for_catalog(&e, l2).unwrap();
                        for a2 in divisors(l2) {
                            if num_integer::gcd(a2, level) != 1 {
                                continue;
                            }
                            let lhs = psi_ratio(&ctx_l, a1) * psi_ratio(&ctx_l2, a2);
                            let rhs = psi_ratio(&ctx_l, a1 * a2);
                            assert_eq!(lhs, rhs, "N={level} l={l} a1={a1} a2={a2}");
                        }
                    }
                    a1 += 1;
                }
            }
        }
    }

    #[test]
    fn kronecker_against_product_equals_squarefree_part() {
        for (level, exps) in [
            (4u64, vec![-4i64, 10, -4]),
            (12, vec![0, -1, -2, 2, 6, -3]),
            (20, vec![2, -1, 0, 0, 2, -1]),
        ] {
            let inv = eq(level, &exps).derive();
            for a in 1..200u64 {
                if num_integer::gcd(a, level) != 1 {
                    continue;
                }
                assert_eq!(
                    kronecker(&BigInt::from(a), &inv.pi),
                    kronecker(&BigInt::from(a), &inv.pi_sf),
                    "N={level} a={a}"
                );
            }
        }
    }
}
