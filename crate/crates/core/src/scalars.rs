//! Exact Laurent polynomials in the formal variable `ω^{1/2}`.
//!
//! Every scalar in the crate lives in `Z[ω^{±1/2}]`. With a fixed rank `n`
//! the usual quantum parameters embed as `q^{1/n} = (ω^{1/2})^{2n}` and
//! `q = (ω^{1/2})^{2n²}`, so fractional powers of `q` never need rational
//! exponents.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

/// Fixes the rank `n` used to translate powers of `q` into powers of `ω^{1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RingContext {
    n: u32,
}

impl RingContext {
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("rank n must be at least 2, got {n}")));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Exponent of `ω^{1/2}` representing `q^{1/n}`.
    pub fn q_root_unit(&self) -> i64 {
        2 * self.n as i64
    }

    /// Exponent of `ω^{1/2}` representing `q`.
    pub fn q_unit(&self) -> i64 {
        2 * (self.n as i64) * (self.n as i64)
    }

    /// `q^{num/den}`; the exponent must be integral in `ω^{1/2}` units.
    pub fn q_frac(&self, num: i64, den: i64) -> Result<LaurentScalar> {
        if den == 0 {
            return Err(invalid("zero denominator"));
        }
        let scaled = self.q_unit() * num;
        if scaled % den != 0 {
            return Err(invalid(format!(
                "q^({num}/{den}) is not an integral power of w^(1/2) for n = {}",
                self.n
            )));
        }
        Ok(LaurentScalar::monomial(scaled / den, 1))
    }

    pub fn q(&self) -> LaurentScalar {
        LaurentScalar::monomial(self.q_unit(), 1)
    }

    pub fn q_pow(&self, k: i64) -> LaurentScalar {
        LaurentScalar::monomial(self.q_unit() * k, 1)
    }

    /// `q^{k/n}`.
    pub fn q_root_pow(&self, k: i64) -> LaurentScalar {
        LaurentScalar::monomial(self.q_root_unit() * k, 1)
    }

    /// `ω^{1/2}` chosen so that `q` equals the given value (principal branch).
    pub fn w_half_for_q(&self, q: Complex64) -> Complex64 {
        (q.ln() / (self.q_unit() as f64)).exp()
    }

    /// `ω^{1/2}` chosen so that `q^{1/n}` equals the given value.
    pub fn w_half_for_q_root(&self, q_root: Complex64) -> Complex64 {
        (q_root.ln() / (self.q_root_unit() as f64)).exp()
    }
}

/// Sparse Laurent polynomial `Σ c_e (ω^{1/2})^e` with integer coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentScalar {
    terms: Vec<(i64, BigInt)>,
}

impl LaurentScalar {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(0, 1)
    }

    pub fn monomial(exp: i64, coeff: impl Into<BigInt>) -> Self {
        let c = coeff.into();
        if c.is_zero() {
            Self::zero()
        } else {
            Self { terms: vec![(exp, c)] }
        }
    }

    pub fn from_int(c: impl Into<BigInt>) -> Self {
        Self::monomial(0, c)
    }

    /// Builds a scalar from arbitrary (exponent, coefficient) pairs, merging repeats.
    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let mut acc: BTreeMap<i64, BigInt> = BTreeMap::new();
        for (e, c) in terms {
            *acc.entry(e).or_default() += c.into();
        }
        Self::from_map(acc)
    }

    fn from_map(map: BTreeMap<i64, BigInt>) -> Self {
        Self {
            terms: map.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn terms(&self) -> &[(i64, BigInt)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for `±(ω^{1/2})^e`, the invertible elements of the ring.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].1.abs().is_one()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.first().map(|t| t.0)
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.last().map(|t| t.0)
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        match self.terms.binary_search_by_key(&exp, |t| t.0) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    /// Multiplies by `(ω^{1/2})^shift`.
    pub fn shift(&self, shift: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e + shift, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect(),
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NonUnitDivision);
        }
        let (e, c) = &self.terms[0];
        Ok(Self::monomial(-e, c.clone()))
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.inverse()?)
    }

    /// The unit `u` with `self = u · other`, if there is one.
    pub fn unit_ratio(&self, other: &Self) -> Option<Self> {
        let (ea, ca) = self.terms.first()?;
        let (eb, cb) = other.terms.first()?;
        let sign = if ca == cb {
            BigInt::one()
        } else if *ca == -cb {
            -BigInt::one()
        } else {
            return None;
        };
        let u = Self::monomial(ea - eb, sign);
        (&u * other == *self).then_some(u)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Integer powers; negative exponents need a unit.
    pub fn powi(&self, k: i64) -> Result<Self> {
        if k >= 0 {
            Ok(self.pow(k as u32))
        } else {
            Ok(self.inverse()?.pow((-k) as u32))
        }
    }

    /// Evaluates with the given complex value substituted for `ω^{1/2}`.
    pub fn eval_numeric(&self, w_half: Complex64) -> Result<Complex64> {
        if w_half.norm() == 0.0 {
            return Err(Error::ZeroEvaluation);
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let cf = c.to_f64().unwrap_or(f64::NAN);
            sum += w_half.powi(*e as i32) * cf;
        }
        Ok(sum)
    }

    /// Exact value at `q^{1/n} = sign`, for scalars that are Laurent polynomials in `q^{1/n}`.
    pub fn eval_at_q_root_sign(&self, ctx: RingContext, sign: i8) -> Result<BigInt> {
        let unit = ctx.q_root_unit();
        let mut acc = BigInt::zero();
        for (e, c) in &self.terms {
            if e % unit != 0 {
                return Err(invalid("scalar is not a Laurent polynomial in q^(1/n)"));
            }
            let k = e / unit;
            if sign < 0 && k.rem_euclid(2) == 1 {
                acc -= c;
            } else {
                acc += c;
            }
        }
        Ok(acc)
    }
}

impl fmt::Debug for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*w^({e}/2)")?;
        }
        Ok(())
    }
}

impl Add for &LaurentScalar {
    type Output = LaurentScalar;
    fn add(self, rhs: &LaurentScalar) -> LaurentScalar {
        let mut out = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < rhs.terms.len() {
            let (ea, ca) = &self.terms[i];
            let (eb, cb) = &rhs.terms[j];
            match ea.cmp(eb) {
                std::cmp::Ordering::Less => {
                    out.push((*ea, ca.clone()));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((*eb, cb.clone()));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let s = ca + cb;
                    if !s.is_zero() {
                        out.push((*ea, s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&rhs.terms[j..]);
        LaurentScalar { terms: out }
    }
}

impl Add for LaurentScalar {
    type Output = LaurentScalar;
    fn add(self, rhs: LaurentScalar) -> LaurentScalar {
        &self + &rhs
    }
}

impl AddAssign<&LaurentScalar> for LaurentScalar {
    fn add_assign(&mut self, rhs: &LaurentScalar) {
        if rhs.is_zero() {
            return;
        }
        if self.is_zero() {
            *self = rhs.clone();
            return;
        }
        *self = &*self + rhs;
    }
}

impl Neg for &LaurentScalar {
    type Output = LaurentScalar;
    fn neg(self) -> LaurentScalar {
        LaurentScalar {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Neg for LaurentScalar {
    type Output = LaurentScalar;
    fn neg(self) -> LaurentScalar {
        -&self
    }
}

impl Sub for &LaurentScalar {
    type Output = LaurentScalar;
    fn sub(self, rhs: &LaurentScalar) -> LaurentScalar {
        self + &(-rhs)
    }
}

impl Sub for LaurentScalar {
    type Output = LaurentScalar;
    fn sub(self, rhs: LaurentScalar) -> LaurentScalar {
        &self - &rhs
    }
}

impl Mul for &LaurentScalar {
    type Output = LaurentScalar;
    fn mul(self, rhs: &LaurentScalar) -> LaurentScalar {
        if self.is_zero() || rhs.is_zero() {
            return LaurentScalar::zero();
        }
        if rhs.terms.len() == 1 {
            let (e, c) = &rhs.terms[0];
            return LaurentScalar {
                terms: self.terms.iter().map(|(x, d)| (x + e, d * c)).collect(),
            };
        }
        if self.terms.len() == 1 {
            return rhs * self;
        }
        let mut acc: BTreeMap<i64, BigInt> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                *acc.entry(ea + eb).or_default() += ca * cb;
            }
        }
        LaurentScalar::from_map(acc)
    }
}

impl Mul for LaurentScalar {
    type Output = LaurentScalar;
    fn mul(self, rhs: LaurentScalar) -> LaurentScalar {
        &self * &rhs
    }
}

#[derive(Serialize, Deserialize)]
struct ScalarJson {
    unit: String,
    terms: Vec<(i64, String)>,
}

impl Serialize for LaurentScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ScalarJson {
            unit: "w_half".to_string(),
            terms: self.terms.iter().map(|(e, c)| (*e, c.to_string())).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ScalarJson::deserialize(d)?;
        if raw.unit != "w_half" {
            return Err(D::Error::custom(format!("unsupported unit {}", raw.unit)));
        }
        let mut terms = Vec::with_capacity(raw.terms.len());
        for (e, c) in raw.terms {
            let v: BigInt = c.parse().map_err(D::Error::custom)?;
            terms.push((e, v));
        }
        Ok(LaurentScalar::from_terms(terms))
    }
}

/// Quantum integer `[m] = Σ_{i=1}^{m} q^{-m-1+2i}`.
pub fn qint(ctx: RingContext, m: u32) -> LaurentScalar {
    let m = m as i64;
    LaurentScalar::from_terms((1..=m).map(|i| (ctx.q_unit() * (-m - 1 + 2 * i), 1)))
}

/// Quantum factorial `[m]! = [1][2]⋯[m]`.
pub fn qfact(ctx: RingContext, m: u32) -> LaurentScalar {
    (1..=m).fold(LaurentScalar::one(), |acc, i| &acc * &qint(ctx, i))
}

pub const DEFAULT_TOL: f64 = 1e-9;

/// Membership of `q` in the degenerate set: a `(2m)`-th root of unity for
/// some `2 ≤ m ≤ n-1`, excluding `±1`.
pub fn in_bad_set(q: Complex64, n: u32, tol: f64) -> bool {
    if (q.norm() - 1.0).abs() >= tol {
        return false;
    }
    let one = Complex64::new(1.0, 0.0);
    if (q - one).norm() < tol || (q + one).norm() < tol {
        return false;
    }
    (2..n).any(|m| (q.powi(2 * m as i32) - one).norm() < tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn ctx(n: u32) -> RingContext {
        RingContext::new(n).unwrap()
    }

    fn arb_scalar() -> impl Strategy<Value = LaurentScalar> {
        prop::collection::vec((-20i64..20, -5i64..6), 0..5).prop_map(LaurentScalar::from_terms)
    }

    #[test]
    fn qint_small_values() {
        let c = ctx(3);
        assert!(qint(c, 0).is_zero());
        assert_eq!(qint(c, 2), &c.q_pow(-1) + &c.q());
        assert_eq!(qint(c, 3).eval_numeric(Complex64::new(1.0, 0.0)).unwrap().re, 3.0);
    }

    #[test]
    fn qfact_small_values() {
        let c = ctx(2);
        assert!(qfact(c, 0).is_one());
        assert_eq!(qfact(c, 2), qint(c, 2));
        let expect = &(&c.q_pow(-1) + &c.q())
            * &(&(&c.q_pow(-2) + &LaurentScalar::one()) + &c.q_pow(2));
        assert_eq!(qfact(c, 3), expect);
    }

    #[test]
    fn eval_examples() {
        let c = ctx(2);
        assert_eq!(c.q().terms()[0].0, 8);
        let v = c.q().eval_numeric(Complex64::new(1.0, 0.0)).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let w = c.w_half_for_q(Complex64::i());
        assert!(qint(c, 2).eval_numeric(w).unwrap().norm() < 1e-12);

        let c3 = ctx(3);
        let w = c3.w_half_for_q(Complex64::from_polar(1.0, PI / 3.0));
        assert!(qfact(c3, 3).eval_numeric(w).unwrap().norm() < 1e-12);
        assert_eq!(
            LaurentScalar::one().eval_numeric(Complex64::new(0.0, 0.0)),
            Err(Error::ZeroEvaluation)
        );
    }

    #[test]
    fn bad_set_examples() {
        assert!(in_bad_set(Complex64::i(), 4, DEFAULT_TOL));
        assert!(!in_bad_set(Complex64::new(1.0, 0.0), 5, DEFAULT_TOL));
        assert!(!in_bad_set(Complex64::new(-1.0, 0.0), 5, DEFAULT_TOL));
        assert!(!in_bad_set(Complex64::i(), 2, DEFAULT_TOL));
        assert!(!in_bad_set(Complex64::new(1.1, 0.0), 5, DEFAULT_TOL));
    }

    #[test]
    fn qint_zeros_are_even_roots_of_unity() {
        for n in 2..=5u32 {
            let c = ctx(n);
            for m in 1..=6u32 {
                let s = qint(c, m);
                for denom in 2..=13u32 {
                    for p in 1..denom {
                        let q = Complex64::from_polar(1.0, 2.0 * PI * p as f64 / denom as f64);
                        let val = s.eval_numeric(c.w_half_for_q(q)).unwrap().norm();
                        let one = Complex64::new(1.0, 0.0);
                        let expect_zero = (q.powi(2 * m as i32) - one).norm() < 1e-9
                            && (q - one).norm() > 1e-9
                            && (q + one).norm() > 1e-9;
                        assert_eq!(val < 1e-9, expect_zero, "n={n} m={m} q=e^(2pi i {p}/{denom})");
                    }
                }
            }
        }
    }

    #[test]
    fn q_root_power_is_q() {
        for n in 2..=7 {
            let c = ctx(n);
            assert_eq!(c.q_root_pow(1).pow(n), c.q());
            assert_eq!(c.q_frac(1, n as i64).unwrap(), c.q_root_pow(1));
        }
    }

    #[test]
    fn division_only_by_units() {
        let c = ctx(2);
        assert_eq!(qint(c, 2).inverse(), Err(Error::NonUnitDivision));
        let u = -c.q_root_pow(3);
        assert!((&u * &u.inverse().unwrap()).is_one());
    }

    #[test]
    fn json_round_trip() {
        let s = LaurentScalar::from_terms(vec![(-3, -2), (5, 7)]);
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"unit":"w_half","terms":[[-3,"-2"],[5,"7"]]}"#);
        let back: LaurentScalar = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn exact_sign_evaluation() {
        let c = ctx(3);
        let s = &c.q_root_pow(1) + &c.q_root_pow(2);
        assert_eq!(s.eval_at_q_root_sign(c, 1).unwrap(), BigInt::from(2));
        assert_eq!(s.eval_at_q_root_sign(c, -1).unwrap(), BigInt::from(0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn ring_axioms(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &LaurentScalar::one(), a.clone());
            prop_assert!((&a - &a).is_zero());
            for w in a.terms().windows(2) {
                prop_assert!(w[0].0 < w[1].0);
            }
        }
    }
}
