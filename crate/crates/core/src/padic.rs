//! Fixed-precision p-adic integers and the Teichmüller lift.
//!
//! A [`PAdicInt`] is a residue modulo `p^N` that carries its precision `N`.
//! Binary operations between values of different precision truncate to the
//! smaller one, so precision loss is always visible in the result.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PAdicInt {
    p: u64,
    precision: u32,
    value: BigUint,
}

pub(crate) fn check_odd_prime(p: u64) -> Result<()> {
    if p == 2 || !arith::is_prime(p) {
        return Err(Error::BadPrime(p));
    }
    Ok(())
}

fn pow_big(p: u64, k: u32) -> BigUint {
    num_traits::pow(BigUint::from(p), k as usize)
}

impl PAdicInt {
    pub fn new(p: u64, precision: u32, value: impl Into<BigInt>) -> Result<Self> {
        check_odd_prime(p)?;
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        Ok(Self::from_big_unchecked(p, precision, &value.into()))
    }

    pub(crate) fn from_big_unchecked(p: u64, precision: u32, value: &BigInt) -> Self {
        let modulus = BigInt::from(pow_big(p, precision));
        let v = value.mod_floor(&modulus);
        PAdicInt {
            p,
            precision,
            value: v.to_biguint().expect("non-negative after mod_floor"),
        }
    }

    pub fn zero(p: u64, precision: u32) -> Result<Self> {
        Self::new(p, precision, 0)
    }

    pub fn one(p: u64, precision: u32) -> Result<Self> {
        Self::new(p, precision, 1)
    }

    /// Embeds a rational whose denominator is prime to `p`.
    pub fn from_rational(p: u64, precision: u32, x: &BigRational) -> Result<Self> {
        check_odd_prime(p)?;
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        let modulus = BigInt::from(pow_big(p, precision));
        let den = x.denom().mod_floor(&modulus);
        let inv = mod_inverse(&den, &modulus).ok_or(Error::NotAUnit {
            a: i64::try_from(x.denom().clone()).unwrap_or(i64::MAX),
            p,
        })?;
        Ok(Self::from_big_unchecked(p, precision, &(x.numer() * inv)))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Canonical residue in `[0, p^N)`.
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn modulus(&self) -> BigUint {
        pow_big(self.p, self.precision)
    }

    /// Representative in `(-p^N/2, p^N/2]`.
    pub fn to_symmetric(&self) -> BigInt {
        let m = BigInt::from(self.modulus());
        let v = BigInt::from(self.value.clone());
        if &v * 2 > m {
            v - m
        } else {
            v
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// Valuation of the residue, `None` when it vanishes at this precision.
    pub fn valuation(&self) -> Option<u32> {
        if self.value.is_zero() {
            return None;
        }
        let p = BigUint::from(self.p);
        let mut v = self.value.clone();
        let mut k = 0;
        while (&v % &p).is_zero() {
            v /= &p;
            k += 1;
        }
        Some(k)
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    pub fn with_precision(&self, precision: u32) -> Self {
        let precision = precision.min(self.precision).max(1);
        Self::from_big_unchecked(self.p, precision, &BigInt::from(self.value.clone()))
    }

    pub fn pow(&self, exp: u64) -> Self {
        let m = self.modulus();
        PAdicInt {
            p: self.p,
            precision: self.precision,
            value: self.value.modpow(&BigUint::from(exp), &m),
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotAUnit {
                a: i64::try_from(self.to_symmetric()).unwrap_or(0),
                p: self.p,
            });
        }
        let m = BigInt::from(self.modulus());
        let inv = mod_inverse(&BigInt::from(self.value.clone()), &m).expect("unit");
        Ok(Self::from_big_unchecked(self.p, self.precision, &inv))
    }

    /// Exact division by `p^k`; the result has precision `N - k`.
    pub fn div_p_power(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Ok(self.clone());
        }
        if k >= self.precision {
            return Err(Error::InsufficientPrecision(format!(
                "dividing a precision-{} value by p^{}",
                self.precision, k
            )));
        }
        let pk = pow_big(self.p, k);
        if !(&self.value % &pk).is_zero() {
            return Err(Error::InsufficientPrecision(format!(
                "value is not divisible by p^{k}"
            )));
        }
        Ok(PAdicInt {
            p: self.p,
            precision: self.precision - k,
            value: &self.value / pk,
        })
    }

    fn combine(&self, other: &Self, f: impl Fn(BigInt, BigInt) -> BigInt) -> Self {
        assert_eq!(self.p, other.p, "p-adic operands over different primes");
        let precision = self.precision.min(other.precision);
        let v = f(
            BigInt::from(self.value.clone()),
            BigInt::from(other.value.clone()),
        );
        Self::from_big_unchecked(self.p, precision, &v)
    }
}

impl fmt::Debug for PAdicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {}^{})", self.value, self.p, self.precision)
    }
}

impl fmt::Display for PAdicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for &PAdicInt {
    type Output = PAdicInt;
    fn add(self, rhs: &PAdicInt) -> PAdicInt {
        self.combine(rhs, |a, b| a + b)
    }
}

impl Sub for &PAdicInt {
    type Output = PAdicInt;
    fn sub(self, rhs: &PAdicInt) -> PAdicInt {
        self.combine(rhs, |a, b| a - b)
    }
}

impl Mul for &PAdicInt {
    type Output = PAdicInt;
    fn mul(self, rhs: &PAdicInt) -> PAdicInt {
        self.combine(rhs, |a, b| a * b)
    }
}

impl Neg for &PAdicInt {
    type Output = PAdicInt;
    fn neg(self) -> PAdicInt {
        PAdicInt::from_big_unchecked(self.p, self.precision, &-BigInt::from(self.value.clone()))
    }
}

pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// The Teichmüller representative `ω(a)`: the `(p-1)`-th root of unity
/// congruent to `a` modulo `p`, at precision `N`.
pub fn teichmuller(a: i64, p: u64, precision: u32) -> Result<PAdicInt> {
    check_odd_prime(p)?;
    if precision == 0 {
        return Err(Error::ZeroPrecision);
    }
    if arith::reduce(a, p) == 0 {
        return Err(Error::NotAUnit { a, p });
    }
    let mut x = PAdicInt::new(p, precision, a)?;
    // x -> x^p contracts by a factor p, so N - 1 steps reach the fixed point.
    for _ in 1..precision {
        x = x.pow(p);
    }
    Ok(x)
}

/// `v_p(x)`, with `None` standing for `+∞` at `x = 0`.
pub fn padic_valuation(x: &BigRational, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    Some(int_valuation(x.numer(), p) as i64 - int_valuation(x.denom(), p) as i64)
}

/// `v_p` of a nonzero integer.
pub fn int_valuation(x: &BigInt, p: u64) -> u32 {
    if x.is_zero() {
        return u32::MAX;
    }
    let p = BigInt::from(p);
    let mut v = x.abs();
    let mut k = 0;
    loop {
        let (q, r) = v.div_rem(&p);
        if !r.is_zero() {
            return k;
        }
        v = q;
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn teichmuller_examples() {
        assert_eq!(teichmuller(1, 5, 3).unwrap().value(), &BigUint::from(1u32));
        assert_eq!(teichmuller(4, 5, 3).unwrap().value(), &BigUint::from(124u32));
        let w2 = teichmuller(2, 5, 3).unwrap();
        assert_eq!(w2.value(), &BigUint::from(57u32));
        // oracle: 57^2 = -1 and 57^4 = 1 mod 125
        assert_eq!(w2.pow(2).value(), &BigUint::from(124u32));
        assert!(w2.pow(4).value().is_one());
    }

    #[test]
    fn teichmuller_rejects_multiples_of_p() {
        assert_eq!(teichmuller(10, 5, 3), Err(Error::NotAUnit { a: 10, p: 5 }));
        assert_eq!(teichmuller(1, 9, 3), Err(Error::BadPrime(9)));
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(padic_valuation(&rat(250, 1), 5), Some(3));
        assert_eq!(padic_valuation(&rat(1, 3), 3), Some(-1));
        assert_eq!(padic_valuation(&rat(0, 1), 7), None);
    }

    #[test]
    fn division_by_p_drops_precision() {
        let x = PAdicInt::new(5, 4, 250).unwrap();
        let y = x.div_p_power(3).unwrap();
        assert_eq!(y.precision(), 1);
        assert_eq!(y.value(), &BigUint::from(2u32));
        assert!(x.div_p_power(4).is_err());
        assert!(PAdicInt::new(5, 4, 7).unwrap().div_p_power(1).is_err());
    }

    #[test]
    fn mixed_precision_truncates() {
        let a = PAdicInt::new(7, 5, 100).unwrap();
        let b = PAdicInt::new(7, 2, 3).unwrap();
        let c = &a * &b;
        assert_eq!(c.precision(), 2);
        assert_eq!(c.value(), &BigUint::from(300u32 % 49));
    }

    proptest! {
        #[test]
        fn teichmuller_is_root_of_unity(pi in 0usize..4, a in 1i64..2000, n in 1u32..=8) {
            let p = [3u64, 5, 7, 37][pi];
            prop_assume!(a % p as i64 != 0);
            let w = teichmuller(a, p, n).unwrap();
            prop_assert!(w.pow(p - 1).value().is_one());
            prop_assert_eq!(w.value() % BigUint::from(p), BigUint::from(a as u64 % p));
        }

        #[test]
        fn teichmuller_is_multiplicative(pi in 0usize..4, a in 1i64..500, b in 1i64..500, n in 1u32..=8) {
            let p = [3u64, 5, 7, 37][pi];
            prop_assume!(a % p as i64 != 0 && b % p as i64 != 0);
            let lhs = &teichmuller(a, p, n).unwrap() * &teichmuller(b, p, n).unwrap();
            prop_assert_eq!(lhs, teichmuller(a * b, p, n).unwrap());
        }

        #[test]
        fn valuation_is_additive(x in 1i64..100_000, y in 1i64..100_000, dx in 1i64..500, dy in 1i64..500, pi in 0usize..3) {
            let p = [3u64, 5, 7][pi];
            let a = rat(x, dx);
            let b = rat(-y, dy);
            let lhs = padic_valuation(&(&a * &b), p).unwrap();
            prop_assert_eq!(lhs, padic_valuation(&a, p).unwrap() + padic_valuation(&b, p).unwrap());
        }
    }
}
