//! Exact arithmetic in `Q(ζ_{p^{n+1}})` and `Q(ζ_{p^{n+1}}, ζ_l)`.
//!
//! Elements are stored on the reduced tensor basis
//! `ζ_{p^{n+1}}^i ζ_l^j` with `0 <= i < φ(p^{n+1})` and `0 <= j < l - 1`
//! (a single column when there is no `l`), as integer numerators over one
//! common positive denominator. Products are formed on the redundant basis
//! `0 <= i < p^{n+1}`, `0 <= j < l` and then reduced with
//! `Φ_{p^{n+1}}(ζ) = 0` and `1 + ζ_l + ... + ζ_l^{l-1} = 0`.

mod site;

pub use site::{find_generator, valuations_above_l, PrimeSite, ValuationTable, WHITELIST};

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::group_ring::GrpElt;
use crate::padic::check_odd_prime;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Conductor {
    p: u64,
    n: u32,
    l: Option<u64>,
}

impl Conductor {
    /// The field `k_n = Q(ζ_{p^{n+1}})`.
    pub fn prime_power(p: u64, n: u32) -> Result<Self> {
        check_odd_prime(p)?;
        Ok(Conductor { p, n, l: None })
    }

    /// The compositum `k_n(ζ_l)` for a prime `l != p`.
    pub fn composite(p: u64, n: u32, l: u64) -> Result<Self> {
        check_odd_prime(p)?;
        if l == p {
            return Err(Error::AuxiliaryEqualsP(l));
        }
        if !arith::is_prime(l) {
            return Err(Error::Config(format!("l = {l} is not prime")));
        }
        Ok(Conductor { p, n, l: Some(l) })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn l(&self) -> Option<u64> {
        self.l
    }

    /// `p^{n+1}`.
    pub fn p_part(&self) -> u64 {
        self.p.pow(self.n + 1)
    }

    /// The full conductor `p^{n+1}` or `p^{n+1} l`.
    pub fn m(&self) -> u64 {
        self.p_part() * self.l.unwrap_or(1)
    }

    /// `φ(p^{n+1})`, the number of basis rows.
    pub fn rows(&self) -> usize {
        ((self.p - 1) * self.p.pow(self.n)) as usize
    }

    pub fn cols(&self) -> usize {
        self.l.map_or(1, |l| (l - 1) as usize)
    }

    fn lslots(&self) -> usize {
        self.l.map_or(1, |l| l as usize)
    }

    pub fn dim(&self) -> usize {
        self.rows() * self.cols()
    }

    pub fn without_l(&self) -> Conductor {
        Conductor { l: None, ..*self }
    }

    pub fn with_l(&self, l: u64) -> Result<Conductor> {
        Conductor::composite(self.p, self.n, l)
    }

    pub fn at_level(&self, n: u32) -> Conductor {
        Conductor { n, ..*self }
    }
}

impl fmt::Display for Conductor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.l {
            Some(l) => write!(f, "{}^{}*{}", self.p, self.n + 1, l),
            None => write!(f, "{}^{}", self.p, self.n + 1),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycNum {
    cond: Conductor,
    num: Vec<BigInt>,
    den: BigInt,
}

/// Reduction from the redundant `p^{n+1} x l` grid to the tensor basis.
fn reduce_grid<T>(cond: &Conductor, slots: &mut [T])
where
    T: Clone + for<'a> std::ops::SubAssign<&'a T>,
{
    let ls = cond.lslots();
    let mp = cond.p_part() as usize;
    if let Some(l) = cond.l {
        let last = (l - 1) as usize;
        for i in 0..mp {
            let c = slots[i * ls + last].clone();
            for j in 0..last {
                slots[i * ls + j] -= &c;
            }
        }
    }
    let phi = cond.rows();
    let step = cond.p.pow(cond.n) as usize;
    for i in (phi..mp).rev() {
        for j in 0..cond.cols() {
            let c = slots[i * ls + j].clone();
            for k in 0..(cond.p as usize - 1) {
                slots[(i - phi + k * step) * ls + j] -= &c;
            }
        }
    }
}

fn bits(x: &BigInt) -> u64 {
    x.bits()
}

impl CycNum {
    pub fn zero(cond: Conductor) -> Self {
        CycNum {
            cond,
            num: vec![BigInt::zero(); cond.dim()],
            den: BigInt::one(),
        }
    }

    pub fn from_int(cond: Conductor, k: impl Into<BigInt>) -> Self {
        let mut x = Self::zero(cond);
        x.num[0] = k.into();
        x
    }

    pub fn one(cond: Conductor) -> Self {
        Self::from_int(cond, 1)
    }

    pub fn from_rational(cond: Conductor, r: &BigRational) -> Self {
        let mut x = Self::zero(cond);
        x.num[0] = r.numer().clone();
        x.den = r.denom().clone();
        x.normalize();
        x
    }

    /// `ζ_{p^{n+1}}^k`.
    pub fn zeta_p(cond: Conductor, k: i64) -> Self {
        let mp = cond.p_part();
        let mut slots = vec![BigInt::zero(); mp as usize * cond.lslots()];
        slots[arith::reduce(k, mp) as usize * cond.lslots()] = BigInt::one();
        Self::from_redundant(cond, slots, BigInt::one())
    }

    /// `ζ_l^k`; requires a composite conductor.
    pub fn zeta_l(cond: Conductor, k: i64) -> Result<Self> {
        let l = cond.l.ok_or_else(|| Error::InvalidTower("no ζ_l in k_n".into()))?;
        let mut slots = vec![BigInt::zero(); cond.p_part() as usize * cond.lslots()];
        slots[arith::reduce(k, l) as usize] = BigInt::one();
        Ok(Self::from_redundant(cond, slots, BigInt::one()))
    }

    /// Element of `k_n` from power-basis coefficients of `ζ_{p^{n+1}}`;
    /// exponents beyond `φ(p^{n+1})` are reduced.
    pub fn from_power_coeffs(cond: Conductor, coeffs: &[i64]) -> Self {
        Self::from_redundant_coeffs(cond, coeffs.iter().map(|&c| BigInt::from(c)))
    }

    pub fn from_redundant_coeffs(cond: Conductor, coeffs: impl IntoIterator<Item = BigInt>) -> Self {
        let mp = cond.p_part() as usize;
        let ls = cond.lslots();
        let mut slots = vec![BigInt::zero(); mp * ls];
        for (i, c) in coeffs.into_iter().enumerate() {
            slots[(i % mp) * ls] += c;
        }
        Self::from_redundant(cond, slots, BigInt::one())
    }

    /// Builds an element from the redundant grid `slots[i * l + j]`, the
    /// coefficient of `ζ_{p^{n+1}}^i ζ_l^j`.
    pub(crate) fn from_redundant(cond: Conductor, mut slots: Vec<BigInt>, den: BigInt) -> Self {
        reduce_grid(&cond, &mut slots);
        let ls = cond.lslots();
        let cols = cond.cols();
        let mut num = Vec::with_capacity(cond.dim());
        for i in 0..cond.rows() {
            for j in 0..cols {
                num.push(std::mem::take(&mut slots[i * ls + j]));
            }
        }
        let mut x = CycNum { cond, num, den };
        x.normalize();
        x
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -std::mem::take(&mut self.den);
            for c in &mut self.num {
                *c = -std::mem::take(c);
            }
        }
        if self.num.iter().all(Zero::is_zero) {
            self.den = BigInt::one();
            return;
        }
        if self.den.is_one() {
            return;
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                return;
            }
            if !c.is_zero() {
                g = g.gcd(c);
            }
        }
        if !g.is_one() {
            for c in &mut self.num {
                *c /= &g;
            }
            self.den /= &g;
        }
    }

    pub fn conductor(&self) -> Conductor {
        self.cond
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    /// Coefficient of `ζ_{p^{n+1}}^i ζ_l^j` on the reduced basis.
    pub fn coeff(&self, i: usize, j: usize) -> BigRational {
        BigRational::new(self.num[i * self.cond.cols() + j].clone(), self.den.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num.iter().skip(1).all(Zero::is_zero) {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.cond != other.cond {
            return Err(Error::ConductorMismatch(
                self.cond.to_string(),
                other.cond.to_string(),
            ));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(a, b)| a * &other.den + b * &self.den)
            .collect();
        let mut x = CycNum {
            cond: self.cond,
            num,
            den: &self.den * &other.den,
        };
        x.normalize();
        Ok(x)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        CycNum {
            cond: self.cond,
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        let mut x = CycNum {
            cond: self.cond,
            num: self.num.iter().map(|c| c * k.numer()).collect(),
            den: &self.den * k.denom(),
        };
        x.normalize();
        x
    }

    pub fn scale_int(&self, k: impl Into<BigInt>) -> Self {
        self.scale(&BigRational::from_integer(k.into()))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let cond = self.cond;
        let ls = cond.lslots();
        let cols = cond.cols();
        let mp = cond.p_part() as usize;
        let l = ls;
        let support = |x: &CycNum| -> Vec<(usize, usize, usize)> {
            x.num
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, _)| (k / cols, k % cols, k))
                .collect()
        };
        let sa = support(self);
        let sb = support(other);
        let den = &self.den * &other.den;
        if sa.is_empty() || sb.is_empty() {
            return Ok(Self::zero(cond));
        }
        let max_a = sa.iter().map(|t| bits(&self.num[t.2])).max().unwrap_or(0);
        let max_b = sb.iter().map(|t| bits(&other.num[t.2])).max().unwrap_or(0);
        let terms = sa.len().min(sb.len()) as u64;
        let headroom = 64 - terms.leading_zeros() as u64 + 4;
        if max_a <= 62 && max_b <= 62 && max_a + max_b + headroom < 126 {
            let av: Vec<(usize, usize, i128)> = sa
                .iter()
                .map(|&(i, j, k)| (i, j, self.num[k].to_i128().unwrap()))
                .collect();
            let bv: Vec<(usize, usize, i128)> = sb
                .iter()
                .map(|&(i, j, k)| (i, j, other.num[k].to_i128().unwrap()))
                .collect();
            let mut slots = vec![0i128; mp * ls];
            for &(i1, j1, a) in &av {
                for &(i2, j2, b) in &bv {
                    let i = (i1 + i2) % mp;
                    let j = (j1 + j2) % l;
                    slots[i * ls + j] += a * b;
                }
            }
            reduce_grid(&cond, &mut slots);
            let mut num = Vec::with_capacity(cond.dim());
            for i in 0..cond.rows() {
                for j in 0..cols {
                    num.push(BigInt::from(slots[i * ls + j]));
                }
            }
            let mut x = CycNum { cond, num, den };
            x.normalize();
            return Ok(x);
        }
        let mut slots = vec![BigInt::zero(); mp * ls];
        for &(i1, j1, ka) in &sa {
            let a = &self.num[ka];
            for &(i2, j2, kb) in &sb {
                let i = (i1 + i2) % mp;
                let j = (j1 + j2) % l;
                slots[i * ls + j] += a * &other.num[kb];
            }
        }
        Ok(Self::from_redundant(cond, slots, den))
    }

    pub fn square(&self) -> Self {
        self.try_mul(self).expect("same conductor")
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one(self.cond);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.try_mul(&base).expect("same conductor");
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// Multiplication by `ζ_{p^{n+1}}^k`.
    pub fn mul_zeta_p(&self, k: i64) -> Self {
        let mp = self.cond.p_part();
        let shift = arith::reduce(k, mp) as usize;
        self.remap(|i, j| ((i + shift) % mp as usize, j))
    }

    fn remap(&self, f: impl Fn(usize, usize) -> (usize, usize)) -> Self {
        let cond = self.cond;
        let ls = cond.lslots();
        let cols = cond.cols();
        let mut slots = vec![BigInt::zero(); cond.p_part() as usize * ls];
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (i, j) = f(k / cols, k % cols);
            slots[i * ls + j] += c;
        }
        Self::from_redundant(cond, slots, self.den.clone())
    }

    /// `σ_a`: `ζ_{p^{n+1}} ↦ ζ_{p^{n+1}}^a`, fixing `ζ_l`.
    pub fn galois(&self, a: i64) -> Result<Self> {
        self.galois_full(a, 1)
    }

    /// `ζ_{p^{n+1}} ↦ ζ_{p^{n+1}}^a`, `ζ_l ↦ ζ_l^b`.
    pub fn galois_full(&self, a: i64, b: i64) -> Result<Self> {
        let p = self.cond.p;
        let mp = self.cond.p_part();
        let a = arith::reduce(a, mp);
        if a % p == 0 {
            return Err(Error::NotAUnit { a: a as i64, p });
        }
        let b = match self.cond.l {
            Some(l) => {
                let b = arith::reduce(b, l);
                if b == 0 {
                    return Err(Error::NotAUnit { a: b as i64, p: l });
                }
                b as usize
            }
            None => 1,
        };
        let ls = self.cond.lslots();
        Ok(self.remap(|i, j| ((i * a as usize) % mp as usize, (j * b) % ls)))
    }

    /// Complex conjugation (`ζ ↦ ζ^{-1}` on every root of unity).
    pub fn conj(&self) -> Self {
        self.galois_full(-1, -1).expect("-1 is a unit")
    }

    /// All automorphisms of the field as `(a, b)` exponent pairs.
    fn automorphisms(&self) -> Vec<(i64, i64)> {
        let mp = self.cond.p_part();
        let bs: Vec<i64> = match self.cond.l {
            Some(l) => (1..l as i64).collect(),
            None => vec![1],
        };
        let mut out = Vec::new();
        for a in arith::units_mod(self.cond.p, mp) {
            for &b in &bs {
                out.push((a as i64, b));
            }
        }
        out
    }

    /// Norm down to `Q`.
    pub fn absolute_norm(&self) -> BigRational {
        let mut acc = Self::one(self.cond);
        for (a, b) in self.automorphisms() {
            acc = acc
                .try_mul(&self.galois_full(a, b).expect("unit"))
                .expect("same conductor");
        }
        acc.as_rational().expect("norm is rational")
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut others = Self::one(self.cond);
        for (a, b) in self.automorphisms().into_iter().skip(1) {
            others = others.try_mul(&self.galois_full(a, b)?)?;
        }
        let norm = self
            .try_mul(&others)?
            .as_rational()
            .expect("norm is rational");
        Ok(others.scale(&norm.recip()))
    }

    /// Includes `k_n` into `k_n(ζ_l)`.
    pub fn embed_composite(&self, l: u64) -> Result<Self> {
        if self.cond.l.is_some() {
            return Err(Error::InvalidTower("already composite".into()));
        }
        let cond = self.cond.with_l(l)?;
        let cols = cond.cols();
        let mut num = vec![BigInt::zero(); cond.dim()];
        for (i, c) in self.num.iter().enumerate() {
            num[i * cols] = c.clone();
        }
        Ok(CycNum {
            cond,
            num,
            den: self.den.clone(),
        })
    }

    /// The inverse of [`embed_composite`](Self::embed_composite); fails unless
    /// the element is fixed by `Gal(k_n(ζ_l)/k_n)`.
    pub fn restrict_to_p_part(&self) -> Result<Self> {
        let cols = self.cond.cols();
        if self.cond.l.is_none() {
            return Ok(self.clone());
        }
        let mut num = Vec::with_capacity(self.cond.rows());
        for i in 0..self.cond.rows() {
            if (1..cols).any(|j| !self.num[i * cols + j].is_zero()) {
                return Err(Error::GaloisInvariance(
                    "element has ζ_l components".into(),
                ));
            }
            num.push(self.num[i * cols].clone());
        }
        Ok(CycNum {
            cond: self.cond.without_l(),
            num,
            den: self.den.clone(),
        })
    }

    /// Includes level `n-1` into level `n` via `ζ_{p^n} = ζ_{p^{n+1}}^p`.
    pub fn raise_level(&self) -> Self {
        let target = self.cond.at_level(self.cond.n + 1);
        let cols = self.cond.cols();
        let tcols = target.cols();
        let mut num = vec![BigInt::zero(); target.dim()];
        for (k, c) in self.num.iter().enumerate() {
            let (i, j) = (k / cols, k % cols);
            num[(i * self.cond.p as usize) * tcols + j] = c.clone();
        }
        CycNum {
            cond: target,
            num,
            den: self.den.clone(),
        }
    }

    /// Re-expresses an element of level `n` lying in level `n-1`.
    pub fn descend_level(&self) -> Result<Self> {
        if self.cond.n == 0 {
            return Err(Error::InvalidTower("cannot descend below level 0".into()));
        }
        let target = self.cond.at_level(self.cond.n - 1);
        let cols = self.cond.cols();
        let p = self.cond.p as usize;
        let mut num = vec![BigInt::zero(); target.dim()];
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (i, j) = (k / cols, k % cols);
            if i % p != 0 {
                return Err(Error::InvalidTower(format!(
                    "element does not lie in level {}",
                    target.n
                )));
            }
            num[(i / p) * cols + j] = c.clone();
        }
        Ok(CycNum {
            cond: target,
            num,
            den: self.den.clone(),
        })
    }

    /// Product of the conjugates over `Gal(k_n/k_{target})` (and over
    /// `Gal(k_n(ζ_l)/k_n)` as well when `drop_l`), expressed in the subfield.
    pub fn relative_norm(&self, target_level: u32, drop_l: bool) -> Result<Self> {
        if target_level > self.cond.n {
            return Err(Error::InvalidTower(format!(
                "target level {} above level {}",
                target_level, self.cond.n
            )));
        }
        if drop_l && self.cond.l.is_none() {
            return Err(Error::InvalidTower("no ζ_l to drop".into()));
        }
        let mut x = self.clone();
        if drop_l {
            let l = self.cond.l.unwrap();
            let mut acc = CycNum::one(x.cond);
            for b in 1..l as i64 {
                acc = acc.try_mul(&x.galois_full(1, b)?)?;
            }
            x = acc.restrict_to_p_part()?;
        }
        let mp = self.cond.p_part();
        let sub = self.cond.p.pow(target_level + 1);
        let mut acc = CycNum::one(x.cond);
        for a in (1..mp).step_by(sub as usize) {
            acc = acc.try_mul(&x.galois(a as i64)?)?;
        }
        for _ in target_level..self.cond.n {
            acc = acc.descend_level()?;
        }
        Ok(acc)
    }

    /// Coefficients as JSON-friendly strings: `[numerators, denominator]`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "conductor": self.cond.to_string(),
            "numerators": self.num.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "denominator": self.den.to_string(),
        })
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycNum[{}](", self.cond)?;
        let cols = self.cond.cols();
        let mut first = true;
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}*z^{}", c, k / cols)?;
            if self.cond.l.is_some() {
                write!(f, "*w^{}", k % cols)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")/{}", self.den)
    }
}

/// `x^β = ∏ σ_a(x)^{c_a}` for `β` with integer coefficients.
pub fn group_ring_power(x: &CycNum, beta: &GrpElt) -> Result<CycNum> {
    let cond = x.conductor();
    if beta.p() != cond.p() || beta.n() != cond.n() {
        return Err(Error::LevelMismatch(beta.n(), cond.n()));
    }
    let coeffs = beta.integer_coeffs().ok_or(Error::NotIntegral)?;
    let mut pos = CycNum::one(cond);
    let mut neg = CycNum::one(cond);
    let mut any_neg = false;
    for (a, c) in coeffs {
        if c.is_zero() {
            continue;
        }
        let e = c.abs().to_u64().expect("exponent fits in u64");
        let term = x.galois(a as i64)?.pow(e);
        if c.is_positive() {
            pos = pos.try_mul(&term)?;
        } else {
            any_neg = true;
            neg = neg.try_mul(&term)?;
        }
    }
    if any_neg {
        if x.is_zero() {
            return Err(Error::DivisionByZero);
        }
        pos = pos.try_mul(&neg.inverse()?)?;
    }
    Ok(pos)
}

/// Decides whether `x / y = (-1)^s ζ_{p^{n+1}}^k`, returning `(s, k)`.
pub fn root_of_unity_ratio(x: &CycNum, y: &CycNum) -> Result<Option<(u8, u64)>> {
    x.check_same(y)?;
    if y.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let mp = y.conductor().p_part();
    let neg_x = x.neg();
    for k in 0..mp {
        let shifted = y.mul_zeta_p(k as i64);
        if &shifted == x {
            return Ok(Some((0, k)));
        }
        if shifted == neg_x {
            return Ok(Some((1, k)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kn(p: u64, n: u32) -> Conductor {
        Conductor::prime_power(p, n).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let c = kn(3, 0);
        let s = CycNum::zeta_p(c, 1).try_add(&CycNum::zeta_p(c, 2)).unwrap();
        assert_eq!(s, CycNum::from_int(c, -1));

        let c5 = kn(5, 0);
        let mut prod = CycNum::one(c5);
        for a in 1..5 {
            let f = CycNum::one(c5).try_sub(&CycNum::zeta_p(c5, a)).unwrap();
            prod = prod.try_mul(&f).unwrap();
        }
        assert_eq!(prod, CycNum::from_int(c5, 5));

        let c9 = kn(3, 1);
        let z3 = CycNum::zeta_p(c9, 1).pow(3);
        assert_eq!(z3, CycNum::zeta_p(c9, 3));
        assert_eq!(CycNum::zeta_p(kn(3, 0), 1).raise_level(), z3);
        // ζ_9^6 = -ζ_9^3 - 1 on the degree-6 basis
        let z6 = CycNum::zeta_p(c9, 6);
        assert_eq!(z6, CycNum::zeta_p(c9, 3).neg().try_sub(&CycNum::one(c9)).unwrap());
    }

    #[test]
    fn galois_examples() {
        let c9 = kn(3, 1);
        let z = CycNum::zeta_p(c9, 1);
        assert_eq!(z.galois(-1).unwrap(), CycNum::zeta_p(c9, -1));
        let c5 = kn(5, 0);
        let x = CycNum::from_power_coeffs(c5, &[1, 1]);
        assert_eq!(x.galois(2).unwrap(), CycNum::from_power_coeffs(c5, &[1, 0, 1]));
        let prod = z.galois(4).unwrap().try_mul(&z.galois(7).unwrap()).unwrap();
        assert_eq!(prod, CycNum::zeta_p(c9, 2));
        assert!(z.galois(3).is_err());
    }

    #[test]
    fn conductor_mismatch_is_an_error() {
        let a = CycNum::one(kn(3, 0));
        let b = CycNum::one(kn(3, 1));
        assert!(matches!(a.try_mul(&b), Err(Error::ConductorMismatch(..))));
    }

    #[test]
    fn relative_norm_examples() {
        let c9 = kn(3, 1);
        let z = CycNum::zeta_p(c9, 1);
        assert_eq!(z.relative_norm(0, false).unwrap(), CycNum::zeta_p(kn(3, 0), 1));
        assert_eq!(z.relative_norm(1, false).unwrap(), z);
        let x = CycNum::one(c9).try_sub(&z).unwrap();
        // oracle: expand ∏_{a ≡ 1 (3)} (1 - ζ_9^a) by hand
        let mut direct = CycNum::one(c9);
        for a in [1, 4, 7] {
            direct = direct
                .try_mul(&CycNum::one(c9).try_sub(&CycNum::zeta_p(c9, a)).unwrap())
                .unwrap();
        }
        let expected = CycNum::one(kn(3, 0))
            .try_sub(&CycNum::zeta_p(kn(3, 0), 1))
            .unwrap();
        assert_eq!(direct.descend_level().unwrap(), expected);
        assert_eq!(x.relative_norm(0, false).unwrap(), expected);
    }

    #[test]
    fn composite_reduction_and_conjugation() {
        let c = Conductor::composite(3, 0, 7).unwrap();
        let mut s = CycNum::zero(c);
        for j in 0..7 {
            s = s.try_add(&CycNum::zeta_l(c, j).unwrap()).unwrap();
        }
        assert!(s.is_zero());
        let w = CycNum::zeta_l(c, 3).unwrap().try_mul(&CycNum::zeta_p(c, 2)).unwrap();
        assert_eq!(w.conj().try_mul(&w).unwrap(), CycNum::one(c));
        let c2 = Conductor::composite(3, 1, 2).unwrap();
        assert_eq!(CycNum::zeta_l(c2, 1).unwrap(), CycNum::from_int(c2, -1));
    }

    #[test]
    fn norm_and_inverse() {
        let c = kn(3, 0);
        let x = CycNum::from_power_coeffs(c, &[3, 1]);
        assert_eq!(x.absolute_norm(), BigRational::from_integer(7.into()));
        let inv = x.inverse().unwrap();
        assert_eq!(inv.try_mul(&x).unwrap(), CycNum::one(c));
        let c5 = kn(5, 0);
        assert_eq!(
            CycNum::from_power_coeffs(c5, &[2, 1]).absolute_norm(),
            BigRational::from_integer(11.into())
        );
        assert_eq!(CycNum::zero(c).inverse(), Err(Error::DivisionByZero));
    }

    #[test]
    fn root_of_unity_ratio_examples() {
        let c9 = kn(3, 1);
        let x = CycNum::from_power_coeffs(c9, &[2, 0, 1, 5]);
        let y = x.mul_zeta_p(2);
        assert_eq!(root_of_unity_ratio(&y, &x).unwrap(), Some((0, 2)));
        assert_eq!(root_of_unity_ratio(&x.neg(), &x).unwrap(), Some((1, 0)));
        let c5 = kn(5, 0);
        let x5 = CycNum::from_power_coeffs(c5, &[1, 2, 3]);
        let unit = CycNum::from_power_coeffs(c5, &[1, 1]);
        assert_eq!(unit.absolute_norm(), BigRational::one());
        let prod = unit.try_mul(&x5).unwrap();
        assert_eq!(root_of_unity_ratio(&prod, &x5).unwrap(), None);
    }

    #[test]
    fn fast_and_slow_products_agree() {
        let c = Conductor::composite(5, 0, 11).unwrap();
        let small = CycNum::from_redundant_coeffs(c, (0..5).map(|i| BigInt::from(3 * i - 4)))
            .try_add(&CycNum::zeta_l(c, 4).unwrap())
            .unwrap();
        let huge = small.scale_int(BigInt::one() << 100usize);
        let a = small.try_mul(&small).unwrap();
        let b = huge.try_mul(&huge).unwrap();
        assert_eq!(b, a.scale_int(BigInt::one() << 200usize));
    }
}
