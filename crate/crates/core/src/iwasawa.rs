//! Truncated elements of `Λ = Z_p[[T]]`, θ-series of odd characters,
//! generalized Bernoulli numbers and the invariants read from them.

use std::collections::BTreeSet;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::json;

use crate::arith;
use crate::error::{Error, Result};
use crate::group_ring::CharPsi;
use crate::padic::{check_odd_prime, int_valuation, mod_inverse, teichmuller, PAdicInt};
use crate::verify::{CheckReport, Status};

/// The ideal an element of `Z/p^N[[T]]` is reduced by.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Reduction {
    /// Modulo `T^D`.
    Truncated(usize),
    /// Modulo `ω_n = (1+T)^{p^n} - 1`.
    Omega(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaPoly {
    p: u64,
    precision: u32,
    reduction: Reduction,
    coeffs: Vec<BigInt>,
}

fn binomial_row(n: u64, modulus: &BigInt) -> Vec<BigInt> {
    // C(n, i) for 0 <= i <= n, exactly, then reduced
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c = BigInt::one();
    for i in 0..=n {
        row.push(c.mod_floor(modulus));
        c = c * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    row
}

/// Coefficients of `ω_n` modulo `p^N`, `p^n + 1` of them.
fn omega_coeffs(p: u64, n: u32, modulus: &BigInt) -> Vec<BigInt> {
    let mut c = binomial_row(p.pow(n), modulus);
    c[0] = BigInt::zero();
    c
}

impl LambdaPoly {
    pub fn new(p: u64, precision: u32, reduction: Reduction, coeffs: Vec<BigInt>) -> Result<Self> {
        check_odd_prime(p)?;
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        let mut f = LambdaPoly {
            p,
            precision,
            reduction,
            coeffs,
        };
        f.reduce();
        Ok(f)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn reduction(&self) -> Reduction {
        self.reduction
    }

    pub fn modulus(&self) -> BigInt {
        BigInt::from(self.p).pow(self.precision)
    }

    /// Number of stored coefficients (`D` or `p^n`).
    pub fn degree_bound(&self) -> usize {
        match self.reduction {
            Reduction::Truncated(d) => d,
            Reduction::Omega(n) => self.p.pow(n) as usize,
        }
    }

    pub fn coeff(&self, i: usize) -> PAdicInt {
        let c = self.coeffs.get(i).cloned().unwrap_or_default();
        PAdicInt::new(self.p, self.precision, c).expect("valid")
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    fn reduce(&mut self) {
        let modulus = self.modulus();
        match self.reduction {
            Reduction::Truncated(d) => {
                self.coeffs.resize(d, BigInt::zero());
            }
            Reduction::Omega(n) => {
                let w = omega_coeffs(self.p, n, &modulus);
                let d = w.len() - 1;
                while self.coeffs.len() > d {
                    let top = self.coeffs.pop().unwrap();
                    if top.is_zero() {
                        continue;
                    }
                    let shift = self.coeffs.len() - d;
                    for (i, wi) in w.iter().take(d).enumerate() {
                        self.coeffs[shift + i] -= &top * wi;
                    }
                }
                self.coeffs.resize(d, BigInt::zero());
            }
        }
        for c in &mut self.coeffs {
            *c = c.mod_floor(&modulus);
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::BadPrime(other.p));
        }
        if self.reduction != other.reduction {
            return Err(Error::Config(format!(
                "reductions differ: {:?} vs {:?}",
                self.reduction, other.reduction
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| {
                self.coeffs.get(i).cloned().unwrap_or_default()
                    + other.coeffs.get(i).cloned().unwrap_or_default()
            })
            .collect();
        Self::new(
            self.p,
            self.precision.min(other.precision),
            self.reduction,
            coeffs,
        )
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len()];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::new(
            self.p,
            self.precision.min(other.precision),
            self.reduction,
            coeffs,
        )
    }

    /// Reduces an `ω_n`-element modulo `ω_k` for `k <= n`.
    pub fn reduce_to_level(&self, k: u32) -> Result<Self> {
        match self.reduction {
            Reduction::Omega(n) if k <= n => {
                Self::new(self.p, self.precision, Reduction::Omega(k), self.coeffs.clone())
            }
            _ => Err(Error::InvalidTower(format!(
                "cannot reduce {:?} to level {k}",
                self.reduction
            ))),
        }
    }

    /// Leading coefficient 1 at the top degree, all lower ones divisible by `p`.
    pub fn is_distinguished(&self) -> bool {
        let Some(top) = self.coeffs.iter().rposition(|c| !c.is_zero()) else {
            return false;
        };
        let p = BigInt::from(self.p);
        self.coeffs[top].is_one() && self.coeffs[..top].iter().all(|c| (c % &p).is_zero())
    }

    /// `f(x)` modulo `p^N`.
    pub fn eval(&self, x: &BigInt) -> BigInt {
        let modulus = self.modulus();
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| (acc * x + c).mod_floor(&modulus))
    }

    fn derivative_eval(&self, x: &BigInt) -> BigInt {
        let modulus = self.modulus();
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(BigInt::zero(), |acc, (i, c)| {
                (acc * x + c * BigInt::from(i)).mod_floor(&modulus)
            })
    }
}

/// `ω_n = (1+T)^{p^n} - 1` with coefficients modulo `p^N`.
pub fn omega_poly(p: u64, n: u32, precision: u32) -> Result<LambdaPoly> {
    check_odd_prime(p)?;
    let modulus = BigInt::from(p).pow(precision);
    let c = omega_coeffs(p, n, &modulus);
    let d = c.len();
    LambdaPoly::new(p, precision, Reduction::Truncated(d), c)
}

/// Exponent `i` of `⟨a⟩ = a / ω(a) = (1+p)^i` modulo `p^{n+1}`, in `[0, p^n)`.
fn gamma_exponents(p: u64, n: u32, precision: u32) -> Result<Vec<(u64, u64, PAdicInt)>> {
    let m = p.pow(n + 1);
    let mut log = vec![u64::MAX; m as usize];
    let mut t = 1u64;
    for i in 0..p.pow(n) {
        log[t as usize] = i;
        t = t * (1 + p) % m;
    }
    let mut out = Vec::new();
    for a in arith::units_mod(p, m) {
        let w = teichmuller(a as i64, p, precision)?;
        let bracket = &PAdicInt::new(p, precision, a)? * &w.inverse()?;
        let r: u64 = (bracket.value() % BigInt::from(m).to_biguint().unwrap())
            .try_into()
            .unwrap();
        let i = log[r as usize];
        debug_assert_ne!(i, u64::MAX);
        out.push((a, i, w));
    }
    Ok(out)
}

/// `e_ψ θ_n` as an element of `Z/p^N[T]/(ω_n)`, via `γ_0 = σ_{1+p} ↦ 1+T`.
pub fn theta_series(psi: &CharPsi, n: u32) -> Result<LambdaPoly> {
    let p = psi.p();
    let big_n = psi.precision();
    let work = big_n + n + 1;
    let m = p.pow(n + 1);
    let pn = p.pow(n);
    let work_mod = BigInt::from(p).pow(work);
    let mut by_gamma = vec![BigInt::zero(); pn as usize];
    let neg_j = (p - 1) - psi.j();
    for (a, i, w) in gamma_exponents(p, n, work)? {
        let term = BigInt::from(a) * BigInt::from(w.pow(neg_j).value().clone());
        by_gamma[i as usize] += term;
    }
    let modulus = BigInt::from(p).pow(big_n);
    let mdiv = BigInt::from(m);
    let mut coeffs = vec![BigInt::zero(); pn as usize];
    for (i, s) in by_gamma.into_iter().enumerate() {
        let s = s.mod_floor(&work_mod);
        let (c, r) = s.div_rem(&mdiv);
        if !r.is_zero() {
            return Err(Error::InvalidCharacter(format!(
                "{psi}: θ-coefficient is not p-integral"
            )));
        }
        // γ_0^{-i} = (1+T)^{(-i) mod p^n}
        let e = (pn - i as u64 % pn) % pn;
        for (k, b) in binomial_row(e, &modulus).into_iter().enumerate() {
            coeffs[k] += &c * b;
        }
    }
    LambdaPoly::new(p, big_n, Reduction::Omega(n), coeffs)
}

/// `B_{1,χ}` for a character of conductor `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BernoulliB1 {
    Integral(PAdicInt),
    /// `χ = ω^{-1}`: `p B_{1,χ}` is a unit and `B_{1,χ}` has valuation `-1`;
    /// holds `p B_{1,χ}` modulo `p^N`.
    NonIntegral(PAdicInt),
}

impl BernoulliB1 {
    /// `p`-adic valuation, `None` when the value vanishes at this precision.
    pub fn valuation(&self) -> Option<i64> {
        match self {
            BernoulliB1::Integral(x) => x.valuation().map(i64::from),
            BernoulliB1::NonIntegral(_) => Some(-1),
        }
    }
}

/// `B_{1,ω^i} = p^{-1} Σ_{a=1}^{p-1} a ω^i(a)` at precision `N`.
pub fn bernoulli_b1(p: u64, i: i64, precision: u32) -> Result<BernoulliB1> {
    check_odd_prime(p)?;
    if precision == 0 {
        return Err(Error::ZeroPrecision);
    }
    let i = arith::reduce(i, p - 1);
    if i == 0 {
        return Err(Error::InvalidCharacter("trivial character".into()));
    }
    let work = precision + 1;
    let modulus = BigInt::from(p).pow(work);
    let mut s = BigInt::zero();
    for a in 1..p {
        let w = teichmuller(a as i64, p, work)?.pow(i);
        s += BigInt::from(a) * BigInt::from(w.value().clone());
    }
    let s = s.mod_floor(&modulus);
    let pb = BigInt::from(p);
    if i == p - 2 {
        let v = PAdicInt::new(p, precision, s.mod_floor(&pb.pow(precision)))?;
        return Ok(BernoulliB1::NonIntegral(v));
    }
    let (q, r) = s.div_rem(&pb);
    if !r.is_zero() {
        return Err(Error::InvalidCharacter(format!(
            "B_1 of ω^{i} is unexpectedly non-integral"
        )));
    }
    Ok(BernoulliB1::Integral(PAdicInt::new(p, precision, q)?))
}

/// Bernoulli numbers `B_0..=B_k` modulo `p` (valid while `k < p - 1`).
fn bernoulli_mod_p(p: u64, k: u64) -> Vec<u64> {
    let mut b = vec![1u64];
    for n in 1..=k {
        // Σ_{i=0}^{n} C(n+1, i) B_i = 0
        let mut binom = 1u64; // C(n+1, 0)
        let mut s = 0u64;
        for (i, &bi) in b.iter().enumerate() {
            s = (s + arith::mul_mod(binom, bi, p)) % p;
            binom = arith::mul_mod(binom, (n + 1 - i as u64) % p, p);
            binom = arith::mul_mod(binom, arith::inv_mod((i as u64 + 1) % p, p).unwrap(), p);
        }
        let inv = arith::inv_mod((n + 1) % p, p).unwrap();
        b.push(arith::mul_mod((p - s) % p, inv, p));
    }
    b
}

/// Even `k` with `2 <= k <= p - 3` and `p | B_k`, by the Bernoulli recurrence.
pub fn irregular_indices(p: u64) -> Result<BTreeSet<u64>> {
    check_odd_prime(p)?;
    if p < 5 {
        return Ok(BTreeSet::new());
    }
    let b = bernoulli_mod_p(p, p - 3);
    Ok((2..=p - 3).step_by(2).filter(|&k| b[k as usize] == 0).collect())
}

/// The same set via `B_{1,ω^{k-1}} ≡ B_k / k (mod p)`.
pub fn irregular_indices_via_b1(p: u64) -> Result<BTreeSet<u64>> {
    check_odd_prime(p)?;
    let mut out = BTreeSet::new();
    if p < 5 {
        return Ok(out);
    }
    for k in (2..=p - 3).step_by(2) {
        match bernoulli_b1(p, k as i64 - 1, 2)? {
            BernoulliB1::Integral(x) if !x.is_unit() => {
                out.insert(k);
            }
            _ => {}
        }
    }
    Ok(out)
}

/// `(λ, μ)`: `μ = min v_p(c_i)`, `λ` the least index attaining it.
pub fn lambda_mu(f: &LambdaPoly) -> Result<(u32, u32)> {
    let mut best: Option<(u32, u32)> = None;
    for (i, c) in f.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let v = int_valuation(c, f.p);
        if best.map_or(true, |(_, mu)| v < mu) {
            best = Some((i as u32, v));
        }
    }
    best.ok_or_else(|| Error::InsufficientPrecision("series vanishes at this precision".into()))
}

/// `(λ, μ)` of `build(N)`, doubling `N` until two consecutive precisions
/// agree with `N >= μ + 2` and `λ` below the degree bound.
pub fn stable_lambda_mu(
    mut build: impl FnMut(u32) -> Result<LambdaPoly>,
    start: u32,
) -> Result<((u32, u32), u32)> {
    let mut n = start.max(1);
    let mut prev: Option<(u32, u32)> = None;
    for _ in 0..8 {
        let f = build(n)?;
        let cur = lambda_mu(&f).ok();
        if let (Some(a), Some(b)) = (prev, cur) {
            if a == b && n >= b.1 + 2 && (b.0 as usize) < f.degree_bound() {
                return Ok((b, n));
            }
        }
        prev = cur;
        n *= 2;
    }
    Err(Error::InsufficientPrecision(format!(
        "λ/μ not stable up to precision {n}"
    )))
}

/// Valuation of the determinant of a square matrix over `Z/p^N`, by
/// full-pivot elimination.
fn det_valuation(mut a: Vec<Vec<BigInt>>, p: u64, precision: u32) -> Result<u32> {
    let modulus = BigInt::from(p).pow(precision);
    let pb = BigInt::from(p);
    let size = a.len();
    let mut total = 0u32;
    for k in 0..size {
        let mut best: Option<(usize, usize, u32)> = None;
        for (i, row) in a.iter().enumerate().skip(k) {
            for (j, x) in row.iter().enumerate().skip(k) {
                if x.is_zero() {
                    continue;
                }
                let v = int_valuation(x, p);
                if best.map_or(true, |b| v < b.2) {
                    best = Some((i, j, v));
                }
            }
        }
        let (pi, pj, v) = best.ok_or_else(|| {
            Error::InsufficientPrecision(format!("determinant vanishes mod {p}^{precision}"))
        })?;
        total += v;
        a.swap(k, pi);
        for row in a.iter_mut() {
            row.swap(k, pj);
        }
        let scale = pb.pow(v);
        let unit = &a[k][k] / &scale;
        let unit_inv = mod_inverse(&unit, &modulus).expect("unit");
        for i in k + 1..size {
            if a[i][k].is_zero() {
                continue;
            }
            let factor = (&a[i][k] / &scale * &unit_inv).mod_floor(&modulus);
            for j in k..size {
                let t = &factor * &a[k][j];
                a[i][j] = (&a[i][j] - t).mod_floor(&modulus);
            }
        }
    }
    Ok(total)
}

/// `v_p(det)` of multiplication by `f` on `Z/p^N[T]/(ω_n)`.
pub fn multiplication_det_valuation(f: &LambdaPoly) -> Result<u32> {
    let Reduction::Omega(n) = f.reduction else {
        return Err(Error::Config("needs an ω_n-reduced element".into()));
    };
    let d = f.p.pow(n) as usize;
    let mut cols = Vec::with_capacity(d);
    for k in 0..d {
        let mut t = vec![BigInt::zero(); k + 1];
        t[k] = BigInt::one();
        let basis = LambdaPoly::new(f.p, f.precision, f.reduction, t)?;
        cols.push(f.try_mul(&basis)?.coeffs);
    }
    let matrix: Vec<Vec<BigInt>> = (0..d)
        .map(|i| (0..d).map(|j| cols[j][i].clone()).collect())
        .collect();
    det_valuation(matrix, f.p, f.precision)
}

/// `Σ_{k=0}^{n} v_π(f(ζ_{p^k} - 1))`, each term computed in
/// `Z/p^N[π]/(Φ_{p^k}(1 - π))` with `T = -π`.
pub fn specialization_valuations(f: &LambdaPoly) -> Result<Vec<u32>> {
    let Reduction::Omega(n) = f.reduction else {
        return Err(Error::Config("needs an ω_n-reduced element".into()));
    };
    let p = f.p;
    let modulus = f.modulus();
    let mut out = Vec::new();
    for k in 0..=n {
        // E_k(π) = Φ_{p^k}(1 - π), monic of degree φ(p^k) up to sign
        let e = eisenstein(p, k, &modulus);
        let deg = e.len() - 1;
        // f(-π) reduced mod E_k
        let mut g: Vec<BigInt> = f
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
            .collect();
        while g.len() > deg {
            let top = g.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let shift = g.len() - deg;
            for (i, ei) in e.iter().take(deg).enumerate() {
                g[shift + i] -= &top * ei;
            }
        }
        let phi = deg as u32;
        let v = g
            .iter()
            .enumerate()
            .filter_map(|(i, c)| {
                let c = c.mod_floor(&modulus);
                (!c.is_zero()).then(|| phi * int_valuation(&c, p) + i as u32)
            })
            .min();
        let v = v.ok_or_else(|| {
            Error::InsufficientPrecision(format!("specialization at level {k} vanishes"))
        })?;
        if v >= phi * f.precision {
            return Err(Error::InsufficientPrecision(format!(
                "specialization at level {k} beyond precision"
            )));
        }
        out.push(v);
    }
    Ok(out)
}

/// `Φ_{p^k}(1 - π)` as a monic polynomial in `π` modulo `modulus`.
fn eisenstein(p: u64, k: u32, modulus: &BigInt) -> Vec<BigInt> {
    if k == 0 {
        // Φ_1(x) = x - 1 at x = 1 - π gives -π; normalise to π
        return vec![BigInt::zero(), BigInt::one()];
    }
    let step = p.pow(k - 1);
    let deg = ((p - 1) * step) as usize;
    let mut out = vec![BigInt::zero(); deg + 1];
    for j in 0..p {
        // (1 - π)^{j step}
        let e = j * step;
        for (i, b) in binomial_row(e, modulus).into_iter().enumerate() {
            if i % 2 == 1 {
                out[i] -= b;
            } else {
                out[i] += b;
            }
        }
    }
    let lead = out[deg].clone();
    let inv = mod_inverse(&lead, modulus).expect("leading coefficient ±1");
    out.iter().map(|c| (c * &inv).mod_floor(modulus)).collect()
}

/// Compares the determinant valuation of `e_ψθ_n` on `Z_p[T]/ω_n` with the
/// sum of its specialization valuations.
pub fn coker_order_check(psi: &CharPsi, n: u32) -> CheckReport {
    let start = Instant::now();
    let params = json!({"p": psi.p(), "psi": psi.to_string(), "n": n, "N": psi.precision()});
    let outcome = (|| -> Result<(u32, Vec<u32>)> {
        let f = theta_series(psi, n)?;
        let e = multiplication_det_valuation(&f)?;
        let spec = specialization_valuations(&f)?;
        Ok((e, spec))
    })();
    let (status, witness) = match outcome {
        Ok((e, spec)) => {
            let e2: u32 = spec.iter().sum();
            let status = if e == e2 { Status::Pass } else { Status::Fail };
            (status, json!({"e": e, "e_prime": e2, "per_level": spec}))
        }
        Err(err) => (Status::Fail, json!({"error": err.to_string()})),
    };
    CheckReport::new("coker_order", params, status, witness, start)
}

/// Status of the minimal polynomial `M(T)` of a `ψ`-component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MinimalPoly {
    /// `B_{1,ψ^{-1}}` is a unit, so the component is trivial and `M = 1`.
    Trivial,
    /// `M = T - r` with `r` known modulo `p^{valid_digits}`, assuming the
    /// component is cyclic.
    Conditional {
        root: String,
        valid_digits: u32,
        coprime_to_omega: bool,
    },
    Undetermined { lambda: u32, mu: u32 },
    NoValidCharacter { reason: String },
}

/// Classifies `M(T)` for `ψ = ω^j` from `B_{1,ψ^{-1}}` and the level-1
/// θ-series.
pub fn minimal_poly_report(p: u64, j: i64, precision: u32) -> MinimalPoly {
    let psi = match CharPsi::new(p, j, precision) {
        Ok(psi) => psi,
        Err(e) => {
            let reason = if p == 3 {
                "no valid ψ".to_string()
            } else {
                e.to_string()
            };
            return MinimalPoly::NoValidCharacter { reason };
        }
    };
    let b1 = match bernoulli_b1(p, -(psi.j() as i64), precision) {
        Ok(b) => b,
        Err(e) => {
            return MinimalPoly::NoValidCharacter {
                reason: e.to_string(),
            }
        }
    };
    if b1.valuation() == Some(0) {
        return MinimalPoly::Trivial;
    }
    let level = 1;
    let Ok(f) = theta_series(&psi, level) else {
        return MinimalPoly::Undetermined { lambda: 0, mu: 0 };
    };
    let (lambda, mu) = lambda_mu(&f).unwrap_or((0, 0));
    if (lambda, mu) != (1, 0) {
        return MinimalPoly::Undetermined { lambda, mu };
    }
    // Newton from 0: f(0) has valuation 1 and f'(0) is a unit
    let modulus = f.modulus();
    let mut r = BigInt::zero();
    for _ in 0..2 * precision + 2 {
        let fr = f.eval(&r);
        let dr = f.derivative_eval(&r);
        let inv = mod_inverse(&dr, &modulus).expect("unit derivative");
        r = (&r - fr * inv).mod_floor(&modulus);
    }
    let valid = precision.min(level + 1);
    let root = r.mod_floor(&BigInt::from(p).pow(valid));
    let candidate = LambdaPoly::new(
        p,
        valid,
        Reduction::Omega(level),
        vec![(-root.clone()).mod_floor(&BigInt::from(p).pow(valid)), BigInt::one()],
    )
    .expect("valid");
    let coprime = !root.is_zero() && specialization_valuations(&candidate).is_ok();
    MinimalPoly::Conditional {
        root: root.to_string(),
        valid_digits: valid,
        coprime_to_omega: coprime,
    }
}
