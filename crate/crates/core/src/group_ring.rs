//! The group rings `Q[G_n]` and `Z/p^N[Δ]` for `G_n = (Z/p^{n+1})^*`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith;
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::padic::{check_odd_prime, teichmuller, PAdicInt};

/// `Σ c_a σ_a` with rational coefficients, stored densely over `0..p^{n+1}`
/// (non-units always zero).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GrpElt {
    p: u64,
    n: u32,
    coeffs: Vec<BigRational>,
}

impl GrpElt {
    pub fn zero(p: u64, n: u32) -> Result<Self> {
        check_odd_prime(p)?;
        Ok(GrpElt {
            p,
            n,
            coeffs: vec![BigRational::zero(); p.pow(n + 1) as usize],
        })
    }

    /// The identity `σ_1`.
    pub fn one(p: u64, n: u32) -> Result<Self> {
        Self::sigma(p, n, 1)
    }

    pub fn sigma(p: u64, n: u32, a: i64) -> Result<Self> {
        let mut x = Self::zero(p, n)?;
        let a = x.unit(a)?;
        x.coeffs[a as usize] = BigRational::one();
        Ok(x)
    }

    /// Integer multiple of the identity.
    pub fn scalar(p: u64, n: u32, k: impl Into<BigInt>) -> Result<Self> {
        Ok(Self::one(p, n)?.scale_int(k))
    }

    pub fn from_coeffs(
        p: u64,
        n: u32,
        terms: impl IntoIterator<Item = (i64, BigRational)>,
    ) -> Result<Self> {
        let mut x = Self::zero(p, n)?;
        for (a, c) in terms {
            let a = x.unit(a)?;
            x.coeffs[a as usize] += c;
        }
        Ok(x)
    }

    pub fn from_int_coeffs(p: u64, n: u32, terms: &[(i64, i64)]) -> Result<Self> {
        Self::from_coeffs(
            p,
            n,
            terms
                .iter()
                .map(|&(a, c)| (a, BigRational::from_integer(c.into()))),
        )
    }

    fn unit(&self, a: i64) -> Result<u64> {
        let a = arith::reduce(a, self.m());
        if a % self.p == 0 {
            return Err(Error::NotAUnit {
                a: a as i64,
                p: self.p,
            });
        }
        Ok(a)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `p^{n+1}`.
    pub fn m(&self) -> u64 {
        self.p.pow(self.n + 1)
    }

    pub fn coeff(&self, a: i64) -> BigRational {
        let a = arith::reduce(a, self.m());
        self.coeffs[a as usize].clone()
    }

    /// Nonzero terms in increasing order of `a`.
    pub fn terms(&self) -> impl Iterator<Item = (u64, &BigRational)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(a, c)| (a as u64, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// All unit coefficients as integers, or `None` if some is fractional.
    pub fn integer_coeffs(&self) -> Option<Vec<(u64, BigInt)>> {
        arith::units_mod(self.p, self.m())
            .into_iter()
            .map(|a| {
                let c = &self.coeffs[a as usize];
                c.is_integer().then(|| (a, c.to_integer()))
            })
            .collect()
    }

    pub fn augmentation(&self) -> BigRational {
        self.coeffs.iter().sum()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.p != other.p || self.n != other.n {
            return Err(Error::LevelMismatch(self.n, other.n));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(GrpElt {
            p: self.p,
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        GrpElt {
            p: self.p,
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        GrpElt {
            p: self.p,
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    pub fn scale_int(&self, k: impl Into<BigInt>) -> Self {
        self.scale(&BigRational::from_integer(k.into()))
    }

    /// Convolution, `σ_a σ_b = σ_{ab}`.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let m = self.m();
        let mut out = vec![BigRational::zero(); m as usize];
        let rhs: Vec<(u64, &BigRational)> = other.terms().collect();
        for (a, x) in self.terms() {
            for &(b, y) in &rhs {
                out[(a * b % m) as usize] += x * y;
            }
        }
        Ok(GrpElt {
            p: self.p,
            n: self.n,
            coeffs: out,
        })
    }

    /// `σ_b · x`.
    pub fn shift(&self, b: i64) -> Result<Self> {
        let b = self.unit(b)?;
        let m = self.m();
        let mut out = vec![BigRational::zero(); m as usize];
        for (a, c) in self.terms() {
            out[(a * b % m) as usize] = c.clone();
        }
        Ok(GrpElt {
            p: self.p,
            n: self.n,
            coeffs: out,
        })
    }

    /// `σ_{-1} · x`.
    pub fn conj(&self) -> Self {
        self.shift(-1).expect("-1 is a unit")
    }

    /// `(1 - σ_{-1}) x / 2`.
    pub fn minus_part(&self) -> Self {
        self.try_sub(&self.conj())
            .unwrap()
            .scale(&BigRational::new(1.into(), 2.into()))
    }

    /// `(1 + σ_{-1}) x / 2`.
    pub fn plus_part(&self) -> Self {
        self.try_add(&self.conj())
            .unwrap()
            .scale(&BigRational::new(1.into(), 2.into()))
    }

    /// `(1 - σ_{-1}) x`, the integral minus lift.
    pub fn minus_lift(&self) -> Self {
        self.try_sub(&self.conj()).unwrap()
    }

    /// Image under `Q[G_n] → Q[G_{n-1}]`.
    pub fn restriction(&self) -> Result<Self> {
        if self.n == 0 {
            return Err(Error::LevelZero("restriction"));
        }
        let mut out = Self::zero(self.p, self.n - 1)?;
        let m1 = out.m();
        for (a, c) in self.terms() {
            out.coeffs[(a % m1) as usize] += c;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let map: BTreeMap<String, String> = self
            .terms()
            .map(|(a, c)| (a.to_string(), c.to_string()))
            .collect();
        serde_json::json!(map)
    }
}

impl fmt::Debug for GrpElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GrpElt[{}^{}](", self.p, self.n + 1)?;
        let mut first = true;
        for (a, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}*s{a}")?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

/// `θ_n = p^{-(n+1)} Σ a σ_a^{-1}`.
pub fn theta(p: u64, n: u32) -> Result<GrpElt> {
    let mut x = GrpElt::zero(p, n)?;
    let m = x.m();
    for a in arith::units_mod(p, m) {
        let inv = arith::inv_mod(a, m).unwrap();
        x.coeffs[inv as usize] = BigRational::new(a.into(), m.into());
    }
    Ok(x)
}

/// `N_n = Σ_a σ_a`.
pub fn norm_element(p: u64, n: u32) -> Result<GrpElt> {
    let mut x = GrpElt::zero(p, n)?;
    for a in arith::units_mod(p, x.m()) {
        x.coeffs[a as usize] = BigRational::one();
    }
    Ok(x)
}

/// `N_n^+ = Σ_{a < p^{n+1}/2} σ_a`, a lift of the norm of `G_n/{±1}`.
pub fn norm_plus(p: u64, n: u32) -> Result<GrpElt> {
    let mut x = GrpElt::zero(p, n)?;
    let m = x.m();
    for a in arith::units_mod(p, m) {
        if 2 * a < m {
            x.coeffs[a as usize] = BigRational::one();
        }
    }
    Ok(x)
}

/// Generators `t - σ_t` (`1 <= t < p^{n+1}`, `p ∤ t`) and `p^{n+1}` of `S'_n`.
pub fn sprime_generators(p: u64, n: u32) -> Result<Vec<GrpElt>> {
    let m = p.pow(n + 1);
    let mut gens = Vec::new();
    for t in arith::units_mod(p, m) {
        gens.push(GrpElt::scalar(p, n, t)?.try_sub(&GrpElt::sigma(p, n, t as i64)?)?);
    }
    gens.push(GrpElt::scalar(p, n, m)?);
    Ok(gens)
}

fn int_vector(x: &GrpElt) -> Option<Vec<BigInt>> {
    x.integer_coeffs()
        .map(|v| v.into_iter().map(|(_, c)| c).collect())
}

/// The lattice `S'_n ⊂ Z[G_n] ≅ Z^{φ(p^{n+1})}`.
pub fn sprime_lattice(p: u64, n: u32) -> Result<Lattice> {
    let gens = sprime_generators(p, n)?;
    let dim = arith::euler_phi(p.pow(n + 1)) as usize;
    Ok(Lattice::span(dim, gens.iter().map(|g| int_vector(g).unwrap())))
}

/// `β = k p^{n+1} + Σ_t x_t (t - σ_t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub modulus_multiplier: BigInt,
    pub multipliers: Vec<(u64, BigInt)>,
}

impl Certificate {
    pub fn expand(&self, p: u64, n: u32) -> Result<GrpElt> {
        let m = p.pow(n + 1);
        let mut acc = GrpElt::scalar(p, n, &self.modulus_multiplier * BigInt::from(m))?;
        for (t, x) in &self.multipliers {
            let g = GrpElt::scalar(p, n, *t)?.try_sub(&GrpElt::sigma(p, n, *t as i64)?)?;
            acc = acc.try_add(&g.scale_int(x.clone()))?;
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "modulus_multiplier": self.modulus_multiplier.to_string(),
            "multipliers": self
                .multipliers
                .iter()
                .filter(|(_, x)| !x.is_zero())
                .map(|(t, x)| (t.to_string(), x.to_string()))
                .collect::<BTreeMap<_, _>>(),
        })
    }
}

/// Membership of an integral `β` in `S'_n`, decided by lattice reduction;
/// members come with a verified expansion in the generators.
pub fn sprime_membership(beta: &GrpElt) -> Result<Option<Certificate>> {
    let v = int_vector(beta).ok_or(Error::NotIntegral)?;
    let lattice = sprime_lattice(beta.p, beta.n)?;
    if !lattice.contains(&v) {
        return Ok(None);
    }
    // β = Σ x_a σ_a = (Σ a x_a) - Σ x_a (a - σ_a), and Σ a x_a ∈ m Z
    let m = BigInt::from(beta.m());
    let mut weight = BigInt::zero();
    let mut multipliers = Vec::new();
    for (a, x) in beta.integer_coeffs().unwrap() {
        weight += BigInt::from(a) * &x;
        multipliers.push((a, -x));
    }
    let cert = Certificate {
        modulus_multiplier: weight / &m,
        multipliers,
    };
    if &cert.expand(beta.p, beta.n)? != beta {
        return Err(Error::NotInSPrime);
    }
    Ok(Some(cert))
}

/// `βθ_n`, which must be integral.
pub fn stickelberger_multiply(beta: &GrpElt) -> Result<GrpElt> {
    let prod = beta.try_mul(&theta(beta.p, beta.n)?)?;
    if !prod.is_integral() {
        return Err(Error::NotInSPrime);
    }
    Ok(prod)
}

/// Whether an integral `β` lies in `N_n^+ Z + Z[G_n]^-`: equivalently
/// `c_a + c_{-a}` is the same integer for every `a`.
pub fn beta_residence_check(beta: &GrpElt) -> Result<bool> {
    let coeffs = beta.integer_coeffs().ok_or(Error::NotIntegral)?;
    let mut common: Option<BigInt> = None;
    for (a, c) in &coeffs {
        let s = c + beta.coeff(-(*a as i64)).to_integer();
        match &common {
            None => common = Some(s),
            Some(k) if *k != s => return Ok(false),
            _ => {}
        }
    }
    Ok(true)
}

/// An odd character `ψ = ω^j` of `Δ` with `ψ ≠ ω`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharPsi {
    p: u64,
    j: u64,
    precision: u32,
}

impl CharPsi {
    pub fn new(p: u64, j: i64, precision: u32) -> Result<Self> {
        check_odd_prime(p)?;
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        if p == 3 {
            return Err(Error::InvalidCharacter(
                "p = 3 has no odd character other than ω".into(),
            ));
        }
        let j = arith::reduce(j, p - 1);
        if j % 2 == 0 {
            return Err(Error::InvalidCharacter(format!("ω^{j} is even")));
        }
        if j == 1 {
            return Err(Error::InvalidCharacter("ψ = ω is excluded".into()));
        }
        Ok(CharPsi { p, j, precision })
    }

    /// Every valid `ψ` for `p`.
    pub fn all(p: u64, precision: u32) -> Vec<CharPsi> {
        (3..p.saturating_sub(1))
            .step_by(2)
            .filter_map(|j| CharPsi::new(p, j as i64, precision).ok())
            .collect()
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn j(&self) -> u64 {
        self.j
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// `ψ(σ_a) = ω(a)^j`.
    pub fn value(&self, a: i64) -> Result<PAdicInt> {
        Ok(teichmuller(a, self.p, self.precision)?.pow(self.j))
    }
}

impl fmt::Display for CharPsi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "omega^{}", self.j)
    }
}

/// An element of `Z/p^N[Δ]`, indexed by `a mod p` for `1 <= a < p`.
pub type DeltaElt = BTreeMap<u64, PAdicInt>;

/// `e_ψ = |Δ|^{-1} Σ_δ ψ(δ) δ^{-1}`.
pub fn idempotent(psi: &CharPsi) -> Result<DeltaElt> {
    character_idempotent(psi.p, psi.j as i64, psi.precision)
}

/// The idempotent of `ω^j` for any `j`, even or odd.
pub fn character_idempotent(p: u64, j: i64, precision: u32) -> Result<DeltaElt> {
    check_odd_prime(p)?;
    let j = arith::reduce(j, p - 1);
    let inv_order = PAdicInt::new(p, precision, p - 1)?.inverse()?;
    let mut out = DeltaElt::new();
    for a in 1..p {
        let inv = arith::inv_mod(a, p).unwrap();
        let c = teichmuller(inv as i64, p, precision)?.pow(j);
        out.insert(a, &c * &inv_order);
    }
    Ok(out)
}

/// Product in `Z/p^N[Δ]`.
pub fn delta_mul(x: &DeltaElt, y: &DeltaElt) -> DeltaElt {
    let mut out = DeltaElt::new();
    for (&a, u) in x {
        for (&b, v) in y {
            let k = a * b % u.p();
            let t = u * v;
            let s = match out.remove(&k) {
                Some(prev) => &prev + &t,
                None => t,
            };
            out.insert(k, s);
        }
    }
    out
}

/// The group element as `Σ c_a σ_a` with `c_a` given as `(a, c)` strings,
/// convenient for reports.
pub fn terms_string(x: &GrpElt) -> String {
    let parts: Vec<String> = x
        .terms()
        .map(|(a, c)| {
            if c.is_one() {
                format!("s{a}")
            } else {
                format!("{c}*s{a}")
            }
        })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// Sum of `|c_a|`, the number of factors a power product needs.
pub fn weight(x: &GrpElt) -> u64 {
    x.terms()
        .map(|(_, c)| c.abs().to_integer().to_u64().unwrap_or(u64::MAX))
        .fold(0u64, |a, b| a.saturating_add(b))
}
