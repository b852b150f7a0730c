use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{Conductor, CycNum};
use crate::arith;
use crate::error::{Error, Result};
use crate::fq::{self, poly, Fq};
use crate::padic::int_valuation;

/// Levels `(p, n)` whose field `Q(ζ_{p^{n+1}})` has class number one.
pub const WHITELIST: [(u64, u32); 6] = [(3, 0), (3, 1), (3, 2), (5, 0), (5, 1), (7, 0)];

/// Valuation of `σ_a(x)` at the chosen prime, keyed by coset
/// representatives `a` of `⟨l⟩` in `(Z/p^{n+1})^*`.
pub type ValuationTable = BTreeMap<u64, i64>;

const MAX_DOUBLINGS: u32 = 10;

#[derive(Clone, Debug)]
pub struct PrimeSite {
    l: u64,
    p: u64,
    n: u32,
    f: u32,
    q: u64,
    q_max: u64,
    g_poly: Vec<u64>,
    fq: Arc<Fq>,
    chi_exponent: u64,
    hensel_exponent: u32,
    hensel_factor: Vec<BigInt>,
}

impl PrimeSite {
    /// Site for the prime above `l` cut out by the lexicographically least
    /// irreducible factor of `Φ_{p^{n+1}}` mod `l`.
    pub fn new(l: u64, p: u64, n: u32, hensel: u32, q_max: u64) -> Result<Self> {
        let cond = check_site_args(l, p, n, hensel)?;
        let m = cond.p_part();
        let f = arith::multiplicative_order(l % m, m) as u32;
        fq::checked_q(l, f, q_max)?;
        let g_poly = least_factor(l, m, f);
        Self::with_factor(l, p, n, &g_poly, hensel, q_max)
    }

    /// Site for the prime `(l, g_poly(ζ))`.
    pub fn with_factor(
        l: u64,
        p: u64,
        n: u32,
        g_poly: &[u64],
        hensel: u32,
        q_max: u64,
    ) -> Result<Self> {
        let cond = check_site_args(l, p, n, hensel)?;
        let m = cond.p_part();
        let f = arith::multiplicative_order(l % m, m) as u32;
        if g_poly.len() != f as usize + 1 {
            return Err(Error::Config(format!(
                "factor of degree {} but residue degree is {f}",
                g_poly.len() - 1
            )));
        }
        let field = Fq::new(l, g_poly, q_max)?;
        Self::assemble(l, p, n, g_poly.to_vec(), Arc::new(field), hensel, q_max)
    }

    fn assemble(
        l: u64,
        p: u64,
        n: u32,
        g_poly: Vec<u64>,
        field: Arc<Fq>,
        hensel: u32,
        q_max: u64,
    ) -> Result<Self> {
        let m = p.pow(n + 1);
        let q = field.q();
        let y = field.y();
        let step = (q - 1) / m;
        let s = field.dlog(y).expect("y is nonzero");
        if s % step != 0 || field.pow(y, m) != 1 || field.pow(y, m / p) == 1 {
            return Err(Error::Config(format!(
                "factor {g_poly:?} does not divide Φ_{m} mod {l}"
            )));
        }
        let s_unit = s / step;
        let inv = arith::inv_mod(s_unit % m, m).expect("y is a primitive root of unity");
        let chi_exponent = (m - inv) % m;
        let hensel_factor = hensel_factor(l, &g_poly, q, hensel);
        Ok(PrimeSite {
            l,
            p,
            n,
            f: field.degree(),
            q,
            q_max,
            g_poly,
            fq: field,
            chi_exponent,
            hensel_exponent: hensel,
            hensel_factor,
        })
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Residue degree.
    pub fn f(&self) -> u32 {
        self.f
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn q_max(&self) -> u64 {
        self.q_max
    }

    /// `p^{n+1}`.
    pub fn m(&self) -> u64 {
        self.p.pow(self.n + 1)
    }

    pub fn conductor(&self) -> Conductor {
        Conductor::prime_power(self.p, self.n).expect("validated")
    }

    pub fn composite_conductor(&self) -> Conductor {
        Conductor::composite(self.p, self.n, self.l).expect("validated")
    }

    pub fn g_poly(&self) -> &[u64] {
        &self.g_poly
    }

    pub fn field(&self) -> &Fq {
        &self.fq
    }

    pub fn fq_generator(&self) -> u32 {
        self.fq.generator()
    }

    pub fn is_split(&self) -> bool {
        self.f == 1
    }

    /// `t_0` with `χ(g^k) = ζ^{t_0 k}` for the field generator `g`.
    pub fn chi_exponent(&self) -> u64 {
        self.chi_exponent
    }

    pub fn hensel_exponent(&self) -> u32 {
        self.hensel_exponent
    }

    pub fn hensel_modulus(&self) -> BigInt {
        BigInt::from(self.l).pow(self.hensel_exponent)
    }

    pub fn hensel_factor(&self) -> &[BigInt] {
        &self.hensel_factor
    }

    /// Same prime with the Hensel data lifted to `l^hensel`.
    pub fn with_hensel(&self, hensel: u32) -> Self {
        let mut s = self.clone();
        s.hensel_exponent = hensel.max(1);
        s.hensel_factor = hensel_factor(self.l, &self.g_poly, self.q, s.hensel_exponent);
        s
    }

    /// `χ(x)` as an exponent of `ζ_{p^{n+1}}`.
    pub fn chi(&self, x: u32) -> Result<u64> {
        let k = self
            .fq
            .dlog(x)
            .ok_or_else(|| Error::Config("χ(0) is undefined".into()))?;
        let m = self.m();
        Ok(((k % m) * self.chi_exponent) % m)
    }

    /// Coset representatives (least elements) of `⟨l⟩` in `(Z/p^{n+1})^*`.
    pub fn coset_reps(&self) -> Vec<u64> {
        let m = self.m();
        arith::units_mod(self.p, m)
            .into_iter()
            .filter(|&a| self.coset_rep(a) == a)
            .collect()
    }

    /// Least element of `a⟨l⟩`.
    pub fn coset_rep(&self, a: u64) -> u64 {
        let m = self.m();
        let mut best = a % m;
        let mut t = a % m;
        for _ in 1..self.f {
            t = t * (self.l % m) % m;
            best = best.min(t);
        }
        best
    }

    /// The site of `σ_a(𝔩)`.
    pub fn conjugate(&self, a: i64) -> Result<Self> {
        let m = self.m();
        let a = arith::reduce(a, m);
        let inv = arith::inv_mod(a, m).ok_or(Error::NotAUnit { a: a as i64, p: self.p })?;
        let g = self.fq.minpoly(self.fq.pow(self.fq.y(), inv));
        Self::with_factor(self.l, self.p, self.n, &g, self.hensel_exponent, self.q_max)
    }

    /// The site at level `n-1` lying under this one.
    pub fn descend(&self) -> Result<Self> {
        if self.n == 0 {
            return Err(Error::LevelZero("descend"));
        }
        let g = self.fq.minpoly(self.fq.pow(self.fq.y(), self.p));
        Self::with_factor(self.l, self.p, self.n - 1, &g, self.hensel_exponent, self.q_max)
    }

    /// Reduction of an integral element of `Z[ζ_{p^{n+1}}]` into `F_q`.
    pub fn reduce(&self, x: &CycNum) -> Result<u32> {
        self.check_level(x)?;
        if int_valuation(x.denominator(), self.l) > 0 {
            return Err(Error::DenominatorAtL(self.l));
        }
        let l = BigInt::from(self.l);
        let den_inv = {
            let d = x.denominator().mod_floor(&l);
            let d: u64 = d.try_into().unwrap();
            arith::inv_mod(d, self.l).unwrap()
        };
        let coeffs: Vec<u64> = x
            .numerators()
            .iter()
            .map(|c| {
                let r: u64 = c.mod_floor(&l).try_into().unwrap();
                arith::mul_mod(r, den_inv, self.l)
            })
            .collect();
        Ok(self
            .fq
            .encode(&poly::rem(&poly::trim(coeffs), &self.g_poly, self.l)))
    }

    fn check_level(&self, x: &CycNum) -> Result<()> {
        let c = x.conductor();
        if c != self.conductor() {
            return Err(Error::ConductorMismatch(
                c.to_string(),
                self.conductor().to_string(),
            ));
        }
        Ok(())
    }

    fn cache_key(&self) -> SiteKey {
        SiteKey {
            p: self.p,
            n: self.n,
            l: self.l,
            hensel: self.hensel_exponent,
        }
    }

    /// Writes the factor and discrete-log data to `path` as JSON.
    pub fn save(&self, path: &Path) -> Result<()> {
        let cache = SiteCache {
            key: self.cache_key(),
            f: self.f,
            q: self.q,
            g_poly: self.g_poly.clone(),
            generator: self.fq.generator(),
            chi_exponent: self.chi_exponent,
            hensel_factor: self.hensel_factor.iter().map(|c| c.to_string()).collect(),
            exp_table: self.fq.exp_table().to_vec(),
        };
        let text = serde_json::to_string(&cache).map_err(|e| Error::Io(e.to_string()))?;
        crate::report::write_atomic(path, text.as_bytes())
    }

    /// Loads a cached site, rejecting data for a different `(p, n, l, M)`.
    pub fn load(path: &Path, l: u64, p: u64, n: u32, hensel: u32, q_max: u64) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(e.to_string()))?;
        let cache: SiteCache =
            serde_json::from_str(&text).map_err(|e| Error::Io(e.to_string()))?;
        let key = SiteKey { p, n, l, hensel };
        if cache.key != key {
            return Err(Error::Config(format!(
                "cache is for {:?}, wanted {:?}",
                cache.key, key
            )));
        }
        fq::checked_q(l, cache.f, q_max)?;
        let field = Fq::from_exp_table(l, &cache.g_poly, cache.exp_table)?;
        let site = Self::assemble(l, p, n, cache.g_poly, Arc::new(field), hensel, q_max)?;
        let factor: Vec<BigInt> = cache
            .hensel_factor
            .iter()
            .map(|s| s.parse().map_err(|_| Error::Io(format!("bad integer {s}"))))
            .collect::<Result<_>>()?;
        if site.chi_exponent != cache.chi_exponent
            || site.fq.generator() != cache.generator
            || site.hensel_factor != factor
        {
            return Err(Error::Config("cache is inconsistent with its factor".into()));
        }
        Ok(site)
    }

    /// Loads from `dir` when a cache file exists, otherwise builds and saves.
    pub fn cached(dir: &Path, l: u64, p: u64, n: u32, hensel: u32, q_max: u64) -> Result<Self> {
        let path = dir.join(format!("site-p{p}-n{n}-l{l}-M{hensel}.json"));
        if path.exists() {
            if let Ok(site) = Self::load(&path, l, p, n, hensel, q_max) {
                return Ok(site);
            }
        }
        let site = Self::new(l, p, n, hensel, q_max)?;
        site.save(&path)?;
        Ok(site)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct SiteKey {
    p: u64,
    n: u32,
    l: u64,
    hensel: u32,
}

#[derive(Serialize, Deserialize)]
struct SiteCache {
    key: SiteKey,
    f: u32,
    q: u64,
    g_poly: Vec<u64>,
    generator: u32,
    chi_exponent: u64,
    hensel_factor: Vec<String>,
    exp_table: Vec<u32>,
}

fn check_site_args(l: u64, p: u64, n: u32, hensel: u32) -> Result<Conductor> {
    if l == p {
        return Err(Error::AuxiliaryEqualsP(l));
    }
    if hensel == 0 {
        return Err(Error::ZeroPrecision);
    }
    Conductor::composite(p, n, l)?;
    Conductor::prime_power(p, n)
}

/// Lexicographically least (by `c_0, c_1, ...`) monic irreducible factor
/// of `Φ_m` mod `l`, each of degree `f`.
fn least_factor(l: u64, m: u64, f: u32) -> Vec<u64> {
    let field = Fq::new(l, &fq::some_irreducible(l, f), u64::MAX).expect("irreducible");
    let q = field.q();
    let zeta = field.exp((q - 1) / m);
    let mut best: Option<Vec<u64>> = None;
    let mut seen = vec![false; m as usize];
    for a in 1..m {
        if arith::gcd(a, m) != 1 || seen[a as usize] {
            continue;
        }
        let mut t = a;
        for _ in 0..f {
            seen[t as usize] = true;
            t = t * (l % m) % m;
        }
        let g = field.minpoly(field.pow(zeta, a));
        if best.as_ref().map_or(true, |b| g < *b) {
            best = Some(g);
        }
    }
    best.expect("Φ_m has a factor")
}

/// Arithmetic in `(Z/N)[y]/(g)` for monic `g`.
struct Unramified<'a> {
    modulus: &'a BigInt,
    g: Vec<BigInt>,
}

impl Unramified<'_> {
    fn reduce(&self, mut a: Vec<BigInt>) -> Vec<BigInt> {
        let d = self.g.len() - 1;
        while a.len() > d {
            let top = a.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let shift = a.len() - d;
            for (i, gi) in self.g.iter().take(d).enumerate() {
                a[shift + i] -= &top * gi;
            }
        }
        a.resize(d, BigInt::zero());
        for c in &mut a {
            *c = c.mod_floor(self.modulus);
        }
        a
    }

    fn mul(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        self.reduce(out)
    }

    fn pow(&self, a: &[BigInt], e: &BigInt) -> Vec<BigInt> {
        let mut acc = self.reduce(vec![BigInt::one()]);
        let mut base = a.to_vec();
        let bits = e.bits();
        for i in (0..bits).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(i) {
                acc = self.mul(&acc, &base);
            }
        }
        base.clear();
        acc
    }
}

/// The monic factor of `Φ_m` mod `l^hensel` lifting `g`: the product of
/// `X - ω(y)^{l^i}` where `ω(y) = y^{q^{hensel-1}}` is the Teichmüller lift.
fn hensel_factor(l: u64, g: &[u64], q: u64, hensel: u32) -> Vec<BigInt> {
    let modulus = BigInt::from(l).pow(hensel);
    let ring = Unramified {
        modulus: &modulus,
        g: g.iter().map(|&c| BigInt::from(c)).collect(),
    };
    let f = g.len() - 1;
    let mut y = vec![BigInt::zero(); f];
    if f == 1 {
        y[0] = BigInt::from((l - g[0]) % l);
    } else {
        y[1] = BigInt::one();
    }
    let teich = ring.pow(&y, &BigInt::from(q).pow(hensel - 1));
    // product of (X - root) with coefficients in the ring
    let mut acc: Vec<Vec<BigInt>> = vec![ring.reduce(vec![BigInt::one()])];
    let mut root = teich;
    for _ in 0..f {
        let mut next = vec![vec![BigInt::zero(); f]; acc.len() + 1];
        for (i, c) in acc.iter().enumerate() {
            for k in 0..f {
                next[i + 1][k] += &c[k];
            }
            let prod = ring.mul(c, &root);
            for k in 0..f {
                next[i][k] -= &prod[k];
            }
        }
        acc = next.into_iter().map(|c| ring.reduce(c)).collect();
        root = ring.pow(&root, &BigInt::from(l));
    }
    acc.into_iter()
        .map(|c| {
            debug_assert!(c.iter().skip(1).all(Zero::is_zero));
            c[0].clone()
        })
        .collect()
}

/// Remainder of `a` modulo the monic `h`, coefficients reduced mod `modulus`.
fn rem_monic(a: &[BigInt], h: &[BigInt], modulus: &BigInt) -> Vec<BigInt> {
    let d = h.len() - 1;
    let mut r: Vec<BigInt> = a.to_vec();
    while r.len() > d {
        let top = r.pop().unwrap().mod_floor(modulus);
        if top.is_zero() {
            continue;
        }
        let shift = r.len() - d;
        for (i, hi) in h.iter().take(d).enumerate() {
            r[shift + i] -= &top * hi;
        }
    }
    r.iter().map(|c| c.mod_floor(modulus)).collect()
}

/// Valuation of `σ_a(x)` at the site's prime for every coset representative
/// `a`; raises the Hensel precision while some image vanishes.
pub fn valuations_above_l(x: &CycNum, site: &PrimeSite) -> Result<ValuationTable> {
    site.check_level(x)?;
    if x.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let den_val = int_valuation(x.denominator(), site.l) as i64;
    let reps = site.coset_reps();
    let conj: Vec<CycNum> = reps
        .iter()
        .map(|&a| x.galois(a as i64))
        .collect::<Result<_>>()?;
    let mut hensel = site.hensel_exponent;
    let mut factor = site.hensel_factor.clone();
    for _ in 0..=MAX_DOUBLINGS {
        let modulus = BigInt::from(site.l).pow(hensel);
        let mut table = ValuationTable::new();
        let mut exhausted = false;
        for (&a, y) in reps.iter().zip(&conj) {
            let r = rem_monic(y.numerators(), &factor, &modulus);
            match r.iter().filter(|c| !c.is_zero()).map(|c| int_valuation(c, site.l)).min() {
                Some(v) => {
                    table.insert(a, v as i64 - den_val);
                }
                None => {
                    exhausted = true;
                    break;
                }
            }
        }
        if !exhausted {
            return Ok(table);
        }
        hensel *= 2;
        factor = hensel_factor(site.l, &site.g_poly, site.q, hensel);
    }
    Err(Error::PrecisionExhausted(hensel))
}

/// Least generator of the site's prime in the search order: boxes
/// `[0, H]^φ` by increasing `H`, then lexicographically from the top
/// coefficient down.
pub fn find_generator(site: &PrimeSite, height: u32) -> Result<CycNum> {
    if !WHITELIST.contains(&(site.p, site.n)) {
        return Err(Error::NotWhitelisted {
            p: site.p,
            n: site.n,
        });
    }
    let cond = site.conductor();
    let phi = cond.rows();
    let m = site.m();
    let field = site.field();
    // powers of the reduction of ζ
    let y = field.y();
    let ypow: Vec<u32> = (0..phi as u64).map(|i| field.pow(y, i)).collect();
    // complex embeddings for a cheap norm filter
    let units = arith::units_mod(site.p, m);
    let angles: Vec<Vec<(f64, f64)>> = units
        .iter()
        .map(|&a| {
            (0..phi)
                .map(|i| {
                    let t = 2.0 * std::f64::consts::PI * ((a as usize * i) as u64 % m) as f64
                        / m as f64;
                    (t.cos(), t.sin())
                })
                .collect()
        })
        .collect();
    let target = site.q as f64;
    let mut coeffs = vec![0u32; phi];
    for h in 1..=height {
        coeffs.iter_mut().for_each(|c| *c = 0);
        loop {
            if coeffs.iter().any(|&c| c == h) {
                let img = coeffs.iter().zip(&ypow).fold(0u32, |acc, (&c, &yp)| {
                    if c == 0 {
                        acc
                    } else {
                        field.add(acc, field.mul(field.reduce_poly(&[c as i64]), yp))
                    }
                });
                if img == 0 && float_norm(&coeffs, &angles, target) {
                    let cand: Vec<i64> = coeffs.iter().map(|&c| c as i64).collect();
                    let x = CycNum::from_power_coeffs(cond, &cand);
                    let norm = x.absolute_norm();
                    if norm.abs() == num_rational::BigRational::from_integer(site.q.into()) {
                        return Ok(x);
                    }
                }
            }
            // odometer with the constant term as the fastest digit
            let mut i = 0;
            loop {
                if i == phi {
                    break;
                }
                if coeffs[i] < h {
                    coeffs[i] += 1;
                    break;
                }
                coeffs[i] = 0;
                i += 1;
            }
            if i == phi {
                break;
            }
        }
    }
    Err(Error::GeneratorNotFound(height))
}

fn float_norm(coeffs: &[u32], angles: &[Vec<(f64, f64)>], target: f64) -> bool {
    let mut log_norm = 0.0f64;
    for emb in angles {
        let (mut re, mut im) = (0.0, 0.0);
        for (&c, &(co, si)) in coeffs.iter().zip(emb) {
            re += c as f64 * co;
            im += c as f64 * si;
        }
        let abs2 = re * re + im * im;
        if abs2 < 1e-18 {
            return false;
        }
        log_norm += 0.5 * abs2.ln();
    }
    (log_norm - target.ln()).abs() < 1e-6
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn site(l: u64, p: u64, n: u32) -> PrimeSite {
        PrimeSite::new(l, p, n, 6, 100_000).unwrap()
    }

    #[test]
    fn residue_degrees() {
        let s = site(7, 3, 0);
        assert_eq!((s.f(), s.q()), (1, 7));
        let s = site(2, 3, 1);
        assert_eq!((s.f(), s.q()), (6, 64));
        let s = site(11, 5, 0);
        assert_eq!((s.f(), s.q()), (1, 11));
        assert_eq!(
            PrimeSite::new(3, 3, 0, 4, 1000).unwrap_err(),
            Error::AuxiliaryEqualsP(3)
        );
    }

    #[test]
    fn chosen_factor_is_least() {
        // roots of Φ_3 mod 7 are 2 and 4; x - 4 = (3, 1) < x - 2 = (5, 1)
        assert_eq!(site(7, 3, 0).g_poly(), &[3, 1]);
        // Φ_9 mod 2 is irreducible
        assert_eq!(site(2, 3, 1).g_poly(), &[1, 0, 0, 1, 0, 0, 1]);
        // Φ_5 mod 11: roots 3, 4, 5, 9; least c_0 = 11 - 9
        assert_eq!(site(11, 5, 0).g_poly(), &[2, 1]);
    }

    #[test]
    fn hensel_factor_divides_cyclotomic() {
        for (l, p, n) in [(7, 3, 0), (2, 3, 1), (19, 3, 1), (11, 5, 0), (2, 5, 0), (29, 7, 0)] {
            let s = site(l, p, n);
            let cond = s.conductor();
            let modulus = s.hensel_modulus();
            // Φ_m(X) as coefficients: Σ_k X^{k p^n}
            let mut phi_poly = vec![BigInt::zero(); cond.rows() + 1];
            for k in 0..p as usize {
                phi_poly[k * p.pow(n) as usize] = BigInt::one();
            }
            let r = rem_monic(&phi_poly, s.hensel_factor(), &modulus);
            assert!(r.iter().all(Zero::is_zero), "({l},{p},{n})");
            let h = s.hensel_factor();
            for (i, c) in h.iter().enumerate() {
                let lhs = c.mod_floor(&BigInt::from(l));
                assert_eq!(lhs, BigInt::from(s.g_poly()[i]));
            }
        }
    }

    #[test]
    fn valuation_examples() {
        let s = site(7, 3, 0);
        let c = s.conductor();
        let v = valuations_above_l(&CycNum::from_int(c, 7), &s).unwrap();
        assert_eq!(v.values().copied().collect::<Vec<_>>(), vec![1, 1]);
        let v = valuations_above_l(&CycNum::zeta_p(c, 1), &s).unwrap();
        assert_eq!(v.values().copied().collect::<Vec<_>>(), vec![0, 0]);
        let v = valuations_above_l(&CycNum::from_power_coeffs(c, &[3, 1]), &s).unwrap();
        assert_eq!(v, ValuationTable::from([(1, 1), (2, 0)]));
        // a high power forces the precision to be raised
        let v = valuations_above_l(&CycNum::from_int(c, 7).pow(15), &s).unwrap();
        assert_eq!(v, ValuationTable::from([(1, 15), (2, 15)]));
        let v = valuations_above_l(&CycNum::from_rational(c, &BigRational::new(1.into(), 49.into())), &s)
            .unwrap();
        assert_eq!(v, ValuationTable::from([(1, -2), (2, -2)]));
    }

    #[test]
    fn inert_valuation() {
        let s = site(2, 3, 1);
        let c = s.conductor();
        let v = valuations_above_l(&CycNum::from_int(c, 8), &s).unwrap();
        assert_eq!(v, ValuationTable::from([(1, 3)]));
    }

    #[test]
    fn generator_examples() {
        let g = find_generator(&site(7, 3, 0), 4).unwrap();
        assert_eq!(g, CycNum::from_power_coeffs(Conductor::prime_power(3, 0).unwrap(), &[3, 1]));
        let g = find_generator(&site(11, 5, 0), 4).unwrap();
        assert_eq!(g, CycNum::from_power_coeffs(Conductor::prime_power(5, 0).unwrap(), &[2, 1]));
        assert!(matches!(
            find_generator(&site(23, 11, 0), 2),
            Err(Error::NotWhitelisted { .. })
        ));
        assert_eq!(find_generator(&site(7, 3, 0), 1), Err(Error::GeneratorNotFound(1)));
    }

    #[test]
    fn generator_valuations() {
        for (l, p, n) in [(19, 3, 1), (37, 3, 1), (29, 7, 0), (11, 5, 0), (31, 5, 0)] {
            let s = site(l, p, n);
            let g = find_generator(&s, 3).unwrap();
            let v = valuations_above_l(&g, &s).unwrap();
            assert_eq!(v[&1], 1);
            assert_eq!(v.values().sum::<i64>(), 1);
        }
    }

    #[test]
    fn chi_is_a_character_of_order_m() {
        let s = site(2, 3, 1);
        let fld = s.field();
        for x in 1..64u32 {
            let t = s.chi(x).unwrap();
            // χ(x) ≡ x^{-(q-1)/m} at the reduction of ζ
            assert_eq!(fld.pow(fld.y(), t), fld.pow(x, 63 - 7));
        }
        assert_eq!(s.chi(1).unwrap(), 0);
        assert!(s.chi(0).is_err());
    }

    #[test]
    fn descend_and_conjugate() {
        let s = site(19, 3, 1);
        let d = s.descend().unwrap();
        assert_eq!((d.n(), d.f()), (0, 1));
        // the level-0 prime lies under the level-1 prime
        let f = s.field();
        assert_eq!(d.field().y(), f.pow(f.y(), 3));
        let c = s.conjugate(2).unwrap();
        let x = CycNum::from_power_coeffs(s.conductor(), &[1, 2, 0, 5, 1]);
        // reduction of σ_2 x at σ_2 𝔩 equals reduction of x at 𝔩
        assert_eq!(c.reduce(&x.galois(2).unwrap()).unwrap(), s.reduce(&x).unwrap());
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let s = PrimeSite::cached(dir.path(), 2, 3, 1, 5, 100_000).unwrap();
        let t = PrimeSite::cached(dir.path(), 2, 3, 1, 5, 100_000).unwrap();
        assert_eq!(s.g_poly(), t.g_poly());
        assert_eq!(s.hensel_factor(), t.hensel_factor());
        let path = dir.path().join("site-p3-n1-l2-M5.json");
        assert!(PrimeSite::load(&path, 2, 3, 1, 6, 100_000).is_err());
    }
}
