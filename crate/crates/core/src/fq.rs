//! Finite fields `F_q = F_l[y]/(g)` with table-driven multiplication.
//!
//! An element is encoded as the index `Σ c_i l^i` of its coefficient
//! vector `(c_0, ..., c_{f-1})` on the basis `1, y, ..., y^{f-1}`.

use crate::arith;
use crate::error::{Error, Result};

/// Polynomials over `F_l`, little-endian, always trimmed.
pub(crate) mod poly {
    use crate::arith::{inv_mod, mul_mod};

    pub fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn sub(a: &[u64], b: &[u64], l: u64) -> Vec<u64> {
        let mut out = vec![0; a.len().max(b.len())];
        for (i, o) in out.iter_mut().enumerate() {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            *o = (x + l - y) % l;
        }
        trim(out)
    }

    pub fn mul(a: &[u64], b: &[u64], l: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(x, y, l)) % l;
            }
        }
        trim(out)
    }

    /// Remainder of `a` modulo a nonzero `m`.
    pub fn rem(a: &[u64], m: &[u64], l: u64) -> Vec<u64> {
        let mut r = trim(a.to_vec());
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], l).expect("leading coefficient is a unit");
        while r.len() > dm {
            let top = r.len() - 1;
            let c = mul_mod(r[top], lead_inv, l);
            let shift = top - dm;
            for (i, &mi) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + l - mul_mod(c, mi, l)) % l;
            }
            r = trim(r);
        }
        r
    }

    pub fn mulmod(a: &[u64], b: &[u64], m: &[u64], l: u64) -> Vec<u64> {
        rem(&mul(a, b, l), m, l)
    }

    pub fn powmod(base: &[u64], mut e: u128, m: &[u64], l: u64) -> Vec<u64> {
        let mut acc = rem(&[1], m, l);
        let mut b = rem(base, m, l);
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(&acc, &b, m, l);
            }
            e >>= 1;
            if e > 0 {
                b = mulmod(&b, &b, m, l);
            }
        }
        acc
    }

    pub fn gcd(a: &[u64], b: &[u64], l: u64) -> Vec<u64> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !b.is_empty() {
            let r = rem(&a, &b, l);
            a = b;
            b = r;
        }
        if let Some(&lead) = a.last() {
            let inv = inv_mod(lead, l).unwrap();
            for c in &mut a {
                *c = mul_mod(*c, inv, l);
            }
        }
        a
    }

    /// Rabin's irreducibility test for a monic polynomial.
    pub fn is_irreducible(g: &[u64], l: u64) -> bool {
        let d = g.len() - 1;
        if d == 0 {
            return false;
        }
        if d == 1 {
            return true;
        }
        let x = vec![0, 1];
        let frob = |k: usize| -> Vec<u64> {
            let mut t = x.clone();
            for _ in 0..k {
                t = powmod(&t, l as u128, g, l);
            }
            t
        };
        if sub(&frob(d), &x, l) != Vec::<u64>::new() {
            return false;
        }
        for r in crate::arith::prime_factors(d as u64) {
            let t = sub(&frob(d / r as usize), &x, l);
            if gcd(&t, g, l).len() != 1 {
                return false;
            }
        }
        true
    }
}

#[derive(Clone, Debug)]
pub struct Fq {
    l: u64,
    f: u32,
    q: u64,
    modulus: Vec<u64>,
    generator: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    trace_basis: Vec<u64>,
}

impl Fq {
    /// Builds `F_l[y]/(modulus)`; `modulus` must be monic irreducible.
    pub fn new(l: u64, modulus: &[u64], q_max: u64) -> Result<Self> {
        let f = (modulus.len() - 1) as u32;
        let q = checked_q(l, f, q_max)?;
        if modulus.last() != Some(&1) || !poly::is_irreducible(modulus, l) {
            return Err(Error::Config(format!(
                "modulus {modulus:?} is not monic irreducible mod {l}"
            )));
        }
        let mut field = Fq {
            l,
            f,
            q,
            modulus: modulus.to_vec(),
            generator: 0,
            exp: Vec::new(),
            log: Vec::new(),
            trace_basis: Vec::new(),
        };
        let order = q - 1;
        let factors = arith::prime_factors(order);
        let generator = (1..q as u32)
            .find(|&g| {
                factors
                    .iter()
                    .all(|&r| field.pow_slow(g, (order / r) as u128) != 1)
            })
            .expect("F_q^* is cyclic");
        field.generator = generator;
        let mut exp = Vec::with_capacity(order as usize);
        let mut x = 1u32;
        for _ in 0..order {
            exp.push(x);
            x = field.mul_slow(x, generator);
        }
        debug_assert_eq!(x, 1);
        field.install_tables(exp)?;
        Ok(field)
    }

    /// Rebuilds a field from a stored exponent table `exp[k] = g^k`.
    pub fn from_exp_table(l: u64, modulus: &[u64], exp: Vec<u32>) -> Result<Self> {
        let f = (modulus.len() - 1) as u32;
        let q = checked_q(l, f, u64::MAX)?;
        if exp.len() as u64 != q - 1 || exp.first() != Some(&1) || exp.len() < 2 && q > 2 {
            return Err(Error::Config("exponent table has the wrong shape".into()));
        }
        if modulus.last() != Some(&1) || !poly::is_irreducible(modulus, l) {
            return Err(Error::Config("stored modulus is not irreducible".into()));
        }
        let mut field = Fq {
            l,
            f,
            q,
            modulus: modulus.to_vec(),
            generator: *exp.get(1).unwrap_or(&1),
            exp: Vec::new(),
            log: Vec::new(),
            trace_basis: Vec::new(),
        };
        let g = field.generator;
        for k in 0..exp.len() {
            let next = exp[(k + 1) % exp.len()];
            if field.mul_slow(exp[k], g) != next {
                return Err(Error::Config("exponent table is not a power table".into()));
            }
        }
        field.install_tables(exp)?;
        Ok(field)
    }

    fn install_tables(&mut self, exp: Vec<u32>) -> Result<()> {
        let mut log = vec![u32::MAX; self.q as usize];
        for (k, &x) in exp.iter().enumerate() {
            if x == 0 || x as u64 >= self.q || log[x as usize] != u32::MAX {
                return Err(Error::Config("exponent table is not a bijection".into()));
            }
            log[x as usize] = k as u32;
        }
        self.exp = exp;
        self.log = log;
        let (l, f) = (self.l, self.f);
        self.trace_basis = (0..f as usize)
            .map(|i| {
                let mut e = vec![0; i + 1];
                e[i] = 1;
                let yi = self.encode(&poly::rem(&e, &self.modulus, l));
                let mut acc = 0u32;
                let mut t = yi;
                for _ in 0..f {
                    acc = self.add(acc, t);
                    t = self.pow(t, l);
                }
                self.decode(acc)[0]
            })
            .collect();
        Ok(())
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn degree(&self) -> u32 {
        self.f
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn generator(&self) -> u32 {
        self.generator
    }

    pub fn encode(&self, coeffs: &[u64]) -> u32 {
        let mut idx = 0u64;
        for &c in coeffs.iter().rev() {
            idx = idx * self.l + c % self.l;
        }
        idx as u32
    }

    pub fn decode(&self, mut idx: u32) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.f as usize);
        for _ in 0..self.f {
            out.push(idx as u64 % self.l);
            idx /= self.l as u32;
        }
        out
    }

    /// Image of an integer polynomial under `y ↦` the class of `y`.
    pub fn reduce_poly(&self, coeffs: &[i64]) -> u32 {
        let a: Vec<u64> = coeffs.iter().map(|&c| arith::reduce(c, self.l)).collect();
        self.encode(&poly::rem(&a, &self.modulus, self.l))
    }

    /// The class of `y`.
    pub fn y(&self) -> u32 {
        self.reduce_poly(&[0, 1])
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        self.encode(&poly::mulmod(
            &poly::trim(self.decode(a)),
            &poly::trim(self.decode(b)),
            &self.modulus,
            self.l,
        ))
    }

    fn pow_slow(&self, a: u32, e: u128) -> u32 {
        self.encode(&poly::powmod(
            &poly::trim(self.decode(a)),
            e,
            &self.modulus,
            self.l,
        ))
    }

    pub fn add(&self, mut a: u32, mut b: u32) -> u32 {
        let l = self.l as u32;
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.f {
            out += ((a % l + b % l) % l) * place;
            a /= l;
            b /= l;
            place = place.wrapping_mul(l);
        }
        out
    }

    pub fn neg(&self, mut a: u32) -> u32 {
        let l = self.l as u32;
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.f {
            out += ((l - a % l) % l) * place;
            a /= l;
            place = place.wrapping_mul(l);
        }
        out
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let k = (self.log[a as usize] as u64 + self.log[b as usize] as u64) % (self.q - 1);
        self.exp[k as usize]
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if a == 0 {
            return u32::from(e == 0);
        }
        let k = (self.log[a as usize] as u128 * e as u128) % (self.q - 1) as u128;
        self.exp[k as usize]
    }

    /// `k ↦ g^k` for the fixed generator `g`.
    pub fn exp(&self, k: u64) -> u32 {
        self.exp[(k % (self.q - 1)) as usize]
    }

    /// Discrete logarithm to the fixed generator; `None` at zero.
    pub fn dlog(&self, a: u32) -> Option<u64> {
        if a == 0 {
            None
        } else {
            Some(self.log[a as usize] as u64)
        }
    }

    /// `Tr_{F_q/F_l}`, linear in the coefficients.
    pub fn trace(&self, a: u32) -> u64 {
        let l = self.l;
        self.decode(a)
            .iter()
            .zip(&self.trace_basis)
            .fold(0, |acc, (&c, &t)| (acc + c * t) % l)
    }

    /// Minimal polynomial over `F_l` (monic, little-endian).
    pub fn minpoly(&self, a: u32) -> Vec<u64> {
        let mut conjugates = vec![a];
        let mut t = self.pow(a, self.l);
        while t != a {
            conjugates.push(t);
            t = self.pow(t, self.l);
        }
        // product of (X - c) with coefficients in F_q
        let mut acc: Vec<u32> = vec![1];
        for &c in &conjugates {
            let mut next = vec![0u32; acc.len() + 1];
            for (i, &coef) in acc.iter().enumerate() {
                next[i + 1] = self.add(next[i + 1], coef);
                next[i] = self.sub(next[i], self.mul(coef, c));
            }
            acc = next;
        }
        acc.into_iter()
            .map(|c| {
                debug_assert!((c as u64) < self.l);
                c as u64
            })
            .collect()
    }

    /// The exponent table, `exp[k] = g^k`.
    pub fn exp_table(&self) -> &[u32] {
        &self.exp
    }
}

/// `l^f` if it does not exceed `q_max`.
pub fn checked_q(l: u64, f: u32, q_max: u64) -> Result<u64> {
    let q = (l as u128).checked_pow(f).unwrap_or(u128::MAX);
    if q > q_max as u128 || q > u32::MAX as u128 {
        return Err(Error::FieldTooLarge { q, bound: q_max });
    }
    Ok(q as u64)
}

/// First monic irreducible of degree `f` in index order.
pub(crate) fn some_irreducible(l: u64, f: u32) -> Vec<u64> {
    let mut idx: u64 = 0;
    loop {
        let mut g = Vec::with_capacity(f as usize + 1);
        let mut t = idx;
        for _ in 0..f {
            g.push(t % l);
            t /= l;
        }
        g.push(1);
        if poly::is_irreducible(&g, l) {
            return g;
        }
        idx += 1;
    }
}
