//! Gauss sums `τ(𝔩)`, their `S'_n`-powers, and level compatibility.
//!
//! Write `g(w) = -Σ_{x≠0} χ(x)^w ζ_l^{Tr x}`, so `g(1) = τ` and
//! `g(a) = σ_a τ` for units `a`. Since `χ(-1) = 1`:
//!
//! * `g(w) g(-w) = q` for `w ≢ 0`,
//! * `g(u) g(v) = -J(u, v) g(u + v)` when `u, v, u + v ≢ 0`, where
//!   `J(u, v) = Σ_{x≠0,1} χ(x)^u χ(1-x)^v ∈ Z[ζ_{p^{n+1}}]`.
//!
//! Folding `τ^δ = ∏ g(a)^{c_a}` with these rules never leaves `k_n`
//! once the accumulated weight returns to zero, which it does exactly
//! when `δ ∈ S'_n`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith;
use crate::cyclotomic::{
    root_of_unity_ratio, valuations_above_l, Conductor, CycNum, PrimeSite,
};
use crate::error::{Error, Result};
use crate::group_ring::{sprime_membership, stickelberger_multiply, weight, GrpElt};

/// `χ(x)` as an exponent of `ζ_{p^{n+1}}`.
pub fn chi(site: &PrimeSite, x: u32) -> Result<u64> {
    site.chi(x)
}

#[derive(Clone, Debug)]
pub struct GaussSum {
    pub site: PrimeSite,
    pub value: CycNum,
}

impl GaussSum {
    /// `τ τ̄`, which should be `q`.
    pub fn norm_product(&self) -> CycNum {
        self.value.try_mul(&self.value.conj()).expect("same conductor")
    }
}

/// `τ(𝔩) = -Σ_{x ∈ F_q} χ(x) ζ_l^{Tr x}` in `Q(ζ_{p^{n+1}}, ζ_l)`.
pub fn gauss_sum(site: &PrimeSite) -> Result<GaussSum> {
    let cond = site.composite_conductor();
    let field = site.field();
    let l = site.l() as usize;
    let mut slots = vec![BigInt::zero(); site.m() as usize * l];
    for x in 1..site.q() as u32 {
        let t = site.chi(x)? as usize;
        let tr = field.trace(x) as usize;
        slots[t * l + tr] -= 1;
    }
    Ok(GaussSum {
        site: site.clone(),
        value: CycNum::from_redundant(cond, slots, BigInt::one()),
    })
}

/// Counts `N[u][v] = #{x ≠ 0, 1 : χ(x) = ζ^u, χ(1-x) = ζ^v}`.
#[derive(Clone, Debug)]
pub struct JacobiTable {
    m: u64,
    cond: Conductor,
    counts: Vec<u64>,
}

impl JacobiTable {
    pub fn new(site: &PrimeSite) -> Result<Self> {
        let m = site.m();
        let field = site.field();
        let mut counts = vec![0u64; (m * m) as usize];
        for x in 2..site.q() as u32 {
            let y = field.sub(1, x);
            if y == 0 {
                continue;
            }
            let u = site.chi(x)?;
            let v = site.chi(y)?;
            counts[(u * m + v) as usize] += 1;
        }
        Ok(JacobiTable {
            m,
            cond: site.conductor(),
            counts,
        })
    }

    /// `J(w1, w2) = Σ_{x≠0,1} χ(x)^{w1} χ(1-x)^{w2}`.
    pub fn jacobi(&self, w1: u64, w2: u64) -> CycNum {
        let m = self.m;
        let mut coeffs = vec![BigInt::zero(); m as usize];
        for u in 0..m {
            for v in 0..m {
                let c = self.counts[(u * m + v) as usize];
                if c != 0 {
                    coeffs[((w1 * u + w2 * v) % m) as usize] += c;
                }
            }
        }
        CycNum::from_redundant_coeffs(self.cond, coeffs)
    }
}

/// Evaluates `τ^δ` for many `δ` at one site.
pub struct JacobiEngine<'a> {
    site: &'a PrimeSite,
    table: JacobiTable,
}

impl<'a> JacobiEngine<'a> {
    pub fn new(site: &'a PrimeSite) -> Result<Self> {
        Ok(JacobiEngine {
            site,
            table: JacobiTable::new(site)?,
        })
    }

    pub fn site(&self) -> &PrimeSite {
        self.site
    }

    /// `τ^δ ∈ k_n` for `δ ∈ S'_n`.
    pub fn power(&self, delta: &GrpElt) -> Result<CycNum> {
        check_level(self.site, delta)?;
        if sprime_membership(delta)?.is_none() {
            return Err(Error::NotInSPrime);
        }
        let cond = self.site.conductor();
        let m = self.site.m();
        let q = BigRational::from_integer(self.site.q().into());
        let mut acc = CycNum::one(cond);
        let mut w = 0u64;
        let step = |acc: &mut CycNum, w: &mut u64, a: u64| {
            if *w == 0 {
                *w = a;
            } else if (*w + a) % m == 0 {
                *acc = acc.scale(&q);
                *w = 0;
            } else {
                let j = self.table.jacobi(*w, a).neg();
                *acc = acc.try_mul(&j).expect("same conductor");
                *w = (*w + a) % m;
            }
        };
        for (a, c) in delta.integer_coeffs().unwrap() {
            let times = c.abs().to_u64().ok_or(Error::NotInSPrime)?;
            let (b, div) = if c.is_negative() { (m - a, true) } else { (a, false) };
            for _ in 0..times {
                if div {
                    acc = acc.scale(&q.recip());
                }
                step(&mut acc, &mut w, b);
            }
        }
        if w != 0 {
            return Err(Error::GaloisInvariance(format!(
                "weight {w} left over for a member of S'"
            )));
        }
        Ok(acc)
    }
}

fn check_level(site: &PrimeSite, delta: &GrpElt) -> Result<()> {
    if delta.p() != site.p() || delta.n() != site.n() {
        return Err(Error::LevelMismatch(delta.n(), site.n()));
    }
    Ok(())
}

/// `τ^δ ∈ k_n` for `δ ∈ S'_n`.
pub fn jacobi_power(site: &PrimeSite, delta: &GrpElt) -> Result<CycNum> {
    JacobiEngine::new(site)?.power(delta)
}

/// `τ^δ` by literal powering of the Gauss sum in `Q(ζ_{p^{n+1}}, ζ_l)`,
/// followed by the descent to `k_n`.
pub fn jacobi_power_composite(gauss: &GaussSum, delta: &GrpElt) -> Result<CycNum> {
    let site = &gauss.site;
    check_level(site, delta)?;
    if sprime_membership(delta)?.is_none() {
        return Err(Error::NotInSPrime);
    }
    let tau = &gauss.value;
    let cond = tau.conductor();
    let mut num = CycNum::one(cond);
    let mut q_power = 0u64;
    for (a, c) in delta.integer_coeffs().unwrap() {
        if c.is_zero() {
            continue;
        }
        let e = c.abs().to_u64().ok_or(Error::NotInSPrime)?;
        // σ_a(τ)^{-1} = σ_a(τ̄) / q
        let base = if c.is_positive() {
            tau.galois(a as i64)?
        } else {
            q_power += e;
            tau.galois_full(-(a as i64), -1)?
        };
        num = num.try_mul(&base.pow(e))?;
    }
    let q = BigInt::from(site.q()).pow(q_power as u32);
    let value = num.scale(&BigRational::new(BigInt::one(), q));
    value.restrict_to_p_part()
}

/// Cost estimate for [`jacobi_power_composite`].
pub fn composite_cost(site: &PrimeSite, delta: &GrpElt) -> u64 {
    let dim = site.composite_conductor().dim() as u64;
    dim.saturating_mul(dim).saturating_mul(weight(delta).max(1))
}

/// `x ≡ 1 mod (1 - ζ_{p^{n+1}})`; `x` must be integral at `p`.
pub fn principal_unit_congruence(x: &CycNum) -> bool {
    let p = BigInt::from(x.conductor().p());
    if (x.denominator() % &p).is_zero() {
        return false;
    }
    let s: BigInt = x.numerators().iter().sum();
    ((s - x.denominator()) % &p).is_zero()
}

/// `β(τ^δ)`, read off from the valuations of `τ(𝔭)^δ` at a split prime:
/// the coefficient of `σ_c` is the valuation at `σ_c 𝔭`. Non-split sites
/// defer to the least split prime `l' ≡ 1 mod p^{n+1}`.
pub fn weil_beta(site: &PrimeSite, delta: &GrpElt) -> Result<GrpElt> {
    check_level(site, delta)?;
    if site.is_split() {
        return beta_from_valuations(site, delta);
    }
    let m = site.m();
    let l = (1..)
        .map(|k| k * m + 1)
        .find(|&l| arith::is_prime(l))
        .unwrap();
    let split = PrimeSite::new(l, site.p(), site.n(), site.hensel_exponent(), site.q_max())?;
    beta_from_valuations(&split, delta)
}

fn beta_from_valuations(site: &PrimeSite, delta: &GrpElt) -> Result<GrpElt> {
    let x = jacobi_power(site, delta)?;
    let table = valuations_above_l(&x, site)?;
    let m = site.m();
    let terms = table.iter().map(|(&a, &v)| {
        let c = arith::inv_mod(a, m).unwrap();
        (c as i64, BigRational::from_integer(v.into()))
    });
    GrpElt::from_coeffs(site.p(), site.n(), terms)
}

/// `N_{n,n-1}(τ_n(𝔏)) = ±ζ_{p^{n+1}}^a l^b τ_{n-1}(N 𝔏)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormDefect {
    pub sign: u8,
    pub zeta_exponent: u64,
    pub l_exponent: i64,
    pub expected_l_exponent: i64,
    pub residue_degrees: (u32, u32),
}

/// Compares the relative norm of the level-`n` Gauss sum with the
/// level-`(n-1)` Gauss sum of the prime below, raised to the inertia
/// jump `f_n / f_{n-1}`.
pub fn norm_compat_defect(site: &PrimeSite) -> Result<NormDefect> {
    if site.n() == 0 {
        return Err(Error::LevelZero("norm_compat_defect"));
    }
    let below = site.descend()?;
    let e = (site.f() / below.f()) as u64;
    let upper = gauss_sum(site)?.value;
    let lhs = upper.relative_norm(site.n() - 1, false)?;
    let rhs = gauss_sum(&below)?.value.pow(e);
    // |lhs|^2 / |rhs|^2 = l^{2b}
    let ratio = lhs
        .try_mul(&lhs.conj())?
        .as_rational()
        .zip(rhs.try_mul(&rhs.conj())?.as_rational())
        .map(|(a, b)| a / b)
        .ok_or_else(|| Error::NoDefect("norms are not rational".into()))?;
    let two_b = crate::padic::padic_valuation(&ratio, site.l())
        .ok_or_else(|| Error::NoDefect("zero norm".into()))?;
    let l = BigInt::from(site.l());
    let unit = ratio.clone() / pow_signed(&l, two_b);
    if two_b % 2 != 0 || !unit.is_one() {
        return Err(Error::NoDefect(format!("|ratio|^2 = {ratio}")));
    }
    let b = two_b / 2;
    let scaled_rhs = if b >= 0 {
        rhs.scale_int(l.pow(b as u32))
    } else {
        rhs.scale(&BigRational::new(BigInt::one(), l.pow((-b) as u32)))
    };
    let (sign, k) = root_of_unity_ratio(&lhs, &scaled_rhs)?
        .ok_or_else(|| Error::NoDefect("ratio is not a root of unity times l^b".into()))?;
    Ok(NormDefect {
        sign,
        zeta_exponent: k * site.p(),
        l_exponent: b,
        expected_l_exponent: ((site.p() - 1) * site.f() as u64 / 2) as i64,
        residue_degrees: (site.f(), below.f()),
    })
}

fn pow_signed(base: &BigInt, e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(base.pow(e as u32))
    } else {
        BigRational::new(BigInt::one(), base.pow((-e) as u32))
    }
}

/// The two sides of the norm commutation at `δ`: the relative norm of
/// `τ_n(𝔏)^{δ^-}` and `τ_{n-1}(N𝔏)^{Res δ^-}` with `δ^- = (1 - σ_{-1})δ`.
pub fn norm_commutation_sides(site: &PrimeSite, delta: &GrpElt) -> Result<(CycNum, CycNum)> {
    if site.n() == 0 {
        return Err(Error::LevelZero("norm commutation"));
    }
    let below = site.descend()?;
    norm_commutation_sides_with(&JacobiEngine::new(site)?, &JacobiEngine::new(&below)?, delta)
}

/// [`norm_commutation_sides`] with engines for the site and the site below.
pub fn norm_commutation_sides_with(
    upper: &JacobiEngine,
    lower: &JacobiEngine,
    delta: &GrpElt,
) -> Result<(CycNum, CycNum)> {
    let site = upper.site();
    if site.n() == 0 {
        return Err(Error::LevelZero("norm commutation"));
    }
    let e = site.f() / lower.site().f();
    let minus = delta.minus_lift();
    let up = upper.power(&minus)?.relative_norm(site.n() - 1, false)?;
    let res = minus.restriction()?.scale_int(e);
    Ok((up, lower.power(&res)?))
}

/// `δθ_n` after checking membership; used where the β-map is taken from
/// the Stickelberger side.
pub fn stickelberger_beta(delta: &GrpElt) -> Result<GrpElt> {
    if sprime_membership(delta)?.is_none() {
        return Err(Error::NotInSPrime);
    }
    stickelberger_multiply(delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::ValuationTable;

    fn site(l: u64, p: u64, n: u32) -> PrimeSite {
        PrimeSite::new(l, p, n, 6, 100_000).unwrap()
    }

    fn delta(p: u64, n: u32, t: &[(i64, i64)]) -> GrpElt {
        GrpElt::from_int_coeffs(p, n, t).unwrap()
    }

    #[test]
    fn chi_examples() {
        let s = site(7, 3, 0);
        assert_eq!(chi(&s, 1).unwrap(), 0);
        let t = chi(&s, s.fq_generator()).unwrap();
        assert!(t == 1 || t == 2);
        for x in 1..7u32 {
            assert_eq!(chi(&s, s.field().pow(x, 3)).unwrap(), 0);
        }
        assert!(chi(&s, 0).is_err());
    }

    #[test]
    fn gauss_norms() {
        for (l, p, n) in [(7, 3, 0), (2, 3, 1), (11, 5, 0), (2, 5, 0), (19, 3, 1), (13, 7, 0)] {
            let s = site(l, p, n);
            let g = gauss_sum(&s).unwrap();
            let q = CycNum::from_int(g.value.conductor(), s.q());
            assert_eq!(g.norm_product(), q, "({l},{p},{n})");
        }
    }

    #[test]
    fn conjugate_site_consistency() {
        for (l, p, n, a) in [(7, 3, 0, 2), (11, 5, 0, 2), (31, 5, 0, 3), (19, 3, 1, 4), (2, 3, 1, 2)] {
            let s = site(l, p, n);
            let g = gauss_sum(&s).unwrap().value;
            let c = gauss_sum(&s.conjugate(a).unwrap()).unwrap().value;
            assert_eq!(c, g.galois(a).unwrap(), "({l},{p},{n},{a})");
        }
    }

    #[test]
    fn fast_route_matches_composite() {
        let cases: &[(u64, u64, u32, &[(i64, i64)])] = &[
            (7, 3, 0, &[(1, 2), (2, -1)]),
            (7, 3, 0, &[(1, 3)]),
            (11, 5, 0, &[(1, 2), (2, -1)]),
            (11, 5, 0, &[(1, -3), (3, 1)]),
            (2, 3, 1, &[(1, 2), (2, -1)]),
            (19, 3, 1, &[(1, 4), (4, -1)]),
            (2, 5, 0, &[(1, 5)]),
            (29, 7, 0, &[(1, 3), (3, -1)]),
        ];
        for &(l, p, n, terms) in cases {
            let s = site(l, p, n);
            let d = delta(p, n, terms);
            let fast = jacobi_power(&s, &d).unwrap();
            let slow = jacobi_power_composite(&gauss_sum(&s).unwrap(), &d).unwrap();
            assert_eq!(fast, slow, "({l},{p},{n}) {d:?}");
        }
    }

    #[test]
    fn jacobi_power_examples() {
        let s = site(7, 3, 0);
        assert_eq!(
            jacobi_power(&s, &GrpElt::zero(3, 0).unwrap()).unwrap(),
            CycNum::one(s.conductor())
        );
        let x = jacobi_power(&s, &delta(3, 0, &[(1, 2), (2, -1)])).unwrap();
        assert!(x.is_integral());
        // (2 - σ_2)θ_0 = σ_2: valuation 1 at σ_2𝔭 and 0 at 𝔭
        let v = valuations_above_l(&x, &s).unwrap();
        assert_eq!(v, ValuationTable::from([(1, 0), (2, 1)]));
        assert!(principal_unit_congruence(&x));
        assert_eq!(
            jacobi_power(&s, &delta(3, 0, &[(1, 1)])),
            Err(Error::NotInSPrime)
        );
    }

    #[test]
    fn jacobi_power_is_additive() {
        let s = site(31, 5, 0);
        let d1 = delta(5, 0, &[(1, 2), (2, -1)]);
        let d2 = delta(5, 0, &[(1, 3), (3, -1)]);
        let sum = d1.try_add(&d2).unwrap();
        let e = JacobiEngine::new(&s).unwrap();
        let lhs = e.power(&sum).unwrap();
        let rhs = e.power(&d1).unwrap().try_mul(&e.power(&d2).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn weil_beta_examples() {
        let d3 = delta(3, 0, &[(1, 2), (2, -1)]);
        assert_eq!(weil_beta(&site(7, 3, 0), &d3).unwrap(), delta(3, 0, &[(2, 1)]));
        let d5 = delta(5, 0, &[(1, 2), (2, -1)]);
        assert_eq!(
            weil_beta(&site(11, 5, 0), &d5).unwrap(),
            delta(5, 0, &[(2, 1), (4, 1)])
        );
        // inert site defers to a split prime
        assert_eq!(weil_beta(&site(2, 5, 0), &d5).unwrap(), stickelberger_beta(&d5).unwrap());
        assert!(weil_beta(&site(7, 3, 0), &GrpElt::zero(3, 0).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn norm_defects() {
        for l in [19u64, 37, 2, 5] {
            let s = site(l, 3, 1);
            let d = norm_compat_defect(&s).unwrap();
            assert_eq!(d.l_exponent, d.expected_l_exponent, "l = {l}: {d:?}");
        }
    }
}
