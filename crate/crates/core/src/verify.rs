//! Executable checks over a grid of sites, each producing a [`CheckReport`].

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::arith;
use crate::charsum::{
    gauss_sum, norm_commutation_sides, norm_commutation_sides_with, norm_compat_defect,
    principal_unit_congruence, weil_beta, JacobiEngine,
};
use crate::config::{CheckKind, RunConfig};
use crate::cyclotomic::{
    find_generator, group_ring_power, root_of_unity_ratio, valuations_above_l, CycNum, PrimeSite,
    ValuationTable, WHITELIST,
};
use crate::error::{Error, Result};
use crate::group_ring::{
    sprime_generators, sprime_membership, stickelberger_multiply, terms_string, CharPsi, GrpElt,
};
use crate::iwasawa;
use crate::lattice::Lattice;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub params: Value,
    pub status: Status,
    pub witness: Value,
    /// Wall time in milliseconds; excluded from the determinism hash.
    pub ms: u64,
}

impl CheckReport {
    pub fn new(check: &str, params: Value, status: Status, witness: Value, start: Instant) -> Self {
        CheckReport {
            check: check.to_string(),
            params,
            status,
            witness,
            ms: start.elapsed().as_millis() as u64,
        }
    }

    pub fn skipped(check: &str, params: Value, reason: &str) -> Self {
        CheckReport {
            check: check.to_string(),
            params,
            status: Status::Skipped,
            witness: json!({ "reason": reason }),
            ms: 0,
        }
    }

    fn from_result(check: &str, params: Value, start: Instant, r: Result<(bool, Value)>) -> Self {
        let (status, witness) = match r {
            Ok((true, w)) => (Status::Pass, w),
            Ok((false, w)) => (Status::Fail, w),
            Err(e) => (Status::Fail, json!({ "error": e.to_string() })),
        };
        CheckReport::new(check, params, status, witness, start)
    }
}

/// A sampled element of `S'_n` with a stable label.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub label: String,
    pub delta: GrpElt,
}

/// `t - σ_t` for `2 <= t <= min(p^{n+1} - 1, t_max)` with `p ∤ t`, then
/// `p^{n+1}`, `0` and two random combinations of those with coefficients
/// in `[-3, 3]`.
pub fn sample_deltas(p: u64, n: u32, t_max: u64, seed: u64) -> Result<Vec<Sample>> {
    let m = p.pow(n + 1);
    let mut gens = Vec::new();
    for t in 2..=t_max.min(m - 1) {
        if t % p == 0 {
            continue;
        }
        let d = GrpElt::scalar(p, n, t)?.try_sub(&GrpElt::sigma(p, n, t as i64)?)?;
        gens.push(Sample {
            label: format!("{t}-s{t}"),
            delta: d,
        });
    }
    gens.push(Sample {
        label: format!("{m}"),
        delta: GrpElt::scalar(p, n, m)?,
    });
    let mut out = gens.clone();
    out.push(Sample {
        label: "0".into(),
        delta: GrpElt::zero(p, n)?,
    });
    let mix = seed ^ (p << 32) ^ ((n as u64) << 16) ^ 0x9e37_79b9_7f4a_7c15;
    let mut rng = ChaCha8Rng::seed_from_u64(mix);
    for k in 0..2 {
        let mut acc = GrpElt::zero(p, n)?;
        for g in &gens {
            let c: i64 = rng.gen_range(-3..=3);
            acc = acc.try_add(&g.delta.scale_int(c))?;
        }
        out.push(Sample {
            label: format!("random{k}"),
            delta: acc,
        });
    }
    Ok(out)
}

fn site_params(site: &PrimeSite, sample: Option<&Sample>) -> Value {
    let mut v = json!({"p": site.p(), "n": site.n(), "l": site.l(), "f": site.f()});
    if let Some(s) = sample {
        v["delta"] = json!(s.label);
        v["delta_terms"] = json!(terms_string(&s.delta));
    }
    v
}

/// Valuations predicted by a group-ring element `b`: the entry at a coset
/// representative `a` is the valuation of `σ_a(x)` at the site's prime,
/// i.e. the sum of the coefficients of `b` over `a^{-1}⟨l⟩`.
pub fn expected_valuations(site: &PrimeSite, b: &GrpElt) -> Result<ValuationTable> {
    let m = site.m();
    let mut table: ValuationTable = site.coset_reps().into_iter().map(|a| (a, 0)).collect();
    for (c, coef) in b.terms() {
        if !coef.is_integer() {
            return Err(Error::NotIntegral);
        }
        let inv = arith::inv_mod(c, m).expect("unit");
        let rep = site.coset_rep(inv);
        let v: i64 = coef.to_integer().try_into().map_err(|_| Error::NotIntegral)?;
        *table.get_mut(&rep).expect("coset representative") += v;
    }
    Ok(table)
}

fn denominator_is_l_power(x: &CycNum, l: u64) -> bool {
    let mut d = x.denominator().clone();
    let lb = BigInt::from(l);
    while (&d % &lb).is_zero() {
        d /= &lb;
    }
    d.is_one()
}

fn stickelberger_witness(site: &PrimeSite, beta: &GrpElt, x: &CycNum) -> Result<(bool, Value)> {
    let cert = sprime_membership(beta)?.ok_or(Error::NotInSPrime)?;
    let bt = stickelberger_multiply(beta)?;
    let expected = expected_valuations(site, &bt)?;
    let actual = valuations_above_l(x, site)?;
    // no other primes: x x̄ = q^{aug β} and only l in the denominator
    let aug = beta.augmentation().to_integer();
    let q = BigRational::from_integer(site.q().into());
    let e: i32 = (&aug).try_into().map_err(|_| Error::NotIntegral)?;
    let target = CycNum::from_rational(x.conductor(), &q.pow(e));
    let norm_ok = x.try_mul(&x.conj())? == target;
    let den_ok = denominator_is_l_power(x, site.l());
    let unit = principal_unit_congruence(x);
    let pass = expected == actual && norm_ok && den_ok && unit;
    let mut w = json!({
        "valuations": actual,
        "expected": expected,
        "augmentation": aug.to_string(),
        "norm_is_q_power": norm_ok,
        "denominator_is_l_power": den_ok,
        "principal_unit": unit,
        "certificate": cert.to_json(),
    });
    if !pass {
        w["value"] = x.to_json();
    }
    Ok((pass, w))
}

/// `τ(𝔭)^β` generates `𝔭^{βθ_n}` and is a principal unit at `p`.
pub fn check_stickelberger(site: &PrimeSite, beta: &GrpElt) -> CheckReport {
    let start = Instant::now();
    let sample = Sample {
        label: terms_string(beta),
        delta: beta.clone(),
    };
    let r = (|| {
        let x = JacobiEngine::new(site)?.power(beta)?;
        stickelberger_witness(site, beta, &x)
    })();
    CheckReport::from_result("stickelberger", site_params(site, Some(&sample)), start, r)
}

/// `τ τ̄ = q`.
pub fn check_gauss_norm(site: &PrimeSite) -> CheckReport {
    let start = Instant::now();
    let r = gauss_sum(site).map(|g| {
        let prod = g.norm_product();
        let ok = prod.as_rational() == Some(BigRational::from_integer(site.q().into()));
        (ok, json!({"q": site.q(), "tau_tau_bar": prod.to_json()}))
    });
    CheckReport::from_result("gauss_norm", site_params(site, None), start, r)
}

fn whitelist_skip(site: &PrimeSite) -> Option<&'static str> {
    if !WHITELIST.contains(&(site.p(), site.n())) {
        Some("outside class-number-one whitelist")
    } else if !site.is_split() {
        Some("site not split")
    } else {
        None
    }
}

fn weil_witness(x: &CycNum, alpha: &CycNum, delta: &GrpElt) -> Result<(bool, Value)> {
    let bt = stickelberger_multiply(delta)?;
    let y = group_ring_power(alpha, &bt)?;
    let m = x.conductor().p_part();
    Ok(match root_of_unity_ratio(x, &y)? {
        Some((s, k)) => {
            // (-1)^s ζ^k lies in μ_{p^{n+1}} exactly when s = 0
            let order = if s == 0 { m } else { 2 * m };
            (
                true,
                json!({"sign": s, "zeta_exponent": k, "modulus": order, "alpha": alpha.to_json()}),
            )
        }
        None => (
            false,
            json!({"alpha": alpha.to_json(), "jacobi": x.to_json(), "alpha_power": y.to_json()}),
        ),
    })
}

/// `τ(𝔭)^δ ≡ α^{δθ_n} mod μ_{2p^{n+1}}` where `𝔭 = (α)`.
pub fn check_weil_congruence(site: &PrimeSite, delta: &GrpElt, height: u32) -> CheckReport {
    let start = Instant::now();
    let sample = Sample {
        label: terms_string(delta),
        delta: delta.clone(),
    };
    let params = site_params(site, Some(&sample));
    if let Some(reason) = whitelist_skip(site) {
        return CheckReport::skipped("weil_congruence", params, reason);
    }
    let r = (|| {
        let alpha = find_generator(site, height)?;
        let x = JacobiEngine::new(site)?.power(delta)?;
        weil_witness(&x, &alpha, delta)
    })();
    CheckReport::from_result("weil_congruence", params, start, r)
}

/// A Weil value built from a minus-type annihilator.
#[derive(Clone, Debug, PartialEq)]
pub struct WeilConstruction {
    pub gamma: CycNum,
    pub valuations: ValuationTable,
    pub expected: ValuationTable,
    pub unimodular: bool,
}

impl WeilConstruction {
    pub fn holds(&self) -> bool {
        self.unimodular && self.valuations == self.expected
    }
}

/// For `β` with `σ_{-1}β = -β` and `2β` integral: `γ = α^{2β}` has
/// `γ γ̄ = 1` and generates `𝔭^{2β}`.
pub fn construct_weil_from_annihilator(
    site: &PrimeSite,
    beta: &GrpElt,
    height: u32,
) -> Result<WeilConstruction> {
    if !WHITELIST.contains(&(site.p(), site.n())) {
        return Err(Error::NotWhitelisted {
            p: site.p(),
            n: site.n(),
        });
    }
    let twice = beta.scale_int(2);
    if beta.conj() != beta.neg() || !twice.is_integral() {
        return Err(Error::InvalidCharacter(
            "β must satisfy σ_{-1}β = -β with 2β integral".into(),
        ));
    }
    let alpha = find_generator(site, height)?;
    let gamma = group_ring_power(&alpha, &twice)?;
    let unimodular = gamma.try_mul(&gamma.conj())? == CycNum::one(gamma.conductor());
    let valuations = valuations_above_l(&gamma, site)?;
    let expected = expected_valuations(site, &twice)?;
    Ok(WeilConstruction {
        gamma,
        valuations,
        expected,
        unimodular,
    })
}

/// Runs the construction on `β = (1 - σ_{-1})δθ_n`.
pub fn check_weil_construction(site: &PrimeSite, delta: &GrpElt, height: u32) -> CheckReport {
    let start = Instant::now();
    let sample = Sample {
        label: terms_string(delta),
        delta: delta.clone(),
    };
    let params = site_params(site, Some(&sample));
    if let Some(reason) = whitelist_skip(site) {
        return CheckReport::skipped("weil_construction", params, reason);
    }
    let r = (|| {
        let beta = stickelberger_multiply(delta)?.minus_lift();
        let c = construct_weil_from_annihilator(site, &beta, height)?;
        Ok((
            c.holds(),
            json!({
                "beta": terms_string(&beta),
                "unimodular": c.unimodular,
                "valuations": c.valuations,
                "expected": c.expected,
            }),
        ))
    })();
    CheckReport::from_result("weil_construction", params, start, r)
}

/// `β(τ^δ)` read from valuations equals `δθ_n`.
pub fn check_beta_map(site: &PrimeSite, delta: &GrpElt) -> CheckReport {
    let start = Instant::now();
    let sample = Sample {
        label: terms_string(delta),
        delta: delta.clone(),
    };
    let r = (|| {
        let lhs = weil_beta(site, delta)?;
        let rhs = stickelberger_multiply(delta)?;
        Ok((
            lhs == rhs,
            json!({"weil_beta": terms_string(&lhs), "stickelberger": terms_string(&rhs)}),
        ))
    })();
    CheckReport::from_result("beta_map", site_params(site, Some(&sample)), start, r)
}

fn int_rows(xs: &[GrpElt]) -> Vec<Vec<BigInt>> {
    xs.iter()
        .map(|x| {
            x.integer_coeffs()
                .expect("integral")
                .into_iter()
                .map(|(_, c)| c)
                .collect()
        })
        .collect()
}

/// Integral generators of the minus part of `S'_n θ_n`.
fn minus_stickelberger_generators(p: u64, n: u32) -> Result<Vec<GrpElt>> {
    sprime_generators(p, n)?
        .iter()
        .map(|g| Ok(stickelberger_multiply(g)?.minus_lift()))
        .collect()
}

/// `Res(S_n^-) = S_{n-1}^-` as lattices in `Z[G_{n-1}]`.
pub fn check_restriction_surjectivity(p: u64, n: u32) -> CheckReport {
    let start = Instant::now();
    let params = json!({"p": p, "n": n});
    let r = (|| {
        if n == 0 {
            return Err(Error::LevelZero("restriction surjectivity"));
        }
        let upper: Vec<GrpElt> = minus_stickelberger_generators(p, n)?
            .iter()
            .map(GrpElt::restriction)
            .collect::<Result<_>>()?;
        let lower = minus_stickelberger_generators(p, n - 1)?;
        let dim = arith::euler_phi(p.pow(n)) as usize;
        let lu = Lattice::span(dim, int_rows(&upper));
        let ll = Lattice::span(dim, int_rows(&lower));
        let contained = int_rows(&upper).iter().all(|v| ll.contains(v));
        let equal = lu == ll;
        Ok((
            equal,
            json!({
                "rank": lu.rank(),
                "lower_rank": ll.rank(),
                "contained": contained,
                "equal": equal,
            }),
        ))
    })();
    CheckReport::from_result("restriction_surjectivity", params, start, r)
}

/// `N_{n,n-1}(τ_n(𝔏)) = ±ζ^a l^b τ_{n-1}(N𝔏)^{f_n/f_{n-1}}` with the
/// expected `b`.
pub fn check_norm_defect(site: &PrimeSite) -> CheckReport {
    let start = Instant::now();
    let r = norm_compat_defect(site).map(|d| {
        let ok = d.l_exponent == d.expected_l_exponent;
        (ok, serde_json::to_value(&d).expect("serializable"))
    });
    CheckReport::from_result("norm_defect", site_params(site, None), start, r)
}

/// The relative norm of `τ_n^{δ^-}` against `τ_{n-1}^{Res δ^-}`, up to a
/// root of unity.
pub fn check_norm_commutation(site: &PrimeSite, delta: &GrpElt) -> CheckReport {
    let start = Instant::now();
    let sample = Sample {
        label: terms_string(delta),
        delta: delta.clone(),
    };
    let r = norm_commutation_sides(site, delta);
    CheckReport::from_result(
        "norm_commutation",
        site_params(site, Some(&sample)),
        start,
        r.and_then(|(u, l)| commutation_witness(&u, &l)),
    )
}

fn commutation_witness(upper: &CycNum, lower: &CycNum) -> Result<(bool, Value)> {
    let m = upper.conductor().p_part();
    Ok(match root_of_unity_ratio(upper, lower)? {
        Some((s, k)) => (
            true,
            json!({"sign": s, "zeta_exponent": k, "modulus": if s == 0 { m } else { 2 * m }}),
        ),
        None => (
            false,
            json!({"upper": upper.to_json(), "lower": lower.to_json()}),
        ),
    })
}

fn psi_params(psi: &CharPsi) -> Value {
    json!({"p": psi.p(), "psi": psi.to_string(), "N": psi.precision()})
}

/// `θ`-series at level 0 against `B_{1,ψ^{-1}}`.
pub fn check_theta_bernoulli(psi: &CharPsi) -> CheckReport {
    let start = Instant::now();
    let r = (|| {
        let f = iwasawa::theta_series(psi, 0)?;
        let b = iwasawa::bernoulli_b1(psi.p(), -(psi.j() as i64), psi.precision())?;
        let iwasawa::BernoulliB1::Integral(b) = b else {
            return Err(Error::InvalidCharacter("ψ^{-1} = ω^{-1}".into()));
        };
        let t = f.coeff(0);
        Ok((
            t == b,
            json!({"theta": t.value().to_string(), "bernoulli": b.value().to_string()}),
        ))
    })();
    CheckReport::from_result("theta_bernoulli", psi_params(psi), start, r)
}

/// The level-`n` series reduced modulo `ω_{n-1}` is the level-`(n-1)` one.
pub fn check_theta_coherence(psi: &CharPsi, n: u32) -> CheckReport {
    let start = Instant::now();
    let mut params = psi_params(psi);
    params["n"] = json!(n);
    let r = (|| {
        let upper = iwasawa::theta_series(psi, n)?.reduce_to_level(n - 1)?;
        let lower = iwasawa::theta_series(psi, n - 1)?;
        let show = |f: &iwasawa::LambdaPoly| {
            f.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>()
        };
        Ok((upper == lower, json!({"reduced": show(&upper), "lower": show(&lower)})))
    })();
    CheckReport::from_result("theta_coherence", params, start, r)
}

/// Stable `(λ, μ)` of the level-`n` series, consistent with the constant
/// term: `μ = 0`, and `λ = 0` exactly when `B_{1,ψ^{-1}}` is a unit.
pub fn check_lambda_mu(psi: &CharPsi, n: u32) -> CheckReport {
    let start = Instant::now();
    let mut params = psi_params(psi);
    params["n"] = json!(n);
    let r = (|| {
        let (p, j) = (psi.p(), psi.j() as i64);
        let ((lambda, mu), used) = iwasawa::stable_lambda_mu(
            |big_n| iwasawa::theta_series(&CharPsi::new(p, j, big_n)?, n),
            psi.precision(),
        )?;
        let b = iwasawa::bernoulli_b1(p, -j, psi.precision())?;
        let unit = b.valuation() == Some(0);
        let ok = mu == 0 && (lambda == 0) == unit;
        Ok((
            ok,
            json!({"lambda": lambda, "mu": mu, "precision_used": used, "bernoulli_unit": unit}),
        ))
    })();
    CheckReport::from_result("lambda_mu", params, start, r)
}

/// Classification of `M(T)`; an undetermined status is reported as skipped.
pub fn check_minimal_poly(p: u64, j: i64, precision: u32) -> CheckReport {
    let start = Instant::now();
    let params = json!({"p": p, "psi": format!("omega^{j}"), "N": precision});
    let rec = iwasawa::minimal_poly_report(p, j, precision);
    let witness = serde_json::to_value(&rec).expect("serializable");
    let status = match &rec {
        iwasawa::MinimalPoly::Trivial => Status::Pass,
        iwasawa::MinimalPoly::Conditional {
            coprime_to_omega, ..
        } => {
            if *coprime_to_omega {
                Status::Pass
            } else {
                Status::Fail
            }
        }
        _ => Status::Skipped,
    };
    CheckReport::new("minimal_poly", params, status, witness, start)
}

/// The recurrence and the `B_1` route agree on the irregular indices.
pub fn check_irregular(p: u64) -> CheckReport {
    let start = Instant::now();
    let r = (|| {
        let a = iwasawa::irregular_indices(p)?;
        let b = iwasawa::irregular_indices_via_b1(p)?;
        Ok((a == b, json!({"recurrence": a, "via_b1": b})))
    })();
    CheckReport::from_result("irregular", json!({"p": p}), start, r)
}

fn build_site(cfg: &RunConfig, l: u64, p: u64, n: u32) -> Result<PrimeSite> {
    match &cfg.cache_dir {
        Some(dir) => PrimeSite::cached(dir, l, p, n, cfg.hensel, cfg.q_max),
        None => PrimeSite::new(l, p, n, cfg.hensel, cfg.q_max),
    }
}

fn site_checks(cfg: &RunConfig, p: u64, n: u32, l: u64, samples: &[Sample]) -> Vec<CheckReport> {
    let checks = &cfg.checks;
    let params = json!({"p": p, "n": n, "l": l});
    if l == p {
        return vec![CheckReport::skipped("site", params, "l = p excluded")];
    }
    let site = match build_site(cfg, l, p, n) {
        Ok(s) => s,
        Err(Error::FieldTooLarge { .. }) => {
            return vec![CheckReport::skipped("site", params, "q exceeds bound")]
        }
        Err(e) => {
            let start = Instant::now();
            let w = json!({"error": e.to_string()});
            return vec![CheckReport::new("site", params, Status::Fail, w, start)];
        }
    };
    let mut out = Vec::new();
    if checks.contains(&CheckKind::GaussNorm) {
        out.push(check_gauss_norm(&site));
    }
    if n >= 1 && checks.contains(&CheckKind::NormDefect) {
        out.push(check_norm_defect(&site));
    }
    let engine = JacobiEngine::new(&site);
    let below = if n >= 1 && checks.contains(&CheckKind::NormCommutation) {
        Some(site.descend())
    } else {
        None
    };
    let below_engine = below.as_ref().map(|b| match b {
        Ok(b) => JacobiEngine::new(b),
        Err(e) => Err(e.clone()),
    });
    let alpha = match whitelist_skip(&site) {
        None => Some(find_generator(&site, cfg.height)),
        Some(_) => None,
    };
    for s in samples {
        let sp = site_params(&site, Some(s));
        let needs_x = checks.contains(&CheckKind::Stickelberger)
            || checks.contains(&CheckKind::WeilCongruence);
        let start = Instant::now();
        let x = if needs_x {
            Some(match &engine {
                Ok(e) => e.power(&s.delta),
                Err(e) => Err(e.clone()),
            })
        } else {
            None
        };
        if checks.contains(&CheckKind::Stickelberger) {
            let r = match x.as_ref().unwrap() {
                Ok(x) => stickelberger_witness(&site, &s.delta, x),
                Err(e) => Err(e.clone()),
            };
            out.push(CheckReport::from_result("stickelberger", sp.clone(), start, r));
        }
        if checks.contains(&CheckKind::BetaMap) {
            out.push(check_beta_map(&site, &s.delta));
        }
        if checks.contains(&CheckKind::WeilCongruence) {
            out.push(match (whitelist_skip(&site), &alpha) {
                (Some(reason), _) => CheckReport::skipped("weil_congruence", sp.clone(), reason),
                (None, Some(alpha)) => {
                    let start = Instant::now();
                    let r = match (alpha, x.as_ref().unwrap()) {
                        (Ok(a), Ok(x)) => weil_witness(x, a, &s.delta),
                        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
                    };
                    CheckReport::from_result("weil_congruence", sp.clone(), start, r)
                }
                (None, None) => unreachable!(),
            });
        }
        if checks.contains(&CheckKind::WeilConstruction) {
            out.push(check_weil_construction(&site, &s.delta, cfg.height));
        }
        if let Some(lower) = &below_engine {
            let start = Instant::now();
            let r = match (&engine, lower) {
                (Ok(u), Ok(l)) => norm_commutation_sides_with(u, l, &s.delta)
                    .and_then(|(u, l)| commutation_witness(&u, &l)),
                (Err(e), _) | (_, Err(e)) => Err(e.clone()),
            };
            out.push(CheckReport::from_result("norm_commutation", sp.clone(), start, r));
        }
    }
    out
}

fn selected_psi(cfg: &RunConfig, p: u64) -> Vec<std::result::Result<CharPsi, (i64, Error)>> {
    if cfg.psi.is_empty() {
        return CharPsi::all(p, cfg.precision).into_iter().map(Ok).collect();
    }
    cfg.psi
        .iter()
        .map(|&j| CharPsi::new(p, j, cfg.precision).map_err(|e| (j, e)))
        .collect()
}

fn iwasawa_checks(cfg: &RunConfig, p: u64) -> Vec<CheckReport> {
    let checks = &cfg.checks;
    let mut out = Vec::new();
    if checks.contains(&CheckKind::Irregular) {
        if p < 5 {
            out.push(CheckReport::skipped("irregular", json!({"p": p}), "p < 5"));
        } else {
            out.push(check_irregular(p));
        }
    }
    let wanted = [
        CheckKind::ThetaBernoulli,
        CheckKind::ThetaCoherence,
        CheckKind::LambdaMu,
        CheckKind::CokerOrder,
        CheckKind::MinimalPoly,
    ];
    if !wanted.iter().any(|k| checks.contains(k)) {
        return out;
    }
    let psis = selected_psi(cfg, p);
    if psis.is_empty() {
        out.push(CheckReport::skipped("psi", json!({"p": p}), "no valid ψ"));
        return out;
    }
    for psi in psis {
        let psi = match psi {
            Ok(psi) => psi,
            Err((j, e)) => {
                let params = json!({"p": p, "psi": format!("omega^{j}")});
                out.push(CheckReport::skipped("psi", params, &e.to_string()));
                continue;
            }
        };
        if checks.contains(&CheckKind::ThetaBernoulli) {
            out.push(check_theta_bernoulli(&psi));
        }
        for n in 1..=cfg.n_max {
            if checks.contains(&CheckKind::ThetaCoherence) {
                out.push(check_theta_coherence(&psi, n));
            }
        }
        if checks.contains(&CheckKind::LambdaMu) {
            out.push(check_lambda_mu(&psi, cfg.n_max.max(1)));
        }
        for n in 0..=cfg.n_max {
            if checks.contains(&CheckKind::CokerOrder) {
                out.push(iwasawa::coker_order_check(&psi, n));
            }
        }
        if checks.contains(&CheckKind::MinimalPoly) {
            out.push(check_minimal_poly(p, psi.j() as i64, cfg.precision));
        }
    }
    out
}

enum Task {
    Site { p: u64, n: u32, l: u64 },
    Restriction { p: u64, n: u32 },
    Iwasawa { p: u64 },
}

/// Runs every selected check over the configured grid. Entries are
/// evaluated in parallel and returned in grid order.
pub fn run_grid(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    cfg.validate()?;
    let site_kinds = [
        CheckKind::GaussNorm,
        CheckKind::Stickelberger,
        CheckKind::BetaMap,
        CheckKind::WeilCongruence,
        CheckKind::WeilConstruction,
        CheckKind::NormDefect,
        CheckKind::NormCommutation,
    ];
    let any_site = site_kinds.iter().any(|k| cfg.checks.contains(k));
    let any_iwasawa = CheckKind::iwasawa_suite()
        .iter()
        .any(|k| cfg.checks.contains(k));
    let mut tasks = Vec::new();
    let mut samples = std::collections::BTreeMap::new();
    for &p in &cfg.primes {
        for n in 0..=cfg.n_max {
            if n >= 1 && cfg.checks.contains(&CheckKind::RestrictionSurjectivity) {
                tasks.push(Task::Restriction { p, n });
            }
            if !any_site {
                continue;
            }
            samples.insert((p, n), sample_deltas(p, n, cfg.delta_t_max, cfg.seed)?);
            for l in arith::primes_below(cfg.l_max + 1) {
                tasks.push(Task::Site { p, n, l });
            }
        }
        if any_iwasawa {
            tasks.push(Task::Iwasawa { p });
        }
    }
    let results: Vec<Vec<CheckReport>> = tasks
        .par_iter()
        .map(|t| match *t {
            Task::Site { p, n, l } => site_checks(cfg, p, n, l, &samples[&(p, n)]),
            Task::Restriction { p, n } => vec![check_restriction_surjectivity(p, n)],
            Task::Iwasawa { p } => iwasawa_checks(cfg, p),
        })
        .collect();
    Ok(results.into_iter().flatten().collect())
}

/// Pass/fail/skipped counts.
pub fn tally(reports: &[CheckReport]) -> (usize, usize, usize) {
    reports.iter().fold((0, 0, 0), |(p, f, s), r| match r.status {
        Status::Pass => (p + 1, f, s),
        Status::Fail => (p, f + 1, s),
        Status::Skipped => (p, f, s + 1),
    })
}
