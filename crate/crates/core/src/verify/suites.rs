use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;

use super::{Suite, SuiteReport, VerifyConfig};
use crate::character::{conductor_exponent, enumerate_characters, gauss_sum};
use crate::cyclotomic::{totient_pm, CyclotomicScalar};
use crate::error::Result;
use crate::group_ring::{GroupRingElem, Level};
use crate::half_logs::{log_trunc, predicted_zero, vanishing_factors, vanishing_locus, Sign};
use crate::padic::{verify_val_growth, PadicCtx, PadicScalar};
use crate::pollack::{check_admissible, compose, decompose, AdmissiblePair, DecomposeOptions};
use crate::qpn::{
    corollary_gen_prediction, corollary_gen_span, dim_table, galois_span_dim, pi_combination, plus_minus_space,
    predicted_span_dim, r_space, CycRationalElem,
};
use crate::quad::{QuadCtx, QuadExtScalar};
use crate::rng::{stream, stream_id};

type G = GroupRingElem<PadicScalar>;

fn level(p: u64, n: u32, cap: u32) -> Result<Arc<Level>> {
    Level::new(&PadicCtx::new(p, cap)?, n)
}

/// `Ok(true)` passes; `Ok(false)` and errors fail with a description.
fn record(report: &mut SuiteReport, what: String, outcome: Result<bool>) {
    match outcome {
        Ok(ok) => report.record(ok, || what),
        Err(e) => report.record(false, || format!("{what}: {e}")),
    }
}

fn tag(name: &str) -> u64 {
    name.bytes().fold(0u64, |h, b| h.wrapping_mul(131).wrapping_add(b as u64))
}

pub struct LinSuite;

impl Suite for LinSuite {
    fn name(&self) -> &'static str {
        "lin"
    }

    fn checks(&self) -> &'static str {
        "the b-sum test for divisibility by Φ_m(γ) agrees with the vanishing of CRT slot m, and q·Φ_m(γ) = f for every divisible f"
    }

    fn run(&self, cfg: &VerifyConfig) -> Result<SuiteReport> {
        let mut report = SuiteReport::new(self);
        let random = cfg.samples_or(500);
        let multiples = cfg.samples.map_or(200, |s| s.div_ceil(2));
        for p in cfg.primes(&[3, 5]) {
            for n in cfg.levels(2..=4) {
                let level = level(p, n, cfg.cap)?;
                for m in 1..n {
                    let mut rng = stream(cfg.seed, stream_id(&[tag(self.name()), p, n as u64, m as u64]));
                    let phi = G::phi(&level, level.ctx(), m)?;
                    let mut cases: Vec<(bool, G)> = (0..random).map(|_| (false, G::random_integral(&level, &mut rng))).collect();
                    for _ in 0..multiples {
                        let g = G::random_integral(&level, &mut rng);
                        cases.push((true, phi.mul(&g)?));
                    }
                    // (criterion agrees with the slot, quotient round trip when divisible)
                    let outcomes: Vec<(Result<bool>, Option<Result<bool>>)> = cases
                        .par_iter()
                        .map(|(constructed, f)| {
                            let criterion = match f.divisible_by_phi(m) {
                                Ok(c) => c,
                                Err(e) => return (Err(e), None),
                            };
                            let slot_zero = f.crt_decompose().slot_is_zero(m);
                            let agrees = criterion == slot_zero && (criterion || !*constructed);
                            let quotient = criterion.then(|| {
                                let q = f.divide_exact(m)?;
                                Ok(&q.mul(&phi)? == f)
                            });
                            (Ok(agrees), quotient)
                        })
                        .collect();
                    for (i, (slot, quotient)) in outcomes.into_iter().enumerate() {
                        record(&mut report, format!("slot test: p = {p}, n = {n}, m = {m}, case {i}"), slot);
                        if let Some(q) = quotient {
                            record(&mut report, format!("quotient: p = {p}, n = {n}, m = {m}, case {i}"), q);
                        }
                    }
                }
            }
        }
        Ok(report)
    }
}

pub struct PadicSuite;

fn exact_valuation(mut x: BigInt, p: u64) -> u64 {
    let p = BigInt::from(p);
    let mut v = 0;
    while !x.is_zero() && x.is_multiple_of(&p) {
        x /= &p;
        v += 1;
    }
    v
}

impl Suite for PadicSuite {
    fn name(&self) -> &'static str {
        "padic"
    }

    fn checks(&self) -> &'static str {
        "v_p(x^(p^n) - 1) = n + v_p(x - 1) for x in 1 + pZ_p, x != 1, n <= 6, against exact big-integer powers"
    }

    fn run(&self, cfg: &VerifyConfig) -> Result<SuiteReport> {
        let mut report = SuiteReport::new(self);
        for p in cfg.primes(&[3, 5]) {
            let ctx = PadicCtx::new(p, cfg.cap)?;
            let mut rng = stream(cfg.seed, stream_id(&[tag(self.name()), p]));
            let xs: Vec<BigInt> = (0..cfg.samples_or(100))
                .map(|_| {
                    let a = rng.random_range(1..=3u32);
                    let t = rng.random_range(1..p.pow(8));
                    BigInt::from(1) + BigInt::from(p).pow(a) * BigInt::from(t)
                })
                .collect();
            let levels = cfg.levels(1..=6);
            let outcomes: Vec<(String, Result<bool>)> = xs
                .par_iter()
                .flat_map_iter(|x| {
                    let ctx = ctx.clone();
                    levels.iter().map(move |&n| {
                        let expect = n as u64 + exact_valuation(x - 1, p);
                        let exact = exact_valuation(x.pow(p.pow(n) as u32) - 1, p);
                        let padic = verify_val_growth(&PadicScalar::from_bigint(&ctx, x), n);
                        (format!("p = {p}, x = {x}, n = {n}"), padic.map(|ok| ok && exact == expect))
                    })
                })
                .collect();
            for (what, o) in outcomes {
                record(&mut report, what, o);
            }
        }
        Ok(report)
    }
}

fn dims_grid(cfg: &VerifyConfig) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for p in cfg.primes(&[3, 5]) {
        let default: Vec<u32> = match p {
            3 => (2..=4).collect(),
            5 => (2..=3).collect(),
            _ => (2..=2).collect(),
        };
        for n in cfg.levels(default) {
            out.push((p, n));
        }
    }
    out
}

pub struct DimsSuite;

impl Suite for DimsSuite {
    fn name(&self) -> &'static str {
        "dims"
    }

    fn checks(&self) -> &'static str {
        "ranks of the trace-condition spaces Q^± equal 1 + Σ_{1<=m<=n/2} p^(2m-2)(p-1)^2 and p - 1 + Σ_{1<=m<=(n-1)/2} p^(2m-1)(p-1)^2, and dim U_n = dim R^+"
    }

    fn run(&self, cfg: &VerifyConfig) -> Result<SuiteReport> {
        let mut report = SuiteReport::new(self);
        for (p, n) in dims_grid(cfg) {
            let t = dim_table(p, n)?;
            record(
                &mut report,
                format!("p = {p}, n = {n}: Q+ = {}, formula {}", t.q_plus, t.formula_plus),
                Ok(t.q_plus as u64 == t.formula_plus && t.r_plus == t.q_plus),
            );
            record(
                &mut report,
                format!("p = {p}, n = {n}: Q- = {}, formula {}", t.q_minus, t.formula_minus),
                Ok(t.q_minus as u64 == t.formula_minus && t.r_minus == t.q_minus),
            );
            if let Some(u) = t.u_n {
                record(
                    &mut report,
                    format!("p = {p}, n = {n}: U_n = {u}, R+ = {}", t.r_plus),
                    Ok(u == t.r_plus),
                );
            }
        }
        Ok(report)
    }
}

pub struct CoincideSuite;

impl Suite for CoincideSuite {
    fn name(&self) -> &'static str {
        "coincide"
    }

    fn checks(&self) -> &'static str {
        "Q^± = R^± as subspaces, Q^+ ∩ Q^- = Q and dim Q^+ + dim Q^- = φ(p^n) + 1"
    }

    fn run(&self, cfg: &VerifyConfig) -> Result<SuiteReport> {
        let mut report = SuiteReport::new(self);
        let mut grid = dims_grid(cfg);
        if cfg.n.is_none() {
            grid.extend(cfg.primes(&[3, 5]).into_iter().map(|p| (p, 1)));
        }
        for (p, n) in grid {
            let qp = plus_minus_space(p, n, Sign::Plus)?;
            let qm = plus_minus_space(p, n, Sign::Minus)?;
            for (sign, qs) in [(Sign::Plus, &qp), (Sign::Minus, &qm)] {
                let rs = r_space(p, n, sign)?;
                record(&mut report, format!("p = {p}, n = {n}: Q{sign} = R{sign}"), Ok(qs.same_space(&rs)));
            }
            let one = crate::qpn::SubspaceBasis::span(p, n, [CycRationalElem::one(p, n)], "Q");
            record(
                &mut report,
                format!("p = {p}, n = {n}: Q+ ∩ Q- = Q"),
                Ok(qp.intersection_dim(&qm) == 1 && qp.contains(&one) && qm.contains(&one)),
            );
            record(
                &mut report,
                format!("p = {p}, n = {n}: dimensions add up"),
                Ok(qp.rank() + qm.rank() == totient_pm(p, n) + 1),
            );
        }
        Ok(report)
    }
}

pub struct VanishSuite;

fn scan_locus(report: &mut SuiteReport, level: &Arc<Level>, k: u32, with_simplicity: bool) -> Result<()> {
    let (p, n) = (level.p(), level.n());
    for sign in Sign::both() {
        let zeros = vanishing_locus(level, k, sign)?;
        let predicted: Vec<_> = enumerate_characters(p, n, k - 2)
            .into_iter()
            .filter(|chi| predicted_zero(n, sign, chi))
            .collect();
        let mut expect = predicted.clone();
        expect.sort();
        record(
            report,
            format!("p = {p}, k = {k}, n = {n}, log{sign}: {} zeros, {} predicted", zeros.len(), expect.len()),
            Ok(zeros == expect),
        );
        if with_simplicity {
            for chi in &zeros {
                let f = vanishing_factors(level, k, sign, chi)?;
                record(
                    report,
                    format!("p = {p}, k = {k}, n = {n}, log{sign} at {chi:?}: {} vanishing factors", f.len()),
                    Ok(f.len() == 1),
                );
            }
        }
    }
    Ok(())
}

impl Suite for VanishSuite {
    fn name(&self) -> &'static str {
        "vanish"
    }

    fn checks(&self) -> &'static str {
        "log^± vanishes at χ^rθ exactly when θ(γ) has order p^M for an index M of ω^± (no extra or missing zeros), and every zero is simple"
    }

    fn run(&self, cfg: &VerifyConfig) -> Result<SuiteReport> {
        let mut report = SuiteReport::new(self);
        for p in cfg.primes(&[3]) {
            for n in cfg.levels(1..=5) {
                let level = level(p, n, cfg.cap)?;
                for k in cfg.weights(2..=4) {
                    scan_locus(&mut report, &level, k, true)?;
                }
            }
        }
        Ok(report)
    }
}

pub struct RoundtripSuite;

impl Suite for RoundtripSuite {
    fn name(&self) -> &'static str {
        "roundtrip"
    }

    fn checks(&self) -> &'static str {
        "decompose(compose(L+, L-)) agrees with (L+, L-) after multiplication by log^±, and its outputs are integral"
    }

    fn run(&self, cfg: &VerifyConfig) -> Result<SuiteReport> {
        let mut report = SuiteReport::new(self);
        for p in cfg.primes(&[3]) {
            for n in cfg.levels(1..=4) {
                let level = level(p, n, cfg.cap)?;
                for k in cfg.weights(2..=4) {
                    let quad = QuadCtx::new(level.ctx(), k, cfg.eps)?;
                    let logp = log_trunc(&level, k, Sign::Plus)?;
                    let logm = log_trunc(&level, k, Sign::Minus)?;
                    let mut rng = stream(cfg.seed, stream_id(&[tag(self.name()), p, n as u64, k as u64]));
                    let inputs: Vec<(G, G)> = (0..cfg.samples_or(100))
                        .map(|_| (G::random_integral(&level, &mut rng), G::random_integral(&level, &mut rng)))
                        .collect();
                    let outcomes: Vec<Result<bool>> = inputs
                        .par_iter()
                        .map(|(a, b)| {
                            let pm = decompose(&compose(a, b, &quad)?, &DecomposeOptions::default())?;
                            let bounded = [&pm.lplus, &pm.lminus]
                                .iter()
                                .all(|x| x.min_half_valuation().is_none_or(|v| v >= 0));
                            Ok(bounded
                                && logp.mul(&pm.lplus)? == logp.mul(a)?
                                && logm.mul(&pm.lminus)? == logm.mul(b)?)
                        })
                        .collect();
                    for (i, o) in outcomes.into_iter().enumerate() {
                        record(&mut report, format!("p = {p}, k = {k}, n = {n}, case {i}"), o);
                    }
                }
            }
        }
        Ok(report)
    }
}

pub struct AdmissibleSuite;

impl Suite for AdmissibleSuite {
    fn name(&self) -> &'static str {
        "admissible"
    }

    fn checks(&self) -> &'static str {
        "composed pairs satisfy α^s·θ(L1) = (-α)^s·θ(L2) exactly at every conductor index 2 <= s <= n, the pair (1, 0) does not, and log^± vanish at the predicted Γ-orders"
    }

    fn run(&self, cfg: &VerifyConfig) -> Result<SuiteReport> {
        let mut report = SuiteReport::new(self);
        for p in cfg.primes(&[3]) {
            for n in cfg.levels(2..=4) {
                let level = level(p, n, cfg.cap)?;
                for k in cfg.weights(2..=4) {
                    let quad = QuadCtx::new(level.ctx(), k, cfg.eps)?;
                    let mut rng = stream(cfg.seed, stream_id(&[tag(self.name()), p, n as u64, k as u64]));
                    for i in 0..cfg.samples_or(5) {
                        let a = G::random_integral(&level, &mut rng);
                        let b = G::random_integral(&level, &mut rng);
                        let r = check_admissible(&compose(&a, &b, &quad)?, 2)?;
                        record(
                            &mut report,
                            format!("p = {p}, k = {k}, n = {n}, pair {i}: {} of {} failed", r.failures, r.checked),
                            Ok(r.passed && r.checked > 0),
                        );
                    }
                    let one = GroupRingElem::<QuadExtScalar>::one(&level, &quad);
                    let zero = GroupRingElem::<QuadExtScalar>::zero(&level, &quad);
                    let control = check_admissible(&AdmissiblePair::new(&quad, one, zero)?, 2)?;
                    record(
                        &mut report,
                        format!("p = {p}, k = {k}, n = {n}: (1, 0) must fail"),
                        Ok(!control.passed),
                    );
                    scan_locus(&mut report, &level, k, false)?;
                }
            }
        }
        Ok(report)
    }
}

pub struct UnitSuite;

impl Suite for UnitSuite {
    fn name(&self) -> &'static str {
        "unit"
    }

    fn checks(&self) -> &'static str {
        "for m >= n and 1 <= j <= k-2, Φ_m(u^-j γ)/p is a unit whose inverse re-multiplies to 1 mod p^(N-n); Φ_m(γ)/p = 1"
    }

    fn run(&self, cfg: &VerifyConfig) -> Result<SuiteReport> {
        let mut report = SuiteReport::new(self);
        for p in cfg.primes(&[3, 5]) {
            for n in cfg.levels(1..=4) {
                let level = level(p, n, cfg.cap)?;
                let ctx = level.ctx();
                let inv_p = PadicScalar::p_power(ctx, -1);
                let one = G::one(&level, ctx);
                let bound = cfg.cap as i64 - n as i64;
                for m in n..=n + 2 {
                    record(
                        &mut report,
                        format!("p = {p}, n = {n}, m = {m}, j = 0"),
                        G::phi(&level, ctx, m).map(|f| f.scale_padic(&inv_p) == one),
                    );
                    for k in cfg.weights(2..=4) {
                        for j in 1..=k as i64 - 2 {
                            let outcome = (|| {
                                let g = G::phi_twisted(&level, ctx, m, j)?.scale_padic(&inv_p);
                                let diff = g.mul(&g.invert_unit()?)?.sub(&one)?;
                                Ok(diff
                                    .rows()
                                    .iter()
                                    .flatten()
                                    .all(|c| c.valuation().is_none_or(|v| v >= bound)))
                            })();
                            record(&mut report, format!("p = {p}, n = {n}, m = {m}, j = {j}"), outcome);
                        }
                    }
                }
            }
        }
        Ok(report)
    }
}

pub struct SpanningSuite;

impl Suite for SpanningSuite {
    fn name(&self) -> &'static str {
        "spanning"
    }

    fn checks(&self) -> &'static str {
        "the orbit rank of Σ x_i π_i is Σ_{x_i != 0} dim Q^(i), 1 + ζ_p + ... + ζ_{p^n} has full orbit rank, and a_0 + Σ a_i ζ_{p^i} spans Q + Σ_{a_i != 0} orbit(ζ_{p^i})"
    }

    fn run(&self, cfg: &VerifyConfig) -> Result<SuiteReport> {
        let mut report = SuiteReport::new(self);
        let grid: Vec<(u64, u32)> = cfg
            .primes(&[3, 5])
            .into_iter()
            .flat_map(|p| {
                let default = if p == 3 { 1..=3 } else { 1..=2 };
                cfg.levels(default).into_iter().map(move |n| (p, n))
            })
            .collect();
        let mut rng = stream(cfg.seed, stream_id(&[tag(self.name())]));
        let small = |rng: &mut rand_chacha::ChaCha8Rng, zero_prob: f64| {
            if rng.random_bool(zero_prob) {
                BigRational::zero()
            } else {
                BigRational::new(rng.random_range(-9..=9i64).into(), rng.random_range(1..=5i64).into())
            }
        };
        let combos: Vec<(u64, Vec<BigRational>)> = (0..cfg.samples_or(200))
            .map(|_| {
                let (p, n) = grid[rng.random_range(0..grid.len())];
                (p, (0..=n).map(|_| small(&mut rng, 0.5)).collect())
            })
            .collect();
        let outcomes: Vec<Result<bool>> = combos
            .par_iter()
            .map(|(p, x)| Ok(galois_span_dim(&pi_combination(*p, x)?) as u64 == predicted_span_dim(*p, x)))
            .collect();
        for ((p, x), o) in combos.iter().zip(outcomes) {
            record(&mut report, format!("p = {p}, coordinates {x:?}"), o);
        }
        for &(p, n) in &grid {
            let mut eta = CycRationalElem::one(p, n);
            for i in 1..=n {
                eta = &eta + &CycRationalElem::zeta_pow(p, i, 1).embed(n)?;
            }
            record(
                &mut report,
                format!("p = {p}, n = {n}: normal basis"),
                Ok(galois_span_dim(&eta) == totient_pm(p, n)),
            );
        }
        for _ in 0..cfg.samples_or(200) / 10 {
            let (p, n) = grid[rng.random_range(0..grid.len())];
            let a: Vec<BigRational> = (0..=n)
                .map(|_| {
                    let c = small(&mut rng, 0.3);
                    if c.is_zero() { c } else { c.round() + BigRational::one() }
                })
                .collect();
            let outcome = match corollary_gen_span(p, &a) {
                Ok(span) => corollary_gen_prediction(p, &a).map(|pred| span.same_space(&pred)),
                Err(crate::error::Error::HypothesisViolated(_)) => Ok(true),
                Err(e) => Err(e),
            };
            record(&mut report, format!("p = {p}, a = {a:?}"), outcome);
        }
        Ok(report)
    }
}

pub struct GaussSuite;

impl Suite for GaussSuite {
    fn name(&self) -> &'static str {
        "gauss"
    }

    fn checks(&self) -> &'static str {
        "τ(θ)·τ(θ^-1) = θ(-1)·p^c exactly for every nontrivial θ of conductor p^c <= p^3"
    }

    fn run(&self, cfg: &VerifyConfig) -> Result<SuiteReport> {
        let mut report = SuiteReport::new(self);
        for p in cfg.primes(&[3, 5]) {
            let ctx = PadicCtx::new(p, cfg.cap)?;
            let chars: Vec<_> = enumerate_characters(p, 3, 0)
                .into_iter()
                .filter_map(|chi| conductor_exponent(p, &chi).map(|c| (chi, c)))
                .collect();
            let outcomes: Vec<Result<bool>> = chars
                .par_iter()
                .map(|(chi, c)| {
                    let prod = gauss_sum(&ctx, chi)?.mul(&gauss_sum(&ctx, &chi.inverse())?)?;
                    let sign = if chi.d.rem_euclid(2) == 0 { 1 } else { -1 };
                    let expect = PadicScalar::from_i64(&ctx, sign * p.pow(*c) as i64);
                    Ok(prod == CyclotomicScalar::from_scalar(&ctx, p, *c, expect))
                })
                .collect();
            for ((chi, c), o) in chars.iter().zip(outcomes) {
                record(&mut report, format!("p = {p}, conductor p^{c}, {chi:?}"), o);
            }
        }
        Ok(report)
    }
}
