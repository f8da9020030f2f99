//! The plus/minus decomposition of a pair `(L_{α}, L_{-α})`.
//!
//! With `α₁ = α`, `α₂ = -α`:
//! `L_i = log⁺·L⁺ + α_i·log⁻·L⁻`, so `L⁺ = (L₁ + L₂)/(2 log⁺)` and
//! `L⁻ = (L₁ - L₂)/(2α log⁻)`.
//!
//! `log^±` vanishes in the CRT slots listed by [`omega_indices`], so the
//! quotients are only defined modulo elements supported there. The returned
//! representatives are the reductions modulo `∏_{m ∉ T} Φ_{p^m}(γ)` (row by
//! row), which are integral whenever the coset has an integral member; that
//! is the finite-level form of `L^± = O(1)`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::character::{enumerate_characters, eval_char, CharacterSpec};
use crate::cyclotomic::CyclotomicScalar;
use crate::error::{Error, Result};
use crate::group_ring::{GroupRingElem, Level};
use crate::half_logs::{log_trunc, omega_indices, Sign};
use crate::padic::PadicScalar;
use crate::quad::{QuadCtx, QuadExtScalar};

type G = GroupRingElem<PadicScalar>;
type GQ = GroupRingElem<QuadExtScalar>;

#[derive(Debug, Clone)]
pub struct AdmissiblePair {
    pub quad: Arc<QuadCtx>,
    pub l1: GQ,
    pub l2: GQ,
}

impl AdmissiblePair {
    pub fn new(quad: &Arc<QuadCtx>, l1: GQ, l2: GQ) -> Result<Self> {
        l1.check_shape(&l2)?;
        Ok(AdmissiblePair {
            quad: quad.clone(),
            l1,
            l2,
        })
    }

    pub fn level(&self) -> &Arc<Level> {
        self.l1.level()
    }

    pub fn weight(&self) -> u32 {
        self.quad.weight()
    }
}

/// The slots left free in each quotient: `log^±` vanishes there.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witnesses {
    pub plus: Vec<u32>,
    pub minus: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct PMDecomposition {
    pub lplus: G,
    pub lminus: G,
    pub witnesses: Witnesses,
}

#[derive(Debug, Clone, Copy)]
#[derive(Default)]
pub struct DecomposeOptions {
    /// Least admissible coefficient valuation of `L^±`.
    pub floor: i64,
}


pub fn compose(lplus: &G, lminus: &G, quad: &Arc<QuadCtx>) -> Result<AdmissiblePair> {
    lplus.check_shape(lminus)?;
    let level = lplus.level();
    let k = quad.weight();
    let plus = log_trunc(level, k, Sign::Plus)?.mul(lplus)?.to_quad(quad);
    let minus = log_trunc(level, k, Sign::Minus)?
        .mul(lminus)?
        .to_quad(quad)
        .scale(&QuadExtScalar::alpha(quad));
    AdmissiblePair::new(quad, plus.add(&minus)?, plus.sub(&minus)?)
}

fn quotient(level: &Arc<Level>, k: u32, sign: Sign, numer: &G, opts: &DecomposeOptions) -> Result<(G, Vec<u32>)> {
    let free = omega_indices(level.n(), sign);
    for &m in &free {
        if !numer.divisible_by_phi(m)? {
            return Err(Error::NotDecomposable(format!(
                "the {sign} combination is not divisible by Φ_{m}(γ)"
            )));
        }
    }
    let log = log_trunc(level, k, sign)?;
    let q = numer.divide_slotwise(&log, &free).map_err(|e| match e {
        Error::NotAUnit(msg) => Error::NotDecomposable(msg),
        other => other,
    })?;
    let bounded = q.reduce_mod_kept_slots(&free);
    if let Some(v) = bounded.min_half_valuation() {
        if v < 2 * opts.floor {
            return Err(Error::UnboundedResult(format!(
                "L{} has a coefficient of valuation {} below the floor {}",
                if sign == Sign::Plus { "+" } else { "-" },
                v as f64 / 2.0,
                opts.floor
            )));
        }
    }
    Ok((bounded, free))
}

pub fn decompose(pair: &AdmissiblePair, opts: &DecomposeOptions) -> Result<PMDecomposition> {
    let level = pair.level().clone();
    let k = pair.weight();
    let half = PadicScalar::from_ratio(level.ctx(), 1, 2)?;

    let (sum, sum_alpha) = pair.l1.add(&pair.l2)?.split_alpha();
    if !sum_alpha.is_zero() {
        return Err(Error::NotDecomposable("L1 + L2 has a nonzero α-component".into()));
    }
    // L1 - L2 = α·Y with Y over Q_p
    let (diff_base, diff_alpha) = pair.l1.sub(&pair.l2)?.split_alpha();
    if !diff_base.is_zero() {
        return Err(Error::NotDecomposable("L1 - L2 is not α times a Q_p-element".into()));
    }

    let (lplus, plus) = quotient(&level, k, Sign::Plus, &sum.scale_padic(&half), opts)?;
    let (lminus, minus) = quotient(&level, k, Sign::Minus, &diff_alpha.scale_padic(&half), opts)?;
    Ok(PMDecomposition {
        lplus,
        lminus,
        witnesses: Witnesses { plus, minus },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityEntry {
    pub character: CharacterSpec,
    /// Conductor index `m + 1`.
    pub s: u32,
    pub passed: bool,
    /// Not counted towards the verdict: `s < s_min`, or `r > 0`, where the
    /// value of `χ^r` on an element of `E[G_n]` is only defined modulo
    /// roughly `p^n` and exact equality cannot be decided.
    pub informational: bool,
    /// Half-valuation of `α^s χ^rθ(L₁) - (-α)^s χ^rθ(L₂)` minus that of
    /// `α^s χ^rθ(L₁)`; `None` when the difference is exactly zero.
    pub agreement: Option<i64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub s_min: u32,
    pub passed: bool,
    pub checked: usize,
    pub failures: usize,
    pub entries: Vec<AdmissibilityEntry>,
}

fn min_half_valuation(x: &CyclotomicScalar<QuadExtScalar>) -> Option<i64> {
    x.coeffs().iter().filter_map(|c| c.half_valuation()).min()
}

/// Checks `α^s·χ^rθ(L₁) = (-α)^s·χ^rθ(L₂)` for every character with
/// conductor index `s = m + 1` and `0 <= r <= k-2`. Only the `r = 0`,
/// `s >= s_min` entries decide the verdict.
pub fn check_admissible(pair: &AdmissiblePair, s_min: u32) -> Result<AdmissibilityReport> {
    let level = pair.level();
    let k = pair.weight();
    let alpha = QuadExtScalar::alpha(&pair.quad);
    let chars = enumerate_characters(level.p(), level.n(), k - 2);
    let entries = chars
        .par_iter()
        .map(|chi| {
            let s = chi.m + 1;
            let lhs = eval_char(&pair.l1, chi)?.scale(&alpha.pow(s as u64));
            let rhs = eval_char(&pair.l2, chi)?.scale(&alpha.neg().pow(s as u64));
            let diff = lhs.sub(&rhs)?;
            let agreement = min_half_valuation(&diff)
                .map(|d| d - min_half_valuation(&lhs).or(min_half_valuation(&rhs)).unwrap_or(d));
            Ok(AdmissibilityEntry {
                character: *chi,
                s,
                passed: diff.is_zero(),
                informational: s < s_min || chi.r > 0,
                agreement,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let failures = entries
        .iter()
        .filter(|e| !e.passed && !e.informational)
        .count();
    Ok(AdmissibilityReport {
        s_min,
        passed: failures == 0,
        checked: entries.iter().filter(|e| !e.informational).count(),
        failures,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PadicCtx;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(p: u64, n: u32, k: u32, eps: i64) -> (Arc<Level>, Arc<QuadCtx>) {
        let ctx = PadicCtx::new(p, 40).unwrap();
        let level = Level::new(&ctx, n).unwrap();
        let quad = QuadCtx::new(&ctx, k, eps).unwrap();
        (level, quad)
    }

    #[test]
    fn zero_and_plus_only_compositions() {
        let (l, q) = setup(3, 3, 2, 1);
        let z = G::zero(&l, l.ctx());
        let pair = compose(&z, &z, &q).unwrap();
        assert!(pair.l1.is_zero() && pair.l2.is_zero());

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = G::random_small(&l, &mut rng, 5);
        let pair = compose(&a, &z, &q).unwrap();
        assert_eq!(pair.l1, pair.l2);
        let expect = log_trunc(&l, 2, Sign::Plus).unwrap().mul(&a).unwrap().to_quad(&q);
        assert_eq!(pair.l1, expect);
    }

    #[test]
    fn composition_matches_direct_expansion() {
        let (l, q) = setup(3, 3, 2, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = G::random_small(&l, &mut rng, 5);
        let b = G::random_small(&l, &mut rng, 5);
        let pair = compose(&a, &b, &q).unwrap();
        // L1 coefficient by coefficient: a-part from log⁺·A, b-part from log⁻·B
        let (x, y) = pair.l1.split_alpha();
        let lp = log_trunc(&l, 2, Sign::Plus).unwrap();
        let lm = log_trunc(&l, 2, Sign::Minus).unwrap();
        let w = l.gamma_order();
        for s in 0..2 {
            for r in 0..w {
                let mut sx = PadicScalar::zero(l.ctx());
                let mut sy = PadicScalar::zero(l.ctx());
                for s2 in 0..2 {
                    for r2 in 0..w {
                        let (s1, r1) = ((s + 2 - s2) % 2, (r + w - r2) % w);
                        sx = sx.add(&lp.coeff(s1, r1).mul(a.coeff(s2, r2)));
                        sy = sy.add(&lm.coeff(s1, r1).mul(b.coeff(s2, r2)));
                    }
                }
                assert_eq!(x.coeff(s, r), &sx);
                assert_eq!(y.coeff(s, r), &sy);
            }
        }
    }

    #[test]
    fn round_trip_is_coset_exact_and_bounded() {
        for (n, k) in [(2, 2), (3, 2), (3, 3), (4, 2)] {
            let (l, q) = setup(3, n, k, 1);
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64 * 10 + k as u64);
            let a = G::random_small(&l, &mut rng, 20);
            let b = G::random_small(&l, &mut rng, 20);
            let pair = compose(&a, &b, &q).unwrap();
            let pm = decompose(&pair, &DecomposeOptions::default()).unwrap();
            let lp = log_trunc(&l, k, Sign::Plus).unwrap();
            let lm = log_trunc(&l, k, Sign::Minus).unwrap();
            assert_eq!(lp.mul(&pm.lplus).unwrap(), lp.mul(&a).unwrap());
            assert_eq!(lm.mul(&pm.lminus).unwrap(), lm.mul(&b).unwrap());
            let again = compose(&pm.lplus, &pm.lminus, &q).unwrap();
            assert_eq!(again.l1, pair.l1);
            assert_eq!(again.l2, pair.l2);
            assert_eq!(pm.witnesses.plus, omega_indices(n, Sign::Plus));
        }
    }

    #[test]
    fn constant_pair_is_not_decomposable_once_log_plus_has_a_factor() {
        let (l, q) = setup(3, 3, 2, 1);
        let one = GQ::one(&l, &q);
        let pair = AdmissiblePair::new(&q, one.clone(), one).unwrap();
        assert!(matches!(
            decompose(&pair, &DecomposeOptions::default()),
            Err(Error::NotDecomposable(_))
        ));
    }

    #[test]
    fn constant_pair_below_the_first_factor() {
        let (l, q) = setup(3, 2, 2, 1);
        let c = 7;
        let cq = GQ::constant(&l, &q, QuadExtScalar::from_base(&q, PadicScalar::from_i64(l.ctx(), c)));
        let pair = AdmissiblePair::new(&q, cq.clone(), cq).unwrap();
        // n = 2: log⁺ = 1/3, so L⁺ = (2c/2)·3 = 3c; L1 - L2 = 0 gives L⁻ = 0
        let pm = decompose(&pair, &DecomposeOptions::default()).unwrap();
        assert_eq!(pm.lplus, G::constant(&l, l.ctx(), PadicScalar::from_i64(l.ctx(), 3 * c)));
        assert!(pm.lminus.is_zero());
    }

    #[test]
    fn unbounded_result_is_reported() {
        let (l, q) = setup(3, 2, 2, 1);
        let c = QuadExtScalar::from_base(&q, PadicScalar::from_ratio(l.ctx(), 1, 9).unwrap());
        let cq = GQ::constant(&l, &q, c);
        let pair = AdmissiblePair::new(&q, cq.clone(), cq).unwrap();
        assert!(matches!(
            decompose(&pair, &DecomposeOptions::default()),
            Err(Error::UnboundedResult(_))
        ));
        assert!(decompose(&pair, &DecomposeOptions { floor: -1 }).is_ok());
    }

    #[test]
    fn composed_pairs_are_admissible() {
        let (l, q) = setup(3, 4, 2, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = G::random_small(&l, &mut rng, 9);
        let b = G::random_small(&l, &mut rng, 9);
        let pair = compose(&a, &b, &q).unwrap();
        let report = check_admissible(&pair, 2).unwrap();
        assert!(report.passed, "{} failures", report.failures);
        assert!(report.checked > 0);

        let scaled = AdmissiblePair::new(
            &q,
            pair.l1.scale_padic(&PadicScalar::from_i64(l.ctx(), 5)),
            pair.l2.scale_padic(&PadicScalar::from_i64(l.ctx(), 5)),
        )
        .unwrap();
        assert!(check_admissible(&scaled, 2).unwrap().passed);
    }

    #[test]
    fn twisted_characters_agree_to_positive_precision() {
        for (n, k) in [(3, 3), (3, 4), (4, 4)] {
            let (l, q) = setup(3, n, k, -1);
            let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
            let a = G::random_small(&l, &mut rng, 9);
            let b = G::random_small(&l, &mut rng, 9);
            let report = check_admissible(&compose(&a, &b, &q).unwrap(), 2).unwrap();
            assert!(report.passed, "n = {n}, k = {k}: {} failures", report.failures);
            for e in report.entries.iter().filter(|e| e.character.r > 0 && e.s >= 2) {
                assert!(e.informational);
                assert!(e.agreement.is_none_or(|a| a > 0), "{e:?}");
            }
        }
    }

    #[test]
    fn one_zero_pair_fails() {
        let (l, q) = setup(3, 3, 2, 1);
        let pair = AdmissiblePair::new(&q, GQ::one(&l, &q), GQ::zero(&l, &q)).unwrap();
        let report = check_admissible(&pair, 2).unwrap();
        assert!(!report.passed);
        assert_eq!(report.failures, report.checked);
    }
}
