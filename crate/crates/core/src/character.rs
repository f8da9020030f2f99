//! Characters `χ^r θ` of `G_n` and their values on group-ring elements.
//!
//! A character is given by `(d, m, e, r)`: `θ|_Δ = ω_T^d`, `θ(γ) = ζ_{p^m}^e`
//! with `ζ_{p^m}` primitive, and `χ^r` the `r`-th power of the cyclotomic
//! character. Through `σ_a: ζ ↦ ζ^a` the group `(Z/p^{m+1})^×` is identified
//! with `Δ × Γ/Γ^{p^m}` by writing `a = ω_T(a)·u^t` with `ω_T(a) = ω_T(g)^i`;
//! then `θ(σ_a) = ω_T(g)^{id} ζ_{p^m}^{et}`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cyclotomic::CyclotomicScalar;
use crate::error::{Error, Result};
use crate::group_ring::GroupRingElem;
use crate::padic::{discrete_log, mod_pow, primitive_root, teichmuller, PadicCtx, PadicScalar};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CharacterSpec {
    pub d: i64,
    pub m: u32,
    pub e: i64,
    pub r: u32,
}

impl CharacterSpec {
    pub fn new(d: i64, m: u32, e: i64, r: u32) -> Self {
        CharacterSpec { d, m, e, r }
    }

    pub fn trivial() -> Self {
        Self::new(0, 0, 1, 0)
    }

    /// Checks the invariants for use at level `n` and reduces `d` mod `p-1`
    /// and `e` mod `p^m`.
    pub fn normalized(&self, p: u64, n: u32) -> Result<Self> {
        if self.m >= n {
            return Err(Error::BadConductor(format!(
                "Γ-conductor index {} needs level n > {}, have n = {n}",
                self.m, self.m
            )));
        }
        let d = self.d.rem_euclid(p as i64 - 1);
        if self.m == 0 {
            return Ok(Self::new(d, 0, 1, self.r));
        }
        let e = self.e.rem_euclid(p.pow(self.m) as i64);
        if e % p as i64 == 0 {
            return Err(Error::BadConductor(format!(
                "exponent e = {} is divisible by p",
                self.e
            )));
        }
        Ok(Self::new(d, self.m, e, self.r))
    }

    /// The Γ-order of `θ` is `p^m`; the conductor index is `m + 1`.
    pub fn conductor_index(&self) -> u32 {
        self.m + 1
    }

    /// `θ^{-1}` (the `χ^r` part is dropped).
    pub fn inverse(&self) -> Self {
        Self::new(-self.d, self.m, -self.e, 0)
    }

    pub fn is_trivial_theta(&self, p: u64) -> bool {
        self.d.rem_euclid(p as i64 - 1) == 0 && self.m == 0
    }
}

/// Every `(d, m, e, r)` with `m < n` and `r <= r_max`, `e` running over the
/// units mod `p^m`.
pub fn enumerate_characters(p: u64, n: u32, r_max: u32) -> Vec<CharacterSpec> {
    let mut out = Vec::new();
    for r in 0..=r_max {
        for m in 0..n {
            let es: Vec<i64> = if m == 0 {
                vec![1]
            } else {
                (1..p.pow(m) as i64).filter(|e| e % p as i64 != 0).collect()
            };
            for d in 0..p as i64 - 1 {
                for &e in &es {
                    out.push(CharacterSpec::new(d, m, e, r));
                }
            }
        }
    }
    out
}

/// `χ^rθ(f) = Σ c[σ][r'] ω_T(g)^{σ(d+r)} u^{r'r} ζ_{p^m}^{e r'}` in `E(ζ_{p^m})`,
/// with `r'` the canonical exponent in `[0, p^{n-1})`. For `r > 0` the
/// factor `χ^r` is a character of `G_n` only modulo `p^n`, so the value is
/// multiplicative in `f` only to that precision.
pub fn eval_char<S: Scalar>(f: &GroupRingElem<S>, chi: &CharacterSpec) -> Result<CyclotomicScalar<S>> {
    let level = f.level();
    let chi = chi.normalized(level.p(), level.n())?;
    let p = level.p();
    let order = p.pow(chi.m) as usize;
    let u_pows = level.u_pow_table(chi.r as i64, level.gamma_order());
    let mut v = vec![S::zero(f.ctx()); order];
    for s in 0..level.delta_order() {
        let w = level.teich_g_pow(s as i64 * (chi.d + chi.r as i64));
        for (rho, c) in f.row(s).iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = (chi.e as u64 * rho as u64 % order as u64) as usize;
            v[k] = v[k].add(&c.scale(&w.mul(&u_pows[rho])));
        }
    }
    Ok(CyclotomicScalar::from_exponent_vector(f.ctx(), p, chi.m, v))
}

/// The conductor exponent `c` of `θ` (its conductor is `p^c`), or `None`
/// for the trivial character.
pub fn conductor_exponent(p: u64, chi: &CharacterSpec) -> Option<u32> {
    if chi.m >= 1 {
        Some(chi.m + 1)
    } else if chi.d.rem_euclid(p as i64 - 1) != 0 {
        Some(1)
    } else {
        None
    }
}

/// Decomposes units mod `p^c` as `a = ω_T(a)·u^t`, `ω_T(a) = ω_T(g)^i`.
struct UnitLog {
    p: u64,
    modulus: u64,
    g: u64,
    teich_g: u64,
    u_log: std::collections::HashMap<u64, u64>,
}

impl UnitLog {
    fn new(ctx: &Arc<PadicCtx>, c: u32) -> Result<Self> {
        let p = ctx.p();
        let modulus = p.pow(c);
        let g = primitive_root(p);
        let teich_g = teichmuller(ctx, g as i64)?
            .to_integer_mod(c)
            .and_then(|x| i64::try_from(x).ok())
            .ok_or_else(|| Error::BadPrecision(format!("N must be at least {c}")))?
            .rem_euclid(modulus as i64) as u64;
        let u = (1 + p) % modulus;
        let mut u_log = std::collections::HashMap::new();
        let mut acc = 1u64;
        for t in 0..modulus / p {
            u_log.insert(acc, t);
            acc = acc * u % modulus;
        }
        Ok(UnitLog {
            p,
            modulus,
            g,
            teich_g,
            u_log,
        })
    }

    /// `(i, t)` for a unit `a`.
    fn split(&self, a: u64) -> (u64, u64) {
        let i = discrete_log((a % self.p) as i64, self.g, self.p).expect("a is a unit");
        let omega = mod_pow(self.teich_g, i, self.modulus);
        let omega_inv = mod_pow(omega, self.modulus / self.p * (self.p - 1) - 1, self.modulus);
        let t = self.u_log[&(a * omega_inv % self.modulus)];
        (i, t)
    }
}

/// The value `θ(σ_a)` in `Q_p(ζ_{p^c})` with `c` the conductor exponent,
/// `ζ_{p^m} = ζ_{p^c}^{p^{c-m}}`.
pub fn dirichlet_value(ctx: &Arc<PadicCtx>, chi: &CharacterSpec, a: i64) -> Result<CyclotomicScalar<PadicScalar>> {
    let p = ctx.p();
    let c = conductor_exponent(p, chi).ok_or(Error::TrivialCharacter)?;
    let logs = UnitLog::new(ctx, c)?;
    let a = a.rem_euclid(logs.modulus as i64) as u64;
    if a.is_multiple_of(p) {
        return Err(Error::BadIndex(format!("{a} is not a unit mod p")));
    }
    let (i, t) = logs.split(a);
    let w = teichmuller(ctx, logs.g as i64)?.pow(i * chi.d.rem_euclid(p as i64 - 1) as u64);
    let step = p.pow(c - chi.m) as i64;
    let mut out = CyclotomicScalar::zeta_pow(ctx, p, c, step * chi.e * t as i64);
    out = out.scale(&w);
    Ok(out)
}

/// `τ(θ) = Σ_{a mod p^c, p ∤ a} θ(σ_a) ζ_{p^c}^a`.
pub fn gauss_sum(ctx: &Arc<PadicCtx>, chi: &CharacterSpec) -> Result<CyclotomicScalar<PadicScalar>> {
    if chi.r != 0 {
        return Err(Error::BadConductor("Gauss sums are taken of θ alone (r = 0)".into()));
    }
    let p = ctx.p();
    let c = conductor_exponent(p, chi).ok_or(Error::TrivialCharacter)?;
    if chi.m >= 1 && chi.e.rem_euclid(p as i64) == 0 {
        return Err(Error::BadConductor(format!("exponent e = {} is divisible by p", chi.e)));
    }
    let logs = UnitLog::new(ctx, c)?;
    let tg = teichmuller(ctx, logs.g as i64)?;
    let d = chi.d.rem_euclid(p as i64 - 1) as u64;
    let step = p.pow(c - chi.m);
    let order = logs.modulus;
    let mut v = vec![PadicScalar::zero(ctx); order as usize];
    for a in (1..order).filter(|a| a % p != 0) {
        let (i, t) = logs.split(a);
        let k = (a as i64 + (step * t) as i64 * chi.e).rem_euclid(order as i64) as usize;
        v[k] = v[k].add(&tg.pow(i * d));
    }
    Ok(CyclotomicScalar::from_exponent_vector(ctx, p, c, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_ring::Level;
    use proptest::prelude::*;

    type G = GroupRingElem<PadicScalar>;

    fn level(p: u64, n: u32, cap: u32) -> Arc<Level> {
        Level::new(&PadicCtx::new(p, cap).unwrap(), n).unwrap()
    }

    #[test]
    fn phi_at_trivial_character_is_p() {
        let l = level(5, 3, 30);
        for m in 1..3 {
            let f = G::phi(&l, l.ctx(), m).unwrap();
            let v = eval_char(&f, &CharacterSpec::trivial()).unwrap();
            assert_eq!(v.coeffs()[0], PadicScalar::from_i64(l.ctx(), 5));
        }
    }

    #[test]
    fn phi_vanishes_exactly_at_its_own_order() {
        let l = level(3, 4, 30);
        for m in 1..4 {
            let f = G::phi(&l, l.ctx(), m).unwrap();
            for chi in enumerate_characters(3, 4, 0) {
                let v = eval_char(&f, &chi).unwrap();
                assert_eq!(v.is_zero(), chi.m == m, "m = {m}, {chi:?}");
            }
        }
    }

    #[test]
    fn twisted_phi_vanishes_at_matching_twist() {
        let l = level(3, 3, 30);
        for m in 1..3 {
            for j in 0..3u32 {
                let f = G::phi(&l, l.ctx(), m).unwrap().twist_gamma(j as i64);
                for r in 0..3u32 {
                    let v = eval_char(&f, &CharacterSpec::new(0, m, 1, r)).unwrap();
                    assert_eq!(v.is_zero(), r == j, "m = {m}, j = {j}, r = {r}");
                }
            }
        }
    }

    #[test]
    fn conductor_checks() {
        let l = level(3, 2, 20);
        let f = G::one(&l, l.ctx());
        assert!(matches!(
            eval_char(&f, &CharacterSpec::new(0, 2, 1, 0)),
            Err(Error::BadConductor(_))
        ));
        assert!(matches!(
            eval_char(&f, &CharacterSpec::new(0, 1, 3, 0)),
            Err(Error::BadConductor(_))
        ));
    }

    #[test]
    fn quadratic_gauss_sum_mod_three() {
        let ctx = PadicCtx::new(3, 20).unwrap();
        let tau = gauss_sum(&ctx, &CharacterSpec::new(1, 0, 1, 0)).unwrap();
        let sq = tau.mul(&tau).unwrap();
        assert_eq!(sq, CyclotomicScalar::from_scalar(&ctx, 3, 1, PadicScalar::from_i64(&ctx, -3)));
        // direct two-term sum ζ₃ - ζ₃²
        let direct = CyclotomicScalar::zeta_pow(&ctx, 3, 1, 1)
            .sub(&CyclotomicScalar::zeta_pow(&ctx, 3, 1, 2))
            .unwrap();
        assert_eq!(tau, direct);
        assert!(matches!(
            gauss_sum(&ctx, &CharacterSpec::trivial()),
            Err(Error::TrivialCharacter)
        ));
    }

    #[test]
    fn gauss_sum_product_identity() {
        for (p, max_m) in [(3u64, 2u32), (5, 1), (7, 1)] {
            let ctx = PadicCtx::new(p, 30).unwrap();
            for chi in enumerate_characters(p, max_m + 1, 0) {
                let Some(c) = conductor_exponent(p, &chi) else {
                    continue;
                };
                let a = gauss_sum(&ctx, &chi).unwrap();
                let b = gauss_sum(&ctx, &chi.inverse()).unwrap();
                let sign = if chi.d % 2 == 0 { 1 } else { -1 };
                let expect = PadicScalar::from_i64(&ctx, sign * p.pow(c) as i64);
                assert_eq!(
                    a.mul(&b).unwrap(),
                    CyclotomicScalar::from_scalar(&ctx, p, c, expect),
                    "p = {p}, {chi:?}"
                );
            }
        }
    }

    #[test]
    fn gauss_sum_galois_consistency() {
        let p = 3;
        let ctx = PadicCtx::new(p, 30).unwrap();
        for chi in enumerate_characters(p, 3, 0) {
            let Some(c) = conductor_exponent(p, &chi) else {
                continue;
            };
            let tau = gauss_sum(&ctx, &chi).unwrap();
            for b in [2i64, 4, 5, 7] {
                let moved = CharacterSpec::new(chi.d, chi.m, chi.e * b, 0);
                let lhs = tau.galois(b).unwrap();
                let value = dirichlet_value(&ctx, &moved, b).unwrap();
                let rhs = gauss_sum(&ctx, &moved).unwrap().div(&value).unwrap();
                assert_eq!(lhs, rhs, "{chi:?}, b = {b}, c = {c}");
            }
        }
    }

    fn arb_elem(p: u64, n: u32, cap: u32) -> impl Strategy<Value = G> {
        let l = level(p, n, cap);
        let len = l.delta_order() * l.gamma_order();
        prop::collection::vec(-20i64..20, len).prop_map(move |v| {
            let rows = v
                .chunks(l.gamma_order())
                .map(|c| c.iter().map(|x| PadicScalar::from_i64(l.ctx(), *x)).collect())
                .collect();
            G::from_rows(&l, l.ctx(), rows).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn eval_is_a_ring_homomorphism(f in arb_elem(3, 3, 30), g in arb_elem(3, 3, 30), idx in 0usize..54) {
            let chars = enumerate_characters(3, 3, 2);
            let chi = chars[idx % chars.len()];
            let fg = f.mul(&g).unwrap();
            let lhs = eval_char(&fg, &chi).unwrap();
            let rhs = eval_char(&f, &chi).unwrap().mul(&eval_char(&g, &chi).unwrap()).unwrap();
            if chi.r == 0 {
                prop_assert_eq!(lhs, rhs);
            } else {
                // χ^r only factors through G_n modulo p^n
                let diff = lhs.sub(&rhs).unwrap();
                prop_assert!(diff.coeffs().iter().all(|c| c.valuation().is_none_or(|v| v >= 3)));
            }
            let one = G::one(f.level(), f.ctx());
            prop_assert_eq!(eval_char(&one, &chi).unwrap(), CyclotomicScalar::one(f.ctx(), 3, chi.m));
        }

        #[test]
        fn eval_matches_crt_slot(f in arb_elem(5, 2, 30), d in 0i64..4, e in 1i64..5) {
            let l = f.level().clone();
            let slots = f.crt_decompose();
            let split = crate::group_ring::delta_split_slot(&l, slots.slot(1));
            let expect = split[d as usize].galois(e).unwrap();
            prop_assert_eq!(eval_char(&f, &CharacterSpec::new(d, 1, e, 0)).unwrap(), expect);
        }
    }
}
