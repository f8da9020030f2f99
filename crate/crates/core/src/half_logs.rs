//! Finite-level truncations of the half-logarithms `log_{p,k}^±`.
//!
//! `ω_n^+ = ∏_{1 <= m, 2m < n} Φ_{2m}(γ)/p`, `ω_n^- = ∏_{1 <= m, 2m-1 < n} Φ_{2m-1}(γ)/p`
//! and `log^± = p^{1-k} ∏_{j=0}^{k-2} ω_n^±(u^{-j}γ)`, with the unit `λ_±` set to `1`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::character::{enumerate_characters, eval_char, CharacterSpec};
use crate::cyclotomic::CyclotomicScalar;
use crate::error::{Error, Result};
use crate::group_ring::{GroupRingElem, Level};
use crate::padic::PadicScalar;

type G = GroupRingElem<PadicScalar>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn both() -> [Sign; 2] {
        [Sign::Plus, Sign::Minus]
    }

    /// Parity of the cyclotomic indices that appear in `ω^±`.
    fn parity(self) -> u32 {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "plus",
            Sign::Minus => "minus",
        })
    }
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" => Ok(Sign::Plus),
            "-" | "minus" => Ok(Sign::Minus),
            other => Err(Error::Malformed(format!("unknown sign {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct HalfLogParams {
    pub level: Arc<Level>,
    pub k: u32,
    pub sign: Sign,
}

impl HalfLogParams {
    pub fn new(level: &Arc<Level>, k: u32, sign: Sign) -> Result<Self> {
        if k < 2 {
            return Err(Error::DegenerateInput(format!("weight k = {k} must be >= 2")));
        }
        Ok(HalfLogParams {
            level: level.clone(),
            k,
            sign,
        })
    }

    pub fn with_sign(&self, sign: Sign) -> Self {
        HalfLogParams {
            sign,
            ..self.clone()
        }
    }

    pub fn log_trunc(&self) -> Result<G> {
        log_trunc(&self.level, self.k, self.sign)
    }
}

/// The indices `M` with `Φ_M` a factor of `ω_n^±`: the `M` in `[1, n)` of the
/// sign's parity (even for `+`, odd for `-`).
pub fn omega_indices(n: u32, sign: Sign) -> Vec<u32> {
    (1..n).filter(|m| m % 2 == sign.parity()).collect()
}

/// `ω̃_n^± = ∏ Φ_M(γ)`.
pub fn omega_tilde(level: &Arc<Level>, sign: Sign) -> Result<G> {
    omega_product(level, sign, 0, false)
}

/// `ω_n^± = ∏ Φ_M(γ)/p`.
pub fn omega_poly(level: &Arc<Level>, sign: Sign) -> Result<G> {
    omega_product(level, sign, 0, true)
}

/// `ω_n^±(u^{-t}γ)`, each factor twisted as a polynomial before reduction.
pub fn omega_twisted(level: &Arc<Level>, sign: Sign, t: i64) -> Result<G> {
    omega_product(level, sign, t, true)
}

fn omega_product(level: &Arc<Level>, sign: Sign, t: i64, normalize: bool) -> Result<G> {
    let ctx = level.ctx();
    let inv_p = PadicScalar::p_power(ctx, -1);
    let mut acc = G::one(level, ctx);
    for m in omega_indices(level.n(), sign) {
        let mut f = G::phi_twisted(level, ctx, m, t)?;
        if normalize {
            f = f.scale_padic(&inv_p);
        }
        acc = acc.mul(&f)?;
    }
    Ok(acc)
}

/// `p^{1-k} ∏_{j=0}^{k-2} ω_n^±(u^{-j}γ)` in `Q_p[G_n]`.
pub fn log_trunc(level: &Arc<Level>, k: u32, sign: Sign) -> Result<G> {
    log_trunc_twisted(level, k, sign, 0)
}

/// `Tw_r(log^±) = p^{1-k} ∏_{j=0}^{k-2} ω_n^±(u^{r-j}γ)`, the factors
/// twisted before reduction. Evaluating this at `θ` gives `χ^rθ(log^±)`
/// exactly, which evaluating [`log_trunc`] at `χ^rθ` does only modulo `p^n`.
pub fn log_trunc_twisted(level: &Arc<Level>, k: u32, sign: Sign, r: u32) -> Result<G> {
    if k < 2 {
        return Err(Error::DegenerateInput(format!("weight k = {k} must be >= 2")));
    }
    let ctx = level.ctx();
    let mut acc = G::constant(level, ctx, PadicScalar::p_power(ctx, 1 - k as i64));
    for j in 0..=(k - 2) as i64 {
        acc = acc.mul(&omega_twisted(level, sign, j - r as i64)?)?;
    }
    Ok(acc)
}

/// `χ^rθ(log^±)` in `Q_p(ζ_{p^m})`.
pub fn eval_log(level: &Arc<Level>, k: u32, sign: Sign, chi: &CharacterSpec) -> Result<CyclotomicScalar<PadicScalar>> {
    let tw = log_trunc_twisted(level, k, sign, chi.r)?;
    eval_char(&tw, &CharacterSpec::new(chi.d + chi.r as i64, chi.m, chi.e, 0))
}

/// The predicted zero set: `θ(γ)` of exact order `p^m` with `m` one of the
/// indices of `ω_n^±` (every `Δ`-part, every `e`, every `0 <= r <= k-2`).
pub fn predicted_zero(n: u32, sign: Sign, chi: &CharacterSpec) -> bool {
    omega_indices(n, sign).contains(&chi.m)
}

/// All characters `χ^rθ` with `0 <= r <= k-2` and `θ` of level at most `n`
/// at which `log^±` vanishes, sorted.
pub fn vanishing_locus(level: &Arc<Level>, k: u32, sign: Sign) -> Result<Vec<CharacterSpec>> {
    let logs = (0..=k - 2)
        .into_par_iter()
        .map(|r| log_trunc_twisted(level, k, sign, r))
        .collect::<Result<Vec<_>>>()?;
    let chars = enumerate_characters(level.p(), level.n(), k - 2);
    let mut zeros = chars
        .par_iter()
        .map(|chi| {
            let theta = CharacterSpec::new(chi.d + chi.r as i64, chi.m, chi.e, 0);
            eval_char(&logs[chi.r as usize], &theta).map(|v| v.is_zero().then_some(*chi))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect::<Vec<_>>();
    zeros.sort();
    Ok(zeros)
}

/// The factors `(j, M)` of `log^±` whose value at `χ^rθ` is zero. A zero of
/// `log^±` is simple when exactly one factor vanishes.
pub fn vanishing_factors(level: &Arc<Level>, k: u32, sign: Sign, chi: &CharacterSpec) -> Result<Vec<(u32, u32)>> {
    let theta = CharacterSpec::new(chi.d + chi.r as i64, chi.m, chi.e, 0);
    let mut out = Vec::new();
    for j in 0..=k - 2 {
        for m in omega_indices(level.n(), sign) {
            let f = G::phi_twisted(level, level.ctx(), m, j as i64 - chi.r as i64)?;
            if eval_char(&f, &theta)?.is_zero() {
                out.push((j, m));
            }
        }
    }
    Ok(out)
}
