//! The Chinese remainder decomposition along
//! `x^{p^{n-1}} - 1 = ∏_{m=0}^{n-1} Φ_{p^m}(x)`.
//!
//! Slot `m` of an element is the image of each `Δ`-row under `γ ↦ ζ_{p^m}`.
//! Reconstruction multiplies each slot by the idempotent
//! `e_m = p^{-(n-1)} Σ_k c_{p^m}(k) x^k` with `c_{p^m}` the Ramanujan sum.

use std::sync::Arc;

use num_bigint::BigInt;
use rayon::prelude::*;

use super::{GroupRingElem, Level};
use crate::cyclotomic::{phi_value_inverse, CyclotomicScalar};
use crate::error::{Error, Result};
use crate::padic::PadicScalar;
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Debug)]
pub struct CrtComponents<S: Scalar> {
    slots: Vec<Vec<CyclotomicScalar<S>>>,
}

impl<S: Scalar> CrtComponents<S> {
    /// `slots[m][σ]` for `m = 0, …, n-1`.
    pub fn new(level: &Level, slots: Vec<Vec<CyclotomicScalar<S>>>) -> Result<Self> {
        if slots.len() != level.n() as usize {
            return Err(Error::ShapeMismatch(format!(
                "need {} CRT slots, got {}",
                level.n(),
                slots.len()
            )));
        }
        for (m, slot) in slots.iter().enumerate() {
            if slot.len() != level.delta_order()
                || slot.iter().any(|c| c.level() != m as u32 || c.p() != level.p())
            {
                return Err(Error::ShapeMismatch(format!("CRT slot {m} has the wrong shape")));
            }
        }
        Ok(CrtComponents { slots })
    }

    pub fn slot(&self, m: u32) -> &[CyclotomicScalar<S>] {
        &self.slots[m as usize]
    }

    pub fn slots(&self) -> &[Vec<CyclotomicScalar<S>>] {
        &self.slots
    }

    pub fn slot_is_zero(&self, m: u32) -> bool {
        self.slots[m as usize].iter().all(|c| c.is_zero())
    }

    pub fn into_slots(self) -> Vec<Vec<CyclotomicScalar<S>>> {
        self.slots
    }
}

/// Rewrites a `Δ`-row vector `v[σ]` in the character basis:
/// `w[d] = Σ_σ ω_T(g)^{dσ} v[σ]`.
pub(crate) fn delta_split<S: Scalar>(level: &Level, v: &[CyclotomicScalar<S>]) -> Vec<CyclotomicScalar<S>> {
    (0..level.delta_order() as i64)
        .map(|d| {
            let mut acc = v[0].scale_padic(level.teich_g_pow(0));
            for (s, x) in v.iter().enumerate().skip(1) {
                acc = acc
                    .add(&x.scale_padic(level.teich_g_pow(d * s as i64)))
                    .expect("same slot");
            }
            acc
        })
        .collect()
}

/// Inverse of [`delta_split`].
pub(crate) fn delta_join<S: Scalar>(level: &Level, w: &[CyclotomicScalar<S>]) -> Result<Vec<CyclotomicScalar<S>>> {
    let base = S::base_ctx(w[0].ctx());
    let norm = PadicScalar::from_i64(base, level.delta_order() as i64).inv()?;
    Ok((0..level.delta_order() as i64)
        .map(|s| {
            let mut acc = w[0].scale_padic(&norm);
            for (d, x) in w.iter().enumerate().skip(1) {
                let c = level.teich_g_pow(-(d as i64) * s).mul(&norm);
                acc = acc.add(&x.scale_padic(&c)).expect("same slot");
            }
            acc
        })
        .collect())
}

/// Coefficients of `∏_{m ∈ keep} Φ_{p^m}(x)` (monic, integral), low degree first.
fn cyclotomic_product(p: u64, keep: &[u32]) -> Vec<BigInt> {
    let mut acc = vec![BigInt::from(1)];
    for &m in keep {
        let factor: Vec<BigInt> = if m == 0 {
            vec![BigInt::from(-1), BigInt::from(1)]
        } else {
            let step = p.pow(m - 1) as usize;
            let mut f = vec![BigInt::from(0); (p as usize - 1) * step + 1];
            for i in 0..p as usize {
                f[i * step] = BigInt::from(1);
            }
            f
        };
        let mut next = vec![BigInt::from(0); acc.len() + factor.len() - 1];
        for (i, a) in acc.iter().enumerate() {
            for (j, b) in factor.iter().enumerate() {
                if b != &BigInt::from(0) {
                    next[i + j] += a * b;
                }
            }
        }
        acc = next;
    }
    acc
}

impl<S: Scalar> GroupRingElem<S> {
    pub fn crt_decompose(&self) -> CrtComponents<S> {
        let p = self.p();
        let dlt = self.level.delta_order();
        let slots = (0..self.n())
            .into_par_iter()
            .map(|m| {
                let pm = p.pow(m) as usize;
                (0..dlt)
                    .map(|s| {
                        let mut v = vec![S::zero(&self.ctx); pm];
                        for (r, c) in self.row(s).iter().enumerate() {
                            if !c.is_zero() {
                                v[r % pm] = v[r % pm].add(c);
                            }
                        }
                        CyclotomicScalar::from_exponent_vector(&self.ctx, p, m, v)
                    })
                    .collect()
            })
            .collect();
        CrtComponents { slots }
    }

    pub fn crt_reconstruct(level: &Arc<Level>, ctx: &S::Ctx, comps: &CrtComponents<S>) -> Result<Self> {
        level.require_crt_precision()?;
        let p = level.p() as usize;
        let w = level.gamma_order();
        let n = level.n();
        let denom = PadicScalar::p_power(S::base_ctx(ctx), -(n as i64 - 1));
        let rows: Vec<Vec<S>> = (0..level.delta_order())
            .into_par_iter()
            .map(|s| {
                // Σ_m a_m(x) · (p^{n-1} e_m(x)) mod x^w - 1
                let mut acc = vec![S::zero(ctx); w];
                for m in 0..n {
                    let a = comps.slot(m)[s].coeffs();
                    if m == 0 {
                        let c = &a[0];
                        if !c.is_zero() {
                            for x in acc.iter_mut() {
                                *x = x.add(c);
                            }
                        }
                        continue;
                    }
                    let q = p.pow(m - 1);
                    let on_multiple = S::from_i64(ctx, ((p - 1) * q) as i64);
                    let off_multiple = S::from_i64(ctx, -(q as i64));
                    for (i, c) in a.iter().enumerate() {
                        if c.is_zero() {
                            continue;
                        }
                        let hi = c.mul(&on_multiple);
                        let lo = c.mul(&off_multiple);
                        for t in 0..w / q {
                            let k = (i + t * q) % w;
                            let term = if t % p == 0 { &hi } else { &lo };
                            acc[k] = acc[k].add(term);
                        }
                    }
                }
                acc.into_iter().map(|x| x.scale(&denom)).collect()
            })
            .collect();
        Self::from_rows(level, ctx, rows)
    }

    /// The quotient `q` with `q·Φ_m(γ) = f`, canonicalized so that its
    /// `m`-th CRT slot vanishes. For `m >= n`, `Φ_m(γ) = p` and this is
    /// division by `p`.
    pub fn divide_exact(&self, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::BadLevel("Φ_m needs m >= 1".into()));
        }
        let base = S::base_ctx(&self.ctx).clone();
        if m >= self.n() {
            return Ok(self.scale_padic(&PadicScalar::p_power(&base, -1)));
        }
        self.level.require_crt_precision()?;
        if !self.divisible_by_phi(m)? {
            return Err(Error::NotDivisible(format!(
                "b-sums are not constant on residues mod p^{}",
                m - 1
            )));
        }
        let comps = self.crt_decompose();
        let slots = comps
            .into_slots()
            .into_iter()
            .enumerate()
            .map(|(slot, row)| {
                let slot = slot as u32;
                if slot == m {
                    return Ok(row
                        .iter()
                        .map(|_| CyclotomicScalar::zero(&self.ctx, self.p(), slot))
                        .collect());
                }
                let inv = phi_value_inverse::<S>(&self.ctx, self.p(), m, slot)?;
                row.iter().map(|c| c.mul(&inv)).collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::crt_reconstruct(&self.level, &self.ctx, &CrtComponents { slots })
    }

    /// The inverse in `E[G_n]`, computed slot by slot and character by
    /// character of `Δ`.
    pub fn invert_unit(&self) -> Result<Self> {
        let one = Self::one(&self.level, &self.ctx);
        one.divide_slotwise(self, &[])
    }

    /// `f / g` computed in every CRT slot outside `free`, with the slots in
    /// `free` set to zero. Fails with `NotAUnit` if `g` is not invertible in
    /// some required slot.
    pub fn divide_slotwise(&self, g: &Self, free: &[u32]) -> Result<Self> {
        self.check_shape(g)?;
        self.level.require_crt_precision()?;
        let fc = self.crt_decompose().into_slots();
        let gc = g.crt_decompose().into_slots();
        let level = &self.level;
        let slots = fc
            .into_par_iter()
            .zip(gc)
            .enumerate()
            .map(|(m, (fr, gr))| {
                let m = m as u32;
                if free.contains(&m) {
                    return Ok(fr
                        .iter()
                        .map(|_| CyclotomicScalar::zero(&self.ctx, self.p(), m))
                        .collect());
                }
                let fs = delta_split(level, &fr);
                let gs = delta_split(level, &gr);
                let qs = fs
                    .iter()
                    .zip(&gs)
                    .enumerate()
                    .map(|(d, (a, b))| {
                        b.inv()
                            .map_err(|e| match e {
                                Error::DivideByZero | Error::NotAUnit(_) => Error::NotAUnit(format!(
                                    "divisor vanishes in CRT slot {m}, Δ-character {d}"
                                )),
                                other => other,
                            })
                            .and_then(|bi| a.mul(&bi))
                    })
                    .collect::<Result<Vec<_>>>()?;
                delta_join(level, &qs)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::crt_reconstruct(&self.level, &self.ctx, &CrtComponents { slots })
    }

    /// The representative of `f + (elements supported on the slots in
    /// free)` of least degree: each row reduced modulo
    /// `C(x) = ∏_{m ∉ free} Φ_{p^m}(x)`. Its coefficients are integral
    /// whenever the coset contains an integral element.
    pub fn reduce_mod_kept_slots(&self, free: &[u32]) -> Self {
        let keep: Vec<u32> = (0..self.n()).filter(|m| !free.contains(m)).collect();
        let c = cyclotomic_product(self.p(), &keep);
        let deg = c.len() - 1;
        let c: Vec<S> = c
            .iter()
            .map(|x| S::embed(&self.ctx, &PadicScalar::from_bigint(S::base_ctx(&self.ctx), x)))
            .collect();
        let rows = (0..self.level.delta_order())
            .map(|s| {
                let mut r = self.row(s).to_vec();
                for top in (deg..r.len()).rev() {
                    let lead = r[top].clone();
                    if lead.is_zero() {
                        continue;
                    }
                    for (k, ck) in c.iter().enumerate() {
                        if !ck.is_zero() {
                            let idx = top - deg + k;
                            r[idx] = r[idx].sub(&lead.mul(ck));
                        }
                    }
                }
                r
            })
            .collect();
        Self::from_rows(&self.level, &self.ctx, rows).expect("same shape")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_product_of_all_slots_is_x_pow_minus_one() {
        let c = cyclotomic_product(3, &[0, 1, 2]);
        let mut expect = vec![BigInt::from(0); 10];
        expect[0] = BigInt::from(-1);
        expect[9] = BigInt::from(1);
        assert_eq!(c, expect);
    }
}
