//! The finite-level Iwasawa algebra `O_E[G_n] ≅ O_E[Δ][γ]/(γ^{p^{n-1}} - 1)`.
//!
//! An element is a `(p-1) × p^{n-1}` grid `c[σ][r]`, the coefficient of
//! `δ^σ γ^r` where `δ` is the element of `Δ` acting on `μ_p` through the
//! smallest primitive root `g`.

mod crt;
mod level;

pub use crt::CrtComponents;
#[cfg(test)]
pub(crate) use crt::delta_split as delta_split_slot;
pub use level::Level;

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use rand::Rng;

use crate::error::{Error, Result};
use crate::padic::PadicScalar;
use crate::quad::{QuadCtx, QuadExtScalar};
use crate::scalar::Scalar;

#[derive(Clone)]
pub struct GroupRingElem<S: Scalar> {
    level: Arc<Level>,
    ctx: S::Ctx,
    coeffs: Vec<S>,
}

/// `b[σ][r]` for `r mod p^m`: sums of `c[σ][r']` over the lifts `r' ≡ r`.
#[derive(Debug, Clone, PartialEq)]
pub struct BsumTable<S: Scalar> {
    pub m: u32,
    pub values: Vec<Vec<S>>,
}

impl<S: Scalar> GroupRingElem<S> {
    pub fn zero(level: &Arc<Level>, ctx: &S::Ctx) -> Self {
        GroupRingElem {
            level: level.clone(),
            ctx: ctx.clone(),
            coeffs: vec![S::zero(ctx); level.delta_order() * level.gamma_order()],
        }
    }

    pub fn one(level: &Arc<Level>, ctx: &S::Ctx) -> Self {
        Self::monomial(level, ctx, 0, 0, S::one(ctx))
    }

    /// `c·δ^σ·γ^r`, exponents taken modulo the group orders.
    pub fn monomial(level: &Arc<Level>, ctx: &S::Ctx, sigma: i64, r: i64, c: S) -> Self {
        let mut out = Self::zero(level, ctx);
        let s = sigma.rem_euclid(level.delta_order() as i64) as usize;
        let r = r.rem_euclid(level.gamma_order() as i64) as usize;
        *out.at_mut(s, r) = c;
        out
    }

    pub fn constant(level: &Arc<Level>, ctx: &S::Ctx, c: S) -> Self {
        Self::monomial(level, ctx, 0, 0, c)
    }

    /// Rows indexed by `σ`, each of length `p^{n-1}`.
    pub fn from_rows(level: &Arc<Level>, ctx: &S::Ctx, rows: Vec<Vec<S>>) -> Result<Self> {
        if rows.len() != level.delta_order()
            || rows.iter().any(|r| r.len() != level.gamma_order())
        {
            return Err(Error::ShapeMismatch(format!(
                "expected a {} x {} coefficient grid",
                level.delta_order(),
                level.gamma_order()
            )));
        }
        Ok(GroupRingElem {
            level: level.clone(),
            ctx: ctx.clone(),
            coeffs: rows.into_iter().flatten().collect(),
        })
    }

    /// A pure `Γ`-polynomial `Σ_r c_r γ^r` on the identity of `Δ`.
    pub fn from_gamma_poly(level: &Arc<Level>, ctx: &S::Ctx, poly: Vec<S>) -> Result<Self> {
        if poly.len() != level.gamma_order() {
            return Err(Error::ShapeMismatch(format!(
                "Γ-polynomial needs {} coefficients",
                level.gamma_order()
            )));
        }
        let mut out = Self::zero(level, ctx);
        out.coeffs[..poly.len()].clone_from_slice(&poly);
        Ok(out)
    }

    pub fn level(&self) -> &Arc<Level> {
        &self.level
    }

    pub fn ctx(&self) -> &S::Ctx {
        &self.ctx
    }

    pub fn p(&self) -> u64 {
        self.level.p()
    }

    pub fn n(&self) -> u32 {
        self.level.n()
    }

    pub fn coeff(&self, sigma: usize, r: usize) -> &S {
        &self.coeffs[sigma * self.level.gamma_order() + r]
    }

    fn at_mut(&mut self, sigma: usize, r: usize) -> &mut S {
        let w = self.level.gamma_order();
        &mut self.coeffs[sigma * w + r]
    }

    pub fn row(&self, sigma: usize) -> &[S] {
        let w = self.level.gamma_order();
        &self.coeffs[sigma * w..(sigma + 1) * w]
    }

    pub fn rows(&self) -> Vec<Vec<S>> {
        self.coeffs
            .chunks(self.level.gamma_order())
            .map(|c| c.to_vec())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Least valuation over all coefficients, in units of `1/2`.
    pub fn min_half_valuation(&self) -> Option<i64> {
        self.coeffs.iter().filter_map(|c| c.half_valuation()).min()
    }

    pub fn check_shape(&self, other: &Self) -> Result<()> {
        if !self.level.same_shape(&other.level) {
            return Err(Error::ShapeMismatch(format!(
                "group rings at (p={}, n={}) and (p={}, n={})",
                self.p(),
                self.n(),
                other.p(),
                other.n()
            )));
        }
        Ok(())
    }

    fn map(&self, f: impl Fn(usize, usize, &S) -> S) -> Self {
        let w = self.level.gamma_order();
        GroupRingElem {
            level: self.level.clone(),
            ctx: self.ctx.clone(),
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| f(i / w, i % w, c))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(self.map(|s, r, c| c.add(other.coeff(s, r))))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(self.map(|s, r, c| c.sub(other.coeff(s, r))))
    }

    pub fn neg(&self) -> Self {
        self.map(|_, _, c| c.neg())
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|_, _, x| x.mul(c))
    }

    pub fn scale_padic(&self, c: &PadicScalar) -> Self {
        self.map(|_, _, x| x.scale(c))
    }

    /// Group convolution: `Δ`-exponents add mod `p-1`, `γ`-exponents mod `p^{n-1}`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let dlt = self.level.delta_order();
        let w = self.level.gamma_order();
        let lhs = self.nonzero_terms();
        let rhs = other.nonzero_terms();
        let mut out = Self::zero(&self.level, &self.ctx);
        for &(s1, r1, a) in &lhs {
            for &(s2, r2, b) in &rhs {
                let idx = ((s1 + s2) % dlt) * w + (r1 + r2) % w;
                out.coeffs[idx] = out.coeffs[idx].add(&a.mul(b));
            }
        }
        Ok(out)
    }

    fn nonzero_terms(&self) -> Vec<(usize, usize, &S)> {
        let w = self.level.gamma_order();
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i / w, i % w, c))
            .collect()
    }

    /// `Φ_m(γ) = Σ_{i<p} γ^{i·p^{m-1}}`, the `p^m`-th cyclotomic polynomial in
    /// `γ`. For `m >= n` every term collapses to `1` and the result is `p`.
    pub fn phi(level: &Arc<Level>, ctx: &S::Ctx, m: u32) -> Result<Self> {
        Self::phi_twisted(level, ctx, m, 0)
    }

    /// `Φ_m(u^{-j}γ)` reduced modulo `γ^{p^{n-1}} - 1`. The twist is applied
    /// to the polynomial before reduction, so for `m >= n` this is the scalar
    /// `Σ_i u^{-j·i·p^{m-1}}`.
    pub fn phi_twisted(level: &Arc<Level>, ctx: &S::Ctx, m: u32, j: i64) -> Result<Self> {
        if m == 0 {
            return Err(Error::BadLevel("Φ_m needs m >= 1".into()));
        }
        let p = level.p();
        let w = level.gamma_order() as u64;
        let step = p.pow(m - 1);
        let twist = level.u_pow(-j);
        let mut out = Self::zero(level, ctx);
        for i in 0..p {
            let e = i * step;
            let c = twist.pow(e);
            let r = (e % w) as usize;
            let v = out.coeff(0, r).add(&S::embed(ctx, &c));
            *out.at_mut(0, r) = v;
        }
        Ok(out)
    }

    /// The substitution `γ ↦ u^{-j}γ` on the canonical representative
    /// (exponents in `[0, p^{n-1})`): `c[σ][r] ↦ u^{-jr}·c[σ][r]`.
    ///
    /// Inverse to `twist_gamma(-j)`. Since `u^{p^{n-1}} ≡ 1` only modulo
    /// `p^n`, this is multiplicative only modulo `p^n` once products wrap
    /// around `γ^{p^{n-1}} = 1`.
    pub fn twist_gamma(&self, j: i64) -> Self {
        let table = self.level.u_pow_table(-j, self.level.gamma_order());
        self.map(|_, r, c| c.scale(&table[r]))
    }

    /// `Tw_r`: `δ^σ γ^ρ ↦ χ(δ^σ γ^ρ)^r δ^σ γ^ρ = ω_T(g)^{rσ} u^{rρ} δ^σ γ^ρ`.
    pub fn twist_full(&self, r: i64) -> Self {
        let table = self.level.u_pow_table(r, self.level.gamma_order());
        let level = self.level.clone();
        self.map(|s, rho, c| {
            c.scale(&table[rho])
                .scale(level.teich_g_pow(r * s as i64))
        })
    }

    /// The coefficient of the idempotent `e_d = (p-1)^{-1} Σ_σ ω_T^{-d}(σ)σ`:
    /// the `Γ`-vector `Σ_σ ω_T(g)^{dσ}·c[σ][·]`.
    pub fn delta_component(&self, d: i64) -> Vec<S> {
        let w = self.level.gamma_order();
        let mut out = vec![S::zero(&self.ctx); w];
        for s in 0..self.level.delta_order() {
            let chi = self.level.teich_g_pow(d * s as i64);
            for (o, c) in out.iter_mut().zip(self.row(s)) {
                if !c.is_zero() {
                    *o = o.add(&c.scale(chi));
                }
            }
        }
        out
    }

    /// `e_d · Σ_r v_r γ^r`, the inverse of [`Self::delta_component`] on the
    /// `d`-isotypic part.
    pub fn embed_delta_component(level: &Arc<Level>, ctx: &S::Ctx, d: i64, v: &[S]) -> Result<Self> {
        if v.len() != level.gamma_order() {
            return Err(Error::ShapeMismatch("Γ-vector length".into()));
        }
        let base = S::base_ctx(ctx);
        let norm = PadicScalar::from_i64(base, level.delta_order() as i64).inv()?;
        let mut out = Self::zero(level, ctx);
        for s in 0..level.delta_order() {
            let w = level.teich_g_pow(-d * s as i64).mul(&norm);
            for (r, c) in v.iter().enumerate() {
                *out.at_mut(s, r) = c.scale(&w);
            }
        }
        Ok(out)
    }

    pub fn b_sums(&self, m: u32) -> Result<BsumTable<S>> {
        if m == 0 || m >= self.n() {
            return Err(Error::BadLevel(format!(
                "b-sums need 1 <= m < n = {}, got m = {m}",
                self.n()
            )));
        }
        let pm = self.p().pow(m) as usize;
        let values = (0..self.level.delta_order())
            .map(|s| {
                let mut b = vec![S::zero(&self.ctx); pm];
                for (r, c) in self.row(s).iter().enumerate() {
                    if !c.is_zero() {
                        b[r % pm] = b[r % pm].add(c);
                    }
                }
                b
            })
            .collect();
        Ok(BsumTable { m, values })
    }

    /// Divisibility by `Φ_m(γ)` through the b-sum criterion:
    /// `b[σ][r] = b[σ][s]` whenever `r ≡ s (mod p^{m-1})`.
    pub fn divisible_by_phi(&self, m: u32) -> Result<bool> {
        let table = self.b_sums(m)?;
        let q = self.p().pow(m - 1) as usize;
        Ok(table
            .values
            .iter()
            .all(|b| (q..b.len()).all(|r| b[r] == b[r % q])))
    }

    /// All `Δ`-row sums `Σ_r c[σ][r]` agree.
    pub fn is_plus_admissible(&self) -> bool {
        let sums: Vec<S> = (0..self.level.delta_order())
            .map(|s| {
                self.row(s)
                    .iter()
                    .fold(S::zero(&self.ctx), |acc, c| acc.add(c))
            })
            .collect();
        sums.iter().all(|s| s == &sums[0])
    }

    pub fn map_scalars<T: Scalar>(&self, ctx: &T::Ctx, f: impl Fn(&S) -> T) -> GroupRingElem<T> {
        GroupRingElem {
            level: self.level.clone(),
            ctx: ctx.clone(),
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }
}

impl GroupRingElem<PadicScalar> {
    /// Coefficients uniform in `[0, p^N)`, entered as exact integers.
    pub fn random_integral<R: Rng + ?Sized>(level: &Arc<Level>, rng: &mut R) -> Self {
        let ctx = level.ctx().clone();
        let bound = ctx.pow_p(ctx.cap()).clone();
        let words = bound.bits() as usize / 32 + 2;
        let coeffs = (0..level.delta_order() * level.gamma_order())
            .map(|_| {
                let digits: Vec<u32> = (0..words).map(|_| rng.random()).collect();
                let x = BigUint::new(digits) % &bound;
                PadicScalar::from_bigint(&ctx, &BigInt::from(x))
            })
            .collect();
        GroupRingElem {
            level: level.clone(),
            ctx,
            coeffs,
        }
    }

    /// Small integer coefficients in `[-bound, bound]`.
    pub fn random_small<R: Rng + ?Sized>(level: &Arc<Level>, rng: &mut R, bound: i64) -> Self {
        let ctx = level.ctx().clone();
        let coeffs = (0..level.delta_order() * level.gamma_order())
            .map(|_| PadicScalar::from_i64(&ctx, rng.random_range(-bound..=bound)))
            .collect();
        GroupRingElem {
            level: level.clone(),
            ctx,
            coeffs,
        }
    }

    pub fn to_quad(&self, ctx: &Arc<QuadCtx>) -> GroupRingElem<QuadExtScalar> {
        self.map_scalars(ctx, |c| QuadExtScalar::from_base(ctx, c.clone()))
    }
}

impl GroupRingElem<QuadExtScalar> {
    /// Splits `f = A + α·B` with `A`, `B` over `Q_p`.
    pub fn split_alpha(&self) -> (GroupRingElem<PadicScalar>, GroupRingElem<PadicScalar>) {
        let base = self.ctx.base().clone();
        (
            self.map_scalars(&base, |c| c.a().clone()),
            self.map_scalars(&base, |c| c.b().clone()),
        )
    }
}

impl<S: Scalar> PartialEq for GroupRingElem<S> {
    fn eq(&self, other: &Self) -> bool {
        self.level.same_shape(&other.level) && self.coeffs == other.coeffs
    }
}

impl<S: Scalar> fmt::Debug for GroupRingElem<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupRing(p={}, n={}) {{", self.p(), self.n())?;
        for (s, r, c) in self.nonzero_terms() {
            write!(f, " [δ^{s}γ^{r}] {c:?};")?;
        }
        write!(f, " }}")
    }
}

#[cfg(test)]
mod tests;
