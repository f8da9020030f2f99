use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::padic::{primitive_root, teichmuller, PadicCtx, PadicScalar};

/// The finite layer `G_n ≅ Δ × Γ/Γ^{p^{n-1}}` together with the p-adic data
/// needed to act on it: the primitive root `g` generating `Δ`, its
/// Teichmüller lift, and `u = χ(γ) = 1 + p`.
pub struct Level {
    p: u64,
    n: u32,
    gamma_order: usize,
    ctx: Arc<PadicCtx>,
    g: u64,
    teich_g_powers: Vec<PadicScalar>,
    u: PadicScalar,
    u_inv: PadicScalar,
}

impl Level {
    pub fn new(ctx: &Arc<PadicCtx>, n: u32) -> Result<Arc<Self>> {
        if n == 0 {
            return Err(Error::BadLevel("level n must be >= 1".into()));
        }
        let p = ctx.p();
        let gamma_order = p
            .checked_pow(n - 1)
            .filter(|&x| x <= 1 << 20)
            .ok_or_else(|| Error::BadLevel(format!("p^(n-1) too large for n = {n}")))?
            as usize;
        let g = primitive_root(p);
        let tg = teichmuller(ctx, g as i64)?;
        let mut teich_g_powers = Vec::with_capacity(p as usize - 1);
        let mut acc = PadicScalar::one(ctx);
        for _ in 0..p - 1 {
            teich_g_powers.push(acc.clone());
            acc = acc.mul(&tg);
        }
        let u = PadicScalar::from_i64(ctx, 1 + p as i64);
        let u_inv = u.inv()?;
        Ok(Arc::new(Level {
            p,
            n,
            gamma_order,
            ctx: ctx.clone(),
            g,
            teich_g_powers,
            u,
            u_inv,
        }))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `|Δ| = p - 1`.
    pub fn delta_order(&self) -> usize {
        self.p as usize - 1
    }

    /// `p^{n-1}`.
    pub fn gamma_order(&self) -> usize {
        self.gamma_order
    }

    pub fn ctx(&self) -> &Arc<PadicCtx> {
        &self.ctx
    }

    /// The smallest positive primitive root mod `p`.
    pub fn generator(&self) -> u64 {
        self.g
    }

    /// `ω_T(g)^k` for any integer `k`.
    pub fn teich_g_pow(&self, k: i64) -> &PadicScalar {
        &self.teich_g_powers[k.rem_euclid(self.p as i64 - 1) as usize]
    }

    pub fn u(&self) -> &PadicScalar {
        &self.u
    }

    /// `u^k` for any integer `k`.
    pub fn u_pow(&self, k: i64) -> PadicScalar {
        if k >= 0 {
            self.u.pow(k as u64)
        } else {
            self.u_inv.pow(k.unsigned_abs())
        }
    }

    /// The successive powers `(u^k)^0, (u^k)^1, …, (u^k)^{len-1}`.
    pub fn u_pow_table(&self, k: i64, len: usize) -> Vec<PadicScalar> {
        let step = self.u_pow(k);
        let mut out = Vec::with_capacity(len);
        let mut acc = PadicScalar::one(&self.ctx);
        for _ in 0..len {
            out.push(acc.clone());
            acc = acc.mul(&step);
        }
        out
    }

    pub fn same_shape(&self, other: &Level) -> bool {
        self.p == other.p && self.n == other.n
    }

    /// CRT-based operations pay up to `n - 1` digits for the idempotent
    /// denominators; they require `N >= n + 10`.
    pub fn require_crt_precision(&self) -> Result<()> {
        if (self.ctx.cap() as u64) < self.n as u64 + 10 {
            return Err(Error::BadPrecision(format!(
                "CRT operations at level n = {} need N >= {}, have N = {}",
                self.n,
                self.n + 10,
                self.ctx.cap()
            )));
        }
        Ok(())
    }
}

impl fmt::Debug for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Level")
            .field("p", &self.p)
            .field("n", &self.n)
            .field("N", &self.ctx.cap())
            .finish()
    }
}
