//! The quadratic extension `Q_p(α)` with `α² = s = -ε(p)·p^{k-1}`.
//!
//! When `k - 1` is even and `-ε(p)` is a square mod `p` the algebra splits
//! (`α ∈ Q_p`) and contains zero divisors; valuations below are then only
//! lower bounds and [`QuadExtScalar::inv`] fails on the zero divisors.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::padic::{teichmuller, PadicCtx, PadicScalar};

pub struct QuadCtx {
    base: Arc<PadicCtx>,
    k: u32,
    eps: i64,
    s: PadicScalar,
}

impl QuadCtx {
    /// `eps` is a residue mod `p`, realized through its Teichmüller lift.
    pub fn new(base: &Arc<PadicCtx>, k: u32, eps: i64) -> Result<Arc<Self>> {
        if k < 2 {
            return Err(Error::DegenerateInput(format!("weight k = {k} must be >= 2")));
        }
        let eps_lift = teichmuller(base, eps)?;
        let s = eps_lift
            .neg()
            .mul(&PadicScalar::p_power(base, k as i64 - 1));
        Ok(Arc::new(QuadCtx {
            base: base.clone(),
            k,
            eps: eps.rem_euclid(base.p() as i64),
            s,
        }))
    }

    pub fn base(&self) -> &Arc<PadicCtx> {
        &self.base
    }

    pub fn weight(&self) -> u32 {
        self.k
    }

    pub fn eps_residue(&self) -> i64 {
        self.eps
    }

    /// `α²`.
    pub fn s(&self) -> &PadicScalar {
        &self.s
    }

    /// `2·v_p(α) = k - 1`.
    pub fn alpha_half_valuation(&self) -> i64 {
        self.k as i64 - 1
    }

    fn same(&self, other: &QuadCtx) -> bool {
        self.base.p() == other.base.p() && self.k == other.k && self.eps == other.eps
    }
}

impl fmt::Debug for QuadCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuadCtx")
            .field("p", &self.base.p())
            .field("k", &self.k)
            .field("eps", &self.eps)
            .finish()
    }
}

#[derive(Clone)]
pub struct QuadExtScalar {
    a: PadicScalar,
    b: PadicScalar,
    ctx: Arc<QuadCtx>,
}

impl QuadExtScalar {
    pub fn new(ctx: &Arc<QuadCtx>, a: PadicScalar, b: PadicScalar) -> Self {
        QuadExtScalar {
            a,
            b,
            ctx: ctx.clone(),
        }
    }

    pub fn from_base(ctx: &Arc<QuadCtx>, a: PadicScalar) -> Self {
        let b = PadicScalar::zero(ctx.base());
        Self::new(ctx, a, b)
    }

    pub fn zero(ctx: &Arc<QuadCtx>) -> Self {
        Self::from_base(ctx, PadicScalar::zero(ctx.base()))
    }

    pub fn one(ctx: &Arc<QuadCtx>) -> Self {
        Self::from_base(ctx, PadicScalar::one(ctx.base()))
    }

    /// The generator `α` (so `α₁ = α`, `α₂ = -α`).
    pub fn alpha(ctx: &Arc<QuadCtx>) -> Self {
        Self::new(
            ctx,
            PadicScalar::zero(ctx.base()),
            PadicScalar::one(ctx.base()),
        )
    }

    pub fn a(&self) -> &PadicScalar {
        &self.a
    }

    pub fn b(&self) -> &PadicScalar {
        &self.b
    }

    pub fn s(&self) -> &PadicScalar {
        self.ctx.s()
    }

    pub fn ctx(&self) -> &Arc<QuadCtx> {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn assert_ctx(&self, other: &Self) {
        assert!(
            self.ctx.same(&other.ctx),
            "arithmetic across different quadratic extensions"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_ctx(other);
        Self::new(&self.ctx, self.a.add(&other.a), self.b.add(&other.b))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.assert_ctx(other);
        Self::new(&self.ctx, self.a.sub(&other.a), self.b.sub(&other.b))
    }

    pub fn neg(&self) -> Self {
        Self::new(&self.ctx, self.a.neg(), self.b.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_ctx(other);
        let a = self
            .a
            .mul(&other.a)
            .add(&self.ctx.s.mul(&self.b.mul(&other.b)));
        let b = self.a.mul(&other.b).add(&self.b.mul(&other.a));
        Self::new(&self.ctx, a, b)
    }

    pub fn scale(&self, c: &PadicScalar) -> Self {
        Self::new(&self.ctx, self.a.mul(c), self.b.mul(c))
    }

    pub fn conj(&self) -> Self {
        Self::new(&self.ctx, self.a.clone(), self.b.neg())
    }

    /// `(a + bα)(a - bα) = a² - s·b²`.
    pub fn norm(&self) -> PadicScalar {
        self.a
            .mul(&self.a)
            .sub(&self.ctx.s.mul(&self.b.mul(&self.b)))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivideByZero);
        }
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::NotAUnit(format!("{self:?} is a zero divisor")));
        }
        Ok(self.conj().scale(&n.inv()?))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut acc = Self::one(&self.ctx);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Valuation in units of `1/2`: `min(2·v(a), 2·v(b) + k - 1)`.
    pub fn half_valuation(&self) -> Option<i64> {
        let va = self.a.valuation().map(|v| 2 * v);
        let vb = self
            .b
            .valuation()
            .map(|v| 2 * v + self.ctx.alpha_half_valuation());
        match (va, vb) {
            (None, None) => None,
            (Some(x), None) | (None, Some(x)) => Some(x),
            (Some(x), Some(y)) => Some(x.min(y)),
        }
    }

    pub fn is_base(&self) -> bool {
        self.b.is_zero()
    }
}

impl PartialEq for QuadExtScalar {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same(&other.ctx) && self.a == other.a && self.b == other.b
    }
}

impl fmt::Debug for QuadExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) + ({:?})·α", self.a, self.b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, cap: u32, k: u32, eps: i64) -> Arc<QuadCtx> {
        QuadCtx::new(&PadicCtx::new(p, cap).unwrap(), k, eps).unwrap()
    }

    #[test]
    fn alpha_squares_to_s() {
        let q = ctx(3, 20, 2, 1);
        let a = QuadExtScalar::alpha(&q);
        let sq = a.mul(&a);
        assert!(sq.b().is_zero());
        assert_eq!(sq.a(), &PadicScalar::from_i64(q.base(), -3));
        assert_eq!(a.half_valuation(), Some(1));
    }

    #[test]
    fn norm_matches_conjugate_product() {
        let q = ctx(5, 20, 3, 1);
        let base = q.base().clone();
        let x = QuadExtScalar::new(
            &q,
            PadicScalar::from_i64(&base, 7),
            PadicScalar::from_i64(&base, 3),
        );
        let prod = x.mul(&x.conj());
        assert!(prod.b().is_zero());
        assert_eq!(prod.a(), &x.norm());
        // 49 - (-25)·9
        assert_eq!(x.norm(), PadicScalar::from_i64(&base, 49 + 225));
    }

    #[test]
    fn inverse_round_trip() {
        let q = ctx(3, 20, 4, -1);
        let base = q.base().clone();
        let x = QuadExtScalar::new(
            &q,
            PadicScalar::from_i64(&base, 9),
            PadicScalar::from_i64(&base, 2),
        );
        let y = x.inv().unwrap();
        assert_eq!(x.mul(&y), QuadExtScalar::one(&q));
        assert!(QuadExtScalar::zero(&q).inv().is_err());
    }

    #[test]
    fn split_case_has_zero_divisors() {
        // k = 3, eps = 1, p = 5: alpha^2 = -25 and -1 is a square mod 5.
        let q = ctx(5, 20, 3, 1);
        let base = q.base().clone();
        let i = crate::padic::teichmuller(&base, 2).unwrap(); // i^2 = -1
        let x = QuadExtScalar::new(&q, i.mul(&PadicScalar::from_i64(&base, 5)), PadicScalar::one(&base));
        assert!(x.norm().is_zero());
        assert!(matches!(x.inv(), Err(Error::NotAUnit(_))));
    }
}
