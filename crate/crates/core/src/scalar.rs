//! The coefficient rings a group-ring or cyclotomic element can live over.

use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::padic::{PadicCtx, PadicScalar};
use crate::quad::{QuadCtx, QuadExtScalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RingTag {
    Base,
    Quad,
}

/// A commutative `Q_p`-algebra of scalars with capped precision.
pub trait Scalar: Clone + Debug + PartialEq + Send + Sync + 'static {
    type Ctx: Clone + Debug + Send + Sync;

    const TAG: RingTag;

    fn ctx(&self) -> Self::Ctx;
    fn base_ctx(ctx: &Self::Ctx) -> &Arc<PadicCtx>;
    fn zero(ctx: &Self::Ctx) -> Self;
    fn one(ctx: &Self::Ctx) -> Self;
    fn embed(ctx: &Self::Ctx, x: &PadicScalar) -> Self;

    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, c: &PadicScalar) -> Self;
    fn inv(&self) -> Result<Self>;
    fn is_zero(&self) -> bool;

    /// Valuation in units of `1/2`; `None` for zero.
    fn half_valuation(&self) -> Option<i64>;

    fn from_i64(ctx: &Self::Ctx, x: i64) -> Self {
        Self::embed(ctx, &PadicScalar::from_i64(Self::base_ctx(ctx), x))
    }
}

impl Scalar for PadicScalar {
    type Ctx = Arc<PadicCtx>;

    const TAG: RingTag = RingTag::Base;

    fn ctx(&self) -> Arc<PadicCtx> {
        PadicScalar::ctx(self).clone()
    }

    fn base_ctx(ctx: &Arc<PadicCtx>) -> &Arc<PadicCtx> {
        ctx
    }

    fn zero(ctx: &Arc<PadicCtx>) -> Self {
        PadicScalar::zero(ctx)
    }

    fn one(ctx: &Arc<PadicCtx>) -> Self {
        PadicScalar::one(ctx)
    }

    fn embed(_ctx: &Arc<PadicCtx>, x: &PadicScalar) -> Self {
        x.clone()
    }

    fn add(&self, other: &Self) -> Self {
        PadicScalar::add(self, other)
    }

    fn sub(&self, other: &Self) -> Self {
        PadicScalar::sub(self, other)
    }

    fn mul(&self, other: &Self) -> Self {
        PadicScalar::mul(self, other)
    }

    fn neg(&self) -> Self {
        PadicScalar::neg(self)
    }

    fn scale(&self, c: &PadicScalar) -> Self {
        PadicScalar::mul(self, c)
    }

    fn inv(&self) -> Result<Self> {
        PadicScalar::inv(self)
    }

    fn is_zero(&self) -> bool {
        PadicScalar::is_zero(self)
    }

    fn half_valuation(&self) -> Option<i64> {
        self.valuation().map(|v| 2 * v)
    }
}

impl Scalar for QuadExtScalar {
    type Ctx = Arc<QuadCtx>;

    const TAG: RingTag = RingTag::Quad;

    fn ctx(&self) -> Arc<QuadCtx> {
        QuadExtScalar::ctx(self).clone()
    }

    fn base_ctx(ctx: &Arc<QuadCtx>) -> &Arc<PadicCtx> {
        ctx.base()
    }

    fn zero(ctx: &Arc<QuadCtx>) -> Self {
        QuadExtScalar::zero(ctx)
    }

    fn one(ctx: &Arc<QuadCtx>) -> Self {
        QuadExtScalar::one(ctx)
    }

    fn embed(ctx: &Arc<QuadCtx>, x: &PadicScalar) -> Self {
        QuadExtScalar::from_base(ctx, x.clone())
    }

    fn add(&self, other: &Self) -> Self {
        QuadExtScalar::add(self, other)
    }

    fn sub(&self, other: &Self) -> Self {
        QuadExtScalar::sub(self, other)
    }

    fn mul(&self, other: &Self) -> Self {
        QuadExtScalar::mul(self, other)
    }

    fn neg(&self) -> Self {
        QuadExtScalar::neg(self)
    }

    fn scale(&self, c: &PadicScalar) -> Self {
        QuadExtScalar::scale(self, c)
    }

    fn inv(&self) -> Result<Self> {
        QuadExtScalar::inv(self)
    }

    fn is_zero(&self) -> bool {
        QuadExtScalar::is_zero(self)
    }

    fn half_valuation(&self) -> Option<i64> {
        QuadExtScalar::half_valuation(self)
    }
}
