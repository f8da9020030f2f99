//! JSON interchange formats. Digits travel as decimal strings.

use std::sync::Arc;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::CyclotomicScalar;
use crate::error::{Error, Result};
use crate::group_ring::{GroupRingElem, Level};
use crate::padic::{PadicCtx, PadicScalar};
use crate::pollack::{AdmissiblePair, PMDecomposition, Witnesses};
use crate::quad::{QuadCtx, QuadExtScalar};
use crate::scalar::{RingTag, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValuationJson {
    Finite(i64),
    /// Always `"inf"`.
    Infinite(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicJson {
    pub p: u64,
    #[serde(rename = "N")]
    pub prec: u32,
    pub v: ValuationJson,
    pub u: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadJson {
    pub a: PadicJson,
    pub b: PadicJson,
    pub s: PadicJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarJson {
    Quad(QuadJson),
    Base(PadicJson),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupRingJson {
    pub p: u64,
    pub n: u32,
    pub ring: RingTag,
    pub coeffs: Vec<Vec<ScalarJson>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclotomicJson {
    pub p: u64,
    pub m: u32,
    pub coeffs: Vec<ScalarJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairJson {
    pub k: u32,
    pub eps: i64,
    #[serde(rename = "L1")]
    pub l1: GroupRingJson,
    #[serde(rename = "L2")]
    pub l2: GroupRingJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PmJson {
    pub k: u32,
    pub eps: i64,
    #[serde(rename = "Lplus")]
    pub lplus: GroupRingJson,
    #[serde(rename = "Lminus")]
    pub lminus: GroupRingJson,
    pub witnesses: Witnesses,
}

pub fn padic_to_json(x: &PadicScalar) -> PadicJson {
    PadicJson {
        p: x.p(),
        prec: x.precision(),
        v: match x.valuation() {
            Some(v) => ValuationJson::Finite(v),
            None => ValuationJson::Infinite("inf".into()),
        },
        u: x.unit().to_string(),
    }
}

/// Digits beyond the context's cap are dropped.
pub fn padic_from_json(j: &PadicJson, ctx: &Arc<PadicCtx>) -> Result<PadicScalar> {
    if j.p != ctx.p() {
        return Err(Error::PrimeMismatch(j.p, ctx.p()));
    }
    match &j.v {
        ValuationJson::Infinite(s) if s == "inf" => Ok(PadicScalar::zero(ctx)),
        ValuationJson::Infinite(s) => Err(Error::Malformed(format!("valuation {s:?} is neither an integer nor \"inf\""))),
        ValuationJson::Finite(v) => {
            let u: BigUint = j
                .u
                .parse()
                .map_err(|_| Error::Malformed(format!("unit digits {:?} are not a decimal integer", j.u)))?;
            PadicScalar::from_parts(ctx, *v, u, j.prec.min(ctx.cap()))
                .map_err(|e| Error::Malformed(e.to_string()))
        }
    }
}

/// Scalars with a JSON form.
pub trait JsonScalar: Scalar {
    fn to_json(&self) -> ScalarJson;
    fn from_json(j: &ScalarJson, ctx: &Self::Ctx) -> Result<Self>;
}

impl JsonScalar for PadicScalar {
    fn to_json(&self) -> ScalarJson {
        ScalarJson::Base(padic_to_json(self))
    }

    fn from_json(j: &ScalarJson, ctx: &Arc<PadicCtx>) -> Result<Self> {
        match j {
            ScalarJson::Base(x) => padic_from_json(x, ctx),
            ScalarJson::Quad(_) => Err(Error::Malformed("expected a base scalar, found a quadratic one".into())),
        }
    }
}

impl JsonScalar for QuadExtScalar {
    fn to_json(&self) -> ScalarJson {
        ScalarJson::Quad(QuadJson {
            a: padic_to_json(self.a()),
            b: padic_to_json(self.b()),
            s: padic_to_json(self.s()),
        })
    }

    /// A base scalar is read as `a + 0·α`.
    fn from_json(j: &ScalarJson, ctx: &Arc<QuadCtx>) -> Result<Self> {
        match j {
            ScalarJson::Base(x) => Ok(QuadExtScalar::from_base(ctx, padic_from_json(x, ctx.base())?)),
            ScalarJson::Quad(q) => {
                let s = padic_from_json(&q.s, ctx.base())?;
                if &s != ctx.s() {
                    return Err(Error::Malformed(format!(
                        "α² = {s:?} does not match -ε·p^(k-1) = {:?}",
                        ctx.s()
                    )));
                }
                Ok(QuadExtScalar::new(
                    ctx,
                    padic_from_json(&q.a, ctx.base())?,
                    padic_from_json(&q.b, ctx.base())?,
                ))
            }
        }
    }
}

pub fn elem_to_json<S: JsonScalar>(f: &GroupRingElem<S>) -> GroupRingJson {
    GroupRingJson {
        p: f.p(),
        n: f.n(),
        ring: S::TAG,
        coeffs: f.rows().iter().map(|row| row.iter().map(S::to_json).collect()).collect(),
    }
}

pub fn elem_from_json<S: JsonScalar>(j: &GroupRingJson, level: &Arc<Level>, ctx: &S::Ctx) -> Result<GroupRingElem<S>> {
    if j.p != level.p() || j.n != level.n() {
        return Err(Error::Malformed(format!(
            "element is at (p, n) = ({}, {}), expected ({}, {})",
            j.p,
            j.n,
            level.p(),
            level.n()
        )));
    }
    if j.ring != S::TAG {
        return Err(Error::Malformed(format!("expected ring {:?}, found {:?}", S::TAG, j.ring)));
    }
    let rows = j
        .coeffs
        .iter()
        .map(|row| row.iter().map(|c| S::from_json(c, ctx)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    GroupRingElem::from_rows(level, ctx, rows).map_err(|e| Error::Malformed(e.to_string()))
}

pub fn cyclotomic_to_json<S: JsonScalar>(x: &CyclotomicScalar<S>) -> CyclotomicJson {
    CyclotomicJson {
        p: x.p(),
        m: x.level(),
        coeffs: x.coeffs().iter().map(S::to_json).collect(),
    }
}

pub fn cyclotomic_from_json<S: JsonScalar>(j: &CyclotomicJson, ctx: &S::Ctx) -> Result<CyclotomicScalar<S>> {
    let coeffs = j.coeffs.iter().map(|c| S::from_json(c, ctx)).collect::<Result<Vec<_>>>()?;
    CyclotomicScalar::new(ctx, j.p, j.m, coeffs).map_err(|e| Error::Malformed(e.to_string()))
}

fn max_prec_scalar(j: &ScalarJson) -> u32 {
    match j {
        ScalarJson::Base(x) => x.prec,
        ScalarJson::Quad(q) => q.a.prec.max(q.b.prec).max(q.s.prec),
    }
}

/// Largest relative precision appearing in an element, at least 1.
pub fn max_precision(j: &GroupRingJson) -> u32 {
    j.coeffs.iter().flatten().map(max_prec_scalar).max().unwrap_or(1).max(1)
}

/// Builds the level of an element; `cap = None` takes the largest precision present.
pub fn level_for(j: &GroupRingJson, cap: Option<u32>) -> Result<Arc<Level>> {
    let ctx = PadicCtx::new(j.p, cap.unwrap_or_else(|| max_precision(j)))?;
    Level::new(&ctx, j.n)
}

pub fn pair_to_json(pair: &AdmissiblePair) -> PairJson {
    PairJson {
        k: pair.quad.weight(),
        eps: pair.quad.eps_residue(),
        l1: elem_to_json(&pair.l1),
        l2: elem_to_json(&pair.l2),
    }
}

pub fn pair_from_json(j: &PairJson, cap: Option<u32>) -> Result<AdmissiblePair> {
    let cap = cap.or(Some(max_precision(&j.l1).max(max_precision(&j.l2))));
    let level = level_for(&j.l1, cap)?;
    let quad = QuadCtx::new(level.ctx(), j.k, j.eps)?;
    let l1 = elem_from_json(&j.l1, &level, &quad)?;
    let l2 = elem_from_json(&j.l2, &level, &quad)?;
    AdmissiblePair::new(&quad, l1, l2)
}

pub fn pm_to_json(pm: &PMDecomposition, quad: &QuadCtx) -> PmJson {
    PmJson {
        k: quad.weight(),
        eps: quad.eps_residue(),
        lplus: elem_to_json(&pm.lplus),
        lminus: elem_to_json(&pm.lminus),
        witnesses: pm.witnesses.clone(),
    }
}

/// The quadratic context and `(L⁺, L⁻)`.
pub fn pm_from_json(
    j: &PmJson,
    cap: Option<u32>,
) -> Result<(Arc<QuadCtx>, GroupRingElem<PadicScalar>, GroupRingElem<PadicScalar>)> {
    let cap = cap.or(Some(max_precision(&j.lplus).max(max_precision(&j.lminus))));
    let level = level_for(&j.lplus, cap)?;
    let quad = QuadCtx::new(level.ctx(), j.k, j.eps)?;
    let plus = elem_from_json(&j.lplus, &level, level.ctx())?;
    let minus = elem_from_json(&j.lminus, &level, level.ctx())?;
    Ok((quad, plus, minus))
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::pollack::compose;

    #[test]
    fn scalar_round_trip_and_shape() {
        let ctx = PadicCtx::new(5, 12).unwrap();
        let x = PadicScalar::from_ratio(&ctx, -7, 25).unwrap();
        let j = padic_to_json(&x);
        assert_eq!(j.v, ValuationJson::Finite(-2));
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.contains("\"N\":12"));
        let back: PadicJson = serde_json::from_str(&text).unwrap();
        assert_eq!(padic_from_json(&back, &ctx).unwrap(), x);

        let zero = serde_json::to_value(padic_to_json(&PadicScalar::zero(&ctx))).unwrap();
        assert_eq!(zero["v"], "inf");
        assert!(padic_from_json(&serde_json::from_value(zero).unwrap(), &ctx).unwrap().is_zero());
    }

    #[test]
    fn malformed_scalars_are_rejected() {
        let ctx = PadicCtx::new(3, 10).unwrap();
        let bad_v: PadicJson = serde_json::from_str(r#"{"p":3,"N":10,"v":"oops","u":"1"}"#).unwrap();
        assert!(matches!(padic_from_json(&bad_v, &ctx), Err(Error::Malformed(_))));
        let bad_u: PadicJson = serde_json::from_str(r#"{"p":3,"N":10,"v":0,"u":"x"}"#).unwrap();
        assert!(matches!(padic_from_json(&bad_u, &ctx), Err(Error::Malformed(_))));
        let divisible: PadicJson = serde_json::from_str(r#"{"p":3,"N":10,"v":0,"u":"6"}"#).unwrap();
        assert!(matches!(padic_from_json(&divisible, &ctx), Err(Error::Malformed(_))));
        let wrong_p: PadicJson = serde_json::from_str(r#"{"p":5,"N":10,"v":0,"u":"1"}"#).unwrap();
        assert!(matches!(padic_from_json(&wrong_p, &ctx), Err(Error::PrimeMismatch(5, 3))));
    }

    #[test]
    fn pair_and_pm_round_trip() {
        let ctx = PadicCtx::new(3, 20).unwrap();
        let level = Level::new(&ctx, 3).unwrap();
        let quad = QuadCtx::new(&ctx, 3, -1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = GroupRingElem::random_small(&level, &mut rng, 5);
        let b = GroupRingElem::random_small(&level, &mut rng, 5);
        let pair = compose(&a, &b, &quad).unwrap();
        let text = serde_json::to_string(&pair_to_json(&pair)).unwrap();
        let back = pair_from_json(&serde_json::from_str(&text).unwrap(), Some(20)).unwrap();
        assert_eq!(back.l1, pair.l1);
        assert_eq!(back.l2, pair.l2);

        let pm = PMDecomposition {
            lplus: a.clone(),
            lminus: b.clone(),
            witnesses: Witnesses { plus: vec![2], minus: vec![1] },
        };
        let text = serde_json::to_string(&pm_to_json(&pm, &quad)).unwrap();
        let (q2, plus, minus) = pm_from_json(&serde_json::from_str(&text).unwrap(), None).unwrap();
        assert_eq!(q2.weight(), 3);
        assert_eq!((plus, minus), (a, b));
    }

    #[test]
    fn ring_tag_is_checked() {
        let ctx = PadicCtx::new(3, 20).unwrap();
        let level = Level::new(&ctx, 2).unwrap();
        let quad = QuadCtx::new(&ctx, 2, 1).unwrap();
        let f = GroupRingElem::<PadicScalar>::one(&level, &ctx);
        let j = elem_to_json(&f);
        assert_eq!(serde_json::to_value(&j).unwrap()["ring"], "base");
        assert!(matches!(
            elem_from_json::<QuadExtScalar>(&j, &level, &quad),
            Err(Error::Malformed(_))
        ));
    }
}
