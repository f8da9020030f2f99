//! Arithmetic in `E(ζ_{p^m})`, elements stored as coefficient vectors in the
//! power basis `1, ζ, …, ζ^{φ(p^m)-1}` reduced modulo `Φ_{p^m}(X)`.
//!
//! The roots are compatible: `ζ_{p^m}^p = ζ_{p^{m-1}}`, so level `m-1`
//! embeds into level `m` through `X ↦ X^p`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::One;

use crate::error::{Error, Result};
use crate::padic::PadicScalar;
use crate::scalar::Scalar;

/// `φ(p^m)`, with `φ(1) = 1`.
pub fn totient_pm(p: u64, m: u32) -> usize {
    if m == 0 {
        1
    } else {
        ((p - 1) * p.pow(m - 1)) as usize
    }
}

/// Reduces a vector indexed by exponents mod `p^m` to the canonical
/// representative of degree `< φ(p^m)`.
pub(crate) fn reduce_cyclotomic<S: Scalar>(p: u64, m: u32, mut v: Vec<S>) -> Vec<S> {
    debug_assert_eq!(v.len(), p.pow(m) as usize);
    if m == 0 {
        return v;
    }
    let q = p.pow(m - 1) as usize;
    let d = (p as usize - 1) * q;
    for t in 0..q {
        let c = v[d + t].clone();
        if c.is_zero() {
            continue;
        }
        for i in 0..(p as usize - 1) {
            let idx = i * q + t;
            v[idx] = v[idx].sub(&c);
        }
    }
    v.truncate(d);
    v
}

#[derive(Clone)]
pub struct CyclotomicScalar<S: Scalar> {
    p: u64,
    m: u32,
    ctx: S::Ctx,
    coeffs: Vec<S>,
}

impl<S: Scalar> CyclotomicScalar<S> {
    pub fn new(ctx: &S::Ctx, p: u64, m: u32, coeffs: Vec<S>) -> Result<Self> {
        if coeffs.len() != totient_pm(p, m) {
            return Err(Error::ShapeMismatch(format!(
                "level {m} needs {} coefficients, got {}",
                totient_pm(p, m),
                coeffs.len()
            )));
        }
        Ok(CyclotomicScalar {
            p,
            m,
            ctx: ctx.clone(),
            coeffs,
        })
    }

    /// From a vector indexed by exponents mod `p^m`.
    pub fn from_exponent_vector(ctx: &S::Ctx, p: u64, m: u32, v: Vec<S>) -> Self {
        CyclotomicScalar {
            p,
            m,
            ctx: ctx.clone(),
            coeffs: reduce_cyclotomic(p, m, v),
        }
    }

    pub fn zero(ctx: &S::Ctx, p: u64, m: u32) -> Self {
        CyclotomicScalar {
            p,
            m,
            ctx: ctx.clone(),
            coeffs: vec![S::zero(ctx); totient_pm(p, m)],
        }
    }

    pub fn from_scalar(ctx: &S::Ctx, p: u64, m: u32, c: S) -> Self {
        let mut out = Self::zero(ctx, p, m);
        out.coeffs[0] = c;
        out
    }

    pub fn one(ctx: &S::Ctx, p: u64, m: u32) -> Self {
        Self::from_scalar(ctx, p, m, S::one(ctx))
    }

    /// `ζ_{p^m}^e`.
    pub fn zeta_pow(ctx: &S::Ctx, p: u64, m: u32, e: i64) -> Self {
        let order = p.pow(m) as i64;
        let mut v = vec![S::zero(ctx); order as usize];
        v[e.rem_euclid(order) as usize] = S::one(ctx);
        Self::from_exponent_vector(ctx, p, m, v)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.m
    }

    pub fn ctx(&self) -> &S::Ctx {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.p != other.p || self.m != other.m {
            return Err(Error::ShapeMismatch(format!(
                "cyclotomic levels (p={}, m={}) vs (p={}, m={})",
                self.p, self.m, other.p, other.m
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(self.zip(other, |a, b| a.add(b)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(self.zip(other, |a, b| a.sub(b)))
    }

    fn zip(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        CyclotomicScalar {
            p: self.p,
            m: self.m,
            ctx: self.ctx.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|x| x.mul(c))
    }

    pub fn scale_padic(&self, c: &PadicScalar) -> Self {
        self.map(|x| x.scale(c))
    }

    fn map(&self, f: impl Fn(&S) -> S) -> Self {
        CyclotomicScalar {
            p: self.p,
            m: self.m,
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let order = self.p.pow(self.m) as usize;
        let mut v = vec![S::zero(&self.ctx); order];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let k = (i + j) % order;
                v[k] = v[k].add(&a.mul(b));
            }
        }
        Ok(Self::from_exponent_vector(&self.ctx, self.p, self.m, v))
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut acc = Self::one(&self.ctx, self.p, self.m);
        for _ in 0..e {
            acc = acc.mul(self).expect("same level");
        }
        acc
    }

    /// Multiplication by `ζ`.
    fn mul_zeta(&self) -> Self {
        let order = self.p.pow(self.m) as usize;
        let mut v = vec![S::zero(&self.ctx); order];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[(i + 1) % order] = c.clone();
        }
        Self::from_exponent_vector(&self.ctx, self.p, self.m, v)
    }

    /// Inverse by solving `x·y = 1` against the multiplication matrix of `x`,
    /// pivoting on the entry of least valuation.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivideByZero);
        }
        let dim = self.coeffs.len();
        // columns[j] = x·ζ^j
        let mut col = self.clone();
        let mut rows: Vec<Vec<S>> = vec![Vec::with_capacity(dim + 1); dim];
        for j in 0..dim {
            for (i, row) in rows.iter_mut().enumerate() {
                row.push(col.coeffs[i].clone());
            }
            if j + 1 < dim {
                col = col.mul_zeta();
            }
        }
        for (i, row) in rows.iter_mut().enumerate() {
            row.push(if i == 0 {
                S::one(&self.ctx)
            } else {
                S::zero(&self.ctx)
            });
        }
        let sol = solve_square(rows, dim).ok_or_else(|| {
            Error::NotAUnit(format!(
                "singular multiplication matrix at level {}",
                self.m
            ))
        })?;
        Self::new(&self.ctx, self.p, self.m, sol)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inv()?)
    }

    /// The Galois automorphism `ζ ↦ ζ^a`, `p ∤ a`.
    pub fn galois(&self, a: i64) -> Result<Self> {
        if a.rem_euclid(self.p as i64) == 0 && self.m > 0 {
            return Err(Error::BadIndex(format!("{a} is not prime to p")));
        }
        let order = self.p.pow(self.m) as i64;
        let mut v = vec![S::zero(&self.ctx); order as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = (i as i64 * a).rem_euclid(order) as usize;
            v[k] = v[k].add(c);
        }
        Ok(Self::from_exponent_vector(&self.ctx, self.p, self.m, v))
    }

    /// The image under `X ↦ X^{p^{m'-m}}` at level `m' >= m`.
    pub fn embed(&self, target: u32) -> Result<Self> {
        if target < self.m {
            return Err(Error::BadLevel(format!(
                "cannot embed level {} into level {target}",
                self.m
            )));
        }
        let step = self.p.pow(target - self.m) as usize;
        let order = self.p.pow(target) as usize;
        let mut v = vec![S::zero(&self.ctx); order];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[(i * step) % order] = c.clone();
        }
        Ok(Self::from_exponent_vector(&self.ctx, self.p, target, v))
    }

    /// `v_p` extended to `E(ζ_{p^m})` with `v_p(1 - ζ) = 1/φ(p^m)`, read off the
    /// `(1 - ζ)`-adic expansion. Exact for `Q_p` coefficients; for `Q_p(α)`
    /// coefficients the minimum is only a lower bound. `None` for zero.
    pub fn pi_valuation(&self) -> Option<Rational64> {
        let dim = self.coeffs.len();
        let phi = dim as i64;
        let base = S::base_ctx(&self.ctx).clone();
        // x = Σ c_i (1 - π)^i = Σ_j (-1)^j (Σ_{i>=j} C(i,j) c_i) π^j
        let mut best: Option<Rational64> = None;
        for j in 0..dim {
            let mut acc = S::zero(&self.ctx);
            let mut binom = BigInt::one();
            for i in j..dim {
                if i > j {
                    binom = binom * BigInt::from(i) / BigInt::from(i - j);
                }
                let c = &self.coeffs[i];
                if !c.is_zero() {
                    acc = acc.add(&c.scale(&PadicScalar::from_bigint(&base, &binom)));
                }
            }
            if let Some(h) = acc.half_valuation() {
                let v = Rational64::new(h, 2) + Rational64::new(j as i64, phi);
                best = Some(match best {
                    None => v,
                    Some(b) if v < b => v,
                    Some(b) => b,
                });
            }
        }
        best
    }
}

/// Gaussian elimination on an augmented `dim × (dim+1)` system.
fn solve_square<S: Scalar>(mut rows: Vec<Vec<S>>, dim: usize) -> Option<Vec<S>> {
    for col in 0..dim {
        let pivot = (col..dim)
            .filter_map(|r| rows[r][col].half_valuation().map(|v| (v, r)))
            .min()?
            .1;
        rows.swap(col, pivot);
        let inv = rows[col][col].inv().ok()?;
        let pivot_row: Vec<S> = rows[col].iter().map(|x| x.mul(&inv)).collect();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, pv) in row.iter_mut().zip(&pivot_row).skip(col) {
                if !pv.is_zero() {
                    *x = x.sub(&factor.mul(pv));
                }
            }
        }
        rows[col] = pivot_row;
    }
    Some(rows.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

impl<S: Scalar> PartialEq for CyclotomicScalar<S> {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.coeffs == other.coeffs
    }
}

impl<S: Scalar> fmt::Debug for CyclotomicScalar<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyc(p={}, m={}) [", self.p, self.m)?;
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c:?})ζ^{i}")?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, "]")
    }
}

/// `1/Φ_{p^m}(ζ_{p^{m'}})` in closed form. For `m' < m` the value is `p`; for
/// `m' > m` it uses `1/Φ_{p^m}(X) = (X^{p^{m-1}} - 1)/(X^{p^m} - 1)` and
/// `1/(ζ' - 1) = q^{-1} Σ_i i·ζ'^i` for `ζ'` of order `q`.
pub fn phi_value_inverse<S: Scalar>(ctx: &S::Ctx, p: u64, m: u32, slot: u32) -> Result<CyclotomicScalar<S>> {
    let base = S::base_ctx(ctx).clone();
    if m == 0 || slot == m {
        return Err(Error::DivideByZero);
    }
    if slot < m {
        let c = PadicScalar::p_power(&base, -1);
        return Ok(CyclotomicScalar::from_scalar(ctx, p, slot, S::embed(ctx, &c)));
    }
    let order = p.pow(slot) as usize;
    let pm = p.pow(m) as usize;
    let q = p.pow(slot - m) as usize;
    let mut v = vec![S::zero(ctx); order];
    for i in 1..q {
        v[(i * pm) % order] = S::from_i64(ctx, i as i64);
    }
    let geometric = CyclotomicScalar::from_exponent_vector(ctx, p, slot, v)
        .scale_padic(&PadicScalar::p_power(&base, -((slot - m) as i64)));
    let mut w = vec![S::zero(ctx); order];
    w[p.pow(m - 1) as usize] = S::one(ctx);
    w[0] = S::from_i64(ctx, -1);
    let numer = CyclotomicScalar::from_exponent_vector(ctx, p, slot, w);
    numer.mul(&geometric)
}

/// `Φ_{p^m}(ζ_{p^{slot}})` computed from its defining sum.
pub fn phi_value<S: Scalar>(ctx: &S::Ctx, p: u64, m: u32, slot: u32) -> CyclotomicScalar<S> {
    let order = p.pow(slot) as usize;
    let step = if m == 0 { 0 } else { p.pow(m - 1) as usize };
    let mut v = vec![S::zero(ctx); order.max(1)];
    if m == 0 {
        // Φ_1(X) = X - 1
        v[1 % order] = v[1 % order].add(&S::one(ctx));
        v[0] = v[0].sub(&S::one(ctx));
    } else {
        for i in 0..p as usize {
            let k = (i * step) % order;
            v[k] = v[k].add(&S::one(ctx));
        }
    }
    CyclotomicScalar::from_exponent_vector(ctx, p, slot, v)
}
