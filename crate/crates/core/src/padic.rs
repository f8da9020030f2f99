//! Capped relative-precision arithmetic in `Q_p`.
//!
//! A nonzero [`PadicScalar`] is stored as `p^v * u` with `u` a unit known
//! modulo `p^N`, where `N` is the element's relative precision. Zero is an
//! exact sentinel: whenever an addition cancels every known digit the result
//! collapses to it (or errors, under [`OnCancellation::Error`]).

use std::cmp::min;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Prime and precision cap shared by a family of scalars, with a cached
/// table of the powers `p^0 ..= p^cap`.
pub struct PadicCtx {
    p: u64,
    cap: u32,
    powers: Vec<BigUint>,
}

impl PadicCtx {
    pub fn new(p: u64, cap: u32) -> Result<Arc<Self>> {
        if !is_odd_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        if cap == 0 {
            return Err(Error::BadPrecision("precision cap must be at least 1".into()));
        }
        let mut powers = Vec::with_capacity(cap as usize + 1);
        let mut acc = BigUint::one();
        for _ in 0..=cap {
            powers.push(acc.clone());
            acc *= p;
        }
        Ok(Arc::new(PadicCtx { p, cap, powers }))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// `p^e` for `e <= cap`.
    pub fn pow_p(&self, e: u32) -> &BigUint {
        &self.powers[e as usize]
    }
}

impl fmt::Debug for PadicCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PadicCtx")
            .field("p", &self.p)
            .field("cap", &self.cap)
            .finish()
    }
}

pub fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// What an addition does when every significant digit cancels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OnCancellation {
    #[default]
    ReportZero,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionPolicy {
    pub cap: u32,
    pub on_cancellation: OnCancellation,
}

impl PrecisionPolicy {
    pub fn new(cap: u32, on_cancellation: OnCancellation) -> Result<Self> {
        if cap == 0 {
            return Err(Error::BadPrecision("precision cap must be at least 1".into()));
        }
        Ok(PrecisionPolicy {
            cap,
            on_cancellation,
        })
    }

    pub fn context(&self, p: u64) -> Result<Arc<PadicCtx>> {
        PadicCtx::new(p, self.cap)
    }

    pub fn add(&self, x: &PadicScalar, y: &PadicScalar) -> Result<PadicScalar> {
        x.check_prime(y)?;
        match add_raw(x, y) {
            Some(z) => Ok(z),
            None => match self.on_cancellation {
                OnCancellation::ReportZero => Ok(PadicScalar::zero(x.narrower_ctx(y))),
                OnCancellation::Error => Err(Error::PrecisionExhausted(format!(
                    "{x:?} + {y:?} cancels every significant digit"
                ))),
            },
        }
    }

    pub fn sub(&self, x: &PadicScalar, y: &PadicScalar) -> Result<PadicScalar> {
        self.add(x, &y.neg())
    }
}

#[derive(Clone)]
pub struct PadicScalar {
    ctx: Arc<PadicCtx>,
    /// `None` is the zero sentinel.
    val: Option<i64>,
    unit: BigUint,
    prec: u32,
}

impl PadicScalar {
    pub fn zero(ctx: &Arc<PadicCtx>) -> Self {
        PadicScalar {
            ctx: ctx.clone(),
            val: None,
            unit: BigUint::zero(),
            prec: ctx.cap,
        }
    }

    pub fn one(ctx: &Arc<PadicCtx>) -> Self {
        Self::from_i64(ctx, 1)
    }

    pub fn from_i64(ctx: &Arc<PadicCtx>, x: i64) -> Self {
        Self::from_bigint(ctx, &BigInt::from(x))
    }

    /// Exact integers enter at full precision `cap`.
    pub fn from_bigint(ctx: &Arc<PadicCtx>, x: &BigInt) -> Self {
        if x.is_zero() {
            return Self::zero(ctx);
        }
        let (v, u) = strip_p(ctx.p, x.magnitude().clone());
        let modulus = ctx.pow_p(ctx.cap);
        let mut unit = u % modulus;
        if x.sign() == Sign::Minus {
            unit = modulus - unit;
        }
        PadicScalar {
            ctx: ctx.clone(),
            val: Some(v as i64),
            unit,
            prec: ctx.cap,
        }
    }

    pub fn from_ratio(ctx: &Arc<PadicCtx>, num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::DivideByZero);
        }
        let n = Self::from_i64(ctx, num);
        let d = Self::from_i64(ctx, den);
        n.div(&d)
    }

    pub fn from_rational(ctx: &Arc<PadicCtx>, q: &BigRational) -> Result<Self> {
        let n = Self::from_bigint(ctx, q.numer());
        let d = Self::from_bigint(ctx, q.denom());
        n.div(&d)
    }

    /// `p^k` for any integer `k`.
    pub fn p_power(ctx: &Arc<PadicCtx>, k: i64) -> Self {
        PadicScalar {
            ctx: ctx.clone(),
            val: Some(k),
            unit: BigUint::one(),
            prec: ctx.cap,
        }
    }

    /// Builds `p^val * unit` known to relative precision `prec`.
    pub fn from_parts(ctx: &Arc<PadicCtx>, val: i64, unit: BigUint, prec: u32) -> Result<Self> {
        if prec == 0 || prec > ctx.cap {
            return Err(Error::BadPrecision(format!(
                "relative precision {prec} outside 1..={}",
                ctx.cap
            )));
        }
        let unit = unit % ctx.pow_p(prec);
        if (&unit % ctx.p).is_zero() {
            return Err(Error::Malformed(format!(
                "unit digits {unit} are divisible by p = {}",
                ctx.p
            )));
        }
        Ok(PadicScalar {
            ctx: ctx.clone(),
            val: Some(val),
            unit,
            prec,
        })
    }

    pub fn ctx(&self) -> &Arc<PadicCtx> {
        &self.ctx
    }

    pub fn p(&self) -> u64 {
        self.ctx.p
    }

    /// `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        self.val
    }

    pub fn unit(&self) -> &BigUint {
        &self.unit
    }

    /// Number of significant digits.
    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// `v + N`: the exponent of the error term. `None` for the zero sentinel.
    pub fn absolute_precision(&self) -> Option<i64> {
        self.val.map(|v| v + self.prec as i64)
    }

    pub fn is_zero(&self) -> bool {
        self.val.is_none()
    }

    pub fn is_one(&self) -> bool {
        self == &Self::one(&self.ctx)
    }

    /// The stored representative `p^v * u` as an exact rational.
    pub fn to_rational(&self) -> BigRational {
        match self.val {
            None => BigRational::zero(),
            Some(v) => {
                let u = BigInt::from(self.unit.clone());
                let pk = BigInt::from(self.ctx.p).pow(v.unsigned_abs() as u32);
                if v >= 0 {
                    BigRational::from_integer(u * pk)
                } else {
                    BigRational::new(u, pk)
                }
            }
        }
    }

    /// The element reduced to a signed integer in `(-p^a/2, p^a/2]` when it is
    /// integral and known modulo `p^a`.
    pub fn to_integer_mod(&self, a: u32) -> Option<BigInt> {
        match self.val {
            None => Some(BigInt::zero()),
            Some(v) if v < 0 => None,
            Some(v) => {
                let v = v as u32;
                if v >= a {
                    return Some(BigInt::zero());
                }
                if v + self.prec < a {
                    return None;
                }
                let modulus = BigInt::from(self.ctx.p).pow(a);
                let x = BigInt::from(self.unit.clone()) * BigInt::from(self.ctx.p).pow(v);
                let mut r = x.mod_floor(&modulus);
                if &r * 2 > modulus {
                    r -= &modulus;
                }
                Some(r)
            }
        }
    }

    fn check_prime(&self, other: &Self) -> Result<()> {
        if self.ctx.p != other.ctx.p {
            Err(Error::PrimeMismatch(self.ctx.p, other.ctx.p))
        } else {
            Ok(())
        }
    }

    fn narrower_ctx<'a>(&'a self, other: &'a Self) -> &'a Arc<PadicCtx> {
        if other.ctx.cap < self.ctx.cap {
            &other.ctx
        } else {
            &self.ctx
        }
    }

    fn assert_prime(&self, other: &Self) {
        assert_eq!(
            self.ctx.p, other.ctx.p,
            "p-adic arithmetic across different primes"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_prime(other);
        add_raw(self, other).unwrap_or_else(|| Self::zero(self.narrower_ctx(other)))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        match self.val {
            None => self.clone(),
            Some(_) => PadicScalar {
                ctx: self.ctx.clone(),
                val: self.val,
                unit: self.ctx.pow_p(self.prec) - &self.unit,
                prec: self.prec,
            },
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_prime(other);
        let ctx = self.narrower_ctx(other);
        match (self.val, other.val) {
            (Some(a), Some(b)) => {
                let prec = min(self.prec, other.prec);
                PadicScalar {
                    ctx: ctx.clone(),
                    val: Some(a + b),
                    unit: (&self.unit * &other.unit) % ctx.pow_p(prec),
                    prec,
                }
            }
            _ => Self::zero(ctx),
        }
    }

    /// Multiplication by `p^k`; exact, no digits lost.
    pub fn shift(&self, k: i64) -> Self {
        let mut out = self.clone();
        if let Some(v) = out.val.as_mut() {
            *v += k;
        }
        out
    }

    pub fn inv(&self) -> Result<Self> {
        let v = self.val.ok_or(Error::DivideByZero)?;
        let modulus = self.ctx.pow_p(self.prec);
        let unit = if self.prec == 0 || modulus.is_one() {
            BigUint::zero()
        } else {
            self.unit
                .modinv(modulus)
                .expect("unit digits are coprime to p")
        };
        Ok(PadicScalar {
            ctx: self.ctx.clone(),
            val: Some(-v),
            unit,
            prec: self.prec,
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut acc = Self::one(&self.ctx);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Integer powers, negative exponents through the inverse.
    pub fn powi(&self, e: i64) -> Result<Self> {
        if e >= 0 {
            Ok(self.pow(e as u64))
        } else {
            Ok(self.inv()?.pow(e.unsigned_abs()))
        }
    }

    /// Drops digits so that the relative precision is at most `prec`.
    pub fn truncate(&self, prec: u32) -> Self {
        if self.val.is_none() || prec >= self.prec {
            return self.clone();
        }
        let prec = prec.max(1);
        PadicScalar {
            ctx: self.ctx.clone(),
            val: self.val,
            unit: &self.unit % self.ctx.pow_p(prec),
            prec,
        }
    }
}

/// Returns `None` when the sum cancels all known digits.
fn add_raw(x: &PadicScalar, y: &PadicScalar) -> Option<PadicScalar> {
    let (a, b) = match (x.val, y.val) {
        (None, _) => return Some(y.clone()),
        (_, None) => return Some(x.clone()),
        (Some(vx), Some(vy)) => {
            if vx <= vy {
                (x, y)
            } else {
                (y, x)
            }
        }
    };
    let ctx = x.narrower_ctx(y);
    let va = a.val.unwrap();
    let vb = b.val.unwrap();
    let abs = min(va + a.prec as i64, vb + b.prec as i64);
    let rel = abs - va;
    if rel <= 0 {
        return None;
    }
    let rel = min(rel, ctx.cap as i64) as u32;
    let modulus = ctx.pow_p(rel);
    let shift = vb - va;
    let mut s = &a.unit % modulus;
    if shift < rel as i64 {
        s += (&b.unit * ctx.pow_p(shift as u32)) % modulus;
        if &s >= modulus {
            s -= modulus;
        }
    }
    if s.is_zero() {
        return None;
    }
    let (t, unit) = strip_p(ctx.p, s);
    Some(PadicScalar {
        ctx: ctx.clone(),
        val: Some(va + t as i64),
        unit,
        prec: rel - t,
    })
}

/// Splits `x = p^t * u` with `p ∤ u`; `x` must be nonzero.
fn strip_p(p: u64, mut x: BigUint) -> (u32, BigUint) {
    let mut t = 0;
    loop {
        let (q, r) = x.div_rem(&BigUint::from(p));
        if !r.is_zero() {
            return (t, x);
        }
        x = q;
        t += 1;
    }
}

impl PartialEq for PadicScalar {
    /// Equality at the shared precision: the difference cancels completely.
    fn eq(&self, other: &Self) -> bool {
        self.ctx.p == other.ctx.p && add_raw(self, &other.neg()).is_none_or(|d| d.is_zero())
    }
}

impl fmt::Debug for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.val {
            None => write!(f, "0 (p={})", self.ctx.p),
            Some(v) => write!(
                f,
                "{}^{} * {} + O({}^{})",
                self.ctx.p,
                v,
                self.unit,
                self.ctx.p,
                v + self.prec as i64
            ),
        }
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl std::ops::$tr<&PadicScalar> for &PadicScalar {
            type Output = PadicScalar;
            fn $method(self, rhs: &PadicScalar) -> PadicScalar {
                PadicScalar::$method(self, rhs)
            }
        }
        impl std::ops::$tr for PadicScalar {
            type Output = PadicScalar;
            fn $method(self, rhs: PadicScalar) -> PadicScalar {
                PadicScalar::$method(&self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl std::ops::Neg for &PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> PadicScalar {
        PadicScalar::neg(self)
    }
}

impl std::ops::Neg for PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> PadicScalar {
        PadicScalar::neg(&self)
    }
}

/// The Teichmüller lift of `a mod p`: the unique `(p-1)`-st root of unity
/// congruent to `a`, found by iterating `x -> x^p` to its fixed point.
pub fn teichmuller(ctx: &Arc<PadicCtx>, a: i64) -> Result<PadicScalar> {
    let p = ctx.p as i64;
    let r = a.rem_euclid(p);
    if r == 0 {
        return Err(Error::InvalidResidue(a));
    }
    let modulus = ctx.pow_p(ctx.cap);
    let exp = BigUint::from(ctx.p);
    let mut x = BigUint::from(r as u64);
    loop {
        let next = x.modpow(&exp, modulus);
        if next == x {
            break;
        }
        x = next;
    }
    PadicScalar::from_parts(ctx, 0, x, ctx.cap)
}

/// Smallest positive primitive root modulo `p`.
pub fn primitive_root(p: u64) -> u64 {
    let order = p - 1;
    let factors = prime_factors(order);
    (2..p)
        .find(|&g| factors.iter().all(|&q| mod_pow(g, order / q, p) != 1))
        .expect("every prime has a primitive root")
}

/// Exponent `i` with `g^i ≡ a (mod p)`.
pub fn discrete_log(a: i64, g: u64, p: u64) -> Option<u64> {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return None;
    }
    let mut x = 1u64;
    for i in 0..p - 1 {
        if x == a {
            return Some(i);
        }
        x = x * g % p;
    }
    None
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub(crate) fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    acc
}

/// The constant `c = v_p(x - 1)` with `v_p(x^{p^n} - 1) = n + c` for all `n >= 1`.
pub fn val_growth_constant(x: &PadicScalar) -> Result<i64> {
    let d = x.sub(&PadicScalar::one(x.ctx()));
    match d.valuation() {
        None => Err(Error::DegenerateInput("x = 1 has v_p(x - 1) = infinity".into())),
        Some(c) if c < 1 || x.valuation() != Some(0) => Err(Error::DegenerateInput(format!(
            "x is not in 1 + pZ_p (v_p(x - 1) = {c})"
        ))),
        Some(c) => Ok(c),
    }
}

/// Checks `v_p(x^{p^n} - 1) = n + v_p(x - 1)` at the working precision.
pub fn verify_val_growth(x: &PadicScalar, n: u32) -> Result<bool> {
    let c = val_growth_constant(x)?;
    let e = x.p().checked_pow(n).ok_or_else(|| {
        Error::BadPrecision(format!("p^{n} overflows the exponent range"))
    })?;
    let y = x.pow(e).sub(&PadicScalar::one(x.ctx()));
    match y.valuation() {
        None => Err(Error::PrecisionExhausted(format!(
            "x^(p^{n}) - 1 vanishes at relative precision {}",
            x.precision()
        ))),
        Some(v) => Ok(v == n as i64 + c),
    }
}

/// Convenience for oracles: the stored representative as an exact big
/// integer, when it is integral.
pub fn bigint_of(x: &PadicScalar) -> Option<BigInt> {
    let q = x.to_rational();
    if q.is_integer() {
        Some(q.to_integer())
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, n: u32) -> Arc<PadicCtx> {
        PadicCtx::new(p, n).unwrap()
    }

    #[test]
    fn additive_inverse_is_zero_sentinel() {
        let c = ctx(3, 10);
        let one = PadicScalar::one(&c);
        assert!(one.add(&one.neg()).is_zero());
    }

    #[test]
    fn no_carry_sum() {
        let c = ctx(3, 10);
        let x = PadicScalar::one(&c);
        let y = PadicScalar::p_power(&c, 1);
        let z = x.add(&y);
        assert_eq!(z.valuation(), Some(0));
        assert_eq!(z.unit(), &BigUint::from(4u32));
    }

    #[test]
    fn sum_reaching_p_to_the_n_is_zero_at_precision() {
        let c = ctx(3, 5);
        let z = PadicScalar::from_i64(&c, 121).add(&PadicScalar::from_i64(&c, 122));
        assert!(z.is_zero());
        let strict = PrecisionPolicy::new(5, OnCancellation::Error).unwrap();
        let err = strict
            .add(&PadicScalar::from_i64(&c, 121), &PadicScalar::from_i64(&c, 122))
            .unwrap_err();
        assert!(matches!(err, Error::PrecisionExhausted(_)));
    }

    #[test]
    fn multiplication_examples() {
        let c = ctx(3, 6);
        let p = PadicScalar::p_power(&c, 1);
        let pp = p.mul(&p);
        assert_eq!(pp.valuation(), Some(2));
        assert!(pp.unit().is_one());
        let x = PadicScalar::from_i64(&c, 4).pow(0);
        assert!(x.is_one());
        let y = PadicScalar::from_i64(&c, 4).mul(&PadicScalar::from_i64(&c, 7));
        assert_eq!(y, PadicScalar::from_i64(&c, 28));
        assert_eq!(y.unit(), &BigUint::from(28u32));
    }

    #[test]
    fn inverse_examples() {
        let c = ctx(3, 4);
        assert!(PadicScalar::one(&c).inv().unwrap().is_one());
        let ip = PadicScalar::p_power(&c, 1).inv().unwrap();
        assert_eq!(ip.valuation(), Some(-1));
        assert!(ip.unit().is_one());
        let i4 = PadicScalar::from_i64(&c, 4).inv().unwrap();
        assert_eq!(i4.unit(), &BigUint::from(61u32));
        assert_eq!(PadicScalar::zero(&c).inv().unwrap_err(), Error::DivideByZero);
    }

    #[test]
    fn teichmuller_examples() {
        let c3 = ctx(3, 8);
        assert!(teichmuller(&c3, 1).unwrap().is_one());
        assert_eq!(teichmuller(&c3, 2).unwrap(), PadicScalar::from_i64(&c3, -1));
        let c5 = ctx(5, 3);
        let t = teichmuller(&c5, 2).unwrap();
        assert_eq!(t.unit(), &BigUint::from(57u32));
        assert!(t.pow(4).is_one());
        assert_eq!(teichmuller(&c5, 10).unwrap_err(), Error::InvalidResidue(10));
    }

    #[test]
    fn growth_constant_examples() {
        let c = ctx(3, 20);
        assert!(matches!(
            val_growth_constant(&PadicScalar::one(&c)),
            Err(Error::DegenerateInput(_))
        ));
        let four = PadicScalar::from_i64(&c, 4);
        assert_eq!(val_growth_constant(&four).unwrap(), 1);
        assert!(verify_val_growth(&four, 2).unwrap());
        let ten = PadicScalar::from_i64(&c, 10);
        assert_eq!(val_growth_constant(&ten).unwrap(), 2);
        assert!(verify_val_growth(&ten, 1).unwrap());
    }

    #[test]
    fn cancellation_reduces_precision() {
        let c = ctx(5, 10);
        let a = PadicScalar::from_i64(&c, 1 + 25 * 7);
        let b = PadicScalar::from_i64(&c, -1);
        let s = a.add(&b);
        assert_eq!(s.valuation(), Some(2));
        assert_eq!(s.precision(), 8);
    }

    #[test]
    fn mixed_precision_addition_keeps_smaller_absolute_precision() {
        let c = ctx(3, 10);
        let a = PadicScalar::from_parts(&c, 0, BigUint::from(2u32), 3).unwrap();
        let b = PadicScalar::p_power(&c, 1);
        let s = a.add(&b);
        assert_eq!(s.absolute_precision(), Some(3));
        assert_eq!(s.unit(), &BigUint::from(5u32));
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(3), 2);
        assert_eq!(primitive_root(5), 2);
        assert_eq!(primitive_root(7), 3);
        assert_eq!(discrete_log(3, 2, 5), Some(3));
    }
}
