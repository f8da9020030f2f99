//! An exact model of `Q_p(ζ_{p^n})` by `Q(ζ_{p^n})`.
//!
//! Every object here (roots of unity, traces, the `π_i`) is defined over
//! `Q`, and `[Q_p(ζ_{p^n}) : Q_p] = [Q(ζ_{p^n}) : Q]`, so ranks computed over
//! `Q` are the ranks over `Q_p`.

mod linalg;
mod spaces;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::cyclotomic::totient_pm;
use crate::error::{Error, Result};

pub use linalg::{rank, Echelon};
pub use spaces::{
    corollary_gen_prediction, corollary_gen_span, dim_formula, dim_table, galois_span_dim, pi_combination,
    plus_minus_space, predicted_span_dim, q_piece, q_piece_dim, r_space, s_indices, u_space_dim, DimTable,
    SubspaceBasis,
};

fn q(x: i64) -> BigRational {
    BigRational::from_integer(x.into())
}

/// Reduces a vector indexed by exponents mod `p^n` modulo `Φ_{p^n}`.
fn reduce(p: u64, n: u32, mut v: Vec<BigRational>) -> Vec<BigRational> {
    if n == 0 {
        return v;
    }
    let step = p.pow(n - 1) as usize;
    let d = (p as usize - 1) * step;
    for t in 0..step {
        let c = std::mem::take(&mut v[d + t]);
        if c.is_zero() {
            continue;
        }
        for i in 0..(p as usize - 1) {
            v[i * step + t] -= &c;
        }
    }
    v.truncate(d);
    v
}

/// An element of `Q(ζ_{p^n})` in the power basis `1, ζ, …, ζ^{φ(p^n)-1}`.
#[derive(Clone, PartialEq, Eq)]
pub struct CycRationalElem {
    p: u64,
    n: u32,
    coeffs: Vec<BigRational>,
}

impl CycRationalElem {
    pub fn new(p: u64, n: u32, coeffs: Vec<BigRational>) -> Result<Self> {
        if coeffs.len() != totient_pm(p, n) {
            return Err(Error::ShapeMismatch(format!(
                "level {n} needs {} coefficients, got {}",
                totient_pm(p, n),
                coeffs.len()
            )));
        }
        Ok(CycRationalElem { p, n, coeffs })
    }

    /// From a vector indexed by exponents mod `p^n`.
    pub fn from_exponent_vector(p: u64, n: u32, v: Vec<BigRational>) -> Self {
        assert_eq!(v.len(), p.pow(n) as usize);
        CycRationalElem { p, n, coeffs: reduce(p, n, v) }
    }

    pub fn zero(p: u64, n: u32) -> Self {
        CycRationalElem {
            p,
            n,
            coeffs: vec![BigRational::zero(); totient_pm(p, n)],
        }
    }

    pub fn from_rational(p: u64, n: u32, c: BigRational) -> Self {
        let mut x = Self::zero(p, n);
        x.coeffs[0] = c;
        x
    }

    pub fn one(p: u64, n: u32) -> Self {
        Self::from_rational(p, n, BigRational::one())
    }

    /// `ζ_{p^n}^e`.
    pub fn zeta_pow(p: u64, n: u32, e: i64) -> Self {
        let w = p.pow(n);
        let mut v = vec![BigRational::zero(); w as usize];
        v[e.rem_euclid(w as i64) as usize] = BigRational::one();
        Self::from_exponent_vector(p, n, v)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigRational> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        CycRationalElem {
            p: self.p,
            n: self.n,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// The automorphism `ζ ↦ ζ^a` for `a` prime to `p`.
    pub fn galois(&self, a: i64) -> Result<Self> {
        if a.rem_euclid(self.p as i64) == 0 {
            return Err(Error::InvalidResidue(a));
        }
        let w = self.p.pow(self.n) as i64;
        let mut v = vec![BigRational::zero(); w as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                v[(i as i64 * a).rem_euclid(w) as usize] += c;
            }
        }
        Ok(Self::from_exponent_vector(self.p, self.n, v))
    }

    /// The image under `Q(ζ_{p^n}) ⊂ Q(ζ_{p^target})`, `ζ_{p^n} = ζ_{p^target}^{p^{target-n}}`.
    pub fn embed(&self, target: u32) -> Result<Self> {
        if target < self.n {
            return Err(Error::BadIndex(format!("cannot embed level {} into level {target}", self.n)));
        }
        let stride = self.p.pow(target - self.n) as usize;
        let mut v = vec![BigRational::zero(); self.p.pow(target) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[i * stride] = c.clone();
        }
        Ok(Self::from_exponent_vector(self.p, target, v))
    }

    /// Whether the element lies in `Q(ζ_{p^m})`. The canonical form of such
    /// an element only uses exponents divisible by `p^{n-m}`.
    pub fn lies_in_level(&self, m: u32) -> bool {
        self.descend(m).is_ok()
    }

    /// The same element written at level `m <= n`; fails if it is not there.
    pub fn descend(&self, m: u32) -> Result<Self> {
        if m > self.n {
            return Err(Error::BadIndex(format!("level {m} is above {}", self.n)));
        }
        let stride = self.p.pow(self.n - m) as usize;
        let len = totient_pm(self.p, m);
        let mut out = Vec::with_capacity(len);
        for (i, c) in self.coeffs.iter().enumerate() {
            if i % stride == 0 && i / stride < len {
                out.push(c.clone());
            } else if !c.is_zero() {
                return Err(Error::BadIndex(format!("element does not lie in level {m}")));
            }
        }
        out.resize(len, BigRational::zero());
        Ok(CycRationalElem {
            p: self.p,
            n: m,
            coeffs: out,
        })
    }

    /// All conjugates `x^σ`, `σ ∈ Gal(Q(ζ_{p^n})/Q)`.
    pub fn orbit(&self) -> Vec<Self> {
        units(self.p, self.n)
            .into_iter()
            .map(|a| self.galois(a as i64).expect("unit"))
            .collect()
    }

    fn assert_same(&self, other: &Self) {
        assert!(
            self.p == other.p && self.n == other.n,
            "level mismatch: (p, n) = ({}, {}) vs ({}, {})",
            self.p,
            self.n,
            other.p,
            other.n
        );
    }
}

impl fmt::Debug for CycRationalElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                _ => write!(f, "({c})ζ^{i}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " [p^{}]", self.n)
    }
}

impl Add for &CycRationalElem {
    type Output = CycRationalElem;

    fn add(self, rhs: Self) -> CycRationalElem {
        self.assert_same(rhs);
        CycRationalElem {
            p: self.p,
            n: self.n,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CycRationalElem {
    type Output = CycRationalElem;

    fn sub(self, rhs: Self) -> CycRationalElem {
        self.assert_same(rhs);
        CycRationalElem {
            p: self.p,
            n: self.n,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &CycRationalElem {
    type Output = CycRationalElem;

    fn neg(self) -> CycRationalElem {
        self.scale(&q(-1))
    }
}

impl Mul for &CycRationalElem {
    type Output = CycRationalElem;

    fn mul(self, rhs: Self) -> CycRationalElem {
        self.assert_same(rhs);
        let w = self.p.pow(self.n) as usize;
        let mut v = vec![BigRational::zero(); w];
        for (i, a) in self.coeffs.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in rhs.coeffs.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                v[(i + j) % w] += a * b;
            }
        }
        CycRationalElem::from_exponent_vector(self.p, self.n, v)
    }
}

/// Representatives of `(Z/p^n)^×`, i.e. of `G_n`.
pub fn units(p: u64, n: u32) -> Vec<u64> {
    let w = p.pow(n);
    if n == 0 {
        return vec![1];
    }
    (1..w).filter(|a| a.gcd(&p) == 1).collect()
}

/// `π_0 = 1`, `π_1 = ζ_p + 1/(p-1)`, `π_i = ζ_{p^i}` for `i >= 2`, written at level `n`.
pub fn pi_element(p: u64, n: u32, i: u32) -> Result<CycRationalElem> {
    if i > n {
        return Err(Error::BadIndex(format!("π_{i} does not live at level {n}")));
    }
    let x = match i {
        0 => CycRationalElem::one(p, 0),
        1 => &CycRationalElem::zeta_pow(p, 1, 1) + &CycRationalElem::from_rational(p, 1, BigRational::new(1.into(), (p as i64 - 1).into())),
        _ => CycRationalElem::zeta_pow(p, i, 1),
    };
    x.embed(n)
}

/// `Tr_{n/m}(x)`: the sum of `x^σ` over `σ_a` with `a ≡ 1 mod p^m`, written at level `m`.
pub fn trace(x: &CycRationalElem, m: u32) -> Result<CycRationalElem> {
    let n = x.level();
    if m > n {
        return Err(Error::BadIndex(format!("cannot trace level {n} down to level {m}")));
    }
    let p = x.p();
    let modulus = p.pow(m);
    let mut acc = CycRationalElem::zero(p, n);
    for a in units(p, n).into_iter().filter(|a| a % modulus == 1 % modulus) {
        acc = &acc + &x.galois(a as i64)?;
    }
    acc.descend(m)
}
