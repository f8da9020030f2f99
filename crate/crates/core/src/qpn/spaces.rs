//! Subspaces of `Q(ζ_{p^n})`: Galois-orbit spans, the trace-condition
//! spaces `Q^±` and their orbit descriptions `R^±`.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::linalg::{rank, Echelon};
use super::{pi_element, q, trace, CycRationalElem};
use crate::cyclotomic::totient_pm;
use crate::error::{Error, Result};
use crate::half_logs::{omega_indices, Sign};

/// A `Q`-subspace of `Q(ζ_{p^n})` held as a reduced echelon basis.
#[derive(Clone, Debug)]
pub struct SubspaceBasis {
    p: u64,
    n: u32,
    vectors: Vec<CycRationalElem>,
    description: String,
}

impl SubspaceBasis {
    pub fn span<I>(p: u64, n: u32, gens: I, description: impl Into<String>) -> Self
    where
        I: IntoIterator<Item = CycRationalElem>,
    {
        let rows = gens.into_iter().map(CycRationalElem::into_coeffs).collect();
        let vectors = Echelon::new(rows, totient_pm(p, n))
            .into_rows()
            .into_iter()
            .map(|c| CycRationalElem::new(p, n, c).expect("row length"))
            .collect();
        SubspaceBasis {
            p,
            n,
            vectors,
            description: description.into(),
        }
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[CycRationalElem] {
        &self.vectors
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn sum(&self, other: &Self) -> Self {
        Self::span(
            self.p,
            self.n,
            self.vectors.iter().chain(&other.vectors).cloned(),
            format!("({}) + ({})", self.description, other.description),
        )
    }

    pub fn contains(&self, other: &Self) -> bool {
        self.sum(other).rank() == self.rank()
    }

    pub fn contains_element(&self, x: &CycRationalElem) -> bool {
        let rows = self.vectors.iter().chain([x]).map(|v| v.coeffs().to_vec()).collect();
        rank(rows, totient_pm(self.p, self.n)) == self.rank()
    }

    pub fn same_space(&self, other: &Self) -> bool {
        self.rank() == other.rank() && self.contains(other)
    }

    pub fn intersection_dim(&self, other: &Self) -> usize {
        self.rank() + other.rank() - self.sum(other).rank()
    }
}

/// `dim Q^{(i)}`: `1`, `p - 2`, then `p^{i-2}(p-1)^2`.
pub fn q_piece_dim(p: u64, i: u32) -> u64 {
    match i {
        0 => 1,
        1 => p - 2,
        _ => p.pow(i - 2) * (p - 1) * (p - 1),
    }
}

/// `Q^{(i)}`: the orbit span of `π_i` at level `n`.
pub fn q_piece(p: u64, n: u32, i: u32) -> Result<SubspaceBasis> {
    let pi = pi_element(p, n, i)?;
    Ok(SubspaceBasis::span(p, n, pi.orbit(), format!("orbit of π_{i}")))
}

/// `Σ x_i π_i` at level `n = coords.len() - 1`.
pub fn pi_combination(p: u64, coords: &[BigRational]) -> Result<CycRationalElem> {
    let n = coords
        .len()
        .checked_sub(1)
        .ok_or_else(|| Error::BadIndex("need at least one coordinate".into()))? as u32;
    let mut acc = CycRationalElem::zero(p, n);
    for (i, c) in coords.iter().enumerate() {
        if !c.is_zero() {
            acc = &acc + &pi_element(p, n, i as u32)?.scale(c);
        }
    }
    Ok(acc)
}

/// `Σ_{i : x_i ≠ 0} dim Q^{(i)}`.
pub fn predicted_span_dim(p: u64, coords: &[BigRational]) -> u64 {
    coords
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, _)| q_piece_dim(p, i as u32))
        .sum()
}

/// Rank over `Q` of the Galois orbit of `x`.
pub fn galois_span_dim(x: &CycRationalElem) -> usize {
    let rows = x.orbit().into_iter().map(CycRationalElem::into_coeffs).collect();
    rank(rows, totient_pm(x.p(), x.level()))
}

fn gen_element(p: u64, a: &[BigRational]) -> Result<(u32, CycRationalElem)> {
    let n = a
        .len()
        .checked_sub(1)
        .ok_or_else(|| Error::BadIndex("need a_0".into()))? as u32;
    if n >= 1 && a[1] == &a[0] * q(p as i64 - 1) {
        return Err(Error::HypothesisViolated(format!(
            "a_1 = (p-1)a_0 = {}",
            a[1]
        )));
    }
    let mut x = CycRationalElem::from_rational(p, n, a[0].clone());
    for (i, c) in a.iter().enumerate().skip(1) {
        if !c.is_zero() {
            x = &x + &CycRationalElem::zeta_pow(p, i as u32, 1).embed(n)?.scale(c);
        }
    }
    Ok((n, x))
}

/// The orbit span of `a_0 + Σ_{i>=1} a_i ζ_{p^i}`. Requires `a_1 ≠ (p-1)a_0`.
pub fn corollary_gen_span(p: u64, a: &[BigRational]) -> Result<SubspaceBasis> {
    let (n, x) = gen_element(p, a)?;
    Ok(SubspaceBasis::span(p, n, x.orbit(), "orbit of a_0 + Σ a_i ζ_{p^i}"))
}

/// `Q + Σ_{r >= 1, a_r ≠ 0} (orbit of ζ_{p^r})`.
pub fn corollary_gen_prediction(p: u64, a: &[BigRational]) -> Result<SubspaceBasis> {
    let (n, _) = gen_element(p, a)?;
    let mut gens = vec![CycRationalElem::one(p, n)];
    for (r, c) in a.iter().enumerate().skip(1) {
        if !c.is_zero() {
            gens.extend(CycRationalElem::zeta_pow(p, r as u32, 1).embed(n)?.orbit());
        }
    }
    Ok(SubspaceBasis::span(p, n, gens, "Q + orbits of ζ_{p^r}, a_r ≠ 0"))
}

/// `S_n^±`: the `m ∈ [0, n-1]` that are even (plus) or odd (minus).
pub fn s_indices(n: u32, sign: Sign) -> Vec<u32> {
    let parity = match sign {
        Sign::Plus => 0,
        Sign::Minus => 1,
    };
    (0..n).filter(|m| m % 2 == parity).collect()
}

/// `Q^± = {x : Tr_{n/m+1}(x) ∈ Q(ζ_{p^m}) for all m ∈ S_n^±}` as an exact kernel.
pub fn plus_minus_space(p: u64, n: u32, sign: Sign) -> Result<SubspaceBasis> {
    if n == 0 {
        return Err(Error::BadIndex("need n >= 1".into()));
    }
    let dim = totient_pm(p, n);
    let basis: Vec<CycRationalElem> = (0..dim).map(|j| CycRationalElem::zeta_pow(p, n, j as i64)).collect();
    let mut constraints = Vec::new();
    for m in s_indices(n, sign) {
        let images = basis
            .par_iter()
            .map(|e| trace(e, m + 1))
            .collect::<Result<Vec<_>>>()?;
        // Outside Q(ζ_{p^m}) means a nonzero coefficient at an exponent not divisible by p,
        // or anything but the constant term when m = 0.
        let len = totient_pm(p, m + 1);
        for pos in (0..len).filter(|&i| if m == 0 { i != 0 } else { i % p as usize != 0 }) {
            constraints.push(images.iter().map(|y| y.coeffs()[pos].clone()).collect());
        }
    }
    let kernel = Echelon::new(constraints, dim).nullspace();
    Ok(SubspaceBasis::span(
        p,
        n,
        kernel.into_iter().map(|c| CycRationalElem::new(p, n, c).expect("row length")),
        format!("trace conditions over S_{n}^{sign}"),
    ))
}

/// `R^± = Q + Σ (orbit of ζ_{p^m})` over `1 <= m <= n` of the sign's parity.
pub fn r_space(p: u64, n: u32, sign: Sign) -> Result<SubspaceBasis> {
    if n == 0 {
        return Err(Error::BadIndex("need n >= 1".into()));
    }
    let parity = match sign {
        Sign::Plus => 0,
        Sign::Minus => 1,
    };
    let mut gens = vec![CycRationalElem::one(p, n)];
    for m in (1..=n).filter(|m| m % 2 == parity) {
        gens.extend(CycRationalElem::zeta_pow(p, m, 1).embed(n)?.orbit());
    }
    Ok(SubspaceBasis::span(p, n, gens, format!("Q + orbits of ζ_{{p^m}}, m {sign}-parity")))
}

/// Closed forms: `1 + Σ_{1<=m<=n/2} p^{2m-2}(p-1)^2` and
/// `p - 1 + Σ_{1<=m<=(n-1)/2} p^{2m-1}(p-1)^2`.
pub fn dim_formula(p: u64, n: u32, sign: Sign) -> u64 {
    let sq = (p - 1) * (p - 1);
    match sign {
        Sign::Plus => 1 + (1..=n / 2).map(|m| p.pow(2 * m - 2) * sq).sum::<u64>(),
        Sign::Minus => p - 1 + (1..=(n.saturating_sub(1)) / 2).map(|m| p.pow(2 * m - 1) * sq).sum::<u64>(),
    }
}

/// Dimension over `Q` of the elements of `Q[Δ][γ]/(γ^{p^{n-1}} - 1)` that are
/// divisible by `Φ_M(γ)` for every even `2 <= M < n` and have equal
/// `Δ`-row sums.
pub fn u_space_dim(p: u64, n: u32) -> Result<usize> {
    if n < 2 {
        return Err(Error::BadIndex("need n >= 2".into()));
    }
    let w = p.pow(n - 1) as usize;
    let rows_delta = (p - 1) as usize;
    let total = rows_delta * w;
    let mut constraints: Vec<Vec<BigRational>> = Vec::new();
    for big_m in omega_indices(n, Sign::Plus) {
        // coordinates of x^r mod Φ_{p^M}, for every r
        let images: Vec<Vec<BigRational>> = (0..w)
            .map(|r| CycRationalElem::zeta_pow(p, big_m, r as i64).into_coeffs())
            .collect();
        for sigma in 0..rows_delta {
            for pos in 0..totient_pm(p, big_m) {
                let mut row = vec![BigRational::zero(); total];
                for (r, img) in images.iter().enumerate() {
                    row[sigma * w + r] = img[pos].clone();
                }
                constraints.push(row);
            }
        }
    }
    for sigma in 1..rows_delta {
        let mut row = vec![BigRational::zero(); total];
        for r in 0..w {
            row[sigma * w + r] = BigRational::one();
            row[r] = -BigRational::one();
        }
        constraints.push(row);
    }
    Ok(total - rank(constraints, total))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimTable {
    pub p: u64,
    pub n: u32,
    #[serde(rename = "Qplus")]
    pub q_plus: usize,
    #[serde(rename = "Qminus")]
    pub q_minus: usize,
    #[serde(rename = "Rplus")]
    pub r_plus: usize,
    #[serde(rename = "Rminus")]
    pub r_minus: usize,
    /// Only defined for `n >= 2`.
    #[serde(rename = "Un")]
    pub u_n: Option<usize>,
    pub formula_plus: u64,
    pub formula_minus: u64,
    /// `Q^± = R^±` as subspaces.
    pub coincide_plus: bool,
    pub coincide_minus: bool,
    /// `dim(Q^+ ∩ Q^-)`.
    pub intersection: usize,
    pub total: usize,
}

pub fn dim_table(p: u64, n: u32) -> Result<DimTable> {
    let qp = plus_minus_space(p, n, Sign::Plus)?;
    let qm = plus_minus_space(p, n, Sign::Minus)?;
    let rp = r_space(p, n, Sign::Plus)?;
    let rm = r_space(p, n, Sign::Minus)?;
    Ok(DimTable {
        p,
        n,
        q_plus: qp.rank(),
        q_minus: qm.rank(),
        r_plus: rp.rank(),
        r_minus: rm.rank(),
        u_n: if n >= 2 { Some(u_space_dim(p, n)?) } else { None },
        formula_plus: dim_formula(p, n, Sign::Plus),
        formula_minus: dim_formula(p, n, Sign::Minus),
        coincide_plus: qp.same_space(&rp),
        coincide_minus: qm.same_space(&rm),
        intersection: qp.intersection_dim(&qm),
        total: totient_pm(p, n),
    })
}
