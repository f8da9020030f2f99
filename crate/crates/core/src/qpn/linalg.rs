//! Exact Gaussian elimination over `Q`.

use num_rational::BigRational;
use num_traits::{One, Zero};

/// Reduced row echelon form of a rational matrix.
#[derive(Debug, Clone)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<Vec<BigRational>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(rows: Vec<Vec<BigRational>>, ncols: usize) -> Self {
        let mut rows: Vec<Vec<BigRational>> = rows.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect();
        debug_assert!(rows.iter().all(|r| r.len() == ncols));
        let mut pivots = Vec::new();
        let mut top = 0;
        for col in 0..ncols {
            if top == rows.len() {
                break;
            }
            let Some(found) = (top..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
                continue;
            };
            rows.swap(top, found);
            let inv = rows[top][col].recip();
            for x in rows[top].iter_mut().skip(col) {
                *x *= &inv;
            }
            let pivot_row = rows[top].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i == top || row[col].is_zero() {
                    continue;
                }
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row).skip(col) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
            pivots.push(col);
            top += 1;
        }
        rows.truncate(top);
        Echelon { ncols, rows, pivots }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn rows(&self) -> &[Vec<BigRational>] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<Vec<BigRational>> {
        self.rows
    }

    /// Basis of `{x : A x = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<BigRational>> {
        let mut is_pivot = vec![None; self.ncols];
        for (i, &c) in self.pivots.iter().enumerate() {
            is_pivot[c] = Some(i);
        }
        (0..self.ncols)
            .filter(|&c| is_pivot[c].is_none())
            .map(|free| {
                let mut v = vec![BigRational::zero(); self.ncols];
                v[free] = BigRational::one();
                for (i, &c) in self.pivots.iter().enumerate() {
                    v[c] = -self.rows[i][free].clone();
                }
                v
            })
            .collect()
    }
}

pub fn rank(rows: Vec<Vec<BigRational>>, ncols: usize) -> usize {
    Echelon::new(rows, ncols).rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(x: i64) -> BigRational {
        BigRational::from_integer(x.into())
    }

    fn mat(rows: &[&[i64]]) -> Vec<Vec<BigRational>> {
        rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    #[test]
    fn rank_of_dependent_rows() {
        assert_eq!(rank(mat(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]), 3), 2);
        assert_eq!(rank(mat(&[&[0, 0], &[0, 0]]), 2), 0);
    }

    #[test]
    fn nullspace_vectors_are_annihilated() {
        let a = mat(&[&[1, 2, 3, 4], &[2, 4, 7, 9]]);
        let e = Echelon::new(a.clone(), 4);
        let ns = e.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for row in &a {
                let dot: BigRational = row.iter().zip(v).map(|(x, y)| x * y).sum();
                assert!(dot.is_zero());
            }
        }
    }
}
