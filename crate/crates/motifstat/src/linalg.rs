//! Dense exact-rational vectors and matrices.
//!
//! Desk-scale sizes only; plain Gaussian elimination over the rationals is
//! exact and fast enough here.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rat::Rat;

pub type RatVec = Vec<Rat>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMat {
    pub rows: Vec<RatVec>,
}

impl RatMat {
    pub fn zero(n: usize, m: usize) -> Self {
        RatMat {
            rows: vec![vec![Rat::zero(); m]; n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMat::zero(n, n);
        for i in 0..n {
            m.rows[i][i] = Rat::one();
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    /// Keeps the given rows and columns, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> RatMat {
        RatMat {
            rows: rows
                .iter()
                .map(|&r| cols.iter().map(|&c| self.rows[r][c].clone()).collect())
                .collect(),
        }
    }

    pub fn is_row_stochastic(&self) -> bool {
        self.rows.iter().all(|r| {
            r.iter().all(|x| *x >= Rat::zero())
                && r.iter().cloned().sum::<Rat>() == Rat::one()
        })
    }
}

/// Row vector times matrix.
pub fn vec_mat(v: &[Rat], m: &RatMat) -> RatVec {
    let mut out = vec![Rat::zero(); m.ncols()];
    for (i, vi) in v.iter().enumerate() {
        if vi.is_zero() {
            continue;
        }
        for (j, entry) in m.rows[i].iter().enumerate() {
            if !entry.is_zero() {
                out[j] += vi.clone() * entry.clone();
            }
        }
    }
    out
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.clone() * y.clone())
        .sum()
}

/// Solves `A x = b` by Gaussian elimination with exact arithmetic.
pub fn solve(a: &RatMat, b: &[Rat]) -> Result<RatVec> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::Config("solve: shape mismatch".to_string()));
    }
    let mut m: Vec<RatVec> = a
        .rows
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .ok_or(Error::NonAbsorbing)?;
        m.swap(col, pivot);
        let inv = m[col][col].clone();
        for j in col..=n {
            let v = m[col][j].clone() / inv.clone();
            m[col][j] = v;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in col..=n {
                    let v = m[r][j].clone() - f.clone() * m[col][j].clone();
                    m[r][j] = v;
                }
            }
        }
    }
    Ok(m.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn solves_small_system() {
        // x + y = 3, x - y = 1  =>  x = 2, y = 1
        let a = RatMat {
            rows: vec![
                vec![rat(1, 1), rat(1, 1)],
                vec![rat(1, 1), rat(-1, 1)],
            ],
        };
        let x = solve(&a, &[rat(3, 1), rat(1, 1)]).unwrap();
        assert_eq!(x, vec![rat(2, 1), rat(1, 1)]);
    }

    #[test]
    fn singular_system_is_an_error() {
        let a = RatMat {
            rows: vec![
                vec![rat(1, 1), rat(1, 1)],
                vec![rat(2, 1), rat(2, 1)],
            ],
        };
        assert!(solve(&a, &[rat(1, 1), rat(2, 1)]).is_err());
    }
}
