//! Exact linear algebra over the rationals.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::{Error, Result};

pub type Matrix = Vec<Vec<BigRational>>;

/// Solves `A x = b` by Gaussian elimination; a non-invertible `A` is an error.
pub fn solve(mut a: Matrix, mut b: Vec<BigRational>) -> Result<Vec<BigRational>> {
    let n = a.len();
    assert_eq!(b.len(), n, "right-hand side has the wrong length");
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(Error::SingularSystem)?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip();
        for x in &mut a[col][col..] {
            *x = &*x * &inv;
        }
        b[col] = &b[col] * &inv;
        let (head, tail) = a.split_at_mut(col + 1);
        let pivot_row = &head[col];
        for (offset, row) in tail.iter_mut().enumerate() {
            let factor = row[col].clone();
            if factor.is_zero() {
                continue;
            }
            for j in col..n {
                row[j] -= &factor * &pivot_row[j];
            }
            let r = col + 1 + offset;
            let delta = &factor * &b[col];
            b[r] -= delta;
        }
    }
    for col in (0..n).rev() {
        let mut acc = b[col].clone();
        for j in col + 1..n {
            acc -= &a[col][j] * &b[j];
        }
        b[col] = acc;
    }
    Ok(b)
}

/// `M = P L D Lᵀ Pᵀ` with `L` unit lower triangular and `D ≥ 0`; `order[i]` is
/// the original index eliminated at step `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LdlFactorization {
    pub order: Vec<usize>,
    pub l: Matrix,
    pub d: Vec<BigRational>,
}

impl LdlFactorization {
    /// Multiplies the factors back out, in the original index order.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.d.len();
        let mut m = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = BigRational::zero();
                for k in 0..=i.min(j) {
                    acc += &self.l[i][k] * &self.d[k] * &self.l[j][k];
                }
                m[self.order[i]][self.order[j]] = acc;
            }
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PsdOutcome {
    Psd(LdlFactorization),
    /// A vector `v` with `vᵀ M v < 0`.
    NotPsd(Vec<BigRational>),
}

impl PsdOutcome {
    pub fn is_psd(&self) -> bool {
        matches!(self, PsdOutcome::Psd(_))
    }
}

/// `vᵀ M v`.
pub fn quadratic_form(m: &Matrix, v: &[BigRational]) -> BigRational {
    let mut acc = BigRational::zero();
    for (i, row) in m.iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            acc += &v[i] * entry * &v[j];
        }
    }
    acc
}

/// Decides positive semidefiniteness of a symmetric rational matrix by
/// symmetric pivoted LDLᵀ, choosing the largest remaining diagonal entry.
pub fn ldlt_psd(m: &Matrix) -> PsdOutcome {
    let n = m.len();
    let mut schur = m.clone();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut order = Vec::with_capacity(n);
    // Column of the Schur complement at each elimination step, indexed by original index.
    let mut columns: Vec<Vec<BigRational>> = Vec::with_capacity(n);
    let mut d = Vec::with_capacity(n);

    while !remaining.is_empty() {
        let (pos, &p) = remaining
            .iter()
            .enumerate()
            .max_by(|(_, &i), (_, &j)| schur[i][i].cmp(&schur[j][j]).then(j.cmp(&i)))
            .unwrap();
        let pivot = schur[p][p].clone();
        if pivot.is_negative() {
            let mut y = vec![BigRational::zero(); n];
            y[p] = BigRational::from_integer(1.into());
            return PsdOutcome::NotPsd(lift_witness(&order, &columns, &d, &remaining, y));
        }
        if pivot.is_zero() {
            // Every remaining diagonal entry is zero; PSD needs the block to vanish.
            for &i in &remaining {
                for &j in &remaining {
                    if !schur[i][j].is_zero() {
                        let mut y = vec![BigRational::zero(); n];
                        y[i] = BigRational::from_integer(1.into());
                        y[j] = if schur[i][j].is_positive() {
                            BigRational::from_integer((-1).into())
                        } else {
                            BigRational::from_integer(1.into())
                        };
                        return PsdOutcome::NotPsd(lift_witness(
                            &order, &columns, &d, &remaining, y,
                        ));
                    }
                }
            }
            for &i in &remaining {
                let mut col = vec![BigRational::zero(); n];
                col[i] = BigRational::from_integer(1.into());
                order.push(i);
                columns.push(col);
                d.push(BigRational::zero());
            }
            remaining.clear();
            break;
        }
        remaining.remove(pos);
        let col: Vec<BigRational> = (0..n)
            .map(|i| {
                if i == p || remaining.contains(&i) {
                    schur[i][p].clone()
                } else {
                    BigRational::zero()
                }
            })
            .collect();
        for &i in &remaining {
            for &j in &remaining {
                let delta = &col[i] * &col[j] / &pivot;
                schur[i][j] -= delta;
            }
        }
        order.push(p);
        columns.push(col);
        d.push(pivot);
    }

    let l = (0..n)
        .map(|i| {
            (0..n)
                .map(|k| {
                    if k > i {
                        BigRational::zero()
                    } else if d[k].is_zero() {
                        if k == i {
                            BigRational::from_integer(1.into())
                        } else {
                            BigRational::zero()
                        }
                    } else {
                        &columns[k][order[i]] / &d[k]
                    }
                })
                .collect()
        })
        .collect();
    PsdOutcome::Psd(LdlFactorization { order, l, d })
}

/// Extends a witness on the remaining block to a full vector by choosing the
/// eliminated coordinates that minimize the quadratic form, so that
/// `vᵀ M v = yᵀ S y` for the current Schur complement `S`.
fn lift_witness(
    order: &[usize],
    columns: &[Vec<BigRational>],
    d: &[BigRational],
    remaining: &[usize],
    mut v: Vec<BigRational>,
) -> Vec<BigRational> {
    let mut later: Vec<usize> = remaining.to_vec();
    for step in (0..order.len()).rev() {
        let p = order[step];
        let mut acc = BigRational::zero();
        for &j in &later {
            acc += &columns[step][j] * &v[j];
        }
        v[p] = -acc / &d[step];
        later.push(p);
    }
    v
}
