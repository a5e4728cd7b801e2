//! Positivity verdicts for Hermitian matrices.
//!
//! Symmetric (congruence) elimination `A = T^* M T` with diagonal pivoting.
//! A negative pivot, or a zero diagonal with a nonzero off-diagonal entry,
//! yields an explicit vector `x` with `x^* M x < 0`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{KmxError, Result};
use crate::linalg::null_space;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Verdict {
    PositiveDefinite,
    PositiveSemidefinite { rank: usize },
    /// `value = x^* M x < 0` for `x = witness`.
    Indefinite { witness: Vec<Scalar>, value: Scalar },
}

impl Verdict {
    pub fn is_psd(&self) -> bool {
        !matches!(self, Verdict::Indefinite { .. })
    }

    pub fn label(&self) -> String {
        match self {
            Verdict::PositiveDefinite => "pos-def".into(),
            Verdict::PositiveSemidefinite { rank } => format!("psd rank {rank}"),
            Verdict::Indefinite { .. } => "INDEFINITE".into(),
        }
    }
}

pub fn is_hermitian(m: &[Vec<Scalar>]) -> bool {
    let n = m.len();
    m.iter().all(|r| r.len() == n)
        && (0..n).all(|i| (i..n).all(|j| m[i][j].approx_eq(&m[j][i].conj())))
}

/// `x^* M x`.
pub fn quadratic_form(m: &[Vec<Scalar>], x: &[Scalar]) -> Scalar {
    let mut acc = Scalar::zero();
    for (i, row) in m.iter().enumerate() {
        if x[i].is_zero() {
            continue;
        }
        let xi = x[i].conj();
        for (j, v) in row.iter().enumerate() {
            if !x[j].is_zero() && !v.is_zero() {
                acc += &(&(&xi * v) * &x[j]);
            }
        }
    }
    acc
}

fn indefinite(m: &[Vec<Scalar>], x: Vec<Scalar>) -> Result<Verdict> {
    let value = quadratic_form(m, &x);
    if value.real_sign() != Some(Ordering::Less) {
        return Err(KmxError::Internal(format!("witness check failed: x*Mx = {value}")));
    }
    Ok(Verdict::Indefinite { witness: x, value })
}

pub fn psd_verdict(m: &[Vec<Scalar>]) -> Result<Verdict> {
    if !is_hermitian(m) {
        return Err(KmxError::Rejected("matrix is not Hermitian".into()));
    }
    let n = m.len();
    let mut a: Vec<Vec<Scalar>> = m.to_vec();
    // Columns of t are the current basis vectors.
    let mut t: Vec<Vec<Scalar>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { Scalar::one() } else { Scalar::zero() }).collect())
        .collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut rank = 0;
    while !active.is_empty() {
        let mut best: Option<usize> = None;
        for &k in &active {
            match a[k][k].real_sign() {
                Some(Ordering::Less) => return indefinite(m, t[k].clone()),
                Some(Ordering::Greater) => {
                    let better = match best {
                        None => true,
                        Some(b) => {
                            !a[k][k].is_exact() && a[k][k].to_complex().re > a[b][b].to_complex().re
                        }
                    };
                    if better {
                        best = Some(k);
                    }
                }
                Some(Ordering::Equal) => {}
                None => return Err(KmxError::Internal("non-real diagonal entry".into())),
            }
        }
        let Some(k) = best else {
            // Every remaining diagonal entry vanishes.
            for &i in &active {
                for &j in &active {
                    if i != j && !a[i][j].is_zero() {
                        let s = -a[i][j].conj();
                        let x: Vec<Scalar> =
                            (0..n).map(|r| &t[i][r] + &(&s * &t[j][r])).collect();
                        return indefinite(m, x);
                    }
                }
            }
            break;
        };
        active.retain(|&i| i != k);
        rank += 1;
        let pivot = a[k][k].clone();
        let inv = pivot.inv()?;
        let coeffs: Vec<(usize, Scalar)> =
            active.iter().map(|&j| (j, &a[k][j] * &inv)).collect();
        for &(j, ref cj) in &coeffs {
            for r in 0..n {
                let v = &t[k][r] * cj;
                t[j][r] -= &v;
            }
        }
        for &i in &active {
            for &j in &active {
                let v = &(&a[i][k] * &a[k][j]) * &inv;
                a[i][j] -= &v;
            }
        }
        for &i in &active {
            a[i][k] = Scalar::zero();
            a[k][i] = Scalar::zero();
        }
    }
    Ok(if rank == n {
        Verdict::PositiveDefinite
    } else {
        Verdict::PositiveSemidefinite { rank }
    })
}

/// Null-space basis `{x : M x = 0}`.
pub fn kernel_basis(m: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let n = m.len();
    null_space(&m.to_vec(), n)
}
