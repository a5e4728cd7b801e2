//! The Hermitian-symmetric split of `su(n,1)` and the matrix realization
//! of `A_n` on `C^(n+1)`.

use std::collections::BTreeSet;

use super::{Basis, Element, FiniteAlgebra};
use crate::catalog::finite_matrix;
use crate::cartan::Gcm;
use crate::error::{KmxError, Result};
use crate::scalar::Scalar;

/// Positive roots of `k` (compact) and `p+` (noncompact) for `su(n,1)` with
/// node 1 as the unique noncompact simple root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermitianSplit {
    pub compact_pos: BTreeSet<usize>,
    pub noncompact_pos: BTreeSet<usize>,
    /// 0-based node of the noncompact simple root.
    pub noncompact_simple: usize,
}

impl HermitianSplit {
    /// Sign of the compact or noncompact twist on root `r`: `-1` on `p+`.
    pub fn sign(&self, r: usize) -> i64 {
        if self.noncompact_pos.contains(&r) {
            -1
        } else {
            1
        }
    }
}

pub fn hermitian_split_su_n1(n: usize) -> Result<(FiniteAlgebra, HermitianSplit)> {
    if n < 1 {
        return Err(KmxError::Rejected("su(n,1) requires n >= 1".into()));
    }
    let alg = FiniteAlgebra::new(&Gcm::new(finite_matrix('A', n)?)?)?;
    let split = split_for(&alg, 0);
    Ok((alg, split))
}

/// Hermitian split of a type-A algebra with `node` noncompact: roots whose
/// coefficient on that node is 1 span `p+`.
pub fn split_for(alg: &FiniteAlgebra, node: usize) -> HermitianSplit {
    let (nc, c): (Vec<usize>, Vec<usize>) =
        (0..alg.num_positive()).partition(|&r| alg.positive_roots()[r].0[node] == 1);
    HermitianSplit {
        compact_pos: c.into_iter().collect(),
        noncompact_pos: nc.into_iter().collect(),
        noncompact_simple: node,
    }
}

pub type SquareMatrix = Vec<Vec<Scalar>>;

/// Defining representation of `A_n`: `e_i = E_(i-1,i)`, `f_i = E_(i,i-1)`,
/// `h_i = E_(i-1,i-1) - E_(i,i)` and the path brackets for the other roots.
#[derive(Clone, Debug)]
pub struct MatrixRealization {
    size: usize,
    images: Vec<SquareMatrix>,
}

fn zero_matrix(n: usize) -> SquareMatrix {
    vec![vec![Scalar::zero(); n]; n]
}

pub fn commutator(a: &SquareMatrix, b: &SquareMatrix) -> SquareMatrix {
    let n = a.len();
    let mut out = zero_matrix(n);
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() && b[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !a[i][k].is_zero() && !b[k][j].is_zero() {
                    out[i][j] += &(&a[i][k] * &b[k][j]);
                }
                if !b[i][k].is_zero() && !a[k][j].is_zero() {
                    out[i][j] -= &(&b[i][k] * &a[k][j]);
                }
            }
        }
    }
    out
}

impl MatrixRealization {
    pub fn new(alg: &FiniteAlgebra) -> Result<MatrixRealization> {
        let l = alg.rank();
        let gcm = alg.gcm();
        if gcm.entries() != finite_matrix('A', l)?.as_slice() {
            return Err(KmxError::Unsupported(
                "matrix realization is implemented for type A only".into(),
            ));
        }
        let size = l + 1;
        let mut images = vec![zero_matrix(size); alg.dim()];
        for i in 0..l {
            let mut h = zero_matrix(size);
            h[i][i] = Scalar::one();
            h[i + 1][i + 1] = Scalar::from_int(-1);
            images[alg.h(i)] = h;
            let mut e = zero_matrix(size);
            e[i][i + 1] = Scalar::one();
            images[alg.e(i)] = e;
            let mut f = zero_matrix(size);
            f[i + 1][i] = Scalar::one();
            images[alg.f(i)] = f;
        }
        for r in 0..alg.num_positive() {
            let Some(p) = alg.paths[r].as_ref() else { continue };
            let s = Scalar::from_ratio(1, p.scale);
            let e = commutator(&images[alg.e(p.node)], &images[alg.e_root(p.parent)]);
            images[alg.e_root(r)] = scale(&e, &s);
            let f = commutator(&images[alg.f(p.node)], &images[alg.f_root(p.parent)]);
            images[alg.f_root(r)] = scale(&f, &-s);
        }
        Ok(MatrixRealization { size, images })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn basis_matrix(&self, idx: usize) -> &SquareMatrix {
        &self.images[idx]
    }

    pub fn matrix_of(&self, x: &Element) -> SquareMatrix {
        let mut out = zero_matrix(self.size);
        for (b, c) in x {
            for (i, row) in self.images[*b].iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    if !v.is_zero() {
                        out[i][j] += &(c * v);
                    }
                }
            }
        }
        out
    }

    /// Inverse of [`Self::matrix_of`] on traceless matrices.
    pub fn element_of(&self, alg: &FiniteAlgebra, m: &SquareMatrix) -> Result<Element> {
        let n = self.size;
        let trace = crate::scalar::sum(m.iter().enumerate().map(|(i, r)| &r[i]));
        if !trace.is_zero() {
            return Err(KmxError::Rejected("matrix is not traceless".into()));
        }
        let mut out = Element::new();
        // Diagonal: D = sum_i c_i h_i with c_i = D_00 + .. + D_(i-1,i-1).
        let mut acc = Scalar::zero();
        for i in 0..n - 1 {
            acc += &m[i][i];
            if !acc.is_zero() {
                out.insert(alg.h(i), acc.clone());
            }
        }
        for (b, img) in self.images.iter().enumerate() {
            if matches!(alg.kind(b), Basis::H(_)) {
                continue;
            }
            let (i, j) = single_entry(img).expect("root vectors are matrix units");
            let v = &m[i][j];
            if !v.is_zero() {
                out.insert(b, v.checked_div(&img[i][j])?);
            }
        }
        Ok(out)
    }

    /// Whether the matrix of `x` is upper triangular.
    pub fn is_upper_triangular(&self, x: &Element) -> bool {
        let m = self.matrix_of(x);
        (0..self.size).all(|i| (0..i).all(|j| m[i][j].is_zero()))
    }
}

fn scale(m: &SquareMatrix, s: &Scalar) -> SquareMatrix {
    m.iter().map(|r| r.iter().map(|v| v * s).collect()).collect()
}

fn single_entry(m: &SquareMatrix) -> Option<(usize, usize)> {
    let mut found = None;
    for (i, r) in m.iter().enumerate() {
        for (j, v) in r.iter().enumerate() {
            if !v.is_zero() {
                if found.is_some() {
                    return None;
                }
                found = Some((i, j));
            }
        }
    }
    found
}

/// Conjugate transpose twisted by `S = diag(1, -1, .., -1)`: the
/// anti-involution `X -> S X^* S` of `su(n,1)`.
pub fn su_n1_star(m: &SquareMatrix) -> SquareMatrix {
    let n = m.len();
    let s = |i: usize| if i == 0 { 1 } else { -1 };
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v = m[j][i].conj();
                    if s(i) * s(j) < 0 {
                        -v
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect()
}

pub fn is_zero_matrix(m: &SquareMatrix) -> bool {
    m.iter().all(|r| r.iter().all(|v| v.is_zero()))
}
