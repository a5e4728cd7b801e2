//! Diagram automorphisms `Psi` induced by Dynkin-diagram symmetries.

use super::{Element, FiniteAlgebra};
use crate::error::{KmxError, Result};
use crate::scalar::Scalar;

/// `Psi(e_i) = e_perm(i)`, `Psi(f_i) = f_perm(i)`, `Psi(h_i) = h_perm(i)`,
/// extended to every root vector through its bracket path.
#[derive(Clone, Debug)]
pub struct DiagramAutomorphism {
    perm: Vec<usize>,
    order: usize,
    images: Vec<Element>,
}

fn perm_order(perm: &[usize]) -> usize {
    let n = perm.len();
    let mut cur: Vec<usize> = (0..n).collect();
    for k in 1..=n.max(1) * 6 {
        cur = cur.iter().map(|&i| perm[i]).collect();
        if cur.iter().enumerate().all(|(i, &j)| i == j) {
            return k;
        }
    }
    unreachable!("permutation order is bounded")
}

impl DiagramAutomorphism {
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Image of basis element `idx`.
    pub fn image(&self, idx: usize) -> &Element {
        &self.images[idx]
    }

    pub fn apply(&self, x: &Element) -> Element {
        let mut out = Element::new();
        for (b, c) in x {
            for (k, v) in &self.images[*b] {
                *out.entry(*k).or_default() += &(c * v);
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// Checks `Psi^order = id` on every basis element.
    pub fn check_power_identity(&self, alg: &FiniteAlgebra) -> bool {
        (0..alg.dim()).all(|b| {
            let mut x = alg.basis_element(b);
            for _ in 0..self.order {
                x = self.apply(&x);
            }
            x == alg.basis_element(b)
        })
    }

    /// Checks `Psi[x, y] = [Psi x, Psi y]` on all basis pairs.
    pub fn check_homomorphism(&self, alg: &FiniteAlgebra) -> bool {
        let dim = alg.dim();
        (0..dim).all(|a| {
            (0..dim).all(|b| {
                let xy = alg.bracket(&alg.basis_element(a), &alg.basis_element(b));
                self.apply(&xy) == alg.bracket(&self.images[a], &self.images[b])
            })
        })
    }
}

/// Builds `Psi` for a node permutation that is a diagram symmetry of exact
/// order `q`.
pub fn diagram_automorphism(
    alg: &FiniteAlgebra,
    perm: &[usize],
    q: usize,
) -> Result<DiagramAutomorphism> {
    let l = alg.rank();
    if perm.len() != l {
        return Err(KmxError::Rejected(format!(
            "permutation has {} entries, algebra has rank {l}",
            perm.len()
        )));
    }
    let mut sorted = perm.to_vec();
    sorted.sort_unstable();
    if sorted != (0..l).collect::<Vec<_>>() {
        return Err(KmxError::Rejected("node map is not a permutation".into()));
    }
    let gcm = alg.gcm();
    for i in 0..l {
        for j in 0..l {
            if gcm.get(perm[i], perm[j]) != gcm.get(i, j) {
                return Err(KmxError::Rejected(format!(
                    "permutation is not a diagram symmetry: A[{}][{}] != A[{}][{}]",
                    perm[i] + 1,
                    perm[j] + 1,
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    if !(2..=3).contains(&q) {
        return Err(KmxError::Rejected(format!("automorphism order must be 2 or 3, got {q}")));
    }
    let ord = perm_order(perm);
    if ord != q {
        return Err(KmxError::Rejected(format!(
            "permutation has order {ord}, requested order {q}"
        )));
    }

    let dim = alg.dim();
    let mut images: Vec<Element> = vec![Element::new(); dim];
    for i in 0..l {
        images[alg.h(i)] = alg.basis_element(alg.h(perm[i]));
        images[alg.e(i)] = alg.basis_element(alg.e(perm[i]));
        images[alg.f(i)] = alg.basis_element(alg.f(perm[i]));
    }
    for r in 0..alg.num_positive() {
        let Some(path) = alg.paths[r].as_ref() else { continue };
        let scale = Scalar::from_ratio(1, path.scale);
        let j = perm[path.node];
        let e_img = alg.bracket(&alg.basis_element(alg.e(j)), &images[alg.e_root(path.parent)]);
        images[alg.e_root(r)] = e_img.into_iter().map(|(k, v)| (k, &v * &scale)).collect();
        let f_img = alg.bracket(&alg.basis_element(alg.f(j)), &images[alg.f_root(path.parent)]);
        images[alg.f_root(r)] = f_img.into_iter().map(|(k, v)| (k, -(&v * &scale))).collect();
    }
    Ok(DiagramAutomorphism { perm: perm.to_vec(), order: q, images })
}
