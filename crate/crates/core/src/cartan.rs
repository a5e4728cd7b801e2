//! Generalized Cartan matrices: validation, three-way classification and
//! symmetrization.
//!
//! Entries follow the convention `A[j][k] = alpha_k(h_j)`, so row `j`
//! records how the simple coroot `h_j` pairs with every simple root.

use std::collections::VecDeque;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{KmxError, Result};
use crate::linalg::det_bareiss;
use crate::scalar::{int, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GcmClass {
    Finite,
    Affine,
    Indefinite,
}

impl fmt::Display for GcmClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GcmClass::Finite => "Finite",
            GcmClass::Affine => "Affine",
            GcmClass::Indefinite => "Indefinite",
        };
        f.write_str(s)
    }
}

/// Axioms a)-c) of a generalized Cartan matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axiom {
    /// a) `A_ii = 2`.
    Diagonal,
    /// b) off-diagonal entries are zero or negative integers.
    OffDiagonal,
    /// c) `A_ij = 0` iff `A_ji = 0`.
    ZeroPattern,
}

impl Axiom {
    pub fn label(&self) -> &'static str {
        match self {
            Axiom::Diagonal => "a) A_ii = 2",
            Axiom::OffDiagonal => "b) A_ij is zero or a negative integer for i != j",
            Axiom::ZeroPattern => "c) A_ij = 0 if and only if A_ji = 0",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: Axiom,
    /// 1-based row index.
    pub row: usize,
    /// 1-based column index.
    pub col: usize,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "axiom {} violated at ({},{})", self.axiom.label(), self.row, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GcmRejection {
    NotSquare,
    Empty,
    Violations(Vec<Violation>),
}

impl fmt::Display for GcmRejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GcmRejection::NotSquare => f.write_str("matrix is not square"),
            GcmRejection::Empty => f.write_str("matrix is empty"),
            GcmRejection::Violations(v) => {
                let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
                f.write_str(&parts.join("; "))
            }
        }
    }
}

impl From<GcmRejection> for KmxError {
    fn from(r: GcmRejection) -> Self {
        KmxError::Rejected(r.to_string())
    }
}

/// A validated generalized Cartan matrix together with its class.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gcm {
    entries: Vec<Vec<i64>>,
    class: GcmClass,
}

impl Gcm {
    pub fn new(entries: Vec<Vec<i64>>) -> std::result::Result<Self, GcmRejection> {
        validate_gcm(&entries)
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }

    pub fn class(&self) -> GcmClass {
        self.class
    }

    /// Simultaneous row/column relabeling: entry `(i,j)` of the result is
    /// entry `(perm[i], perm[j])` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Gcm {
        let n = self.n();
        let entries = (0..n)
            .map(|i| (0..n).map(|j| self.entries[perm[i]][perm[j]]).collect())
            .collect();
        Gcm::new(entries).expect("relabeling preserves the axioms")
    }
}

impl fmt::Display for Gcm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .entries
            .iter()
            .map(|r| format!("[{}]", r.iter().map(i64::to_string).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

/// Checks axioms a)-c) and classifies a valid matrix.
pub fn validate_gcm(m: &[Vec<i64>]) -> std::result::Result<Gcm, GcmRejection> {
    let n = m.len();
    if n == 0 {
        return Err(GcmRejection::Empty);
    }
    if m.iter().any(|r| r.len() != n) {
        return Err(GcmRejection::NotSquare);
    }
    let mut violations = Vec::new();
    for i in 0..n {
        if m[i][i] != 2 {
            violations.push(Violation { axiom: Axiom::Diagonal, row: i + 1, col: i + 1 });
        }
        for j in 0..n {
            if i == j {
                continue;
            }
            if m[i][j] > 0 {
                violations.push(Violation { axiom: Axiom::OffDiagonal, row: i + 1, col: j + 1 });
            }
            if (m[i][j] == 0) != (m[j][i] == 0) && m[i][j] != 0 {
                violations.push(Violation { axiom: Axiom::ZeroPattern, row: i + 1, col: j + 1 });
            }
        }
    }
    if !violations.is_empty() {
        return Err(GcmRejection::Violations(violations));
    }
    let class = classify_entries(m);
    Ok(Gcm { entries: m.to_vec(), class })
}

fn minor(m: &[Vec<i64>], idx: &[usize]) -> num_bigint::BigInt {
    let sub: Vec<Vec<i64>> = idx.iter().map(|&i| idx.iter().map(|&j| m[i][j]).collect()).collect();
    det_bareiss(&sub)
}

fn classify_entries(m: &[Vec<i64>]) -> GcmClass {
    let n = m.len();
    let full: Vec<usize> = (0..n).collect();
    let det = minor(m, &full);
    let proper_positive = (1u64..(1u64 << n) - 1).all(|mask| {
        let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        minor(m, &idx).is_positive()
    });
    if !proper_positive {
        GcmClass::Indefinite
    } else if det.is_positive() {
        GcmClass::Finite
    } else if det.is_zero() {
        GcmClass::Affine
    } else {
        GcmClass::Indefinite
    }
}

/// Finite iff every principal minor (not only the leading ones) is positive;
/// affine iff the determinant vanishes and every proper principal minor is
/// positive.
pub fn classify(m: &Gcm) -> GcmClass {
    m.class
}

/// Leading principal minors of orders `1..=n`.
pub fn principal_minors(m: &Gcm) -> Vec<Rational> {
    (1..=m.n())
        .map(|k| {
            let idx: Vec<usize> = (0..k).collect();
            Rational::from_integer(minor(m.entries(), &idx))
        })
        .collect()
}

/// Positive vector `d` with `diag(d) * A` symmetric.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Symmetrizer {
    #[serde(with = "crate::scalar::serde_rational_vec")]
    pub d: Vec<Rational>,
}

impl Symmetrizer {
    /// Symmetrized entry `d_i * A_ij`.
    pub fn symmetric_entry(&self, a: &Gcm, i: usize, j: usize) -> Rational {
        &self.d[i] * int(a.get(i, j))
    }
}

/// Solves `d_i A_ij = d_j A_ji` along the Dynkin graph, one connected
/// component at a time, and scales each component so its smallest entry is 1.
pub fn symmetrize(m: &Gcm) -> Result<Symmetrizer> {
    let n = m.n();
    let mut d: Vec<Option<Rational>> = vec![None; n];
    for start in 0..n {
        if d[start].is_some() {
            continue;
        }
        let mut component = vec![start];
        d[start] = Some(Rational::one());
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                if i == j || m.get(i, j) == 0 {
                    continue;
                }
                let di = d[i].clone().unwrap();
                let want = &di * int(m.get(i, j)) / int(m.get(j, i));
                match &d[j] {
                    None => {
                        d[j] = Some(want);
                        component.push(j);
                        queue.push_back(j);
                    }
                    Some(dj) if *dj != want => {
                        return Err(KmxError::Rejected(format!(
                            "matrix {m} is not symmetrizable (inconsistent cycle through nodes {} and {})",
                            i + 1,
                            j + 1
                        )))
                    }
                    Some(_) => {}
                }
            }
        }
        let min = component.iter().map(|&i| d[i].clone().unwrap()).min().unwrap();
        for &i in &component {
            d[i] = Some(d[i].take().unwrap() / &min);
        }
    }
    let d: Vec<Rational> = d.into_iter().map(Option::unwrap).collect();
    if d.iter().any(|x| !x.is_positive()) {
        return Err(KmxError::Rejected(format!(
            "matrix {m} has no positive symmetrizer"
        )));
    }
    Ok(Symmetrizer { d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn g(m: &[&[i64]]) -> Gcm {
        Gcm::new(m.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn validation_examples() {
        assert!(Gcm::new(vec![vec![2]]).is_ok());
        assert!(Gcm::new(vec![vec![2, -2], vec![-2, 2]]).is_ok());
        match Gcm::new(vec![vec![2, -1], vec![0, 2]]) {
            Err(GcmRejection::Violations(v)) => {
                assert_eq!(v, vec![Violation { axiom: Axiom::ZeroPattern, row: 1, col: 2 }]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(Gcm::new(vec![vec![2, -1]]), Err(GcmRejection::NotSquare));
        match Gcm::new(vec![vec![3, 1], vec![1, 2]]) {
            Err(GcmRejection::Violations(v)) => {
                assert!(v.iter().any(|x| x.axiom == Axiom::Diagonal));
                assert!(v.iter().any(|x| x.axiom == Axiom::OffDiagonal));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify(&g(&[&[2, -1], &[-1, 2]])), GcmClass::Finite);
        assert_eq!(classify(&g(&[&[2, -2], &[-2, 2]])), GcmClass::Affine);
        assert_eq!(classify(&g(&[&[2, -3], &[-3, 2]])), GcmClass::Indefinite);
        // Leading minors of this relabeled matrix are positive but the
        // principal minor on nodes {1,3} is not.
        let m = g(&[&[2, -1, -3], &[-1, 2, 0], &[-3, 0, 2]]);
        assert_eq!(classify(&m), GcmClass::Indefinite);
    }

    #[test]
    fn leading_minors() {
        assert_eq!(principal_minors(&g(&[&[2]])), vec![int(2)]);
        assert_eq!(principal_minors(&g(&[&[2, -1], &[-1, 2]])), vec![int(2), int(3)]);
        assert_eq!(principal_minors(&g(&[&[2, -2], &[-2, 2]])), vec![int(2), int(0)]);
    }

    #[test]
    fn symmetrizer_examples() {
        assert_eq!(symmetrize(&g(&[&[2, -1], &[-1, 2]])).unwrap().d, vec![int(1), int(1)]);
        assert_eq!(symmetrize(&g(&[&[2, -1], &[-3, 2]])).unwrap().d, vec![int(3), int(1)]);
        assert_eq!(symmetrize(&g(&[&[2, -2], &[-1, 2]])).unwrap().d, vec![int(1), int(2)]);
        let bad = g(&[&[2, -1, -1], &[-2, 2, -1], &[-1, -1, 2]]);
        assert!(symmetrize(&bad).is_err());
        let disconnected = g(&[&[2, 0, 0], &[0, 2, -1], &[0, -3, 2]]);
        assert_eq!(symmetrize(&disconnected).unwrap().d, vec![int(1), int(3), int(1)]);
        let _ = rat(1, 2);
    }

    #[test]
    fn symmetric_entries_are_symmetric() {
        for m in [
            g(&[&[2, -1, 0], &[-2, 2, -1], &[0, -1, 2]]),
            g(&[&[2, -1], &[-3, 2]]),
            g(&[&[2, -4], &[-1, 2]]),
        ] {
            let s = symmetrize(&m).unwrap();
            for i in 0..m.n() {
                for j in 0..m.n() {
                    assert_eq!(s.symmetric_entry(&m, i, j), s.symmetric_entry(&m, j, i));
                }
            }
        }
    }
}
