//! Weights of the affine Cartan subalgebra `h = span(h_0..h_l, d)`.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{AffineAlgebra, LoopElement};
use crate::cartan::{Gcm, GcmClass};
use crate::error::{KmxError, Result};
use crate::finite_lie::{cartan_inverse, fundamental_weights_finite, weight_on_coroot};
use crate::linalg::null_space;
use crate::scalar::{int, Rational, Scalar};

/// `Lambda = sum_i Lambda(h_i) Lambda_i + Lambda(d) delta`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Weight {
    #[serde(rename = "hValues", with = "crate::scalar::serde_rational_vec")]
    pub h_values: Vec<Rational>,
    #[serde(rename = "dValue", with = "crate::scalar::serde_rational")]
    pub d_value: Rational,
}

impl Weight {
    pub fn zero(nodes: usize) -> Weight {
        Weight { h_values: vec![Rational::zero(); nodes], d_value: Rational::zero() }
    }

    /// Fundamental weight `Lambda_j` (`Lambda_j(h_k) = delta_jk`, `Lambda_j(d) = 0`).
    pub fn fundamental(nodes: usize, j: usize) -> Weight {
        let mut w = Weight::zero(nodes);
        w.h_values[j] = Rational::one();
        w
    }

    pub fn from_ints(m: &[i64]) -> Weight {
        Weight { h_values: m.iter().map(|&x| int(x)).collect(), d_value: Rational::zero() }
    }

    pub fn add(&self, o: &Weight) -> Weight {
        Weight {
            h_values: self.h_values.iter().zip(&o.h_values).map(|(a, b)| a + b).collect(),
            d_value: &self.d_value + &o.d_value,
        }
    }

    pub fn scale(&self, s: &Rational) -> Weight {
        Weight {
            h_values: self.h_values.iter().map(|a| a * s).collect(),
            d_value: &self.d_value * s,
        }
    }

    /// Level `Lambda(c) = sum_i a_i^vee Lambda(h_i)`.
    pub fn level(&self, comarks: &[i64]) -> Rational {
        self.h_values.iter().zip(comarks).map(|(v, &a)| v * int(a)).sum()
    }

    /// Value on an element of the Cartan subalgebra (degree-0 `h` terms
    /// plus `c` and `d`).
    pub fn evaluate(&self, aff: &AffineAlgebra, x: &LoopElement) -> Result<Scalar> {
        let alg = aff.finite();
        let mut acc = Scalar::zero();
        for (&(deg, b), v) in x.terms() {
            match alg.kind(b) {
                crate::finite_lie::Basis::H(i) if deg == 0 => {
                    acc += &(v * &Scalar::from_rational(self.h_values[i + 1].clone()));
                }
                _ => {
                    return Err(KmxError::Rejected(format!(
                        "z^{deg} {} is not in the Cartan subalgebra",
                        alg.basis_name(b)
                    )))
                }
            }
        }
        acc += &(x.c_coeff() * &Scalar::from_rational(self.level(aff.comarks())));
        acc += &(x.d_coeff() * &Scalar::from_rational(self.d_value.clone()));
        Ok(acc)
    }
}

/// `delta` as a root-lattice vector `sum_i a_i alpha_i` together with its
/// values (`delta(h_i) = 0`, `delta(d) = 1`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Delta {
    pub marks: Vec<i64>,
    pub weight: Weight,
}

/// `delta` from the null vector of the affine matrix, and `Lambda_0`.
pub fn delta_and_lambda0(gcm: &Gcm) -> Result<(Delta, Weight)> {
    if gcm.class() != GcmClass::Affine {
        return Err(KmxError::Rejected(format!("{gcm} is not of Affine class")));
    }
    let n = gcm.n();
    let m: Vec<Vec<Rational>> =
        gcm.entries().iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
    let ns = null_space(&m, n);
    if ns.len() != 1 {
        return Err(KmxError::Rejected(format!(
            "null space of {gcm} has dimension {}, expected 1",
            ns.len()
        )));
    }
    let v = &ns[0];
    // Scale to the primitive positive integer vector.
    let lcm_den = v.iter().fold(num_bigint::BigInt::one(), |acc, x| {
        num_integer::Integer::lcm(&acc, x.denom())
    });
    let ints: Vec<num_bigint::BigInt> =
        v.iter().map(|x| (x * Rational::from_integer(lcm_den.clone())).to_integer()).collect();
    let g = ints.iter().fold(num_bigint::BigInt::zero(), |acc, x| num_integer::Integer::gcd(&acc, x));
    let sign = if ints.iter().any(|x| x.is_negative()) { -1 } else { 1 };
    let marks: Vec<i64> = ints
        .iter()
        .map(|x| {
            use num_traits::ToPrimitive;
            (x / &g).to_i64().unwrap() * sign
        })
        .collect();
    if marks.iter().any(|&a| a <= 0) {
        return Err(KmxError::Internal(format!("null vector of {gcm} is not positive")));
    }
    let mut dw = Weight::zero(n);
    dw.d_value = Rational::one();
    Ok((Delta { marks, weight: dw }, Weight::fundamental(n, 0)))
}

/// `Lambda_j = L_j + mu_j Lambda_0` with `L_j` the finite fundamental weight.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FundamentalWeight {
    /// Node index, `1..=l`.
    pub node: usize,
    /// `L_j` in simple-root coordinates.
    #[serde(with = "crate::scalar::serde_rational_vec")]
    pub finite_coords: Vec<Rational>,
    #[serde(with = "crate::scalar::serde_rational")]
    pub mu: Rational,
    pub weight: Weight,
}

/// `mu_j = -sum_k A_0k (A^-1)_kj`, with `Lambda_j(h_0)` obtained from
/// `L_j(h_0) = -L_j(H_gamma) = sum_k L_j^k A_0k` (since `L_j(c) = 0`).
pub fn fundamental_weights_affine(finite: &Gcm, a0: &[i64]) -> Result<Vec<FundamentalWeight>> {
    let l = finite.n();
    if a0.len() != l {
        return Err(KmxError::Rejected(format!(
            "affine row has {} entries, finite rank is {l}",
            a0.len()
        )));
    }
    let inv = cartan_inverse(finite)?;
    let fw = fundamental_weights_finite(finite)?;
    Ok((0..l)
        .map(|j| {
            let mu: Rational = -(0..l).map(|k| int(a0[k]) * &inv[k][j]).sum::<Rational>();
            let coords = fw[j].clone();
            let mut h_values = vec![Rational::zero(); l + 1];
            h_values[0] =
                coords.iter().zip(a0).map(|(c, &a)| c * int(a)).sum::<Rational>() + &mu;
            for k in 0..l {
                h_values[k + 1] = weight_on_coroot(finite, &coords, k);
            }
            FundamentalWeight {
                node: j + 1,
                finite_coords: coords,
                mu,
                weight: Weight { h_values, d_value: Rational::zero() },
            }
        })
        .collect())
}
