//! The untwisted affine algebra `C c + C d + sum_j z^j (x) g`.
//!
//! Node 0 is the affine node; node `i >= 1` is finite node `i - 1`.
//!
//! ```text
//! [z^j a, z^k b] = z^(j+k) [a, b] + j delta_(j,-k) (a, b) c
//! [d, z^j a] = j z^j a          c central
//! ```
//!
//! with `( , )` the invariant form normalized by `(gamma, gamma) = 2`.

pub mod membership;
pub mod twist;
pub mod weights;

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::cartan::{Gcm, GcmClass};
use crate::error::{KmxError, Result};
use crate::finite_lie::{Element, FiniteAlgebra};
use crate::scalar::{scalar_from_json, Scalar, DEFAULT_EPSILON};

pub use membership::{in_exceptional_parabolic, in_natural_parabolic, in_standard_borel};
pub use twist::{twisted_decomposition, Cyclo, TwistedDecomposition};
pub use weights::{delta_and_lambda0, fundamental_weights_affine, Delta, FundamentalWeight, Weight};

/// Element of the affine algebra: loop terms keyed by `(degree, basis)`
/// plus the coefficients of `c` and `d`. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LoopElement {
    terms: BTreeMap<(i64, usize), Scalar>,
    c: Scalar,
    d: Scalar,
}

impl LoopElement {
    pub fn zero() -> LoopElement {
        LoopElement::default()
    }

    /// `coeff * z^deg (x) b`.
    pub fn term(deg: i64, basis: usize, coeff: Scalar) -> LoopElement {
        let mut x = LoopElement::zero();
        x.add_term(deg, basis, coeff);
        x
    }

    pub fn from_finite(deg: i64, x: &Element) -> LoopElement {
        let mut out = LoopElement::zero();
        for (b, v) in x {
            out.add_term(deg, *b, v.clone());
        }
        out
    }

    pub fn central(coeff: Scalar) -> LoopElement {
        LoopElement { c: coeff, ..LoopElement::zero() }
    }

    pub fn derivation(coeff: Scalar) -> LoopElement {
        LoopElement { d: coeff, ..LoopElement::zero() }
    }

    pub fn terms(&self) -> &BTreeMap<(i64, usize), Scalar> {
        &self.terms
    }

    pub fn c_coeff(&self) -> &Scalar {
        &self.c
    }

    pub fn d_coeff(&self) -> &Scalar {
        &self.d
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.c.is_zero() && self.d.is_zero()
    }

    pub fn add_term(&mut self, deg: i64, basis: usize, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        let key = (deg, basis);
        let e = self.terms.entry(key).or_default();
        *e += &coeff;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add_assign_scaled(&mut self, s: &Scalar, x: &LoopElement) {
        for (&(deg, b), v) in &x.terms {
            self.add_term(deg, b, s * v);
        }
        self.c += &(s * &x.c);
        self.d += &(s * &x.d);
    }

    pub fn add(&self, x: &LoopElement) -> LoopElement {
        let mut out = self.clone();
        out.add_assign_scaled(&Scalar::one(), x);
        out
    }

    pub fn sub(&self, x: &LoopElement) -> LoopElement {
        let mut out = self.clone();
        out.add_assign_scaled(&Scalar::from_int(-1), x);
        out
    }

    pub fn scale(&self, s: &Scalar) -> LoopElement {
        let mut out = LoopElement::zero();
        out.add_assign_scaled(s, self);
        out
    }

    /// Degree-`deg` slice as a finite-algebra element.
    pub fn slice(&self, deg: i64) -> Element {
        self.terms
            .range((deg, 0)..=(deg, usize::MAX))
            .map(|(&(_, b), v)| (b, v.clone()))
            .collect()
    }

    pub fn degrees(&self) -> Vec<i64> {
        let mut v: Vec<i64> = self.terms.keys().map(|k| k.0).collect();
        v.dedup();
        v
    }

    pub fn to_json(&self, alg: &FiniteAlgebra) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(&(deg, b), v)| json!({"deg": deg, "elem": alg.basis_name(b), "coeff": v}))
            .collect();
        json!({"terms": terms, "c": self.c, "d": self.d})
    }

    pub fn from_json(alg: &FiniteAlgebra, v: &Value) -> Result<LoopElement> {
        let bad = |m: &str| KmxError::Parse(format!("loop element: {m}"));
        let mut out = LoopElement::zero();
        if let Some(terms) = v.get("terms") {
            for t in terms.as_array().ok_or_else(|| bad("terms must be a list"))? {
                let deg = t.get("deg").and_then(Value::as_i64).ok_or_else(|| bad("missing deg"))?;
                let elem = t.get("elem").and_then(Value::as_str).ok_or_else(|| bad("missing elem"))?;
                let coeff = scalar_from_json(
                    t.get("coeff").ok_or_else(|| bad("missing coeff"))?,
                    DEFAULT_EPSILON,
                )?;
                out.add_term(deg, alg.parse_basis_name(elem)?, coeff);
            }
        }
        for (key, slot) in [("c", &mut out.c), ("d", &mut out.d)] {
            if let Some(x) = v.get(key) {
                *slot = scalar_from_json(x, DEFAULT_EPSILON)?;
            }
        }
        Ok(out)
    }
}

/// Chevalley generators `e_i, f_i, h_i` for `i = 0..=l`.
#[derive(Clone, Debug)]
pub struct AffineGenerators {
    pub e: Vec<LoopElement>,
    pub f: Vec<LoopElement>,
    pub h: Vec<LoopElement>,
}

#[derive(Clone, Debug)]
pub struct AffineAlgebra {
    finite: FiniteAlgebra,
    gcm: Gcm,
    gens: AffineGenerators,
    marks: Vec<i64>,
    comarks: Vec<i64>,
}

/// Extended matrix with `alpha_0 = delta - gamma`:
/// `A_0k = -alpha_k(H_gamma)`, `A_k0 = -gamma(h_k)`.
pub fn affine_matrix(alg: &FiniteAlgebra) -> Vec<Vec<i64>> {
    let l = alg.rank();
    let gcm = alg.gcm();
    let gamma = alg.highest_root();
    let hg = alg.coroot(alg.highest_root_index());
    let mut m = vec![vec![0; l + 1]; l + 1];
    m[0][0] = 2;
    for k in 0..l {
        m[0][k + 1] = -(0..l).map(|j| hg[j] * gcm.get(j, k)).sum::<i64>();
        m[k + 1][0] = -gamma.pair_coroot(gcm, k);
        for j in 0..l {
            m[j + 1][k + 1] = gcm.get(j, k);
        }
    }
    m
}

/// The affine Cartan matrix and generators
/// `e_0 = z F_gamma`, `f_0 = z^-1 E_gamma`, `h_0 = c - 1 (x) H_gamma`.
pub fn affinize(alg: &FiniteAlgebra) -> Result<(Gcm, AffineGenerators)> {
    let a = AffineAlgebra::new(alg.clone())?;
    Ok((a.gcm, a.gens))
}

impl AffineAlgebra {
    pub fn new(finite: FiniteAlgebra) -> Result<AffineAlgebra> {
        let l = finite.rank();
        let gcm = Gcm::new(affine_matrix(&finite))?;
        if gcm.class() != GcmClass::Affine {
            return Err(KmxError::Internal(format!("extension {gcm} is not Affine")));
        }
        let top = finite.highest_root_index();
        let hg = finite.coroot(top).to_vec();
        let one = Scalar::one();
        let mut e = vec![LoopElement::term(1, finite.f_root(top), one.clone())];
        let mut f = vec![LoopElement::term(-1, finite.e_root(top), one.clone())];
        let mut h0 = LoopElement::central(one.clone());
        for (j, &k) in hg.iter().enumerate() {
            h0.add_term(0, finite.h(j), Scalar::from_int(-k));
        }
        let mut h = vec![h0];
        for i in 0..l {
            e.push(LoopElement::term(0, finite.e(i), one.clone()));
            f.push(LoopElement::term(0, finite.f(i), one.clone()));
            h.push(LoopElement::term(0, finite.h(i), one.clone()));
        }
        let mut comarks = vec![1];
        comarks.extend(hg.iter().copied());
        let mut marks = vec![1];
        marks.extend(finite.highest_root().0.iter().copied());
        Ok(AffineAlgebra { finite, gcm, gens: AffineGenerators { e, f, h }, marks, comarks })
    }

    pub fn finite(&self) -> &FiniteAlgebra {
        &self.finite
    }

    pub fn gcm(&self) -> &Gcm {
        &self.gcm
    }

    /// Number of nodes, `l + 1`.
    pub fn nodes(&self) -> usize {
        self.gcm.n()
    }

    pub fn generators(&self) -> &AffineGenerators {
        &self.gens
    }

    pub fn e(&self, i: usize) -> &LoopElement {
        &self.gens.e[i]
    }

    pub fn f(&self, i: usize) -> &LoopElement {
        &self.gens.f[i]
    }

    pub fn h(&self, i: usize) -> &LoopElement {
        &self.gens.h[i]
    }

    /// Marks of `delta = sum_i a_i alpha_i`.
    pub fn marks(&self) -> &[i64] {
        &self.marks
    }

    /// Comarks: `c = sum_i a_i^vee h_i`.
    pub fn comarks(&self) -> &[i64] {
        &self.comarks
    }

    pub fn bracket(&self, x: &LoopElement, y: &LoopElement) -> LoopElement {
        let alg = &self.finite;
        let mut out = LoopElement::zero();
        for (&(j, a), ca) in &x.terms {
            for (&(k, b), cb) in &y.terms {
                let t = alg.bracket_basis(a, b);
                let prod = ca * cb;
                for &(idx, n) in t {
                    out.add_term(j + k, idx, &prod * &Scalar::from_int(n));
                }
                if j != 0 && j == -k {
                    let f = alg.invariant_form_basis(a, b);
                    if !num_traits::Zero::is_zero(&f) {
                        out.c += &(&(&prod * &Scalar::from_int(j)) * &Scalar::from_rational(f));
                    }
                }
            }
        }
        if !x.d.is_zero() {
            for (&(k, b), cb) in &y.terms {
                if k != 0 {
                    out.add_term(k, b, &(&x.d * cb) * &Scalar::from_int(k));
                }
            }
        }
        if !y.d.is_zero() {
            for (&(j, a), ca) in &x.terms {
                if j != 0 {
                    out.add_term(j, a, -(&(&y.d * ca) * &Scalar::from_int(j)));
                }
            }
        }
        out
    }

    /// [`Self::bracket`] after checking that both operands live over this
    /// algebra's finite part.
    pub fn checked_bracket(&self, x: &LoopElement, y: &LoopElement) -> Result<LoopElement> {
        let dim = self.finite.dim();
        for z in [x, y] {
            if let Some(&(_, b)) = z.terms.keys().find(|(_, b)| *b >= dim) {
                return Err(KmxError::Rejected(format!(
                    "basis index {b} does not belong to an algebra of dimension {dim}"
                )));
            }
        }
        Ok(self.bracket(x, y))
    }
}
