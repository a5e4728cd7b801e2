//! Eigenspace decomposition `g = g_0 + .. + g_(q-1)` of a diagram
//! automorphism `Psi` of order `q`, where `Psi = zeta^p` on `g_p` and
//! `zeta = exp(2 pi i / q)`.
//!
//! Arithmetic is exact in `Q(w)` with `w^2 = -1 - w`; for `q = 2` only the
//! rational part is ever nonzero. `dim g_p` is the rank of the projector
//! `(1/q) sum_k zeta^(-pk) Psi^k`.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{KmxError, Result};
use crate::finite_lie::automorphism::DiagramAutomorphism;
use crate::finite_lie::FiniteAlgebra;
use crate::linalg::rref;
use crate::scalar::{format_rational, int, Rational};

/// `a + b w` with `w` a primitive cube root of unity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cyclo {
    pub a: Rational,
    pub b: Rational,
}

impl Cyclo {
    pub fn rational(a: Rational) -> Cyclo {
        Cyclo { a, b: Rational::zero() }
    }

    pub fn w() -> Cyclo {
        Cyclo { a: int(0), b: int(1) }
    }

    /// `zeta^m` for `zeta = exp(2 pi i / q)`, `q` in `{2, 3}`.
    pub fn root_of_unity(q: usize, m: i64) -> Cyclo {
        let m = m.rem_euclid(q as i64);
        match (q, m) {
            (_, 0) => Cyclo::rational(int(1)),
            (2, 1) => Cyclo::rational(int(-1)),
            (3, 1) => Cyclo::w(),
            (3, 2) => Cyclo { a: int(-1), b: int(-1) },
            _ => unreachable!("order is 2 or 3"),
        }
    }

    pub fn zero() -> Self {
        Cyclo::rational(Rational::zero())
    }
    pub fn one() -> Self {
        Cyclo::rational(Rational::one())
    }
    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
    pub fn add(&self, o: &Self) -> Self {
        Cyclo { a: &self.a + &o.a, b: &self.b + &o.b }
    }
    pub fn sub(&self, o: &Self) -> Self {
        Cyclo { a: &self.a - &o.a, b: &self.b - &o.b }
    }
    pub fn mul(&self, o: &Self) -> Self {
        let bd = &self.b * &o.b;
        Cyclo { a: &self.a * &o.a - &bd, b: &self.a * &o.b + &self.b * &o.a - bd }
    }
    /// Inverse of a nonzero element: `(a + b w)(a - b - b w) = a^2 - ab + b^2`.
    pub fn inv(&self) -> Self {
        let norm = &self.a * &self.a - &self.a * &self.b + &self.b * &self.b;
        Cyclo { a: (&self.a - &self.b) / &norm, b: -&self.b / norm }
    }
}

impl crate::linalg::Field for Cyclo {
    fn zero() -> Self {
        Cyclo::zero()
    }
    fn one() -> Self {
        Cyclo::one()
    }
    fn is_zero(&self) -> bool {
        Cyclo::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        Cyclo::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Cyclo::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Cyclo::mul(self, o)
    }
    fn inv(&self) -> Self {
        Cyclo::inv(self)
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => f.write_str(&format_rational(&self.a)),
            (true, false) => write!(f, "{}w", format_rational(&self.b)),
            (false, false) => {
                let sign = if self.b < Rational::zero() { "" } else { "+" };
                write!(f, "{}{}{}w", format_rational(&self.a), sign, format_rational(&self.b))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct TwistedDecomposition {
    pub q: usize,
    pub dims: Vec<usize>,
    /// Dense coordinate vectors of a basis of each `g_p`.
    pub bases: Vec<Vec<Vec<Cyclo>>>,
}

fn psi_matrix(alg: &FiniteAlgebra, psi: &DiagramAutomorphism) -> Result<Vec<Vec<Cyclo>>> {
    let dim = alg.dim();
    let mut m = vec![vec![Cyclo::zero(); dim]; dim];
    for b in 0..dim {
        for (k, v) in psi.image(b) {
            let r = v.to_rational().ok_or_else(|| {
                KmxError::Internal("automorphism image is not rational".into())
            })?;
            m[*k][b] = Cyclo::rational(r);
        }
    }
    Ok(m)
}

fn apply(m: &[Vec<Cyclo>], x: &[Cyclo]) -> Vec<Cyclo> {
    m.iter()
        .map(|row| {
            row.iter().zip(x).fold(Cyclo::zero(), |acc, (a, b)| {
                if a.is_zero() || b.is_zero() {
                    acc
                } else {
                    acc.add(&a.mul(b))
                }
            })
        })
        .collect()
}

fn bracket_dense(alg: &FiniteAlgebra, x: &[Cyclo], y: &[Cyclo]) -> Vec<Cyclo> {
    let mut out = vec![Cyclo::zero(); alg.dim()];
    for (a, xa) in x.iter().enumerate() {
        if xa.is_zero() {
            continue;
        }
        for (b, yb) in y.iter().enumerate() {
            if yb.is_zero() {
                continue;
            }
            let c = xa.mul(yb);
            for &(k, n) in alg.bracket_basis(a, b) {
                out[k] = out[k].add(&c.mul(&Cyclo::rational(int(n))));
            }
        }
    }
    out
}

pub fn twisted_decomposition(
    alg: &FiniteAlgebra,
    psi: &DiagramAutomorphism,
) -> Result<TwistedDecomposition> {
    let q = psi.order();
    if !psi.check_power_identity(alg) {
        return Err(KmxError::Rejected(format!("automorphism does not satisfy Psi^{q} = id")));
    }
    let dim = alg.dim();
    let m = psi_matrix(alg, psi)?;
    let mut powers = vec![identity(dim)];
    for k in 1..q {
        powers.push(crate::linalg::mat_mul(&m, &powers[k - 1]));
    }
    let inv_q = Cyclo::rational(Rational::new(1.into(), (q as i64).into()));
    let mut dims = Vec::with_capacity(q);
    let mut bases = Vec::with_capacity(q);
    for p in 0..q {
        let mut proj = vec![vec![Cyclo::zero(); dim]; dim];
        for (k, pk) in powers.iter().enumerate() {
            let z = Cyclo::root_of_unity(q, -((p * k) as i64)).mul(&inv_q);
            for i in 0..dim {
                for j in 0..dim {
                    if !pk[i][j].is_zero() {
                        proj[i][j] = proj[i][j].add(&z.mul(&pk[i][j]));
                    }
                }
            }
        }
        // Column space of the projector: nonzero rows of rref(P^T).
        let mut t: Vec<Vec<Cyclo>> =
            (0..dim).map(|j| (0..dim).map(|i| proj[i][j].clone()).collect()).collect();
        let pivots = rref(&mut t);
        let basis: Vec<Vec<Cyclo>> = t.into_iter().take(pivots.len()).collect();
        dims.push(basis.len());
        bases.push(basis);
    }
    Ok(TwistedDecomposition { q, dims, bases })
}

fn identity(n: usize) -> Vec<Vec<Cyclo>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Cyclo::one() } else { Cyclo::zero() })
                .collect()
        })
        .collect()
}

impl TwistedDecomposition {
    /// Every basis vector of `g_p` is a `zeta^p` eigenvector and
    /// `[g_p, g_p'] ⊆ g_(p+p')`, checked on all basis pairs.
    pub fn check_closure(&self, alg: &FiniteAlgebra, psi: &DiagramAutomorphism) -> Result<bool> {
        let m = psi_matrix(alg, psi)?;
        let q = self.q;
        let eigen = |x: &[Cyclo], p: usize| {
            let z = Cyclo::root_of_unity(q, p as i64);
            apply(&m, x) == x.iter().map(|v| v.mul(&z)).collect::<Vec<_>>()
        };
        for (p, basis) in self.bases.iter().enumerate() {
            if !basis.iter().all(|x| eigen(x, p)) {
                return Ok(false);
            }
        }
        for p in 0..q {
            for pp in 0..q {
                for x in &self.bases[p] {
                    for y in &self.bases[pp] {
                        if !eigen(&bracket_dense(alg, x, y), (p + pp) % q) {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        Ok(true)
    }

    /// Basis vectors as `basis name -> coefficient` pairs.
    pub fn named_bases(&self, alg: &FiniteAlgebra) -> Vec<Vec<Vec<(String, String)>>> {
        self.bases
            .iter()
            .map(|basis| {
                basis
                    .iter()
                    .map(|v| {
                        v.iter()
                            .enumerate()
                            .filter(|(_, c)| !c.is_zero())
                            .map(|(k, c)| (alg.basis_name(k), c.to_string()))
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }
}
