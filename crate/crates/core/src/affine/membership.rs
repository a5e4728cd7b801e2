//! Membership in the standard Borel, the natural parabolic `z^n (x) b` and
//! the upper-triangular loop parabolic of `su(n,1)`. `c` and `d` belong to
//! all three.

use super::{AffineAlgebra, LoopElement};
use crate::error::{KmxError, Result};
use crate::finite_lie::split::MatrixRealization;
use crate::finite_lie::Basis;

fn check_basis(aff: &AffineAlgebra, x: &LoopElement) -> Result<()> {
    let dim = aff.finite().dim();
    match x.terms().keys().find(|(_, b)| *b >= dim) {
        Some((_, b)) => Err(KmxError::Rejected(format!(
            "basis index {b} does not belong to an algebra of dimension {dim}"
        ))),
        None => Ok(()),
    }
}

/// `C c + C d + 1 (x) b + sum_(j > 0) z^j (x) g`.
pub fn in_standard_borel(aff: &AffineAlgebra, x: &LoopElement) -> Result<bool> {
    check_basis(aff, x)?;
    let alg = aff.finite();
    Ok(x.terms().keys().all(|&(deg, b)| {
        deg > 0 || (deg == 0 && !matches!(alg.kind(b), Basis::F(_)))
    }))
}

/// `C c + C d + sum_n z^n (x) b`.
pub fn in_natural_parabolic(aff: &AffineAlgebra, x: &LoopElement) -> Result<bool> {
    check_basis(aff, x)?;
    let alg = aff.finite();
    Ok(x.terms().keys().all(|&(_, b)| !matches!(alg.kind(b), Basis::F(_))))
}

/// Loops whose matrix `(a_ij(z))` vanishes below the diagonal.
pub fn in_exceptional_parabolic(
    aff: &AffineAlgebra,
    real: &MatrixRealization,
    x: &LoopElement,
) -> Result<bool> {
    check_basis(aff, x)?;
    if real.size() != aff.finite().rank() + 1 {
        return Err(KmxError::Rejected("matrix realization does not match the algebra".into()));
    }
    Ok(x.degrees().into_iter().all(|deg| real.is_upper_triangular(&x.slice(deg))))
}
