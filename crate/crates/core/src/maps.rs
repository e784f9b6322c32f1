//! The maps `α^ε` and `β^R` and their structured inverses.
//!
//! `α^ε_i(z) = z_i + ε Σ_{j ∉ Z_i} z_j` is block lower-triangular with
//! diagonal blocks `I + εJ`; `β^R_i(y) = y_i − R Σ_{j ∉ P_i, P_j ≠ P_i} y_j`
//! is unit triangular once indices are ordered by `|P_i|`.

use thiserror::Error;

use crate::linalg::{rank_one_update_solve, Matrix, Vector};
use crate::scalar::Scalar;
use crate::structure::DerivedIndexData;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("parameter {name} = {value} must be strictly positive")]
    NonpositiveParameter { name: &'static str, value: String },
}

pub(crate) fn require_positive<S: Scalar>(name: &'static str, value: &S) -> Result<(), MapError> {
    if value.is_positive() {
        Ok(())
    } else {
        Err(MapError::NonpositiveParameter { name, value: value.to_string() })
    }
}

pub fn alpha_matrix<S: Scalar>(d: &DerivedIndexData, epsilon: &S) -> Result<Matrix<S>, MapError> {
    require_positive("epsilon", epsilon)?;
    let n = d.n();
    let mut m = Matrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            if d.alpha_couples(i, j) {
                m[(i, j)] += epsilon.clone();
            }
        }
    }
    Ok(m)
}

pub fn beta_matrix<S: Scalar>(d: &DerivedIndexData, big_r: &S) -> Result<Matrix<S>, MapError> {
    require_positive("R", big_r)?;
    let n = d.n();
    let mut m = Matrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            if d.beta_couples(i, j) {
                m[(i, j)] = -big_r.clone();
            }
        }
    }
    Ok(m)
}

/// `φ = β^R · α^ε`.
pub fn phi_matrix<S: Scalar>(d: &DerivedIndexData, big_r: &S, epsilon: &S) -> Result<Matrix<S>, MapError> {
    let a = alpha_matrix(d, epsilon)?;
    let b = beta_matrix(d, big_r)?;
    Ok(b.mul(&a).expect("same dimension"))
}

/// Applies `α^ε` without building the matrix.
pub fn alpha_apply<S: Scalar>(d: &DerivedIndexData, epsilon: &S, z: &Vector<S>) -> Result<Vector<S>, MapError> {
    require_positive("epsilon", epsilon)?;
    let n = d.n();
    let out = (0..n)
        .map(|i| {
            let mut coupled = S::zero();
            for j in (0..n).filter(|&j| d.alpha_couples(i, j)) {
                coupled += z[j].clone();
            }
            z[i].clone() + epsilon.mul_ref(&coupled)
        })
        .collect();
    Ok(Vector::new(out))
}

/// Applies `β^R` without building the matrix.
pub fn beta_apply<S: Scalar>(d: &DerivedIndexData, big_r: &S, y: &Vector<S>) -> Result<Vector<S>, MapError> {
    require_positive("R", big_r)?;
    let n = d.n();
    let out = (0..n)
        .map(|i| {
            let mut coupled = S::zero();
            for j in (0..n).filter(|&j| d.beta_couples(i, j)) {
                coupled += y[j].clone();
            }
            y[i].clone() - big_r.mul_ref(&coupled)
        })
        .collect();
    Ok(Vector::new(out))
}

/// Solves `α^ε(z) = y` block by block, largest `Z` first. Within block `B_Z`
/// the already-known couplings are moved to the right-hand side and the
/// remaining `(I + εJ)` system is solved in closed form.
pub fn alpha_inverse_apply<S: Scalar>(d: &DerivedIndexData, epsilon: &S, y: &Vector<S>) -> Result<Vector<S>, MapError> {
    require_positive("epsilon", epsilon)?;
    let n = d.n();
    let mut z: Vector<S> = Vector::zeros(n);
    for &(zv, block) in d.blocks() {
        // j ∉ Z and j outside the block ⇒ Z_j ⊋ Z, already solved
        let mut known = S::zero();
        for j in zv.complement(n).difference(block).iter() {
            known += z[j].clone();
        }
        let shift = epsilon.mul_ref(&known);
        let rhs: Vec<S> = block.iter().map(|i| y[i].clone() - shift.clone()).collect();
        let solved = rank_one_update_solve(epsilon, &rhs).expect("I + εJ is invertible for ε > 0");
        for (i, value) in block.iter().zip(solved) {
            z[i] = value;
        }
    }
    Ok(z)
}

/// Solves `β^R(y) = x` by substitution in nonincreasing `|P_i|` order:
/// `y_i = x_i + R Σ_{j ∉ P_i, P_j ≠ P_i} y_j`.
pub fn beta_inverse_apply<S: Scalar>(d: &DerivedIndexData, big_r: &S, x: &Vector<S>) -> Result<Vector<S>, MapError> {
    require_positive("R", big_r)?;
    let n = d.n();
    let mut y: Vector<S> = Vector::zeros(n);
    for &i in d.beta_order() {
        let mut coupled = S::zero();
        for j in (0..n).filter(|&j| d.beta_couples(i, j)) {
            coupled += y[j].clone();
        }
        y[i] = x[i].clone() + big_r.mul_ref(&coupled);
    }
    Ok(y)
}

/// `φ^{-1}(x) = (α^ε)^{-1}((β^R)^{-1}(x))`.
pub fn phi_inverse_apply<S: Scalar>(
    d: &DerivedIndexData,
    big_r: &S,
    epsilon: &S,
    x: &Vector<S>,
) -> Result<Vector<S>, MapError> {
    let y = beta_inverse_apply(d, big_r, x)?;
    alpha_inverse_apply(d, epsilon, &y)
}
