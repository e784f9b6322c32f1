//! Exact square matrices and vectors over a [`Scalar`].
//!
//! Only what the construction needs: products, fraction-free inversion, the
//! closed-form inverse of `I + λJ`, and entrywise sign tests.

use std::fmt;
use std::ops::{Index, IndexMut};

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("I + {lambda}·J is singular in dimension {n} (λ = -1/n)")]
    SingularParameter { lambda: String, n: usize },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// A point of `F^n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Vector<S>(Vec<S>);

impl<S: Scalar> Vector<S> {
    pub fn new(entries: Vec<S>) -> Self {
        Vector(entries)
    }

    pub fn zeros(n: usize) -> Self {
        Vector(vec![S::zero(); n])
    }

    /// Standard basis vector `e_i`, 0-based `i`.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = S::one();
        v
    }

    pub fn from_i64s(values: &[i64]) -> Self {
        Vector(values.iter().map(|&v| S::from_i64(v)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[S] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<S> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, S> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    pub fn is_nonneg(&self) -> bool {
        self.0.iter().all(|x| x.is_nonneg())
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len());
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a.clone() - b.clone()).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len());
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a.clone() + b.clone()).collect())
    }

    pub fn scale(&self, c: &S) -> Self {
        Vector(self.0.iter().map(|a| a.mul_ref(c)).collect())
    }

    /// Entrywise maximum.
    pub fn max(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len());
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| if a >= b { a.clone() } else { b.clone() }).collect())
    }
}

impl<S> Index<usize> for Vector<S> {
    type Output = S;
    fn index(&self, i: usize) -> &S {
        &self.0[i]
    }
}

impl<S> IndexMut<usize> for Vector<S> {
    fn index_mut(&mut self, i: usize) -> &mut S {
        &mut self.0[i]
    }
}

impl<S: fmt::Debug> fmt::Debug for Vector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, x) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x:?}")?;
        }
        write!(f, ")")
    }
}

/// A square `n × n` matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![S::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    /// The all-ones matrix `J_n`.
    pub fn ones(n: usize) -> Self {
        Matrix { n, data: vec![S::one(); n * n] }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self, LinalgError> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(LinalgError::DimensionMismatch { expected: n, found: row.len() });
            }
            data.extend(row);
        }
        Ok(Matrix { n, data })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let rows = rows.iter().map(|r| r.iter().map(|&v| S::from_i64(v)).collect()).collect();
        Self::from_rows(rows).expect("square literal")
    }

    /// Builds the matrix whose `j`-th column is `cols[j]`.
    pub fn from_columns(cols: &[Vector<S>]) -> Result<Self, LinalgError> {
        let n = cols.len();
        let mut m = Self::zeros(n);
        for (j, col) in cols.iter().enumerate() {
            if col.len() != n {
                return Err(LinalgError::DimensionMismatch { expected: n, found: col.len() });
            }
            for i in 0..n {
                m[(i, j)] = col[i].clone();
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> impl Iterator<Item = &[S]> {
        self.data.chunks(self.n.max(1)).take(self.n)
    }

    pub fn column(&self, j: usize) -> Vector<S> {
        Vector::new((0..self.n).map(|i| self[(i, j)].clone()).collect())
    }

    pub fn entries(&self) -> impl Iterator<Item = &S> {
        self.data.iter()
    }

    pub fn scale(&self, c: &S) -> Self {
        Matrix { n: self.n, data: self.data.iter().map(|a| a.mul_ref(c)).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_dim(other.n)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b.clone()).collect();
        Ok(Matrix { n: self.n, data })
    }

    pub fn mul(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_dim(other.n)?;
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out.data[i * n + j].add_product(a, b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &Vector<S>) -> Result<Vector<S>, LinalgError> {
        self.check_dim(v.len())?;
        let out = (0..self.n)
            .map(|i| {
                let mut acc = S::zero();
                for j in 0..self.n {
                    let a = &self[(i, j)];
                    if !a.is_zero() && !v[j].is_zero() {
                        acc.add_product(a, &v[j]);
                    }
                }
                acc
            })
            .collect();
        Ok(Vector::new(out))
    }

    pub fn is_entrywise_nonneg(&self) -> bool {
        self.data.iter().all(|x| x.is_nonneg())
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    /// Returns `Some(c)` when the matrix equals `c·I`.
    pub fn scalar_multiple_of_identity(&self) -> Option<S> {
        let c = if self.n == 0 { S::one() } else { self[(0, 0)].clone() };
        (*self == Self::identity(self.n).scale(&c)).then_some(c)
    }

    pub fn determinant(&self) -> S {
        let mut work: Vec<Vec<S>> = self.rows().map(|r| r.to_vec()).collect();
        match bareiss_forward(&mut work, self.n) {
            Some(sign) if self.n > 0 => {
                let d = work[self.n - 1][self.n - 1].clone();
                if sign < 0 {
                    -d
                } else {
                    d
                }
            }
            Some(_) => S::one(),
            None => S::zero(),
        }
    }

    /// Exact inverse by fraction-free (Bareiss) elimination on `[A | I]`
    /// followed by back substitution.
    pub fn inverse(&self) -> Result<Self, LinalgError> {
        let n = self.n;
        let mut work: Vec<Vec<S>> = self
            .rows()
            .enumerate()
            .map(|(i, r)| {
                let mut row = r.to_vec();
                row.extend((0..n).map(|j| if i == j { S::one() } else { S::zero() }));
                row
            })
            .collect();
        bareiss_forward(&mut work, n).ok_or(LinalgError::SingularMatrix)?;

        let mut inv = Self::zeros(n);
        for i in (0..n).rev() {
            let pivot = work[i][i].clone();
            for c in 0..n {
                let mut acc = work[i][n + c].clone();
                for j in i + 1..n {
                    if !work[i][j].is_zero() {
                        acc.sub_product(&work[i][j], &inv[(j, c)]);
                    }
                }
                inv[(i, c)] = acc.div_ref(&pivot);
            }
        }
        Ok(inv)
    }

    fn check_dim(&self, found: usize) -> Result<(), LinalgError> {
        if self.n == found {
            Ok(())
        } else {
            Err(LinalgError::DimensionMismatch { expected: self.n, found })
        }
    }
}

/// Forward Bareiss elimination over the leading `n` columns of `rows`.
/// Returns the row-swap sign, or `None` if a pivot column is all zero.
fn bareiss_forward<S: Scalar>(rows: &mut [Vec<S>], n: usize) -> Option<i32> {
    let width = rows.first().map_or(0, |r| r.len());
    let mut prev = S::one();
    let mut sign = 1;
    for k in 0..n {
        let p = (k..n).find(|&r| !rows[r][k].is_zero())?;
        if p != k {
            rows.swap(p, k);
            sign = -sign;
        }
        let (top, rest) = rows.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in rest.iter_mut().take(n - k - 1) {
            let lead = row[k].clone();
            for j in k + 1..width {
                let mut v = row[j].mul_ref(&pivot_row[k]);
                if !lead.is_zero() {
                    v.sub_product(&lead, &pivot_row[j]);
                }
                row[j] = v.div_ref(&prev);
            }
            row[k] = S::zero();
        }
        prev = rows[k][k].clone();
    }
    Some(sign)
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.n + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.n + j]
    }
}

impl<S: fmt::Debug> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:?}", self.data[i * self.n + j])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

fn rank_one_coefficient<S: Scalar>(lambda: &S, n: usize) -> Result<S, LinalgError> {
    let denom = lambda.mul_ref(&S::from_i64(n as i64)) + S::one();
    if denom.is_zero() {
        return Err(LinalgError::SingularParameter { lambda: lambda.to_string(), n });
    }
    Ok(lambda.div_ref(&denom))
}

/// `(I_n + λJ_n)^{-1} = I_n - λ/(λn + 1)·J_n`.
pub fn rank_one_update_inverse<S: Scalar>(lambda: &S, n: usize) -> Result<Matrix<S>, LinalgError> {
    let c = rank_one_coefficient(lambda, n)?;
    let mut m = Matrix::identity(n);
    for x in m.data.iter_mut() {
        *x -= c.clone();
    }
    Ok(m)
}

/// Solves `(I + λJ)x = rhs` with the closed-form inverse, in `O(n)`.
pub fn rank_one_update_solve<S: Scalar>(lambda: &S, rhs: &[S]) -> Result<Vec<S>, LinalgError> {
    let c = rank_one_coefficient(lambda, rhs.len())?;
    let mut total = S::zero();
    for x in rhs {
        total += x.clone();
    }
    let shift = c.mul_ref(&total);
    Ok(rhs.iter().map(|x| x.clone() - shift.clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_rational::BigRational;

    type M = Matrix<Rational>;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn i_plus_lambda_j(lambda: &Rational, n: usize) -> M {
        M::identity(n).add(&M::ones(n).scale(lambda)).unwrap()
    }

    #[test]
    fn rank_one_inverse_lambda_one_n_three() {
        let inv = rank_one_update_inverse(&q("1"), 3).unwrap();
        let expected = M::identity(3).add(&M::ones(3).scale(&q("-1/4"))).unwrap();
        assert_eq!(inv, expected);
        // multiply out by hand against the identity
        let prod = i_plus_lambda_j(&q("1"), 3).mul(&inv).unwrap();
        assert!(prod.is_identity());
    }

    #[test]
    fn rank_one_inverse_lambda_zero_is_identity() {
        assert!(rank_one_update_inverse(&q("0"), 5).unwrap().is_identity());
    }

    #[test]
    fn rank_one_inverse_rejects_minus_one_over_n() {
        let err = rank_one_update_inverse(&q("-1/2"), 2).unwrap_err();
        assert!(matches!(err, LinalgError::SingularParameter { n: 2, .. }));
        assert!(rank_one_update_solve(&q("-1/3"), &[q("1"), q("2"), q("3")]).is_err());
    }

    #[test]
    fn rank_one_solve_matches_matrix() {
        let lambda = q("1/24");
        let rhs = vec![q("1"), q("3")];
        let x = rank_one_update_solve(&lambda, &rhs).unwrap();
        assert_eq!(x, vec![q("11/13"), q("37/13")]);
        let back = i_plus_lambda_j(&lambda, 2).mul_vec(&Vector::new(x)).unwrap();
        assert_eq!(back.into_entries(), rhs);
    }

    #[test]
    fn inverse_of_identity_and_unit_lower() {
        assert!(M::identity(4).inverse().unwrap().is_identity());
        let a = M::from_i64_rows(&[&[1, 0], &[-2, 1]]);
        // 2×2 adjugate: [[d, -b], [-c, a]] / (ad - bc)
        assert_eq!(a.inverse().unwrap(), M::from_i64_rows(&[&[1, 0], &[2, 1]]));
    }

    #[test]
    fn inverse_needs_pivoting() {
        let a = M::from_i64_rows(&[&[0, 1, 2], &[1, 0, 3], &[4, -3, 8]]);
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).unwrap().is_identity());
        assert!(inv.mul(&a).unwrap().is_identity());
        assert_eq!(a.determinant(), q("-2"));
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = M::from_i64_rows(&[&[1, 2], &[2, 4]]);
        assert_eq!(a.inverse().unwrap_err(), LinalgError::SingularMatrix);
        assert_eq!(a.determinant(), q("0"));
    }

    #[test]
    fn entrywise_sign_test() {
        let psi = M::from_rows(vec![vec![q("1/2"), q("0")], vec![q("11/2"), q("4")]]).unwrap();
        assert!(psi.is_entrywise_nonneg());
        assert!(!M::from_i64_rows(&[&[1, -1], &[0, 1]]).is_entrywise_nonneg());
        assert!(M::zeros(3).is_entrywise_nonneg());
    }

    #[test]
    fn backends_agree_on_inverse() {
        let rows: &[&[i64]] = &[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]];
        let a = Matrix::<Rational>::from_i64_rows(rows).inverse().unwrap();
        let b = Matrix::<BigRational>::from_i64_rows(rows).inverse().unwrap();
        let sa: Vec<String> = a.entries().map(|x| x.to_string()).collect();
        let sb: Vec<String> = b.entries().map(|x| x.to_string()).collect();
        assert_eq!(sa, sb);
    }

    #[test]
    fn dimension_mismatch() {
        let a = M::identity(2);
        assert!(matches!(a.mul(&M::identity(3)), Err(LinalgError::DimensionMismatch { expected: 2, found: 3 })));
        assert!(a.mul_vec(&Vector::zeros(3)).is_err());
    }
}
