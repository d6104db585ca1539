//! Small dense linear algebra used by the projections and instance builders.

use crate::point::Point;
use crate::scalar::Scalar;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from nested rows. Returns `None` for ragged input.
    pub fn from_rows(rows: &[Vec<T>]) -> Option<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        Some(Matrix { rows: rows.len(), cols, data: rows.concat() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &Point<T>) -> Point<T> {
        debug_assert_eq!(self.cols, x.dim());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x.iter()).map(|(&a, &b)| a * b).sum())
            .collect::<Vec<T>>()
            .into()
    }

    /// `Mᵀ x` without materialising the transpose.
    pub fn transpose_mul_vec(&self, x: &Point<T>) -> Point<T> {
        debug_assert_eq!(self.rows, x.dim());
        let mut out = Point::zeros(self.cols);
        for i in 0..self.rows {
            let xi = x[i];
            for (j, &a) in self.row(i).iter().enumerate() {
                out[j] += a * xi;
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| v * s).collect() }
    }

    /// `(M + Mᵀ) / 2`.
    pub fn symmetric_part(&self) -> Self {
        self.add(&self.transpose()).scale(T::half())
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }

    /// Spectral norm `‖M‖₂` by power iteration on `MᵀM`.
    pub fn operator_norm(&self) -> T {
        let n = self.cols;
        if n == 0 || self.max_abs() == T::zero() {
            return T::zero();
        }
        // deterministic, structure-free start vector
        let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
        let mut v: Point<T> = (0..n)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                T::of(0.5 + (state >> 11) as f64 / (1u64 << 53) as f64)
            })
            .collect::<Vec<T>>()
            .into();
        v = v.scale(T::one() / v.norm());
        let mut estimate = T::zero();
        for _ in 0..20_000 {
            let w = self.transpose_mul_vec(&self.mul_vec(&v));
            let next = v.dot(&w);
            let wn = w.norm();
            if wn == T::zero() {
                break;
            }
            v = w.scale(T::one() / wn);
            let done = (next - estimate).abs() <= T::epsilon() * next;
            estimate = next;
            if done {
                break;
            }
        }
        estimate.max(T::zero()).sqrt()
    }

    /// Positive semidefiniteness of the symmetric part, by pivoted Cholesky with
    /// a relative tolerance.
    pub fn is_psd(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let n = self.rows;
        let mut a = self.symmetric_part();
        let tol = T::of(1e-10) * (T::one() + a.max_abs()) * T::of(n.max(1) as f64);
        let mut remaining: Vec<usize> = (0..n).collect();
        while !remaining.is_empty() {
            let (pos, &p) = remaining
                .iter()
                .enumerate()
                .max_by(|(_, &i), (_, &j)| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap())
                .unwrap();
            let d = a[(p, p)];
            if remaining.iter().any(|&i| a[(i, i)] < -tol) {
                return false;
            }
            if d <= tol {
                return remaining
                    .iter()
                    .all(|&i| remaining.iter().all(|&j| a[(i, j)].abs() <= tol));
            }
            remaining.swap_remove(pos);
            for &i in &remaining {
                let f = a[(i, p)] / d;
                for &j in &remaining {
                    let upd = f * a[(p, j)];
                    a[(i, j)] -= upd;
                }
            }
        }
        true
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Solves the square system `A x = b` by Gaussian elimination with partial
/// pivoting. Returns `None` when a pivot falls below `rel_tol` times the
/// largest entry of `A`.
pub fn solve_linear<T: Scalar>(a: &Matrix<T>, b: &[T], rel_tol: T) -> Option<Vec<T>> {
    let n = a.rows();
    assert!(a.is_square() && b.len() == n);
    let scale = a.max_abs();
    if n == 0 {
        return Some(Vec::new());
    }
    if scale == T::zero() {
        return None;
    }
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[(i, col)].abs().partial_cmp(&m[(j, col)].abs()).unwrap())
            .unwrap();
        if m[(piv, col)].abs() <= rel_tol * scale {
            return None;
        }
        if piv != col {
            for j in 0..n {
                let tmp = m[(col, j)];
                m[(col, j)] = m[(piv, j)];
                m[(piv, j)] = tmp;
            }
            rhs.swap(col, piv);
        }
        for i in col + 1..n {
            let f = m[(i, col)] / m[(col, col)];
            if f == T::zero() {
                continue;
            }
            for j in col..n {
                let upd = f * m[(col, j)];
                m[(i, j)] -= upd;
            }
            let upd = f * rhs[col];
            rhs[i] -= upd;
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let s: T = (i + 1..n).map(|j| m[(i, j)] * x[j]).sum();
        x[i] = (rhs[i] - s) / m[(i, i)];
    }
    Some(x)
}

/// A particular solution of a possibly rank-deficient square system, by
/// Gaussian elimination with complete pivoting; free variables are set to
/// zero. The caller verifies the residual.
pub fn solve_particular<T: Scalar>(a: &Matrix<T>, b: &[T], rel_tol: T) -> Vec<T> {
    let n = a.rows();
    assert!(a.is_square() && b.len() == n);
    let scale = a.max_abs();
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut rank = 0;
    for k in 0..n {
        let mut best = (k, k, T::zero());
        for i in k..n {
            for j in k..n {
                if m[(i, j)].abs() > best.2 {
                    best = (i, j, m[(i, j)].abs());
                }
            }
        }
        if best.2 <= rel_tol * scale || best.2 == T::zero() {
            break;
        }
        let (pi, pj, _) = best;
        for j in 0..n {
            let tmp = m[(k, j)];
            m[(k, j)] = m[(pi, j)];
            m[(pi, j)] = tmp;
        }
        rhs.swap(k, pi);
        for i in 0..n {
            let tmp = m[(i, k)];
            m[(i, k)] = m[(i, pj)];
            m[(i, pj)] = tmp;
        }
        perm.swap(k, pj);
        for i in k + 1..n {
            let f = m[(i, k)] / m[(k, k)];
            for j in k..n {
                let upd = f * m[(k, j)];
                m[(i, j)] -= upd;
            }
            let upd = f * rhs[k];
            rhs[i] -= upd;
        }
        rank += 1;
    }
    let mut y = vec![T::zero(); n];
    for i in (0..rank).rev() {
        let s: T = (i + 1..rank).map(|j| m[(i, j)] * y[j]).sum();
        y[i] = (rhs[i] - s) / m[(i, i)];
    }
    let mut x = vec![T::zero(); n];
    for (k, &p) in perm.iter().enumerate() {
        x[p] = y[k];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix<f64> {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn solves_small_system() {
        let a = m(&[&[2.0, 1.0], &[1.0, 3.0]]);
        let x = solve_linear(&a, &[3.0, 5.0], 1e-14).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);
    }

    #[test]
    fn detects_singular_system() {
        let a = m(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(solve_linear(&a, &[1.0, 2.0], 1e-12).is_none());
        let x = solve_particular(&a, &[1.0, 2.0], 1e-12);
        assert!((x[0] + 2.0 * x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn operator_norm_of_diagonal_and_rotation() {
        assert!((Matrix::diagonal(&[1.0f64, -3.0, 2.0]).operator_norm() - 3.0).abs() < 1e-12);
        let rot = m(&[&[0.0, -1.0], &[1.0, 0.0]]);
        assert!((rot.operator_norm() - 1.0).abs() < 1e-12);
        assert_eq!(Matrix::<f64>::zeros(3, 3).operator_norm(), 0.0);
    }

    #[test]
    fn psd_detection() {
        assert!(m(&[&[2.0, 1.0], &[1.0, 2.0]]).is_psd());
        assert!(m(&[&[1.0, 1.0], &[1.0, 1.0]]).is_psd());
        assert!(!m(&[&[1.0, 2.0], &[2.0, 1.0]]).is_psd());
        // rotation has zero symmetric part
        assert!(m(&[&[0.0, -1.0], &[1.0, 0.0]]).is_psd());
        assert!(!Matrix::diagonal(&[1.0, -1e-3]).is_psd());
    }

    #[test]
    fn transpose_products_agree() {
        let a = m(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]);
        let x = Point::from(vec![1.0, -1.0]);
        assert_eq!(a.transpose_mul_vec(&x), a.transpose().mul_vec(&x));
        assert_eq!(a.matmul(&Matrix::identity(3)), a);
    }
}
