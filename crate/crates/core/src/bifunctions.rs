//! Concrete bifunction oracles for the shipped problem families.

use crate::linalg::Matrix;
use crate::model::Bifunction;
use crate::point::Point;
use crate::scalar::Scalar;

/// `f ≡ 0`: every point of `K` solves the equilibrium problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroBifunction {
    pub dim: usize,
}

impl<T: Scalar> Bifunction<T> for ZeroBifunction {
    fn value(&self, _x: &Point<T>, _y: &Point<T>) -> T {
        T::zero()
    }

    fn subgradient(&self, _x: &Point<T>, y: &Point<T>) -> Point<T> {
        Point::zeros(y.dim())
    }

    fn c1(&self) -> T {
        T::zero()
    }

    fn c2(&self) -> T {
        T::zero()
    }

    fn operator(&self, x: &Point<T>) -> Option<Point<T>> {
        Some(Point::zeros(x.dim()))
    }

    fn is_linearized(&self) -> bool {
        true
    }

    fn dim(&self) -> Option<usize> {
        Some(self.dim)
    }
}

/// Variational-inequality bifunction `f(x, y) = ⟨M x + q, y − x⟩` of the
/// affine operator `A(x) = M x + q`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineOperatorBifunction<T> {
    matrix: Matrix<T>,
    shift: Point<T>,
    c1: T,
    c2: T,
}

impl<T: Scalar> AffineOperatorBifunction<T> {
    /// Constants `c1 = c2 = L/2` with `L = ‖M‖₂`.
    pub fn new(matrix: Matrix<T>, shift: Point<T>) -> Self {
        let half_l = matrix.operator_norm() * T::half();
        Self::with_constants(matrix, shift, half_l, half_l)
    }

    /// Uses caller-declared constants (validated later by sampling).
    pub fn with_constants(matrix: Matrix<T>, shift: Point<T>, c1: T, c2: T) -> Self {
        assert!(matrix.is_square() && matrix.rows() == shift.dim(), "operator shape mismatch");
        AffineOperatorBifunction { matrix, shift, c1, c2 }
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn shift(&self) -> &Point<T> {
        &self.shift
    }

    pub fn apply(&self, x: &Point<T>) -> Point<T> {
        &self.matrix.mul_vec(x) + &self.shift
    }
}

impl<T: Scalar> Bifunction<T> for AffineOperatorBifunction<T> {
    fn value(&self, x: &Point<T>, y: &Point<T>) -> T {
        self.apply(x).dot(&(y - x))
    }

    fn subgradient(&self, x: &Point<T>, _y: &Point<T>) -> Point<T> {
        self.apply(x)
    }

    fn c1(&self) -> T {
        self.c1
    }

    fn c2(&self) -> T {
        self.c2
    }

    fn operator(&self, x: &Point<T>) -> Option<Point<T>> {
        Some(self.apply(x))
    }

    fn is_linearized(&self) -> bool {
        true
    }

    fn dim(&self) -> Option<usize> {
        Some(self.shift.dim())
    }
}

/// Oligopoly-type bifunction `f(x, y) = ⟨P x + Q y + q, y − x⟩`.
///
/// Quadratic in `y`, so the prox subproblems go through the iterative inner
/// solver. With `P`, `Q` symmetric, `Q ⪰ 0` and `P − Q ⪰ 0` it is monotone
/// and Lipschitz-type with `c1 = c2 = ‖Pᵀ − Q‖/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct NashCournotBifunction<T> {
    p: Matrix<T>,
    q_mat: Matrix<T>,
    q: Point<T>,
    c1: T,
    c2: T,
}

impl<T: Scalar> NashCournotBifunction<T> {
    pub fn new(p: Matrix<T>, q_mat: Matrix<T>, q: Point<T>) -> Self {
        let half_l = p.transpose().sub(&q_mat).operator_norm() * T::half();
        Self::with_constants(p, q_mat, q, half_l, half_l)
    }

    pub fn with_constants(p: Matrix<T>, q_mat: Matrix<T>, q: Point<T>, c1: T, c2: T) -> Self {
        let n = q.dim();
        assert!(
            p.rows() == n && p.cols() == n && q_mat.rows() == n && q_mat.cols() == n,
            "oligopoly data shape mismatch"
        );
        NashCournotBifunction { p, q_mat, q, c1, c2 }
    }

    pub fn p(&self) -> &Matrix<T> {
        &self.p
    }

    pub fn q_mat(&self) -> &Matrix<T> {
        &self.q_mat
    }

    pub fn q(&self) -> &Point<T> {
        &self.q
    }
}

impl<T: Scalar> Bifunction<T> for NashCournotBifunction<T> {
    fn value(&self, x: &Point<T>, y: &Point<T>) -> T {
        let lin = &(&self.p.mul_vec(x) + &self.q_mat.mul_vec(y)) + &self.q;
        lin.dot(&(y - x))
    }

    fn subgradient(&self, x: &Point<T>, y: &Point<T>) -> Point<T> {
        // ∇_y = P x + Q y + q + Qᵀ (y − x)
        let mut g = &(&self.p.mul_vec(x) + &self.q_mat.mul_vec(y)) + &self.q;
        let qt = self.q_mat.transpose_mul_vec(&(y - x));
        g.axpy(T::one(), &qt);
        g
    }

    fn c1(&self) -> T {
        self.c1
    }

    fn c2(&self) -> T {
        self.c2
    }

    fn dim(&self) -> Option<usize> {
        Some(self.q.dim())
    }
}
