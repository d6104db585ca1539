use std::ops::{Add, Index, IndexMut, Neg, Sub};

use crate::scalar::Scalar;

/// Dense vector in R^n with the Euclidean inner product.
#[derive(Debug, Clone, PartialEq)]
pub struct Point<T>(Vec<T>);

impl<T: Scalar> Point<T> {
    pub fn zeros(dim: usize) -> Self {
        Point(vec![T::zero(); dim])
    }

    pub fn from_slice(coords: &[T]) -> Self {
        Point(coords.to_vec())
    }

    /// Standard basis vector `e_i`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut p = Self::zeros(dim);
        p.0[i] = T::one();
        p
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.0.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn dot(&self, other: &Self) -> T {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(&a, &b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> T {
        self.dot(self)
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.0.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn dist_sq(&self, other: &Self) -> T {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum()
    }

    pub fn dist(&self, other: &Self) -> T {
        self.dist_sq(other).sqrt()
    }

    pub fn scale(&self, s: T) -> Self {
        Point(self.0.iter().map(|&v| v * s).collect())
    }

    /// Returns `self + s * dir`.
    pub fn add_scaled(&self, s: T, dir: &Self) -> Self {
        Point(self.0.iter().zip(&dir.0).map(|(&a, &d)| a + s * d).collect())
    }

    /// In-place `self += s * dir`.
    pub fn axpy(&mut self, s: T, dir: &Self) {
        for (a, &d) in self.0.iter_mut().zip(&dir.0) {
            *a += s * d;
        }
    }

    pub fn map(&self, mut f: impl FnMut(T) -> T) -> Self {
        Point(self.0.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        Point(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect())
    }
}

impl<T> From<Vec<T>> for Point<T> {
    fn from(v: Vec<T>) -> Self {
        Point(v)
    }
}

impl<T> Index<usize> for Point<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T> IndexMut<usize> for Point<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.0[i]
    }
}

impl<T: Scalar> Add for &Point<T> {
    type Output = Point<T>;
    fn add(self, rhs: Self) -> Point<T> {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl<T: Scalar> Sub for &Point<T> {
    type Output = Point<T>;
    fn sub(self, rhs: Self) -> Point<T> {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl<T: Scalar> Neg for &Point<T> {
    type Output = Point<T>;
    fn neg(self) -> Point<T> {
        self.map(|v| -v)
    }
}
