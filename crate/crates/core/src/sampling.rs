//! Seeded point sources for the sampling-based diagnostics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::point::Point;
use crate::scalar::Scalar;
use crate::sets::ConvexSet;

/// Deterministic generator of random points.
#[derive(Debug, Clone)]
pub struct PointSampler {
    rng: ChaCha8Rng,
}

impl PointSampler {
    pub fn new(seed: u64) -> Self {
        PointSampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    /// Point with i.i.d. coordinates uniform in `center ± half_width`.
    pub fn point_around<T: Scalar>(&mut self, center: &Point<T>, half_width: T) -> Point<T> {
        center.map(|c| c + half_width * T::of(self.rng.gen_range(-1.0..1.0)))
    }

    pub fn point<T: Scalar>(&mut self, dim: usize, half_width: T) -> Point<T> {
        self.point_around(&Point::zeros(dim), half_width)
    }

    /// A point of `set`: a random point near `center` (scale drawn
    /// log-uniformly in `[1e-3, 1] * half_width`) pushed through the projection.
    pub fn point_in_set<T: Scalar>(
        &mut self,
        set: &ConvexSet<T>,
        center: &Point<T>,
        half_width: T,
    ) -> Point<T> {
        let s = T::of(10f64.powf(self.rng.gen_range(-3.0..0.0))) * half_width;
        let raw = self.point_around(center, s);
        set.project(&raw).unwrap_or(raw)
    }

    /// `count` triples with coordinates in `[-half_width, half_width]`,
    /// mixing independent draws with nearby triples.
    pub fn triples<T: Scalar>(
        &mut self,
        dim: usize,
        half_width: T,
        count: usize,
    ) -> Vec<(Point<T>, Point<T>, Point<T>)> {
        (0..count)
            .map(|k| {
                let x = self.point(dim, half_width);
                if k % 2 == 0 {
                    (x, self.point(dim, half_width), self.point(dim, half_width))
                } else {
                    let r = half_width * T::of(0.01);
                    let y = self.point_around(&x, r);
                    let z = self.point_around(&y, r);
                    (x, y, z)
                }
            })
            .collect()
    }
}
