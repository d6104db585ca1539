//! Constraint sets, their metric projections and membership tests.

use crate::error::SetError;
use crate::linalg::{solve_linear, Matrix};
use crate::point::Point;
use crate::scalar::Scalar;

/// Above this many cuts the intersection projection switches from exact
/// active-set enumeration to Dykstra's method.
pub const EXACT_CUT_LIMIT: usize = 12;

const DYKSTRA_MAX_SWEEPS: usize = 200_000;

/// Closed halfspace `{z : ⟨a, z⟩ ≤ b}` with `a ≠ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace<T> {
    normal: Point<T>,
    offset: T,
}

impl<T: Scalar> Halfspace<T> {
    pub fn new(normal: Point<T>, offset: T) -> Result<Self, SetError> {
        if !normal.is_finite() || !offset.is_finite() {
            return Err(SetError::NonFinite);
        }
        if normal.norm_sq() == T::zero() {
            return Err(SetError::ZeroNormal);
        }
        Ok(Halfspace { normal, offset })
    }

    pub fn normal(&self) -> &Point<T> {
        &self.normal
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    pub fn dim(&self) -> usize {
        self.normal.dim()
    }

    /// `⟨a, x⟩ − b`; positive means `x` lies outside.
    pub fn violation(&self, x: &Point<T>) -> T {
        self.normal.dot(x) - self.offset
    }

    pub fn contains(&self, x: &Point<T>, tol: T) -> bool {
        self.violation(x) <= tol
    }

    pub fn project(&self, x: &Point<T>) -> Point<T> {
        let v = self.violation(x);
        if v <= T::zero() {
            x.clone()
        } else {
            x.add_scaled(-v / self.normal.norm_sq(), &self.normal)
        }
    }

    /// Feasibility slack used when deciding whether a computed point lies in
    /// the halfspace: `tol` in distance units, relative to the magnitudes involved.
    pub(crate) fn slack(&self, x: &Point<T>, tol: T) -> T {
        let an = self.normal.norm();
        tol * (an * (T::one() + x.norm()) + self.offset.abs())
    }
}

/// Closed convex constraint set with an exact projection.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexSet<T> {
    WholeSpace,
    Box { lower: Point<T>, upper: Point<T> },
    Ball { center: Point<T>, radius: T },
    Halfspace(Halfspace<T>),
    Hyperplane { normal: Point<T>, offset: T },
    /// Intersection of halfspaces, certified nonempty by a stored witness.
    Polyhedron { cuts: Vec<Halfspace<T>>, witness: Point<T> },
}

impl<T: Scalar> ConvexSet<T> {
    pub fn boxed(lower: Point<T>, upper: Point<T>) -> Result<Self, SetError> {
        if lower.dim() != upper.dim() {
            return Err(SetError::DimensionMismatch { expected: lower.dim(), found: upper.dim() });
        }
        if !lower.is_finite() || !upper.is_finite() {
            return Err(SetError::NonFinite);
        }
        if lower.iter().zip(upper.iter()).any(|(l, u)| l > u) {
            return Err(SetError::InvertedBox);
        }
        Ok(ConvexSet::Box { lower, upper })
    }

    /// Box `[-r, r]^dim`.
    pub fn cube(dim: usize, half_width: T) -> Result<Self, SetError> {
        Self::boxed(
            Point::from(vec![-half_width; dim]),
            Point::from(vec![half_width; dim]),
        )
    }

    pub fn ball(center: Point<T>, radius: T) -> Result<Self, SetError> {
        if !center.is_finite() || !radius.is_finite() {
            return Err(SetError::NonFinite);
        }
        if radius < T::zero() {
            return Err(SetError::NegativeRadius);
        }
        Ok(ConvexSet::Ball { center, radius })
    }

    pub fn halfspace(normal: Point<T>, offset: T) -> Result<Self, SetError> {
        Halfspace::new(normal, offset).map(ConvexSet::Halfspace)
    }

    pub fn hyperplane(normal: Point<T>, offset: T) -> Result<Self, SetError> {
        // same validation as a halfspace
        let h = Halfspace::new(normal, offset)?;
        Ok(ConvexSet::Hyperplane { normal: h.normal, offset: h.offset })
    }

    /// Polyhedron with a feasible witness; fails if the witness violates a cut
    /// by more than `1e-9` (relative).
    pub fn polyhedron(cuts: Vec<Halfspace<T>>, witness: Point<T>) -> Result<Self, SetError> {
        if let Some(c) = cuts.iter().find(|c| c.dim() != witness.dim()) {
            return Err(SetError::DimensionMismatch { expected: witness.dim(), found: c.dim() });
        }
        let tol = T::of(1e-9);
        if cuts.iter().any(|c| c.violation(&witness) > c.slack(&witness, tol)) {
            return Err(SetError::EmptyPolyhedron);
        }
        Ok(ConvexSet::Polyhedron { cuts, witness })
    }

    /// Ambient dimension, or `None` for the whole space.
    pub fn dim(&self) -> Option<usize> {
        match self {
            ConvexSet::WholeSpace => None,
            ConvexSet::Box { lower, .. } => Some(lower.dim()),
            ConvexSet::Ball { center, .. } => Some(center.dim()),
            ConvexSet::Halfspace(h) => Some(h.dim()),
            ConvexSet::Hyperplane { normal, .. } => Some(normal.dim()),
            ConvexSet::Polyhedron { witness, .. } => Some(witness.dim()),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ConvexSet::WholeSpace => "whole_space",
            ConvexSet::Box { .. } => "box",
            ConvexSet::Ball { .. } => "ball",
            ConvexSet::Halfspace(_) => "halfspace",
            ConvexSet::Hyperplane { .. } => "hyperplane",
            ConvexSet::Polyhedron { .. } => "polyhedron",
        }
    }

    fn check_dim(&self, x: &Point<T>) -> Result<(), SetError> {
        match self.dim() {
            Some(d) if d != x.dim() => Err(SetError::DimensionMismatch { expected: d, found: x.dim() }),
            _ => Ok(()),
        }
    }

    /// Metric projection `P_C(x)`.
    pub fn project(&self, x: &Point<T>) -> Result<Point<T>, SetError> {
        self.check_dim(x)?;
        Ok(match self {
            ConvexSet::WholeSpace => x.clone(),
            ConvexSet::Box { lower, upper } => Point::from(
                x.iter()
                    .zip(lower.iter().zip(upper.iter()))
                    .map(|(&v, (&l, &u))| v.max(l).min(u))
                    .collect::<Vec<T>>(),
            ),
            ConvexSet::Ball { center, radius } => {
                let d = x - center;
                let r = d.norm();
                if r <= *radius {
                    x.clone()
                } else {
                    center.add_scaled(*radius / r, &d)
                }
            }
            ConvexSet::Halfspace(h) => h.project(x),
            ConvexSet::Hyperplane { normal, offset } => {
                let v = normal.dot(x) - *offset;
                x.add_scaled(-v / normal.norm_sq(), normal)
            }
            ConvexSet::Polyhedron { cuts, .. } => {
                project_halfspace_intersection(cuts, x, T::of(1e-12))?
            }
        })
    }

    /// True iff `x` violates each defining constraint by at most `tol`.
    pub fn contains(&self, x: &Point<T>, tol: T) -> bool {
        if self.check_dim(x).is_err() {
            return false;
        }
        match self {
            ConvexSet::WholeSpace => true,
            ConvexSet::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper.iter()))
                .all(|(&v, (&l, &u))| v >= l - tol && v <= u + tol),
            ConvexSet::Ball { center, radius } => x.dist(center) <= *radius + tol,
            ConvexSet::Halfspace(h) => h.contains(x, tol),
            ConvexSet::Hyperplane { normal, offset } => (normal.dot(x) - *offset).abs() <= tol,
            ConvexSet::Polyhedron { cuts, .. } => cuts.iter().all(|c| c.contains(x, tol)),
        }
    }

    /// Halfspace description for polyhedral sets, `None` for balls.
    pub fn as_halfspaces(&self) -> Option<Vec<Halfspace<T>>> {
        match self {
            ConvexSet::WholeSpace => Some(Vec::new()),
            ConvexSet::Box { lower, upper } => {
                let n = lower.dim();
                let mut out = Vec::with_capacity(2 * n);
                for i in 0..n {
                    let e = Point::unit(n, i);
                    out.push(Halfspace { normal: e.clone(), offset: upper[i] });
                    out.push(Halfspace { normal: -&e, offset: -lower[i] });
                }
                Some(out)
            }
            ConvexSet::Ball { .. } => None,
            ConvexSet::Halfspace(h) => Some(vec![h.clone()]),
            ConvexSet::Hyperplane { normal, offset } => Some(vec![
                Halfspace { normal: normal.clone(), offset: *offset },
                Halfspace { normal: -normal, offset: -*offset },
            ]),
            ConvexSet::Polyhedron { cuts, .. } => Some(cuts.clone()),
        }
    }

    pub fn is_polyhedral(&self) -> bool {
        !matches!(self, ConvexSet::Ball { .. })
    }
}

/// Projects `x0` onto the intersection of `cuts`.
///
/// Up to [`EXACT_CUT_LIMIT`] cuts, every linearly independent subset of
/// constraints is treated as a candidate active set: the equality-constrained
/// projection is solved from its Gram system and the feasible candidate closest
/// to `x0` is returned. Feasibility is judged with `tol` in distance units.
/// Larger systems, or systems where every candidate is numerically rejected, go
/// through Dykstra's alternating projections until a full sweep moves the point
/// by at most `tol`.
pub fn project_halfspace_intersection<T: Scalar>(
    cuts: &[Halfspace<T>],
    x0: &Point<T>,
    tol: T,
) -> Result<Point<T>, SetError> {
    if let Some(c) = cuts.iter().find(|c| c.dim() != x0.dim()) {
        return Err(SetError::DimensionMismatch { expected: x0.dim(), found: c.dim() });
    }
    if is_feasible(cuts, x0, tol) {
        return Ok(x0.clone());
    }
    // unit normals keep the Gram systems well scaled when cut magnitudes differ
    let cuts: Vec<Halfspace<T>> = cuts
        .iter()
        .map(|c| {
            let s = c.normal.norm().recip();
            Halfspace { normal: c.normal.scale(s), offset: c.offset * s }
        })
        .collect();
    let cuts = cuts.as_slice();
    if cuts.len() <= EXACT_CUT_LIMIT {
        if let Some(p) = enumerate_active_sets(cuts, x0, tol) {
            return Ok(p);
        }
    }
    dykstra(cuts, x0, tol)
}

fn is_feasible<T: Scalar>(cuts: &[Halfspace<T>], x: &Point<T>, tol: T) -> bool {
    cuts.iter().all(|c| c.violation(x) <= c.slack(x, tol))
}

/// Projection onto `{z : ⟨a_i, z⟩ = b_i, i ∈ active}`, or `None` when the
/// active normals are (numerically) linearly dependent.
fn project_onto_active<T: Scalar>(
    cuts: &[Halfspace<T>],
    active: &[usize],
    x0: &Point<T>,
) -> Option<Point<T>> {
    let k = active.len();
    let mut gram = Matrix::zeros(k, k);
    let mut rhs = Vec::with_capacity(k);
    for (r, &i) in active.iter().enumerate() {
        for (c, &j) in active.iter().enumerate() {
            gram[(r, c)] = cuts[i].normal.dot(&cuts[j].normal);
        }
        rhs.push(cuts[i].violation(x0));
    }
    let mult = solve_linear(&gram, &rhs, T::of(1e-12))?;
    let mut z = x0.clone();
    for (&i, &m) in active.iter().zip(&mult) {
        z.axpy(-m, &cuts[i].normal);
    }
    Some(z)
}

fn enumerate_active_sets<T: Scalar>(
    cuts: &[Halfspace<T>],
    x0: &Point<T>,
    tol: T,
) -> Option<Point<T>> {
    let m = cuts.len();
    let max_active = m.min(x0.dim());
    let mut best: Option<(T, Point<T>)> = None;
    let mut active = Vec::with_capacity(max_active);
    for mask in 1u32..(1u32 << m) {
        if mask.count_ones() as usize > max_active {
            continue;
        }
        active.clear();
        active.extend((0..m).filter(|&i| mask & (1 << i) != 0));
        let Some(z) = project_onto_active(cuts, &active, x0) else { continue };
        if !is_feasible(cuts, &z, tol) {
            continue;
        }
        let d = z.dist_sq(x0);
        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, z));
        }
    }
    best.map(|(_, z)| z)
}

fn dykstra<T: Scalar>(cuts: &[Halfspace<T>], x0: &Point<T>, tol: T) -> Result<Point<T>, SetError> {
    let mut x = x0.clone();
    let mut increments = vec![Point::zeros(x0.dim()); cuts.len()];
    let scale = T::one()
        + x0.norm()
        + cuts.iter().fold(T::zero(), |m, c| m.max(c.offset.abs() / c.normal.norm()));
    let blowup = T::of(1e12) * scale;
    for _ in 0..DYKSTRA_MAX_SWEEPS {
        let start = x.clone();
        // x can stall for a sweep while the increments still shift
        let mut shift = T::zero();
        for (cut, p) in cuts.iter().zip(increments.iter_mut()) {
            let y = &x + p;
            let next = cut.project(&y);
            let p_next = &y - &next;
            shift += p_next.dist_sq(p);
            *p = p_next;
            x = next;
        }
        if increments.iter().any(|p| p.norm() > blowup) || !x.is_finite() {
            return Err(SetError::InconsistentCuts("Dykstra increments diverged".into()));
        }
        if x.dist(&start) <= tol * scale && shift.sqrt() <= tol * scale && is_feasible(cuts, &x, tol.sqrt()) {
            return Ok(x);
        }
    }
    Err(SetError::InconsistentCuts(format!(
        "Dykstra did not settle within {DYKSTRA_MAX_SWEEPS} sweeps"
    )))
}
