//! The separating cut `H_n`, the anchor cut `W_n`, and the projection of the
//! starting point onto their intersection.

use crate::error::SetError;
use crate::linalg::{solve_linear, Matrix};
use crate::point::Point;
use crate::scalar::Scalar;
use crate::sets::{project_halfspace_intersection, Halfspace};

/// Feasibility tolerance, in distance units, for the step-3 projections.
pub fn default_cut_tol<T: Scalar>() -> T {
    T::epsilon() * T::of(4.0)
}

/// A cut is either a proper halfspace or vacuous.
#[derive(Debug, Clone, PartialEq)]
pub enum Cut<T> {
    Halfspace(Halfspace<T>),
    WholeSpace,
}

impl<T: Scalar> Cut<T> {
    pub fn halfspace(&self) -> Option<&Halfspace<T>> {
        match self {
            Cut::Halfspace(h) => Some(h),
            Cut::WholeSpace => None,
        }
    }

    pub fn is_whole_space(&self) -> bool {
        matches!(self, Cut::WholeSpace)
    }

    /// `⟨a, x⟩ − b`, or `-∞` for the vacuous cut.
    pub fn violation(&self, x: &Point<T>) -> T {
        self.halfspace().map_or(T::neg_infinity(), |h| h.violation(x))
    }

    pub fn contains(&self, x: &Point<T>, tol: T) -> bool {
        self.violation(x) <= tol
    }

    fn from_parts(normal: Point<T>, offset: T) -> Self {
        Halfspace::new(normal, offset).map_or(Cut::WholeSpace, Cut::Halfspace)
    }
}

/// `H = {z : ⟨x_n − z_n, z − v_n⟩ ≤ 0}` with `v_n = x_n + γ (z_n − x_n)`;
/// vacuous when `z_n = x_n`.
pub fn build_cut<T: Scalar>(x_n: &Point<T>, z_n: &Point<T>, gamma: T) -> Cut<T> {
    let normal = x_n - z_n;
    let v = x_n.add_scaled(-gamma, &normal);
    let offset = normal.dot(&v);
    Cut::from_parts(normal, offset)
}

/// `W = {z : ⟨x0 − x_n, x_n − z⟩ ≥ 0}`, i.e. `⟨x0 − x_n, z⟩ ≤ ⟨x0 − x_n, x_n⟩`;
/// vacuous when `x_n = x0`.
pub fn build_anchor_cut<T: Scalar>(x0: &Point<T>, x_n: &Point<T>) -> Cut<T> {
    let normal = x0 - x_n;
    let offset = normal.dot(x_n);
    Cut::from_parts(normal, offset)
}

/// Both cuts of one cyclic iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct CutPair<T> {
    pub h: Cut<T>,
    pub w: Cut<T>,
    /// `v_n = x_n + γ_n (z_n − x_n)`.
    pub v: Point<T>,
}

impl<T: Scalar> CutPair<T> {
    pub fn new(x0: &Point<T>, x_n: &Point<T>, z_n: &Point<T>, gamma: T) -> Self {
        CutPair {
            h: build_cut(x_n, z_n, gamma),
            w: build_anchor_cut(x0, x_n),
            v: x_n.add_scaled(gamma, &(z_n - x_n)),
        }
    }

    pub fn degenerate_h(&self) -> bool {
        self.h.is_whole_space()
    }

    pub fn degenerate_w(&self) -> bool {
        self.w.is_whole_space()
    }
}

/// Which branch of the explicit two-cut formula produced the projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionPath {
    /// `x0` already lies in both cuts.
    Inside,
    /// Projecting onto one cut lands in the other.
    SingleCut,
    /// Both cuts active; two-by-two system.
    TwoByTwo,
    /// Nearly parallel normals or inconsistent multipliers; generic active-set projection.
    Fallback,
}

/// Exact projection of `x0` onto `h ∩ w`.
pub fn project_two_halfspaces<T: Scalar>(
    x0: &Point<T>,
    h: &Cut<T>,
    w: &Cut<T>,
    tol: T,
) -> Result<Point<T>, SetError> {
    project_two_halfspaces_traced(x0, h, w, tol).map(|(p, _)| p)
}

/// [`project_two_halfspaces`] plus the branch taken.
///
/// The single-cut branch uses the hyperplane formula
/// `x0 − (⟨a, x0⟩ − b)/‖a‖² a` only when `x0` violates `h`. The two-cut
/// branch writes `x = x0 + t₁ a_h + t₂ a_w` and solves
///
/// ```text
/// t₁‖a_h‖²     + t₂⟨a_h, a_w⟩ = b_h − ⟨a_h, x0⟩
/// t₁⟨a_h, a_w⟩ + t₂‖a_w‖²     = b_w − ⟨a_w, x0⟩
/// ```
///
/// which for the anchor cut `a_w = x0 − x_n` is the system in `x_n − z_n`,
/// `x0 − x_n` with right-hand side `(−⟨x0 − v_n, x_n − z_n⟩, −‖x0 − x_n‖²)`.
pub fn project_two_halfspaces_traced<T: Scalar>(
    x0: &Point<T>,
    h: &Cut<T>,
    w: &Cut<T>,
    tol: T,
) -> Result<(Point<T>, ProjectionPath), SetError> {
    let inside = |c: &Cut<T>, x: &Point<T>| match c {
        Cut::WholeSpace => true,
        Cut::Halfspace(hs) => hs.violation(x) <= hs.slack(x, tol),
    };
    if h.violation(x0) <= T::zero() && w.violation(x0) <= T::zero() {
        return Ok((x0.clone(), ProjectionPath::Inside));
    }
    let on_h = match h {
        Cut::Halfspace(hs) => hs.project(x0),
        Cut::WholeSpace => x0.clone(),
    };
    if inside(w, &on_h) {
        return Ok((on_h, ProjectionPath::SingleCut));
    }
    let present: Vec<Halfspace<T>> = [h, w].into_iter().filter_map(|c| c.halfspace().cloned()).collect();
    if let (Cut::Halfspace(hh), Cut::Halfspace(ww)) = (h, w) {
        let on_w = ww.project(x0);
        if inside(h, &on_w) {
            return Ok((on_w, ProjectionPath::SingleCut));
        }
        let (ah, aw) = (hh.normal(), ww.normal());
        let mut gram = Matrix::zeros(2, 2);
        gram[(0, 0)] = ah.norm_sq();
        gram[(0, 1)] = ah.dot(aw);
        gram[(1, 0)] = gram[(0, 1)];
        gram[(1, 1)] = aw.norm_sq();
        let det = gram[(0, 0)] * gram[(1, 1)] - gram[(0, 1)] * gram[(0, 1)];
        let well_posed = det > T::epsilon() * gram[(0, 0)] * gram[(1, 1)];
        let rhs = [hh.offset() - ah.dot(x0), ww.offset() - aw.dot(x0)];
        if let Some(t) = well_posed.then(|| solve_linear(&gram, &rhs, T::epsilon())).flatten() {
            // both multipliers −t must be nonnegative for the two-active solution to be the projection
            let mut x = x0.add_scaled(t[0], ah);
            x.axpy(t[1], aw);
            let scale = tol * (T::one() + x0.norm());
            if t[0] <= scale && t[1] <= scale && inside(h, &x) && inside(w, &x) {
                return Ok((x, ProjectionPath::TwoByTwo));
            }
        }
    }
    project_halfspace_intersection(&present, x0, tol).map(|p| (p, ProjectionPath::Fallback))
}
