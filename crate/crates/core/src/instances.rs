//! Builders for the problem families that specialise the common-solution
//! problem: convex feasibility, common variational inequalities, common fixed
//! points, and the oligopoly (Nash–Cournot) equilibrium family.

use crate::bifunctions::{AffineOperatorBifunction, NashCournotBifunction, ZeroBifunction};
use crate::error::ModelError;
use crate::linalg::{solve_particular, Matrix};
use crate::model::{
    check_lipschitz_type_sampled, Bifunction, CsepInstance, Subproblem, LIPSCHITZ_CHECK_TOL,
};
use crate::point::Point;
use crate::scalar::Scalar;
use crate::sets::ConvexSet;

/// Triples sampled by the build-time Lipschitz-type certificate.
pub const LIPSCHITZ_SAMPLES: usize = 10_000;
const LIPSCHITZ_SEED: u64 = 0x5eeda2;
const LIPSCHITZ_HALF_WIDTH: f64 = 10.0;
/// Samples used to certify a recorded known solution.
pub const SOLUTION_SAMPLES: usize = 500;
const SOLUTION_SEED: u64 = 0x5eed50;

/// Affine operator `A(x) = M x + q` on constraint set `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearViOperator<T> {
    pub matrix: Matrix<T>,
    pub shift: Point<T>,
    pub set: ConvexSet<T>,
    /// Declared `(c1, c2)`; defaults to `(‖M‖/2, ‖M‖/2)`.
    pub constants: Option<(T, T)>,
}

impl<T: Scalar> LinearViOperator<T> {
    pub fn new(matrix: Matrix<T>, shift: Point<T>, set: ConvexSet<T>) -> Self {
        LinearViOperator { matrix, shift, set, constants: None }
    }
}

/// Affine map `S(x) = C x + d`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap<T> {
    pub linear: Matrix<T>,
    pub offset: Point<T>,
}

impl<T: Scalar> AffineMap<T> {
    pub fn apply(&self, x: &Point<T>) -> Point<T> {
        &self.linear.mul_vec(x) + &self.offset
    }

    /// `p + C (x − p)`: a map with fixed point `p`.
    pub fn around(center: &Point<T>, linear: Matrix<T>) -> Self {
        let offset = center - &linear.mul_vec(center);
        AffineMap { linear, offset }
    }
}

/// Serializable description of a generated instance.
#[derive(Debug, Clone, PartialEq)]
pub enum InstanceRecipe<T> {
    Cfp { sets: Vec<ConvexSet<T>>, witness: Point<T> },
    LinearVi { operators: Vec<LinearViOperator<T>> },
    FixedPoint { maps: Vec<AffineMap<T>>, x0: Point<T> },
    NashCournot {
        p: Matrix<T>,
        q_mat: Matrix<T>,
        q: Point<T>,
        set: ConvexSet<T>,
        copies: usize,
        constants: Option<(T, T)>,
    },
}

impl<T: Scalar> InstanceRecipe<T> {
    pub fn build(&self) -> Result<CsepInstance<T>, ModelError> {
        match self {
            InstanceRecipe::Cfp { sets, witness } => make_cfp(sets.clone(), witness.clone()),
            InstanceRecipe::LinearVi { operators } => make_linear_vi(operators.clone()),
            InstanceRecipe::FixedPoint { maps, x0 } => make_fixed_point(maps.clone(), x0),
            InstanceRecipe::NashCournot { p, q_mat, q, set, copies, constants } => {
                make_nash_cournot_with_constants(p.clone(), q_mat.clone(), q.clone(), set.clone(), *copies, *constants)
            }
        }
    }
}

fn infer_dim<T: Scalar>(sets: &[ConvexSet<T>], witness: &Point<T>) -> Result<usize, ModelError> {
    let d = witness.dim();
    match sets.iter().filter_map(ConvexSet::dim).find(|&s| s != d) {
        Some(found) => Err(ModelError::DimensionMismatch { what: "witness".into(), expected: found, found: d }),
        None => Ok(d),
    }
}

/// Certifies the Lipschitz-type constants of `f` on seeded samples.
pub fn certify_lipschitz_type<T: Scalar>(f: &dyn Bifunction<T>, dim: usize, index: usize) -> Result<(), ModelError> {
    let worst = check_lipschitz_type_sampled(f, dim, T::of(LIPSCHITZ_HALF_WIDTH), LIPSCHITZ_SAMPLES, LIPSCHITZ_SEED);
    if worst > T::of(LIPSCHITZ_CHECK_TOL) {
        return Err(ModelError::LipschitzViolation {
            index,
            worst: worst.to_f64().unwrap_or(f64::NAN),
            c1: f.c1().to_f64().unwrap_or(f64::NAN),
            c2: f.c2().to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Convex feasibility: `f_i ≡ 0` on each set. The witness must lie in every
/// set and is recorded as a known solution.
pub fn make_cfp<T: Scalar>(sets: Vec<ConvexSet<T>>, witness: Point<T>) -> Result<CsepInstance<T>, ModelError> {
    let dim = infer_dim(&sets, &witness)?;
    if let Some(index) = sets.iter().position(|s| !s.contains(&witness, T::of(1e-9))) {
        return Err(ModelError::NoWitness { index });
    }
    let pairs = sets.into_iter().map(|s| Subproblem::new(ZeroBifunction { dim }, s)).collect();
    CsepInstance::new(dim, pairs)?.with_known_solution(witness, SOLUTION_SEED, SOLUTION_SAMPLES)
}

/// Common solutions of variational inequalities with affine operators.
///
/// `c1 = c2 = ‖M_i‖/2` unless declared; declared constants are checked by
/// sampling. Records `0` as a known solution when every shift vanishes and
/// `0` lies in every set. Pseudomonotonicity is the caller's responsibility
/// (positive semidefinite `M_i` with `q_i = 0` suffices).
pub fn make_linear_vi<T: Scalar>(operators: Vec<LinearViOperator<T>>) -> Result<CsepInstance<T>, ModelError> {
    let dim = operators.first().ok_or(ModelError::NoPairs)?.shift.dim();
    let mut pairs = Vec::with_capacity(operators.len());
    for (i, op) in operators.iter().enumerate() {
        if !op.matrix.is_square() || op.matrix.rows() != dim || op.shift.dim() != dim {
            return Err(ModelError::DimensionMismatch {
                what: format!("operator {i}"),
                expected: dim,
                found: op.matrix.rows().max(op.shift.dim()),
            });
        }
        if !op.matrix.is_finite() || !op.shift.is_finite() {
            return Err(ModelError::NonFinite(format!("operator {i}")));
        }
        let f = match op.constants {
            Some((c1, c2)) => AffineOperatorBifunction::with_constants(op.matrix.clone(), op.shift.clone(), c1, c2),
            None => AffineOperatorBifunction::new(op.matrix.clone(), op.shift.clone()),
        };
        if op.constants.is_some() {
            certify_lipschitz_type(&f, dim, i)?;
        }
        pairs.push(Subproblem::new(f, op.set.clone()));
    }
    let instance = CsepInstance::new(dim, pairs)?;
    let origin = Point::zeros(dim);
    let zero_is_solution = operators.iter().all(|op| op.shift.max_abs() == T::zero())
        && operators.iter().all(|op| op.set.contains(&origin, T::zero()));
    if zero_is_solution {
        instance.with_known_solution(origin, SOLUTION_SEED, SOLUTION_SAMPLES)
    } else {
        Ok(instance)
    }
}

/// Common fixed points of nonexpansive affine maps through
/// `f_i(x, y) = ⟨x − S_i x, y − x⟩`.
///
/// Each `K_i` is the box `[-R, R]^n` with `R = 10 · max(1, ‖x0‖∞, ‖p‖∞)`,
/// where `p` is a common fixed point found by solving the stacked system
/// `(I − C_i) p = d_i`; `p` is recorded as a known solution.
pub fn make_fixed_point<T: Scalar>(maps: Vec<AffineMap<T>>, x0: &Point<T>) -> Result<CsepInstance<T>, ModelError> {
    let dim = x0.dim();
    if maps.is_empty() {
        return Err(ModelError::NoPairs);
    }
    let eye = Matrix::identity(dim);
    let mut normal = Matrix::zeros(dim, dim);
    let mut rhs = Point::zeros(dim);
    for (index, m) in maps.iter().enumerate() {
        if !m.linear.is_square() || m.linear.rows() != dim || m.offset.dim() != dim {
            return Err(ModelError::DimensionMismatch { what: format!("map {index}"), expected: dim, found: m.offset.dim() });
        }
        let norm = m.linear.operator_norm();
        if norm > T::one() + T::of(1e-12) {
            return Err(ModelError::ExpansiveMap { index, norm: norm.to_f64().unwrap_or(f64::NAN) });
        }
        let a = eye.sub(&m.linear);
        normal = normal.add(&a.transpose().matmul(&a));
        rhs = &rhs + &a.transpose_mul_vec(&m.offset);
    }
    let p = Point::from(solve_particular(&normal, rhs.as_slice(), T::of(1e-12)));
    let fixed_tol = T::of(1e-9) * (T::one() + p.max_abs());
    if !p.is_finite() || maps.iter().any(|m| m.apply(&p).dist(&p) > fixed_tol) {
        return Err(ModelError::NoCommonFixedPoint);
    }
    let radius = T::of(10.0) * T::one().max(x0.max_abs()).max(p.max_abs());
    let bounding = ConvexSet::cube(dim, radius)?;
    let pairs = maps
        .iter()
        .map(|m| {
            let f = AffineOperatorBifunction::new(eye.sub(&m.linear), -&m.offset);
            Subproblem::new(f, bounding.clone())
        })
        .collect();
    CsepInstance::new(dim, pairs)?.with_known_solution(p, SOLUTION_SEED, SOLUTION_SAMPLES)
}

/// `f(x, y) = ⟨P x + Q y + q, y − x⟩` on a box, replicated `copies` times.
pub fn make_nash_cournot<T: Scalar>(
    p: Matrix<T>,
    q_mat: Matrix<T>,
    q: Point<T>,
    set: ConvexSet<T>,
    copies: usize,
) -> Result<CsepInstance<T>, ModelError> {
    make_nash_cournot_with_constants(p, q_mat, q, set, copies, None)
}

/// [`make_nash_cournot`] with optionally declared `(c1, c2)`. Requires `Q ⪰ 0`
/// and `P − Q ⪰ 0` (symmetric parts) and always runs the sampled
/// Lipschitz-type certificate.
pub fn make_nash_cournot_with_constants<T: Scalar>(
    p: Matrix<T>,
    q_mat: Matrix<T>,
    q: Point<T>,
    set: ConvexSet<T>,
    copies: usize,
    constants: Option<(T, T)>,
) -> Result<CsepInstance<T>, ModelError> {
    let dim = q.dim();
    for (what, m) in [("P", &p), ("Q", &q_mat)] {
        if !m.is_square() || m.rows() != dim {
            return Err(ModelError::DimensionMismatch { what: what.into(), expected: dim, found: m.rows() });
        }
        if !m.is_finite() {
            return Err(ModelError::NonFinite(what.into()));
        }
    }
    if !matches!(set, ConvexSet::Box { .. }) {
        return Err(ModelError::Condition(format!("oligopoly strategy set must be a box, got {}", set.kind())));
    }
    if copies == 0 {
        return Err(ModelError::NoPairs);
    }
    if !q_mat.is_psd() {
        return Err(ModelError::Condition("Q must be positive semidefinite".into()));
    }
    if !p.sub(&q_mat).is_psd() {
        return Err(ModelError::Condition("Q − P must be negative semidefinite".into()));
    }
    let f = match constants {
        Some((c1, c2)) => NashCournotBifunction::with_constants(p, q_mat, q, c1, c2),
        None => NashCournotBifunction::new(p, q_mat, q),
    };
    certify_lipschitz_type(&f, dim, 0)?;
    let pairs = (0..copies).map(|_| Subproblem::new(f.clone(), set.clone())).collect();
    CsepInstance::new(dim, pairs)
}

/// Shift `q = −(P + Q) x*` that makes an interior `x*` an equilibrium of the
/// oligopoly bifunction.
pub fn nash_cournot_shift<T: Scalar>(p: &Matrix<T>, q_mat: &Matrix<T>, solution: &Point<T>) -> Point<T> {
    -&p.add(q_mat).mul_vec(solution)
}

/// Reference instances with their starting points and step sizes, used by the
/// test suites and mirrored by the CLI fixtures.
pub mod shipped {
    use super::*;

    #[derive(Debug, Clone)]
    pub struct ShippedInstance<T> {
        pub name: &'static str,
        pub recipe: InstanceRecipe<T>,
        pub instance: CsepInstance<T>,
        pub x0: Point<T>,
        pub lambda: T,
    }

    fn pt<T: Scalar>(v: &[f64]) -> Point<T> {
        v.iter().map(|&c| T::of(c)).collect::<Vec<T>>().into()
    }

    fn mat<T: Scalar>(rows: &[&[f64]]) -> Matrix<T> {
        let rows: Vec<Vec<T>> = rows.iter().map(|r| r.iter().map(|&c| T::of(c)).collect()).collect();
        Matrix::from_rows(&rows).expect("rectangular")
    }

    /// `{z₁ ≤ 0}`, `{z₂ ≤ 0}` in R² from `x0 = (1, 1)`; `P_F(x0) = 0`.
    pub fn two_halfspace_cfp<T: Scalar>() -> ShippedInstance<T> {
        let sets = vec![
            ConvexSet::halfspace(pt(&[1.0, 0.0]), T::zero()).unwrap(),
            ConvexSet::halfspace(pt(&[0.0, 1.0]), T::zero()).unwrap(),
        ];
        let recipe = InstanceRecipe::Cfp { sets, witness: pt(&[0.0, 0.0]) };
        ShippedInstance {
            name: "cfp_two_halfspaces",
            instance: recipe.build().unwrap(),
            recipe,
            x0: pt(&[1.0, 1.0]),
            lambda: T::one(),
        }
    }

    /// `I + S_i / 10` for a symmetric, a rotational and a diagonal `S_i`.
    pub fn csvip_matrices<T: Scalar>() -> Vec<Matrix<T>> {
        let perturbations: [[[f64; 5]; 5]; 3] = [
            [
                [1.0, 0.3, 0.0, 0.0, 0.0],
                [0.3, -0.5, 0.2, 0.0, 0.0],
                [0.0, 0.2, 0.4, 0.1, 0.0],
                [0.0, 0.0, 0.1, -0.3, 0.2],
                [0.0, 0.0, 0.0, 0.2, 0.6],
            ],
            [
                [0.0, 1.0, 0.0, 0.0, 0.0],
                [-1.0, 0.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.5, 0.5, 0.0],
                [0.0, 0.0, -0.5, 0.0, 0.0],
                [0.0, 0.0, 0.0, 0.0, -0.5],
            ],
            [
                [-0.5, 0.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.5, 0.0, 0.0],
                [0.0, 0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 0.0, 1.5],
            ],
        ];
        perturbations
            .iter()
            .map(|s| {
                let rows: Vec<&[f64]> = s.iter().map(|r| r.as_slice()).collect();
                Matrix::identity(5).add(&mat::<T>(&rows).scale(T::of(0.1)))
            })
            .collect()
    }

    /// Three positive definite linear operators on boxes around 0 in R⁵; `F = {0}`.
    pub fn csvip_r5<T: Scalar>() -> ShippedInstance<T> {
        let boxes = [
            (vec![-1.0; 5], vec![2.0; 5]),
            (vec![-2.0, -1.0, -1.5, -1.0, -2.0], vec![1.0, 1.5, 1.0, 2.0, 1.0]),
            (vec![-1.5; 5], vec![1.5; 5]),
        ];
        let operators = csvip_matrices::<T>()
            .into_iter()
            .zip(boxes)
            .map(|(m, (lo, hi))| {
                LinearViOperator::new(m, Point::zeros(5), ConvexSet::boxed(pt(&lo), pt(&hi)).unwrap())
            })
            .collect();
        let recipe = InstanceRecipe::LinearVi { operators };
        let instance = recipe.build().unwrap();
        let lambda = T::of(0.5) / (T::two() * instance.c1().max(instance.c2()));
        ShippedInstance { name: "csvip_r5", recipe, instance, x0: pt(&[0.9, -0.6, 0.7, 0.8, -0.4]), lambda }
    }

    /// Two affine contractions in R³ sharing the fixed point `(1, −1, 2)`.
    pub fn fixed_point_pair<T: Scalar>() -> ShippedInstance<T> {
        let center: Point<T> = pt(&[1.0, -1.0, 2.0]);
        let maps = vec![
            AffineMap::around(&center, mat(&[&[0.0, -0.5, 0.0], &[0.5, 0.0, 0.0], &[0.0, 0.0, 0.5]])),
            AffineMap::around(&center, mat(&[&[0.9, 0.0, 0.0], &[0.0, 0.3, 0.0], &[0.0, 0.0, -0.5]])),
        ];
        let x0 = pt(&[3.0, 2.0, -1.0]);
        let recipe = InstanceRecipe::FixedPoint { maps, x0: x0.clone() };
        let instance = recipe.build().unwrap();
        let lambda = T::of(0.5) / (T::two() * instance.c1().max(instance.c2()));
        ShippedInstance { name: "fixed_point_pair", recipe, instance, x0, lambda }
    }

    pub fn nash_cournot_data<T: Scalar>() -> (Matrix<T>, Matrix<T>, Point<T>, Point<T>) {
        let p = mat(&[&[3.0, 1.0, 0.0], &[1.0, 3.0, 1.0], &[0.0, 1.0, 3.0]]);
        let q_mat = mat(&[&[1.0, 0.5, 0.0], &[0.5, 1.0, 0.0], &[0.0, 0.0, 0.5]]);
        let solution = pt(&[1.0, 2.0, 1.5]);
        let q = nash_cournot_shift(&p, &q_mat, &solution);
        (p, q_mat, q, solution)
    }

    /// Oligopoly bifunction on `[0, 4]³`, two copies; equilibrium `(1, 2, 1.5)`.
    pub fn nash_cournot_r3<T: Scalar>() -> ShippedInstance<T> {
        let (p, q_mat, q, solution) = nash_cournot_data::<T>();
        let set = ConvexSet::boxed(pt(&[0.0; 3]), pt(&[4.0; 3])).unwrap();
        let recipe = InstanceRecipe::NashCournot { p, q_mat, q, set, copies: 2, constants: None };
        let instance = recipe
            .build()
            .unwrap()
            .with_known_solution(solution, SOLUTION_SEED, SOLUTION_SAMPLES)
            .unwrap();
        let lambda = T::of(0.5) / (T::two() * instance.c1().max(instance.c2()));
        ShippedInstance { name: "nash_cournot_r3", recipe, instance, x0: pt(&[4.0, 0.0, 3.0]), lambda }
    }

    pub fn all<T: Scalar>() -> Vec<ShippedInstance<T>> {
        vec![two_halfspace_cfp(), csvip_r5(), fixed_point_pair(), nash_cournot_r3()]
    }
}
