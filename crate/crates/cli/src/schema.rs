//! The instance file: one JSON document with tagged set and bifunction
//! entries, matrices stored row-major as nested arrays.

use std::path::Path;
use std::sync::Arc;

use ceqp::bifunctions::{AffineOperatorBifunction, NashCournotBifunction, ZeroBifunction};
use ceqp::instances::shipped::ShippedInstance;
use ceqp::instances::{certify_lipschitz_type, AffineMap, InstanceRecipe};
use ceqp::{Bifunction, ConvexSet, CsepInstance, Halfspace, Matrix, ModelError, Point, SetError, Subproblem};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: serde_json::Error },
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
}

impl LoadError {
    fn invalid(field: impl Into<String>, message: impl ToString) -> Self {
        LoadError::Invalid { field: field.into(), message: message.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutSpec {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    WholeSpace,
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    Halfspace { normal: Vec<f64>, offset: f64 },
    Hyperplane { normal: Vec<f64>, offset: f64 },
    Polyhedron { cuts: Vec<CutSpec>, witness: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BifunctionSpec {
    /// `f ≡ 0`.
    Zero,
    /// `f(x, y) = ⟨M x + q, y − x⟩`. Omitted constants default to `‖M‖/2`;
    /// `lipschitz: L` declares `c₁ = c₂ = L/2`.
    Linear {
        matrix: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        shift: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lipschitz: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c1: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c2: Option<f64>,
    },
    /// `f(x, y) = ⟨x − S x, y − x⟩` with `S x = C x + d`, `‖C‖ ≤ 1`.
    FixedPoint { linear: Vec<Vec<f64>>, offset: Vec<f64> },
    /// `f(x, y) = ⟨P x + Q y + q, y − x⟩`.
    NashCournot {
        p: Vec<Vec<f64>>,
        q_mat: Vec<Vec<f64>>,
        q: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c1: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c2: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub dimension: usize,
    pub sets: Vec<SetSpec>,
    pub bifunctions: Vec<BifunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_solution: Option<Vec<f64>>,
    /// Default starting point; zeros when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    /// Default constant step size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

/// A loaded instance with the file's run defaults.
#[derive(Debug, Clone)]
pub struct LoadedInstance {
    pub instance: CsepInstance<f64>,
    pub x0: Option<Point<f64>>,
    pub lambda: Option<f64>,
}

fn vector(field: &str, v: &[f64], dim: usize) -> Result<Point<f64>, LoadError> {
    if v.len() != dim {
        return Err(LoadError::invalid(field, format!("expected {dim} entries, found {}", v.len())));
    }
    if v.iter().any(|c| !c.is_finite()) {
        return Err(LoadError::invalid(field, "non-finite entry"));
    }
    Ok(Point::from_slice(v))
}

fn matrix(field: &str, rows: &[Vec<f64>], dim: usize) -> Result<Matrix<f64>, LoadError> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(LoadError::invalid(field, format!("expected a {dim}×{dim} matrix")));
    }
    let m = Matrix::from_rows(rows).ok_or_else(|| LoadError::invalid(field, "ragged rows"))?;
    if !m.is_finite() {
        return Err(LoadError::invalid(field, "non-finite entry"));
    }
    Ok(m)
}

fn set_error(field: &str, e: SetError) -> LoadError {
    LoadError::invalid(field, e)
}

impl SetSpec {
    pub fn build(&self, field: &str, dim: usize) -> Result<ConvexSet<f64>, LoadError> {
        let f = |name: &str| format!("{field}.{name}");
        match self {
            SetSpec::WholeSpace => Ok(ConvexSet::WholeSpace),
            SetSpec::Box { lower, upper } => {
                ConvexSet::boxed(vector(&f("lower"), lower, dim)?, vector(&f("upper"), upper, dim)?)
                    .map_err(|e| set_error(field, e))
            }
            SetSpec::Ball { center, radius } => {
                ConvexSet::ball(vector(&f("center"), center, dim)?, *radius).map_err(|e| set_error(field, e))
            }
            SetSpec::Halfspace { normal, offset } => {
                ConvexSet::halfspace(vector(&f("normal"), normal, dim)?, *offset).map_err(|e| set_error(field, e))
            }
            SetSpec::Hyperplane { normal, offset } => {
                ConvexSet::hyperplane(vector(&f("normal"), normal, dim)?, *offset).map_err(|e| set_error(field, e))
            }
            SetSpec::Polyhedron { cuts, witness } => {
                let cuts = cuts
                    .iter()
                    .enumerate()
                    .map(|(k, c)| {
                        let name = f(&format!("cuts[{k}]"));
                        Halfspace::new(vector(&format!("{name}.normal"), &c.normal, dim)?, c.offset)
                            .map_err(|e| set_error(&name, e))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                ConvexSet::polyhedron(cuts, vector(&f("witness"), witness, dim)?).map_err(|e| set_error(field, e))
            }
        }
    }

    pub fn from_set(set: &ConvexSet<f64>) -> Self {
        let v = |p: &Point<f64>| p.as_slice().to_vec();
        match set {
            ConvexSet::WholeSpace => SetSpec::WholeSpace,
            ConvexSet::Box { lower, upper } => SetSpec::Box { lower: v(lower), upper: v(upper) },
            ConvexSet::Ball { center, radius } => SetSpec::Ball { center: v(center), radius: *radius },
            ConvexSet::Halfspace(h) => SetSpec::Halfspace { normal: v(h.normal()), offset: h.offset() },
            ConvexSet::Hyperplane { normal, offset } => SetSpec::Hyperplane { normal: v(normal), offset: *offset },
            ConvexSet::Polyhedron { cuts, witness } => SetSpec::Polyhedron {
                cuts: cuts.iter().map(|c| CutSpec { normal: v(c.normal()), offset: c.offset() }).collect(),
                witness: v(witness),
            },
        }
    }
}

fn declared(field: &str, c1: Option<f64>, c2: Option<f64>) -> Result<Option<(f64, f64)>, LoadError> {
    match (c1, c2) {
        (None, None) => Ok(None),
        (Some(a), Some(b)) if a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite() => Ok(Some((a, b))),
        (Some(_), Some(_)) => Err(LoadError::invalid(field, "c1 and c2 must be finite and nonnegative")),
        _ => Err(LoadError::invalid(field, "declare both c1 and c2 or neither")),
    }
}

impl BifunctionSpec {
    pub fn build(&self, field: &str, index: usize, dim: usize) -> Result<Box<dyn Bifunction<f64>>, LoadError> {
        let f = |name: &str| format!("{field}.{name}");
        let lipschitz_failure = |e: ModelError| LoadError::invalid(field, e);
        match self {
            BifunctionSpec::Zero => Ok(Box::new(ZeroBifunction { dim })),
            BifunctionSpec::Linear { matrix: m, shift, lipschitz, c1, c2 } => {
                let m = matrix(&f("matrix"), m, dim)?;
                let q = match shift {
                    Some(q) => vector(&f("shift"), q, dim)?,
                    None => Point::zeros(dim),
                };
                let constants = match (lipschitz, declared(field, *c1, *c2)?) {
                    (Some(_), Some(_)) => return Err(LoadError::invalid(field, "give either lipschitz or c1/c2")),
                    (Some(l), None) if *l >= 0.0 && l.is_finite() => Some((l / 2.0, l / 2.0)),
                    (Some(_), None) => return Err(LoadError::invalid(f("lipschitz"), "must be finite and nonnegative")),
                    (None, c) => c,
                };
                let g = match constants {
                    Some((a, b)) => AffineOperatorBifunction::with_constants(m, q, a, b),
                    None => AffineOperatorBifunction::new(m, q),
                };
                if constants.is_some() {
                    certify_lipschitz_type(&g, dim, index).map_err(lipschitz_failure)?;
                }
                Ok(Box::new(g))
            }
            BifunctionSpec::FixedPoint { linear, offset } => {
                let c = matrix(&f("linear"), linear, dim)?;
                let d = vector(&f("offset"), offset, dim)?;
                let norm = c.operator_norm();
                if norm > 1.0 + 1e-12 {
                    return Err(LoadError::invalid(f("linear"), format!("map is expansive: ‖C‖ = {norm}")));
                }
                Ok(Box::new(AffineOperatorBifunction::new(Matrix::identity(dim).sub(&c), -&d)))
            }
            BifunctionSpec::NashCournot { p, q_mat, q, c1, c2 } => {
                let p = matrix(&f("p"), p, dim)?;
                let qm = matrix(&f("q_mat"), q_mat, dim)?;
                let q = vector(&f("q"), q, dim)?;
                if !qm.is_psd() {
                    return Err(LoadError::invalid(f("q_mat"), "Q must be positive semidefinite"));
                }
                if !p.sub(&qm).is_psd() {
                    return Err(LoadError::invalid(field, "Q − P must be negative semidefinite"));
                }
                let g = match declared(field, *c1, *c2)? {
                    Some((a, b)) => NashCournotBifunction::with_constants(p, qm, q, a, b),
                    None => NashCournotBifunction::new(p, qm, q),
                };
                certify_lipschitz_type(&g, dim, index).map_err(lipschitz_failure)?;
                Ok(Box::new(g))
            }
        }
    }
}

impl InstanceFile {
    pub fn parse(text: &str, path: &str) -> Result<Self, LoadError> {
        serde_json::from_str(text).map_err(|source| LoadError::Parse { path: path.into(), source })
    }

    /// Builds the instance, running the sampled Lipschitz-type certificate
    /// where required and certifying `known_solution` with `seed`.
    pub fn build(&self, seed: u64) -> Result<LoadedInstance, LoadError> {
        let dim = self.dimension;
        if dim == 0 {
            return Err(LoadError::invalid("dimension", "must be positive"));
        }
        if self.sets.len() != self.bifunctions.len() {
            return Err(LoadError::invalid(
                "bifunctions",
                format!("{} bifunctions for {} sets", self.bifunctions.len(), self.sets.len()),
            ));
        }
        let mut pairs = Vec::with_capacity(self.sets.len());
        for (i, (s, b)) in self.sets.iter().zip(&self.bifunctions).enumerate() {
            let set = s.build(&format!("sets[{i}]"), dim)?;
            if let BifunctionSpec::NashCournot { .. } = b {
                if !matches!(set, ConvexSet::Box { .. }) {
                    return Err(LoadError::invalid(format!("sets[{i}]"), "oligopoly strategy set must be a box"));
                }
            }
            let f = b.build(&format!("bifunctions[{i}]"), i, dim)?;
            pairs.push(Subproblem { bifunction: Arc::from(f), set });
        }
        let mut instance = CsepInstance::new(dim, pairs).map_err(|e| LoadError::invalid("instance", e))?;
        if let Some(sol) = &self.known_solution {
            let sol = vector("known_solution", sol, dim)?;
            instance = instance
                .with_known_solution(sol, seed, 1000)
                .map_err(|e| LoadError::invalid("known_solution", e))?;
        }
        let x0 = self.x0.as_deref().map(|v| vector("x0", v, dim)).transpose()?;
        if let Some(l) = self.lambda {
            if !(l > 0.0 && l.is_finite()) {
                return Err(LoadError::invalid("lambda", "must be positive and finite"));
            }
        }
        Ok(LoadedInstance { instance, x0, lambda: self.lambda })
    }

    /// File form of a recipe, with `x0` as the default starting point.
    pub fn from_recipe(recipe: &InstanceRecipe<f64>, x0: &Point<f64>) -> Result<Self, ModelError> {
        let rows = |m: &Matrix<f64>| m.to_rows();
        let v = |p: &Point<f64>| p.as_slice().to_vec();
        let built = recipe.build()?;
        let known_solution = built.known_solutions().first().map(v);
        let sets: Vec<SetSpec> = built.pairs().iter().map(|p| SetSpec::from_set(&p.set)).collect();
        let bifunctions = match recipe {
            InstanceRecipe::Cfp { sets, .. } => vec![BifunctionSpec::Zero; sets.len()],
            InstanceRecipe::LinearVi { operators } => operators
                .iter()
                .map(|op| BifunctionSpec::Linear {
                    matrix: rows(&op.matrix),
                    shift: (op.shift.max_abs() != 0.0).then(|| v(&op.shift)),
                    lipschitz: None,
                    c1: op.constants.map(|c| c.0),
                    c2: op.constants.map(|c| c.1),
                })
                .collect(),
            InstanceRecipe::FixedPoint { maps, .. } => maps
                .iter()
                .map(|AffineMap { linear, offset }| BifunctionSpec::FixedPoint { linear: rows(linear), offset: v(offset) })
                .collect(),
            InstanceRecipe::NashCournot { p, q_mat, q, copies, constants, .. } => vec![
                BifunctionSpec::NashCournot {
                    p: rows(p),
                    q_mat: rows(q_mat),
                    q: v(q),
                    c1: constants.map(|c| c.0),
                    c2: constants.map(|c| c.1),
                };
                *copies
            ],
        };
        Ok(InstanceFile {
            dimension: built.dimension(),
            sets,
            bifunctions,
            known_solution,
            x0: Some(v(x0)),
            lambda: None,
        })
    }

    /// File form of a shipped instance, carrying its known solution and step size.
    pub fn from_shipped(shipped: &ShippedInstance<f64>) -> Result<Self, ModelError> {
        let mut file = Self::from_recipe(&shipped.recipe, &shipped.x0)?;
        file.known_solution = shipped.instance.known_solutions().first().map(|p| p.as_slice().to_vec());
        file.lambda = Some(shipped.lambda);
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance files always serialize")
    }
}

/// Reads, parses and builds an instance file.
pub fn load_instance(path: &Path, seed: u64) -> Result<LoadedInstance, LoadError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io { path: shown.clone(), source })?;
    InstanceFile::parse(&text, &shown)?.build(seed)
}
