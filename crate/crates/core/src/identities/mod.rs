//! Residual checkers for the identities, fits and classification predicates.
//!
//! Every residual is relative: the raw defect divided by one plus the
//! magnitude of the largest term of the identity.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::ambient::Riemann;
use crate::error::FrameError;
use crate::frame::{point_at, FramePoint, HypersurfaceMap, ShapeData, ShapeJet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub mod basic;
pub mod cartan;
pub mod curvature;
pub mod einstein;
pub mod fits;
pub mod isoparametric;

pub use basic::{check_basic_properties, check_frame};
pub use cartan::{check_cartan, CartanData};
pub use curvature::{check_constant_curvature_identities, check_curvature_relations};
pub use einstein::{
    check_einstein, check_einstein_structure, check_ricci_flat, einstein_fit, ricci_and_einstein,
    ricci_direct, EinsteinFit, EinsteinStructureInput,
};
pub use fits::{
    check_umbilical, fit_quasi_conformal, fit_quasi_conformal_fixed_phi, fit_with_mode, PairMode,
    QuasiConformalFit, UmbilicalFit,
};
pub use isoparametric::check_isoparametric;

pub const DEFAULT_TOLERANCE: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualRecord {
    pub identity: String,
    pub point: Vec<f64>,
    pub residual: f64,
    pub scale: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Identity tolerances: a default plus per-identity overrides. An override
/// keyed by a checker prefix (e.g. `space_form`) applies to all its identities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    #[serde(default = "default_tolerance")]
    pub default: f64,
    #[serde(flatten)]
    pub overrides: BTreeMap<String, f64>,
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { default: DEFAULT_TOLERANCE, overrides: BTreeMap::new() }
    }
}

impl Tolerances {
    pub fn uniform(tol: f64) -> Self {
        Self { default: tol, overrides: BTreeMap::new() }
    }

    pub fn get(&self, identity: &str) -> f64 {
        if let Some(t) = self.overrides.get(identity) {
            return *t;
        }
        let prefix = identity.split('.').next().unwrap_or(identity);
        self.overrides.get(prefix).copied().unwrap_or(self.default)
    }
}

/// Collects relative residuals at one point, keeping the worst value per
/// identity across repeated evaluations (random vector draws).
pub struct Recorder<'a> {
    point: Vec<f64>,
    tol: &'a Tolerances,
    entries: BTreeMap<String, (f64, f64, Option<String>)>,
    order: Vec<String>,
}

impl<'a> Recorder<'a> {
    pub fn new(point: &[f64], tol: &'a Tolerances) -> Self {
        Self { point: point.to_vec(), tol, entries: BTreeMap::new(), order: Vec::new() }
    }

    /// Records `|raw| / (1 + scale)`.
    pub fn push(&mut self, identity: &str, raw: f64, scale: f64) {
        let rel = raw.abs() / (1.0 + scale);
        self.push_relative(identity, rel, scale);
    }

    /// Records a residual that is already scale-free.
    /// Non-finite values are stored as `f64::MAX` so reports stay valid JSON.
    pub fn push_relative(&mut self, identity: &str, rel: f64, scale: f64) {
        let rel = if rel.is_finite() { rel } else { f64::MAX };
        let scale = if scale.is_finite() { scale } else { f64::MAX };
        match self.entries.get_mut(identity) {
            Some(e) => {
                if rel > e.0 {
                    e.0 = rel;
                    e.1 = scale;
                }
            }
            None => {
                self.order.push(identity.to_string());
                self.entries.insert(identity.to_string(), (rel, scale, None));
            }
        }
    }

    /// Records the defect `lhs - rhs` of a vector identity given its terms.
    pub fn push_terms(&mut self, identity: &str, lhs: &[&DVector<f64>], rhs: &[&DVector<f64>]) {
        let dim = lhs.iter().chain(rhs).map(|v| v.len()).next().unwrap_or(0);
        let sum = |v: &[&DVector<f64>]| v.iter().fold(DVector::zeros(dim), |acc, x| acc + *x);
        let diff = sum(lhs) - sum(rhs);
        let scale = lhs.iter().chain(rhs).map(|v| v.amax()).fold(0.0, f64::max);
        self.push(identity, diff.amax(), scale);
    }

    /// Records the defect of a scalar identity given its terms.
    pub fn push_scalar_terms(&mut self, identity: &str, lhs: &[f64], rhs: &[f64]) {
        let raw = lhs.iter().sum::<f64>() - rhs.iter().sum::<f64>();
        let scale = lhs.iter().chain(rhs).map(|v| v.abs()).fold(0.0, f64::max);
        self.push(identity, raw, scale);
    }

    pub fn note(&mut self, identity: &str, note: &str) {
        if let Some(e) = self.entries.get_mut(identity) {
            e.2 = Some(note.to_string());
        }
    }

    pub fn finish(self) -> Vec<ResidualRecord> {
        self.order
            .iter()
            .map(|name| {
                let (residual, scale, note) = self.entries[name].clone();
                ResidualRecord {
                    identity: name.clone(),
                    point: self.point.clone(),
                    residual,
                    scale,
                    pass: residual <= self.tol.get(name),
                    note,
                }
            })
            .collect()
    }
}

/// Seeded random vectors in parameter coordinates, with their screen projections.
#[derive(Clone, Debug)]
pub struct TestVectors {
    pub tangent: Vec<DVector<f64>>,
    pub screen: Vec<DVector<f64>>,
}

impl TestVectors {
    pub const COUNT: usize = 4;

    pub fn draw(projection: &DMatrix<f64>, seed: u64, index: u64) -> Self {
        let m = projection.nrows();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let tangent: Vec<DVector<f64>> =
            (0..Self::COUNT).map(|_| DVector::from_fn(m, |_, _| rng.gen_range(-1.0..1.0))).collect();
        let screen = tangent.iter().map(|v| projection * v).collect();
        Self { tangent, screen }
    }
}

/// Everything the pointwise checkers consume at one parameter point.
#[derive(Clone, Debug)]
pub struct PointData {
    pub u: Vec<f64>,
    pub frame: FramePoint,
    pub jet: ShapeJet,
    /// Ambient curvature at the image point.
    pub rbar: Riemann,
    pub vectors: TestVectors,
}

impl PointData {
    pub fn compute(map: &HypersurfaceMap, u: &[f64], seed: u64, index: u64) -> Result<Self, FrameError> {
        let (frame, jet) = point_at(map, u)?;
        let rbar = map.ambient.riemann_at(&jet.value.x)?;
        let vectors = TestVectors::draw(&jet.value.p.to_dmatrix(), seed, index);
        Ok(Self { u: u.to_vec(), frame, jet, rbar, vectors })
    }

    pub fn shape(&self) -> &ShapeData {
        &self.jet.value
    }
}

pub(crate) fn gdot(g: &DMatrix<f64>, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a.transpose() * g * b)[(0, 0)]
}

pub(crate) fn bilinear(f: &DMatrix<f64>, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    gdot(f, a, b)
}
