//! The pointwise frame: tangent basis, ξ, screen, N, η and the screen
//! projection P, built generically so the whole construction can be
//! differentiated by evaluating it over jets.

use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::hypersurface::{HypersurfaceMap, ScreenStrategy, XiNormalization};
use crate::ambient::christoffel_from;
use crate::error::FrameError;
use crate::tensor_core::{
    degenerate_null_direction, generalized_symmetric_eigen, solve, Jet1, Mat, Scalar, SymMatrix,
    DEFAULT_RANK_TOL,
};

/// Frame data at one sample point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FramePoint {
    pub u: Vec<f64>,
    /// Ambient coordinates of the point.
    pub p: Vec<f64>,
    /// `∂_i Ψ` for each parameter.
    pub tangent_basis: Vec<Vec<f64>>,
    pub induced_metric: SymMatrix,
    pub ambient_metric: SymMatrix,
    pub xi: Vec<f64>,
    /// ξ in parameter coordinates.
    pub xi_param: Vec<f64>,
    /// Ambient screen vectors `E_a`.
    pub screen_basis: Vec<Vec<f64>>,
    /// The same screen vectors in parameter coordinates.
    pub screen_param: Vec<Vec<f64>>,
    pub n_vec: Vec<f64>,
    /// `η_i = ḡ(∂_i Ψ, N)`.
    pub eta: Vec<f64>,
    /// `P = I - ξ ⊗ η` in parameter coordinates.
    pub projection: DMatrix<f64>,
    /// Parameter index whose coordinate vector is left out of the screen basis.
    pub radical_index: usize,
}

impl FramePoint {
    pub fn ambient_dot(&self, a: &[f64], b: &[f64]) -> f64 {
        let g = self.ambient_metric.entries();
        let mut acc = 0.0;
        for i in 0..a.len() {
            for j in 0..b.len() {
                acc += g[(i, j)] * a[i] * b[j];
            }
        }
        acc
    }

    /// Named residuals of the frame invariants.
    pub fn invariant_residuals(&self) -> Vec<(&'static str, f64)> {
        let scale = 1.0 + self.ambient_metric.entries().amax();
        let mut worst_screen: f64 = 0.0;
        for e in &self.screen_basis {
            worst_screen = worst_screen
                .max(self.ambient_dot(e, &self.xi).abs())
                .max(self.ambient_dot(e, &self.n_vec).abs());
        }
        let positive = generalized_symmetric_eigen(&self.screen_metric(), &SymMatrix::identity(self.screen_basis.len()))
            .map(|e| if e.values[0] > 0.0 { 0.0 } else { 1.0 + e.values[0].abs() })
            .unwrap_or(f64::INFINITY);
        vec![
            ("xi_null", self.ambient_dot(&self.xi, &self.xi).abs() / scale),
            ("n_null", self.ambient_dot(&self.n_vec, &self.n_vec).abs() / scale),
            ("xi_n_pairing", (self.ambient_dot(&self.xi, &self.n_vec) - 1.0).abs() / scale),
            ("screen_orthogonality", worst_screen / scale),
            ("screen_positive", positive),
        ]
    }

    /// Gram matrix of the screen basis.
    pub fn screen_metric(&self) -> SymMatrix {
        let k = self.screen_basis.len();
        let m = DMatrix::from_fn(k, k, |a, b| self.ambient_dot(&self.screen_basis[a], &self.screen_basis[b]));
        SymMatrix::new((&m + m.transpose()) * 0.5).expect("symmetrized")
    }
}

/// Discrete choices fixed at the base point and reused by every jet level, so
/// the construction is one smooth function of `u`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct FrameChoices {
    pub radical_index: usize,
}

/// The frame fields over a generic scalar.
#[derive(Clone, Debug)]
pub(crate) struct Level0<S> {
    pub x: Vec<S>,
    /// `d x m`, columns `∂_i Ψ`.
    pub t: Mat<S>,
    pub gbar: Mat<S>,
    /// `Γ̄^a_{bc}` flattened `[a][b][c]`.
    pub gamma_bar: Vec<S>,
    pub g: Mat<S>,
    /// ξ in parameter coordinates.
    pub v: Vec<S>,
    pub xi: Vec<S>,
    pub n_vec: Vec<S>,
    pub eta: Vec<S>,
    pub p: Mat<S>,
}

pub(crate) fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::cst(0.0), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub(crate) fn metric_dot<S: Scalar>(g: &Mat<S>, a: &[S], b: &[S]) -> S {
    dot(a, &g.matvec(b))
}

/// `Γ̄(X, Y)^a = Γ̄^a_{bc} X^b Y^c`.
pub(crate) fn gamma_apply<S: Scalar>(gamma: &[S], x: &[S], y: &[S]) -> Vec<S> {
    let d = x.len();
    (0..d)
        .map(|a| {
            let mut acc = S::cst(0.0);
            for b in 0..d {
                for c in 0..d {
                    acc = acc + gamma[(a * d + b) * d + c].clone() * x[b].clone() * y[c].clone();
                }
            }
            acc
        })
        .collect()
}

fn tangents<S: Scalar>(map: &HypersurfaceMap, u: &[S]) -> (Vec<S>, Mat<S>) {
    let seeded = Jet1::seed(u);
    let psi = map.eval(&seeded);
    let d = psi.len();
    let m = u.len();
    let x = psi.iter().map(|c| c.val.clone()).collect();
    let t = Mat::from_fn(d, m, |a, i| psi[a].d(i));
    (x, t)
}

pub(crate) fn base_choices(map: &HypersurfaceMap, u: &[f64]) -> Result<FrameChoices, FrameError> {
    map.check_domain(u)?;
    let (x, t) = tangents(map, u);
    map.ambient.check_domain(&x)?;
    if map.screen_strategy == ScreenStrategy::GrwLevelSet && map.ambient.warped().is_none() {
        return Err(FrameError::NotAGraph(
            "ambient chart has no unit-lapse time coordinate".to_string(),
        ));
    }
    let gbar = map.ambient.metric(&x);
    let g = t.transpose().matmul(&gbar).matmul(&t);
    let g = SymMatrix::new(g.to_dmatrix()).map_err(FrameError::NotNull)?;
    let v = degenerate_null_direction(&g, DEFAULT_RANK_TOL).map_err(FrameError::NotNull)?;
    let radical_index = v.iamax();
    Ok(FrameChoices { radical_index })
}

pub(crate) fn level0<S: Scalar>(
    map: &HypersurfaceMap,
    u: &[S],
    choices: FrameChoices,
) -> Result<Level0<S>, FrameError> {
    let m = u.len();
    let j = choices.radical_index;
    let (x, t) = tangents(map, u);
    let d = x.len();
    let (gbar, dgbar) = map.ambient.metric_with_gradient(&x);
    let ginv = gbar.inverse().map_err(|e| FrameError::JetFailure(format!("ambient metric: {e}")))?;
    let gamma_bar = christoffel_from(&ginv, &dgbar);
    let g = t.transpose().matmul(&gbar).matmul(&t);

    // radical: v_j = 1, g_ab v_b = -g_aj over the remaining indices
    let rest: Vec<usize> = (0..m).filter(|&k| k != j).collect();
    let sub = Mat::from_fn(m - 1, m - 1, |a, b| g.get(rest[a], rest[b]));
    let rhs = Mat::from_fn(m - 1, 1, |a, _| -g.get(rest[a], j));
    let sol = solve(&sub, &rhs).map_err(FrameError::NotNull)?;
    let mut v = vec![S::cst(0.0); m];
    v[j] = S::cst(1.0);
    for (a, &k) in rest.iter().enumerate() {
        v[k] = sol.get(a, 0);
    }
    let raw = t.matvec(&v);
    if raw[0].value() == 0.0 {
        return Err(FrameError::JetFailure("radical has no time component".to_string()));
    }
    let mut factor = S::cst(map.xi_scale / SQRT_2) / raw[0].clone();
    if map.xi_normalization == XiNormalization::WarpedTime {
        let spec = map.ambient.warped().ok_or_else(|| {
            FrameError::NotAGraph("warped-time normalization needs a GRW chart".to_string())
        })?;
        factor = factor / spec.warping.eval(&x[0]);
    }
    let v: Vec<S> = v.into_iter().map(|c| c * factor.clone()).collect();
    let xi: Vec<S> = raw.into_iter().map(|c| c * factor.clone()).collect();

    let omega: Vec<S> = match map.screen_strategy {
        ScreenStrategy::GrwLevelSet => (0..d).map(|a| S::cst(if a == 0 { 1.0 } else { 0.0 })).collect(),
        ScreenStrategy::AuxiliaryOrthocomplement => xi.clone(),
    };
    let big_v = ginv.matvec(&omega);
    let w_xi = dot(&omega, &xi);
    let vv = metric_dot(&gbar, &big_v, &big_v);
    let shift = vv / (w_xi.clone() * 2.0);
    let n_vec: Vec<S> = big_v
        .iter()
        .zip(&xi)
        .map(|(a, b)| (a.clone() - shift.clone() * b.clone()) / w_xi.clone())
        .collect();
    let eta: Vec<S> = (0..m).map(|i| metric_dot(&gbar, &t.column(i), &n_vec)).collect();
    let p = Mat::from_fn(m, m, |a, b| {
        let id = if a == b { 1.0 } else { 0.0 };
        S::cst(id) - v[a].clone() * eta[b].clone()
    });
    Ok(Level0 { x, t, gbar, gamma_bar, g, v, xi, n_vec, eta, p })
}

/// Builds the frame at `u`.
pub fn frame_at(map: &HypersurfaceMap, u: &[f64]) -> Result<FramePoint, FrameError> {
    let choices = base_choices(map, u)?;
    let l = level0(map, u, choices)?;
    frame_from_level0(u, &l, choices)
}

pub(crate) fn frame_from_level0(
    u: &[f64],
    l: &Level0<f64>,
    choices: FrameChoices,
) -> Result<FramePoint, FrameError> {
    let m = u.len();
    let screen_idx: Vec<usize> = (0..m).filter(|&k| k != choices.radical_index).collect();
    let screen_param: Vec<Vec<f64>> = screen_idx.iter().map(|&k| l.p.column(k)).collect();
    let screen_basis: Vec<Vec<f64>> = screen_param.iter().map(|c| l.t.matvec(c)).collect();
    let fp = FramePoint {
        u: u.to_vec(),
        p: l.x.clone(),
        tangent_basis: (0..m).map(|i| l.t.column(i)).collect(),
        induced_metric: SymMatrix::new(l.g.to_dmatrix()).map_err(FrameError::Tensor)?,
        ambient_metric: SymMatrix::new(l.gbar.to_dmatrix()).map_err(FrameError::Tensor)?,
        xi: l.xi.clone(),
        xi_param: l.v.clone(),
        screen_basis,
        screen_param,
        n_vec: l.n_vec.clone(),
        eta: l.eta.clone(),
        projection: l.p.to_dmatrix(),
        radical_index: choices.radical_index,
    };
    if fp.screen_metric().entries().clone().cholesky().is_none() {
        return Err(FrameError::DegenerateScreen);
    }
    Ok(fp)
}
