//! Chart-based Lorentzian ambients: metric 2-jets, Christoffel symbols,
//! Riemann tensor, GRW warped products and space-form certification.
//!
//! Index conventions: `christoffel[a][b][c] = Γ^a_{bc}` and
//! `riemann[a][b][c][d] = R^a_{bcd}` with `R(∂_c, ∂_d)∂_b = R^a_{bcd} ∂_a` and
//! `R(X,Y)Z = ∇_X∇_Y Z - ∇_Y∇_X Z - ∇_[X,Y] Z`. A space form of curvature `c`
//! has `R(X,Y)Z = c (g(Y,Z) X - g(X,Z) Y)`.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::AmbientError;
use crate::tensor_core::{Jet1, Jet2Scalar, Mat, Scalar, SymMatrix};

/// Stereographic sphere charts stop at this coordinate radius, keeping the
/// missing pole out of every sample domain.
pub const SPHERE_CHART_RADIUS: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warping {
    Constant { value: f64 },
    Cosh,
    Exp,
    Cos,
}

impl Warping {
    pub fn eval<S: Scalar>(&self, t: &S) -> S {
        match self {
            Warping::Constant { value } => S::cst(*value),
            Warping::Cosh => t.cosh(),
            Warping::Exp => t.exp(),
            Warping::Cos => t.cos(),
        }
    }

    /// rho'/rho.
    pub fn log_derivative(&self, t: f64) -> f64 {
        let j = self.eval(&Jet1::variable(t, 0, 1));
        j.d(0) / j.val
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fiber {
    Euclidean,
    /// Unit sphere in stereographic coordinates from the south pole.
    Sphere,
    /// Unit-curvature hyperbolic space in Poincare-ball coordinates.
    Hyperbolic,
}

impl Fiber {
    /// All fibers are conformally flat: `g_F = factor(y) * delta`.
    pub fn conformal_factor<S: Scalar>(&self, y: &[S]) -> S {
        let r2 = y.iter().fold(S::cst(0.0), |acc, v| acc + v.sq());
        match self {
            Fiber::Euclidean => S::cst(1.0),
            Fiber::Sphere => (r2 + 1.0).sq().recip() * 4.0,
            Fiber::Hyperbolic => (-r2 + 1.0).sq().recip() * 4.0,
        }
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        match self {
            Fiber::Euclidean => y.iter().all(|v| v.is_finite()),
            Fiber::Sphere => r <= SPHERE_CHART_RADIUS,
            Fiber::Hyperbolic => r < 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WarpedProductSpec {
    pub warping: Warping,
    pub fiber: Fiber,
    /// Dimension of the fiber, n + 1.
    pub fiber_dim: usize,
    pub t_min: f64,
    pub t_max: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum CurvatureTag {
    Constant(f64),
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AmbientKind {
    /// `-dt^2 + rho(t)^2 g_F` with chart time as coordinate 0.
    Warped(WarpedProductSpec),
    /// `scale * (-dt^2 + sum dx_i^2)`: flat, but not in unit-lapse GRW form.
    ScaledMinkowski { dim: usize, scale: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmbientChart {
    pub kind: AmbientKind,
    pub dim: usize,
    pub signature_index: usize,
    pub curvature_tag: CurvatureTag,
}

/// Metric with its first and second coordinate derivatives at one point.
#[derive(Clone, Debug)]
pub struct MetricJet {
    pub point: Vec<f64>,
    pub g: SymMatrix,
    /// `first[c] = ∂_c g`.
    pub first: Vec<DMatrix<f64>>,
    /// `second[c][d] = ∂_c ∂_d g`.
    pub second: Vec<Vec<DMatrix<f64>>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel {
    pub dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[(a * self.dim + b) * self.dim + c]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Riemann {
    pub dim: usize,
    data: Vec<f64>,
}

impl Riemann {
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.data[((a * self.dim + b) * self.dim + c) * self.dim + d]
    }

    /// `R(X,Y)Z` as a coordinate vector.
    pub fn apply(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        let n = self.dim;
        (0..n)
            .map(|a| {
                let mut acc = 0.0;
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            acc += self.get(a, b, c, d) * z[b] * x[c] * y[d];
                        }
                    }
                }
                acc
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Builds a GRW chart `-I x_rho F`.
pub fn grw_chart(spec: WarpedProductSpec) -> Result<AmbientChart, AmbientError> {
    if !(spec.t_min < spec.t_max) || spec.fiber_dim == 0 {
        return Err(AmbientError::OutOfDomain(vec![spec.t_min, spec.t_max]));
    }
    const SAMPLES: usize = 1000;
    for k in 0..=SAMPLES {
        let t = spec.t_min + (spec.t_max - spec.t_min) * k as f64 / SAMPLES as f64;
        let rho = spec.warping.eval(&t);
        if !(rho > 0.0) {
            return Err(AmbientError::InvalidWarping(rho));
        }
    }
    let curvature_tag = match (spec.warping, spec.fiber) {
        (Warping::Constant { value }, Fiber::Euclidean) if value == 1.0 => CurvatureTag::Constant(0.0),
        (Warping::Cosh, Fiber::Sphere) => CurvatureTag::Constant(1.0),
        _ => CurvatureTag::Unknown,
    };
    Ok(AmbientChart {
        dim: spec.fiber_dim + 1,
        kind: AmbientKind::Warped(spec),
        signature_index: 1,
        curvature_tag,
    })
}

/// Minkowski space of dimension `dim` as the GRW chart `(rho = 1, Euclidean)`.
pub fn minkowski(dim: usize) -> AmbientChart {
    grw_chart(WarpedProductSpec {
        warping: Warping::Constant { value: 1.0 },
        fiber: Fiber::Euclidean,
        fiber_dim: dim - 1,
        t_min: -1e6,
        t_max: 1e6,
    })
    .expect("constant positive warping")
}

/// De Sitter space `-R x_cosh S^{dim-1}`.
pub fn de_sitter(dim: usize) -> AmbientChart {
    grw_chart(WarpedProductSpec {
        warping: Warping::Cosh,
        fiber: Fiber::Sphere,
        fiber_dim: dim - 1,
        t_min: -20.0,
        t_max: 20.0,
    })
    .expect("cosh is positive")
}

/// Anti-de Sitter patch `-(-pi/2, pi/2) x_cos H^{dim-1}`; its tag is left
/// unknown until certified.
pub fn anti_de_sitter(dim: usize) -> AmbientChart {
    grw_chart(WarpedProductSpec {
        warping: Warping::Cos,
        fiber: Fiber::Hyperbolic,
        fiber_dim: dim - 1,
        t_min: -FRAC_PI_2 + 1e-3,
        t_max: FRAC_PI_2 - 1e-3,
    })
    .expect("cos is positive on the patch")
}

pub fn scaled_minkowski(dim: usize, scale: f64) -> AmbientChart {
    AmbientChart {
        kind: AmbientKind::ScaledMinkowski { dim, scale },
        dim,
        signature_index: 1,
        curvature_tag: CurvatureTag::Constant(0.0),
    }
}

impl AmbientChart {
    pub fn warped(&self) -> Option<&WarpedProductSpec> {
        match &self.kind {
            AmbientKind::Warped(spec) => Some(spec),
            AmbientKind::ScaledMinkowski { .. } => None,
        }
    }

    pub fn curvature(&self) -> Option<f64> {
        match self.curvature_tag {
            CurvatureTag::Constant(c) => Some(c),
            CurvatureTag::Unknown => None,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim {
            return false;
        }
        match &self.kind {
            AmbientKind::Warped(spec) => {
                x[0] >= spec.t_min && x[0] <= spec.t_max && spec.fiber.contains(&x[1..])
            }
            AmbientKind::ScaledMinkowski { .. } => x.iter().all(|v| v.is_finite()),
        }
    }

    pub fn check_domain(&self, x: &[f64]) -> Result<(), AmbientError> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(AmbientError::OutOfDomain(x.to_vec()))
        }
    }

    /// Metric components at `x`, over any scalar type.
    pub fn metric<S: Scalar>(&self, x: &[S]) -> Mat<S> {
        let n = self.dim;
        match &self.kind {
            AmbientKind::Warped(spec) => {
                let rho = spec.warping.eval(&x[0]);
                let spatial = rho.sq() * spec.fiber.conformal_factor(&x[1..]);
                Mat::from_fn(n, n, |i, j| match (i, j) {
                    (0, 0) => S::cst(-1.0),
                    (i, j) if i == j => spatial.clone(),
                    _ => S::cst(0.0),
                })
            }
            AmbientKind::ScaledMinkowski { scale, .. } => Mat::from_fn(n, n, |i, j| {
                if i != j {
                    S::cst(0.0)
                } else if i == 0 {
                    S::cst(-scale)
                } else {
                    S::cst(*scale)
                }
            }),
        }
    }

    /// Metric and its first derivatives `∂_c g`, over any scalar type.
    pub fn metric_with_gradient<S: Scalar>(&self, x: &[S]) -> (Mat<S>, Vec<Mat<S>>) {
        let seeded = Jet1::seed(x);
        let m = self.metric(&seeded);
        let g = m.map(|e| e.val.clone());
        let dg = (0..self.dim).map(|c| m.map(|e| e.d(c))).collect();
        (g, dg)
    }

    /// Christoffel symbols over any scalar type, flattened as `[a][b][c]`.
    pub fn christoffel_generic<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>, AmbientError> {
        let (g, dg) = self.metric_with_gradient(x);
        let ginv = g
            .inverse()
            .map_err(|_| AmbientError::SingularMetric(x.iter().map(Scalar::value).collect()))?;
        Ok(christoffel_from(&ginv, &dg))
    }

    pub fn metric_at(&self, p: &[f64]) -> Result<MetricJet, AmbientError> {
        self.check_domain(p)?;
        let n = self.dim;
        let m = self.metric(&Jet2Scalar::seed(p));
        let g = SymMatrix::new(m.map(|e| e.value).to_dmatrix())
            .map_err(|_| AmbientError::SingularMetric(p.to_vec()))?;
        let first = (0..n)
            .map(|c| DMatrix::from_fn(n, n, |i, j| m.at(i, j).grad(c)))
            .collect();
        let second = (0..n)
            .map(|c| (0..n).map(|d| DMatrix::from_fn(n, n, |i, j| m.at(i, j).hess(c, d))).collect())
            .collect();
        Ok(MetricJet { point: p.to_vec(), g, first, second })
    }

    pub fn christoffels_at(&self, p: &[f64]) -> Result<Christoffel, AmbientError> {
        let jet = self.metric_at(p)?;
        let ginv = jet
            .g
            .entries()
            .clone()
            .try_inverse()
            .ok_or_else(|| AmbientError::SingularMetric(p.to_vec()))?;
        let ginv = Mat::from_dmatrix(&ginv);
        let dg: Vec<Mat<f64>> = jet.first.iter().map(Mat::from_dmatrix).collect();
        Ok(Christoffel { dim: self.dim, data: christoffel_from(&ginv, &dg) })
    }

    pub fn riemann_at(&self, p: &[f64]) -> Result<Riemann, AmbientError> {
        let jet = self.metric_at(p)?;
        let n = self.dim;
        let ginv = jet
            .g
            .entries()
            .clone()
            .try_inverse()
            .ok_or_else(|| AmbientError::SingularMetric(p.to_vec()))?;
        let dg = &jet.first;
        let ddg = &jet.second;
        // lowered symbols Γ_{e;bd} = ½(∂_b g_ed + ∂_d g_eb − ∂_e g_bd) and their derivatives
        let low = |e: usize, b: usize, d: usize| 0.5 * (dg[b][(e, d)] + dg[d][(e, b)] - dg[e][(b, d)]);
        let dlow = |c: usize, e: usize, b: usize, d: usize| {
            0.5 * (ddg[c][b][(e, d)] + ddg[c][d][(e, b)] - ddg[c][e][(b, d)])
        };
        let dginv: Vec<DMatrix<f64>> = (0..n).map(|c| -(&ginv * &dg[c] * &ginv)).collect();
        let idx = |a: usize, b: usize, c: usize| (a * n + b) * n + c;
        let mut gamma = vec![0.0; n * n * n];
        // dgamma[c][a][b][d] = ∂_c Γ^a_{bd}
        let mut dgamma = vec![0.0; n * n * n * n];
        for a in 0..n {
            for b in 0..n {
                for d in 0..n {
                    let mut acc = 0.0;
                    for e in 0..n {
                        acc += ginv[(a, e)] * low(e, b, d);
                    }
                    gamma[idx(a, b, d)] = acc;
                    for c in 0..n {
                        let mut acc = 0.0;
                        for e in 0..n {
                            acc += dginv[c][(a, e)] * low(e, b, d) + ginv[(a, e)] * dlow(c, e, b, d);
                        }
                        dgamma[c * n * n * n + idx(a, b, d)] = acc;
                    }
                }
            }
        }
        let dg_at = |c: usize, a: usize, b: usize, d: usize| dgamma[c * n * n * n + idx(a, b, d)];
        let mut data = vec![0.0; n * n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let deriv = dg_at(c, a, d, b) - dg_at(d, a, c, b);
                        let mut quad = 0.0;
                        for e in 0..n {
                            quad += gamma[idx(a, c, e)] * gamma[idx(e, d, b)]
                                - gamma[idx(a, d, e)] * gamma[idx(e, c, b)];
                        }
                        data[((a * n + b) * n + c) * n + d] = deriv + quad;
                    }
                }
            }
        }
        Ok(Riemann { dim: n, data })
    }

    /// Relative space-form residual `max |R - c G| / (1 + max |R|)` at `p`.
    pub fn space_form_residual(&self, p: &[f64], c: f64) -> Result<f64, AmbientError> {
        let r = self.riemann_at(p)?;
        let g = self.metric_at(p)?.g;
        let g = g.entries();
        let n = self.dim;
        let mut worst = 0.0_f64;
        for a in 0..n {
            for b in 0..n {
                for cc in 0..n {
                    for d in 0..n {
                        let model = c * (g[(d, b)] * delta(a, cc) - g[(cc, b)] * delta(a, d));
                        worst = worst.max((r.get(a, b, cc, d) - model).abs());
                    }
                }
            }
        }
        Ok(worst / (1.0 + r.max_abs()))
    }

    /// Deterministic sample of interior domain points.
    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.dim;
        (0..count)
            .map(|_| match &self.kind {
                AmbientKind::Warped(spec) => {
                    let lo = spec.t_min.max(-2.0);
                    let hi = spec.t_max.min(2.0);
                    let mut x = vec![rng.gen_range(lo..hi)];
                    let box_half = match spec.fiber {
                        Fiber::Hyperbolic => 0.9 / (n as f64 - 1.0).sqrt(),
                        _ => 2.0,
                    };
                    x.extend((1..n).map(|_| rng.gen_range(-box_half..box_half)));
                    x
                }
                AmbientKind::ScaledMinkowski { .. } => (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect(),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceFormCertificate {
    pub curvature: f64,
    pub max_residual: f64,
    pub samples: usize,
}

/// Fits a constant curvature over sampled points and certifies it when the
/// relative residual stays below `tol` everywhere. Fitted values within 1e-9
/// of an integer are snapped to it.
pub fn certify_space_form(
    chart: &AmbientChart,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<Option<SpaceFormCertificate>, AmbientError> {
    let n = chart.dim;
    let points = chart.sample_points(samples, seed);
    let (mut num, mut den) = (0.0, 0.0);
    for p in &points {
        let r = chart.riemann_at(p)?;
        let g = chart.metric_at(p)?.g;
        let g = g.entries();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let model = g[(d, b)] * delta(a, c) - g[(c, b)] * delta(a, d);
                        num += r.get(a, b, c, d) * model;
                        den += model * model;
                    }
                }
            }
        }
    }
    let mut c = num / den;
    if (c - c.round()).abs() < 1e-9 {
        c = c.round();
    }
    let mut worst = 0.0_f64;
    for p in &points {
        worst = worst.max(chart.space_form_residual(p, c)?);
    }
    Ok((worst < tol).then_some(SpaceFormCertificate { curvature: c, max_residual: worst, samples }))
}

/// Certifies and tags a chart whose curvature is unknown. Returns whether the
/// chart now carries a constant-curvature tag.
pub fn certify_in_place(chart: &mut AmbientChart) -> Result<bool, AmbientError> {
    if chart.curvature().is_some() {
        return Ok(true);
    }
    if let Some(cert) = certify_space_form(chart, 100, 0x5eed, 1e-7)? {
        chart.curvature_tag = CurvatureTag::Constant(cert.curvature);
        return Ok(true);
    }
    Ok(false)
}

fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

/// `Γ^a_{bc} = ½ g^{ad} (∂_b g_{dc} + ∂_c g_{db} − ∂_d g_{bc})`.
pub(crate) fn christoffel_from<S: Scalar>(ginv: &Mat<S>, dg: &[Mat<S>]) -> Vec<S> {
    let n = ginv.rows;
    let mut out = Vec::with_capacity(n * n * n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut acc = S::cst(0.0);
                for d in 0..n {
                    let low = dg[b].get(d, c) + dg[c].get(d, b) - dg[d].get(b, c);
                    acc = acc + ginv.get(a, d) * low;
                }
                out.push(acc * 0.5);
            }
        }
    }
    out
}
