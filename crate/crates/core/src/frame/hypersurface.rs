use serde::{Deserialize, Serialize};

use crate::ambient::AmbientChart;
use crate::error::FrameError;
use crate::tensor_core::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ScreenStrategy {
    /// Screen tangent to the slices `t = const` of a GRW chart.
    #[default]
    GrwLevelSet,
    /// Chart-Euclidean orthocomplement of ξ inside TM.
    AuxiliaryOrthocomplement,
}

/// How the radical field ξ is scaled before `xi_scale` is applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum XiNormalization {
    /// Chart-time component `1/sqrt 2`.
    #[default]
    ChartTime,
    /// Chart-time component `1/(sqrt 2 rho(t))`. In de Sitter this is
    /// `Ψ_s / sqrt 2` for the hyperquadric time `s = sinh t`.
    WarpedTime,
}

/// Height functions `f` on fiber coordinates for graphs `t = f(p)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphFunction {
    /// `a . p + offset`.
    Linear { direction: Vec<f64>, #[serde(default)] offset: f64 },
    /// Euclidean distance to `center`.
    Radial { center: Vec<f64> },
    /// Euclidean distance to the coordinate subspace `p_0 = .. = p_{axes-1} = 0`.
    Cylinder { axes: usize },
    /// Euclidean distance to the circle of radius `major_radius` in the `(p_0, p_1)` plane.
    TorusDistance { major_radius: f64 },
    /// Hyperbolic distance from the origin of the Poincare ball, `2 atanh |p|`.
    HyperbolicRadial,
    /// `-ln(inner)`.
    NegLog { inner: Box<GraphFunction> },
    /// `atan(sinh(inner))`.
    Gudermannian { inner: Box<GraphFunction> },
}

impl GraphFunction {
    pub fn eval<S: Scalar>(&self, p: &[S]) -> S {
        let norm = |v: &[S]| v.iter().fold(S::cst(0.0), |acc, x| acc + x.sq()).sqrt();
        match self {
            GraphFunction::Linear { direction, offset } => direction
                .iter()
                .zip(p)
                .fold(S::cst(*offset), |acc, (a, x)| acc + x.clone() * *a),
            GraphFunction::Radial { center } => {
                let shifted: Vec<S> = p.iter().zip(center).map(|(x, c)| x.clone() - *c).collect();
                norm(&shifted)
            }
            GraphFunction::Cylinder { axes } => norm(&p[..*axes]),
            GraphFunction::TorusDistance { major_radius } => {
                let mut rest = vec![norm(&p[..2]) - *major_radius];
                rest.extend(p[2..].iter().cloned());
                norm(&rest)
            }
            GraphFunction::HyperbolicRadial => norm(p).atanh() * 2.0,
            GraphFunction::NegLog { inner } => -inner.eval(p).ln(),
            GraphFunction::Gudermannian { inner } => inner.eval(p).sinh().atan(),
        }
    }

    /// Loci where the function is not smooth, as a predicate on fiber points.
    pub fn is_singular(&self, p: &[f64], margin: f64) -> bool {
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        match self {
            GraphFunction::Linear { .. } => false,
            GraphFunction::Radial { center } => {
                let d: Vec<f64> = p.iter().zip(center).map(|(x, c)| x - c).collect();
                norm(&d) < margin
            }
            GraphFunction::Cylinder { axes } => norm(&p[..*axes]) < margin,
            GraphFunction::TorusDistance { major_radius } => {
                let r = norm(&p[..2]);
                let d = ((r - major_radius).powi(2) + norm(&p[2..]).powi(2)).sqrt();
                r < margin || d < margin || d > major_radius - margin
            }
            GraphFunction::HyperbolicRadial => norm(p) < margin || norm(p) >= 1.0,
            GraphFunction::NegLog { inner } => inner.is_singular(p, margin) || inner.eval(p) <= margin,
            GraphFunction::Gudermannian { inner } => inner.is_singular(p, margin),
        }
    }
}

/// Concrete parameterizations `u -> ambient coordinates`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Parameterization {
    /// `(s, x_2, ..) -> (s, s, x_2, ..)` in Minkowski coordinates.
    NullHyperplane,
    /// `(r, w) -> (r, r phi(w))` with `phi` the inverse stereographic map onto the unit sphere.
    NullCone,
    /// `p -> (f(p), p)` in a GRW chart.
    Graph { f: GraphFunction },
    /// Level set of the de Sitter distance function, written in the chart
    /// `-R x_cosh S^{n+1}` with stereographic fiber coordinates. Parameters `(t, w)`.
    DeSitterDistance { alpha: f64 },
    /// `u -> (0, u)`, a spacelike slice (never null).
    SpacelikeSlice,
}

impl Parameterization {
    pub fn eval<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        match self {
            Parameterization::NullHyperplane => {
                let mut x = vec![u[0].clone(), u[0].clone()];
                x.extend(u[1..].iter().cloned());
                x
            }
            Parameterization::NullCone => {
                let r = u[0].clone();
                let mut x = vec![r.clone()];
                x.extend(inverse_stereographic(&u[1..]).into_iter().map(|c| c * r.clone()));
                x
            }
            Parameterization::Graph { f } => {
                let mut x = vec![f.eval(u)];
                x.extend(u.iter().cloned());
                x
            }
            Parameterization::DeSitterDistance { alpha } => {
                let beta = (1.0 - alpha * alpha).sqrt();
                let t = u[0].clone();
                let s = t.sinh();
                let ch = t.cosh();
                let radius = (s.clone() * *alpha - beta).abs();
                let phi = inverse_stereographic(&u[1..]);
                let last = (s * beta + *alpha) / ch.clone();
                // fiber point q = (radius phi, last) / ch on the unit sphere, then
                // stereographic from the south pole: y = q' / (1 + q_last)
                let denom = last + 1.0;
                let mut x = vec![t];
                x.extend(phi.into_iter().map(|c| c * radius.clone() / ch.clone() / denom.clone()));
                x
            }
            Parameterization::SpacelikeSlice => {
                let mut x = vec![S::cst(0.0)];
                x.extend(u.iter().cloned());
                x
            }
        }
    }
}

/// `w -> (2w, 1 - |w|^2) / (1 + |w|^2)`.
fn inverse_stereographic<S: Scalar>(w: &[S]) -> Vec<S> {
    let r2 = w.iter().fold(S::cst(0.0), |acc, x| acc + x.sq());
    let denom = r2.clone() + 1.0;
    let mut out: Vec<S> = w.iter().map(|x| x.clone() * 2.0 / denom.clone()).collect();
    out.push((-r2 + 1.0) / denom);
    out
}

/// A parameterized hypersurface in an ambient chart together with the screen
/// and gauge choices that pin down its frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypersurfaceMap {
    pub ambient: AmbientChart,
    pub param: Parameterization,
    /// Parameter box, one `(min, max)` per parameter.
    pub domain: Vec<(f64, f64)>,
    pub screen_strategy: ScreenStrategy,
    #[serde(default)]
    pub xi_normalization: XiNormalization,
    /// Constant factor applied after the normalization.
    pub xi_scale: f64,
}

impl HypersurfaceMap {
    pub fn new(
        ambient: AmbientChart,
        param: Parameterization,
        domain: Vec<(f64, f64)>,
        screen_strategy: ScreenStrategy,
    ) -> Self {
        Self {
            ambient,
            param,
            domain,
            screen_strategy,
            xi_normalization: XiNormalization::ChartTime,
            xi_scale: 1.0,
        }
    }

    pub fn with_xi_normalization(mut self, norm: XiNormalization) -> Self {
        self.xi_normalization = norm;
        self
    }

    pub fn with_xi_scale(mut self, c: f64) -> Self {
        self.xi_scale = c;
        self
    }

    /// Number of parameters, n + 1.
    pub fn param_dim(&self) -> usize {
        self.domain.len()
    }

    /// Screen rank n.
    pub fn n(&self) -> usize {
        self.param_dim() - 1
    }

    pub fn eval<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        self.param.eval(u)
    }

    pub fn check_domain(&self, u: &[f64]) -> Result<(), FrameError> {
        let inside = u.len() == self.domain.len()
            && u.iter().zip(&self.domain).all(|(x, (lo, hi))| x >= lo && x <= hi);
        if inside {
            Ok(())
        } else {
            Err(FrameError::OutOfDomain(u.to_vec()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor_core::Jet1;

    #[test]
    fn inverse_stereographic_lands_on_sphere() {
        let q = inverse_stereographic(&[0.3, -1.2, 0.5]);
        let r2: f64 = q.iter().map(|x| x * x).sum();
        assert!((r2 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn neg_log_of_distance_is_eikonal_for_exponential_warping() {
        // |grad f| = 1/d = e^f
        let f = GraphFunction::NegLog { inner: Box::new(GraphFunction::Cylinder { axes: 2 }) };
        let p = Jet1::seed(&[0.4, 0.7, -0.2]);
        let v = f.eval(&p);
        let grad2: f64 = v.grad.iter().map(|g| g * g).sum();
        assert!((grad2.sqrt() - v.val.exp()).abs() < 1e-12);
    }

    #[test]
    fn gudermannian_of_hyperbolic_radius_is_two_atan() {
        let f = GraphFunction::Gudermannian { inner: Box::new(GraphFunction::HyperbolicRadial) };
        let p = [0.3, 0.1];
        let r = (0.1f64).sqrt();
        assert!((f.eval(&p) - 2.0 * r.atan()).abs() < 1e-14);
    }

    #[test]
    fn de_sitter_distance_point_lies_in_chart() {
        let param = Parameterization::DeSitterDistance { alpha: 0.5 };
        let x = param.eval(&[0.2, 0.3, -0.4]);
        assert_eq!(x.len(), 4);
        assert_eq!(x[0], 0.2);
    }
}
