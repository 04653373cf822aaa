//! Built-in example hypersurfaces.

use serde::Serialize;

use super::scenario::{AmbientSpec, HypersurfaceSpec};
use crate::ambient::{de_sitter, minkowski, AmbientChart, AmbientKind, Fiber, Warping};
use crate::error::HarnessError;
use crate::frame::{GraphFunction, HypersurfaceMap, Parameterization, ScreenStrategy, XiNormalization};
use crate::tensor_core::Jet1;

/// Relative tolerance for `|grad f| = rho(f)` on graph entries.
pub const EIKONAL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub parameters: &'static str,
    pub ambient: &'static str,
    pub singular_locus: &'static str,
}

pub const ENTRIES: [CatalogEntry; 5] = [
    CatalogEntry {
        name: "minkowski_null_hyperplane",
        summary: "totally geodesic null hyperplane t = x_1",
        parameters: "n (screen rank, default 3)",
        ambient: "Minkowski space of dimension n + 2",
        singular_locus: "none",
    },
    CatalogEntry {
        name: "minkowski_null_cone",
        summary: "future light cone of the origin, (r, w) -> (r, r phi(w)) with phi inverse stereographic",
        parameters: "n (default 3)",
        ambient: "Minkowski space of dimension n + 2",
        singular_locus: "the vertex r = 0",
    },
    CatalogEntry {
        name: "grw_graph",
        summary: "graph t = f(p) in a GRW chart, f solving |grad f| = rho(f)",
        parameters: "n (default 3); graph (default -ln of the distance to a codimension-2 axis); \
                     [ambient] (default -R x_exp R^{n+1})",
        ambient: "any GRW chart",
        singular_locus: "where f is not smooth or leaves its domain",
    },
    CatalogEntry {
        name: "desitter_distance_graph",
        summary: "level set of the distance function in de Sitter space, parameterized by chart time and a stereographic sphere chart",
        parameters: "alpha in (0, 1) (default 0.5); n (default 3)",
        ambient: "de Sitter space -R x_cosh S^{n+1}",
        singular_locus: "alpha sinh t = sqrt(1 - alpha^2), where the screen curvature blows up",
    },
    CatalogEntry {
        name: "cylinder_l2",
        summary: "null cylinder over a round sphere times a flat factor, two screen curvatures",
        parameters: "n (default 3); axes in [2, n] (default 2), the sphere is S^{axes-1}",
        ambient: "Minkowski space of dimension n + 2",
        singular_locus: "the axis",
    },
];

pub fn entry(name: &str) -> Option<&'static CatalogEntry> {
    ENTRIES.iter().find(|e| e.name == name)
}

/// Parameter points dropped from sample grids.
#[derive(Clone, Debug, PartialEq)]
pub enum Exclusion {
    None,
    ConeVertex,
    Graph(GraphFunction),
    DeSitter { alpha: f64 },
}

impl Exclusion {
    pub fn excludes(&self, u: &[f64], margin: f64) -> bool {
        match self {
            Exclusion::None => false,
            Exclusion::ConeVertex => u[0].abs() < margin,
            Exclusion::Graph(f) => f.is_singular(u, margin),
            Exclusion::DeSitter { alpha } => {
                let beta = (1.0 - alpha * alpha).sqrt();
                let t = u[0];
                let last = (beta * t.sinh() + alpha) / t.cosh();
                (alpha * t.sinh() - beta).abs() < margin || (1.0 + last).abs() < margin
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Built {
    pub map: HypersurfaceMap,
    pub exclusion: Exclusion,
    /// Graph function when the eikonal condition must hold.
    pub graph: Option<GraphFunction>,
}

fn bad(msg: impl Into<String>) -> HarnessError {
    HarnessError::BadParams(msg.into())
}

fn screen_rank(spec: &HypersurfaceSpec) -> Result<usize, HarnessError> {
    match spec.n.unwrap_or(3) {
        0 => Err(bad("n must be at least 1")),
        n => Ok(n),
    }
}

fn default_graph() -> GraphFunction {
    GraphFunction::NegLog { inner: Box::new(GraphFunction::Cylinder { axes: 2 }) }
}

/// Builds the hypersurface described by `spec`. Graph entries are checked
/// for the eikonal condition on a default lattice of their domain.
pub fn build(spec: &HypersurfaceSpec, ambient: Option<&AmbientSpec>) -> Result<Built, HarnessError> {
    let (map, exclusion, graph) = match spec.catalog.as_deref() {
        Some("minkowski_null_hyperplane") => {
            let n = screen_rank(spec)?;
            let map = HypersurfaceMap::new(
                minkowski(n + 2),
                Parameterization::NullHyperplane,
                vec![(-1.0, 1.0); n + 1],
                ScreenStrategy::GrwLevelSet,
            );
            (map, Exclusion::None, None)
        }
        Some("minkowski_null_cone") => {
            let n = screen_rank(spec)?;
            let mut domain = vec![(0.5, 2.0)];
            domain.extend(vec![(-1.5, 1.5); n]);
            let map = HypersurfaceMap::new(minkowski(n + 2), Parameterization::NullCone, domain, ScreenStrategy::GrwLevelSet);
            (map, Exclusion::ConeVertex, None)
        }
        Some("desitter_distance_graph") => {
            let n = screen_rank(spec)?;
            let alpha = spec.alpha.unwrap_or(0.5);
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(bad(format!("alpha = {alpha} is outside (0, 1)")));
            }
            let mut domain = vec![(-1.0, 0.5)];
            domain.extend(vec![(-1.5, 1.5); n]);
            let map = HypersurfaceMap::new(
                de_sitter(n + 2),
                Parameterization::DeSitterDistance { alpha },
                domain,
                ScreenStrategy::GrwLevelSet,
            )
            .with_xi_normalization(XiNormalization::WarpedTime);
            (map, Exclusion::DeSitter { alpha }, None)
        }
        Some("cylinder_l2") => {
            let n = screen_rank(spec)?;
            let axes = spec.axes.unwrap_or(2);
            if axes < 2 || axes > n {
                return Err(bad(format!("axes = {axes} must lie in [2, n = {n}]")));
            }
            let f = GraphFunction::Cylinder { axes };
            let mut domain = vec![(0.3, 1.2); axes];
            domain.extend(vec![(-1.0, 1.0); n + 1 - axes]);
            let map = HypersurfaceMap::new(
                minkowski(n + 2),
                Parameterization::Graph { f: f.clone() },
                domain,
                ScreenStrategy::GrwLevelSet,
            );
            (map, Exclusion::Graph(f.clone()), Some(f))
        }
        Some("grw_graph") | None => {
            if spec.catalog.is_none() && ambient.is_none() {
                return Err(bad("a user graph needs an [ambient] section"));
            }
            let chart = match ambient {
                Some(a) => a.build()?,
                None => AmbientSpec::Grw {
                    warping: Warping::Exp,
                    fiber: Fiber::Euclidean,
                    fiber_dim: screen_rank(spec)? + 1,
                    t_min: -5.0,
                    t_max: 5.0,
                }
                .build()?,
            };
            // the ambient fixes n unless it is given
            let n = match spec.n {
                Some(_) => screen_rank(spec)?,
                None => chart.dim.checked_sub(2).filter(|&n| n > 0).ok_or_else(|| bad("ambient dimension too small"))?,
            };
            if chart.dim != n + 2 {
                return Err(bad(format!("ambient dimension {} does not match n + 2 = {}", chart.dim, n + 2)));
            }
            let f = spec.graph.clone().unwrap_or_else(default_graph);
            let domain = match &spec.domain {
                Some(d) => d.clone(),
                None if spec.graph.is_none() => {
                    let mut d = vec![(0.2, 0.6); 2];
                    d.extend(vec![(-1.0, 1.0); n - 1]);
                    d
                }
                None => return Err(bad("a custom graph needs an explicit domain")),
            };
            let map = HypersurfaceMap::new(chart, Parameterization::Graph { f: f.clone() }, domain, ScreenStrategy::GrwLevelSet);
            (map, Exclusion::Graph(f.clone()), Some(f))
        }
        Some(other) => return Err(bad(format!("unknown catalog entry `{other}`"))),
    };
    let mut map = map;
    if let Some(d) = &spec.domain {
        map.domain = d.clone();
    }
    if map.domain.len() != map.ambient.dim - 1 {
        return Err(bad(format!("domain has {} axes, expected {}", map.domain.len(), map.ambient.dim - 1)));
    }
    if let Some(s) = spec.screen_strategy {
        map.screen_strategy = s;
    }
    if let Some(x) = spec.xi_normalization {
        map.xi_normalization = x;
    }
    if let Some(c) = spec.xi_scale {
        if !(c > 0.0) {
            return Err(bad(format!("xi_scale = {c} must be positive")));
        }
        map.xi_scale = c;
    }
    let built = Built { map, exclusion, graph };
    let lattice: Vec<Vec<f64>> = super::scenario::GridSpec { count: 5, ranges: None, singular_margin: 0.0 }
        .points(&built.map.domain)
        .into_iter()
        .filter(|u| !built.exclusion.excludes(u, 1e-2))
        .collect();
    validate_eikonal(&built, &lattice)?;
    Ok(built)
}

/// Convenience wrapper: a catalog entry with default parameters.
pub fn catalog_build(name: &str) -> Result<Built, HarnessError> {
    build(&HypersurfaceSpec { catalog: Some(name.to_string()), ..Default::default() }, None)
}

fn warp_and_fiber(chart: &AmbientChart) -> (Warping, Fiber) {
    match &chart.kind {
        AmbientKind::Warped(w) => (w.warping, w.fiber),
        AmbientKind::ScaledMinkowski { .. } => (Warping::Constant { value: 1.0 }, Fiber::Euclidean),
    }
}

/// `| |df|_δ - rho(f) sqrt(fiber factor) | / (1 + rho sqrt(factor))`.
pub fn eikonal_residual(chart: &AmbientChart, f: &GraphFunction, p: &[f64]) -> f64 {
    let (warping, fiber) = warp_and_fiber(chart);
    let jet = f.eval(&Jet1::seed(p));
    let grad = jet.grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    let target = warping.eval(&jet.val) * fiber.conformal_factor(p).sqrt();
    (grad - target).abs() / (1.0 + target.abs())
}

pub fn validate_eikonal(built: &Built, points: &[Vec<f64>]) -> Result<(), HarnessError> {
    let Some(f) = &built.graph else { return Ok(()) };
    for p in points {
        let r = eikonal_residual(&built.map.ambient, f, p);
        if !(r <= EIKONAL_TOL) {
            return Err(HarnessError::EikonalViolated { residual: r, point: p.clone() });
        }
    }
    Ok(())
}
