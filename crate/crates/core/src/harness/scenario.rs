use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ambient::{
    anti_de_sitter, de_sitter, grw_chart, minkowski, scaled_minkowski, AmbientChart, Fiber, WarpedProductSpec,
    Warping,
};
use crate::error::HarnessError;
use crate::frame::{GraphFunction, ScreenStrategy, XiNormalization};
use crate::identities::{PairMode, Tolerances};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AmbientSpec {
    Minkowski { dim: usize },
    DeSitter { dim: usize },
    AntiDeSitter { dim: usize },
    Grw { warping: Warping, fiber: Fiber, fiber_dim: usize, t_min: f64, t_max: f64 },
    ScaledMinkowski { dim: usize, scale: f64 },
}

impl AmbientSpec {
    pub fn build(&self) -> Result<AmbientChart, HarnessError> {
        let dim_ok = |d: usize| {
            if d >= 3 {
                Ok(d)
            } else {
                Err(HarnessError::Config(format!("ambient dimension {d} is below 3")))
            }
        };
        Ok(match self {
            AmbientSpec::Minkowski { dim } => minkowski(dim_ok(*dim)?),
            AmbientSpec::DeSitter { dim } => de_sitter(dim_ok(*dim)?),
            AmbientSpec::AntiDeSitter { dim } => anti_de_sitter(dim_ok(*dim)?),
            AmbientSpec::Grw { warping, fiber, fiber_dim, t_min, t_max } => {
                dim_ok(fiber_dim + 1)?;
                grw_chart(WarpedProductSpec {
                    warping: *warping,
                    fiber: *fiber,
                    fiber_dim: *fiber_dim,
                    t_min: *t_min,
                    t_max: *t_max,
                })?
            }
            AmbientSpec::ScaledMinkowski { dim, scale } => {
                if !(*scale > 0.0) {
                    return Err(HarnessError::Config(format!("scale {scale} must be positive")));
                }
                scaled_minkowski(dim_ok(*dim)?, *scale)
            }
        })
    }
}

/// A catalog entry with its parameters, or a user graph over an explicit ambient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct HypersurfaceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog: Option<String>,
    /// Screen rank.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphFunction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Vec<(f64, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub screen_strategy: Option<ScreenStrategy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi_normalization: Option<XiNormalization>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi_scale: Option<f64>,
    /// Holds φ fixed in the quasi-conformal fit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
}

impl HypersurfaceSpec {
    pub fn pair_mode(&self) -> PairMode {
        match self.phi {
            Some(phi) => PairMode::FixedPhi { phi },
            None => PairMode::Fitted,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisRange {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Points per parameter when `ranges` is absent; the hypersurface domain is used.
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ranges: Option<Vec<AxisRange>>,
    /// Distance from declared singular loci below which points are dropped.
    #[serde(default = "default_margin")]
    pub singular_margin: f64,
}

fn default_count() -> usize {
    4
}

fn default_margin() -> f64 {
    1e-2
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { count: default_count(), ranges: None, singular_margin: default_margin() }
    }
}

impl GridSpec {
    /// Tensor-product grid, last parameter varying fastest. A single point on
    /// an axis sits at the midpoint.
    pub fn points(&self, domain: &[(f64, f64)]) -> Vec<Vec<f64>> {
        let axes: Vec<AxisRange> = match &self.ranges {
            Some(r) => r.clone(),
            None => domain.iter().map(|&(min, max)| AxisRange { min, max, count: self.count }).collect(),
        };
        let coords: Vec<Vec<f64>> = axes
            .iter()
            .map(|a| {
                if a.count == 1 {
                    vec![0.5 * (a.min + a.max)]
                } else {
                    (0..a.count).map(|k| a.min + (a.max - a.min) * k as f64 / (a.count - 1) as f64).collect()
                }
            })
            .collect();
        let mut out = vec![Vec::new()];
        for axis in &coords {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    axis.iter().map(move |&x| {
                        let mut p = prefix.clone();
                        p.push(x);
                        p
                    })
                })
                .collect();
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Frame,
    Basic,
    Curvature,
    SpaceForm,
    QuasiConformal,
    Umbilical,
    Isoparametric,
    Cartan,
    Einstein,
    EinsteinStructure,
    RicciFlat,
}

impl CheckName {
    pub const ALL: [CheckName; 11] = [
        CheckName::Frame,
        CheckName::Basic,
        CheckName::Curvature,
        CheckName::SpaceForm,
        CheckName::QuasiConformal,
        CheckName::Umbilical,
        CheckName::Isoparametric,
        CheckName::Cartan,
        CheckName::Einstein,
        CheckName::EinsteinStructure,
        CheckName::RicciFlat,
    ];

    pub fn dependencies(self) -> &'static [CheckName] {
        use CheckName::*;
        match self {
            Umbilical | Isoparametric => &[QuasiConformal],
            Cartan => &[Isoparametric, QuasiConformal],
            EinsteinStructure => &[Einstein, QuasiConformal],
            RicciFlat => &[Einstein],
            _ => &[],
        }
    }

    /// Whether the checker needs a certified constant ambient curvature.
    pub fn needs_space_form(self) -> bool {
        use CheckName::*;
        matches!(self, SpaceForm | Cartan | Einstein | EinsteinStructure | RicciFlat)
    }

    /// `requested` plus everything it depends on, in execution order. The
    /// frame invariants always run.
    pub fn closure(requested: &[CheckName]) -> Vec<CheckName> {
        let mut set: BTreeSet<CheckName> = BTreeSet::new();
        set.insert(CheckName::Frame);
        let mut stack: Vec<CheckName> = requested.to_vec();
        while let Some(c) = stack.pop() {
            if set.insert(c) {
                stack.extend_from_slice(c.dependencies());
            }
        }
        set.into_iter().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksSpec {
    /// `None` runs the core checks: frame, basic, curvature and, on a
    /// certified space form, space_form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enabled: Option<Vec<CheckName>>,
    #[serde(default = "default_ricci_margin")]
    pub ricci_flat_margin: f64,
}

fn default_ricci_margin() -> f64 {
    0.1
}

impl ChecksSpec {
    /// Checks to run, dependencies included, in execution order.
    pub fn resolve(&self, space_form: bool) -> Vec<CheckName> {
        match &self.enabled {
            Some(list) => CheckName::closure(list),
            None => {
                let mut v = vec![CheckName::Basic, CheckName::Curvature];
                if space_form {
                    v.push(CheckName::SpaceForm);
                }
                CheckName::closure(&v)
            }
        }
    }
}

impl Default for ChecksSpec {
    fn default() -> Self {
        Self { enabled: None, ricci_flat_margin: default_ricci_margin() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambient: Option<AmbientSpec>,
    pub hypersurface: HypersurfaceSpec,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub checks: ChecksSpec,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let s: Scenario = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.grid.count == 0 {
            return bad("grid count must be at least 1".into());
        }
        if let Some(r) = &self.grid.ranges {
            if let Some(a) = r.iter().find(|a| a.count == 0 || !(a.min <= a.max)) {
                return bad(format!("invalid grid axis {a:?}"));
            }
        }
        if !(self.grid.singular_margin >= 0.0) {
            return bad("singular_margin must be nonnegative".into());
        }
        if !(self.tolerances.default > 0.0) {
            return bad(format!("tolerance {} must be positive", self.tolerances.default));
        }
        if let Some((k, v)) = self.tolerances.overrides.iter().find(|(_, v)| !(**v > 0.0)) {
            return bad(format!("tolerance for {k} must be positive, got {v}"));
        }
        if !(self.checks.ricci_flat_margin >= 0.0) {
            return bad("ricci_flat_margin must be nonnegative".into());
        }
        if self.hypersurface.catalog.is_none() && self.hypersurface.graph.is_none() {
            return bad("hypersurface needs either `catalog` or `graph`".into());
        }
        Ok(())
    }

    /// Applies `name=value` tolerance overrides.
    pub fn override_tolerances(&mut self, pairs: &[String]) -> Result<(), HarnessError> {
        for p in pairs {
            let (name, value) = p
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("expected name=value, got `{p}`")))?;
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| HarnessError::Config(format!("bad tolerance value `{value}`")))?;
            if !(v > 0.0) {
                return Err(HarnessError::Config(format!("tolerance for {name} must be positive")));
            }
            if name.trim() == "default" {
                self.tolerances.default = v;
            } else {
                self.tolerances.overrides.insert(name.trim().to_string(), v);
            }
        }
        Ok(())
    }
}
