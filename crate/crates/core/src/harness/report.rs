//! Report structure and its JSON, CSV and plain-text renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::run::PointFits;
use super::scenario::{CheckName, Scenario};
use crate::error::HarnessError;
use crate::identities::{ResidualRecord, Tolerances};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

impl From<bool> for Verdict {
    fn from(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    /// Position among the retained grid points.
    pub index: usize,
    pub u: Vec<f64>,
    pub fits: PointFits,
    pub records: Vec<ResidualRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentitySummary {
    pub max_residual: f64,
    /// Grid coordinates of the worst residual.
    pub worst_point: Vec<f64>,
    pub tolerance: f64,
    pub count: usize,
    pub pass_rate: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub scenario: Scenario,
    /// Certified constant curvature of the ambient, if any.
    pub ambient_curvature: Option<f64>,
    pub checks: Vec<CheckName>,
    pub grid_points: usize,
    pub excluded_points: usize,
    pub points: Vec<PointReport>,
    /// Records that aggregate over the whole grid.
    pub scenario_records: Vec<ResidualRecord>,
    pub summary: BTreeMap<String, IdentitySummary>,
    pub verdict: Verdict,
}

/// Per-identity maximum residual and pass rate. The identity passes when
/// its maximum residual is within tolerance and no record failed.
pub fn summarize(
    points: &[PointReport],
    scenario_records: &[ResidualRecord],
    tol: &Tolerances,
) -> BTreeMap<String, IdentitySummary> {
    let mut out: BTreeMap<String, IdentitySummary> = BTreeMap::new();
    let all = points.iter().flat_map(|p| p.records.iter()).chain(scenario_records);
    for r in all {
        let e = out.entry(r.identity.clone()).or_insert_with(|| IdentitySummary {
            max_residual: 0.0,
            worst_point: r.point.clone(),
            tolerance: tol.get(&r.identity),
            count: 0,
            pass_rate: 0.0,
            pass: true,
        });
        if r.residual > e.max_residual {
            e.max_residual = r.residual;
            e.worst_point = r.point.clone();
        }
        e.count += 1;
        e.pass_rate += r.pass as u8 as f64;
        e.pass &= r.pass;
    }
    for e in out.values_mut() {
        e.pass_rate /= e.count as f64;
        e.pass &= e.max_residual <= e.tolerance;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Human,
}

pub fn emit_report(r: &Report, format: Format) -> Result<Vec<u8>, HarnessError> {
    match format {
        Format::Json => to_json(r),
        Format::Csv => to_csv(r),
        Format::Human => Ok(to_human(r).into_bytes()),
    }
}

pub fn to_json(r: &Report) -> Result<Vec<u8>, HarnessError> {
    let mut bytes = serde_json::to_vec_pretty(r).map_err(|e| HarnessError::Config(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn from_json(bytes: &[u8]) -> Result<Report, HarnessError> {
    let r: Report = serde_json::from_slice(bytes).map_err(|e| HarnessError::Config(format!("invalid report: {e}")))?;
    if r.schema_version != SCHEMA_VERSION {
        return Err(HarnessError::Config(format!("unsupported schema_version {}", r.schema_version)));
    }
    Ok(r)
}

fn join(u: &[f64]) -> String {
    u.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(";")
}

/// One row per (point, identity). Grid-level records use point index `-1`.
pub fn to_csv(r: &Report) -> Result<Vec<u8>, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| HarnessError::Config(e.to_string());
    w.write_record(["point_index", "u", "identity", "residual", "scale", "tolerance", "pass", "note"])
        .map_err(io)?;
    let rows = r
        .points
        .iter()
        .flat_map(|p| p.records.iter().map(move |rec| (p.index as i64, rec)))
        .chain(r.scenario_records.iter().map(|rec| (-1, rec)));
    for (index, rec) in rows {
        let tol = r.summary.get(&rec.identity).map_or(f64::NAN, |s| s.tolerance);
        w.write_record([
            index.to_string(),
            join(&rec.point),
            rec.identity.clone(),
            format!("{:e}", rec.residual),
            format!("{:e}", rec.scale),
            format!("{tol:e}"),
            rec.pass.to_string(),
            rec.note.clone().unwrap_or_default(),
        ])
        .map_err(io)?;
    }
    w.into_inner().map_err(|e| HarnessError::Config(e.to_string()))
}

fn fmt_list(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:.9}")).collect();
    format!("[{}]", items.join(", "))
}

pub fn to_human(r: &Report) -> String {
    let mut s = String::new();
    let target = r.scenario.hypersurface.catalog.as_deref().unwrap_or("user graph");
    let _ = writeln!(s, "scenario: {target}  seed {}", r.scenario.seed);
    match r.ambient_curvature {
        Some(c) => {
            let _ = writeln!(s, "ambient curvature: {c}");
        }
        None => {
            let _ = writeln!(s, "ambient curvature: not constant");
        }
    }
    let _ = writeln!(
        s,
        "grid: {} points, {} excluded near singular loci\n",
        r.grid_points, r.excluded_points
    );
    let width = r.summary.keys().map(|k| k.len()).max().unwrap_or(8).max(8);
    let _ = writeln!(s, "{:<width$}  {:>6}  {:>11}  {:>9}  {:>7}  verdict", "identity", "count", "max resid", "tol", "pass %");
    for (name, e) in &r.summary {
        let _ = writeln!(
            s,
            "{:<width$}  {:>6}  {:>11.3e}  {:>9.1e}  {:>7.1}  {}",
            name,
            e.count,
            e.max_residual,
            e.tolerance,
            100.0 * e.pass_rate,
            if e.pass { "PASS" } else { "FAIL" }
        );
    }
    for rec in &r.scenario_records {
        if let Some(note) = &rec.note {
            let _ = writeln!(s, "  {}: {note}", rec.identity);
        }
    }

    let _ = writeln!(s, "\nfits per point");
    for p in &r.points {
        let f = &p.fits;
        let _ = writeln!(s, "point {} u = {}", p.index, fmt_list(&p.u));
        let _ = writeln!(s, "  phi    = {:.9}", f.phi);
        let _ = writeln!(s, "  psi    = {:.9}", f.psi);
        if let Some(k) = f.k {
            let _ = writeln!(s, "  k      = {k:.9}");
        }
        let _ = writeln!(s, "  lambda = {}", fmt_list(&f.curvatures));
        if let Some(b) = f.beta {
            let _ = writeln!(s, "  beta   = {b:.9}");
        }
        if let Some(pr) = &f.psi_reference {
            let _ = writeln!(s, "  rho'/rho = {:.9}, psi matches {}", pr.log_derivative, pr.matches);
        }
    }
    let _ = writeln!(s, "\nverdict: {}", if r.verdict == Verdict::Pass { "PASS" } else { "FAIL" });
    s
}
