//! Scenario evaluation over the sample grid.

use serde::{Deserialize, Serialize};

use super::catalog::{build, Built};
use super::par::{map_parallel, thread_cap};
use super::report::{summarize, PointReport, Report, SCHEMA_VERSION};
use super::scenario::{CheckName, Scenario};
use crate::ambient::{certify_in_place, AmbientKind};
use crate::error::{CheckError, HarnessError};
use crate::identities::{
    check_basic_properties, check_cartan, check_constant_curvature_identities, check_curvature_relations,
    check_einstein, check_einstein_structure, check_frame, check_isoparametric, check_ricci_flat, check_umbilical,
    fit_with_mode, CartanData, EinsteinStructureInput, PointData, Recorder, ResidualRecord,
};

/// Comparison of the fitted ψ with the warping function of a GRW chart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiReference {
    /// `rho'/rho` at the chart time of the point.
    pub log_derivative: f64,
    /// `rho'/rho`, `sqrt2 rho'/rho`, `both` or `neither`.
    pub matches: String,
}

/// Fitted quantities at one grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointFits {
    pub phi: f64,
    pub psi: f64,
    pub quasi_conformal_residual: f64,
    pub rank_deficient: bool,
    /// Screen principal curvatures with multiplicity, ascending.
    pub curvatures: Vec<f64>,
    pub distinct: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi_reference: Option<PsiReference>,
}

const PSI_MATCH_TOL: f64 = 1e-8;

fn psi_reference(built: &Built, pd: &PointData, psi: f64) -> Option<PsiReference> {
    let AmbientKind::Warped(w) = &built.map.ambient.kind else { return None };
    let r = w.warping.log_derivative(pd.shape().x[0]);
    let close = |target: f64| (psi - target).abs() <= PSI_MATCH_TOL * (1.0 + target.abs());
    let matches = match (close(r), close(std::f64::consts::SQRT_2 * r)) {
        (true, true) => "both",
        (true, false) => "rho'/rho",
        (false, true) => "sqrt2 rho'/rho",
        (false, false) => "neither",
    };
    Some(PsiReference { log_derivative: r, matches: matches.into() })
}

struct PointOutcome {
    fits: PointFits,
    records: Vec<ResidualRecord>,
}

fn evaluate_point(
    s: &Scenario,
    built: &Built,
    checks: &[CheckName],
    cbar: Option<f64>,
    u: &[f64],
    index: usize,
) -> Result<PointOutcome, HarnessError> {
    let tol = &s.tolerances;
    let pd = PointData::compute(&built.map, u, s.seed, index as u64)?;
    let sc = pd.shape().curvatures()?;
    let mode = s.hypersurface.pair_mode();
    let qc = fit_with_mode(&pd, mode);
    let mut fits = PointFits {
        phi: qc.phi,
        psi: qc.psi,
        quasi_conformal_residual: qc.residual,
        rank_deficient: qc.rank_deficient,
        curvatures: sc.values.clone(),
        distinct: sc.distinct.clone(),
        k: None,
        beta: None,
        psi_reference: psi_reference(built, &pd, qc.psi),
    };
    let need_cbar = || cbar.ok_or(HarnessError::Check(CheckError::UncertifiedCurvature));

    let mut records = Vec::new();
    let mut einstein = None;
    for &c in checks {
        match c {
            CheckName::Frame => records.extend(check_frame(&pd, tol)),
            CheckName::Basic => records.extend(check_basic_properties(&pd, tol)),
            CheckName::Curvature => records.extend(check_curvature_relations(&pd, tol)),
            CheckName::SpaceForm => records.extend(check_constant_curvature_identities(&pd, &built.map.ambient, tol)?),
            CheckName::QuasiConformal => {
                let mut rec = Recorder::new(u, tol);
                rec.push_relative("quasi_conformal.fit", qc.residual, qc.phi.abs() + qc.psi.abs());
                if let Some(p) = &fits.psi_reference {
                    rec.note("quasi_conformal.fit", &format!("psi matches {}", p.matches));
                }
                records.extend(rec.finish());
            }
            CheckName::Umbilical => {
                let (fit, record) = check_umbilical(&pd, Some(&qc), tol);
                fits.beta = Some(fit.beta);
                records.push(record);
            }
            CheckName::Isoparametric => records.extend(check_isoparametric(&pd, mode, tol)?),
            CheckName::Cartan => {
                let worst = records
                    .iter()
                    .filter(|r| r.identity.starts_with("isoparametric.") && !r.pass)
                    .map(|r| r.residual)
                    .fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.max(r))));
                if let Some(w) = worst {
                    return Err(CheckError::NotIsoparametric(w).into());
                }
                let data = CartanData::from_point(&pd)?;
                let accepted = qc.accepted(tol.get("quasi_conformal.fit"));
                records.extend(check_cartan(&data, accepted.then_some(&qc), need_cbar()?, u, tol));
            }
            CheckName::Einstein => {
                let (fit, recs) = check_einstein(&pd, need_cbar()?, tol);
                fits.k = Some(fit.k);
                einstein = Some(fit);
                records.extend(recs);
            }
            CheckName::EinsteinStructure => {
                let fit = einstein.as_ref().expect("einstein runs before einstein_structure");
                let input = EinsteinStructureInput {
                    point: u,
                    values: &sc.values,
                    distinct: &sc.distinct,
                    pair: &qc,
                    einstein: fit,
                    cbar: need_cbar()?,
                };
                records.extend(check_einstein_structure(&input, tol)?);
            }
            CheckName::RicciFlat => {}
        }
    }
    Ok(PointOutcome { fits, records })
}

/// Builds the hypersurface, samples the grid and runs the enabled checks.
/// The first error in grid order aborts the run.
pub fn run_scenario(s: &Scenario) -> Result<Report, HarnessError> {
    run_scenario_with_threads(s, thread_cap())
}

pub fn run_scenario_with_threads(s: &Scenario, threads: Option<usize>) -> Result<Report, HarnessError> {
    s.validate()?;
    let mut built = build(&s.hypersurface, s.ambient.as_ref())?;
    certify_in_place(&mut built.map.ambient)?;
    let cbar = built.map.ambient.curvature();
    let checks = s.checks.resolve(cbar.is_some());
    if cbar.is_none() {
        if let Some(c) = checks.iter().find(|c| c.needs_space_form()) {
            return Err(HarnessError::Config(format!(
                "check `{}` needs a constant-curvature ambient",
                serde_json::to_value(c).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
            )));
        }
    }

    let all = s.grid.points(&built.map.domain);
    let total = all.len();
    let margin = s.grid.singular_margin;
    let points: Vec<Vec<f64>> = all.into_iter().filter(|u| !built.exclusion.excludes(u, margin)).collect();
    super::catalog::validate_eikonal(&built, &points)?;

    let outcomes = map_parallel(&points, threads, |i, u| evaluate_point(s, &built, &checks, cbar, u, i));
    let mut reports = Vec::with_capacity(points.len());
    for (i, (u, out)) in points.iter().zip(outcomes).enumerate() {
        let out = out?;
        reports.push(PointReport { index: i, u: u.clone(), fits: out.fits, records: out.records });
    }

    let mut scenario_records = Vec::new();
    if checks.contains(&CheckName::RicciFlat) {
        let samples: Vec<(Vec<f64>, f64)> =
            reports.iter().filter_map(|p| p.fits.k.map(|k| (p.u.clone(), k))).collect();
        let max_distinct = reports.iter().map(|p| p.fits.distinct.len()).max().unwrap_or(0);
        scenario_records.push(check_ricci_flat(
            &samples,
            cbar.unwrap_or(f64::NAN),
            max_distinct,
            s.checks.ricci_flat_margin,
        ));
    }

    let summary = summarize(&reports, &scenario_records, &s.tolerances);
    let verdict = summary.values().all(|e| e.pass);
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        scenario: s.clone(),
        ambient_curvature: cbar,
        checks,
        grid_points: total,
        excluded_points: total - points.len(),
        points: reports,
        scenario_records,
        summary,
        verdict: verdict.into(),
    })
}
