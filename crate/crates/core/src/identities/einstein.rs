use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::fits::{form_inner, trace, LocalFields};
use super::{PointData, QuasiConformalFit, Recorder, ResidualRecord, Tolerances};
use crate::error::CheckError;
use crate::frame::nabla::induced_riemann;
use crate::tensor_core::{Mat, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EinsteinFit {
    pub k: f64,
    /// Relative misfit of `Ric - k g` on TM.
    pub residual: f64,
}

/// `Ric = c̄ n g + B tr A_N - g(A_N ·, A*_ξ ·)` in a space form of curvature `c̄`.
pub(crate) fn ricci_formula<S: Scalar>(lf: &LocalFields<S>, cbar: f64) -> Mat<S> {
    let n = (lf.v.len() - 1) as f64;
    let tr_an = trace(&lf.an);
    let cross = lf.an.transpose().matmul(&lf.g).matmul(&lf.a);
    Mat::from_fn(lf.g.rows, lf.g.cols, |i, j| {
        lf.g.get(i, j) * (cbar * n) + lf.b.get(i, j) * tr_an.clone() - cross.get(i, j)
    })
}

/// Ricci tensor traced from the induced curvature, `Ric(X, Y) = tr(Z -> R(Z, X) Y)`.
pub fn ricci_direct(pd: &PointData) -> DMatrix<f64> {
    let r = induced_riemann(&pd.jet);
    let m = r.m;
    DMatrix::from_fn(m, m, |j, k| (0..m).map(|p| r.get(p, k, p, j)).sum())
}

/// Least-squares Einstein factor `tr(G⁻¹ Ric_S) / n`.
fn k_of<S: Scalar>(lf: &LocalFields<S>, ric: &Mat<S>) -> S {
    let sc = lf.screen();
    let rs = lf.form_on_screen(&sc, ric);
    trace(&sc.gs_inv.matmul(&rs)) / sc.e.cols as f64
}

fn fit_k(lf: &LocalFields<f64>, ric: &Mat<f64>) -> EinsteinFit {
    let sc = lf.screen();
    let rs = lf.form_on_screen(&sc, ric);
    let k = k_of(lf, ric);
    let d = Mat::from_fn(rs.rows, rs.cols, |i, j| rs.get(i, j) - sc.gs.get(i, j) * k);
    // components along ξ: Ric(ξ, ξ) and Ric(ξ, E_a), Ric(E_a, ξ)
    let rv = ric.matvec(&lf.v);
    let vr = ric.transpose().matvec(&lf.v);
    let xx: f64 = lf.v.iter().zip(&rv).map(|(a, b)| a * b).sum();
    let e = &sc.e;
    let mixed = |w: &[f64]| {
        let c: Vec<f64> = (0..e.cols).map(|a| (0..e.rows).map(|r| e.get(r, a) * w[r]).sum()).collect();
        let gc = sc.gs_inv.matvec(&c);
        c.iter().zip(&gc).map(|(a, b)| a * b).sum::<f64>()
    };
    let misfit = (form_inner(&sc, &d, &d).max(0.0) + xx * xx + mixed(&rv).max(0.0) + mixed(&vr).max(0.0)).sqrt();
    let scale = (form_inner(&sc, &rs, &rs).max(0.0) + xx * xx).sqrt();
    EinsteinFit { k, residual: misfit / (1.0 + scale) }
}

/// Ricci tensor from the space-form formula and the best Einstein factor.
pub fn ricci_and_einstein(pd: &PointData, cbar: f64) -> (DMatrix<f64>, EinsteinFit) {
    let lf = LocalFields::value(&pd.jet);
    let ric = ricci_formula(&lf, cbar);
    let fit = fit_k(&lf, &ric);
    (ric.to_dmatrix(), fit)
}

pub fn einstein_fit(pd: &PointData, cbar: f64) -> EinsteinFit {
    ricci_and_einstein(pd, cbar).1
}

/// Ricci symmetry, agreement of the formula with the traced curvature, and the Einstein fit.
pub fn check_einstein(pd: &PointData, cbar: f64, tol: &Tolerances) -> (EinsteinFit, Vec<ResidualRecord>) {
    let (ric, fit) = ricci_and_einstein(pd, cbar);
    let direct = ricci_direct(pd);
    let mut rec = Recorder::new(&pd.u, tol);
    rec.push("einstein.ricci_symmetry", (&ric - ric.transpose()).amax(), ric.amax());
    rec.push("einstein.ricci_two_routes", (&ric - &direct).amax(), ric.amax().max(direct.amax()));
    rec.push_relative("einstein.fit", fit.residual, fit.k.abs());

    // k must be constant along the screen
    let lf = LocalFields::lift(&pd.jet);
    let k = k_of(&lf, &ricci_formula(&lf, cbar));
    let sd = pd.shape();
    let e = sd.screen_param();
    let gs = sd.screen_metric();
    for a in 0..e.ncols() {
        let norm = gs.entries()[(a, a)].sqrt();
        let dk: f64 = (0..sd.m()).map(|i| k.d(i) * e[(i, a)]).sum::<f64>() / norm;
        rec.push("einstein.k_screen_constant", dk, fit.k.abs());
    }
    (fit, rec.finish())
}

/// Inputs to the eigenvalue relations of a null Einstein, quasi-conformal hypersurface.
#[derive(Clone, Debug)]
pub struct EinsteinStructureInput<'a> {
    pub point: &'a [f64],
    /// All screen principal curvatures, with multiplicity.
    pub values: &'a [f64],
    /// Distinct curvatures after clustering.
    pub distinct: &'a [f64],
    pub pair: &'a QuasiConformalFit,
    pub einstein: &'a EinsteinFit,
    pub cbar: f64,
}

/// Checks the quadratic satisfied by each curvature, the bound on the number
/// of distinct curvatures and the closed forms for one or two curvatures.
pub fn check_einstein_structure(
    input: &EinsteinStructureInput,
    tol: &Tolerances,
) -> Result<Vec<ResidualRecord>, CheckError> {
    if input.einstein.residual > tol.get("einstein.fit") {
        return Err(CheckError::NotEinstein(input.einstein.residual));
    }
    if !input.pair.accepted(tol.get("quasi_conformal.fit")) {
        return Err(CheckError::NotQuasiConformal(input.pair.residual));
    }
    let (phi, psi, k, cbar) = (input.pair.phi, input.pair.psi, input.einstein.k, input.cbar);
    let n = input.values.len() as f64;
    let tr_a: f64 = input.values.iter().sum();
    let k0 = k - cbar * n;
    let mut rec = Recorder::new(input.point, tol);

    for &l in input.values {
        rec.push_scalar_terms(
            "einstein_structure.quadratic",
            &[phi * l * l, -((n - 1.0) * psi + phi * tr_a) * l, k0],
            &[],
        );
    }

    let lmax = input.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let d = input.distinct;
    let spread = if d.len() > 2 {
        d.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    } else {
        0.0
    };
    rec.push("einstein_structure.at_most_two", spread, lmax);
    rec.note("einstein_structure.at_most_two", &format!("{} distinct curvatures", d.len()));

    let phi_zero = phi.abs() <= 1e-12 * (1.0 + psi.abs());
    if phi_zero {
        for &l in input.values {
            rec.push_scalar_terms("einstein_structure.phi_zero_single", &[(n - 1.0) * psi * l], &[k0]);
        }
    } else if d.len() == 2 {
        let (l, mu) = (d[0], d[1]);
        rec.push_scalar_terms("einstein_structure.sum", &[phi * (l + mu)], &[phi * tr_a, (n - 1.0) * psi]);
        rec.push_scalar_terms("einstein_structure.product", &[phi * l * mu], &[k0]);
    } else if d.len() == 1 {
        let l = d[0];
        rec.push_scalar_terms("einstein_structure.single_lambda", &[2.0 * phi * l, psi], &[]);
        rec.push_scalar_terms(
            "einstein_structure.discriminant",
            &[(n - 1.0) * psi * psi, 4.0 * phi * k0],
            &[],
        );
    }
    if d.len() == 1 {
        let l = d[0];
        rec.push_scalar_terms(
            "einstein_structure.single_k",
            &[k],
            &[cbar * n, (n - 1.0) * (phi * l + psi) * l],
        );
    }
    Ok(rec.finish())
}

/// Scenario-level check that `k` stays away from zero over a sampled family
/// with a single curvature in a unit de Sitter ambient.
pub fn check_ricci_flat(
    samples: &[(Vec<f64>, f64)],
    cbar: f64,
    max_distinct: usize,
    margin: f64,
) -> ResidualRecord {
    let applicable = cbar == 1.0 && max_distinct == 1;
    let worst = samples
        .iter()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .cloned()
        .unwrap_or((Vec::new(), f64::MAX));
    let min_k = worst.1.abs();
    if !applicable {
        return ResidualRecord {
            identity: "ricci_flat.margin".into(),
            point: worst.0,
            residual: 0.0,
            scale: min_k,
            pass: true,
            note: Some("not applicable: requires unit positive curvature and one screen curvature".into()),
        };
    }
    ResidualRecord {
        identity: "ricci_flat.margin".into(),
        point: worst.0,
        residual: (margin - min_k).max(0.0),
        scale: min_k,
        pass: min_k > margin,
        note: Some(format!("min |k| = {min_k:.6e}, margin {margin}")),
    }
}
