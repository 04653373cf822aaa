use nalgebra::DVector;

use super::fits::{pair_gradient, PairMode};
use super::{PointData, Recorder, ResidualRecord, Tolerances};
use crate::error::FrameError;
use crate::frame::nabla::curvature_derivatives;

/// Derivatives of the screen principal curvatures along unit screen
/// eigenvectors, together with the adapted-pair conditions: τ vanishing on
/// the screen and the pair `(φ, ψ)` constant along it.
pub fn check_isoparametric(pd: &PointData, mode: PairMode, tol: &Tolerances) -> Result<Vec<ResidualRecord>, FrameError> {
    let sd = pd.shape();
    let sc = sd.curvatures()?;
    let vecs = sd.curvature_vectors(&sc);
    let lmax = sc.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let tau = DVector::from_column_slice(&sd.tau);
    let tau_xi = tau.dot(&DVector::from_column_slice(&sd.v)).abs();
    let fit = super::fit_with_mode(pd, mode);
    let (dphi, dpsi) = pair_gradient(pd, mode);
    let (dphi, dpsi) = (DVector::from_vec(dphi), DVector::from_vec(dpsi));

    let mut rec = Recorder::new(&pd.u, tol);
    for a in 0..vecs.ncols() {
        let e = vecs.column(a).into_owned();
        let dl = curvature_derivatives(&pd.jet, &sc, e.as_slice());
        let worst = dl.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        rec.push("isoparametric.curvatures", worst, lmax);
        rec.push("isoparametric.tau_screen", tau.dot(&e), tau_xi.max(lmax));
        rec.push("isoparametric.phi_screen", dphi.dot(&e), fit.phi.abs());
        rec.push("isoparametric.psi_screen", dpsi.dot(&e), fit.psi.abs());
    }
    Ok(rec.finish())
}
