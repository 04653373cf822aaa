use nalgebra::DVector;

use super::{bilinear, PointData, Recorder, ResidualRecord, Tolerances};
use crate::frame::{nabla_derivative, Field};

/// Frame invariants and the agreement of the alternative routes to B, τ, A*_ξ and A_N.
pub fn check_frame(pd: &PointData, tol: &Tolerances) -> Vec<ResidualRecord> {
    let mut rec = Recorder::new(&pd.u, tol);
    for (name, r) in pd.frame.invariant_residuals() {
        rec.push_relative(&format!("frame.{name}"), r, 0.0);
    }
    for (name, r) in pd.shape().consistency_residuals() {
        rec.push_relative(&format!("frame.{name}"), r, 0.0);
    }
    rec.finish()
}

/// Pointwise algebraic properties of the shape operators and the metric derivative.
pub fn check_basic_properties(pd: &PointData, tol: &Tolerances) -> Vec<ResidualRecord> {
    let sd = pd.shape();
    let mut rec = Recorder::new(&pd.u, tol);
    let g = sd.g_matrix();
    let a = sd.a_star_matrix();
    let an = sd.a_n_matrix();
    let c = sd.c.to_dmatrix();
    let eta = DVector::from_column_slice(&sd.eta);
    let v = DVector::from_column_slice(&sd.v);

    // ḡ(A_N X, N) = η(A_N X)
    let eta_an = eta.transpose() * &an;
    rec.push("basic.a_n_screen_valued", eta_an.amax(), eta.amax() * an.amax());

    let av = &a * &v;
    rec.push("basic.a_star_kills_xi", av.amax(), a.amax() * v.amax());

    let e = sd.screen_param();
    let ga = e.transpose() * &g * &a * &e;
    rec.push("basic.a_star_symmetric", (&ga - ga.transpose()).amax(), ga.amax());

    // C(X, PY) = g(A_N X, PY) is symmetric on the screen iff the screen is integrable
    let cs = e.transpose() * &c * &e;
    rec.push("basic.screen_integrability", (&cs - cs.transpose()).amax(), cs.amax());

    let b = sd.b.to_dmatrix();
    let tv = &pd.vectors.tangent;
    for k in 0..tv.len() {
        let (x, y, z) = (&tv[k], &tv[(k + 1) % tv.len()], &tv[(k + 2) % tv.len()]);
        let ng = nabla_derivative(&pd.jet, Field::G, x.as_slice()).matrix();
        let lhs = bilinear(&ng, y, z);
        let t1 = bilinear(&b, x, y) * eta.dot(z);
        let t2 = bilinear(&b, x, z) * eta.dot(y);
        rec.push_scalar_terms("basic.metric_derivative", &[lhs], &[t1, t2]);
    }
    rec.finish()
}
