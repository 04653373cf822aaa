//! Least-squares fits on the screen: the quasi-conformal pair, the Einstein
//! factor and the umbilical factor.

use serde::{Deserialize, Serialize};

use super::{PointData, ResidualRecord, Tolerances};
use crate::frame::ShapeJet;
use crate::tensor_core::{Jet1, Mat, Scalar};

/// The fields the fits read, over a generic scalar so the same code yields
/// parameter derivatives of the fitted quantities.
#[derive(Clone, Debug)]
pub(crate) struct LocalFields<S> {
    pub radical: usize,
    pub g: Mat<S>,
    pub b: Mat<S>,
    pub a: Mat<S>,
    pub an: Mat<S>,
    pub p: Mat<S>,
    pub v: Vec<S>,
}

impl LocalFields<f64> {
    pub fn value(jet: &ShapeJet) -> Self {
        let s = &jet.value;
        Self {
            radical: s.radical_index,
            g: s.g.clone(),
            b: s.b.clone(),
            a: s.a_star.clone(),
            an: s.a_n.clone(),
            p: s.p.clone(),
            v: s.v.clone(),
        }
    }
}

impl LocalFields<Jet1<f64>> {
    pub fn lift(jet: &ShapeJet) -> Self {
        let m = jet.value.m();
        let lift_mat = |sel: fn(&crate::frame::ShapeData) -> &Mat<f64>| {
            let base = sel(&jet.value);
            Mat::from_fn(base.rows, base.cols, |i, j| Jet1 {
                val: base.get(i, j),
                grad: (0..m).map(|k| sel(&jet.deriv[k]).get(i, j)).collect(),
            })
        };
        Self {
            radical: jet.value.radical_index,
            g: lift_mat(|s| &s.g),
            b: lift_mat(|s| &s.b),
            a: lift_mat(|s| &s.a_star),
            an: lift_mat(|s| &s.a_n),
            p: lift_mat(|s| &s.p),
            v: (0..m)
                .map(|i| Jet1 { val: jet.value.v[i], grad: (0..m).map(|k| jet.deriv[k].v[i]).collect() })
                .collect(),
        }
    }
}

/// Screen basis `E = [P e_a]`, its Gram matrix and inverse.
pub(crate) struct Screen<S> {
    pub e: Mat<S>,
    pub gs: Mat<S>,
    pub gs_inv: Mat<S>,
}

impl<S: Scalar> LocalFields<S> {
    pub fn screen(&self) -> Screen<S> {
        let m = self.v.len();
        let idx: Vec<usize> = (0..m).filter(|&k| k != self.radical).collect();
        let e = Mat::from_fn(m, idx.len(), |r, c| self.p.get(r, idx[c]));
        let gs = e.transpose().matmul(&self.g).matmul(&e);
        let gs_inv = gs.inverse().expect("screen metric is positive definite");
        Screen { e, gs, gs_inv }
    }

    /// Screen-coordinate matrix of a screen-valued endomorphism.
    pub fn endo_on_screen(&self, sc: &Screen<S>, a: &Mat<S>) -> Mat<S> {
        sc.gs_inv.matmul(&sc.e.transpose()).matmul(&self.g).matmul(a).matmul(&sc.e)
    }

    pub fn form_on_screen(&self, sc: &Screen<S>, f: &Mat<S>) -> Mat<S> {
        sc.e.transpose().matmul(f).matmul(&sc.e)
    }
}

pub(crate) fn trace<S: Scalar>(a: &Mat<S>) -> S {
    (0..a.rows).fold(S::cst(0.0), |acc, i| acc + a.get(i, i))
}

/// `tr(G⁻¹ Xᵀ G Y)`: the Frobenius product of screen endomorphisms in an
/// orthonormal frame.
pub(crate) fn endo_inner<S: Scalar>(sc: &Screen<S>, x: &Mat<S>, y: &Mat<S>) -> S {
    trace(&sc.gs_inv.matmul(&x.transpose()).matmul(&sc.gs).matmul(y))
}

/// `tr(G⁻¹ X G⁻¹ Y)`: the Frobenius product of screen bilinear forms in an
/// orthonormal frame.
pub(crate) fn form_inner<S: Scalar>(sc: &Screen<S>, x: &Mat<S>, y: &Mat<S>) -> S {
    trace(&sc.gs_inv.matmul(x).matmul(&sc.gs_inv).matmul(y))
}

fn sub<S: Scalar>(a: &Mat<S>, b: &Mat<S>) -> Mat<S> {
    Mat::from_fn(a.rows, a.cols, |i, j| a.get(i, j) - b.get(i, j))
}

fn scaled<S: Scalar>(a: &Mat<S>, c: S) -> Mat<S> {
    a.map(|x| x.clone() * c.clone())
}

/// How φ is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PairMode {
    /// Least squares over both φ and ψ. When A*_ξ is a multiple of P the
    /// system is rank deficient; φ is then set to 0.
    #[default]
    Fitted,
    /// φ held at the given value, ψ fitted.
    FixedPhi { phi: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiConformalFit {
    pub phi: f64,
    pub psi: f64,
    /// Relative misfit of `A_N - φ A*_ξ - ψ P`.
    pub residual: f64,
    pub rank_deficient: bool,
}

impl QuasiConformalFit {
    pub fn accepted(&self, tol: f64) -> bool {
        self.residual <= tol
    }
}

/// `(φ, ψ)` over a generic scalar. `single_curvature` selects the rank
/// deficient branch; the caller decides it once from the clustered curvatures.
pub(crate) fn pair<S: Scalar>(lf: &LocalFields<S>, single_curvature: bool, mode: PairMode) -> (S, S) {
    let sc = lf.screen();
    let a = lf.endo_on_screen(&sc, &lf.a);
    let an = lf.endo_on_screen(&sc, &lf.an);
    let n = sc.e.cols as f64;
    let tr_a = trace(&a);
    let tr_an = trace(&an);
    match mode {
        PairMode::FixedPhi { phi } => (S::cst(phi), (tr_an - tr_a * phi) / n),
        PairMode::Fitted if single_curvature => (S::cst(0.0), tr_an / n),
        PairMode::Fitted => {
            let a11 = endo_inner(&sc, &a, &a);
            let r1 = endo_inner(&sc, &an, &a);
            let det = a11.clone() * n - tr_a.sq();
            let phi = (r1.clone() * n - tr_a.clone() * tr_an.clone()) / det.clone();
            let psi = (a11 * tr_an - tr_a * r1) / det;
            (phi, psi)
        }
    }
}

fn qc_residual(lf: &LocalFields<f64>, phi: f64, psi: f64) -> f64 {
    let sc = lf.screen();
    let a = lf.endo_on_screen(&sc, &lf.a);
    let an = lf.endo_on_screen(&sc, &lf.an);
    let k = a.rows;
    let d = sub(&sub(&an, &scaled(&a, phi)), &scaled(&Mat::identity(k), psi));
    // A_N ξ must vanish as well, since A*_ξ ξ = 0 and P ξ = 0
    let anv = lf.an.matvec(&lf.v);
    let gv = lf.g.matvec(&anv);
    let radical_part: f64 = anv.iter().zip(&gv).map(|(x, y)| x * y).sum();
    let misfit = (endo_inner(&sc, &d, &d) + radical_part.abs()).max(0.0).sqrt();
    let scale = endo_inner(&sc, &an, &an).max(0.0).sqrt();
    misfit / (1.0 + scale)
}

pub(crate) fn single_curvature(pd: &PointData) -> bool {
    pd.shape().curvatures().map(|c| c.distinct.len() == 1).unwrap_or(false)
}

/// Fits `A_N ≈ φ A*_ξ + ψ P` on the screen.
pub fn fit_quasi_conformal(pd: &PointData) -> QuasiConformalFit {
    fit_with_mode(pd, PairMode::Fitted)
}

/// Fits ψ with φ held fixed.
pub fn fit_quasi_conformal_fixed_phi(pd: &PointData, phi: f64) -> QuasiConformalFit {
    fit_with_mode(pd, PairMode::FixedPhi { phi })
}

pub fn fit_with_mode(pd: &PointData, mode: PairMode) -> QuasiConformalFit {
    let lf = LocalFields::value(&pd.jet);
    let single = single_curvature(pd);
    let (phi, psi) = pair(&lf, single, mode);
    QuasiConformalFit {
        phi,
        psi,
        residual: qc_residual(&lf, phi, psi),
        rank_deficient: single && mode == PairMode::Fitted,
    }
}

/// Parameter gradients of `(φ, ψ)`.
pub(crate) fn pair_gradient(pd: &PointData, mode: PairMode) -> (Vec<f64>, Vec<f64>) {
    let lf = LocalFields::lift(&pd.jet);
    let (phi, psi) = pair(&lf, single_curvature(pd), mode);
    let m = pd.shape().m();
    ((0..m).map(|k| phi.d(k)).collect(), (0..m).map(|k| psi.d(k)).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UmbilicalFit {
    pub beta: f64,
    pub residual: f64,
}

/// Fits `B ≈ β g`. The record passes when the hypersurface is totally
/// umbilical at the point; when `qc` is also accepted the note carries the
/// leaf mean-curvature components `(βφ + ψ, β)`.
pub fn check_umbilical(
    pd: &PointData,
    qc: Option<&QuasiConformalFit>,
    tol: &Tolerances,
) -> (UmbilicalFit, ResidualRecord) {
    let lf = LocalFields::value(&pd.jet);
    let sc = lf.screen();
    let bs = lf.form_on_screen(&sc, &lf.b);
    let n = sc.e.cols as f64;
    let beta = trace(&sc.gs_inv.matmul(&bs)) / n;
    let d = sub(&bs, &scaled(&sc.gs, beta));
    // B(ξ, ·) vanishes for a radical ξ; include it so a broken frame cannot pass
    let bv = lf.b.transpose().matvec(&lf.v);
    let radical: f64 = bv.iter().map(|x| x * x).sum();
    let misfit = (form_inner(&sc, &d, &d).max(0.0) + radical).sqrt();
    let scale = form_inner(&sc, &bs, &bs).max(0.0).sqrt();
    let residual = misfit / (1.0 + scale);
    let t = tol.get("umbilical.fit");
    let pass = residual <= t;
    let note = match qc {
        Some(q) if pass && q.accepted(tol.get("quasi_conformal.fit")) => {
            Some(format!("leaf mean curvature components ({:.12e}, {:.12e})", beta * q.phi + q.psi, beta))
        }
        _ => None,
    };
    let rec = ResidualRecord {
        identity: "umbilical.fit".into(),
        point: pd.u.clone(),
        residual,
        scale,
        pass,
        note,
    };
    (UmbilicalFit { beta, residual }, rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fields(a: &[f64], an: &[f64]) -> LocalFields<f64> {
        // radical direction e_0, screen e_1.., identity metric on the screen
        let m = a.len() + 1;
        let g = Mat::from_fn(m, m, |i, j| if i == j && i > 0 { 1.0 } else { 0.0 });
        let diag = |d: &[f64]| Mat::from_fn(m, m, |i, j| if i == j && i > 0 { d[i - 1] } else { 0.0 });
        LocalFields { radical: 0, g: g.clone(), b: diag(a), a: diag(a), an: diag(an), p: g, v: {
            let mut v = vec![0.0; m];
            v[0] = 1.0;
            v
        } }
    }

    #[test]
    fn screen_conformal_fixture_recovers_factor() {
        let lf = fields(&[1.0, 2.0, -0.5], &[3.0, 6.0, -1.5]);
        let (phi, psi) = pair(&lf, false, PairMode::Fitted);
        assert!((phi - 3.0).abs() < 1e-12);
        assert!(psi.abs() < 1e-12);
        assert!(qc_residual(&lf, phi, psi) < 1e-14);
    }

    #[test]
    fn multiple_of_projection_takes_zero_phi() {
        let lf = fields(&[0.7, 0.7], &[1.1, 1.1]);
        let (phi, psi) = pair(&lf, true, PairMode::Fitted);
        assert_eq!(phi, 0.0);
        assert!((psi - 1.1).abs() < 1e-14);
    }

    #[test]
    fn non_quasi_conformal_leaves_residual() {
        let lf = fields(&[1.0, 2.0, 3.0], &[1.0, 5.0, 2.0]);
        let (phi, psi) = pair(&lf, false, PairMode::Fitted);
        assert!(qc_residual(&lf, phi, psi) > 0.1);
    }
}
