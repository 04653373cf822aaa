use nalgebra::{DMatrix, DVector};

use super::{bilinear, gdot, PointData, Recorder, ResidualRecord, Tolerances};
use crate::ambient::AmbientChart;
use crate::error::CheckError;
use crate::frame::nabla::{
    covariant, covariant_star, gauss_riemann, induced_riemann, nabla_star_a_star, screen_riemann, two_d_tau,
};
use crate::frame::{nabla_derivative, Field};

struct Ctx {
    t: DMatrix<f64>,
    gbar: DMatrix<f64>,
    g: DMatrix<f64>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
    a: DMatrix<f64>,
    an: DMatrix<f64>,
    p: DMatrix<f64>,
    tau: DVector<f64>,
    eta: DVector<f64>,
    v: DVector<f64>,
    xi: DVector<f64>,
    n_vec: DVector<f64>,
}

impl Ctx {
    fn new(pd: &PointData) -> Self {
        let s = pd.shape();
        Self {
            t: s.t.to_dmatrix(),
            gbar: s.gbar.to_dmatrix(),
            g: s.g_matrix(),
            b: s.b.to_dmatrix(),
            c: s.c.to_dmatrix(),
            a: s.a_star_matrix(),
            an: s.a_n_matrix(),
            p: s.p.to_dmatrix(),
            tau: DVector::from_column_slice(&s.tau),
            eta: DVector::from_column_slice(&s.eta),
            v: DVector::from_column_slice(&s.v),
            xi: DVector::from_column_slice(&s.xi),
            n_vec: DVector::from_column_slice(&s.n_vec),
        }
    }

    /// `R̄(TX, TY) TZ` as an ambient vector.
    fn rbar(&self, pd: &PointData, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        let (tx, ty, tz) = (&self.t * x, &self.t * y, &self.t * z);
        DVector::from_vec(pd.rbar.apply(tx.as_slice(), ty.as_slice(), tz.as_slice()))
    }

    fn rbar_with(&self, pd: &PointData, x: &DVector<f64>, y: &DVector<f64>, z_ambient: &DVector<f64>) -> DVector<f64> {
        let (tx, ty) = (&self.t * x, &self.t * y);
        DVector::from_vec(pd.rbar.apply(tx.as_slice(), ty.as_slice(), z_ambient.as_slice()))
    }
}

fn triples(v: &[DVector<f64>]) -> impl Iterator<Item = (&DVector<f64>, &DVector<f64>, &DVector<f64>, &DVector<f64>)> {
    let n = v.len();
    (0..n).map(move |k| (&v[k], &v[(k + 1) % n], &v[(k + 2) % n], &v[(k + 3) % n]))
}

/// Curvature relations that hold in any ambient: the Gauss formula for the
/// induced curvature, its screen and transversal parts, the ξ-N component of
/// R̄, and the algebraic symmetries of the induced curvature.
pub fn check_curvature_relations(pd: &PointData, tol: &Tolerances) -> Vec<ResidualRecord> {
    let cx = Ctx::new(pd);
    let sd = pd.shape();
    let jet = &pd.jet;
    let mut rec = Recorder::new(&pd.u, tol);

    let r = induced_riemann(jet);
    let rg = gauss_riemann(sd, &pd.rbar);
    let m = sd.m();
    let mut worst: f64 = 0.0;
    for l in 0..m {
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    worst = worst.max((r.get(l, k, i, j) - rg.get(l, k, i, j)).abs());
                }
            }
        }
    }
    rec.push("curvature.two_routes", worst, r.max_abs().max(rg.max_abs()));

    let rs = screen_riemann(jet);
    let nb = |x: &DVector<f64>| nabla_derivative(jet, Field::B, x.as_slice()).matrix();
    let apply = |x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>| r.apply(x.as_slice(), y.as_slice(), z.as_slice());

    for (x, y, z, w) in triples(&pd.vectors.tangent) {
        let (pz, pw) = (&cx.p * z, &cx.p * w);

        let lhs = gdot(&cx.g, &apply(x, y, &pz), &pw);
        let rstar = rs.apply(x.as_slice(), y.as_slice(), z.as_slice());
        rec.push_scalar_terms(
            "curvature.screen_gauss",
            &[lhs],
            &[
                gdot(&cx.g, &rstar, &pw),
                bilinear(&cx.c, x, z) * bilinear(&cx.b, y, &pw),
                -bilinear(&cx.c, y, z) * bilinear(&cx.b, x, &pw),
            ],
        );

        let rb = cx.rbar(pd, x, y, z);
        rec.push_scalar_terms(
            "curvature.xi_codazzi",
            &[gdot(&cx.gbar, &rb, &cx.xi)],
            &[
                bilinear(&nb(x), y, z),
                -bilinear(&nb(y), x, z),
                cx.tau.dot(x) * bilinear(&cx.b, y, z),
                -cx.tau.dot(y) * bilinear(&cx.b, x, z),
            ],
        );

        rec.push_scalar_terms(
            "curvature.n_component",
            &[gdot(&cx.gbar, &rb, &cx.n_vec)],
            &[cx.eta.dot(&apply(x, y, z))],
        );

        let rxi = cx.rbar_with(pd, x, y, &cx.xi);
        rec.push_scalar_terms(
            "curvature.xi_n_curvature",
            &[gdot(&cx.gbar, &rxi, &cx.n_vec)],
            &[
                bilinear(&cx.c, y, &(&cx.a * x)),
                -bilinear(&cx.c, x, &(&cx.a * y)),
                -two_d_tau(jet, x.as_slice(), y.as_slice()),
            ],
        );

        let rxy = apply(x, y, z);
        rec.push_terms("curvature.antisymmetry", &[&rxy, &apply(y, x, z)], &[]);
        rec.push_terms("curvature.first_bianchi", &[&rxy, &apply(y, z, x), &apply(z, x, y)], &[]);
    }

    for (x, y, z, w) in triples(&pd.vectors.screen) {
        let g = |a: &DVector<f64>, b: &DVector<f64>| gdot(&cx.g, a, b);
        let (b, c) = (&cx.b, &cx.c);
        rec.push_scalar_terms(
            "curvature.screen_symmetric_part",
            &[g(&apply(x, y, z), w), g(&apply(x, y, w), z)],
            &[
                bilinear(b, y, z) * bilinear(c, x, w),
                bilinear(b, y, w) * bilinear(c, x, z),
                -bilinear(b, x, w) * bilinear(c, y, z),
                -bilinear(b, x, z) * bilinear(c, y, w),
            ],
        );
        rec.push_scalar_terms(
            "curvature.pair_exchange",
            &[g(&apply(y, w, x), z), -g(&apply(x, z, y), w)],
            &[g(&apply(z, x, w), y), -g(&apply(w, y, z), x)],
        );
    }
    rec.finish()
}

/// Identities that hold when the ambient has constant curvature. Refuses
/// charts whose curvature has not been certified.
pub fn check_constant_curvature_identities(
    pd: &PointData,
    ambient: &AmbientChart,
    tol: &Tolerances,
) -> Result<Vec<ResidualRecord>, CheckError> {
    let cbar = ambient.curvature().ok_or(CheckError::UncertifiedCurvature)?;
    let cx = Ctx::new(pd);
    let sd = pd.shape();
    let jet = &pd.jet;
    let r = induced_riemann(jet);
    let mut rec = Recorder::new(&pd.u, tol);
    let nab = |f: Field, x: &DVector<f64>| nabla_derivative(jet, f, x.as_slice()).matrix();

    for (x, y, z, _) in triples(&pd.vectors.tangent) {
        let gyz = gdot(&cx.g, y, z);
        let gxz = gdot(&cx.g, x, z);
        let (bxz, byz) = (bilinear(&cx.b, x, z), bilinear(&cx.b, y, z));
        let (anx, any) = (&cx.an * x, &cx.an * y);
        let (ax, ay) = (&cx.a * x, &cx.a * y);
        let (tx, ty) = (cx.tau.dot(x), cx.tau.dot(y));
        let dtau = two_d_tau(jet, x.as_slice(), y.as_slice());

        let rxy = r.apply(x.as_slice(), y.as_slice(), z.as_slice());
        rec.push_terms(
            "space_form.curvature",
            &[&rxy],
            &[&(x * (cbar * gyz)), &(y * (-cbar * gxz)), &(&any * -bxz), &(&anx * byz)],
        );

        rec.push_scalar_terms(
            "space_form.b_codazzi",
            &[bilinear(&nab(Field::B, x), y, z), -bilinear(&nab(Field::B, y), x, z)],
            &[bxz * ty, -byz * tx],
        );

        rec.push_scalar_terms(
            "space_form.dtau",
            &[bilinear(&cx.b, &any, x), -bilinear(&cx.b, &anx, y)],
            &[dtau],
        );

        let (ex, ey) = (cx.eta.dot(x), cx.eta.dot(y));
        rec.push_terms(
            "space_form.a_n_codazzi",
            &[&(nab(Field::AN, y) * x), &(-(nab(Field::AN, x) * y))],
            &[&(x * (cbar * ey)), &(y * (-cbar * ex)), &(&anx * ty), &(&any * -tx)],
        );

        rec.push_terms(
            "space_form.a_star_codazzi",
            &[&(nab(Field::AStar, x) * y), &(-(nab(Field::AStar, y) * x))],
            &[&(&ax * ty), &(&ay * -tx), &(&cx.v * -dtau)],
        );

        rec.push_terms(
            "space_form.star_codazzi",
            &[&(nabla_star_a_star(jet, x.as_slice()) * y), &(-(nabla_star_a_star(jet, y.as_slice()) * x))],
            &[&(&ax * ty), &(&ay * -tx)],
        );

        // ∇_X (P Z) for constant Z, and X(η(Z))
        let mut nabla_pz = covariant(sd, x.as_slice(), (&cx.p * z).as_slice());
        let mut x_eta_z = 0.0;
        for i in 0..sd.m() {
            nabla_pz += jet.deriv[i].p.to_dmatrix() * z * x[i];
            x_eta_z += x[i] * DVector::from_column_slice(&jet.deriv[i].eta).dot(z);
        }
        let nabla_z = covariant(sd, x.as_slice(), z.as_slice());
        let ez = cx.eta.dot(z);
        rec.push_terms(
            "space_form.projection_derivative",
            &[&nabla_pz],
            &[&nabla_z, &(&cx.v * -x_eta_z), &(&ax * ez), &(&cx.v * (ez * tx))],
        );

        let star = covariant_star(sd, x.as_slice(), z.as_slice());
        rec.push_terms("space_form.screen_connection", &[&star], &[&(&cx.p * nabla_z), &(&ax * ez)]);
    }
    Ok(rec.finish())
}
