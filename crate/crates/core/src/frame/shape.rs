//! Second fundamental forms, shape operators, τ and the induced connection,
//! read off from the Gauss-Weingarten decompositions of ambient covariant
//! derivatives of the frame fields.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::fields::{base_choices, frame_from_level0, gamma_apply, level0, metric_dot, FrameChoices, FramePoint, Level0};
use super::hypersurface::HypersurfaceMap;
use crate::error::FrameError;
use crate::tensor_core::{generalized_symmetric_eigen, Jet1, Mat, Scalar, SymMatrix};

/// Local geometry at one point over a generic scalar, in parameter
/// coordinates. Endomorphisms store `A e_i` as column `i`; bilinear forms
/// store `F(e_i, e_j)` at `(i, j)`.
#[derive(Clone, Debug)]
pub struct Shape<S> {
    pub radical_index: usize,
    pub x: Vec<S>,
    pub t: Mat<S>,
    pub gbar: Mat<S>,
    pub g: Mat<S>,
    /// ξ in parameter coordinates.
    pub v: Vec<S>,
    pub xi: Vec<S>,
    pub n_vec: Vec<S>,
    pub eta: Vec<S>,
    pub p: Mat<S>,
    /// `B(e_i, e_j) = -ḡ(e_j, ∇̄_i ξ)`.
    pub b: Mat<S>,
    /// `B` as the transversal part of `∇̄_i ∂_j Ψ`.
    pub b_gauss: Mat<S>,
    /// `C(e_i, P e_j)`.
    pub c: Mat<S>,
    pub a_star: Mat<S>,
    pub a_n: Mat<S>,
    /// `τ` from the ξ line of the Weingarten formulae.
    pub tau: Vec<S>,
    /// `τ` from the N line.
    pub tau_alt: Vec<S>,
    /// Transversal part of `∇̄_i ξ`, zero when ξ is a radical field.
    pub xi_transversal: Vec<S>,
    /// Induced connection `Γ^k_{ij}` flattened `[k][i][j]`.
    pub gamma: Vec<S>,
    /// `Q_j = P(∂_j P + Γ_j P)`, so that `∇*_j (P Z) = Q_j Z` for constant `Z`.
    pub q: Vec<Mat<S>>,
}

pub type ShapeData = Shape<f64>;

impl<S: Scalar> Shape<S> {
    pub fn m(&self) -> usize {
        self.v.len()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&S) -> U + Copy) -> Shape<U> {
        let vmap = |v: &[S]| v.iter().map(f).collect::<Vec<U>>();
        Shape {
            radical_index: self.radical_index,
            x: vmap(&self.x),
            t: self.t.map(f),
            gbar: self.gbar.map(f),
            g: self.g.map(f),
            v: vmap(&self.v),
            xi: vmap(&self.xi),
            n_vec: vmap(&self.n_vec),
            eta: vmap(&self.eta),
            p: self.p.map(f),
            b: self.b.map(f),
            b_gauss: self.b_gauss.map(f),
            c: self.c.map(f),
            a_star: self.a_star.map(f),
            a_n: self.a_n.map(f),
            tau: vmap(&self.tau),
            tau_alt: vmap(&self.tau_alt),
            xi_transversal: vmap(&self.xi_transversal),
            gamma: vmap(&self.gamma),
            q: self.q.iter().map(|q| q.map(f)).collect(),
        }
    }

    pub fn gamma_at(&self, k: usize, i: usize, j: usize) -> S {
        let m = self.m();
        self.gamma[(k * m + i) * m + j].clone()
    }
}

/// Shape data with first parameter derivatives of every field.
#[derive(Clone, Debug)]
pub struct ShapeJet {
    pub value: ShapeData,
    /// `deriv[i]` holds `∂_i` of each field, componentwise.
    pub deriv: Vec<ShapeData>,
}

impl ShapeJet {
    fn from_jet(s: &Shape<Jet1<f64>>) -> Self {
        let m = s.m();
        Self {
            value: s.map(|e| e.val),
            deriv: (0..m).map(|i| s.map(move |e| e.d(i))).collect(),
        }
    }
}

fn build<S: Scalar>(l: &Level0<Jet1<S>>, choices: FrameChoices) -> Result<Shape<S>, FrameError> {
    let val = |e: &Jet1<S>| e.val.clone();
    let vval = |v: &[Jet1<S>]| v.iter().map(val).collect::<Vec<S>>();
    let m = l.v.len();
    let d = l.x.len();
    let t = l.t.map(val);
    let gbar = l.gbar.map(val);
    let gamma_bar = vval(&l.gamma_bar);
    let xi = vval(&l.xi);
    let n_vec = vval(&l.n_vec);
    let eta = vval(&l.eta);
    let p = l.p.map(val);

    let frame = Mat::from_fn(d, d, |a, k| if k < m { t.get(a, k) } else { n_vec[a].clone() });
    let frame_inv = frame
        .inverse()
        .map_err(|e| FrameError::JetFailure(format!("tangent basis and N are not a frame: {e}")))?;
    let dvec = |v: &[Jet1<S>], i: usize| v.iter().map(|e| e.d(i)).collect::<Vec<S>>();
    let add = |a: Vec<S>, b: Vec<S>| a.into_iter().zip(b).map(|(x, y)| x + y).collect::<Vec<S>>();

    let zero = || S::cst(0.0);
    let mut a_star = Mat::zeros(m, m);
    let mut a_n = Mat::zeros(m, m);
    let mut b = Mat::zeros(m, m);
    let mut b_gauss = Mat::zeros(m, m);
    let mut c = Mat::zeros(m, m);
    let mut tau = vec![zero(); m];
    let mut tau_alt = vec![zero(); m];
    let mut xi_transversal = vec![zero(); m];
    let mut gamma = vec![zero(); m * m * m];

    // screen fields T P e_j, still carrying their parameter derivatives
    let screen_fields: Vec<Vec<Jet1<S>>> = (0..m).map(|j| l.t.matvec(&l.p.column(j))).collect();

    for i in 0..m {
        let ti = t.column(i);
        let nab_xi = add(dvec(&l.xi, i), gamma_apply(&gamma_bar, &ti, &xi));
        let coords = frame_inv.matvec(&nab_xi);
        let tan = &coords[..m];
        xi_transversal[i] = coords[m].clone();
        tau[i] = -super::fields::dot(&eta, tan);
        let ptan = p.matvec(tan);
        for k in 0..m {
            a_star.set(k, i, -ptan[k].clone());
        }
        let nab_n = add(dvec(&l.n_vec, i), gamma_apply(&gamma_bar, &ti, &n_vec));
        let coords = frame_inv.matvec(&nab_n);
        for k in 0..m {
            a_n.set(k, i, -coords[k].clone());
        }
        tau_alt[i] = coords[m].clone();

        let dt_i = l.t.map(|e| e.d(i));
        for j in 0..m {
            let tj = t.column(j);
            b.set(i, j, -metric_dot(&gbar, &tj, &nab_xi));
            let w = add(dt_i.column(j), gamma_apply(&gamma_bar, &ti, &tj));
            let coords = frame_inv.matvec(&w);
            b_gauss.set(i, j, coords[m].clone());
            for k in 0..m {
                gamma[(k * m + i) * m + j] = coords[k].clone();
            }
            let sf = &screen_fields[j];
            let nab = add(dvec(sf, i), gamma_apply(&gamma_bar, &ti, &vval(sf)));
            c.set(i, j, metric_dot(&gbar, &nab, &n_vec));
        }
    }

    let q = (0..m)
        .map(|j| {
            let dp = l.p.map(|e| e.d(j));
            let gamma_j = Mat::from_fn(m, m, |k, l2| gamma[(k * m + j) * m + l2].clone());
            let gp = gamma_j.matmul(&p);
            let inner = Mat::from_fn(m, m, |a, bb| dp.get(a, bb) + gp.get(a, bb));
            p.matmul(&inner)
        })
        .collect();

    Ok(Shape {
        radical_index: choices.radical_index,
        x: vval(&l.x),
        t,
        gbar,
        g: l.g.map(val),
        v: vval(&l.v),
        xi,
        n_vec,
        eta,
        p,
        b,
        b_gauss,
        c,
        a_star,
        a_n,
        tau,
        tau_alt,
        xi_transversal,
        gamma,
        q,
    })
}

fn all_finite(s: &ShapeData) -> bool {
    let mats = [&s.g, &s.b, &s.c, &s.a_star, &s.a_n, &s.p];
    mats.iter().all(|m| m.data.iter().all(|v| v.is_finite()))
        && s.tau.iter().chain(&s.gamma).all(|v| v.is_finite())
}

/// Shape data (values only) at `u`.
pub fn shape_at(map: &HypersurfaceMap, u: &[f64]) -> Result<ShapeData, FrameError> {
    let choices = base_choices(map, u)?;
    let l = level0(map, &Jet1::seed(u), choices)?;
    let s = build(&l, choices)?;
    if !all_finite(&s) {
        return Err(FrameError::JetFailure(format!("non-finite shape data at {u:?}")));
    }
    Ok(s)
}

/// Frame, shape data and first derivatives of the shape data at `u`.
pub fn point_at(map: &HypersurfaceMap, u: &[f64]) -> Result<(FramePoint, ShapeJet), FrameError> {
    let choices = base_choices(map, u)?;
    let fp = frame_from_level0(u, &level0(map, u, choices)?, choices)?;
    let seeded: Vec<Jet1<Jet1<f64>>> = Jet1::seed(&Jet1::seed(u));
    let l = level0(map, &seeded, choices)?;
    let jet = ShapeJet::from_jet(&build(&l, choices)?);
    if !all_finite(&jet.value) || !jet.deriv.iter().all(all_finite) {
        return Err(FrameError::JetFailure(format!("non-finite shape jet at {u:?}")));
    }
    Ok((fp, jet))
}

/// Screen principal curvatures with their clustering.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScreenCurvatures {
    /// All n eigenvalues, ascending.
    pub values: Vec<f64>,
    /// Distinct curvatures after clustering, ascending.
    pub distinct: Vec<f64>,
    pub multiplicities: Vec<usize>,
    /// Cluster index of each entry of `values`.
    pub cluster_of: Vec<usize>,
    /// Eigenvectors in screen-basis coordinates, `g_S`-orthonormal columns.
    pub vectors: DMatrix<f64>,
}

pub fn default_cluster_tol(values: &[f64]) -> f64 {
    1e-6 * (1.0 + values.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
}

/// Solves `B_S v = λ g_S v` on the screen and merges curvatures closer than
/// `cluster_tol` (default [`default_cluster_tol`]).
pub fn screen_principal_curvatures(
    b_screen: &SymMatrix,
    g_screen: &SymMatrix,
    cluster_tol: Option<f64>,
) -> Result<ScreenCurvatures, FrameError> {
    let eig = generalized_symmetric_eigen(b_screen, g_screen)?;
    let tol = cluster_tol.unwrap_or_else(|| default_cluster_tol(&eig.values));
    let mut groups: Vec<Vec<f64>> = Vec::new();
    let mut cluster_of = Vec::with_capacity(eig.values.len());
    for &v in &eig.values {
        match groups.last_mut() {
            Some(g) if v - g[g.len() - 1] <= tol => g.push(v),
            _ => groups.push(vec![v]),
        }
        cluster_of.push(groups.len() - 1);
    }
    Ok(ScreenCurvatures {
        distinct: groups.iter().map(|g| g.iter().sum::<f64>() / g.len() as f64).collect(),
        multiplicities: groups.iter().map(Vec::len).collect(),
        cluster_of,
        values: eig.values,
        vectors: eig.vectors,
    })
}

impl ShapeData {
    /// Parameter coordinates of the screen basis `P e_a`, `a != radical_index`.
    pub fn screen_param(&self) -> DMatrix<f64> {
        let idx: Vec<usize> = (0..self.m()).filter(|&k| k != self.radical_index).collect();
        DMatrix::from_fn(self.m(), idx.len(), |r, c| self.p.get(r, idx[c]))
    }

    fn restrict(&self, form: &Mat<f64>) -> DMatrix<f64> {
        let e = self.screen_param();
        let r = e.transpose() * form.to_dmatrix() * &e;
        (&r + r.transpose()) * 0.5
    }

    pub fn screen_metric(&self) -> SymMatrix {
        SymMatrix::new(self.restrict(&self.g)).expect("symmetrized")
    }

    pub fn screen_b(&self) -> SymMatrix {
        SymMatrix::new(self.restrict(&self.b)).expect("symmetrized")
    }

    pub fn curvatures(&self) -> Result<ScreenCurvatures, FrameError> {
        screen_principal_curvatures(&self.screen_b(), &self.screen_metric(), None)
    }

    /// Eigenvectors of A*_ξ in parameter coordinates, one column per curvature value.
    pub fn curvature_vectors(&self, sc: &ScreenCurvatures) -> DMatrix<f64> {
        self.screen_param() * &sc.vectors
    }

    pub fn a_star_matrix(&self) -> DMatrix<f64> {
        self.a_star.to_dmatrix()
    }

    pub fn a_n_matrix(&self) -> DMatrix<f64> {
        self.a_n.to_dmatrix()
    }

    pub fn g_matrix(&self) -> DMatrix<f64> {
        self.g.to_dmatrix()
    }

    /// Residuals tying the alternative routes to each quantity together.
    pub fn consistency_residuals(&self) -> Vec<(&'static str, f64)> {
        let g = self.g_matrix();
        let a = self.a_star_matrix();
        let an = self.a_n_matrix();
        let b = self.b.to_dmatrix();
        let c = self.c.to_dmatrix();
        let p = self.p.to_dmatrix();
        let rel = |diff: DMatrix<f64>, scale: f64| diff.amax() / (1.0 + scale);
        let a_vs_b = a.transpose() * &g;
        let an_vs_c = an.transpose() * &g * &p;
        let tau = DMatrix::from_row_slice(1, self.m(), &self.tau);
        let tau_alt = DMatrix::from_row_slice(1, self.m(), &self.tau_alt);
        vec![
            ("a_star_b_pairing", rel(&a_vs_b - &b, a_vs_b.amax().max(b.amax()))),
            ("a_n_c_pairing", rel(&an_vs_c - &c, an_vs_c.amax().max(c.amax()))),
            ("b_two_routes", rel(&b - self.b_gauss.to_dmatrix(), b.amax())),
            ("tau_two_routes", rel(&tau - &tau_alt, tau.amax())),
            (
                "xi_tangent",
                self.xi_transversal.iter().fold(0.0_f64, |m, v| m.max(v.abs())) / (1.0 + a.amax()),
            ),
        ]
    }
}
