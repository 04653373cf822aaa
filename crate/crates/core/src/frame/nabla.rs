//! Covariant derivatives of the shape fields along the induced connection,
//! and the curvature tensors of `∇` and `∇*`.
//!
//! Directions are constant-coefficient fields in parameter coordinates, so
//! their brackets vanish.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::shape::{ScreenCurvatures, ShapeData, ShapeJet};
use crate::ambient::Riemann;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    AStar,
    AN,
    B,
    C,
    G,
    Tau,
}

#[derive(Clone, Debug, PartialEq)]
pub enum NablaValue {
    /// Endomorphism (column `i` is the image of `e_i`) or bilinear form.
    Matrix(DMatrix<f64>),
    Covector(DVector<f64>),
}

impl NablaValue {
    pub fn matrix(self) -> DMatrix<f64> {
        match self {
            NablaValue::Matrix(m) => m,
            NablaValue::Covector(v) => DMatrix::from_column_slice(v.len(), 1, v.as_slice()),
        }
    }

    pub fn covector(self) -> DVector<f64> {
        match self {
            NablaValue::Covector(v) => v,
            NablaValue::Matrix(m) => DVector::from_column_slice(m.as_slice()),
        }
    }
}

/// `(Γ_i)^k_l = Γ^k_{il}`, the connection matrix along `e_i`.
pub fn connection_matrix(sd: &ShapeData, i: usize) -> DMatrix<f64> {
    let m = sd.m();
    DMatrix::from_fn(m, m, |k, l| sd.gamma_at(k, i, l))
}

fn contract(x: &[f64], f: impl Fn(usize) -> DMatrix<f64>) -> DMatrix<f64> {
    let mut acc: Option<DMatrix<f64>> = None;
    for (i, xi) in x.iter().enumerate() {
        let term = f(i) * *xi;
        acc = Some(match acc {
            Some(a) => a + term,
            None => term,
        });
    }
    acc.expect("at least one parameter")
}

fn endo_along(jet: &ShapeJet, sel: fn(&ShapeData) -> DMatrix<f64>, x: &[f64]) -> DMatrix<f64> {
    let a = sel(&jet.value);
    contract(x, |i| {
        let gi = connection_matrix(&jet.value, i);
        sel(&jet.deriv[i]) + &gi * &a - &a * &gi
    })
}

fn bilinear_along(jet: &ShapeJet, sel: fn(&ShapeData) -> DMatrix<f64>, x: &[f64]) -> DMatrix<f64> {
    let f = sel(&jet.value);
    contract(x, |i| {
        let gi = connection_matrix(&jet.value, i);
        sel(&jet.deriv[i]) - gi.transpose() * &f - &f * &gi
    })
}

/// `∇_X` of the selected field at the jet's base point.
pub fn nabla_derivative(jet: &ShapeJet, field: Field, x: &[f64]) -> NablaValue {
    match field {
        Field::AStar => NablaValue::Matrix(endo_along(jet, |s| s.a_star.to_dmatrix(), x)),
        Field::AN => NablaValue::Matrix(endo_along(jet, |s| s.a_n.to_dmatrix(), x)),
        Field::B => NablaValue::Matrix(bilinear_along(jet, |s| s.b.to_dmatrix(), x)),
        Field::G => NablaValue::Matrix(bilinear_along(jet, |s| s.g.to_dmatrix(), x)),
        Field::C => {
            // (∇_X C)(Y, PZ) = X(C(Y,PZ)) - C(∇_X Y, PZ) - C(Y, ∇*_X PZ)
            let c = jet.value.c.to_dmatrix();
            NablaValue::Matrix(contract(x, |i| {
                let gi = connection_matrix(&jet.value, i);
                jet.deriv[i].c.to_dmatrix() - gi.transpose() * &c - &c * jet.value.q[i].to_dmatrix()
            }))
        }
        Field::Tau => {
            let tau = DMatrix::from_column_slice(jet.value.m(), 1, &jet.value.tau);
            let m = contract(x, |i| {
                let gi = connection_matrix(&jet.value, i);
                DMatrix::from_column_slice(jet.value.m(), 1, &jet.deriv[i].tau) - gi.transpose() * &tau
            });
            NablaValue::Covector(DVector::from_column_slice(m.as_slice()))
        }
    }
}

/// `∇*_X A*_ξ = P ∇_X A*_ξ` on screen arguments.
pub fn nabla_star_a_star(jet: &ShapeJet, x: &[f64]) -> DMatrix<f64> {
    jet.value.p.to_dmatrix() * endo_along(jet, |s| s.a_star.to_dmatrix(), x)
}

/// `∇_X Y` for constant-coefficient `X`, `Y`.
pub fn covariant(sd: &ShapeData, x: &[f64], y: &[f64]) -> DVector<f64> {
    let m = sd.m();
    DVector::from_fn(m, |k, _| {
        let mut acc = 0.0;
        for i in 0..m {
            for j in 0..m {
                acc += sd.gamma_at(k, i, j) * x[i] * y[j];
            }
        }
        acc
    })
}

/// `∇*_X (P Z)` for constant-coefficient `X`, `Z`.
pub fn covariant_star(sd: &ShapeData, x: &[f64], z: &[f64]) -> DVector<f64> {
    let zv = DVector::from_column_slice(z);
    let mut acc = DVector::zeros(sd.m());
    for (i, xi) in x.iter().enumerate() {
        acc += sd.q[i].to_dmatrix() * &zv * *xi;
    }
    acc
}

/// `2dτ(X, Y) = X(τ(Y)) - Y(τ(X)) - τ([X, Y])` with the bracket zero.
pub fn two_d_tau(jet: &ShapeJet, x: &[f64], y: &[f64]) -> f64 {
    let m = jet.value.m();
    let mut acc = 0.0;
    for i in 0..m {
        for j in 0..m {
            acc += x[i] * y[j] * (jet.deriv[i].tau[j] - jet.deriv[j].tau[i]);
        }
    }
    acc
}

/// Curvature tensor of a connection on parameter coordinates, `[l][k][i][j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Curvature {
    pub m: usize,
    data: Vec<f64>,
}

impl Curvature {
    pub fn get(&self, l: usize, k: usize, i: usize, j: usize) -> f64 {
        self.data[((l * self.m + k) * self.m + i) * self.m + j]
    }

    /// `R(X, Y) Z`.
    pub fn apply(&self, x: &[f64], y: &[f64], z: &[f64]) -> DVector<f64> {
        let m = self.m;
        DVector::from_fn(m, |l, _| {
            let mut acc = 0.0;
            for k in 0..m {
                for i in 0..m {
                    for j in 0..m {
                        acc += self.get(l, k, i, j) * z[k] * x[i] * y[j];
                    }
                }
            }
            acc
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `R^l_{kij} = ∂_i Γ^l_{jk} - ∂_j Γ^l_{ik} + Γ^l_{ip} Γ^p_{jk} - Γ^l_{jp} Γ^p_{ik}`,
/// from direct differentiation of the induced connection.
pub fn induced_riemann(jet: &ShapeJet) -> Curvature {
    let s = &jet.value;
    let m = s.m();
    let mut data = vec![0.0; m * m * m * m];
    for l in 0..m {
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    let deriv = jet.deriv[i].gamma_at(l, j, k) - jet.deriv[j].gamma_at(l, i, k);
                    let mut quad = 0.0;
                    for p in 0..m {
                        quad += s.gamma_at(l, i, p) * s.gamma_at(p, j, k) - s.gamma_at(l, j, p) * s.gamma_at(p, i, k);
                    }
                    data[((l * m + k) * m + i) * m + j] = deriv + quad;
                }
            }
        }
    }
    Curvature { m, data }
}

/// Induced curvature from the ambient one through the tangential part of the
/// Gauss equation: `R(X,Y)Z = tan R̄(X,Y)Z - B(X,Z) A_N Y + B(Y,Z) A_N X`.
pub fn gauss_riemann(sd: &ShapeData, rbar: &Riemann) -> Curvature {
    let m = sd.m();
    let d = sd.x.len();
    let frame = DMatrix::from_fn(d, d, |a, k| if k < m { sd.t.get(a, k) } else { sd.n_vec[a] });
    let frame_inv = frame.try_inverse().expect("frame is invertible where the shape was built");
    let t = sd.t.to_dmatrix();
    let b = sd.b.to_dmatrix();
    let an = sd.a_n.to_dmatrix();
    let mut data = vec![0.0; m * m * m * m];
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                let r = rbar.apply(t.column(i).as_slice(), t.column(j).as_slice(), t.column(k).as_slice());
                let coords = &frame_inv * DVector::from_vec(r);
                for l in 0..m {
                    data[((l * m + k) * m + i) * m + j] =
                        coords[l] - b[(i, k)] * an[(l, j)] + b[(j, k)] * an[(l, i)];
                }
            }
        }
    }
    Curvature { m, data }
}

/// Curvature of the screen connection, `R*(X,Y)PZ`, as a tensor in the same
/// layout as [`Curvature`] (the `k` slot takes the unprojected `Z`).
pub fn screen_riemann(jet: &ShapeJet) -> Curvature {
    let s = &jet.value;
    let m = s.m();
    let p = s.p.to_dmatrix();
    let q: Vec<DMatrix<f64>> = s.q.iter().map(|q| q.to_dmatrix()).collect();
    let dq = |i: usize, j: usize| jet.deriv[i].q[j].to_dmatrix();
    let mut data = vec![0.0; m * m * m * m];
    for i in 0..m {
        for j in 0..m {
            let r = &q[i] * &q[j] - &q[j] * &q[i] + &p * (dq(i, j) - dq(j, i));
            for l in 0..m {
                for k in 0..m {
                    data[((l * m + k) * m + i) * m + j] = r[(l, k)];
                }
            }
        }
    }
    Curvature { m, data }
}

/// Derivatives of the screen principal curvatures along `X`, one entry per
/// curvature value (clusters resolved by their own eigenproblem).
pub fn curvature_derivatives(jet: &ShapeJet, sc: &ScreenCurvatures, x: &[f64]) -> Vec<f64> {
    let vecs = jet.value.curvature_vectors(sc);
    let g = jet.value.g_matrix();
    let da = endo_along(jet, |s| s.a_star.to_dmatrix(), x);
    let mut out = vec![0.0; sc.values.len()];
    for c in 0..sc.distinct.len() {
        let cols: Vec<usize> = (0..sc.values.len()).filter(|&k| sc.cluster_of[k] == c).collect();
        let vc = DMatrix::from_fn(vecs.nrows(), cols.len(), |r, k| vecs[(r, cols[k])]);
        let mut block = vc.transpose() * &g * &da * &vc;
        block = (&block + block.transpose()) * 0.5;
        let mut vals: Vec<f64> = block.symmetric_eigen().eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        for (k, v) in cols.iter().zip(vals) {
            out[*k] = v;
        }
    }
    out
}
