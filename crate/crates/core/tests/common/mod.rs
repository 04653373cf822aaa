#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use nullgeo::ambient::{
    anti_de_sitter, certify_in_place, de_sitter, grw_chart, minkowski, Fiber, WarpedProductSpec, Warping,
};
use nullgeo::frame::{shape_at, GraphFunction, HypersurfaceMap, Parameterization, ScreenStrategy, XiNormalization};
use nullgeo::tensor_core::Jet1;

pub fn de_sitter_map(alpha: f64, n: usize) -> HypersurfaceMap {
    let mut domain = vec![(-1.0, 0.5)];
    domain.extend(vec![(-1.5, 1.5); n]);
    HypersurfaceMap::new(de_sitter(n + 2), Parameterization::DeSitterDistance { alpha }, domain, ScreenStrategy::GrwLevelSet)
        .with_xi_normalization(XiNormalization::WarpedTime)
}

pub fn hyperplane(n: usize) -> HypersurfaceMap {
    HypersurfaceMap::new(minkowski(n + 2), Parameterization::NullHyperplane, vec![(-2.0, 2.0); n + 1], ScreenStrategy::GrwLevelSet)
}

pub fn cone(n: usize) -> HypersurfaceMap {
    let mut domain = vec![(0.1, 3.0)];
    domain.extend(vec![(-2.0, 2.0); n]);
    HypersurfaceMap::new(minkowski(n + 2), Parameterization::NullCone, domain, ScreenStrategy::GrwLevelSet)
}

pub fn graph(ambient: nullgeo::ambient::AmbientChart, f: GraphFunction, domain: Vec<(f64, f64)>) -> HypersurfaceMap {
    let mut map = HypersurfaceMap::new(ambient, Parameterization::Graph { f }, domain, ScreenStrategy::GrwLevelSet);
    certify_in_place(&mut map.ambient).unwrap();
    map
}

pub fn cylinder(n: usize, axes: usize) -> HypersurfaceMap {
    graph(minkowski(n + 2), GraphFunction::Cylinder { axes }, vec![(-2.0, 2.0); n + 1])
}

pub fn exp_grw(n: usize) -> HypersurfaceMap {
    let chart = grw_chart(WarpedProductSpec {
        warping: Warping::Exp,
        fiber: Fiber::Euclidean,
        fiber_dim: n + 1,
        t_min: -5.0,
        t_max: 5.0,
    })
    .unwrap();
    let f = GraphFunction::NegLog { inner: Box::new(GraphFunction::Cylinder { axes: 2 }) };
    graph(chart, f, vec![(-2.0, 2.0); n + 1])
}

pub fn ads_umbilic(n: usize) -> HypersurfaceMap {
    let f = GraphFunction::Gudermannian { inner: Box::new(GraphFunction::HyperbolicRadial) };
    graph(anti_de_sitter(n + 2), f, vec![(-0.9, 0.9); n + 1])
}

pub fn torus(n: usize) -> HypersurfaceMap {
    graph(minkowski(n + 2), GraphFunction::TorusDistance { major_radius: 2.0 }, vec![(-3.0, 3.0); n + 1])
}

/// `Γ^k_{ij}` of the induced connection from the Gauss formula
/// `∂_i ∂_j Ψ + Γ̄(∂_i Ψ, ∂_j Ψ) = Γ^k_{ij} ∂_k Ψ + B_ij N`, using exact
/// second derivatives of the embedding and the transversal `N` of the
/// frame. Returns `(Γ[k][i][j], B[i][j])`.
pub fn gauss_connection(map: &HypersurfaceMap, u: &[f64]) -> (Vec<Vec<Vec<f64>>>, DMatrix<f64>) {
    let m = u.len();
    let seeds: Vec<Jet1<Jet1<f64>>> = (0..m)
        .map(|i| {
            let inner = Jet1::variable(u[i], i, m);
            Jet1 { val: inner, grad: (0..m).map(|k| Jet1::constant(if k == i { 1.0 } else { 0.0 })).collect() }
        })
        .collect();
    let x = map.eval(&seeds);
    let d = x.len();
    let point: Vec<f64> = x.iter().map(|c| c.val.val).collect();
    let first = DMatrix::from_fn(d, m, |a, i| x[a].val.d(i));
    let second = |a: usize, i: usize, j: usize| x[a].d(i).d(j);
    let chr = map.ambient.christoffels_at(&point).unwrap();
    let n_vec = shape_at(map, u).unwrap().n_vec;
    let basis = DMatrix::from_fn(d, d, |a, k| if k < m { first[(a, k)] } else { n_vec[a] });
    let inv = basis.try_inverse().unwrap();
    let mut gamma = vec![vec![vec![0.0; m]; m]; m];
    let mut b = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let acc = DVector::from_fn(d, |a, _| {
                let mut s = second(a, i, j);
                for p in 0..d {
                    for q in 0..d {
                        s += chr.get(a, p, q) * first[(p, i)] * first[(q, j)];
                    }
                }
                s
            });
            let c = &inv * acc;
            for k in 0..m {
                gamma[k][i][j] = c[k];
            }
            b[(i, j)] = c[m];
        }
    }
    (gamma, b)
}

/// `R^l_{kij}` from central differences of the Gauss-formula connection.
pub fn fd_riemann(map: &HypersurfaceMap, u: &[f64], h: f64) -> Vec<f64> {
    let m = u.len();
    let (g0, _) = gauss_connection(map, u);
    let dg: Vec<_> = (0..m)
        .map(|i| {
            let mut up = u.to_vec();
            let mut um = u.to_vec();
            up[i] += h;
            um[i] -= h;
            let (gp, _) = gauss_connection(map, &up);
            let (gm, _) = gauss_connection(map, &um);
            (gp, gm)
        })
        .collect();
    let d = |i: usize, l: usize, j: usize, k: usize| (dg[i].0[l][j][k] - dg[i].1[l][j][k]) / (2.0 * h);
    let mut out = vec![0.0; m * m * m * m];
    for l in 0..m {
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    let mut r = d(i, l, j, k) - d(j, l, i, k);
                    for p in 0..m {
                        r += g0[l][i][p] * g0[p][j][k] - g0[l][j][p] * g0[p][i][k];
                    }
                    out[((l * m + k) * m + i) * m + j] = r;
                }
            }
        }
    }
    out
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + a.abs().max(b.abs()))
}
