mod common;

use common::*;
use nullgeo::frame::nabla::induced_riemann;
use nullgeo::frame::{point_at, shape_at, HypersurfaceMap, ShapeData};

fn sample_points(map: &HypersurfaceMap) -> Vec<Vec<f64>> {
    let fracs = [0.23, 0.61, 0.78];
    (0..3)
        .map(|s| {
            map.domain
                .iter()
                .enumerate()
                .map(|(i, (lo, hi))| lo + (hi - lo) * fracs[(i + s) % 3])
                .collect()
        })
        .collect()
}

fn maps() -> Vec<(&'static str, HypersurfaceMap, Vec<Vec<f64>>)> {
    let cyl = cylinder(3, 2);
    let tor = torus(2);
    vec![
        ("de_sitter", de_sitter_map(0.5, 3), sample_points(&de_sitter_map(0.5, 3))),
        ("cone", cone(3), sample_points(&cone(3))),
        ("grw", exp_grw(2), vec![vec![0.7, 0.3, -0.4], vec![-0.5, 0.9, 1.1]]),
        ("ads", ads_umbilic(2), vec![vec![0.2, 0.3, -0.4], vec![-0.5, 0.1, 0.2]]),
        ("cylinder", cyl, vec![vec![0.7, 0.3, -0.4, 0.2], vec![-1.1, 0.4, 0.5, -0.3]]),
        ("torus", tor, vec![vec![1.5, 0.9, 0.3], vec![-0.4, 2.3, -0.7]]),
    ]
}

#[test]
fn connection_and_b_match_gauss_formula() {
    for (name, map, pts) in maps() {
        for u in pts {
            let sd = shape_at(&map, &u).unwrap();
            let (gamma, b) = gauss_connection(&map, &u);
            let m = u.len();
            for k in 0..m {
                for i in 0..m {
                    for j in 0..m {
                        let (got, want) = (sd.gamma_at(k, i, j), gamma[k][i][j]);
                        assert!(rel(got, want) < 1e-10, "{name} Γ^{k}_{i}{j}: {got} vs {want}");
                    }
                    for j in 0..m {
                        assert!(rel(sd.b.get(i, j), b[(i, j)]) < 1e-10, "{name} B_{i}{j}");
                    }
                }
            }
        }
    }
}

#[test]
fn induced_curvature_matches_differentiated_connection() {
    for (name, map, pts) in maps() {
        for u in pts {
            let (_, jet) = point_at(&map, &u).unwrap();
            let r = induced_riemann(&jet);
            let fd = fd_riemann(&map, &u, 1e-5);
            let m = u.len();
            let mut worst: f64 = 0.0;
            for l in 0..m {
                for k in 0..m {
                    for i in 0..m {
                        for j in 0..m {
                            worst = worst.max(rel(r.get(l, k, i, j), fd[((l * m + k) * m + i) * m + j]));
                        }
                    }
                }
            }
            assert!(worst < 1e-6, "{name} at {u:?}: {worst:e}");
        }
    }
}

fn fields(s: &ShapeData) -> Vec<(&'static str, Vec<f64>)> {
    let flat = |m: &nullgeo::tensor_core::Mat<f64>| m.to_dmatrix().as_slice().to_vec();
    vec![
        ("a_star", flat(&s.a_star)),
        ("a_n", flat(&s.a_n)),
        ("b", flat(&s.b)),
        ("p", flat(&s.p)),
        ("g", flat(&s.g)),
        ("tau", s.tau.clone()),
        ("eta", s.eta.clone()),
        ("xi", s.xi.clone()),
        ("n", s.n_vec.clone()),
    ]
}

#[test]
fn field_jets_match_central_differences() {
    let h = 1e-5;
    for (name, map, pts) in maps() {
        for u in pts {
            let (_, jet) = point_at(&map, &u).unwrap();
            for i in 0..u.len() {
                let (mut up, mut um) = (u.clone(), u.clone());
                up[i] += h;
                um[i] -= h;
                let (sp, sm) = (shape_at(&map, &up).unwrap(), shape_at(&map, &um).unwrap());
                let exact = fields(&jet.deriv[i]);
                for (((field, e), (_, p)), (_, q)) in exact.iter().zip(fields(&sp)).zip(fields(&sm)) {
                    for (c, ((e, p), q)) in e.iter().zip(&p).zip(&q).enumerate() {
                        let fd = (p - q) / (2.0 * h);
                        assert!(rel(*e, fd) < 1e-6, "{name} ∂_{i} {field}[{c}]: {e} vs {fd}");
                    }
                }
            }
        }
    }
}

#[test]
fn frame_invariants_hold_everywhere_sampled() {
    for (name, map, pts) in maps() {
        for u in pts {
            let (fp, jet) = point_at(&map, &u).unwrap();
            for (label, r) in fp.invariant_residuals().into_iter().chain(jet.value.consistency_residuals()) {
                assert!(r < 1e-10, "{name} {label}: {r:e}");
            }
        }
    }
}

#[test]
fn de_sitter_screen_curvature_closed_form() {
    for alpha in [0.3, 0.5, 0.8] {
        let map = de_sitter_map(alpha, 3);
        let beta = (1.0_f64 - alpha * alpha).sqrt();
        for t in [-0.9, -0.3, 0.1, 0.4] {
            let u = [t, 0.2, -0.7, 1.1];
            let sd = shape_at(&map, &u).unwrap();
            let lambda = -alpha / (2.0_f64.sqrt() * (alpha * f64::sinh(t) - beta));
            let sc = sd.curvatures().unwrap();
            assert_eq!(sc.distinct.len(), 1);
            for v in sc.values {
                assert!(rel(v, lambda) < 1e-12, "alpha {alpha} t {t}: {v} vs {lambda}");
            }
        }
    }
}

#[test]
fn light_cone_is_umbilic_with_inverse_radius() {
    let map = cone(3);
    for r in [0.4, 1.2, 2.5] {
        let sd = shape_at(&map, &[r, 0.3, -0.1, 0.5]).unwrap();
        let want = -1.0 / (2.0_f64.sqrt() * r);
        for v in sd.curvatures().unwrap().values {
            assert!(rel(v, want) < 1e-12, "r {r}: {v} vs {want}");
        }
    }
}

#[test]
fn null_cylinder_has_sphere_and_flat_curvatures() {
    let map = cylinder(3, 2);
    let u = [0.7, 0.3, -0.4, 0.2];
    let r = (0.7_f64.powi(2) + 0.3_f64.powi(2)).sqrt();
    let sc = shape_at(&map, &u).unwrap().curvatures().unwrap();
    let want = [-1.0 / (2.0_f64.sqrt() * r), 0.0, 0.0];
    for (v, w) in sc.values.iter().zip(want) {
        assert!((v - w).abs() < 1e-12, "{v} vs {w}");
    }
    assert_eq!(sc.distinct.len(), 2);
    assert_eq!(sc.multiplicities, vec![1, 2]);
}

#[test]
fn null_hyperplane_is_totally_geodesic() {
    let map = hyperplane(3);
    let sd = shape_at(&map, &[0.3, -0.2, 0.9, 1.4]).unwrap();
    assert!(sd.b.to_dmatrix().amax() < 1e-15);
    assert!(sd.a_star_matrix().amax() < 1e-15);
    assert!(sd.a_n_matrix().amax() < 1e-15);
    assert!(sd.tau.iter().all(|t| t.abs() < 1e-15));
}
