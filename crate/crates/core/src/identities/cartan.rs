use serde::{Deserialize, Serialize};

use super::{PointData, QuasiConformalFit, Recorder, ResidualRecord, Tolerances};
use crate::error::FrameError;

/// Eigen-data of A*_ξ at a point: one entry per unit eigenvector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CartanData {
    pub values: Vec<f64>,
    /// `g(A_N E_j, E_j)`.
    pub a_n_diag: Vec<f64>,
    pub distinct: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub cluster_of: Vec<usize>,
}

impl CartanData {
    pub fn from_point(pd: &PointData) -> Result<Self, FrameError> {
        let sd = pd.shape();
        let sc = sd.curvatures()?;
        let vecs = sd.curvature_vectors(&sc);
        let g = sd.g_matrix();
        let an = sd.a_n_matrix();
        let a_n_diag = (0..vecs.ncols())
            .map(|j| {
                let e = vecs.column(j);
                (e.transpose() * &g * &an * e)[(0, 0)]
            })
            .collect();
        Ok(Self {
            values: sc.values,
            a_n_diag,
            distinct: sc.distinct,
            multiplicities: sc.multiplicities,
            cluster_of: sc.cluster_of,
        })
    }
}

/// Evaluates both forms of the Cartan-type identity. The sums run over
/// curvatures different from the one at hand, so with a single curvature
/// they are empty and the records carry a "vacuous" note.
pub fn check_cartan(
    data: &CartanData,
    fit: Option<&QuasiConformalFit>,
    cbar: f64,
    point: &[f64],
    tol: &Tolerances,
) -> Vec<ResidualRecord> {
    let mut rec = Recorder::new(point, tol);
    let vacuous = data.distinct.len() == 1;

    for (i, &l) in data.values.iter().enumerate() {
        let mut sum = 0.0;
        let mut scale: f64 = 0.0;
        for (j, &lj) in data.values.iter().enumerate() {
            if data.cluster_of[j] == data.cluster_of[i] {
                continue;
            }
            let term = (cbar + l * data.a_n_diag[j] + lj * data.a_n_diag[i]) / (l - lj);
            sum += term;
            scale = scale.max(term.abs());
        }
        rec.push("cartan.sum", sum, scale);
    }
    if vacuous {
        rec.note("cartan.sum", "vacuous");
    }

    if let Some(q) = fit {
        let d = &data.distinct;
        for i in 0..d.len() {
            let mut sum = 0.0;
            let mut scale: f64 = 0.0;
            for j in 0..d.len() {
                if j == i {
                    continue;
                }
                let term = data.multiplicities[j] as f64
                    * (cbar + 2.0 * q.phi * d[i] * d[j] + q.psi * (d[i] + d[j]))
                    / (d[i] - d[j]);
                sum += term;
                scale = scale.max(term.abs());
            }
            rec.push("cartan.conformal", sum, scale);
        }
        if vacuous {
            rec.note("cartan.conformal", "vacuous");
        }
    }
    rec.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_curvature_data(a_n: [f64; 2]) -> CartanData {
        CartanData {
            values: vec![0.0, 1.0],
            a_n_diag: a_n.to_vec(),
            distinct: vec![0.0, 1.0],
            multiplicities: vec![1, 1],
            cluster_of: vec![0, 1],
        }
    }

    #[test]
    fn flat_product_with_zero_curvature_satisfies_identity() {
        // λ = 0, μ = 1 with A_N = A*: terms vanish
        let recs = check_cartan(&two_curvature_data([0.0, 1.0]), None, 0.0, &[0.0], &Tolerances::default());
        assert!(recs.iter().all(|r| r.pass));
    }

    #[test]
    fn violating_eigen_data_fails() {
        let recs = check_cartan(&two_curvature_data([0.5, 1.0]), None, 0.0, &[0.0], &Tolerances::default());
        assert!(recs.iter().any(|r| !r.pass));
    }

    #[test]
    fn single_curvature_is_vacuous() {
        let data = CartanData {
            values: vec![2.0, 2.0],
            a_n_diag: vec![1.0, 1.0],
            distinct: vec![2.0],
            multiplicities: vec![2],
            cluster_of: vec![0, 0],
        };
        let fit = QuasiConformalFit { phi: 0.0, psi: 1.0, residual: 0.0, rank_deficient: true };
        let recs = check_cartan(&data, Some(&fit), 1.0, &[0.0], &Tolerances::default());
        assert!(recs.iter().all(|r| r.pass && r.residual == 0.0));
        assert!(recs.iter().all(|r| r.note.as_deref() == Some("vacuous")));
    }
}
