#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean plus leading principal axes, fitted once and then frozen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaBasis {
    pub mean: Vec<f64>,
    /// Unit vectors, largest variance first.
    pub components: Vec<Vec<f64>>,
    /// Sample variance along each component.
    pub variances: Vec<f64>,
    /// Covariance was zero; `apply` projects everything to zero.
    pub rank_deficient: bool,
}

impl PcaBasis {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.mean.len(), "PCA input dimension");
        if self.rank_deficient {
            return vec![0.0; self.components.len()];
        }
        self.components
            .iter()
            .map(|c| {
                c.iter()
                    .zip(v.iter().zip(&self.mean))
                    .map(|(ci, (vi, mi))| ci * (vi - mi))
                    .sum()
            })
            .collect()
    }

    /// Maps a projection back into the input space.
    pub fn reconstruct(&self, z: &[f64]) -> Vec<f64> {
        let mut out = self.mean.clone();
        if self.rank_deficient {
            return out;
        }
        for (c, &zi) in self.components.iter().zip(z) {
            for (o, ci) in out.iter_mut().zip(c) {
                *o += zi * ci;
            }
        }
        out
    }
}

/// Fits `k` principal components to at least three equal-length vectors.
pub fn pca_fit<V: AsRef<[f64]>>(training: &[V], k: usize) -> Result<PcaBasis> {
    if training.len() < 3 {
        return Err(Error::PcaInput(training.len()));
    }
    let d = training[0].as_ref().len();
    if let Some(bad) = training.iter().find(|v| v.as_ref().len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: bad.as_ref().len(),
        });
    }
    let k = k.min(d);
    let n = training.len() as f64;
    let mut mean = vec![0.0; d];
    for v in training {
        for (m, x) in mean.iter_mut().zip(v.as_ref()) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut cov = DMatrix::<f64>::zeros(d, d);
    for v in training {
        let v = v.as_ref();
        for i in 0..d {
            let di = v[i] - mean[i];
            for j in i..d {
                cov[(i, j)] += di * (v[j] - mean[j]);
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            let c = cov[(i, j)] / (n - 1.0);
            cov[(i, j)] = c;
            cov[(j, i)] = c;
        }
    }
    let scale = cov.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    if scale == 0.0 {
        return Ok(PcaBasis {
            mean,
            components: vec![vec![0.0; d]; k],
            variances: vec![0.0; k],
            rank_deficient: true,
        });
    }
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut components = Vec::with_capacity(k);
    let mut variances = Vec::with_capacity(k);
    for &idx in order.iter().take(k) {
        let col = eig.eigenvectors.column(idx);
        let mut c: Vec<f64> = col.iter().copied().collect();
        let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        c.iter_mut().for_each(|v| *v /= norm);
        // sign convention: largest-magnitude entry positive
        let pivot = c
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |best, (i, &v)| if v.abs() > best.1.abs() { (i, v) } else { best });
        if pivot.1 < 0.0 {
            c.iter_mut().for_each(|v| *v = -*v);
        }
        components.push(c);
        variances.push(eig.eigenvalues[idx].max(0.0));
    }
    Ok(PcaBasis {
        mean,
        components,
        variances,
        rank_deficient: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vectors(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| (0..d).map(|j| rng.random_range(-1.0..1.0) * (1.0 + j as f64)).collect())
            .collect()
    }

    #[test]
    fn rank_two_data_reconstructs_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let offset: Vec<f64> = (0..8).map(|_| rng.random_range(-5.0..5.0)).collect();
        let a: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
        let data: Vec<Vec<f64>> = (0..20)
            .map(|_| {
                let (s, t) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
                (0..8).map(|i| offset[i] + s * a[i] + t * b[i]).collect()
            })
            .collect();
        let pca = pca_fit(&data, 2).unwrap();
        for v in &data {
            let r = pca.reconstruct(&pca.apply(v));
            for (x, y) in v.iter().zip(&r) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn mean_projects_to_origin() {
        let data = random_vectors(30, 8, 9);
        let pca = pca_fit(&data, 2).unwrap();
        let z = pca.apply(&pca.mean);
        assert!(z.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn components_are_orthonormal() {
        let pca = pca_fit(&random_vectors(40, 8, 1), 2).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let dot: f64 = pca.components[i].iter().zip(&pca.components[j]).map(|(a, b)| a * b).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-9);
            }
        }
    }

    /// Power iteration with deflation on the explicitly formed covariance.
    fn oracle_top_variances(data: &[Vec<f64>], k: usize) -> Vec<f64> {
        let n = data.len() as f64;
        let d = data[0].len();
        let mean: Vec<f64> = (0..d).map(|j| data.iter().map(|v| v[j]).sum::<f64>() / n).collect();
        let mut c = vec![vec![0.0; d]; d];
        for v in data {
            for i in 0..d {
                for j in 0..d {
                    c[i][j] += (v[i] - mean[i]) * (v[j] - mean[j]) / (n - 1.0);
                }
            }
        }
        let mut out = Vec::new();
        for _ in 0..k {
            let mut x = vec![1.0; d];
            let mut lambda = 0.0;
            for _ in 0..5000 {
                let y: Vec<f64> = (0..d).map(|i| (0..d).map(|j| c[i][j] * x[j]).sum()).collect();
                let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
                lambda = norm;
                x = y.iter().map(|v| v / norm).collect();
            }
            for i in 0..d {
                for j in 0..d {
                    c[i][j] -= lambda * x[i] * x[j];
                }
            }
            out.push(lambda);
        }
        out
    }

    #[test]
    fn variances_ordered_and_match_oracle() {
        let data = random_vectors(50, 8, 21);
        let pca = pca_fit(&data, 2).unwrap();
        assert!(pca.variances[0] >= pca.variances[1]);
        let oracle = oracle_top_variances(&data, 2);
        for (a, b) in pca.variances.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-6 * b.max(1.0), "{a} vs {b}");
        }
        // projected sample variance equals the eigenvalue
        let proj: Vec<Vec<f64>> = data.iter().map(|v| pca.apply(v)).collect();
        for c in 0..2 {
            let var = proj.iter().map(|p| p[c] * p[c]).sum::<f64>() / (data.len() as f64 - 1.0);
            assert!((var - pca.variances[c]).abs() < 1e-9 * var.max(1.0));
        }
    }

    #[test]
    fn identical_vectors_are_rank_deficient() {
        let data = vec![vec![1.0, 2.0, 3.0]; 5];
        let pca = pca_fit(&data, 2).unwrap();
        assert!(pca.rank_deficient);
        assert_eq!(pca.apply(&[9.0, 9.0, 9.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn too_few_vectors() {
        assert_eq!(pca_fit(&[vec![1.0], vec![2.0]], 1), Err(Error::PcaInput(2)));
    }
}
