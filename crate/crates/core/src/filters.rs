//! Low-pass and high-pass polynomial filters over reconstructed structures.
//!
//! Both structures are symmetrized and self-loop normalized before their
//! Laplacians are formed, so the filter spectra stay inside `[0, 1]`.
//! The `k`-fold products are computed once and cached unscaled; the
//! learnable balance `γ = σ(gamma_logit)` only rescales them.

use ndarray::{Array2, ArrayView2};

use crate::graph::{normalize_matrix, GraphError};
use crate::matrix::GraphMatrix;
use crate::reconstruct::ReconstructedStructures;

#[derive(Debug, Clone, PartialEq)]
pub struct FilterConfig {
    /// Filter order `k`.
    pub order: usize,
    /// Unconstrained parameter; `γ = sigmoid(gamma_logit)`.
    pub gamma_logit: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            order: 2,
            gamma_logit: 0.0,
        }
    }
}

impl FilterConfig {
    pub fn gamma(&self) -> f64 {
        sigmoid(self.gamma_logit)
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `I − Ã` of the symmetrized, self-loop normalized structure.
pub fn structure_laplacian(a: &GraphMatrix) -> Result<GraphMatrix, GraphError> {
    Ok(normalize_matrix(&a.symmetrized())?.l_tilde)
}

/// `(I − ½L)^k X` by repeated products.
pub fn low_pass_unscaled(laplacian: &GraphMatrix, x: ArrayView2<f64>, k: usize) -> Array2<f64> {
    let mut z = x.to_owned();
    for _ in 0..k {
        let lz = laplacian.matmul(z.view());
        z.scaled_add(-0.5, &lz);
    }
    z
}

/// `(½L)^k X` by repeated products.
pub fn high_pass_unscaled(laplacian: &GraphMatrix, x: ArrayView2<f64>, k: usize) -> Array2<f64> {
    let mut z = x.to_owned();
    for _ in 0..k {
        z = laplacian.matmul(z.view()) * 0.5;
    }
    z
}

/// `Z_O = (1 − γ)(I − ½L_O)^k X`.
pub fn low_pass(a_o: &GraphMatrix, x: &Array2<f64>, cfg: &FilterConfig) -> Result<Array2<f64>, GraphError> {
    let l = structure_laplacian(a_o)?;
    Ok(low_pass_unscaled(&l, x.view(), cfg.order) * (1.0 - cfg.gamma()))
}

/// `Z_E = γ(½L_E)^k X`.
pub fn high_pass(a_e: &GraphMatrix, x: &Array2<f64>, cfg: &FilterConfig) -> Result<Array2<f64>, GraphError> {
    let l = structure_laplacian(a_e)?;
    Ok(high_pass_unscaled(&l, x.view(), cfg.order) * cfg.gamma())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutput {
    pub z_e: Array2<f64>,
    pub z_o: Array2<f64>,
    pub gamma: f64,
}

/// Cached unscaled filter products for one domain.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    /// `(½L_E)^k X`
    pub high: Array2<f64>,
    /// `(I − ½L_O)^k X`
    pub low: Array2<f64>,
}

impl FilterBank {
    pub fn new(structures: &ReconstructedStructures, x: &Array2<f64>, order: usize) -> Result<Self, GraphError> {
        let l_e = structure_laplacian(&structures.a_e)?;
        let l_o = structure_laplacian(&structures.a_o)?;
        Ok(Self {
            high: high_pass_unscaled(&l_e, x.view(), order),
            low: low_pass_unscaled(&l_o, x.view(), order),
        })
    }

    /// Both paths fed the raw features (order-zero filters on any structure).
    pub fn identity(x: &Array2<f64>) -> Self {
        Self {
            high: x.clone(),
            low: x.clone(),
        }
    }

    pub fn apply(&self, gamma_logit: f64) -> FilterOutput {
        let gamma = sigmoid(gamma_logit);
        FilterOutput {
            z_e: &self.high * gamma,
            z_o: &self.low * (1.0 - gamma),
            gamma,
        }
    }

    /// Derivatives of `(Z_E, Z_O)` with respect to `gamma_logit`.
    pub fn d_gamma_logit(&self, gamma_logit: f64) -> (Array2<f64>, Array2<f64>) {
        let g = sigmoid(gamma_logit);
        let dg = g * (1.0 - g);
        (&self.high * dg, &self.low * (-dg))
    }

    pub fn n(&self) -> usize {
        self.low.nrows()
    }

    pub fn dim(&self) -> usize {
        self.low.ncols()
    }
}

/// Applies both filters with the shared `γ`.
pub fn filter_pair(
    structures: &ReconstructedStructures,
    x: &Array2<f64>,
    cfg: &FilterConfig,
) -> Result<FilterOutput, GraphError> {
    Ok(FilterBank::new(structures, x, cfg.order)?.apply(cfg.gamma_logit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn path3() -> GraphMatrix {
        GraphMatrix::Dense(array![[0.0, 1.0, 0.0], [0.5, 0.0, 0.5], [0.0, 1.0, 0.0]])
    }

    fn dense_power(m: &Array2<f64>, k: usize) -> Array2<f64> {
        let mut p = Array2::eye(m.nrows());
        for _ in 0..k {
            p = p.dot(m);
        }
        p
    }

    #[test]
    fn order_zero_is_scaling() {
        let x = array![[1.0, -2.0], [0.5, 3.0], [2.0, 2.0]];
        let cfg = FilterConfig { order: 0, gamma_logit: 0.7 };
        let g = cfg.gamma();
        assert_eq!(low_pass(&path3(), &x, &cfg).unwrap(), &x * (1.0 - g));
        assert_eq!(high_pass(&path3(), &x, &cfg).unwrap(), &x * g);
    }

    #[test]
    fn saturated_gamma_suppresses_low_pass() {
        let x = array![[1.0, -2.0], [0.5, 3.0], [2.0, 2.0]];
        let cfg = FilterConfig { order: 3, gamma_logit: 20.0 };
        let z = low_pass(&path3(), &x, &cfg).unwrap();
        let xn = x.mapv(|v| v * v).sum().sqrt();
        assert!(z.mapv(|v| v * v).sum().sqrt() <= 1e-6 * xn);
    }

    #[test]
    fn path_low_pass_matches_dense_power() {
        let x = array![[1.0, 0.0], [0.0, 1.0], [2.0, -1.0]];
        let cfg = FilterConfig { order: 2, gamma_logit: -0.3 };
        // oracle: symmetrize, add self-loops, normalize, then form (I − L/2)^2
        let a = path3().to_dense();
        let s = (&a + &a.t()) * 0.5 + Array2::<f64>::eye(3);
        let d: Vec<f64> = (0..3).map(|i| s.row(i).sum()).collect();
        let at = Array2::from_shape_fn((3, 3), |(i, j)| s[[i, j]] / (d[i].sqrt() * d[j].sqrt()));
        let l = Array2::<f64>::eye(3) - &at;
        let t = Array2::<f64>::eye(3) - &l * 0.5;
        let want = dense_power(&t, 2).dot(&x) * (1.0 - cfg.gamma());
        let got = low_pass(&path3(), &x, &cfg).unwrap();
        assert!((got - want).iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn constant_signal_vanishes_under_high_pass_on_regular_structure() {
        let n = 6;
        let trip = (0..n).flat_map(|i| [(i, (i + 1) % n, 1.0), ((i + 1) % n, i, 1.0)]).collect();
        let cycle = GraphMatrix::from_triplets(n, trip);
        let x = Array2::from_elem((n, 1), 1.0);
        let cfg = FilterConfig { order: 2, gamma_logit: 0.0 };
        let z = high_pass(&cycle, &x, &cfg).unwrap();
        assert!(z.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn degree_weighted_constant_vanishes_on_irregular_structure() {
        let a = GraphMatrix::Dense(array![[0.0, 1.0, 1.0, 1.0], [1.0, 0.0, 0.0, 0.0], [1.0, 0.0, 0.0, 1.0], [1.0, 0.0, 1.0, 0.0]]);
        let x = a.row_sums().mapv(|d| (d + 1.0).sqrt()).insert_axis(ndarray::Axis(1));
        let z = high_pass(&a, &x, &FilterConfig { order: 1, gamma_logit: 0.0 }).unwrap();
        assert!(z.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn random_high_pass_matches_dense_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 4;
        let mut a = Array2::zeros((n, n));
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random::<f64>() < 0.6 {
                    a[[i, j]] = 1.0;
                    a[[j, i]] = 1.0;
                }
            }
        }
        let x = Array2::from_shape_fn((n, 3), |_| rng.random_range(-1.0..1.0));
        let cfg = FilterConfig { order: 3, gamma_logit: 0.4 };
        let d: Vec<f64> = (0..n).map(|i| a.row(i).sum() + 1.0).collect();
        let at = Array2::from_shape_fn((n, n), |(i, j)| (a[[i, j]] + if i == j { 1.0 } else { 0.0 }) / (d[i] * d[j]).sqrt());
        let half_l = (Array2::<f64>::eye(n) - &at) * 0.5;
        let want = dense_power(&half_l, 3).dot(&x) * cfg.gamma();
        let got = high_pass(&GraphMatrix::Dense(a), &x, &cfg).unwrap();
        assert!((got - want).iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn pair_at_order_zero_reconstructs_input() {
        let x = array![[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]];
        let s = ReconstructedStructures { a_o: path3(), a_e: path3().symmetrized() };
        for logit in [0.0, -2.0, 1.3] {
            let out = filter_pair(&s, &x, &FilterConfig { order: 0, gamma_logit: logit }).unwrap();
            if logit == 0.0 {
                assert_eq!(out.z_e, &x / 2.0);
                assert_eq!(out.z_o, &x / 2.0);
            }
            assert!((&out.z_e + &out.z_o - &x).iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn gamma_derivative_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let x = Array2::from_shape_fn((3, 2), |_| rng.random_range(-1.0..1.0));
        let s = ReconstructedStructures { a_o: path3(), a_e: path3().symmetrized() };
        let bank = FilterBank::new(&s, &x, 2).unwrap();
        let logit = 0.37;
        let h = 1e-6;
        let (de, d_o) = bank.d_gamma_logit(logit);
        let plus = bank.apply(logit + h);
        let minus = bank.apply(logit - h);
        let fe = (&plus.z_e - &minus.z_e) / (2.0 * h);
        let fo = (&plus.z_o - &minus.z_o) / (2.0 * h);
        for (a, b) in de.iter().chain(d_o.iter()).zip(fe.iter().chain(fo.iter())) {
            assert!((a - b).abs() <= 1e-4 * a.abs().max(b.abs()) + 1e-12);
        }
    }
}
