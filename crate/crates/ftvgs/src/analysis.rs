//! Thin SVD, numerical rank, condition number, and incoherence parameters.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::signal::TimeVertexSignal;

/// Default relative singular-value cutoff for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Thin SVD of a signal with the derived quantities used by the sampling
/// bounds: numerical rank, condition number of the rank-`r` part, and the
/// incoherence parameters of the left and right factors.
#[derive(Debug, Clone)]
pub struct SvdSummary {
    /// `N x r` column-orthonormal left factor.
    pub u: DMatrix<f64>,
    /// Positive non-increasing singular values, length `r`.
    pub sigma: DVector<f64>,
    /// `T x r` column-orthonormal right factor.
    pub v: DMatrix<f64>,
    /// Numerical rank `r`.
    pub rank: usize,
    /// `sigma_1 / sigma_r`.
    pub condition_number: f64,
    /// `(N / r) * ||U||_{2,inf}^2`.
    pub mu1: f64,
    /// `(T / r) * ||V||_{2,inf}^2`.
    pub mu2: f64,
}

impl SvdSummary {
    pub fn num_rows(&self) -> usize {
        self.u.nrows()
    }

    pub fn num_cols(&self) -> usize {
        self.v.nrows()
    }
}

/// Largest row-wise l2 norm.
pub fn row_2inf_norm(matrix: &DMatrix<f64>) -> f64 {
    (0..matrix.nrows())
        .map(|i| matrix.row(i).norm())
        .fold(0.0, f64::max)
}

/// Number of singular values above `rank_tol * sigma_1`. Zero matrices have
/// rank 0.
pub fn numerical_rank(matrix: &DMatrix<f64>, rank_tol: f64) -> usize {
    let singular = matrix.clone().singular_values();
    let largest = singular.iter().cloned().fold(0.0, f64::max);
    if largest <= 0.0 {
        return 0;
    }
    singular.iter().filter(|&&s| s > rank_tol * largest).count()
}

/// Thin SVD truncated at numerical rank, with incoherence and condition
/// number. Rejects numerically zero matrices, for which neither is defined.
pub fn thin_svd_summary(signal: &TimeVertexSignal, rank_tol: f64) -> Result<SvdSummary> {
    thin_svd_of(signal.data(), rank_tol)
}

/// As [`thin_svd_summary`] but on a bare matrix.
pub fn thin_svd_of(matrix: &DMatrix<f64>, rank_tol: f64) -> Result<SvdSummary> {
    let (u_full, sigma_full, v_full) = sorted_svd(matrix)?;
    let largest = sigma_full.iter().cloned().fold(0.0, f64::max);
    if largest <= 0.0 {
        return Err(Error::ZeroRank);
    }
    let rank = sigma_full.iter().filter(|&&s| s > rank_tol * largest).count();

    let n = matrix.nrows();
    let t = matrix.ncols();
    let u = u_full.columns(0, rank).into_owned();
    let v = v_full.columns(0, rank).into_owned();
    let sigma = DVector::from_fn(rank, |i, _| sigma_full[i]);
    let condition_number = sigma[0] / sigma[rank - 1];
    let mu1 = (n as f64 / rank as f64) * row_2inf_norm(&u).powi(2);
    let mu2 = (t as f64 / rank as f64) * row_2inf_norm(&v).powi(2);

    Ok(SvdSummary {
        u,
        sigma,
        v,
        rank,
        condition_number,
        mu1,
        mu2,
    })
}

/// Full SVD with singular values sorted in non-increasing order, returning
/// `(U, sigma, V)` with `V` untransposed.
pub(crate) fn sorted_svd(matrix: &DMatrix<f64>) -> Result<(DMatrix<f64>, DVector<f64>, DMatrix<f64>)> {
    let svd = matrix.clone().svd(true, true);
    let u = svd.u.ok_or(Error::EigenFailure { context: "svd" })?;
    let v_t = svd.v_t.ok_or(Error::EigenFailure { context: "svd" })?;
    let s = svd.singular_values;
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenFailure { context: "svd" });
    }

    let k = s.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| s[b].partial_cmp(&s[a]).unwrap());
    let mut u_sorted = DMatrix::zeros(u.nrows(), k);
    let mut v_sorted = DMatrix::zeros(v_t.ncols(), k);
    let mut s_sorted = DVector::zeros(k);
    for (dst, &src) in order.iter().enumerate() {
        u_sorted.set_column(dst, &u.column(src));
        v_sorted.set_column(dst, &v_t.row(src).transpose());
        s_sorted[dst] = s[src];
    }
    Ok((u_sorted, s_sorted, v_sorted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn signal_from(m: DMatrix<f64>) -> TimeVertexSignal {
        TimeVertexSignal::new(m).unwrap()
    }

    #[test]
    fn spike_matrix_is_maximally_coherent() {
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 0)] = 1.0;
        let summary = thin_svd_summary(&signal_from(m), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(summary.rank, 1);
        assert!((summary.mu1 - 4.0).abs() < 1e-12);
        assert!((summary.mu2 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn flat_matrix_is_minimally_coherent() {
        let m = DMatrix::from_element(4, 4, 1.0);
        let summary = thin_svd_summary(&signal_from(m), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(summary.rank, 1);
        assert!((summary.mu1 - 1.0).abs() < 1e-12);
        assert!((summary.mu2 - 1.0).abs() < 1e-12);
        assert!((row_2inf_norm(&summary.u) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn diagonal_condition_number() {
        let m = DMatrix::from_diagonal(&DVector::from_column_slice(&[3.0, 1.0]));
        let summary = thin_svd_summary(&signal_from(m), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(summary.rank, 2);
        assert!((summary.condition_number - 3.0).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix_has_explicit_zero_rank() {
        let zero = DMatrix::zeros(3, 3);
        assert_eq!(numerical_rank(&zero, DEFAULT_RANK_TOL), 0);
        assert!(matches!(
            thin_svd_of(&zero, DEFAULT_RANK_TOL),
            Err(Error::ZeroRank)
        ));
    }

    #[test]
    fn row_2inf_examples() {
        assert_eq!(row_2inf_norm(&DMatrix::identity(3, 3)), 1.0);
        let m = DMatrix::from_row_slice(2, 2, &[3.0, 4.0, 0.0, 0.0]);
        assert_eq!(row_2inf_norm(&m), 5.0);
        assert_eq!(row_2inf_norm(&DMatrix::zeros(2, 3)), 0.0);
    }

    #[test]
    fn numerical_rank_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = DMatrix::from_fn(5, 2, |_, _| rng.gen_range(-1.0..1.0f64));
        let b = DMatrix::from_fn(2, 5, |_, _| rng.gen_range(-1.0..1.0f64));
        assert_eq!(numerical_rank(&(a * b), DEFAULT_RANK_TOL), 2);
        assert_eq!(numerical_rank(&DMatrix::identity(4, 4), DEFAULT_RANK_TOL), 4);
    }

    #[test]
    fn svd_reconstructs_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let n = rng.gen_range(2..9);
            let t = rng.gen_range(2..9);
            let m = DMatrix::from_fn(n, t, |_, _| rng.gen_range(-2.0..2.0));
            let s = thin_svd_of(&m, DEFAULT_RANK_TOL).unwrap();
            let recon = &s.u * DMatrix::from_diagonal(&s.sigma) * s.v.transpose();
            assert!((recon - &m).norm() / m.norm() < 1e-8);
            let r = s.rank;
            assert!((s.u.transpose() * &s.u - DMatrix::<f64>::identity(r, r)).norm() < 1e-8);
            assert!((s.v.transpose() * &s.v - DMatrix::<f64>::identity(r, r)).norm() < 1e-8);
            assert!(s.mu1 >= 1.0 - 1e-9 && s.mu1 <= n as f64 / r as f64 + 1e-9);
            assert!(s.mu2 >= 1.0 - 1e-9 && s.mu2 <= t as f64 / r as f64 + 1e-9);
        }
    }

    /// mu1 only depends on the row space geometry, so column permutations
    /// leave it unchanged; same for mu2 under row permutations, and kappa
    /// under global scaling.
    #[test]
    fn incoherence_invariances() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let base = DMatrix::from_fn(6, 5, |_, _| rng.gen_range(-1.0..1.0f64));
        let s0 = thin_svd_of(&base, DEFAULT_RANK_TOL).unwrap();

        for _ in 0..20 {
            // random column permutation
            let mut cols: Vec<usize> = (0..5).collect();
            for i in (1..cols.len()).rev() {
                cols.swap(i, rng.gen_range(0..=i));
            }
            let mut permuted = DMatrix::zeros(6, 5);
            for (dst, &src) in cols.iter().enumerate() {
                permuted.set_column(dst, &base.column(src));
            }
            let s = thin_svd_of(&permuted, DEFAULT_RANK_TOL).unwrap();
            assert!((s.mu1 - s0.mu1).abs() < 1e-10);

            // random row permutation
            let mut rows: Vec<usize> = (0..6).collect();
            for i in (1..rows.len()).rev() {
                rows.swap(i, rng.gen_range(0..=i));
            }
            let mut permuted = DMatrix::zeros(6, 5);
            for (dst, &src) in rows.iter().enumerate() {
                permuted.set_row(dst, &base.row(src));
            }
            let s = thin_svd_of(&permuted, DEFAULT_RANK_TOL).unwrap();
            assert!((s.mu2 - s0.mu2).abs() < 1e-10);

            let scale = rng.gen_range(0.1..10.0);
            let s = thin_svd_of(&(&base * scale), DEFAULT_RANK_TOL).unwrap();
            assert!((s.condition_number - s0.condition_number).abs() < 1e-8);
        }
    }
}
