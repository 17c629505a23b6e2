//! Reconstruction from structurally missing samples with low-rank, sparse,
//! and smooth priors.
//!
//! The solver minimizes a rank surrogate `sum_i g(lambda_i(X^T X))` with
//! `g(x) = log(sqrt(x) + 1)`, weighted l1 penalties on the graph and time
//! spectra, and a squared second-difference penalty, subject to the spectra
//! reproducing the iterate and the iterate matching every observed entry.
//! Three nested loops drive it:
//!
//! * outer loop `p`: reweights the l1 penalties by the inverse magnitude of
//!   the previous spectra,
//! * middle loop `k`: ADMM sweeps over the spectra, the iterate, the error
//!   matrix, and the multipliers, with geometrically growing penalties,
//! * inner loop `q`: accelerated proximal (soft-thresholding) steps for each
//!   spectrum subproblem.
//!
//! A singular-value-thresholding baseline that uses only the low-rank prior
//! lives in [`svt`]; it is the contrast case that cannot fill fully
//! unobserved rows and columns.

pub mod svt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::{ObservedMatrix, SampleSet};
use crate::signal::{TemporalOperators, TimeVertexSignal};
use crate::spectral::SpectralBases;

/// All tunables of the reconstruction.
///
/// `mu_init = None` uses `1 / (2 max sigma(X_S))`, the initialization the
/// experiments prescribe. Penalties grow by `rho > 1` every middle iteration
/// and are capped at `mu_max_factor * mu_init` to keep the linear systems
/// well conditioned.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct LsspConfig {
    /// Graph-spectrum l1 weight.
    pub gamma_g: f64,
    /// Time-spectrum l1 weight.
    pub gamma_t: f64,
    /// Temporal second-difference weight.
    pub gamma_d: f64,
    /// Reweighting offset; weights are `1 / (|F| + zeta)`.
    pub zeta: f64,
    /// Initial penalty shared by all three constraints.
    pub mu_init: Option<f64>,
    /// Penalty growth factor per middle iteration.
    pub rho: f64,
    /// Penalty cap as a multiple of the initial penalty.
    pub mu_max_factor: f64,
    /// Outer reweighting iterations `P`.
    pub outer_iters: usize,
    /// Middle ADMM iterations `K` per outer pass.
    pub middle_iters: usize,
    /// Inner proximal iterations `Q` per spectrum update.
    pub inner_iters: usize,
    /// Outer stop: relative change of the iterate between outer passes.
    pub tol: f64,
    /// Eigenvalue floor before applying `g'`, as a fraction of the largest
    /// eigenvalue of the current `x_hat^T x_hat` (absolute minimum 1e-12).
    ///
    /// `g'` is singular at zero, so an unfloored weight matrix walls off
    /// every direction the iterate has not visited yet and the solve can
    /// never leave the span of its initialization. A scale-relative floor
    /// keeps the low-rank pull finite while still shrinking weak directions.
    pub rank_surrogate_floor: f64,
    /// Restart the penalties and multipliers at the start of every outer
    /// pass, so each pass is a full ADMM solve of the current weighted
    /// problem (warm-started at the previous iterates) rather than a
    /// continuation at already-large penalties. Without the restart the
    /// shrinkage thresholds `gamma W / mu` have decayed to nothing by the
    /// time the reweighting has learned anything.
    pub restart_penalties: bool,
}

impl Default for LsspConfig {
    fn default() -> Self {
        Self {
            gamma_g: 1.0,
            gamma_t: 1.0,
            gamma_d: 0.1,
            zeta: 1e-3,
            mu_init: None,
            rho: 1.05,
            mu_max_factor: 1e8,
            outer_iters: 5,
            middle_iters: 50,
            inner_iters: 10,
            tol: 1e-4,
            rank_surrogate_floor: 1e-3,
            restart_penalties: true,
        }
    }
}

impl LsspConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("gamma_g", self.gamma_g),
            ("gamma_t", self.gamma_t),
            ("gamma_d", self.gamma_d),
        ] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::ParamOutOfRange {
                    name,
                    value,
                    range: "[0, inf)",
                });
            }
        }
        if !(self.zeta > 0.0) {
            return Err(Error::ParamOutOfRange {
                name: "zeta",
                value: self.zeta,
                range: "(0, inf)",
            });
        }
        if let Some(mu) = self.mu_init {
            if !(mu > 0.0) {
                return Err(Error::ParamOutOfRange {
                    name: "mu_init",
                    value: mu,
                    range: "(0, inf)",
                });
            }
        }
        if !(self.rho > 1.0) {
            return Err(Error::ParamOutOfRange {
                name: "rho",
                value: self.rho,
                range: "(1, inf)",
            });
        }
        if !(self.mu_max_factor >= 1.0) {
            return Err(Error::ParamOutOfRange {
                name: "mu_max_factor",
                value: self.mu_max_factor,
                range: "[1, inf)",
            });
        }
        for (name, value) in [
            ("outer_iters", self.outer_iters),
            ("middle_iters", self.middle_iters),
            ("inner_iters", self.inner_iters),
        ] {
            if value == 0 {
                return Err(Error::ParamOutOfRange {
                    name,
                    value: 0.0,
                    range: ">= 1",
                });
            }
        }
        if !(self.tol >= 0.0) {
            return Err(Error::ParamOutOfRange {
                name: "tol",
                value: self.tol,
                range: "[0, inf)",
            });
        }
        if !(self.rank_surrogate_floor > 0.0) {
            return Err(Error::ParamOutOfRange {
                name: "rank_surrogate_floor",
                value: self.rank_surrogate_floor,
                range: "(0, inf)",
            });
        }
        Ok(())
    }
}

/// All iterates of the three-loop solver.
#[derive(Debug, Clone)]
pub struct LsspState {
    /// Current reconstruction, `N x T`.
    pub x_hat: DMatrix<f64>,
    /// Graph spectrum iterate, `N x T`.
    pub f_g: DMatrix<f64>,
    /// Time spectrum iterate, `T x N`.
    pub f_t: DMatrix<f64>,
    /// Error matrix, zero on the observed set after every update, `N x T`.
    pub e: DMatrix<f64>,
    /// Multiplier for `x_hat = Psi_G f_g`.
    pub y1: DMatrix<f64>,
    /// Multiplier for `x_hat^T = Psi_T f_t`, `T x N`.
    pub y2: DMatrix<f64>,
    /// Multiplier for `X_S = x_hat + e`.
    pub y3: DMatrix<f64>,
    /// Graph sparsity weights, strictly positive.
    pub w_g: DMatrix<f64>,
    /// Time sparsity weights, strictly positive.
    pub w_t: DMatrix<f64>,
    /// Reweighted-least-squares matrix for the rank surrogate, `T x T` PSD.
    pub r_weight: DMatrix<f64>,
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
}

/// Per-middle-iteration convergence trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationRecord {
    pub outer: usize,
    pub middle: usize,
    /// Full objective surrogate at the end-of-iteration iterates.
    pub objective: f64,
    /// `||x_hat - Psi_G f_g||_F`.
    pub residual_fg: f64,
    /// `||x_hat^T - Psi_T f_t||_F`.
    pub residual_ft: f64,
    /// `||P_S(X_S - x_hat - e)||_F` (equals the observed-entry misfit).
    pub residual_obs: f64,
    /// RMSE over observed entries.
    pub observed_rmse: f64,
    /// Largest absolute deviation on an observed entry.
    pub observed_max_dev: f64,
    pub mu3: f64,
}

/// Reconstruction output: the estimate plus the convergence trace.
#[derive(Debug, Clone)]
pub struct LsspResult {
    pub signal: TimeVertexSignal,
    pub diagnostics: Vec<IterationRecord>,
    /// Outer passes actually run.
    pub outer_iterations: usize,
}

/// Elementwise shrinkage `sign(a) max(|a| - w, 0)`.
///
/// Weights must be non-negative; shapes must match.
pub fn soft_threshold(a: &DMatrix<f64>, w: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if a.shape() != w.shape() {
        return Err(Error::DimensionMismatch {
            context: "soft_threshold",
            expected: format!("{} x {}", a.nrows(), a.ncols()),
            actual: format!("{} x {}", w.nrows(), w.ncols()),
        });
    }
    Ok(a.zip_map(w, |a, w| a.signum() * (a.abs() - w).max(0.0)))
}

/// Reweighting step: `W(i,j) = 1 / (|F(i,j)| + zeta)`.
pub fn update_weights(f_g: &DMatrix<f64>, f_t: &DMatrix<f64>, zeta: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let w = |m: &DMatrix<f64>| m.map(|v| 1.0 / (v.abs() + zeta));
    (w(f_g), w(f_t))
}

/// `g'(x) = 1 / (2 sqrt(x) (sqrt(x) + 1))`, the derivative of the rank
/// surrogate, applied to eigenvalues clamped below at `floor`.
fn g_prime(lambda: f64, floor: f64) -> f64 {
    let x = lambda.max(floor);
    let s = x.sqrt();
    1.0 / (2.0 * s * (s + 1.0))
}

/// `g(x) = log(sqrt(x) + 1)` with negatives clamped to zero.
fn g_surrogate(lambda: f64) -> f64 {
    (lambda.max(0.0).sqrt() + 1.0).ln()
}

fn rank_weight_from_eigen(
    vectors: &DMatrix<f64>,
    values: &DVector<f64>,
    relative_floor: f64,
) -> DMatrix<f64> {
    let lambda_max = values.iter().cloned().fold(0.0, f64::max);
    let floor = (relative_floor * lambda_max).max(1e-12);
    let scaled = DMatrix::from_fn(vectors.nrows(), vectors.ncols(), |i, j| {
        vectors[(i, j)] * g_prime(values[j], floor)
    });
    &scaled * vectors.transpose()
}

/// Reweighted-least-squares matrix for the rank surrogate:
/// eigendecompose `x_hat^T x_hat` and apply `g'` to the eigenvalues, floored
/// at `relative_floor` times the largest eigenvalue (minimum 1e-12).
pub fn update_rank_weight(x_hat: &DMatrix<f64>, relative_floor: f64) -> Result<DMatrix<f64>> {
    if !(relative_floor > 0.0) {
        return Err(Error::ParamOutOfRange {
            name: "relative_floor",
            value: relative_floor,
            range: "(0, inf)",
        });
    }
    let h = x_hat.transpose() * x_hat;
    let eig = h.symmetric_eigen();
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenFailure {
            context: "update_rank_weight",
        });
    }
    Ok(rank_weight_from_eigen(&eig.eigenvectors, &eig.eigenvalues, relative_floor))
}

/// One LSSP problem instance: observed data, bases, operators, and config
/// bound together with the resolved initial penalty.
pub struct LsspSolver<'a> {
    observed: &'a ObservedMatrix,
    bases: &'a SpectralBases,
    psi_g_t: DMatrix<f64>,
    psi_t_t: DMatrix<f64>,
    /// `D2 D2^T`, `T x T`.
    d2_gram: DMatrix<f64>,
    d2: DMatrix<f64>,
    config: LsspConfig,
    mu_init: f64,
}

impl<'a> LsspSolver<'a> {
    pub fn new(
        observed: &'a ObservedMatrix,
        bases: &'a SpectralBases,
        operators: &TemporalOperators,
        config: LsspConfig,
    ) -> Result<Self> {
        config.validate()?;
        let n = bases.num_vertices();
        let t = bases.num_steps();
        if observed.x_s.nrows() != n || observed.x_s.ncols() != t {
            return Err(Error::DimensionMismatch {
                context: "LsspSolver::new",
                expected: format!("{n} x {t}"),
                actual: format!("{} x {}", observed.x_s.nrows(), observed.x_s.ncols()),
            });
        }
        if operators.d2().nrows() != t {
            return Err(Error::DimensionMismatch {
                context: "LsspSolver::new (operators)",
                expected: format!("D2 with {t} rows"),
                actual: format!("{}", operators.d2().nrows()),
            });
        }
        let mu_init = match config.mu_init {
            Some(mu) => mu,
            None => {
                let sigma_max = observed
                    .x_s
                    .clone()
                    .singular_values()
                    .iter()
                    .cloned()
                    .fold(0.0, f64::max);
                if sigma_max > 0.0 {
                    1.0 / (2.0 * sigma_max)
                } else {
                    1.0 // all-zero observations; any positive penalty works
                }
            }
        };
        Ok(Self {
            observed,
            bases,
            psi_g_t: bases.psi_g().transpose(),
            psi_t_t: bases.psi_t().transpose(),
            d2_gram: operators.d2() * operators.d2().transpose(),
            d2: operators.d2().clone(),
            config,
            mu_init,
        })
    }

    pub fn config(&self) -> &LsspConfig {
        &self.config
    }

    pub fn mu_init(&self) -> f64 {
        self.mu_init
    }

    /// All-ones iterates and unit weights, penalties at `mu_init`.
    pub fn initial_state(&self) -> LsspState {
        let n = self.bases.num_vertices();
        let t = self.bases.num_steps();
        let ones_nt = DMatrix::from_element(n, t, 1.0);
        let ones_tn = DMatrix::from_element(t, n, 1.0);
        LsspState {
            x_hat: ones_nt.clone(),
            f_g: ones_nt.clone(),
            f_t: ones_tn.clone(),
            e: ones_nt.clone(),
            y1: ones_nt.clone(),
            y2: ones_tn.clone(),
            y3: ones_nt,
            w_g: DMatrix::from_element(n, t, 1.0),
            w_t: DMatrix::from_element(t, n, 1.0),
            r_weight: DMatrix::zeros(t, t),
            mu1: self.mu_init,
            mu2: self.mu_init,
            mu3: self.mu_init,
        }
    }

    /// `Q` accelerated proximal steps for the graph spectrum.
    ///
    /// The smooth part has gradient `mu1 A - Psi_G^T (Y1 + mu1 x_hat)` with
    /// Lipschitz constant `mu1`, so the step size is `1 / mu1` and each step
    /// soft-thresholds at `gamma_g W_G / mu1`.
    pub fn update_fg(&self, state: &LsspState) -> Result<DMatrix<f64>> {
        let target = &self.psi_g_t * (&state.y1 + state.mu1 * &state.x_hat);
        self.prox_loop(&state.f_g, &target, state.mu1, self.config.gamma_g, &state.w_g)
    }

    /// Mirror of [`Self::update_fg`] for the time spectrum, acting on the
    /// transposed iterate.
    pub fn update_ft(&self, state: &LsspState) -> Result<DMatrix<f64>> {
        let target = &self.psi_t_t * (&state.y2 + state.mu2 * state.x_hat.transpose());
        self.prox_loop(&state.f_t, &target, state.mu2, self.config.gamma_t, &state.w_t)
    }

    fn prox_loop(
        &self,
        f_init: &DMatrix<f64>,
        target: &DMatrix<f64>,
        mu: f64,
        gamma: f64,
        weights: &DMatrix<f64>,
    ) -> Result<DMatrix<f64>> {
        let tau = 1.0 / mu;
        let threshold = weights.map(|w| gamma * w / mu);
        let mut f_prev = f_init.clone();
        let mut a = f_init.clone();
        let mut b = 1.0f64;
        for _ in 0..self.config.inner_iters {
            // gradient step: a - tau (mu a - target) = target / mu at tau = 1/mu
            let stepped = &a - tau * (mu * &a - target);
            let f_next = soft_threshold(&stepped, &threshold)?;
            let b_next = next_momentum(b);
            a = &f_next + ((b - 1.0) / b_next) * (&f_next - &f_prev);
            f_prev = f_next;
            b = b_next;
        }
        Ok(f_prev)
    }

    /// Closed-form iterate update: solves the SPD system
    /// `x_hat (2 R + 2 gamma_d D2 D2^T + (mu1+mu2+mu3) I) = numerator`
    /// from the right.
    pub fn update_xhat(&self, state: &LsspState, outer: usize, middle: usize) -> Result<DMatrix<f64>> {
        let psi_g_fg = self.bases.psi_g() * &state.f_g;
        let psi_t_ft = self.bases.psi_t() * &state.f_t;
        let numerator = &state.y3 - &state.y1 - state.y2.transpose()
            + state.mu1 * &psi_g_fg
            + state.mu2 * psi_t_ft.transpose()
            + state.mu3 * (&self.observed.x_s - &state.e);

        let t = self.bases.num_steps();
        let mu_sum = state.mu1 + state.mu2 + state.mu3;
        let mut system = 2.0 * &state.r_weight + 2.0 * self.config.gamma_d * &self.d2_gram;
        for i in 0..t {
            system[(i, i)] += mu_sum;
        }

        let chol = nalgebra::Cholesky::new(system.clone()).ok_or(Error::SolverFailure {
            outer,
            middle,
            detail: "Cholesky factorization failed".into(),
        })?;
        let x_hat = chol.solve(&numerator.transpose()).transpose();

        let residual = (&x_hat * &system - &numerator).norm();
        let scale = numerator.norm().max(1e-300);
        if !(residual / scale < 1e-8) {
            return Err(Error::SolverFailure {
                outer,
                middle,
                detail: format!("relative residual {:.3e}", residual / scale),
            });
        }
        Ok(x_hat)
    }

    /// Error-matrix update: exact projection onto the unobserved set of
    /// `Y3 / mu3 + X_S - x_hat`; observed entries are exactly zero.
    pub fn update_error(&self, state: &LsspState) -> DMatrix<f64> {
        let mask = &self.observed.mask;
        let x_s = &self.observed.x_s;
        DMatrix::from_fn(x_s.nrows(), x_s.ncols(), |i, j| {
            if mask[(i, j)] {
                0.0
            } else {
                state.y3[(i, j)] / state.mu3 + x_s[(i, j)] - state.x_hat[(i, j)]
            }
        })
    }

    /// Dual ascent on all three multipliers followed by capped geometric
    /// penalty growth.
    pub fn update_multipliers(&self, state: &mut LsspState) {
        let r1 = &state.x_hat - self.bases.psi_g() * &state.f_g;
        let r2 = state.x_hat.transpose() - self.bases.psi_t() * &state.f_t;
        let r3 = &self.observed.x_s - &state.x_hat - &state.e;
        state.y1 += state.mu1 * r1;
        state.y2 += state.mu2 * r2;
        state.y3 += state.mu3 * r3;
        let cap = self.config.mu_max_factor * self.mu_init;
        state.mu1 = (state.mu1 * self.config.rho).min(cap);
        state.mu2 = (state.mu2 * self.config.rho).min(cap);
        state.mu3 = (state.mu3 * self.config.rho).min(cap);
    }

    fn eigen_of_gram(&self, x_hat: &DMatrix<f64>) -> Result<(DMatrix<f64>, DVector<f64>)> {
        let h = x_hat.transpose() * x_hat;
        let eig = h.symmetric_eigen();
        if eig.eigenvalues.iter().any(|v| !v.is_finite())
            || eig.eigenvectors.iter().any(|v| !v.is_finite())
        {
            return Err(Error::EigenFailure { context: "lssp rank surrogate" });
        }
        Ok((eig.eigenvectors, eig.eigenvalues))
    }

    fn check_finite(&self, m: &DMatrix<f64>, outer: usize, middle: usize, inner: usize) -> Result<()> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteIterate { outer, middle, inner });
        }
        Ok(())
    }

    fn observed_fidelity(&self, x_hat: &DMatrix<f64>) -> (f64, f64) {
        let mut sum_sq = 0.0;
        let mut max_dev: f64 = 0.0;
        let mut count = 0usize;
        for j in 0..x_hat.ncols() {
            for i in 0..x_hat.nrows() {
                if self.observed.mask[(i, j)] {
                    let dev = (x_hat[(i, j)] - self.observed.x_s[(i, j)]).abs();
                    sum_sq += dev * dev;
                    max_dev = max_dev.max(dev);
                    count += 1;
                }
            }
        }
        let rmse = if count > 0 { (sum_sq / count as f64).sqrt() } else { 0.0 };
        (rmse, max_dev)
    }

    fn objective(&self, state: &LsspState, eigenvalues: &DVector<f64>) -> f64 {
        let g_term: f64 = eigenvalues.iter().map(|&l| g_surrogate(l)).sum();
        let l1_g: f64 = state
            .f_g
            .zip_map(&state.w_g, |f, w| (f * w).abs())
            .sum();
        let l1_t: f64 = state
            .f_t
            .zip_map(&state.w_t, |f, w| (f * w).abs())
            .sum();
        let smooth = (&state.x_hat * &self.d2).norm_squared();
        g_term + self.config.gamma_g * l1_g + self.config.gamma_t * l1_t + self.config.gamma_d * smooth
    }

    /// Runs the full three-loop reconstruction from the all-ones start.
    pub fn reconstruct(&self) -> Result<LsspResult> {
        let mut state = self.initial_state();
        let mut diagnostics = Vec::new();
        let mut outer_done = 0;

        // eigendecomposition of x_hat^T x_hat for the current iterate; reused
        // for the rank weight of the next middle step and the objective trace
        let mut eigen = self.eigen_of_gram(&state.x_hat)?;

        for outer in 1..=self.config.outer_iters {
            let x_outer_prev = state.x_hat.clone();
            if outer > 1 && self.config.restart_penalties {
                state.mu1 = self.mu_init;
                state.mu2 = self.mu_init;
                state.mu3 = self.mu_init;
                state.y1.fill(1.0);
                state.y2.fill(1.0);
                state.y3.fill(1.0);
            }
            for middle in 1..=self.config.middle_iters {
                state.f_g = self.update_fg(&state)?;
                self.check_finite(&state.f_g, outer, middle, self.config.inner_iters)?;
                state.f_t = self.update_ft(&state)?;
                self.check_finite(&state.f_t, outer, middle, self.config.inner_iters)?;

                state.r_weight =
                    rank_weight_from_eigen(&eigen.0, &eigen.1, self.config.rank_surrogate_floor);
                state.x_hat = self.update_xhat(&state, outer, middle)?;
                self.check_finite(&state.x_hat, outer, middle, 0)?;
                state.e = self.update_error(&state);

                let res_obs = (&self.observed.x_s - &state.x_hat - &state.e).norm();
                let mu3_in_effect = state.mu3;
                self.update_multipliers(&mut state);

                eigen = self.eigen_of_gram(&state.x_hat)?;
                let (observed_rmse, observed_max_dev) = self.observed_fidelity(&state.x_hat);
                diagnostics.push(IterationRecord {
                    outer,
                    middle,
                    objective: self.objective(&state, &eigen.1),
                    residual_fg: (&state.x_hat - self.bases.psi_g() * &state.f_g).norm(),
                    residual_ft: (state.x_hat.transpose() - self.bases.psi_t() * &state.f_t).norm(),
                    residual_obs: res_obs,
                    observed_rmse,
                    observed_max_dev,
                    mu3: mu3_in_effect,
                });
            }

            let (w_g, w_t) = update_weights(&state.f_g, &state.f_t, self.config.zeta);
            state.w_g = w_g;
            state.w_t = w_t;
            outer_done = outer;

            let denom = x_outer_prev.norm();
            let change = (&state.x_hat - &x_outer_prev).norm();
            if denom > 0.0 && change / denom < self.config.tol {
                break;
            }
        }

        Ok(LsspResult {
            signal: TimeVertexSignal::new(state.x_hat)?,
            diagnostics,
            outer_iterations: outer_done,
        })
    }
}

/// Momentum recursion `b^{q+1} = (1 + sqrt(4 b^2 + 1)) / 2`.
fn next_momentum(b: f64) -> f64 {
    (1.0 + (4.0 * b * b + 1.0).sqrt()) / 2.0
}

/// Convenience wrapper: builds the solver from a sample set and runs it.
pub fn lssp_reconstruct(
    samples: &SampleSet,
    bases: &SpectralBases,
    operators: &TemporalOperators,
    config: &LsspConfig,
) -> Result<LsspResult> {
    let observed = ObservedMatrix::from_samples(samples);
    LsspSolver::new(&observed, bases, operators, config.clone())?.reconstruct()
}
