//! Singular value thresholding baseline.
//!
//! Classic nuclear-norm matrix completion: iterate a singular-value
//! shrinkage of the dual variable and a gradient step on the observed
//! entries. It uses the low-rank prior only, so rows and columns with no
//! observations stay at zero; that failure mode is exactly the contrast this
//! baseline exists to demonstrate against structurally missing samples.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::analysis::sorted_svd;
use crate::error::{Error, Result};
use crate::sampling::ObservedMatrix;
use crate::signal::TimeVertexSignal;

/// SVT parameters. `None` thresholds/steps resolve to the standard
/// heuristics: `tau = 5 sqrt(N T) * mean |observed|` and
/// `step = 1.2 / alpha_total`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SvtConfig {
    pub tau: Option<f64>,
    pub step: Option<f64>,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for SvtConfig {
    fn default() -> Self {
        Self {
            tau: None,
            step: None,
            max_iters: 500,
            tol: 1e-4,
        }
    }
}

/// SVT run summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SvtReport {
    pub iterations: usize,
    pub converged: bool,
    /// Relative residual on the observed entries at the last iteration.
    pub final_residual: f64,
    pub tau: f64,
    pub step: f64,
}

/// Runs SVT on the observed entries, returning the completed matrix.
pub fn svt_baseline(
    observed: &ObservedMatrix,
    config: &SvtConfig,
) -> Result<(TimeVertexSignal, SvtReport)> {
    let n = observed.x_s.nrows();
    let t = observed.x_s.ncols();
    let num_observed = observed.num_observed();
    if num_observed == 0 {
        return Err(Error::EmptySelection {
            what: "observed entries",
        });
    }
    let observed_norm = observed.x_s.norm();
    let mean_abs = observed.x_s.iter().map(|v| v.abs()).sum::<f64>() / num_observed as f64;
    let alpha_total = num_observed as f64 / (n * t) as f64;

    let tau = config
        .tau
        .unwrap_or_else(|| 5.0 * ((n * t) as f64).sqrt() * mean_abs);
    let step = config.step.unwrap_or(1.2 / alpha_total);
    if !(tau >= 0.0) {
        return Err(Error::ParamOutOfRange {
            name: "tau",
            value: tau,
            range: "[0, inf)",
        });
    }
    if !(step > 0.0) {
        return Err(Error::ParamOutOfRange {
            name: "step",
            value: step,
            range: "(0, inf)",
        });
    }

    // standard warm start: y = k0 * step * P_S(M) with k0 chosen so the
    // first shrinkage already clears the threshold
    let sigma_max = observed
        .x_s
        .clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0, f64::max);
    let k0 = if sigma_max > 0.0 {
        (tau / (step * sigma_max)).ceil().max(1.0)
    } else {
        1.0
    };
    let mut y = &observed.x_s * (k0 * step);

    let mut x = DMatrix::zeros(n, t);
    let mut final_residual = f64::INFINITY;
    let divergence_guard = 1e10 * (observed_norm + 1.0);

    for iteration in 1..=config.max_iters {
        let (u, sigma, v) = sorted_svd(&y)?;
        let shrunk = sigma.map(|s| (s - tau).max(0.0));
        let scaled_u = DMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)] * shrunk[j]);
        x = scaled_u * v.transpose();

        if x.norm() > divergence_guard {
            return Err(Error::Divergence {
                iteration,
                norm: x.norm(),
            });
        }

        // gradient step on the observed entries only
        let mut residual_sq = 0.0;
        for j in 0..t {
            for i in 0..n {
                if observed.mask[(i, j)] {
                    let r = observed.x_s[(i, j)] - x[(i, j)];
                    residual_sq += r * r;
                    y[(i, j)] += step * r;
                }
            }
        }
        final_residual = residual_sq.sqrt() / observed_norm.max(1e-300);
        if final_residual < config.tol {
            return Ok((
                TimeVertexSignal::new(x)?,
                SvtReport {
                    iterations: iteration,
                    converged: true,
                    final_residual,
                    tau,
                    step,
                },
            ));
        }
    }

    Ok((
        TimeVertexSignal::new(x)?,
        SvtReport {
            iterations: config.max_iters,
            converged: false,
            final_residual,
            tau,
            step,
        },
    ))
}
