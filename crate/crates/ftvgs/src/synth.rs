//! Synthetic signal generation, the NRMSE metric, and sweep orchestration
//! over sampling ratios.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lssp::{lssp_reconstruct, svt::svt_baseline, svt::SvtConfig, LsspConfig};
use crate::par;
use crate::sampling::{subset_random_sample, ObservedMatrix, ReplacementMode, SampleRng};
use crate::signal::{build_incidence, GraphTopology, TemporalOperators, TimeVertexSignal};
use crate::spectral::{synthesize_joint, SpectralBases};

/// Which joint-spectrum rows carry energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowSelection {
    /// The lowest-index (lowest graph frequency) rows, matching the
    /// low-frequency reading of the generated spectra.
    Lowest,
    /// Uniformly random rows.
    Random,
}

/// Recipe for a synthetic bandlimited signal: a joint spectrum with
/// `num_nonzero_rows` active rows, each supported on its first `b` columns
/// with `b` drawn uniformly from `[bandwidth_min, bandwidth_max]` and
/// standard-normal entries.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthSpec {
    pub n: usize,
    pub t: usize,
    pub num_nonzero_rows: usize,
    pub bandwidth_min: usize,
    pub bandwidth_max: usize,
    pub seed: u64,
    pub row_selection: RowSelection,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            n: 128,
            t: 128,
            num_nonzero_rows: 100,
            bandwidth_min: 28,
            bandwidth_max: 88,
            seed: 0,
            row_selection: RowSelection::Lowest,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.num_nonzero_rows == 0 || self.num_nonzero_rows > self.n {
            return Err(Error::ParamOutOfRange {
                name: "num_nonzero_rows",
                value: self.num_nonzero_rows as f64,
                range: "1..=n",
            });
        }
        if self.bandwidth_min == 0
            || self.bandwidth_min > self.bandwidth_max
            || self.bandwidth_max > self.t
        {
            return Err(Error::ParamOutOfRange {
                name: "bandwidth_min/bandwidth_max",
                value: self.bandwidth_min as f64,
                range: "1 <= min <= max <= t",
            });
        }
        Ok(())
    }
}

/// A generated signal together with the joint spectrum it came from.
#[derive(Debug, Clone)]
pub struct SynthResult {
    pub signal: TimeVertexSignal,
    pub f_j: DMatrix<f64>,
}

/// Synthesizes `X = Psi_G F_J Psi_T^T` from a seeded random joint spectrum.
pub fn generate_synthetic(spec: &SynthSpec, bases: &SpectralBases) -> Result<SynthResult> {
    spec.validate()?;
    if bases.num_vertices() != spec.n || bases.num_steps() != spec.t {
        return Err(Error::DimensionMismatch {
            context: "generate_synthetic",
            expected: format!("{} x {}", spec.n, spec.t),
            actual: format!("{} x {}", bases.num_vertices(), bases.num_steps()),
        });
    }
    let mut rng = SampleRng::seed_from_u64(spec.seed);
    let rows: Vec<usize> = match spec.row_selection {
        RowSelection::Lowest => (0..spec.num_nonzero_rows).collect(),
        RowSelection::Random => {
            crate::sampling::sample_indices(&mut rng, spec.n, spec.num_nonzero_rows)
        }
    };

    let mut f_j = DMatrix::zeros(spec.n, spec.t);
    for &row in &rows {
        let bandwidth = rng.gen_range(spec.bandwidth_min..=spec.bandwidth_max);
        for col in 0..bandwidth {
            f_j[(row, col)] = rng.sample(StandardNormal);
        }
    }
    let signal = synthesize_joint(&f_j, bases)?;
    Ok(SynthResult { signal, f_j })
}

/// Seeded Erdos-Renyi graph with edge probability `2 ln(N) / N`, resampled
/// (with derived seeds) until connected.
pub fn random_connected_graph(n: usize, seed: u64) -> Result<GraphTopology> {
    if n < 2 {
        return Err(Error::ParamOutOfRange {
            name: "n",
            value: n as f64,
            range: "n >= 2",
        });
    }
    let p = (2.0 * (n as f64).ln() / n as f64).min(1.0);
    for attempt in 0..1000u64 {
        let mut rng = SampleRng::seed_from_u64(seed.wrapping_add(attempt.wrapping_mul(0x9e37_79b9)));
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        let topology = build_incidence(n, &edges)?;
        if is_connected(n, &edges) {
            return Ok(topology);
        }
    }
    // p = 2 ln(N)/N is far above the connectivity threshold, so this is
    // unreachable in practice
    Err(Error::EmptySelection {
        what: "connected graph after 1000 attempts",
    })
}

fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut adjacency = vec![Vec::new(); n];
    for &(u, v) in edges {
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for &v in &adjacency[u] {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count == n
}

/// `||reference - estimate||_F / ||reference||_F`.
pub fn nrmse(reference: &TimeVertexSignal, estimate: &TimeVertexSignal) -> Result<f64> {
    if reference.data().shape() != estimate.data().shape() {
        return Err(Error::DimensionMismatch {
            context: "nrmse",
            expected: format!("{} x {}", reference.num_vertices(), reference.num_steps()),
            actual: format!("{} x {}", estimate.num_vertices(), estimate.num_steps()),
        });
    }
    let denom = reference.data().norm();
    if denom == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok((reference.data() - estimate.data()).norm() / denom)
}

/// Reconstruction methods a sweep can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Lssp,
    Svt,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lssp" => Ok(Method::Lssp),
            "svt" => Ok(Method::Svt),
            _ => Err(Error::ParamOutOfRange {
                name: "method",
                value: f64::NAN,
                range: "\"lssp\" or \"svt\"",
            }),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Lssp => write!(f, "lssp"),
            Method::Svt => write!(f, "svt"),
        }
    }
}

/// One (method, ratio) cell of a sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepCell {
    pub method: Method,
    pub alpha_rc: f64,
    pub alpha_sub: f64,
    pub alpha_total: f64,
    /// Seeds that reconstructed successfully.
    pub seed_count: usize,
    /// Mean NRMSE over successful seeds; NaN when every seed failed.
    pub mean_nrmse: f64,
    /// Sample standard deviation over successful seeds.
    pub std_nrmse: f64,
    /// Seeds whose reconstruction errored.
    pub failures: usize,
}

/// Sweep inputs: both ratios move together (`alpha_rc = alpha_sub = ratio`),
/// matching the reported tables.
pub struct SweepPlan<'a> {
    pub signal: &'a TimeVertexSignal,
    pub bases: &'a SpectralBases,
    pub operators: &'a TemporalOperators,
    pub ratios: &'a [f64],
    pub seeds: &'a [u64],
    pub methods: &'a [Method],
    pub lssp_config: LsspConfig,
    pub svt_config: SvtConfig,
}

fn reconstruct_once(plan: &SweepPlan, method: Method, ratio: f64, seed: u64) -> Result<f64> {
    let samples = subset_random_sample(plan.signal, ratio, ratio, seed, ReplacementMode::Without)?;
    let estimate = match method {
        Method::Lssp => {
            lssp_reconstruct(&samples, plan.bases, plan.operators, &plan.lssp_config)?.signal
        }
        Method::Svt => {
            let observed = ObservedMatrix::from_samples(&samples);
            svt_baseline(&observed, &plan.svt_config)?.0
        }
    };
    nrmse(plan.signal, &estimate)
}

/// Runs every (method, ratio, seed) cell, in parallel when enabled, and
/// aggregates mean/std NRMSE per (method, ratio). Failed seeds are recorded
/// per cell without aborting the sweep.
pub fn run_sweep(plan: &SweepPlan) -> Result<Vec<SweepCell>> {
    if plan.seeds.is_empty() {
        return Err(Error::EmptySelection { what: "seeds" });
    }
    for &ratio in plan.ratios {
        if !(ratio > 0.0 && ratio <= 1.0) {
            return Err(Error::ParamOutOfRange {
                name: "ratio",
                value: ratio,
                range: "(0, 1]",
            });
        }
    }

    // flatten (method, ratio, seed) into independent work items
    let mut items = Vec::new();
    for &method in plan.methods {
        for &ratio in plan.ratios {
            for &seed in plan.seeds {
                items.push((method, ratio, seed));
            }
        }
    }
    let outcomes = par::map_indexed(items.len(), |idx| {
        let (method, ratio, seed) = items[idx];
        (idx, reconstruct_once(plan, method, ratio, seed))
    });

    let mut results: Vec<Option<f64>> = vec![None; items.len()];
    for (idx, outcome) in outcomes {
        results[idx] = outcome.ok();
    }

    let mut cells = Vec::new();
    for &method in plan.methods {
        for &ratio in plan.ratios {
            let errs: Vec<f64> = items
                .iter()
                .zip(&results)
                .filter(|((m, r, _), _)| *m == method && *r == ratio)
                .filter_map(|(_, res)| *res)
                .collect();
            let failures = plan.seeds.len() - errs.len();
            let mean = if errs.is_empty() {
                f64::NAN
            } else {
                errs.iter().sum::<f64>() / errs.len() as f64
            };
            let std = if errs.len() > 1 {
                let var = errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>()
                    / (errs.len() - 1) as f64;
                var.sqrt()
            } else {
                0.0
            };
            // sample sizes are ratio-driven, so alpha_total is seed-independent
            let samples = subset_random_sample(
                plan.signal,
                ratio,
                ratio,
                plan.seeds[0],
                ReplacementMode::Without,
            )?;
            cells.push(SweepCell {
                method,
                alpha_rc: ratio,
                alpha_sub: ratio,
                alpha_total: samples.alpha_total,
                seed_count: errs.len(),
                mean_nrmse: mean,
                std_nrmse: std,
                failures,
            });
        }
    }
    Ok(cells)
}
