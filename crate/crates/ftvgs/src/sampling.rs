//! Subset random sampling: uniform row selection, uniform column selection,
//! then uniform entry sampling inside the selected submatrix.
//!
//! Samples never land outside the selected rows and columns, which is what
//! makes the resulting missingness *structural*: unselected rows and columns
//! carry no observations at all.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::TimeVertexSignal;

/// Entry sampling mode inside the selected submatrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReplacementMode {
    /// Distinct entries; `|S| = round(alpha_sub * |I| * |J|)` exactly.
    Without,
    /// Independent uniform draws; duplicates are collapsed when a mask is built.
    With,
}

impl std::str::FromStr for ReplacementMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "without" => Ok(ReplacementMode::Without),
            "with" => Ok(ReplacementMode::With),
            _ => Err(Error::ParamOutOfRange {
                name: "mode",
                value: f64::NAN,
                range: "\"with\" or \"without\"",
            }),
        }
    }
}

/// Output of one subset random sampling draw: the selected rows `I`, columns
/// `J`, and the observed entries with their values and ratios.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleSet {
    pub n: usize,
    pub t: usize,
    /// Sorted selected row indices.
    pub rows: Vec<usize>,
    /// Sorted selected column indices.
    pub cols: Vec<usize>,
    /// Observed entries `(i, j, value)` sorted by `(i, j)`; duplicates may
    /// appear only in with-replacement mode.
    pub entries: Vec<(usize, usize, f64)>,
    pub alpha_rc: f64,
    pub alpha_sub: f64,
    pub alpha_total: f64,
    pub seed: u64,
    pub mode: ReplacementMode,
}

/// Rounds half away from zero, the convention used by the sampling-ratio
/// arithmetic.
pub fn round_half_away(x: f64) -> usize {
    x.round() as usize
}

/// Seedable generator used for every sampling decision in this crate.
/// ChaCha-based, so streams are identical across platforms and releases
/// (StdRng's algorithm is allowed to change between rand versions).
pub type SampleRng = rand_chacha::ChaCha8Rng;

/// Uniform `k`-subset of `0..n` via a Fisher-Yates prefix, returned sorted.
pub(crate) fn sample_indices(rng: &mut SampleRng, n: usize, k: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    for dst in 0..k {
        let src = rng.gen_range(dst..n);
        pool.swap(dst, src);
    }
    let mut chosen = pool[..k].to_vec();
    chosen.sort_unstable();
    chosen
}

/// Runs the three sampling steps with the given seed: rows, then columns,
/// then entries inside the submatrix.
///
/// `|I| = round(alpha_rc * N)`, `|J| = round(alpha_rc * T)`, and the entry
/// count is `round(alpha_sub * |I| * |J|)`, all rounded half away from zero.
pub fn subset_random_sample(
    signal: &TimeVertexSignal,
    alpha_rc: f64,
    alpha_sub: f64,
    seed: u64,
    mode: ReplacementMode,
) -> Result<SampleSet> {
    for (name, value) in [("alpha_rc", alpha_rc), ("alpha_sub", alpha_sub)] {
        if !(value > 0.0 && value <= 1.0) {
            return Err(Error::ParamOutOfRange {
                name,
                value,
                range: "(0, 1]",
            });
        }
    }
    let n = signal.num_vertices();
    let t = signal.num_steps();
    let size_i = round_half_away(alpha_rc * n as f64);
    let size_j = round_half_away(alpha_rc * t as f64);
    if size_i == 0 {
        return Err(Error::EmptySelection { what: "rows" });
    }
    if size_j == 0 {
        return Err(Error::EmptySelection { what: "columns" });
    }

    let mut rng = SampleRng::seed_from_u64(seed);
    let rows = sample_indices(&mut rng, n, size_i);
    let cols = sample_indices(&mut rng, t, size_j);

    let cells = size_i * size_j;
    let num_samples = round_half_away(alpha_sub * cells as f64);
    // flat cell index = row slot * |J| + col slot; rows and cols are sorted,
    // so sorted flat indices give entries sorted by (i, j)
    let flat: Vec<usize> = match mode {
        ReplacementMode::Without => sample_indices(&mut rng, cells, num_samples),
        ReplacementMode::With => {
            let mut v: Vec<usize> = (0..num_samples).map(|_| rng.gen_range(0..cells)).collect();
            v.sort_unstable();
            v
        }
    };

    let x = signal.data();
    let entries: Vec<(usize, usize, f64)> = flat
        .iter()
        .map(|&cell| {
            let i = rows[cell / size_j];
            let j = cols[cell % size_j];
            (i, j, x[(i, j)])
        })
        .collect();

    let alpha_total = entries.len() as f64 / (n * t) as f64;
    Ok(SampleSet {
        n,
        t,
        rows,
        cols,
        entries,
        alpha_rc,
        alpha_sub,
        alpha_total,
        seed,
        mode,
    })
}

impl SampleSet {
    /// Number of observed entries (duplicates counted in with-replacement mode).
    pub fn num_samples(&self) -> usize {
        self.entries.len()
    }

    /// Boolean observation mask, `N x T`, duplicates collapsed.
    pub fn mask(&self) -> DMatrix<bool> {
        let mut mask = DMatrix::from_element(self.n, self.t, false);
        for &(i, j, _) in &self.entries {
            mask[(i, j)] = true;
        }
        mask
    }

    /// Validates that a matrix has this sample set's shape.
    fn check_shape(&self, matrix: &DMatrix<f64>, context: &'static str) -> Result<()> {
        if matrix.nrows() != self.n || matrix.ncols() != self.t {
            return Err(Error::DimensionMismatch {
                context,
                expected: format!("{} x {}", self.n, self.t),
                actual: format!("{} x {}", matrix.nrows(), matrix.ncols()),
            });
        }
        Ok(())
    }
}

/// Keeps entries on the sample set, zeros everywhere else.
pub fn project_onto_samples(matrix: &DMatrix<f64>, samples: &SampleSet) -> Result<DMatrix<f64>> {
    samples.check_shape(matrix, "project_onto_samples")?;
    let mask = samples.mask();
    Ok(DMatrix::from_fn(samples.n, samples.t, |i, j| {
        if mask[(i, j)] {
            matrix[(i, j)]
        } else {
            0.0
        }
    }))
}

/// Keeps entries off the sample set, zeros on it.
pub fn project_onto_complement(matrix: &DMatrix<f64>, samples: &SampleSet) -> Result<DMatrix<f64>> {
    samples.check_shape(matrix, "project_onto_complement")?;
    let mask = samples.mask();
    Ok(DMatrix::from_fn(samples.n, samples.t, |i, j| {
        if mask[(i, j)] {
            0.0
        } else {
            matrix[(i, j)]
        }
    }))
}

/// Zero-filled observed matrix plus the observation mask.
///
/// The mask is what distinguishes an observed zero from a missing entry;
/// every reconstruction consumes both.
#[derive(Debug, Clone)]
pub struct ObservedMatrix {
    /// Observed values with zero fill, `N x T`.
    pub x_s: DMatrix<f64>,
    /// True where an observation exists.
    pub mask: DMatrix<bool>,
}

impl ObservedMatrix {
    /// Builds the observed matrix directly from a sample set's stored values.
    pub fn from_samples(samples: &SampleSet) -> Self {
        let mut x_s = DMatrix::zeros(samples.n, samples.t);
        let mut mask = DMatrix::from_element(samples.n, samples.t, false);
        for &(i, j, value) in &samples.entries {
            x_s[(i, j)] = value;
            mask[(i, j)] = true;
        }
        Self { x_s, mask }
    }

    pub fn num_observed(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Rows with no observations at all.
    pub fn unobserved_rows(&self) -> Vec<usize> {
        (0..self.x_s.nrows())
            .filter(|&i| (0..self.x_s.ncols()).all(|j| !self.mask[(i, j)]))
            .collect()
    }

    /// Columns with no observations at all.
    pub fn unobserved_cols(&self) -> Vec<usize> {
        (0..self.x_s.ncols())
            .filter(|&j| (0..self.x_s.nrows()).all(|i| !self.mask[(i, j)]))
            .collect()
    }

    /// True when entire rows or columns are unobserved.
    pub fn has_structural_missing(&self) -> bool {
        !self.unobserved_rows().is_empty() || !self.unobserved_cols().is_empty()
    }
}

/// Re-reads the observed values from a signal (sanity path used by tests and
/// the CLI when ground truth is on hand).
pub fn observed_matrix(signal: &TimeVertexSignal, samples: &SampleSet) -> Result<ObservedMatrix> {
    samples.check_shape(signal.data(), "observed_matrix")?;
    let mut x_s = DMatrix::zeros(samples.n, samples.t);
    let mut mask = DMatrix::from_element(samples.n, samples.t, false);
    for &(i, j, _) in &samples.entries {
        x_s[(i, j)] = signal.data()[(i, j)];
        mask[(i, j)] = true;
    }
    Ok(ObservedMatrix { x_s, mask })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_signal(n: usize, t: usize) -> TimeVertexSignal {
        TimeVertexSignal::new(DMatrix::from_fn(n, t, |i, j| (i * t + j) as f64 + 1.0)).unwrap()
    }

    #[test]
    fn metr_la_ratio_arithmetic() {
        let signal = test_signal(207, 512);
        let s = subset_random_sample(&signal, 0.7, 0.7, 1, ReplacementMode::Without).unwrap();
        assert_eq!(s.rows.len(), 145);
        assert_eq!(s.cols.len(), 358);
        assert_eq!(s.entries.len(), 36337);
        assert!((s.alpha_total * 100.0 - 34.29).abs() < 0.005);
    }

    #[test]
    fn synthetic_ratio_arithmetic() {
        let signal = test_signal(128, 128);
        let s = subset_random_sample(&signal, 0.9, 0.9, 1, ReplacementMode::Without).unwrap();
        assert_eq!(s.rows.len(), 115);
        assert_eq!(s.cols.len(), 115);
        assert!((s.alpha_total * 100.0 - 72.65).abs() < 0.005);
    }

    #[test]
    fn full_ratios_observe_everything() {
        let signal = test_signal(6, 5);
        let s = subset_random_sample(&signal, 1.0, 1.0, 9, ReplacementMode::Without).unwrap();
        assert_eq!(s.entries.len(), 30);
        assert_eq!(s.alpha_total, 1.0);
        let obs = ObservedMatrix::from_samples(&s);
        assert_eq!(&obs.x_s, signal.data());
    }

    #[test]
    fn rejects_bad_ratios_and_empty_selection() {
        let signal = test_signal(4, 4);
        assert!(subset_random_sample(&signal, 0.0, 0.5, 0, ReplacementMode::Without).is_err());
        assert!(subset_random_sample(&signal, 0.5, 1.5, 0, ReplacementMode::Without).is_err());
        // rounds to zero rows
        assert!(matches!(
            subset_random_sample(&signal, 0.1, 0.5, 0, ReplacementMode::Without),
            Err(Error::EmptySelection { what: "rows" })
        ));
    }

    #[test]
    fn structural_missing_holds_over_seeded_draws() {
        let signal = test_signal(12, 9);
        for seed in 0..100 {
            let s =
                subset_random_sample(&signal, 0.6, 0.5, seed, ReplacementMode::Without).unwrap();
            let row_set: std::collections::HashSet<_> = s.rows.iter().collect();
            let col_set: std::collections::HashSet<_> = s.cols.iter().collect();
            for &(i, j, value) in &s.entries {
                assert!(row_set.contains(&i) && col_set.contains(&j));
                assert_eq!(value, signal.data()[(i, j)]);
            }
            assert_eq!(s.entries.len(), round_half_away(0.5 * (s.rows.len() * s.cols.len()) as f64));
            // no duplicates in without-replacement mode
            let mut keys: Vec<(usize, usize)> = s.entries.iter().map(|&(i, j, _)| (i, j)).collect();
            let len = keys.len();
            keys.dedup();
            assert_eq!(keys.len(), len);
        }
    }

    #[test]
    fn with_replacement_can_repeat_but_mask_collapses() {
        let signal = test_signal(3, 3);
        let mut saw_duplicate = false;
        for seed in 0..50 {
            let s = subset_random_sample(&signal, 1.0, 1.0, seed, ReplacementMode::With).unwrap();
            assert_eq!(s.entries.len(), 9);
            let mask = s.mask();
            let distinct = mask.iter().filter(|&&m| m).count();
            if distinct < 9 {
                saw_duplicate = true;
            }
        }
        assert!(saw_duplicate, "50 with-replacement draws never collided");
    }

    #[test]
    fn determinism_per_seed() {
        let signal = test_signal(20, 17);
        let a = subset_random_sample(&signal, 0.7, 0.4, 123, ReplacementMode::Without).unwrap();
        let b = subset_random_sample(&signal, 0.7, 0.4, 123, ReplacementMode::Without).unwrap();
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.cols, b.cols);
        assert_eq!(a.entries, b.entries);
        let c = subset_random_sample(&signal, 0.7, 0.4, 124, ReplacementMode::Without).unwrap();
        assert!(a.rows != c.rows || a.cols != c.cols || a.entries != c.entries);
    }

    #[test]
    fn single_row_selection_is_uniform() {
        let signal = test_signal(10, 10);
        let mut counts = [0usize; 10];
        for seed in 0..10_000u64 {
            let s = subset_random_sample(&signal, 0.1, 1.0, seed, ReplacementMode::Without).unwrap();
            assert_eq!(s.rows.len(), 1);
            counts[s.rows[0]] += 1;
        }
        for &c in &counts {
            let freq = c as f64 / 10_000.0;
            assert!((freq - 0.1).abs() < 0.02, "frequency {freq}");
        }
    }

    #[test]
    fn projections_partition_the_matrix() {
        let signal = test_signal(4, 5);
        let s = subset_random_sample(&signal, 0.75, 0.5, 7, ReplacementMode::Without).unwrap();
        let m = DMatrix::from_fn(4, 5, |i, j| (i + 2 * j) as f64 - 3.0);
        let on = project_onto_samples(&m, &s).unwrap();
        let off = project_onto_complement(&m, &s).unwrap();
        assert_eq!(&on + &off, m);
        let mask = s.mask();
        for i in 0..4 {
            for j in 0..5 {
                if mask[(i, j)] {
                    assert_eq!(off[(i, j)], 0.0);
                } else {
                    assert_eq!(on[(i, j)], 0.0);
                }
            }
        }
        let wrong = DMatrix::zeros(5, 4);
        assert!(project_onto_samples(&wrong, &s).is_err());
    }

    #[test]
    fn single_observation_example() {
        let signal =
            TimeVertexSignal::new(DMatrix::from_row_slice(2, 2, &[9.0, 5.0, 9.0, 9.0])).unwrap();
        let samples = SampleSet {
            n: 2,
            t: 2,
            rows: vec![0],
            cols: vec![1],
            entries: vec![(0, 1, 5.0)],
            alpha_rc: 0.5,
            alpha_sub: 1.0,
            alpha_total: 0.25,
            seed: 0,
            mode: ReplacementMode::Without,
        };
        let obs = ObservedMatrix::from_samples(&samples);
        assert_eq!(obs.x_s, DMatrix::from_row_slice(2, 2, &[0.0, 5.0, 0.0, 0.0]));
        assert_eq!(obs.num_observed(), 1);
        assert_eq!(obs.unobserved_rows(), vec![1]);
        assert_eq!(obs.unobserved_cols(), vec![0]);
        assert!(obs.has_structural_missing());

        // re-reading the values from the signal gives the same observed matrix
        let reread = observed_matrix(&signal, &samples).unwrap();
        assert_eq!(reread.x_s, obs.x_s);
        assert_eq!(reread.mask, obs.mask);

        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let projected = project_onto_samples(&m, &samples).unwrap();
        assert_eq!(projected, DMatrix::from_row_slice(2, 2, &[0.0, 2.0, 0.0, 0.0]));
    }

    #[test]
    fn sample_set_round_trips_through_json() {
        let signal = test_signal(6, 4);
        let s = subset_random_sample(&signal, 0.8, 0.6, 55, ReplacementMode::Without).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        let back: SampleSet = serde_json::from_str(&json).unwrap();
        assert_eq!(s.rows, back.rows);
        assert_eq!(s.cols, back.cols);
        assert_eq!(s.entries, back.entries);
        assert_eq!(s.mode, back.mode);
    }
}
