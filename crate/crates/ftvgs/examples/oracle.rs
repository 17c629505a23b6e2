// Checks how much information the bandlimited prior carries: least-squares
// fit of the low-graph-frequency block to the observed entries, then error
// on the unobserved rows.
use ftvgs::sampling::{subset_random_sample, ObservedMatrix, ReplacementMode};
use ftvgs::spectral::SpectralBases;
use ftvgs::synth::{generate_synthetic, random_connected_graph, SynthSpec};
use nalgebra::DMatrix;

fn main() {
    let spec = SynthSpec::default();
    let graph = random_connected_graph(spec.n, 12345).unwrap();
    let bases = SpectralBases::new(&graph, spec.t).unwrap();
    let mut s = spec.clone();
    s.seed = 1000;
    let data = generate_synthetic(&s, &bases).unwrap();
    let samples =
        subset_random_sample(&data.signal, 0.9, 0.9, 0, ReplacementMode::Without).unwrap();
    let observed = ObservedMatrix::from_samples(&samples);
    let truth = data.signal.data();

    let low = 100;
    let psi_low = bases.psi_g().columns(0, low).into_owned();

    // per-column least squares on the observed cells of that column
    let mut x_hat = DMatrix::zeros(spec.n, spec.t);
    for j in 0..spec.t {
        let rows: Vec<usize> = (0..spec.n).filter(|&i| observed.mask[(i, j)]).collect();
        if rows.len() < low {
            continue; // unobserved column: leave zero for now
        }
        let a = psi_low.select_rows(rows.iter());
        let b = DMatrix::from_fn(rows.len(), 1, |r, _| observed.x_s[(rows[r], j)]);
        let c = a.svd(true, true).solve(&b, 1e-10).unwrap();
        let full = &psi_low * c;
        x_hat.set_column(j, &full.column(0));
    }

    let in_rows: std::collections::HashSet<_> = samples.rows.iter().collect();
    let in_cols: std::collections::HashSet<_> = samples.cols.iter().collect();
    let mut urow = (0.0f64, 0.0f64);
    let mut obs = (0.0f64, 0.0f64);
    for j in 0..spec.t {
        if !in_cols.contains(&j) {
            continue;
        }
        for i in 0..spec.n {
            let d = (truth[(i, j)] - x_hat[(i, j)]).powi(2);
            let t = truth[(i, j)].powi(2);
            if in_rows.contains(&i) {
                obs.0 += d;
                obs.1 += t;
            } else {
                urow.0 += d;
                urow.1 += t;
            }
        }
    }
    println!(
        "bandlimited LS on observed cols: obs region {:.4}, unobserved rows {:.4}",
        (obs.0 / obs.1).sqrt(),
        (urow.0 / urow.1).sqrt()
    );
}
