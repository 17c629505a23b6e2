// Does the graph-spectrum l1 objective actually prefer the true values on
// unobserved rows over zeros? Evaluate both, plus the smooth/rank terms.
use ftvgs::sampling::{subset_random_sample, ReplacementMode};
use ftvgs::signal::TemporalOperators;
use ftvgs::spectral::SpectralBases;
use ftvgs::synth::{generate_synthetic, random_connected_graph, SynthSpec};
use nalgebra::DMatrix;

fn l1(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|v| v.abs()).sum()
}

fn reweighted_l1(m: &DMatrix<f64>, w_from: &DMatrix<f64>, zeta: f64) -> f64 {
    m.zip_map(w_from, |v, f| v.abs() / (f.abs() + zeta)).sum()
}

fn g_term(m: &DMatrix<f64>) -> f64 {
    let eig = (m.transpose() * m).symmetric_eigen();
    eig.eigenvalues
        .iter()
        .map(|&l| (l.max(0.0).sqrt() + 1.0).ln())
        .sum()
}

fn main() {
    let spec = SynthSpec::default();
    let graph = random_connected_graph(spec.n, 12345).unwrap();
    let bases = SpectralBases::new(&graph, spec.t).unwrap();
    let ops = TemporalOperators::new(spec.t).unwrap();
    let mut s = spec.clone();
    s.seed = 1000;
    let data = generate_synthetic(&s, &bases).unwrap();
    let samples =
        subset_random_sample(&data.signal, 0.9, 0.9, 0, ReplacementMode::Without).unwrap();
    let truth = data.signal.data();
    let in_rows: std::collections::HashSet<_> = samples.rows.iter().copied().collect();

    // zero-filled variant: unobserved rows zeroed, everything else = truth
    let mut zerofill = truth.clone();
    for i in 0..spec.n {
        if !in_rows.contains(&i) {
            for j in 0..spec.t {
                zerofill[(i, j)] = 0.0;
            }
        }
    }

    for (name, x) in [("truth", truth), ("zerofill", &zerofill)] {
        let f_g = bases.psi_g().transpose() * x;
        let f_t = bases.psi_t().transpose() * x.transpose();
        let smooth = (x * ops.d2()).norm_squared();
        println!(
            "{name:9}: l1(F_G) {:9.1} l1(F_T) {:9.1} rw-l1(F_G|truth) {:9.1} g {:7.2} ||XD2||^2 {:9.1}",
            l1(&f_g),
            l1(&f_t),
            reweighted_l1(&f_g, &(bases.psi_g().transpose() * truth), 1e-3),
            g_term(x),
            smooth,
        );
    }
}
