// Joint bandlimited least squares: fit C (low_g x low_t) so that
// Psi_low C Phi_low^T matches the observed entries, by conjugate gradient on
// the normal equations. This is the information-theoretic benchmark for the
// "bandlimited in both domains" prior.
use ftvgs::sampling::{subset_random_sample, ObservedMatrix, ReplacementMode};
use ftvgs::spectral::SpectralBases;
use ftvgs::synth::{generate_synthetic, random_connected_graph, SynthSpec};
use nalgebra::DMatrix;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let low_g: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(100);
    let low_t: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(88);
    let iters: usize = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(200);

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

    let psi = bases.psi_g().columns(0, low_g).into_owned(); // N x low_g
    let phi = bases.psi_t().columns(0, low_t).into_owned(); // T x low_t

    // forward: A(C) = mask .* (psi C phi^T); adjoint: psi^T M phi
    let forward = |c: &DMatrix<f64>| -> DMatrix<f64> {
        let full = &psi * c * phi.transpose();
        DMatrix::from_fn(spec.n, spec.t, |i, j| {
            if observed.mask[(i, j)] {
                full[(i, j)]
            } else {
                0.0
            }
        })
    };
    let adjoint = |m: &DMatrix<f64>| -> DMatrix<f64> { psi.transpose() * m * &phi };

    // CG on A^T A c = A^T b
    let b = adjoint(&observed.x_s);
    let mut c = DMatrix::zeros(low_g, low_t);
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rs_old = r.dot(&r);
    for it in 0..iters {
        let ap = adjoint(&forward(&p));
        let alpha = rs_old / p.dot(&ap);
        c += alpha * &p;
        r -= alpha * ap;
        let rs_new = r.dot(&r);
        if it % 50 == 0 {
            let x_hat = &psi * &c * phi.transpose();
            let err = (truth - &x_hat).norm() / truth.norm();
            println!("cg {it:4}: |r| {:9.3e} total NRMSE {err:.4}", rs_new.sqrt());
        }
        if rs_new.sqrt() < 1e-12 {
            break;
        }
        p = &r + (rs_new / rs_old) * p;
        rs_old = rs_new;
    }

    let x_hat = &psi * &c * phi.transpose();
    let in_rows: std::collections::HashSet<_> = samples.rows.iter().collect();
    let in_cols: std::collections::HashSet<_> = samples.cols.iter().collect();
    let mut parts = [(0.0, 0.0); 3]; // obs, urow, ucol
    for j in 0..spec.t {
        for i in 0..spec.n {
            let d = (truth[(i, j)] - x_hat[(i, j)]).powi(2);
            let t = truth[(i, j)].powi(2);
            let idx = if !in_rows.contains(&i) {
                1
            } else if !in_cols.contains(&j) {
                2
            } else {
                0
            };
            parts[idx].0 += d;
            parts[idx].1 += t;
        }
    }
    let total = (truth - &x_hat).norm() / truth.norm();
    println!(
        "joint LS ({low_g} x {low_t}): total {total:.4} obs {:.4} urow {:.4} ucol {:.4}",
        (parts[0].0 / parts[0].1).sqrt(),
        (parts[1].0 / parts[1].1).sqrt(),
        (parts[2].0 / parts[2].1).sqrt()
    );
}
