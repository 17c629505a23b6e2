use std::time::Instant;

use ftvgs::lssp::svt::{svt_baseline, SvtConfig};
use ftvgs::lssp::{lssp_reconstruct, LsspConfig};
use ftvgs::sampling::{subset_random_sample, ObservedMatrix, ReplacementMode};
use ftvgs::signal::TemporalOperators;
use ftvgs::spectral::SpectralBases;
use ftvgs::synth::{generate_synthetic, nrmse, random_connected_graph, SynthSpec};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let ratio: f64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(0.9);
    let seeds: u64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(3);
    let gamma_g: f64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(1.0);
    let gamma_t: f64 = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(1.0);
    let gamma_d: f64 = args.get(5).map(|s| s.parse().unwrap()).unwrap_or(0.1);
    let rho: f64 = args.get(6).map(|s| s.parse().unwrap()).unwrap_or(1.05);
    let middle: usize = args.get(7).map(|s| s.parse().unwrap()).unwrap_or(50);
    let outer: usize = args.get(8).map(|s| s.parse().unwrap()).unwrap_or(5);
    let zeta: f64 = args.get(9).map(|s| s.parse().unwrap()).unwrap_or(1e-3);
    let mu_cap: f64 = args.get(10).map(|s| s.parse().unwrap()).unwrap_or(1e8);
    let restart: bool = args.get(11).map(|s| s == "1").unwrap_or(true);

    let spec = SynthSpec::default();
    let graph = random_connected_graph(spec.n, 12345).unwrap();
    let bases = SpectralBases::new(&graph, spec.t).unwrap();
    let ops = TemporalOperators::new(spec.t).unwrap();

    let config = LsspConfig {
        gamma_g,
        gamma_t,
        gamma_d,
        rho,
        middle_iters: middle,
        outer_iters: outer,
        zeta,
        mu_max_factor: mu_cap,
        restart_penalties: restart,
        tol: 0.0,
        ..Default::default()
    };
    println!("ratio {ratio} gammas ({gamma_g}, {gamma_t}, {gamma_d}) rho {rho} K {middle} P {outer}");

    let mut lssp_errs = Vec::new();
    let mut svt_errs = Vec::new();
    for seed in 0..seeds {
        let mut s = spec.clone();
        s.seed = 1000 + seed;
        let data = generate_synthetic(&s, &bases).unwrap();
        let samples =
            subset_random_sample(&data.signal, ratio, ratio, seed, ReplacementMode::Without)
                .unwrap();

        let t0 = Instant::now();
        let result = lssp_reconstruct(&samples, &bases, &ops, &config).unwrap();
        let e_lssp = nrmse(&data.signal, &result.signal).unwrap();
        let t_lssp = t0.elapsed().as_secs_f64();

        let observed = ObservedMatrix::from_samples(&samples);
        let skip_svt = std::env::var("SKIP_SVT").is_ok();
        let t0 = Instant::now();
        let (e_svt, svt_iters, svt_conv) = if skip_svt {
            (f64::NAN, 0, false)
        } else {
            let (svt_est, svt_report) = svt_baseline(&observed, &SvtConfig::default()).unwrap();
            (
                nrmse(&data.signal, &svt_est).unwrap(),
                svt_report.iterations,
                svt_report.converged,
            )
        };
        let t_svt = t0.elapsed().as_secs_f64();

        // per-unobserved-row NRMSE for LSSP
        let mut worst_row = 0.0f64;
        let mut mean_row = 0.0f64;
        let unobs = observed.unobserved_rows();
        for &i in &unobs {
            let truth = data.signal.data().row(i);
            let err = (result.signal.data().row(i) - truth).norm() / truth.norm();
            worst_row = worst_row.max(err);
            mean_row += err / unobs.len() as f64;
        }

        println!(
            "seed {seed}: lssp {e_lssp:.4} ({t_lssp:.1}s, outer {}) svt {e_svt:.4} ({t_svt:.1}s, {svt_iters} iters conv {svt_conv}) | unobs rows {}: worst {worst_row:.3} mean {mean_row:.3}",
            result.outer_iterations, unobs.len()
        );
        lssp_errs.push(e_lssp);
        svt_errs.push(e_svt);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    println!("mean lssp {:.4}  mean svt {:.4}", mean(&lssp_errs), mean(&svt_errs));
}
