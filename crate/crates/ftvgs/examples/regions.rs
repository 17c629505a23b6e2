use ftvgs::lssp::{LsspConfig, LsspSolver};
use ftvgs::sampling::{subset_random_sample, ObservedMatrix, ReplacementMode};
use ftvgs::signal::TemporalOperators;
use ftvgs::spectral::SpectralBases;
use ftvgs::synth::{generate_synthetic, random_connected_graph, SynthSpec};
use nalgebra::DMatrix;

fn region_errors(
    truth: &DMatrix<f64>,
    est: &DMatrix<f64>,
    rows: &[usize],
    cols: &[usize],
) -> (f64, f64, f64) {
    let in_rows: std::collections::HashSet<_> = rows.iter().collect();
    let in_cols: std::collections::HashSet<_> = cols.iter().collect();
    let mut obs = (0.0, 0.0);
    let mut urow = (0.0, 0.0);
    let mut ucol = (0.0, 0.0);
    for j in 0..truth.ncols() {
        for i in 0..truth.nrows() {
            let d = (truth[(i, j)] - est[(i, j)]).powi(2);
            let t = truth[(i, j)].powi(2);
            if !in_rows.contains(&i) {
                urow.0 += d;
                urow.1 += t;
            } else if !in_cols.contains(&j) {
                ucol.0 += d;
                ucol.1 += t;
            } else {
                obs.0 += d;
                obs.1 += t;
            }
        }
    }
    (
        (obs.0 / obs.1).sqrt(),
        (urow.0 / urow.1).sqrt(),
        (ucol.0 / ucol.1).sqrt(),
    )
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let gamma_g: f64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(0.1);
    let gamma_t: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(0.1);
    let gamma_d: f64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(0.1);
    let rho: f64 = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(1.05);
    let middle: usize = args.get(5).map(|s| s.parse().unwrap()).unwrap_or(50);
    let outer: usize = args.get(6).map(|s| s.parse().unwrap()).unwrap_or(5);
    let mu_cap: f64 = args.get(7).map(|s| s.parse().unwrap()).unwrap_or(1e8);
    let restart: bool = args.get(8).map(|s| s == "1").unwrap_or(true);

    let spec = SynthSpec::default();
    let graph = random_connected_graph(spec.n, 12345).unwrap();
    let bases = SpectralBases::new(&graph, spec.t).unwrap();
    let ops = TemporalOperators::new(spec.t).unwrap();
    let mut s = spec.clone();
    s.seed = 1000;
    let data = generate_synthetic(&s, &bases).unwrap();
    let samples =
        subset_random_sample(&data.signal, 0.9, 0.9, 0, ReplacementMode::Without).unwrap();
    let observed = ObservedMatrix::from_samples(&samples);

    let config = LsspConfig {
        gamma_g,
        gamma_t,
        gamma_d,
        rho,
        middle_iters: middle,
        outer_iters: outer,
        mu_max_factor: mu_cap,
        restart_penalties: restart,
        tol: 0.0, // run all outer passes
        ..Default::default()
    };
    println!(
        "g=({gamma_g},{gamma_t},{gamma_d}) rho={rho} K={middle} P={outer} mu_init={:.4}",
        {
            let solver = LsspSolver::new(&observed, &bases, &ops, config.clone()).unwrap();
            solver.mu_init()
        }
    );

    let solver = LsspSolver::new(&observed, &bases, &ops, config.clone()).unwrap();
    let mut state = solver.initial_state();
    let truth = data.signal.data();

    for p in 1..=config.outer_iters {
        if p > 1 && config.restart_penalties {
            state.mu1 = solver.mu_init();
            state.mu2 = solver.mu_init();
            state.mu3 = solver.mu_init();
            state.y1.fill(1.0);
            state.y2.fill(1.0);
            state.y3.fill(1.0);
        }
        for k in 1..=config.middle_iters {
            state.f_g = solver.update_fg(&state).unwrap();
            state.f_t = solver.update_ft(&state).unwrap();
            state.r_weight = ftvgs::lssp::update_rank_weight(&state.x_hat, 1e-3).unwrap();
            state.x_hat = solver.update_xhat(&state, p, k).unwrap();
            state.e = solver.update_error(&state);
            solver.update_multipliers(&mut state);

            if k % 50 == 0 {
                let (obs, urow, ucol) = region_errors(truth, &state.x_hat, &samples.rows, &samples.cols);
                // how much of the truth do the spectral syntheses carry?
                let synth_g = bases.psi_g() * &state.f_g;
                let (_, urow_g, _) = region_errors(truth, &synth_g, &samples.rows, &samples.cols);
                // energy split of F_G between the true support (rows < 100)
                // and the high graph frequencies (rows >= 100)
                let low: f64 = (0..100).map(|i| state.f_g.row(i).norm_squared()).sum();
                let high: f64 = (100..spec.n).map(|i| state.f_g.row(i).norm_squared()).sum();
                let t_low: f64 = (0..88).map(|i| state.f_t.row(i).norm_squared()).sum();
                let t_high: f64 = (88..spec.t).map(|i| state.f_t.row(i).norm_squared()).sum();
                println!(
                    "p{p} k{k:3}: obs {obs:.3} urow {urow:.3} ucol {ucol:.3} | synthG urow {urow_g:.3} | fG hi/lo {:.4} fT hi/lo {:.4} | mu1 {:.3e} thr@W=1 {:.2e}",
                    high / low, t_high / t_low, state.mu1, gamma_g / state.mu1
                );
            }
        }
        let (w_g, w_t) = ftvgs::lssp::update_weights(&state.f_g, &state.f_t, config.zeta);
        state.w_g = w_g;
        state.w_t = w_t;
    }
}
