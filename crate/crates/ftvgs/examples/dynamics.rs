// Step-by-step ADMM diagnostics on the gamma = 0 core: is the observed
// region converging, oscillating, or drifting?
use ftvgs::lssp::{LsspConfig, LsspSolver};
use ftvgs::sampling::{subset_random_sample, ObservedMatrix, ReplacementMode};
use ftvgs::signal::TemporalOperators;
use ftvgs::spectral::SpectralBases;
use ftvgs::synth::{generate_synthetic, random_connected_graph, SynthSpec};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let rho: f64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(1.05);
    let iters: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(60);

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
        gamma_g: 0.0,
        gamma_t: 0.0,
        gamma_d: 0.0,
        rho,
        middle_iters: iters,
        outer_iters: 1,
        tol: 0.0,
        ..Default::default()
    };
    let solver = LsspSolver::new(&observed, &bases, &ops, config.clone()).unwrap();
    let mut state = solver.initial_state();

    let obs_norm = observed.x_s.norm();
    println!("mu_init {:.4} obs_norm {:.2}", solver.mu_init(), obs_norm);
    let mut prev = state.x_hat.clone();
    for k in 1..=config.middle_iters {
        state.f_g = solver.update_fg(&state).unwrap();
        state.f_t = solver.update_ft(&state).unwrap();
        state.r_weight = ftvgs::lssp::update_rank_weight(&state.x_hat, 1e-3).unwrap();
        state.x_hat = solver.update_xhat(&state, 1, k).unwrap();
        state.e = solver.update_error(&state);
        solver.update_multipliers(&mut state);

        let mut robs = 0.0f64;
        for j in 0..spec.t {
            for i in 0..spec.n {
                if observed.mask[(i, j)] {
                    robs += (observed.x_s[(i, j)] - state.x_hat[(i, j)]).powi(2);
                }
            }
        }
        let robs = robs.sqrt() / obs_norm;
        let dx = (&state.x_hat - &prev).norm();
        let rank_pressure = (2.0 * &state.x_hat * &state.r_weight).norm();
        println!(
            "k{k:3}: robs {robs:.4} |dX| {dx:9.3e} |Y1| {:9.3e} |Y3| {:9.3e} |2XR| {:9.3e} mu {:.3e}",
            state.y1.norm(),
            state.y3.norm(),
            rank_pressure,
            state.mu1
        );
        prev = state.x_hat.clone();
    }
}
