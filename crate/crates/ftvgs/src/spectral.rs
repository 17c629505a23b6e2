//! Graph Fourier and temporal harmonic bases, and the joint spectrum.
//!
//! The graph basis is the eigenbasis of the Laplacian sorted by ascending
//! eigenvalue; the time basis is the real orthonormal harmonic basis
//! (constant column, then cosine/sine pairs of increasing frequency, plus
//! the alternating Nyquist column for even `T`). Everything here is real:
//! the real harmonic basis spans the same low-frequency subspaces as the
//! complex DFT without dragging complex arithmetic into the solvers.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::signal::{GraphTopology, TimeVertexSignal};

/// Laplacian eigenbasis with eigenvalues in ascending order.
#[derive(Debug, Clone)]
pub struct GftBasis {
    /// `N x N` orthonormal eigenvector matrix, one column per eigenvalue.
    pub psi: DMatrix<f64>,
    /// Non-decreasing eigenvalues.
    pub eigenvalues: DVector<f64>,
}

/// Real orthonormal harmonic basis on `T` samples, lowest frequency first.
#[derive(Debug, Clone)]
pub struct HarmonicBasis {
    pub psi: DMatrix<f64>,
}

/// Graph and time bases bundled for transforms and solvers.
#[derive(Debug, Clone)]
pub struct SpectralBases {
    psi_g: DMatrix<f64>,
    eigenvalues_g: DVector<f64>,
    psi_t: DMatrix<f64>,
}

impl SpectralBases {
    pub fn from_parts(graph: GftBasis, time: HarmonicBasis) -> Self {
        Self {
            psi_g: graph.psi,
            eigenvalues_g: graph.eigenvalues,
            psi_t: time.psi,
        }
    }

    /// Computes both bases for an `N`-vertex topology and `t` time steps.
    pub fn new(topology: &GraphTopology, t: usize) -> Result<Self> {
        Ok(Self::from_parts(gft_basis(topology)?, harmonic_basis(t)?))
    }

    pub fn psi_g(&self) -> &DMatrix<f64> {
        &self.psi_g
    }

    pub fn psi_t(&self) -> &DMatrix<f64> {
        &self.psi_t
    }

    pub fn eigenvalues_g(&self) -> &DVector<f64> {
        &self.eigenvalues_g
    }

    pub fn num_vertices(&self) -> usize {
        self.psi_g.nrows()
    }

    pub fn num_steps(&self) -> usize {
        self.psi_t.nrows()
    }
}

/// Deterministic sign convention: the first entry of each column with
/// magnitude above 1e-12 is made positive.
fn fix_column_signs(m: &mut DMatrix<f64>) {
    for j in 0..m.ncols() {
        let lead = m.column(j).iter().find(|v| v.abs() > 1e-12).copied();
        if let Some(v) = lead {
            if v < 0.0 {
                for i in 0..m.nrows() {
                    m[(i, j)] = -m[(i, j)];
                }
            }
        }
    }
}

/// Symmetric eigendecomposition of the Laplacian with ascending eigenvalues
/// and the deterministic sign convention.
pub fn gft_basis(topology: &GraphTopology) -> Result<GftBasis> {
    let eig = topology.laplacian().clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|v| !v.is_finite())
        || eig.eigenvectors.iter().any(|v| !v.is_finite())
    {
        return Err(Error::EigenFailure { context: "gft_basis" });
    }

    // nalgebra leaves eigenpairs unordered; sort them stably by eigenvalue.
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());

    let mut psi = DMatrix::zeros(n, n);
    let mut eigenvalues = DVector::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        psi.set_column(dst, &eig.eigenvectors.column(src));
        eigenvalues[dst] = eig.eigenvalues[src];
    }
    fix_column_signs(&mut psi);
    Ok(GftBasis { psi, eigenvalues })
}

/// Real orthonormal harmonic basis on `t` samples.
///
/// Column 0 is `1/sqrt(T)`; columns then alternate
/// `sqrt(2/T) cos(2 pi k n / T)` and `sqrt(2/T) sin(2 pi k n / T)` for
/// `k = 1, 2, ...`; even `T` ends with the alternating Nyquist column
/// `(-1)^n / sqrt(T)`.
pub fn harmonic_basis(t: usize) -> Result<HarmonicBasis> {
    if t == 0 {
        return Err(Error::ParamOutOfRange {
            name: "t",
            value: 0.0,
            range: "t >= 1",
        });
    }
    let tf = t as f64;
    let mut psi = DMatrix::zeros(t, t);
    for i in 0..t {
        psi[(i, 0)] = 1.0 / tf.sqrt();
    }
    let amplitude = (2.0 / tf).sqrt();
    let mut col = 1;
    let mut k = 1usize;
    while col < t {
        if 2 * k == t {
            // Nyquist column for even T
            for i in 0..t {
                psi[(i, col)] = if i % 2 == 0 { 1.0 } else { -1.0 } / tf.sqrt();
            }
            col += 1;
        } else {
            let w = 2.0 * std::f64::consts::PI * k as f64 / tf;
            for i in 0..t {
                psi[(i, col)] = amplitude * (w * i as f64).cos();
            }
            for i in 0..t {
                psi[(i, col + 1)] = amplitude * (w * i as f64).sin();
            }
            col += 2;
        }
        k += 1;
    }
    Ok(HarmonicBasis { psi })
}

/// Graph, time, and joint spectra of a signal.
#[derive(Debug, Clone)]
pub struct SpectralCoefficients {
    /// `N x T` graph spectrum: `X = Psi_G F_G`.
    pub f_g: DMatrix<f64>,
    /// `T x N` time spectrum: `X^T = Psi_T F_T`.
    pub f_t: DMatrix<f64>,
    /// `N x T` joint spectrum `Psi_G^T X Psi_T`.
    pub f_j: DMatrix<f64>,
}

/// Projects a signal onto the bases, producing all three spectra.
pub fn analyze(signal: &TimeVertexSignal, bases: &SpectralBases) -> Result<SpectralCoefficients> {
    if signal.num_vertices() != bases.num_vertices() || signal.num_steps() != bases.num_steps() {
        return Err(Error::DimensionMismatch {
            context: "analyze",
            expected: format!("{} x {}", bases.num_vertices(), bases.num_steps()),
            actual: format!("{} x {}", signal.num_vertices(), signal.num_steps()),
        });
    }
    let x = signal.data();
    let f_g = bases.psi_g().transpose() * x;
    let f_t = bases.psi_t().transpose() * x.transpose();
    let f_j = &f_g * bases.psi_t();
    Ok(SpectralCoefficients { f_g, f_t, f_j })
}

/// Rebuilds the signal from its joint spectrum: `X = Psi_G F_J Psi_T^T`.
pub fn synthesize(
    coefficients: &SpectralCoefficients,
    bases: &SpectralBases,
) -> Result<TimeVertexSignal> {
    synthesize_joint(&coefficients.f_j, bases)
}

/// Rebuilds a signal from a bare joint spectrum matrix.
pub fn synthesize_joint(f_j: &DMatrix<f64>, bases: &SpectralBases) -> Result<TimeVertexSignal> {
    if f_j.nrows() != bases.num_vertices() || f_j.ncols() != bases.num_steps() {
        return Err(Error::DimensionMismatch {
            context: "synthesize",
            expected: format!("{} x {}", bases.num_vertices(), bases.num_steps()),
            actual: format!("{} x {}", f_j.nrows(), f_j.ncols()),
        });
    }
    TimeVertexSignal::new(bases.psi_g() * f_j * bases.psi_t().transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::build_incidence;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn orthonormality_defect(m: &DMatrix<f64>) -> f64 {
        let n = m.ncols();
        (m.transpose() * m - DMatrix::<f64>::identity(n, n)).norm()
    }

    #[test]
    fn two_path_gft() {
        let g = build_incidence(2, &[(0, 1)]).unwrap();
        let basis = gft_basis(&g).unwrap();
        assert!((basis.eigenvalues[0] - 0.0).abs() < 1e-12);
        assert!((basis.eigenvalues[1] - 2.0).abs() < 1e-12);
        let s = 1.0 / 2.0f64.sqrt();
        assert!((basis.psi[(0, 0)] - s).abs() < 1e-12);
        assert!((basis.psi[(1, 0)] - s).abs() < 1e-12);
        assert!((basis.psi[(0, 1)] - s).abs() < 1e-12);
        assert!((basis.psi[(1, 1)] + s).abs() < 1e-12);
    }

    #[test]
    fn edgeless_graph_gft_is_identity() {
        let g = build_incidence(3, &[]).unwrap();
        let basis = gft_basis(&g).unwrap();
        assert!(basis.eigenvalues.iter().all(|&v| v.abs() < 1e-12));
        assert!((basis.psi - DMatrix::<f64>::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn three_path_eigenvalues() {
        let g = build_incidence(3, &[(0, 1), (1, 2)]).unwrap();
        let basis = gft_basis(&g).unwrap();
        for (got, want) in basis.eigenvalues.iter().zip([0.0, 1.0, 3.0]) {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
    }

    #[test]
    fn gft_diagonalizes_laplacian() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..10 {
            let n = rng.gen_range(2..12);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.gen_bool(0.4) {
                        edges.push((u, v));
                    }
                }
            }
            let g = build_incidence(n, &edges).unwrap();
            let basis = gft_basis(&g).unwrap();
            assert!(orthonormality_defect(&basis.psi) < 1e-9);
            let recon = &basis.psi
                * DMatrix::from_diagonal(&basis.eigenvalues)
                * basis.psi.transpose();
            let scale = g.laplacian().norm().max(1.0);
            assert!((recon - g.laplacian()).norm() / scale < 1e-8);
            for w in basis.eigenvalues.as_slice().windows(2) {
                assert!(w[0] <= w[1] + 1e-12);
            }
            assert!(basis.eigenvalues[0] >= -1e-9);
        }
    }

    #[test]
    fn harmonic_basis_small_cases() {
        assert_eq!(harmonic_basis(1).unwrap().psi[(0, 0)], 1.0);

        let h2 = harmonic_basis(2).unwrap().psi;
        let s = 1.0 / 2.0f64.sqrt();
        assert!((h2[(0, 0)] - s).abs() < 1e-15);
        assert!((h2[(1, 0)] - s).abs() < 1e-15);
        assert!((h2[(0, 1)] - s).abs() < 1e-15);
        assert!((h2[(1, 1)] + s).abs() < 1e-15);

        assert!(harmonic_basis(0).is_err());
    }

    #[test]
    fn harmonic_basis_is_orthonormal() {
        for t in [1, 2, 3, 4, 5, 8, 13, 16, 128] {
            let h = harmonic_basis(t).unwrap().psi;
            assert!(
                orthonormality_defect(&h) < 1e-10,
                "defect at t={t}: {}",
                orthonormality_defect(&h)
            );
            // column 0 is the constant vector
            let c = 1.0 / (t as f64).sqrt();
            assert!(h.column(0).iter().all(|&v| (v - c).abs() < 1e-15));
        }
    }

    #[test]
    fn analyze_synthesize_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let g = build_incidence(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let bases = SpectralBases::new(&g, 4).unwrap();
        let x = DMatrix::from_fn(4, 4, |_, _| rng.gen_range(-1.0..1.0));
        let signal = TimeVertexSignal::new(x.clone()).unwrap();
        let coeffs = analyze(&signal, &bases).unwrap();
        let back = synthesize(&coeffs, &bases).unwrap();
        assert!((back.data() - &x).norm() / x.norm() < 1e-10);

        // component spectra reconstruct through their own bases
        assert!((bases.psi_g() * &coeffs.f_g - &x).norm() / x.norm() < 1e-10);
        assert!((bases.psi_t() * &coeffs.f_t - x.transpose()).norm() / x.norm() < 1e-10);
        assert!((&coeffs.f_j - bases.psi_g().transpose() * &x * bases.psi_t()).norm() < 1e-10);
    }

    #[test]
    fn rank_one_basis_product_has_single_coefficient() {
        let g = build_incidence(3, &[(0, 1), (1, 2)]).unwrap();
        let bases = SpectralBases::new(&g, 3).unwrap();
        let c = 2.5;
        let x = bases.psi_g().column(0) * bases.psi_t().column(0).transpose() * c;
        let signal = TimeVertexSignal::new(x).unwrap();
        let coeffs = analyze(&signal, &bases).unwrap();
        assert!((coeffs.f_j[(0, 0)] - c).abs() < 1e-12);
        let mut rest = coeffs.f_j.clone();
        rest[(0, 0)] = 0.0;
        assert!(rest.amax() < 1e-12);

        let zero = TimeVertexSignal::from_rows(3, 3, &[0.0; 9]).unwrap();
        let coeffs = analyze(&zero, &bases).unwrap();
        assert_eq!(coeffs.f_j.amax(), 0.0);
    }

    #[test]
    fn parseval_holds_for_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = build_incidence(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 2)]).unwrap();
        let bases = SpectralBases::new(&g, 7).unwrap();
        for _ in 0..25 {
            let x = DMatrix::from_fn(5, 7, |_, _| rng.gen_range(-2.0..2.0));
            let signal = TimeVertexSignal::new(x.clone()).unwrap();
            let coeffs = analyze(&signal, &bases).unwrap();
            assert!((coeffs.f_j.norm() - x.norm()).abs() / x.norm() < 1e-9);
        }
    }

    /// A joint spectrum with r nonzero rows synthesizes to a matrix of rank
    /// at most r.
    #[test]
    fn bandlimited_spectrum_bounds_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let g = build_incidence(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)]).unwrap();
        let bases = SpectralBases::new(&g, 6).unwrap();
        let r = 2;
        let mut f_j = DMatrix::zeros(6, 6);
        for i in 0..r {
            for j in 0..6 {
                f_j[(i, j)] = rng.gen_range(-1.0..1.0);
            }
        }
        let x = synthesize_joint(&f_j, &bases).unwrap();
        let rank = crate::analysis::numerical_rank(x.data(), 1e-9);
        assert!(rank <= r, "rank {rank} > {r}");
    }

    #[test]
    fn analyze_rejects_mismatched_dims() {
        let g = build_incidence(3, &[(0, 1), (1, 2)]).unwrap();
        let bases = SpectralBases::new(&g, 4).unwrap();
        let signal = TimeVertexSignal::from_rows(3, 3, &[0.0; 9]).unwrap();
        assert!(analyze(&signal, &bases).is_err());
    }
}
