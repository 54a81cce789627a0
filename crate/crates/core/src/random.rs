//! Random states and unitaries for property checks and parameter sweeps.

use rand::Rng;

use crate::qmatrix::{c64, ComplexMatrix, DensityMatrix, PureState, UnitaryMatrix};
use crate::Complex64;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller; the open interval keeps ln away from zero.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    c64(gaussian(rng), gaussian(rng))
}

/// Haar-random pure state.
pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> PureState {
    let amps = (0..dim).map(|_| complex_gaussian(rng)).collect();
    PureState::normalized(amps).expect("gaussian vector is nonzero with probability one")
}

/// Random full-rank mixed state from the Ginibre ensemble.
pub fn density_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let g = ComplexMatrix::new(dim, (0..dim * dim).map(|_| complex_gaussian(rng)).collect())
        .expect("valid dimension");
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    DensityMatrix::new(w.scale(c64(1.0 / tr, 0.0)).hermitian_part())
        .expect("Ginibre state is valid")
}

/// Haar-random unitary via Gram-Schmidt on a Ginibre matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> UnitaryMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        for u in &cols {
            let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= proj * ui;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    let mut m = ComplexMatrix::zeros(dim);
    for (c, col) in cols.iter().enumerate() {
        for (r, z) in col.iter().enumerate() {
            m.set(r, c, *z);
        }
    }
    UnitaryMatrix::new(m).expect("Gram-Schmidt output is unitary")
}

/// Random Hermitian matrix with Gaussian entries.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = ComplexMatrix::new(dim, (0..dim * dim).map(|_| complex_gaussian(rng)).collect())
        .expect("valid dimension");
    g.hermitian_part()
}

/// Random state diagonal in the computational basis.
pub fn diagonal_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let w: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
    let total: f64 = w.iter().sum();
    DensityMatrix::diagonal(&w.iter().map(|x| x / total).collect::<Vec<_>>())
        .expect("valid populations")
}

/// Uniform angle in `[0, 2π)`.
pub fn angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.gen_range(0.0..std::f64::consts::TAU)
}
