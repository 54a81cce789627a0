//! Double Mach-Zehnder interferometer with a dephased first loop and a
//! demon at the intermediate splitter.
//!
//! Pipeline for the flying qubit (`⇑`/`⇓` are the two arms):
//! splitter, arm phase, dephasing, demon scatter (whose splitter doubles as
//! the input splitter of the second loop), flux phase on the `⇓` arm,
//! final splitter, detection in lead 3 (`⇑`) or lead 4 (`⇓`).

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use crate::demon_spin::{self, SpinDemonParams};
use crate::error::{Error, Result};
use crate::qmatrix::{
    c64, partial_trace, phase, ComplexMatrix, DensityMatrix, PureState, Subsystem, UnitaryMatrix,
};

pub const MIN_FLUX_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MziConfig {
    /// Entangling angle with the dephaser; `π/2` dephases fully.
    pub chi: f64,
    /// Chaotic admixture of the demon: `(1−ε)|↑⟩⟨↑| + ε|↓⟩⟨↓|`.
    pub epsilon: f64,
    pub flux_samples: usize,
    pub params: SpinDemonParams,
    /// Relative phase on the `⇓` arm of the first loop. `None` picks the
    /// value that balances the two arms at the intermediate splitter.
    pub arm_phase: Option<f64>,
    /// Replace the demon scatter by the bare splitter.
    pub bypass_demon: bool,
}

impl Default for MziConfig {
    fn default() -> Self {
        MziConfig {
            chi: FRAC_PI_2,
            epsilon: 0.0,
            flux_samples: 64,
            params: SpinDemonParams::default(),
            arm_phase: None,
            bypass_demon: false,
        }
    }
}

impl MziConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=0.5).contains(&self.epsilon) {
            return Err(Error::Parameter(format!(
                "demon impurity {} outside [0, 1/2]",
                self.epsilon
            )));
        }
        if self.flux_samples < MIN_FLUX_SAMPLES {
            return Err(Error::Parameter(format!(
                "need at least {MIN_FLUX_SAMPLES} flux samples, got {}",
                self.flux_samples
            )));
        }
        if !self.chi.is_finite() || !self.arm_phase.unwrap_or(0.0).is_finite() {
            return Err(Error::Parameter(
                "interferometer phases must be finite".into(),
            ));
        }
        self.params.validate()
    }

    fn resolved_arm_phase(&self) -> f64 {
        self.arm_phase
            .unwrap_or(2.0 * self.params.theta + FRAC_PI_2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VisibilityReport {
    pub flux: Vec<f64>,
    pub p3: Vec<f64>,
    pub p4: Vec<f64>,
    pub visibility: f64,
}

/// Off-diagonals of `rho` scaled by `cos χ`: a dephaser qubit in `|0⟩` is
/// rotated by `exp(−iχσ_y)` when the system is in `⇓`, then traced out.
pub fn dephase(rho: &DensityMatrix, chi: f64) -> Result<DensityMatrix> {
    if rho.dim() != 2 {
        return Err(Error::Shape("dephasing acts on a qubit".into()));
    }
    let (c, s) = (chi.cos(), chi.sin());
    let zero = c64(0.0, 0.0);
    let one = c64(1.0, 0.0);
    let controlled = UnitaryMatrix::new(ComplexMatrix::from_rows([
        [one, zero, zero, zero],
        [zero, one, zero, zero],
        [zero, zero, c64(c, 0.0), c64(-s, 0.0)],
        [zero, zero, c64(s, 0.0), c64(c, 0.0)],
    ]))?;
    let ancilla = PureState::basis(2, 0)?.density();
    let joint = rho.tensor(&ancilla)?.evolve(&controlled)?;
    partial_trace(&joint, Subsystem::First)
}

fn arm_phase_gate(angle: f64) -> UnitaryMatrix {
    UnitaryMatrix::new(ComplexMatrix::diagonal(&[c64(1.0, 0.0), phase(angle)]))
        .expect("diagonal phases")
}

/// State entering the second loop's flux arm.
fn loop_two_input(config: &MziConfig) -> Result<DensityMatrix> {
    let p = &config.params;
    let splitter = demon_spin::beam_splitter(p.theta, p.eta);
    let mut rho = PureState::basis(2, 0)?.density().evolve(&splitter)?;
    rho = rho.evolve(&arm_phase_gate(config.resolved_arm_phase()))?;
    rho = dephase(&rho, config.chi)?;
    if config.bypass_demon {
        rho.evolve(&splitter)
    } else {
        let demon = DensityMatrix::diagonal(&[1.0 - config.epsilon, config.epsilon])?;
        Ok(demon_spin::scatter(&rho, &demon, p)?.rho_out)
    }
}

/// Sample `P₃(Φ)` and `P₄(Φ)` on a uniform grid over `[0, 2π)`.
pub fn run_double_mzi(config: &MziConfig) -> Result<VisibilityReport> {
    config.validate()?;
    let rho = loop_two_input(config)?;
    let p = &config.params;
    let splitter = demon_spin::beam_splitter(p.theta, p.eta);
    let n = config.flux_samples;
    let mut flux = Vec::with_capacity(n);
    let mut p3 = Vec::with_capacity(n);
    let mut p4 = Vec::with_capacity(n);
    for k in 0..n {
        let phi = TAU * k as f64 / n as f64;
        let out = rho.evolve(&arm_phase_gate(phi))?.evolve(&splitter)?;
        flux.push(phi);
        p3.push(out.matrix().get(0, 0).re);
        p4.push(out.matrix().get(1, 1).re);
    }
    let visibility = first_harmonic_visibility(&p3);
    Ok(VisibilityReport {
        flux,
        p3,
        p4,
        visibility,
    })
}

/// `(max − min)/(max + min)` of `A + B cos Φ + C sin Φ` sampled uniformly,
/// read off the mean and first Fourier coefficient so the result does not
/// depend on where the grid hits the extrema.
pub fn first_harmonic_visibility(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let (mut b, mut c) = (0.0, 0.0);
    for (k, &v) in samples.iter().enumerate() {
        let x = TAU * k as f64 / n;
        b += v * x.cos();
        c += v * x.sin();
    }
    let amplitude = 2.0 * (b * b + c * c).sqrt() / n;
    if mean <= 0.0 {
        0.0
    } else {
        (amplitude / mean).min(1.0)
    }
}

/// Plain `(max − min)/(max + min)` over the samples.
pub fn sampled_visibility(samples: &[f64]) -> f64 {
    let max = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    if max + min <= 0.0 {
        0.0
    } else {
        (max - min) / (max + min)
    }
}
