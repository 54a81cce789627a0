//! Simulation toolkit for energy-conserving, non-unital quantum channels built
//! from a system qubit and a degenerate "demon" qubit.
//!
//! The crate is organised bottom-up:
//!
//! * [`qmatrix`]: dense complex matrices of dimension 2 and 4, density
//!   matrices, partial traces and von Neumann entropy.
//! * [`channel`]: the environment-dilated scattering channel, its
//!   coherence parameter `gamma`, entropy gain and its lower bound.
//! * [`demon_spin`]: spin-demon realization with a symmetric beam splitter,
//!   the two non-commuting demon rotations and the purity-exchange rule.
//! * [`circuits`]: CNOT and Hadamard-type gates, `U_D`, `V_D`,
//!   SWAP, and the four-step double-dot protocol.
//! * [`interferometer`]: double Mach-Zehnder coherence restoration.
//! * [`engine`]: the two-cycle demon engine, its energy/entropy ledger and the
//!   optimisation of the demon impurity.
//!
//! Conventions: `k_B = hbar = 1`, entropies in nats, joint basis ordered
//! `{|⇑↑⟩, |⇑↓⟩, |⇓↑⟩, |⇓↓⟩}` (system first, demon second).

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod circuits;
pub mod demon_spin;
pub mod engine;
mod error;
pub mod interferometer;
pub mod qmatrix;
pub mod random;
pub mod roots;

pub use channel::{ChannelConfig, ChannelReport, ChannelSpec, DemonSpec};
pub use circuits::{DoubleDotConfig, Gate, GateLabel};
pub use demon_spin::SpinDemonParams;
pub use engine::{CycleReport, EngineParams, OptimizationResult, Policy};
pub use error::{Error, Result};
pub use interferometer::{MziConfig, VisibilityReport};
pub use qmatrix::{ComplexMatrix, DensityMatrix, PureState, Subsystem, UnitaryMatrix};

pub use num_complex::Complex64;
