//! Environment-dilated scattering channel.
//!
//! A system qubit (the electron's lead degree of freedom) scatters through a
//! reflectionless two-in/two-out splitter `ŝ` while a demon qubit is rotated
//! by `û_α` whenever the electron passes lead `α`. The joint evolution is
//!
//! ```text
//! Û = Σ_{β∈{3,4}, α∈{1,2}} s_{βα} |β⟩⟨α| ⊗ û_β û_α
//! ```
//!
//! and the channel on the system is `Φ(ρ) = Tr_demon[Û (ρ ⊗ r̂) Û†]`.
//!
//! Lead labels: incoming leads 1, 2 and outgoing leads 3, 4 share the two
//! index positions of the system qubit, `|⇑⟩ = index 0` (lead 1 in, lead 3
//! out) and `|⇓⟩ = index 1` (lead 2 in, lead 4 out). The same matrix index
//! therefore means a different lead before and after scattering.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::demon_spin::{self, SpinDemonParams};
use crate::error::{Error, Result};
use crate::qmatrix::{
    c64, eigh, partial_trace, tensor, ComplexMatrix, DensityMatrix, PureState, Subsystem,
    UnitaryMatrix,
};

/// `|γ|` at or below this value counts as unital.
pub const UNITAL_TOL: f64 = 1e-12;

/// Eigenvalue floor used when taking `ln Φ(𝟙)`.
pub const LOG_FLOOR: f64 = 1e-300;

/// One of the four leads of the splitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lead {
    In1,
    In2,
    Out3,
    Out4,
}

impl Lead {
    fn slot(self) -> usize {
        match self {
            Lead::In1 => 0,
            Lead::In2 => 1,
            Lead::Out3 => 2,
            Lead::Out4 => 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ChannelConfig {
    scattering: UnitaryMatrix,
    lead_unitaries: [UnitaryMatrix; 4],
    demon_state: DensityMatrix,
}

impl ChannelConfig {
    /// `lead_unitaries` are ordered `[û₁, û₂, û₃, û₄]`.
    pub fn new(
        scattering: UnitaryMatrix,
        lead_unitaries: [UnitaryMatrix; 4],
        demon_state: DensityMatrix,
    ) -> Result<Self> {
        if scattering.dim() != 2 {
            return Err(Error::Shape("scattering matrix must be 2x2".into()));
        }
        if lead_unitaries.iter().any(|u| u.dim() != 2) {
            return Err(Error::Shape(
                "lead unitaries must act on a demon qubit".into(),
            ));
        }
        if demon_state.dim() != 2 {
            return Err(Error::Shape("demon state must be a qubit".into()));
        }
        Ok(Self {
            scattering,
            lead_unitaries,
            demon_state,
        })
    }

    /// Channel whose demon is never touched: `Φ(ρ) = ŝ ρ ŝ†`.
    pub fn bare(scattering: UnitaryMatrix, demon_state: DensityMatrix) -> Result<Self> {
        let id = UnitaryMatrix::identity(2);
        Self::new(
            scattering,
            [id.clone(), id.clone(), id.clone(), id],
            demon_state,
        )
    }

    pub fn scattering(&self) -> &UnitaryMatrix {
        &self.scattering
    }

    pub fn lead_unitary(&self, lead: Lead) -> &UnitaryMatrix {
        &self.lead_unitaries[lead.slot()]
    }

    pub fn demon_state(&self) -> &DensityMatrix {
        &self.demon_state
    }

    /// Same unitaries, different demon preparation.
    pub fn with_demon(&self, demon_state: DensityMatrix) -> Result<Self> {
        Self::new(
            self.scattering.clone(),
            self.lead_unitaries.clone(),
            demon_state,
        )
    }

    /// `s_{βα}` with `β ∈ {3,4}`, `α ∈ {1,2}`.
    fn s(&self, out: usize, inc: usize) -> Complex64 {
        self.scattering.matrix().get(out - 3, inc - 1)
    }

    fn u(&self, lead: usize) -> &ComplexMatrix {
        self.lead_unitaries[lead - 1].matrix()
    }
}

/// Result of sending one system state through the channel.
#[derive(Debug, Clone, Serialize)]
pub struct ChannelReport {
    pub rho_in: DensityMatrix,
    pub rho_out: DensityMatrix,
    pub demon_out: DensityMatrix,
    pub joint_out: DensityMatrix,
    #[serde(serialize_with = "serialize_complex")]
    pub gamma: Complex64,
    pub entropy_in: f64,
    pub entropy_out: f64,
    pub demon_entropy_in: f64,
    pub demon_entropy_out: f64,
    pub entropy_gain: f64,
    pub lower_bound: f64,
    /// `Φ(𝟙)` had an eigenvalue below [`LOG_FLOOR`].
    pub bound_clipped: bool,
    pub unital: bool,
    /// Demon preparation was not diagonal in the operational basis; the
    /// channel still acts but no purity exchange is promised.
    pub non_operational_demon: bool,
}

fn serialize_complex<S: serde::Serializer>(
    z: &Complex64,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

/// The 4×4 joint evolution of system and demon.
pub fn joint_unitary(config: &ChannelConfig) -> UnitaryMatrix {
    let mut m = ComplexMatrix::zeros(4);
    for out in 3..=4 {
        for inc in 1..=2 {
            let amp = config.s(out, inc);
            let block = (config.u(out) * config.u(inc)).scale(amp);
            let (r0, c0) = (2 * (out - 3), 2 * (inc - 1));
            for i in 0..2 {
                for j in 0..2 {
                    m.set(r0 + i, c0 + j, block.get(i, j));
                }
            }
        }
    }
    UnitaryMatrix::new(m).expect("unitary splitter and lead rotations give a unitary joint map")
}

/// `Û (ρ ⊗ r̂) Û†`.
pub fn evolve_joint(rho_in: &DensityMatrix, config: &ChannelConfig) -> Result<DensityMatrix> {
    if rho_in.dim() != 2 {
        return Err(Error::Shape("channel input must be a qubit state".into()));
    }
    rho_in
        .tensor(config.demon_state())?
        .evolve(&joint_unitary(config))
}

/// `Φ(ρ)` alone, without the entropy bookkeeping.
pub fn channel_map(rho_in: &DensityMatrix, config: &ChannelConfig) -> Result<DensityMatrix> {
    partial_trace(&evolve_joint(rho_in, config)?, Subsystem::First)
}

pub fn apply_channel(rho_in: &DensityMatrix, config: &ChannelConfig) -> Result<ChannelReport> {
    let joint_out = evolve_joint(rho_in, config)?;
    report_from_joint(rho_in, joint_out, config)
}

/// Assemble a report from a joint output produced elsewhere (e.g. a gate
/// sequence); `config` supplies `γ` and the bound.
pub(crate) fn report_from_joint(
    rho_in: &DensityMatrix,
    joint_out: DensityMatrix,
    config: &ChannelConfig,
) -> Result<ChannelReport> {
    let rho_out = partial_trace(&joint_out, Subsystem::First)?;
    let demon_out = partial_trace(&joint_out, Subsystem::Second)?;
    let gamma = gamma(config);
    let entropy_in = rho_in.entropy()?;
    let entropy_out = rho_out.entropy()?;
    let (lower_bound, bound_clipped) = gain_lower_bound(&rho_out, config)?;
    let d = config.demon_state().matrix();
    Ok(ChannelReport {
        rho_in: rho_in.clone(),
        demon_entropy_in: config.demon_state().entropy()?,
        demon_entropy_out: demon_out.entropy()?,
        rho_out,
        demon_out,
        joint_out,
        gamma,
        entropy_in,
        entropy_out,
        entropy_gain: entropy_out - entropy_in,
        lower_bound,
        bound_clipped,
        unital: gamma.norm() <= UNITAL_TOL,
        non_operational_demon: d.get(0, 1).norm() > UNITAL_TOL,
    })
}

/// `γ = s₃₁ s₄₁* Tr{ r̂ [û₁†û₄†û₃û₁ − û₂†û₄†û₃û₂] }`.
pub fn gamma(config: &ChannelConfig) -> Complex64 {
    let (u1, u2, u3, u4) = (config.u(1), config.u(2), config.u(3), config.u(4));
    let u4_dag = u4.adjoint();
    let term1 = &(&(&u1.adjoint() * &u4_dag) * u3) * u1;
    let term2 = &(&(&u2.adjoint() * &u4_dag) * u3) * u2;
    let bracket = &term1 - &term2;
    let tr = (config.demon_state().matrix() * &bracket).trace();
    config.s(3, 1) * config.s(4, 1).conj() * tr
}

/// `Φ(𝟙/2)`, computed by pushing the chaotic state through the channel.
pub fn channel_on_identity(config: &ChannelConfig) -> Result<DensityMatrix> {
    channel_map(&DensityMatrix::maximally_mixed(2), config)
}

/// `Φ(𝟙/2)` in the closed form `½[[1, γ], [γ*, 1]]`.
pub fn identity_image_closed_form(gamma: Complex64) -> Result<DensityMatrix> {
    DensityMatrix::new(ComplexMatrix::from_rows([
        [c64(0.5, 0.0), gamma * 0.5],
        [gamma.conj() * 0.5, c64(0.5, 0.0)],
    ]))
}

pub fn is_unital(config: &ChannelConfig) -> bool {
    gamma(config).norm() <= UNITAL_TOL
}

/// Entropy gain together with its lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyGain {
    pub gain: f64,
    pub bound: f64,
    pub bound_clipped: bool,
}

pub fn entropy_gain(rho_in: &DensityMatrix, config: &ChannelConfig) -> Result<EntropyGain> {
    let rho_out = channel_map(rho_in, config)?;
    let gain = rho_out.entropy()? - rho_in.entropy()?;
    let (bound, bound_clipped) = gain_lower_bound(&rho_out, config)?;
    Ok(EntropyGain {
        gain,
        bound,
        bound_clipped,
    })
}

/// `−Tr{Φ(ρ) ln Φ(𝟙)}` via the spectral decomposition of `Φ(𝟙)`.
fn gain_lower_bound(rho_out: &DensityMatrix, config: &ChannelConfig) -> Result<(f64, bool)> {
    let image = channel_on_identity(config)?.matrix().scale(c64(2.0, 0.0));
    let eig = eigh(&image)?;
    let clipped = eig.values.iter().any(|&v| v < LOG_FLOOR);
    let log = eig.map_values(|v| v.max(LOG_FLOOR).ln());
    Ok((-(rho_out.matrix() * &log).trace().re, clipped))
}

/// `I(A;B) = S(ρ_A) + S(ρ_B) − S(ρ_AB)`.
pub fn mutual_information(joint: &DensityMatrix) -> Result<f64> {
    let a = partial_trace(joint, Subsystem::First)?;
    let b = partial_trace(joint, Subsystem::Second)?;
    Ok(a.entropy()? + b.entropy()? - joint.entropy()?)
}

/// Demon preparation in the operational basis `{|↑⟩, |↓⟩}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DemonSpec {
    Up,
    Down,
    /// `p|↑⟩⟨↑| + (1−p)|↓⟩⟨↓|`.
    Mixture {
        p: f64,
    },
    /// `a|↑⟩ + b|↓⟩`, normalised on construction.
    Superposition {
        amplitudes: [f64; 2],
    },
}

impl DemonSpec {
    pub fn state(&self) -> Result<DensityMatrix> {
        match *self {
            DemonSpec::Up => Ok(PureState::basis(2, 0)?.density()),
            DemonSpec::Down => Ok(PureState::basis(2, 1)?.density()),
            DemonSpec::Mixture { p } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Parameter(format!(
                        "mixture weight {p} outside [0, 1]"
                    )));
                }
                DensityMatrix::diagonal(&[p, 1.0 - p])
            }
            DemonSpec::Superposition { amplitudes: [a, b] } => {
                Ok(PureState::from_real(&[a, b])?.density())
            }
        }
    }
}

/// System input preparation in the lead basis `{|⇑⟩, |⇓⟩}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InputSpec {
    Chaotic,
    Up,
    Down,
    Pure {
        amplitudes: [f64; 2],
    },
    /// `p|⇑⟩⟨⇑| + (1−p)|⇓⟩⟨⇓|`.
    Mixed {
        p: f64,
    },
}

impl InputSpec {
    pub fn state(&self) -> Result<DensityMatrix> {
        match *self {
            InputSpec::Chaotic => Ok(DensityMatrix::maximally_mixed(2)),
            InputSpec::Up => Ok(PureState::basis(2, 0)?.density()),
            InputSpec::Down => Ok(PureState::basis(2, 1)?.density()),
            InputSpec::Pure { amplitudes: [a, b] } => Ok(PureState::from_real(&[a, b])?.density()),
            InputSpec::Mixed { p } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Parameter(format!("input weight {p} outside [0, 1]")));
                }
                DensityMatrix::diagonal(&[p, 1.0 - p])
            }
        }
    }
}

/// JSON description of a spin-demon channel:
/// `{theta, eta, phi, alpha, beta, demon: {kind, ...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub theta: f64,
    pub eta: f64,
    pub phi: f64,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
    pub demon: DemonSpec,
}

impl ChannelSpec {
    pub fn params(&self) -> SpinDemonParams {
        SpinDemonParams {
            theta: self.theta,
            eta: self.eta,
            phi: self.phi,
            alpha: self.alpha,
            beta_phase: self.beta,
        }
    }

    pub fn to_config(&self) -> Result<ChannelConfig> {
        demon_spin::channel_config(&self.params(), self.demon.state()?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parameter(format!("channel config: {e}")))
    }
}

/// `ρ_A ⊗ ρ_B` check helper used by callers that want to know whether the
/// joint output factorizes.
pub fn is_product_state(joint: &DensityMatrix, tol: f64) -> Result<bool> {
    let a = partial_trace(joint, Subsystem::First)?;
    let b = partial_trace(joint, Subsystem::Second)?;
    Ok(tensor(a.matrix(), b.matrix())?.approx_eq(joint.matrix(), tol))
}
