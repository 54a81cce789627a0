//! Gate-level view of the purification: CNOTs, the Hadamard-type gate `H̄`,
//! the quarter rotation `u_{1/4}`, the composite circuits `U_D`, `V_D`,
//! SWAP, and the double-dot protocol.
//!
//! Two-qubit matrices use the joint basis `{⇑↑, ⇑↓, ⇓↑, ⇓↓}`, system first.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use serde::{Deserialize, Serialize};

use crate::channel::{self, ChannelReport};
use crate::demon_spin::{self, SpinDemonParams};
use crate::error::{Error, Result};
use crate::qmatrix::{
    c64, partial_trace, phase, tensor, ComplexMatrix, DensityMatrix, PureState, Subsystem,
    UnitaryMatrix, DEFAULT_TOL,
};

/// Gate names. CNOT targets are named by the qubit they flip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GateLabel {
    /// Flip the demon when the system is `⇑`.
    CnotDemonControlUp,
    /// Flip the demon when the system is `⇓`.
    CnotDemonControlDown,
    /// Flip the system when the demon is `↓`.
    CnotSystemControlDemonDown,
    HbarSystem,
    HbarDemon,
    U14Demon(f64),
    U14System(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gate {
    pub label: GateLabel,
    pub matrix: UnitaryMatrix,
}

impl Gate {
    pub fn new(label: GateLabel) -> Self {
        let matrix = match label {
            GateLabel::CnotDemonControlUp => cnot_system_up(),
            GateLabel::CnotDemonControlDown => cnot_system_down(),
            GateLabel::CnotSystemControlDemonDown => cnot_demon_down(),
            GateLabel::HbarSystem => on_system(&hbar()),
            GateLabel::HbarDemon => on_demon(&hbar()),
            GateLabel::U14Demon(p) => on_demon(&u14(p)),
            GateLabel::U14System(p) => on_system(&u14(p)),
        };
        Gate { label, matrix }
    }
}

fn real2(entries: [f64; 4]) -> ComplexMatrix {
    ComplexMatrix::from_real(2, &entries).expect("2x2")
}

fn real4(entries: [f64; 16]) -> ComplexMatrix {
    ComplexMatrix::from_real(4, &entries).expect("4x4")
}

fn unitary(m: ComplexMatrix) -> UnitaryMatrix {
    UnitaryMatrix::new(m).expect("circuit building block is unitary")
}

/// `u ⊗ 𝟙`.
pub fn on_system(u: &UnitaryMatrix) -> UnitaryMatrix {
    u.tensor(&UnitaryMatrix::identity(2)).expect("2x2 factors")
}

/// `𝟙 ⊗ u`.
pub fn on_demon(u: &UnitaryMatrix) -> UnitaryMatrix {
    UnitaryMatrix::identity(2).tensor(u).expect("2x2 factors")
}

/// `H̄ = σ_z H`: `|↑⟩ → (|↑⟩ − |↓⟩)/√2`, `|↓⟩ → (|↑⟩ + |↓⟩)/√2`.
pub fn hbar() -> UnitaryMatrix {
    unitary(real2([1.0, 1.0, -1.0, 1.0]).scale(c64(FRAC_1_SQRT_2, 0.0)))
}

/// Quarter-period tunnelling rotation with tunnelling phase `phase_angle`.
pub fn u14(phase_angle: f64) -> UnitaryMatrix {
    let k = c64(FRAC_1_SQRT_2, 0.0);
    let i = c64(0.0, 1.0);
    unitary(ComplexMatrix::from_rows([
        [k, i * phase(phase_angle) * k],
        [i * phase(-phase_angle) * k, k],
    ]))
}

/// Flip the demon when the system is `⇑`: `blockdiag(σ_x, 𝟙)`.
pub fn cnot_system_up() -> UnitaryMatrix {
    unitary(real4([
        0.0, 1.0, 0.0, 0.0, //
        1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 1.0, 0.0, //
        0.0, 0.0, 0.0, 1.0,
    ]))
}

/// Flip the demon when the system is `⇓`: `blockdiag(𝟙, σ_x)`.
pub fn cnot_system_down() -> UnitaryMatrix {
    unitary(real4([
        1.0, 0.0, 0.0, 0.0, //
        0.0, 1.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, 1.0, 0.0,
    ]))
}

/// Flip the system when the demon is `↓`.
pub fn cnot_demon_down() -> UnitaryMatrix {
    unitary(real4([
        1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, 1.0, 0.0, //
        0.0, 1.0, 0.0, 0.0,
    ]))
}

/// Every single gate for tunnelling phase `phase_angle`.
pub fn build_gates(phase_angle: f64) -> Vec<Gate> {
    [
        GateLabel::CnotDemonControlUp,
        GateLabel::CnotDemonControlDown,
        GateLabel::CnotSystemControlDemonDown,
        GateLabel::HbarSystem,
        GateLabel::HbarDemon,
        GateLabel::U14Demon(phase_angle),
        GateLabel::U14System(phase_angle),
    ]
    .into_iter()
    .map(Gate::new)
    .collect()
}

/// `CNOT (H̄ ⊗ H̄) CNOT`.
pub fn build_ud() -> UnitaryMatrix {
    let c = cnot_system_up();
    let hh = hbar().tensor(&hbar()).expect("2x2 factors");
    UnitaryMatrix::product(&[&c, &hh, &c]).expect("4x4 factors")
}

/// `(H̄⁻¹ ⊗ H̄) U_D`: the partial SWAP.
pub fn build_vd() -> UnitaryMatrix {
    let local = hbar().adjoint().tensor(&hbar()).expect("2x2 factors");
    UnitaryMatrix::product(&[&local, &build_ud()]).expect("4x4 factors")
}

/// `CNOT^{s⇓} V_D`.
pub fn build_swap() -> UnitaryMatrix {
    UnitaryMatrix::product(&[&cnot_system_down(), &build_vd()]).expect("4x4 factors")
}

/// Closed-form `U_D`.
pub fn ud_reference() -> ComplexMatrix {
    real4([
        1.0, -1.0, -1.0, 1.0, //
        1.0, 1.0, 1.0, 1.0, //
        -1.0, -1.0, 1.0, 1.0, //
        -1.0, 1.0, -1.0, 1.0,
    ])
    .scale(c64(0.5, 0.0))
}

/// Closed-form `V_D`: a permutation.
pub fn vd_reference() -> ComplexMatrix {
    real4([
        1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 1.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 1.0, 0.0, 0.0,
    ])
}

pub fn swap_reference() -> ComplexMatrix {
    real4([
        1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 1.0, 0.0, //
        0.0, 1.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0,
    ])
}

/// Two-CNOT partial SWAP with exchanged controller: first flip the demon on
/// `⇓`, then flip the system on `↓`.
pub fn minimal_pswap() -> UnitaryMatrix {
    UnitaryMatrix::product(&[&cnot_demon_down(), &cnot_system_down()]).expect("4x4 factors")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PswapComparison {
    pub max_abs_diff: f64,
    pub exact: bool,
}

/// Compare [`minimal_pswap`] against [`build_vd`] entrywise.
pub fn compare_minimal_pswap() -> PswapComparison {
    let diff = minimal_pswap().matrix().max_abs_diff(build_vd().matrix());
    PswapComparison {
        max_abs_diff: diff,
        exact: diff <= DEFAULT_TOL,
    }
}

/// `true` if `V_D` fails to hand the demon state to the system as a product
/// for at least one probe system state.
pub fn pswap_counterexample(demon: &PureState) -> Result<bool> {
    if demon.dim() != 2 {
        return Err(Error::Shape("demon must be a qubit".into()));
    }
    let probes: [[f64; 4]; 5] = [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [1.0, 0.0, 1.0, 0.0],
        [1.0, 0.0, 0.0, 1.0],
        [0.6, 0.0, -0.3, 0.5],
    ];
    let vd = build_vd();
    let target = demon.density();
    for p in probes {
        let sys = PureState::normalized(vec![c64(p[0], p[1]), c64(p[2], p[3])])?;
        let out = vd.apply(&sys.tensor(demon)?)?.density();
        let sys_out = partial_trace(&out, Subsystem::First)?;
        let product = (1.0 - sys_out.purity()).abs() <= 1e-12;
        if !product || !sys_out.approx_eq(&target, 1e-12) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Frame in which the double-dot state is supplied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DotBasis {
    /// Matrix elements in the localized `{|↑_z⟩, |↓_z⟩}` basis.
    Physical,
    /// Matrix elements in the operational `{|↑⟩, |↓⟩}` basis, i.e. the
    /// localized state before the preparation rotation.
    Operational,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleDotConfig {
    /// Phase of the tunnelling amplitude.
    pub tunneling_phase: f64,
    /// Phase picked up by the dot during one interaction.
    pub interaction_phase: f64,
    pub theta: f64,
    pub eta: f64,
    /// Apply the closing `u_{1/4}†` to the dot. Without it the system output
    /// is unchanged and the dot ends rotated by `u_{1/4}`.
    pub final_rotation: bool,
}

impl Default for DoubleDotConfig {
    fn default() -> Self {
        DoubleDotConfig {
            tunneling_phase: -FRAC_PI_2,
            interaction_phase: 0.0,
            theta: 0.0,
            eta: std::f64::consts::PI,
            final_rotation: false,
        }
    }
}

impl DoubleDotConfig {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.tunneling_phase,
            self.interaction_phase,
            self.theta,
            self.eta,
        ];
        if all.iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(Error::Parameter("double-dot phases must be finite".into()))
        }
    }

    /// Spin-demon parameters realizing the same channel.
    pub fn equivalent_spin(&self) -> SpinDemonParams {
        let (phi, tun) = (self.interaction_phase, self.tunneling_phase);
        SpinDemonParams {
            theta: self.theta,
            eta: self.eta,
            phi,
            alpha: phi - tun - FRAC_PI_2,
            beta_phase: phi + tun + FRAC_PI_2,
        }
    }
}

/// Electron-dot interaction in the physical frame: the dot picks up
/// `diag(e^{iφ}, −e^{iφ})` when the electron is in `⇑`.
pub fn interaction(interaction_phase: f64) -> UnitaryMatrix {
    let zero = c64(0.0, 0.0);
    let one = c64(1.0, 0.0);
    let p = phase(interaction_phase);
    unitary(ComplexMatrix::from_rows([
        [p, zero, zero, zero],
        [zero, -p, zero, zero],
        [zero, zero, one, zero],
        [zero, zero, zero, one],
    ]))
}

/// Dot part of [`interaction`] on the `⇑` branch, rewritten in the
/// operational basis.
pub fn interaction_operational(interaction_phase: f64, tunneling_phase: f64) -> UnitaryMatrix {
    let o = u14(tunneling_phase);
    let zero = c64(0.0, 0.0);
    let p = phase(interaction_phase);
    let phys = ComplexMatrix::from_rows([[p, zero], [zero, -p]]);
    unitary(phys.conjugate_by(&o.adjoint().matrix().clone()))
}

/// Full protocol as a physical-frame 4×4 unitary.
pub fn double_dot_unitary(config: &DoubleDotConfig) -> Result<UnitaryMatrix> {
    config.validate()?;
    let int = interaction(config.interaction_phase);
    let rot = u14(config.tunneling_phase);
    let scatter = demon_spin::beam_splitter(config.theta, config.eta).tensor(&rot)?;
    let core = UnitaryMatrix::product(&[&int, &scatter, &int])?;
    if config.final_rotation {
        UnitaryMatrix::product(&[&on_demon(&rot.adjoint()), &core])
    } else {
        Ok(core)
    }
}

/// Same protocol with the dot written in the operational basis.
pub fn double_dot_unitary_operational(config: &DoubleDotConfig) -> Result<UnitaryMatrix> {
    let o = on_demon(&u14(config.tunneling_phase));
    UnitaryMatrix::product(&[&o.adjoint(), &double_dot_unitary(config)?, &o])
}

/// Run the four-step protocol. The report's states are in the operational
/// basis; `γ` and the bound come from the equivalent spin-demon channel.
pub fn double_dot_protocol(
    rho_in: &DensityMatrix,
    dot_state: &DensityMatrix,
    basis: DotBasis,
    config: &DoubleDotConfig,
) -> Result<ChannelReport> {
    config.validate()?;
    if rho_in.dim() != 2 || dot_state.dim() != 2 {
        return Err(Error::Shape("system and dot must be qubits".into()));
    }
    let rot = u14(config.tunneling_phase);
    let (physical, operational) = match basis {
        DotBasis::Physical => (dot_state.clone(), dot_state.evolve(&rot.adjoint())?),
        DotBasis::Operational => (dot_state.evolve(&rot)?, dot_state.clone()),
    };
    let joint_phys = rho_in
        .tensor(&physical)?
        .evolve(&double_dot_unitary(config)?)?;
    let to_op = on_demon(&rot).adjoint();
    let joint_op = joint_phys.evolve(&to_op)?;
    let spin = channel::ChannelConfig::new(
        demon_spin::beam_splitter(config.theta, config.eta),
        spin_leads(&config.equivalent_spin()),
        operational,
    )?;
    channel::report_from_joint(rho_in, joint_op, &spin)
}

fn spin_leads(params: &SpinDemonParams) -> [UnitaryMatrix; 4] {
    let (u1, u3) = demon_spin::demon_unitaries(params);
    let id = UnitaryMatrix::identity(2);
    [u1, id.clone(), u3, id]
}

/// `true` when every entry is real within `tol`.
pub fn is_real_unitary(u: &UnitaryMatrix, tol: f64) -> bool {
    u.matrix().is_real(tol)
}

/// `U (𝟙 ⊗ |k⟩⟨k|)`: the gate restricted to demon basis state `k`.
pub fn demon_sector(u: &UnitaryMatrix, k: usize) -> Result<ComplexMatrix> {
    let mut proj = ComplexMatrix::zeros(2);
    proj.set(k, k, c64(1.0, 0.0));
    Ok(u.matrix() * &tensor(&ComplexMatrix::identity(2), &proj)?)
}
