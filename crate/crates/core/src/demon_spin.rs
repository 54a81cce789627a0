//! Spin-demon realization of the purifying channel.
//!
//! The demon spin is rotated by `û₁` when the electron passes incoming lead 1
//! and by `û₃` in outgoing lead 3; leads 2 and 4 leave it alone. With
//!
//! ```text
//! û₁|↑⟩ = e^{iα}|↓⟩,   û₁|↓⟩ = e^{iβ}|↑⟩
//! û₃|↑⟩ = −e^{iφ}|↑⟩,  û₃|↓⟩ = e^{iφ}|↓⟩
//! ```
//!
//! and a symmetric splitter, a demon prepared in `|↑⟩` or `|↓⟩` (or a
//! mixture of the two) swaps its purity with the electron. The operational
//! basis `{|↑⟩, |↓⟩}` is the computational basis of the demon qubit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{self, ChannelConfig, ChannelReport};
use crate::error::{Error, Result};
use crate::qmatrix::{c64, phase, ComplexMatrix, DensityMatrix, PureState, UnitaryMatrix};

/// Angles in radians. `beta_phase` is the second free phase of `û₁`
/// (not an inverse temperature).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SpinDemonParams {
    pub theta: f64,
    pub eta: f64,
    pub phi: f64,
    pub alpha: f64,
    pub beta_phase: f64,
}

impl SpinDemonParams {
    pub fn validate(&self) -> Result<()> {
        let all = [self.theta, self.eta, self.phi, self.alpha, self.beta_phase];
        if all.iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(Error::Parameter("spin-demon angles must be finite".into()))
        }
    }
}

/// `ŝ(θ, η) = (1/√2) [[e^{iθ}, −e^{−iη}], [e^{iη}, e^{−iθ}]]`, rows indexed
/// by outgoing leads (3, 4), columns by incoming leads (1, 2).
pub fn beam_splitter(theta: f64, eta: f64) -> UnitaryMatrix {
    let k = std::f64::consts::FRAC_1_SQRT_2;
    let m = ComplexMatrix::from_rows([
        [phase(theta) * k, -phase(-eta) * k],
        [phase(eta) * k, phase(-theta) * k],
    ]);
    UnitaryMatrix::new(m).expect("symmetric splitter is unitary")
}

/// The two demon rotations `(û₁, û₃)`.
pub fn demon_unitaries(params: &SpinDemonParams) -> (UnitaryMatrix, UnitaryMatrix) {
    let zero = c64(0.0, 0.0);
    // Columns are images of |↑⟩ and |↓⟩.
    let u1 = ComplexMatrix::from_rows([
        [zero, phase(params.beta_phase)],
        [phase(params.alpha), zero],
    ]);
    let u3 = ComplexMatrix::from_rows([[-phase(params.phi), zero], [zero, phase(params.phi)]]);
    (
        UnitaryMatrix::new(u1).expect("u1 is a phased flip"),
        UnitaryMatrix::new(u3).expect("u3 is diagonal with unit phases"),
    )
}

/// Channel configuration with `û₂ = û₄ = 𝟙`.
pub fn channel_config(params: &SpinDemonParams, demon: DensityMatrix) -> Result<ChannelConfig> {
    params.validate()?;
    let (u1, u3) = demon_unitaries(params);
    let id = UnitaryMatrix::identity(2);
    ChannelConfig::new(
        beam_splitter(params.theta, params.eta),
        [u1, id.clone(), u3, id],
        demon,
    )
}

/// Scatter `rho_in` with the given demon preparation. Non-diagonal demon
/// states are accepted and flagged in the report.
pub fn scatter(
    rho_in: &DensityMatrix,
    demon: &DensityMatrix,
    params: &SpinDemonParams,
) -> Result<ChannelReport> {
    let config = channel_config(params, demon.clone())?;
    channel::apply_channel(rho_in, &config)
}

/// `|⇑_xy⟩ = (e^{i(φ+θ)}|⇑⟩ + e^{iη}|⇓⟩)/√2` and `|⇓_xy⟩` with the minus sign.
pub fn xy_states(theta: f64, eta: f64, phi: f64) -> (PureState, PureState) {
    let k = std::f64::consts::FRAC_1_SQRT_2;
    let a = phase(phi + theta) * k;
    let b = phase(eta) * k;
    (
        PureState::new(vec![a, b]).expect("unit norm"),
        PureState::new(vec![a, -b]).expect("unit norm"),
    )
}

/// Closed-form joint output for a demon `p_up|↑⟩⟨↑| + (1−p_up)|↓⟩⟨↓|`:
/// `p₊ |⇑_xy⟩⟨⇑_xy| ⊗ r̂₊ + p₋ |⇓_xy⟩⟨⇓_xy| ⊗ r̂₋`, with `r̂±` assembled
/// from the eigen-decomposition of `rho_in`.
pub fn product_form(
    rho_in: &DensityMatrix,
    p_up: f64,
    params: &SpinDemonParams,
) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p_up) {
        return Err(Error::Parameter(format!(
            "demon weight {p_up} outside [0, 1]"
        )));
    }
    let eig = crate::qmatrix::eigh(rho_in.matrix())?;
    let carry = phase(-(params.eta + params.theta));
    let mut r_plus = ComplexMatrix::zeros(2);
    let mut r_minus = ComplexMatrix::zeros(2);
    for (j, &p) in eig.values.iter().enumerate() {
        let a = eig.vectors.get(0, j);
        let b = eig.vectors.get(1, j);
        let psi_plus = [b * carry, a * phase(params.alpha)];
        let psi_minus = [a * phase(params.beta_phase), b * carry];
        let w = c64(p.max(0.0), 0.0);
        r_plus = &r_plus + &ComplexMatrix::outer(&psi_plus, &psi_plus)?.scale(w);
        r_minus = &r_minus + &ComplexMatrix::outer(&psi_minus, &psi_minus)?.scale(w);
    }
    let (up_xy, down_xy) = xy_states(params.theta, params.eta, params.phi);
    let sys_plus = up_xy.density();
    let sys_minus = down_xy.density();
    let joint = &crate::qmatrix::tensor(sys_plus.matrix(), &r_plus)?.scale(c64(p_up, 0.0))
        + &crate::qmatrix::tensor(sys_minus.matrix(), &r_minus)?.scale(c64(1.0 - p_up, 0.0));
    DensityMatrix::new(joint)
}

/// Demon state after a pure input `a|⇑⟩ + b|⇓⟩` meets a demon in `|↑⟩`:
/// `a e^{iα}|↓⟩ + b e^{−i(η+θ)}|↑⟩`.
pub fn demon_after_pure_input(
    a: Complex64,
    b: Complex64,
    params: &SpinDemonParams,
) -> Result<PureState> {
    PureState::normalized(vec![
        b * phase(-(params.eta + params.theta)),
        a * phase(params.alpha),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmatrix::{partial_trace, tensor_vec, Subsystem, DEFAULT_TOL};
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};

    #[test]
    fn hadamard_type_splitter() {
        let s = beam_splitter(0.0, PI);
        let hbar = ComplexMatrix::from_real(2, &[1.0, 1.0, -1.0, 1.0])
            .unwrap()
            .scale(c64(FRAC_1_SQRT_2, 0.0));
        assert!(s.matrix().approx_eq(&hbar, DEFAULT_TOL));
    }

    #[test]
    fn splitter_is_symmetric_for_any_angles() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let s = beam_splitter(random::angle(&mut rng), random::angle(&mut rng));
            assert!(s.matrix().unitarity_defect() < DEFAULT_TOL);
            let prod = s.matrix().get(0, 0) * s.matrix().get(1, 0).conj();
            assert!((prod.norm() - 0.5).abs() < DEFAULT_TOL);
        }
    }

    #[test]
    fn canonical_demon_rotations() {
        let (u1, u3) = demon_unitaries(&SpinDemonParams::default());
        assert!(u1.matrix().approx_eq(&crate::qmatrix::pauli::x(), 0.0));
        let minus_z = crate::qmatrix::pauli::z().scale(c64(-1.0, 0.0));
        assert!(u3.matrix().approx_eq(&minus_z, 0.0));
        let comm = u1.matrix().commutator(u3.matrix());
        // Operator 2-norm of [σx, −σz] = 2iσy is 2.
        assert!((comm.frobenius_norm() / 2f64.sqrt() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rotations_satisfy_defining_actions() {
        let p = SpinDemonParams {
            theta: 0.0,
            eta: 0.0,
            phi: 0.7,
            alpha: 1.3,
            beta_phase: -0.4,
        };
        let (u1, u3) = demon_unitaries(&p);
        let up = [c64(1.0, 0.0), c64(0.0, 0.0)];
        let down = [c64(0.0, 0.0), c64(1.0, 0.0)];
        let u1_up = u1.matrix().apply(&up);
        assert!((u1_up[1] - phase(1.3)).norm() < 1e-15 && u1_up[0].norm() < 1e-15);
        let u1_down = u1.matrix().apply(&down);
        assert!((u1_down[0] - phase(-0.4)).norm() < 1e-15);
        let u3_up = u3.matrix().apply(&up);
        assert!((u3_up[0] + phase(0.7)).norm() < 1e-15);
        let u3_down = u3.matrix().apply(&down);
        assert!((u3_down[1] - phase(0.7)).norm() < 1e-15);
        assert!(u1.matrix().commutator(u3.matrix()).frobenius_norm() > 1.0);
    }

    #[test]
    fn xy_states_orthonormal() {
        let (u, d) = xy_states(0.3, -1.2, 2.0);
        assert!(u.inner(&d).norm() < 1e-15);
        let (u0, d0) = xy_states(0.0, 0.0, 0.0);
        let plus = PureState::from_real(&[1.0, 1.0]).unwrap();
        let minus = PureState::from_real(&[1.0, -1.0]).unwrap();
        assert!((u0.inner(&plus).norm() - 1.0).abs() < 1e-15);
        assert!((d0.inner(&minus).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn chaotic_input_pure_demon_becomes_product() {
        let p = SpinDemonParams {
            theta: 0.4,
            eta: 1.0,
            phi: -0.3,
            alpha: 0.2,
            beta_phase: 0.9,
        };
        let up = PureState::basis(2, 0).unwrap().density();
        let r = scatter(&DensityMatrix::maximally_mixed(2), &up, &p).unwrap();
        let (up_xy, _) = xy_states(p.theta, p.eta, p.phi);
        let expected = up_xy
            .density()
            .tensor(&DensityMatrix::maximally_mixed(2))
            .unwrap();
        assert!(r.joint_out.approx_eq(&expected, 1e-14));
        assert!((r.entropy_gain + LN_2).abs() < 1e-12);
    }

    #[test]
    fn pure_input_matches_swap_rule() {
        let p = SpinDemonParams {
            theta: 0.9,
            eta: -0.5,
            phi: 1.7,
            alpha: 0.6,
            beta_phase: 2.1,
        };
        let a = c64(0.6, 0.1);
        let b = c64(-0.2, 0.3);
        let phi0 = PureState::normalized(vec![a, b]).unwrap();
        let (a, b) = (phi0.amplitudes()[0], phi0.amplitudes()[1]);
        let cfg = channel_config(&p, PureState::basis(2, 0).unwrap().density()).unwrap();
        let u = channel::joint_unitary(&cfg);
        let input = phi0.tensor(&PureState::basis(2, 0).unwrap()).unwrap();
        let out = u.apply(&input).unwrap();
        let (up_xy, _) = xy_states(p.theta, p.eta, p.phi);
        let demon = demon_after_pure_input(a, b, &p).unwrap();
        let expected = PureState::new(tensor_vec(up_xy.amplitudes(), demon.amplitudes())).unwrap();
        assert!((out.inner(&expected).norm() - 1.0).abs() < 1e-14);
        // Not only up to a global phase: the printed form carries no extra phase.
        assert!((out.inner(&expected) - c64(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn mixed_input_matches_product_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let p = SpinDemonParams {
                theta: random::angle(&mut rng),
                eta: random::angle(&mut rng),
                phi: random::angle(&mut rng),
                alpha: random::angle(&mut rng),
                beta_phase: random::angle(&mut rng),
            };
            let rho = random::density_matrix(&mut rng, 2);
            let p_up: f64 = rand::Rng::gen(&mut rng);
            let demon = DensityMatrix::diagonal(&[p_up, 1.0 - p_up]).unwrap();
            let r = scatter(&rho, &demon, &p).unwrap();
            let closed = product_form(&rho, p_up, &p).unwrap();
            assert!(r.joint_out.approx_eq(&closed, 1e-12));
        }
    }

    #[test]
    fn pure_demon_absorbs_entropy() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = SpinDemonParams::default();
        for _ in 0..50 {
            let rho = random::density_matrix(&mut rng, 2);
            let s0 = rho.entropy().unwrap();
            let r = scatter(&rho, &PureState::basis(2, 1).unwrap().density(), &p).unwrap();
            assert!(r.entropy_out.abs() < 1e-10);
            assert!((r.demon_entropy_out - s0).abs() < 1e-10);
            let demon = partial_trace(&r.joint_out, Subsystem::Second).unwrap();
            assert!(demon.approx_eq(&r.demon_out, 0.0));
        }
    }

    #[test]
    fn non_finite_params_rejected() {
        let p = SpinDemonParams {
            theta: f64::NAN,
            ..Default::default()
        };
        assert!(channel_config(&p, DensityMatrix::maximally_mixed(2)).is_err());
    }
}
