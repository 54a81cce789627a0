//! Two-cycle engine: a pair of thermal working qubits (wits) exchanges its
//! entropy with a pair of demon qubits (dits) through a partial SWAP, work
//! is extracted from the now-purified wits, and the dits are re-purified
//! against a cold demon reservoir.
//!
//! Wit basis: `{|e⟩, |g⟩}` with `|e⟩` first, energies `Δ_w` and `0`.
//! Dit basis: operational `{|↑⟩, |↓⟩}`, degenerate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::{cnot_system_up, hbar, on_demon, on_system, u14};
use crate::error::{Error, Result};
use crate::qmatrix::{partial_trace, DensityMatrix, Subsystem, UnitaryMatrix};
use crate::roots;

/// Largest `βΔ_w` used; beyond this `e^{−βΔ}` underflows.
pub const MAX_BETA_DELTA: f64 = 745.0;

/// Relative gap kept between the impurity search interval and `p_e`.
pub const EPS_MARGIN: f64 = 1e-12;

/// Lower end of the impurity search; cold demons push the optimum far
/// below any fixed absolute margin.
pub const EPS_FLOOR: f64 = f64::MIN_POSITIVE;

pub const ROOT_TOL: f64 = 1e-12;

/// Cells in the sign-change scan for the efficiency condition.
pub const ETA_SCAN_CELLS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineParams {
    /// Inverse temperature of the working reservoir.
    pub beta: f64,
    /// Inverse temperature of the demon reservoir.
    pub beta_d: f64,
    pub delta_w: f64,
    /// Dit impurity.
    pub epsilon: f64,
}

impl EngineParams {
    pub fn new(beta: f64, beta_d: f64, delta_w: f64, epsilon: f64) -> Result<Self> {
        let p = EngineParams {
            beta,
            beta_d,
            delta_w,
            epsilon,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta_w > 0.0 && self.delta_w.is_finite()) {
            return Err(Error::Parameter(format!(
                "level spacing must be positive, got {}",
                self.delta_w
            )));
        }
        if !(self.beta >= 0.0) || self.beta.is_nan() {
            return Err(Error::Parameter(format!(
                "beta must be non-negative, got {}",
                self.beta
            )));
        }
        if !(self.beta_d > 0.0 && self.beta_d.is_finite()) {
            return Err(Error::Parameter(format!(
                "beta_d must be positive, got {}",
                self.beta_d
            )));
        }
        if !(0.0..=0.5).contains(&self.epsilon) {
            return Err(Error::Parameter(format!(
                "dit impurity {} outside [0, 1/2]",
                self.epsilon
            )));
        }
        Ok(())
    }

    pub fn beta_delta(&self) -> f64 {
        (self.beta * self.delta_w).min(MAX_BETA_DELTA)
    }

    pub fn beta_d_delta(&self) -> f64 {
        self.beta_d * self.delta_w
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThermalWit {
    pub p_g: f64,
    pub p_e: f64,
    pub state: DensityMatrix,
}

/// Gibbs state of a wit at inverse temperature `beta`.
pub fn thermal_wit(beta: f64, delta_w: f64) -> Result<ThermalWit> {
    if !(delta_w > 0.0) {
        return Err(Error::Parameter(format!(
            "level spacing must be positive, got {delta_w}"
        )));
    }
    if !(beta >= 0.0) {
        return Err(Error::Parameter(format!(
            "beta must be non-negative, got {beta}"
        )));
    }
    let p_e = excited_population((beta * delta_w).min(MAX_BETA_DELTA));
    let p_g = 1.0 - p_e;
    Ok(ThermalWit {
        p_g,
        p_e,
        state: DensityMatrix::diagonal(&[p_e, p_g])?,
    })
}

/// `e^{−x}/(1 + e^{−x})`, exactly `½` at `x = 0` and `0` from the cap on.
pub fn excited_population(beta_delta: f64) -> f64 {
    if beta_delta >= MAX_BETA_DELTA {
        return 0.0;
    }
    let w = (-beta_delta).exp();
    w / (1.0 + w)
}

/// `βΔ_w` for a given excited population.
pub fn beta_delta_from_population(p_e: f64) -> f64 {
    ((1.0 - p_e) / p_e).ln()
}

/// `H[x] = −x ln x − (1−x) ln(1−x)` in nats.
pub fn binary_entropy(x: f64) -> f64 {
    // ln_1p keeps the (1−y) ln(1−y) ≈ −y term exact for tiny y.
    let y = x.min(1.0 - x);
    if y <= 0.0 {
        0.0
    } else {
        -y * y.ln() - (1.0 - y) * (-y).ln_1p()
    }
}

/// `H′[x] = ln((1−x)/x)`.
pub fn binary_entropy_derivative(x: f64) -> f64 {
    (-x).ln_1p() - x.ln()
}

/// `p_e + ε(1 − 2p_e)`: larger eigenvalue weight of a dit after the swap.
fn mixed_population(p_e: f64, eps: f64) -> f64 {
    p_e + eps * (1.0 - 2.0 * p_e)
}

/// Average energy handed to the wit by one field stage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldStage {
    pub stage: String,
    pub pair: String,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleReport {
    pub params: EngineParams,
    pub p_e: f64,
    pub p_g: f64,
    /// Heat absorbed by both wits on rethermalizing.
    pub heat: f64,
    /// Net field work spent on the partial swaps.
    pub w_minus: f64,
    /// Work extracted from the excited wit.
    pub w_plus: f64,
    pub w_out: f64,
    /// Cost of re-purifying both dits at the demon temperature.
    pub w_in: f64,
    /// Entropy the dits must shed, `δS`.
    pub dit_entropy_change: f64,
    pub net_work: f64,
    /// `W_out / Q`; `None` when no heat is absorbed.
    pub eta_local: Option<f64>,
    /// `net_work / Q`; `None` when no heat is absorbed.
    pub eta_2cy: Option<f64>,
    pub eta_carnot: f64,
    /// Sum of the von Neumann entropies of both dits after the swap.
    pub dit_out_entropy: f64,
    pub field_ledger: Vec<FieldStage>,
    pub field_net: f64,
    /// Largest disagreement between the density-matrix and closed-form
    /// energies; only set by [`run_cycle`].
    pub route_deviation: Option<f64>,
}

/// Closed-form cycle bookkeeping.
pub fn closed_form_cycle(params: &EngineParams) -> Result<CycleReport> {
    params.validate()?;
    let d = params.delta_w;
    let eps = params.epsilon;
    let wit = thermal_wit(params.beta, d)?;
    let (p_e, p_g) = (wit.p_e, wit.p_g);
    let x = mixed_population(p_e, eps);

    let heat = 2.0 * d * (p_e - eps);
    let w_minus = d * (1.0 - 2.0 * p_e);
    let w_plus = (1.0 - 2.0 * eps) * d;
    let w_out = heat;
    let ds = 2.0 * (binary_entropy(x) - binary_entropy(eps));
    let w_in = ds / params.beta_d;
    let net_work =
        2.0 * d * (p_e - eps - (binary_entropy(x) - binary_entropy(eps)) / params.beta_d_delta());
    let (eta_local, eta_2cy) = if heat > 0.0 {
        (
            Some(w_out / heat),
            Some(efficiency(p_e, eps, params.beta_d_delta())),
        )
    } else {
        (None, None)
    };

    let ledger = vec![
        FieldStage {
            stage: "prepare".into(),
            pair: "up".into(),
            energy: d * (0.5 - p_e),
        },
        FieldStage {
            stage: "prepare".into(),
            pair: "down".into(),
            energy: d * (0.5 - p_e),
        },
        FieldStage {
            stage: "close".into(),
            pair: "up".into(),
            energy: eps * d - 0.5 * d,
        },
        FieldStage {
            stage: "close".into(),
            pair: "down".into(),
            energy: (1.0 - eps) * d - 0.5 * d,
        },
    ];
    let field_net = ledger.iter().map(|s| s.energy).sum();

    Ok(CycleReport {
        params: *params,
        p_e,
        p_g,
        heat,
        w_minus,
        w_plus,
        w_out,
        w_in,
        dit_entropy_change: ds,
        net_work,
        eta_local,
        eta_2cy,
        eta_carnot: 1.0 - params.beta / params.beta_d,
        dit_out_entropy: 2.0 * binary_entropy(x),
        field_ledger: ledger,
        field_net,
        route_deviation: None,
    })
}

/// `1 − (H[x] − H[ε]) / (β_dΔ_w (p_e − ε))`.
pub fn efficiency(p_e: f64, eps: f64, beta_d_delta: f64) -> f64 {
    let x = mixed_population(p_e, eps);
    1.0 - (binary_entropy(x) - binary_entropy(eps)) / (beta_d_delta * (p_e - eps))
}

/// Net work per cycle in units of `Δ_w`.
pub fn net_work_over_delta(p_e: f64, eps: f64, beta_d_delta: f64) -> f64 {
    let x = mixed_population(p_e, eps);
    2.0 * (p_e - eps - (binary_entropy(x) - binary_entropy(eps)) / beta_d_delta)
}

/// Wit-dit partial swap: with the dit in `|↑⟩` the wit leaves in `|g⟩`, with
/// `|↓⟩` it leaves in `|e⟩`. The dit comes out `H̄`-rotated; see
/// [`dit_readout`].
pub fn engine_pswap(tunneling_phase: f64) -> UnitaryMatrix {
    let c = cnot_system_up();
    let r = u14(tunneling_phase);
    let first = r.tensor(&hbar()).expect("2x2 factors");
    UnitaryMatrix::product(&[&on_system(&r), &c, &first, &c]).expect("4x4 factors")
}

/// Rotation taking the swapped dit back to the operational basis.
pub fn dit_readout() -> UnitaryMatrix {
    on_demon(&hbar().adjoint())
}

fn wit_energy(rho: &DensityMatrix, delta_w: f64) -> f64 {
    rho.matrix().get(0, 0).re * delta_w
}

/// Half-Rabi flip on the wit.
fn half_rabi(tunneling_phase: f64) -> UnitaryMatrix {
    let r = u14(tunneling_phase);
    UnitaryMatrix::product(&[&r, &r]).expect("2x2 factors")
}

/// Density-matrix route through one cycle: returns the same fields as
/// [`closed_form_cycle`], with energies read off evolved states.
pub fn quantum_cycle(params: &EngineParams, tunneling_phase: f64) -> Result<CycleReport> {
    params.validate()?;
    let d = params.delta_w;
    let eps = params.epsilon;
    let wit = thermal_wit(params.beta, d)?;
    let dit_up = DensityMatrix::diagonal(&[1.0 - eps, eps])?;
    let dit_down = DensityMatrix::diagonal(&[eps, 1.0 - eps])?;
    let e0 = wit_energy(&wit.state, d);

    let c = cnot_system_up();
    let r = u14(tunneling_phase);
    let first = r.tensor(&hbar())?;
    let close = on_system(&r);
    let readout = dit_readout();

    let mut ledger = Vec::new();
    let mut wits = Vec::new();
    let mut dit_entropy = 0.0;
    let mut dit_entropy_in = 0.0;
    for (pair, dit) in [("up", &dit_up), ("down", &dit_down)] {
        let joint = wit.state.tensor(dit)?.evolve(&c)?;
        let after_first = joint.evolve(&first)?;
        let e1 = wit_energy(&partial_trace(&after_first, Subsystem::First)?, d);
        let after_close = after_first.evolve(&c)?.evolve(&close)?;
        let wit_out = partial_trace(&after_close, Subsystem::First)?;
        let e2 = wit_energy(&wit_out, d);
        ledger.push(FieldStage {
            stage: "prepare".into(),
            pair: pair.into(),
            energy: e1 - e0,
        });
        ledger.push(FieldStage {
            stage: "close".into(),
            pair: pair.into(),
            energy: e2 - e1,
        });
        let dit_out = partial_trace(&after_close.evolve(&readout)?, Subsystem::Second)?;
        dit_entropy += dit_out.entropy()?;
        dit_entropy_in += dit.entropy()?;
        wits.push(wit_out);
    }
    // Reorder so both prepare stages precede both close stages.
    ledger.sort_by_key(|s| if s.stage == "prepare" { 0 } else { 1 });
    let field_net: f64 = ledger.iter().map(|s| s.energy).sum();

    let excited = wits[1].evolve(&half_rabi(tunneling_phase))?;
    let w_plus = wit_energy(&wits[1], d) - wit_energy(&excited, d);
    let final_energy = wit_energy(&wits[0], d) + wit_energy(&excited, d);
    let heat = 2.0 * e0 - final_energy;
    let w_minus = field_net;
    let w_out = w_plus - w_minus;
    let ds = dit_entropy - dit_entropy_in;
    let w_in = ds / params.beta_d;
    let net_work = w_out - w_in;
    let (eta_local, eta_2cy) = if heat > 0.0 {
        (Some(w_out / heat), Some(net_work / heat))
    } else {
        (None, None)
    };
    Ok(CycleReport {
        params: *params,
        p_e: wit.p_e,
        p_g: wit.p_g,
        heat,
        w_minus,
        w_plus,
        w_out,
        w_in,
        dit_entropy_change: ds,
        net_work,
        eta_local,
        eta_2cy,
        eta_carnot: 1.0 - params.beta / params.beta_d,
        dit_out_entropy: dit_entropy,
        field_ledger: ledger,
        field_net,
        route_deviation: None,
    })
}

/// Closed-form report, cross-checked against [`quantum_cycle`].
pub fn run_cycle(params: &EngineParams) -> Result<CycleReport> {
    let mut report = closed_form_cycle(params)?;
    let q = quantum_cycle(params, -std::f64::consts::FRAC_PI_2)?;
    let pairs = [
        (report.heat, q.heat),
        (report.w_minus, q.w_minus),
        (report.w_plus, q.w_plus),
        (report.w_out, q.w_out),
        (report.w_in, q.w_in),
        (report.net_work, q.net_work),
        (report.field_net, q.field_net),
    ];
    let dev = pairs.iter().map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    report.route_deviation = Some(dev);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationResult {
    pub epsilon_star: f64,
    pub objective_value: f64,
    pub converged: bool,
    pub iterations: usize,
    pub residual: f64,
    /// Every root of the stationarity condition found by the scan.
    pub candidates: Vec<f64>,
    pub diagnostic: Option<String>,
}

/// Power stationarity `(1−2p_e)H′[x] − H′[ε] + β_dΔ_w`; the net work
/// decreases where this is positive.
pub fn power_condition(p_e: f64, eps: f64, beta_d_delta: f64) -> f64 {
    (1.0 - 2.0 * p_e) * binary_entropy_derivative(mixed_population(p_e, eps))
        - binary_entropy_derivative(eps)
        + beta_d_delta
}

/// Efficiency stationarity; free of the demon temperature.
pub fn efficiency_condition(p_e: f64, eps: f64) -> f64 {
    let x = mixed_population(p_e, eps);
    let slope = (1.0 - 2.0 * p_e) * binary_entropy_derivative(x) - binary_entropy_derivative(eps);
    slope * (p_e - eps) + binary_entropy(x) - binary_entropy(eps)
}

fn check_population(p_e: f64) -> Result<()> {
    if p_e > 0.0 && p_e <= 0.5 {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "excited population {p_e} outside (0, 1/2]"
        )))
    }
}

/// Impurity maximizing the net work at fixed `p_e` and `β_dΔ_w`.
pub fn optimize_epsilon_power(p_e: f64, beta_d_delta: f64) -> Result<OptimizationResult> {
    check_population(p_e)?;
    if !(beta_d_delta > 0.0 && beta_d_delta.is_finite()) {
        return Err(Error::Parameter(format!(
            "beta_d * delta_w must be positive, got {beta_d_delta}"
        )));
    }
    let lo = EPS_FLOOR;
    let hi = p_e * (1.0 - EPS_MARGIN);
    let objective = |e: f64| net_work_over_delta(p_e, e, beta_d_delta);
    let cond = |e: f64| power_condition(p_e, e, beta_d_delta);
    if hi <= lo {
        return Ok(floor_optimum(0.0, objective(0.0), 0.0));
    }
    // dW/dε = −(2/β_d)·cond, so a positive condition throughout puts the
    // maximum at the floor, i.e. at ε = 0 to double precision.
    if cond(lo) > 0.0 && cond(hi) > 0.0 {
        return Ok(floor_optimum(lo, objective(lo), cond(lo)));
    }
    match roots::bisect(cond, lo, hi, ROOT_TOL, 2000) {
        Some(b) => {
            let f = objective(b.root);
            let mut diagnostic = None;
            let h = 1e-6 * p_e;
            for n in [b.root - h, b.root + h] {
                if n > 0.0 && n < p_e && objective(n) > f + 1e-15 {
                    diagnostic = Some(format!("neighbour {n} beats the stationary point"));
                }
            }
            Ok(OptimizationResult {
                epsilon_star: b.root,
                objective_value: f,
                converged: b.converged && diagnostic.is_none(),
                iterations: b.iterations,
                residual: b.residual,
                candidates: vec![b.root],
                diagnostic,
            })
        }
        None => {
            let (x, fx, it) = roots::golden_max(objective, lo, hi, 1e-12, 500);
            Ok(OptimizationResult {
                epsilon_star: x,
                objective_value: fx,
                converged: false,
                iterations: it,
                residual: cond(x),
                candidates: Vec::new(),
                diagnostic: Some(format!(
                    "power condition has no sign change on [{lo:e}, {hi}]; golden-section maximum used"
                )),
            })
        }
    }
}

/// Impurity maximizing the two-cycle efficiency at fixed `p_e`. The
/// objective value is the entropy cost per absorbed quantum,
/// `(H[x] − H[ε])/(p_e − ε)`; the efficiency is `1 − value/(β_dΔ_w)`.
pub fn optimize_epsilon_eta(p_e: f64) -> Result<OptimizationResult> {
    check_population(p_e)?;
    if p_e == 0.5 {
        return Ok(OptimizationResult {
            epsilon_star: 0.5,
            objective_value: 0.0,
            converged: true,
            iterations: 0,
            residual: 0.0,
            candidates: vec![0.5],
            diagnostic: None,
        });
    }
    let cost = |e: f64| {
        let x = mixed_population(p_e, e);
        (binary_entropy(x) - binary_entropy(e)) / (p_e - e)
    };
    // Divided by p_e − ε so the residual tolerance means the same thing at
    // every population; the sign is unchanged.
    let cond = |e: f64| efficiency_condition(p_e, e) / (p_e - e);
    let lo = EPS_FLOOR;
    let hi = p_e * (1.0 - EPS_MARGIN);
    if hi <= lo {
        return Ok(floor_optimum(0.0, cost(0.0), 0.0));
    }
    if cond(lo) > 0.0 && cond(hi) > 0.0 {
        return Ok(floor_optimum(lo, cost(lo), cond(lo)));
    }
    let brackets = roots::sign_changes(cond, lo, hi, ETA_SCAN_CELLS);
    let found: Vec<roots::Bisection> = brackets
        .iter()
        .filter_map(|&(a, b)| roots::bisect(cond, a, b, ROOT_TOL, 2000))
        .collect();
    if found.is_empty() {
        let (x, fx, it) = roots::golden_max(|e| -cost(e), lo, hi, 1e-12, 500);
        return Ok(OptimizationResult {
            epsilon_star: x,
            objective_value: -fx,
            converged: false,
            iterations: it,
            residual: cond(x),
            candidates: Vec::new(),
            diagnostic: Some(
                "efficiency condition has no sign change; golden-section minimum used".into(),
            ),
        });
    }
    let best = found
        .iter()
        .min_by(|a, b| cost(a.root).total_cmp(&cost(b.root)))
        .expect("non-empty");
    let diagnostic = (found.len() > 1).then(|| format!("{} stationary points found", found.len()));
    Ok(OptimizationResult {
        epsilon_star: best.root,
        objective_value: cost(best.root),
        converged: found.iter().all(|b| b.converged),
        iterations: found.iter().map(|b| b.iterations).sum(),
        residual: best.residual,
        candidates: found.iter().map(|b| b.root).collect(),
        diagnostic,
    })
}

fn floor_optimum(eps: f64, objective_value: f64, residual: f64) -> OptimizationResult {
    OptimizationResult {
        epsilon_star: eps,
        objective_value,
        converged: true,
        iterations: 0,
        residual,
        candidates: vec![eps],
        diagnostic: Some("optimum lies below the smallest representable impurity".into()),
    }
}

/// How the dit impurity is chosen at each working temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Policy {
    Ideal,
    OptPower,
    OptEta,
    Fixed(f64),
}

impl std::str::FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(Policy::Ideal),
            "opt-power" => Ok(Policy::OptPower),
            "opt-eta" => Ok(Policy::OptEta),
            other => {
                let value = other
                    .strip_prefix("fixed:")
                    .ok_or_else(|| Error::Parameter(format!("unknown policy '{other}'")))?;
                let eps: f64 = value
                    .parse()
                    .map_err(|_| Error::Parameter(format!("bad fixed impurity '{value}'")))?;
                if !(0.0..=0.5).contains(&eps) {
                    return Err(Error::Parameter(format!(
                        "fixed impurity {eps} outside [0, 1/2]"
                    )));
                }
                Ok(Policy::Fixed(eps))
            }
        }
    }
}

impl std::fmt::Display for Policy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Policy::Ideal => write!(f, "ideal"),
            Policy::OptPower => write!(f, "opt-power"),
            Policy::OptEta => write!(f, "opt-eta"),
            Policy::Fixed(e) => write!(f, "fixed:{e}"),
        }
    }
}

/// Impurity chosen by `policy`, with the optimizer's result when one ran.
pub fn policy_epsilon(
    policy: Policy,
    p_e: f64,
    beta_d_delta: f64,
) -> Result<(f64, Option<OptimizationResult>)> {
    // A wit that never gets excited absorbs nothing; any impurity only costs.
    if p_e == 0.0 && matches!(policy, Policy::OptPower | Policy::OptEta) {
        return Ok((0.0, None));
    }
    match policy {
        Policy::Ideal => Ok((0.0, None)),
        Policy::Fixed(e) => Ok((e, None)),
        Policy::OptPower => {
            let r = optimize_epsilon_power(p_e, beta_d_delta)?;
            Ok((r.epsilon_star, Some(r)))
        }
        Policy::OptEta => {
            let r = optimize_epsilon_eta(p_e)?;
            Ok((r.epsilon_star, Some(r)))
        }
    }
}

/// Net work over `Δ_w` at working temperature `beta_delta` under `policy`.
pub fn policy_net_work(policy: Policy, beta_delta: f64, beta_d_delta: f64) -> Result<f64> {
    let p_e = excited_population(beta_delta);
    let (eps, _) = policy_epsilon(policy, p_e, beta_d_delta)?;
    Ok(net_work_over_delta(p_e, eps, beta_d_delta))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Frontier {
    /// Largest `β` with positive net work, `None` if there is none.
    pub beta_m: Option<f64>,
    pub beta_m_delta: Option<f64>,
    pub iterations: usize,
    pub diagnostic: Option<String>,
}

const FRONTIER_GRID: usize = 512;

/// Coldest working reservoir that still yields positive net work.
///
/// Positive work needs `η_2cy > 0`, and `η_2cy` never exceeds
/// `1 − β/β_d`, so the search is confined to `βΔ_w < β_dΔ_w`.
pub fn minimal_beta(beta_d: f64, delta_w: f64, policy: Policy) -> Result<Frontier> {
    if !(beta_d > 0.0 && delta_w > 0.0) {
        return Err(Error::Parameter(
            "beta_d and delta_w must be positive".into(),
        ));
    }
    let bdd = beta_d * delta_w;
    let top = bdd.min(MAX_BETA_DELTA);
    let net = |y: f64| policy_net_work(policy, y, bdd);
    let mut last_positive = None;
    let mut first_after = top;
    let mut prev_positive = false;
    for k in 0..=FRONTIER_GRID {
        let y = top * k as f64 / FRONTIER_GRID as f64;
        let positive = net(y)? > 0.0;
        if positive {
            last_positive = Some(y);
        } else if prev_positive {
            first_after = y;
        }
        prev_positive = positive;
    }
    let Some(mut lo) = last_positive else {
        return Ok(Frontier {
            beta_m: None,
            beta_m_delta: None,
            iterations: FRONTIER_GRID + 1,
            diagnostic: Some(format!(
                "no positive net work for beta*delta_w in [0, {top}] under {policy}"
            )),
        });
    };
    let mut hi = first_after.max(lo);
    let mut iterations = FRONTIER_GRID + 1;
    while hi - lo > 1e-13 * hi.max(1.0) && iterations < FRONTIER_GRID + 200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if net(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let y = 0.5 * (lo + hi);
    Ok(Frontier {
        beta_m: Some(y / delta_w),
        beta_m_delta: Some(y),
        iterations,
        diagnostic: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub beta_delta: f64,
    pub p_e: f64,
    pub epsilon: f64,
    pub heat_over_delta: f64,
    pub net_over_delta: f64,
    pub eta_2cy: Option<f64>,
    pub eta_carnot: f64,
    pub converged: bool,
}

/// Engine performance along a grid of working temperatures.
pub fn sweep(beta_deltas: &[f64], beta_d_delta: f64, policy: Policy) -> Result<Vec<SweepRow>> {
    if !(beta_d_delta > 0.0) {
        return Err(Error::Parameter("beta_d * delta_w must be positive".into()));
    }
    beta_deltas
        .par_iter()
        .map(|&y| sweep_row(y, beta_d_delta, policy))
        .collect()
}

/// Serial twin of [`sweep`].
pub fn sweep_serial(
    beta_deltas: &[f64],
    beta_d_delta: f64,
    policy: Policy,
) -> Result<Vec<SweepRow>> {
    beta_deltas
        .iter()
        .map(|&y| sweep_row(y, beta_d_delta, policy))
        .collect()
}

fn sweep_row(beta_delta: f64, beta_d_delta: f64, policy: Policy) -> Result<SweepRow> {
    if !(beta_delta >= 0.0) {
        return Err(Error::Parameter(format!(
            "beta*delta_w must be non-negative, got {beta_delta}"
        )));
    }
    let y = beta_delta.min(MAX_BETA_DELTA);
    let p_e = excited_population(y);
    let (eps, opt) = policy_epsilon(policy, p_e, beta_d_delta)?;
    let heat = 2.0 * (p_e - eps);
    let net = net_work_over_delta(p_e, eps, beta_d_delta);
    Ok(SweepRow {
        beta_delta: y,
        p_e,
        epsilon: eps,
        heat_over_delta: heat,
        net_over_delta: net,
        eta_2cy: (heat > 0.0).then(|| efficiency(p_e, eps, beta_d_delta)),
        eta_carnot: 1.0 - y / beta_d_delta,
        converged: opt.is_none_or(|r| r.converged),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontierRow {
    pub beta_d_delta: f64,
    pub p_e: f64,
    pub beta_delta: f64,
    pub epsilon: f64,
    pub net_over_delta: f64,
    pub eta_2cy: Option<f64>,
    pub converged: bool,
}

/// Optimal impurity against `p_e` for each demon temperature.
pub fn frontier(p_es: &[f64], beta_d_deltas: &[f64], policy: Policy) -> Result<Vec<FrontierRow>> {
    let cells: Vec<(f64, f64)> = beta_d_deltas
        .iter()
        .flat_map(|&b| p_es.iter().map(move |&p| (b, p)))
        .collect();
    cells
        .par_iter()
        .map(|&(b, p)| frontier_row(p, b, policy))
        .collect()
}

fn frontier_row(p_e: f64, beta_d_delta: f64, policy: Policy) -> Result<FrontierRow> {
    check_population(p_e)?;
    if !(beta_d_delta > 0.0) {
        return Err(Error::Parameter("beta_d * delta_w must be positive".into()));
    }
    let (eps, opt) = policy_epsilon(policy, p_e, beta_d_delta)?;
    let heat = 2.0 * (p_e - eps);
    Ok(FrontierRow {
        beta_d_delta,
        p_e,
        beta_delta: beta_delta_from_population(p_e),
        epsilon: eps,
        net_over_delta: net_work_over_delta(p_e, eps, beta_d_delta),
        eta_2cy: (heat > 0.0).then(|| efficiency(p_e, eps, beta_d_delta)),
        converged: opt.is_none_or(|r| r.converged),
    })
}

/// Hot-regime estimate of the power-optimal impurity.
pub fn epsilon_power_estimate(p_e: f64, beta_d_delta: f64) -> f64 {
    1.0 / (1.0 + (beta_d_delta + binary_entropy_derivative(p_e) * (1.0 - 2.0 * p_e)).exp())
}

/// Hot-regime estimate of the efficiency-optimal impurity.
pub fn epsilon_eta_estimate(p_e: f64) -> f64 {
    let xi = 1.0 - 2.0 * p_e;
    p_e - 0.5 * xi + 2.0 / 3.0 * xi.powi(3)
}
