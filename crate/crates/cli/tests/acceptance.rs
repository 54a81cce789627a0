//! End-to-end acceptance checks. Runs as a plain binary so every criterion
//! reports its own PASS/FAIL line even when an earlier one fails.

use std::f64::consts::{LN_2, PI};
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qdemon_core::channel::{self, ChannelConfig};
use qdemon_core::circuits::{self, DotBasis, DoubleDotConfig};
use qdemon_core::engine::{self, EngineParams, Policy};
use qdemon_core::interferometer::{self, MziConfig};
use qdemon_core::qmatrix::{ComplexMatrix, DensityMatrix, PureState};
use qdemon_core::{demon_spin, random, SpinDemonParams};

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn cli(args: &[&str]) -> String {
    let mut argv = vec!["qdemon"];
    argv.extend_from_slice(args);
    let (_, outcome) = qdemon_cli::run_from_args(argv).expect("cli run");
    assert!(outcome.converged(), "{:?}", outcome.diagnostics);
    outcome.text
}

/// Data rows of a CLI CSV as floats, keyed by header name.
fn csv_column(text: &str, name: &str) -> Vec<f64> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header
        .iter()
        .position(|h| *h == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    lines
        .map(|l| l.split(',').nth(col).unwrap().parse().unwrap())
        .collect()
}

// Closed forms written out entry by entry.
fn closed_form_ud() -> ComplexMatrix {
    #[rustfmt::skip]
    let e = [
         1.0, -1.0, -1.0, 1.0,
         1.0,  1.0,  1.0, 1.0,
        -1.0, -1.0,  1.0, 1.0,
        -1.0,  1.0, -1.0, 1.0,
    ];
    ComplexMatrix::from_real(4, &e.map(|x| 0.5 * x)).unwrap()
}

fn closed_form_vd() -> ComplexMatrix {
    #[rustfmt::skip]
    let e = [
        1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 1.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
        0.0, 1.0, 0.0, 0.0,
    ];
    ComplexMatrix::from_real(4, &e).unwrap()
}

fn closed_form_swap() -> ComplexMatrix {
    #[rustfmt::skip]
    let e = [
        1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 1.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
    ];
    ComplexMatrix::from_real(4, &e).unwrap()
}

fn gate_identities() -> Verdict {
    let pairs = [
        ("U_D", circuits::build_ud(), closed_form_ud()),
        ("V_D", circuits::build_vd(), closed_form_vd()),
        ("SWAP", circuits::build_swap(), closed_form_swap()),
    ];
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for (name, built, expected) in &pairs {
        let d = built.matrix().max_abs_diff(expected);
        worst = worst.max(d);
        parts.push(format!("{name} {d:.1e}"));
    }
    verdict(
        worst <= 1e-12,
        format!("max |built - closed form|: {}", parts.join(", ")),
    )
}

fn purifying_params() -> SpinDemonParams {
    SpinDemonParams {
        theta: 0.0,
        eta: PI,
        phi: 0.0,
        alpha: 0.0,
        beta_phase: 0.0,
    }
}

fn maximal_purification() -> Verdict {
    let chaotic = DensityMatrix::maximally_mixed(2);
    let half = DensityMatrix::maximally_mixed(2);
    let mut ok = true;
    let mut parts = Vec::new();
    for k in 0..2 {
        let demon = PureState::basis(2, k).unwrap().density();
        let r = demon_spin::scatter(&chaotic, &demon, &purifying_params()).unwrap();
        let d = r.demon_out.matrix().max_abs_diff(half.matrix());
        ok &= r.entropy_out.abs() <= 1e-9 && (r.entropy_gain + LN_2).abs() <= 1e-9 && d <= 1e-9;
        parts.push(format!(
            "demon {}: S_out {:.1e}, gain+ln2 {:.1e}, |demon_out - 1/2| {:.1e}",
            if k == 0 { "up" } else { "down" },
            r.entropy_out,
            r.entropy_gain + LN_2,
            d
        ));
    }
    verdict(ok, parts.join("; "))
}

fn random_config(r: &mut ChaCha8Rng, unital: bool) -> ChannelConfig {
    let s = random::unitary(r, 2);
    let u1 = random::unitary(r, 2);
    let u2 = if unital {
        u1.clone()
    } else {
        random::unitary(r, 2)
    };
    let leads = [u1, u2, random::unitary(r, 2), random::unitary(r, 2)];
    ChannelConfig::new(s, leads, random::density_matrix(r, 2)).unwrap()
}

fn entropy_gain_bound() -> Verdict {
    let mut r = rng(3);
    let (mut worst_bound, mut worst_unital) = (f64::INFINITY, f64::INFINITY);
    let mut unital_cases = 0;
    let cases = 2000;
    for k in 0..cases {
        let cfg = random_config(&mut r, k % 4 == 0);
        let rho = random::density_matrix(&mut r, 2);
        let g = channel::entropy_gain(&rho, &cfg).unwrap();
        worst_bound = worst_bound.min(g.gain - g.bound);
        if channel::is_unital(&cfg) {
            unital_cases += 1;
            worst_unital = worst_unital.min(g.gain);
        }
    }
    verdict(
        worst_bound >= -1e-9 && worst_unital >= -1e-10 && unital_cases >= 100,
        format!(
            "{cases} configs: min(gain - bound) {worst_bound:.2e}; {unital_cases} unital, min gain {worst_unital:.2e}"
        ),
    )
}

fn random_params(r: &mut ChaCha8Rng) -> SpinDemonParams {
    SpinDemonParams {
        theta: random::angle(r),
        eta: random::angle(r),
        phi: random::angle(r),
        alpha: random::angle(r),
        beta_phase: random::angle(r),
    }
}

fn entropy_swap() -> Verdict {
    let mut r = rng(4);
    let (mut sys_dev, mut demon_dev) = (0.0f64, 0.0f64);
    let mut worst_case = None;
    for _ in 0..200 {
        let params = random_params(&mut r);
        let rho = random::density_matrix(&mut r, 2);
        let demon = random::diagonal_state(&mut r, 2);
        let rep = demon_spin::scatter(&rho, &demon, &params).unwrap();
        sys_dev = sys_dev.max((rep.entropy_out - demon.entropy().unwrap()).abs());
        let d = (rep.demon_entropy_out - rho.entropy().unwrap()).abs();
        if d > demon_dev {
            demon_dev = d;
            worst_case = Some((
                demon.matrix().get(0, 0).re,
                rho.entropy().unwrap(),
                rep.demon_entropy_out,
            ));
        }
    }
    let mut detail = format!("max |S(rho_out) - S(demon_in)| {sys_dev:.1e}, max |S(demon_out) - S(rho_in)| {demon_dev:.3e}");
    if let Some((p, s_in, s_demon)) = worst_case.filter(|_| demon_dev > 1e-10) {
        detail += &format!(
            "; worst: demon weight {p:.3}, S(rho_in) {s_in:.4}, S(demon_out) {s_demon:.4}. \
             A mixed demon leaves the marginal p+ r+ + p- r-, whose entropy exceeds S(rho_in) by the \
             system-demon mutual information; only the conditional entropy is swapped exactly"
        );
    }
    verdict(sys_dev <= 1e-10 && demon_dev <= 1e-10, detail)
}

fn realization_equivalence() -> Verdict {
    let mut r = rng(7);
    let (mut joint_dev, mut system_dev) = (0.0f64, 0.0f64);
    for k in 0..100 {
        let cfg = DoubleDotConfig {
            tunneling_phase: random::angle(&mut r),
            interaction_phase: random::angle(&mut r),
            theta: random::angle(&mut r),
            eta: random::angle(&mut r),
            final_rotation: true,
        };
        let rho = random::density_matrix(&mut r, 2);
        let dot = random::density_matrix(&mut r, 2);
        let (basis, dot_given) = if k % 2 == 0 {
            (DotBasis::Operational, dot.clone())
        } else {
            (
                DotBasis::Physical,
                dot.evolve(&circuits::u14(cfg.tunneling_phase)).unwrap(),
            )
        };
        let dd = circuits::double_dot_protocol(&rho, &dot_given, basis, &cfg).unwrap();
        let spin = demon_spin::scatter(&rho, &dot, &cfg.equivalent_spin()).unwrap();
        joint_dev = joint_dev.max(dd.joint_out.matrix().max_abs_diff(spin.joint_out.matrix()));
        // Without the closing rotation only the system output is shared.
        let open = DoubleDotConfig {
            final_rotation: false,
            ..cfg
        };
        let dd_open = circuits::double_dot_protocol(&rho, &dot_given, basis, &open).unwrap();
        system_dev = system_dev.max(dd_open.rho_out.matrix().max_abs_diff(spin.rho_out.matrix()));
    }
    verdict(
        joint_dev <= 1e-12 && system_dev <= 1e-12,
        format!("100 inputs: max joint deviation {joint_dev:.1e}, system output without final rotation {system_dev:.1e}"),
    )
}

fn engine_maximal_power() -> Verdict {
    let p_e = engine::excited_population(1e-6);
    let opt = engine::optimize_epsilon_power(p_e, 2.0).unwrap();
    let rep =
        engine::run_cycle(&EngineParams::new(1e-6, 2.0, 1.0, opt.epsilon_star).unwrap()).unwrap();
    let eta = rep.eta_2cy.unwrap();
    verdict(
        opt.converged && (rep.net_work - 0.43).abs() <= 0.01 && (eta - 0.57).abs() <= 0.01,
        format!(
            "eps_W {:.6}, net/Delta {:.5}, eta_2cy {:.5}",
            opt.epsilon_star, rep.net_work, eta
        ),
    )
}

fn positive_work_threshold() -> Verdict {
    // Ideal engine with an infinitely hot working reservoir: locate the demon
    // temperature where the net work changes sign.
    let net = |bdd: f64| {
        engine::closed_form_cycle(&EngineParams::new(0.0, bdd, 1.0, 0.0).unwrap())
            .unwrap()
            .net_work
    };
    let (mut lo, mut hi) = (0.5, 3.0);
    assert!(net(lo) < 0.0 && net(hi) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if net(mid) > 0.0 {
            hi = mid
        } else {
            lo = mid
        }
    }
    let hot_err = (0.5 * (lo + hi) - 2.0 * LN_2).abs();
    let f = engine::minimal_beta(20.0, 1.0, Policy::Ideal).unwrap();
    let cold = f.beta_m_delta.unwrap_or(f64::NAN);
    let cold_err = (cold - 19.0).abs() / 19.0;
    verdict(
        hot_err <= 1e-6 && cold_err <= 0.02,
        format!("hot threshold error {hot_err:.1e}; cold frontier beta_m Delta {cold:.6} vs 19 (rel {cold_err:.1e})"),
    )
}

fn optimizer_cross_checks() -> Verdict {
    let mut w_err = 0.0f64;
    for bdd in [0.25, 0.5, 1.0, 2.0, 4.0, 8.0] {
        let r = engine::optimize_epsilon_power(0.5, bdd).unwrap();
        w_err = w_err.max((r.epsilon_star - 1.0 / (1.0 + bdd.exp())).abs());
    }
    let mut cubic_err = 0.0f64;
    let mut local_ok = true;
    for k in 1..=100 {
        let xi = 0.001 * k as f64;
        let p = 0.5 * (1.0 - xi);
        let e = engine::optimize_epsilon_eta(p).unwrap();
        cubic_err = cubic_err.max((e.epsilon_star - (p - xi / 2.0 + 2.0 / 3.0 * xi.powi(3))).abs());
        let best = engine::efficiency(p, e.epsilon_star, 2.0);
        for d in [-1e-4, 1e-4] {
            let n = e.epsilon_star + d * p;
            local_ok &= engine::efficiency(p, n, 2.0) <= best + 1e-12;
        }
    }
    let mut spread = 0.0f64;
    for p in [0.01, 0.1, 0.2, 0.3, 0.4, 0.45] {
        let eps: Vec<f64> = [1.0, 2.0, 4.0]
            .iter()
            .map(|&b| engine::policy_epsilon(Policy::OptEta, p, b).unwrap().0)
            .collect();
        let max = eps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = eps.iter().cloned().fold(f64::INFINITY, f64::min);
        spread = spread.max(max - min);
    }
    verdict(
        w_err <= 1e-10 && cubic_err <= 1e-3 && spread <= 1e-10 && local_ok,
        format!(
            "eps_W at p_e=1/2 err {w_err:.1e}; eps_eta cubic err {cubic_err:.1e} (xi <= 0.1); \
             spread over beta_d Delta in {{1,2,4}} {spread:.1e}"
        ),
    )
}

fn carnot_dominance() -> Verdict {
    let bdd = 2.0;
    let mut worst = f64::INFINITY;
    let mut local_dev = 0.0f64;
    let mut local_exact = true;
    let mut counted = 0;
    for i in 0..50 {
        let y = bdd * (i as f64 + 0.5) / 50.0;
        for j in 0..50 {
            let eps = 0.5 * j as f64 / 49.0;
            let params = EngineParams::new(y, bdd, 1.0, eps).unwrap();
            let rep = engine::closed_form_cycle(&params).unwrap();
            if let Some(eta) = rep.eta_2cy {
                counted += 1;
                worst = worst.min(1.0 - y / bdd + 1e-9 - eta);
            }
            if eps < rep.p_e {
                local_exact &= rep.eta_local == Some(1.0);
                let q = engine::quantum_cycle(&params, -PI / 2.0).unwrap();
                local_dev = local_dev.max((q.eta_local.unwrap() - 1.0).abs());
            }
        }
    }
    verdict(
        worst >= 0.0 && local_exact && local_dev <= 1e-12,
        format!(
            "{counted} grid points: min Carnot margin {:.3e}; eta_local closed form exact = {local_exact}, \
             density-matrix route max |eta_local - 1| {local_dev:.1e}",
            worst - 1e-9
        ),
    )
}

fn hot_regime_threshold() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for policy in [Policy::OptPower, Policy::OptEta] {
        let f = engine::minimal_beta(0.1, 1.0, policy).unwrap();
        let ratio = f.beta_m.map_or(f64::NAN, |b| b / 0.1);
        ok &= (ratio - 0.5).abs() <= 0.05;
        parts.push(format!("{policy}: beta_m/beta_d {ratio:.5}"));
    }
    verdict(ok, parts.join(", "))
}

fn interferometer_visibility() -> Verdict {
    let vis = |eps: f64| {
        interferometer::run_double_mzi(&MziConfig {
            epsilon: eps,
            ..Default::default()
        })
        .unwrap()
        .visibility
    };
    let (pure, chaotic) = (vis(0.0), vis(0.5));
    let curve: Vec<f64> = (0..=50).map(|k| vis(0.01 * k as f64)).collect();
    let monotone = curve.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    verdict(
        pure >= 0.999 && chaotic <= 0.001 && monotone,
        format!("pure demon {pure:.6}, chaotic demon {chaotic:.1e}, non-increasing over 51 impurities: {monotone}"),
    )
}

fn curve_structure() -> Verdict {
    let mut checks: Vec<(&str, bool)> = Vec::new();

    // Power-optimal impurity curves stack by demon temperature.
    let two_ln2 = (2.0 * LN_2).to_string();
    let w = cli(&[
        "engine",
        "frontier",
        "--beta-d-delta",
        &format!("1,{two_ln2},2"),
        "--policy",
        "opt-power",
        "--steps",
        "100",
    ]);
    let bdd = csv_column(&w, "beta_d_delta");
    let eps = csv_column(&w, "epsilon");
    let pe = csv_column(&w, "p_e");
    let n = 100;
    let ordered = (0..n).all(|k| eps[k] > eps[n + k] && eps[n + k] > eps[2 * n + k]);
    let below_pe = eps.iter().zip(&pe).all(|(e, p)| e < p);
    checks.push((
        "power curves ordered 1 > 2ln2 > 2",
        ordered && bdd[0] == 1.0 && bdd[2 * n] == 2.0,
    ));
    checks.push(("power curves below p_e", below_pe));

    let e = cli(&[
        "engine",
        "frontier",
        "--beta-d-delta",
        "1,2,4",
        "--policy",
        "opt-eta",
        "--steps",
        "100",
    ]);
    let eps = csv_column(&e, "epsilon");
    checks.push((
        "efficiency curve shared",
        (0..n).all(|k| eps[k] == eps[n + k] && eps[k] == eps[2 * n + k]),
    ));

    // Ideal engine: no positive work at or below 2 ln 2, some at 2.
    let max_net = |b: &str| {
        let s = cli(&[
            "engine",
            "sweep",
            "--beta-d-delta",
            b,
            "--policy",
            "ideal",
            "--steps",
            "400",
        ]);
        csv_column(&s, "net_over_delta")
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max)
    };
    checks.push(("ideal absent at 1", max_net("1") <= 0.0));
    checks.push(("ideal absent at 2ln2", max_net(&two_ln2) <= 1e-12));
    checks.push(("ideal present at 2", max_net("2") > 0.1));

    // Efficiency curves at a cold demon: spread far from the frontier, merged near it.
    let cold: Vec<Vec<f64>> = ["ideal", "opt-eta", "opt-power"]
        .iter()
        .map(|p| {
            let s = cli(&[
                "engine",
                "sweep",
                "--beta-d-delta",
                "20",
                "--policy",
                p,
                "--from",
                "0",
                "--to",
                "19",
                "--steps",
                "38",
            ]);
            csv_column(&s, "eta_2cy")
        })
        .collect();
    let spread = |k: usize| {
        let v = [cold[0][k], cold[1][k], cold[2][k]];
        v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - v.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    // Rows are βΔ = k/2; k = 2 is βΔ = 1, k = 36 is βΔ = 18.
    let (far, near) = (spread(2), spread(36));
    checks.push(("cold curves merge near beta_m", far > 0.01 && near < 1e-6));

    // At β_dΔ = 2 both optimized machines run out of work at the same β_m.
    let m = |p: Policy| {
        engine::minimal_beta(2.0, 1.0, p)
            .unwrap()
            .beta_m_delta
            .unwrap()
    };
    checks.push((
        "optimized frontiers coincide",
        (m(Policy::OptEta) - m(Policy::OptPower)).abs() < 1e-6,
    ));

    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    let detail = if failed.is_empty() {
        format!(
            "{} structural checks hold (cold spread {far:.3} at beta Delta = 1, {near:.1e} at 18)",
            checks.len()
        )
    } else {
        format!("failed: {}", failed.join("; "))
    };
    verdict(failed.is_empty(), detail)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("gate identities", gate_identities),
        ("maximal purification", maximal_purification),
        ("entropy-gain bound", entropy_gain_bound),
        ("entropy swap", entropy_swap),
        ("double dot equals spin demon", realization_equivalence),
        ("engine at maximal power, hot reservoir", engine_maximal_power),
        ("positive-work threshold", positive_work_threshold),
        ("optimizer cross-checks", optimizer_cross_checks),
        ("Carnot dominance", carnot_dominance),
        ("hot-demon frontier", hot_regime_threshold),
        ("interferometer visibility", interferometer_visibility),
        ("sweep and frontier structure", curve_structure),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        if !v.pass {
            failures += 1;
        }
        println!(
            "criterion {:>2} {}: {} ({})",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            name,
            v.detail
        );
    }
    println!(
        "acceptance: {} passed, {} failed",
        criteria.len() - failures,
        failures
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
