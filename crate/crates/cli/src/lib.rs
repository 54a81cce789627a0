//! Command-line front end: argument parsing, dispatch and CSV/JSON output.
//!
//! Everything here returns text; `main` only decides where it goes and
//! which exit code to use.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qdemon_core::channel::{self, DemonSpec, InputSpec};
use qdemon_core::circuits;
use qdemon_core::engine::{self, EngineParams, Policy};
use qdemon_core::interferometer::{self, MziConfig};
use qdemon_core::{ChannelSpec, ComplexMatrix, SpinDemonParams};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Core(#[from] qdemon_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Core(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

pub const EXIT_NOT_CONVERGED: i32 = 3;

/// Rendered command output plus any convergence problems met on the way.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub diagnostics: Vec<String>,
}

impl Outcome {
    fn clean(text: String) -> Self {
        Outcome {
            text,
            diagnostics: Vec::new(),
        }
    }

    pub fn converged(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qdemon",
    version,
    about = "Quantum demon channels, pSWAP circuits and the two-cycle engine"
)]
pub struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads for sweeps; output does not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scatter one system state off a spin demon and report entropies.
    Channel(ChannelArgs),
    /// Dump a gate or composite circuit matrix.
    Gates(GatesArgs),
    /// Double Mach-Zehnder flux scan.
    Mzi(MziArgs),
    /// Two-cycle engine tools.
    #[command(subcommand)]
    Engine(EngineCommand),
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ChannelArgs {
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
    #[arg(long, default_value_t = PI)]
    pub eta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    /// chaotic | up | down | mixed P | pure A B
    #[arg(long, num_args = 1..=3, default_values_t = ["chaotic".to_string()])]
    pub input: Vec<String>,
    /// up | down | mixture P | superposition A B
    #[arg(long, num_args = 1..=3)]
    pub demon: Option<Vec<String>>,
    /// JSON channel description; replaces the angle and demon flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    #[value(name = "UD")]
    Ud,
    #[value(name = "VD")]
    Vd,
    #[value(name = "SWAP")]
    Swap,
    #[value(name = "CNOT")]
    Cnot,
    #[value(name = "HBAR")]
    Hbar,
    #[value(name = "U14")]
    U14,
    #[value(name = "PSWAP_MIN")]
    PswapMin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct GatesArgs {
    #[arg(long, value_enum)]
    pub which: Which,
    /// Tunnelling phase for U14, radians.
    #[arg(long, default_value_t = -FRAC_PI_2)]
    pub phase: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct MziArgs {
    #[arg(long, default_value_t = FRAC_PI_2)]
    pub chi: f64,
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 64)]
    pub flux_steps: usize,
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub eta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,
    /// Replace the demon by a bare splitter.
    #[arg(long)]
    pub bypass_demon: bool,
}

#[derive(Debug, Subcommand)]
pub enum EngineCommand {
    /// One cycle's energy and entropy ledger as JSON.
    Report(ReportArgs),
    /// Performance against working temperature, CSV.
    Sweep(SweepArgs),
    /// Chosen impurity against excited population, CSV.
    Frontier(FrontierArgs),
    /// Run one impurity optimization, JSON.
    Optimize(OptimizeArgs),
    /// Coldest working reservoir with positive net work, CSV.
    Threshold(ThresholdArgs),
}

fn parse_policy(s: &str) -> Result<Policy, String> {
    s.parse::<Policy>().map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ReportArgs {
    #[arg(long)]
    pub beta_delta: f64,
    #[arg(long)]
    pub beta_d_delta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub delta_w: f64,
    #[arg(long, value_parser = parse_policy, default_value = "ideal")]
    pub policy: Policy,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SweepArgs {
    #[arg(long)]
    pub beta_d_delta: f64,
    #[arg(long, value_parser = parse_policy, default_value = "ideal")]
    pub policy: Policy,
    #[arg(long, default_value_t = 0.0)]
    pub from: f64,
    /// Upper end of the grid; defaults to the demon's `β_dΔ_w`.
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct FrontierArgs {
    /// Excited populations; defaults to a uniform grid on (0, 1/2].
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    pub pe: Option<Vec<f64>>,
    #[arg(long, num_args = 1.., value_delimiter = ',', required = true)]
    pub beta_d_delta: Vec<f64>,
    #[arg(long, value_parser = parse_policy, default_value = "opt-power")]
    pub policy: Policy,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub pe: f64,
    #[arg(long, default_value_t = 2.0)]
    pub beta_d_delta: f64,
    #[arg(long, value_parser = parse_policy, default_value = "opt-power")]
    pub policy: Policy,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ThresholdArgs {
    #[arg(long, num_args = 1.., value_delimiter = ',', required = true)]
    pub beta_d_delta: Vec<f64>,
    #[arg(long, value_parser = parse_policy, default_value = "ideal")]
    pub policy: Policy,
}

/// Parse `args` (program name first) and run.
pub fn run_from_args<I, T>(args: I) -> Result<(Cli, Outcome), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    let outcome = run(&cli)?;
    Ok((cli, outcome))
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match cli.jobs {
        Some(0) => Err(CliError::Usage("--jobs must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
            pool.install(|| dispatch(&cli.command))
        }
        None => dispatch(&cli.command),
    }
}

fn dispatch(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Channel(a) => cmd_channel(a),
        Command::Gates(a) => cmd_gates(a),
        Command::Mzi(a) => cmd_mzi(a),
        Command::Engine(e) => match e {
            EngineCommand::Report(a) => cmd_engine_report(a),
            EngineCommand::Sweep(a) => cmd_engine_sweep(a),
            EngineCommand::Frontier(a) => cmd_engine_frontier(a),
            EngineCommand::Optimize(a) => cmd_engine_optimize(a),
            EngineCommand::Threshold(a) => cmd_engine_threshold(a),
        },
    }
}

/// Twelve significant digits, fixed notation where it stays short.
pub fn fmt12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, x);
        trim_zeros(&fixed)
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".to_string(), fmt12)
}

fn csv_row(fields: &[String]) -> String {
    let mut line = fields.join(",");
    line.push('\n');
    line
}

fn parse_f64(s: &str, what: &str) -> Result<f64, CliError> {
    s.parse::<f64>()
        .map_err(|_| CliError::Usage(format!("{what}: '{s}' is not a number")))
}

fn parse_demon(words: &[String]) -> Result<DemonSpec, CliError> {
    let bad = || CliError::Usage(format!("invalid demon spec '{}'", words.join(" ")));
    match words {
        [k] if k == "up" => Ok(DemonSpec::Up),
        [k] if k == "down" => Ok(DemonSpec::Down),
        [k, p] if k == "mixture" => Ok(DemonSpec::Mixture {
            p: parse_f64(p, "mixture weight")?,
        }),
        [k, a, b] if k == "superposition" => Ok(DemonSpec::Superposition {
            amplitudes: [parse_f64(a, "amplitude")?, parse_f64(b, "amplitude")?],
        }),
        _ => Err(bad()),
    }
}

fn parse_input(words: &[String]) -> Result<InputSpec, CliError> {
    match words {
        [k] if k == "chaotic" => Ok(InputSpec::Chaotic),
        [k] if k == "up" => Ok(InputSpec::Up),
        [k] if k == "down" => Ok(InputSpec::Down),
        [k, p] if k == "mixed" => Ok(InputSpec::Mixed {
            p: parse_f64(p, "input weight")?,
        }),
        [k, a, b] if k == "pure" => Ok(InputSpec::Pure {
            amplitudes: [parse_f64(a, "amplitude")?, parse_f64(b, "amplitude")?],
        }),
        _ => Err(CliError::Usage(format!(
            "invalid input spec '{}'",
            words.join(" ")
        ))),
    }
}

fn json_text(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialize");
    s.push('\n');
    s
}

fn cmd_channel(a: &ChannelArgs) -> Result<Outcome, CliError> {
    let spec = match &a.config {
        Some(path) => {
            if a.demon.is_some() {
                return Err(CliError::Usage(
                    "--config and --demon are mutually exclusive".into(),
                ));
            }
            ChannelSpec::from_json(&std::fs::read_to_string(path)?)?
        }
        None => {
            let demon = match &a.demon {
                Some(words) => parse_demon(words)?,
                None => DemonSpec::Up,
            };
            ChannelSpec {
                theta: a.theta,
                eta: a.eta,
                phi: a.phi,
                alpha: a.alpha,
                beta: a.beta,
                demon,
            }
        }
    };
    let rho = parse_input(&a.input)?.state()?;
    let config = spec.to_config()?;
    let report = channel::apply_channel(&rho, &config)?;
    let value = json!({
        "spec": spec,
        "report": report,
    });
    Ok(Outcome::clean(json_text(&value)))
}

// Composite circuits are dumped in closed form; the gate products agree
// with them to rounding and are checked in the core tests.
fn gate_matrix(which: Which, phase: f64) -> ComplexMatrix {
    let u = match which {
        Which::Ud => return circuits::ud_reference(),
        Which::Vd => return circuits::vd_reference(),
        Which::Swap => return circuits::swap_reference(),
        Which::Cnot => circuits::cnot_system_up(),
        Which::Hbar => circuits::hbar(),
        Which::U14 => circuits::u14(phase),
        Which::PswapMin => circuits::minimal_pswap(),
    };
    u.matrix().clone()
}

fn cmd_gates(a: &GatesArgs) -> Result<Outcome, CliError> {
    if !a.phase.is_finite() {
        return Err(CliError::Usage("--phase must be finite".into()));
    }
    let m = gate_matrix(a.which, a.phase);
    let text = match a.format {
        Format::Json => json_text(&serde_json::to_value(&m).expect("matrix serializes")),
        Format::Csv => {
            let mut out = String::from("row,col,re,im\n");
            for r in 0..m.dim() {
                for c in 0..m.dim() {
                    let z = m.get(r, c);
                    out += &csv_row(&[r.to_string(), c.to_string(), fmt12(z.re), fmt12(z.im)]);
                }
            }
            out += &format!("# gates which={:?} phase={}\n", a.which, fmt12(a.phase));
            out
        }
    };
    Ok(Outcome::clean(text))
}

fn cmd_mzi(a: &MziArgs) -> Result<Outcome, CliError> {
    let cfg = MziConfig {
        chi: a.chi,
        epsilon: a.epsilon,
        flux_samples: a.flux_steps,
        params: SpinDemonParams {
            theta: a.theta,
            eta: a.eta,
            phi: a.phi,
            ..Default::default()
        },
        arm_phase: None,
        bypass_demon: a.bypass_demon,
    };
    let report =
        interferometer::run_double_mzi(&cfg).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut out = String::from("flux_rad,p3,p4\n");
    for i in 0..report.flux.len() {
        out += &csv_row(&[
            fmt12(report.flux[i]),
            fmt12(report.p3[i]),
            fmt12(report.p4[i]),
        ]);
    }
    out += &csv_row(&["visibility".into(), fmt12(report.visibility)]);
    out += &format!(
        "# mzi chi={} epsilon={} flux_steps={} theta={} eta={} phi={} bypass_demon={}\n",
        fmt12(a.chi),
        fmt12(a.epsilon),
        a.flux_steps,
        fmt12(a.theta),
        fmt12(a.eta),
        fmt12(a.phi),
        a.bypass_demon
    );
    Ok(Outcome::clean(out))
}

fn cmd_engine_report(a: &ReportArgs) -> Result<Outcome, CliError> {
    if !(a.delta_w > 0.0) || !(a.beta_delta >= 0.0) || !(a.beta_d_delta > 0.0) {
        return Err(CliError::Usage(
            "need delta_w > 0, beta_delta >= 0, beta_d_delta > 0".into(),
        ));
    }
    let p_e = engine::excited_population(a.beta_delta);
    let (eps, opt) = engine::policy_epsilon(a.policy, p_e, a.beta_d_delta)?;
    let params = EngineParams::new(
        a.beta_delta / a.delta_w,
        a.beta_d_delta / a.delta_w,
        a.delta_w,
        eps,
    )?;
    let report = engine::run_cycle(&params)?;
    let mut diagnostics = Vec::new();
    if let Some(r) = &opt {
        if !r.converged {
            diagnostics.push(format!(
                "impurity optimization did not converge: residual {:e}, {}",
                r.residual,
                r.diagnostic.clone().unwrap_or_default()
            ));
        }
    }
    let value = json!({
        "policy": a.policy.to_string(),
        "epsilon": eps,
        "net_work_over_delta": report.net_work / a.delta_w,
        "optimization": opt,
        "report": report,
    });
    Ok(Outcome {
        text: json_text(&value),
        diagnostics,
    })
}

fn grid(from: f64, to: f64, steps: usize) -> Vec<f64> {
    if steps == 0 {
        return vec![from];
    }
    (0..=steps)
        .map(|k| from + (to - from) * k as f64 / steps as f64)
        .collect()
}

fn cmd_engine_sweep(a: &SweepArgs) -> Result<Outcome, CliError> {
    let to = a.to.unwrap_or(a.beta_d_delta);
    if !(a.beta_d_delta > 0.0) || !(a.from >= 0.0) || !(to >= a.from) {
        return Err(CliError::Usage(
            "need beta_d_delta > 0 and 0 <= from <= to".into(),
        ));
    }
    let rows = engine::sweep(&grid(a.from, to, a.steps), a.beta_d_delta, a.policy)?;
    let mut out = String::from(
        "beta_delta,p_e,epsilon,heat_over_delta,net_over_delta,eta_2cy,eta_carnot,converged\n",
    );
    let mut diagnostics = Vec::new();
    for r in &rows {
        if !r.converged {
            diagnostics.push(format!(
                "impurity optimization did not converge at beta_delta={}",
                fmt12(r.beta_delta)
            ));
        }
        out += &csv_row(&[
            fmt12(r.beta_delta),
            fmt12(r.p_e),
            fmt12(r.epsilon),
            fmt12(r.heat_over_delta),
            fmt12(r.net_over_delta),
            fmt_opt(r.eta_2cy),
            fmt12(r.eta_carnot),
            r.converged.to_string(),
        ]);
    }
    out += &format!(
        "# engine sweep beta_d_delta={} policy={} from={} to={} steps={}\n",
        fmt12(a.beta_d_delta),
        a.policy,
        fmt12(a.from),
        fmt12(to),
        a.steps
    );
    Ok(Outcome {
        text: out,
        diagnostics,
    })
}

fn cmd_engine_frontier(a: &FrontierArgs) -> Result<Outcome, CliError> {
    let pes = match &a.pe {
        Some(v) => v.clone(),
        None => (1..=a.steps.max(1))
            .map(|k| 0.5 * k as f64 / a.steps.max(1) as f64)
            .collect(),
    };
    let rows = engine::frontier(&pes, &a.beta_d_delta, a.policy)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut out =
        String::from("beta_d_delta,p_e,beta_delta,epsilon,net_over_delta,eta_2cy,converged\n");
    let mut diagnostics = Vec::new();
    for r in &rows {
        if !r.converged {
            diagnostics.push(format!(
                "impurity optimization did not converge at p_e={} beta_d_delta={}",
                fmt12(r.p_e),
                fmt12(r.beta_d_delta)
            ));
        }
        out += &csv_row(&[
            fmt12(r.beta_d_delta),
            fmt12(r.p_e),
            fmt12(r.beta_delta),
            fmt12(r.epsilon),
            fmt12(r.net_over_delta),
            fmt_opt(r.eta_2cy),
            r.converged.to_string(),
        ]);
    }
    let pe_flag = match &a.pe {
        Some(v) => v.iter().map(|x| fmt12(*x)).collect::<Vec<_>>().join(";"),
        None => format!("grid:{}", a.steps),
    };
    out += &format!(
        "# engine frontier pe={} beta_d_delta={} policy={}\n",
        pe_flag,
        a.beta_d_delta
            .iter()
            .map(|x| fmt12(*x))
            .collect::<Vec<_>>()
            .join(";"),
        a.policy
    );
    Ok(Outcome {
        text: out,
        diagnostics,
    })
}

fn cmd_engine_optimize(a: &OptimizeArgs) -> Result<Outcome, CliError> {
    let result = match a.policy {
        Policy::OptPower => engine::optimize_epsilon_power(a.pe, a.beta_d_delta),
        Policy::OptEta => engine::optimize_epsilon_eta(a.pe),
        other => {
            return Err(CliError::Usage(format!(
                "policy {other} has nothing to optimize"
            )))
        }
    }
    .map_err(|e| CliError::Usage(e.to_string()))?;
    let diagnostics = if result.converged {
        Vec::new()
    } else {
        vec![format!(
            "optimization did not converge: residual {:e}; {}",
            result.residual,
            result.diagnostic.clone().unwrap_or_default()
        )]
    };
    let value = json!({
        "policy": a.policy.to_string(),
        "p_e": a.pe,
        "beta_d_delta": a.beta_d_delta,
        "result": result,
    });
    Ok(Outcome {
        text: json_text(&value),
        diagnostics,
    })
}

fn cmd_engine_threshold(a: &ThresholdArgs) -> Result<Outcome, CliError> {
    let mut out = String::from("beta_d_delta,beta_m_delta,beta_m_over_beta_d\n");
    let mut notes = String::new();
    for &b in &a.beta_d_delta {
        let f =
            engine::minimal_beta(b, 1.0, a.policy).map_err(|e| CliError::Usage(e.to_string()))?;
        // An empty positive-work region is an answer, not a convergence failure.
        if let Some(d) = &f.diagnostic {
            notes += &format!("# note: beta_d_delta={}: {d}\n", fmt12(b));
        }
        out += &csv_row(&[
            fmt12(b),
            fmt_opt(f.beta_m_delta),
            fmt_opt(f.beta_m_delta.map(|y| y / b)),
        ]);
    }
    out += &notes;
    out += &format!(
        "# engine threshold beta_d_delta={} policy={}\n",
        a.beta_d_delta
            .iter()
            .map(|x| fmt12(*x))
            .collect::<Vec<_>>()
            .join(";"),
        a.policy
    );
    Ok(Outcome::clean(out))
}
