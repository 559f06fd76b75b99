//! Command-line surface for battery passivity checks, extraction runs and
//! figure sweeps. Verdict commands emit JSON; sweeps emit CSV. Exit codes:
//! 0 success / verdict-positive, 1 verdict-negative (check commands),
//! 2 input error.

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qbattery::json::{density_from_json, hamiltonian_from_json, tripartite_from_json, MatrixJson};
use qbattery::random::derive_seed;
use qbattery::{
    bell_mixture, cptp_local_passive, energy, entanglement_entropy, ergotropy, extract_ncptp,
    max_over_rank_two, max_work_cptp, ncptp_local_passive, purify, tensor_copies, witness,
    xy_hamiltonian, BipartiteBattery, ExtractionResult, Hamiltonian,
    OptimizerConfig, ParamSpace, PassivityVerdict, TripartiteState, XYParams,
};

const PURIFY_CUTOFF: f64 = 1e-12;

#[derive(Parser)]
#[command(
    name = "qbattery",
    about = "Local passivity certification and extractable-energy optimization for bipartite quantum batteries",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify CPTP-local passivity of a battery (exit 1 when not passive).
    #[command(name = "check-cptp")]
    CheckCptp(CheckArgs),
    /// Certify NCPTP-local passivity of a dilation (exit 1 when not passive).
    #[command(name = "check-ncptp")]
    CheckNcptp(CheckArgs),
    /// Maximum unitarily extractable energy and the passive state.
    #[command(name = "ergotropy")]
    Ergotropy(BatteryArgs),
    /// Optimized NCPTP extraction from a pure dilation.
    #[command(name = "extract-ncp")]
    ExtractNcp(ExtractArgs),
    /// Local-CPTP maximum-work formula value, raw and clamped.
    #[command(name = "max-cp")]
    MaxCp(BatteryArgs),
    /// Witness of non-complete positivity from an observed extraction.
    #[command(name = "witness")]
    Witness(WitnessArgs),
    /// Certify a battery and its 2-copy version (exit 1 unless both pass).
    #[command(name = "verify-theorem1")]
    VerifyTheorem1(CheckArgs),
    /// Sweep p1 over the passive region; CSV of (r, p1, S, dW_ncp_p).
    #[command(name = "fig1")]
    Fig1(Fig1Args),
    /// Sweep r maximizing NCPTP extraction over rank-two states; CSV.
    #[command(name = "fig2")]
    Fig2(Fig2Args),
}

/// Battery selection: either the two-Bell-mixture/XY family via --p1/--p/--q/--r,
/// or explicit JSON matrix files via --state/--ham.
#[derive(Args, Clone)]
struct BatteryArgs {
    /// Weight of |psi+> in the two-Bell mixture family.
    #[arg(long)]
    p1: Option<f64>,
    /// sigma_z field on A (energy e), default 0.5.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    p: f64,
    /// sigma_z field on B (energy e), default 0.5.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    q: f64,
    /// XY interaction strength (energy e), default 1.0.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    r: f64,
    /// State matrix JSON file ({"dims":..,"re":..,"im":..}).
    #[arg(long)]
    state: Option<String>,
    /// Hamiltonian matrix JSON file.
    #[arg(long)]
    ham: Option<String>,
    /// Output file; the same bytes also go to stdout.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Clone)]
struct CheckArgs {
    #[command(flatten)]
    battery: BatteryArgs,
    /// Certification tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args, Clone)]
struct BudgetArgs {
    /// RNG seed; identical seeds give byte-identical outputs.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 40)]
    population: usize,
    #[arg(long, default_value_t = 20_000)]
    max_evals: usize,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    /// Optimizer tolerance.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Args, Clone)]
struct ExtractArgs {
    #[command(flatten)]
    battery: BatteryArgs,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args, Clone)]
struct WitnessArgs {
    #[command(flatten)]
    battery: BatteryArgs,
    /// Observed extracted energy (units of e).
    #[arg(long, allow_negative_numbers = true)]
    observed: f64,
}

#[derive(Args, Clone)]
struct Fig1Args {
    /// Interaction strengths to sweep (repeat the flag); default 1.0 1.5 2.0.
    #[arg(long = "r", num_args = 1.., allow_negative_numbers = true)]
    r_values: Vec<f64>,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    p: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    q: f64,
    /// Number of p1 grid points.
    #[arg(long, default_value_t = 16)]
    grid: usize,
    /// Upper end of the p1 grid; defaults to the passive-region bound
    /// (1 - p/r_min)/2 for the smallest requested r.
    #[arg(long)]
    p1_max: Option<f64>,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Clone)]
struct Fig2Args {
    #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
    r_min: f64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    r_max: f64,
    /// Number of r grid points.
    #[arg(long, default_value_t = 9)]
    grid: usize,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    p: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    q: f64,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Serialize)]
struct VerdictOut {
    kind: String,
    passive: bool,
    min_eig: f64,
    herm_defect: f64,
    norm_residual: f64,
    details: String,
}

impl From<&PassivityVerdict> for VerdictOut {
    fn from(v: &PassivityVerdict) -> Self {
        Self {
            kind: format!("{:?}", v.kind),
            passive: v.passive,
            min_eig: v.min_eig,
            herm_defect: v.herm_defect,
            norm_residual: v.norm_residual,
            details: v.details.clone(),
        }
    }
}

#[derive(Serialize)]
struct ErgotropyOut {
    ergotropy_energy_e: f64,
    initial_energy_e: f64,
    passive_energy_e: f64,
    passive_state: MatrixJson,
}

#[derive(Serialize)]
struct ExtractOut {
    delta_w_energy_e: f64,
    evaluations: usize,
    converged: bool,
    seed: u64,
    parametrization: String,
    params: Vec<f64>,
}

impl From<&ExtractionResult> for ExtractOut {
    fn from(r: &ExtractionResult) -> Self {
        Self {
            delta_w_energy_e: r.delta_w,
            evaluations: r.evaluations,
            converged: r.converged,
            seed: r.seed,
            parametrization: match r.space {
                ParamSpace::Cartan => "cartan".into(),
                ParamSpace::Givens { dim } => format!("givens{dim}"),
            },
            params: r.params.clone(),
        }
    }
}

#[derive(Serialize)]
struct MaxCpOut {
    raw_energy_e: f64,
    clamped_energy_e: f64,
    c_min: f64,
    degenerate: bool,
}

#[derive(Serialize)]
struct WitnessOut {
    cp_bound_energy_e: f64,
    observed_energy_e: f64,
    is_ncptp: bool,
    degenerate_c: bool,
}

#[derive(Serialize)]
struct Theorem1Out {
    one_copy: VerdictOut,
    two_copy: VerdictOut,
    both_passive: bool,
}

enum Outcome {
    Ok,
    VerdictNegative,
}

fn build_battery(args: &BatteryArgs) -> Result<BipartiteBattery, String> {
    match (&args.state, &args.ham, args.p1) {
        (Some(state_path), Some(ham_path), None) => {
            let state_text =
                fs::read_to_string(state_path).map_err(|e| format!("{state_path}: {e}"))?;
            let ham_text =
                fs::read_to_string(ham_path).map_err(|e| format!("{ham_path}: {e}"))?;
            let rho = density_from_json(&state_text).map_err(|e| format!("--state: {e}"))?;
            let ham =
                hamiltonian_from_json(&ham_text).map_err(|e| format!("--ham: {e}"))?;
            BipartiteBattery::new(rho, ham).map_err(|e| e.to_string())
        }
        (None, None, Some(p1)) => {
            let rho = bell_mixture(p1).map_err(|e| e.to_string())?;
            let params =
                XYParams::new(args.p, args.q, args.r).map_err(|e| e.to_string())?;
            Ok(BipartiteBattery::new(rho, xy_hamiltonian(params))
                .expect("family dims always match"))
        }
        (None, Some(_), _) | (Some(_), None, _) => Err("--state and --ham must be given together".to_string()),
        (Some(_), Some(_), Some(_)) => Err("give either --p1 (family) or --state/--ham (files), not both".to_string()),
        (None, None, None) => Err("battery unspecified: give --p1 or --state/--ham".to_string()),
    }
}

fn build_dilation(args: &BatteryArgs) -> Result<(TripartiteState, Hamiltonian), String> {
    match (&args.state, &args.ham, args.p1) {
        (Some(state_path), Some(ham_path), None) => {
            let state_text =
                fs::read_to_string(state_path).map_err(|e| format!("{state_path}: {e}"))?;
            let ham_text =
                fs::read_to_string(ham_path).map_err(|e| format!("{ham_path}: {e}"))?;
            let state =
                tripartite_from_json(&state_text).map_err(|e| format!("--state: {e}"))?;
            let ham =
                hamiltonian_from_json(&ham_text).map_err(|e| format!("--ham: {e}"))?;
            Ok((state, ham))
        }
        (None, None, Some(p1)) => {
            let rho = bell_mixture(p1).map_err(|e| e.to_string())?;
            let state = purify(&rho, PURIFY_CUTOFF).map_err(|e| e.to_string())?;
            let params =
                XYParams::new(args.p, args.q, args.r).map_err(|e| e.to_string())?;
            Ok((state, xy_hamiltonian(params)))
        }
        _ => Err("dilation unspecified: give --p1 or --state (tripartite) with --ham".to_string()),
    }
}

fn optimizer_config(b: &BudgetArgs) -> OptimizerConfig {
    OptimizerConfig {
        seed: b.seed,
        population: b.population,
        max_evals: b.max_evals,
        restarts: b.restarts,
        tol: b.tol,
        bounds: Vec::new(),
    }
}

fn emit(text: &str, out: &Option<String>) -> Result<(), String> {
    println!("{text}");
    if let Some(path) = out {
        fs::write(path, format!("{text}\n")).map_err(|e| format!("{path}: {e}"))?;
    }
    Ok(())
}

fn emit_json<T: Serialize>(value: &T, out: &Option<String>) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).expect("serialization cannot fail");
    emit(&text, out)
}

fn run(cli: Cli) -> Result<Outcome, String> {
    match cli.cmd {
        Command::CheckCptp(args) => {
            let battery = build_battery(&args.battery)?;
            let verdict =
                cptp_local_passive(&battery, args.tol).map_err(|e| e.to_string())?;
            emit_json(&VerdictOut::from(&verdict), &args.battery.out)?;
            Ok(if verdict.passive {
                Outcome::Ok
            } else {
                Outcome::VerdictNegative
            })
        }
        Command::CheckNcptp(args) => {
            let (state, ham) = build_dilation(&args.battery)?;
            let verdict =
                ncptp_local_passive(&state, &ham, args.tol).map_err(|e| e.to_string())?;
            emit_json(&VerdictOut::from(&verdict), &args.battery.out)?;
            Ok(if verdict.passive {
                Outcome::Ok
            } else {
                Outcome::VerdictNegative
            })
        }
        Command::Ergotropy(args) => {
            let battery = build_battery(&args)?;
            let (dw, passive) =
                ergotropy(&battery.rho, &battery.ham).map_err(|e| e.to_string())?;
            let initial = energy(&battery.rho, &battery.ham).map_err(|e| e.to_string())?;
            let out = ErgotropyOut {
                ergotropy_energy_e: dw,
                initial_energy_e: initial,
                passive_energy_e: initial - dw,
                passive_state: MatrixJson::from_matrix(passive.matrix(), passive.dims()),
            };
            emit_json(&out, &args.out)?;
            Ok(Outcome::Ok)
        }
        Command::ExtractNcp(args) => {
            let (state, ham) = build_dilation(&args.battery)?;
            let cfg = optimizer_config(&args.budget);
            let res = extract_ncptp(&state, &ham, &cfg).map_err(|e| e.to_string())?;
            emit_json(&ExtractOut::from(&res), &args.battery.out)?;
            Ok(Outcome::Ok)
        }
        Command::MaxCp(args) => {
            let battery = build_battery(&args)?;
            let m = max_work_cptp(&battery).map_err(|e| e.to_string())?;
            let out = MaxCpOut {
                raw_energy_e: m.raw,
                clamped_energy_e: m.clamped,
                c_min: m.c_min,
                degenerate: m.degenerate,
            };
            emit_json(&out, &args.out)?;
            Ok(Outcome::Ok)
        }
        Command::Witness(args) => {
            let battery = build_battery(&args.battery)?;
            let v = witness(&battery, args.observed).map_err(|e| e.to_string())?;
            let out = WitnessOut {
                cp_bound_energy_e: v.cp_bound,
                observed_energy_e: v.observed,
                is_ncptp: v.is_ncptp,
                degenerate_c: v.degenerate_c,
            };
            emit_json(&out, &args.battery.out)?;
            Ok(Outcome::Ok)
        }
        Command::VerifyTheorem1(args) => {
            let battery = build_battery(&args.battery)?;
            let one = cptp_local_passive(&battery, args.tol).map_err(|e| e.to_string())?;
            let two_copies = tensor_copies(&battery, 2).map_err(|e| e.to_string())?;
            let two =
                cptp_local_passive(&two_copies, args.tol).map_err(|e| e.to_string())?;
            let both = one.passive && two.passive;
            let out = Theorem1Out {
                one_copy: VerdictOut::from(&one),
                two_copy: VerdictOut::from(&two),
                both_passive: both,
            };
            emit_json(&out, &args.battery.out)?;
            Ok(if both {
                Outcome::Ok
            } else {
                Outcome::VerdictNegative
            })
        }
        Command::Fig1(args) => {
            let csv = run_fig1(&args)?;
            emit(csv.trim_end(), &args.out)?;
            Ok(Outcome::Ok)
        }
        Command::Fig2(args) => {
            let csv = run_fig2(&args)?;
            emit(csv.trim_end(), &args.out)?;
            Ok(Outcome::Ok)
        }
    }
}

fn run_fig1(args: &Fig1Args) -> Result<String, String> {
    let r_values = if args.r_values.is_empty() {
        vec![1.0, 1.5, 2.0]
    } else {
        args.r_values.clone()
    };
    if args.grid < 2 {
        return Err("--grid must be at least 2".to_string());
    }
    let r_min = r_values.iter().cloned().fold(f64::INFINITY, f64::min);
    if r_min <= args.p.max(0.0) {
        return Err(format!(
            "r = {r_min} leaves no CPTP-local passive p1 range for p = {}",
            args.p
        ));
    }
    let p1_max = args.p1_max.unwrap_or(0.5 * (1.0 - args.p / r_min));
    if !(0.0..=0.5).contains(&p1_max) {
        return Err(format!("p1 grid end {p1_max} outside [0, 0.5]"));
    }
    // every (r, p1) pair must sit inside the passive region r >= p/(1-2 p1)
    for &r in &r_values {
        let bound = args.p / (1.0 - 2.0 * p1_max);
        if r < bound - 1e-12 {
            return Err(format!(
                "r = {r} is below the passive threshold {bound:.6} for p1 up to {p1_max}"
            ));
        }
    }

    let mut csv = String::from("r_energy_e,p1,s_ebits,dw_ncp_p_energy_e,seed\n");
    for (ri, &r) in r_values.iter().enumerate() {
        let params = XYParams::new(args.p, args.q, r).map_err(|e| e.to_string())?;
        let ham = xy_hamiltonian(params);
        for k in 0..args.grid {
            let p1 = p1_max * k as f64 / (args.grid - 1) as f64;
            let rho = bell_mixture(p1).map_err(|e| e.to_string())?;
            let state = purify(&rho, PURIFY_CUTOFF).map_err(|e| e.to_string())?;
            let s = entanglement_entropy(&state).map_err(|e| e.to_string())?;
            let mut cfg = optimizer_config(&args.budget);
            cfg.seed = derive_seed(args.budget.seed, (ri * args.grid + k) as u64);
            let res = extract_ncptp(&state, &ham, &cfg).map_err(|e| e.to_string())?;
            csv.push_str(&format!(
                "{r},{p1},{:.12e},{:.12e},{}\n",
                s, res.delta_w, args.budget.seed
            ));
        }
    }
    Ok(csv)
}

fn run_fig2(args: &Fig2Args) -> Result<String, String> {
    if args.grid < 2 {
        return Err("--grid must be at least 2".to_string());
    }
    let mut csv = String::from("r_energy_e,dw_ncp_rank2_max_energy_e,dw_cp_max_clamped_energy_e,seed\n");
    for k in 0..args.grid {
        let r = args.r_min + (args.r_max - args.r_min) * k as f64 / (args.grid - 1) as f64;
        let params = XYParams::new(args.p, args.q, r).map_err(|e| e.to_string())?;
        let mut cfg = optimizer_config(&args.budget);
        cfg.seed = derive_seed(args.budget.seed, k as u64);
        let (res, best_state) =
            max_over_rank_two(params, &cfg).map_err(|e| e.to_string())?;
        let battery = BipartiteBattery::new(best_state, xy_hamiltonian(params))
            .map_err(|e| e.to_string())?;
        let cp = max_work_cptp(&battery).map_err(|e| e.to_string())?;
        csv.push_str(&format!(
            "{r},{:.12e},{:.12e},{}\n",
            res.delta_w, cp.clamped, args.budget.seed
        ));
    }
    Ok(csv)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::from(0),
        Ok(Outcome::VerdictNegative) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
