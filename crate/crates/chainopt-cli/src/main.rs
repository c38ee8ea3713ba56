//! Command-line front end: chattering constants, physical plans, cost
//! sweeps, surface meshes, state classification, junction-time recursions,
//! and a verification battery.
//!
//! Exit codes: 0 ok, 1 usage or malformed config, 2 solver failure,
//! 3 infeasible.

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use chainopt::chattering;
use chainopt::dynamics;
use chainopt::nonexistence;
use chainopt::oracle;
use chainopt::planner::{self, GapAxes, Problem7Spec, RestToRestSpec};
use chainopt::surfaces::SwitchingSurfaces;
use chainopt::{Bounds, PlanError, StateVector, SurfaceError};

const EXIT_USAGE: u8 = 1;
const EXIT_SOLVER: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "chainopt",
    version,
    about = "Time-optimal chain-of-integrator planning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the chattering constants and print them as JSON.
    Constants(ConstantsArgs),
    /// Run a planning config (problem7 | rest_to_rest | gap_surface).
    Plan(PlanArgs),
    /// Sweep the cost family over a range of attenuation rates (CSV).
    Sweep(SweepArgs),
    /// Dump the switching-surface mesh (CSV).
    Surfaces(SurfacesArgs),
    /// Classify a scaled state by region.
    Classify(ClassifyArgs),
    /// Run the junction-time recursion (CSV).
    Recursion(RecursionArgs),
    /// Run the verification battery.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct ConstantsArgs {
    /// Residual tolerance for the solver.
    #[arg(long, default_value_t = 1e-12, allow_negative_numbers = true)]
    tol: f64,
    /// Write JSON here instead of stdout.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct PlanArgs {
    /// JSON config file.
    #[arg(long)]
    config: String,
    /// Output base path; writes `<out>.json` and `<out>.csv`.
    #[arg(long)]
    out: Option<String>,
    /// Chattering cycles to generate.
    #[arg(long, default_value_t = 40)]
    cycles: u32,
    /// Trajectory sample spacing.
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 0.0)]
    from: f64,
    #[arg(long, default_value_t = 0.5)]
    to: f64,
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct SurfacesArgs {
    /// Comma-separated scales.
    #[arg(long, default_value = "1.0")]
    scales: String,
    /// Parameter samples per surface.
    #[arg(long, default_value_t = 200)]
    points: usize,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Comma-separated state `y1,y2,y3`.
    #[arg(long, allow_hyphen_values = true)]
    y: String,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct RecursionArgs {
    #[arg(long, default_value_t = 1.0)]
    tau1: f64,
    #[arg(long, default_value_t = 0.9)]
    tau2: f64,
    #[arg(short = 'n', long, default_value_t = 100_000)]
    steps: usize,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
enum PlanConfig {
    Problem7 {
        m0: f64,
        m3: f64,
        x01: f64,
        x04: f64,
        xf4: f64,
        #[serde(default)]
        mim: bool,
    },
    RestToRest {
        m: Vec<f64>,
        x4_from: f64,
        x4_to: f64,
    },
    GapSurface {
        m3: f64,
        vary: String,
        fixed: f64,
        a_values: Vec<f64>,
        b_values: Vec<f64>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // keep clap's rendering but normalize the usage exit code
            let is_help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if is_help {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_USAGE)
            };
        }
    };
    match cli.command {
        Command::Constants(a) => cmd_constants(a),
        Command::Plan(a) => cmd_plan(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Surfaces(a) => cmd_surfaces(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Recursion(a) => cmd_recursion(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn emit(out: &Option<String>, text: &str) -> ExitCode {
    match out {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                eprintln!("cannot write {path}: {e}");
                return ExitCode::from(EXIT_USAGE);
            }
            ExitCode::SUCCESS
        }
        None => {
            print!("{text}");
            ExitCode::SUCCESS
        }
    }
}

fn f(v: f64) -> serde_json::Value {
    // 17 significant digits keeps the round trip exact
    serde_json::Value::from(v)
}

fn cmd_constants(a: ConstantsArgs) -> ExitCode {
    if !(a.tol > 0.0) {
        eprintln!("tolerance must be positive");
        return ExitCode::from(EXIT_SOLVER);
    }
    let c = match chattering::solve_constants(a.tol) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_SOLVER);
        }
    };
    let r = c.residuals();
    let json = serde_json::json!({
        "alpha": f(c.alpha),
        "beta1": f(c.beta1),
        "beta2": f(c.beta2),
        "beta3": f(c.beta3),
        "tau1": f(c.tau1),
        "tau_inf": f(c.tau_inf),
        "j1": f(c.j1),
        "j_star": f(c.j_star),
        "residuals": {
            "cycle_y1": f(r[0]),
            "cycle_y2": f(r[1]),
            "cycle_y3": f(r[2]),
            "recursion_quadratic": f(r[3]),
            "recursion_constant": f(r[4]),
            "max": f(c.max_residual()),
        },
    });
    emit(
        &a.out,
        &format!("{}\n", serde_json::to_string_pretty(&json).unwrap()),
    )
}

fn audit_json(traj: &chainopt::Trajectory, bounds: &Bounds) -> serde_json::Value {
    let rep = dynamics::audit(traj, bounds);
    serde_json::json!({
        "worst_violation": f(rep.worst()),
        "control": { "max_abs": f(rep.control.max_abs), "violation": f(rep.control.max_violation) },
        "states": rep.states.iter().map(|s| serde_json::json!({
            "max_abs": f(s.max_abs),
            "violation": if s.max_violation.is_finite() { f(s.max_violation) } else { serde_json::Value::Null },
            "at_time": f(s.at_time),
        })).collect::<Vec<_>>(),
    })
}

fn schedule_json(pc: &chainopt::PiecewiseControl) -> serde_json::Value {
    pc.segments()
        .iter()
        .map(|s| serde_json::json!({ "duration": f(s.duration), "level": f(s.level) }))
        .collect::<Vec<_>>()
        .into()
}

fn plan_exit(e: &PlanError) -> ExitCode {
    eprintln!("{e:?}: {e}");
    match e {
        PlanError::DisplacementTooSmall | PlanError::Infeasible | PlanError::CruiseImpossible => {
            ExitCode::from(EXIT_INFEASIBLE)
        }
        PlanError::SubPlannerFailure => ExitCode::from(EXIT_SOLVER),
    }
}

fn cmd_plan(a: PlanArgs) -> ExitCode {
    let raw = match fs::read_to_string(&a.config) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("cannot read {}: {e}", a.config);
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let cfg: PlanConfig = match serde_json::from_str(&raw) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("malformed config: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match cfg {
        PlanConfig::Problem7 {
            m0,
            m3,
            x01,
            x04,
            xf4,
            mim,
        } => {
            let spec = Problem7Spec {
                m0,
                m3,
                x01,
                x04,
                xf4,
            };
            let plan = if mim {
                planner::solve_problem7_mim(&spec)
            } else {
                let c = match chattering::solve_constants(1e-12) {
                    Ok(c) => c,
                    Err(e) => {
                        eprintln!("{e}");
                        return ExitCode::from(EXIT_SOLVER);
                    }
                };
                planner::solve_problem7(&spec, &c, a.cycles)
            };
            let plan = match plan {
                Ok(p) => p,
                Err(e) => return plan_exit(&e),
            };
            let traj = plan.trajectory(a.dt);
            let bounds =
                Bounds::from_values(&[m0, f64::INFINITY, f64::INFINITY, m3, f64::INFINITY])
                    .expect("valid bounds");
            let json = serde_json::json!({
                "t_inf": f(plan.t_inf),
                "t_f": f(plan.t_f),
                "x_inf4": f(plan.x_inf4),
                "junction_times": plan.junction_times.iter().map(|&t| f(t)).collect::<Vec<_>>(),
                "schedule": schedule_json(&plan.control),
                "audit": audit_json(&traj, &bounds),
            });
            write_plan_outputs(&a.out, &json, &traj)
        }
        PlanConfig::RestToRest { m, x4_from, x4_to } => {
            let bounds = match Bounds::from_values(&m) {
                Ok(b) => b,
                Err(e) => {
                    eprintln!("malformed config: {e}");
                    return ExitCode::from(EXIT_USAGE);
                }
            };
            let spec = RestToRestSpec {
                bounds,
                x4_from,
                x4_to,
            };
            let plan = match planner::plan_rest_to_rest(&spec, 1e-9) {
                Ok(p) => p,
                Err(e) => return plan_exit(&e),
            };
            let traj = plan.trajectory(a.dt);
            let json = serde_json::json!({
                "t_f": f(plan.t_f_opt),
                "t_f_opt": f(plan.t_f_opt),
                "t_f_mim": f(plan.t_f_mim),
                "x01": f(plan.x01_opt),
                "t_inf": f(plan.t_inf_first),
                "schedule": schedule_json(&plan.control),
                "audit": audit_json(&traj, &plan.spec.bounds),
            });
            write_plan_outputs(&a.out, &json, &traj)
        }
        PlanConfig::GapSurface {
            m3,
            vary,
            fixed,
            a_values,
            b_values,
        } => {
            let axes = match vary.as_str() {
                "m0_m1" => GapAxes::M0M1 { m2: fixed },
                "m1_m2" => GapAxes::M1M2 { m0: fixed },
                other => {
                    eprintln!("malformed config: unknown vary `{other}`");
                    return ExitCode::from(EXIT_USAGE);
                }
            };
            let g = match planner::gap_surface(axes, m3, &a_values, &b_values) {
                Ok(g) => g,
                Err(e) => return plan_exit(&e),
            };
            emit(&a.out.map(|o| format!("{o}.csv")), &g.to_csv())
        }
    }
}

fn write_plan_outputs(
    out: &Option<String>,
    json: &serde_json::Value,
    traj: &chainopt::Trajectory,
) -> ExitCode {
    let text = format!("{}\n", serde_json::to_string_pretty(json).unwrap());
    match out {
        Some(base) => {
            if let Err(e) = fs::write(format!("{base}.json"), &text) {
                eprintln!("cannot write {base}.json: {e}");
                return ExitCode::from(EXIT_USAGE);
            }
            if let Err(e) = fs::write(format!("{base}.csv"), traj.to_csv()) {
                eprintln!("cannot write {base}.csv: {e}");
                return ExitCode::from(EXIT_USAGE);
            }
            ExitCode::SUCCESS
        }
        None => {
            print!("{text}");
            ExitCode::SUCCESS
        }
    }
}

fn cmd_sweep(a: SweepArgs) -> ExitCode {
    if !(a.step > 0.0) || a.to < a.from || a.from < 0.0 || a.to >= 1.0 {
        eprintln!("invalid sweep range");
        return ExitCode::from(EXIT_USAGE);
    }
    let mut csv = String::from("alpha,tau1,beta1,beta2,j1,j\n");
    let n = ((a.to - a.from) / a.step).round() as usize;
    for i in 0..=n {
        let alpha = a.from + a.step * i as f64;
        if alpha >= 1.0 {
            break;
        }
        match chattering::family_point(alpha, 1e-10) {
            Ok(p) => csv.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                p.alpha, p.tau1, p.beta1, p.beta2, p.j1, p.j
            )),
            Err(e) => {
                eprintln!("alpha = {alpha}: {e}");
                return ExitCode::from(EXIT_SOLVER);
            }
        }
    }
    emit(&a.out, &csv)
}

fn cmd_surfaces(a: SurfacesArgs) -> ExitCode {
    let scales: Result<Vec<f64>, _> = a.scales.split(',').map(str::parse::<f64>).collect();
    let scales = match scales {
        Ok(s) if !s.is_empty() => s,
        _ => {
            eprintln!("invalid --scales");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let c = match chattering::solve_constants(1e-12) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_SOLVER);
        }
    };
    let s = match SwitchingSurfaces::new(&c, 1e-10) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_SOLVER);
        }
    };
    emit(&a.out, &s.mesh_csv(&scales, a.points.max(2)))
}

fn cmd_classify(a: ClassifyArgs) -> ExitCode {
    let parts: Result<Vec<f64>, _> = a.y.split(',').map(str::parse::<f64>).collect();
    let y = match parts {
        Ok(v) if v.len() == 3 => [v[0], v[1], v[2]],
        _ => {
            eprintln!("--y must be y1,y2,y3");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let c = match chattering::solve_constants(1e-12) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_SOLVER);
        }
    };
    let s = match SwitchingSurfaces::new(&c, 1e-10) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_SOLVER);
        }
    };
    match s.classify(y, a.tol) {
        Ok(label) => {
            println!("{label}");
            ExitCode::SUCCESS
        }
        Err(SurfaceError::NegativeY3) => {
            eprintln!("NegativeY3");
            ExitCode::from(EXIT_INFEASIBLE)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(EXIT_SOLVER)
        }
    }
}

fn cmd_recursion(a: RecursionArgs) -> ExitCode {
    let st = match nonexistence::run_recursion(a.tau1, a.tau2, a.steps.max(10)) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let mut csv = String::from("i,tau_i,r_i,i_times_r_i,raabe\n");
    let mut tau = a.tau1;
    for (idx, &r) in st.rs.iter().enumerate() {
        let i = idx + 1;
        let raabe = i as f64 * r / (1.0 - r);
        csv.push_str(&format!(
            "{i},{tau:.16e},{r:.16e},{:.16e},{raabe:.16e}\n",
            i as f64 * r
        ));
        tau *= 1.0 - r;
    }
    emit(&a.out, &csv)
}

fn cmd_verify(a: VerifyArgs) -> ExitCode {
    let mut ok = true;
    let mut check = |name: &str, pass: bool, detail: String| {
        println!("{}  {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        ok &= pass;
    };

    let c = match chattering::solve_constants(1e-12) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_SOLVER);
        }
    };
    check(
        "constants residuals",
        c.max_residual() <= a.tol.max(1e-12),
        format!("max residual {:.3e}", c.max_residual()),
    );

    let e1 = StateVector::new(vec![1.0, 0.0, 0.0]);
    let y = dynamics::propagate(&e1, &chattering::cycle_control(&c, 1));
    let junc = (y.get(1) - c.alpha)
        .abs()
        .max(y.get(2).abs())
        .max(y.get(3).abs());
    check("junction state", junc <= 1e-9, format!("drift {junc:.3e}"));

    let ls = oracle::residual_landscape(
        oracle::LandscapeSystem::ChatteringConstants,
        &[0.01, 0.01, 0.01],
        &[0.99, 0.99, 0.99],
        48,
    );
    check(
        "constants uniqueness",
        ls.basin_count() == 1,
        format!("{} basin(s)", ls.basin_count()),
    );

    for (name, sys) in [
        (
            "one-switch-to-origin emptiness",
            oracle::LandscapeSystem::OneSwitchToOrigin,
        ),
        (
            "one-switch-to-alpha emptiness",
            oracle::LandscapeSystem::OneSwitchToAlpha,
        ),
    ] {
        let ls = oracle::residual_landscape(sys, &[0.02, 0.005], &[12.0, 1.0], 120);
        check(
            name,
            ls.min_residual >= 1e-3,
            format!("min residual {:.3e}", ls.min_residual),
        );
    }

    match SwitchingSurfaces::new(&c, 1e-10) {
        Ok(s) => {
            let d = (s.coupling(s.t1_star) - s.coupling(s.t2_star)).abs();
            check(
                "surface corner",
                d <= 1e-9 && (s.r_star - 6.4979).abs() < 1e-3,
                format!("r* = {:.6}, corner residual {d:.3e}", s.r_star),
            );
        }
        Err(e) => check("surface corner", false, format!("{e}")),
    }

    let grid: Vec<f64> = (0..400).map(|i| i as f64 * 0.02).collect();
    let dev = chattering::homogeneity_deviation(&c, c.alpha, &grid);
    check(
        "homogeneity (cycle shift)",
        dev <= 1e-8,
        format!("deviation {dev:.3e}"),
    );

    let st = nonexistence::run_recursion(1.0, 0.9, 100_000).expect("valid seed");
    check(
        "recursion Raabe limit",
        (st.final_i_r - 0.25).abs() <= 0.005 && (st.final_raabe - 0.25).abs() <= 0.005,
        format!(
            "i*r_i -> {:.6}, raabe -> {:.6}",
            st.final_i_r, st.final_raabe
        ),
    );

    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_SOLVER)
    }
}
