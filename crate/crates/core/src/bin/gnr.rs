//! Command-line driver: material-point runs, full simulations, parameter
//! calibration, and mesh generation.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gnr::calibrate::{
    calibration_objective, nelder_mead, CalibrationProblem, FreeParam, FreeParamName,
    NelderMeadOpts,
};
use gnr::config::{
    parse_config, preset, serialize_config, GeometryConfig, Scenario, SimulationConfig,
};
use gnr::dataset::ExperimentalDataset;
use gnr::error::GnrError;
use gnr::fem::assemble::precompute_quadrature;
use gnr::fem::mesh::Mesh;
use gnr::fem::solve::{
    run_to_horizon, DirichletProgram, GlobalState, PerturbFace, Perturbation,
};
use gnr::histogram::folded_angle_deg;
use gnr::io::csv::write_timeseries_csv;
use gnr::io::vtk::write_vtk_snapshot;
use gnr::local::integrate_point;
use gnr::material::GaussPointState;
use gnr::scenario::{
    build_cruciform_mesh, build_strip_mesh, init_fiber_field, FiberInit, FiberPlane,
};
use gnr::tensor::{sym_eig, Ten2, Vec3};

#[derive(Parser)]
#[command(name = "gnr", about = "Growth-and-remodeling simulator for engineered tissue")]
struct Cli {
    #[command(flatten)]
    global: GlobalFlags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalFlags {
    /// Configuration file path or bundled preset name.
    #[arg(long, global = true)]
    config: Option<String>,
    /// Override the fiber-field random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker thread count (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory (default: current directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Validate inputs and print the resolved setup without solving.
    #[arg(long, global = true)]
    dry_run: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a single material point under a prescribed F(t) program.
    Point {
        /// Piecewise-linear deformation program file: lines of
        /// `t F11 F12 F13 F21 F22 F23 F31 F32 F33` (default: identity).
        #[arg(long)]
        program: Option<PathBuf>,
        /// Time-step size in days.
        #[arg(long, default_value_t = 0.1)]
        dt: f64,
        /// End time in days.
        #[arg(long, default_value_t = 28.0)]
        horizon: f64,
        /// Initial fiber angle in the x-y plane (degrees).
        #[arg(long, default_value_t = 0.0)]
        fiber_angle: f64,
    },
    /// Run a full scenario from a config file or preset.
    Run {
        /// Config path or preset name (overrides --config).
        target: Option<String>,
    },
    /// Fit density-kinetics parameters to the experimental curve.
    Calibrate {
        /// Free parameter spec `name:lower:upper` (a1, tau, h, a2,
        /// psi_crit, rho_th); repeatable.
        #[arg(long = "free", required = true)]
        free: Vec<String>,
        #[arg(long, default_value_t = 200)]
        max_evals: usize,
    },
    /// Build the scenario mesh and write it as a VTK file.
    Mesh,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    #[cfg(feature = "parallel")]
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: failed to configure {n} threads: {e}");
            return ExitCode::from(1);
        }
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let code = match &err {
                GnrError::Config(_) | GnrError::Io(_) | GnrError::Mesh(_) => 1,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), GnrError> {
    match &cli.command {
        Command::Point {
            program,
            dt,
            horizon,
            fiber_angle,
        } => cmd_point(&cli.global, program.as_deref(), *dt, *horizon, *fiber_angle),
        Command::Run { target } => cmd_run(&cli.global, target.as_deref()),
        Command::Calibrate { free, max_evals } => cmd_calibrate(&cli.global, free, *max_evals),
        Command::Mesh => cmd_mesh(&cli.global),
    }
}

fn load_config(flags: &GlobalFlags, target: Option<&str>) -> Result<SimulationConfig, GnrError> {
    let source = target.or(flags.config.as_deref()).ok_or_else(|| {
        GnrError::Config("no configuration given (use --config <path|preset>)".into())
    })?;
    let text = match preset(source) {
        Some(text) => text.to_string(),
        None => std::fs::read_to_string(source).map_err(|e| {
            GnrError::Config(format!("cannot read config file '{source}': {e}"))
        })?,
    };
    let mut cfg = parse_config(&text)?;
    if let Some(seed) = flags.seed {
        if let FiberInit::InPlaneUniform { seed: s, .. } = &mut cfg.fiber {
            *s = seed;
        }
    }
    Ok(cfg)
}

fn out_dir(flags: &GlobalFlags) -> PathBuf {
    flags.out.clone().unwrap_or_else(|| PathBuf::from("."))
}

/// Piecewise-linear deformation program.
struct DeformationProgram {
    /// (time, F) knots with ascending times.
    knots: Vec<(f64, Ten2)>,
}

impl DeformationProgram {
    fn identity() -> Self {
        DeformationProgram {
            knots: vec![(0.0, Ten2::identity())],
        }
    }

    fn from_file(path: &Path) -> Result<Self, GnrError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            GnrError::Config(format!("cannot read program '{}': {e}", path.display()))
        })?;
        let mut knots = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(|t| {
                    t.parse().map_err(|_| {
                        GnrError::Config(format!("program line {}: bad number '{t}'", i + 1))
                    })
                })
                .collect::<Result<_, _>>()?;
            if vals.len() != 10 {
                return Err(GnrError::Config(format!(
                    "program line {}: expected 10 values (t + 9 F components)",
                    i + 1
                )));
            }
            let mut f = Ten2::ZERO;
            for r in 0..3 {
                for c in 0..3 {
                    f.0[r][c] = vals[1 + 3 * r + c];
                }
            }
            if let Some(&(tp, _)) = knots.last() {
                if vals[0] <= tp {
                    return Err(GnrError::Config(format!(
                        "program line {}: times must be ascending",
                        i + 1
                    )));
                }
            }
            knots.push((vals[0], f));
        }
        if knots.is_empty() {
            return Ok(Self::identity());
        }
        Ok(DeformationProgram { knots })
    }

    fn at(&self, t: f64) -> Ten2 {
        let k = &self.knots;
        if t <= k[0].0 {
            return k[0].1;
        }
        for w in k.windows(2) {
            let (t0, f0) = w[0];
            let (t1, f1) = w[1];
            if t <= t1 {
                let a = (t - t0) / (t1 - t0);
                return f0.scale(1.0 - a) + f1.scale(a);
            }
        }
        k.last().unwrap().1
    }
}

fn cmd_point(
    flags: &GlobalFlags,
    program: Option<&Path>,
    dt: f64,
    horizon: f64,
    fiber_angle: f64,
) -> Result<(), GnrError> {
    let cfg = load_config(flags, None)?;
    let p = cfg.params.clone();
    let prog = match program {
        Some(path) => DeformationProgram::from_file(path)?,
        None => DeformationProgram::identity(),
    };
    if !(dt > 0.0) || horizon < 0.0 {
        return Err(GnrError::Config("need dt > 0 and horizon >= 0".into()));
    }
    if flags.dry_run {
        println!("{}", serialize_config(&cfg));
        return Ok(());
    }

    let dir = out_dir(flags);
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("point.csv");
    let mut out = String::from(
        "t_days,rho_co0,gamma_dot,fiber_angle_deg,psi_co,tau_eig_1,tau_eig_2,tau_eig_3,\
         diss_growth_m,diss_growth_co,diss_remodel,diss_density,diss_total\n",
    );
    let mut state = GaussPointState::virgin(
        FiberPlane::Xy.direction(fiber_angle.to_radians()),
    );
    let n_steps = if horizon == 0.0 {
        0
    } else {
        (horizon / dt).round().max(1.0) as usize
    };
    let mut write_row = |t: f64, s: &GaussPointState, res: &gnr::local::StepResult| {
        let (eigs, _) = sym_eig(&res.stress.tau_tilde);
        let d = &res.dissipation;
        out.push_str(&format!(
            "{t},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            s.rho_co0,
            s.gamma_dot,
            folded_angle_deg(&s.a_tilde, FiberPlane::Xy),
            res.stress.psi_co,
            eigs[0],
            eigs[1],
            eigs[2],
            d.term_growth_m,
            d.term_growth_co,
            d.term_remodel,
            d.term_density,
            d.total_mechanical,
        ));
    };
    let f0 = prog.at(0.0);
    let res0 = integrate_point(&f0, 0.0, 0.0, &state, &p)?;
    write_row(0.0, &state, &res0);
    for k in 1..=n_steps {
        let t = if k == n_steps { horizon } else { dt * k as f64 };
        let f = prog.at(t);
        let res = integrate_point(&f, t, t - (k - 1) as f64 * dt, &state, &p)?;
        state = res.state_new.clone();
        write_row(t, &state, &res);
    }
    std::fs::write(&path, out)?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Mesh, boundary programs, and perturbation setup for a config.
struct Scene {
    mesh: Mesh,
    programs: Vec<DirichletProgram>,
    perturbation: Option<Perturbation>,
}

fn build_scene(cfg: &SimulationConfig) -> Result<Scene, GnrError> {
    match (&cfg.scenario, &cfg.geometry) {
        (
            Scenario::Strip,
            GeometryConfig::Strip {
                length,
                width,
                thickness,
                nx,
                ny,
                nz,
            },
        ) => Ok(Scene {
            mesh: build_strip_mesh(*length, *width, *thickness, *nx, *ny, *nz)?,
            programs: vec![
                DirichletProgram::clamp("x_min_face"),
                DirichletProgram::clamp("x_max_face"),
            ],
            perturbation: None,
        }),
        (
            Scenario::Cruciform,
            GeometryConfig::Cruciform {
                arm_length,
                arm_width,
                thickness,
                divisions,
            },
        ) => {
            let mesh = build_cruciform_mesh(*arm_length, *arm_width, *thickness, divisions)?;
            let programs = vec![
                DirichletProgram::clamp("x_min_face"),
                DirichletProgram::clamp("x_max_face"),
                DirichletProgram::clamp("z_min_face"),
                DirichletProgram::clamp("z_max_face"),
            ];
            let perturbation = cfg.perturbation.map(|pc| Perturbation {
                time_days: pc.time_days,
                fraction: pc.fraction,
                event_dt: 0.01,
                faces: vec![
                    PerturbFace {
                        node_set: "x_min_face".into(),
                        outward: Vec3::new(-1.0, 0.0, 0.0),
                        group: 0,
                    },
                    PerturbFace {
                        node_set: "x_max_face".into(),
                        outward: Vec3::new(1.0, 0.0, 0.0),
                        group: 0,
                    },
                    PerturbFace {
                        node_set: "z_min_face".into(),
                        outward: Vec3::new(0.0, 0.0, -1.0),
                        group: 1,
                    },
                    PerturbFace {
                        node_set: "z_max_face".into(),
                        outward: Vec3::new(0.0, 0.0, 1.0),
                        group: 1,
                    },
                ],
            });
            Ok(Scene {
                mesh,
                programs,
                perturbation,
            })
        }
        (Scenario::MaterialPoint, _) => Err(GnrError::Config(
            "material_point configs have no mesh; use the `point` subcommand".into(),
        )),
        _ => Err(GnrError::Config("geometry does not match scenario".into())),
    }
}

fn cmd_run(flags: &GlobalFlags, target: Option<&str>) -> Result<(), GnrError> {
    let cfg = load_config(flags, target)?;
    if cfg.scenario == Scenario::MaterialPoint {
        return Err(GnrError::Config(
            "material_point configs have no mesh; use the `point` subcommand".into(),
        ));
    }
    let scene = build_scene(&cfg)?;
    if flags.dry_run {
        println!("{}", serialize_config(&cfg));
        println!(
            "# mesh: {} nodes, {} elements, dof bandwidth {}",
            scene.mesh.nodes.len(),
            scene.mesh.elements.len(),
            scene.mesh.dof_bandwidth()
        );
        return Ok(());
    }

    let dir = out_dir(flags);
    std::fs::create_dir_all(&dir)?;
    let vtk_dir = cfg
        .vtk_dir
        .clone()
        .map(|d| if d.is_absolute() { d } else { dir.join(d) })
        .unwrap_or_else(|| dir.clone());
    std::fs::create_dir_all(&vtk_dir)?;
    let csv_path = cfg
        .csv_path
        .clone()
        .map(|d| if d.is_absolute() { d } else { dir.join(d) })
        .unwrap_or_else(|| dir.join("timeseries.csv"));

    let qps = precompute_quadrature(&scene.mesh)?;
    let fibers = init_fiber_field(&scene.mesh, &cfg.fiber);
    let state = GlobalState::initial(&scene.mesh, &fibers);
    let out = run_to_horizon(
        &scene.mesh,
        &qps,
        state,
        &scene.programs,
        &cfg.params,
        &cfg.stepping,
        &cfg.snapshot_times,
        scene.perturbation.as_ref(),
        &mut |row, _| {
            println!(
                "t = {:7.3} d  iters = {:2}  mean_rho = {:8.4}  fx = {:+.6e}",
                row.time_days, row.newton_iters, row.mean_rho_co0, row.fx_max
            );
        },
    )?;

    write_timeseries_csv(&out.series, &csv_path)?;
    for snap in &out.snapshots {
        let path = vtk_dir.join(format!("snapshot_{}.vtk", snap.label));
        write_vtk_snapshot(
            &scene.mesh,
            &qps,
            &snap.state,
            &cfg.params,
            &format!("growth-remodeling snapshot at {} days", snap.time),
            &path,
        )?;
    }
    println!(
        "wrote {} and {} snapshots to {}",
        csv_path.display(),
        out.snapshots.len(),
        vtk_dir.display()
    );
    Ok(())
}

fn parse_free_spec(spec: &str) -> Result<FreeParam, GnrError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(GnrError::Config(format!(
            "--free expects name:lower:upper, got '{spec}'"
        )));
    }
    let name = match parts[0] {
        "a1" => FreeParamName::A1,
        "tau" => FreeParamName::Tau,
        "h" => FreeParamName::H,
        "a2" => FreeParamName::A2,
        "psi_crit" => FreeParamName::PsiCrit,
        "rho_th" => FreeParamName::RhoTh,
        other => {
            return Err(GnrError::Config(format!(
                "unknown free parameter '{other}'"
            )))
        }
    };
    let lo: f64 = parts[1]
        .parse()
        .map_err(|_| GnrError::Config(format!("bad lower bound '{}'", parts[1])))?;
    let hi: f64 = parts[2]
        .parse()
        .map_err(|_| GnrError::Config(format!("bad upper bound '{}'", parts[2])))?;
    Ok(FreeParam {
        name,
        lower: lo,
        upper: hi,
    })
}

fn cmd_calibrate(flags: &GlobalFlags, free: &[String], max_evals: usize) -> Result<(), GnrError> {
    let cfg = load_config(flags, None)?;
    let free: Vec<FreeParam> = free
        .iter()
        .map(|s| parse_free_spec(s))
        .collect::<Result<_, _>>()?;
    let mut problem = CalibrationProblem::with_defaults(
        free,
        cfg.params.clone(),
        ExperimentalDataset::bundled(),
    );
    if let FiberInit::InPlaneUniform { seed, .. } = cfg.fiber {
        problem.fiber_seed = seed;
    }
    problem.validate()?;
    if flags.dry_run {
        println!("{}", serialize_config(&cfg));
        println!("# free parameters: {:?}", problem.free);
        return Ok(());
    }

    let dir = out_dir(flags);
    std::fs::create_dir_all(&dir)?;
    let base = &problem.base;
    let x0: Vec<f64> = problem
        .free
        .iter()
        .map(|f| {
            let v = match f.name {
                FreeParamName::A1 => base.a1,
                FreeParamName::Tau => base.tau,
                FreeParamName::H => base.h,
                FreeParamName::A2 => base.a2,
                FreeParamName::PsiCrit => base.psi_crit,
                FreeParamName::RhoTh => base.rho_th,
            };
            v.clamp(f.lower, f.upper)
        })
        .collect();
    let bounds: Vec<(f64, f64)> = problem.free.iter().map(|f| (f.lower, f.upper)).collect();

    let mut report = String::from("iteration,");
    for f in &problem.free {
        report.push_str(&format!("{:?},", f.name).to_lowercase());
    }
    report.push_str("objective\n");

    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut iteration = 0usize;
    let recorded = |x: &[f64]| -> f64 {
        iteration += 1;
        let value = calibration_objective(x, &problem).unwrap_or(f64::INFINITY);
        println!("eval {iteration}: x = {x:?}, objective = {value:.6e}");
        rows.push((x.to_vec(), value));
        value
    };
    let (x_best, f_best, evals) = nelder_mead(
        recorded,
        &x0,
        &bounds,
        &NelderMeadOpts {
            max_evals,
            ..Default::default()
        },
    );

    for (i, (x, v)) in rows.iter().enumerate() {
        report.push_str(&format!("{},", i + 1));
        for xv in x {
            report.push_str(&format!("{xv},"));
        }
        report.push_str(&format!("{v}\n"));
    }
    let report_path = dir.join("calibration_report.csv");
    std::fs::write(&report_path, report)?;

    let mut resolved = cfg.clone();
    resolved.params = problem.apply(&x_best);
    let resolved_path = dir.join("calibrated.gnr");
    std::fs::write(&resolved_path, serialize_config(&resolved))?;
    println!(
        "best objective {f_best:.6e} after {evals} evaluations; wrote {} and {}",
        report_path.display(),
        resolved_path.display()
    );
    Ok(())
}

fn cmd_mesh(flags: &GlobalFlags) -> Result<(), GnrError> {
    let cfg = load_config(flags, None)?;
    let scene = build_scene(&cfg)?;
    println!(
        "mesh: {} nodes, {} elements, dof bandwidth {}, volume {:.6} mm^3",
        scene.mesh.nodes.len(),
        scene.mesh.elements.len(),
        scene.mesh.dof_bandwidth(),
        scene.mesh.reference_volume()?
    );
    if flags.dry_run {
        return Ok(());
    }
    let dir = out_dir(flags);
    std::fs::create_dir_all(&dir)?;
    let qps = precompute_quadrature(&scene.mesh)?;
    let fibers = init_fiber_field(&scene.mesh, &cfg.fiber);
    let state = GlobalState::initial(&scene.mesh, &fibers);
    let path = dir.join("mesh.vtk");
    write_vtk_snapshot(
        &scene.mesh,
        &qps,
        &state,
        &cfg.params,
        "reference mesh",
        &path,
    )?;
    println!("wrote {}", path.display());
    Ok(())
}
