//! Quasi-static global Newton solver and time marching.

use std::collections::BTreeMap;

use crate::error::GnrError;
use crate::fem::assemble::{assemble, Assembly};
use crate::fem::hex8::{QpData, N_QP};
use crate::fem::mesh::Mesh;
use crate::material::{GaussPointState, MaterialParams};
use crate::tensor::Vec3;

/// Prescribed-displacement value as a function of time.
#[derive(Debug, Clone, PartialEq)]
pub enum DirichletValue {
    /// Homogeneous (clamped) for all time.
    Zero,
    /// Zero before `from_time`, the constant `vector` from then on.
    HeldStep { from_time: f64, vector: Vec3 },
}

/// Dirichlet boundary program on a named node set.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletProgram {
    pub node_set: String,
    pub dof_mask: [bool; 3],
    pub value: DirichletValue,
}

impl DirichletProgram {
    pub fn clamp(node_set: &str) -> Self {
        DirichletProgram {
            node_set: node_set.into(),
            dof_mask: [true, true, true],
            value: DirichletValue::Zero,
        }
    }

    pub fn value_at(&self, t: f64) -> Vec3 {
        match &self.value {
            DirichletValue::Zero => Vec3::ZERO,
            DirichletValue::HeldStep { from_time, vector } => {
                if t >= *from_time - 1e-12 {
                    *vector
                } else {
                    Vec3::ZERO
                }
            }
        }
    }
}

/// Full simulation state between steps.
#[derive(Debug, Clone)]
pub struct GlobalState {
    pub displacements: Vec<Vec3>,
    pub gp_states: Vec<GaussPointState>,
    pub time: f64,
}

impl GlobalState {
    /// Reference state at t = 0 from a per-QP fiber field.
    pub fn initial(mesh: &Mesh, fibers: &[Vec3]) -> Self {
        assert_eq!(fibers.len(), mesh.elements.len() * N_QP);
        GlobalState {
            displacements: vec![Vec3::ZERO; mesh.nodes.len()],
            gp_states: fibers.iter().map(|&a| GaussPointState::virgin(a)).collect(),
            time: 0.0,
        }
    }
}

/// Scalar outputs of an accepted step.
#[derive(Debug, Clone)]
pub struct StepReport {
    /// Reaction force per constrained node set: sum of internal-force
    /// entries at the set's constrained dofs.
    pub reactions: BTreeMap<String, Vec3>,
    /// Volume-weighted mean referential collagen density.
    pub mean_rho_co0: f64,
    /// Volume-weighted mean volume ratio J.
    pub mean_j: f64,
    /// Total Newton iterations over all (sub)steps.
    pub newton_iterations: usize,
    /// Number of dt bisections needed (0 = accepted at the requested dt).
    pub bisections: usize,
}

/// One accepted marching step in the exported time series.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesRow {
    pub time_days: f64,
    pub fx_min: f64,
    pub fx_max: f64,
    pub fz_min: f64,
    pub fz_max: f64,
    pub mean_rho_co0: f64,
    pub mean_j: f64,
    pub newton_iters: usize,
}

impl TimeSeriesRow {
    pub fn from_report(time: f64, rep: &StepReport) -> Self {
        let axis = |set: &str, c: usize| rep.reactions.get(set).map_or(0.0, |v| v[c]);
        TimeSeriesRow {
            time_days: time,
            fx_min: axis("x_min_face", 0),
            fx_max: axis("x_max_face", 0),
            fz_min: axis("z_min_face", 2),
            fz_max: axis("z_max_face", 2),
            mean_rho_co0: rep.mean_rho_co0,
            mean_j: rep.mean_j,
            newton_iters: rep.newton_iterations,
        }
    }
}

pub const MAX_GLOBAL_ITERS: usize = 25;
pub const MAX_STEP_BISECT_DEPTH: usize = 8;

fn constrained_dofs(
    mesh: &Mesh,
    programs: &[DirichletProgram],
) -> Result<Vec<bool>, GnrError> {
    let mut mask = vec![false; mesh.n_dofs()];
    for prog in programs {
        let set = mesh.node_set(&prog.node_set)?;
        for &n in set {
            for i in 0..3 {
                if prog.dof_mask[i] {
                    mask[3 * n + i] = true;
                }
            }
        }
    }
    Ok(mask)
}

fn apply_programs(
    mesh: &Mesh,
    programs: &[DirichletProgram],
    t: f64,
    disp: &mut [Vec3],
) -> Result<(), GnrError> {
    for prog in programs {
        let v = prog.value_at(t);
        let set = mesh.node_set(&prog.node_set)?;
        for &n in set {
            for i in 0..3 {
                if prog.dof_mask[i] {
                    disp[n][i] = v[i];
                }
            }
        }
    }
    Ok(())
}

fn volume_means(qps: &[[QpData; N_QP]], asm: &Assembly) -> (f64, f64) {
    let mut vol = 0.0;
    let mut rho = 0.0;
    let mut jsum = 0.0;
    for (e, eqps) in qps.iter().enumerate() {
        for (q, qp) in eqps.iter().enumerate() {
            let idx = e * N_QP + q;
            let w = qp.weight_detj;
            vol += w;
            rho += w * asm.trial_states[idx].rho_co0;
            jsum += w * asm.qp_results[idx].stress.j;
        }
    }
    (rho / vol, jsum / vol)
}

fn reactions(
    mesh: &Mesh,
    programs: &[DirichletProgram],
    internal_force: &[f64],
) -> Result<BTreeMap<String, Vec3>, GnrError> {
    let mut out = BTreeMap::new();
    for prog in programs {
        let set = mesh.node_set(&prog.node_set)?;
        let mut r = Vec3::ZERO;
        for &n in set {
            for i in 0..3 {
                if prog.dof_mask[i] {
                    r[i] += internal_force[3 * n + i];
                }
            }
        }
        out.insert(prog.node_set.clone(), r);
    }
    Ok(out)
}

/// One Newton solve from `state` to `t_new` at a single dt (no bisection).
#[allow(clippy::too_many_arguments)]
fn newton_solve(
    mesh: &Mesh,
    qps: &[[QpData; N_QP]],
    state: &GlobalState,
    t_new: f64,
    programs: &[DirichletProgram],
    p: &MaterialParams,
) -> Result<(GlobalState, StepReport), GnrError> {
    let dt = t_new - state.time;
    let mut disp = state.displacements.clone();
    apply_programs(mesh, programs, t_new, &mut disp)?;
    let constrained = constrained_dofs(mesh, programs)?;

    let mut guess: Option<Vec<GaussPointState>> = None;
    let mut best_residual = f64::INFINITY;
    for iter in 0..=MAX_GLOBAL_ITERS {
        let asm = assemble(
            mesh,
            qps,
            &disp,
            &state.gp_states,
            guess.as_deref(),
            t_new,
            dt,
            p,
            true,
        )?;
        let f_norm = asm
            .internal_force
            .iter()
            .fold(0.0f64, |m, &v| m.max(v.abs()));
        let r_free = asm
            .internal_force
            .iter()
            .zip(constrained.iter())
            .filter(|(_, &c)| !c)
            .fold(0.0f64, |m, (&v, _)| m.max(v.abs()));
        if !r_free.is_finite() {
            return Err(GnrError::GlobalNonConvergence {
                time: t_new,
                residual: r_free,
            });
        }
        if r_free < (1e-8 * f_norm).max(1e-12) {
            let (mean_rho_co0, mean_j) = volume_means(qps, &asm);
            let reactions = reactions(mesh, programs, &asm.internal_force)?;
            let mut new_state = state.clone();
            new_state.displacements = disp;
            new_state.gp_states = asm.trial_states;
            new_state.time = t_new;
            return Ok((
                new_state,
                StepReport {
                    reactions,
                    mean_rho_co0,
                    mean_j,
                    newton_iterations: iter,
                    bisections: 0,
                },
            ));
        }
        if iter == MAX_GLOBAL_ITERS || r_free > 1e4 * best_residual {
            return Err(GnrError::GlobalNonConvergence {
                time: t_new,
                residual: r_free,
            });
        }
        best_residual = best_residual.min(r_free);

        // Condense constraints: zero rows/cols, unit diagonal, zero rhs.
        let mut k = asm.stiffness;
        let mut rhs: Vec<f64> = asm.internal_force.iter().map(|v| -v).collect();
        for (d, &c) in constrained.iter().enumerate() {
            if c {
                k.zero_row(d);
                k.zero_col(d);
                k.set(d, d, 1.0);
                rhs[d] = 0.0;
            }
        }
        k.solve(&mut rhs)?;
        for (n, u) in disp.iter_mut().enumerate() {
            for i in 0..3 {
                u[i] += rhs[3 * n + i];
            }
        }
        guess = Some(asm.trial_states);
    }
    unreachable!()
}

/// Advance `state` to `t_new`, bisecting the interval on Newton failure
/// (max depth 8). The quadrature-point states commit only on acceptance.
pub fn solve_step(
    mesh: &Mesh,
    qps: &[[QpData; N_QP]],
    state: &GlobalState,
    t_new: f64,
    programs: &[DirichletProgram],
    p: &MaterialParams,
) -> Result<(GlobalState, StepReport), GnrError> {
    solve_step_depth(mesh, qps, state, t_new, programs, p, 0)
}

fn solve_step_depth(
    mesh: &Mesh,
    qps: &[[QpData; N_QP]],
    state: &GlobalState,
    t_new: f64,
    programs: &[DirichletProgram],
    p: &MaterialParams,
    depth: usize,
) -> Result<(GlobalState, StepReport), GnrError> {
    match newton_solve(mesh, qps, state, t_new, programs, p) {
        Ok(res) => Ok(res),
        Err(err) => {
            if depth >= MAX_STEP_BISECT_DEPTH {
                return Err(err);
            }
            let t_mid = 0.5 * (state.time + t_new);
            let (mid_state, rep1) =
                solve_step_depth(mesh, qps, state, t_mid, programs, p, depth + 1)?;
            let (end_state, rep2) =
                solve_step_depth(mesh, qps, &mid_state, t_new, programs, p, depth + 1)?;
            let mut rep = rep2;
            rep.newton_iterations += rep1.newton_iterations;
            rep.bisections += rep1.bisections + 1;
            Ok((end_state, rep))
        }
    }
}

/// Adaptive time-step controller: base dt, growth by 1.5x after four
/// consecutive accepts at the requested dt, capped at dt_max; exact hits
/// at event times.
#[derive(Debug, Clone, PartialEq)]
pub struct Stepping {
    pub dt_base: f64,
    pub dt_max: f64,
    pub horizon_days: f64,
    pub event_times: Vec<f64>,
}

impl Default for Stepping {
    fn default() -> Self {
        Stepping {
            dt_base: 0.1,
            dt_max: 0.25,
            horizon_days: 28.0,
            event_times: Vec::new(),
        }
    }
}

/// Boundary perturbation: at `time_days`, move each listed face outward so
/// its outward reaction jumps by `fraction`, then hold the displacement.
/// Faces in the same `group` share one displacement amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    pub time_days: f64,
    pub fraction: f64,
    /// Duration of the event step the jump is applied over.
    pub event_dt: f64,
    pub faces: Vec<PerturbFace>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbFace {
    pub node_set: String,
    /// Outward unit direction of the face (axis of its arm).
    pub outward: Vec3,
    pub group: usize,
}

/// Labeled field snapshot.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub time: f64,
    pub label: String,
    pub state: GlobalState,
}

/// Full run output.
pub struct RunOutput {
    pub series: Vec<TimeSeriesRow>,
    pub snapshots: Vec<Snapshot>,
    pub state: GlobalState,
    pub programs: Vec<DirichletProgram>,
}

fn snapshot_label(t: f64, suffix: &str) -> String {
    format!("t{:07.3}{}", t, suffix)
}

/// Calibrate the perturbation displacement amplitudes so each group's mean
/// outward reaction jumps by `fraction`, then return the programs to append.
#[allow(clippy::too_many_arguments)]
fn calibrate_perturbation(
    mesh: &Mesh,
    qps: &[[QpData; N_QP]],
    state: &GlobalState,
    base_programs: &[DirichletProgram],
    p: &MaterialParams,
    pert: &Perturbation,
    reactions_before: &BTreeMap<String, Vec3>,
) -> Result<Vec<DirichletProgram>, GnrError> {
    let n_groups = pert.faces.iter().map(|f| f.group).max().unwrap_or(0) + 1;
    // Baseline outward reaction per group (mean over its faces).
    let group_mean = |reac: &BTreeMap<String, Vec3>| -> Vec<f64> {
        let mut sum = vec![0.0; n_groups];
        let mut cnt = vec![0usize; n_groups];
        for f in &pert.faces {
            let r = reac.get(&f.node_set).copied().unwrap_or(Vec3::ZERO);
            sum[f.group] += r.dot(&f.outward);
            cnt[f.group] += 1;
        }
        sum.iter()
            .zip(cnt.iter())
            .map(|(s, &c)| s / c.max(1) as f64)
            .collect()
    };
    let base = group_mean(reactions_before);
    let target: Vec<f64> = base.iter().map(|b| (1.0 + pert.fraction) * b).collect();

    // Characteristic length for the initial probe amplitude.
    let probe0 = 1e-3
        * mesh
            .nodes
            .iter()
            .map(|n| n.norm())
            .fold(0.0f64, f64::max)
            .max(1e-6);
    let mut scale = vec![probe0; n_groups];
    let t_new = pert.time_days + pert.event_dt;

    for _ in 0..12 {
        let mut programs = base_programs.to_vec();
        for f in &pert.faces {
            programs.push(DirichletProgram {
                node_set: f.node_set.clone(),
                dof_mask: [true, true, true],
                value: DirichletValue::HeldStep {
                    from_time: pert.time_days,
                    vector: f.outward.scale(scale[f.group]),
                },
            });
        }
        let (_, rep) = solve_step(mesh, qps, state, t_new, &programs, p)?;
        let got = group_mean(&rep.reactions);
        let mut converged = true;
        for g in 0..n_groups {
            let jump = got[g] - base[g];
            let want = target[g] - base[g];
            if want.abs() < 1e-14 {
                continue;
            }
            if (jump - want).abs() > 0.01 * want.abs() {
                converged = false;
            }
            // Secant update assuming near-linear response in the amplitude.
            if jump.abs() > 1e-14 * want.abs() {
                scale[g] *= want / jump;
            } else {
                scale[g] *= 2.0;
            }
        }
        if converged {
            break;
        }
    }

    Ok(pert
        .faces
        .iter()
        .map(|f| DirichletProgram {
            node_set: f.node_set.clone(),
            dof_mask: [true, true, true],
            value: DirichletValue::HeldStep {
                from_time: pert.time_days,
                vector: f.outward.scale(scale[f.group]),
            },
        })
        .collect())
}

/// March from `initial` to the horizon, emitting one time-series row per
/// accepted step and snapshots at the requested times. `progress` is called
/// after every accepted step with the row and the dt used.
#[allow(clippy::too_many_arguments)]
pub fn run_to_horizon(
    mesh: &Mesh,
    qps: &[[QpData; N_QP]],
    initial: GlobalState,
    programs: &[DirichletProgram],
    p: &MaterialParams,
    stepping: &Stepping,
    snapshot_times: &[f64],
    perturbation: Option<&Perturbation>,
    progress: &mut dyn FnMut(&TimeSeriesRow, f64),
) -> Result<RunOutput, GnrError> {
    const T_EPS: f64 = 1e-9;
    let mut programs = programs.to_vec();
    let mut snapshots = Vec::new();
    let mut series = Vec::new();

    // Event grid: snapshot times, declared events, perturbation time.
    let mut events: Vec<f64> = snapshot_times.to_vec();
    events.extend_from_slice(&stepping.event_times);
    if let Some(pt) = perturbation {
        events.push(pt.time_days);
        events.push(pt.time_days + pt.event_dt);
    }
    events.retain(|&t| t > T_EPS && t < stepping.horizon_days - T_EPS);
    events.push(stepping.horizon_days);
    events.sort_by(|a, b| a.partial_cmp(b).unwrap());
    events.dedup_by(|a, b| (*a - *b).abs() < T_EPS);

    let mut state = initial;
    if snapshot_times.iter().any(|&t| t.abs() < T_EPS) {
        snapshots.push(Snapshot {
            time: 0.0,
            label: snapshot_label(0.0, ""),
            state: state.clone(),
        });
    }
    if stepping.horizon_days <= T_EPS {
        let programs_out = programs;
        return Ok(RunOutput {
            series,
            snapshots,
            state,
            programs: programs_out,
        });
    }

    let mut dt = stepping.dt_base;
    let mut consecutive_ok = 0usize;
    let mut pert_done = perturbation.is_none();

    while state.time < stepping.horizon_days - T_EPS {
        // Perturbation event: calibrate the held displacement step, then
        // advance across the event interval with the augmented programs.
        if let (false, Some(pt)) = (pert_done, perturbation) {
            if (state.time - pt.time_days).abs() < T_EPS {
                // Reactions at the pre-perturbation state (dt = 0 probe).
                let (_, rep_before) =
                    solve_step(mesh, qps, &state, state.time, &programs, p)?;
                let extra = calibrate_perturbation(
                    mesh,
                    qps,
                    &state,
                    &programs,
                    p,
                    pt,
                    &rep_before.reactions,
                )?;
                programs.extend(extra);
                pert_done = true;

                let t_new = pt.time_days + pt.event_dt;
                let (new_state, rep) = solve_step(mesh, qps, &state, t_new, &programs, p)?;
                state = new_state;
                let row = TimeSeriesRow::from_report(state.time, &rep);
                progress(&row, pt.event_dt);
                series.push(row);
                if snapshot_times
                    .iter()
                    .any(|&t| (t - pt.time_days).abs() < T_EPS)
                {
                    snapshots.push(Snapshot {
                        time: state.time,
                        label: snapshot_label(pt.time_days, "+"),
                        state: state.clone(),
                    });
                }
                consecutive_ok = 0;
                dt = stepping.dt_base;
                continue;
            }
        }

        let mut t_new = (state.time + dt).min(stepping.horizon_days);
        if let Some(&ev) = events
            .iter()
            .find(|&&ev| ev > state.time + T_EPS && ev < t_new - T_EPS)
        {
            t_new = ev;
        }
        // Snap to a nearby event instead of creating a sliver step.
        if let Some(&ev) = events
            .iter()
            .find(|&&ev| (ev - t_new).abs() < T_EPS.max(1e-6 * dt))
        {
            t_new = ev;
        }

        let (new_state, rep) = solve_step(mesh, qps, &state, t_new, &programs, p)?;
        state = new_state;
        let row = TimeSeriesRow::from_report(state.time, &rep);
        progress(&row, t_new);
        series.push(row);

        if rep.bisections > 0 {
            consecutive_ok = 0;
            dt = (0.5 * dt).max(1e-3);
        } else {
            consecutive_ok += 1;
            if consecutive_ok >= 4 {
                dt = (dt * 1.5).min(stepping.dt_max);
                consecutive_ok = 0;
            }
        }

        // Emit snapshots that fall on this time (the perturbation instant
        // itself is captured as the pre-event state: the "minus" snapshot).
        for &ts in snapshot_times {
            if (ts - state.time).abs() < T_EPS {
                let suffix = match (pert_done, perturbation) {
                    (false, Some(pt)) if (ts - pt.time_days).abs() < T_EPS => "-",
                    _ => "",
                };
                snapshots.push(Snapshot {
                    time: state.time,
                    label: snapshot_label(ts, suffix),
                    state: state.clone(),
                });
            }
        }
    }

    Ok(RunOutput {
        series,
        snapshots,
        state,
        programs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::assemble::precompute_quadrature;
    use crate::scenario::{build_strip_mesh, init_fiber_field, FiberInit, FiberPlane};

    fn small_strip() -> (Mesh, Vec<[QpData; N_QP]>, GlobalState) {
        let mesh = build_strip_mesh(4.0, 1.0, 0.5, 8, 2, 1).unwrap();
        let qps = precompute_quadrature(&mesh).unwrap();
        let fibers = init_fiber_field(
            &mesh,
            &FiberInit::InPlaneUniform {
                plane: FiberPlane::Xy,
                seed: 42,
            },
        );
        let state = GlobalState::initial(&mesh, &fibers);
        (mesh, qps, state)
    }

    fn clamps() -> Vec<DirichletProgram> {
        vec![
            DirichletProgram::clamp("x_min_face"),
            DirichletProgram::clamp("x_max_face"),
        ]
    }

    #[test]
    fn no_growth_stays_at_rest() {
        let (mesh, qps, state) = small_strip();
        let mut p = MaterialParams::strip_table();
        p.eta_g = 1e12;
        p.a1 = 0.0;
        p.a2 = 0.0;
        let programs = clamps();
        let (s1, rep) = solve_step(&mesh, &qps, &state, 0.5, &programs, &p).unwrap();
        assert_eq!(rep.newton_iterations, 0);
        for u in &s1.displacements {
            assert!(u.norm() < 1e-12);
        }
    }

    #[test]
    fn strip_reactions_balance_after_growth() {
        let (mesh, qps, state) = small_strip();
        let p = MaterialParams::strip_table();
        let programs = clamps();
        let mut s = state;
        for k in 1..=4 {
            let (ns, rep) = solve_step(&mesh, &qps, &s, 0.25 * k as f64, &programs, &p).unwrap();
            s = ns;
            let fx_min = rep.reactions["x_min_face"][0];
            let fx_max = rep.reactions["x_max_face"][0];
            let scale = fx_min.abs().max(fx_max.abs()).max(1e-30);
            assert!(
                (fx_min + fx_max).abs() <= 1e-8 * scale,
                "unbalanced reactions {fx_min} {fx_max}"
            );
        }
        // Growth must have produced tension along the constrained axis
        // eventually; at minimum the density is rising.
        let mean_rho: f64 =
            s.gp_states.iter().map(|g| g.rho_co0).sum::<f64>() / s.gp_states.len() as f64;
        assert!(mean_rho > 0.1, "density {mean_rho}");
    }

    #[test]
    fn horizon_zero_gives_initial_snapshot_only() {
        let (mesh, qps, state) = small_strip();
        let p = MaterialParams::strip_table();
        let stepping = Stepping {
            horizon_days: 0.0,
            ..Default::default()
        };
        let out = run_to_horizon(
            &mesh,
            &qps,
            state,
            &clamps(),
            &p,
            &stepping,
            &[0.0, 5.0],
            None,
            &mut |_, _| {},
        )
        .unwrap();
        assert!(out.series.is_empty());
        assert_eq!(out.snapshots.len(), 1);
        assert_eq!(out.snapshots[0].time, 0.0);
    }

    #[test]
    fn marching_hits_events_and_grows_dt() {
        let (mesh, qps, state) = small_strip();
        let p = MaterialParams::strip_table();
        let stepping = Stepping {
            dt_base: 0.1,
            dt_max: 0.25,
            horizon_days: 2.0,
            event_times: vec![0.55],
            ..Default::default()
        };
        let mut dts = Vec::new();
        let out = run_to_horizon(
            &mesh,
            &qps,
            state,
            &clamps(),
            &p,
            &stepping,
            &[0.0, 1.0, 2.0],
            None,
            &mut |_, _| {},
        )
        .unwrap();
        for w in out.series.windows(2) {
            assert!(w[1].time_days > w[0].time_days);
            dts.push(w[1].time_days - w[0].time_days);
        }
        assert!(out.series.iter().any(|r| (r.time_days - 0.55).abs() < 1e-9));
        assert!(out.series.iter().any(|r| (r.time_days - 1.0).abs() < 1e-9));
        assert!((out.series.last().unwrap().time_days - 2.0).abs() < 1e-9);
        // dt growth kicked in at some point.
        assert!(dts.iter().any(|&d| d > 0.11), "dts {dts:?}");
        assert_eq!(out.snapshots.len(), 3);
    }

    #[test]
    fn determinism_same_inputs_same_series() {
        let (mesh, qps, state) = small_strip();
        let p = MaterialParams::strip_table();
        let stepping = Stepping {
            horizon_days: 1.0,
            ..Default::default()
        };
        let run = |st: GlobalState| {
            run_to_horizon(
                &mesh,
                &qps,
                st,
                &clamps(),
                &p,
                &stepping,
                &[],
                None,
                &mut |_, _| {},
            )
            .unwrap()
        };
        let a = run(state.clone());
        let b = run(state);
        assert_eq!(a.series, b.series);
    }

    #[test]
    fn perturbation_jumps_force_then_decays() {
        // Small cruciform-like check on the strip: perturb the x faces at
        // day 1.5 by +20% and verify the jump and subsequent monotone decay.
        let (mesh, qps, state) = small_strip();
        let p = MaterialParams::strip_table();
        let stepping = Stepping {
            horizon_days: 4.0,
            ..Default::default()
        };
        let pert = Perturbation {
            time_days: 1.5,
            fraction: 0.2,
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
            ],
        };
        let baseline = run_to_horizon(
            &mesh,
            &qps,
            state.clone(),
            &clamps(),
            &p,
            &stepping,
            &[1.5],
            None,
            &mut |_, _| {},
        )
        .unwrap();
        let out = run_to_horizon(
            &mesh,
            &qps,
            state,
            &clamps(),
            &p,
            &stepping,
            &[1.5],
            Some(&pert),
            &mut |_, _| {},
        )
        .unwrap();
        let before = out
            .series
            .iter()
            .filter(|r| r.time_days < 1.5 + 1e-9)
            .next_back()
            .unwrap()
            .fx_max;
        let after = out
            .series
            .iter()
            .find(|r| r.time_days > 1.5 + 1e-9)
            .unwrap()
            .fx_max;
        let jump = (after - before) / before;
        assert!(
            (jump - 0.2).abs() < 0.02,
            "force jump {jump} (before {before}, after {after})"
        );
        // The excess force over the unperturbed baseline stays positive and
        // bounded. (Full homeostatic recovery needs the density feedback of
        // the biaxial scenario near its set point; this early-phase strip
        // still stiffens as collagen accumulates, so the excess may drift
        // up slightly under the held displacement.)
        let excess_start = after - before;
        let excess_end =
            out.series.last().unwrap().fx_max - baseline.series.last().unwrap().fx_max;
        assert!(excess_end > 0.0, "excess vanished entirely: {excess_end}");
        assert!(
            excess_end < 2.0 * excess_start,
            "excess blew up: start {excess_start}, end {excess_end}"
        );
        // Both minus and plus snapshots at the perturbation instant.
        let labels: Vec<&str> = out.snapshots.iter().map(|s| s.label.as_str()).collect();
        assert!(labels.iter().any(|l| l.ends_with('-')), "{labels:?}");
        assert!(labels.iter().any(|l| l.ends_with('+')), "{labels:?}");
    }
}
