//! Parameter calibration against the experimental density curve.

use crate::dataset::ExperimentalDataset;
use crate::error::GnrError;
use crate::fem::assemble::precompute_quadrature;
use crate::fem::solve::{run_to_horizon, DirichletProgram, GlobalState, Stepping};
use crate::material::MaterialParams;
use crate::scenario::{build_strip_mesh, init_fiber_field, FiberInit, FiberPlane};

/// Parameters that may be freed for fitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreeParamName {
    A1,
    Tau,
    H,
    A2,
    PsiCrit,
    RhoTh,
}

/// One free parameter with finite bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeParam {
    pub name: FreeParamName,
    pub lower: f64,
    pub upper: f64,
}

/// Calibration setup: which parameters move, the data to fit, and the
/// (reduced) strip scenario evaluated per objective call.
#[derive(Debug, Clone)]
pub struct CalibrationProblem {
    pub free: Vec<FreeParam>,
    pub base: MaterialParams,
    pub dataset: ExperimentalDataset,
    /// Strip geometry: length, width, thickness (mm).
    pub dimensions: [f64; 3],
    /// Element divisions; the default 32x4x2 (256 elements) trades <2%
    /// accuracy for much cheaper objective evaluations.
    pub divisions: [usize; 3],
    pub fiber_seed: u64,
    pub stepping: Stepping,
}

impl CalibrationProblem {
    pub fn with_defaults(
        free: Vec<FreeParam>,
        base: MaterialParams,
        dataset: ExperimentalDataset,
    ) -> Self {
        let horizon = dataset.rows.last().map_or(28.0, |r| r.day);
        CalibrationProblem {
            free,
            base,
            dataset,
            dimensions: [16.0, 2.0, 0.5],
            divisions: [32, 4, 2],
            fiber_seed: 42,
            stepping: Stepping {
                horizon_days: horizon,
                ..Default::default()
            },
        }
    }

    pub fn validate(&self) -> Result<(), GnrError> {
        if self.free.is_empty() {
            return Err(GnrError::Config("free parameter set is empty".into()));
        }
        for f in &self.free {
            if !(f.lower.is_finite() && f.upper.is_finite() && f.lower < f.upper) {
                return Err(GnrError::Config(format!(
                    "bad bounds for {:?}: [{}, {}]",
                    f.name, f.lower, f.upper
                )));
            }
        }
        self.dataset.validate()
    }

    /// Material parameters with the free entries overridden by `x`.
    pub fn apply(&self, x: &[f64]) -> MaterialParams {
        let mut p = self.base.clone();
        for (f, &v) in self.free.iter().zip(x) {
            match f.name {
                FreeParamName::A1 => p.a1 = v,
                FreeParamName::Tau => p.tau = v,
                FreeParamName::H => p.h = v,
                FreeParamName::A2 => p.a2 = v,
                FreeParamName::PsiCrit => p.psi_crit = v,
                FreeParamName::RhoTh => p.rho_th = v,
            }
        }
        p
    }
}

/// Mean referential collagen density of the reduced strip run sampled at
/// the dataset days.
fn simulate_density_samples(
    problem: &CalibrationProblem,
    p: &MaterialParams,
) -> Result<Vec<f64>, GnrError> {
    let [l, w, t] = problem.dimensions;
    let [nx, ny, nz] = problem.divisions;
    let mesh = build_strip_mesh(l, w, t, nx, ny, nz)?;
    let qps = precompute_quadrature(&mesh)?;
    let fibers = init_fiber_field(
        &mesh,
        &FiberInit::InPlaneUniform {
            plane: FiberPlane::Xy,
            seed: problem.fiber_seed,
        },
    );
    let state = GlobalState::initial(&mesh, &fibers);
    let programs = [
        DirichletProgram::clamp("x_min_face"),
        DirichletProgram::clamp("x_max_face"),
    ];
    let mut stepping = problem.stepping.clone();
    stepping
        .event_times
        .extend(problem.dataset.rows.iter().map(|r| r.day));
    let out = run_to_horizon(
        &mesh, &qps, state, &programs, p, &stepping, &[], None, &mut |_, _| {},
    )?;
    problem
        .dataset
        .rows
        .iter()
        .map(|r| {
            out.series
                .iter()
                .find(|row| (row.time_days - r.day).abs() < 1e-9)
                .map(|row| row.mean_rho_co0)
                .ok_or_else(|| {
                    GnrError::Config(format!("no accepted step at sample day {}", r.day))
                })
        })
        .collect()
}

/// Penalty returned when the solver fails inside an objective evaluation.
pub const SOLVER_FAILURE_PENALTY: f64 = 1e12;

/// Weighted sum of squared errors between the simulated mean density and
/// the dataset means, weights 1/(high - low)^2. Out-of-bounds `x` is
/// rejected before any simulation; solver failures map to a large penalty.
pub fn calibration_objective(
    x: &[f64],
    problem: &CalibrationProblem,
) -> Result<f64, GnrError> {
    problem.validate()?;
    if x.len() != problem.free.len() {
        return Err(GnrError::Config(format!(
            "objective expects {} parameters, got {}",
            problem.free.len(),
            x.len()
        )));
    }
    for (f, &v) in problem.free.iter().zip(x) {
        if v < f.lower || v > f.upper {
            return Err(GnrError::Config(format!(
                "{:?} = {v} outside bounds [{}, {}]",
                f.name, f.lower, f.upper
            )));
        }
    }
    let p = problem.apply(x);
    match simulate_density_samples(problem, &p) {
        Ok(samples) => {
            let mut sse = 0.0;
            for (s, r) in samples.iter().zip(problem.dataset.rows.iter()) {
                let w = 1.0 / ((r.high - r.low) * (r.high - r.low));
                sse += w * (s - r.mean) * (s - r.mean);
            }
            Ok(sse)
        }
        Err(err) => {
            eprintln!("calibration: solver failure, applying penalty: {err}");
            Ok(SOLVER_FAILURE_PENALTY)
        }
    }
}

/// Options for the simplex search.
#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOpts {
    pub max_evals: usize,
    /// Relative simplex-diameter termination threshold.
    pub tol: f64,
    /// Initial simplex edge as a fraction of the bound range.
    pub initial_step: f64,
}

impl Default for NelderMeadOpts {
    fn default() -> Self {
        NelderMeadOpts {
            max_evals: 2000,
            tol: 1e-6,
            initial_step: 0.1,
        }
    }
}

fn project(x: &mut [f64], bounds: &[(f64, f64)]) {
    for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
        *v = v.clamp(lo, hi);
    }
}

/// Nelder-Mead simplex minimization with reflection/expansion/contraction/
/// shrink coefficients (1, 2, 0.5, 0.5) and bound handling by projection.
/// Returns the best point, its value, and the evaluation count.
pub fn nelder_mead(
    mut objective: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    bounds: &[(f64, f64)],
    opts: &NelderMeadOpts,
) -> (Vec<f64>, f64, usize) {
    const ALPHA: f64 = 1.0;
    const GAMMA: f64 = 2.0;
    const RHO: f64 = 0.5;
    const SIGMA: f64 = 0.5;
    let n = x0.len();
    assert!(n >= 1 && bounds.len() == n);

    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        objective(x)
    };

    // Initial simplex: x0 plus one step per coordinate.
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let mut x0p = x0.to_vec();
    project(&mut x0p, bounds);
    let f0 = eval(&x0p, &mut evals);
    simplex.push((x0p.clone(), f0));
    for i in 0..n {
        let (lo, hi) = bounds[i];
        let mut xi = x0p.clone();
        let step = opts.initial_step * (hi - lo);
        xi[i] = if xi[i] + step <= hi { xi[i] + step } else { xi[i] - step };
        project(&mut xi, bounds);
        let fi = eval(&xi, &mut evals);
        simplex.push((xi, fi));
    }

    while evals < opts.max_evals {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());

        // Relative simplex diameter.
        let best = &simplex[0].0;
        let scale = 1.0 + best.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let diam = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(best.iter())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max)
            })
            .fold(0.0f64, f64::max);
        if diam < opts.tol * scale {
            break;
        }

        // Centroid of all but the worst.
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / n as f64;
            }
        }
        let worst = simplex[n].clone();

        let mut xr: Vec<f64> = centroid
            .iter()
            .zip(&worst.0)
            .map(|(c, w)| c + ALPHA * (c - w))
            .collect();
        project(&mut xr, bounds);
        let fr = eval(&xr, &mut evals);

        if fr < simplex[0].1 {
            // Try expanding.
            let mut xe: Vec<f64> = centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + GAMMA * (c - w))
                .collect();
            project(&mut xe, bounds);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            // Contract toward the better of worst/reflected.
            let (xc_base, fc_base) = if fr < worst.1 { (&xr, fr) } else { (&worst.0, worst.1) };
            let mut xc: Vec<f64> = centroid
                .iter()
                .zip(xc_base)
                .map(|(c, w)| c + RHO * (w - c))
                .collect();
            project(&mut xc, bounds);
            let fc = eval(&xc, &mut evals);
            if fc < fc_base {
                simplex[n] = (xc, fc);
            } else {
                // Shrink toward the best vertex.
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let mut xs: Vec<f64> = best
                        .iter()
                        .zip(&entry.0)
                        .map(|(b, v)| b + SIGMA * (v - b))
                        .collect();
                    project(&mut xs, bounds);
                    let fs = eval(&xs, &mut evals);
                    *entry = (xs, fs);
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let (x_best, f_best) = simplex.swap_remove(0);
    (x_best, f_best, evals)
}
