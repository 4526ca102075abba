//! Rate equations of the adaptation model: homeostatic surface, growth
//! pseudo-potentials and flow directions, the Perzyna-type growth multiplier,
//! collagen densification, fiber reorientation, and a dissipation diagnostic.
//!
//! All functions are pure; the implicit point integrator composes them.

use crate::constitutive::StressBundle;
use crate::error::GnrError;
use crate::material::{GaussPointState, MaterialParams};
use crate::tensor::{sym_eig, SymTen2, Ten2, Vec3, VOIGT_PAIRS};

/// One full rate evaluation at a material point.
#[derive(Debug, Clone)]
pub struct RateBundle {
    /// Unit-norm flow direction of the matrix growth stretch (zero tensor
    /// when the raw direction vanishes).
    pub n_hat_m: SymTen2,
    /// Unit-norm flow direction of the collagen growth stretch (zero tensor
    /// when the raw direction vanishes).
    pub n_hat_co: SymTen2,
    /// Growth multiplier rate (1/days); may be negative (resorption).
    pub gamma_dot: f64,
    /// Referential collagen density rate (ug/mm^3/day).
    pub rho_dot: f64,
    /// Fiber direction rate (1/day), orthogonal to the current direction.
    pub a_tilde_dot: Vec3,
    /// Value of the homeostatic surface (stress^2 units).
    pub phi_g: f64,
    /// Current homeostatic stress.
    pub sigma_g: f64,
    /// Set when the Perzyna denominator degenerates and gamma_dot was
    /// forced to zero.
    pub perzyna_degenerate: bool,
}

/// Diagnostic split of the mechanical dissipation power density. Logged,
/// never asserted on.
#[derive(Debug, Clone, Copy, Default)]
pub struct DissipationReport {
    pub term_growth_m: f64,
    pub term_growth_co: f64,
    /// -G_co : Hdot (remodeling contribution).
    pub term_remodel: f64,
    /// -(dpsi/drho0) rhodot0 (densification contribution).
    pub term_density: f64,
    pub total_mechanical: f64,
}

/// Density-dependent homeostatic stress. The caller supplies the *current*
/// collagen density rho_co = rho_co0 / J.
pub fn homeostatic_stress(rho_co_current: f64, p: &MaterialParams) -> f64 {
    p.sigma_g0 * (1.0 + p.r1 * rho_co_current / p.rho_co_f)
}

/// Homeostatic surface value. Positive off-surface values drive growth.
pub fn homeostatic_surface(y_g: &Ten2, j: f64, sigma_g: f64, beta_g: f64) -> f64 {
    let jj = j * j;
    let tr_y = y_g.trace();
    let tr_yy = (*y_g * *y_g).trace();
    let dev = 2.0 * sigma_g - tr_y / jj;
    tr_yy / jj + beta_g - dev * dev
}

/// Rankine-like pseudo-potential of the matrix part. Depends on the stress
/// only through its trace. The sqrt branch is guarded on the sign of the
/// radicand (the printed branch condition is unattainable for beta_g > 0).
pub fn potential_matrix(y_gm: &Ten2, j: f64, beta_g: f64) -> f64 {
    let tr_y = y_gm.trace();
    let base = tr_y / j;
    let radicand = tr_y / (j * j) + beta_g;
    if radicand > 0.0 {
        base + radicand.sqrt()
    } else {
        base
    }
}

/// Growth pseudo-potential of the collagen part.
pub fn potential_collagen(
    gamma_co: &Ten2,
    ce_co: &SymTen2,
    m_bar: &SymTen2,
    j: f64,
) -> Result<f64, GnrError> {
    let cm = ce_co.double_dot(m_bar);
    if !(cm > 0.0) {
        return Err(GnrError::DegenerateFiber);
    }
    let drive = (ce_co.full() * m_bar.full()).sym();
    Ok(gamma_co.double_dot(&drive.full()) / (j * cm))
}

/// Flow directions of both growth stretches, unit Frobenius norm. A raw
/// direction below machine threshold returns the zero tensor as a flag.
///
/// The matrix direction is analytic: the potential depends on the stress
/// only through its trace (which is similarity-invariant, so tr Y_gm =
/// tr Sigma_m), making the raw direction a multiple of the identity. The
/// collagen direction is obtained by central finite differences of the
/// collagen potential over the symmetric components of Sigma_co; the
/// potential is affine in Sigma_co, so the difference quotient is exact.
pub fn flow_directions(b: &StressBundle, p: &MaterialParams) -> (SymTen2, SymTen2) {
    let j = b.j;
    let tr_s = b.sigma_m.trace();
    let radicand = tr_s / (j * j) + p.beta_g;
    let coef = if radicand > 0.0 {
        1.0 / j + 1.0 / (2.0 * j * j * radicand.sqrt())
    } else {
        1.0 / j
    };
    let n_m_raw = SymTen2::identity().scale(coef);
    let n_hat_m = normalize_or_zero(&n_m_raw);

    // Central FD of g_co over the symmetric part of Sigma_co, holding the
    // affine shift Gamma_co - Sigma_co fixed.
    let shift = b.gamma_co - b.sigma_co;
    let mut n_co_raw = SymTen2::ZERO;
    for (k, &(i, jdx)) in VOIGT_PAIRS.iter().enumerate() {
        let h = 1e-6 * b.sigma_co.0[i][jdx].abs().max(1.0);
        let mut sp = b.sigma_co;
        let mut sm = b.sigma_co;
        sp.0[i][jdx] += h;
        sm.0[i][jdx] -= h;
        if i != jdx {
            sp.0[jdx][i] += h;
            sm.0[jdx][i] -= h;
        }
        let gp = potential_collagen(&(sp + shift), &b.ce_co, &b.m_bar, j).unwrap_or(0.0);
        let gm = potential_collagen(&(sm + shift), &b.ce_co, &b.m_bar, j).unwrap_or(0.0);
        let fd = (gp - gm) / (2.0 * h);
        // Perturbing both mirrored entries doubles the off-diagonal slope.
        n_co_raw.0[k] = if k < 3 { fd } else { 0.5 * fd };
    }
    let n_hat_co = normalize_or_zero(&n_co_raw);
    (n_hat_m, n_hat_co)
}

fn normalize_or_zero(a: &SymTen2) -> SymTen2 {
    let n = a.frobenius_norm();
    if n > 1e-300 && n.is_finite() {
        a.scale(1.0 / n)
    } else {
        SymTen2::ZERO
    }
}

/// Growth multiplier rate from the overstress equation
/// `phi_g = (4 sigma_g^2 - beta_g) (eta_g gamma_dot)^{v_g}` with the
/// sign-preserving power convention. Returns the rate and a degeneracy flag
/// (denominator below 1e-14, rate forced to zero).
pub fn perzyna_gamma_dot(phi_g: f64, sigma_g: f64, p: &MaterialParams) -> (f64, bool) {
    let denom = 4.0 * sigma_g * sigma_g - p.beta_g;
    if denom.abs() < 1e-14 {
        return (0.0, true);
    }
    let q = phi_g / denom;
    (q.signum() * q.abs().powf(1.0 / p.v_g) / p.eta_g, false)
}

/// Exact integral of the biological (Weibull) deposition rate over
/// [t_old, t_new]. The term depends on time only, so it can be integrated
/// in closed form without affecting the implicitness of the local system;
/// this removes the first-order quadrature error a right-endpoint rule
/// would add on the steep early part of the curve.
pub fn collagen_bio_increment(t_old: f64, t_new: f64, p: &MaterialParams) -> f64 {
    let cdf = |t: f64| {
        if t <= 0.0 {
            0.0
        } else {
            1.0 - (-(t / p.tau).powf(p.h)).exp()
        }
    };
    p.a1 * p.c_cell * (cdf(t_new) - cdf(t_old))
}

/// Mechanobiological deposition rate (density- and energy-dependent part).
pub fn collagen_mech_rate(rho_co0: f64, psi_mass: f64, p: &MaterialParams) -> f64 {
    if psi_mass >= p.psi_crit {
        p.a2 * p.c_cell * (-rho_co0 / p.rho_th).exp() * rho_co0 * (psi_mass - p.psi_crit)
            / p.psi_crit
    } else {
        0.0
    }
}

/// Total referential collagen density rate: time-programmed Weibull
/// deposition plus the strain-energy-gated mechanobiological term.
/// `psi_mass` is the specific fiber energy compared against `psi_crit`.
pub fn collagen_rate(t: f64, rho_co0: f64, psi_mass: f64, p: &MaterialParams) -> f64 {
    let biological = if t > 0.0 {
        let x = t / p.tau;
        p.a1 * p.c_cell * (p.h / p.tau) * (-x.powf(p.h)).exp() * x.powf(p.h - 1.0)
    } else if p.h == 1.0 {
        p.a1 * p.c_cell / p.tau
    } else {
        // h > 1: the rate vanishes at t = 0 in the limit.
        0.0
    };
    biological + collagen_mech_rate(rho_co0, psi_mass, p)
}

/// Target orientation: eigenvector of tau_tilde with the largest eigenvalue,
/// sign-matched to `a_tilde`. On (near-)ties the previous target is kept if
/// it still spans the maximal eigenspace, preventing nondeterministic drift
/// in equibiaxial states.
pub fn fiber_target(tau_tilde: &SymTen2, a_tilde: &Vec3, previous: Option<&Vec3>) -> Vec3 {
    let (vals, vecs) = sym_eig(tau_tilde);
    let tol = 1e-10 * tau_tilde.frobenius_norm();
    // Multiplicity of the maximal eigenvalue.
    let mut mult = 1;
    while mult < 3 && vals[0] - vals[mult] <= tol {
        mult += 1;
    }
    let mut target = vecs[0];
    if mult > 1 {
        let prev = previous.unwrap_or(a_tilde);
        let mut proj = Vec3::ZERO;
        for v in vecs.iter().take(mult) {
            proj = proj + v.scale(v.dot(prev));
        }
        if proj.norm() > 1e-8 {
            target = proj.normalized();
        }
    }
    if target.dot(a_tilde) < 0.0 {
        target = -target;
    }
    target
}

/// Fiber reorientation rate toward the dominant principal stress direction.
/// Always orthogonal to `a_tilde`.
pub fn fiber_rate(a_tilde: &Vec3, tau_tilde: &SymTen2, eta_s: f64) -> Vec3 {
    let target = fiber_target(tau_tilde, a_tilde, None);
    fiber_rate_toward(a_tilde, &target, eta_s)
}

/// Reorientation rate for a known target direction.
pub fn fiber_rate_toward(a_tilde: &Vec3, target: &Vec3, eta_s: f64) -> Vec3 {
    let cross = a_tilde.cross(target);
    cross.cross(a_tilde).scale(std::f64::consts::FRAC_PI_2 / eta_s)
}

/// Evaluate the complete rate bundle at time `t` for a stress state.
pub fn evaluate_rates(
    t: f64,
    state: &GaussPointState,
    b: &StressBundle,
    p: &MaterialParams,
    previous_target: Option<&Vec3>,
) -> RateBundle {
    let sigma_g = homeostatic_stress(state.rho_co0 / b.j, p);
    let phi_g = homeostatic_surface(&b.y_g, b.j, sigma_g, p.beta_g);
    let (n_hat_m, n_hat_co) = flow_directions(b, p);
    let (gamma_dot, perzyna_degenerate) = perzyna_gamma_dot(phi_g, sigma_g, p);
    let rho_dot = collagen_rate(t, state.rho_co0, b.psi_co_mass, p);
    let target = fiber_target(&b.tau_tilde, &state.a_tilde, previous_target);
    let a_tilde_dot = fiber_rate_toward(&state.a_tilde, &target, p.eta_s);
    RateBundle {
        n_hat_m,
        n_hat_co,
        gamma_dot,
        rho_dot,
        a_tilde_dot,
        phi_g,
        sigma_g,
        perzyna_degenerate,
    }
}

/// Diagnostic dissipation split over a converged step from `old` to `new`.
pub fn dissipation_report(
    new: &StressBundle,
    old: &StressBundle,
    state_new: &GaussPointState,
    rates: &RateBundle,
    p: &MaterialParams,
    dt: f64,
) -> DissipationReport {
    // Growth terms: Gamma_j : D_g_j with D_g_j = gamma_dot N_hat_j. For the
    // matrix constituent Gamma_m coincides with Sigma_m.
    let term_growth_m = rates.gamma_dot * new.sigma_m.double_dot(&rates.n_hat_m.full());
    let term_growth_co = rates.gamma_dot * new.gamma_co.double_dot(&rates.n_hat_co.full());

    // Remodeling term: -G_co : Hdot with the referential structural tensor
    // H = kappa I + (1 - 3 kappa) a_ref (x) a_ref and
    // G_co = U_gco (dpsi/dH_bar) U_gco.
    let h_of = |a_ref: &Vec3| -> SymTen2 {
        let mut h = a_ref.self_outer().scale(1.0 - 3.0 * p.kappa);
        for i in 0..3 {
            h.0[i] += p.kappa;
        }
        h
    };
    let h_dot = (h_of(&new.a_ref) - h_of(&old.a_ref)).scale(1.0 / dt);
    let ug = state_new.u_gco.full();
    let g_co = ug * new.dpsi_dh.full() * ug;
    let term_remodel = -g_co.double_dot(&h_dot.full());

    // Density term: psi_co is linear in rho0, so dpsi/drho0 =
    // psi_co_mass / energy scale exactly.
    let term_density = -(new.psi_co_mass / p.energy_per_mass_scale) * rates.rho_dot;

    DissipationReport {
        term_growth_m,
        term_growth_co,
        term_remodel,
        term_density,
        total_mechanical: term_growth_m + term_growth_co + term_remodel + term_density,
    }
}
