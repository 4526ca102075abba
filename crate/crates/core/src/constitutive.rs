//! Free energies, structural tensors, and stress measures at a material
//! point.
//!
//! The material splits into an isotropic Neo-Hookean matrix and a dispersed
//! collagen fiber family with a Fung-type energy scaled linearly by the
//! referential collagen density. Each constituent carries its own growth
//! stretch; elastic kinematics are expressed in the co-rotated intermediate
//! configuration obtained by pulling back with the symmetric growth stretch.
//!
//! Note on the fiber strain: the fiber energy is driven by the elastic
//! stretch of the *collagen* part. The source formulation prints the matrix
//! subscript there, which is almost certainly a typo; this implementation
//! uses the collagen part throughout.

use crate::error::GnrError;
use crate::material::{GaussPointState, MaterialParams, PiCoMode};
use crate::tensor::{polar_decompose, SymTen2, Ten2, Vec3};

/// Per-deformation-gradient quantities shared by every evaluation at a
/// fixed F. Computing them once pays off in the local Newton loop.
#[derive(Debug, Clone)]
pub struct Kinematics {
    pub f: Ten2,
    pub c: SymTen2,
    /// Right stretch from the polar split of F.
    pub u: SymTen2,
    pub u_inv: SymTen2,
    pub j: f64,
}

impl Kinematics {
    pub fn new(f: Ten2) -> Result<Self, GnrError> {
        let j = f.det();
        if !(j > 0.0) {
            return Err(GnrError::NonPositiveDeterminant(j));
        }
        let (_, u) = polar_decompose(&f)?;
        let u_inv = u.inverse()?;
        Ok(Kinematics {
            f,
            c: (f.transpose() * f).sym(),
            u,
            u_inv,
            j,
        })
    }
}

/// Everything the rate laws need from a single stress evaluation.
#[derive(Debug, Clone)]
pub struct StressBundle {
    /// Second Piola-Kirchhoff stress.
    pub s: SymTen2,
    /// Co-rotated Kirchhoff stress (same eigenvalues as the Kirchhoff
    /// stress).
    pub tau_tilde: SymTen2,
    /// Driving stress of the homeostatic surface.
    pub y_g: Ten2,
    pub sigma_m: Ten2,
    pub sigma_co: Ten2,
    pub y_co: Ten2,
    pub pi_co: Ten2,
    pub gamma_co: Ten2,
    pub j: f64,
    pub psi_m: f64,
    pub psi_co: f64,
    /// Fiber strain energy per unit mass (stress x mm^3 / ug, times the
    /// configured scale).
    pub psi_co_mass: f64,
    pub h_bar: SymTen2,
    pub m_bar: SymTen2,
    pub a_ref: Vec3,
    /// Elastic right Cauchy-Green tensors per constituent.
    pub ce_m: SymTen2,
    pub ce_co: SymTen2,
    /// Fiber strain measure tr(Ce_co H_bar) - 1.
    pub e_co: f64,
    /// Energy gradient w.r.t. the generalized structural tensor.
    pub dpsi_dh: SymTen2,
}

/// Largest admissible exponent k2 * E^2. Beyond this the fiber energy is
/// numerically meaningless and the caller should cut the step.
const MAX_FIBER_EXPONENT: f64 = 200.0;

/// Neo-Hookean matrix energy density.
pub fn psi_matrix(ce_m: &SymTen2, p: &MaterialParams) -> Result<f64, GnrError> {
    if !ce_m.is_positive_definite() {
        return Err(GnrError::NotPositiveDefinite);
    }
    let je = ce_m.det().sqrt();
    let lnj = je.ln();
    Ok(0.5 * p.mu * (ce_m.trace() - 3.0) - p.mu * lnj
        + 0.25 * p.lambda * (je * je - 1.0 - 2.0 * lnj))
}

/// d(psi_matrix)/dCe_m, analytic.
pub fn dpsi_matrix_dc(ce_m: &SymTen2, p: &MaterialParams) -> Result<SymTen2, GnrError> {
    let det = ce_m.det();
    if !(det > 0.0) {
        return Err(GnrError::NotPositiveDefinite);
    }
    let ce_inv = ce_m.inverse()?;
    let mut out = SymTen2::ZERO;
    for i in 0..6 {
        let ident = if i < 3 { 1.0 } else { 0.0 };
        out.0[i] = 0.5 * p.mu * (ident - ce_inv.0[i]) + 0.25 * p.lambda * (det - 1.0) * ce_inv.0[i];
    }
    Ok(out)
}

/// Fiber strain measure: tr(Ce_co H_bar) - 1.
pub fn fiber_strain(ce_co: &SymTen2, h_bar: &SymTen2) -> f64 {
    ce_co.double_dot(h_bar) - 1.0
}

/// Fung-type collagen energy density, tension-only, scaled by the relative
/// density rho0/rho_co_f.
pub fn psi_collagen(
    ce_co: &SymTen2,
    h_bar: &SymTen2,
    rho_co0: f64,
    p: &MaterialParams,
) -> Result<f64, GnrError> {
    if !ce_co.is_positive_definite() {
        return Err(GnrError::NotPositiveDefinite);
    }
    if (h_bar.trace() - 1.0).abs() > 1e-8 {
        return Err(GnrError::InvalidState(
            "generalized structural tensor is not trace-normalized".into(),
        ));
    }
    let e = fiber_strain(ce_co, h_bar);
    if e < 0.0 {
        return Ok(0.0);
    }
    let expo = p.k2 * e * e;
    if expo > MAX_FIBER_EXPONENT {
        return Err(GnrError::InvalidState(format!(
            "fiber energy exponent {expo:.1} exceeds admissible range"
        )));
    }
    Ok(rho_co0 / p.rho_co_f * (p.k1 / (2.0 * p.k2)) * (expo.exp() - 1.0))
}

/// Structural tensors from the stored co-rotated fiber direction.
///
/// The referential direction is recovered by inverting the push-forward of
/// the fiber vector: a_ref ~ U^-1 a_tilde, normalized.
pub fn structure_tensors(
    f: &Ten2,
    u_gco: &SymTen2,
    a_tilde: &Vec3,
    kappa: f64,
) -> Result<(Vec3, SymTen2, SymTen2, SymTen2), GnrError> {
    let kin = Kinematics::new(*f)?;
    structure_tensors_kin(&kin.u_inv, u_gco, a_tilde, kappa)
}

/// Same as [`structure_tensors`], reusing a precomputed U^-1.
pub fn structure_tensors_kin(
    u_inv: &SymTen2,
    u_gco: &SymTen2,
    a_tilde: &Vec3,
    kappa: f64,
) -> Result<(Vec3, SymTen2, SymTen2, SymTen2), GnrError> {
    let a_raw = u_inv.mul_vec(a_tilde);
    let n = a_raw.norm();
    if !(n > 0.0) || !n.is_finite() {
        return Err(GnrError::SingularTensor);
    }
    let a_ref = a_raw.scale(1.0 / n);
    let m = a_ref.self_outer();
    let ug = u_gco.full();
    let c_gco = (ug * ug).sym();
    let denom = c_gco.double_dot(&m);
    if !(denom > 0.0) {
        return Err(GnrError::DegenerateFiber);
    }
    let m_bar = (ug * m.full() * ug).sym().scale(1.0 / denom);
    let mut h_bar = m_bar.scale(1.0 - 3.0 * kappa);
    for i in 0..3 {
        h_bar.0[i] += kappa;
    }
    Ok((a_ref, m, m_bar, h_bar))
}

/// Full stress evaluation at a material point.
pub fn evaluate_stress(
    f: &Ten2,
    state: &GaussPointState,
    p: &MaterialParams,
) -> Result<StressBundle, GnrError> {
    let kin = Kinematics::new(*f)?;
    evaluate_stress_kin(&kin, state, p)
}

/// Stress evaluation reusing precomputed kinematics (hot path of the local
/// integrator).
pub fn evaluate_stress_kin(
    kin: &Kinematics,
    state: &GaussPointState,
    p: &MaterialParams,
) -> Result<StressBundle, GnrError> {
    let u_gm_inv = state
        .u_gm
        .inverse()
        .map_err(|_| GnrError::InvalidState("singular matrix growth stretch".into()))?;
    let u_gco_inv = state
        .u_gco
        .inverse()
        .map_err(|_| GnrError::InvalidState("singular collagen growth stretch".into()))?;

    let c_full = kin.c.full();
    let ce_m = (u_gm_inv.full() * c_full * u_gm_inv.full()).sym();
    let ce_co = (u_gco_inv.full() * c_full * u_gco_inv.full()).sym();
    if !ce_m.is_positive_definite() || !ce_co.is_positive_definite() {
        return Err(GnrError::NotPositiveDefinite);
    }

    let (a_ref, _m, m_bar, h_bar) =
        structure_tensors_kin(&kin.u_inv, &state.u_gco, &state.a_tilde, p.kappa)?;

    // Matrix part.
    let psi_m = psi_matrix(&ce_m, p)?;
    let dpsi_m = dpsi_matrix_dc(&ce_m, p)?;

    // Collagen part: psi depends on Ce_co and H_bar only through
    // tr(Ce_co H_bar).
    let e_co = fiber_strain(&ce_co, &h_bar);
    let expo = p.k2 * e_co * e_co;
    if e_co >= 0.0 && expo > MAX_FIBER_EXPONENT {
        return Err(GnrError::InvalidState(format!(
            "fiber energy exponent {expo:.1} exceeds admissible range"
        )));
    }
    let rho_rel = state.rho_co0 / p.rho_co_f;
    let (psi_co, w) = if e_co >= 0.0 {
        let expf = expo.exp();
        (
            rho_rel * (p.k1 / (2.0 * p.k2)) * (expf - 1.0),
            rho_rel * p.k1 * expf * e_co,
        )
    } else {
        (0.0, 0.0)
    };
    // d psi_co / d Ce_co = w * H_bar, d psi_co / d H_bar = w * Ce_co.
    let dpsi_co = h_bar.scale(w);
    let dpsi_dh = ce_co.scale(w);

    // Second Piola-Kirchhoff: pull both constituent gradients back to the
    // reference configuration.
    let s_m = (u_gm_inv.full() * dpsi_m.full() * u_gm_inv.full()).scale(2.0);
    let s_co = (u_gco_inv.full() * dpsi_co.full() * u_gco_inv.full()).scale(2.0);
    let s = (s_m + s_co).sym();

    // Constituent stress measures in the co-rotated intermediate
    // configuration.
    let sigma_m = (ce_m.full() * dpsi_m.full()).scale(2.0);
    let sigma_co = (ce_co.full() * dpsi_co.full()).scale(2.0);
    let y_co = (dpsi_dh.full() * h_bar.full()).scale(2.0);
    let pi_co = match p.pi_co_mode {
        PiCoMode::ScalarContraction => h_bar.full().scale(2.0 * dpsi_dh.double_dot(&h_bar)),
        PiCoMode::Sandwich => (h_bar.full() * dpsi_dh.full() * h_bar.full()).scale(2.0),
    };
    let gamma_co = sigma_co - y_co + pi_co;

    let y_g = state.u_gm.full() * sigma_m * u_gm_inv.full()
        + state.u_gco.full() * sigma_co * u_gco_inv.full();
    let tau_tilde = (kin.u_inv.full() * y_g * kin.u.full()).sym();

    // psi per unit mass: the density cancels exactly (psi_co is linear in
    // rho0), so the analytic rho -> 0 limit is used for all densities.
    let psi_co_mass = if e_co >= 0.0 {
        p.energy_per_mass_scale / p.rho_co_f * (p.k1 / (2.0 * p.k2)) * (expo.exp() - 1.0)
    } else {
        0.0
    };

    Ok(StressBundle {
        s,
        tau_tilde,
        y_g,
        sigma_m,
        sigma_co,
        y_co,
        pi_co,
        gamma_co,
        j: kin.j,
        psi_m,
        psi_co,
        psi_co_mass,
        h_bar,
        m_bar,
        a_ref,
        ce_m,
        ce_co,
        e_co,
        dpsi_dh,
    })
}

/// Total energy density with the structural tensor held fixed. Used by the
/// finite-difference stress oracle in the tests; the analytic stress must be
/// 2 d(psi)/dC of exactly this function.
pub fn psi_total_frozen_structure(
    c: &SymTen2,
    u_gm: &SymTen2,
    u_gco: &SymTen2,
    h_bar: &SymTen2,
    rho_co0: f64,
    p: &MaterialParams,
) -> Result<f64, GnrError> {
    let u_gm_inv = u_gm.inverse()?;
    let u_gco_inv = u_gco.inverse()?;
    let c_full = c.full();
    let ce_m = (u_gm_inv.full() * c_full * u_gm_inv.full()).sym();
    let ce_co = (u_gco_inv.full() * c_full * u_gco_inv.full()).sym();
    Ok(psi_matrix(&ce_m, p)? + psi_collagen(&ce_co, h_bar, rho_co0, p)?)
}
