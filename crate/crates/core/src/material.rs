//! Material parameter sets and the per-point internal state.

use crate::error::GnrError;
use crate::tensor::{SymTen2, Vec3};

/// Which reading of the remodeling back-stress contraction to use.
///
/// The contraction of the structural-tensor dyad with the energy gradient
/// admits two algebraically distinct readings; both are kept behind this
/// switch. `ScalarContraction` treats it as `(A : H) H`, `Sandwich` as
/// `H A H`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PiCoMode {
    #[default]
    ScalarContraction,
    Sandwich,
}

/// Scalar material constants. Units follow the configured unit system:
/// stress-like values are MPa or uN/mm^2, times are days, densities ug/mm^3.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialParams {
    /// First Lame constant of the matrix (stress).
    pub lambda: f64,
    /// Shear modulus of the matrix (stress).
    pub mu: f64,
    /// Fiber stiffness-like parameter (stress).
    pub k1: f64,
    /// Fiber exponential coefficient (dimensionless).
    pub k2: f64,
    /// Fiber dispersion, 0 <= kappa <= 1/3.
    pub kappa: f64,
    /// Initial homeostatic stress (stress).
    pub sigma_g0: f64,
    /// Density coupling coefficient of the homeostatic stress (used as a
    /// pure number).
    pub r1: f64,
    /// Stress-like apex parameter of the homeostatic surface.
    pub beta_g: f64,
    /// Volumetric growth relaxation time (days).
    pub eta_g: f64,
    /// Fiber reorientation relaxation time (days).
    pub eta_s: f64,
    /// Perzyna exponent (dimensionless).
    pub v_g: f64,
    /// Biologically driven collagen deposition coefficient (ug/cells).
    pub a1: f64,
    /// Weibull half-time (days).
    pub tau: f64,
    /// Weibull steepness (dimensionless).
    pub h: f64,
    /// Mechanobiological collagen coefficient (mm^3/cells/day).
    pub a2: f64,
    /// Threshold for mechanical stimulation on the specific fiber energy
    /// (stress x mm^3 / ug; config tag `J/ug` after the source tables).
    pub psi_crit: f64,
    /// Saturation density scale (ug/mm^3).
    pub rho_th: f64,
    /// Final (reference) collagen density (ug/mm^3).
    pub rho_co_f: f64,
    /// Cell density (cells/mm^3).
    pub c_cell: f64,
    /// Scale applied to psi_co/rho before comparison against psi_crit.
    /// The thresholds were fitted with the specific energy expressed in
    /// (stress unit x mm^3)/ug, so both tabulated sets use 1.
    pub energy_per_mass_scale: f64,
    /// Contraction convention for the remodeling back-stress.
    pub pi_co_mode: PiCoMode,
}

impl MaterialParams {
    /// Uniaxial-strip maturation parameter set (MPa / ug / mm / days).
    pub fn strip_table() -> Self {
        MaterialParams {
            lambda: 0.5,
            mu: 0.25,
            k1: 0.825,
            k2: 4.0,
            kappa: 0.15,
            sigma_g0: 0.2,
            r1: 0.15,
            beta_g: 1.0,
            eta_g: 50.0,
            eta_s: 5.0,
            v_g: 1.0,
            a1: 1e-3,
            tau: 7.0,
            h: 1.65,
            a2: 2.5e-6,
            psi_crit: 2e-5,
            rho_th: 6.5,
            rho_co_f: 38.7,
            c_cell: 15e3,
            energy_per_mass_scale: 1.0,
            pi_co_mode: PiCoMode::ScalarContraction,
        }
    }

    /// Biaxial-cruciform maturation parameter set (uN/mm^2 / ug / mm / days).
    pub fn cruciform_table() -> Self {
        MaterialParams {
            lambda: 818.0,
            mu: 982.0,
            k1: 3351.0,
            k2: 14996.0,
            kappa: 0.10,
            sigma_g0: 22.9,
            r1: 10.0,
            beta_g: 1.0,
            eta_g: 100.0,
            eta_s: 5.0,
            v_g: 1.0,
            a1: 2e-3,
            tau: 7.0,
            h: 1.65,
            a2: 5e-6,
            psi_crit: 3e-5,
            rho_th: 10.0,
            rho_co_f: 38.7,
            c_cell: 15e3,
            energy_per_mass_scale: 1.0,
            pi_co_mode: PiCoMode::ScalarContraction,
        }
    }

    pub fn validate(&self) -> Result<(), GnrError> {
        let checks: [(bool, &str); 12] = [
            (self.mu > 0.0, "mu > 0"),
            (self.lambda + 2.0 * self.mu / 3.0 > 0.0, "lambda + 2mu/3 > 0"),
            (self.k1 >= 0.0, "k1 >= 0"),
            (self.k2 > 0.0, "k2 > 0"),
            (
                (0.0..=1.0 / 3.0).contains(&self.kappa),
                "0 <= kappa <= 1/3",
            ),
            (self.eta_g > 0.0, "eta_g > 0"),
            (self.eta_s > 0.0, "eta_s > 0"),
            (self.tau > 0.0, "tau > 0"),
            (self.h > 0.0, "h > 0"),
            (self.rho_co_f > 0.0, "rho_co_f > 0"),
            (self.rho_th > 0.0, "rho_th > 0"),
            (self.c_cell >= 0.0 && self.v_g > 0.0, "c_cell >= 0, v_g > 0"),
        ];
        for (ok, what) in checks {
            if !ok {
                return Err(GnrError::InvalidState(format!(
                    "material parameter constraint violated: {what}"
                )));
            }
        }
        Ok(())
    }
}

/// Internal variables carried at every integration point.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussPointState {
    /// Matrix growth stretch (symmetric positive definite).
    pub u_gm: SymTen2,
    /// Collagen growth stretch (symmetric positive definite).
    pub u_gco: SymTen2,
    /// Mean fiber direction in the co-rotated configuration (unit).
    pub a_tilde: Vec3,
    /// Growth multiplier rate of the last converged step (1/days).
    pub gamma_dot: f64,
    /// Referential collagen density (ug/mm^3).
    pub rho_co0: f64,
}

impl GaussPointState {
    /// Collagen-free reference state with the given fiber direction.
    pub fn virgin(fiber: Vec3) -> Self {
        GaussPointState {
            u_gm: SymTen2::identity(),
            u_gco: SymTen2::identity(),
            a_tilde: fiber.normalized(),
            gamma_dot: 0.0,
            rho_co0: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), GnrError> {
        if !self.u_gm.is_positive_definite() || !self.u_gco.is_positive_definite() {
            return Err(GnrError::NotPositiveDefinite);
        }
        if (self.a_tilde.norm() - 1.0).abs() > 1e-10 {
            return Err(GnrError::InvalidState(
                "fiber direction is not unit length".into(),
            ));
        }
        if self.rho_co0 < 0.0 {
            return Err(GnrError::InvalidState(
                "negative referential collagen density".into(),
            ));
        }
        Ok(())
    }
}
