//! Finite-strain growth and remodeling of tissue-engineered constructs.
//!
//! The crate couples three adaptation processes at every quadrature point of
//! a quasi-static finite element model:
//!
//! * volumetric growth of matrix and collagen, driven by the distance of the
//!   stress state from a homeostatic surface (Perzyna-style overstress),
//! * collagen densification with a time-programmed deposition term and a
//!   strain-energy-gated mechanobiological term, and
//! * reorientation of the mean fiber direction toward the dominant principal
//!   stress direction.
//!
//! Layering, bottom up: [`tensor`] (small dense algebra), [`material`]
//! (parameters and point state), [`constitutive`] (energies and stresses),
//! [`growth`] (rate laws), [`local`] (implicit point integrator and
//! consistent tangent), [`fem`] (mesh, elements, global solve), [`scenario`]
//! (mesh builders and simulation setup), plus I/O, configuration,
//! calibration, and CLI support modules.

pub mod calibrate;
pub mod config;
pub mod constitutive;
pub mod dataset;
pub mod error;
pub mod fem;
pub mod growth;
pub mod histogram;
pub mod io;
pub mod local;
pub mod material;
pub mod parallel;
pub mod scenario;
pub mod tensor;

pub use error::GnrError;
pub use material::{GaussPointState, MaterialParams, PiCoMode};
