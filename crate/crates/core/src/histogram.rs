//! Fiber-orientation histograms over mesh regions.

use crate::error::GnrError;
use crate::fem::hex8::N_QP;
use crate::fem::mesh::Mesh;
use crate::material::GaussPointState;
use crate::scenario::FiberPlane;
use crate::tensor::Vec3;

/// Per-region fiber-angle distribution. Angles are measured from the
/// plane's first (longitudinal) axis and folded to [0 deg, 90 deg] because
/// a fiber and its negation are the same fiber.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientationHistogram {
    /// `bins + 1` edges in degrees, uniformly spanning [0, 90].
    pub bin_edges: Vec<f64>,
    /// Fiber fraction per bin in percent (sums to 100).
    pub fractions: Vec<f64>,
    pub region: String,
    pub time_days: f64,
}

/// In-plane angle of `a` from the plane's first axis, folded to [0, 90]
/// degrees. Fibers orthogonal to the plane count as 90 degrees.
pub fn folded_angle_deg(a: &Vec3, plane: FiberPlane) -> f64 {
    let (p0, p1) = match plane {
        FiberPlane::Xy => (a[0], a[1]),
        FiberPlane::Xz => (a[0], a[2]),
        FiberPlane::Yz => (a[1], a[2]),
    };
    if p0.abs() < 1e-300 && p1.abs() < 1e-300 {
        return 90.0;
    }
    p1.abs().atan2(p0.abs()).to_degrees()
}

/// Histogram of the fiber directions of all quadrature points of the
/// elements in `region` (default 30 bins of 3 degrees).
pub fn fiber_histogram(
    gp_states: &[GaussPointState],
    mesh: &Mesh,
    region: &str,
    plane: FiberPlane,
    bins: usize,
    time_days: f64,
) -> Result<OrientationHistogram, GnrError> {
    if bins == 0 {
        return Err(GnrError::Config("histogram needs at least one bin".into()));
    }
    let set = mesh.element_set(region)?;
    if set.is_empty() {
        return Err(GnrError::Mesh(format!("element set '{region}' is empty")));
    }
    let width = 90.0 / bins as f64;
    let mut counts = vec![0usize; bins];
    let mut total = 0usize;
    for &e in set {
        for q in 0..N_QP {
            let a = &gp_states[e * N_QP + q].a_tilde;
            let theta = folded_angle_deg(a, plane);
            let b = ((theta / width) as usize).min(bins - 1);
            counts[b] += 1;
            total += 1;
        }
    }
    let fractions: Vec<f64> = counts
        .iter()
        .map(|&c| 100.0 * c as f64 / total as f64)
        .collect();
    let bin_edges: Vec<f64> = (0..=bins).map(|i| width * i as f64).collect();
    Ok(OrientationHistogram {
        bin_edges,
        fractions,
        region: region.to_string(),
        time_days,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{build_strip_mesh, init_fiber_field, FiberInit};

    fn states_from_fibers(fibers: &[Vec3]) -> Vec<GaussPointState> {
        fibers.iter().map(|&a| GaussPointState::virgin(a)).collect()
    }

    #[test]
    fn all_longitudinal_fibers_land_in_first_bin() {
        let mesh = build_strip_mesh(10.0, 1.0, 1.0, 10, 1, 1).unwrap();
        let fibers = init_fiber_field(
            &mesh,
            &FiberInit::FixedAngle {
                plane: FiberPlane::Xy,
                angle_deg: 0.0,
            },
        );
        let h = fiber_histogram(
            &states_from_fibers(&fibers),
            &mesh,
            "middle_region",
            FiberPlane::Xy,
            30,
            0.0,
        )
        .unwrap();
        assert_eq!(h.fractions.len(), 30);
        assert!((h.fractions[0] - 100.0).abs() < 1e-12);
        assert!((h.fractions.iter().sum::<f64>() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn folding_maps_sign_and_obtuse_angles() {
        let a = Vec3::new(-1.0, 0.0, 0.0);
        assert!(folded_angle_deg(&a, FiberPlane::Xy).abs() < 1e-12);
        let b = Vec3::new(-0.5, 3f64.sqrt() / 2.0, 0.0); // 120 deg -> 60 deg
        assert!((folded_angle_deg(&b, FiberPlane::Xy) - 60.0).abs() < 1e-9);
        let c = Vec3::new(0.0, 0.0, 1.0); // orthogonal to x-y plane
        assert!((folded_angle_deg(&c, FiberPlane::Xy) - 90.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_field_is_flat_by_chi_squared() {
        // 10^4 random in-plane fibers over the default bins: chi^2 below
        // the p = 0.01 critical value (49.59 at 29 dof).
        let mesh = build_strip_mesh(16.0, 2.0, 1.0, 25, 10, 5).unwrap();
        let mut sets = mesh.element_sets.clone();
        sets.insert("all".into(), (0..mesh.elements.len()).collect());
        let mut mesh = mesh;
        mesh.element_sets = sets;
        let fibers = init_fiber_field(
            &mesh,
            &FiberInit::InPlaneUniform {
                plane: FiberPlane::Xy,
                seed: 20240817,
            },
        );
        let h = fiber_histogram(
            &states_from_fibers(&fibers),
            &mesh,
            "all",
            FiberPlane::Xy,
            30,
            0.0,
        )
        .unwrap();
        let n = (mesh.elements.len() * N_QP) as f64;
        let expect = n / 30.0;
        let chi2: f64 = h
            .fractions
            .iter()
            .map(|f| {
                let c = f / 100.0 * n;
                (c - expect) * (c - expect) / expect
            })
            .sum();
        assert!(chi2 < 49.59, "chi2 {chi2}");
        assert!((h.fractions.iter().sum::<f64>() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn missing_region_is_an_error() {
        let mesh = build_strip_mesh(1.0, 1.0, 1.0, 1, 1, 1).unwrap();
        let fibers = init_fiber_field(
            &mesh,
            &FiberInit::FixedAngle {
                plane: FiberPlane::Xy,
                angle_deg: 10.0,
            },
        );
        assert!(fiber_histogram(
            &states_from_fibers(&fibers),
            &mesh,
            "nope",
            FiberPlane::Xy,
            30,
            0.0
        )
        .is_err());
    }
}
