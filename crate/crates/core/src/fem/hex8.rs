//! Isoparametric 8-node hexahedron with full 2x2x2 Gauss quadrature.
//!
//! Node ordering is the VTK hexahedron convention: bottom face
//! counterclockwise, then top face counterclockwise.

use crate::error::GnrError;
use crate::tensor::{Ten2, Vec3};

/// Natural coordinates of the 8 nodes.
pub const NODE_XI: [[f64; 3]; 8] = [
    [-1.0, -1.0, -1.0],
    [1.0, -1.0, -1.0],
    [1.0, 1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
    [1.0, -1.0, 1.0],
    [1.0, 1.0, 1.0],
    [-1.0, 1.0, 1.0],
];

/// Quadrature points per element.
pub const N_QP: usize = 8;

/// Natural coordinates of the 2x2x2 Gauss points (weights are all 1).
pub fn gauss_points() -> [[f64; 3]; N_QP] {
    let g = 1.0 / 3f64.sqrt();
    let mut pts = [[0.0; 3]; N_QP];
    for (q, p) in pts.iter_mut().enumerate() {
        p[0] = if q & 1 == 0 { -g } else { g };
        p[1] = if q & 2 == 0 { -g } else { g };
        p[2] = if q & 4 == 0 { -g } else { g };
    }
    pts
}

/// Shape function values at a natural point.
pub fn shape(xi: &[f64; 3]) -> [f64; 8] {
    let mut n = [0.0; 8];
    for (a, nx) in NODE_XI.iter().enumerate() {
        n[a] = 0.125 * (1.0 + xi[0] * nx[0]) * (1.0 + xi[1] * nx[1]) * (1.0 + xi[2] * nx[2]);
    }
    n
}

/// Shape function gradients with respect to the natural coordinates.
pub fn shape_grad_ref(xi: &[f64; 3]) -> [[f64; 3]; 8] {
    let mut g = [[0.0; 3]; 8];
    for (a, nx) in NODE_XI.iter().enumerate() {
        g[a][0] = 0.125 * nx[0] * (1.0 + xi[1] * nx[1]) * (1.0 + xi[2] * nx[2]);
        g[a][1] = 0.125 * nx[1] * (1.0 + xi[0] * nx[0]) * (1.0 + xi[2] * nx[2]);
        g[a][2] = 0.125 * nx[2] * (1.0 + xi[0] * nx[0]) * (1.0 + xi[1] * nx[1]);
    }
    g
}

/// Reference-configuration data at one quadrature point.
#[derive(Debug, Clone, Copy)]
pub struct QpData {
    /// Shape gradients with respect to the reference coordinates.
    pub grad: [Vec3; 8],
    /// Gauss weight times the reference Jacobian determinant.
    pub weight_detj: f64,
}

/// Precompute reference gradients and weights for one element.
pub fn element_quadrature(coords: &[Vec3; 8]) -> Result<[QpData; N_QP], GnrError> {
    let mut out = [QpData {
        grad: [Vec3::ZERO; 8],
        weight_detj: 0.0,
    }; N_QP];
    for (q, xi) in gauss_points().iter().enumerate() {
        let dref = shape_grad_ref(xi);
        // Jacobian dX/dxi.
        let mut jac = Ten2::ZERO;
        for a in 0..8 {
            for i in 0..3 {
                for d in 0..3 {
                    jac.0[i][d] += coords[a][i] * dref[a][d];
                }
            }
        }
        let detj = jac.det();
        if !(detj > 0.0) {
            return Err(GnrError::Mesh(format!(
                "non-positive reference Jacobian ({detj}) at quadrature point {q}"
            )));
        }
        let jinv = jac.inverse()?;
        for a in 0..8 {
            // dN/dX = J^-T dN/dxi.
            let d = Vec3::new(dref[a][0], dref[a][1], dref[a][2]);
            out[q].grad[a] = jinv.transpose().mul_vec(&d);
        }
        out[q].weight_detj = detj; // all Gauss weights are 1
    }
    Ok(out)
}

/// Deformation gradient F = I + sum_a u_a (x) grad N_a at one quadrature
/// point.
pub fn deformation_gradient(qp: &QpData, disp: &[Vec3; 8]) -> Ten2 {
    let mut f = Ten2::identity();
    for a in 0..8 {
        for i in 0..3 {
            for j in 0..3 {
                f.0[i][j] += disp[a][i] * qp.grad[a][j];
            }
        }
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_cube() -> [Vec3; 8] {
        let mut c = [Vec3::ZERO; 8];
        for (a, xi) in NODE_XI.iter().enumerate() {
            c[a] = Vec3::new(
                0.5 * (xi[0] + 1.0),
                0.5 * (xi[1] + 1.0),
                0.5 * (xi[2] + 1.0),
            );
        }
        c
    }

    #[test]
    fn shapes_partition_of_unity() {
        for xi in [[0.0, 0.0, 0.0], [0.3, -0.7, 0.5], [-1.0, 1.0, 1.0]] {
            let n = shape(&xi);
            assert_relative_eq!(n.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
            let g = shape_grad_ref(&xi);
            for d in 0..3 {
                let s: f64 = g.iter().map(|ga| ga[d]).sum();
                assert!(s.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn unit_cube_volume_is_exact() {
        let qps = element_quadrature(&unit_cube()).unwrap();
        let v: f64 = qps.iter().map(|q| q.weight_detj).sum();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_displacement_gives_identity() {
        let qps = element_quadrature(&unit_cube()).unwrap();
        for q in &qps {
            let f = deformation_gradient(q, &[Vec3::ZERO; 8]);
            assert!((f - Ten2::identity()).frobenius_norm() < 1e-14);
        }
    }

    #[test]
    fn affine_displacement_is_reproduced_exactly() {
        let a = Ten2([[0.02, 0.01, 0.0], [0.005, -0.03, 0.002], [0.0, 0.01, 0.015]]);
        let coords = unit_cube();
        let mut disp = [Vec3::ZERO; 8];
        for (u, x) in disp.iter_mut().zip(coords.iter()) {
            *u = a.mul_vec(x);
        }
        let qps = element_quadrature(&coords).unwrap();
        for q in &qps {
            let f = deformation_gradient(q, &disp);
            assert!((f - (Ten2::identity() + a)).frobenius_norm() < 1e-13);
        }
    }

    #[test]
    fn distorted_element_volume_matches_quadrature() {
        // A mildly sheared brick: volume = |det A| for an affine map of the
        // unit cube.
        let a = Ten2([[1.2, 0.1, 0.0], [0.0, 0.9, 0.05], [0.02, 0.0, 1.1]]);
        let mut coords = unit_cube();
        for c in coords.iter_mut() {
            *c = a.mul_vec(c);
        }
        let qps = element_quadrature(&coords).unwrap();
        let v: f64 = qps.iter().map(|q| q.weight_detj).sum();
        assert_relative_eq!(v, a.det(), epsilon = 1e-12);
    }

    #[test]
    fn inverted_element_rejected() {
        let mut coords = unit_cube();
        // Collapse the element through itself.
        for c in coords.iter_mut() {
            c[0] = -c[0];
        }
        assert!(element_quadrature(&coords).is_err());
    }
}
