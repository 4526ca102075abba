//! Mesh container with named node and element sets.

use std::collections::BTreeMap;

use crate::error::GnrError;
use crate::fem::hex8;
use crate::tensor::Vec3;

/// Hex8 mesh. Element connectivity uses the VTK hexahedron node ordering.
#[derive(Debug, Clone, Default)]
pub struct Mesh {
    pub nodes: Vec<Vec3>,
    pub elements: Vec<[usize; 8]>,
    pub node_sets: BTreeMap<String, Vec<usize>>,
    pub element_sets: BTreeMap<String, Vec<usize>>,
}

impl Mesh {
    pub fn n_dofs(&self) -> usize {
        3 * self.nodes.len()
    }

    pub fn element_coords(&self, e: usize) -> [Vec3; 8] {
        let conn = &self.elements[e];
        let mut c = [Vec3::ZERO; 8];
        for (i, &n) in conn.iter().enumerate() {
            c[i] = self.nodes[n];
        }
        c
    }

    pub fn node_set(&self, name: &str) -> Result<&[usize], GnrError> {
        self.node_sets
            .get(name)
            .map(|v| v.as_slice())
            .ok_or_else(|| GnrError::Mesh(format!("unknown node set '{name}'")))
    }

    pub fn element_set(&self, name: &str) -> Result<&[usize], GnrError> {
        self.element_sets
            .get(name)
            .map(|v| v.as_slice())
            .ok_or_else(|| GnrError::Mesh(format!("unknown element set '{name}'")))
    }

    /// Total reference volume by quadrature.
    pub fn reference_volume(&self) -> Result<f64, GnrError> {
        let mut v = 0.0;
        for e in 0..self.elements.len() {
            let qps = hex8::element_quadrature(&self.element_coords(e))?;
            v += qps.iter().map(|q| q.weight_detj).sum::<f64>();
        }
        Ok(v)
    }

    /// Index-range and positive-Jacobian validation.
    pub fn validate(&self) -> Result<(), GnrError> {
        let n = self.nodes.len();
        for (e, conn) in self.elements.iter().enumerate() {
            for &i in conn {
                if i >= n {
                    return Err(GnrError::Mesh(format!(
                        "element {e} references node {i} out of range ({n} nodes)"
                    )));
                }
            }
            hex8::element_quadrature(&self.element_coords(e))
                .map_err(|err| GnrError::Mesh(format!("element {e}: {err}")))?;
        }
        for (name, set) in &self.node_sets {
            if let Some(&bad) = set.iter().find(|&&i| i >= n) {
                return Err(GnrError::Mesh(format!(
                    "node set '{name}' references node {bad} out of range"
                )));
            }
        }
        let ne = self.elements.len();
        for (name, set) in &self.element_sets {
            if let Some(&bad) = set.iter().find(|&&i| i >= ne) {
                return Err(GnrError::Mesh(format!(
                    "element set '{name}' references element {bad} out of range"
                )));
            }
        }
        Ok(())
    }

    /// Half-bandwidth of the dof connectivity graph: max dof-index distance
    /// within any element.
    pub fn dof_bandwidth(&self) -> usize {
        let mut bw = 0usize;
        for conn in &self.elements {
            let lo = *conn.iter().min().unwrap();
            let hi = *conn.iter().max().unwrap();
            bw = bw.max(3 * (hi - lo) + 2);
        }
        bw
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_cube() -> Mesh {
        let mut nodes = Vec::new();
        for xi in hex8::NODE_XI {
            nodes.push(Vec3::new(
                0.5 * (xi[0] + 1.0),
                0.5 * (xi[1] + 1.0),
                0.5 * (xi[2] + 1.0),
            ));
        }
        Mesh {
            nodes,
            elements: vec![[0, 1, 2, 3, 4, 5, 6, 7]],
            ..Default::default()
        }
    }

    #[test]
    fn single_cube_validates_with_unit_volume() {
        let m = single_cube();
        m.validate().unwrap();
        assert!((m.reference_volume().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(m.dof_bandwidth(), 23);
    }

    #[test]
    fn out_of_range_node_rejected() {
        let mut m = single_cube();
        m.elements[0][3] = 99;
        assert!(m.validate().is_err());
    }

    #[test]
    fn bad_node_set_rejected() {
        let mut m = single_cube();
        m.node_sets.insert("face".into(), vec![0, 50]);
        assert!(m.validate().is_err());
    }
}
