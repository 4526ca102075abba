//! Global internal-force and tangent assembly.
//!
//! Per-element work (quadrature-point integration and consistent tangents)
//! runs through the parallel map helper; gathering into the band matrix is
//! serialized in element order, so the result is deterministic.

use crate::error::GnrError;
use crate::fem::hex8::{self, QpData, N_QP};
use crate::fem::linear::BandMatrix;
use crate::fem::mesh::Mesh;
use crate::local::{consistent_tangent_from, integrate_point_with_guess, StepResult};
use crate::material::{GaussPointState, MaterialParams};
use crate::parallel::try_map_collect;
use crate::tensor::{Ten2, Ten4Minor, Vec3};

/// Per-element assembly product.
pub struct ElementContribution {
    pub force: [Vec3; 8],
    /// 24x24 stiffness, dof-major per node: [node a][component i].
    pub stiffness: Box<[[f64; 24]; 24]>,
    pub qp_results: Vec<StepResult>,
}

/// Whole-mesh assembly product.
pub struct Assembly {
    /// Internal nodal forces (3 dofs per node).
    pub internal_force: Vec<f64>,
    pub stiffness: BandMatrix,
    /// Trial quadrature-point states (committed only on step acceptance).
    pub trial_states: Vec<GaussPointState>,
    /// Per-QP step results kept for diagnostics/output.
    pub qp_results: Vec<StepResult>,
}

/// Precomputed reference quadrature data for every element.
pub fn precompute_quadrature(mesh: &Mesh) -> Result<Vec<[QpData; N_QP]>, GnrError> {
    (0..mesh.elements.len())
        .map(|e| hex8::element_quadrature(&mesh.element_coords(e)))
        .collect()
}

fn gather_disp(mesh: &Mesh, displacements: &[Vec3], e: usize) -> [Vec3; 8] {
    let mut d = [Vec3::ZERO; 8];
    for (i, &n) in mesh.elements[e].iter().enumerate() {
        d[i] = displacements[n];
    }
    d
}

/// Integrate and linearize one element.
#[allow(clippy::too_many_arguments)]
fn element_work(
    e: usize,
    mesh: &Mesh,
    qps: &[[QpData; N_QP]],
    displacements: &[Vec3],
    gp_old: &[GaussPointState],
    guess: Option<&[GaussPointState]>,
    t_new: f64,
    dt: f64,
    p: &MaterialParams,
    with_tangent: bool,
) -> Result<ElementContribution, GnrError> {
    let disp = gather_disp(mesh, displacements, e);
    let mut force = [Vec3::ZERO; 8];
    let mut k = Box::new([[0.0f64; 24]; 24]);
    let mut qp_results = Vec::with_capacity(N_QP);

    for (q, qp) in qps[e].iter().enumerate() {
        let f = hex8::deformation_gradient(qp, &disp);
        if !(f.det() > 0.0) {
            return Err(GnrError::InvertedElement(e));
        }
        let idx = e * N_QP + q;
        let wrap = |err: GnrError| GnrError::QuadraturePoint {
            element: e,
            qp: q,
            source: Box::new(err),
        };
        let step = integrate_point_with_guess(
            &f,
            t_new,
            dt,
            &gp_old[idx],
            p,
            guess.map(|g| &g[idx]),
        )
        .map_err(wrap)?;

        let w = qp.weight_detj;
        let s = step.stress.s;
        // Internal force: P grad N_a with P = F S.
        let p_stress = f * s.full();
        for a in 0..8 {
            force[a] = force[a] + p_stress.mul_vec(&qp.grad[a]).scale(w);
        }

        if with_tangent {
            let m: Ten4Minor =
                consistent_tangent_from(&f, t_new, dt, &gp_old[idx], p, &step).map_err(wrap)?;
            accumulate_stiffness(&mut k, qp, &f, &s.full(), &m, w);
        }
        qp_results.push(step);
    }
    Ok(ElementContribution {
        force,
        stiffness: k,
        qp_results,
    })
}

/// Geometric + material stiffness for one quadrature point.
fn accumulate_stiffness(
    k: &mut [[f64; 24]; 24],
    qp: &QpData,
    f: &Ten2,
    s_full: &Ten2,
    m: &Ten4Minor,
    w: f64,
) {
    // Geometric part: (grad_a . S grad_b) delta_ik.
    let mut sg = [Vec3::ZERO; 8];
    for b in 0..8 {
        sg[b] = s_full.mul_vec(&qp.grad[b]);
    }
    for a in 0..8 {
        for b in 0..8 {
            let gg = w * qp.grad[a].dot(&sg[b]);
            for i in 0..3 {
                k[3 * a + i][3 * b + i] += gg;
            }
        }
    }
    // Material part: perturbing node b along e_k gives dF = e_k (x) g_b,
    // hence dC = F^T dF + dF^T F = f_k (x) g_b + g_b (x) f_k with f_k the
    // k-th ROW of F; dS = M : dC; the row entry is (F dS) grad_a.
    let mut frow = [Vec3::ZERO; 3];
    for kk in 0..3 {
        frow[kk] = Vec3::new(f.0[kk][0], f.0[kk][1], f.0[kk][2]);
    }
    for b in 0..8 {
        for kk in 0..3 {
            let dc = frow[kk].outer(&qp.grad[b]).sym().scale(2.0);
            let ds = m.apply(&dc);
            let fds = *f * ds.full();
            for a in 0..8 {
                let col = fds.mul_vec(&qp.grad[a]);
                for i in 0..3 {
                    k[3 * a + i][3 * b + kk] += w * col[i];
                }
            }
        }
    }
}

/// Assemble internal forces, the band stiffness, and the trial states.
///
/// `guess` optionally warm-starts each local solve (typically the trial
/// states of the previous global Newton iteration).
#[allow(clippy::too_many_arguments)]
pub fn assemble(
    mesh: &Mesh,
    qps: &[[QpData; N_QP]],
    displacements: &[Vec3],
    gp_old: &[GaussPointState],
    guess: Option<&[GaussPointState]>,
    t_new: f64,
    dt: f64,
    p: &MaterialParams,
    with_tangent: bool,
) -> Result<Assembly, GnrError> {
    let ne = mesh.elements.len();
    let contributions = try_map_collect(ne, |e| {
        element_work(
            e,
            mesh,
            qps,
            displacements,
            gp_old,
            guess,
            t_new,
            dt,
            p,
            with_tangent,
        )
    })?;

    let n_dofs = mesh.n_dofs();
    let mut internal_force = vec![0.0; n_dofs];
    let bw = mesh.dof_bandwidth();
    let mut stiffness = BandMatrix::new(n_dofs, if with_tangent { bw } else { 0 });
    let mut trial_states = Vec::with_capacity(ne * N_QP);
    let mut qp_results = Vec::with_capacity(ne * N_QP);

    for (e, contrib) in contributions.into_iter().enumerate() {
        let conn = &mesh.elements[e];
        for (a, &na) in conn.iter().enumerate() {
            for i in 0..3 {
                internal_force[3 * na + i] += contrib.force[a][i];
            }
        }
        if with_tangent {
            for (a, &na) in conn.iter().enumerate() {
                for (b, &nb) in conn.iter().enumerate() {
                    for i in 0..3 {
                        for j in 0..3 {
                            let v = contrib.stiffness[3 * a + i][3 * b + j];
                            if v != 0.0 {
                                stiffness.add(3 * na + i, 3 * nb + j, v);
                            }
                        }
                    }
                }
            }
        }
        for r in contrib.qp_results {
            trial_states.push(r.state_new.clone());
            qp_results.push(r);
        }
    }
    Ok(Assembly {
        internal_force,
        stiffness,
        trial_states,
        qp_results,
    })
}
