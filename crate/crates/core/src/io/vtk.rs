//! VTK legacy ASCII (version 3.0) snapshot export for ParaView.

use std::io::Write;
use std::path::Path;

use crate::constitutive::evaluate_stress;
use crate::error::GnrError;
use crate::fem::hex8::{self, QpData, N_QP};
use crate::fem::mesh::Mesh;
use crate::fem::solve::GlobalState;
use crate::material::MaterialParams;
use crate::tensor::Vec3;

/// Format with 9 significant digits.
fn num(v: f64) -> String {
    format!("{v:.8e}")
}

/// Per-cell derived fields (quadrature-point averages).
struct CellData {
    rho_co0: f64,
    rho_current: f64,
    j: f64,
    /// Cauchy stress components: xx, yy, zz, xy, yz, xz.
    sigma: [f64; 6],
    fiber: Vec3,
}

fn cell_data(
    mesh: &Mesh,
    qps: &[[QpData; N_QP]],
    state: &GlobalState,
    p: &MaterialParams,
    e: usize,
) -> Result<CellData, GnrError> {
    let mut disp = [Vec3::ZERO; 8];
    for (i, &n) in mesh.elements[e].iter().enumerate() {
        disp[i] = state.displacements[n];
    }
    let mut rho = 0.0;
    let mut rho_cur = 0.0;
    let mut jmean = 0.0;
    let mut sigma = [0.0f64; 6];
    let mut fiber = Vec3::ZERO;
    for (q, qp) in qps[e].iter().enumerate() {
        let gp = &state.gp_states[e * N_QP + q];
        let f = hex8::deformation_gradient(qp, &disp);
        let bundle = evaluate_stress(&f, gp, p).map_err(|err| GnrError::QuadraturePoint {
            element: e,
            qp: q,
            source: Box::new(err),
        })?;
        let j = bundle.j;
        // Cauchy stress: F S F^T / J.
        let cauchy = (f * bundle.s.full() * f.transpose()).scale(1.0 / j);
        rho += gp.rho_co0;
        rho_cur += gp.rho_co0 / j;
        jmean += j;
        sigma[0] += cauchy.0[0][0];
        sigma[1] += cauchy.0[1][1];
        sigma[2] += cauchy.0[2][2];
        sigma[3] += 0.5 * (cauchy.0[0][1] + cauchy.0[1][0]);
        sigma[4] += 0.5 * (cauchy.0[1][2] + cauchy.0[2][1]);
        sigma[5] += 0.5 * (cauchy.0[0][2] + cauchy.0[2][0]);
        fiber = fiber + gp.a_tilde;
    }
    let inv = 1.0 / N_QP as f64;
    for s in sigma.iter_mut() {
        *s *= inv;
    }
    Ok(CellData {
        rho_co0: rho * inv,
        rho_current: rho_cur * inv,
        j: jmean * inv,
        sigma,
        fiber: fiber.scale(inv),
    })
}

/// Serialize one snapshot as a VTK legacy ASCII unstructured grid.
pub fn format_vtk_snapshot(
    mesh: &Mesh,
    qps: &[[QpData; N_QP]],
    state: &GlobalState,
    p: &MaterialParams,
    title: &str,
) -> Result<String, GnrError> {
    let nn = mesh.nodes.len();
    let ne = mesh.elements.len();
    let mut out = String::new();
    out.push_str("# vtk DataFile Version 3.0\n");
    out.push_str(title);
    out.push('\n');
    out.push_str("ASCII\nDATASET UNSTRUCTURED_GRID\n");

    out.push_str(&format!("POINTS {nn} double\n"));
    for n in &mesh.nodes {
        out.push_str(&format!("{} {} {}\n", num(n[0]), num(n[1]), num(n[2])));
    }
    out.push_str(&format!("CELLS {ne} {}\n", 9 * ne));
    for c in &mesh.elements {
        out.push_str(&format!(
            "8 {} {} {} {} {} {} {} {}\n",
            c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7]
        ));
    }
    out.push_str(&format!("CELL_TYPES {ne}\n"));
    for _ in 0..ne {
        out.push_str("12\n");
    }

    out.push_str(&format!("POINT_DATA {nn}\n"));
    out.push_str("VECTORS displacement double\n");
    for u in &state.displacements {
        out.push_str(&format!("{} {} {}\n", num(u[0]), num(u[1]), num(u[2])));
    }

    let cells: Vec<CellData> = (0..ne)
        .map(|e| cell_data(mesh, qps, state, p, e))
        .collect::<Result<_, _>>()?;
    out.push_str(&format!("CELL_DATA {ne}\n"));
    let scalar = |out: &mut String, name: &str, get: &dyn Fn(&CellData) -> f64| {
        out.push_str(&format!("SCALARS {name} double 1\nLOOKUP_TABLE default\n"));
        for c in &cells {
            out.push_str(&num(get(c)));
            out.push('\n');
        }
    };
    scalar(&mut out, "rho_co0", &|c| c.rho_co0);
    scalar(&mut out, "rho_current", &|c| c.rho_current);
    scalar(&mut out, "J", &|c| c.j);
    let names = [
        "sigma_xx", "sigma_yy", "sigma_zz", "sigma_xy", "sigma_yz", "sigma_xz",
    ];
    for (i, name) in names.iter().enumerate() {
        scalar(&mut out, name, &|c| c.sigma[i]);
    }
    out.push_str("VECTORS fiber double\n");
    for c in &cells {
        out.push_str(&format!(
            "{} {} {}\n",
            num(c.fiber[0]),
            num(c.fiber[1]),
            num(c.fiber[2])
        ));
    }
    Ok(out)
}

pub fn write_vtk_snapshot(
    mesh: &Mesh,
    qps: &[[QpData; N_QP]],
    state: &GlobalState,
    p: &MaterialParams,
    title: &str,
    path: &Path,
) -> Result<(), GnrError> {
    let text = format_vtk_snapshot(mesh, qps, state, p, title)?;
    let mut f = std::fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

/// Minimal reader used as an independent round-trip oracle: recovers node
/// coordinates and cell connectivity from a legacy ASCII file.
pub fn read_vtk_geometry(text: &str) -> Result<(Vec<Vec3>, Vec<[usize; 8]>), GnrError> {
    let mut tokens = text.lines().skip(4).flat_map(str::split_whitespace);
    let bad = |what: &str| GnrError::Config(format!("VTK parse error: {what}"));
    match (tokens.next(), tokens.next(), tokens.next()) {
        (Some("POINTS"), Some(n), Some("double")) => {
            let n: usize = n.parse().map_err(|_| bad("point count"))?;
            let mut nodes = Vec::with_capacity(n);
            for _ in 0..n {
                let mut v = [0.0; 3];
                for x in v.iter_mut() {
                    *x = tokens
                        .next()
                        .ok_or_else(|| bad("truncated points"))?
                        .parse()
                        .map_err(|_| bad("point coordinate"))?;
                }
                nodes.push(Vec3::new(v[0], v[1], v[2]));
            }
            match (tokens.next(), tokens.next(), tokens.next()) {
                (Some("CELLS"), Some(ne), Some(_)) => {
                    let ne: usize = ne.parse().map_err(|_| bad("cell count"))?;
                    let mut cells = Vec::with_capacity(ne);
                    for _ in 0..ne {
                        let k: usize = tokens
                            .next()
                            .ok_or_else(|| bad("truncated cells"))?
                            .parse()
                            .map_err(|_| bad("cell size"))?;
                        if k != 8 {
                            return Err(bad("non-hex cell"));
                        }
                        let mut c = [0usize; 8];
                        for x in c.iter_mut() {
                            *x = tokens
                                .next()
                                .ok_or_else(|| bad("truncated connectivity"))?
                                .parse()
                                .map_err(|_| bad("node index"))?;
                        }
                        cells.push(c);
                    }
                    Ok((nodes, cells))
                }
                _ => Err(bad("missing CELLS")),
            }
        }
        _ => Err(bad("missing POINTS")),
    }
}
