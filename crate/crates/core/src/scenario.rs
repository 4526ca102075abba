//! Scenario construction: structured strip and cruciform meshes and the
//! deterministic random fiber field.

use crate::error::GnrError;
use crate::fem::hex8::N_QP;
use crate::fem::mesh::Mesh;
use crate::tensor::Vec3;

/// Deterministic 64-bit PRNG (splitmix64). Chosen because it is tiny,
/// well-documented, and trivially reproducible across platforms and
/// languages: state advances by the golden-ratio increment and the output
/// is a three-round xor-shift-multiply mix of the state.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1) with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Plane in which in-plane fiber angles are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiberPlane {
    Xy,
    Xz,
    Yz,
}

impl FiberPlane {
    /// Unit vector at `angle` radians from the plane's first axis.
    pub fn direction(&self, angle: f64) -> Vec3 {
        let (s, c) = angle.sin_cos();
        match self {
            FiberPlane::Xy => Vec3::new(c, s, 0.0),
            FiberPlane::Xz => Vec3::new(c, 0.0, s),
            FiberPlane::Yz => Vec3::new(0.0, c, s),
        }
    }
}

/// Initial fiber field specification.
#[derive(Debug, Clone, PartialEq)]
pub enum FiberInit {
    /// Angle uniform in [0 deg, 180 deg) in the plane; one draw per
    /// quadrature point in element-major order.
    InPlaneUniform { plane: FiberPlane, seed: u64 },
    /// Constant direction everywhere.
    FixedAngle { plane: FiberPlane, angle_deg: f64 },
}

/// One unit fiber direction per quadrature point (element-major).
pub fn init_fiber_field(mesh: &Mesh, init: &FiberInit) -> Vec<Vec3> {
    let n = mesh.elements.len() * N_QP;
    match init {
        FiberInit::InPlaneUniform { plane, seed } => {
            let mut rng = SplitMix64::new(*seed);
            (0..n)
                .map(|_| plane.direction(std::f64::consts::PI * rng.next_f64()))
                .collect()
        }
        FiberInit::FixedAngle { plane, angle_deg } => {
            let d = plane.direction(angle_deg.to_radians());
            vec![d; n]
        }
    }
}

/// Structured strip mesh: `nx * ny * nz` elements over
/// `length * width * thickness` (x, y, z). Node sets `x_min_face` and
/// `x_max_face` mark the clamped ends; element sets `middle_region`
/// (central 20% of the length) and `leg_region` (the clamp boundary
/// layer, a quarter of the width deep at each end) mark the histogram
/// regions.
pub fn build_strip_mesh(
    length: f64,
    width: f64,
    thickness: f64,
    nx: usize,
    ny: usize,
    nz: usize,
) -> Result<Mesh, GnrError> {
    if nx == 0 || ny == 0 || nz == 0 {
        return Err(GnrError::Config(
            "strip mesh divisions must all be at least 1".into(),
        ));
    }
    if !(length > 0.0 && width > 0.0 && thickness > 0.0) {
        return Err(GnrError::Config("strip dimensions must be positive".into()));
    }
    let node_id = |i: usize, j: usize, k: usize| i * (ny + 1) * (nz + 1) + j * (nz + 1) + k;
    let mut mesh = Mesh::default();
    for i in 0..=nx {
        for j in 0..=ny {
            for k in 0..=nz {
                mesh.nodes.push(Vec3::new(
                    length * i as f64 / nx as f64,
                    width * j as f64 / ny as f64,
                    thickness * k as f64 / nz as f64,
                ));
            }
        }
    }
    let mut middle = Vec::new();
    let mut legs = Vec::new();
    for i in 0..nx {
        for j in 0..ny {
            for k in 0..nz {
                let e = mesh.elements.len();
                mesh.elements.push([
                    node_id(i, j, k),
                    node_id(i + 1, j, k),
                    node_id(i + 1, j + 1, k),
                    node_id(i, j + 1, k),
                    node_id(i, j, k + 1),
                    node_id(i + 1, j, k + 1),
                    node_id(i + 1, j + 1, k + 1),
                    node_id(i, j + 1, k + 1),
                ]);
                let xc = length * (i as f64 + 0.5) / nx as f64;
                if (xc - 0.5 * length).abs() <= 0.1 * length {
                    middle.push(e);
                }
                // The leg region is the biaxially constrained boundary
                // layer at the clamps; its depth scales with the strip
                // width (Saint-Venant), not the length. Keep at least one
                // element column so coarse meshes still have a region.
                let leg_depth = (0.25 * width).max(length / nx as f64);
                if xc < leg_depth || xc > length - leg_depth {
                    legs.push(e);
                }
            }
        }
    }
    let x_min: Vec<usize> = (0..=ny)
        .flat_map(|j| (0..=nz).map(move |k| node_id(0, j, k)))
        .collect();
    let x_max: Vec<usize> = (0..=ny)
        .flat_map(|j| (0..=nz).map(move |k| node_id(nx, j, k)))
        .collect();
    mesh.node_sets.insert("x_min_face".into(), x_min);
    mesh.node_sets.insert("x_max_face".into(), x_max);
    mesh.element_sets.insert("middle_region".into(), middle);
    mesh.element_sets.insert("leg_region".into(), legs);
    mesh.validate()?;
    Ok(mesh)
}

/// Element divisions of the cruciform layout. The defaults give exactly
/// 626 elements: 2 thickness layers of (11x11 center + 4 arms of 3x16).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CruciformDivisions {
    /// Cells across the center block (per in-plane direction).
    pub center: usize,
    /// Cells across an arm's width; must not exceed `center` and must have
    /// the same parity so the arm centers on the block.
    pub arm_width: usize,
    /// Cells along each arm.
    pub arm_length: usize,
    /// Cells through the thickness (y).
    pub thickness: usize,
}

impl Default for CruciformDivisions {
    fn default() -> Self {
        CruciformDivisions {
            center: 11,
            arm_width: 3,
            arm_length: 16,
            thickness: 2,
        }
    }
}

impl CruciformDivisions {
    pub fn element_count(&self) -> usize {
        self.thickness * (self.center * self.center + 4 * self.arm_width * self.arm_length)
    }
}

/// Plus-shaped cruciform mesh in the x-z plane, `thickness` elements
/// through y. `arm_width` is the physical arm width; the center block side
/// is `center / arm_width` division ratio times larger. Node sets
/// `x_min_face`, `x_max_face`, `z_min_face`, `z_max_face` mark the four
/// clamped arm ends.
pub fn build_cruciform_mesh(
    arm_length: f64,
    arm_width: f64,
    thickness: f64,
    div: &CruciformDivisions,
) -> Result<Mesh, GnrError> {
    if div.center == 0 || div.arm_width == 0 || div.arm_length == 0 || div.thickness == 0 {
        return Err(GnrError::Config(
            "cruciform divisions must all be at least 1".into(),
        ));
    }
    if div.arm_width > div.center || (div.center - div.arm_width) % 2 != 0 {
        return Err(GnrError::Config(format!(
            "arm width divisions ({}) must not exceed center divisions ({}) and must share parity \
             so the arm centers on the block; achievable element counts follow \
             thickness*(center^2 + 4*arm_width*arm_length)",
            div.arm_width, div.center
        )));
    }
    let pitch = arm_width / div.arm_width as f64;
    let center_side = pitch * div.center as f64;
    if !(arm_length > 0.5 * center_side) {
        return Err(GnrError::Config(format!(
            "arm length ({arm_length} mm) must exceed the center half-width \
             ({} mm); a square plate is not a cruciform",
            0.5 * center_side
        )));
    }
    if !(thickness > 0.0) {
        return Err(GnrError::Config("thickness must be positive".into()));
    }

    // Uniform in-plane grid of (2*arm_length_div + center) cells per
    // direction, with inactive cells masked away.
    let al = div.arm_length;
    let n_inplane = 2 * al + div.center;
    let ny = div.thickness;
    let arm_pitch = arm_length / al as f64;
    let coord = |idx: usize| -> f64 {
        // Centered: arms span [-(half), -center/2], center, [center/2, half].
        let half = 0.5 * center_side + arm_length;
        if idx <= al {
            -half + arm_pitch * idx as f64
        } else if idx <= al + div.center {
            -0.5 * center_side + pitch * (idx - al) as f64
        } else {
            0.5 * center_side + arm_pitch * (idx - al - div.center) as f64
        }
    };
    let in_center = |c: usize| c >= al && c < al + div.center;
    let offset = (div.center - div.arm_width) / 2;
    let in_band = |c: usize| c >= al + offset && c < al + offset + div.arm_width;
    let cell_active =
        |i: usize, k: usize| (in_center(i) && in_center(k)) || in_band(i) || in_band(k);

    // Compact node numbering, x-slice major for a modest bandwidth.
    let mut node_index = vec![usize::MAX; (n_inplane + 1) * (n_inplane + 1) * (ny + 1)];
    let grid_node = |i: usize, k: usize, j: usize| (i * (n_inplane + 1) + k) * (ny + 1) + j;
    let mut mesh = Mesh::default();
    for i in 0..=n_inplane {
        for k in 0..=n_inplane {
            // A node is kept iff some adjacent cell is active.
            let mut used = false;
            for (ci, ck) in [
                (i.wrapping_sub(1), k.wrapping_sub(1)),
                (i.wrapping_sub(1), k),
                (i, k.wrapping_sub(1)),
                (i, k),
            ] {
                if ci < n_inplane && ck < n_inplane && cell_active(ci, ck) {
                    used = true;
                    break;
                }
            }
            if !used {
                continue;
            }
            for j in 0..=ny {
                node_index[grid_node(i, k, j)] = mesh.nodes.len();
                mesh.nodes.push(Vec3::new(
                    coord(i),
                    thickness * j as f64 / ny as f64,
                    coord(k),
                ));
            }
        }
    }
    for i in 0..n_inplane {
        for k in 0..n_inplane {
            if !cell_active(i, k) {
                continue;
            }
            for j in 0..ny {
                let n = |ii: usize, kk: usize, jj: usize| node_index[grid_node(ii, kk, jj)];
                // VTK ordering with (x, y, z) = (i, j, k) axes.
                mesh.elements.push([
                    n(i, k, j),
                    n(i + 1, k, j),
                    n(i + 1, k, j + 1),
                    n(i, k, j + 1),
                    n(i, k + 1, j),
                    n(i + 1, k + 1, j),
                    n(i + 1, k + 1, j + 1),
                    n(i, k + 1, j + 1),
                ]);
            }
        }
    }

    let mut face = |name: &str, pred: &dyn Fn(usize, usize) -> bool| {
        let mut set = Vec::new();
        for i in 0..=n_inplane {
            for k in 0..=n_inplane {
                if pred(i, k) {
                    for j in 0..=ny {
                        let idx = node_index[grid_node(i, k, j)];
                        if idx != usize::MAX {
                            set.push(idx);
                        }
                    }
                }
            }
        }
        mesh.node_sets.insert(name.into(), set);
    };
    face("x_min_face", &|i, _k| i == 0);
    face("x_max_face", &|i, _k| i == n_inplane);
    face("z_min_face", &|_i, k| k == 0);
    face("z_max_face", &|_i, k| k == n_inplane);

    mesh.validate()?;
    Ok(mesh)
}
