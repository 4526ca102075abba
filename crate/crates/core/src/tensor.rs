//! Dense small-tensor algebra for 3D continuum mechanics.
//!
//! Everything here is fixed-size (3-vectors, 3x3 tensors, 6x6 Voigt blocks)
//! and allocation-free. The Voigt ordering used throughout the crate is
//! `[xx, yy, zz, xy, yz, xz]` with the factor-2-on-shear-strain convention:
//! strain-like 6-vectors carry doubled shear components, stress-like
//! 6-vectors carry plain shear components. All modules import this
//! convention from here.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::error::GnrError;

/// 3-vector (mm or dimensionless depending on use).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3(pub [f64; 3]);

/// General 3x3 tensor, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Ten2(pub [[f64; 3]; 3]);

/// Symmetric 3x3 tensor stored as `[xx, yy, zz, xy, yz, xz]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymTen2(pub [f64; 6]);

/// Minor-symmetric 4th-order tensor in 6x6 Voigt form.
///
/// Maps a symmetric strain-like increment (shears doubled) to a symmetric
/// stress-like increment (plain shears): `dS_v = M * dC_v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ten4Minor(pub [[f64; 6]; 6]);

impl Vec3 {
    pub const ZERO: Vec3 = Vec3([0.0; 3]);

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3([x, y, z])
    }

    pub fn dot(&self, other: &Vec3) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn cross(&self, other: &Vec3) -> Vec3 {
        let a = &self.0;
        let b = &other.0;
        Vec3([
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ])
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(&self) -> Vec3 {
        let n = self.norm();
        Vec3([self.0[0] / n, self.0[1] / n, self.0[2] / n])
    }

    pub fn scale(&self, s: f64) -> Vec3 {
        Vec3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }

    /// Outer product a (x) b.
    pub fn outer(&self, other: &Vec3) -> Ten2 {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = self.0[i] * other.0[j];
            }
        }
        Ten2(m)
    }

    /// Symmetric outer product a (x) a.
    pub fn self_outer(&self) -> SymTen2 {
        let a = &self.0;
        SymTen2([
            a[0] * a[0],
            a[1] * a[1],
            a[2] * a[2],
            a[0] * a[1],
            a[1] * a[2],
            a[0] * a[2],
        ])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Vec3 {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        self.scale(-1.0)
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

impl Ten2 {
    pub const ZERO: Ten2 = Ten2([[0.0; 3]; 3]);

    pub fn identity() -> Ten2 {
        Ten2([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    pub fn from_diag(a: f64, b: f64, c: f64) -> Ten2 {
        Ten2([[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, c]])
    }

    pub fn transpose(&self) -> Ten2 {
        let m = &self.0;
        Ten2([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn inverse(&self) -> Result<Ten2, GnrError> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return Err(GnrError::SingularTensor);
        }
        let m = &self.0;
        let inv = [
            [
                (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / d,
                (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / d,
                (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / d,
            ],
            [
                (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / d,
                (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / d,
                (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / d,
            ],
            [
                (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / d,
                (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / d,
                (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / d,
            ],
        ];
        Ok(Ten2(inv))
    }

    pub fn mul_vec(&self, v: &Vec3) -> Vec3 {
        let m = &self.0;
        Vec3([
            m[0][0] * v.0[0] + m[0][1] * v.0[1] + m[0][2] * v.0[2],
            m[1][0] * v.0[0] + m[1][1] * v.0[1] + m[1][2] * v.0[2],
            m[2][0] * v.0[0] + m[2][1] * v.0[1] + m[2][2] * v.0[2],
        ])
    }

    pub fn sym(&self) -> SymTen2 {
        let m = &self.0;
        SymTen2([
            m[0][0],
            m[1][1],
            m[2][2],
            0.5 * (m[0][1] + m[1][0]),
            0.5 * (m[1][2] + m[2][1]),
            0.5 * (m[0][2] + m[2][0]),
        ])
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += self.0[i][j] * self.0[i][j];
            }
        }
        s.sqrt()
    }

    pub fn double_dot(&self, other: &Ten2) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += self.0[i][j] * other.0[i][j];
            }
        }
        s
    }

    pub fn scale(&self, s: f64) -> Ten2 {
        let mut m = self.0;
        for row in m.iter_mut() {
            for x in row.iter_mut() {
                *x *= s;
            }
        }
        Ten2(m)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }
}

impl Add for Ten2 {
    type Output = Ten2;
    fn add(self, o: Ten2) -> Ten2 {
        let mut m = self.0;
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += o.0[i][j];
            }
        }
        Ten2(m)
    }
}

impl Sub for Ten2 {
    type Output = Ten2;
    fn sub(self, o: Ten2) -> Ten2 {
        let mut m = self.0;
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] -= o.0[i][j];
            }
        }
        Ten2(m)
    }
}

impl Mul for Ten2 {
    type Output = Ten2;
    fn mul(self, o: Ten2) -> Ten2 {
        let a = &self.0;
        let b = &o.0;
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
            }
        }
        Ten2(m)
    }
}

/// Index pairs for the Voigt slots `[xx, yy, zz, xy, yz, xz]`.
pub const VOIGT_PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2)];

impl SymTen2 {
    pub const ZERO: SymTen2 = SymTen2([0.0; 6]);

    pub fn identity() -> SymTen2 {
        SymTen2([1.0, 1.0, 1.0, 0.0, 0.0, 0.0])
    }

    pub fn from_diag(a: f64, b: f64, c: f64) -> SymTen2 {
        SymTen2([a, b, c, 0.0, 0.0, 0.0])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.full().0[i][j]
    }

    pub fn full(&self) -> Ten2 {
        let s = &self.0;
        Ten2([
            [s[0], s[3], s[5]],
            [s[3], s[1], s[4]],
            [s[5], s[4], s[2]],
        ])
    }

    pub fn trace(&self) -> f64 {
        self.0[0] + self.0[1] + self.0[2]
    }

    pub fn det(&self) -> f64 {
        self.full().det()
    }

    pub fn mul_vec(&self, v: &Vec3) -> Vec3 {
        self.full().mul_vec(v)
    }

    pub fn double_dot(&self, other: &SymTen2) -> f64 {
        let a = &self.0;
        let b = &other.0;
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + 2.0 * (a[3] * b[3] + a[4] * b[4] + a[5] * b[5])
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.double_dot(self).sqrt()
    }

    pub fn scale(&self, c: f64) -> SymTen2 {
        let mut s = self.0;
        for x in s.iter_mut() {
            *x *= c;
        }
        SymTen2(s)
    }

    pub fn inverse(&self) -> Result<SymTen2, GnrError> {
        Ok(self.full().inverse()?.sym())
    }

    /// Positive definite iff all eigenvalues > 0 (Sylvester on the full form).
    pub fn is_positive_definite(&self) -> bool {
        let m = &self.full().0;
        let d1 = m[0][0];
        let d2 = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let d3 = self.det();
        d1 > 0.0 && d2 > 0.0 && d3 > 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    /// Strain-like Voigt vector: shear components doubled.
    pub fn to_voigt_strain(&self) -> [f64; 6] {
        let s = &self.0;
        [s[0], s[1], s[2], 2.0 * s[3], 2.0 * s[4], 2.0 * s[5]]
    }

    /// Stress-like Voigt vector: plain shear components.
    pub fn to_voigt_stress(&self) -> [f64; 6] {
        self.0
    }

    pub fn from_voigt_stress(v: [f64; 6]) -> SymTen2 {
        SymTen2(v)
    }
}

impl Add for SymTen2 {
    type Output = SymTen2;
    fn add(self, o: SymTen2) -> SymTen2 {
        let mut s = self.0;
        for (x, y) in s.iter_mut().zip(o.0.iter()) {
            *x += y;
        }
        SymTen2(s)
    }
}

impl Sub for SymTen2 {
    type Output = SymTen2;
    fn sub(self, o: SymTen2) -> SymTen2 {
        let mut s = self.0;
        for (x, y) in s.iter_mut().zip(o.0.iter()) {
            *x -= y;
        }
        SymTen2(s)
    }
}

impl Ten4Minor {
    pub const ZERO: Ten4Minor = Ten4Minor([[0.0; 6]; 6]);

    /// `dS = M : dC`, with `dC` passed as a plain symmetric tensor. The
    /// shear doubling of the strain-like argument happens here.
    pub fn apply(&self, dc: &SymTen2) -> SymTen2 {
        let v = dc.to_voigt_strain();
        let mut out = [0.0; 6];
        for (i, row) in self.0.iter().enumerate() {
            let mut s = 0.0;
            for k in 0..6 {
                s += row[k] * v[k];
            }
            out[i] = s;
        }
        SymTen2::from_voigt_stress(out)
    }

    pub fn pack(rows: [[f64; 6]; 6]) -> Ten4Minor {
        Ten4Minor(rows)
    }

    pub fn unpack(&self) -> [[f64; 6]; 6] {
        self.0
    }
}

/// Eigendecomposition of a symmetric 3x3 tensor.
///
/// Eigenvalues are sorted descending. Eigenvectors are orthonormal; each is
/// oriented so that its first component of magnitude above `1e-12` is
/// positive (the deterministic tie rule shared by the remodeling laws).
pub fn sym_eig(a: &SymTen2) -> ([f64; 3], [Vec3; 3]) {
    // Cyclic Jacobi. 3x3 converges in a handful of sweeps.
    let mut m = a.full().0;
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let scale = a.frobenius_norm().max(1.0);
    for _sweep in 0..30 {
        let off = (m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2]).sqrt();
        if off <= 1e-16 * scale {
            break;
        }
        for &(p, q) in &[(0usize, 1usize), (0, 2), (1, 2)] {
            let apq = m[p][q];
            if apq.abs() <= 1e-300 {
                continue;
            }
            let theta = (m[q][q] - m[p][p]) / (2.0 * apq);
            let t = if theta >= 0.0 {
                1.0 / (theta + (1.0 + theta * theta).sqrt())
            } else {
                1.0 / (theta - (1.0 + theta * theta).sqrt())
            };
            let c = 1.0 / (1.0 + t * t).sqrt();
            let s = t * c;
            // Apply rotation G(p,q) on both sides.
            for k in 0..3 {
                let mkp = m[k][p];
                let mkq = m[k][q];
                m[k][p] = c * mkp - s * mkq;
                m[k][q] = s * mkp + c * mkq;
            }
            for k in 0..3 {
                let mpk = m[p][k];
                let mqk = m[q][k];
                m[p][k] = c * mpk - s * mqk;
                m[q][k] = s * mpk + c * mqk;
            }
            for vk in v.iter_mut() {
                let vp = vk[p];
                let vq = vk[q];
                vk[p] = c * vp - s * vq;
                vk[q] = s * vp + c * vq;
            }
        }
    }
    let mut pairs: [(f64, Vec3); 3] = [
        (m[0][0], Vec3([v[0][0], v[1][0], v[2][0]])),
        (m[1][1], Vec3([v[0][1], v[1][1], v[2][1]])),
        (m[2][2], Vec3([v[0][2], v[1][2], v[2][2]])),
    ];
    // Descending by eigenvalue; stable on ties, so Jacobi determinism carries
    // through.
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut vals = [0.0; 3];
    let mut vecs = [Vec3::ZERO; 3];
    for (i, (lam, vec)) in pairs.into_iter().enumerate() {
        vals[i] = lam;
        vecs[i] = orient_sign(vec);
    }
    (vals, vecs)
}

/// Flip the sign so the first component with |x| > 1e-12 is positive.
fn orient_sign(v: Vec3) -> Vec3 {
    for &x in v.0.iter() {
        if x.abs() > 1e-12 {
            return if x < 0.0 { -v } else { v };
        }
    }
    v
}

/// Matrix exponential of a symmetric tensor via its spectral decomposition.
pub fn exp_sym(a: &SymTen2) -> SymTen2 {
    spectral_map(a, f64::exp)
}

/// Spectral square root; input must be symmetric positive semidefinite.
pub fn sqrt_sym(a: &SymTen2) -> SymTen2 {
    spectral_map(a, f64::sqrt)
}

fn spectral_map(a: &SymTen2, f: impl Fn(f64) -> f64) -> SymTen2 {
    let (vals, vecs) = sym_eig(a);
    let mut out = SymTen2::ZERO;
    for i in 0..3 {
        let w = f(vals[i]);
        let o = vecs[i].self_outer();
        out = out + o.scale(w);
    }
    out
}

/// Polar decomposition F = R U with U symmetric positive definite.
///
/// U is the spectral square root of F^T F; R = F U^-1.
pub fn polar_decompose(f: &Ten2) -> Result<(Ten2, SymTen2), GnrError> {
    if !(f.det() > 0.0) {
        return Err(GnrError::NonPositiveDeterminant(f.det()));
    }
    let c = (f.transpose() * *f).sym();
    let u = sqrt_sym(&c);
    let u_inv = u.inverse()?;
    let r = *f * u_inv.full();
    Ok((r, u))
}
