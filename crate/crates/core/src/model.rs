//! The metric Lie algebra `a ⊕ g_α ⊕ g_2α` of the solvable group `AN`, which is
//! isometric to complex hyperbolic space `CH^n` with holomorphic sectional
//! curvature `-1`.
//!
//! Vectors are written `aB + U + xZ` with `B` spanning `a`, `Z = JB` spanning
//! `g_2α`, and `U ∈ g_α ≅ C^{n-1}` stored as interleaved `(Re, Im)` pairs. The
//! flat layout used for matrices is `[a, u_0, .., u_{2n-3}, z]`.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, GeometryError, Result};

/// Slack for user-facing precondition checks (unit norm, orthogonality).
pub const EPS: f64 = 1e-9;

/// `CH^n`, `n >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModelSpace {
    n: usize,
}

impl ModelSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(GeometryError::Precondition(format!(
                "complex dimension must be at least 2, got {n}"
            )));
        }
        Ok(Self { n })
    }

    /// Complex dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Real dimension of the tangent space, `2n`.
    pub fn real_dim(&self) -> usize {
        2 * self.n
    }

    /// Real dimension of `g_α`, `2(n-1)`.
    pub fn alpha_dim(&self) -> usize {
        2 * (self.n - 1)
    }

    pub fn zero(&self) -> AlgebraVector {
        AlgebraVector::new(0.0, vec![0.0; self.alpha_dim()], 0.0)
    }

    pub fn b(&self) -> AlgebraVector {
        AlgebraVector::new(1.0, vec![0.0; self.alpha_dim()], 0.0)
    }

    pub fn z(&self) -> AlgebraVector {
        AlgebraVector::new(0.0, vec![0.0; self.alpha_dim()], 1.0)
    }

    /// Embeds `u ∈ g_α`.
    pub fn alpha(&self, u: &[f64]) -> Result<AlgebraVector> {
        check_dim(self.alpha_dim(), u.len())?;
        Ok(AlgebraVector::new(0.0, u.to_vec(), 0.0))
    }

    pub fn from_flat(&self, flat: &[f64]) -> Result<AlgebraVector> {
        check_dim(self.real_dim(), flat.len())?;
        let m = flat.len();
        Ok(AlgebraVector::new(flat[0], flat[1..m - 1].to_vec(), flat[m - 1]))
    }

    /// Matrix of `J` in the flat layout.
    pub fn j_matrix(&self) -> DMatrix<f64> {
        let m = self.real_dim();
        let mut j = DMatrix::zeros(m, m);
        // JB = Z, JZ = -B
        j[(m - 1, 0)] = 1.0;
        j[(0, m - 1)] = -1.0;
        for p in 0..self.n - 1 {
            let re = 1 + 2 * p;
            let im = re + 1;
            j[(im, re)] = 1.0;
            j[(re, im)] = -1.0;
        }
        j
    }
}

/// An element `aB + U + xZ` of `a ⊕ g_α ⊕ g_2α`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraVector {
    pub a: f64,
    pub u: Vec<f64>,
    pub z: f64,
}

impl AlgebraVector {
    pub fn new(a: f64, u: Vec<f64>, z: f64) -> Self {
        Self { a, u, z }
    }

    /// Complex dimension of the ambient model this vector lives in.
    pub fn n(&self) -> usize {
        self.u.len() / 2 + 1
    }

    pub fn to_flat(&self) -> DVector<f64> {
        let mut out = DVector::zeros(self.u.len() + 2);
        out[0] = self.a;
        out.rows_mut(1, self.u.len()).copy_from_slice(&self.u);
        out[self.u.len() + 1] = self.z;
        out
    }

    pub fn norm_squared(&self) -> f64 {
        self.a * self.a + dot(&self.u, &self.u) + self.z * self.z
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(s * self.a, self.u.iter().map(|x| s * x).collect(), s * self.z)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        check_dim(self.u.len(), other.u.len())?;
        Ok(Self::new(
            f(self.a, other.a),
            self.u.iter().zip(&other.u).map(|(x, y)| f(*x, *y)).collect(),
            f(self.z, other.z),
        ))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x - y)
    }

    pub fn max_abs(&self) -> f64 {
        self.u
            .iter()
            .fold(self.a.abs().max(self.z.abs()), |m, x| m.max(x.abs()))
    }
}

// The operator impls panic on mismatched dimensions; the `try_*` forms and the
// free functions below report it instead.
impl Add for &AlgebraVector {
    type Output = AlgebraVector;
    fn add(self, rhs: Self) -> AlgebraVector {
        self.try_add(rhs).expect("AlgebraVector dimension mismatch")
    }
}

impl Sub for &AlgebraVector {
    type Output = AlgebraVector;
    fn sub(self, rhs: Self) -> AlgebraVector {
        self.try_sub(rhs).expect("AlgebraVector dimension mismatch")
    }
}

impl Mul<&AlgebraVector> for f64 {
    type Output = AlgebraVector;
    fn mul(self, rhs: &AlgebraVector) -> AlgebraVector {
        rhs.scale(self)
    }
}

impl Neg for &AlgebraVector {
    type Output = AlgebraVector;
    fn neg(self) -> AlgebraVector {
        self.scale(-1.0)
    }
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Complex multiplication by `i` on `g_α`: `(x, y) ↦ (-y, x)` per pair.
pub fn alpha_j(u: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; u.len()];
    for (dst, src) in out.chunks_exact_mut(2).zip(u.chunks_exact(2)) {
        dst[0] = -src[1];
        dst[1] = src[0];
    }
    out
}

pub fn inner(v: &AlgebraVector, w: &AlgebraVector) -> Result<f64> {
    check_dim(v.u.len(), w.u.len())?;
    Ok(v.a * w.a + dot(&v.u, &w.u) + v.z * w.z)
}

/// `J(aB + U + xZ) = -xB + iU + aZ`.
pub fn complex_structure(v: &AlgebraVector) -> AlgebraVector {
    AlgebraVector::new(-v.z, alpha_j(&v.u), v.a)
}

/// `[aB+U+xZ, bB+V+yZ] = (aV - bU)/2 + (ay - bx + <JU,V>) Z`.
pub fn bracket(v: &AlgebraVector, w: &AlgebraVector) -> Result<AlgebraVector> {
    check_dim(v.u.len(), w.u.len())?;
    let (a, x) = (v.a, v.z);
    let (b, y) = (w.a, w.z);
    let ju = alpha_j(&v.u);
    let u = v
        .u
        .iter()
        .zip(&w.u)
        .map(|(ui, vi)| 0.5 * (a * vi - b * ui))
        .collect();
    Ok(AlgebraVector::new(0.0, u, a * y - b * x + dot(&ju, &w.u)))
}

/// Levi-Civita connection `∇_v w` for left-invariant fields.
pub fn connection(v: &AlgebraVector, w: &AlgebraVector) -> Result<AlgebraVector> {
    check_dim(v.u.len(), w.u.len())?;
    let x = v.z;
    let (b, y) = (w.a, w.z);
    let ju = alpha_j(&v.u);
    let jv = alpha_j(&w.u);
    let b_coeff = 0.5 * dot(&v.u, &w.u) + x * y;
    let z_coeff = 0.5 * dot(&ju, &w.u) - b * x;
    let u = (0..v.u.len())
        .map(|i| -0.5 * (b * v.u[i] + y * ju[i] + x * jv[i]))
        .collect();
    Ok(AlgebraVector::new(b_coeff, u, z_coeff))
}

/// `R(ζ, γ̇)γ̇ = -(ζ + 3<ζ, Jγ̇> Jγ̇) / 4` for unit `γ̇` and `ζ ⟂ γ̇`.
pub fn radial_curvature(zeta: &AlgebraVector, gdot: &AlgebraVector) -> Result<AlgebraVector> {
    check_dim(gdot.u.len(), zeta.u.len())?;
    let norm = gdot.norm();
    if (norm - 1.0).abs() > EPS {
        return Err(GeometryError::Precondition(format!(
            "radial direction must be a unit vector, |gdot| = {norm}"
        )));
    }
    let along = inner(zeta, gdot)?;
    if along.abs() > EPS * zeta.norm().max(1.0) {
        return Err(GeometryError::Precondition(format!(
            "zeta must be orthogonal to gdot, <zeta, gdot> = {along}"
        )));
    }
    let jg = complex_structure(gdot);
    let c = inner(zeta, &jg)?;
    Ok(AlgebraVector::new(
        -0.25 * (zeta.a + 3.0 * c * jg.a),
        zeta.u
            .iter()
            .zip(&jg.u)
            .map(|(zi, ji)| -0.25 * (zi + 3.0 * c * ji))
            .collect(),
        -0.25 * (zeta.z + 3.0 * c * jg.z),
    ))
}
