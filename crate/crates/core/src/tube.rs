//! Tubes `M^r` around `W_w`: Jacobi fields along the normal geodesic
//! `γ_ξ`, the propagator `D(r)`, the shape operator `S^r = D'(r) D(r)^{-1}`
//! (with respect to `-γ̇_ξ(r)`) and the resulting spectra and classification.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeometryError, Result};
use crate::linalg::{cluster, symmetric_eigenvalues};
use crate::model::{AlgebraVector, EPS};
use crate::subspace::{has_constant_angle, AngleCase, KaehlerDecomposition, NormalSubspace};
use crate::submanifold::{adapted_frame, AdaptedFrame, FrameRole};

/// Smallest radius accepted by [`propagator`]; `D(0)` is singular.
pub const RADIUS_GUARD: f64 = 1e-6;

/// Default relative tolerance for grouping principal curvatures.
pub const CLUSTER_TOL: f64 = 1e-8;

/// Absolute floor used with [`CLUSTER_TOL`].
pub const CLUSTER_FLOOR: f64 = 1e-12;

/// Tolerance of the constant-angle test behind the homogeneity flag.
pub const ANGLE_TOL: f64 = 1e-9;

/// `f_λ`, `g_λ` (tangent initial data) and `p`, `q` (normal initial data),
/// with their `t`-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiScalars {
    pub lambda: f64,
    pub t: f64,
    pub f: f64,
    pub g: f64,
    pub p: f64,
    pub q: f64,
    pub df: f64,
    pub dg: f64,
    pub dp: f64,
    pub dq: f64,
}

pub fn jacobi_scalars(lambda: f64, t: f64) -> JacobiScalars {
    let (ch, sh) = ((0.5 * t).cosh(), (0.5 * t).sinh());
    let bracket = 1.0 + 2.0 * ch - 2.0 * lambda * sh;
    JacobiScalars {
        lambda,
        t,
        f: ch - 2.0 * lambda * sh,
        g: (ch - 1.0) * bracket,
        p: 2.0 * sh,
        q: 2.0 * sh * (ch - 1.0),
        df: 0.5 * sh - lambda * ch,
        dg: 0.5 * sh * bracket + (ch - 1.0) * (sh - lambda * ch),
        dp: ch,
        dq: ch * (ch - 1.0) + sh * sh,
    }
}

/// The `{Z, P̄ξ, F̄ξ}` block of `D(t)` and its derivative for `sin φ = s`,
/// `cos φ = c`. Column `j` holds the coefficients of `ζ_{v_j}(t)`.
fn distinguished_block(s: f64, c: f64, t: f64) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
    let (ch, sh) = ((0.5 * t).cosh(), (0.5 * t).sinh());
    let (cht, sht) = (t.cosh(), t.sinh());
    let (s2, c2) = (s * s, c * c);
    // value[row][col]
    let value = [
        [ch, -s * sh, 0.0],
        [
            -s * (c2 + s2 * ch) * sh,
            c2 * ch + s2 * cht,
            2.0 * s * c * (ch - 1.0) * sh,
        ],
        [
            -c * s2 * (ch - 1.0) * sh,
            -s * c * (ch - cht),
            2.0 * (1.0 + c2 * (ch - 1.0)) * sh,
        ],
    ];
    let derivative = [
        [0.5 * sh, -0.5 * s * ch, 0.0],
        [
            -0.5 * s * (s2 * sh * sh + c2 * ch + s2 * ch * ch),
            0.5 * c2 * sh + s2 * sht,
            s * c * (sh * sh + ch * ch - ch),
        ],
        [
            -0.5 * c * s2 * (sh * sh + ch * ch - ch),
            -s * c * (0.5 * sh - sht),
            c2 * sh * sh + (1.0 + c2 * (ch - 1.0)) * ch,
        ],
    ];
    (value, derivative)
}

fn block_index(role: FrameRole) -> Option<usize> {
    match role {
        FrameRole::Z => Some(0),
        FrameRole::Pbar => Some(1),
        FrameRole::Fbar => Some(2),
        _ => None,
    }
}

/// `D(t)` and `D'(t)` in an adapted frame; no radius guard.
pub fn propagator_matrices(
    frame: &AdaptedFrame,
    dec: &KaehlerDecomposition,
    t: f64,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let m = frame.len();
    let mut d = DMatrix::zeros(m, m);
    let mut dp = DMatrix::zeros(m, m);
    let (ch, sh) = ((0.5 * t).cosh(), (0.5 * t).sinh());
    let (value, derivative) = distinguished_block(dec.sin_phi(), dec.cos_phi(), t);
    for (i, role) in frame.roles.iter().enumerate() {
        match role {
            FrameRole::Tangent => {
                d[(i, i)] = ch;
                dp[(i, i)] = 0.5 * sh;
            }
            FrameRole::Normal => {
                d[(i, i)] = 2.0 * sh;
                dp[(i, i)] = ch;
            }
            _ => {
                let bi = block_index(*role).unwrap();
                for (j, other) in frame.roles.iter().enumerate() {
                    if let Some(bj) = block_index(*other) {
                        d[(i, j)] = value[bi][bj];
                        dp[(i, j)] = derivative[bi][bj];
                    }
                }
            }
        }
    }
    (d, dp)
}

/// `D(r)` with `D(r)B_X(r) = ζ_X(r)` in the adapted frame, and `D'(r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TubePropagator {
    pub frame: AdaptedFrame,
    pub d: DMatrix<f64>,
    pub dprime: DMatrix<f64>,
    pub r: f64,
    pub case: AngleCase,
}

fn check_radius(r: f64) -> Result<()> {
    if r.is_finite() && r > RADIUS_GUARD {
        Ok(())
    } else {
        Err(GeometryError::Precondition(format!(
            "radius must exceed {RADIUS_GUARD:e}, got {r}"
        )))
    }
}

pub fn propagator(sub: &NormalSubspace, dec: &KaehlerDecomposition, r: f64) -> Result<TubePropagator> {
    check_radius(r)?;
    let frame = adapted_frame(sub, dec)?;
    Ok(propagator_in_frame(frame, dec, r))
}

/// Same as [`propagator`] for a frame built beforehand.
pub fn propagator_in_frame(frame: AdaptedFrame, dec: &KaehlerDecomposition, r: f64) -> TubePropagator {
    let (d, dprime) = propagator_matrices(&frame, dec, r);
    let case = frame.case;
    TubePropagator {
        frame,
        d,
        dprime,
        r,
        case,
    }
}

/// A Jacobi field at time `t`, in coordinates of the parallel-translated
/// adapted frame.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiField {
    pub value: DVector<f64>,
    pub derivative: DVector<f64>,
}

/// `ζ_X(t)` for `X ⟂ ξ`, with initial data `(X, -S_ξX)` on the tangent part
/// and `(0, η)` on the normal part.
pub fn jacobi_field(
    sub: &NormalSubspace,
    dec: &KaehlerDecomposition,
    x: &AlgebraVector,
    t: f64,
) -> Result<JacobiField> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(GeometryError::Precondition(format!("t must be >= 0, got {t}")));
    }
    let frame = adapted_frame(sub, dec)?;
    let flat = x.to_flat();
    crate::error::check_dim(frame.xi.len(), flat.len())?;
    let along = flat.dot(&frame.xi);
    if along.abs() > EPS * flat.norm().max(1.0) {
        return Err(GeometryError::Precondition(format!(
            "X must be orthogonal to xi, <X, xi> = {along}"
        )));
    }
    let coords = frame.coordinates(&flat);
    let (d, dp) = propagator_matrices(&frame, dec, t);
    Ok(JacobiField {
        value: &d * &coords,
        derivative: &dp * &coords,
    })
}

/// `det D(r) = 2^{k-1} cosh(r/2)^{2n-k+1} sinh(r/2)^{k-1}`.
pub fn det_propagator_closed(n: usize, k: usize, r: f64) -> f64 {
    let (ch, sh) = ((0.5 * r).cosh(), (0.5 * r).sinh());
    2f64.powi(k as i32 - 1) * ch.powi((2 * n + 1 - k) as i32) * sh.powi(k as i32 - 1)
}

/// `(d/dr det D) / det D`, differentiated factor by factor.
pub fn log_det_derivative_closed(n: usize, k: usize, r: f64) -> f64 {
    let th = (0.5 * r).tanh();
    0.5 * (2 * n + 1 - k) as f64 * th + 0.5 * (k as f64 - 1.0) / th
}

/// `H^r = (k - 1 + 2n sinh²(r/2)) / (2 sinh(r/2) cosh(r/2))`.
pub fn mean_curvature_closed(n: usize, k: usize, r: f64) -> f64 {
    let (ch, sh) = ((0.5 * r).cosh(), (0.5 * r).sinh());
    (k as f64 - 1.0 + 2.0 * n as f64 * sh * sh) / (2.0 * sh * ch)
}

/// `S^r = D'(r) D(r)^{-1}`, checked for self-adjointness.
pub fn shape_from_propagator(prop: &TubePropagator) -> Result<DMatrix<f64>> {
    let lu = prop.d.transpose().lu();
    let st = lu.solve(&prop.dprime.transpose()).ok_or_else(|| {
        GeometryError::Numerical(format!(
            "D(r) is singular at r = {} ({} case)",
            prop.r,
            prop.case.as_str()
        ))
    })?;
    let s = st.transpose();
    let asym = (&s - s.transpose()).amax();
    if !asym.is_finite() || asym > 1e-9 * s.amax().max(1.0) {
        return Err(GeometryError::Numerical(format!(
            "tube shape operator is not self-adjoint at r = {}: asymmetry {asym:.3e}",
            prop.r
        )));
    }
    Ok(s)
}

pub fn tube_shape_operator(sub: &NormalSubspace, dec: &KaehlerDecomposition, r: f64) -> Result<DMatrix<f64>> {
    shape_from_propagator(&propagator(sub, dec, r)?)
}

/// Principal curvatures of `M^r` at `γ_ξ(r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TubeSpectrum {
    /// `(value, multiplicity)`, ascending.
    pub eigenvalues: Vec<(f64, usize)>,
    /// Every eigenvalue, ascending, before clustering.
    pub sorted: Vec<f64>,
    pub trace: f64,
    pub homogeneous: bool,
    pub phi: f64,
}

pub fn spectrum_of(shape: &DMatrix<f64>, cluster_tol: f64) -> (Vec<f64>, Vec<(f64, usize)>) {
    let sym = (shape + shape.transpose()) * 0.5;
    let sorted = symmetric_eigenvalues(&sym);
    let groups = cluster(&sorted, cluster_tol, CLUSTER_FLOOR);
    (sorted, groups)
}

pub fn tube_spectrum(
    sub: &NormalSubspace,
    dec: &KaehlerDecomposition,
    r: f64,
    cluster_tol: f64,
) -> Result<TubeSpectrum> {
    if cluster_tol.is_nan() || cluster_tol <= 0.0 {
        return Err(GeometryError::Precondition(format!(
            "cluster tolerance must be positive, got {cluster_tol}"
        )));
    }
    let shape = tube_shape_operator(sub, dec, r)?;
    let (sorted, eigenvalues) = spectrum_of(&shape, cluster_tol);
    Ok(TubeSpectrum {
        eigenvalues,
        sorted,
        trace: shape.trace(),
        homogeneous: has_constant_angle(sub, ANGLE_TOL).0,
        phi: dec.phi,
    })
}

/// Homogeneity of the tubes around `W_w`.
#[derive(Debug, Clone, PartialEq)]
pub struct TubeClassification {
    pub n: usize,
    pub k: usize,
    pub homogeneous: bool,
    pub constant_angle: Option<f64>,
    /// Spectrum of `-Q²`, i.e. the squared cosines of the principal Kähler angles.
    pub angle_spectrum: Vec<f64>,
    pub notes: Vec<String>,
}

pub fn classify_tube(sub: &NormalSubspace) -> TubeClassification {
    classify_tube_with_tol(sub, ANGLE_TOL)
}

pub fn classify_tube_with_tol(sub: &NormalSubspace, tol: f64) -> TubeClassification {
    let (n, k) = (sub.n(), sub.k());
    let (constant, angle) = has_constant_angle(sub, tol);
    let mut notes = Vec::new();
    if k == 1 {
        notes.push(format!(
            "k = 1: the tubes are the equidistant hypersurfaces of the ruled minimal hypersurface W^{}, which are homogeneous",
            2 * n - 1
        ));
    }
    if n == 2 {
        notes.push("n = 2: every w^⊥ has constant Kähler angle, no inhomogeneous tubes".into());
    }
    if let Some(phi) = angle {
        if phi.abs() <= tol.sqrt() && k % 2 == 0 {
            notes.push(format!(
                "constant angle 0: w^⊥ is complex and W_w is a totally geodesic CH^{}",
                n - k / 2
            ));
        }
    }
    if k == 2 * n - 2 {
        notes.push(
            "w = 0: W_w is the orbit of a ⊕ g_2α; multiplicity counts of the characteristic polynomial degenerate"
                .into(),
        );
    }
    if !constant {
        notes.push("Kähler angle varies over w^⊥: principal curvatures of M^r vary from point to point".into());
    }
    TubeClassification {
        n,
        k,
        homogeneous: constant,
        constant_angle: angle,
        angle_spectrum: crate::subspace::angle_operator(sub).eigenvalues,
        notes,
    }
}
