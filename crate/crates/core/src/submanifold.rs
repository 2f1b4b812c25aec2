//! Frames and extrinsic geometry of `W_w` at the base point: the splitting
//! `a ⊕ n = c ⊕ Pw^⊥ ⊕ w^⊥`, the shape operator `S_ξ`, and the ordered frame
//! of `(a ⊕ n) ⊖ Rξ` in which the tube propagator is block diagonal.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{GeometryError, Result};
use crate::linalg::{complete, orthonormalize};
use crate::model::alpha_j;
use crate::subspace::{AngleCase, KaehlerDecomposition, NormalSubspace, DEGENERACY_TOL};

/// Lifts `u ∈ g_α` into the flat `[a, u, z]` layout.
pub fn lift_alpha(u: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(u.len() + 2);
    out.rows_mut(1, u.len()).copy_from(u);
    out
}

fn unit(dim: usize, i: usize) -> DVector<f64> {
    DVector::from_fn(dim, |r, _| if r == i { 1.0 } else { 0.0 })
}

fn j_alpha(u: &DVector<f64>) -> DVector<f64> {
    DVector::from_vec(alpha_j(u.as_slice()))
}

/// Orthonormal bases of `c`, `Pw^⊥` and `w^⊥`, all in the flat layout.
#[derive(Debug, Clone, PartialEq)]
pub struct SubmanifoldFrame {
    /// `B`, then `J`-pairs `(v, Jv)` spanning `g_α ⊖ Cw^⊥`, then `Z`.
    pub c: Vec<DVector<f64>>,
    pub pw: Vec<DVector<f64>>,
    pub normal: Vec<DVector<f64>>,
}

impl SubmanifoldFrame {
    /// Orthonormal basis of `T W_w = c ⊕ Pw^⊥`.
    pub fn tangent(&self) -> Vec<DVector<f64>> {
        self.c.iter().chain(&self.pw).cloned().collect()
    }

    pub fn tangent_dim(&self) -> usize {
        self.c.len() + self.pw.len()
    }

    /// Orthogonal projection onto `T W_w`.
    pub fn tangent_projection(&self, v: &DVector<f64>) -> DVector<f64> {
        crate::linalg::project(v, &self.tangent())
    }
}

pub fn submanifold_frame(sub: &NormalSubspace) -> Result<SubmanifoldFrame> {
    let model = sub.model();
    let alpha_dim = model.alpha_dim();

    // Pw^⊥ is the column space of P = [P b_1 .. P b_k]. Right singular vectors
    // come from the symmetric eigenproblem of PᵀP; P v is exactly in the
    // column space and |P v| is the principal Kähler sine.
    let p_cols: Vec<DVector<f64>> = sub
        .basis()
        .iter()
        .map(|b| {
            let jb = j_alpha(b);
            &jb - sub.project(&jb)
        })
        .collect();
    let p_mat = DMatrix::from_columns(&p_cols);
    let eig = SymmetricEigen::new(p_mat.transpose() * &p_mat);
    let mut images: Vec<(f64, usize, DVector<f64>)> = (0..eig.eigenvalues.len())
        .map(|i| {
            let image = &p_mat * eig.eigenvectors.column(i);
            (image.norm(), i, image)
        })
        .filter(|(s, _, _)| *s > DEGENERACY_TOL)
        .collect();
    images.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let pw_alpha: Vec<DVector<f64>> = images.into_iter().map(|(_, _, v)| v).collect();
    let pw_alpha = if pw_alpha.is_empty() {
        pw_alpha
    } else {
        orthonormalize(&pw_alpha)?
    };

    // g_α ⊖ Cw^⊥, built from J-pairs so that it is visibly complex.
    let mut span: Vec<DVector<f64>> = sub.basis().to_vec();
    span.extend(pw_alpha.iter().cloned());
    let rest = alpha_dim - span.len();
    if !rest.is_multiple_of(2) {
        return Err(GeometryError::Numerical(format!(
            "complex span of w^⊥ has odd codimension {rest}"
        )));
    }
    let mut complement = Vec::with_capacity(rest);
    while complement.len() < rest {
        let v = complete(None, &span, alpha_dim, 1)?.remove(0);
        span.push(v.clone());
        let mut jv = j_alpha(&v);
        for b in &span {
            let c = b.dot(&jv);
            jv.axpy(-c, b, 1.0);
        }
        let jv = jv.normalize();
        span.push(jv.clone());
        complement.push(v);
        complement.push(jv);
    }

    let dim = model.real_dim();
    let mut c = vec![unit(dim, 0)];
    c.extend(complement.iter().map(lift_alpha));
    c.push(unit(dim, dim - 1));
    Ok(SubmanifoldFrame {
        c,
        pw: pw_alpha.iter().map(lift_alpha).collect(),
        normal: sub.basis().iter().map(lift_alpha).collect(),
    })
}

/// `Pξ` in the flat layout, zero when the angle snaps to 0.
fn p_xi_flat(dec: &KaehlerDecomposition) -> DVector<f64> {
    match &dec.pbar {
        Some(pbar) => lift_alpha(&(pbar * dec.sin_phi())),
        None => DVector::zeros(dec.xi.len() + 2),
    }
}

/// `S_ξ X` for tangent `X` (flat layout). Combines `S_ξ(c ⊖ g_2α) = 0`,
/// `S_ξ Z = Pξ/2` and `S_ξ V = <V, Pξ> Z / 2` for `V ∈ Pw^⊥`.
pub fn apply_shape_operator(dec: &KaehlerDecomposition, x: &DVector<f64>) -> DVector<f64> {
    let p = p_xi_flat(dec);
    let last = x.len() - 1;
    let mut out = &p * (0.5 * x[last]);
    out[last] += 0.5 * x.rows(1, last - 1).dot(&p.rows(1, last - 1));
    out
}

/// `S_ξ` as a symmetric matrix in the tangent basis of [`SubmanifoldFrame`].
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeOperatorW {
    pub frame: SubmanifoldFrame,
    pub matrix: DMatrix<f64>,
}

pub fn shape_operator_w(sub: &NormalSubspace, dec: &KaehlerDecomposition) -> Result<ShapeOperatorW> {
    let frame = submanifold_frame(sub)?;
    let tangent = frame.tangent();
    let images: Vec<DVector<f64>> = tangent.iter().map(|x| apply_shape_operator(dec, x)).collect();
    let m = tangent.len();
    let matrix = DMatrix::from_fn(m, m, |i, j| tangent[i].dot(&images[j]));
    Ok(ShapeOperatorW { frame, matrix })
}

/// Principal space of a principal curvature of `W_w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrincipalSpace {
    /// `R(Z + P̄ξ)`
    ZPlusPbar,
    /// `R(Z - P̄ξ)`
    ZMinusPbar,
    /// `a ⊕ (w ⊖ RP̄ξ)`
    Kernel,
    /// All of `T W_w` (`φ = 0`, `S_ξ = 0`).
    Tangent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipalCurvature {
    pub value: f64,
    pub multiplicity: usize,
    pub space: PrincipalSpace,
}

/// `±sin(φ)/2` with multiplicity one each and `0` on the rest, or `0` alone
/// when `φ = 0`.
pub fn submanifold_spectrum(sub: &NormalSubspace, dec: &KaehlerDecomposition) -> Vec<PrincipalCurvature> {
    let tangent_dim = 2 * sub.n() - sub.k();
    if dec.case() == AngleCase::Zero {
        return vec![PrincipalCurvature {
            value: 0.0,
            multiplicity: tangent_dim,
            space: PrincipalSpace::Tangent,
        }];
    }
    let half = 0.5 * dec.sin_phi();
    vec![
        PrincipalCurvature {
            value: half,
            multiplicity: 1,
            space: PrincipalSpace::ZPlusPbar,
        },
        PrincipalCurvature {
            value: -half,
            multiplicity: 1,
            space: PrincipalSpace::ZMinusPbar,
        },
        PrincipalCurvature {
            value: 0.0,
            multiplicity: tangent_dim - 2,
            space: PrincipalSpace::Kernel,
        },
    ]
}

/// Role of a vector in the [`AdaptedFrame`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrameRole {
    /// `T W_w ⊖ (RZ ⊕ RP̄ξ)`
    Tangent,
    /// `w^⊥ ⊖ (Rξ ⊕ RF̄ξ)`
    Normal,
    Z,
    Pbar,
    Fbar,
}

/// Ordered orthonormal basis of `(a ⊕ n) ⊖ Rξ`: tangent block, normal block,
/// then whichever of `Z, P̄ξ, F̄ξ` are defined.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedFrame {
    pub vectors: Vec<DVector<f64>>,
    pub roles: Vec<FrameRole>,
    pub case: AngleCase,
    /// `ξ` in the flat layout.
    pub xi: DVector<f64>,
    /// `Jξ` in frame coordinates; constant along the normal geodesic.
    pub j_xi: DVector<f64>,
}

impl AdaptedFrame {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn tangent_len(&self) -> usize {
        self.roles.iter().filter(|r| **r == FrameRole::Tangent).count()
    }

    pub fn normal_len(&self) -> usize {
        self.roles.iter().filter(|r| **r == FrameRole::Normal).count()
    }

    pub fn position(&self, role: FrameRole) -> Option<usize> {
        self.roles.iter().position(|r| *r == role)
    }

    /// Frame vectors as columns, `2n × (2n - 1)`.
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_columns(&self.vectors)
    }

    /// Frame coordinates of a flat vector.
    pub fn coordinates(&self, v: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.len(), self.vectors.iter().map(|e| e.dot(v)))
    }

    /// Flat vector with the given frame coordinates.
    pub fn synthesize(&self, coords: &DVector<f64>) -> DVector<f64> {
        self.matrix() * coords
    }
}

pub fn adapted_frame(sub: &NormalSubspace, dec: &KaehlerDecomposition) -> Result<AdaptedFrame> {
    let frame = submanifold_frame(sub)?;
    let dim = sub.model().real_dim();
    let z = unit(dim, dim - 1);
    let xi = lift_alpha(&dec.xi);
    let pbar = dec.pbar.as_ref().map(lift_alpha);
    let fbar = dec.fbar.as_ref().map(lift_alpha);

    let mut tangent_excl = vec![z.clone()];
    tangent_excl.extend(pbar.iter().cloned());
    let tangent_count = frame.tangent_dim() - tangent_excl.len();
    let tangent = complete(Some(&frame.tangent()), &tangent_excl, dim, tangent_count)?;

    let mut normal_excl = vec![xi.clone()];
    normal_excl.extend(fbar.iter().cloned());
    let normal_count = frame.normal.len() - normal_excl.len();
    let normal = complete(Some(&frame.normal), &normal_excl, dim, normal_count)?;

    let mut vectors = Vec::with_capacity(dim - 1);
    let mut roles = Vec::with_capacity(dim - 1);
    for v in tangent {
        vectors.push(v);
        roles.push(FrameRole::Tangent);
    }
    for v in normal {
        vectors.push(v);
        roles.push(FrameRole::Normal);
    }
    vectors.push(z);
    roles.push(FrameRole::Z);
    if let Some(p) = pbar {
        vectors.push(p);
        roles.push(FrameRole::Pbar);
    }
    if let Some(f) = fbar {
        vectors.push(f);
        roles.push(FrameRole::Fbar);
    }

    let mut j_xi = DVector::zeros(vectors.len());
    if let Some(i) = roles.iter().position(|r| *r == FrameRole::Pbar) {
        j_xi[i] = dec.sin_phi();
    }
    if let Some(i) = roles.iter().position(|r| *r == FrameRole::Fbar) {
        j_xi[i] = dec.cos_phi();
    }
    Ok(AdaptedFrame {
        vectors,
        roles,
        case: dec.case(),
        xi,
        j_xi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::symmetric_eigenvalues;
    use crate::model::{connection, ModelSpace};
    use crate::subspace::{decompose, Preset};

    fn gram(vs: &[DVector<f64>]) -> DMatrix<f64> {
        DMatrix::from_fn(vs.len(), vs.len(), |i, j| vs[i].dot(&vs[j]))
    }

    fn setup(preset: Preset, n: usize, xi: &[f64]) -> (NormalSubspace, KaehlerDecomposition) {
        let sub = preset.build(ModelSpace::new(n).unwrap()).unwrap();
        let dec = decompose(&sub, xi).unwrap();
        (sub, dec)
    }

    #[test]
    fn random_frames_are_orthonormal_and_contain_pbar() {
        let mut rng = crate::sampling::seeded(1);
        for n in 2..=6 {
            for k in 1..=2 * n - 2 {
                for _ in 0..5 {
                    let sub = crate::sampling::random_subspace(ModelSpace::new(n).unwrap(), k, &mut rng).unwrap();
                    let f = submanifold_frame(&sub).unwrap();
                    let mut all = f.tangent();
                    all.extend(f.normal.iter().cloned());
                    assert!((gram(&all) - DMatrix::identity(2 * n, 2 * n)).amax() < 1e-12, "n={n} k={k}");
                    let xi = crate::sampling::sample_unit_normal(&sub, &mut rng);
                    let dec = decompose(&sub, xi.as_slice()).unwrap();
                    if let Some(pbar) = &dec.pbar {
                        let p = lift_alpha(pbar);
                        assert!((&p - f.tangent_projection(&p)).amax() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn submanifold_frame_dimensions() {
        let sub = Preset::Mixed3.build(ModelSpace::new(4).unwrap()).unwrap();
        let f = submanifold_frame(&sub).unwrap();
        // Cw^⊥ = C^2, so c = a ⊕ C^1 ⊕ g_2α and Pw^⊥ = R(ie_2)
        assert_eq!(f.c.len(), 4);
        assert_eq!(f.pw.len(), 1);
        assert_eq!(f.tangent_dim(), 2 * 4 - 3);
        let mut all = f.tangent();
        all.extend(f.normal.iter().cloned());
        assert!((gram(&all) - DMatrix::identity(8, 8)).amax() < 1e-14);
    }

    #[test]
    fn c_part_is_complex_except_b_z() {
        let sub = Preset::ThetaPlane(0.7).build(ModelSpace::new(4).unwrap()).unwrap();
        let f = submanifold_frame(&sub).unwrap();
        let j = sub.model().j_matrix();
        let inner = &f.c[1..f.c.len() - 1];
        for v in inner {
            let jv = &j * v;
            let residual = &jv - crate::linalg::project(&jv, inner);
            assert!(residual.amax() < 1e-14);
        }
    }

    #[test]
    fn zero_angle_gives_zero_shape_operator() {
        let (sub, dec) = setup(Preset::Complex(1), 3, &[1.0, 0.0, 0.0, 0.0]);
        let s = shape_operator_w(&sub, &dec).unwrap();
        assert_eq!(s.matrix.amax(), 0.0);
        let spec = submanifold_spectrum(&sub, &dec);
        assert_eq!(spec.len(), 1);
        assert_eq!(spec[0].multiplicity, 4);
    }

    #[test]
    fn shape_operator_on_z() {
        let (sub, dec) = setup(Preset::ThetaPlane(0.6), 3, &[1.0, 0.0, 0.0, 0.0]);
        let z = unit(6, 5);
        let sz = apply_shape_operator(&dec, &z);
        let expected = lift_alpha(dec.pbar.as_ref().unwrap()) * (0.5 * dec.phi.sin());
        assert!((sz - expected).amax() < 1e-15);
        let s = shape_operator_w(&sub, &dec).unwrap();
        assert!(s.matrix.trace().abs() < 1e-15);
    }

    #[test]
    fn shape_operator_matches_connection() {
        // S_ξ X = -(∇_X ξ)^T computed from the Levi-Civita connection
        let (sub, dec) = setup(Preset::Mixed3, 4, &[0.0, 0.6, 0.8, 0.0, 0.0, 0.0]);
        let (sub2, dec2) = setup(Preset::Mixed3, 4, &[0.48, 0.6, 0.64, 0.0, 0.0, 0.0]);
        for (sub, dec) in [(sub, dec), (sub2, dec2)] {
            let model = sub.model();
            let frame = submanifold_frame(&sub).unwrap();
            let xi = model.from_flat(lift_alpha(&dec.xi).as_slice()).unwrap();
            for x in frame.tangent() {
                let xv = model.from_flat(x.as_slice()).unwrap();
                let nabla = connection(&xv, &xi).unwrap().to_flat();
                let oracle = -frame.tangent_projection(&nabla);
                let s = apply_shape_operator(&dec, &x);
                assert!((s - oracle).amax() < 1e-14);
            }
        }
    }

    #[test]
    fn spectrum_at_right_angle() {
        let (sub, dec) = setup(Preset::TotallyReal(2), 3, &[0.0, 0.0, 1.0, 0.0]);
        let spec = submanifold_spectrum(&sub, &dec);
        assert_eq!(spec[0].value, 0.5);
        assert_eq!(spec[1].value, -0.5);
        assert_eq!(spec[2].multiplicity, 2);
        let s = shape_operator_w(&sub, &dec).unwrap();
        let eig = symmetric_eigenvalues(&s.matrix);
        let expected = [-0.5, 0.0, 0.0, 0.5];
        for (a, b) in eig.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn adapted_frame_shapes() {
        // interior, zero and right-angle cases on mixed3 in CH^4
        let cases = [
            ([0.6, 0.0, 0.8, 0.0, 0.0, 0.0], AngleCase::Interior, (3, 1)),
            ([1.0, 0.0, 0.0, 0.0, 0.0, 0.0], AngleCase::Zero, (4, 1)),
            ([0.0, 0.0, 1.0, 0.0, 0.0, 0.0], AngleCase::RightAngle, (3, 2)),
        ];
        for (xi, case, (t, nrm)) in cases {
            let (sub, dec) = setup(Preset::Mixed3, 4, &xi);
            let f = adapted_frame(&sub, &dec).unwrap();
            assert_eq!(f.case, case);
            assert_eq!(f.len(), 7);
            assert_eq!(f.tangent_len(), t, "{case:?}");
            assert_eq!(f.normal_len(), nrm, "{case:?}");
            assert!((gram(&f.vectors) - DMatrix::identity(7, 7)).amax() < 1e-12);
            for v in &f.vectors {
                assert!(v.dot(&f.xi).abs() < 1e-14);
            }
            let jxi = sub.model().j_matrix() * &f.xi;
            assert!((f.synthesize(&f.j_xi) - jxi).amax() < 1e-14);
        }
    }

    #[test]
    fn zero_angle_frame_matches_block_sizes() {
        // φ = 0: cosh block of size 2n-k (tangent + Z), sinh block k-2, and Jξ
        let (sub, dec) = setup(Preset::Complex(1), 3, &[1.0, 0.0, 0.0, 0.0]);
        let f = adapted_frame(&sub, &dec).unwrap();
        assert_eq!(f.tangent_len() + 1, 2 * 3 - 2);
        assert_eq!(f.normal_len(), 0);
        assert_eq!(f.roles[f.len() - 2..], [FrameRole::Z, FrameRole::Fbar]);
    }
}
