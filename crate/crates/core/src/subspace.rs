//! The normal space `w^⊥ ⊂ g_α` defining `W_w`, Kähler angles of its vectors,
//! and the exact constant-angle test.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, GeometryError, Result};
use crate::linalg::{orthonormalize, symmetric_eigenvalues};
use crate::model::{alpha_j, ModelSpace, EPS};

/// Below this, `sin φ` (resp. `cos φ`) is treated as zero and `P̄ξ` (resp. `F̄ξ`)
/// is undefined.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// `w^⊥` with an orthonormal real basis in `g_α` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalSubspace {
    model: ModelSpace,
    basis: Vec<DVector<f64>>,
}

impl NormalSubspace {
    pub fn model(&self) -> ModelSpace {
        self.model
    }

    pub fn n(&self) -> usize {
        self.model.n()
    }

    /// `k = dim w^⊥`.
    pub fn k(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[DVector<f64>] {
        &self.basis
    }

    /// Orthogonal projection of `u ∈ g_α` onto `w^⊥`.
    pub fn project(&self, u: &DVector<f64>) -> DVector<f64> {
        crate::linalg::project(u, &self.basis)
    }

    /// Maps coordinates relative to the basis into `g_α`.
    pub fn combine(&self, coeffs: &[f64]) -> Result<DVector<f64>> {
        check_dim(self.k(), coeffs.len())?;
        let mut out = DVector::zeros(self.model.alpha_dim());
        for (c, b) in coeffs.iter().zip(&self.basis) {
            out.axpy(*c, b, 1.0);
        }
        Ok(out)
    }

    /// True when the Kähler angle machinery sees `k = 1`: the tube family is then
    /// parallel to the ruled minimal hypersurface `W^{2n-1}`.
    pub fn is_hypersurface(&self) -> bool {
        self.k() == 1
    }
}

/// Orthonormalizes `raw_basis` (modified Gram-Schmidt) into a [`NormalSubspace`].
pub fn make_subspace(model: ModelSpace, raw_basis: &[Vec<f64>]) -> Result<NormalSubspace> {
    if raw_basis.is_empty() {
        return Err(GeometryError::Degenerate("w^⊥ needs at least one vector".into()));
    }
    let mut vectors = Vec::with_capacity(raw_basis.len());
    for v in raw_basis {
        check_dim(model.alpha_dim(), v.len())?;
        vectors.push(DVector::from_column_slice(v));
    }
    let basis = orthonormalize(&vectors)?;
    Ok(NormalSubspace { model, basis })
}

/// Which of `P̄ξ`, `F̄ξ` exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AngleCase {
    /// `φ = 0`: `Jξ ∈ w^⊥`, no `P̄ξ`.
    Zero,
    /// `0 < φ < π/2`: both exist.
    Interior,
    /// `φ = π/2`: `Jξ ⟂ w^⊥`, no `F̄ξ`.
    RightAngle,
}

impl AngleCase {
    pub fn as_str(&self) -> &'static str {
        match self {
            AngleCase::Zero => "zero",
            AngleCase::Interior => "interior",
            AngleCase::RightAngle => "right_angle",
        }
    }
}

/// `Jξ = Pξ + Fξ` for a unit `ξ ∈ w^⊥`, with `P` in `w` and `F` in `w^⊥`.
#[derive(Debug, Clone, PartialEq)]
pub struct KaehlerDecomposition {
    pub xi: DVector<f64>,
    /// Kähler angle in `[0, π/2]`.
    pub phi: f64,
    pub p: DVector<f64>,
    pub f: DVector<f64>,
    pub pbar: Option<DVector<f64>>,
    pub fbar: Option<DVector<f64>>,
}

impl KaehlerDecomposition {
    pub fn case(&self) -> AngleCase {
        match (&self.pbar, &self.fbar) {
            (None, _) => AngleCase::Zero,
            (Some(_), None) => AngleCase::RightAngle,
            (Some(_), Some(_)) => AngleCase::Interior,
        }
    }

    /// `sin φ` with the degeneracy snap applied.
    pub fn sin_phi(&self) -> f64 {
        if self.pbar.is_some() {
            self.phi.sin()
        } else {
            0.0
        }
    }

    /// `cos φ` with the degeneracy snap applied.
    pub fn cos_phi(&self) -> f64 {
        if self.fbar.is_some() {
            self.phi.cos()
        } else {
            0.0
        }
    }
}

/// Splits `Jξ` along `w ⊕ w^⊥`; `xi` is given in `g_α` coordinates.
pub fn decompose(sub: &NormalSubspace, xi: &[f64]) -> Result<KaehlerDecomposition> {
    check_dim(sub.model.alpha_dim(), xi.len())?;
    let xi = DVector::from_column_slice(xi);
    let norm = xi.norm();
    if (norm - 1.0).abs() > EPS {
        return Err(GeometryError::Precondition(format!(
            "xi must be a unit vector, |xi| = {norm}"
        )));
    }
    let outside = (&xi - sub.project(&xi)).norm();
    if outside > EPS {
        return Err(GeometryError::Precondition(format!(
            "xi is not in w^⊥ (distance {outside:.3e})"
        )));
    }
    let jxi = DVector::from_vec(alpha_j(xi.as_slice()));
    let f = sub.project(&jxi);
    let p = &jxi - &f;
    let (p_norm, f_norm) = (p.norm(), f.norm());
    let phi = p_norm.atan2(f_norm);
    let pbar = (phi.sin() >= DEGENERACY_TOL).then(|| &p / p_norm);
    let fbar = (phi.cos() >= DEGENERACY_TOL).then(|| &f / f_norm);
    Ok(KaehlerDecomposition {
        xi,
        phi,
        p,
        f,
        pbar,
        fbar,
    })
}

/// `Q = proj_{w^⊥} ∘ J` restricted to `w^⊥` and the spectrum of `-Q²`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleOperator {
    /// `Q[i][j] = <b_i, J b_j>`; skew-symmetric.
    pub q: DMatrix<f64>,
    /// `-Q²`; symmetric positive semidefinite, `<-Q²ξ, ξ> = cos²φ_ξ`.
    pub matrix: DMatrix<f64>,
    /// Ascending, clamped to `[0, 1]`.
    pub eigenvalues: Vec<f64>,
}

pub fn angle_operator(sub: &NormalSubspace) -> AngleOperator {
    let k = sub.k();
    let jb: Vec<DVector<f64>> = sub
        .basis
        .iter()
        .map(|b| DVector::from_vec(alpha_j(b.as_slice())))
        .collect();
    let q = DMatrix::from_fn(k, k, |i, j| sub.basis[i].dot(&jb[j]));
    let matrix = -(&q * &q);
    let eigenvalues = symmetric_eigenvalues(&matrix)
        .into_iter()
        .map(|v| v.clamp(0.0, 1.0))
        .collect();
    AngleOperator {
        q,
        matrix,
        eigenvalues,
    }
}

/// Whether every unit vector of `w^⊥` has the same Kähler angle, and that angle.
pub fn has_constant_angle(sub: &NormalSubspace, tol: f64) -> (bool, Option<f64>) {
    let spectrum = angle_operator(sub).eigenvalues;
    let (lo, hi) = (spectrum[0], spectrum[spectrum.len() - 1]);
    if hi - lo <= tol {
        let mean = spectrum.iter().sum::<f64>() / spectrum.len() as f64;
        (true, Some(mean.sqrt().clamp(0.0, 1.0).acos()))
    } else {
        (false, None)
    }
}

/// Subspaces shipped with the library; `e_j` is the `j`-th complex coordinate
/// direction of `g_α ≅ C^{n-1}` (1-based).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preset {
    /// `w^⊥ = C^j`, constant angle 0, `k = 2j`.
    Complex(usize),
    /// `w^⊥ = R^j`, constant angle π/2, `k = j`.
    TotallyReal(usize),
    /// `span{e₁, ie₁, e₂}`; angles 0 and π/2 both occur (`n >= 3`).
    Mixed3,
    /// `span{e₁, cosθ·ie₁ + sinθ·e₂}`, constant angle θ (`n >= 3`).
    ThetaPlane(f64),
}

impl Preset {
    pub fn build(&self, model: ModelSpace) -> Result<NormalSubspace> {
        let n = model.n();
        let dim = model.alpha_dim();
        let e = |j: usize, imaginary: bool| {
            let mut v = vec![0.0; dim];
            v[2 * (j - 1) + usize::from(imaginary)] = 1.0;
            v
        };
        let raw = match *self {
            Preset::Complex(j) | Preset::TotallyReal(j) if j == 0 || j > n - 1 => {
                return Err(GeometryError::Precondition(format!(
                    "{self} needs 1 <= j <= n - 1 = {}",
                    n - 1
                )))
            }
            Preset::Complex(j) => (1..=j).flat_map(|c| [e(c, false), e(c, true)]).collect(),
            Preset::TotallyReal(j) => (1..=j).map(|c| e(c, false)).collect(),
            Preset::Mixed3 | Preset::ThetaPlane(_) if n < 3 => {
                return Err(GeometryError::Precondition(format!("{self} requires n >= 3, got n = {n}")))
            }
            Preset::Mixed3 => vec![e(1, false), e(1, true), e(2, false)],
            Preset::ThetaPlane(theta) => {
                if !(0.0..=FRAC_PI_2).contains(&theta) {
                    return Err(GeometryError::Precondition(format!(
                        "theta_plane angle must lie in [0, pi/2], got {theta}"
                    )));
                }
                let second: Vec<f64> = e(1, true)
                    .iter()
                    .zip(e(2, false))
                    .map(|(i1, r2)| theta.cos() * i1 + theta.sin() * r2)
                    .collect();
                vec![e(1, false), second]
            }
        };
        make_subspace(model, &raw)
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::Complex(j) => write!(f, "complex({j})"),
            Preset::TotallyReal(j) => write!(f, "totally_real({j})"),
            Preset::Mixed3 => write!(f, "mixed3"),
            Preset::ThetaPlane(t) => write!(f, "theta_plane({t})"),
        }
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        if s == "mixed3" {
            return Ok(Preset::Mixed3);
        }
        let (name, arg) = s
            .strip_suffix(')')
            .and_then(|rest| rest.split_once('('))
            .ok_or_else(|| format!("unknown preset `{s}`"))?;
        let arg = arg.trim();
        let int = || {
            arg.parse::<usize>()
                .map_err(|_| format!("preset `{name}` expects a positive integer, got `{arg}`"))
        };
        match name.trim() {
            "complex" => Ok(Preset::Complex(int()?)),
            "totally_real" => Ok(Preset::TotallyReal(int()?)),
            "theta_plane" => arg
                .parse::<f64>()
                .map(Preset::ThetaPlane)
                .map_err(|_| format!("theta_plane expects an angle in radians, got `{arg}`")),
            other => Err(format!("unknown preset `{other}`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(n: usize) -> ModelSpace {
        ModelSpace::new(n).unwrap()
    }

    #[test]
    fn make_subspace_normalizes() {
        let sub = make_subspace(model(2), &[vec![2.0, 0.0]]).unwrap();
        assert_eq!(sub.k(), 1);
        assert!((&sub.basis()[0] - DVector::from_vec(vec![1.0, 0.0])).amax() < 1e-15);
    }

    #[test]
    fn make_subspace_errors() {
        let m = model(3);
        let e1 = vec![1.0, 0.0, 0.0, 0.0];
        assert!(matches!(
            make_subspace(m, &[e1.clone(), e1.clone()]),
            Err(GeometryError::Degenerate(_))
        ));
        assert!(matches!(
            make_subspace(m, &[vec![1.0, 0.0]]),
            Err(GeometryError::DimensionMismatch { .. })
        ));
        assert!(make_subspace(m, &[]).is_err());
    }

    #[test]
    fn complex_subspace_has_zero_angle() {
        let sub = Preset::Complex(1).build(model(3)).unwrap();
        let s = 0.6;
        let dec = decompose(&sub, &[s, 0.8, 0.0, 0.0]).unwrap();
        assert!(dec.phi.abs() < 1e-15);
        assert_eq!(dec.case(), AngleCase::Zero);
        assert!(dec.p.amax() < 1e-15);
        assert!((&dec.f - DVector::from_vec(vec![-0.8, s, 0.0, 0.0])).amax() < 1e-15);
    }

    #[test]
    fn totally_real_subspace_has_right_angle() {
        let sub = Preset::TotallyReal(2).build(model(3)).unwrap();
        let dec = decompose(&sub, &[0.6, 0.0, 0.8, 0.0]).unwrap();
        assert!((dec.phi - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(dec.case(), AngleCase::RightAngle);
        assert!(dec.f.amax() < 1e-15);
        assert!((&dec.p - DVector::from_vec(vec![0.0, 0.6, 0.0, 0.8])).amax() < 1e-15);
    }

    #[test]
    fn mixed3_angles() {
        let sub = Preset::Mixed3.build(model(3)).unwrap();
        assert!(decompose(&sub, &[1.0, 0.0, 0.0, 0.0]).unwrap().phi.abs() < 1e-15);
        let dec = decompose(&sub, &[0.0, 0.0, 1.0, 0.0]).unwrap();
        assert!((dec.phi - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn decompose_preconditions() {
        let sub = Preset::TotallyReal(1).build(model(3)).unwrap();
        assert!(decompose(&sub, &[2.0, 0.0, 0.0, 0.0]).is_err());
        assert!(decompose(&sub, &[0.0, 0.0, 1.0, 0.0]).is_err());
        assert!(decompose(&sub, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn angle_operator_spectra() {
        let m = model(3);
        let complex = angle_operator(&Preset::Complex(2).build(m).unwrap());
        assert!((&complex.matrix - DMatrix::identity(4, 4)).amax() < 1e-15);
        let real = angle_operator(&Preset::TotallyReal(2).build(m).unwrap());
        assert!(real.matrix.amax() < 1e-15);
        let mixed = angle_operator(&Preset::Mixed3.build(m).unwrap());
        let expected = [0.0, 1.0, 1.0];
        for (a, b) in mixed.eigenvalues.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_angle_detection() {
        let m = model(3);
        let (flag, phi) = has_constant_angle(&Preset::Complex(1).build(m).unwrap(), 1e-9);
        assert!(flag);
        assert!(phi.unwrap().abs() < 1e-7);
        let (flag, phi) = has_constant_angle(&Preset::TotallyReal(2).build(m).unwrap(), 1e-9);
        assert!(flag);
        assert!((phi.unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(has_constant_angle(&Preset::Mixed3.build(m).unwrap(), 1e-9), (false, None));
        let theta = 0.4;
        let (flag, phi) = has_constant_angle(&Preset::ThetaPlane(theta).build(m).unwrap(), 1e-9);
        assert!(flag);
        assert!((phi.unwrap() - theta).abs() < 1e-12);
    }

    #[test]
    fn preset_parsing() {
        assert_eq!("complex(2)".parse::<Preset>().unwrap(), Preset::Complex(2));
        assert_eq!("totally_real(1)".parse::<Preset>().unwrap(), Preset::TotallyReal(1));
        assert_eq!("mixed3".parse::<Preset>().unwrap(), Preset::Mixed3);
        assert_eq!(
            "theta_plane(0.5)".parse::<Preset>().unwrap(),
            Preset::ThetaPlane(0.5)
        );
        assert!("complex(x)".parse::<Preset>().is_err());
        assert!("sphere(2)".parse::<Preset>().is_err());
        let p = Preset::ThetaPlane(0.25);
        assert_eq!(p.to_string().parse::<Preset>().unwrap(), p);
    }

    #[test]
    fn preset_dimension_constraints() {
        assert!(Preset::Mixed3.build(model(2)).is_err());
        assert!(Preset::Complex(2).build(model(2)).is_err());
        assert!(Preset::TotallyReal(0).build(model(3)).is_err());
        assert!(Preset::ThetaPlane(2.0).build(model(3)).is_err());
        assert_eq!(Preset::Complex(2).build(model(3)).unwrap().k(), 4);
    }
}
