//! Seeded random draws of unit normals and subspaces.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::model::ModelSpace;
use crate::subspace::{make_subspace, NormalSubspace};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_vec(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

/// Isotropic unit vector of `w^⊥`, in `g_α` coordinates.
pub fn sample_unit_normal(sub: &NormalSubspace, rng: &mut impl Rng) -> DVector<f64> {
    loop {
        let coeffs = gaussian_vec(rng, sub.k());
        let v = sub.combine(&coeffs).expect("coefficient count matches k");
        let norm = v.norm();
        if norm > 1e-8 {
            return v / norm;
        }
    }
}

/// `w^⊥` spanned by `k` Gaussian vectors of `g_α`.
pub fn random_subspace(model: ModelSpace, k: usize, rng: &mut impl Rng) -> Result<NormalSubspace> {
    let raw: Vec<Vec<f64>> = (0..k).map(|_| gaussian_vec(rng, model.alpha_dim())).collect();
    make_subspace(model, &raw)
}
