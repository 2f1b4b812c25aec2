//! Small dense helpers: orthonormalization, deterministic basis completion,
//! symmetric spectra, eigenvalue clustering and polynomial arithmetic.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{GeometryError, Result};

/// Relative pivot below which Gram-Schmidt declares the input dependent.
pub const PIVOT_TOL: f64 = 1e-8;

fn remove_components(v: &mut DVector<f64>, basis: &[DVector<f64>]) {
    // two passes of modified Gram-Schmidt
    for _ in 0..2 {
        for b in basis {
            let c = b.dot(v);
            v.axpy(-c, b, 1.0);
        }
    }
}

/// Modified Gram-Schmidt with reorthogonalization, preserving order and span.
pub fn orthonormalize(vectors: &[DVector<f64>]) -> Result<Vec<DVector<f64>>> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(vectors.len());
    for (i, v) in vectors.iter().enumerate() {
        let scale = v.norm();
        if !scale.is_finite() {
            return Err(GeometryError::Degenerate(format!("vector {i} is not finite")));
        }
        let mut w = v.clone();
        remove_components(&mut w, &out);
        let norm = w.norm();
        if scale == 0.0 || norm < PIVOT_TOL * scale {
            return Err(GeometryError::Degenerate(format!(
                "vector {i} is linearly dependent on the previous ones (pivot {:.3e})",
                if scale == 0.0 { 0.0 } else { norm / scale }
            )));
        }
        out.push(w / norm);
    }
    Ok(out)
}

/// Orthogonal projection onto the span of an orthonormal family.
pub fn project(v: &DVector<f64>, basis: &[DVector<f64>]) -> DVector<f64> {
    let mut out = DVector::zeros(v.len());
    for b in basis {
        out.axpy(b.dot(v), b, 1.0);
    }
    out
}

/// Extends `exclude` by `count` orthonormal vectors drawn from `within` (or the
/// whole space when `within` is `None`), orthogonal to `exclude`.
///
/// Candidates are the canonical coordinate vectors projected onto `within`;
/// at each step the candidate with the largest residual wins, lowest index on
/// ties. The result is therefore a deterministic function of the inputs.
pub fn complete(
    within: Option<&[DVector<f64>]>,
    exclude: &[DVector<f64>],
    dim: usize,
    count: usize,
) -> Result<Vec<DVector<f64>>> {
    let mut chosen: Vec<DVector<f64>> = exclude.to_vec();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut best: Option<(f64, DVector<f64>)> = None;
        for i in 0..dim {
            let e = DVector::from_fn(dim, |r, _| if r == i { 1.0 } else { 0.0 });
            let mut cand = match within {
                Some(w) => project(&e, w),
                None => e,
            };
            remove_components(&mut cand, &chosen);
            let norm = cand.norm();
            if best.as_ref().is_none_or(|(b, _)| norm > *b) {
                best = Some((norm, cand));
            }
        }
        let (norm, mut cand) = best.ok_or_else(|| {
            GeometryError::Numerical("basis completion in a zero-dimensional space".into())
        })?;
        if norm < 1e-6 {
            return Err(GeometryError::Numerical(format!(
                "basis completion ran out of directions after {} of {count} vectors",
                out.len()
            )));
        }
        cand /= norm;
        remove_components(&mut cand, &chosen);
        let cand = cand.normalize();
        chosen.push(cand.clone());
        out.push(cand);
    }
    Ok(out)
}

/// Eigenvalues of a symmetric matrix, ascending. Only the lower triangle is read.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut values: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Groups ascending values whose neighbours differ by at most
/// `max(rel_tol * magnitude, abs_floor)`; returns (mean, multiplicity).
pub fn cluster(sorted: &[f64], rel_tol: f64, abs_floor: f64) -> Vec<(f64, usize)> {
    let mut groups: Vec<Vec<f64>> = Vec::new();
    for &v in sorted {
        match groups.last_mut() {
            Some(g) => {
                let prev = *g.last().unwrap();
                let tol = (rel_tol * prev.abs().max(v.abs())).max(abs_floor);
                if (v - prev).abs() <= tol {
                    g.push(v);
                } else {
                    groups.push(vec![v]);
                }
            }
            None => groups.push(vec![v]),
        }
    }
    groups
        .into_iter()
        .map(|g| (g.iter().sum::<f64>() / g.len() as f64, g.len()))
        .collect()
}

/// Largest elementwise difference between two equally long sorted lists.
pub fn max_sorted_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Polynomial product; coefficients in ascending degree.
pub fn poly_mul(p: &[f64], q: &[f64]) -> Vec<f64> {
    if p.is_empty() || q.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// `∏ (root - x)`, ascending coefficients. Matches `det(S - xI)` for a matrix
/// with the given eigenvalues.
pub fn poly_from_roots(roots: &[f64]) -> Vec<f64> {
    roots
        .iter()
        .fold(vec![1.0], |acc, &r| poly_mul(&acc, &[r, -1.0]))
}

/// Divides by `(root - x)`, returning the quotient and the remainder.
pub fn deflate(p: &[f64], root: f64) -> (Vec<f64>, f64) {
    // p(x) = (root - x) s(x) + rem, i.e. -(x - root) s(x) + rem
    let deg = p.len() - 1;
    let mut quotient = vec![0.0; deg];
    let mut carry = 0.0;
    for i in (0..=deg).rev() {
        let c = p[i] + carry * root;
        if i == 0 {
            return (quotient.iter().map(|x| -x).collect(), c);
        }
        quotient[i - 1] = c;
        carry = c;
    }
    unreachable!()
}

pub fn poly_eval(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn orthonormalize_keeps_orthonormal_input() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let input = vec![v(&[s, s, 0.0]), v(&[s, -s, 0.0]), v(&[0.0, 0.0, 1.0])];
        let out = orthonormalize(&input).unwrap();
        for (a, b) in input.iter().zip(&out) {
            assert!((a - b).amax() < 1e-12);
        }
    }

    #[test]
    fn orthonormalize_rejects_dependent() {
        let input = vec![v(&[1.0, 0.0]), v(&[1.0, 0.0])];
        assert!(matches!(orthonormalize(&input), Err(GeometryError::Degenerate(_))));
        assert!(orthonormalize(&[v(&[0.0, 0.0])]).is_err());
    }

    #[test]
    fn completion_is_orthonormal_and_deterministic() {
        let within = orthonormalize(&[v(&[1.0, 1.0, 0.0, 0.0]), v(&[0.0, 1.0, 1.0, 1.0])]).unwrap();
        let exclude = vec![within[0].clone()];
        let a = complete(Some(&within), &exclude, 4, 1).unwrap();
        let b = complete(Some(&within), &exclude, 4, 1).unwrap();
        assert_eq!(a, b);
        assert!(a[0].dot(&within[0]).abs() < 1e-14);
        assert!((project(&a[0], &within) - &a[0]).amax() < 1e-14);
        let full = complete(None, &within, 4, 2).unwrap();
        let mut all = within.clone();
        all.extend(full);
        let gram = DMatrix::from_fn(4, 4, |i, j| all[i].dot(&all[j]));
        assert!((gram - DMatrix::identity(4, 4)).amax() < 1e-14);
    }

    #[test]
    fn completion_fails_when_space_is_exhausted() {
        let within = vec![v(&[1.0, 0.0])];
        assert!(complete(Some(&within), &within, 2, 1).is_err());
    }

    #[test]
    fn clustering() {
        let groups = cluster(&[0.1, 0.1 + 1e-12, 0.5, 2.0, 2.0], 1e-8, 1e-12);
        assert_eq!(groups.len(), 3);
        assert_eq!(groups[0].1, 2);
        assert_eq!(groups[1], (0.5, 1));
        assert_eq!(groups[2], (2.0, 2));
    }

    #[test]
    fn polynomial_helpers() {
        // (1 - x)(2 - x) = 2 - 3x + x^2
        let p = poly_from_roots(&[1.0, 2.0]);
        assert_eq!(p, vec![2.0, -3.0, 1.0]);
        let (q, rem) = deflate(&p, 2.0);
        assert_eq!(q, vec![1.0, -1.0]);
        assert!(rem.abs() < 1e-15);
        assert_eq!(poly_eval(&p, 3.0), 2.0);
    }
}
