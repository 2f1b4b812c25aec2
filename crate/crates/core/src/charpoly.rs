//! Closed-form characteristic polynomial of the tube shape operator,
//!
//! `p(x) = (λ - x)^{2n-k-2} (1/(4λ) - x)^{k-2} q(x)`, `λ = tanh(r/2) / 2`,
//!
//! and its roots. The cubic factor only depends on `φ` through its constant
//! term, so `q(x) = -(x - λ)²(x - coth r) - 2 sin²φ (4λ² - 1)² / (32λ)`;
//! the root solver works in `y = x - λ` where this is `y³ - y²/(4λ) + e = 0`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{GeometryError, Result};
use crate::linalg::{deflate, poly_mul};

/// Angles within this distance of `π/2` are accepted for `k = 1`.
const RIGHT_ANGLE_SLACK: f64 = 1e-6;

/// `λ = tanh(r/2) / 2`, the principal curvature of the tangent block.
pub fn tube_lambda(r: f64) -> f64 {
    0.5 * (0.5 * r).tanh()
}

/// `q_{r,ξ}` in ascending coefficients, constant term written with `cos 2φ`.
pub fn cubic_factor(r: f64, phi: f64) -> [f64; 4] {
    let l = tube_lambda(r);
    let l2 = l * l;
    let constant =
        (16.0 * l2 * l2 + 16.0 * l2 - 1.0 + (4.0 * l2 - 1.0).powi(2) * (2.0 * phi).cos()) / (32.0 * l);
    [constant, -0.5 * (6.0 * l2 + 1.0), 3.0 * l + 0.25 / l, -1.0]
}

fn check_args(n: usize, k: usize, r: f64, phi: f64) -> Result<()> {
    if n < 2 || k == 0 || k > 2 * n - 2 {
        return Err(GeometryError::Precondition(format!(
            "need n >= 2 and 1 <= k <= 2n - 2, got n = {n}, k = {k}"
        )));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(GeometryError::Precondition(format!("radius must be positive, got {r}")));
    }
    if !(-RIGHT_ANGLE_SLACK..=FRAC_PI_2 + RIGHT_ANGLE_SLACK).contains(&phi) {
        return Err(GeometryError::Precondition(format!(
            "Kähler angle must lie in [0, pi/2], got {phi}"
        )));
    }
    if k == 1 && (phi - FRAC_PI_2).abs() > RIGHT_ANGLE_SLACK {
        return Err(GeometryError::Precondition(format!(
            "k = 1 forces a Kähler angle of pi/2, got {phi}"
        )));
    }
    Ok(())
}

fn power(root: f64, exponent: usize) -> Vec<f64> {
    (0..exponent).fold(vec![1.0], |acc, _| poly_mul(&acc, &[root, -1.0]))
}

/// Monomial coefficients (ascending) of `p_{r,ξ}`, degree `2n - 1`.
///
/// For `k = 1` the factor `(1/(4λ) - x)^{-1}` is absorbed by dividing it out
/// of `q`, which has it as a root at `φ = π/2`.
pub fn char_poly_closed(n: usize, k: usize, r: f64, phi: f64) -> Result<Vec<f64>> {
    check_args(n, k, r, phi)?;
    let l = tube_lambda(r);
    let q = cubic_factor(r, phi);
    let tail = if k == 1 {
        deflate(&q, 0.25 / l).0
    } else {
        poly_mul(&power(0.25 / l, k - 2), &q)
    };
    Ok(poly_mul(&power(l, 2 * n - k - 2), &tail))
}

/// Roots of `y³ - d y² + e` with `d > 0`, `0 <= e <= 4d³/27`, ascending.
fn shifted_cubic_roots(d: f64, e: f64) -> [f64; 3] {
    let g = |y: f64| y * y * (y - d) + e;
    let dg = |y: f64| y * (3.0 * y - 2.0 * d);
    // largest root lies in [2d/3, d]; Newton from d decreases monotonically
    let mut y3 = d;
    for _ in 0..200 {
        let slope = dg(y3);
        if slope <= 0.0 {
            break;
        }
        let next = y3 - g(y3) / slope;
        if next >= y3 || next.is_nan() {
            break;
        }
        y3 = next;
    }
    // y³ - d y² + e = (y - y3)(y² + βy + γ)
    let beta = y3 - d;
    let gamma = if y3 > 0.0 { -e / y3 } else { 0.0 };
    let disc = (beta * beta - 4.0 * gamma).max(0.0);
    let y2 = 0.5 * (-beta + disc.sqrt());
    let y1 = if y2 > 0.0 { gamma / y2 } else { 0.0 };
    [y1, y2, y3]
}

/// Roots of `q_{r,ξ}`, ascending.
pub fn cubic_roots(r: f64, phi: f64) -> [f64; 3] {
    let l = tube_lambda(r);
    let d = 0.25 / l;
    let kappa = (4.0 * l * l - 1.0).powi(2) / (32.0 * l);
    let s = phi.sin();
    let e = 2.0 * kappa * s * s;
    shifted_cubic_roots(d, e).map(|y| l + y)
}

/// Principal curvatures of `M^r` predicted by `p_{r,ξ}`, ascending, with
/// multiplicity.
pub fn closed_principal_curvatures(n: usize, k: usize, r: f64, phi: f64) -> Result<Vec<f64>> {
    check_args(n, k, r, phi)?;
    let l = tube_lambda(r);
    let mut roots = Vec::with_capacity(2 * n - 1);
    let mut cubic = cubic_roots(r, phi).to_vec();
    if k == 1 {
        let far = 0.25 / l;
        let (idx, _) = cubic
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - far).abs().total_cmp(&(b.1 - far).abs()))
            .unwrap();
        cubic.remove(idx);
        roots.extend(std::iter::repeat_n(l, 2 * n - 3));
    } else {
        roots.extend(std::iter::repeat_n(l, 2 * n - k - 2));
        roots.extend(std::iter::repeat_n(0.25 / l, k - 2));
    }
    roots.extend(cubic);
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}
