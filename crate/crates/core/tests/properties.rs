use isotube::model::{bracket, complex_structure, connection, inner, radial_curvature, AlgebraVector, ModelSpace};
use isotube::sampling::{random_subspace, sample_unit_normal, seeded};
use isotube::subspace::{angle_operator, decompose, has_constant_angle};
use proptest::prelude::*;

fn vector(n: usize) -> impl Strategy<Value = AlgebraVector> {
    prop::collection::vec(-3.0f64..3.0, 2 * n)
        .prop_map(move |flat| ModelSpace::new(n).unwrap().from_flat(&flat).unwrap())
}

fn triple() -> impl Strategy<Value = (AlgebraVector, AlgebraVector, AlgebraVector)> {
    (2usize..=6).prop_flat_map(|n| (vector(n), vector(n), vector(n)))
}

fn close(a: &AlgebraVector, b: &AlgebraVector, tol: f64) -> bool {
    (a - b).max_abs() <= tol
}

proptest! {
    #[test]
    fn torsion_free((x, y, _) in triple()) {
        let lhs = &connection(&x, &y).unwrap() - &connection(&y, &x).unwrap();
        prop_assert!(close(&lhs, &bracket(&x, &y).unwrap(), 1e-12));
    }

    #[test]
    fn metric_compatible((x, y, z) in triple()) {
        let c = inner(&connection(&x, &y).unwrap(), &z).unwrap() + inner(&y, &connection(&x, &z).unwrap()).unwrap();
        prop_assert!(c.abs() <= 1e-11);
    }

    #[test]
    fn complex_structure_is_orthogonal_and_parallel((x, y, _) in triple()) {
        let jy = complex_structure(&y);
        prop_assert!(close(&complex_structure(&jy), &-&y, 0.0));
        prop_assert!((inner(&jy, &complex_structure(&x)).unwrap() - inner(&y, &x).unwrap()).abs() <= 1e-12);
        // ∇J = 0 on left-invariant fields
        let lhs = connection(&x, &jy).unwrap();
        let rhs = complex_structure(&connection(&x, &y).unwrap());
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn jacobi_identity((x, y, z) in triple()) {
        let a = bracket(&x, &bracket(&y, &z).unwrap()).unwrap();
        let b = bracket(&y, &bracket(&z, &x).unwrap()).unwrap();
        let c = bracket(&z, &bracket(&x, &y).unwrap()).unwrap();
        prop_assert!((&(&a + &b) + &c).max_abs() <= 1e-11);
    }

    #[test]
    fn radial_curvature_is_self_adjoint((x, y, g) in triple()) {
        prop_assume!(g.norm() > 1e-3);
        let g = (1.0 / g.norm()) * &g;
        let x = &x - &(inner(&x, &g).unwrap() * &g);
        let y = &y - &(inner(&y, &g).unwrap() * &g);
        let rx = radial_curvature(&x, &g).unwrap();
        let ry = radial_curvature(&y, &g).unwrap();
        prop_assert!((inner(&rx, &y).unwrap() - inner(&x, &ry).unwrap()).abs() <= 1e-12);
        // holomorphic sectional curvature -1
        let jg = complex_structure(&g);
        prop_assert!(close(&radial_curvature(&jg, &g).unwrap(), &-&jg, 1e-12));
    }

    #[test]
    fn planes_have_constant_angle(n in 2usize..=6, seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let sub = random_subspace(ModelSpace::new(n).unwrap(), 2, &mut rng).unwrap();
        let (constant, angle) = has_constant_angle(&sub, 1e-9);
        prop_assert!(constant);
        let xi = sample_unit_normal(&sub, &mut rng);
        let phi = decompose(&sub, xi.as_slice()).unwrap().phi;
        prop_assert!((phi - angle.unwrap()).abs() <= 1e-6);
    }

    #[test]
    fn angle_operator_is_skew_and_bounds_angles(n in 2usize..=6, k_frac in 0.0f64..1.0, seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let k = 1 + ((2 * n - 3) as f64 * k_frac) as usize;
        let sub = random_subspace(ModelSpace::new(n).unwrap(), k, &mut rng).unwrap();
        let op = angle_operator(&sub);
        prop_assert!((&op.q + op.q.transpose()).amax() <= 1e-12);
        let (lo, hi) = (op.eigenvalues[0], op.eigenvalues[k - 1]);
        prop_assert!(lo >= -1e-12 && hi <= 1.0 + 1e-12);
        let xi = sample_unit_normal(&sub, &mut rng);
        let cos2 = decompose(&sub, xi.as_slice()).unwrap().phi.cos().powi(2);
        prop_assert!(cos2 >= lo - 1e-9 && cos2 <= hi + 1e-9);
    }
}
