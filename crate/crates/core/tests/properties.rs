use std::f64::consts::PI;

use ncpmap::domains::{from_rotated, in_compatibility, in_positivity, DomainSpec, RotatedBloch};
use ncpmap::matlin::{eig_hermitian, partial_trace, tensor, Subsystem};
use ncpmap::reduced::{build_basis, transfer_matrix};
use ncpmap::testing::{random_density, random_hermitian, random_hermitian_op, random_signed_conjugation_map, rng};
use ncpmap::twoqubit::{analytic_eigensystem, analytic_kraus, reduced_map};
use ncpmap::{CorrelationParams, MatrixMap};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = CorrelationParams> {
    (0.0..=1.0f64, 0.0..2.0 * PI, 0.0..2.0 * PI)
        .prop_map(|(r, phase, wt)| CorrelationParams::new(r * phase.cos(), r * phase.sin(), wt).unwrap())
}

fn rotated_in_ball() -> impl Strategy<Value = RotatedBloch> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("inside the ball", |(a, b, c)| a * a + b * b + c * c <= 1.0)
        .prop_map(|(a, b, c)| RotatedBloch::new(a, b, c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jacobi_reconstructs(seed in any::<u64>(), n in 1usize..7) {
        let h = random_hermitian_op(&mut rng(seed), n);
        let es = eig_hermitian(&h);
        prop_assert!(es.reconstruct().max_abs_diff(h.matrix()) < 1e-12 * h.frobenius_norm().max(1.0));
        prop_assert!(es.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn partial_trace_of_product(seed in any::<u64>(), n in 1usize..4, m in 1usize..4) {
        let mut r = rng(seed);
        let (a, b) = (random_density(&mut r, n), random_density(&mut r, m));
        let ab = tensor(&a, &b);
        prop_assert!(partial_trace(&ab, Subsystem::Second, (n, m)).unwrap().max_abs_diff(&a) < 1e-14);
        prop_assert!(partial_trace(&ab, Subsystem::First, (n, m)).unwrap().max_abs_diff(&b) < 1e-14);
    }

    #[test]
    fn signed_kraus_reconstructs(seed in any::<u64>(), n in 2usize..4, terms in 1usize..5) {
        let mut r = rng(seed);
        let map = random_signed_conjugation_map(&mut r, n, terms);
        let sk = map.signed_kraus().unwrap();
        prop_assert!(sk.to_map().b_matrix().max_abs_diff(map.b_matrix()) < 1e-10);
        prop_assert!(sk.orthogonality_deviation() < 1e-10);
        let q = random_hermitian(&mut r, n);
        prop_assert!(sk.apply(&q).max_abs_diff(&map.apply(&q).unwrap()) < 1e-10);
    }

    #[test]
    fn map_json_round_trip_is_exact(seed in any::<u64>(), n in 1usize..4) {
        let map = random_signed_conjugation_map(&mut rng(seed), n, 3);
        let back = MatrixMap::from_json(&map.to_json().unwrap()).unwrap();
        prop_assert_eq!(back.b_matrix(), map.b_matrix());
    }

    #[test]
    fn two_qubit_spectrum(p in params()) {
        let map = reduced_map(&p);
        let mut analytic = analytic_eigensystem(&p).eigenvalues.to_vec();
        analytic.sort_by(|a, b| b.total_cmp(a));
        let numeric = map.min_b_eigenvalue().unwrap();
        prop_assert!((analytic[3] - numeric).abs() < 1e-10);
        prop_assert!(map.is_trace_preserving(1e-12));
        let sk = analytic_kraus(&p);
        prop_assert!(sk.to_map().b_matrix().max_abs_diff(map.b_matrix()) < 1e-10);
        prop_assert!(sk.completeness_deviation() < 1e-10);
    }

    #[test]
    fn compatibility_is_convex(v in rotated_in_ball(), w in rotated_in_ball(), q in 0.0..=1.0f64, c in 0.0..0.99f64) {
        prop_assume!(in_compatibility(&v, c) && in_compatibility(&w, c));
        prop_assert!(in_compatibility(&v.scaled(q).plus(&w.scaled(1.0 - q)), c));
    }

    #[test]
    fn compatible_points_stay_positive(v in rotated_in_ball(), c in 0.0..0.99f64, alpha in 0.0..2.0 * PI, wt in 0.0..2.0 * PI) {
        prop_assume!(in_compatibility(&v, c));
        let spec = DomainSpec::new(c, alpha).unwrap();
        prop_assert!(in_positivity(&from_rotated(&v, &spec), &spec.params(wt)));
    }

    #[test]
    fn transfer_matrix_is_orthogonal(seed in any::<u64>(), t in -3.0..3.0f64, m in 2usize..4) {
        let a = build_basis(2, None).unwrap();
        let b = build_basis(m, None).unwrap();
        let h = random_hermitian_op(&mut rng(seed), 2 * m);
        let tm = transfer_matrix(&h, t, &a, &b).unwrap();
        prop_assert!(tm.orthogonality_deviation() < 1e-10);
        prop_assert!(tm.unit_row_column_deviation() < 1e-12);
    }
}
