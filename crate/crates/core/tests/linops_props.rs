use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use scnpp::linops::{LinearOp, Vector, GRAM_NORM_MAX_ITER, GRAM_NORM_TOL};

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = LinearOp> {
    prop::collection::vec(-3.0..3.0f64, rows * cols)
        .prop_map(move |data| LinearOp::new(rows, cols, data).unwrap())
}

fn vector(n: usize) -> impl Strategy<Value = Vector> {
    prop::collection::vec(-5.0..5.0f64, n).prop_map(Vector::from)
}

fn shaped() -> impl Strategy<Value = (LinearOp, Vector, Vector)> {
    (1usize..7, 1usize..7).prop_flat_map(|(m, n)| (matrix(m, n), vector(n), vector(m)))
}

/// Largest eigenvalue of AᵀA from a dense symmetric eigensolver.
fn eig_oracle(a: &LinearOp) -> f64 {
    let m = DMatrix::from_row_slice(a.rows(), a.cols(), a.data());
    let gram = m.transpose() * &m;
    SymmetricEigen::new(gram).eigenvalues.max()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn adjoint_identity((a, x, y) in shaped()) {
        let lhs = a.apply(&x).unwrap().dot(&y);
        let rhs = x.dot(&a.adjoint_apply(&y).unwrap());
        let scale = 1.0 + lhs.abs().max(rhs.abs());
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale, "{lhs} vs {rhs}");
    }

    #[test]
    fn gram_norm_matches_eigensolver(a in matrix(5, 3)) {
        let est = a.gram_norm(GRAM_NORM_TOL, GRAM_NORM_MAX_ITER);
        let exact = eig_oracle(&a);
        prop_assert!(est.converged);
        prop_assert!((est.estimate - exact).abs() <= 1e-8 * exact.max(1.0), "{} vs {exact}", est.estimate);
    }

    #[test]
    fn gram_norm_scales_quadratically(a in matrix(4, 3), c in 0.1..10.0f64) {
        let base = a.gram_norm_default().estimate;
        let scaled = a.scale(c).gram_norm_default().estimate;
        prop_assert!((scaled - c * c * base).abs() <= 1e-8 * (c * c * base).max(1.0));
    }

    #[test]
    fn safe_estimate_bounds_every_ratio((a, x, _) in shaped()) {
        prop_assume!(x.norm() > 1e-6);
        let safe = a.gram_norm_default().safe();
        let ax = a.apply(&x).unwrap();
        prop_assert!(ax.norm_sq() <= safe * x.norm_sq() * (1.0 + 1e-12));
    }

    #[test]
    fn lift_norm_is_bounded_by_its_parts(
        p in 1usize..3,
        (a1, a2) in (matrix(2, 3), matrix(3, 3)),
        x in vector(3),
    ) {
        let ops = [a1.clone(), a2.clone()];
        let lifted = LinearOp::lift(p, &ops, 3).unwrap();
        prop_assert_eq!(lifted.rows(), 3 * p + 5);
        let bound = p as f64 + eig_oracle(&a1) + eig_oracle(&a2);
        prop_assert!(eig_oracle(&lifted) <= bound * (1.0 + 1e-12));
        // Blocks of the lifted image are the copies of x followed by A_j x.
        let y = lifted.apply(&x).unwrap();
        for i in 0..p {
            prop_assert_eq!(y.slice(3 * i, 3), x.clone());
        }
        prop_assert_eq!(y.slice(3 * p, 2), a1.apply(&x).unwrap());
        prop_assert_eq!(y.slice(3 * p + 2, 3), a2.apply(&x).unwrap());
    }
}
