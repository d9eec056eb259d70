//! Randomized invariants. Matrices are drawn from seeded generators; proptest picks the
//! seeds and shapes, so a failure shrinks to a small reproducible case.

use proptest::prelude::*;

use qconvex::entropy::{perspective_map, quasi_entropy, relative_entropy, DensityMatrix};
use qconvex::linalg::{
    hermitian_eig, kron, matrix_exp, matrix_log, partial_trace, vec, ComplexMatrix,
    HermitianMatrix,
};
use qconvex::report::float17;
use qconvex::sampling::{
    derive_rng, mix_with_identity, random_density, random_gaussian, random_hermitian, random_pd,
    random_unitary, EPSILON_MIX,
};
use qconvex::suites::ando_sides;
use qconvex::OperatorConvexFunction;

fn mixed(d: usize, seed: u64, i: u64) -> HermitianMatrix {
    mix_with_identity(&random_density(d, &mut derive_rng(seed, i)), EPSILON_MIX)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_mixed_product(seed in any::<u64>(), m in 1usize..4, n in 1usize..4, p in 1usize..4, q in 1usize..4) {
        let mut rng = derive_rng(seed, 0);
        let a = random_gaussian(m, p, &mut rng);
        let b = random_gaussian(n, q, &mut rng);
        let c = random_gaussian(p, 2, &mut rng);
        let d = random_gaussian(q, 3, &mut rng);
        let lhs = &kron(&a, &b) * &kron(&c, &d);
        let rhs = kron(&(&a * &c), &(&b * &d));
        prop_assert!((&lhs - &rhs).max_abs() < 1e-12 * (1.0 + lhs.max_abs()));
    }

    #[test]
    fn vec_of_product(seed in any::<u64>(), m in 1usize..5, n in 1usize..5) {
        let mut rng = derive_rng(seed, 1);
        let a = random_gaussian(m, m, &mut rng);
        let b = random_gaussian(n, n, &mut rng);
        let k = random_gaussian(m, n, &mut rng);
        let lhs = vec(&(&(&a * &k) * &b));
        let rhs = kron(&a, &b.transpose()).matvec(&vec(&k)).unwrap();
        let gap = lhs.iter().zip(&rhs).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(gap < 1e-12 * (1.0 + a.norm_inf() * b.norm_inf() * k.max_abs()));
    }

    #[test]
    fn ando_identity(seed in any::<u64>(), m in 1usize..7, n in 1usize..7) {
        let mut rng = derive_rng(seed, 2);
        let a = random_gaussian(m, m, &mut rng);
        let b = random_gaussian(n, n, &mut rng);
        let k = random_gaussian(m, n, &mut rng);
        let (lhs, rhs) = ando_sides(&k, &a, &b).unwrap();
        let scale = k.norm_fro().powi(2) * a.norm_inf() * b.norm_inf();
        prop_assert!((lhs - rhs).norm() <= 1e-11 * scale);
    }

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), d in 1usize..9) {
        let h = random_hermitian(d, &mut derive_rng(seed, 3));
        let sd = hermitian_eig(&h).unwrap();
        prop_assert!(sd.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let u = &sd.eigenvectors;
        prop_assert!((&(&u.adjoint() * u) - &ComplexMatrix::identity(d)).max_abs() < 1e-12);
        prop_assert!((sd.reconstruct().as_matrix() - h.as_matrix()).max_abs() < 1e-12 * (1.0 + h.max_abs()));
    }

    #[test]
    fn exp_log_round_trip(seed in any::<u64>(), d in 1usize..6) {
        let a = random_pd(d, &mut derive_rng(seed, 4), 0.1, 10.0);
        let back = matrix_exp(&matrix_log(&a, 1e-12).unwrap()).unwrap();
        prop_assert!((back.as_matrix() - a.as_matrix()).max_abs() < 1e-11);
        let h = random_hermitian(d, &mut derive_rng(seed, 5));
        let back = matrix_log(&matrix_exp(&h).unwrap(), 1e-12).unwrap();
        prop_assert!((back.as_matrix() - h.as_matrix()).max_abs() < 1e-10 * (1.0 + h.max_abs()));
    }

    #[test]
    fn partial_trace_composes(seed in any::<u64>(), d1 in 1usize..4, d2 in 1usize..4, d3 in 1usize..4) {
        let dims = [d1, d2, d3];
        let rho = random_density(d1 * d2 * d3, &mut derive_rng(seed, 6));
        let step = partial_trace(&rho, &dims, &[0, 1]).unwrap();
        let two_steps = partial_trace(&step, &[d1, d2], &[0]).unwrap();
        let direct = partial_trace(&rho, &dims, &[0]).unwrap();
        prop_assert!((&two_steps - &direct).max_abs() < 1e-14);
        prop_assert!((partial_trace(&rho, &dims, &[]).unwrap()[(0, 0)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_unitary_invariance(seed in any::<u64>(), d in 1usize..5) {
        let rho = mixed(d, seed, 7);
        let gamma = mixed(d, seed, 8);
        let u = random_unitary(d, &mut derive_rng(seed, 9));
        let h = relative_entropy(&rho, &gamma).unwrap();
        let hu = relative_entropy(&rho.congruence(&u.adjoint()).unwrap(), &gamma.congruence(&u.adjoint()).unwrap()).unwrap();
        prop_assert!((h - hu).abs() < 1e-10);
    }

    #[test]
    fn relative_entropy_additive_and_nonnegative(seed in any::<u64>(), d1 in 1usize..4, d2 in 1usize..4) {
        let (r1, g1, r2, g2) = (mixed(d1, seed, 10), mixed(d1, seed, 11), mixed(d2, seed, 12), mixed(d2, seed, 13));
        let h1 = relative_entropy(&r1, &g1).unwrap();
        let h2 = relative_entropy(&r2, &g2).unwrap();
        prop_assert!(h1 >= -1e-12 && h2 >= -1e-12);
        let rho = DensityMatrix::new(r1).unwrap().tensor(&DensityMatrix::new(r2).unwrap());
        let gamma = DensityMatrix::new(g1).unwrap().tensor(&DensityMatrix::new(g2).unwrap());
        let h = relative_entropy(&rho, &gamma).unwrap();
        prop_assert!((h - h1 - h2).abs() < 1e-10);
    }

    #[test]
    fn perspective_of_commuting_pair_is_scalar_perspective(
        a in prop::collection::vec(0.1f64..10.0, 1..4),
        b in prop::collection::vec(0.1f64..10.0, 1..4),
    ) {
        for g in [OperatorConvexFunction::XLogX, OperatorConvexFunction::Hq(-0.4), OperatorConvexFunction::Gp(1.7)] {
            let p = perspective_map(&g, &HermitianMatrix::from_real_diag(&a), &HermitianMatrix::from_real_diag(&b)).unwrap();
            for (i, ai) in a.iter().enumerate() {
                for (j, bj) in b.iter().enumerate() {
                    let r = i * b.len() + j;
                    let expected = bj * g.value(ai / bj);
                    prop_assert!((p[(r, r)].re - expected).abs() <= 1e-12 * (1.0 + expected.abs()));
                }
            }
        }
    }

    #[test]
    fn float17_round_trips(x in any::<f64>()) {
        let s = float17::format(x);
        let back: f64 = match s.as_str() {
            "\"NaN\"" => f64::NAN,
            "\"Infinity\"" => f64::INFINITY,
            "\"-Infinity\"" => f64::NEG_INFINITY,
            _ => serde_json::from_str(&s).unwrap(),
        };
        prop_assert!(back.to_bits() == x.to_bits() || (x.is_nan() && back.is_nan()));
    }
}

/// For non-Hermitian `K` the tilde symmetry needs `K*` on the right-hand side: with `K` itself
/// the two sides differ.
#[test]
fn tilde_symmetry_needs_adjoint_for_general_k() {
    let mut rng = derive_rng(77, 0);
    let a = random_pd(2, &mut rng, 0.1, 10.0);
    let b = random_pd(2, &mut rng, 0.1, 10.0);
    let k = random_gaussian(2, 2, &mut rng);
    let g = OperatorConvexFunction::Gp(1.5);
    let tilde = g.clone().tilde();
    let lhs = quasi_entropy(&tilde, &k, &a, &b).unwrap();
    let with_adjoint = quasi_entropy(&g, &k.adjoint(), &b, &a).unwrap();
    let literal = quasi_entropy(&g, &k, &b, &a).unwrap();
    assert!((lhs - with_adjoint).abs() < 1e-10);
    assert!((lhs - literal).abs() > 1e-3, "{lhs} {literal}");

    // diagonal A, B: H_g(K, A, B) = Σ |K_ij|² b_j g(a_i / b_j)
    let (ad, bd) = ([2.0, 0.5], [3.0, 0.25]);
    let h = quasi_entropy(&g, &k, &HermitianMatrix::from_real_diag(&ad), &HermitianMatrix::from_real_diag(&bd)).unwrap();
    let mut expected = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            expected += k[(i, j)].norm_sqr() * bd[j] * g.value(ad[i] / bd[j]);
        }
    }
    assert!((h - expected).abs() < 1e-12);
}
