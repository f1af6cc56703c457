use ellipsep_core::ensembles::random_density_operator;
use ellipsep_core::state_space::{
    devectorize, gell_mann_basis, hermitian_deviation, partial_transpose, partial_transpose_matrix,
    vectorize, CMatrix, DensityOperator, Dims,
};
use proptest::prelude::*;

#[test]
fn six_dimensional_basis_brute_force_orthogonality() {
    let b = gell_mann_basis(6).unwrap();
    assert_eq!(b.len(), 35);
    for i in 0..35 {
        assert!(hermitian_deviation(&b.matrices()[i]) == 0.0);
        for j in 0..35 {
            // dense product, not the sparse path used by vectorize
            let t = (&b.matrices()[i] * &b.matrices()[j]).trace();
            let expected = if i == j { 2.0 } else { 0.0 };
            assert!((t.re - expected).abs() < 1e-12 && t.im.abs() < 1e-12, "({i},{j}) -> {t}");
        }
    }
}

#[test]
fn basis_ordering_convention() {
    // symmetric pairs, antisymmetric pairs, then diagonals
    let b = gell_mann_basis(3).unwrap();
    let m = b.matrices();
    assert_eq!(m[0][(0, 1)].re, 1.0);
    assert_eq!(m[1][(0, 2)].re, 1.0);
    assert_eq!(m[2][(1, 2)].re, 1.0);
    assert_eq!(m[3][(0, 1)].im, -1.0);
    assert_eq!(m[5][(2, 1)].im, 1.0);
    assert_eq!(m[6][(1, 1)].re, -1.0);
    assert!((m[7][(2, 2)].re + 2.0 / 3f64.sqrt()).abs() < 1e-15);
}

#[test]
fn random_four_dim_state_round_trip() {
    let b = gell_mann_basis(4).unwrap();
    let dims = Dims { a: 2, b: 2 };
    let rho = DensityOperator::new(dims, random_density_operator(4, 11).unwrap().into_matrix()).unwrap();
    let r = vectorize(&rho, &b).unwrap();
    assert!(r.norm() < 1.0);
    let back = devectorize(&r, &b, dims).unwrap();
    assert!((back.matrix() - rho.matrix()).norm() < 1e-10);
}

#[test]
fn ginibre_mean_is_maximally_mixed() {
    let mut mean = CMatrix::zeros(4, 4);
    let count = 10_000;
    for seed in 0..count {
        mean += random_density_operator(4, seed).unwrap().matrix();
    }
    let mean = mean.unscale(count as f64);
    let target = CMatrix::identity(4, 4).unscale(4.0);
    let worst = (mean - target).iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(worst < 0.02, "max deviation {worst}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip_and_purity_link(seed in any::<u64>(), dim in 2usize..=6) {
        let b = gell_mann_basis(dim).unwrap();
        let rho = random_density_operator(dim, seed).unwrap();
        let r = vectorize(&rho, &b).unwrap();
        let back = devectorize(&r, &b, rho.dims()).unwrap();
        prop_assert!((back.matrix() - rho.matrix()).norm() < 1e-10);
        let n = dim as f64;
        let expected = (n * rho.purity() - 1.0) / (n - 1.0);
        prop_assert!((r.norm().powi(2) - expected).abs() < 1e-10);
        prop_assert!(r.norm() <= 1.0 + 1e-9);
    }

    #[test]
    fn partial_transpose_is_trace_preserving_involution(seed in any::<u64>(), da in 2usize..=3, db in 2usize..=3) {
        let dims = Dims { a: da, b: db };
        let rho = DensityOperator::new(dims, random_density_operator(da * db, seed).unwrap().into_matrix()).unwrap();
        let pt = partial_transpose(&rho);
        prop_assert_eq!(partial_transpose_matrix(&pt, dims), rho.matrix().clone());
        prop_assert_eq!(pt.trace(), rho.matrix().trace());
        // Hermiticity is preserved entry for entry
        for i in 0..da * db {
            for j in 0..da * db {
                prop_assert_eq!(pt[(i, j)], pt[(j, i)].conj());
            }
        }
    }
}
