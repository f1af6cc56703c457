mod common;

use ellipsep_core::mvce::{affine_rank, fit_mvce, log_volume};
use ellipsep_core::canonical_separable_ensemble;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;

fn corners() -> Vec<DVector<f64>> {
    [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]].iter().map(|p| DVector::from_column_slice(p)).collect()
}

/// Brute force over centered 2x2 shapes `[[a, b], [b, d]]` and small center
/// shifts: the smallest covering log-volume found on the grid.
fn grid_min_log_volume(points: &[DVector<f64>]) -> f64 {
    let mut best = f64::INFINITY;
    let steps = 41;
    for ia in 0..steps {
        let a = 0.2 + 0.6 * ia as f64 / (steps - 1) as f64;
        for id in 0..steps {
            let d = 0.2 + 0.6 * id as f64 / (steps - 1) as f64;
            for ib in 0..21 {
                let b = -0.2 + 0.4 * ib as f64 / 20.0;
                let det = a * d - b * b;
                if det <= 0.0 {
                    continue;
                }
                for cx in [-0.1, 0.0, 0.1] {
                    for cy in [-0.1, 0.0, 0.1] {
                        let fits = points.iter().all(|p| {
                            let (x, y) = (p[0] - cx, p[1] - cy);
                            a * x * x + 2.0 * b * x * y + d * y * y <= 1.0 + 1e-12
                        });
                        if fits {
                            best = best.min(-0.5 * det.ln());
                        }
                    }
                }
            }
        }
    }
    best
}

#[test]
fn square_fit_is_grid_minimal() {
    let e = fit_mvce(&corners(), 1e-7).unwrap();
    let grid = grid_min_log_volume(&corners());
    // the grid contains A = I/2, c = 0 exactly, so nothing on it beats the fit
    assert!((grid - log_volume(&e)).abs() < 1e-6, "grid {grid} fit {}", log_volume(&e));
    assert!((e.shape() - DMatrix::identity(2, 2).scale(0.5)).amax() < 1e-6);
}

#[test]
fn canonical_two_qubit_fit_contains_ensemble() {
    let ens = canonical_separable_ensemble(2, 2, 1.0).unwrap();
    let e = fit_mvce(&ens.points(), 1e-7).unwrap();
    assert_eq!(e.dim(), 15);
    for p in ens.points() {
        assert!(e.contains(&p, e.fit_epsilon()).unwrap());
    }
    assert!(log_volume(&e).is_finite());
    assert!(e.meta.max_leverage <= 16.0 * (1.0 + 1e-7));
}

#[test]
fn halving_the_norm_shrinks_log_volume_by_n_log_2() {
    let full = canonical_separable_ensemble(2, 2, 1.0).unwrap();
    let half = canonical_separable_ensemble(2, 2, 0.5).unwrap();
    let a = fit_mvce(&full.points(), 1e-7).unwrap();
    let b = fit_mvce(&half.points(), 1e-7).unwrap();
    assert!((log_volume(&a) - log_volume(&b) - 15.0 * 2f64.ln()).abs() < 1e-6);
}

#[test]
fn large_canonical_ensembles_span_their_space() {
    assert_eq!(affine_rank(&canonical_separable_ensemble(2, 3, 1.0).unwrap().points()), 35);
    assert_eq!(affine_rank(&canonical_separable_ensemble(3, 3, 0.6).unwrap().points()), 80);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn affine_equivariance(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = common::rng(seed);
        let m = 3 * n + 2;
        let points: Vec<_> = (0..m).map(|_| common::gaussian_vector(&mut rng, n)).collect();
        let mut t = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        for i in 0..n {
            t[(i, i)] += 2.0;
        }
        let shift = common::gaussian_vector(&mut rng, n);
        let mapped: Vec<_> = points.iter().map(|p| &t * p + &shift).collect();

        let e = fit_mvce(&points, 1e-9).unwrap();
        let f = fit_mvce(&mapped, 1e-9).unwrap();
        let t_inv = t.clone().try_inverse().unwrap();
        let image_shape = t_inv.transpose() * e.shape() * &t_inv;
        let image_center = &t * e.center() + &shift;
        let scale = image_shape.amax();
        prop_assert!((f.shape() - image_shape).amax() / scale < 1e-4);
        prop_assert!((f.center() - &image_center).amax() < 1e-4 * (1.0 + image_center.amax()));
        // exact volume relation of the image ellipsoid
        let det_t = t.determinant().abs();
        prop_assert!((log_volume(&f) - log_volume(&e) - det_t.ln()).abs() < 1e-5);
    }

    #[test]
    fn adding_a_point_never_shrinks(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = common::rng(seed);
        let mut points: Vec<_> = (0..2 * n + 2).map(|_| common::gaussian_vector(&mut rng, n)).collect();
        let before = log_volume(&fit_mvce(&points, 1e-8).unwrap());
        points.push(common::gaussian_vector(&mut rng, n).scale(1.5));
        let after = log_volume(&fit_mvce(&points, 1e-8).unwrap());
        // both fits are within (1 + eps) of optimal in leverage terms
        prop_assert!(after >= before - 1e-6);
    }

    #[test]
    fn containment_and_certificate(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = common::rng(seed);
        let points: Vec<_> = (0..2 * n + 3).map(|_| common::gaussian_vector(&mut rng, n)).collect();
        let e = fit_mvce(&points, 1e-7).unwrap();
        prop_assert!(e.meta.max_leverage <= (n + 1) as f64 * (1.0 + 1e-7));
        for p in &points {
            prop_assert!(e.quadratic_form(p).unwrap() <= 1.0 + 1e-12);
        }
    }
}
