//! Independent numerical oracles used by the integration tests. None of
//! these go through the solvers they check.
#![allow(dead_code)]

use ellipsep_core::mvce::{Ellipsoid, EllipsoidMeta};
use ellipsep_core::ppt_oracle::simplex_projection;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Random orthogonal matrix from the QR factor of a Gaussian matrix.
pub fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    g.qr().q()
}

/// Ellipsoid with semi-axis eigenvalues of the shape matrix in `[lo, hi]`.
pub fn random_ellipsoid(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Ellipsoid {
    let q = random_orthogonal(rng, n);
    let d = DVector::from_fn(n, |_, _| rng.random_range(lo..hi));
    let a = &q * DMatrix::from_diagonal(&d) * q.transpose();
    let a = (&a + a.transpose()).scale(0.5);
    let c = gaussian_vector(rng, n).scale(0.3);
    Ellipsoid::new(a, c, 0.0, EllipsoidMeta::default()).unwrap()
}

/// Point with quadratic form in `[q_lo, q_hi]`.
pub fn exterior_point(rng: &mut ChaCha8Rng, e: &Ellipsoid, q_lo: f64, q_hi: f64) -> DVector<f64> {
    let dir = gaussian_vector(rng, e.dim());
    let q1 = dir.dot(&(e.shape() * &dir));
    let target: f64 = rng.random_range(q_lo..q_hi);
    e.center() + dir.scale((target / q1).sqrt())
}

/// Accelerated projected gradient for `min |r - s|` over the ellipsoid, in
/// whitened coordinates `s = c + L^{-T} u` with `|u| <= 1` and `A = L L^T`.
/// Returns the minimizing `s`.
pub fn projected_gradient_projection(e: &Ellipsoid, r: &DVector<f64>) -> DVector<f64> {
    let chol = e.shape().clone().cholesky().unwrap();
    let l = chol.l();
    let l_inv = l.clone().try_inverse().unwrap();
    let map = l_inv.transpose(); // s - c = map * u
    let gram = map.transpose() * &map;
    let lipschitz = 2.0 * gram.symmetric_eigenvalues().max();
    let b = r - e.center();
    let grad = |u: &DVector<f64>| (map.transpose() * (&map * u - &b)).scale(2.0);
    let ball = |u: DVector<f64>| {
        let n = u.norm();
        if n > 1.0 { u.unscale(n) } else { u }
    };
    let mut u = ball(map.clone().try_inverse().unwrap() * &b);
    let mut y = u.clone();
    let mut t = 1.0f64;
    for _ in 0..200_000 {
        let next = ball(&y - grad(&y).unscale(lipschitz));
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let moved = (&next - &u).norm();
        y = &next + (&next - &u).scale((t - 1.0) / t_next);
        u = next;
        t = t_next;
        if moved < 1e-15 {
            break;
        }
    }
    e.center() + map * u
}

/// Distance from `r` to the convex hull of `points`, by accelerated projected
/// gradient over the simplex of combination weights.
pub fn hull_distance(points: &[DVector<f64>], r: &DVector<f64>) -> f64 {
    let m = points.len();
    let n = r.len();
    let x = DMatrix::from_fn(n, m, |i, j| points[j][i]);
    let lipschitz = 2.0 * (x.transpose() * &x).symmetric_eigenvalues().max().max(1e-12);
    let grad = |w: &DVector<f64>| (x.transpose() * (&x * w - r)).scale(2.0);
    let mut w = DVector::from_element(m, 1.0 / m as f64);
    let mut y = w.clone();
    let mut t = 1.0f64;
    let mut best = (&x * &w - r).norm();
    for _ in 0..100_000 {
        let next = simplex_projection(&(&y - grad(&y).unscale(lipschitz)));
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let moved = (&next - &w).norm();
        y = &next + (&next - &w).scale((t - 1.0) / t_next);
        w = next;
        t = t_next;
        best = best.min((&x * &w - r).norm());
        if moved < 1e-14 {
            break;
        }
    }
    best
}
