//! Minimum-volume covering ellipsoids
//!
//! The ellipsoid `{x : (x - c)^T A (x - c) <= 1}` of least volume containing a
//! point set is found from its dual: lift every point to `q = (p, 1)` and
//! maximize `log det M(u)` with `M(u) = sum_i u_i q_i q_i^T` over the simplex.
//! The solver is a barycentric coordinate ascent (Khachiyan's step) with
//! Wolfe-Atwood away steps; it stops once the largest leverage
//! `g_i = q_i^T M(u)^{-1} q_i` is at most `(n + 1)(1 + eps)`.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub const DEFAULT_EPSILON: f64 = 1e-7;
pub const DEFAULT_MAX_ITER: usize = 1_000_000;
/// Ridge added to the lifted moment matrix when regularization is requested.
pub const DEFAULT_RIDGE: f64 = 1e-8;

// Leverages are refreshed from a fresh inverse at this period to stop
// rank-one update drift.
const REFRESH_PERIOD: usize = 500;
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub epsilon: f64,
    pub max_iter: usize,
    /// `Some(lambda)` adds `lambda I` to the moment matrix.
    pub ridge: Option<f64>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { epsilon: DEFAULT_EPSILON, max_iter: DEFAULT_MAX_ITER, ridge: None }
    }
}

/// Provenance carried with a fitted model.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EllipsoidMeta {
    pub dim_a: Option<usize>,
    pub dim_b: Option<usize>,
    pub target_norm: Option<f64>,
    pub basis_tag: Option<String>,
    pub solver_iterations: usize,
    /// Largest lifted leverage at termination; the optimality certificate.
    pub max_leverage: f64,
    pub ridge: Option<f64>,
}

/// `{x : (x - center)^T shape (x - center) <= 1}`.
#[derive(Debug, Clone)]
pub struct Ellipsoid {
    shape: DMatrix<f64>,
    center: DVector<f64>,
    fit_epsilon: f64,
    pub meta: EllipsoidMeta,
    eigen: OnceLock<SymmetricEigen<f64, nalgebra::Dyn>>,
}

impl Ellipsoid {
    /// Validates that `shape` is square, symmetric to 1e-10 and positive definite.
    pub fn new(shape: DMatrix<f64>, center: DVector<f64>, fit_epsilon: f64, meta: EllipsoidMeta) -> Result<Self> {
        let n = center.len();
        if n == 0 {
            return Err(Error::InvalidDimension { dim: 0, reason: "ellipsoid dimension must be positive" });
        }
        if shape.nrows() != n || shape.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: shape.nrows() });
        }
        let asym = (&shape - shape.transpose()).amax();
        if asym > 1e-10 {
            return Err(Error::InvalidParameter(format!("shape matrix is not symmetric ({asym:e})")));
        }
        if fit_epsilon.is_nan() || fit_epsilon < 0.0 {
            return Err(Error::InvalidParameter(format!("fit epsilon must be non-negative, got {fit_epsilon}")));
        }
        let e = Self { shape, center, fit_epsilon, meta, eigen: OnceLock::new() };
        let min = e.eigen().eigenvalues.min();
        if min.is_nan() || min <= 0.0 {
            return Err(Error::InvalidParameter(format!("shape matrix is not positive definite (min eigenvalue {min:e})")));
        }
        Ok(e)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    /// Certified gap of the fit; also the default membership tolerance.
    pub fn fit_epsilon(&self) -> f64 {
        self.fit_epsilon
    }

    /// Eigendecomposition of the shape matrix, computed once.
    pub fn eigen(&self) -> &SymmetricEigen<f64, nalgebra::Dyn> {
        self.eigen.get_or_init(|| {
            // symmetrize before decomposing so the eigenvectors are orthonormal
            let sym = (&self.shape + self.shape.transpose()).scale(0.5);
            SymmetricEigen::new(sym)
        })
    }

    fn check_dim(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        Ok(())
    }

    /// `(x - c)^T A (x - c)`.
    pub fn quadratic_form(&self, x: &DVector<f64>) -> Result<f64> {
        self.check_dim(x)?;
        let y = x - &self.center;
        Ok(y.dot(&(&self.shape * &y)))
    }

    /// True iff the quadratic form at `x` is at most `1 + tol`.
    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> Result<bool> {
        Ok(self.quadratic_form(x)? <= 1.0 + tol)
    }
}

/// Membership `(x - c)^T A (x - c) <= 1 + tol`.
pub fn contains(e: &Ellipsoid, x: &DVector<f64>, tol: f64) -> Result<bool> {
    e.contains(x, tol)
}

/// `-1/2 log det A`, the log-volume up to the unit-ball constant.
pub fn log_volume(e: &Ellipsoid) -> f64 {
    -0.5 * e.eigen().eigenvalues.iter().map(|v| v.ln()).sum::<f64>()
}

/// Fits with [`FitOptions::default`] apart from `epsilon`.
pub fn fit_mvce(points: &[DVector<f64>], epsilon: f64) -> Result<Ellipsoid> {
    fit_mvce_with(points, &FitOptions { epsilon, ..FitOptions::default() })
}

pub fn fit_mvce_with(points: &[DVector<f64>], opts: &FitOptions) -> Result<Ellipsoid> {
    if opts.epsilon.is_nan() || opts.epsilon <= 0.0 {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {}", opts.epsilon)));
    }
    let first = points.first().ok_or(Error::EmptyEnsemble)?;
    let n = first.len();
    if n == 0 {
        return Err(Error::InvalidDimension { dim: 0, reason: "points must have positive dimension" });
    }
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: p.len() });
    }
    let m = points.len();
    let d = n + 1;

    let ridge = opts.ridge.filter(|&l| l > 0.0);
    if ridge.is_none() {
        let rank = affine_rank(points);
        if rank < n {
            return Err(Error::Degenerate { rank, dim: n });
        }
    }

    // rows are lifted points
    let lifted = DMatrix::from_fn(m, d, |i, j| if j < n { points[i][j] } else { 1.0 });
    let mut weights = DVector::from_element(m, 1.0 / m as f64);
    let bound = d as f64 * (1.0 + opts.epsilon);

    let refresh = |w: &DVector<f64>| -> Result<(DMatrix<f64>, DVector<f64>)> {
        let inv = moment_inverse(&lifted, w, ridge)?;
        let lev = leverages(&lifted, &inv);
        Ok((inv, lev))
    };
    let (mut inv, mut lev) = refresh(&weights)?;
    let mut iterations = 0;
    loop {
        let (j_max, g_max) = argmax(&lev);
        if g_max <= bound {
            // confirm against a fresh inverse before accepting
            let fresh = refresh(&weights)?;
            inv = fresh.0;
            lev = fresh.1;
            if argmax(&lev).1 <= bound {
                break;
            }
            continue;
        }
        if iterations >= opts.max_iter {
            return Err(Error::NumericalFailure { what: "minimum-volume ellipsoid fit", residual: g_max / d as f64 - 1.0 });
        }
        iterations += 1;

        let (j_min, g_min) = lev
            .iter()
            .enumerate()
            .filter(|(i, _)| weights[*i] > 0.0)
            .map(|(i, &g)| (i, g))
            .fold((j_max, g_max), |best, cur| if cur.1 < best.1 { cur } else { best });
        let (j, g) = if g_max - d as f64 >= d as f64 - g_min { (j_max, g_max) } else { (j_min, g_min) };

        let mut step = (g - d as f64) / (d as f64 * (g - 1.0));
        if step < 0.0 {
            let uj = weights[j];
            step = step.max(-uj / (1.0 - uj));
        }
        if step == 0.0 || !step.is_finite() {
            // nothing to gain from this coordinate; refresh and retry
            let fresh = refresh(&weights)?;
            inv = fresh.0;
            lev = fresh.1;
            continue;
        }

        // rank-one update of M^{-1} and all leverages for u <- (1 - s) u + s e_j
        let qj = lifted.row(j).transpose();
        let w = &inv * &qj;
        let denom = 1.0 - step + step * g;
        let cross = &lifted * &w;
        let keep = 1.0 - step;
        inv = (inv - (&w * w.transpose()).scale(step / denom)).unscale(keep);
        for (li, ci) in lev.iter_mut().zip(cross.iter()) {
            *li = (*li - step * ci * ci / denom) / keep;
        }
        weights.scale_mut(keep);
        weights[j] += step;
        if weights[j] < 1e-300 {
            weights[j] = 0.0;
        }

        if iterations % REFRESH_PERIOD == 0 {
            let fresh = refresh(&weights)?;
            inv = fresh.0;
            lev = fresh.1;
        }
    }

    let max_leverage = argmax(&lev).1;
    let (shape, center) = recover(points, &weights, ridge)?;
    let mut shape = shape;
    // scale so every input point is inside with no tolerance at all
    let worst = points
        .iter()
        .map(|p| {
            let y = p - &center;
            y.dot(&(&shape * &y))
        })
        .fold(0.0f64, f64::max);
    if worst > 1.0 {
        shape.unscale_mut(worst);
    }
    shape = (&shape + shape.transpose()).scale(0.5);

    let meta = EllipsoidMeta {
        solver_iterations: iterations,
        max_leverage,
        ridge,
        ..EllipsoidMeta::default()
    };
    let fit_epsilon = opts.epsilon * d as f64 / n as f64;
    Ellipsoid::new(shape, center, fit_epsilon, meta)
}

fn argmax(v: &DVector<f64>) -> (usize, f64) {
    v.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &x)| if x > best.1 { (i, x) } else { best })
}

fn moment_inverse(lifted: &DMatrix<f64>, weights: &DVector<f64>, ridge: Option<f64>) -> Result<DMatrix<f64>> {
    let d = lifted.ncols();
    let mut scaled = lifted.clone();
    for (mut row, &w) in scaled.row_iter_mut().zip(weights.iter()) {
        row.scale_mut(w);
    }
    let mut moment = lifted.transpose() * scaled;
    if let Some(l) = ridge {
        for i in 0..d {
            moment[(i, i)] += l;
        }
    }
    let chol = moment.cholesky().ok_or(Error::NumericalFailure {
        what: "moment matrix factorization",
        residual: f64::NAN,
    })?;
    Ok(chol.inverse())
}

fn leverages(lifted: &DMatrix<f64>, inv: &DMatrix<f64>) -> DVector<f64> {
    let proj = lifted * inv;
    DVector::from_iterator(lifted.nrows(), proj.row_iter().zip(lifted.row_iter()).map(|(a, b)| a.dot(&b)))
}

/// Center `c = sum u_i p_i` and `A = (sum u_i p_i p_i^T - c c^T)^{-1} / n`.
fn recover(points: &[DVector<f64>], weights: &DVector<f64>, ridge: Option<f64>) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let n = points[0].len();
    let mut center = DVector::zeros(n);
    let mut scatter = DMatrix::zeros(n, n);
    for (p, &w) in points.iter().zip(weights.iter()) {
        if w == 0.0 {
            continue;
        }
        center.axpy(w, p, 1.0);
        scatter.ger(w, p, p, 1.0);
    }
    scatter.ger(-1.0, &center, &center, 1.0);
    if let Some(l) = ridge {
        for i in 0..n {
            scatter[(i, i)] += l;
        }
    }
    let scatter = (&scatter + scatter.transpose()).scale(0.5);
    let chol = scatter.cholesky().ok_or(Error::NumericalFailure {
        what: "weighted scatter factorization",
        residual: f64::NAN,
    })?;
    Ok((chol.inverse().unscale(n as f64), center))
}

/// Dimension of the affine hull of `points`.
pub fn affine_rank(points: &[DVector<f64>]) -> usize {
    let n = points[0].len();
    if points.len() < 2 {
        return 0;
    }
    let mean = points.iter().fold(DVector::zeros(n), |acc, p| acc + p) / points.len() as f64;
    let mut scatter = DMatrix::zeros(n, n);
    for p in points {
        let y = p - &mean;
        scatter.ger(1.0, &y, &y, 1.0);
    }
    let ev = SymmetricEigen::new(scatter).eigenvalues;
    let top = ev.max().max(f64::MIN_POSITIVE);
    ev.iter().filter(|&&v| v > RANK_TOL * top).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(raw: &[&[f64]]) -> Vec<DVector<f64>> {
        raw.iter().map(|p| DVector::from_column_slice(p)).collect()
    }

    fn cross_polytope(n: usize) -> Vec<DVector<f64>> {
        let mut out = Vec::new();
        for i in 0..n {
            for s in [1.0, -1.0] {
                let mut v = DVector::zeros(n);
                v[i] = s;
                out.push(v);
            }
        }
        out
    }

    #[test]
    fn square_corners_give_circumscribed_circle() {
        let e = fit_mvce(&pts(&[&[1., 1.], &[1., -1.], &[-1., 1.], &[-1., -1.]]), 1e-7).unwrap();
        assert!((e.shape() - DMatrix::identity(2, 2).scale(0.5)).amax() < 1e-6);
        assert!(e.center().amax() < 1e-6);
    }

    #[test]
    fn cross_polytope_gives_unit_ball() {
        for n in [1, 3, 6] {
            let e = fit_mvce(&cross_polytope(n), 1e-7).unwrap();
            assert!((e.shape() - DMatrix::identity(n, n)).amax() < 1e-6);
            assert!(e.center().amax() < 1e-9);
        }
    }

    #[test]
    fn asymmetric_triangle_contains_all_points() {
        let p = pts(&[&[0., 0.], &[4., 0.], &[0., 1.], &[1., 0.2]]);
        let e = fit_mvce(&p, 1e-7).unwrap();
        for x in &p {
            assert!(e.contains(x, 0.0).unwrap());
        }
        assert!(e.meta.max_leverage <= 3.0 * (1.0 + 1e-7));
        // triangle MVCE is centered at the centroid
        assert!((e.center() - DVector::from_vec(vec![4.0 / 3.0, 1.0 / 3.0])).amax() < 1e-5);
    }

    #[test]
    fn degenerate_input_reports_rank() {
        let p = pts(&[&[0., 0., 0.], &[1., 1., 0.], &[2., 2., 0.], &[1., 0., 0.]]);
        match fit_mvce(&p, 1e-7) {
            Err(Error::Degenerate { rank, dim }) => assert_eq!((rank, dim), (2, 3)),
            other => panic!("expected degenerate error, got {other:?}"),
        }
        let e = fit_mvce_with(&p, &FitOptions { ridge: Some(DEFAULT_RIDGE), ..FitOptions::default() }).unwrap();
        assert_eq!(e.meta.ridge, Some(DEFAULT_RIDGE));
        for x in &p {
            assert!(e.contains(x, 0.0).unwrap());
        }
    }

    #[test]
    fn input_validation() {
        assert!(matches!(fit_mvce(&[], 1e-7), Err(Error::EmptyEnsemble)));
        assert!(fit_mvce(&cross_polytope(2), 0.0).is_err());
        let mut p = cross_polytope(2);
        p.push(DVector::zeros(3));
        assert!(matches!(fit_mvce(&p, 1e-7), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn contains_center_and_rejects_far_point() {
        let e = Ellipsoid::new(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.25])), DVector::from_vec(vec![1.0, -1.0]), 0.0, EllipsoidMeta::default()).unwrap();
        assert!(contains(&e, e.center(), 0.0).unwrap());
        // v^T A v = 4
        assert!(!contains(&e, &DVector::from_vec(vec![3.0, -1.0]), 1e-9).unwrap());
        assert!(contains(&e, &DVector::from_vec(vec![1.0, 1.0]), 0.0).unwrap());
        assert!(contains(&e, &DVector::zeros(3), 0.0).is_err());
    }

    #[test]
    fn log_volume_examples() {
        let unit = Ellipsoid::new(DMatrix::identity(4, 4), DVector::zeros(4), 0.0, EllipsoidMeta::default()).unwrap();
        assert!(log_volume(&unit).abs() < 1e-15);
        let big = Ellipsoid::new(DMatrix::identity(4, 4).scale(0.25), DVector::zeros(4), 0.0, EllipsoidMeta::default()).unwrap();
        assert!((log_volume(&big) - 4.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn rejects_invalid_shape() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(Ellipsoid::new(m, DVector::zeros(2), 0.0, EllipsoidMeta::default()).is_err());
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(Ellipsoid::new(m, DVector::zeros(2), 0.0, EllipsoidMeta::default()).is_err());
    }
}
