//! Exact reference answers: the PPT test and the Frobenius distance to the
//! set of PPT states, which equals the Hilbert-Schmidt distance to the
//! separable set for 2x2 and 2x3 systems.

use nalgebra::{DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::state_space::{min_eigenvalue, partial_transpose_matrix, CMatrix, DensityOperator, Dims};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 20_000;

/// True iff the partial transpose over subsystem A has no eigenvalue below `-tol`.
pub fn ppt_separable(rho: &DensityOperator, tol: f64) -> bool {
    min_eigenvalue(&partial_transpose_matrix(rho.matrix(), rho.dims())) >= -tol
}

#[derive(Debug, Clone)]
pub struct HsProjection {
    pub distance: f64,
    pub sigma: DensityOperator,
    pub iterations: usize,
    /// Frobenius change of the iterate at each sweep.
    pub residuals: Vec<f64>,
}

/// Projects `rho` onto `{sigma >= 0, Tr sigma = 1, sigma^{T_A} >= 0}` with
/// Dykstra's algorithm, alternating between the density-operator set and the
/// PPT cone. Stops when the iterate moves less than `tol` and the two
/// half-steps agree to `tol`.
pub fn hs_distance_true(rho: &DensityOperator, tol: f64, max_iter: usize) -> Result<HsProjection> {
    let dims = rho.dims();
    let target = rho.matrix();
    if ppt_separable(rho, tol) && rho.min_eigenvalue() >= -tol {
        return Ok(HsProjection { distance: 0.0, sigma: rho.clone(), iterations: 0, residuals: Vec::new() });
    }
    let n = target.nrows();
    let mut x = target.clone();
    let mut p = CMatrix::zeros(n, n);
    let mut q = CMatrix::zeros(n, n);
    let mut residuals = Vec::new();
    let mut last = f64::INFINITY;
    for it in 1..=max_iter {
        let y = project_density(&(&x + &p));
        p = &x + &p - &y;
        let next = project_ppt(&(&y + &q), dims);
        q = &y + &q - &next;
        let step = (&next - &x).norm();
        let gap = (&next - &y).norm();
        residuals.push(step);
        x = next;
        last = step.max(gap);
        if step < tol && gap < tol {
            // y is exactly a density operator; keep it as the returned state
            let sigma = DensityOperator::from_parts_unchecked(dims, hermitize(y));
            let distance = (target - sigma.matrix()).norm();
            return Ok(HsProjection { distance, sigma, iterations: it, residuals });
        }
    }
    Err(Error::NumericalFailure { what: "Dykstra projection onto PPT states", residual: last })
}

/// Nearest density operator in Frobenius norm: eigenvalues projected onto
/// the probability simplex.
pub fn project_density(m: &CMatrix) -> CMatrix {
    let eig = SymmetricEigen::new(hermitize(m.clone()));
    let values = simplex_projection(&eig.eigenvalues);
    recompose(&eig.eigenvectors, &values)
}

/// Nearest matrix with positive semidefinite partial transpose.
pub fn project_ppt(m: &CMatrix, dims: Dims) -> CMatrix {
    let pt = hermitize(partial_transpose_matrix(m, dims));
    let eig = SymmetricEigen::new(pt);
    let clipped = eig.eigenvalues.map(|v| v.max(0.0));
    partial_transpose_matrix(&recompose(&eig.eigenvectors, &clipped), dims)
}

/// Euclidean projection of `v` onto `{x >= 0, sum x = 1}` (sort and threshold).
pub fn simplex_projection(v: &DVector<f64>) -> DVector<f64> {
    let mut sorted: Vec<f64> = v.iter().copied().collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &s) in sorted.iter().enumerate() {
        cumulative += s;
        let t = (cumulative - 1.0) / (k + 1) as f64;
        if s - t > 0.0 {
            theta = t;
        }
    }
    v.map(|x| (x - theta).max(0.0))
}

fn recompose(vectors: &CMatrix, values: &DVector<f64>) -> CMatrix {
    let mut scaled = vectors.clone();
    for (mut col, &v) in scaled.column_iter_mut().zip(values.iter()) {
        col.scale_mut(v);
    }
    hermitize(scaled * vectors.adjoint())
}

fn hermitize(m: CMatrix) -> CMatrix {
    let adj = m.adjoint();
    (m + adj).map(|z| z * 0.5)
}
