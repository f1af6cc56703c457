//! Distances to a fitted ellipsoid, classification and tangent-plane
//! pseudo-witnesses.
//!
//! A tangent hyperplane to the covering ellipsoid only separates states
//! relative to that ellipsoid. The ellipsoid can be a proper subset of the
//! separable set, so a [`PseudoWitness`] is not an entanglement witness in
//! general; it gives distance estimates, not certificates.

use nalgebra::DVector;

use crate::ensembles::{Label, SeparableEnsemble};
use crate::error::{Error, Result};
use crate::mvce::Ellipsoid;
use crate::state_space::{BlochVector, CMatrix, HermitianBasis, C64};

const SECULAR_TOL: f64 = 1e-12;
const SECULAR_MAX_ITER: usize = 200;

/// Nearest point of an ellipsoid and its Euclidean distance.
#[derive(Debug, Clone)]
pub struct Projection {
    pub foot: DVector<f64>,
    pub distance: f64,
    /// Lagrange multiplier of the boundary constraint; zero for interior points.
    pub multiplier: f64,
}

/// Euclidean projection onto `e`. Interior points (quadratic form `<= 1`)
/// project to themselves; otherwise the secular equation
/// `sum_i a_i y_i^2 / (1 + lambda a_i)^2 = 1` is solved for `lambda > 0` in the
/// eigenbasis of the shape matrix by Newton's method, falling back to
/// bisection whenever a step leaves the bracket.
pub fn project_to_ellipsoid(e: &Ellipsoid, r: &DVector<f64>) -> Result<Projection> {
    let q = e.quadratic_form(r)?;
    if q <= 1.0 {
        return Ok(Projection { foot: r.clone(), distance: 0.0, multiplier: 0.0 });
    }
    let eig = e.eigen();
    let a = &eig.eigenvalues;
    let y = eig.eigenvectors.tr_mul(&(r - e.center()));

    let secular = |lambda: f64| -> (f64, f64) {
        let mut f = -1.0;
        let mut df = 0.0;
        for (&ai, &yi) in a.iter().zip(y.iter()) {
            let s = 1.0 + lambda * ai;
            let t = ai * yi * yi / (s * s);
            f += t;
            df -= 2.0 * t * ai / s;
        }
        (f, df)
    };

    // f(lambda) <= sum y_i^2 / (a_i lambda^2) - 1 bounds the root from above
    let mut lo = 0.0;
    let mut hi = y.iter().zip(a.iter()).map(|(yi, ai)| yi * yi / ai).sum::<f64>().sqrt();
    let mut lambda = 0.0;
    let mut converged = false;
    let mut residual = f64::INFINITY;
    for _ in 0..SECULAR_MAX_ITER {
        let (f, df) = secular(lambda);
        residual = f.abs();
        if residual <= SECULAR_TOL {
            converged = true;
            break;
        }
        if f > 0.0 {
            lo = lambda;
        } else {
            hi = lambda;
        }
        if hi - lo <= f64::EPSILON * hi {
            converged = residual < 1e-8;
            break;
        }
        let newton = lambda - f / df;
        lambda = if newton > lo && newton < hi && df < 0.0 { newton } else { 0.5 * (lo + hi) };
    }
    if !converged {
        return Err(Error::NumericalFailure { what: "ellipsoid projection", residual });
    }

    let scaled = DVector::from_iterator(y.len(), y.iter().zip(a.iter()).map(|(yi, ai)| yi / (1.0 + lambda * ai)));
    let foot = e.center() + &eig.eigenvectors * scaled;
    let distance = (r - &foot).norm();
    Ok(Projection { foot, distance, multiplier: lambda })
}

/// Separable iff the quadratic form is at most `1 + tol`; ties go to separable.
pub fn classify(e: &Ellipsoid, r: &BlochVector, tol: f64) -> Result<Label> {
    Ok(if e.contains(r.components(), tol)? { Label::Separable } else { Label::Entangled })
}

/// Hyperplane tangent to a covering ellipsoid at the projection of a state.
///
/// On Bloch vectors it reads `normal . x - offset`, positive on the side of the
/// state it was built for and non-positive on the ellipsoid. `matrix_form` is
/// the matching operator `W`, with `Tr(W rho(x)) = (gamma alpha / N)(normal . x - offset)`.
/// Negate it to get the usual convention of witnesses that are negative on
/// entangled states.
#[derive(Debug, Clone)]
pub struct PseudoWitness {
    pub normal: DVector<f64>,
    pub offset: f64,
    pub matrix_form: CMatrix,
    pub foot: DVector<f64>,
}

impl PseudoWitness {
    pub fn evaluate(&self, x: &DVector<f64>) -> f64 {
        self.normal.dot(x) - self.offset
    }

    /// `Tr(W rho)`.
    pub fn expectation(&self, rho: &CMatrix) -> f64 {
        (&self.matrix_form * rho).trace().re
    }
}

/// Builds the tangent plane at `s0 = P(r)` with normal `A (s0 - c)`. Fails
/// with [`Error::NotExterior`] unless `r` is outside by more than the fit
/// tolerance.
pub fn tangent_witness(e: &Ellipsoid, r: &DVector<f64>, basis: &HermitianBasis) -> Result<PseudoWitness> {
    if basis.len() != e.dim() {
        return Err(Error::DimensionMismatch { expected: e.dim(), found: basis.len() });
    }
    let q = e.quadratic_form(r)?;
    if q <= 1.0 + e.fit_epsilon() {
        return Err(Error::NotExterior { quadratic_form: q });
    }
    let proj = project_to_ellipsoid(e, r)?;
    let normal = e.shape() * (&proj.foot - e.center());
    let offset = normal.dot(&proj.foot);

    let n = basis.dim() as f64;
    let c0 = -basis.gamma() * basis.alpha() / n * offset;
    let mut w = basis.combine(&normal);
    for i in 0..basis.dim() {
        w[(i, i)] += C64::new(c0, 0.0);
    }
    Ok(PseudoWitness { normal, offset, matrix_form: w, foot: proj.foot })
}

/// `(normal . r - max_x normal . x) / |normal|` over the ensemble: a lower
/// bound on the distance from `r` to the ensemble's convex hull.
pub fn witness_bound(w: &PseudoWitness, r: &BlochVector, ensemble: &SeparableEnsemble) -> Result<f64> {
    let n = w.normal.len();
    if r.components().len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: r.components().len() });
    }
    let mut best = f64::NEG_INFINITY;
    for x in &ensemble.vectors {
        if x.components().len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: x.components().len() });
        }
        best = best.max(w.normal.dot(x.components()));
    }
    if ensemble.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    Ok((w.normal.dot(r.components()) - best) / w.normal.norm())
}
