//! Experiment drivers: confusion counts against the PPT ground truth,
//! bound-entanglement scans over the Horodecki family, and distance
//! comparisons between the ellipsoid and the exact PPT projection.
//!
//! Every driver is deterministic for a given seed. Per-sample work runs on the
//! rayon pool and is reduced in input order.

use std::path::Path;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{canonical_separable_ensemble, horodecki_parameters, horodecki_state, sample_labeled_states, Label};
use crate::error::{Error, Result};
use crate::geometry::project_to_ellipsoid;
use crate::mvce::{fit_mvce, log_volume, Ellipsoid};
use crate::ppt_oracle::{self, hs_distance_true};
use crate::state_space::{gell_mann_basis, vectorize, Dims, BASIS_TAG};

/// Norm grid 0.1, 0.2, ..., 1.0.
pub fn default_norms() -> Vec<f64> {
    (1..=10).map(|k| k as f64 / 10.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionRow {
    pub target_norm: f64,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub sample_size: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub target_norm: f64,
    pub dim: usize,
    pub ensemble_size: usize,
    pub solver_iterations: usize,
    pub max_leverage: f64,
    pub log_volume: f64,
}

impl FitSummary {
    pub fn from_ellipsoid(e: &Ellipsoid, ensemble_size: usize) -> Self {
        Self {
            target_norm: e.meta.target_norm.unwrap_or(f64::NAN),
            dim: e.dim(),
            ensemble_size,
            solver_iterations: e.meta.solver_iterations,
            max_leverage: e.meta.max_leverage,
            log_volume: log_volume(e),
        }
    }

    /// Whether the stopping rule `max leverage <= (n + 1)(1 + epsilon)` holds.
    pub fn certified(&self, epsilon: f64) -> bool {
        self.max_leverage <= (self.dim + 1) as f64 * (1.0 + epsilon)
    }
}

/// Fits the covering ellipsoid of the canonical ensemble and records its provenance.
pub fn fit_canonical(dims: Dims, target_norm: f64, epsilon: f64) -> Result<(Ellipsoid, usize)> {
    let ensemble = canonical_separable_ensemble(dims.a, dims.b, target_norm)?;
    let mut e = fit_mvce(&ensemble.points(), epsilon)?;
    e.meta.dim_a = Some(dims.a);
    e.meta.dim_b = Some(dims.b);
    e.meta.target_norm = Some(target_norm);
    e.meta.basis_tag = Some(BASIS_TAG.to_string());
    Ok((e, ensemble.len()))
}

fn check_norms(norms: &[f64]) -> Result<()> {
    match norms.iter().find(|&&n| !(n > 0.0 && n <= 1.0)) {
        Some(n) => Err(Error::InvalidParameter(format!("norm {n} outside (0, 1]"))),
        None => Ok(()),
    }
}

#[derive(Debug, Clone)]
pub struct ConfusionTable {
    pub rows: Vec<ConfusionRow>,
    pub fits: Vec<FitSummary>,
}

/// One fixed labeled sample, classified against the ellipsoid fitted at
/// each norm. A false positive is a separable state outside the ellipsoid;
/// a false negative is an entangled state inside it.
pub fn run_confusion_experiment(
    dim_a: usize,
    dim_b: usize,
    samples_per_class: usize,
    norms: &[f64],
    seed: u64,
    epsilon: f64,
) -> Result<ConfusionTable> {
    if !matches!((dim_a, dim_b), (2, 2) | (2, 3)) {
        return Err(Error::UnsupportedLabeling { dim_a, dim_b });
    }
    check_norms(norms)?;
    let dims = Dims::new(dim_a, dim_b)?;
    let samples = sample_labeled_states(dim_a, dim_b, samples_per_class, samples_per_class, seed)?;
    let mut rows = Vec::with_capacity(norms.len());
    let mut fits = Vec::with_capacity(norms.len());
    for &norm in norms {
        let (e, size) = fit_canonical(dims, norm, epsilon)?;
        let tol = e.fit_epsilon();
        let predicted: Vec<bool> = samples
            .par_iter()
            .map(|s| e.contains(s.vector.components(), tol))
            .collect::<Result<_>>()?;
        let (mut fp, mut fneg) = (0, 0);
        for (s, inside) in samples.iter().zip(predicted) {
            match (s.label, inside) {
                (Label::Separable, false) => fp += 1,
                (Label::Entangled, true) => fneg += 1,
                _ => {}
            }
        }
        rows.push(ConfusionRow {
            target_norm: norm,
            false_positives: fp,
            false_negatives: fneg,
            sample_size: samples_per_class,
            seed,
        });
        fits.push(FitSummary::from_ellipsoid(&e, size));
    }
    Ok(ConfusionTable { rows, fits })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeDetectionRow {
    pub target_norm: f64,
    pub detected_count: usize,
}

#[derive(Debug, Clone)]
pub struct BeDetectionTable {
    pub rows: Vec<BeDetectionRow>,
    pub fits: Vec<FitSummary>,
}

fn horodecki_vectors(a_count: usize) -> Result<Vec<(f64, DVector<f64>)>> {
    if a_count == 0 {
        return Err(Error::InvalidParameter("need at least one Horodecki state".into()));
    }
    let basis = gell_mann_basis(9)?;
    horodecki_parameters(a_count)
        .into_par_iter()
        .map(|a| Ok((a, vectorize(&horodecki_state(a)?, &basis)?.into_components())))
        .collect()
}

/// Counts Horodecki states strictly outside the 3x3 covering ellipsoid at each norm.
pub fn run_be_detection(norms: &[f64], a_count: usize, epsilon: f64) -> Result<BeDetectionTable> {
    check_norms(norms)?;
    let states = horodecki_vectors(a_count)?;
    let dims = Dims { a: 3, b: 3 };
    let mut rows = Vec::with_capacity(norms.len());
    let mut fits = Vec::with_capacity(norms.len());
    for &norm in norms {
        let (e, size) = fit_canonical(dims, norm, epsilon)?;
        let tol = e.fit_epsilon();
        let outside: Vec<bool> = states
            .par_iter()
            .map(|(_, v)| Ok(!e.contains(v, tol)?))
            .collect::<Result<_>>()?;
        rows.push(BeDetectionRow { target_norm: norm, detected_count: outside.iter().filter(|&&o| o).count() });
        fits.push(FitSummary::from_ellipsoid(&e, size));
    }
    Ok(BeDetectionTable { rows, fits })
}

/// Distances in Frobenius (Hilbert-Schmidt) units: `true_distance` to the
/// PPT set, `mvce_distance` to the ellipsoid mapped back to operators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceRow {
    pub sample_id: usize,
    pub true_distance: f64,
    pub mvce_distance: f64,
}

pub fn run_distance_comparison(
    dim_a: usize,
    dim_b: usize,
    count: usize,
    norm: f64,
    seed: u64,
    epsilon: f64,
) -> Result<Vec<DistanceRow>> {
    if (dim_a, dim_b) != (2, 2) {
        return Err(Error::UnsupportedLabeling { dim_a, dim_b });
    }
    check_norms(&[norm])?;
    let dims = Dims::new(dim_a, dim_b)?;
    let samples = sample_labeled_states(dim_a, dim_b, 0, count, seed)?;
    let (e, _) = fit_canonical(dims, norm, epsilon)?;
    let scale = gell_mann_basis(dims.total())?.frobenius_scale();
    samples
        .par_iter()
        .enumerate()
        .map(|(sample_id, s)| {
            let truth = hs_distance_true(&s.rho, ppt_oracle::DEFAULT_TOL, ppt_oracle::DEFAULT_MAX_ITER)?;
            let proj = project_to_ellipsoid(&e, s.vector.components())?;
            Ok(DistanceRow { sample_id, true_distance: truth.distance, mvce_distance: scale * proj.distance })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeCurveRow {
    pub a: f64,
    pub rho_vector_norm: f64,
    pub mvce_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone)]
pub struct BeCurve {
    pub rows: Vec<BeCurveRow>,
    pub fit: LinearFit,
    pub ellipsoid: FitSummary,
}

/// Bloch norm and ellipsoid distance (Frobenius units) of each Horodecki
/// state, with a least-squares line through `(norm, distance)`.
pub fn run_be_norm_distance(norm: f64, a_count: usize, epsilon: f64) -> Result<BeCurve> {
    check_norms(&[norm])?;
    let states = horodecki_vectors(a_count)?;
    let (e, size) = fit_canonical(Dims { a: 3, b: 3 }, norm, epsilon)?;
    let scale = gell_mann_basis(9)?.frobenius_scale();
    let rows: Vec<BeCurveRow> = states
        .par_iter()
        .map(|(a, v)| {
            let proj = project_to_ellipsoid(&e, v)?;
            Ok(BeCurveRow { a: *a, rho_vector_norm: v.norm(), mvce_distance: scale * proj.distance })
        })
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.rho_vector_norm).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.mvce_distance).collect();
    Ok(BeCurve { fit: linear_fit(&xs, &ys), rows, ellipsoid: FitSummary::from_ellipsoid(&e, size) })
}

/// Ordinary least squares `y = slope x + intercept` with its coefficient of
/// determination.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let r_squared = if sxx > 0.0 && syy > 0.0 { sxy * sxy / (sxx * syy) } else { 0.0 };
    LinearFit { slope, intercept, r_squared }
}

/// Run metadata written next to each CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub experiment: String,
    pub version: String,
    pub seed: Option<u64>,
    pub dims: String,
    pub norms: Vec<f64>,
    pub count: usize,
    pub mvce_epsilon: f64,
    pub ppt_tol: f64,
    pub dykstra_max_iter: usize,
    pub basis_tag: String,
    pub fits: Vec<FitSummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub linear_fit: Option<LinearFit>,
}

impl RunManifest {
    pub fn new(experiment: &str, dims: Dims, seed: Option<u64>, norms: Vec<f64>, count: usize, epsilon: f64) -> Self {
        Self {
            experiment: experiment.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            dims: dims.to_string(),
            norms,
            count,
            mvce_epsilon: epsilon,
            ppt_tol: ppt_oracle::DEFAULT_TOL,
            dykstra_max_iter: ppt_oracle::DEFAULT_MAX_ITER,
            basis_tag: BASIS_TAG.to_string(),
            fits: Vec::new(),
            linear_fit: None,
        }
    }
}

/// Writes rows as UTF-8 CSV with a header row of field names.
pub fn write_csv<T: Serialize>(path: impl AsRef<Path>, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
