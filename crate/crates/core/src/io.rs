//! JSON wire formats for models, states and witnesses.
//!
//! Matrices are row-major. Complex matrices interleave real and imaginary
//! parts: `[re(0,0), im(0,0), re(0,1), im(0,1), ...]`.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PseudoWitness;
use crate::mvce::{Ellipsoid, EllipsoidMeta};
use crate::state_space::{CMatrix, DensityOperator, Dims, C64};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EllipsoidMetaFile {
    pub dim_a: Option<usize>,
    pub dim_b: Option<usize>,
    pub target_norm: Option<f64>,
    pub basis_tag: Option<String>,
    pub solver_iterations: usize,
    #[serde(default)]
    pub max_leverage: Option<f64>,
    #[serde(default)]
    pub ridge: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EllipsoidFile {
    pub dim: usize,
    pub shape: Vec<f64>,
    pub center: Vec<f64>,
    pub fit_epsilon: f64,
    pub meta: EllipsoidMetaFile,
}

impl From<&Ellipsoid> for EllipsoidFile {
    fn from(e: &Ellipsoid) -> Self {
        let n = e.dim();
        let shape = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| e.shape()[(i, j)]).collect();
        Self {
            dim: n,
            shape,
            center: e.center().iter().copied().collect(),
            fit_epsilon: e.fit_epsilon(),
            meta: EllipsoidMetaFile {
                dim_a: e.meta.dim_a,
                dim_b: e.meta.dim_b,
                target_norm: e.meta.target_norm,
                basis_tag: e.meta.basis_tag.clone(),
                solver_iterations: e.meta.solver_iterations,
                max_leverage: Some(e.meta.max_leverage),
                ridge: e.meta.ridge,
            },
        }
    }
}

impl TryFrom<EllipsoidFile> for Ellipsoid {
    type Error = Error;

    fn try_from(f: EllipsoidFile) -> Result<Self> {
        if f.shape.len() != f.dim * f.dim {
            return Err(Error::DimensionMismatch { expected: f.dim * f.dim, found: f.shape.len() });
        }
        if f.center.len() != f.dim {
            return Err(Error::DimensionMismatch { expected: f.dim, found: f.center.len() });
        }
        let meta = EllipsoidMeta {
            dim_a: f.meta.dim_a,
            dim_b: f.meta.dim_b,
            target_norm: f.meta.target_norm,
            basis_tag: f.meta.basis_tag,
            solver_iterations: f.meta.solver_iterations,
            max_leverage: f.meta.max_leverage.unwrap_or(f64::NAN),
            ridge: f.meta.ridge,
        };
        Ellipsoid::new(DMatrix::from_row_slice(f.dim, f.dim, &f.shape), DVector::from_vec(f.center), f.fit_epsilon, meta)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub dim_a: usize,
    pub dim_b: usize,
    pub entries: Vec<f64>,
}

impl StateFile {
    pub fn from_matrix(dims: Dims, m: &CMatrix) -> Self {
        Self { dim_a: dims.a, dim_b: dims.b, entries: interleave(m) }
    }

    /// Rebuilds the operator and checks Hermiticity, unit trace and positivity.
    pub fn to_density_operator(&self) -> Result<DensityOperator> {
        let dims = Dims::new(self.dim_a, self.dim_b)?;
        let m = deinterleave(dims.total(), &self.entries)?;
        DensityOperator::new(dims, m)
    }
}

impl From<&DensityOperator> for StateFile {
    fn from(rho: &DensityOperator) -> Self {
        Self::from_matrix(rho.dims(), rho.matrix())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessFile {
    pub normal: Vec<f64>,
    pub offset: f64,
    pub matrix_form: Vec<f64>,
    pub foot: Vec<f64>,
}

impl From<&PseudoWitness> for WitnessFile {
    fn from(w: &PseudoWitness) -> Self {
        Self {
            normal: w.normal.iter().copied().collect(),
            offset: w.offset,
            matrix_form: interleave(&w.matrix_form),
            foot: w.foot.iter().copied().collect(),
        }
    }
}

impl TryFrom<WitnessFile> for PseudoWitness {
    type Error = Error;

    fn try_from(f: WitnessFile) -> Result<Self> {
        let n = f.normal.len();
        if f.foot.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: f.foot.len() });
        }
        let dim = ((n + 1) as f64).sqrt().round() as usize;
        Ok(PseudoWitness {
            normal: DVector::from_vec(f.normal),
            offset: f.offset,
            matrix_form: deinterleave(dim, &f.matrix_form)?,
            foot: DVector::from_vec(f.foot),
        })
    }
}

pub fn interleave(m: &CMatrix) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)].re);
            out.push(m[(i, j)].im);
        }
    }
    out
}

pub fn deinterleave(n: usize, entries: &[f64]) -> Result<CMatrix> {
    if entries.len() != 2 * n * n {
        return Err(Error::DimensionMismatch { expected: 2 * n * n, found: entries.len() });
    }
    Ok(CMatrix::from_fn(n, n, |i, j| {
        let k = 2 * (i * n + j);
        C64::new(entries[k], entries[k + 1])
    }))
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_ellipsoid(path: impl AsRef<Path>) -> Result<Ellipsoid> {
    read_json::<EllipsoidFile>(path)?.try_into()
}

pub fn write_ellipsoid(path: impl AsRef<Path>, e: &Ellipsoid) -> Result<()> {
    write_json(path, &EllipsoidFile::from(e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::canonical_separable_ensemble;
    use crate::mvce::fit_mvce;

    #[test]
    fn ellipsoid_json_round_trip() {
        let ens = canonical_separable_ensemble(2, 2, 0.5).unwrap();
        let e = fit_mvce(&ens.points(), 1e-7).unwrap();
        let json = serde_json::to_string(&EllipsoidFile::from(&e)).unwrap();
        let back: Ellipsoid = serde_json::from_str::<EllipsoidFile>(&json).unwrap().try_into().unwrap();
        assert_eq!(back.shape(), e.shape());
        assert_eq!(back.center(), e.center());
        assert_eq!(back.fit_epsilon(), e.fit_epsilon());
    }

    #[test]
    fn state_file_validates() {
        let good = StateFile { dim_a: 2, dim_b: 1, entries: vec![0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0] };
        assert!(good.to_density_operator().is_ok());
        let negative = StateFile { dim_a: 2, dim_b: 1, entries: vec![1.5, 0.0, 0.0, 0.0, 0.0, 0.0, -0.5, 0.0] };
        assert!(negative.to_density_operator().is_err());
        let short = StateFile { dim_a: 2, dim_b: 1, entries: vec![1.0] };
        assert!(matches!(short.to_density_operator(), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn interleave_layout() {
        let m = CMatrix::from_row_slice(2, 2, &[C64::new(1., 2.), C64::new(3., 4.), C64::new(5., 6.), C64::new(7., 8.)]);
        assert_eq!(interleave(&m), vec![1., 2., 3., 4., 5., 6., 7., 8.]);
        assert_eq!(deinterleave(2, &interleave(&m)).unwrap(), m);
    }
}
