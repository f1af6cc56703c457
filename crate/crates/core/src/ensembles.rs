//! Canonical separable ensembles, seeded random states and the 3x3
//! Horodecki bound-entangled family.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ppt_oracle::ppt_separable;
use crate::state_space::{
    gell_mann_basis, min_eigenvalue, vectorize, BlochVector, CMatrix, DensityOperator, Dims,
    HermitianBasis, C64, PSD_TOL,
};

/// Ground-truth or predicted separability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Separable,
    Entangled,
}

/// Product states along every signed basis axis of both parties, pulled
/// toward the maximally mixed state so no vector is longer than `target_norm`.
#[derive(Debug, Clone)]
pub struct SeparableEnsemble {
    pub dims: Dims,
    pub target_norm: f64,
    pub vectors: Vec<BlochVector>,
}

impl SeparableEnsemble {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Components as plain vectors, ready for [`crate::mvce::fit_mvce`].
    pub fn points(&self) -> Vec<DVector<f64>> {
        self.vectors.iter().map(|v| v.components().clone()).collect()
    }
}

#[derive(Debug, Clone)]
pub struct LabeledSample {
    pub vector: BlochVector,
    pub rho: DensityOperator,
    pub label: Label,
}

/// Single-party states `(I + t s)/d` for every signed basis element `s`,
/// with `t` the largest value keeping the operator positive semidefinite.
fn axis_states(basis: &HermitianBasis) -> Vec<CMatrix> {
    let d = basis.dim();
    let mut out = Vec::with_capacity(2 * basis.len());
    for m in basis.matrices() {
        for sign in [1.0, -1.0] {
            let signed = m.scale(sign);
            let t = -1.0 / min_eigenvalue(&signed);
            let mut state = signed.scale(t);
            for i in 0..d {
                state[(i, i)] += C64::new(1.0, 0.0);
            }
            out.push(state.unscale(d as f64));
        }
    }
    out
}

pub fn canonical_separable_ensemble(dim_a: usize, dim_b: usize, target_norm: f64) -> Result<SeparableEnsemble> {
    if !(target_norm > 0.0 && target_norm <= 1.0) {
        return Err(Error::InvalidParameter(format!("target norm must lie in (0, 1], got {target_norm}")));
    }
    let dims = Dims::new(dim_a, dim_b)?;
    let local_a = axis_states(&gell_mann_basis(dim_a)?);
    let local_b = axis_states(&gell_mann_basis(dim_b)?);
    let basis = gell_mann_basis(dims.total())?;

    let mut vectors = Vec::with_capacity(local_a.len() * local_b.len());
    for ra in &local_a {
        for rb in &local_b {
            let product = DensityOperator::from_parts_unchecked(dims, ra.kronecker(rb));
            let v = vectorize(&product, &basis)?;
            let norm = v.norm();
            vectors.push(if norm > target_norm { v.scaled(target_norm / norm) } else { v });
        }
    }
    Ok(SeparableEnsemble { dims, target_norm, vectors })
}

fn ginibre(dim: usize, rng: &mut ChaCha8Rng) -> DensityOperator {
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    });
    let w = &g * g.adjoint();
    let trace = w.trace().re;
    let mut m = w.unscale(trace);
    // exact Hermitian symmetry; the product is only Hermitian up to rounding
    for i in 0..dim {
        m[(i, i)].im = 0.0;
        for j in i + 1..dim {
            m[(j, i)] = m[(i, j)].conj();
        }
    }
    DensityOperator::from_parts_unchecked(Dims { a: dim, b: 1 }, m)
}

/// `G G† / Tr(G G†)` with `G` a matrix of iid standard complex Gaussians
/// (Hilbert-Schmidt measure). The state is tagged with dims `(dim, 1)`.
pub fn random_density_operator(dim: usize, seed: u64) -> Result<DensityOperator> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim, reason: "random states need dim >= 2" });
    }
    Ok(ginibre(dim, &mut ChaCha8Rng::seed_from_u64(seed)))
}

/// Draws Hilbert-Schmidt random states from one seeded stream, labels them by
/// the PPT test and keeps them until both quotas are filled. Separable
/// samples come first in the output.
pub fn sample_labeled_states(
    dim_a: usize,
    dim_b: usize,
    count_separable: usize,
    count_entangled: usize,
    seed: u64,
) -> Result<Vec<LabeledSample>> {
    let dims = Dims::new(dim_a, dim_b)?;
    if dims.total() > 6 {
        return Err(Error::UnsupportedLabeling { dim_a, dim_b });
    }
    let basis = gell_mann_basis(dims.total())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut separable = Vec::with_capacity(count_separable);
    let mut entangled = Vec::with_capacity(count_entangled);
    while separable.len() < count_separable || entangled.len() < count_entangled {
        let rho = DensityOperator::from_parts_unchecked(dims, ginibre(dims.total(), &mut rng).into_matrix());
        let label = if ppt_separable(&rho, PSD_TOL) { Label::Separable } else { Label::Entangled };
        let bucket = match label {
            Label::Separable if separable.len() < count_separable => &mut separable,
            Label::Entangled if entangled.len() < count_entangled => &mut entangled,
            _ => continue,
        };
        let vector = vectorize(&rho, &basis)?;
        bucket.push(LabeledSample { vector, rho, label });
    }
    separable.extend(entangled);
    Ok(separable)
}

/// Horodecki's 3x3 PPT entangled family, `a` in `[0, 1]`.
pub fn horodecki_state(a: f64) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::InvalidParameter(format!("Horodecki parameter must lie in [0, 1], got {a}")));
    }
    let mut m = CMatrix::zeros(9, 9);
    let re = |x: f64| C64::new(x, 0.0);
    for i in [0, 1, 2, 3, 4, 5, 7] {
        m[(i, i)] = re(a);
    }
    for (i, j) in [(0, 4), (0, 8), (4, 8)] {
        m[(i, j)] = re(a);
        m[(j, i)] = re(a);
    }
    m[(6, 6)] = re((1.0 + a) / 2.0);
    m[(8, 8)] = re((1.0 + a) / 2.0);
    let corner = (1.0 - a * a).sqrt() / 2.0;
    m[(6, 8)] = re(corner);
    m[(8, 6)] = re(corner);
    Ok(DensityOperator::from_parts_unchecked(Dims { a: 3, b: 3 }, m.unscale(8.0 * a + 1.0)))
}

/// `count` evenly spaced parameters from 0.001 to 1 inclusive.
pub fn horodecki_parameters(count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![1.0],
        _ => (0..count).map(|k| 0.001 + 0.999 * k as f64 / (count - 1) as f64).collect(),
    }
}

/// JSON layout shared by ensembles and sample sets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VectorSetFile {
    pub dim_a: usize,
    pub dim_b: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub target_norm: Option<f64>,
    pub basis_tag: String,
    pub vectors: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub labels: Option<Vec<Label>>,
}

impl From<&SeparableEnsemble> for VectorSetFile {
    fn from(e: &SeparableEnsemble) -> Self {
        Self {
            dim_a: e.dims.a,
            dim_b: e.dims.b,
            target_norm: Some(e.target_norm),
            basis_tag: crate::state_space::BASIS_TAG.to_string(),
            vectors: e.vectors.iter().map(|v| v.components().iter().copied().collect()).collect(),
            labels: None,
        }
    }
}

impl VectorSetFile {
    pub fn from_samples(dims: Dims, samples: &[LabeledSample]) -> Self {
        Self {
            dim_a: dims.a,
            dim_b: dims.b,
            target_norm: None,
            basis_tag: crate::state_space::BASIS_TAG.to_string(),
            vectors: samples.iter().map(|s| s.vector.components().iter().copied().collect()).collect(),
            labels: Some(samples.iter().map(|s| s.label).collect()),
        }
    }
}
