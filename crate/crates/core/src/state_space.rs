//! Hermitian matrix algebra, generalized Gell-Mann bases and the
//! density-operator / Bloch-vector correspondence
//!
//! ```text
//! rho = (1/N) (I + gamma * sum_i r_i sigma_i),   r_i = N Tr(sigma_i rho) / (gamma alpha)
//! ```
//!
//! with `Tr(sigma_i sigma_j) = alpha delta_ij` and `gamma = sqrt(N (N - 1) / alpha)`,
//! so that pure states sit on the unit sphere.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Elementwise Hermiticity tolerance for validated operators.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Unit-trace tolerance for validated operators.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted as positive semidefinite.
pub const PSD_TOL: f64 = 1e-9;

/// Tag written next to serialized vectors so models stay tied to the basis
/// ordering they were built with.
pub const BASIS_TAG: &str = "gell-mann:sym,antisym,diag;alpha=2";

/// Local dimensions of a bipartite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub a: usize,
    pub b: usize,
}

impl Dims {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == 0 {
            return Err(Error::InvalidDimension { dim: a, reason: "subsystem dimension must be positive" });
        }
        if b == 0 {
            return Err(Error::InvalidDimension { dim: b, reason: "subsystem dimension must be positive" });
        }
        Ok(Self { a, b })
    }

    pub fn total(&self) -> usize {
        self.a * self.b
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.a, self.b)
    }
}

impl FromStr for Dims {
    type Err = Error;

    /// Parses `"2x3"`. Both factors must be at least 2.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("malformed dims {s:?}, expected e.g. 2x2"));
        let (a, b) = s.trim().split_once(['x', 'X']).ok_or_else(bad)?;
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        for d in [a, b] {
            if d < 2 {
                return Err(Error::InvalidDimension { dim: d, reason: "each subsystem needs dimension >= 2" });
            }
        }
        Ok(Self { a, b })
    }
}

/// A Hermitian, unit-trace operator on `C^a ⊗ C^b`.
///
/// [`DensityOperator::new`] enforces positivity as well; [`devectorize`] builds
/// values that are only guaranteed Hermitian with unit trace, so callers
/// holding one of those should check [`DensityOperator::is_psd`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    dims: Dims,
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validates Hermiticity (1e-12), unit trace (1e-12) and positivity (-1e-9).
    pub fn new(dims: Dims, matrix: CMatrix) -> Result<Self> {
        let rho = Self::hermitian_unit_trace(dims, matrix)?;
        let min = min_eigenvalue(&rho.matrix);
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!("minimum eigenvalue {min:e} is negative")));
        }
        Ok(rho)
    }

    /// Checks everything except positivity.
    pub fn hermitian_unit_trace(dims: Dims, matrix: CMatrix) -> Result<Self> {
        let n = dims.total();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: matrix.nrows() });
        }
        let deviation = hermitian_deviation(&matrix);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {trace} differs from 1")));
        }
        Ok(Self { dims, matrix })
    }

    pub(crate) fn from_parts_unchecked(dims: Dims, matrix: CMatrix) -> Self {
        Self { dims, matrix }
    }

    pub fn maximally_mixed(dims: Dims) -> Self {
        let n = dims.total();
        Self { dims, matrix: CMatrix::identity(n, n).unscale(n as f64) }
    }

    /// `|psi><psi|` for a (not necessarily normalized) vector.
    pub fn pure(dims: Dims, psi: &[C64]) -> Result<Self> {
        if psi.len() != dims.total() {
            return Err(Error::DimensionMismatch { expected: dims.total(), found: psi.len() });
        }
        let v = DVector::from_column_slice(psi);
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let v = v.unscale(norm);
        Self::new(dims, &v * v.adjoint())
    }

    /// Tensor product of two single-party operators.
    pub fn product(a: &DensityOperator, b: &DensityOperator) -> Self {
        let dims = Dims { a: a.dim(), b: b.dim() };
        Self { dims, matrix: a.matrix.kronecker(&b.matrix) }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    /// Total dimension `N = a * b`.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> DVector<f64> {
        self.matrix.clone().symmetric_eigenvalues()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.matrix)
    }

    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue() >= -PSD_TOL
    }

    pub fn frobenius_distance(&self, other: &DensityOperator) -> f64 {
        (&self.matrix - &other.matrix).norm()
    }
}

/// Real coordinates of a density operator in a trace-free Hermitian basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochVector {
    dim: usize,
    components: DVector<f64>,
}

impl BlochVector {
    pub fn new(dim: usize, components: DVector<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension { dim, reason: "operator dimension must be >= 2" });
        }
        let expected = dim * dim - 1;
        if components.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: components.len() });
        }
        Ok(Self { dim, components })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, components: DVector::zeros(dim * dim - 1) }
    }

    /// Dimension `N` of the underlying operator space.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &DVector<f64> {
        &self.components
    }

    pub fn into_components(self) -> DVector<f64> {
        self.components
    }

    pub fn norm(&self) -> f64 {
        self.components.norm()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { dim: self.dim, components: self.components.scale(factor) }
    }
}

/// An ordered trace-free self-adjoint basis with `Tr(s_i s_j) = alpha delta_ij`.
#[derive(Debug, Clone)]
pub struct HermitianBasis {
    dim: usize,
    matrices: Vec<CMatrix>,
    // nonzero (row, col, value) triples of each matrix
    sparse: Vec<Vec<(usize, usize, C64)>>,
    alpha: f64,
    gamma: f64,
}

impl HermitianBasis {
    /// Builds a basis from explicit matrices, checking self-adjointness,
    /// tracelessness and orthogonality to 1e-12.
    pub fn from_matrices(dim: usize, matrices: Vec<CMatrix>, alpha: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension { dim, reason: "basis dimension must be >= 2" });
        }
        if matrices.len() != dim * dim - 1 {
            return Err(Error::DimensionMismatch { expected: dim * dim - 1, found: matrices.len() });
        }
        if alpha.is_nan() || alpha <= 0.0 {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
        }
        for m in &matrices {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: m.nrows() });
            }
            let deviation = hermitian_deviation(m);
            if deviation > HERMITIAN_TOL {
                return Err(Error::NotHermitian { deviation });
            }
            if m.trace().norm() > HERMITIAN_TOL {
                return Err(Error::InvalidParameter("basis matrix is not trace-free".into()));
            }
        }
        let basis = Self::assemble(dim, matrices, alpha);
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                let expected = if i == j { alpha } else { 0.0 };
                if (basis.hs_product(i, j) - expected).abs() > HERMITIAN_TOL {
                    return Err(Error::InvalidParameter(format!(
                        "basis matrices {i} and {j} violate Tr(s_i s_j) = alpha delta_ij"
                    )));
                }
            }
        }
        Ok(basis)
    }

    fn assemble(dim: usize, matrices: Vec<CMatrix>, alpha: f64) -> Self {
        let sparse = matrices
            .iter()
            .map(|m| {
                let mut nz = Vec::new();
                for r in 0..dim {
                    for c in 0..dim {
                        if m[(r, c)] != C64::new(0.0, 0.0) {
                            nz.push((r, c, m[(r, c)]));
                        }
                    }
                }
                nz
            })
            .collect();
        let gamma = ((dim * (dim - 1)) as f64 / alpha).sqrt();
        Self { dim, matrices, sparse, alpha, gamma }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of basis elements, `N^2 - 1`.
    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `Tr(s_i m)`, using the sparsity of the basis element.
    pub fn trace_with(&self, i: usize, m: &CMatrix) -> C64 {
        self.sparse[i].iter().map(|&(r, c, v)| v * m[(c, r)]).sum()
    }

    /// `Tr(s_i s_j)` computed by brute force from the dense matrices.
    pub fn hs_product(&self, i: usize, j: usize) -> f64 {
        (&self.matrices[i] * &self.matrices[j]).trace().re
    }

    /// `sum_i coeffs_i s_i`.
    pub fn combine(&self, coeffs: &DVector<f64>) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for (nz, &c) in self.sparse.iter().zip(coeffs.iter()) {
            if c == 0.0 {
                continue;
            }
            for &(r, col, v) in nz {
                out[(r, col)] += v * c;
            }
        }
        out
    }

    /// Factor converting Bloch-space Euclidean distances into Frobenius
    /// distances between the corresponding operators: `gamma sqrt(alpha) / N`.
    pub fn frobenius_scale(&self) -> f64 {
        self.gamma * self.alpha.sqrt() / self.dim as f64
    }
}

/// Generalized Gell-Mann basis with `alpha = 2`: symmetric off-diagonals in
/// row-major pair order, then antisymmetric ones, then diagonals by rank.
pub fn gell_mann_basis(dim: usize) -> Result<HermitianBasis> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim, reason: "Gell-Mann basis needs dim >= 2" });
    }
    let zero = C64::new(0.0, 0.0);
    let mut matrices = Vec::with_capacity(dim * dim - 1);
    for j in 0..dim {
        for k in j + 1..dim {
            let mut m = CMatrix::from_element(dim, dim, zero);
            m[(j, k)] = C64::new(1.0, 0.0);
            m[(k, j)] = C64::new(1.0, 0.0);
            matrices.push(m);
        }
    }
    for j in 0..dim {
        for k in j + 1..dim {
            let mut m = CMatrix::from_element(dim, dim, zero);
            m[(j, k)] = C64::new(0.0, -1.0);
            m[(k, j)] = C64::new(0.0, 1.0);
            matrices.push(m);
        }
    }
    for l in 1..dim {
        let scale = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut m = CMatrix::from_element(dim, dim, zero);
        for i in 0..l {
            m[(i, i)] = C64::new(scale, 0.0);
        }
        m[(l, l)] = C64::new(-(l as f64) * scale, 0.0);
        matrices.push(m);
    }
    Ok(HermitianBasis::assemble(dim, matrices, 2.0))
}

/// `r_i = N Tr(s_i rho) / (gamma alpha)`.
pub fn vectorize(rho: &DensityOperator, basis: &HermitianBasis) -> Result<BlochVector> {
    vectorize_matrix(rho.matrix(), basis)
}

/// Same as [`vectorize`] for a raw Hermitian matrix.
pub fn vectorize_matrix(m: &CMatrix, basis: &HermitianBasis) -> Result<BlochVector> {
    let n = basis.dim();
    if m.nrows() != n {
        return Err(Error::DimensionMismatch { expected: n, found: m.nrows() });
    }
    let scale = n as f64 / (basis.gamma() * basis.alpha());
    let components = DVector::from_iterator(basis.len(), (0..basis.len()).map(|i| scale * basis.trace_with(i, m).re));
    Ok(BlochVector { dim: n, components })
}

/// `(1/N)(I + gamma sum_i r_i s_i)`. The result is Hermitian with unit trace
/// but may fail to be positive semidefinite.
pub fn devectorize(r: &BlochVector, basis: &HermitianBasis, dims: Dims) -> Result<DensityOperator> {
    let n = basis.dim();
    if r.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: r.dim() });
    }
    if dims.total() != n {
        return Err(Error::DimensionMismatch { expected: n, found: dims.total() });
    }
    let mut m = basis.combine(r.components()).scale(basis.gamma());
    for i in 0..n {
        m[(i, i)] += C64::new(1.0, 0.0);
    }
    Ok(DensityOperator::from_parts_unchecked(dims, m.unscale(n as f64)))
}

/// Transposes subsystem A: block `(i, j)` of the `a x a` grid of `b x b`
/// blocks moves to `(j, i)`.
pub fn partial_transpose(rho: &DensityOperator) -> CMatrix {
    partial_transpose_matrix(rho.matrix(), rho.dims())
}

pub fn partial_transpose_matrix(m: &CMatrix, dims: Dims) -> CMatrix {
    let (da, db) = (dims.a, dims.b);
    CMatrix::from_fn(da * db, da * db, |row, col| {
        let (ia, ib) = (row / db, row % db);
        let (ja, jb) = (col / db, col % db);
        m[(ja * db + ib, ia * db + jb)]
    })
}

/// True iff the smallest eigenvalue of the Hermitian matrix `m` is `>= -tol`.
pub fn is_psd(m: &CMatrix, tol: f64) -> Result<bool> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
    }
    let deviation = hermitian_deviation(m);
    if deviation > tol.max(HERMITIAN_TOL) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(min_eigenvalue(m) >= -tol)
}

/// Largest elementwise `|m_ij - conj(m_ji)|`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    m.clone().symmetric_eigenvalues().min()
}
