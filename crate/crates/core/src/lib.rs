//! Separability testing for bipartite quantum states by ellipsoidal classification.
//!
//! Density operators are mapped to real Bloch vectors in a generalized Gell-Mann
//! basis ([`state_space`]). A minimum-volume covering ellipsoid is fitted around
//! a canonical ensemble of product states ([`ensembles`], [`mvce`]); states are
//! then classified by membership, with Euclidean projections and tangent-plane
//! pseudo-witnesses available from [`geometry`]. The [`ppt_oracle`] module gives
//! exact answers for 2×2 and 2×3 systems, and [`bench`] drives the comparison
//! experiments.

#![forbid(unsafe_code)]

pub mod bench;
pub mod ensembles;
pub mod error;
pub mod geometry;
pub mod io;
pub mod mvce;
pub mod ppt_oracle;
pub mod state_space;

pub use ensembles::{
    canonical_separable_ensemble, horodecki_state, random_density_operator,
    sample_labeled_states, Label, LabeledSample, SeparableEnsemble,
};
pub use error::{Error, Result};
pub use geometry::{
    classify, project_to_ellipsoid, tangent_witness, witness_bound, Projection, PseudoWitness,
};
pub use mvce::{fit_mvce, fit_mvce_with, log_volume, Ellipsoid, EllipsoidMeta, FitOptions};
pub use ppt_oracle::{hs_distance_true, ppt_separable, HsProjection};
pub use state_space::{
    devectorize, gell_mann_basis, is_psd, partial_transpose, vectorize, BlochVector, CMatrix,
    DensityOperator, Dims, HermitianBasis, C64,
};
