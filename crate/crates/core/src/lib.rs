//! Spectral analysis of temporal networks through their normalized
//! supra-Laplacian.
//!
//! A temporal network is a sequence of graph layers over a fixed node set,
//! coupled ordinally: node `i` in layer `t` is linked to its own copies in
//! layers `t - 1` and `t + 1`. This crate assembles the resulting
//! supra-adjacency and supra-Laplacian matrices and computes their spectra in
//! two independent ways:
//!
//! * [`eigen::oracle_eigh`] decomposes the full `NT x NT` matrix directly.
//! * [`dft`] handles the periodic constant model (identical layers, uniform
//!   coupling, first and last layers linked). A block Fourier transform splits
//!   its spectrum into `T` reduced `N x N` problems
//!   `M_k = L~ + 2 cos(2 pi k / T) L~_W`, whose eigenvectors lift back to block
//!   sinusoids.
//!
//! [`approx`] measures how well each supra-Laplacian eigenvector is explained
//! by the per-layer zero modes and locates the index where that approximation
//! breaks down. [`generators`] provides seeded Erdős–Rényi and nested
//! hierarchical (Sales-Pardo style) benchmark layers.

pub mod approx;
pub mod dft;
pub mod eigen;
pub mod error;
pub mod generators;
pub mod graph;
pub mod matrix;
pub mod supra;
pub mod sweep;

pub use approx::{
    detect_lambda_star, effective_transition_index, error_profile, project_residual,
    zero_mode_basis, ApproxReport, Projection, RunConfig, ZeroModeBasis,
};
pub use dft::{
    dft_blocks, eigenvalue_table, full_spectrum, inverse_dft_blocks, lift_eigenvector,
    reduced_matrix, EigenvalueTable, LiftedEigenpair, MergedEigenpair, MergedSpectrum,
    ReducedBlock,
};
pub use eigen::{eig_residual, eigh, oracle_eigh, Provenance, SpectralResult};
pub use error::{Error, Result};
pub use generators::{
    er_layer, er_temporal, sales_pardo_layer, sales_pardo_temporal, ErConfig, LayerMode,
    SalesPardoConfig,
};
pub use graph::{degree_vector, is_connected, normalized_laplacian, zero_mode, LayerGraph};
pub use matrix::{DenseSymMatrix, Matrix};
pub use supra::{
    assemble_supra_adjacency, constant_model_blocks, expand_constant_model, supra_degree,
    supra_laplacian, ConstantModelBlocks, Coupling, InterLayerWeights, SupraKind, SupraMatrix,
    TemporalNetwork, WeightMode,
};
