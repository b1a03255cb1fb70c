//! Approximation of supra-Laplacian eigenvectors by per-layer zero modes.
//!
//! With no inter-layer coupling, the zero eigenspace of the supra-Laplacian
//! is spanned by the vectors `V^t`: zero everywhere except block `t`, which
//! holds the unit zero mode of layer `t`. For weak coupling the first few
//! eigenvectors stay close to that span. The residual `eps_i` of projecting
//! eigenvector `i` onto it stays small up to some index and then jumps; that
//! index is the transition `lambda*`.

use serde::Serialize;

use crate::eigen::SpectralResult;
use crate::error::{Error, Result};
use crate::graph::zero_mode;
use crate::matrix::{dot, norm};
use crate::supra::{Coupling, TemporalNetwork};

pub const DEFAULT_RATIO: f64 = 10.0;
pub const DEFAULT_FLOOR: f64 = 1e-3;
/// Eigenvalues closer than this are treated as one degenerate eigenspace.
pub const CLUSTER_TOLERANCE: f64 = 1e-9;
const UNIT_NORM_TOLERANCE: f64 = 1e-9;

/// The `T` zero-padded layer zero modes. Only the nonzero block of each
/// column is stored.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroModeBasis {
    n_per_layer: usize,
    modes: Vec<Vec<f64>>,
}

impl ZeroModeBasis {
    pub fn n_layers(&self) -> usize {
        self.modes.len()
    }

    pub fn n_per_layer(&self) -> usize {
        self.n_per_layer
    }

    /// The unit zero mode of layer `t`, length `N`.
    pub fn mode(&self, t: usize) -> &[f64] {
        &self.modes[t]
    }

    /// Column `t` as a full length-`NT` vector.
    pub fn column(&self, t: usize) -> Vec<f64> {
        let n = self.n_per_layer;
        let mut out = vec![0.0; n * self.n_layers()];
        out[t * n..(t + 1) * n].copy_from_slice(&self.modes[t]);
        out
    }
}

pub fn zero_mode_basis(net: &TemporalNetwork) -> Result<ZeroModeBasis> {
    Ok(ZeroModeBasis {
        n_per_layer: net.n_per_layer(),
        modes: net.layers().iter().map(zero_mode).collect::<Result<_>>()?,
    })
}

/// Coefficients `alpha_t = <V^t, v>` and the residual norm
/// `eps = ||v - sum_t alpha_t V^t||`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Projection {
    pub alpha: Vec<f64>,
    pub epsilon: f64,
}

pub fn project_residual(v: &[f64], basis: &ZeroModeBasis) -> Result<Projection> {
    let n = basis.n_per_layer;
    let expected = n * basis.n_layers();
    if v.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: v.len(),
        });
    }
    let nv = norm(v);
    if (nv - 1.0).abs() > UNIT_NORM_TOLERANCE {
        return Err(Error::NotUnitNorm { norm: nv });
    }
    let mut alpha = Vec::with_capacity(basis.n_layers());
    let mut residual_sq = 0.0;
    for (t, mode) in basis.modes.iter().enumerate() {
        let block = &v[t * n..(t + 1) * n];
        let a = dot(mode, block);
        residual_sq += block
            .iter()
            .zip(mode)
            .map(|(x, z)| (x - a * z).powi(2))
            .sum::<f64>();
        alpha.push(a);
    }
    Ok(Projection {
        alpha,
        epsilon: residual_sq.sqrt(),
    })
}

/// Parameters echoed into reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub n_nodes: usize,
    pub n_layers: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge_prob: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    pub coupling: Coupling,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxReport {
    pub eigenvalues: Vec<f64>,
    /// `errors[i - 1]` is `eps_i`.
    pub errors: Vec<f64>,
    pub coefficients: Vec<Vec<f64>>,
    /// 1-based index, absent when no jump is found.
    pub lambda_star_index: Option<usize>,
    pub ratio_threshold: f64,
    pub abs_floor: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<RunConfig>,
}

impl ApproxReport {
    /// Re-runs the transition detection with other thresholds.
    pub fn with_thresholds(mut self, ratio: f64, floor: f64) -> Self {
        self.ratio_threshold = ratio;
        self.abs_floor = floor;
        self.lambda_star_index = detect_lambda_star(&self.errors, ratio, floor);
        self
    }

    pub fn with_config(mut self, config: RunConfig) -> Self {
        self.config = Some(config);
        self
    }

    pub fn effective_index(&self) -> usize {
        effective_transition_index(&self.errors, self.ratio_threshold, self.abs_floor)
    }
}

/// Residuals of the `m` smallest eigenvectors in `spec` against `basis`.
///
/// Eigenvectors inside a cluster of nearly equal eigenvalues are only
/// defined up to rotation, so every member of a cluster is assigned the RMS
/// residual of the whole cluster, which does not depend on the rotation.
/// Clusters straddling index `m` are evaluated in full.
pub fn error_profile(
    spec: &SpectralResult,
    basis: &ZeroModeBasis,
    m: usize,
) -> Result<ApproxReport> {
    if m > spec.len() {
        return Err(Error::IndexOutOfRange {
            index: m,
            bound: spec.len(),
        });
    }
    let mut end = m;
    while end > 0
        && end < spec.len()
        && spec.eigenvalues[end] - spec.eigenvalues[end - 1] <= CLUSTER_TOLERANCE
    {
        end += 1;
    }
    let projections: Vec<Projection> = (0..end)
        .map(|i| project_residual(spec.eigenvector(i), basis))
        .collect::<Result<_>>()?;

    let mut errors = vec![0.0; end];
    let mut start = 0;
    while start < end {
        let mut stop = start + 1;
        while stop < end && spec.eigenvalues[stop] - spec.eigenvalues[stop - 1] <= CLUSTER_TOLERANCE
        {
            stop += 1;
        }
        let mean_sq = projections[start..stop]
            .iter()
            .map(|p| p.epsilon * p.epsilon)
            .sum::<f64>()
            / (stop - start) as f64;
        errors[start..stop].fill(mean_sq.sqrt());
        start = stop;
    }
    errors.truncate(m);
    let coefficients = projections.into_iter().take(m).map(|p| p.alpha).collect();
    Ok(ApproxReport {
        eigenvalues: spec.eigenvalues[..m].to_vec(),
        lambda_star_index: detect_lambda_star(&errors, DEFAULT_RATIO, DEFAULT_FLOOR),
        errors,
        coefficients,
        ratio_threshold: DEFAULT_RATIO,
        abs_floor: DEFAULT_FLOOR,
        config: None,
    })
}

/// Smallest 1-based `i >= 2` with `eps_i > max(ratio * eps_{i-1}, floor)`.
pub fn detect_lambda_star(errors: &[f64], ratio: f64, floor: f64) -> Option<usize> {
    errors
        .windows(2)
        .position(|w| w[1] > (ratio * w[0]).max(floor))
        .map(|p| p + 2)
}

/// A transition index that always exists, for averaging over runs.
///
/// The detected `lambda*` when there is one; otherwise the first index whose
/// residual exceeds `floor` (a gradual breakdown); otherwise `m + 1`, one
/// past the analyzed range.
pub fn effective_transition_index(errors: &[f64], ratio: f64, floor: f64) -> usize {
    detect_lambda_star(errors, ratio, floor)
        .or_else(|| errors.iter().position(|&e| e > floor).map(|p| p + 1))
        .unwrap_or(errors.len() + 1)
}
