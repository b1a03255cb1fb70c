//! Multi-seed residual experiments over temporal ER networks.
//!
//! Each run draws independent ER layers, couples them uniformly, decomposes
//! the full supra-Laplacian and records the residual profile. Runs are
//! aggregated per `(p, omega)` cell after sorting by seed.

use serde::Serialize;

use crate::approx::{
    effective_transition_index, error_profile, zero_mode_basis, DEFAULT_FLOOR, DEFAULT_RATIO,
};
use crate::eigen::oracle_eigh;
use crate::error::{Error, Result};
use crate::generators::{er_temporal, ErConfig, LayerMode};
use crate::supra::{supra_laplacian, Coupling, InterLayerWeights, TemporalNetwork};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub n_nodes: usize,
    pub n_layers: usize,
    pub coupling: Coupling,
    /// Number of smallest eigenvectors analyzed per run.
    pub m: usize,
    pub ratio_threshold: f64,
    pub abs_floor: f64,
}

impl SweepConfig {
    pub fn new(n_nodes: usize, n_layers: usize, coupling: Coupling, m: usize) -> Self {
        Self {
            n_nodes,
            n_layers,
            coupling,
            m,
            ratio_threshold: DEFAULT_RATIO,
            abs_floor: DEFAULT_FLOOR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedRun {
    pub seed: u64,
    pub errors: Vec<f64>,
    pub lambda_star_index: Option<usize>,
    pub effective_index: usize,
}

/// Per-cell aggregate: mean and sample standard deviation of each `eps_i`,
/// and of the transition index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub edge_prob: f64,
    pub omega: f64,
    pub n_seeds: usize,
    pub mean_errors: Vec<f64>,
    pub sd_errors: Vec<f64>,
    /// Mean of [`SeedRun::effective_index`].
    pub mean_index: f64,
    pub sd_index: f64,
    /// Runs where a sharp jump was detected.
    pub n_detected: usize,
    pub runs: Vec<SeedRun>,
}

pub fn build_network(
    cfg: &SweepConfig,
    edge_prob: f64,
    omega: f64,
    seed: u64,
) -> Result<TemporalNetwork> {
    let er = ErConfig {
        n_nodes: cfg.n_nodes,
        edge_prob,
        n_layers: cfg.n_layers,
        seed,
    };
    let layers = er_temporal(&er, LayerMode::Independent)?;
    TemporalNetwork::new(layers, InterLayerWeights::uniform(omega, cfg.coupling)?)
}

pub fn run_seed(cfg: &SweepConfig, edge_prob: f64, omega: f64, seed: u64) -> Result<SeedRun> {
    let net = build_network(cfg, edge_prob, omega, seed)?;
    let spec = oracle_eigh(&supra_laplacian(&net)?.matrix)?;
    let report = error_profile(&spec, &zero_mode_basis(&net)?, cfg.m)?
        .with_thresholds(cfg.ratio_threshold, cfg.abs_floor);
    Ok(SeedRun {
        seed,
        effective_index: effective_transition_index(
            &report.errors,
            cfg.ratio_threshold,
            cfg.abs_floor,
        ),
        lambda_star_index: report.lambda_star_index,
        errors: report.errors,
    })
}

pub fn summarize(edge_prob: f64, omega: f64, mut runs: Vec<SeedRun>) -> Result<CellSummary> {
    if runs.is_empty() {
        return Err(Error::InvalidConfig(
            "a cell needs at least one seed".into(),
        ));
    }
    runs.sort_by_key(|r| r.seed);
    let m = runs[0].errors.len();
    let (mean_errors, sd_errors) = (0..m)
        .map(|i| mean_sd(runs.iter().map(|r| r.errors[i])))
        .unzip();
    let (mean_index, sd_index) = mean_sd(runs.iter().map(|r| r.effective_index as f64));
    Ok(CellSummary {
        edge_prob,
        omega,
        n_seeds: runs.len(),
        mean_errors,
        sd_errors,
        mean_index,
        sd_index,
        n_detected: runs
            .iter()
            .filter(|r| r.lambda_star_index.is_some())
            .count(),
        runs,
    })
}

pub fn run_cell(
    cfg: &SweepConfig,
    edge_prob: f64,
    omega: f64,
    seeds: &[u64],
) -> Result<CellSummary> {
    let runs = seeds
        .iter()
        .map(|&s| run_seed(cfg, edge_prob, omega, s))
        .collect::<Result<Vec<_>>>()?;
    summarize(edge_prob, omega, runs)
}

/// Mean and sample standard deviation (zero for a single value).
fn mean_sd(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = values.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
