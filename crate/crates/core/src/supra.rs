//! Supra-adjacency and normalized supra-Laplacian assembly.
//!
//! Layers occupy the diagonal blocks of an `NT x NT` matrix. Inter-layer
//! coupling only joins a node to its own copies in neighbouring layers, so
//! off-diagonal blocks are diagonal and appear only at ordinal positions
//! `(t, t+1)` (plus the wrap-around `(T-1, 0)` under periodic coupling).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{degree_vector, inverse_sqrt_degrees, normalized_laplacian, LayerGraph};
use crate::matrix::{DenseSymMatrix, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Coupling {
    /// Layers `t` and `t + 1` are linked for `t = 0..T-1`.
    Path,
    /// As `Path`, plus layer `T - 1` linked back to layer `0`.
    Periodic,
}

impl Coupling {
    /// Number of coupled layer pairs for `n_layers` layers.
    pub fn n_pairs(self, n_layers: usize) -> usize {
        match self {
            Coupling::Path => n_layers.saturating_sub(1),
            Coupling::Periodic => n_layers,
        }
    }

    pub fn min_layers(self) -> usize {
        match self {
            Coupling::Path => 2,
            Coupling::Periodic => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Coupling::Path => "path",
            Coupling::Periodic => "periodic",
        }
    }
}

impl std::str::FromStr for Coupling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "path" => Ok(Coupling::Path),
            "periodic" => Ok(Coupling::Periodic),
            other => Err(Error::InvalidConfig(format!("unknown coupling '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightMode {
    /// The same weight on every inter-layer edge.
    Uniform(f64),
    /// `table[p][i]` is the weight of node `i` between layers `p` and
    /// `(p + 1) mod T`.
    PerNode(Vec<Vec<f64>>),
}

/// Inter-layer edge weights `omega_i^{t,t+1}` and the coupling topology.
#[derive(Debug, Clone, PartialEq)]
pub struct InterLayerWeights {
    mode: WeightMode,
    coupling: Coupling,
}

impl InterLayerWeights {
    pub fn uniform(omega: f64, coupling: Coupling) -> Result<Self> {
        check_weight(omega)?;
        Ok(Self {
            mode: WeightMode::Uniform(omega),
            coupling,
        })
    }

    /// `table[p][i]` couples node `i` of layer `p` with node `i` of layer
    /// `(p + 1) mod T`. Shape is validated against the network later.
    pub fn per_node(table: Vec<Vec<f64>>, coupling: Coupling) -> Result<Self> {
        for &w in table.iter().flatten() {
            check_weight(w)?;
        }
        Ok(Self {
            mode: WeightMode::PerNode(table),
            coupling,
        })
    }

    pub fn mode(&self) -> &WeightMode {
        &self.mode
    }

    pub fn coupling(&self) -> Coupling {
        self.coupling
    }

    pub fn uniform_omega(&self) -> Option<f64> {
        match self.mode {
            WeightMode::Uniform(w) => Some(w),
            WeightMode::PerNode(_) => None,
        }
    }

    /// Weight of node `node` on pair `pair` (layers `pair`, `pair + 1 mod T`).
    pub fn weight(&self, pair: usize, node: usize) -> f64 {
        match &self.mode {
            WeightMode::Uniform(w) => *w,
            WeightMode::PerNode(table) => table[pair][node],
        }
    }

    fn validate(&self, n_nodes: usize, n_layers: usize) -> Result<()> {
        if let WeightMode::PerNode(table) = &self.mode {
            let pairs = self.coupling.n_pairs(n_layers);
            if table.len() != pairs {
                return Err(Error::InvalidWeights(format!(
                    "expected {pairs} layer pairs, found {}",
                    table.len()
                )));
            }
            if let Some(row) = table.iter().find(|r| r.len() != n_nodes) {
                return Err(Error::InvalidWeights(format!(
                    "expected {n_nodes} node weights per pair, found {}",
                    row.len()
                )));
            }
        }
        Ok(())
    }
}

fn check_weight(w: f64) -> Result<()> {
    if w.is_finite() && w >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidWeights(format!(
            "weights must be finite and non-negative, got {w}"
        )))
    }
}

/// An ordered sequence of layers on a shared node set, plus coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalNetwork {
    layers: Vec<LayerGraph>,
    weights: InterLayerWeights,
}

impl TemporalNetwork {
    pub fn new(layers: Vec<LayerGraph>, weights: InterLayerWeights) -> Result<Self> {
        let t = layers.len();
        let min = weights.coupling.min_layers();
        if t < min {
            return Err(Error::BadDimension(format!(
                "{} coupling needs at least {min} layers, got {t}",
                weights.coupling.as_str()
            )));
        }
        let n = layers[0].n_nodes();
        if let Some(bad) = layers.iter().find(|l| l.n_nodes() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.n_nodes(),
            });
        }
        weights.validate(n, t)?;
        Ok(Self { layers, weights })
    }

    pub fn layers(&self) -> &[LayerGraph] {
        &self.layers
    }

    pub fn weights(&self) -> &InterLayerWeights {
        &self.weights
    }

    pub fn n_per_layer(&self) -> usize {
        self.layers[0].n_nodes()
    }

    pub fn n_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn order(&self) -> usize {
        self.n_per_layer() * self.n_layers()
    }

    /// Whether this is a periodic constant model: identical layers, uniform
    /// weight, periodic coupling.
    pub fn is_constant_model(&self) -> bool {
        self.weights.coupling == Coupling::Periodic
            && self.weights.uniform_omega().is_some()
            && self.layers.iter().all(|l| l == &self.layers[0])
    }

    /// Layer pairs `(pair index, lower layer, upper layer)`.
    fn pairs(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let t = self.n_layers();
        (0..self.weights.coupling.n_pairs(t)).map(move |p| (p, p, (p + 1) % t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SupraKind {
    Adjacency,
    Laplacian,
}

/// A dense symmetric `NT x NT` matrix with its block layout.
#[derive(Debug, Clone, PartialEq)]
pub struct SupraMatrix {
    pub n_per_layer: usize,
    pub n_layers: usize,
    pub kind: SupraKind,
    pub matrix: DenseSymMatrix,
}

impl SupraMatrix {
    pub fn order(&self) -> usize {
        self.n_per_layer * self.n_layers
    }

    /// Copies block `(s, t)` out as an `N x N` matrix.
    pub fn block(&self, s: usize, t: usize) -> Matrix {
        let n = self.n_per_layer;
        Matrix::from_fn(n, n, |i, j| self.matrix.get(s * n + i, t * n + j))
    }
}

pub fn assemble_supra_adjacency(net: &TemporalNetwork) -> SupraMatrix {
    let n = net.n_per_layer();
    let t = net.n_layers();
    let mut a = Matrix::zeros(n * t, n * t);
    for (l, layer) in net.layers.iter().enumerate() {
        let adj = layer.adjacency();
        for i in 0..n {
            a.row_mut(l * n + i)[l * n..(l + 1) * n].copy_from_slice(adj.row(i));
        }
    }
    for (p, lo, hi) in net.pairs() {
        for i in 0..n {
            let w = net.weights.weight(p, i);
            a[(lo * n + i, hi * n + i)] = w;
            a[(hi * n + i, lo * n + i)] = w;
        }
    }
    SupraMatrix {
        n_per_layer: n,
        n_layers: t,
        kind: SupraKind::Adjacency,
        matrix: DenseSymMatrix::new(a).expect("assembled from symmetric parts"),
    }
}

/// Diagonal of the multilayer degree matrix: within-layer degree plus the
/// weights to the previous and next layer.
pub fn supra_degree(net: &TemporalNetwork) -> Vec<f64> {
    let n = net.n_per_layer();
    let mut deg = Vec::with_capacity(net.order());
    for layer in &net.layers {
        deg.extend_from_slice(&degree_vector(layer));
    }
    for (p, lo, hi) in net.pairs() {
        for i in 0..n {
            let w = net.weights.weight(p, i);
            deg[lo * n + i] += w;
            deg[hi * n + i] += w;
        }
    }
    deg
}

/// `I - D^{-1/2} A D^{-1/2}` for the supra-adjacency `A` and multilayer
/// degrees `D`.
pub fn supra_laplacian(net: &TemporalNetwork) -> Result<SupraMatrix> {
    let adj = assemble_supra_adjacency(net);
    let inv_sqrt = inverse_sqrt_degrees(&supra_degree(net))?;
    let a = adj.matrix.matrix();
    let order = net.order();
    let mut l = Matrix::zeros(order, order);
    for i in 0..order {
        let si = inv_sqrt[i];
        let row = l.row_mut(i);
        for (j, (x, &aij)) in row.iter_mut().zip(a.row(i)).enumerate() {
            if i == j {
                *x = 1.0;
            } else if aij != 0.0 {
                *x = -aij * (si * inv_sqrt[j]);
            }
        }
    }
    Ok(SupraMatrix {
        n_per_layer: adj.n_per_layer,
        n_layers: adj.n_layers,
        kind: SupraKind::Laplacian,
        matrix: DenseSymMatrix::new(l)?,
    })
}

/// Diagonal and off-diagonal blocks of the periodic constant model.
///
/// With every layer equal to `A` and uniform weight `omega`, the multilayer
/// degrees are `d + 2 omega`, so the supra-Laplacian has
/// `L~ = I - (D + 2 omega I)^{-1/2} A (D + 2 omega I)^{-1/2}` on its diagonal
/// and `L~_W = -omega (D + 2 omega I)^{-1}` on its ordinal off-diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantModelBlocks {
    pub l_tilde: DenseSymMatrix,
    /// Diagonal entries of `L~_W`, each in `(-1/2, 0]`.
    pub l_tilde_w: Vec<f64>,
    pub omega: f64,
    pub n_layers: usize,
}

impl ConstantModelBlocks {
    pub fn n_per_layer(&self) -> usize {
        self.l_tilde.order()
    }

    /// `(D + 2 omega I)^{1/2} 1`, the null vector of `L~ + 2 L~_W`.
    pub fn zero_mode_direction(&self, layer: &LayerGraph) -> Vec<f64> {
        degree_vector(layer)
            .iter()
            .map(|d| (d + 2.0 * self.omega).sqrt())
            .collect()
    }
}

pub fn constant_model_blocks(
    layer: &LayerGraph,
    omega: f64,
    n_layers: usize,
) -> Result<ConstantModelBlocks> {
    check_weight(omega)?;
    if n_layers < Coupling::Periodic.min_layers() {
        return Err(Error::BadDimension(format!(
            "the periodic constant model needs at least 3 layers, got {n_layers}"
        )));
    }
    let d = degree_vector(layer);
    let shifted: Vec<f64> = d.iter().map(|x| x + 2.0 * omega).collect();
    let inv_sqrt = inverse_sqrt_degrees(&shifted)?;
    let a = layer.adjacency();
    let l_tilde = DenseSymMatrix::from_lower_fn(layer.n_nodes(), |i, j| {
        if i == j {
            1.0
        } else {
            -a[(i, j)] * (inv_sqrt[i] * inv_sqrt[j])
        }
    });
    let l_tilde_w = inv_sqrt.iter().map(|s| -omega * (s * s)).collect();
    Ok(ConstantModelBlocks {
        l_tilde,
        l_tilde_w,
        omega,
        n_layers,
    })
}

/// Expands the blocks into the full periodic block-Jacobi supra-Laplacian.
pub fn expand_constant_model(blocks: &ConstantModelBlocks, n_layers: usize) -> Result<SupraMatrix> {
    if n_layers != blocks.n_layers || n_layers < 3 {
        return Err(Error::BadDimension(format!(
            "blocks were built for T = {}, asked to expand to T = {n_layers}",
            blocks.n_layers
        )));
    }
    let n = blocks.n_per_layer();
    let t = n_layers;
    let mut l = Matrix::zeros(n * t, n * t);
    for b in 0..t {
        for i in 0..n {
            l.row_mut(b * n + i)[b * n..(b + 1) * n]
                .copy_from_slice(blocks.l_tilde.matrix().row(i));
        }
        let next = (b + 1) % t;
        for (i, &w) in blocks.l_tilde_w.iter().enumerate() {
            l[(b * n + i, next * n + i)] = w;
            l[(next * n + i, b * n + i)] = w;
        }
    }
    Ok(SupraMatrix {
        n_per_layer: n,
        n_layers: t,
        kind: SupraKind::Laplacian,
        matrix: DenseSymMatrix::new(l)?,
    })
}

/// The normalized Laplacian of a single layer, re-exported for block-level
/// comparisons.
pub fn layer_laplacians(net: &TemporalNetwork) -> Result<Vec<DenseSymMatrix>> {
    net.layers.iter().map(normalized_laplacian).collect()
}
