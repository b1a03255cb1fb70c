//! Single time layers: validation, degrees, and the normalized Laplacian.

use std::collections::VecDeque;
use std::ops::Deref;

use crate::error::{Error, Result};
use crate::matrix::{normalize, DenseSymMatrix, Matrix};

/// One time layer: a binary, symmetric, loop-free, connected graph.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGraph {
    adjacency: Matrix,
}

impl LayerGraph {
    /// Validates `adjacency` and wraps it.
    pub fn new(adjacency: Matrix) -> Result<Self> {
        validate_adjacency(&adjacency)?;
        if !bfs_connected(&adjacency) {
            return Err(Error::Disconnected);
        }
        Ok(Self { adjacency })
    }

    /// Builds a layer on `n` nodes from an undirected edge list.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph(
                "a layer needs at least one node".into(),
            ));
        }
        let mut adj = Matrix::zeros(n, n);
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::IndexOutOfRange {
                    index: i.max(j),
                    bound: n,
                });
            }
            if i == j {
                return Err(Error::InvalidGraph(format!("self-loop at node {i}")));
            }
            adj[(i, j)] = 1.0;
            adj[(j, i)] = 1.0;
        }
        Self::new(adj)
    }

    pub fn n_nodes(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn adjacency(&self) -> &Matrix {
        &self.adjacency
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[(i, j)] != 0.0
    }

    /// Edges `(i, j)` with `i < j`, in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n_nodes();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if self.has_edge(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn n_edges(&self) -> usize {
        self.edges().len()
    }

    /// Fraction of the `N(N-1)/2` possible edges that are present.
    pub fn density(&self) -> f64 {
        let n = self.n_nodes() as f64;
        if n < 2.0 {
            return 0.0;
        }
        self.n_edges() as f64 / (n * (n - 1.0) / 2.0)
    }
}

/// Row sums of the adjacency matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeVector(Vec<f64>);

impl DegreeVector {
    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for DegreeVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

pub fn degree_vector(g: &LayerGraph) -> DegreeVector {
    let a = g.adjacency();
    DegreeVector((0..g.n_nodes()).map(|i| a.row(i).iter().sum()).collect())
}

/// BFS connectivity of a raw adjacency matrix. Symmetry, binary entries and a
/// zero diagonal are checked first.
pub fn is_connected(adjacency: &Matrix) -> Result<bool> {
    validate_adjacency(adjacency)?;
    Ok(bfs_connected(adjacency))
}

/// `L = I - D^{-1/2} A D^{-1/2}`.
pub fn normalized_laplacian(g: &LayerGraph) -> Result<DenseSymMatrix> {
    let d = degree_vector(g);
    let inv_sqrt = inverse_sqrt_degrees(&d)?;
    let a = g.adjacency();
    Ok(DenseSymMatrix::from_lower_fn(g.n_nodes(), |i, j| {
        if i == j {
            1.0
        } else {
            -a[(i, j)] * (inv_sqrt[i] * inv_sqrt[j])
        }
    }))
}

/// Unit-norm null vector of the normalized Laplacian, `D^{1/2} 1 / ||D^{1/2} 1||`.
pub fn zero_mode(g: &LayerGraph) -> Result<Vec<f64>> {
    let d = degree_vector(g);
    if let Some(node) = d.iter().position(|&x| x <= 0.0) {
        return Err(Error::ZeroDegree { node });
    }
    let mut v: Vec<f64> = d.iter().map(|x| x.sqrt()).collect();
    normalize(&mut v);
    Ok(v)
}

pub(crate) fn inverse_sqrt_degrees(d: &[f64]) -> Result<Vec<f64>> {
    d.iter()
        .enumerate()
        .map(|(node, &x)| {
            if x > 0.0 {
                Ok(1.0 / x.sqrt())
            } else {
                Err(Error::ZeroDegree { node })
            }
        })
        .collect()
}

fn validate_adjacency(a: &Matrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    if a.nrows() == 0 {
        return Err(Error::InvalidGraph(
            "a layer needs at least one node".into(),
        ));
    }
    let n = a.nrows();
    for i in 0..n {
        if a[(i, i)] != 0.0 {
            return Err(Error::InvalidGraph(format!("self-loop at node {i}")));
        }
        for j in 0..n {
            let x = a[(i, j)];
            if x != 0.0 && x != 1.0 {
                return Err(Error::InvalidGraph(format!(
                    "entry ({i}, {j}) = {x} is not binary"
                )));
            }
            if j > i && x != a[(j, i)] {
                return Err(Error::NotSymmetric {
                    row: i,
                    col: j,
                    diff: (x - a[(j, i)]).abs(),
                });
            }
        }
    }
    Ok(())
}

fn bfs_connected(a: &Matrix) -> bool {
    let n = a.nrows();
    if n == 0 {
        return false;
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut reached = 1;
    while let Some(u) = queue.pop_front() {
        for (v, &x) in a.row(u).iter().enumerate() {
            if x != 0.0 && !seen[v] {
                seen[v] = true;
                reached += 1;
                queue.push_back(v);
            }
        }
    }
    reached == n
}
