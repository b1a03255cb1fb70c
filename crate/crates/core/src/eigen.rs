//! Dense symmetric eigendecomposition.
//!
//! [`eigh`] is a self-contained Householder tridiagonalization followed by
//! implicit-shift QL iteration. It solves the reduced `N x N` problems of the
//! block-DFT route. [`oracle_eigh`] runs the blocked solver from `faer` and is
//! used for full `NT x NT` supra-Laplacians, where it serves as the
//! brute-force reference. Both outputs go through the same canonicalization:
//! ascending order, sign convention, and a stable order within ties.

use crate::error::{Error, Result};
use crate::matrix::{dot, fix_sign, DenseSymMatrix, Matrix};

/// Maximum QL iterations spent on a single eigenvalue.
pub const QL_ITERATION_CAP: usize = 64;

/// Eigenvalues closer than this (relative to `max(1, max |lambda|)`) are
/// treated as a tie when ordering the output.
pub const TIE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Provenance {
    /// Direct decomposition of the matrix itself.
    Dense,
    /// Eigenpairs of the reduced block `M_k`.
    Reduced { k: usize },
}

/// Ascending eigenvalues with orthonormal eigenvectors.
///
/// Row `i` of `eigenvectors` is the unit eigenvector paired with
/// `eigenvalues[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
    pub provenance: Provenance,
}

impl SpectralResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvector(&self, i: usize) -> &[f64] {
        self.eigenvectors.row(i)
    }

    /// Keeps only the `m` smallest eigenpairs.
    pub fn truncated(&self, m: usize) -> SpectralResult {
        let m = m.min(self.len());
        let dim = self.eigenvectors.ncols();
        SpectralResult {
            eigenvalues: self.eigenvalues[..m].to_vec(),
            eigenvectors: Matrix::from_vec(
                m,
                dim,
                self.eigenvectors.as_slice()[..m * dim].to_vec(),
            )
            .expect("prefix has consistent shape"),
            provenance: self.provenance,
        }
    }
}

/// Full eigendecomposition by Householder reduction and implicit QL.
pub fn eigh(m: &DenseSymMatrix) -> Result<SpectralResult> {
    let n = m.order();
    if n == 0 {
        return Ok(empty_result());
    }
    let mut work = m.matrix().clone();
    let (mut diag, mut offdiag, taus) = tridiagonalize(&mut work);
    let mut vectors = accumulate_reflectors(&work, &taus);
    tql2(&mut diag, &mut offdiag, &mut vectors)?;
    Ok(canonicalize(diag, vectors, Provenance::Dense))
}

/// Full eigendecomposition through `faer`; the reference for large orders.
pub fn oracle_eigh(m: &DenseSymMatrix) -> Result<SpectralResult> {
    let n = m.order();
    if n == 0 {
        return Ok(empty_result());
    }
    let a = faer::Mat::<f64>::from_fn(n, n, |i, j| m.get(i, j));
    let evd = a
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|_| Error::NoConvergence {
            order: n,
            cap: QL_ITERATION_CAP,
        })?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let values: Vec<f64> = (0..n).map(|i| s[i]).collect();
    let vectors = Matrix::from_fn(n, n, |i, j| u[(j, i)]);
    Ok(canonicalize(values, vectors, Provenance::Dense))
}

/// `max_i ||M v_i - lambda_i v_i||`.
pub fn eig_residual(m: &DenseSymMatrix, r: &SpectralResult) -> Result<f64> {
    let n = m.order();
    if r.eigenvectors.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: r.eigenvectors.ncols(),
        });
    }
    if r.eigenvectors.nrows() != r.eigenvalues.len() {
        return Err(Error::DimensionMismatch {
            expected: r.eigenvalues.len(),
            found: r.eigenvectors.nrows(),
        });
    }
    let mut worst: f64 = 0.0;
    for (i, &lambda) in r.eigenvalues.iter().enumerate() {
        let v = r.eigenvector(i);
        let mv = m.matvec(v);
        let res: f64 = mv
            .iter()
            .zip(v)
            .map(|(a, b)| (a - lambda * b).powi(2))
            .sum::<f64>()
            .sqrt();
        worst = worst.max(res);
    }
    Ok(worst)
}

fn empty_result() -> SpectralResult {
    SpectralResult {
        eigenvalues: Vec::new(),
        eigenvectors: Matrix::zeros(0, 0),
        provenance: Provenance::Dense,
    }
}

/// Sorts ascending, applies the sign convention, and orders tied eigenvalues
/// by the first nonzero component of their sign-fixed eigenvector.
/// `vectors` holds one eigenvector per row.
pub(crate) fn canonicalize(
    values: Vec<f64>,
    mut vectors: Matrix,
    provenance: Provenance,
) -> SpectralResult {
    let n = values.len();
    for i in 0..n {
        fix_sign(vectors.row_mut(i));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));

    let scale = values.iter().fold(1.0_f64, |acc, x| acc.max(x.abs()));
    let tol = TIE_TOLERANCE * scale;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] - values[order[end - 1]] <= tol {
            end += 1;
        }
        if end - start > 1 {
            order[start..end].sort_by(|&a, &b| {
                first_nonzero(vectors.row(a))
                    .total_cmp(&first_nonzero(vectors.row(b)))
                    .then(a.cmp(&b))
            });
        }
        start = end;
    }

    let dim = vectors.ncols();
    let mut sorted = Matrix::zeros(n, dim);
    for (dst, &src) in order.iter().enumerate() {
        sorted.row_mut(dst).copy_from_slice(vectors.row(src));
    }
    SpectralResult {
        eigenvalues: order.iter().map(|&i| values[i]).collect(),
        eigenvectors: sorted,
        provenance,
    }
}

fn first_nonzero(v: &[f64]) -> f64 {
    v.iter().copied().find(|x| x.abs() > 1e-14).unwrap_or(0.0)
}

/// Reduces the symmetric matrix in `a` to tridiagonal form `Q^T A Q = T`.
///
/// Returns `(diag, offdiag, taus)` with `offdiag[k] = T[k][k+1]` and
/// `offdiag[n-1] = 0`. On return, row `k` of `a` holds the Householder vector
/// of reflector `k` in columns `k+1..n` (leading entry implicitly 1).
fn tridiagonalize(a: &mut Matrix) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = a.nrows();
    let mut diag = vec![0.0; n];
    let mut offdiag = vec![0.0; n];
    let mut taus = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        diag[k] = a[(k, k)];
        let (alpha, tail_sq) = {
            let x = &a.row(k)[k + 1..];
            (x[0], x[1..].iter().map(|t| t * t).sum::<f64>())
        };
        if tail_sq == 0.0 {
            offdiag[k] = alpha;
            taus[k] = 0.0;
            let row = a.row_mut(k);
            row[k + 1] = 1.0;
            row[k + 2..].iter_mut().for_each(|x| *x = 0.0);
            continue;
        }
        let xnorm = (alpha * alpha + tail_sq).sqrt();
        let beta = if alpha >= 0.0 { -xnorm } else { xnorm };
        let tau = (beta - alpha) / beta;
        let scale = 1.0 / (alpha - beta);
        let v = &mut v[..m];
        v[0] = 1.0;
        for (j, vj) in v.iter_mut().enumerate().skip(1) {
            *vj = a[(k, k + 1 + j)] * scale;
        }
        offdiag[k] = beta;
        taus[k] = tau;

        // w = tau * A22 v - (tau^2 / 2)(v^T A22 v) v, then A22 -= v w^T + w v^T
        let p = &mut p[..m];
        for (i, pi) in p.iter_mut().enumerate() {
            *pi = tau * dot(&a.row(k + 1 + i)[k + 1..], v);
        }
        let c = 0.5 * tau * dot(p, v);
        for (pi, vi) in p.iter_mut().zip(v.iter()) {
            *pi -= c * vi;
        }
        for i in 0..m {
            let (vi, wi) = (v[i], p[i]);
            let row = &mut a.row_mut(k + 1 + i)[k + 1..];
            for ((x, &vj), &wj) in row.iter_mut().zip(v.iter()).zip(p.iter()) {
                *x -= vi * wj + wi * vj;
            }
        }
        a.row_mut(k)[k + 1..].copy_from_slice(v);
    }
    if n >= 2 {
        diag[n - 2] = a[(n - 2, n - 2)];
        offdiag[n - 2] = a[(n - 2, n - 1)];
    }
    diag[n - 1] = a[(n - 1, n - 1)];
    offdiag[n - 1] = 0.0;
    (diag, offdiag, taus)
}

/// Forms `Q^T` (one basis vector per row) from the stored reflectors.
fn accumulate_reflectors(reflectors: &Matrix, taus: &[f64]) -> Matrix {
    let n = reflectors.nrows();
    let mut q = Matrix::identity(n);
    let mut w = vec![0.0; n];
    for k in (0..n.saturating_sub(2)).rev() {
        let tau = taus[k];
        if tau == 0.0 {
            continue;
        }
        let v = &reflectors.row(k)[k + 1..];
        let w = &mut w[k + 1..];
        w.iter_mut().for_each(|x| *x = 0.0);
        for (i, &vi) in v.iter().enumerate() {
            let row = &q.row(k + 1 + i)[k + 1..];
            for (wj, &qj) in w.iter_mut().zip(row) {
                *wj += vi * qj;
            }
        }
        for (i, &vi) in v.iter().enumerate() {
            let f = tau * vi;
            let row = &mut q.row_mut(k + 1 + i)[k + 1..];
            for (qj, &wj) in row.iter_mut().zip(w.iter()) {
                *qj -= f * wj;
            }
        }
    }
    q.transpose()
}

/// Implicit-shift QL on the tridiagonal `(d, e)`, rotating the rows of `z`.
/// Derived from the EISPACK routine `tql2`.
fn tql2(d: &mut [f64], e: &mut [f64], z: &mut Matrix) -> Result<()> {
    let n = d.len();
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > QL_ITERATION_CAP {
                    return Err(Error::NoConvergence {
                        order: n,
                        cap: QL_ITERATION_CAP,
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    rotate_rows(z, i, s, c);
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

#[inline]
fn rotate_rows(z: &mut Matrix, i: usize, s: f64, c: f64) {
    let ncols = z.ncols();
    let (head, tail) = z.as_mut_slice().split_at_mut((i + 1) * ncols);
    let zi = &mut head[i * ncols..];
    let zi1 = &mut tail[..ncols];
    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
        let h = *b;
        *b = s * *a + c * h;
        *a = c * *a - s * h;
    }
}

/// Orthonormality defect `max |<v_i, v_j> - delta_ij|`.
pub fn orthonormality_defect(r: &SpectralResult) -> f64 {
    let n = r.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..=i {
            let g = dot(r.eigenvector(i), r.eigenvector(j));
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - target).abs());
        }
    }
    worst
}

/// `||M - V diag(lambda) V^T||_F`.
pub fn reconstruction_error(m: &DenseSymMatrix, r: &SpectralResult) -> f64 {
    let n = m.order();
    let mut recon = Matrix::zeros(n, n);
    for (k, &lambda) in r.eigenvalues.iter().enumerate() {
        let v = r.eigenvector(k);
        for i in 0..n {
            let f = lambda * v[i];
            if f == 0.0 {
                continue;
            }
            for (x, &vj) in recon.row_mut(i).iter_mut().zip(v) {
                *x += f * vj;
            }
        }
    }
    let mut diff = 0.0;
    for i in 0..n {
        for j in 0..n {
            diff += (m.get(i, j) - recon[(i, j)]).powi(2);
        }
    }
    diff.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sym(rows: &[Vec<f64>]) -> DenseSymMatrix {
        DenseSymMatrix::new(Matrix::from_rows(rows).unwrap()).unwrap()
    }

    fn random_sym(n: usize, seed: u64) -> DenseSymMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        DenseSymMatrix::from_lower_fn(n, |_, _| rng.random_range(-1.0..1.0))
    }

    fn check_invariants(m: &DenseSymMatrix, r: &SpectralResult) {
        assert_eq!(r.len(), m.order());
        for w in r.eigenvalues.windows(2) {
            assert!(w[0] <= w[1] + 1e-9, "not ascending: {w:?}");
        }
        assert!(orthonormality_defect(r) <= 1e-9);
        let fro = m.matrix().frobenius_norm().max(1.0);
        assert!(eig_residual(m, r).unwrap() <= 1e-8 * fro);
        let trace = m.matrix().trace();
        let sum: f64 = r.eigenvalues.iter().sum();
        assert!((sum - trace).abs() <= 1e-8 * trace.abs().max(1.0));
    }

    #[test]
    fn two_by_two_laplacian() {
        let m = sym(&[vec![1.0, -1.0], vec![-1.0, 1.0]]);
        let r = eigh(&m).unwrap();
        assert!((r.eigenvalues[0] - 0.0).abs() < 1e-15);
        assert!((r.eigenvalues[1] - 2.0).abs() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for (x, y) in r.eigenvector(0).iter().zip([h, h]) {
            assert!((x - y).abs() < 1e-15);
        }
        for (x, y) in r.eigenvector(1).iter().zip([h, -h]) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn identity_of_order_five() {
        let m = DenseSymMatrix::identity(5);
        let r = eigh(&m).unwrap();
        assert_eq!(r.eigenvalues, vec![1.0; 5]);
        check_invariants(&m, &r);
    }

    #[test]
    fn one_by_one_and_empty() {
        let r = eigh(&sym(&[vec![3.5]])).unwrap();
        assert_eq!(r.eigenvalues, vec![3.5]);
        assert_eq!(r.eigenvector(0), &[1.0]);
        assert!(eigh(&DenseSymMatrix::identity(0)).unwrap().is_empty());
    }

    #[test]
    fn diagonal_input_is_sorted() {
        let m = sym(&[
            vec![3.0, 0.0, 0.0],
            vec![0.0, -1.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ]);
        let r = eigh(&m).unwrap();
        assert_eq!(r.eigenvalues, vec![-1.0, 2.0, 3.0]);
        assert_eq!(r.eigenvector(0), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn er_laplacian_reconstructs() {
        let g = crate::generators::er_layer(
            &crate::generators::ErConfig {
                n_nodes: 30,
                edge_prob: 0.3,
                n_layers: 1,
                seed: 11,
            },
            0,
        )
        .unwrap();
        let l = crate::graph::normalized_laplacian(&g).unwrap();
        let r = eigh(&l).unwrap();
        check_invariants(&l, &r);
        assert!(reconstruction_error(&l, &r) <= 1e-8);
        assert!(r.eigenvalues[0] >= -1e-9);
        assert!(*r.eigenvalues.last().unwrap() <= 2.0 + 1e-10);
    }

    #[test]
    fn perturbed_eigenvalues_raise_residual() {
        let m = random_sym(12, 3);
        let mut r = eigh(&m).unwrap();
        assert!(eig_residual(&m, &r).unwrap() <= 1e-8);
        r.eigenvalues.iter_mut().for_each(|x| *x += 0.1);
        assert!(eig_residual(&m, &r).unwrap() >= 0.09);
    }

    #[test]
    fn residual_dimension_mismatch() {
        let r = eigh(&random_sym(4, 1)).unwrap();
        assert!(matches!(
            eig_residual(&random_sym(5, 1), &r),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn householder_and_oracle_agree() {
        for (n, seed) in [(2, 0), (3, 1), (17, 2), (64, 3), (150, 4)] {
            let m = random_sym(n, seed);
            let a = eigh(&m).unwrap();
            let b = oracle_eigh(&m).unwrap();
            check_invariants(&m, &a);
            check_invariants(&m, &b);
            for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
                assert!((x - y).abs() <= 1e-10, "n={n}: {x} vs {y}");
            }
            // random spectra are simple, so sign-fixed vectors coincide
            for i in 0..n {
                for (x, y) in a.eigenvector(i).iter().zip(b.eigenvector(i)) {
                    assert!((x - y).abs() <= 1e-7);
                }
            }
        }
    }

    #[test]
    fn deterministic_bits() {
        let m = random_sym(40, 9);
        assert_eq!(eigh(&m).unwrap(), eigh(&m).unwrap());
        assert_eq!(oracle_eigh(&m).unwrap(), oracle_eigh(&m).unwrap());
    }

    #[test]
    fn degenerate_spectrum() {
        // K4 normalized Laplacian: {0, 4/3, 4/3, 4/3}
        let g = crate::graph::LayerGraph::from_edges(
            4,
            &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        )
        .unwrap();
        let l = crate::graph::normalized_laplacian(&g).unwrap();
        let r = eigh(&l).unwrap();
        check_invariants(&l, &r);
        for x in &r.eigenvalues[1..] {
            assert!((x - 4.0 / 3.0).abs() < 1e-14);
        }
        let firsts: Vec<f64> = (1..4).map(|i| first_nonzero(r.eigenvector(i))).collect();
        assert!(firsts.windows(2).all(|w| w[0] <= w[1]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn decomposition_invariants(n in 1usize..24, seed in any::<u64>()) {
            let m = random_sym(n, seed);
            let r = eigh(&m).unwrap();
            check_invariants(&m, &r);
            prop_assert!(reconstruction_error(&m, &r) <= 1e-10 * (n as f64));
        }
    }
}
