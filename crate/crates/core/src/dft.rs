//! Block Fourier reduction of the periodic constant model.
//!
//! Blocks are indexed `j = 0..T-1`. The forward transform is
//! `psi_hat(k) = sum_j exp(-2 pi i j k / T) psi_j` and the inverse carries
//! the `1/T` factor. Under this transform the supra-Laplacian eigenproblem
//! splits into the reduced problems `M_k v = lambda v` with
//! `M_k = L~ + 2 cos(2 pi k / T) L~_W`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::eigen::{eigh, Provenance, SpectralResult};
use crate::error::{Error, Result};
use crate::matrix::{norm, normalize, DenseSymMatrix};
use crate::supra::ConstantModelBlocks;

/// Unit-norm tolerance for vectors handed to [`lift_eigenvector`].
pub const UNIT_NORM_TOLERANCE: f64 = 1e-9;

/// `cos(2 pi k / T)`, evaluated on `min(k, T - k)` so that `k` and `T - k`
/// give bit-identical results.
pub fn block_cosine(k: usize, n_layers: usize) -> f64 {
    let k = k % n_layers;
    let folded = k.min(n_layers - k);
    (TAU * folded as f64 / n_layers as f64).cos()
}

/// Cosine and sine of `2 pi j k / T`, reduced mod `T` first.
fn phase(j: usize, k: usize, n_layers: usize) -> (f64, f64) {
    let r = (j * k) % n_layers;
    let angle = TAU * r as f64 / n_layers as f64;
    (angle.cos(), angle.sin())
}

/// One reduced problem `M_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedBlock {
    pub k: usize,
    pub matrix: DenseSymMatrix,
    pub cosine: f64,
}

pub fn reduced_matrix(blocks: &ConstantModelBlocks, k: usize) -> Result<ReducedBlock> {
    let t = blocks.n_layers;
    if k >= t {
        return Err(Error::IndexOutOfRange { index: k, bound: t });
    }
    let cosine = block_cosine(k, t);
    let mut m = blocks.l_tilde.matrix().clone();
    for (i, w) in blocks.l_tilde_w.iter().enumerate() {
        m[(i, i)] += 2.0 * cosine * w;
    }
    Ok(ReducedBlock {
        k,
        matrix: DenseSymMatrix::new(m)?,
        cosine,
    })
}

/// Decomposes every `M_k`, `k = 0..T-1`. Only `k <= T/2` is solved; the
/// mirrored blocks reuse those results since `M_k == M_{T-k}` exactly.
pub fn reduced_spectra(blocks: &ConstantModelBlocks) -> Result<Vec<SpectralResult>> {
    let t = blocks.n_layers;
    let half: Vec<SpectralResult> = (0..=t / 2)
        .map(|k| {
            let mut r = eigh(&reduced_matrix(blocks, k)?.matrix)?;
            r.provenance = Provenance::Reduced { k };
            Ok(r)
        })
        .collect::<Result<_>>()?;
    Ok((0..t)
        .map(|k| {
            let mut r = half[k.min(t - k)].clone();
            r.provenance = Provenance::Reduced { k };
            r
        })
        .collect())
}

/// An eigenvalue of the full supra-Laplacian together with the reduced
/// problem it came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MergedEigenpair {
    pub eigenvalue: f64,
    pub k: usize,
    /// Unit eigenvector of `M_k`, length `N`.
    pub vector: Vec<f64>,
}

/// The union of all reduced spectra, sorted by `(eigenvalue, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MergedSpectrum {
    pub n_per_layer: usize,
    pub n_layers: usize,
    pub pairs: Vec<MergedEigenpair>,
}

impl MergedSpectrum {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.eigenvalue).collect()
    }

    pub fn lifted(&self, i: usize) -> Result<LiftedEigenpair> {
        let p = &self.pairs[i];
        lift_eigenvector(&p.vector, p.eigenvalue, p.k, self.n_layers)
    }

    /// A real `NT` eigenvector for entry `i`. Entries with `k <= T/2` use the
    /// cosine lift and entries with `k > T/2` the sine lift, so the mirrored
    /// pair `(k, T-k)` yields two orthogonal vectors.
    pub fn full_eigenvector(&self, i: usize) -> Result<Vec<f64>> {
        let p = &self.pairs[i];
        let lifted = self.lifted(i)?;
        if 2 * p.k <= self.n_layers {
            Ok(lifted.psi_r)
        } else {
            lifted
                .psi_i
                .ok_or_else(|| Error::InvalidConfig(format!("no sine lift for k = {}", p.k)))
        }
    }
}

pub fn full_spectrum(blocks: &ConstantModelBlocks) -> Result<MergedSpectrum> {
    let spectra = reduced_spectra(blocks)?;
    let mut pairs = Vec::with_capacity(blocks.n_per_layer() * blocks.n_layers);
    for (k, r) in spectra.iter().enumerate() {
        for (i, &eigenvalue) in r.eigenvalues.iter().enumerate() {
            pairs.push(MergedEigenpair {
                eigenvalue,
                k,
                vector: r.eigenvector(i).to_vec(),
            });
        }
    }
    pairs.sort_by(|a, b| a.eigenvalue.total_cmp(&b.eigenvalue).then(a.k.cmp(&b.k)));
    Ok(MergedSpectrum {
        n_per_layer: blocks.n_per_layer(),
        n_layers: blocks.n_layers,
        pairs,
    })
}

/// Real and imaginary parts of the block sinusoid built from a reduced
/// eigenvector, each scaled to unit norm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftedEigenpair {
    pub eigenvalue: f64,
    pub k: usize,
    pub psi_r: Vec<f64>,
    /// Absent when the sine profile vanishes, i.e. `k = 0` or `2k = T`.
    pub psi_i: Option<Vec<f64>>,
}

pub fn lift_eigenvector(
    v: &[f64],
    eigenvalue: f64,
    k: usize,
    n_layers: usize,
) -> Result<LiftedEigenpair> {
    if k >= n_layers {
        return Err(Error::IndexOutOfRange {
            index: k,
            bound: n_layers,
        });
    }
    let nv = norm(v);
    if (nv - 1.0).abs() > UNIT_NORM_TOLERANCE {
        return Err(Error::NotUnitNorm { norm: nv });
    }
    let n = v.len();
    let mut psi_r = vec![0.0; n * n_layers];
    let mut psi_i = vec![0.0; n * n_layers];
    for j in 0..n_layers {
        let (c, s) = phase(j, k, n_layers);
        for (i, &x) in v.iter().enumerate() {
            psi_r[j * n + i] = c * x;
            psi_i[j * n + i] = s * x;
        }
    }
    normalize(&mut psi_r);
    let has_sine = k != 0 && 2 * k != n_layers;
    let psi_i = if has_sine {
        normalize(&mut psi_i);
        Some(psi_i)
    } else {
        None
    };
    Ok(LiftedEigenpair {
        eigenvalue,
        k,
        psi_r,
        psi_i,
    })
}

fn check_length(len: usize, n_layers: usize) -> Result<usize> {
    if n_layers == 0 || !len.is_multiple_of(n_layers) {
        return Err(Error::BadLength {
            len,
            blocks: n_layers,
        });
    }
    Ok(len / n_layers)
}

/// Forward block DFT of a real vector.
pub fn dft_blocks(psi: &[f64], n_layers: usize) -> Result<Vec<Vec<Complex64>>> {
    let complex: Vec<Complex64> = psi.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    dft_blocks_complex(&complex, n_layers)
}

/// Forward block DFT: `psi_hat(k) = sum_j exp(-2 pi i j k / T) psi_j`.
pub fn dft_blocks_complex(psi: &[Complex64], n_layers: usize) -> Result<Vec<Vec<Complex64>>> {
    let n = check_length(psi.len(), n_layers)?;
    Ok((0..n_layers)
        .map(|k| {
            let mut out = vec![Complex64::new(0.0, 0.0); n];
            for j in 0..n_layers {
                let (c, s) = phase(j, k, n_layers);
                let w = Complex64::new(c, -s);
                for (o, x) in out.iter_mut().zip(&psi[j * n..(j + 1) * n]) {
                    *o += w * x;
                }
            }
            out
        })
        .collect())
}

/// Inverse block DFT: `psi_j = (1/T) sum_k exp(2 pi i j k / T) psi_hat(k)`.
pub fn inverse_dft_blocks(hat: &[Vec<Complex64>]) -> Result<Vec<Complex64>> {
    let t = hat.len();
    if t == 0 {
        return Err(Error::BadLength { len: 0, blocks: 0 });
    }
    let n = hat[0].len();
    if let Some(bad) = hat.iter().find(|h| h.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bad.len(),
        });
    }
    let scale = 1.0 / t as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); n * t];
    for j in 0..t {
        let block = &mut out[j * n..(j + 1) * n];
        for (k, h) in hat.iter().enumerate() {
            let (c, s) = phase(j, k, t);
            let w = Complex64::new(c, s);
            for (o, x) in block.iter_mut().zip(h) {
                *o += w * x;
            }
        }
        block.iter_mut().for_each(|x| *x *= scale);
    }
    Ok(out)
}

/// The `m` smallest eigenvalues of every `M_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenvalueTable {
    pub m: usize,
    pub n_layers: usize,
    /// `columns[k][j]` is the `(j+1)`-th smallest eigenvalue of `M_k`.
    pub columns: Vec<Vec<f64>>,
}

impl EigenvalueTable {
    /// Entry `(j, k)` with `j` 0-based.
    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.columns[k][j]
    }

    pub fn column(&self, k: usize) -> &[f64] {
        &self.columns[k]
    }

    pub fn row(&self, j: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[j]).collect()
    }
}

pub fn eigenvalue_table(blocks: &ConstantModelBlocks, m: usize) -> Result<EigenvalueTable> {
    let n = blocks.n_per_layer();
    if m > n {
        return Err(Error::IndexOutOfRange { index: m, bound: n });
    }
    let columns = reduced_spectra(blocks)?
        .into_iter()
        .map(|r| r.eigenvalues[..m].to_vec())
        .collect();
    Ok(EigenvalueTable {
        m,
        n_layers: blocks.n_layers,
        columns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{eig_residual, oracle_eigh};
    use crate::generators::{er_layer, ErConfig};
    use crate::graph::fixtures::{k2, k3};
    use crate::graph::{normalized_laplacian, LayerGraph};
    use crate::matrix::dot;
    use crate::supra::{constant_model_blocks, expand_constant_model};
    use proptest::prelude::*;

    fn er(n: usize, p: f64, seed: u64) -> LayerGraph {
        er_layer(
            &ErConfig {
                n_nodes: n,
                edge_prob: p,
                n_layers: 1,
                seed,
            },
            0,
        )
        .unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn reduced_endpoints() {
        let b = constant_model_blocks(&er(12, 0.4, 1), 0.7, 6).unwrap();
        let m0 = reduced_matrix(&b, 0).unwrap();
        let m3 = reduced_matrix(&b, 3).unwrap();
        for i in 0..12 {
            for j in 0..12 {
                let base = b.l_tilde.get(i, j);
                let w = if i == j { b.l_tilde_w[i] } else { 0.0 };
                assert!((m0.matrix.get(i, j) - (base + 2.0 * w)).abs() <= 1e-14);
                assert!((m3.matrix.get(i, j) - (base - 2.0 * w)).abs() <= 1e-14);
            }
        }
        assert!(matches!(
            reduced_matrix(&b, 6),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn mirrored_blocks_bitwise_equal() {
        for t in 3..12 {
            let b = constant_model_blocks(&er(8, 0.5, t as u64), 1.3, t).unwrap();
            for k in 1..t {
                let a = reduced_matrix(&b, k).unwrap();
                let m = reduced_matrix(&b, t - k).unwrap();
                assert_eq!(a.matrix, m.matrix);
                assert_eq!(a.cosine.to_bits(), m.cosine.to_bits());
            }
        }
    }

    #[test]
    fn zero_weight_gives_copies_of_layer_spectrum() {
        let g = er(10, 0.4, 2);
        let b = constant_model_blocks(&g, 0.0, 4).unwrap();
        let s = full_spectrum(&b).unwrap();
        let layer = eigh(&normalized_laplacian(&g).unwrap())
            .unwrap()
            .eigenvalues;
        let mut expected: Vec<f64> = layer.iter().flat_map(|&x| [x; 4]).collect();
        expected.sort_by(f64::total_cmp);
        for (a, e) in s.eigenvalues().iter().zip(&expected) {
            assert!((a - e).abs() <= 1e-12);
        }
    }

    #[test]
    fn smallest_is_zero_at_k0() {
        let g = er(15, 0.3, 9);
        let b = constant_model_blocks(&g, 1.0, 5).unwrap();
        let s = full_spectrum(&b).unwrap();
        let first = &s.pairs[0];
        assert_eq!(first.k, 0);
        assert!(first.eigenvalue.abs() <= 1e-12);
        let mut z = b.zero_mode_direction(&g);
        normalize(&mut z);
        assert!((dot(&z, &first.vector).abs() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn union_matches_dense_oracle() {
        let g = er(40, 0.3, 4);
        let b = constant_model_blocks(&g, 1.0, 10).unwrap();
        let merged = full_spectrum(&b).unwrap().eigenvalues();
        let dense = oracle_eigh(&expand_constant_model(&b, 10).unwrap().matrix).unwrap();
        assert_eq!(merged.len(), 400);
        for (a, e) in merged.iter().zip(&dense.eigenvalues) {
            assert!((a - e).abs() <= 1e-8);
        }
    }

    #[test]
    fn regular_layer_shift() {
        // K3 is 2-regular: M_k = (1 - 2c w/(2+2w)) I - A/(2+2w), so every
        // eigenvalue of L~ moves by -2 cos(2 pi k/T) w/(d + 2w).
        let (omega, t, d) = (0.8, 7, 2.0);
        let b = constant_model_blocks(&k3(), omega, t).unwrap();
        let base = eigh(&b.l_tilde).unwrap().eigenvalues;
        let table = eigenvalue_table(&b, 3).unwrap();
        for k in 0..t {
            let shift = -2.0 * block_cosine(k, t) * omega / (d + 2.0 * omega);
            for (j, b) in base.iter().enumerate() {
                assert!((table.get(j, k) - (b + shift)).abs() <= 1e-13);
            }
        }
    }

    #[test]
    fn table_columns_and_monotonicity() {
        let t = 9;
        let b = constant_model_blocks(&er(20, 0.3, 6), 0.5, t).unwrap();
        let table = eigenvalue_table(&b, 20).unwrap();
        for k in 1..t {
            assert_eq!(table.column(k), table.column(t - k));
        }
        for j in 0..20 {
            let row = table.row(j);
            for k in 0..t / 2 {
                assert!(row[k] <= row[k + 1] + 1e-10);
            }
        }
        assert!(eigenvalue_table(&b, 21).is_err());
    }

    #[test]
    fn lift_profiles() {
        let v = [1.0];
        let l = lift_eigenvector(&v, 0.0, 1, 4).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(l.psi_r.len(), 4);
        for (a, e) in l.psi_r.iter().zip([h, 0.0, -h, 0.0]) {
            assert!((a - e).abs() < 1e-15);
        }
        for (a, e) in l.psi_i.unwrap().iter().zip([0.0, h, 0.0, -h]) {
            assert!((a - e).abs() < 1e-15);
        }
        let l0 = lift_eigenvector(&[0.6, 0.8], 0.0, 0, 3).unwrap();
        assert!(l0.psi_i.is_none());
        let s = 1.0 / 3f64.sqrt();
        for (j, x) in l0.psi_r.iter().enumerate() {
            let e = [0.6, 0.8][j % 2] * s;
            assert!((x - e).abs() < 1e-15);
        }
        assert!(lift_eigenvector(&[1.0], 0.0, 2, 4).unwrap().psi_i.is_none());
        assert!(matches!(
            lift_eigenvector(&[2.0], 0.0, 0, 4),
            Err(Error::NotUnitNorm { .. })
        ));
        assert!(lift_eigenvector(&[1.0], 0.0, 4, 4).is_err());
    }

    #[test]
    fn lifted_k2_residuals() {
        let b = constant_model_blocks(&k2(), 1.0, 6).unwrap();
        let full = expand_constant_model(&b, 6).unwrap();
        let r = eigh(&reduced_matrix(&b, 2).unwrap().matrix).unwrap();
        for i in 0..2 {
            let l = lift_eigenvector(r.eigenvector(i), r.eigenvalues[i], 2, 6).unwrap();
            for psi in [Some(&l.psi_r), l.psi_i.as_ref()].into_iter().flatten() {
                let res: Vec<f64> = full
                    .matrix
                    .matvec(psi)
                    .iter()
                    .zip(psi)
                    .map(|(a, x)| a - l.eigenvalue * x)
                    .collect();
                assert!(norm(&res) <= 1e-10);
            }
        }
    }

    #[test]
    fn full_eigenvectors_form_orthonormal_eigenbasis() {
        let t = 6;
        let b = constant_model_blocks(&er(8, 0.5, 3), 0.9, t).unwrap();
        let full = expand_constant_model(&b, t).unwrap();
        let s = full_spectrum(&b).unwrap();
        let vecs: Vec<Vec<f64>> = (0..s.len())
            .map(|i| s.full_eigenvector(i).unwrap())
            .collect();
        let result = SpectralResult {
            eigenvalues: s.eigenvalues(),
            eigenvectors: crate::matrix::Matrix::from_rows(&vecs).unwrap(),
            provenance: Provenance::Dense,
        };
        assert!(eig_residual(&full.matrix, &result).unwrap() <= 1e-10);
        assert!(crate::eigen::orthonormality_defect(&result) <= 1e-10);
    }

    #[test]
    fn dft_of_constant_blocks() {
        let v = [1.0, -2.0, 0.5];
        let psi: Vec<f64> = (0..5).flat_map(|_| v).collect();
        let hat = dft_blocks(&psi, 5).unwrap();
        for (k, h) in hat.iter().enumerate() {
            for (x, &vi) in h.iter().zip(&v) {
                let e = if k == 0 { 5.0 * vi } else { 0.0 };
                assert!((x - c(e, 0.0)).norm() <= 1e-13);
            }
        }
        assert!(matches!(
            dft_blocks(&psi, 4),
            Err(Error::BadLength { len: 15, blocks: 4 })
        ));
    }

    #[test]
    fn dft_of_single_mode() {
        let (t, khat) = (7, 3);
        let v = [0.3, -0.4];
        let psi: Vec<Complex64> = (0..t)
            .flat_map(|j| {
                let a = TAU * (j * khat) as f64 / t as f64;
                v.map(|x| Complex64::from_polar(1.0, a) * x)
            })
            .collect();
        let hat = dft_blocks_complex(&psi, t).unwrap();
        for (k, h) in hat.iter().enumerate() {
            for (x, &vi) in h.iter().zip(&v) {
                let e = if k == khat { t as f64 * vi } else { 0.0 };
                assert!((x - c(e, 0.0)).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn inclusion_a_on_dense_eigenvectors() {
        let t = 5;
        let b = constant_model_blocks(&er(9, 0.4, 12), 0.6, t).unwrap();
        let full = oracle_eigh(&expand_constant_model(&b, t).unwrap().matrix).unwrap();
        let ms: Vec<_> = (0..t).map(|k| reduced_matrix(&b, k).unwrap()).collect();
        for i in 0..full.len() {
            let lambda = full.eigenvalues[i];
            let hat = dft_blocks(full.eigenvector(i), t).unwrap();
            for (k, h) in hat.iter().enumerate() {
                let hn = h.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                if hn <= 1e-6 {
                    continue;
                }
                let re: Vec<f64> = h.iter().map(|x| x.re).collect();
                let im: Vec<f64> = h.iter().map(|x| x.im).collect();
                let (mr, mi) = (ms[k].matrix.matvec(&re), ms[k].matrix.matvec(&im));
                let res: f64 = (0..h.len())
                    .map(|n| (mr[n] - lambda * re[n]).powi(2) + (mi[n] - lambda * im[n]).powi(2))
                    .sum::<f64>()
                    .sqrt();
                assert!(res <= 1e-7 * hn, "i={i} k={k} res={res}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn round_trip(t in 1usize..9, n in 1usize..6, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let psi: Vec<f64> = (0..n * t).map(|_| rng.random_range(-1.0..1.0)).collect();
            let back = inverse_dft_blocks(&dft_blocks(&psi, t).unwrap()).unwrap();
            for (x, y) in psi.iter().zip(&back) {
                prop_assert!((c(*x, 0.0) - y).norm() <= 1e-10);
            }
        }

        #[test]
        fn lift_pair_is_orthogonal(t in 3usize..16, kk in 0usize..16, n in 1usize..5) {
            let k = kk % t;
            let mut v: Vec<f64> = (0..n).map(|i| (i as f64 + 1.0).sin()).collect();
            normalize(&mut v);
            let l = lift_eigenvector(&v, 0.0, k, t).unwrap();
            prop_assert!((norm(&l.psi_r) - 1.0).abs() <= 1e-12);
            prop_assert_eq!(l.psi_i.is_none(), k == 0 || 2 * k == t);
            if let Some(pi) = &l.psi_i {
                prop_assert!((norm(pi) - 1.0).abs() <= 1e-12);
                prop_assert!(dot(&l.psi_r, pi).abs() <= 1e-9);
            }
        }
    }
}
