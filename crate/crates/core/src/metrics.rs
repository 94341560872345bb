// Copyright 2026 The pulseprep Authors
// SPDX-License-Identifier: Apache-2.0

//! Entanglement and distance measures for two- and three-qubit states.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{basis_label, StateVector};
use crate::error::{Error, Result};
use crate::protocol::ProtocolKind;

pub const METRICS_SCHEMA: &str = "pulseprep.metrics/1";

/// Target pairwise concurrence of the W state.
pub const W_CONCURRENCE: f64 = 2.0 / 3.0;

const NORM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    /// Local dimension of each site, site 0 least significant.
    pub dims: Vec<usize>,
    pub entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn from_pure(psi: &StateVector, dims: &[usize]) -> Result<Self> {
        check_dims(psi.dim(), dims)?;
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        Ok(Self {
            dims: dims.to_vec(),
            entries: &v * v.adjoint(),
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.entries)
    }

    /// Hermitian, unit trace and PSD within `tol`.
    pub fn is_valid(&self, tol: f64) -> bool {
        let herm = (&self.entries - self.entries.adjoint()).iter().all(|z| z.norm() < tol);
        let trace = (self.trace() - Complex64::new(1.0, 0.0)).norm() < tol;
        herm && trace && self.eigenvalues().iter().all(|&e| e >= -tol)
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        (&self.entries * &self.entries).trace().re
    }
}

fn check_dims(dim: usize, dims: &[usize]) -> Result<()> {
    let product: usize = dims.iter().product();
    if product != dim || dims.iter().any(|&d| d < 2) {
        return Err(Error::Dimension(format!(
            "site dimensions {dims:?} do not factor a {dim}-dimensional space"
        )));
    }
    Ok(())
}

fn check_normalized(psi: &StateVector) -> Result<()> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::Normalization { norm });
    }
    Ok(())
}

fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(sym).eigenvalues.iter().copied().collect()
}

fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    dims.iter()
        .map(|&d| {
            let q = index % d;
            index /= d;
            q
        })
        .collect()
}

fn compose(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).rev().fold(0, |acc, (q, d)| acc * d + q)
}

/// Reduced state on `keep` (kept sites stay in ascending order, the smallest
/// one least significant).
pub fn partial_trace(psi: &StateVector, keep: &[usize], dims: &[usize]) -> Result<DensityMatrix> {
    check_dims(psi.dim(), dims)?;
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.iter().any(|&s| s >= dims.len()) {
        return Err(Error::Dimension(format!("kept sites {keep:?} exceed {} sites", dims.len())));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|s| !keep.contains(s)).collect();
    let keep_dims: Vec<usize> = keep.iter().map(|&s| dims[s]).collect();
    let env_dims: Vec<usize> = traced.iter().map(|&s| dims[s]).collect();
    let kd: usize = keep_dims.iter().product();
    let ed: usize = env_dims.iter().product();
    // psi reshaped as (kept, environment)
    let mut m = DMatrix::<Complex64>::zeros(kd, ed);
    for (index, amp) in psi.amplitudes().iter().enumerate() {
        let q = digits(index, dims);
        let k: Vec<usize> = keep.iter().map(|&s| q[s]).collect();
        let e: Vec<usize> = traced.iter().map(|&s| q[s]).collect();
        m[(compose(&k, &keep_dims), compose(&e, &env_dims))] = *amp;
    }
    Ok(DensityMatrix {
        dims: keep_dims,
        entries: &m * m.adjoint(),
    })
}

/// Partial transpose of `rho` over the listed sites.
pub fn partial_transpose(rho: &DensityMatrix, sites: &[usize]) -> Result<DMatrix<Complex64>> {
    check_dims(rho.dim(), &rho.dims)?;
    if sites.iter().any(|&s| s >= rho.dims.len()) {
        return Err(Error::Dimension(format!(
            "transposed sites {sites:?} exceed {} sites",
            rho.dims.len()
        )));
    }
    let n = rho.dim();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        let di = digits(i, &rho.dims);
        for j in 0..n {
            let dj = digits(j, &rho.dims);
            let (mut a, mut b) = (di.clone(), dj.clone());
            for &s in sites {
                std::mem::swap(&mut a[s], &mut b[s]);
            }
            out[(compose(&a, &rho.dims), compose(&b, &rho.dims))] = rho.entries[(i, j)];
        }
    }
    Ok(out)
}

/// Sum of the magnitudes of the negative eigenvalues of the partial
/// transpose over `subsystem`: `(||rho^T_A||_1 - 1) / 2`.
pub fn negativity(rho: &DensityMatrix, subsystem: &[usize]) -> Result<f64> {
    if subsystem.is_empty() || subsystem.len() >= rho.dims.len() {
        return Err(Error::Dimension(format!(
            "bipartition {subsystem:?} of {} sites is not a proper cut",
            rho.dims.len()
        )));
    }
    let pt = partial_transpose(rho, subsystem)?;
    Ok(hermitian_eigenvalues(&pt).iter().filter(|&&e| e < 0.0).map(|e| -e).sum())
}

fn sigma_yy() -> DMatrix<Complex64> {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    // sigma_y (x) sigma_y = anti-diagonal (-1, 1, 1, -1)
    let mut m = DMatrix::from_element(4, 4, z);
    m[(0, 3)] = -one;
    m[(1, 2)] = one;
    m[(2, 1)] = one;
    m[(3, 0)] = -one;
    m
}

/// `W` with `rho = W W^+`, dropping non-positive eigen-directions.
fn factor(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let cols: Vec<_> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0.0)
        .map(|(k, &e)| eig.eigenvectors.column(k) * Complex64::new(e.sqrt(), 0.0))
        .collect();
    if cols.is_empty() {
        return DMatrix::zeros(m.nrows(), 1);
    }
    DMatrix::from_columns(&cols)
}

/// Wootters concurrence of a two-qubit density matrix.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::Dimension(format!("concurrence needs a 4x4 state, got {}", rho.dim())));
    }
    // The square roots of the eigenvalues of rho rho~ are the singular values
    // of W^T (sy x sy) W. This avoids square-rooting round-off near zero.
    let w = factor(&rho.entries);
    let t = w.transpose() * sigma_yy() * &w;
    let mut lambdas: Vec<f64> = t.svd(false, false).singular_values.iter().copied().collect();
    lambdas.resize(4.max(lambdas.len()), 0.0);
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1..].iter().sum::<f64>()).max(0.0))
}

fn qubit_dims(psi: &StateVector, sites: usize) -> Result<Vec<usize>> {
    if psi.dim() != 1 << sites {
        return Err(Error::Dimension(format!(
            "expected a {sites}-qubit state (dimension {}), got {}",
            1 << sites,
            psi.dim()
        )));
    }
    Ok(vec![2; sites])
}

/// Concurrences `[C01, C02, C12]` of the pairwise reductions of a 3-qubit state.
pub fn pairwise_concurrences(psi: &StateVector) -> Result<[f64; 3]> {
    let dims = qubit_dims(psi, 3)?;
    let mut out = [0.0; 3];
    for (slot, pair) in PAIRS.iter().enumerate() {
        out[slot] = concurrence(&partial_trace(psi, pair, &dims)?)?;
    }
    Ok(out)
}

const PAIRS: [[usize; 2]; 3] = [[0, 1], [0, 2], [1, 2]];

/// Three-tangle from the Cayley hyperdeterminant of the amplitudes.
pub fn three_tangle(psi: &StateVector) -> Result<f64> {
    qubit_dims(psi, 3)?;
    check_normalized(psi)?;
    let a = |q2: usize, q1: usize, q0: usize| psi.amplitudes()[q2 << 2 | q1 << 1 | q0];
    let (a000, a001, a010, a011) = (a(0, 0, 0), a(0, 0, 1), a(0, 1, 0), a(0, 1, 1));
    let (a100, a101, a110, a111) = (a(1, 0, 0), a(1, 0, 1), a(1, 1, 0), a(1, 1, 1));
    let d1 = a000 * a000 * a111 * a111
        + a001 * a001 * a110 * a110
        + a010 * a010 * a101 * a101
        + a100 * a100 * a011 * a011;
    let d2 = a000 * a111 * a011 * a100
        + a000 * a111 * a101 * a010
        + a000 * a111 * a110 * a001
        + a011 * a100 * a101 * a010
        + a011 * a100 * a110 * a001
        + a101 * a010 * a110 * a001;
    let d3 = a000 * a110 * a101 * a011 + a111 * a001 * a010 * a100;
    Ok(4.0 * (d1 - d2 * 2.0 + d3 * 4.0).norm())
}

/// `C^2_{0(12)} - C^2_{01} - C^2_{02}` with `C^2_{0(12)} = 2 (1 - Tr rho_0^2)`.
pub fn ckw_residual(psi: &StateVector) -> Result<f64> {
    let dims = qubit_dims(psi, 3)?;
    check_normalized(psi)?;
    let rho0 = partial_trace(psi, &[0], &dims)?;
    let c = pairwise_concurrences(psi)?;
    Ok(2.0 * (1.0 - rho0.purity()) - c[0] * c[0] - c[1] * c[1])
}

/// `sqrt(sum_{i<j} (C_ij - 2/3)^2)` over the three pairwise reductions.
pub fn w_cost(psi: &StateVector) -> Result<f64> {
    check_normalized(psi)?;
    let c = pairwise_concurrences(psi)?;
    Ok(c.iter().map(|x| (x - W_CONCURRENCE).powi(2)).sum::<f64>().sqrt())
}

/// Pure-state Bures distance `sqrt(2 - 2 |<psi|phi>|)`.
pub fn bures_distance(psi: &StateVector, phi: &StateVector) -> Result<f64> {
    if psi.dim() != phi.dim() {
        return Err(Error::Dimension(format!("{} vs {}", psi.dim(), phi.dim())));
    }
    check_normalized(psi)?;
    check_normalized(phi)?;
    let overlap = psi.inner(phi).norm().min(1.0);
    Ok((2.0 - 2.0 * overlap).max(0.0).sqrt())
}

/// Canonical representative: `(|00>+|11>)/sqrt2`, `(|000>+|111>)/sqrt2` or
/// `(|001>+|010>+|100>)/sqrt3`.
pub fn canonical_state(kind: ProtocolKind) -> StateVector {
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << kind.sites()];
    let ones: &[usize] = match kind {
        ProtocolKind::Bell => &[0, 3],
        ProtocolKind::Ghz => &[0, 7],
        ProtocolKind::W => &[1, 2, 4],
    };
    for &i in ones {
        amps[i] = Complex64::new(1.0, 0.0);
    }
    StateVector::normalized(amps).expect("canonical states are non-zero")
}

pub fn probabilities(psi: &StateVector) -> Vec<f64> {
    psi.amplitudes().iter().map(|a| a.norm_sqr()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub schema: String,
    pub sites: usize,
    /// Keys `"0|1"`, `"0|12"`... for cuts of the full state, `"01"`... for pair reductions.
    pub negativity: BTreeMap<String, f64>,
    /// Keys `"01"`, `"02"`, `"12"`.
    pub concurrence: BTreeMap<String, f64>,
    pub concurrence_sq: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub three_tangle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_cost: Option<f64>,
    /// Keyed by `q_{n-1}...q_0` bitstrings.
    pub probabilities: BTreeMap<String, f64>,
}

impl MetricReport {
    /// Full report for a normalized 2- or 3-qubit state.
    pub fn for_state(psi: &StateVector) -> Result<Self> {
        check_normalized(psi)?;
        let sites = match psi.dim() {
            4 => 2,
            8 => 3,
            d => return Err(Error::Dimension(format!("reports cover 2 or 3 qubits, got dimension {d}"))),
        };
        let dims = vec![2; sites];
        let full = DensityMatrix::from_pure(psi, &dims)?;
        let mut negativity = BTreeMap::new();
        let mut concurrence_map = BTreeMap::new();
        let mut concurrence_sq = BTreeMap::new();
        let (mut three, mut wc) = (None, None);
        if sites == 2 {
            negativity.insert("0|1".to_string(), self::negativity(&full, &[0])?);
            let c = concurrence(&full)?;
            concurrence_map.insert("01".to_string(), c);
            concurrence_sq.insert("01".to_string(), c * c);
        } else {
            for (site, key) in ["0|12", "1|02", "2|01"].iter().enumerate() {
                negativity.insert(key.to_string(), self::negativity(&full, &[site])?);
            }
            let c = pairwise_concurrences(psi)?;
            for (pair, value) in PAIRS.iter().zip(c) {
                let key = format!("{}{}", pair[0], pair[1]);
                let reduced = partial_trace(psi, pair, &dims)?;
                negativity.insert(key.clone(), self::negativity(&reduced, &[0])?);
                concurrence_map.insert(key.clone(), value);
                concurrence_sq.insert(key, value * value);
            }
            three = Some(three_tangle(psi)?);
            wc = Some(w_cost(psi)?);
        }
        let probabilities = probabilities(psi)
            .into_iter()
            .enumerate()
            .map(|(i, p)| (basis_label(i, 2, sites), p))
            .collect();
        Ok(Self {
            schema: METRICS_SCHEMA.to_string(),
            sites,
            negativity,
            concurrence: concurrence_map,
            concurrence_sq,
            three_tangle: three,
            w_cost: wc,
            probabilities,
        })
    }
}
