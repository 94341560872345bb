// Copyright 2026 The pulseprep Authors
// SPDX-License-Identifier: Apache-2.0

//! Transmon device models and their drift / control operators.
//!
//! Frequencies, anharmonicities, couplings and drive strengths are angular
//! frequencies in rad/ns, time is in ns and hbar = 1.
//!
//! Tensor layout: site 0 is the least-significant factor, so the basis label
//! `|q2 q1 q0>` sits at index `q2*L^2 + q1*L + q0` for `L` levels per site.

use std::ops::{Add, Mul, Sub};
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEVICE_SCHEMA: &str = "pulseprep.device/1";

/// Backend sample time of the reference hardware, in ns.
pub const SHERBROOKE_DT: f64 = 2.2222;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);
const CI: Complex64 = Complex64::new(0.0, 1.0);

/// Dense complex square matrix used for Hamiltonians and ladder operators.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix(DMatrix<Complex64>);

impl OperatorMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_matrix(m: DMatrix<Complex64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "operator must be square");
        Self(m)
    }

    /// Build from row-major entries.
    pub fn from_rows(dim: usize, rows: &[Complex64]) -> Self {
        Self(DMatrix::from_row_slice(dim, dim, rows))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(*d, 0.0);
        }
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn dagger(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    /// Largest elementwise deviation from Hermiticity, `max |H - H^dagger|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() < tol
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        assert_eq!(v.len(), n);
        (0..n)
            .map(|i| (0..n).map(|j| self.0[(i, j)] * v[j]).sum())
            .collect()
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix(&self.0 * &rhs.0)
    }
}

/// Pauli matrices in the `{|0>, |1>}` basis.
pub fn sigma_x() -> OperatorMatrix {
    OperatorMatrix::from_rows(2, &[C0, C1, C1, C0])
}

pub fn sigma_y() -> OperatorMatrix {
    OperatorMatrix::from_rows(2, &[C0, -CI, CI, C0])
}

pub fn sigma_z() -> OperatorMatrix {
    OperatorMatrix::from_rows(2, &[C1, C0, C0, -C1])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmonParams {
    /// 0-1 transition frequency.
    pub omega: f64,
    /// Anharmonicity (negative for a transmon).
    pub alpha: f64,
    /// Drive strength prefactor of the control term.
    pub drive_strength: f64,
}

impl TransmonParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::InvalidDevice(format!("omega must be > 0, got {}", self.omega)));
        }
        if !(self.alpha.is_finite() && self.alpha < 0.0) {
            return Err(Error::InvalidDevice(format!("alpha must be < 0, got {}", self.alpha)));
        }
        if !(self.drive_strength.is_finite() && self.drive_strength > 0.0) {
            return Err(Error::InvalidDevice(format!(
                "drive_strength must be > 0, got {}",
                self.drive_strength
            )));
        }
        Ok(())
    }
}

/// Exchange coupling `J (b_a b_b^dagger + b_a^dagger b_b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub site_a: usize,
    pub site_b: usize,
    pub strength: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceModel {
    pub transmons: Vec<TransmonParams>,
    #[serde(default)]
    pub couplings: Vec<Coupling>,
    pub levels: usize,
}

#[derive(Serialize, Deserialize)]
struct DeviceFile {
    schema: String,
    /// Sampling interval in ns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dt: Option<f64>,
    #[serde(flatten)]
    device: DeviceModel,
}

/// A device together with its sampling interval.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceConfig {
    pub device: DeviceModel,
    pub dt: f64,
}

const BUNDLED_DEVICE: &str = include_str!("../configs/sherbrooke.toml");

impl DeviceConfig {
    /// Three-transmon reference chain shipped with the crate.
    pub fn bundled() -> Self {
        Self::from_toml_str(BUNDLED_DEVICE).expect("bundled device parses")
    }

    pub fn bundled_text() -> &'static str {
        BUNDLED_DEVICE
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: DeviceFile = toml::from_str(text).map_err(|e| Error::parse("<device>", e))?;
        if file.schema != DEVICE_SCHEMA {
            return Err(Error::parse("<device>", format!("unsupported schema tag {:?}", file.schema)));
        }
        file.device.validate()?;
        let dt = file.dt.unwrap_or(SHERBROOKE_DT);
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidDevice(format!("dt must be positive, got {dt}")));
        }
        Ok(Self { device: file.device, dt })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Parse { message, .. } => Error::parse(path, message),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        let file = DeviceFile {
            schema: DEVICE_SCHEMA.to_string(),
            dt: Some(self.dt),
            device: self.device.clone(),
        };
        toml::to_string_pretty(&file).expect("device serializes")
    }
}

impl DeviceModel {
    pub fn new(transmons: Vec<TransmonParams>, couplings: Vec<Coupling>, levels: usize) -> Result<Self> {
        let device = Self {
            transmons,
            couplings,
            levels,
        };
        device.validate()?;
        Ok(device)
    }

    /// First `sites` transmons of the reference three-qubit chain, with the
    /// couplings that fall inside it.
    pub fn sherbrooke(sites: usize, levels: usize) -> Result<Self> {
        let all = [
            TransmonParams { omega: 29.877, alpha: -1.954, drive_strength: 0.396 },
            TransmonParams { omega: 30.235, alpha: -1.969, drive_strength: 0.650 },
            TransmonParams { omega: 29.135, alpha: -1.839, drive_strength: 4.638 },
        ];
        let chain = [
            Coupling { site_a: 0, site_b: 1, strength: 0.013 },
            Coupling { site_a: 1, site_b: 2, strength: 0.014 },
        ];
        if sites == 0 || sites > all.len() {
            return Err(Error::InvalidDevice(format!("reference device has 1-3 sites, asked for {sites}")));
        }
        let couplings = chain
            .iter()
            .filter(|c| c.site_a < sites && c.site_b < sites)
            .copied()
            .collect();
        Self::new(all[..sites].to_vec(), couplings, levels)
    }

    /// The first `sites` transmons and the couplings among them, truncated to `levels`.
    pub fn leading_sites(&self, sites: usize, levels: usize) -> Result<Self> {
        if sites == 0 || sites > self.sites() {
            return Err(Error::SiteOutOfRange { site: sites.saturating_sub(1), sites: self.sites() });
        }
        let couplings = self
            .couplings
            .iter()
            .filter(|c| c.site_a < sites && c.site_b < sites)
            .copied()
            .collect();
        Self::new(self.transmons[..sites].to_vec(), couplings, levels)
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels < 2 {
            return Err(Error::InvalidTruncation { levels: self.levels });
        }
        if self.levels > 3 {
            return Err(Error::InvalidDevice(format!("levels must be 2 or 3, got {}", self.levels)));
        }
        let n = self.transmons.len();
        if !(1..=3).contains(&n) {
            return Err(Error::InvalidDevice(format!("1-3 sites supported, got {n}")));
        }
        for t in &self.transmons {
            t.validate()?;
        }
        for c in &self.couplings {
            if c.site_a >= n || c.site_b >= n {
                return Err(Error::InvalidDevice(format!(
                    "coupling ({}, {}) references a missing site",
                    c.site_a, c.site_b
                )));
            }
            if c.site_a == c.site_b {
                return Err(Error::InvalidDevice(format!("self-coupling on site {}", c.site_a)));
            }
            if !c.strength.is_finite() {
                return Err(Error::InvalidDevice("non-finite coupling strength".into()));
            }
        }
        Ok(())
    }

    pub fn sites(&self) -> usize {
        self.transmons.len()
    }

    pub fn dim(&self) -> usize {
        self.levels.pow(self.sites() as u32)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Parse { message, .. } => Error::parse(path, message),
            other => other,
        })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: DeviceFile = toml::from_str(text).map_err(|e| Error::parse("<device>", e))?;
        if file.schema != DEVICE_SCHEMA {
            return Err(Error::parse("<device>", format!("unsupported schema tag {:?}", file.schema)));
        }
        file.device.validate()?;
        Ok(file.device)
    }

    pub fn to_toml_string(&self) -> String {
        let file = DeviceFile {
            schema: DEVICE_SCHEMA.to_string(),
            dt: None,
            device: self.clone(),
        };
        toml::to_string_pretty(&file).expect("device serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_toml_string()).map_err(|e| Error::io(path, e))
    }
}

/// Truncated annihilation operator: `b[i, i+1] = sqrt(i+1)`.
pub fn ladder_op(levels: usize) -> Result<OperatorMatrix> {
    if levels < 2 {
        return Err(Error::InvalidTruncation { levels });
    }
    let mut b = OperatorMatrix::zeros(levels);
    for i in 0..levels - 1 {
        b.0[(i, i + 1)] = Complex64::new(((i + 1) as f64).sqrt(), 0.0);
    }
    Ok(b)
}

/// Embed a single-site operator on `site` of an `sites`-site register.
pub fn embed(op: &OperatorMatrix, site: usize, sites: usize) -> OperatorMatrix {
    let levels = op.dim();
    let above = OperatorMatrix::identity(levels.pow((sites - site - 1) as u32));
    let below = OperatorMatrix::identity(levels.pow(site as u32));
    above.kron(&op.kron(&below))
}

fn single_site_drift(t: &TransmonParams, b: &OperatorMatrix) -> OperatorMatrix {
    let bd = b.dagger();
    let number = &bd * b;
    let anharm = &(&(&bd * &bd) * b) * b;
    &number.scale(t.omega) + &anharm.scale(t.alpha / 2.0)
}

/// Drift Hamiltonian: per-site Duffing terms plus exchange couplings.
pub fn build_drift(device: &DeviceModel) -> Result<OperatorMatrix> {
    device.validate()?;
    let n = device.sites();
    let b = ladder_op(device.levels)?;
    let mut h = OperatorMatrix::zeros(device.dim());
    for (site, t) in device.transmons.iter().enumerate() {
        h = &h + &embed(&single_site_drift(t, &b), site, n);
    }
    for c in &device.couplings {
        let ba = embed(&b, c.site_a, n);
        let bb = embed(&b, c.site_b, n);
        let hop = &(&ba * &bb.dagger()) + &(&ba.dagger() * &bb);
        h = &h + &hop.scale(c.strength);
    }
    Ok(h)
}

/// Control operator `(b^dagger + b)` on `site`, without the drive-strength prefactor.
pub fn build_control_op(device: &DeviceModel, site: usize) -> Result<OperatorMatrix> {
    if site >= device.sites() {
        return Err(Error::SiteOutOfRange {
            site,
            sites: device.sites(),
        });
    }
    let b = ladder_op(device.levels)?;
    Ok(embed(&(&b + &b.dagger()), site, device.sites()))
}

/// Single-qubit rotating-frame model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RwaParams {
    /// Qubit minus drive frequency.
    pub detuning: f64,
    pub drive_strength: f64,
}

/// `(detuning/2) Z + (drive_strength/2)(mu_re X + mu_im Y)`.
pub fn rwa_hamiltonian(p: &RwaParams, mu_re: f64, mu_im: f64) -> OperatorMatrix {
    let z = sigma_z().scale(p.detuning / 2.0);
    let x = sigma_x().scale(p.drive_strength * mu_re / 2.0);
    let y = sigma_y().scale(p.drive_strength * mu_im / 2.0);
    &(&z + &x) + &y
}
