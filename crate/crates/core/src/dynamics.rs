// Copyright 2026 The pulseprep Authors
// SPDX-License-Identifier: Apache-2.0

//! Time evolution of driven transmon registers.
//!
//! The lab-frame Hamiltonian `H(t) = H_drift + sum_k Omega_k s_k(t) (b_k^dagger + b_k)`
//! is integrated with an adaptive Dormand-Prince 5(4) scheme. States are never
//! renormalized during integration.
//!
//! Two exact accelerations are applied per interval between envelope
//! breakpoints:
//! * intervals with no active drive use the drift eigen-decomposition;
//! * intervals where every active envelope is flat and all carriers agree
//!   have a Hamiltonian periodic in `2 pi / carrier`, so the one-period
//!   propagator is integrated once and raised to the number of whole periods.
//!
//! [`Frame::Interaction`] integrates in the interaction picture of the
//! diagonal part of the drift. It is a change of variables, not an
//! approximation; inputs and outputs stay in the lab frame.

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::device::{build_control_op, build_drift, rwa_hamiltonian, DeviceModel, OperatorMatrix, RwaParams};
use crate::error::{Error, Result};
use crate::ode::{ComplexSystem, Dopri5, StepStats};
use crate::pulse::{drive_signal, drive_signal_inside, PulseSchedule, Segment};

pub const RECORD_SCHEMA: &str = "pulseprep.evolution/1";

const MAX_DIM: usize = 27;
const MIN_PERIODS: f64 = 4.0;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Wrap amplitudes that are already normalized to within 1e-9.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let s = Self { amps };
        let norm = s.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Normalization { norm });
        }
        Ok(s)
    }

    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        let mut s = Self { amps };
        let norm = s.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Normalization { norm });
        }
        s.amps.iter_mut().for_each(|a| *a /= norm);
        Ok(s)
    }

    /// No normalization check. Used for raw propagator output.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Self {
        Self { amps }
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    pub fn ground(dim: usize) -> Self {
        Self::basis(dim, 0)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// Euclidean distance between amplitude vectors.
    pub fn distance(&self, other: &Self) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn apply(&self, op: &OperatorMatrix) -> Self {
        Self {
            amps: op.apply(&self.amps),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    Lab,
    #[default]
    Interaction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Dopri5,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Largest step in ns.
    pub max_step: f64,
    #[serde(default)]
    pub method: Method,
    #[serde(default)]
    pub frame: Frame,
    /// Reuse one-period propagators on flat single-carrier intervals.
    #[serde(default = "default_true")]
    pub periodic_shortcut: bool,
}

fn default_true() -> bool {
    true
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            max_step: crate::device::SHERBROOKE_DT / 4.0,
            method: Method::Dopri5,
            frame: Frame::Interaction,
            periodic_shortcut: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.atol > 0.0 && self.max_step > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "solver tolerances and max_step must be > 0 (rtol {}, atol {}, max_step {})",
                self.rtol, self.atol, self.max_step
            )));
        }
        Ok(())
    }

    fn stepper(&self) -> Dopri5 {
        Dopri5 {
            rtol: self.rtol,
            atol: self.atol,
            max_step: self.max_step,
        }
    }

    // One-period propagators are raised to large powers, so they get a tighter budget.
    fn period_stepper(&self) -> Dopri5 {
        Dopri5 {
            rtol: self.rtol * 1e-3,
            atol: self.atol * 1e-3,
            max_step: self.max_step,
        }
    }
}

type Sparse = Vec<(usize, usize, f64)>;

fn sparse_real(op: &OperatorMatrix) -> Sparse {
    let n = op.dim();
    let mut out = Vec::new();
    for r in 0..n {
        for c in 0..n {
            let z = op.get(r, c);
            debug_assert!(z.im == 0.0);
            if z.re != 0.0 {
                out.push((r, c, z.re));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct ActiveDrive {
    site: usize,
    strength: f64,
    segment: Segment,
}

/// Device operators prepared once for repeated propagation.
#[derive(Debug, Clone)]
pub struct Propagator {
    dim: usize,
    sites: usize,
    drift: OperatorMatrix,
    diag: Vec<f64>,
    coupling: Sparse,
    controls: Vec<Sparse>,
    drive_strength: Vec<f64>,
    drift_vecs: DMatrix<Complex64>,
    drift_vals: Vec<f64>,
}

struct DrivenSystem<'a> {
    p: &'a Propagator,
    active: &'a [ActiveDrive],
    frame: Frame,
}

impl DrivenSystem<'_> {
    fn control_amplitudes(&self, t: f64) -> [f64; 3] {
        let mut c = [0.0; 3];
        for d in self.active {
            c[d.site] += d.strength * drive_signal_inside(&d.segment, t);
        }
        c
    }

    // w = (H - diag) v
    fn apply_offdiag(&self, t: f64, v: &[Complex64], w: &mut [Complex64]) {
        w.iter_mut().for_each(|x| *x = ZERO);
        for &(r, c, val) in &self.p.coupling {
            w[r] += v[c] * val;
        }
        let amps = self.control_amplitudes(t);
        for (site, &a) in amps.iter().enumerate().take(self.p.sites) {
            if a != 0.0 {
                for &(r, c, val) in &self.p.controls[site] {
                    w[r] += v[c] * (a * val);
                }
            }
        }
    }
}

impl ComplexSystem for DrivenSystem<'_> {
    fn dim(&self) -> usize {
        self.p.dim
    }

    fn rhs(&self, t: f64, y: &[Complex64], dy: &mut [Complex64]) {
        let n = self.p.dim;
        let mut w = [ZERO; MAX_DIM];
        match self.frame {
            Frame::Lab => {
                self.apply_offdiag(t, y, &mut w[..n]);
                for j in 0..n {
                    let h = w[j] + y[j] * self.p.diag[j];
                    dy[j] = Complex64::new(h.im, -h.re);
                }
            }
            Frame::Interaction => {
                let mut phase = [ZERO; MAX_DIM];
                let mut v = [ZERO; MAX_DIM];
                for j in 0..n {
                    phase[j] = Complex64::cis(-self.p.diag[j] * t);
                    v[j] = phase[j] * y[j];
                }
                self.apply_offdiag(t, &v[..n], &mut w[..n]);
                for j in 0..n {
                    let h = phase[j].conj() * w[j];
                    dy[j] = Complex64::new(h.im, -h.re);
                }
            }
        }
    }
}

impl Propagator {
    pub fn new(device: &DeviceModel) -> Result<Self> {
        device.validate()?;
        let dim = device.dim();
        let drift = build_drift(device)?;
        let diag: Vec<f64> = (0..dim).map(|i| drift.get(i, i).re).collect();
        let mut off = drift.matrix().clone();
        off.fill_diagonal(ZERO);
        let coupling = sparse_real(&OperatorMatrix::from_matrix(off));
        let controls = (0..device.sites())
            .map(|s| build_control_op(device, s).map(|op| sparse_real(&op)))
            .collect::<Result<Vec<_>>>()?;
        let eig = SymmetricEigen::new(drift.matrix().clone());
        Ok(Self {
            dim,
            sites: device.sites(),
            drift,
            diag,
            coupling,
            controls,
            drive_strength: device.transmons.iter().map(|t| t.drive_strength).collect(),
            drift_vecs: eig.eigenvectors,
            drift_vals: eig.eigenvalues.iter().copied().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn drift(&self) -> &OperatorMatrix {
        &self.drift
    }

    fn drift_step(&self, tau: f64, psi: &mut [Complex64]) {
        let v = &self.drift_vecs;
        let n = self.dim;
        let mut coeff = vec![ZERO; n];
        for k in 0..n {
            let mut acc = ZERO;
            for j in 0..n {
                acc += v[(j, k)].conj() * psi[j];
            }
            coeff[k] = acc * Complex64::cis(-self.drift_vals[k] * tau);
        }
        for j in 0..n {
            psi[j] = (0..n).map(|k| v[(j, k)] * coeff[k]).sum();
        }
    }

    fn enter_frame(&self, frame: Frame, t: f64, psi: &mut [Complex64]) {
        if frame == Frame::Interaction {
            for (a, d) in psi.iter_mut().zip(&self.diag) {
                *a *= Complex64::cis(d * t);
            }
        }
    }

    fn leave_frame(&self, frame: Frame, t: f64, psi: &mut [Complex64]) {
        if frame == Frame::Interaction {
            for (a, d) in psi.iter_mut().zip(&self.diag) {
                *a *= Complex64::cis(-d * t);
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn integrate(
        &self,
        active: &[ActiveDrive],
        solver: &Dopri5,
        frame: Frame,
        a: f64,
        b: f64,
        psi: &mut [Complex64],
        h_hint: &mut f64,
    ) -> Result<StepStats> {
        let sys = DrivenSystem { p: self, active, frame };
        self.enter_frame(frame, a, psi);
        let stats = solver.integrate(&sys, a, b, psi, h_hint)?;
        self.leave_frame(frame, b, psi);
        Ok(stats)
    }

    fn period_propagator(
        &self,
        active: &[ActiveDrive],
        cfg: &SolverConfig,
        a: f64,
        period: f64,
        stats: &mut StepStats,
    ) -> Result<DMatrix<Complex64>> {
        let n = self.dim;
        let solver = cfg.period_stepper();
        let mut u = DMatrix::zeros(n, n);
        let mut h = 0.0;
        for col in 0..n {
            let mut v = vec![ZERO; n];
            v[col] = Complex64::new(1.0, 0.0);
            *stats += self.integrate(active, &solver, cfg.frame, a, a + period, &mut v, &mut h)?;
            for row in 0..n {
                u[(row, col)] = v[row];
            }
        }
        Ok(u)
    }

    fn active_drives(&self, schedule: &PulseSchedule, a: f64, b: f64) -> Vec<ActiveDrive> {
        let mid = 0.5 * (a + b);
        schedule
            .segments
            .iter()
            .filter(|seg| seg.is_active(mid) && seg.envelope.amp().norm() > 0.0)
            .map(|seg| {
                let site = seg.channel.drive_site();
                ActiveDrive {
                    site,
                    strength: self.drive_strength[site],
                    segment: *seg,
                }
            })
            .collect()
    }

    fn common_carrier(active: &[ActiveDrive], a: f64, b: f64) -> Option<f64> {
        let first = active.first()?.segment.channel.carrier_freq;
        for d in active {
            let seg = &d.segment;
            if (seg.channel.carrier_freq - first).abs() > 1e-12 * first.abs() {
                return None;
            }
            let (lo, hi) = seg.envelope.flat_region()?;
            let eps = 1e-9 * (1.0 + b.abs());
            if a - seg.start < lo - eps || b - seg.start > hi + eps {
                return None;
            }
        }
        (first > 0.0).then_some(first)
    }

    /// Propagate raw amplitudes across the whole schedule. No normalization
    /// check, so linear combinations of states may be pushed through.
    pub fn propagate(
        &self,
        schedule: &PulseSchedule,
        psi0: &[Complex64],
        cfg: &SolverConfig,
    ) -> Result<(Vec<Complex64>, StepStats)> {
        cfg.validate()?;
        if psi0.len() != self.dim {
            return Err(Error::Dimension(format!(
                "state has dimension {}, device needs {}",
                psi0.len(),
                self.dim
            )));
        }
        if schedule.segments.iter().any(|s| s.channel.drive_site() >= self.sites) {
            return Err(Error::InvalidSchedule("segment drives a site the device lacks".into()));
        }
        let mut psi = psi0.to_vec();
        let mut stats = StepStats::default();
        let solver = cfg.stepper();
        let t_end = schedule.duration();
        let mut points: Vec<f64> = schedule.breakpoints().into_iter().filter(|&t| t <= t_end).collect();
        if points.last().copied() != Some(t_end) {
            points.push(t_end);
        }
        let mut h = 0.0;
        for w in points.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b - a <= 1e-12 {
                continue;
            }
            let active = self.active_drives(schedule, a, b);
            if active.is_empty() {
                self.drift_step(b - a, &mut psi);
                continue;
            }
            let mut start = a;
            if cfg.periodic_shortcut {
                if let Some(carrier) = Self::common_carrier(&active, a, b) {
                    let period = 2.0 * PI / carrier;
                    let periods = ((b - a) / period).floor();
                    if periods >= MIN_PERIODS {
                        let u = self.period_propagator(&active, cfg, a, period, &mut stats)?;
                        let un = matrix_power(u, periods as u64);
                        let v = nalgebra::DVector::from_column_slice(&psi);
                        psi = (un * v).iter().copied().collect();
                        start = a + periods * period;
                    }
                }
            }
            if b - start > 1e-12 {
                stats += self.integrate(&active, &solver, cfg.frame, start, b, &mut psi, &mut h)?;
            }
        }
        Ok((psi, stats))
    }
}

fn matrix_power(mut base: DMatrix<Complex64>, mut exp: u64) -> DMatrix<Complex64> {
    let n = base.nrows();
    let mut acc = DMatrix::identity(n, n);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = &acc * &base;
        }
        exp >>= 1;
        if exp > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Full lab-frame Hamiltonian at time `t`.
pub fn hamiltonian_at(device: &DeviceModel, schedule: &PulseSchedule, t: f64) -> Result<OperatorMatrix> {
    let mut h = build_drift(device)?;
    for seg in &schedule.segments {
        if !seg.is_active(t) {
            continue;
        }
        let site = seg.channel.drive_site();
        let amp = device.transmons[site].drive_strength * drive_signal(seg, t);
        if amp != 0.0 {
            h = &h + &build_control_op(device, site)?.scale(amp);
        }
    }
    Ok(h)
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub state: StateVector,
    pub stats: StepStats,
    /// `|norm(psi(T)) - 1|`.
    pub norm_drift: f64,
    pub wall_time: f64,
}

/// Evolve `psi0` through `schedule` and return `psi(T)` at the schedule end.
pub fn evolve(device: &DeviceModel, schedule: &PulseSchedule, psi0: &StateVector, cfg: &SolverConfig) -> Result<StateVector> {
    evolve_detailed(device, schedule, psi0, cfg).map(|e| e.state)
}

pub fn evolve_detailed(
    device: &DeviceModel,
    schedule: &PulseSchedule,
    psi0: &StateVector,
    cfg: &SolverConfig,
) -> Result<Evolution> {
    let norm = psi0.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::Normalization { norm });
    }
    let clock = Instant::now();
    let prop = Propagator::new(device)?;
    let (amps, stats) = prop.propagate(schedule, psi0.amplitudes(), cfg)?;
    let state = StateVector::from_amplitudes(amps);
    Ok(Evolution {
        norm_drift: (state.norm() - 1.0).abs(),
        state,
        stats,
        wall_time: clock.elapsed().as_secs_f64(),
    })
}

/// Piecewise-constant complex envelope: `(duration, value)` pieces from t = 0.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PiecewiseEnvelope {
    pub pieces: Vec<(f64, Complex64)>,
}

impl PiecewiseEnvelope {
    pub fn constant(value: Complex64, duration: f64) -> Self {
        Self {
            pieces: vec![(duration, value)],
        }
    }

    pub fn value(&self, t: f64) -> Complex64 {
        let mut start = 0.0;
        for &(d, v) in &self.pieces {
            if t >= start && t < start + d {
                return v;
            }
            start += d;
        }
        ZERO
    }

    fn knots(&self) -> Vec<f64> {
        let mut t = 0.0;
        let mut out = vec![0.0];
        for &(d, _) in &self.pieces {
            t += d;
            out.push(t);
        }
        out
    }
}

struct RwaSystem {
    p: RwaParams,
    mu: Complex64,
}

impl ComplexSystem for RwaSystem {
    fn dim(&self) -> usize {
        2
    }

    fn rhs(&self, _t: f64, y: &[Complex64], dy: &mut [Complex64]) {
        let h = rwa_hamiltonian(&self.p, self.mu.re, self.mu.im);
        let hy = h.apply(y);
        for j in 0..2 {
            dy[j] = Complex64::new(hy[j].im, -hy[j].re);
        }
    }
}

/// Evolve the single-qubit rotating-frame model up to `total` ns.
pub fn evolve_rwa(
    p: &RwaParams,
    mu: &PiecewiseEnvelope,
    total: f64,
    psi0: &StateVector,
    cfg: &SolverConfig,
) -> Result<StateVector> {
    cfg.validate()?;
    if psi0.dim() != 2 {
        return Err(Error::Dimension(format!("RWA model is 2-dimensional, got {}", psi0.dim())));
    }
    let norm = psi0.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::Normalization { norm });
    }
    let solver = cfg.stepper();
    let mut y = psi0.amplitudes().to_vec();
    let mut points: Vec<f64> = mu.knots().into_iter().filter(|&t| t < total).collect();
    points.push(total);
    let mut h = 0.0;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a <= 0.0 {
            continue;
        }
        let sys = RwaSystem {
            p: *p,
            mu: mu.value(0.5 * (a + b)),
        };
        solver.integrate(&sys, a, b, &mut y, &mut h)?;
    }
    Ok(StateVector::from_amplitudes(y))
}

#[derive(Debug, Clone)]
pub struct QubitProjection {
    pub state: StateVector,
    /// Population outside the qubit subspace, as a fraction of the input norm.
    pub leakage: f64,
}

/// Drop every amplitude with some site above level 1, then renormalize.
pub fn project_to_qubits(psi: &StateVector, levels: usize, sites: usize) -> Result<QubitProjection> {
    if levels < 2 {
        return Err(Error::InvalidTruncation { levels });
    }
    let dim = levels.pow(sites as u32);
    if psi.dim() != dim {
        return Err(Error::Dimension(format!(
            "state has dimension {}, expected {levels}^{sites} = {dim}",
            psi.dim()
        )));
    }
    let total: f64 = psi.amplitudes().iter().map(|a| a.norm_sqr()).sum();
    let mut kept = vec![ZERO; 1 << sites];
    for (index, amp) in psi.amplitudes().iter().enumerate() {
        let mut rest = index;
        let mut qubit_index = 0usize;
        let mut inside = true;
        for site in 0..sites {
            let digit = rest % levels;
            rest /= levels;
            if digit > 1 {
                inside = false;
                break;
            }
            qubit_index |= digit << site;
        }
        if inside {
            kept[qubit_index] = *amp;
        }
    }
    let kept_weight: f64 = kept.iter().map(|a| a.norm_sqr()).sum();
    if kept_weight < 1e-6 * total.max(f64::MIN_POSITIVE) || kept_weight < 1e-12 {
        return Err(Error::DegenerateProjection { kept: kept_weight });
    }
    let leakage = 1.0 - kept_weight / total;
    Ok(QubitProjection {
        state: StateVector::normalized(kept)?,
        leakage,
    })
}

/// `|q_{n-1} ... q_0>` label of a basis index.
pub fn basis_label(index: usize, levels: usize, sites: usize) -> String {
    let mut digits = Vec::with_capacity(sites);
    let mut rest = index;
    for _ in 0..sites {
        digits.push(char::from_digit((rest % levels) as u32, 10).unwrap_or('?'));
        rest /= levels;
    }
    digits.iter().rev().collect()
}

/// Serializable record of a final state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionRecord {
    pub schema: String,
    pub levels: usize,
    pub sites: usize,
    pub basis: Vec<String>,
    pub amplitudes: Vec<[f64; 2]>,
    pub leakage: f64,
    pub norm_drift: f64,
    pub wall_time_s: f64,
}

impl EvolutionRecord {
    pub fn new(state: &StateVector, levels: usize, sites: usize, leakage: f64, norm_drift: f64, wall_time_s: f64) -> Self {
        Self {
            schema: RECORD_SCHEMA.to_string(),
            levels,
            sites,
            basis: (0..state.dim()).map(|i| basis_label(i, levels, sites)).collect(),
            amplitudes: state.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
            leakage,
            norm_drift,
            wall_time_s,
        }
    }

    pub fn state(&self) -> StateVector {
        StateVector::from_amplitudes(self.amplitudes.iter().map(|a| Complex64::new(a[0], a[1])).collect())
    }
}
