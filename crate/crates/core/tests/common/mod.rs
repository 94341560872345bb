// Copyright 2026 The pulseprep Authors
// SPDX-License-Identifier: Apache-2.0

//! Reference implementations used only by tests.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use pulseprep::device::DeviceModel;
use pulseprep::dynamics::{hamiltonian_at, StateVector};
use pulseprep::pulse::{Channel, Envelope, PulseSchedule};
use rand::Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `exp(-i K)` for Hermitian `K` via eigen-decomposition.
pub fn expm_hermitian(k: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let sym = (k + k.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let v = &eig.eigenvectors;
    let phases = DMatrix::from_diagonal(&DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|e| Complex64::cis(-e)),
    ));
    v * phases * v.adjoint()
}

/// Fourth-order Magnus product of exponentials on a uniform grid of `steps`
/// per `dt`, restarted at every schedule breakpoint so each step sees a
/// smooth Hamiltonian.
pub fn magnus_oracle(device: &DeviceModel, schedule: &PulseSchedule, psi0: &StateVector, steps_per_dt: usize) -> StateVector {
    let nodes = [0.5 - 3f64.sqrt() / 6.0, 0.5 + 3f64.sqrt() / 6.0];
    let mut psi = DVector::from_column_slice(psi0.amplitudes());
    let t_end = schedule.duration();
    let mut knots = schedule.breakpoints();
    knots.retain(|&t| t <= t_end);
    if knots.last() != Some(&t_end) {
        knots.push(t_end);
    }
    let h_target = schedule.dt / steps_per_dt as f64;
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a <= 1e-12 {
            continue;
        }
        let n = ((b - a) / h_target).ceil() as usize;
        let h = (b - a) / n as f64;
        for k in 0..n {
            let t = a + k as f64 * h;
            let h1 = hamiltonian_at(device, schedule, t + nodes[0] * h).unwrap().into_matrix();
            let h2 = hamiltonian_at(device, schedule, t + nodes[1] * h).unwrap().into_matrix();
            // Omega = -i h/2 (H1 + H2) - (sqrt3/12) h^2 [H2, H1]; exp(Omega) = exp(-i K)
            let comm = &h2 * &h1 - &h1 * &h2;
            let k_mat = (&h1 + &h2) * Complex64::new(h / 2.0, 0.0)
                + comm * Complex64::new(0.0, -(3f64.sqrt() / 12.0) * h * h);
            psi = expm_hermitian(&k_mat) * psi;
        }
    }
    StateVector::from_amplitudes(psi.iter().copied().collect())
}

/// Up to two segments per channel on a two-site device, drive and cross
/// channels, square or Gaussian-square, snapped to the dt grid.
pub fn random_schedule<R: Rng>(rng: &mut R, device: &DeviceModel) -> PulseSchedule {
    let dt = pulseprep::device::SHERBROOKE_DT;
    let mut s = PulseSchedule::new(dt);
    let channels = [
        Channel::drive(device, 0).unwrap(),
        Channel::drive(device, 1).unwrap(),
        Channel::cross(device, 0, 1).unwrap(),
    ];
    for ch in channels {
        let mut cursor = rng.gen_range(0..6) as f64 * dt;
        for _ in 0..rng.gen_range(0..3) {
            let n = rng.gen_range(2..30) as f64;
            let amp = rng.gen_range(-1.0..1.0);
            let env = if rng.gen_bool(0.5) {
                Envelope::constant(amp, n * dt)
            } else {
                let sigma = rng.gen_range(1.0..4.0) * dt;
                Envelope::gaussian_square(amp, sigma, (n * dt - 4.0 * sigma).max(0.0), n * dt)
            };
            s.push(ch, cursor, env);
            cursor += (n + rng.gen_range(0..4) as f64) * dt;
        }
    }
    s
}

pub fn random_state<R: Rng>(rng: &mut R, dim: usize) -> StateVector {
    let amps = (0..dim)
        .map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    StateVector::normalized(amps).unwrap()
}

/// Haar-ish random SU(2) from a normalized quaternion.
pub fn random_unitary_2<R: Rng>(rng: &mut R) -> DMatrix<Complex64> {
    let mut q = [0.0f64; 4];
    loop {
        for x in q.iter_mut() {
            *x = rng.gen::<f64>() * 2.0 - 1.0;
        }
        let n: f64 = q.iter().map(|x| x * x).sum();
        if n > 1e-6 && n <= 1.0 {
            let s = n.sqrt();
            q.iter_mut().for_each(|x| *x /= s);
            break;
        }
    }
    let (a, b) = (c(q[0], q[1]), c(q[2], q[3]));
    DMatrix::from_row_slice(2, 2, &[a, -b.conj(), b, a.conj()])
}

/// `U_{n-1} (x) ... (x) U_0` acting on a state, site 0 least significant.
pub fn apply_local(unitaries: &[DMatrix<Complex64>], psi: &StateVector) -> StateVector {
    let mut full = DMatrix::<Complex64>::identity(1, 1);
    for u in unitaries.iter().rev() {
        full = full.kronecker(u);
    }
    let v = full * DVector::from_column_slice(psi.amplitudes());
    StateVector::from_amplitudes(v.iter().copied().collect())
}

pub fn bell() -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    StateVector::new(vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]).unwrap()
}

pub fn ghz() -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut a = vec![c(0.0, 0.0); 8];
    a[0] = c(h, 0.0);
    a[7] = c(h, 0.0);
    StateVector::new(a).unwrap()
}

pub fn w_state() -> StateVector {
    let s = 1.0 / 3f64.sqrt();
    let mut a = vec![c(0.0, 0.0); 8];
    a[1] = c(s, 0.0);
    a[2] = c(s, 0.0);
    a[4] = c(s, 0.0);
    StateVector::normalized(a).unwrap()
}

/// Printed two-qubit state from the square-pulse Bell run.
pub fn printed_bell() -> StateVector {
    StateVector::normalized(vec![
        c(-0.3684480152, 0.5999791316),
        -c(0.0383474023, -0.0330939344),
        -c(0.0167077292, 0.0291402261),
        c(0.2125136408, 0.6748444424),
    ])
    .unwrap()
}

/// Printed three-qubit state from the square-pulse GHZ run.
pub fn printed_ghz() -> StateVector {
    StateVector::normalized(vec![
        c(0.66802070, 0.0),
        c(0.05252552, 0.13434712),
        c(-0.10755963, 0.03577012),
        c(-0.11451824, 0.07573796),
        c(-0.03285393, -0.11985692),
        c(-0.06979810, -0.10802873),
        c(0.11835156, -0.10244015),
        c(-0.65590019, -0.12061437),
    ])
    .unwrap()
}

/// Printed three-qubit state from the square-pulse W run.
pub fn printed_w() -> StateVector {
    StateVector::normalized(vec![
        c(0.51397601, 0.0),
        c(-0.10295038, 0.20024143),
        c(-0.17617122, -0.12098743),
        c(0.30108107, -0.16458899),
        c(-0.20955602, -0.12563232),
        c(-0.35878680, 0.39267187),
        c(0.17604487, 0.13212849),
        c(-0.30967882, 0.18642040),
    ])
    .unwrap()
}
