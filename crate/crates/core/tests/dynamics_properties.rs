// Copyright 2026 The pulseprep Authors
// SPDX-License-Identifier: Apache-2.0

mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use pulseprep::device::{DeviceModel, RwaParams, SHERBROOKE_DT};
use pulseprep::dynamics::{evolve, evolve_detailed, evolve_rwa, PiecewiseEnvelope, SolverConfig, StateVector};
use pulseprep::pulse::{Channel, Envelope, PulseSchedule};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bell_like(device: &DeviceModel) -> PulseSchedule {
    let dt = SHERBROOKE_DT;
    let mut s = PulseSchedule::new(dt);
    s.push(Channel::drive(device, 0).unwrap(), 0.0, Envelope::gaussian_square(0.6, 3.0 * dt, 6.0 * dt, 18.0 * dt));
    s.push(Channel::cross(device, 0, 1).unwrap(), 18.0 * dt, Envelope::constant(0.8, 60.0 * dt));
    s
}

#[test]
fn rabi_populations_follow_sin_squared() {
    let omega = 0.65;
    let p = RwaParams { detuning: 0.0, drive_strength: omega };
    let cfg = SolverConfig::default();
    let ground = StateVector::ground(2);
    for k in 1..=40 {
        let t = 0.37 * k as f64;
        let mu = PiecewiseEnvelope::constant(Complex64::new(1.0, 0.0), t);
        let out = evolve_rwa(&p, &mu, t, &ground, &cfg).unwrap();
        let want = (omega * t / 2.0).sin().powi(2);
        assert!((out.amplitudes()[1].norm_sqr() - want).abs() < 1e-8, "t = {t}");
    }
}

#[test]
fn evolution_is_linear() {
    let d = DeviceModel::sherbrooke(2, 2).unwrap();
    let s = bell_like(&d);
    let cfg = SolverConfig::default();
    let psi = StateVector::basis(4, 0);
    let phi = StateVector::basis(4, 3);
    let (a, b) = (Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
    let mix: Vec<_> = (0..4).map(|i| a * psi.amplitudes()[i] + b * phi.amplitudes()[i]).collect();
    let out_mix = evolve(&d, &s, &StateVector::new(mix).unwrap(), &cfg).unwrap();
    let (op, of) = (evolve(&d, &s, &psi, &cfg).unwrap(), evolve(&d, &s, &phi, &cfg).unwrap());
    let err: f64 = (0..4)
        .map(|i| (out_mix.amplitudes()[i] - a * op.amplitudes()[i] - b * of.amplitudes()[i]).norm_sqr())
        .sum::<f64>()
        .sqrt();
    assert!(err < 1e-7, "{err:e}");
}

#[test]
fn halving_tolerances_shrinks_the_change() {
    let d = DeviceModel::sherbrooke(2, 2).unwrap();
    let s = bell_like(&d);
    let psi0 = StateVector::ground(4);
    let run = |rtol: f64| {
        let cfg = SolverConfig { rtol, atol: rtol * 1e-2, ..Default::default() };
        evolve(&d, &s, &psi0, &cfg).unwrap()
    };
    let states: Vec<_> = [1e-5, 5e-6, 2.5e-6, 1.25e-6].into_iter().map(run).collect();
    for w in states.windows(3) {
        let (prev, next) = (w[0].distance(&w[1]), w[1].distance(&w[2]));
        assert!(next < 10.0 * prev, "{prev:e} -> {next:e}");
    }
}

#[test]
fn evolution_is_deterministic() {
    let d = DeviceModel::sherbrooke(2, 3).unwrap();
    let s = bell_like(&d);
    let psi0 = StateVector::ground(9);
    let cfg = SolverConfig::default();
    let a = evolve(&d, &s, &psi0, &cfg).unwrap();
    let b = evolve(&d, &s, &psi0, &cfg).unwrap();
    assert_eq!(a.amplitudes(), b.amplitudes());
}

#[test]
fn zero_amplitude_schedule_is_drift_phase() {
    let d = DeviceModel::sherbrooke(1, 2).unwrap();
    let mut s = PulseSchedule::new(SHERBROOKE_DT);
    s.push(Channel::drive(&d, 0).unwrap(), 0.0, Envelope::constant(0.0, 40.0 * SHERBROOKE_DT));
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let psi0 = StateVector::new(vec![Complex64::new(h, 0.0), Complex64::new(h, 0.0)]).unwrap();
    let out = evolve(&d, &s, &psi0, &SolverConfig::default()).unwrap();
    let t = s.duration();
    let w = d.transmons[0].omega;
    let want = StateVector::new(vec![Complex64::new(h, 0.0), Complex64::cis(-w * t) * h]).unwrap();
    assert!(out.distance(&want) < 1e-9, "{:e}", out.distance(&want));
}

#[test]
fn norm_drift_bound_on_random_schedules() {
    let d = DeviceModel::sherbrooke(2, 2).unwrap();
    let cfg = SolverConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..100 {
        let s = random_schedule(&mut rng, &d);
        let e = evolve_detailed(&d, &s, &StateVector::ground(4), &cfg).unwrap();
        assert!(e.norm_drift < 100.0 * cfg.rtol, "{:e}", e.norm_drift);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_schedules_match_oracle(seed in any::<u64>()) {
        let d = DeviceModel::sherbrooke(2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_schedule(&mut rng, &d);
        prop_assume!(s.duration() > 0.0);
        let psi0 = StateVector::ground(4);
        let oracle = magnus_oracle(&d, &s, &psi0, 1000);
        let out = evolve(&d, &s, &psi0, &SolverConfig::default()).unwrap();
        prop_assert!(out.distance(&oracle) < 1e-6, "{:e}", out.distance(&oracle));
    }
}
