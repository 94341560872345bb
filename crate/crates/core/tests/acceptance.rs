// Copyright 2026 The pulseprep Authors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance criteria, one PASS/FAIL line each. Runs the end-to-end
//! optimizations, so expect several minutes.

mod common;

use common::*;
use num_complex::Complex64;
use pulseprep::device::{DeviceModel, RwaParams, SHERBROOKE_DT};
use pulseprep::dynamics::{evolve, evolve_detailed, evolve_rwa, PiecewiseEnvelope};
use pulseprep::experiment::{compare_durations, BaselineTable, Budget};
use pulseprep::metrics::*;
use pulseprep::optimize::{differential_evolution, fit_local_unitaries, Bounds, DeConfig, LuFitConfig};
use pulseprep::pulse::{Channel, Envelope, PulseSchedule};
use pulseprep::{run_experiment, ExperimentConfig, ProtocolKind, RunArtifact, SolverConfig, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use std::time::Instant;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn config(name: &str) -> ExperimentConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/experiments").join(format!("{name}.toml"));
    ExperimentConfig::load(path).unwrap()
}

fn c1_ground_truths() -> Outcome {
    let tol = 1e-9;
    let bell_rho = DensityMatrix::from_pure(&bell(), &[2, 2]).unwrap();
    let checks = [
        ("N(Bell)", negativity(&bell_rho, &[0]).unwrap(), 0.5),
        ("C(Bell)", concurrence(&bell_rho).unwrap(), 1.0),
        ("tau3(GHZ)", three_tangle(&ghz()).unwrap(), 1.0),
        ("tau3(W)", three_tangle(&w_state()).unwrap(), 0.0),
        ("w_cost(W)", w_cost(&w_state()).unwrap(), 0.0),
        ("w_cost(GHZ)", w_cost(&ghz()).unwrap(), 3f64.sqrt() * 2.0 / 3.0),
    ];
    let worst = checks.iter().map(|(_, got, want)| (got - want).abs()).fold(0.0, f64::max);
    Outcome::new(worst < tol, format!("max error {worst:.1e} (tol {tol:.0e})"))
}

fn c2_printed_replays() -> Outcome {
    let n = negativity(&DensityMatrix::from_pure(&printed_bell(), &[2, 2]).unwrap(), &[0]).unwrap();
    let c = pairwise_concurrences(&printed_w()).unwrap();
    let c2: Vec<f64> = c.iter().map(|x| x * x).collect();
    // pair order [01, 02, 12] against the published 0.442, 0.444, 0.442
    let table = [0.442, 0.444, 0.442];
    let c2_err = c2.iter().zip(table).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let tau = three_tangle(&printed_ghz()).unwrap();
    let pass = (n - 0.499).abs() <= 0.001 && c2_err <= 0.003 && (tau - 0.999).abs() <= 0.05;
    Outcome::new(
        pass,
        format!(
            "N(Bell) = {n:.5}; C^2(W) = [{:.4}, {:.4}, {:.4}] max dev {c2_err:.4}; tau3(GHZ) = {tau:.5}",
            c2[0], c2[1], c2[2]
        ),
    )
}

fn c3_solver_oracle() -> Outcome {
    let clock = Instant::now();
    let d = DeviceModel::sherbrooke(2, 2).unwrap();
    let dt = SHERBROOKE_DT;
    let mut rng = ChaCha8Rng::seed_from_u64(2026);
    let mut schedules = Vec::new();
    let mut fixed = PulseSchedule::new(dt);
    fixed.push(Channel::drive(&d, 0).unwrap(), 0.0, Envelope::constant(0.8, 4.0 * dt));
    fixed.push(Channel::drive(&d, 1).unwrap(), 0.0, Envelope::constant(-0.5, 4.0 * dt));
    fixed.push(Channel::cross(&d, 0, 1).unwrap(), 4.0 * dt, Envelope::constant(0.9, 20.0 * dt));
    schedules.push(fixed);
    for _ in 0..3 {
        let mut s = PulseSchedule::new(dt);
        let mut t = 0.0;
        for ch in [Channel::drive(&d, 0).unwrap(), Channel::cross(&d, 0, 1).unwrap(), Channel::drive(&d, 1).unwrap()] {
            let n = rng.gen_range(2..12) as f64;
            s.push(ch, t, Envelope::constant(rng.gen_range(-1.0..1.0), n * dt));
            t += n * dt;
        }
        schedules.push(s);
    }
    let psi0 = StateVector::ground(4);
    let cfg = SolverConfig::default();
    let oracle_err = schedules
        .iter()
        .map(|s| evolve(&d, s, &psi0, &cfg).unwrap().distance(&magnus_oracle(&d, s, &psi0, 2000)))
        .fold(0.0, f64::max);

    let omega = 0.65;
    let p = RwaParams { detuning: 0.0, drive_strength: omega };
    let ground = StateVector::ground(2);
    let rabi_err = (1..=40)
        .map(|k| {
            let t = 0.37 * k as f64;
            let mu = PiecewiseEnvelope::constant(Complex64::new(1.0, 0.0), t);
            let p1 = evolve_rwa(&p, &mu, t, &ground, &cfg).unwrap().amplitudes()[1].norm_sqr();
            (p1 - (omega * t / 2.0).sin().powi(2)).abs()
        })
        .fold(0.0, f64::max);
    let secs = clock.elapsed().as_secs_f64();
    Outcome::new(
        oracle_err < 1e-6 && rabi_err < 1e-8 && secs < 30.0,
        format!("oracle max diff {oracle_err:.1e} over {} schedules; Rabi max diff {rabi_err:.1e}; {secs:.1}s", schedules.len()),
    )
}

/// Seeds 1..=3 under `budget`; stops at the first run that passes.
fn best_of_three(base: &ExperimentConfig, budget: Budget, pass: impl Fn(&RunArtifact) -> bool, show: impl Fn(&RunArtifact) -> String) -> (bool, Vec<String>) {
    let mut notes = Vec::new();
    for seed in 1..=3 {
        let mut cfg = base.clone();
        cfg.seed = seed;
        cfg.budget = budget;
        let clock = Instant::now();
        match run_experiment(&cfg, None) {
            Ok(bundle) => {
                let run = bundle.artifact;
                let ok = pass(&run);
                notes.push(format!("{budget:?} seed {seed}: {} in {:.0}s", show(&run), clock.elapsed().as_secs_f64()));
                if ok {
                    return (true, notes);
                }
            }
            Err(e) => notes.push(format!("{budget:?} seed {seed}: error {e}")),
        }
    }
    (false, notes)
}

fn stochastic(name: &str, limit_s: f64, pass: impl Fn(&RunArtifact) -> bool + Copy, show: impl Fn(&RunArtifact) -> String + Copy) -> Outcome {
    let base = config(name);
    let clock = Instant::now();
    let (mut ok, mut notes) = best_of_three(&base, Budget::Fast, pass, show);
    let fast_s = clock.elapsed().as_secs_f64();
    if !ok {
        let (fallback_ok, fallback_notes) = best_of_three(&base, Budget::Paper, pass, show);
        ok = fallback_ok;
        notes.extend(fallback_notes);
    }
    let within = fast_s <= limit_s;
    if ok && !within {
        notes.push(format!("fast budget took {fast_s:.0}s > {limit_s:.0}s"));
    }
    Outcome::new(ok && within, notes.join("; "))
}

fn c4_bell() -> Outcome {
    stochastic(
        "bell_square",
        600.0,
        |r| r.metrics.negativity["0|1"] >= 0.49 && r.duration_dt <= 1100,
        |r| format!("N = {:.5} at {} dt", r.metrics.negativity["0|1"], r.duration_dt),
    )
}

fn c5_ghz_w() -> Outcome {
    let ghz = stochastic(
        "ghz_square",
        1800.0,
        |r| r.metrics.three_tangle.unwrap() >= 0.95 && r.duration_dt <= 3200,
        |r| format!("tau3 = {:.5} at {} dt", r.metrics.three_tangle.unwrap(), r.duration_dt),
    );
    let c2_dev = |r: &RunArtifact| r.metrics.concurrence_sq.values().map(|c| (c - 4.0 / 9.0).abs()).fold(0.0, f64::max);
    let w = stochastic(
        "w_square",
        2700.0,
        |r| c2_dev(r) <= 0.02,
        |r| format!("max |C^2 - 4/9| = {:.4} at {} dt", c2_dev(r), r.duration_dt),
    );
    Outcome::new(ghz.pass && w.pass, format!("GHZ [{}]; W [{}]", ghz.detail, w.detail))
}

fn c6_qutrit() -> Outcome {
    stochastic(
        "ghz_gaussian_qutrit",
        f64::INFINITY,
        |r| r.leakage.is_finite() && r.metrics.three_tangle.unwrap() >= 0.95 && r.duration_dt <= 4000,
        |r| format!("leakage {:.2e}, tau3 = {:.5} at {} dt", r.leakage, r.metrics.three_tangle.unwrap(), r.duration_dt),
    )
}

fn c7_lu() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let target = w_state();
    let cfg = LuFitConfig::default();
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let us: Vec<_> = (0..3).map(|_| random_unitary_2(&mut rng)).collect();
        let psi = apply_local(&us, &target);
        let fit = fit_local_unitaries(&psi, &target, 3, &LuFitConfig { de: DeConfig { seed: k, ..cfg.de.clone() }, ..cfg.clone() }).unwrap();
        worst = worst.max(fit.bures);
    }
    let printed = fit_local_unitaries(&printed_w(), &target, 3, &cfg).unwrap().bures;
    Outcome::new(
        worst < 1e-6 && printed < 1e-3,
        format!("rotated W max D_B {worst:.1e} (bar 1e-6); printed W D_B {printed:.3e} (bar 1e-3)"),
    )
}

fn c8_durations() -> Outcome {
    let input: Vec<_> = BaselineTable::ENTRIES.iter().map(|e| (e.kind, e.pulse_dt)).collect();
    let rows = compare_durations(&input);
    let gates: Vec<u64> = rows.iter().map(|r| r.gate_dt).collect();
    let shorter = rows.iter().all(|r| r.pulse_shorter);
    let kinds_ok = rows.iter().map(|r| r.kind).eq([ProtocolKind::Bell, ProtocolKind::Ghz, ProtocolKind::W]);
    Outcome::new(
        gates == [2912, 5315, 8224] && shorter && kinds_ok,
        format!("gate baselines {gates:?}; pulse shorter for all: {shorter}"),
    )
}

fn metric_values(psi: &StateVector) -> Vec<f64> {
    let r = MetricReport::for_state(psi).unwrap();
    let mut v: Vec<f64> = r.negativity.values().chain(r.concurrence.values()).copied().collect();
    v.extend(r.three_tangle);
    v.extend(r.w_cost);
    v
}

fn c9_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut lu_worst: f64 = 0.0;
    for _ in 0..1000 {
        let psi = random_state(&mut rng, 8);
        let us: Vec<_> = (0..3).map(|_| random_unitary_2(&mut rng)).collect();
        let moved = apply_local(&us, &psi);
        let diff = metric_values(&psi)
            .iter()
            .zip(metric_values(&moved))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        lu_worst = lu_worst.max(diff);
    }
    let mut mono_worst: f64 = 0.0;
    for _ in 0..1000 {
        let psi = random_state(&mut rng, 8);
        mono_worst = mono_worst.max((ckw_residual(&psi).unwrap() - three_tangle(&psi).unwrap()).abs());
    }

    let rastrigin = |x: &[f64]| {
        10.0 * x.len() as f64 + x.iter().map(|v| v * v - 10.0 * (2.0 * std::f64::consts::PI * v).cos()).sum::<f64>()
    };
    let bounds = Bounds::uniform(4, -5.12, 5.12).unwrap();
    let de = DeConfig { max_generations: 40, ..DeConfig::fast(123) };
    let a = differential_evolution(rastrigin, &bounds, &de).unwrap();
    let b = differential_evolution(rastrigin, &bounds, &de).unwrap();
    let bits = |r: &pulseprep::OptimizationRun| -> Vec<u64> {
        r.best_params.iter().chain(&r.trace).map(|x| x.to_bits()).collect()
    };
    let deterministic = bits(&a) == bits(&b);

    let d = DeviceModel::sherbrooke(2, 2).unwrap();
    let cfg = SolverConfig::default();
    let mut drift_worst: f64 = 0.0;
    for _ in 0..100 {
        let s = random_schedule(&mut rng, &d);
        drift_worst = drift_worst.max(evolve_detailed(&d, &s, &StateVector::ground(4), &cfg).unwrap().norm_drift);
    }
    let drift_bar = 100.0 * cfg.rtol;
    Outcome::new(
        lu_worst < 1e-9 && mono_worst < 1e-8 && deterministic && drift_worst < drift_bar,
        format!(
            "LU invariance {lu_worst:.1e}; monogamy {mono_worst:.1e}; DE bitwise: {deterministic}; norm drift {drift_worst:.1e} (bar {drift_bar:.0e})"
        ),
    )
}

fn main() {
    // `cargo test -- --list` and filters are not meaningful here
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let criteria: [Criterion; 9] = [
        ("metric ground truths", c1_ground_truths),
        ("printed-state replays", c2_printed_replays),
        ("solver oracle equivalence", c3_solver_oracle),
        ("end-to-end Bell", c4_bell),
        ("end-to-end GHZ and W", c5_ghz_w),
        ("qutrit Gaussian-square GHZ", c6_qutrit),
        ("local-unitary validation", c7_lu),
        ("duration comparison", c8_durations),
        ("property suites", c9_properties),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let clock = Instant::now();
        let out = check();
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!("{tag} {} {name}: {} [{:.1}s]", i + 1, out.detail, clock.elapsed().as_secs_f64());
        if !out.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
