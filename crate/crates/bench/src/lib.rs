// Copyright 2026 The pulseprep Authors
// SPDX-License-Identifier: Apache-2.0

//! Fixed inputs shared by the benchmarks.

use pulseprep::protocol::ParamKind;
use pulseprep::{Complex64, DeviceModel, ProtocolKind, ProtocolTemplate, PulseSchedule, StateVector};

/// Square-template schedule with every amplitude at 0.7, 20 dt local stages
/// and 400 dt cross-resonance stages.
pub fn reference_schedule(kind: ProtocolKind, levels: usize) -> (DeviceModel, PulseSchedule) {
    let device = DeviceModel::sherbrooke(kind.sites(), levels).expect("reference device");
    let template = ProtocolTemplate::square(kind);
    let dt = template.dt;
    let params: Vec<f64> = template
        .param_kinds()
        .iter()
        .map(|k| match k {
            ParamKind::Amplitude => 0.7,
            ParamKind::LocalDuration => 20.0 * dt,
            _ => 400.0 * dt,
        })
        .collect();
    let schedule = template.build(&device, &params).expect("reference schedule");
    (device, schedule)
}

/// Deterministic dense three-qubit state.
pub fn dense_state() -> StateVector {
    let amps = (0..8)
        .map(|k| {
            let k = k as f64;
            Complex64::new(0.3 + (1.7 * k).sin(), (0.9 * k).cos())
        })
        .collect();
    StateVector::normalized(amps).expect("non-zero")
}

