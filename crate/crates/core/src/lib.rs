// Copyright 2026 The pulseprep Authors
// SPDX-License-Identifier: Apache-2.0

//! Pulse-level simulation of coupled transmons and optimization of pulse
//! protocols against entanglement resources.

pub mod device;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod ode;
pub mod optimize;
pub mod protocol;
pub mod pulse;

pub use device::{DeviceConfig, DeviceModel, SHERBROOKE_DT};
pub use dynamics::{evolve, SolverConfig, StateVector};
pub use error::{Error, Result};
pub use experiment::{run_experiment, ExperimentConfig, RunArtifact};
pub use metrics::MetricReport;
pub use optimize::{CostSpec, DeConfig, NmConfig, OptimizationRun};
pub use protocol::{ProtocolKind, ProtocolTemplate};
pub use pulse::PulseSchedule;

pub use num_complex::Complex64;
