// Copyright 2026 The pulseprep Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised across the simulation and optimization stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid truncation: {levels} levels per site (need at least 2)")]
    InvalidTruncation { levels: usize },

    #[error("invalid device: {0}")]
    InvalidDevice(String),

    #[error("site {site} out of range for a {sites}-site device")]
    SiteOutOfRange { site: usize, sites: usize },

    #[error("invalid envelope: {0}")]
    InvalidEnvelope(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("schedule has zero duration")]
    ZeroDuration,

    #[error("{protocol} template expects {expected} parameters, got {got}")]
    Arity {
        protocol: String,
        expected: usize,
        got: usize,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("state is not normalized (norm {norm})")]
    Normalization { norm: f64 },

    #[error("projection onto the qubit subspace kept weight {kept:e} (degenerate)")]
    DegenerateProjection { kept: f64 },

    #[error("step size underflow at t = {t} ns (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("non-finite cost {value} at params {params:?}")]
    NonFiniteCost { value: f64, params: Vec<f64> },

    #[error("invalid optimizer config: {0}")]
    InvalidConfig(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    pub(crate) fn parse(path: impl AsRef<std::path::Path>, message: impl ToString) -> Self {
        Error::Parse {
            path: path.as_ref().display().to_string(),
            message: message.to_string(),
        }
    }
}
