// Copyright 2026 The pulseprep Authors
// SPDX-License-Identifier: Apache-2.0

//! Fixed pulse-sequence topologies for Bell, GHZ and W preparation.
//!
//! Every template is a list of sequential stages; pulses inside a stage start
//! together. Square templates carry one amplitude per pulse and one shared
//! duration per stage. Gaussian-square templates reuse fixed flat-top widths
//! and expose `(amp, sigma)` per pulse. Optional carrier phases are appended
//! last, one per pulse.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::device::{DeviceModel, SHERBROOKE_DT};
use crate::error::{Error, Result};
use crate::pulse::{Channel, Envelope, PulseSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    Bell,
    Ghz,
    W,
}

impl ProtocolKind {
    pub fn sites(self) -> usize {
        match self {
            ProtocolKind::Bell => 2,
            ProtocolKind::Ghz | ProtocolKind::W => 3,
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProtocolKind::Bell => "bell",
            ProtocolKind::Ghz => "ghz",
            ProtocolKind::W => "w",
        })
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bell" => Ok(ProtocolKind::Bell),
            "ghz" => Ok(ProtocolKind::Ghz),
            "w" => Ok(ProtocolKind::W),
            other => Err(Error::InvalidConfig(format!("unknown protocol {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeFamily {
    #[default]
    Square,
    GaussianSquare,
}

/// Channel of the closing cross pulse of the W sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum FinalCross {
    #[default]
    U0,
    U1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseSlot {
    Local(usize),
    Cross { drive: usize, target: usize },
}

impl PulseSlot {
    fn channel(self, device: &DeviceModel) -> Result<Channel> {
        match self {
            PulseSlot::Local(site) => Channel::drive(device, site),
            PulseSlot::Cross { drive, target } => Channel::cross(device, drive, target),
        }
    }

    fn is_cross(self) -> bool {
        matches!(self, PulseSlot::Cross { .. })
    }

    fn label(self) -> String {
        match self {
            PulseSlot::Local(site) => format!("D{site}"),
            PulseSlot::Cross { drive, .. } => format!("U{drive}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamKind {
    Amplitude,
    LocalDuration,
    CrossDuration,
    Sigma,
    Phase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolTemplate {
    pub kind: ProtocolKind,
    #[serde(default)]
    pub family: EnvelopeFamily,
    #[serde(default)]
    pub final_cross: FinalCross,
    #[serde(default)]
    pub with_phases: bool,
    /// Flat-top widths in ns, one per pulse, for the Gaussian-square family.
    #[serde(default)]
    pub widths: Vec<f64>,
    /// Gaussian rise length in units of sigma.
    #[serde(default = "default_risefall")]
    pub risefall_sigmas: f64,
    /// Round durations to the dt grid when building.
    #[serde(default = "default_true")]
    pub snap: bool,
    #[serde(default = "default_dt")]
    pub dt: f64,
}

fn default_risefall() -> f64 {
    2.0
}

fn default_true() -> bool {
    true
}

fn default_dt() -> f64 {
    SHERBROOKE_DT
}

const BELL_LOCAL: [PulseSlot; 2] = [PulseSlot::Local(0), PulseSlot::Local(1)];
const ALL_LOCAL: [PulseSlot; 3] = [PulseSlot::Local(0), PulseSlot::Local(1), PulseSlot::Local(2)];
const U0: PulseSlot = PulseSlot::Cross { drive: 0, target: 1 };
const U1: PulseSlot = PulseSlot::Cross { drive: 1, target: 2 };

impl ProtocolTemplate {
    pub fn square(kind: ProtocolKind) -> Self {
        Self {
            kind,
            family: EnvelopeFamily::Square,
            final_cross: FinalCross::U0,
            with_phases: false,
            widths: Vec::new(),
            risefall_sigmas: default_risefall(),
            snap: true,
            dt: SHERBROOKE_DT,
        }
    }

    /// Gaussian-square variant whose flat-top widths are the pulse durations of a
    /// square-template solution.
    pub fn gaussian_from_square(square: &ProtocolTemplate, params: &[f64]) -> Result<Self> {
        if square.family != EnvelopeFamily::Square {
            return Err(Error::InvalidConfig("widths must come from a square template".into()));
        }
        let schedule = square.build_unchecked(params)?;
        let widths = schedule.iter().map(|(_, _, e)| e.duration()).collect();
        Ok(Self {
            family: EnvelopeFamily::GaussianSquare,
            widths,
            ..square.clone()
        })
    }

    pub fn stages(&self) -> Vec<Vec<PulseSlot>> {
        match self.kind {
            ProtocolKind::Bell => vec![BELL_LOCAL.to_vec(), vec![U0]],
            ProtocolKind::Ghz => vec![
                BELL_LOCAL.to_vec(),
                vec![U0],
                vec![PulseSlot::Local(2)],
                vec![U1],
            ],
            ProtocolKind::W => {
                let last = match self.final_cross {
                    FinalCross::U0 => U0,
                    FinalCross::U1 => U1,
                };
                vec![
                    ALL_LOCAL.to_vec(),
                    vec![U0],
                    ALL_LOCAL.to_vec(),
                    vec![U1],
                    ALL_LOCAL.to_vec(),
                    vec![last],
                ]
            }
        }
    }

    pub fn n_pulses(&self) -> usize {
        self.stages().iter().map(Vec::len).sum()
    }

    /// Kind of each entry of the parameter vector, in order.
    pub fn param_kinds(&self) -> Vec<ParamKind> {
        let mut kinds = Vec::new();
        for stage in self.stages() {
            match self.family {
                EnvelopeFamily::Square => {
                    kinds.extend(stage.iter().map(|_| ParamKind::Amplitude));
                    kinds.push(if stage[0].is_cross() {
                        ParamKind::CrossDuration
                    } else {
                        ParamKind::LocalDuration
                    });
                }
                EnvelopeFamily::GaussianSquare => {
                    for _ in &stage {
                        kinds.push(ParamKind::Amplitude);
                        kinds.push(ParamKind::Sigma);
                    }
                }
            }
        }
        if self.with_phases {
            kinds.extend((0..self.n_pulses()).map(|_| ParamKind::Phase));
        }
        kinds
    }

    pub fn param_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        for (i, stage) in self.stages().iter().enumerate() {
            match self.family {
                EnvelopeFamily::Square => {
                    names.extend(stage.iter().map(|p| format!("s{i}.{}.amp", p.label())));
                    names.push(format!("s{i}.duration"));
                }
                EnvelopeFamily::GaussianSquare => {
                    for p in stage {
                        names.push(format!("s{i}.{}.amp", p.label()));
                        names.push(format!("s{i}.{}.sigma", p.label()));
                    }
                }
            }
        }
        if self.with_phases {
            for (i, stage) in self.stages().iter().enumerate() {
                names.extend(stage.iter().map(|p| format!("s{i}.{}.phase", p.label())));
            }
        }
        names
    }

    pub fn n_params(&self) -> usize {
        self.param_kinds().len()
    }

    fn snap_duration(&self, d: f64) -> f64 {
        if self.snap {
            (d / self.dt).round().max(1.0) * self.dt
        } else {
            d
        }
    }

    // Lays out (slot, start, envelope) triples without touching a device.
    fn build_unchecked(&self, params: &[f64]) -> Result<Vec<(PulseSlot, f64, Envelope)>> {
        let expected = self.n_params();
        if params.len() != expected {
            return Err(Error::Arity {
                protocol: format!("{}/{:?}", self.kind, self.family),
                expected,
                got: params.len(),
            });
        }
        if self.family == EnvelopeFamily::GaussianSquare && self.widths.len() != self.n_pulses() {
            return Err(Error::InvalidConfig(format!(
                "gaussian-square template needs {} widths, has {}",
                self.n_pulses(),
                self.widths.len()
            )));
        }
        let mut out = Vec::with_capacity(self.n_pulses());
        let mut cursor = 0usize;
        let mut pulse = 0usize;
        let mut start = 0.0;
        for stage in self.stages() {
            let mut stage_len = 0.0f64;
            match self.family {
                EnvelopeFamily::Square => {
                    let amps = &params[cursor..cursor + stage.len()];
                    let duration = self.snap_duration(params[cursor + stage.len()]);
                    cursor += stage.len() + 1;
                    for (slot, &amp) in stage.iter().zip(amps) {
                        out.push((*slot, start, Envelope::constant(amp, duration)));
                    }
                    stage_len = duration;
                }
                EnvelopeFamily::GaussianSquare => {
                    for (k, slot) in stage.iter().enumerate() {
                        let amp = params[cursor + 2 * k];
                        let sigma = params[cursor + 2 * k + 1];
                        let width = self.widths[pulse + k];
                        let duration = self.snap_duration(width + 2.0 * self.risefall_sigmas * sigma);
                        let envelope = Envelope::gaussian_square(amp, sigma, width.min(duration), duration);
                        out.push((*slot, start, envelope));
                        stage_len = stage_len.max(duration);
                    }
                    cursor += 2 * stage.len();
                }
            }
            pulse += stage.len();
            start += stage_len;
        }
        Ok(out)
    }

    pub fn build(&self, device: &DeviceModel, params: &[f64]) -> Result<PulseSchedule> {
        if device.sites() != self.kind.sites() {
            return Err(Error::Dimension(format!(
                "{} protocol needs {} sites, device has {}",
                self.kind,
                self.kind.sites(),
                device.sites()
            )));
        }
        let layout = self.build_unchecked(params)?;
        let phases = if self.with_phases {
            &params[params.len() - self.n_pulses()..]
        } else {
            &[][..]
        };
        let mut schedule = PulseSchedule::new(self.dt);
        for (i, (slot, start, envelope)) in layout.into_iter().enumerate() {
            let mut channel = slot.channel(device)?;
            if let Some(phase) = phases.get(i) {
                channel = channel.with_phase(*phase);
            }
            schedule.push(channel, start, envelope);
        }
        schedule.validate()?;
        Ok(schedule)
    }
}

/// Square-pulse template of `kind` filled from `params`.
pub fn build_protocol(kind: ProtocolKind, device: &DeviceModel, params: &[f64]) -> Result<PulseSchedule> {
    ProtocolTemplate::square(kind).build(device, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::{schedule_duration_dt, ChannelKind};

    fn dev(sites: usize) -> DeviceModel {
        DeviceModel::sherbrooke(sites, 2).unwrap()
    }

    #[test]
    fn parameter_counts() {
        assert_eq!(ProtocolTemplate::square(ProtocolKind::Bell).n_params(), 5);
        assert_eq!(ProtocolTemplate::square(ProtocolKind::Ghz).n_params(), 9);
        assert_eq!(ProtocolTemplate::square(ProtocolKind::W).n_params(), 18);
        let mut phased = ProtocolTemplate::square(ProtocolKind::Bell);
        phased.with_phases = true;
        assert_eq!(phased.n_params(), 8);
        assert_eq!(phased.param_names().len(), 8);
    }

    #[test]
    fn bell_layout() {
        let dt = SHERBROOKE_DT;
        let s = build_protocol(ProtocolKind::Bell, &dev(2), &[0.5, -0.2, 10.0 * dt, 0.9, 979.0 * dt]).unwrap();
        assert_eq!(s.segments.len(), 3);
        assert_eq!(s.segments[0].channel.kind, ChannelKind::Drive { site: 0 });
        assert_eq!(s.segments[1].channel.kind, ChannelKind::Drive { site: 1 });
        assert_eq!(s.segments[1].start, 0.0);
        assert_eq!(s.segments[2].channel.kind, ChannelKind::Cross { drive_site: 0, target_site: 1 });
        assert_eq!(s.segments[2].start, 10.0 * dt);
        assert_eq!(schedule_duration_dt(&s).unwrap(), 989);
    }

    #[test]
    fn arity_error() {
        let err = build_protocol(ProtocolKind::Bell, &dev(2), &[0.1; 4]).unwrap_err();
        assert!(matches!(err, Error::Arity { expected: 5, got: 4, .. }));
        assert!(build_protocol(ProtocolKind::Ghz, &dev(2), &[0.1; 9]).is_err());
    }

    #[test]
    fn w_layout_and_final_cross_switch() {
        let params: Vec<f64> = ProtocolTemplate::square(ProtocolKind::W)
            .param_kinds()
            .iter()
            .map(|k| if *k == ParamKind::Amplitude { 0.1 } else { 20.0 })
            .collect();
        let s = build_protocol(ProtocolKind::W, &dev(3), &params).unwrap();
        assert_eq!(s.segments.len(), 12);
        let locals = s
            .segments
            .iter()
            .filter(|seg| matches!(seg.channel.kind, ChannelKind::Drive { .. }))
            .count();
        assert_eq!(locals, 9);
        assert_eq!(s.segments[11].channel.label(), "U0");

        let mut t = ProtocolTemplate::square(ProtocolKind::W);
        t.final_cross = FinalCross::U1;
        let s1 = t.build(&dev(3), &params).unwrap();
        assert_eq!(s1.segments[11].channel.label(), "U1");
    }

    #[test]
    fn durations_snap_to_grid() {
        let dt = SHERBROOKE_DT;
        let s = build_protocol(ProtocolKind::Bell, &dev(2), &[0.5, 0.5, 3.4 * dt, 0.5, 7.6 * dt]).unwrap();
        assert_eq!(s.segments[2].start, 3.0 * dt);
        assert_eq!(s.duration(), 3.0 * dt + 8.0 * dt);
        assert!(s.to_json().is_ok());
    }

    #[test]
    fn gaussian_widths_from_square() {
        let dt = SHERBROOKE_DT;
        let square = ProtocolTemplate::square(ProtocolKind::Ghz);
        let sq_params = [0.1, 0.2, 10.0 * dt, 0.5, 400.0 * dt, 0.3, 5.0 * dt, 0.6, 500.0 * dt];
        let g = ProtocolTemplate::gaussian_from_square(&square, &sq_params).unwrap();
        assert_eq!(g.widths, vec![10.0 * dt, 10.0 * dt, 400.0 * dt, 5.0 * dt, 500.0 * dt]);
        assert_eq!(g.n_params(), 10);
        let gp = [0.1, 2.0 * dt, 0.2, 4.0 * dt, 0.5, 10.0 * dt, 0.3, dt, 0.6, 20.0 * dt];
        let s = g.build(&dev(3), &gp).unwrap();
        // stage 0 lasts the longer of its two pulses: 10 + 4*4 dt
        assert_eq!(s.segments[2].start, 26.0 * dt);
        let total = 26.0 + 440.0 + 9.0 + 580.0;
        assert_eq!(schedule_duration_dt(&s).unwrap(), total as u64);
    }

    #[test]
    fn deterministic_build() {
        let p = [0.3, -0.4, 12.3, 0.8, 300.7];
        let a = build_protocol(ProtocolKind::Bell, &dev(2), &p).unwrap();
        let b = build_protocol(ProtocolKind::Bell, &dev(2), &p).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    }
}
