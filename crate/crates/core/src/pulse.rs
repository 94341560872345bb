// Copyright 2026 The pulseprep Authors
// SPDX-License-Identifier: Apache-2.0

//! Pulse envelopes, channels and time-ordered schedules on the backend dt grid.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::device::{DeviceModel, SHERBROOKE_DT};
use crate::error::{Error, Result};

pub const SCHEDULE_SCHEMA: &str = "pulseprep.schedule/1";

// Slack when converting float durations to grid counts.
const GRID_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelKind {
    /// Local drive line of a site, `D<site>`.
    Drive { site: usize },
    /// Drive line of `drive_site` played at the frequency of `target_site`.
    Cross { drive_site: usize, target_site: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    #[serde(flatten)]
    pub kind: ChannelKind,
    pub carrier_freq: f64,
    #[serde(default)]
    pub phase: f64,
}

impl Channel {
    /// Local drive at the site's own frequency.
    pub fn drive(device: &DeviceModel, site: usize) -> Result<Self> {
        let t = device.transmons.get(site).ok_or(Error::SiteOutOfRange {
            site,
            sites: device.sites(),
        })?;
        Ok(Self {
            kind: ChannelKind::Drive { site },
            carrier_freq: t.omega,
            phase: 0.0,
        })
    }

    /// Cross-resonance drive: operator on `drive_site`, carrier at the target's frequency.
    pub fn cross(device: &DeviceModel, drive_site: usize, target_site: usize) -> Result<Self> {
        let sites = device.sites();
        if drive_site >= sites {
            return Err(Error::SiteOutOfRange { site: drive_site, sites });
        }
        if target_site >= sites {
            return Err(Error::SiteOutOfRange { site: target_site, sites });
        }
        if drive_site == target_site {
            return Err(Error::InvalidSchedule(format!(
                "cross channel needs two distinct sites, got {drive_site} twice"
            )));
        }
        Ok(Self {
            kind: ChannelKind::Cross { drive_site, target_site },
            carrier_freq: device.transmons[target_site].omega,
            phase: 0.0,
        })
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    /// Site whose `(b^dagger + b)` the channel drives.
    pub fn drive_site(&self) -> usize {
        match self.kind {
            ChannelKind::Drive { site } => site,
            ChannelKind::Cross { drive_site, .. } => drive_site,
        }
    }

    pub fn label(&self) -> String {
        match self.kind {
            ChannelKind::Drive { site } => format!("D{site}"),
            ChannelKind::Cross { drive_site, target_site } if target_site == drive_site + 1 => {
                format!("U{drive_site}")
            }
            ChannelKind::Cross { drive_site, target_site } => format!("U{drive_site}>{target_site}"),
        }
    }
}

/// Dimensionless complex envelope with `|amp| <= 1`, supported on `[0, duration]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Envelope {
    Constant {
        amp: Complex64,
        duration: f64,
    },
    /// Gaussian rise of length `(duration - width)/2`, flat top of `width`, symmetric fall.
    /// The Gaussian tails are truncated at the support edges, not lifted to zero.
    GaussianSquare {
        amp: Complex64,
        sigma: f64,
        width: f64,
        duration: f64,
    },
    /// Peak-normalized Gaussian centered on the support with derivative quadrature `beta`.
    Drag {
        amp: Complex64,
        sigma: f64,
        beta: f64,
        duration: f64,
    },
}

impl Envelope {
    pub fn constant(amp: f64, duration: f64) -> Self {
        Envelope::Constant {
            amp: Complex64::new(amp, 0.0),
            duration,
        }
    }

    pub fn gaussian_square(amp: f64, sigma: f64, width: f64, duration: f64) -> Self {
        Envelope::GaussianSquare {
            amp: Complex64::new(amp, 0.0),
            sigma,
            width,
            duration,
        }
    }

    pub fn amp(&self) -> Complex64 {
        match *self {
            Envelope::Constant { amp, .. }
            | Envelope::GaussianSquare { amp, .. }
            | Envelope::Drag { amp, .. } => amp,
        }
    }

    pub fn duration(&self) -> f64 {
        match *self {
            Envelope::Constant { duration, .. }
            | Envelope::GaussianSquare { duration, .. }
            | Envelope::Drag { duration, .. } => duration,
        }
    }

    pub fn with_duration(self, new: f64) -> Self {
        match self {
            Envelope::Constant { amp, .. } => Envelope::Constant { amp, duration: new },
            Envelope::GaussianSquare { amp, sigma, width, .. } => Envelope::GaussianSquare {
                amp,
                sigma,
                width: width.min(new),
                duration: new,
            },
            Envelope::Drag { amp, sigma, beta, .. } => Envelope::Drag {
                amp,
                sigma,
                beta,
                duration: new,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let amp = self.amp();
        if !(amp.re.is_finite() && amp.im.is_finite()) || amp.norm() > 1.0 + 1e-12 {
            return Err(Error::InvalidEnvelope(format!("|amp| must be <= 1, got {amp}")));
        }
        let duration = self.duration();
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::InvalidEnvelope(format!("duration must be > 0, got {duration}")));
        }
        match *self {
            Envelope::Constant { .. } => {}
            Envelope::GaussianSquare { sigma, width, .. } => {
                if !(sigma.is_finite() && sigma > 0.0) {
                    return Err(Error::InvalidEnvelope(format!("sigma must be > 0, got {sigma}")));
                }
                if !(0.0..=duration).contains(&width) {
                    return Err(Error::InvalidEnvelope(format!(
                        "width {width} outside [0, duration {duration}]"
                    )));
                }
            }
            Envelope::Drag { sigma, beta, .. } => {
                if !(sigma.is_finite() && sigma > 0.0) {
                    return Err(Error::InvalidEnvelope(format!("sigma must be > 0, got {sigma}")));
                }
                if !beta.is_finite() {
                    return Err(Error::InvalidEnvelope("non-finite DRAG beta".into()));
                }
            }
        }
        Ok(())
    }

    /// Interval inside `[0, duration]` where the envelope is constant, if any.
    pub fn flat_region(&self) -> Option<(f64, f64)> {
        match *self {
            Envelope::Constant { duration, .. } => Some((0.0, duration)),
            Envelope::GaussianSquare { width, duration, .. } if width > 0.0 => {
                let rise = (duration - width) / 2.0;
                Some((rise, rise + width))
            }
            _ => None,
        }
    }

    pub fn value(&self, t: f64) -> Complex64 {
        envelope_value(self, t)
    }
}

/// Complex envelope value at local time `t`; zero outside `[0, duration]`.
pub fn envelope_value(e: &Envelope, t: f64) -> Complex64 {
    let duration = e.duration();
    if !(0.0..=duration).contains(&t) {
        return Complex64::new(0.0, 0.0);
    }
    match *e {
        Envelope::Constant { amp, .. } => amp,
        Envelope::GaussianSquare { amp, sigma, width, .. } => {
            let rise = (duration - width) / 2.0;
            let g = if t < rise {
                gaussian(t - rise, sigma)
            } else if t > rise + width {
                gaussian(t - rise - width, sigma)
            } else {
                1.0
            };
            amp * g
        }
        Envelope::Drag { amp, sigma, beta, .. } => {
            let x = t - duration / 2.0;
            let g = gaussian(x, sigma);
            let dg = -x / (sigma * sigma) * g;
            amp * Complex64::new(g, beta * dg)
        }
    }
}

fn gaussian(x: f64, sigma: f64) -> f64 {
    (-(x * x) / (2.0 * sigma * sigma)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub channel: Channel,
    /// Start time in ns.
    pub start: f64,
    pub envelope: Envelope,
}

impl Segment {
    pub fn end(&self) -> f64 {
        self.start + self.envelope.duration()
    }

    pub fn is_active(&self, t: f64) -> bool {
        t >= self.start && t <= self.end()
    }
}

/// Scalar multiplying `(b^dagger + b)` before the drive-strength prefactor:
/// `Re[mu(t - start) * exp(-i(carrier * t + phase))]`.
pub fn drive_signal(seg: &Segment, t: f64) -> f64 {
    modulate(seg, envelope_value(&seg.envelope, t - seg.start), t)
}

/// As [`drive_signal`], with the envelope clock clamped into the segment so
/// the value at either end is the one-sided limit from inside.
pub fn drive_signal_inside(seg: &Segment, t: f64) -> f64 {
    let local = (t - seg.start).clamp(0.0, seg.envelope.duration());
    modulate(seg, envelope_value(&seg.envelope, local), t)
}

fn modulate(seg: &Segment, mu: Complex64, t: f64) -> f64 {
    if mu.re == 0.0 && mu.im == 0.0 {
        return 0.0;
    }
    let arg = seg.channel.carrier_freq * t + seg.channel.phase;
    // Re[mu * e^{-i arg}]
    mu.re * arg.cos() + mu.im * arg.sin()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule {
    pub segments: Vec<Segment>,
    /// Backend sample time in ns.
    pub dt: f64,
}

impl Default for PulseSchedule {
    fn default() -> Self {
        Self {
            segments: Vec::new(),
            dt: SHERBROOKE_DT,
        }
    }
}

impl PulseSchedule {
    pub fn new(dt: f64) -> Self {
        Self {
            segments: Vec::new(),
            dt,
        }
    }

    pub fn push(&mut self, channel: Channel, start: f64, envelope: Envelope) -> &mut Self {
        self.segments.push(Segment { channel, start, envelope });
        self
    }

    /// Latest segment end, in ns.
    pub fn duration(&self) -> f64 {
        self.segments.iter().map(Segment::end).fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidSchedule(format!("dt must be > 0, got {}", self.dt)));
        }
        let mut by_channel: BTreeMap<ChannelKind, Vec<(f64, f64)>> = BTreeMap::new();
        for seg in &self.segments {
            if !(seg.start.is_finite() && seg.start >= 0.0) {
                return Err(Error::InvalidSchedule(format!("segment start {} < 0", seg.start)));
            }
            seg.envelope.validate()?;
            by_channel
                .entry(seg.channel.kind)
                .or_default()
                .push((seg.start, seg.end()));
        }
        for (kind, mut spans) in by_channel {
            spans.sort_by(|a, b| a.0.total_cmp(&b.0));
            for pair in spans.windows(2) {
                if pair[1].0 < pair[0].1 - GRID_EPS * self.dt {
                    return Err(Error::InvalidSchedule(format!(
                        "overlapping segments on {kind:?}: [{}, {}] and [{}, {}]",
                        pair[0].0, pair[0].1, pair[1].0, pair[1].1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Round starts and durations to the dt grid (durations to at least one sample).
    pub fn snapped(&self) -> Self {
        let dt = self.dt;
        let segments = self
            .segments
            .iter()
            .map(|seg| {
                let start = (seg.start / dt).round() * dt;
                let samples = (seg.envelope.duration() / dt).round().max(1.0);
                Segment {
                    channel: seg.channel,
                    start,
                    envelope: seg.envelope.with_duration(samples * dt),
                }
            })
            .collect();
        Self { segments, dt }
    }

    /// Every time at which some envelope changes analytic form.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut points = vec![0.0];
        for seg in &self.segments {
            points.push(seg.start);
            points.push(seg.end());
            if let Envelope::GaussianSquare { .. } = seg.envelope {
                if let Some((a, b)) = seg.envelope.flat_region() {
                    points.push(seg.start + a);
                    points.push(seg.start + b);
                }
            }
        }
        points.sort_by(f64::total_cmp);
        points.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        points
    }

    pub fn to_json(&self) -> Result<String> {
        let file = ScheduleFile::from_schedule(self)?;
        Ok(serde_json::to_string_pretty(&file).expect("schedule serializes"))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScheduleFile = serde_json::from_str(text).map_err(|e| Error::parse("<schedule>", e))?;
        file.into_schedule()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Parse { message, .. } => Error::parse(path, message),
            other => other,
        })
    }
}

/// Total schedule length in whole samples, `ceil(duration / dt)`.
pub fn schedule_duration_dt(s: &PulseSchedule) -> Result<u64> {
    let duration = s.duration();
    if s.segments.is_empty() || duration <= 0.0 {
        return Err(Error::ZeroDuration);
    }
    Ok((duration / s.dt - GRID_EPS).ceil() as u64)
}

fn grid_count(value: f64, dt: f64, what: &str) -> Result<u64> {
    let n = (value / dt).round();
    if (value - n * dt).abs() > 1e-6 * dt {
        return Err(Error::InvalidSchedule(format!(
            "{what} {value} ns is off the dt grid; snap the schedule before export"
        )));
    }
    Ok(n as u64)
}

#[derive(Debug, Serialize, Deserialize)]
struct ScheduleFile {
    schema: String,
    dt: f64,
    duration_dt: u64,
    segments: Vec<SegmentRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SegmentRecord {
    channel: String,
    #[serde(flatten)]
    spec: Channel,
    start_dt: u64,
    envelope: EnvelopeRecord,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
enum EnvelopeRecord {
    Constant {
        amp: [f64; 2],
        duration_dt: u64,
    },
    GaussianSquare {
        amp: [f64; 2],
        sigma_ns: f64,
        width_ns: f64,
        duration_dt: u64,
    },
    Drag {
        amp: [f64; 2],
        sigma_ns: f64,
        beta_ns: f64,
        duration_dt: u64,
    },
}

impl ScheduleFile {
    fn from_schedule(s: &PulseSchedule) -> Result<Self> {
        s.validate()?;
        let dt = s.dt;
        let mut segments = Vec::with_capacity(s.segments.len());
        for seg in &s.segments {
            let duration_dt = grid_count(seg.envelope.duration(), dt, "duration")?;
            let pair = |a: Complex64| [a.re, a.im];
            let envelope = match seg.envelope {
                Envelope::Constant { amp, .. } => EnvelopeRecord::Constant {
                    amp: pair(amp),
                    duration_dt,
                },
                Envelope::GaussianSquare { amp, sigma, width, .. } => EnvelopeRecord::GaussianSquare {
                    amp: pair(amp),
                    sigma_ns: sigma,
                    width_ns: width,
                    duration_dt,
                },
                Envelope::Drag { amp, sigma, beta, .. } => EnvelopeRecord::Drag {
                    amp: pair(amp),
                    sigma_ns: sigma,
                    beta_ns: beta,
                    duration_dt,
                },
            };
            segments.push(SegmentRecord {
                channel: seg.channel.label(),
                spec: seg.channel,
                start_dt: grid_count(seg.start, dt, "start")?,
                envelope,
            });
        }
        Ok(Self {
            schema: SCHEDULE_SCHEMA.to_string(),
            dt,
            duration_dt: if s.segments.is_empty() { 0 } else { schedule_duration_dt(s)? },
            segments,
        })
    }

    fn into_schedule(self) -> Result<PulseSchedule> {
        if self.schema != SCHEDULE_SCHEMA {
            return Err(Error::parse("<schedule>", format!("unsupported schema tag {:?}", self.schema)));
        }
        let dt = self.dt;
        let ns = |n: u64| n as f64 * dt;
        let c = |a: [f64; 2]| Complex64::new(a[0], a[1]);
        let segments = self
            .segments
            .into_iter()
            .map(|rec| {
                let envelope = match rec.envelope {
                    EnvelopeRecord::Constant { amp, duration_dt } => Envelope::Constant {
                        amp: c(amp),
                        duration: ns(duration_dt),
                    },
                    EnvelopeRecord::GaussianSquare { amp, sigma_ns, width_ns, duration_dt } => {
                        Envelope::GaussianSquare {
                            amp: c(amp),
                            sigma: sigma_ns,
                            width: width_ns,
                            duration: ns(duration_dt),
                        }
                    }
                    EnvelopeRecord::Drag { amp, sigma_ns, beta_ns, duration_dt } => Envelope::Drag {
                        amp: c(amp),
                        sigma: sigma_ns,
                        beta: beta_ns,
                        duration: ns(duration_dt),
                    },
                };
                Segment {
                    channel: rec.spec,
                    start: ns(rec.start_dt),
                    envelope,
                }
            })
            .collect();
        let schedule = PulseSchedule { segments, dt };
        schedule.validate()?;
        Ok(schedule)
    }
}

/// Wrap a phase into `[0, 2 pi)`.
pub fn wrap_phase(phase: f64) -> f64 {
    phase.rem_euclid(2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dev(sites: usize) -> DeviceModel {
        DeviceModel::sherbrooke(sites, 2).unwrap()
    }

    #[test]
    fn constant_envelope_support() {
        let e = Envelope::constant(0.5, 10.0);
        assert_eq!(envelope_value(&e, 5.0), Complex64::new(0.5, 0.0));
        assert_eq!(envelope_value(&e, -1e-9), Complex64::new(0.0, 0.0));
        assert_eq!(envelope_value(&e, 10.0 + 1e-9), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn gaussian_square_plateau_and_degenerate_width() {
        let e = Envelope::gaussian_square(0.8, 3.0, 20.0, 40.0);
        assert_eq!(envelope_value(&e, 20.0), Complex64::new(0.8, 0.0));
        // edges carry exp(-r^2 / 2 sigma^2) with r = 10
        let edge = 0.8 * (-100.0f64 / 18.0).exp();
        assert!((envelope_value(&e, 0.0).re - edge).abs() < 1e-15);
        assert!((envelope_value(&e, 40.0).re - edge).abs() < 1e-15);

        let flat = Envelope::gaussian_square(0.3, 2.0, 12.0, 12.0);
        for k in 0..=24 {
            let t = k as f64 * 0.5;
            assert_eq!(envelope_value(&flat, t), Complex64::new(0.3, 0.0));
        }
    }

    #[test]
    fn gaussian_square_is_symmetric_and_continuous() {
        let e = Envelope::gaussian_square(1.0, 4.0, 7.0, 31.0);
        for k in 0..=310 {
            let t = k as f64 * 0.1;
            let a = envelope_value(&e, t).re;
            let b = envelope_value(&e, 31.0 - t).re;
            assert!((a - b).abs() < 1e-12);
        }
        let rise = 12.0;
        let h = 1e-9;
        for knot in [rise, rise + 7.0] {
            let l = envelope_value(&e, knot - h).re;
            let r = envelope_value(&e, knot + h).re;
            assert!((l - r).abs() < 1e-8);
        }
    }

    #[test]
    fn drag_quadrature_is_derivative() {
        let e = Envelope::Drag {
            amp: Complex64::new(1.0, 0.0),
            sigma: 5.0,
            beta: 2.0,
            duration: 40.0,
        };
        let center = envelope_value(&e, 20.0);
        assert!((center.re - 1.0).abs() < 1e-15 && center.im.abs() < 1e-15);
        let t = 14.0;
        let h = 1e-5;
        let numeric = (envelope_value(&e, t + h).re - envelope_value(&e, t - h).re) / (2.0 * h);
        assert!((envelope_value(&e, t).im - 2.0 * numeric).abs() < 1e-8);
    }

    #[test]
    fn envelope_validation() {
        assert!(Envelope::constant(1.2, 1.0).validate().is_err());
        assert!(Envelope::constant(0.5, 0.0).validate().is_err());
        assert!(Envelope::gaussian_square(0.5, 0.0, 1.0, 2.0).validate().is_err());
        assert!(Envelope::gaussian_square(0.5, 1.0, 3.0, 2.0).validate().is_err());
        assert!(Envelope::gaussian_square(-1.0, 1.0, 2.0, 2.0).validate().is_ok());
    }

    #[test]
    fn drive_signal_values() {
        let d = dev(1);
        let ch = Channel::drive(&d, 0).unwrap();
        let seg = Segment { channel: ch, start: 0.0, envelope: Envelope::constant(1.0, 5.0) };
        assert!((drive_signal(&seg, 0.0) - 1.0).abs() < 1e-15);
        let quad = Segment { channel: ch.with_phase(PI / 2.0), ..seg };
        assert!(drive_signal(&quad, 0.0).abs() < 1e-15);
        assert_eq!(drive_signal(&seg, 6.0), 0.0);
        let t = 1.3;
        let expected = (29.877f64 * t).cos();
        assert!((drive_signal(&seg, t) - expected).abs() < 1e-14);
    }

    #[test]
    fn cross_channel_uses_target_frequency() {
        let d = dev(3);
        let u0 = Channel::cross(&d, 0, 1).unwrap();
        assert_eq!(u0.carrier_freq, 30.235);
        assert_eq!(u0.drive_site(), 0);
        assert_eq!(u0.label(), "U0");
        assert_eq!(Channel::cross(&d, 1, 2).unwrap().label(), "U1");
        assert!(Channel::cross(&d, 1, 1).is_err());
        assert!(Channel::cross(&d, 0, 3).is_err());
    }

    #[test]
    fn duration_in_samples() {
        let d = dev(1);
        let dt = SHERBROOKE_DT;
        let mut s = PulseSchedule::new(dt);
        assert!(matches!(schedule_duration_dt(&s), Err(Error::ZeroDuration)));
        s.push(Channel::drive(&d, 0).unwrap(), 0.0, Envelope::constant(0.3, 2.0 * dt));
        assert_eq!(schedule_duration_dt(&s).unwrap(), 2);
        s.push(Channel::drive(&d, 0).unwrap(), 2.0 * dt, Envelope::constant(0.3, 0.5 * dt));
        assert_eq!(schedule_duration_dt(&s).unwrap(), 3);
    }

    #[test]
    fn overlapping_segments_rejected() {
        let d = dev(2);
        let mut s = PulseSchedule::default();
        let ch = Channel::drive(&d, 0).unwrap();
        s.push(ch, 0.0, Envelope::constant(0.3, 10.0));
        s.push(ch, 5.0, Envelope::constant(0.3, 10.0));
        assert!(s.validate().is_err());
        let mut ok = PulseSchedule::default();
        ok.push(ch, 0.0, Envelope::constant(0.3, 10.0));
        ok.push(Channel::drive(&d, 1).unwrap(), 5.0, Envelope::constant(0.3, 10.0));
        ok.push(ch, 10.0, Envelope::constant(0.3, 10.0));
        assert!(ok.validate().is_ok());
    }

    #[test]
    fn export_requires_grid_and_roundtrips() {
        let d = dev(2);
        let dt = SHERBROOKE_DT;
        let mut s = PulseSchedule::new(dt);
        s.push(Channel::drive(&d, 0).unwrap(), 0.0, Envelope::constant(0.25, 3.3 * dt));
        s.push(
            Channel::cross(&d, 0, 1).unwrap().with_phase(0.4),
            3.0 * dt,
            Envelope::gaussian_square(-0.7, 5.1, 10.0 * dt, 30.0 * dt),
        );
        assert!(s.to_json().is_err());
        let snapped = s.snapped();
        let text = snapped.to_json().unwrap();
        assert!(text.contains(SCHEDULE_SCHEMA));
        assert!(text.contains("\"U0\""));
        let back = PulseSchedule::from_json(&text).unwrap();
        assert_eq!(back, snapped);
        assert_eq!(back.to_json().unwrap(), text);
    }

    #[test]
    fn breakpoints_include_flat_top_edges() {
        let d = dev(1);
        let mut s = PulseSchedule::new(1.0);
        s.push(Channel::drive(&d, 0).unwrap(), 2.0, Envelope::gaussian_square(0.5, 1.0, 4.0, 10.0));
        assert_eq!(s.breakpoints(), vec![0.0, 2.0, 5.0, 9.0, 12.0]);
    }
}
