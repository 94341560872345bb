// Copyright 2026 The pulseprep Authors
// SPDX-License-Identifier: Apache-2.0

//! Embedded Dormand-Prince 5(4) integrator for complex linear systems with
//! PI step-size control.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Right-hand side `dy/dt = f(t, y)` over complex vectors.
pub trait ComplexSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[Complex64], dy: &mut [Complex64]);
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: u64,
    pub rejected: u64,
    pub rhs_evals: u64,
}

impl std::ops::AddAssign for StepStats {
    fn add_assign(&mut self, o: Self) {
        self.accepted += o.accepted;
        self.rejected += o.rejected;
        self.rhs_evals += o.rhs_evals;
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - BETA * 0.75;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

struct Work {
    k: [Vec<Complex64>; 7],
    tmp: Vec<Complex64>,
    y_new: Vec<Complex64>,
}

impl Work {
    fn new(n: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); n];
        Self {
            k: std::array::from_fn(|_| z.clone()),
            tmp: z.clone(),
            y_new: z,
        }
    }
}

impl Dopri5 {
    fn scaled_norm(&self, e: &[Complex64], y0: &[Complex64], y1: &[Complex64]) -> f64 {
        let mut acc = 0.0;
        for ((ei, a), b) in e.iter().zip(y0).zip(y1) {
            let sc = self.atol + self.rtol * a.norm().max(b.norm());
            acc += ei.norm_sqr() / (sc * sc);
        }
        (acc / e.len() as f64).sqrt()
    }

    fn initial_step<S: ComplexSystem>(&self, sys: &S, t: f64, y: &[Complex64], f0: &[Complex64], span: f64) -> f64 {
        let n = y.len();
        let norm = |v: &[Complex64]| {
            let s: f64 = v
                .iter()
                .zip(y)
                .map(|(vi, yi)| {
                    let sc = self.atol + self.rtol * yi.norm();
                    vi.norm_sqr() / (sc * sc)
                })
                .sum();
            (s / n as f64).sqrt()
        };
        let d0 = norm(y);
        let d1 = norm(f0);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(self.max_step).min(span);
        let y1: Vec<Complex64> = y.iter().zip(f0).map(|(a, b)| a + b * h0).collect();
        let mut f1 = vec![Complex64::new(0.0, 0.0); n];
        sys.rhs(t + h0, &y1, &mut f1);
        let diff: Vec<Complex64> = f1.iter().zip(f0).map(|(a, b)| (a - b) / h0).collect();
        let d2 = norm(&diff);
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(self.max_step).min(span)
    }

    /// Advance `y` from `t0` to `t1` in place. `h_hint` carries the step size
    /// across calls (0 picks one automatically).
    pub fn integrate<S: ComplexSystem>(
        &self,
        sys: &S,
        t0: f64,
        t1: f64,
        y: &mut [Complex64],
        h_hint: &mut f64,
    ) -> Result<StepStats> {
        let n = sys.dim();
        assert_eq!(y.len(), n);
        let mut stats = StepStats::default();
        let span = t1 - t0;
        if span <= 0.0 {
            return Ok(stats);
        }
        let mut w = Work::new(n);
        sys.rhs(t0, y, &mut w.k[0]);
        stats.rhs_evals += 1;

        let mut h = if *h_hint > 0.0 {
            h_hint.min(self.max_step).min(span)
        } else {
            stats.rhs_evals += 1;
            self.initial_step(sys, t0, y, &w.k[0], span)
        };
        let mut t = t0;
        let mut fac_old = 1e-4f64;
        let mut last_rejected = false;

        while t < t1 {
            let min_step = 1e-12 * t.abs().max(1.0);
            if h < min_step {
                return Err(Error::StepUnderflow { t, h });
            }
            let mut last = false;
            // Stretch by at most 1% to land on t1; a rejection always shrinks
            // h by more than that, so a refused last step cannot repeat.
            if t + 1.01 * h >= t1 {
                h = t1 - t;
                last = true;
            }

            let [k1, k2, k3, k4, k5, k6, k7] = &mut w.k;
            let tmp = &mut w.tmp;
            for i in 0..n {
                tmp[i] = y[i] + k1[i] * (h * A21);
            }
            sys.rhs(t + C2 * h, tmp, k2);
            for i in 0..n {
                tmp[i] = y[i] + (k1[i] * A31 + k2[i] * A32) * h;
            }
            sys.rhs(t + C3 * h, tmp, k3);
            for i in 0..n {
                tmp[i] = y[i] + (k1[i] * A41 + k2[i] * A42 + k3[i] * A43) * h;
            }
            sys.rhs(t + C4 * h, tmp, k4);
            for i in 0..n {
                tmp[i] = y[i] + (k1[i] * A51 + k2[i] * A52 + k3[i] * A53 + k4[i] * A54) * h;
            }
            sys.rhs(t + C5 * h, tmp, k5);
            for i in 0..n {
                tmp[i] = y[i] + (k1[i] * A61 + k2[i] * A62 + k3[i] * A63 + k4[i] * A64 + k5[i] * A65) * h;
            }
            sys.rhs(t + h, tmp, k6);
            let y_new = &mut w.y_new;
            for i in 0..n {
                y_new[i] = y[i] + (k1[i] * A71 + k3[i] * A73 + k4[i] * A74 + k5[i] * A75 + k6[i] * A76) * h;
            }
            sys.rhs(t + h, y_new, k7);
            stats.rhs_evals += 6;
            for i in 0..n {
                tmp[i] = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
            }
            let err = self.scaled_norm(tmp, y, y_new);

            let fac11 = err.powf(EXPO);
            if err <= 1.0 {
                let fac = (fac11 / fac_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                let mut h_new = h / fac;
                fac_old = err.max(1e-4);
                t = if last { t1 } else { t + h };
                y.copy_from_slice(y_new);
                std::mem::swap(k1, k7);
                stats.accepted += 1;
                if last_rejected {
                    h_new = h_new.min(h);
                }
                last_rejected = false;
                if !last {
                    *h_hint = h_new.min(self.max_step);
                }
                h = h_new.min(self.max_step);
            } else {
                h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
                last_rejected = true;
                stats.rejected += 1;
                if !err.is_finite() {
                    h *= 0.1;
                }
            }
        }
        Ok(stats)
    }
}
