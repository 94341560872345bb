// Copyright 2026 The pulseprep Authors
// SPDX-License-Identifier: Apache-2.0

//! Differential evolution, Nelder-Mead, resource cost functions and
//! local-unitary fitting.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::device::DeviceModel;
use crate::dynamics::{evolve_detailed, project_to_qubits, SolverConfig, StateVector};
use crate::error::{Error, Result};
use crate::metrics::{bures_distance, negativity, three_tangle, w_cost, DensityMatrix};
use crate::protocol::{ParamKind, ProtocolTemplate};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Bounds {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let b = Self { lo, hi };
        b.validate()?;
        Ok(b)
    }

    pub fn uniform(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn validate(&self) -> Result<()> {
        if self.lo.len() != self.hi.len() || self.lo.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "bounds need matching non-empty lo/hi, got {} and {}",
                self.lo.len(),
                self.hi.len()
            )));
        }
        for (i, (lo, hi)) in self.lo.iter().zip(&self.hi).enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(Error::InvalidConfig(format!("parameter {i}: bounds [{lo}, {hi}] are not an interval")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn clip(&self, x: &mut [f64]) {
        for ((v, lo), hi) in x.iter_mut().zip(&self.lo).zip(&self.hi) {
            *v = v.clamp(*lo, *hi);
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().zip(&self.lo).zip(&self.hi).all(|((v, lo), hi)| v >= lo && v <= hi)
    }
}

/// Per-kind parameter ranges for protocol templates. Durations and sigmas are
/// in units of dt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoundsSpec {
    pub amplitude: [f64; 2],
    pub local_duration_dt: [f64; 2],
    pub cross_duration_dt: [f64; 2],
    pub sigma_dt: [f64; 2],
}

impl Default for BoundsSpec {
    fn default() -> Self {
        Self {
            amplitude: [-1.0, 1.0],
            local_duration_dt: [2.0, 800.0],
            cross_duration_dt: [2.0, 800.0],
            sigma_dt: [1.0, 64.0],
        }
    }
}

impl BoundsSpec {
    pub fn for_template(&self, template: &ProtocolTemplate) -> Result<Bounds> {
        if self.amplitude[0] < -1.0 || self.amplitude[1] > 1.0 {
            return Err(Error::InvalidConfig(format!("amplitude bounds {:?} leave [-1, 1]", self.amplitude)));
        }
        for (name, r) in [
            ("local duration", self.local_duration_dt),
            ("cross duration", self.cross_duration_dt),
            ("sigma", self.sigma_dt),
        ] {
            if r[0] <= 0.0 {
                return Err(Error::InvalidConfig(format!("{name} bounds {r:?} must be positive")));
            }
        }
        let dt = template.dt;
        let (lo, hi) = template
            .param_kinds()
            .into_iter()
            .map(|k| match k {
                ParamKind::Amplitude => (self.amplitude[0], self.amplitude[1]),
                ParamKind::LocalDuration => (self.local_duration_dt[0] * dt, self.local_duration_dt[1] * dt),
                ParamKind::CrossDuration => (self.cross_duration_dt[0] * dt, self.cross_duration_dt[1] * dt),
                ParamKind::Sigma => (self.sigma_dt[0] * dt, self.sigma_dt[1] * dt),
                ParamKind::Phase => (0.0, 2.0 * PI),
            })
            .unzip();
        Bounds::new(lo, hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DeConfig {
    /// `None` picks 15 x dimension, capped at 150.
    pub population_size: Option<usize>,
    /// Mutation factor drawn uniformly from this range once per generation.
    pub mutation: [f64; 2],
    pub crossover: f64,
    pub max_generations: usize,
    pub seed: u64,
    /// Stop when the population cost std falls to `tol * |mean| + atol`.
    pub tol: f64,
    pub atol: f64,
}

impl Default for DeConfig {
    fn default() -> Self {
        Self {
            population_size: None,
            mutation: [0.5, 1.0],
            crossover: 0.7,
            max_generations: 300,
            seed: 0,
            tol: 1e-8,
            atol: 0.0,
        }
    }
}

impl DeConfig {
    pub fn fast(seed: u64) -> Self {
        Self {
            population_size: Some(30),
            max_generations: 60,
            seed,
            ..Self::default()
        }
    }

    pub fn paper(seed: u64) -> Self {
        Self {
            population_size: Some(150),
            max_generations: 300,
            seed,
            ..Self::default()
        }
    }

    pub fn population_for(&self, dim: usize) -> usize {
        self.population_size.unwrap_or((15 * dim).min(150))
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let [f_lo, f_hi] = self.mutation;
        if self.population_for(dim) < 4 {
            return Err(Error::InvalidConfig("population must hold at least 4 members".into()));
        }
        if !(self.crossover > 0.0 && self.crossover <= 1.0) {
            return Err(Error::InvalidConfig(format!("crossover {} outside (0, 1]", self.crossover)));
        }
        if !(f_lo > 0.0 && f_lo <= f_hi && f_hi <= 2.0) {
            return Err(Error::InvalidConfig(format!("mutation range {:?} outside (0, 2]", self.mutation)));
        }
        if self.max_generations == 0 || !(self.tol >= 0.0 && self.atol >= 0.0) {
            return Err(Error::InvalidConfig("need max_generations > 0 and non-negative tolerances".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NmConfig {
    /// Initial simplex offset as a fraction of each coordinate (or of the
    /// bound width when bounds are given).
    pub initial_scale: f64,
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    pub max_iterations: usize,
    pub f_tol: f64,
    pub x_tol: f64,
}

impl Default for NmConfig {
    fn default() -> Self {
        Self {
            initial_scale: 0.05,
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            max_iterations: 2000,
            f_tol: 1e-12,
            x_tol: 1e-10,
        }
    }
}

impl NmConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.reflection > 0.0
            && self.expansion > 1.0
            && self.expansion > self.reflection
            && self.contraction > 0.0
            && self.contraction < 1.0
            && self.shrink > 0.0
            && self.shrink < 1.0
            && self.initial_scale > 0.0;
        if !ok {
            return Err(Error::InvalidConfig(format!("invalid Nelder-Mead coefficients {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationRun {
    pub best_params: Vec<f64>,
    pub best_cost: f64,
    /// Best-so-far cost after each generation (or iteration).
    pub trace: Vec<f64>,
    pub evaluations: usize,
    pub seed: Option<u64>,
    pub converged: bool,
    pub wall_time_s: f64,
}

fn checked(cost: f64, params: &[f64]) -> Result<f64> {
    // +inf is a legal penalty; NaN and -inf are evaluation bugs.
    if cost.is_nan() || cost == f64::NEG_INFINITY {
        return Err(Error::NonFiniteCost {
            value: cost,
            params: params.to_vec(),
        });
    }
    Ok(cost)
}

fn spread(costs: &[f64]) -> (f64, f64) {
    let n = costs.len() as f64;
    let mean = costs.iter().sum::<f64>() / n;
    let var = costs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn argmin(costs: &[f64]) -> usize {
    let mut best = 0;
    for (i, c) in costs.iter().enumerate() {
        if *c < costs[best] {
            best = i;
        }
    }
    best
}

fn evaluate_batch<F>(cost: &F, batch: &[Vec<f64>]) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    // Collecting from an indexed parallel iterator keeps batch order, so the
    // selection below never depends on scheduling.
    let raw: Vec<f64> = batch.par_iter().map(|x| cost(x)).collect();
    raw.into_iter().zip(batch).map(|(c, x)| checked(c, x)).collect()
}

/// DE/rand/1/bin with per-generation dithered F and greedy selection.
pub fn differential_evolution<F>(cost: F, bounds: &Bounds, cfg: &DeConfig) -> Result<OptimizationRun>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    bounds.validate()?;
    let dim = bounds.dim();
    cfg.validate(dim)?;
    let clock = Instant::now();
    let np = cfg.population_for(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut pop: Vec<Vec<f64>> = (0..np)
        .map(|_| (0..dim).map(|j| rng.gen_range(bounds.lo[j]..=bounds.hi[j])).collect())
        .collect();
    let mut costs = evaluate_batch(&cost, &pop)?;
    let mut evaluations = np;
    let mut best = argmin(&costs);
    let mut trace = vec![costs[best]];
    let mut converged = false;

    for _ in 0..cfg.max_generations {
        let (mean, std) = spread(&costs);
        if std.is_finite() && std <= cfg.tol * mean.abs() + cfg.atol {
            converged = true;
            break;
        }
        let f = if cfg.mutation[0] < cfg.mutation[1] {
            rng.gen_range(cfg.mutation[0]..cfg.mutation[1])
        } else {
            cfg.mutation[0]
        };
        let trials: Vec<Vec<f64>> = (0..np)
            .map(|i| {
                let mut pick = || loop {
                    let k = rng.gen_range(0..np);
                    if k != i {
                        break k;
                    }
                };
                let a = pick();
                let b = loop {
                    let k = pick();
                    if k != a {
                        break k;
                    }
                };
                let c = loop {
                    let k = pick();
                    if k != a && k != b {
                        break k;
                    }
                };
                let forced = rng.gen_range(0..dim);
                let mut trial = pop[i].clone();
                for j in 0..dim {
                    if j == forced || rng.gen::<f64>() < cfg.crossover {
                        trial[j] = pop[a][j] + f * (pop[b][j] - pop[c][j]);
                    }
                }
                bounds.clip(&mut trial);
                trial
            })
            .collect();
        let trial_costs = evaluate_batch(&cost, &trials)?;
        evaluations += np;
        for (i, (trial, tc)) in trials.into_iter().zip(trial_costs).enumerate() {
            if tc <= costs[i] {
                pop[i] = trial;
                costs[i] = tc;
            }
        }
        best = argmin(&costs);
        let last = *trace.last().expect("trace starts non-empty");
        assert!(costs[best] <= last, "best-so-far cost increased");
        trace.push(costs[best]);
    }

    Ok(OptimizationRun {
        best_params: pop[best].clone(),
        best_cost: costs[best],
        trace,
        evaluations,
        seed: Some(cfg.seed),
        converged,
        wall_time_s: clock.elapsed().as_secs_f64(),
    })
}

pub fn nelder_mead<F>(cost: F, x0: &[f64], cfg: &NmConfig) -> Result<OptimizationRun>
where
    F: Fn(&[f64]) -> f64,
{
    nelder_mead_impl(cost, x0, cfg, None)
}

/// Nelder-Mead with every vertex clipped into `bounds`.
pub fn nelder_mead_within<F>(cost: F, x0: &[f64], cfg: &NmConfig, bounds: &Bounds) -> Result<OptimizationRun>
where
    F: Fn(&[f64]) -> f64,
{
    bounds.validate()?;
    if bounds.dim() != x0.len() {
        return Err(Error::Dimension(format!("{} bounds for {} parameters", bounds.dim(), x0.len())));
    }
    nelder_mead_impl(cost, x0, cfg, Some(bounds))
}

fn nelder_mead_impl<F>(cost: F, x0: &[f64], cfg: &NmConfig, bounds: Option<&Bounds>) -> Result<OptimizationRun>
where
    F: Fn(&[f64]) -> f64,
{
    cfg.validate()?;
    let n = x0.len();
    if n == 0 {
        return Err(Error::Dimension("Nelder-Mead needs at least one parameter".into()));
    }
    let clock = Instant::now();
    let mut evaluations = 0usize;
    let mut eval = |x: &mut Vec<f64>| -> Result<f64> {
        if let Some(b) = bounds {
            b.clip(x);
        }
        evaluations += 1;
        checked(cost(x), x)
    };

    let mut start = x0.to_vec();
    let mut simplex = vec![(eval(&mut start)?, start.clone())];
    for j in 0..n {
        let mut v = start.clone();
        let step = match bounds {
            Some(b) => cfg.initial_scale * (b.hi[j] - b.lo[j]),
            None if v[j] != 0.0 => cfg.initial_scale * v[j],
            None => 2.5e-4,
        };
        v[j] += step;
        if let Some(b) = bounds {
            // step inward when the start sits on the upper bound
            if v[j] > b.hi[j] {
                v[j] = start[j] - step;
            }
        }
        simplex.push((eval(&mut v)?, v));
    }
    let order = |s: &mut Vec<(f64, Vec<f64>)>| s.sort_by(|a, b| a.0.total_cmp(&b.0));
    order(&mut simplex);
    let mut trace = vec![simplex[0].0];
    let mut converged = false;

    for _ in 0..cfg.max_iterations {
        let f_spread = simplex.iter().map(|(f, _)| (f - simplex[0].0).abs()).fold(0.0, f64::max);
        let x_spread = simplex
            .iter()
            .flat_map(|(_, x)| x.iter().zip(&simplex[0].1).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if f_spread <= cfg.f_tol && x_spread <= cfg.x_tol {
            converged = true;
            break;
        }
        let centroid: Vec<f64> = (0..n).map(|j| simplex[..n].iter().map(|(_, x)| x[j]).sum::<f64>() / n as f64).collect();
        let worst = simplex[n].clone();
        let toward = |t: f64| -> Vec<f64> { (0..n).map(|j| centroid[j] + t * (worst.1[j] - centroid[j])).collect() };

        let mut xr = toward(-cfg.reflection);
        let fr = eval(&mut xr)?;
        if fr < simplex[0].0 {
            let mut xe = toward(-cfg.reflection * cfg.expansion);
            let fe = eval(&mut xe)?;
            simplex[n] = if fe < fr { (fe, xe) } else { (fr, xr) };
        } else if fr < simplex[n - 1].0 {
            simplex[n] = (fr, xr);
        } else {
            let (mut xc, outside) = if fr < worst.0 {
                (toward(-cfg.reflection * cfg.contraction), true)
            } else {
                (toward(cfg.contraction), false)
            };
            let fc = eval(&mut xc)?;
            if (outside && fc <= fr) || (!outside && fc < worst.0) {
                simplex[n] = (fc, xc);
            } else {
                let best = simplex[0].1.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let mut x: Vec<f64> = (0..n).map(|j| best[j] + cfg.shrink * (vertex.1[j] - best[j])).collect();
                    let f = eval(&mut x)?;
                    *vertex = (f, x);
                }
            }
        }
        order(&mut simplex);
        trace.push(simplex[0].0);
    }

    let (best_cost, best_params) = simplex.swap_remove(0);
    Ok(OptimizationRun {
        best_params,
        best_cost,
        trace,
        evaluations,
        seed: None,
        converged,
        wall_time_s: clock.elapsed().as_secs_f64(),
    })
}

/// Resource objective, folded to minimization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "objective", rename_all = "snake_case")]
pub enum CostSpec {
    /// Maximize the negativity across the cut that separates `cut` from the rest.
    MaximizeNegativity { cut: Vec<usize> },
    MaximizeThreeTangle,
    MinimizeWCost,
    /// Minimize the Bures distance to a fixed qubit state, `[re, im]` pairs.
    MinimizeBures { target: Vec<[f64; 2]> },
}

impl CostSpec {
    pub fn sites(&self) -> Option<usize> {
        match self {
            Self::MaximizeNegativity { .. } => None,
            Self::MaximizeThreeTangle | Self::MinimizeWCost => Some(3),
            Self::MinimizeBures { target } => Some(target.len().trailing_zeros() as usize),
        }
    }

    pub fn validate(&self, sites: usize) -> Result<()> {
        let ok = match self {
            Self::MaximizeNegativity { cut } => {
                !cut.is_empty() && cut.len() < sites && cut.iter().all(|&s| s < sites)
            }
            Self::MinimizeBures { target } => target.len() == 1 << sites,
            _ => self.sites() == Some(sites),
        };
        if !ok {
            return Err(Error::InvalidConfig(format!("cost {self:?} does not fit a {sites}-qubit register")));
        }
        Ok(())
    }

    /// Signed cost of a normalized qubit state.
    pub fn score(&self, psi: &StateVector) -> Result<f64> {
        let sites = psi.dim().trailing_zeros() as usize;
        match self {
            Self::MaximizeNegativity { cut } => {
                let rho = DensityMatrix::from_pure(psi, &vec![2; sites])?;
                Ok(-negativity(&rho, cut)?)
            }
            Self::MaximizeThreeTangle => Ok(-three_tangle(psi)?),
            Self::MinimizeWCost => w_cost(psi),
            Self::MinimizeBures { target } => {
                let amps = target.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
                bures_distance(psi, &StateVector::normalized(amps)?)
            }
        }
    }
}

/// Final qubit state of a protocol run from the ground state.
#[derive(Debug, Clone)]
pub struct FinalState {
    pub qubits: StateVector,
    /// Full register state before projection.
    pub register: StateVector,
    pub leakage: f64,
    pub norm_drift: f64,
}

/// Cost function over a protocol template's parameter vector.
#[derive(Debug, Clone)]
pub struct ProtocolObjective {
    pub cost: CostSpec,
    pub device: DeviceModel,
    pub template: ProtocolTemplate,
    pub solver: SolverConfig,
}

impl ProtocolObjective {
    pub fn new(cost: CostSpec, device: DeviceModel, template: ProtocolTemplate, solver: SolverConfig) -> Result<Self> {
        device.validate()?;
        solver.validate()?;
        cost.validate(device.sites())?;
        if template.kind.sites() != device.sites() {
            return Err(Error::InvalidConfig(format!(
                "{} protocol on a {}-site device",
                template.kind,
                device.sites()
            )));
        }
        Ok(Self {
            cost,
            device,
            template,
            solver,
        })
    }

    pub fn final_state(&self, params: &[f64]) -> Result<FinalState> {
        let schedule = self.template.build(&self.device, params)?;
        let sites = self.device.sites();
        let evo = evolve_detailed(&self.device, &schedule, &StateVector::ground(self.device.dim()), &self.solver)?;
        let projection = project_to_qubits(&evo.state, self.device.levels, sites)?;
        Ok(FinalState {
            qubits: projection.state,
            register: evo.state,
            leakage: projection.leakage,
            norm_drift: evo.norm_drift,
        })
    }

    pub fn try_cost(&self, params: &[f64]) -> Result<f64> {
        self.cost.score(&self.final_state(params)?.qubits)
    }

    /// Cost with errors mapped to `+inf`.
    pub fn cost(&self, params: &[f64]) -> f64 {
        penalize(self.try_cost(params), params)
    }
}

fn penalize(result: Result<f64>, params: &[f64]) -> f64 {
    match result {
        Ok(v) => v,
        Err(e) => {
            log::warn!("cost evaluation failed at {params:?}: {e}");
            f64::INFINITY
        }
    }
}

/// Build, evolve from the ground state, project and score.
pub fn evaluate_cost(
    spec: &CostSpec,
    device: &DeviceModel,
    template: &ProtocolTemplate,
    solver: &SolverConfig,
    params: &[f64],
) -> f64 {
    match ProtocolObjective::new(spec.clone(), device.clone(), template.clone(), *solver) {
        Ok(obj) => obj.cost(params),
        Err(e) => penalize(Err(e), params),
    }
}

/// Score a state produced by an arbitrary map from parameters, e.g. a test
/// double standing in for the solver.
pub fn evaluate_with<P>(spec: &CostSpec, produce: P, params: &[f64]) -> f64
where
    P: Fn(&[f64]) -> Result<StateVector>,
{
    penalize(produce(params).and_then(|psi| spec.score(&psi)), params)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LuFitConfig {
    pub de: DeConfig,
    pub nm: NmConfig,
    /// Extra Nelder-Mead restarts from the incumbent.
    pub restarts: usize,
}

impl Default for LuFitConfig {
    fn default() -> Self {
        Self {
            de: DeConfig {
                max_generations: 400,
                ..DeConfig::default()
            },
            nm: NmConfig {
                initial_scale: 0.02,
                max_iterations: 20_000,
                f_tol: 1e-16,
                x_tol: 1e-11,
                ..NmConfig::default()
            },
            restarts: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LuFit {
    /// `(a, b, c)` per site for `Rz(a) Ry(b) Rz(c)`, site 0 first.
    pub angles: Vec<f64>,
    pub bures: f64,
    pub evaluations: usize,
}

/// `Rz(a) Ry(b) Rz(c)` as a row-major 2x2.
pub fn zyz(a: f64, b: f64, c: f64) -> [Complex64; 4] {
    let (cb, sb) = ((b / 2.0).cos(), (b / 2.0).sin());
    let p = |x: f64| Complex64::cis(x / 2.0);
    [
        p(-a - c) * cb,
        -p(-a + c) * sb,
        p(a - c) * sb,
        p(a + c) * cb,
    ]
}

/// Apply one 2x2 per qubit (site 0 least significant).
pub fn apply_zyz(angles: &[f64], psi: &StateVector) -> StateVector {
    let mut amps = psi.amplitudes().to_vec();
    for (site, abc) in angles.chunks(3).enumerate() {
        let u = zyz(abc[0], abc[1], abc[2]);
        let stride = 1 << site;
        for i in 0..amps.len() {
            if i & stride == 0 {
                let (x0, x1) = (amps[i], amps[i | stride]);
                amps[i] = u[0] * x0 + u[1] * x1;
                amps[i | stride] = u[2] * x0 + u[3] * x1;
            }
        }
    }
    StateVector::from_amplitudes(amps)
}

/// Minimize `D_B(U_0 x ... x U_{n-1} psi, target)` over per-site Z-Y-Z angles,
/// global search first, then simplex refinement.
pub fn fit_local_unitaries(psi: &StateVector, target: &StateVector, n_sites: usize, cfg: &LuFitConfig) -> Result<LuFit> {
    let dim = 1usize << n_sites;
    if psi.dim() != dim || target.dim() != dim {
        return Err(Error::Dimension(format!(
            "LU fit over {n_sites} qubits needs dimension {dim}, got {} and {}",
            psi.dim(),
            target.dim()
        )));
    }
    let baseline = bures_distance(psi, target)?;
    // 1 - |<target|U psi>| = D_B^2 / 2 is smooth at the optimum.
    let infidelity = |x: &[f64]| 1.0 - target.inner(&apply_zyz(x, psi)).norm();
    let bounds = Bounds::uniform(3 * n_sites, -PI, PI)?;
    let global = differential_evolution(infidelity, &bounds, &cfg.de)?;
    let mut evaluations = global.evaluations;
    let mut best = (global.best_cost, global.best_params);
    for _ in 0..=cfg.restarts {
        let local = nelder_mead(infidelity, &best.1, &cfg.nm)?;
        evaluations += local.evaluations;
        if local.best_cost < best.0 {
            best = (local.best_cost, local.best_params);
        } else {
            break;
        }
    }
    let fitted = bures_distance(&StateVector::normalized(apply_zyz(&best.1, psi).into_amplitudes())?, target)?;
    if fitted > baseline {
        return Ok(LuFit {
            angles: vec![0.0; 3 * n_sites],
            bures: baseline,
            evaluations,
        });
    }
    Ok(LuFit {
        angles: best.1,
        bures: fitted,
        evaluations,
    })
}
