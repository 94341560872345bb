// Copyright 2026 The pulseprep Authors
// SPDX-License-Identifier: Apache-2.0

//! Config-driven experiments: optimize a protocol, evaluate the optimum and
//! write the result bundle.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::device::{DeviceConfig, DeviceModel};
use crate::dynamics::{basis_label, EvolutionRecord, SolverConfig, StateVector};
use crate::error::{Error, Result};
use crate::metrics::{canonical_state, probabilities, three_tangle, w_cost, MetricReport};
use crate::optimize::{
    differential_evolution, fit_local_unitaries, nelder_mead_within, Bounds, BoundsSpec, CostSpec, DeConfig,
    FinalState, LuFitConfig, NmConfig, OptimizationRun, ProtocolObjective,
};
use crate::protocol::{EnvelopeFamily, FinalCross, ProtocolKind, ProtocolTemplate};
use crate::pulse::{schedule_duration_dt, PulseSchedule};

pub const EXPERIMENT_SCHEMA: &str = "pulseprep.experiment/1";
pub const RUN_SCHEMA: &str = "pulseprep.run/1";
pub const SWEEP_SCHEMA: &str = "pulseprep.sweep/1";

/// Device reference meaning the crate's bundled device file.
pub const BUNDLED_DEVICE: &str = "bundled";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    /// Population 30, 60 generations.
    #[default]
    Fast,
    /// Population 150, 300 generations.
    Paper,
    /// Population 15 x dimension (max 150), 300 generations.
    Standard,
}

impl Budget {
    pub fn de(self, seed: u64) -> DeConfig {
        match self {
            Budget::Fast => DeConfig::fast(seed),
            Budget::Paper => DeConfig::paper(seed),
            Budget::Standard => DeConfig { seed, ..DeConfig::default() },
        }
    }
}

impl std::str::FromStr for Budget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fast" => Ok(Budget::Fast),
            "paper" => Ok(Budget::Paper),
            "standard" => Ok(Budget::Standard),
            other => Err(Error::InvalidConfig(format!("unknown budget {other:?} (fast, paper, standard)"))),
        }
    }
}

/// Field-wise overrides on top of the budget preset.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeOverrides {
    pub population_size: Option<usize>,
    pub max_generations: Option<usize>,
    pub mutation: Option<[f64; 2]>,
    pub crossover: Option<f64>,
    pub tol: Option<f64>,
}

impl DeOverrides {
    pub fn apply(&self, mut de: DeConfig) -> DeConfig {
        if let Some(v) = self.population_size {
            de.population_size = Some(v);
        }
        if let Some(v) = self.max_generations {
            de.max_generations = v;
        }
        if let Some(v) = self.mutation {
            de.mutation = v;
        }
        if let Some(v) = self.crossover {
            de.crossover = v;
        }
        if let Some(v) = self.tol {
            de.tol = v;
        }
        de
    }
}

fn bundled() -> String {
    BUNDLED_DEVICE.to_string()
}

fn experiment_nm() -> NmConfig {
    NmConfig {
        initial_scale: 0.01,
        max_iterations: 300,
        ..NmConfig::default()
    }
}

fn default_square_levels() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: String,
    pub name: String,
    /// Device file path (relative to the config file) or `"bundled"`.
    #[serde(default = "bundled")]
    pub device: String,
    /// Truncation override for the device.
    #[serde(default)]
    pub levels: Option<usize>,
    pub protocol: ProtocolKind,
    #[serde(default)]
    pub family: EnvelopeFamily,
    #[serde(default)]
    pub final_cross: FinalCross,
    #[serde(default)]
    pub with_phases: bool,
    /// Defaults to negativity, three-tangle or W cost by protocol.
    #[serde(default)]
    pub cost: Option<CostSpec>,
    #[serde(default)]
    pub bounds: BoundsSpec,
    /// Levels used by the square stage that fixes Gaussian-square widths.
    #[serde(default = "default_square_levels")]
    pub square_levels: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub budget: Budget,
    #[serde(default)]
    pub de: DeOverrides,
    /// Refinement after the global search; `max_iterations = 0` skips it.
    #[serde(default = "experiment_nm")]
    pub nm: NmConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn new(name: &str, protocol: ProtocolKind) -> Self {
        Self {
            schema: EXPERIMENT_SCHEMA.to_string(),
            name: name.to_string(),
            device: bundled(),
            levels: None,
            protocol,
            family: EnvelopeFamily::Square,
            final_cross: FinalCross::U0,
            with_phases: false,
            cost: None,
            bounds: BoundsSpec::default(),
            square_levels: default_square_levels(),
            seed: 0,
            budget: Budget::Fast,
            de: DeOverrides::default(),
            nm: experiment_nm(),
            solver: SolverConfig::default(),
            output: None,
            base_dir: PathBuf::from("."),
        }
    }

    pub fn from_toml_str(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut cfg: Self = toml::from_str(text).map_err(|e| Error::parse("<experiment>", e))?;
        cfg.base_dir = base_dir.into();
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml_str(&text, base).map_err(|e| match e {
            Error::Parse { message, .. } => Error::parse(path, message),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("experiment config serializes")
    }

    pub fn cost_spec(&self) -> CostSpec {
        self.cost.clone().unwrap_or_else(|| default_cost(self.protocol))
    }

    pub fn de_config(&self) -> DeConfig {
        self.de.apply(self.budget.de(self.seed))
    }

    fn device_source(&self) -> Result<DeviceConfig> {
        if self.device == BUNDLED_DEVICE {
            return Ok(DeviceConfig::bundled());
        }
        let path = self.base_dir.join(&self.device);
        if !path.exists() {
            return Err(Error::InvalidConfig(format!("device file {} does not exist", path.display())));
        }
        DeviceConfig::load(path)
    }

    /// Device restricted to the protocol's sites at the configured truncation.
    pub fn resolve_device(&self) -> Result<DeviceConfig> {
        let source = self.device_source()?;
        let levels = self.levels.unwrap_or(source.device.levels);
        Ok(DeviceConfig {
            device: source.device.leading_sites(self.protocol.sites(), levels)?,
            dt: source.dt,
        })
    }

    pub fn square_template(&self, dt: f64) -> ProtocolTemplate {
        ProtocolTemplate {
            final_cross: self.final_cross,
            with_phases: self.with_phases,
            dt,
            ..ProtocolTemplate::square(self.protocol)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != EXPERIMENT_SCHEMA {
            return Err(Error::InvalidConfig(format!("unsupported schema tag {:?}", self.schema)));
        }
        if self.name.is_empty() {
            return Err(Error::InvalidConfig("experiment name is empty".into()));
        }
        let dev = self.resolve_device()?;
        let sites = self.protocol.sites();
        self.cost_spec().validate(sites)?;
        if self.family == EnvelopeFamily::GaussianSquare {
            dev.device.leading_sites(sites, self.square_levels)?;
        }
        let template = self.square_template(dev.dt);
        self.bounds.for_template(&template)?;
        let de = self.de_config();
        de.validate(template.n_params())?;
        if self.nm.max_iterations > 0 {
            self.nm.validate()?;
        }
        self.solver.validate()
    }
}

pub fn default_cost(kind: ProtocolKind) -> CostSpec {
    match kind {
        ProtocolKind::Bell => CostSpec::MaximizeNegativity { cut: vec![0] },
        ProtocolKind::Ghz => CostSpec::MaximizeThreeTangle,
        ProtocolKind::W => CostSpec::MinimizeWCost,
    }
}

/// One optimization stage: global search plus optional refinement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub label: String,
    pub levels: usize,
    pub template: ProtocolTemplate,
    pub param_names: Vec<String>,
    pub bounds: Bounds,
    pub global: OptimizationRun,
    pub refine: Option<OptimizationRun>,
    pub best_params: Vec<f64>,
    pub best_cost: f64,
}

/// Machine-readable record of a run, sufficient for replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunArtifact {
    pub schema: String,
    pub name: String,
    pub config: ExperimentConfig,
    pub device: DeviceModel,
    pub dt: f64,
    pub seed: u64,
    pub stages: Vec<StageRecord>,
    pub template: ProtocolTemplate,
    pub params: Vec<f64>,
    pub cost: f64,
    pub duration_dt: u64,
    pub leakage: f64,
    pub norm_drift: f64,
    /// Normalized qubit-subspace state, `[re, im]` pairs.
    pub qubit_state: Vec<[f64; 2]>,
    pub metrics: MetricReport,
    pub wall_time_s: f64,
}

impl RunArtifact {
    pub fn qubit_state(&self) -> Result<StateVector> {
        StateVector::new(self.qubit_state.iter().map(|[re, im]| Complex64::new(*re, *im)).collect())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let run: Self = serde_json::from_str(&text).map_err(|e| Error::parse(path, e))?;
        if run.schema != RUN_SCHEMA {
            return Err(Error::parse(path, format!("unsupported schema tag {:?}", run.schema)));
        }
        Ok(run)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self).expect("run artifact serializes");
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn summary_lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("experiment {}", self.name),
            format!("protocol {} {:?}", self.template.kind, self.template.family),
            format!("levels {}", self.device.levels),
            format!("seed {}", self.seed),
            format!("cost {:.9}", self.cost),
            format!("duration_dt {}", self.duration_dt),
            format!("leakage {:.3e}", self.leakage),
            format!("norm_drift {:.3e}", self.norm_drift),
        ];
        for (k, v) in &self.metrics.negativity {
            out.push(format!("negativity[{k}] {v:.6}"));
        }
        for (k, v) in &self.metrics.concurrence_sq {
            out.push(format!("concurrence_sq[{k}] {v:.6}"));
        }
        if let Some(t) = self.metrics.three_tangle {
            out.push(format!("three_tangle {t:.6}"));
        }
        if let Some(w) = self.metrics.w_cost {
            out.push(format!("w_cost {w:.6}"));
        }
        out.push(format!("wall_time_s {:.1}", self.wall_time_s));
        out
    }
}

#[derive(Debug, Clone)]
pub struct ResultBundle {
    pub artifact: RunArtifact,
    pub schedule: PulseSchedule,
    pub final_state: FinalState,
    pub files: Vec<PathBuf>,
}

fn optimize_stage(
    label: &str,
    objective: &ProtocolObjective,
    bounds: &Bounds,
    de: &DeConfig,
    nm: &NmConfig,
) -> Result<StageRecord> {
    log::info!("stage {label}: {} parameters", bounds.dim());
    let global = differential_evolution(|x| objective.cost(x), bounds, de)?;
    log::info!("stage {label}: global best {:.9} after {} evaluations", global.best_cost, global.evaluations);
    let refine = if nm.max_iterations > 0 {
        let r = nelder_mead_within(|x| objective.cost(x), &global.best_params, nm, bounds)?;
        log::info!("stage {label}: refined {:.9} after {} evaluations", r.best_cost, r.evaluations);
        Some(r)
    } else {
        None
    };
    let (best_params, best_cost) = match &refine {
        Some(r) if r.best_cost < global.best_cost => (r.best_params.clone(), r.best_cost),
        _ => (global.best_params.clone(), global.best_cost),
    };
    if !best_cost.is_finite() {
        return Err(Error::NonFiniteCost {
            value: best_cost,
            params: best_params,
        });
    }
    Ok(StageRecord {
        label: label.to_string(),
        levels: objective.device.levels,
        template: objective.template.clone(),
        param_names: objective.template.param_names(),
        bounds: bounds.clone(),
        global,
        refine,
        best_params,
        best_cost,
    })
}

/// Optimize, evaluate the optimum and, when `out_dir` is given, write the
/// result bundle there.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: Option<&Path>) -> Result<ResultBundle> {
    cfg.validate()?;
    let clock = Instant::now();
    let DeviceConfig { device, dt } = cfg.resolve_device()?;
    let cost = cfg.cost_spec();
    let de = cfg.de_config();
    let square = cfg.square_template(dt);
    let mut stages = Vec::new();

    let (template, params) = match cfg.family {
        EnvelopeFamily::Square => {
            let obj = ProtocolObjective::new(cost.clone(), device.clone(), square.clone(), cfg.solver)?;
            let stage = optimize_stage("square", &obj, &cfg.bounds.for_template(&square)?, &de, &cfg.nm)?;
            let params = stage.best_params.clone();
            stages.push(stage);
            (square, params)
        }
        EnvelopeFamily::GaussianSquare => {
            let square_device = device.leading_sites(device.sites(), cfg.square_levels)?;
            let obj = ProtocolObjective::new(cost.clone(), square_device, square.clone(), cfg.solver)?;
            let first = optimize_stage("square", &obj, &cfg.bounds.for_template(&square)?, &de, &cfg.nm)?;
            let gauss = ProtocolTemplate::gaussian_from_square(&square, &first.best_params)?;
            stages.push(first);
            let obj = ProtocolObjective::new(cost.clone(), device.clone(), gauss.clone(), cfg.solver)?;
            let second = optimize_stage("gaussian_square", &obj, &cfg.bounds.for_template(&gauss)?, &de, &cfg.nm)?;
            let params = second.best_params.clone();
            stages.push(second);
            (gauss, params)
        }
    };

    let objective = ProtocolObjective::new(cost, device.clone(), template.clone(), cfg.solver)?;
    let schedule = template.build(&device, &params)?;
    let final_state = objective.final_state(&params)?;
    let metrics = MetricReport::for_state(&final_state.qubits)?;
    let artifact = RunArtifact {
        schema: RUN_SCHEMA.to_string(),
        name: cfg.name.clone(),
        config: cfg.clone(),
        device,
        dt,
        seed: cfg.seed,
        stages,
        cost: objective.cost.score(&final_state.qubits)?,
        duration_dt: schedule_duration_dt(&schedule)?,
        leakage: final_state.leakage,
        norm_drift: final_state.norm_drift,
        qubit_state: final_state.qubits.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
        metrics,
        template,
        params,
        wall_time_s: clock.elapsed().as_secs_f64(),
    };
    let mut bundle = ResultBundle {
        artifact,
        schedule,
        final_state,
        files: Vec::new(),
    };
    if let Some(dir) = out_dir.map(Path::to_path_buf).or_else(|| cfg.output.as_ref().map(|p| cfg.base_dir.join(p))) {
        bundle.files = write_bundle(&bundle, &dir)?;
    }
    Ok(bundle)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// `basis\tre\tim` rows for the qubit state.
pub fn amplitude_table(psi: &StateVector) -> String {
    let sites = psi.dim().trailing_zeros() as usize;
    let mut out = String::from("basis\tre\tim\n");
    for (i, a) in psi.amplitudes().iter().enumerate() {
        let _ = writeln!(out, "{}\t{:.10}\t{:.10}", basis_label(i, 2, sites), a.re, a.im);
    }
    out
}

/// `basis\tprobability` rows for the qubit state.
pub fn probability_table(psi: &StateVector) -> String {
    let sites = psi.dim().trailing_zeros() as usize;
    let mut out = String::from("basis\tprobability\n");
    for (i, p) in probabilities(psi).iter().enumerate() {
        let _ = writeln!(out, "{}\t{:.10}", basis_label(i, 2, sites), p);
    }
    out
}

pub fn write_bundle(bundle: &ResultBundle, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let a = &bundle.artifact;
    let files: Vec<PathBuf> = ["schedule.json", "amplitudes.tsv", "probabilities.tsv", "metrics.json", "evolution.json", "run.json"]
        .iter()
        .map(|f| dir.join(f))
        .collect();
    bundle.schedule.save(&files[0])?;
    write_text(&files[1], &amplitude_table(&bundle.final_state.qubits))?;
    write_text(&files[2], &probability_table(&bundle.final_state.qubits))?;
    write_text(&files[3], &serde_json::to_string_pretty(&a.metrics).expect("metrics serialize"))?;
    let record = EvolutionRecord::new(
        &bundle.final_state.register,
        a.device.levels,
        a.device.sites(),
        a.leakage,
        a.norm_drift,
        a.wall_time_s,
    );
    write_text(&files[4], &serde_json::to_string_pretty(&record).expect("record serializes"))?;
    a.save(&files[5])?;
    Ok(files)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplayReport {
    pub metrics: MetricReport,
    pub cost: f64,
    pub duration_dt: u64,
    /// Largest deviation between replayed and recorded qubit amplitudes.
    pub max_amplitude_diff: f64,
    pub identical: bool,
}

/// Re-evaluate a run artifact's final parameters.
pub fn replay(run: &RunArtifact) -> Result<ReplayReport> {
    let objective = ProtocolObjective::new(
        run.config.cost_spec(),
        run.device.clone(),
        run.template.clone(),
        run.config.solver,
    )?;
    let schedule = run.template.build(&run.device, &run.params)?;
    let state = objective.final_state(&run.params)?;
    let metrics = MetricReport::for_state(&state.qubits)?;
    let recorded = run.qubit_state()?;
    let max_amplitude_diff = state
        .qubits
        .amplitudes()
        .iter()
        .zip(recorded.amplitudes())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(ReplayReport {
        cost: objective.cost.score(&state.qubits)?,
        duration_dt: schedule_duration_dt(&schedule)?,
        identical: metrics == run.metrics,
        metrics,
        max_amplitude_diff,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselineEntry {
    pub kind: ProtocolKind,
    /// Native-gate circuit duration.
    pub gate_dt: u64,
    /// Published Gaussian-square pulse duration.
    pub pulse_dt: u64,
}

/// Gate-compiled durations on the reference device, in dt.
pub struct BaselineTable;

impl BaselineTable {
    pub const ENTRIES: [BaselineEntry; 3] = [
        BaselineEntry { kind: ProtocolKind::Bell, gate_dt: 2912, pulse_dt: 1379 },
        BaselineEntry { kind: ProtocolKind::Ghz, gate_dt: 5315, pulse_dt: 3750 },
        BaselineEntry { kind: ProtocolKind::W, gate_dt: 8224, pulse_dt: 6132 },
    ];

    /// The GHZ circuit is also quoted at 5312 dt; the table keeps 5315.
    pub const GHZ_GATE_DT_ALTERNATE: u64 = 5312;

    pub fn get(kind: ProtocolKind) -> BaselineEntry {
        *Self::ENTRIES.iter().find(|e| e.kind == kind).expect("every protocol has a baseline")
    }

    pub fn note() -> &'static str {
        "GHZ gate duration 5315 dt; an alternate quote of 5312 dt exists for the same circuit"
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DurationRow {
    pub kind: ProtocolKind,
    pub gate_dt: u64,
    pub pulse_dt: u64,
    pub pulse_shorter: bool,
    pub ratio: f64,
}

impl DurationRow {
    pub fn exceeds_baseline(&self) -> bool {
        self.pulse_dt > self.gate_dt
    }
}

pub fn compare_durations(results: &[(ProtocolKind, u64)]) -> Vec<DurationRow> {
    results
        .iter()
        .map(|&(kind, pulse_dt)| {
            let gate_dt = BaselineTable::get(kind).gate_dt;
            DurationRow {
                kind,
                gate_dt,
                pulse_dt,
                pulse_shorter: pulse_dt < gate_dt,
                ratio: pulse_dt as f64 / gate_dt as f64,
            }
        })
        .collect()
}

pub fn format_duration_table(rows: &[DurationRow]) -> String {
    let mut out = String::from("state\tgate_dt\tpulse_dt\tratio\tflag\n");
    for r in rows {
        let flag = if r.exceeds_baseline() { "EXCEEDS" } else { "ok" };
        let _ = writeln!(out, "{}\t{}\t{}\t{:.3}\t{}", r.kind, r.gate_dt, r.pulse_dt, r.ratio, flag);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LuReport {
    pub target: ProtocolKind,
    pub bures: f64,
    /// Distance before fitting (identity unitaries).
    pub baseline_bures: f64,
    pub angles: Vec<f64>,
}

pub fn validate_lu(psi: &StateVector, target: ProtocolKind, cfg: &LuFitConfig) -> Result<LuReport> {
    let canonical = canonical_state(target);
    if psi.dim() != canonical.dim() {
        return Err(Error::Dimension(format!(
            "{target} target has dimension {}, state has {}",
            canonical.dim(),
            psi.dim()
        )));
    }
    let fit = fit_local_unitaries(psi, &canonical, target.sites(), cfg)?;
    Ok(LuReport {
        target,
        bures: fit.bures,
        baseline_bures: crate::metrics::bures_distance(psi, &canonical)?,
        angles: fit.angles,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SweepMode {
    /// Uniform samples inside the bounds.
    Random { samples: usize, seed: u64 },
    /// Explicit parameter vectors.
    Points { params: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub w_cost: f64,
    pub three_tangle: f64,
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepDataset {
    pub schema: String,
    pub protocol: ProtocolKind,
    pub points: Vec<SweepPoint>,
}

impl SweepDataset {
    /// Two whitespace-separated columns, `w_cost three_tangle`.
    pub fn to_columns(&self) -> String {
        let mut out = String::from("# w_cost three_tangle\n");
        for p in &self.points {
            let _ = writeln!(out, "{:.10} {:.10}", p.w_cost, p.three_tangle);
        }
        out
    }
}

/// `(w_cost, tau3)` over sampled parameters of a three-qubit template.
pub fn sweep_correlations(
    template: &ProtocolTemplate,
    device: &DeviceModel,
    solver: &SolverConfig,
    bounds: &Bounds,
    mode: &SweepMode,
) -> Result<SweepDataset> {
    if template.kind.sites() != 3 {
        return Err(Error::InvalidConfig(format!("sweeps need a three-qubit template, got {}", template.kind)));
    }
    let objective = ProtocolObjective::new(CostSpec::MinimizeWCost, device.clone(), template.clone(), *solver)?;
    let samples: Vec<Vec<f64>> = match mode {
        SweepMode::Random { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            (0..*samples)
                .map(|_| (0..bounds.dim()).map(|j| rng.gen_range(bounds.lo[j]..=bounds.hi[j])).collect())
                .collect()
        }
        SweepMode::Points { params } => params.clone(),
    };
    let points = samples
        .into_iter()
        .map(|params| {
            let psi = objective.final_state(&params)?.qubits;
            Ok(SweepPoint {
                w_cost: w_cost(&psi)?,
                three_tangle: three_tangle(&psi)?,
                params,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepDataset {
        schema: SWEEP_SCHEMA.to_string(),
        protocol: template.kind,
        points,
    })
}
