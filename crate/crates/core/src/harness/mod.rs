//! Experiment orchestration: generate → split → scale → reduce → train →
//! evaluate, repeated with per-run seeds and written as CSV/JSON tables.

mod metrics;
mod output;

pub use metrics::{metrics, Confusion, Metrics};
pub use output::{comparison_csv, result_rows, results_csv, summary_csv, write_outputs, ResultRow, COMPARISON_HEADER, RESULTS_HEADER, SUMMARY_HEADER};

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datasets::{split, DatasetSpec};
use crate::dimred::{fit_transform, ReductionSpec, Scaler, Scaling};
use crate::error::{Error, Result};
use crate::kernel::{self, KernelConfig};
use crate::linalg::Matrix;
use crate::nn::{train_cnn_baseline, CnnSettings};
use crate::qnn::{self, QnnConfig, TrainSettings};
use crate::rng;
use crate::svm::{self, SvcSettings};

pub const SUITE_VERSION: u32 = 1;
pub const QNN_WIDTHS: [usize; 5] = [16, 14, 12, 10, 8];
pub const QSVC_WIDTHS: [usize; 5] = [8, 7, 6, 5, 4];
/// Width of an unreduced QNN.
pub const QNN_FULL_WIDTH: usize = 16;

const STREAM_DATA: u64 = 0;
const STREAM_SPLIT: u64 = 1;
const STREAM_REDUCE: u64 = 2;
const STREAM_MODEL: u64 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelSpec {
    Qnn(QnnConfig),
    Qsvc {
        kernel: KernelConfig,
        #[serde(default)]
        svc: SvcSettings,
    },
    #[serde(rename = "svc")]
    ClassicalSvc {
        #[serde(default)]
        svc: SvcSettings,
        /// `None` uses `1 / (n_features · Var(X))`.
        #[serde(default)]
        gamma: Option<f64>,
    },
    Cnn(CnnSettings),
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Qnn(_) => "qnn",
            ModelSpec::Qsvc { .. } => "qsvc",
            ModelSpec::ClassicalSvc { .. } => "svc",
            ModelSpec::Cnn(_) => "cnn",
        }
    }
}

/// Kernel-alignment defaults: four points per step.
pub fn default_kernel_training() -> TrainSettings {
    TrainSettings {
        iterations: 50,
        batch_size: 4,
        learning_rate: 0.05,
        ..TrainSettings::default()
    }
}

fn default_train_fraction() -> f64 {
    0.8
}

fn default_repeats() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: Option<String>,
    /// Generator and its settings; the seed field is replaced per run.
    pub dataset: DatasetSpec,
    #[serde(default)]
    pub reduction: Option<ReductionSpec>,
    /// Defaults to the reduction method's scaling, or none without reduction.
    #[serde(default)]
    pub scaling: Option<Scaling>,
    pub model: ModelSpec,
    /// QNN training or kernel alignment; the seed field is replaced per run.
    #[serde(default)]
    pub training: Option<TrainSettings>,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
}

impl ExperimentConfig {
    pub fn scaling(&self) -> Scaling {
        self.scaling
            .unwrap_or_else(|| self.reduction.as_ref().map_or(Scaling::None, |r| r.method.default_scaling()))
    }

    /// `method[+scaling]`, e.g. `pca+std` or `none`.
    pub fn reduction_label(&self) -> String {
        let method = self.reduction.as_ref().map_or("none", |r| r.method.name());
        match self.scaling() {
            Scaling::None => method.to_string(),
            s => format!("{method}+{}", s.tag()),
        }
    }

    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| {
            format!("{}-{}-{}", self.dataset.name(), self.reduction_label(), self.model.name())
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::Config("repeats must be at least 1".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Config(format!(
                "train_fraction must lie in (0, 1), got {}",
                self.train_fraction
            )));
        }
        if let Some(t) = &self.training {
            if t.iterations > 0 {
                t.validate()?;
            }
        }
        let target = self.reduction.as_ref().map(|r| r.target_dim);
        match &self.model {
            ModelSpec::Qnn(c) => {
                if !QNN_WIDTHS.contains(&c.n_qubits) {
                    return Err(Error::Config(format!(
                        "QNN width must be one of {QNN_WIDTHS:?}, got {}",
                        c.n_qubits
                    )));
                }
                let want = target.unwrap_or(QNN_FULL_WIDTH);
                if c.n_qubits != want {
                    return Err(Error::Config(format!(
                        "QNN width must equal the reduction target dimension ({want}), got {}",
                        c.n_qubits
                    )));
                }
                c.validate()?;
            }
            ModelSpec::Qsvc { kernel, .. } => {
                if !QSVC_WIDTHS.contains(&kernel.n_qubits) {
                    return Err(Error::Config(format!(
                        "QSVC width must be one of {QSVC_WIDTHS:?}, got {}",
                        kernel.n_qubits
                    )));
                }
                kernel.validate()?;
            }
            ModelSpec::ClassicalSvc { .. } | ModelSpec::Cnn(_) => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    pub version: u32,
    #[serde(default)]
    pub experiments: Vec<ExperimentConfig>,
}

impl Suite {
    /// Parse and validate; `source` names the input in error messages.
    pub fn from_json(text: &str, source: &str) -> Result<Suite> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let suite: Suite = serde_path_to_error::deserialize(de).map_err(|e| {
            let inner = e.inner();
            Error::Parse {
                location: format!("{source}:{}:{} (field `{}`)", inner.line(), inner.column(), e.path()),
                message: inner.to_string(),
            }
        })?;
        if suite.version != SUITE_VERSION {
            return Err(Error::Config(format!(
                "unsupported suite version {} (expected {SUITE_VERSION})",
                suite.version
            )));
        }
        for (i, exp) in suite.experiments.iter().enumerate() {
            exp.validate().map_err(|e| Error::Experiment {
                index: i,
                name: exp.display_name(),
                source: Box::new(e),
            })?;
        }
        Ok(suite)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Suite> {
        let path = path.as_ref();
        Suite::from_json(&std::fs::read_to_string(path)?, &path.display().to_string())
    }
}

/// Split, scaled and reduced data shared by every model on the same run.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub train_x: Matrix,
    pub train_y: Vec<u8>,
    pub test_x: Matrix,
    pub test_y: Vec<u8>,
}

/// Memoizes [`Prepared`] data by its full upstream configuration so matched
/// experiments see identical splits and reductions.
#[derive(Default)]
pub struct UpstreamCache {
    map: Mutex<HashMap<String, Arc<Prepared>>>,
}

impl UpstreamCache {
    fn get_or_prepare(&self, cfg: &ExperimentConfig, run_seed: u64) -> Result<Arc<Prepared>> {
        let key = serde_json::to_string(&(
            &cfg.dataset,
            &cfg.reduction,
            cfg.scaling(),
            cfg.train_fraction,
            run_seed,
        ))?;
        if let Some(hit) = self.map.lock().expect("cache lock").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let prepared = Arc::new(prepare(cfg, run_seed)?);
        self.map
            .lock()
            .expect("cache lock")
            .entry(key)
            .or_insert_with(|| Arc::clone(&prepared));
        Ok(prepared)
    }
}

/// Upstream pipeline for one run.
pub fn prepare(cfg: &ExperimentConfig, run_seed: u64) -> Result<Prepared> {
    let data = cfg
        .dataset
        .with_seed(rng::derive(run_seed, STREAM_DATA))
        .generate()
        .map_err(|e| e.at_stage("generate"))?;
    let (train, test) =
        split(&data, cfg.train_fraction, rng::derive(run_seed, STREAM_SPLIT)).map_err(|e| e.at_stage("split"))?;
    let scaler = Scaler::fit(cfg.scaling(), &train.x);
    let (train_x, test_x) = (
        scaler.transform(&train.x).map_err(|e| e.at_stage("scale"))?,
        scaler.transform(&test.x).map_err(|e| e.at_stage("scale"))?,
    );
    let (train_x, test_x) = match &cfg.reduction {
        None => (train_x, test_x),
        Some(spec) => {
            let mut spec = spec.clone();
            spec.seed = rng::derive(run_seed, STREAM_REDUCE);
            let r = fit_transform(&spec, &train_x, &test_x).map_err(|e| e.at_stage("reduce"))?;
            (r.train, r.test)
        }
    };
    Ok(Prepared {
        train_x,
        train_y: train.y,
        test_x,
        test_y: test.y,
    })
}

fn to_unit(labels: &[i8]) -> Vec<u8> {
    labels.iter().map(|&v| u8::from(v > 0)).collect()
}

/// Fit the configured model on the prepared train rows and predict test labels.
pub fn train_and_predict(cfg: &ExperimentConfig, data: &Prepared, run_seed: u64) -> Result<Vec<u8>> {
    let seed = rng::derive(run_seed, STREAM_MODEL);
    let train = |e: Error| e.at_stage("train");
    let eval = |e: Error| e.at_stage("evaluate");
    match &cfg.model {
        ModelSpec::Qnn(config) => {
            let mut settings = cfg.training.unwrap_or_default();
            settings.seed = seed;
            let outcome = qnn::train(config, &settings, &data.train_x, &data.train_y).map_err(train)?;
            qnn::predict(config, &outcome.params, &data.test_x).map_err(eval)
        }
        ModelSpec::Qsvc { kernel: kc, svc: s } => {
            let params = if kc.trainable {
                let mut settings = cfg.training.unwrap_or_else(default_kernel_training);
                settings.seed = seed;
                kernel::train_kernel(kc, &data.train_x, &data.train_y, &settings)
                    .map_err(train)?
                    .params
            } else {
                kernel::KernelParams::zeros(kc)
            };
            let k = kernel::gram(kc, &params, &data.train_x).map_err(train)?;
            let model = svm::fit_precomputed(&k, &svm::signed_labels(&data.train_y), s).map_err(train)?;
            let k_test = kernel::cross_gram(kc, &params, &data.test_x, &data.train_x).map_err(eval)?;
            Ok(to_unit(&model.predict_gram(&k_test).map_err(eval)?))
        }
        ModelSpec::ClassicalSvc { svc: s, gamma } => {
            let model = svm::fit_rbf(&data.train_x, &svm::signed_labels(&data.train_y), *gamma, s).map_err(train)?;
            Ok(to_unit(&model.predict(&data.test_x).map_err(eval)?))
        }
        ModelSpec::Cnn(settings) => {
            train_cnn_baseline(&data.train_x, &data.train_y, &data.test_x, settings, seed).map_err(train)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub run: usize,
    pub seed: u64,
    pub metrics: Metrics,
    /// Wall time of this run. Not written to any output table.
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub index: usize,
    pub config: ExperimentConfig,
    /// Feature count after reduction (the raw count without reduction).
    pub target_dim: usize,
    pub runs: Vec<RunResult>,
    pub mean: Metrics,
}

impl ExperimentReport {
    /// Summed wall time of all runs.
    pub fn elapsed(&self) -> Duration {
        self.runs.iter().map(|r| r.elapsed).sum()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Overrides every experiment's repeat count.
    pub repeats: Option<usize>,
    /// Worker threads for independent runs; 0 or 1 runs sequentially.
    pub parallel: usize,
}

fn run_one(cfg: &ExperimentConfig, cache: &UpstreamCache, run_seed: u64) -> Result<(usize, Metrics, Duration)> {
    let start = Instant::now();
    let data = cache.get_or_prepare(cfg, run_seed)?;
    let pred = train_and_predict(cfg, &data, run_seed)?;
    let m = metrics(&pred, &data.test_y).map_err(|e| e.at_stage("evaluate"))?;
    Ok((data.test_x.cols(), m, start.elapsed()))
}

/// Run a single experiment; per-run seeds are `master_seed + run`.
pub fn run_experiment(cfg: &ExperimentConfig, master_seed: u64) -> Result<ExperimentReport> {
    cfg.validate()?;
    let suite = Suite {
        version: SUITE_VERSION,
        experiments: vec![cfg.clone()],
    };
    Ok(run_suite(&suite, master_seed, RunOptions::default())?.remove(0))
}

/// Run every experiment of a suite. Reports come back in suite order.
pub fn run_suite(suite: &Suite, master_seed: u64, opts: RunOptions) -> Result<Vec<ExperimentReport>> {
    let cache = UpstreamCache::default();
    let repeats = |c: &ExperimentConfig| opts.repeats.unwrap_or(c.repeats);
    let jobs: Vec<(usize, usize)> = suite
        .experiments
        .iter()
        .enumerate()
        .flat_map(|(i, c)| (0..repeats(c)).map(move |r| (i, r)))
        .collect();
    let job = |&(i, r): &(usize, usize)| {
        let cfg = &suite.experiments[i];
        run_one(cfg, &cache, master_seed.wrapping_add(r as u64)).map_err(|e| Error::Experiment {
            index: i,
            name: cfg.display_name(),
            source: Box::new(e),
        })
    };
    let results: Vec<Result<(usize, Metrics, Duration)>> = if opts.parallel > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.parallel)
            .build()
            .map_err(|e| Error::Usage(format!("cannot start worker pool: {e}")))?;
        pool.install(|| jobs.par_iter().map(job).collect())
    } else {
        jobs.iter().map(job).collect()
    };

    let mut reports: Vec<ExperimentReport> = suite
        .experiments
        .iter()
        .enumerate()
        .map(|(index, config)| ExperimentReport {
            index,
            config: config.clone(),
            target_dim: 0,
            runs: Vec::new(),
            mean: Metrics::default(),
        })
        .collect();
    for (&(i, r), res) in jobs.iter().zip(results) {
        let (dim, m, elapsed) = res?;
        reports[i].target_dim = dim;
        reports[i].runs.push(RunResult {
            run: r,
            seed: master_seed.wrapping_add(r as u64),
            metrics: m,
            elapsed,
        });
    }
    for rep in &mut reports {
        let all: Vec<Metrics> = rep.runs.iter().map(|r| r.metrics).collect();
        rep.mean = Metrics::mean(&all);
    }
    Ok(reports)
}
