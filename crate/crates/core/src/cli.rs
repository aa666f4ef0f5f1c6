//! Command-line pipeline: JSON configuration, the five commands and the
//! artifacts they write.
//!
//! Layout under the output directory:
//!
//! - `generate`: `bundle.csv`, `planted_lags.json`
//! - `scan`: `scan/<input>_lags.csv`, `scan/<input>_curves.csv`, `scan/chosen_lags.csv`
//! - `train`: `train/<network>.json`, `train/<network>_search.csv`, `train/report.{txt,csv}`
//! - `ensemble`: `model/`, then the `report` artifacts
//! - `report`: `report.txt`, `report.csv`, `predictions.csv`, `equity.csv`

use crate::ensemble::{detect_cycle, predict_ensemble, EnsembleModel, EnsembleSpec, Selection, SubSpec};
use crate::error::{Error, Result};
use crate::fsio::{read_to_string, write_atomic};
use crate::lagscan::{scan_all, DEFAULT_MAX_LAG};
use crate::metrics::{
    equity_curves, render_report_csv, render_table, report, signals_from_prediction, MetricsReport,
};
use crate::mlp::{Activation, TrainConfig, TrainedExpert, DEFAULT_SEED};
use crate::preprocess::{assemble, preset, NetworkPreset, Transform, PRESET_NAMES};
use crate::search::{candidate_seed, search_best_net, train_shape, ArchitectureGrid};
use crate::timeseries::{
    parse_csv, render_csv, synthesize_economy, MonthRange, MonthStamp, PlantedLead, SeriesMap,
    TimeSeries, TARGET_NAME,
};
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const CONFIG_SCHEMA: u32 = 1;
pub const DEFAULT_MONTHS: usize = 168;
pub const DEFAULT_CYCLE: usize = 12;
pub const DEFAULT_NOISE: f64 = 0.1;
pub const DEFAULT_OUT_DIR: &str = "out";
pub const MODEL_DIR: &str = "model";

#[derive(Debug, Parser)]
#[command(name = "econet", version, about = "Stacked MLP forecasting of a monthly activity index")]
pub struct Cli {
    /// JSON pipeline configuration; built-in synthetic defaults when absent.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Model seed (for `generate`, the synthesizer seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Select restarts and architectures on the test range (leaks test data).
    #[arg(long, global = true)]
    pub leaky_selection: bool,
    /// Comma decimal separators in the text report.
    #[arg(long, global = true)]
    pub locale_comma: bool,
    /// Add wall-clock columns to search logs.
    #[arg(long, global = true)]
    pub timings: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Write a synthetic bundle CSV and its planted-lag metadata.
    Generate {
        #[arg(long, default_value_t = DEFAULT_MONTHS)]
        months: usize,
        #[arg(long, default_value_t = DEFAULT_CYCLE)]
        cycle_period: usize,
        #[arg(long, default_value_t = DEFAULT_NOISE)]
        noise: f64,
    },
    /// Scan lags 1..=max_lag of every input against the target.
    Scan,
    /// Train one expert per configured network.
    Train,
    /// Train the stacked ensemble, save it and write its reports.
    Ensemble,
    /// Re-evaluate a saved ensemble and write its reports.
    Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthParams {
    pub seed: u64,
    pub months: usize,
    pub cycle_period: usize,
    pub noise_scale: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            months: DEFAULT_MONTHS,
            cycle_period: DEFAULT_CYCLE,
            noise_scale: DEFAULT_NOISE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSource {
    Csv { path: PathBuf },
    Synthetic(SynthParams),
}

/// A network given by preset name or spelled out in full.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum NetworkRef {
    Preset(String),
    Custom(SubSpec),
}

impl<'de> Deserialize<'de> for NetworkRef {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        match serde_json::Value::deserialize(deserializer)? {
            serde_json::Value::String(name) => Ok(NetworkRef::Preset(name)),
            v => serde_json::from_value(v)
                .map(NetworkRef::Custom)
                .map_err(serde::de::Error::custom),
        }
    }
}

fn all_presets() -> Vec<NetworkRef> {
    PRESET_NAMES.iter().map(|n| NetworkRef::Preset(n.to_string())).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSection {
    /// Input columns; every non-target column when absent.
    pub inputs: Option<Vec<String>>,
    pub max_lag: usize,
    /// Scan range; the training range when absent.
    pub range: Option<MonthRange>,
}

impl Default for ScanSection {
    fn default() -> Self {
        Self {
            inputs: None,
            max_lag: DEFAULT_MAX_LAG,
            range: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub networks: Vec<NetworkRef>,
    /// Hidden sizes for preset networks.
    pub hidden: Vec<usize>,
    pub config: TrainConfig,
    /// Architecture search instead of the fixed `hidden` shape.
    pub grid: Option<ArchitectureGrid>,
    pub cycle_period: Option<usize>,
}

impl Default for TrainSection {
    fn default() -> Self {
        Self {
            networks: all_presets(),
            hidden: vec![crate::ensemble::DEFAULT_SUB_HIDDEN],
            config: TrainConfig::default(),
            grid: None,
            cycle_period: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleSection {
    pub networks: Vec<NetworkRef>,
    /// Hidden sizes for preset networks.
    pub hidden: Vec<usize>,
    pub sub_config: TrainConfig,
    pub master_hidden: Vec<usize>,
    pub master_config: TrainConfig,
    pub restarts: usize,
    pub cycle_period: Option<usize>,
}

impl Default for EnsembleSection {
    fn default() -> Self {
        let spec = EnsembleSpec::default();
        Self {
            networks: all_presets(),
            hidden: vec![crate::ensemble::DEFAULT_SUB_HIDDEN],
            sub_config: spec.sub_config,
            master_hidden: spec.master_hidden,
            master_config: spec.master_config,
            restarts: spec.restarts,
            cycle_period: spec.cycle_period,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub schema: u32,
    pub data: DataSource,
    #[serde(default = "default_target")]
    pub target: String,
    pub train_range: MonthRange,
    pub test_range: MonthRange,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub leaky_selection: bool,
    #[serde(default)]
    pub scan: ScanSection,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub ensemble: EnsembleSection,
}

fn default_target() -> String {
    TARGET_NAME.to_string()
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_out_dir() -> PathBuf {
    PathBuf::from(DEFAULT_OUT_DIR)
}

fn month(y: i32, m: u32) -> MonthStamp {
    MonthStamp::new(y, m).expect("valid constant month")
}

impl Default for PipelineConfig {
    /// Synthetic bundle; train 1992-01..1999-12, test 2000-01..2003-12.
    fn default() -> Self {
        Self {
            schema: CONFIG_SCHEMA,
            data: DataSource::Synthetic(SynthParams::default()),
            target: default_target(),
            train_range: MonthRange::new(month(1992, 1), month(1999, 12)).expect("ordered"),
            test_range: MonthRange::new(month(2000, 1), month(2003, 12)).expect("ordered"),
            seed: DEFAULT_SEED,
            out_dir: default_out_dir(),
            leaky_selection: false,
            scan: ScanSection::default(),
            train: TrainSection::default(),
            ensemble: EnsembleSection::default(),
        }
    }
}

fn check_hidden(what: &str, hidden: &[usize]) -> Result<()> {
    if hidden.is_empty() || hidden.contains(&0) {
        return Err(Error::Config(format!("{what} hidden sizes must be non-empty and >= 1")));
    }
    Ok(())
}

fn check_networks(section: &str, nets: &[NetworkRef]) -> Result<()> {
    if nets.is_empty() {
        return Err(Error::Config(format!("{section}.networks is empty")));
    }
    for n in nets {
        if let NetworkRef::Preset(name) = n {
            if preset(name).is_none() {
                return Err(Error::Config(format!(
                    "{section}.networks: unknown preset `{name}` (expected one of {})",
                    PRESET_NAMES.join(", ")
                )));
            }
        }
    }
    Ok(())
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = read_to_string(path)?;
        Self::from_json(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != CONFIG_SCHEMA {
            return Err(Error::Config(format!(
                "unsupported config schema {} (expected {CONFIG_SCHEMA})",
                self.schema
            )));
        }
        match &self.data {
            DataSource::Csv { path } if path.as_os_str().is_empty() => {
                return Err(Error::Config("data.csv.path is empty".into()))
            }
            DataSource::Synthetic(p) if p.months < 2 * p.cycle_period.max(1) => {
                return Err(Error::Config(format!(
                    "synthetic months {} must cover two cycles of {}",
                    p.months, p.cycle_period
                )))
            }
            _ => {}
        }
        if self.target.is_empty() {
            return Err(Error::Config("target is empty".into()));
        }
        if self.out_dir.as_os_str().is_empty() {
            return Err(Error::Config("out_dir is empty".into()));
        }
        if self.test_range.start <= self.train_range.end {
            return Err(Error::Config(format!(
                "test range {} must start after train range {}",
                self.test_range, self.train_range
            )));
        }
        if self.scan.max_lag == 0 {
            return Err(Error::Config("scan.max_lag must be >= 1".into()));
        }
        for p in [self.train.cycle_period, self.ensemble.cycle_period].into_iter().flatten() {
            if p < 2 {
                return Err(Error::Config("cycle_period must be >= 2".into()));
            }
        }
        check_networks("train", &self.train.networks)?;
        check_networks("ensemble", &self.ensemble.networks)?;
        check_hidden("train", &self.train.hidden)?;
        check_hidden("ensemble", &self.ensemble.hidden)?;
        self.train.config.validate()?;
        if let Some(g) = &self.train.grid {
            g.validate()?;
        }
        self.ensemble_spec()?.validate()
    }

    /// Resolves preset names; presets are labelled `Network N` by preset number.
    fn resolve(nets: &[NetworkRef], hidden: &[usize]) -> Result<Vec<SubSpec>> {
        nets.iter()
            .map(|n| match n {
                NetworkRef::Custom(s) => Ok(s.clone()),
                NetworkRef::Preset(name) => {
                    let p = preset(name)
                        .ok_or_else(|| Error::Config(format!("unknown preset `{name}`")))?;
                    let number = PRESET_NAMES.iter().position(|n| n == name).unwrap_or(0) + 1;
                    Ok(SubSpec {
                        name: p.name,
                        label: format!("Network {number}"),
                        features: p.features,
                        hidden: hidden.to_vec(),
                    })
                }
            })
            .collect()
    }

    pub fn ensemble_spec(&self) -> Result<EnsembleSpec> {
        let e = &self.ensemble;
        Ok(EnsembleSpec {
            subs: Self::resolve(&e.networks, &e.hidden)?,
            sub_config: e.sub_config,
            master_hidden: e.master_hidden.clone(),
            master_config: e.master_config,
            seed: self.seed,
            restarts: e.restarts,
            selection: if self.leaky_selection {
                Selection::Leaky
            } else {
                Selection::CarveOut
            },
            cycle_period: e.cycle_period,
        })
    }

    pub fn load_sources(&self) -> Result<SeriesMap> {
        let sources = match &self.data {
            DataSource::Csv { path } => {
                let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
                parse_csv(file)?
            }
            DataSource::Synthetic(p) => {
                synthesize_economy(p.seed, p.months, p.cycle_period, p.noise_scale)?.series
            }
        };
        if !sources.contains_key(&self.target) {
            return Err(Error::UnknownSeries(self.target.clone()));
        }
        Ok(sources)
    }
}

/// Exit status for a failed command: 2 for invalid input or configuration,
/// 1 for IO and numerical failures.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } | Error::Diverged { .. } | Error::Degenerate(_) => 1,
        Error::SubNetwork { source, .. } => exit_code(source),
        _ => 2,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateMeta {
    pub seed: u64,
    pub months: usize,
    pub cycle_period: usize,
    pub noise_scale: f64,
    pub target: String,
    pub start: MonthStamp,
    pub end: MonthStamp,
    pub planted: Vec<PlantedLead>,
}

pub const BUNDLE_FILE: &str = "bundle.csv";
pub const PLANTED_FILE: &str = "planted_lags.json";

pub fn cmd_generate(seed: u64, months: usize, cycle_period: usize, noise: f64, out: &Path) -> Result<Vec<PathBuf>> {
    let bundle = synthesize_economy(seed, months, cycle_period, noise)?;
    let target = &bundle.series[TARGET_NAME];
    let meta = GenerateMeta {
        seed,
        months,
        cycle_period,
        noise_scale: noise,
        target: TARGET_NAME.to_string(),
        start: target.start(),
        end: target.end(),
        planted: bundle.planted.clone(),
    };
    let csv_path = out.join(BUNDLE_FILE);
    let meta_path = out.join(PLANTED_FILE);
    write_atomic(&csv_path, render_csv(&bundle.series)?)?;
    write_atomic(&meta_path, serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(vec![csv_path, meta_path])
}

pub fn cmd_scan(cfg: &PipelineConfig) -> Result<Vec<PathBuf>> {
    let sources = cfg.load_sources()?;
    let target = &sources[&cfg.target];
    let inputs: SeriesMap = match &cfg.scan.inputs {
        Some(names) => names
            .iter()
            .map(|n| {
                sources
                    .get(n)
                    .map(|s| (n.clone(), s.clone()))
                    .ok_or_else(|| Error::UnknownSeries(n.clone()))
            })
            .collect::<Result<_>>()?,
        None => sources
            .iter()
            .filter(|(n, _)| **n != cfg.target)
            .map(|(n, s)| (n.clone(), s.clone()))
            .collect(),
    };
    let range = cfg.scan.range.unwrap_or(cfg.train_range);
    let results = scan_all(&inputs, target, cfg.scan.max_lag, range)?;
    let dir = cfg.out_dir.join("scan");
    let mut written = Vec::new();
    let mut summary = String::from("input,lag,efficiency,hits,srm\n");
    for (name, r) in &results {
        let lags = dir.join(format!("{name}_lags.csv"));
        let curves = dir.join(format!("{name}_curves.csv"));
        write_atomic(&lags, r.rows_csv())?;
        write_atomic(&curves, r.curves_csv())?;
        written.extend([lags, curves]);
        let c = r.chosen();
        summary.push_str(&format!("{name},{},{},{},{}\n", c.lag, c.efficiency_pct, c.hit_pct, c.sharpe));
    }
    let chosen = dir.join("chosen_lags.csv");
    write_atomic(&chosen, summary)?;
    written.push(chosen);
    Ok(written)
}

fn cycle_for(cfg: &PipelineConfig, sources: &SeriesMap, fixed: Option<usize>) -> Result<usize> {
    match fixed {
        Some(p) => Ok(p),
        None => detect_cycle(&sources[&cfg.target], cfg.train_range),
    }
}

/// Trains a single network from `train` settings. With a grid, the search
/// validates on the last third of the training range (or on the test range
/// when leaky) and the winning shape and seed are refitted on the whole
/// training range.
fn train_one(
    cfg: &PipelineConfig,
    index: usize,
    sub: &SubSpec,
    sources: &SeriesMap,
    cycle_period: usize,
    timings: bool,
) -> Result<(TrainedExpert, MetricsReport, Option<String>)> {
    let features = NetworkPreset {
        name: sub.name.clone(),
        beta: None,
        features: sub.features.clone(),
    }
    .expand(cycle_period);
    let target = &sources[&cfg.target];
    let train_m = assemble(&features, sources, &cfg.target, Transform::Identity, cfg.train_range)?;
    let test_m = assemble(&features, sources, &cfg.target, Transform::Identity, cfg.test_range)?;
    let base = candidate_seed(&[index], cfg.seed);
    let (mut expert, log) = match &cfg.train.grid {
        None => {
            let shape: Vec<usize> = std::iter::once(features.len())
                .chain(sub.hidden.iter().copied())
                .chain([1])
                .collect();
            let config = TrainConfig {
                rng_seed: base,
                ..cfg.train.config
            };
            let e = train_shape(&shape, Activation::Logistic, Activation::Linear, &config, &train_m)?;
            (e, None)
        }
        Some(grid) => {
            let grid = ArchitectureGrid {
                train_config: TrainConfig {
                    rng_seed: base,
                    ..grid.train_config
                },
                ..grid.clone()
            };
            let outcome = if cfg.leaky_selection {
                search_best_net(&grid, &train_m, &test_m)?
            } else {
                let n = train_m.n_rows();
                let (fit_r, val_r) = train_m.range().split_at(n - n / 3)?;
                search_best_net(&grid, &train_m.slice(fit_r)?, &train_m.slice(val_r)?)?
            };
            let log = outcome.log_csv(timings);
            let e = if cfg.leaky_selection {
                outcome.best_expert
            } else {
                let config = TrainConfig {
                    rng_seed: outcome.best_expert.rng_seed,
                    ..grid.train_config
                };
                train_shape(
                    &outcome.best_shape,
                    grid.hidden_activation,
                    grid.output_activation,
                    &config,
                    &train_m,
                )?
            };
            (e, Some(log))
        }
    };
    expert.name = sub.name.clone();
    expert.test_range = Some(cfg.test_range);
    let r = report(&expert, &train_m, &test_m, target)?;
    Ok((expert, r, log))
}

pub fn cmd_train(cfg: &PipelineConfig, locale_comma: bool, timings: bool) -> Result<Vec<PathBuf>> {
    let sources = cfg.load_sources()?;
    let cycle_period = cycle_for(cfg, &sources, cfg.train.cycle_period)?;
    let subs = PipelineConfig::resolve(&cfg.train.networks, &cfg.train.hidden)?;
    let dir = cfg.out_dir.join("train");
    let mut written = Vec::new();
    let mut rows = Vec::new();
    for (i, sub) in subs.iter().enumerate() {
        let (expert, r, log) = train_one(cfg, i, sub, &sources, cycle_period, timings)
            .map_err(|e| Error::SubNetwork {
                index: i + 1,
                source: Box::new(e),
            })?;
        let path = dir.join(format!("{}.json", sub.name));
        write_atomic(&path, expert.to_json()?)?;
        written.push(path);
        if let Some(log) = log {
            let path = dir.join(format!("{}_search.csv", sub.name));
            write_atomic(&path, log)?;
            written.push(path);
        }
        rows.push((sub.label.clone(), r));
    }
    for (name, text) in [
        ("report.txt", render_table(&rows, locale_comma)),
        ("report.csv", render_report_csv(&rows)),
    ] {
        let path = dir.join(name);
        write_atomic(&path, text)?;
        written.push(path);
    }
    Ok(written)
}

/// `date,actual,prediction,range` over the training and testing ranges.
pub fn predictions_csv(
    model: &EnsembleModel,
    sources: &SeriesMap,
) -> Result<String> {
    let target = &sources[&model.target_name];
    let mut out = String::from("date,actual,prediction,range\n");
    for (label, range) in [("train", model.train_range), ("test", model.test_range)] {
        let pred = predict_ensemble(model, sources, range)?;
        let actual = target.slice(range)?;
        for ((d, p), a) in pred.iter().zip(actual.values()) {
            out.push_str(&format!("{d},{a},{p},{label}\n"));
        }
    }
    Ok(out)
}

fn equity_csv(model: &EnsembleModel, sources: &SeriesMap) -> Result<String> {
    let pred: TimeSeries = predict_ensemble(model, sources, model.test_range)?;
    let actual = sources[&model.target_name].slice(model.test_range)?;
    Ok(equity_curves(&actual, &signals_from_prediction(&pred)?)?.to_csv())
}

fn write_reports(model: &EnsembleModel, sources: &SeriesMap, out: &Path, locale_comma: bool) -> Result<Vec<PathBuf>> {
    if !sources.contains_key(&model.target_name) {
        return Err(Error::UnknownSeries(model.target_name.clone()));
    }
    let rows = model.evaluate(sources)?;
    let mut written = Vec::new();
    for (name, text) in [
        ("report.txt", render_table(&rows, locale_comma)),
        ("report.csv", render_report_csv(&rows)),
        ("predictions.csv", predictions_csv(model, sources)?),
        ("equity.csv", equity_csv(model, sources)?),
    ] {
        let path = out.join(name);
        write_atomic(&path, text)?;
        written.push(path);
    }
    Ok(written)
}

pub fn cmd_ensemble(cfg: &PipelineConfig, locale_comma: bool) -> Result<Vec<PathBuf>> {
    let sources = cfg.load_sources()?;
    let model = crate::ensemble::train_ensemble(
        &cfg.ensemble_spec()?,
        &sources,
        &cfg.target,
        cfg.train_range,
        cfg.test_range,
    )?;
    let model_dir = cfg.out_dir.join(MODEL_DIR);
    model.save_dir(&model_dir)?;
    let mut written = vec![model_dir];
    written.extend(write_reports(&model, &sources, &cfg.out_dir, locale_comma)?);
    Ok(written)
}

pub fn cmd_report(cfg: &PipelineConfig, locale_comma: bool) -> Result<Vec<PathBuf>> {
    let sources = cfg.load_sources()?;
    let model = EnsembleModel::load_dir(cfg.out_dir.join(MODEL_DIR))?;
    write_reports(&model, &sources, &cfg.out_dir, locale_comma)
}

/// Applies the global flags to the loaded (or default) configuration.
pub fn effective_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out_dir = o.clone();
    }
    cfg.leaky_selection |= cli.leaky_selection;
    cfg.validate()?;
    Ok(cfg)
}

/// Runs one command and returns the paths it wrote.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    if let Command::Generate {
        months,
        cycle_period,
        noise,
    } = &cli.command
    {
        let out = cli.out.clone().unwrap_or_else(default_out_dir);
        return cmd_generate(cli.seed.unwrap_or(DEFAULT_SEED), *months, *cycle_period, *noise, &out);
    }
    let cfg = effective_config(cli)?;
    match cli.command {
        Command::Generate { .. } => unreachable!("handled above"),
        Command::Scan => cmd_scan(&cfg),
        Command::Train => cmd_train(&cfg, cli.locale_comma, cli.timings),
        Command::Ensemble => cmd_ensemble(&cfg, cli.locale_comma),
        Command::Report => cmd_report(&cfg, cli.locale_comma),
    }
}
