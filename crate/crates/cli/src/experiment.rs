//! Cross-validated training and evaluation pipelines.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use qracvqc::ansatz::AnsatzSpec;
use qracvqc::data::{
    self, images_to_dataset, kfold, load_csv, load_idx_images, oversample_minority, pattern_dataset, permute_bits,
    random_indices, random_permutation, remove_contradictions, shuffle_split, xor_dataset, Dataset, FeatureSpec,
    Preprocessor, Table,
};
use qracvqc::featmap::{Encoder, Sample};
use qracvqc::vqc::{predictions, train, EvalMode, LabelFn, TrainConfig, TrainTrace, VqcModel};
use qracvqc::{Error, Result};

use crate::config::{build_encoder, builtin_table, DatasetConfig, ExperimentConfig, Init, Protocol, SearchConfig, TableMeta};
use crate::metrics::{mean_std, metrics};
use crate::report::emit_losscurve;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub data_dir: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    /// Replaces the config's seed list with this single seed.
    pub seed: Option<u64>,
    /// Evaluates with this many shots instead of the config's mode.
    pub shots: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FoldResult {
    pub seed: u64,
    pub fold: usize,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    pub f1: f64,
    pub n_train: usize,
    pub n_test: usize,
    #[serde(skip)]
    pub trace: TrainTrace,
    pub permutation: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeedSummary {
    pub seed: u64,
    pub train: f64,
    pub test: f64,
    pub f1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub name: String,
    pub qubits: usize,
    pub parameters: usize,
    /// `(mean, population std)` over every fold of every seed.
    pub train: (f64, f64),
    pub test: (f64, f64),
    pub f1: (f64, f64),
    pub seeds: Vec<SeedSummary>,
    pub folds: Vec<FoldResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<TableMeta>,
}

impl Summary {
    pub fn traces(&self) -> Vec<Vec<f64>> {
        self.folds.iter().map(|f| f.trace.losses.clone()).collect()
    }

    /// Mean training loss at 1-based `iteration` across folds; traces that
    /// stopped early contribute their final value.
    pub fn mean_loss_at(&self, iteration: usize) -> f64 {
        let vals: Vec<f64> = self
            .folds
            .iter()
            .filter(|f| !f.trace.losses.is_empty())
            .map(|f| f.trace.losses[(iteration - 1).min(f.trace.losses.len() - 1)])
            .collect();
        mean_std(&vals).0
    }
}

/// Everything that stays fixed across folds.
pub struct Pipeline {
    pub encoder: Encoder,
    pub ansatz: AnsatzSpec,
    pub label: LabelFn,
    pub train: TrainConfig,
    pub init: Init,
    pub eval: EvalMode,
}

impl Pipeline {
    pub fn model(&self, seed: u64) -> Result<VqcModel> {
        let mut m = VqcModel::new(self.encoder.clone(), self.ansatz.clone(), self.label.clone())?;
        if self.init == Init::Random {
            m.randomize(seed);
        }
        Ok(m)
    }

    /// Trains a fresh model on `d` with exact expectations.
    pub fn fit(&self, d: &Dataset, seed: u64) -> Result<(VqcModel, TrainTrace)> {
        let mut m = self.model(seed)?;
        let mut cfg = self.train.clone();
        cfg.seed = mix(cfg.seed, seed);
        let trace = train(&mut m, d, &cfg)?;
        Ok((m, trace))
    }

    pub fn evaluate(&self, m: &mut VqcModel, d: &Dataset) -> Result<crate::metrics::Metrics> {
        m.eval = self.eval;
        let r = metrics(&predictions(m, d)?, &d.labels);
        m.eval = EvalMode::Exact;
        r
    }
}

/// SplitMix64-style combination of two seeds.
pub fn mix(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `count` seeded random orderings of `n` bit positions.
pub fn random_candidates(n: usize, count: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_permutation(n, &mut rng)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    pub best: Vec<usize>,
    pub scores: Vec<f64>,
}

/// Holds out `holdout` of `train_split` (seeded), trains one model per
/// candidate ordering on the rest and keeps the ordering with the highest
/// validation accuracy, the first on ties.
pub fn permutation_search(
    pipeline: &Pipeline,
    train_split: &Dataset,
    candidates: &[Vec<usize>],
    holdout: f64,
    seed: u64,
) -> Result<SearchOutcome> {
    if candidates.is_empty() {
        return Err(Error::Argument("permutation search needs at least one candidate".into()));
    }
    let n = train_split.len();
    let n_val = (holdout * n as f64).round() as usize;
    if n_val == 0 || n_val >= n {
        return Err(Error::Data(format!("cannot hold out {holdout} of {n} training rows")));
    }
    let (fit_rows, val_rows) = shuffle_split(n, n - n_val, seed)?;
    let fit = train_split.subset(&fit_rows);
    let val = train_split.subset(&val_rows);
    let scores = candidates
        .par_iter()
        .map(|perm| {
            let pf = permute_bits(&fit, perm)?;
            let pv = permute_bits(&val, perm)?;
            let (mut m, _) = pipeline.fit(&pf, seed)?;
            Ok(pipeline.evaluate(&mut m, &pv)?.accuracy)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    Ok(SearchOutcome { best: candidates[best].clone(), scores })
}

/// Rows the protocol produces before preprocessing.
enum Source {
    Table { table: Table, features: Vec<FeatureSpec> },
    Rows(Dataset),
}

impl Source {
    fn labels(&self) -> &[i8] {
        match self {
            Source::Table { table, .. } => &table.labels,
            Source::Rows(d) => &d.labels,
        }
    }

    /// Train and test datasets; preprocessing is fitted on `train` only.
    fn split(&self, train: &[usize], test: &[usize]) -> Result<(Dataset, Dataset)> {
        match self {
            Source::Table { table, features } => {
                let p = Preprocessor::fit(table, train, features, "train")?;
                debug_assert!(p.fitted_rows == train);
                Ok((p.transform(table, train)?, p.transform(table, test)?))
            }
            Source::Rows(d) => Ok((d.subset(train), d.subset(test))),
        }
    }
}

fn resolve(root: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        root.join(p)
    }
}

fn load_source(cfg: &DatasetConfig, root: &Path, seed: u64) -> Result<Source> {
    Ok(match cfg {
        DatasetConfig::Table { source, path, schema, features } => {
            let (file, builtin) = match source {
                Some(s) => {
                    let (f, sc) = builtin_table(s)?;
                    (Some(f), Some(sc))
                }
                None => (None, None),
            };
            let schema = schema.clone().or(builtin).ok_or_else(|| Error::Schema("table needs a source or a schema".into()))?;
            let path = match (path, file) {
                (Some(p), _) => resolve(root, p),
                (None, Some(f)) => root.join(f),
                (None, None) => return Err(Error::Schema("table needs a source or a path".into())),
            };
            Source::Table { table: load_csv(&path, &schema)?, features: features.clone() }
        }
        DatasetConfig::Xor { n, indices, label_bits } => {
            let idx = match (indices, label_bits) {
                (Some(i), None) => i.clone(),
                (None, Some(k)) => random_indices(*n, *k, mix(seed, 0x0f))?,
                _ => return Err(Error::Schema("xor dataset needs exactly one of indices and label_bits".into())),
            };
            Source::Rows(xor_dataset(*n, &idx)?)
        }
        DatasetConfig::Pattern { kind } => Source::Rows(pattern_dataset(kind)?),
        DatasetConfig::Mnist { images, labels, digits, side, threshold, pad_bits, remove_contradictions: rc } => {
            let set = load_idx_images(&resolve(root, images), &resolve(root, labels), Some(digits))?;
            let mut d = images_to_dataset(&set, *side, *threshold, digits[0])?;
            if *rc {
                d = remove_contradictions(&d);
            }
            for s in &mut d.samples {
                s.bits.extend(std::iter::repeat_n(0, *pad_bits));
            }
            Source::Rows(d)
        }
    })
}

fn splits(protocol: &Protocol, labels: &[i8], seed: u64) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    let n = labels.len();
    match *protocol {
        Protocol::Kfold { k } => {
            let plan = kfold(labels, k, true, seed)?;
            Ok((0..k).map(|f| plan.split(f)).collect())
        }
        Protocol::Holdout { train, test } => {
            if train + test > n {
                return Err(Error::Data(format!("holdout of {train} + {test} rows from {n}")));
            }
            let (tr, mut rest) = shuffle_split(n, train, seed)?;
            rest.truncate(test);
            Ok(vec![(tr, rest)])
        }
        Protocol::Full => Ok(vec![((0..n).collect(), (0..n).collect())]),
    }
}

/// A validated config with its encoder built.
pub struct Experiment {
    pub config: ExperimentConfig,
    pub root: PathBuf,
    pub encoder: Encoder,
}

impl Experiment {
    pub fn new(mut config: ExperimentConfig, opts: &RunOptions) -> Result<Self> {
        if let Some(s) = opts.seed {
            config.seeds = vec![s];
        }
        if let Some(count) = opts.shots {
            config.eval = EvalMode::Shots { count, seed: config.seeds[0] };
        }
        config.validate()?;
        let root = data::data_dir(opts.data_dir.as_deref());
        let (n_bits, n_reals) = config.slot_counts();
        let encoder = build_encoder(&config.encoder, n_bits, n_reals, &root)?;
        config.check_qubits(encoder.n_qubits())?;
        Ok(Self { config, root, encoder })
    }

    pub fn pipeline(&self) -> Pipeline {
        let c = &self.config;
        Pipeline {
            encoder: self.encoder.clone(),
            ansatz: c.ansatz_spec(self.encoder.n_qubits()),
            label: c.label.clone(),
            train: c.train.clone(),
            init: c.init,
            eval: c.eval,
        }
    }

    fn check_widths(&self, d: &Dataset) -> Result<()> {
        if let Some(s) = d.samples.first() {
            let probe: &Sample = s;
            self.encoder.check(probe)?;
        }
        Ok(())
    }

    fn run_fold(&self, pipeline: &Pipeline, seed: u64, fold: usize, train: Dataset, test: Dataset) -> Result<FoldResult> {
        self.check_widths(&train)?;
        let fold_seed = mix(seed, fold as u64 + 1);
        let train = if self.config.oversample { oversample_minority(&train, fold_seed)? } else { train };
        let (train, test, permutation) = match &self.config.permutation_search {
            Some(SearchConfig { candidates, holdout }) => {
                let cands = random_candidates(train.n_bits(), *candidates, mix(fold_seed, 0x9e));
                let out = permutation_search(pipeline, &train, &cands, *holdout, fold_seed)?;
                (permute_bits(&train, &out.best)?, permute_bits(&test, &out.best)?, Some(out.best))
            }
            None => (train, test, None),
        };
        let (mut model, trace) = pipeline.fit(&train, fold_seed)?;
        let tr = pipeline.evaluate(&mut model, &train)?;
        let te = pipeline.evaluate(&mut model, &test)?;
        Ok(FoldResult {
            seed,
            fold,
            train_accuracy: tr.accuracy,
            test_accuracy: te.accuracy,
            f1: te.f1,
            n_train: train.len(),
            n_test: test.len(),
            trace,
            permutation,
        })
    }

    /// Runs every fold of every seed; results are in (seed, fold) order.
    pub fn run(&self) -> Result<Summary> {
        let pipeline = self.pipeline();
        let mut tasks = Vec::new();
        for &seed in &self.config.seeds {
            let source = load_source(&self.config.dataset, &self.root, seed)?;
            for (fold, (tr, te)) in splits(&self.config.protocol, source.labels(), seed)?.into_iter().enumerate() {
                let (train, test) = source.split(&tr, &te)?;
                tasks.push((seed, fold, train, test));
            }
        }
        let folds = tasks
            .into_par_iter()
            .map(|(seed, fold, train, test)| self.run_fold(&pipeline, seed, fold, train, test))
            .collect::<Result<Vec<_>>>()?;
        let pick = |f: fn(&FoldResult) -> f64, rows: &[&FoldResult]| mean_std(&rows.iter().map(|r| f(r)).collect::<Vec<_>>());
        let all: Vec<&FoldResult> = folds.iter().collect();
        let seeds = self
            .config
            .seeds
            .iter()
            .map(|&s| {
                let rows: Vec<&FoldResult> = folds.iter().filter(|f| f.seed == s).collect();
                SeedSummary {
                    seed: s,
                    train: pick(|f| f.train_accuracy, &rows).0,
                    test: pick(|f| f.test_accuracy, &rows).0,
                    f1: pick(|f| f.f1, &rows).0,
                }
            })
            .collect();
        Ok(Summary {
            name: self.config.name.clone(),
            qubits: self.encoder.n_qubits(),
            parameters: pipeline.model(0)?.n_params(),
            train: pick(|f| f.train_accuracy, &all),
            test: pick(|f| f.test_accuracy, &all),
            f1: pick(|f| f.f1, &all),
            seeds,
            folds,
            table: self.config.table.clone(),
        })
    }
}

/// Validates, runs and (with an output directory) writes the artifacts.
pub fn run_experiment(config: ExperimentConfig, opts: &RunOptions) -> Result<Summary> {
    let exp = Experiment::new(config, opts)?;
    let summary = exp.run()?;
    if let Some(out) = &opts.out_dir {
        write_artifacts(&summary, &out.join(&summary.name))?;
    }
    Ok(summary)
}

/// `folds.csv`, `losscurve.csv` and `summary.json` under `dir`.
pub fn write_artifacts(summary: &Summary, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join("folds.csv"))?;
    w.write_record(["seed", "fold", "train_accuracy", "test_accuracy", "f1", "n_train", "n_test", "final_loss", "permutation"])?;
    for f in &summary.folds {
        let perm = f.permutation.as_ref().map_or(String::new(), |p| p.iter().map(usize::to_string).collect::<Vec<_>>().join(" "));
        w.write_record([
            f.seed.to_string(),
            (f.fold + 1).to_string(),
            format!("{:.6}", f.train_accuracy),
            format!("{:.6}", f.test_accuracy),
            format!("{:.6}", f.f1),
            f.n_train.to_string(),
            f.n_test.to_string(),
            f.trace.losses.last().map_or(String::new(), |v| format!("{v:.10}")),
            perm,
        ])?;
    }
    w.flush()?;
    emit_losscurve(&summary.traces(), &dir.join("losscurve.csv"))?;
    std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(summary)? + "\n")?;
    Ok(())
}
