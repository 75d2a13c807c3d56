//! Experiment configuration documents.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qracvqc::ansatz::{AnsatzKind, AnsatzSpec};
use qracvqc::data::{self, FeatureSpec, Schema};
use qracvqc::featmap::{compose_encoder, Encoder, FeaturePart};
use qracvqc::qrac::{duplicate_codebook, one_qubit_codebook, optimize_codebook, BlochVector, Codebook};
use qracvqc::vqc::{EvalMode, LabelFn, TrainConfig};
use qracvqc::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub dataset: DatasetConfig,
    pub encoder: Vec<PartConfig>,
    pub ansatz: AnsatzConfig,
    #[serde(default)]
    pub label: LabelFn,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default)]
    pub protocol: Protocol,
    /// Balance the training split by resampling the minority class.
    #[serde(default)]
    pub oversample: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation_search: Option<SearchConfig>,
    /// One full run of the protocol per seed.
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub eval: EvalMode,
    /// Starting angles: uniform in `[-pi, pi)` or all zero.
    #[serde(default)]
    pub init: Init,
    /// Declared qubit count, cross-checked against the encoder.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubits: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<TableMeta>,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    #[default]
    Random,
    Zeros,
}

/// Row labels for the summary table.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableMeta {
    pub dataset: String,
    pub encoding: String,
    #[serde(default)]
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum DatasetConfig {
    /// A CSV table with a built-in (`source`) or inline schema.
    Table {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        source: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        path: Option<PathBuf>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        schema: Option<Schema>,
        features: Vec<FeatureSpec>,
    },
    /// All `2^n` bitstrings labelled by the parity of `indices`, or of
    /// `label_bits` indices drawn per seed.
    Xor {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        indices: Option<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label_bits: Option<usize>,
    },
    Pattern {
        #[serde(rename = "type")]
        kind: String,
    },
    /// IDX images reduced to `side x side` binary pixels.
    Mnist {
        #[serde(default = "default_images")]
        images: PathBuf,
        #[serde(default = "default_labels")]
        labels: PathBuf,
        #[serde(default = "default_digits")]
        digits: [u8; 2],
        #[serde(default = "default_side")]
        side: usize,
        #[serde(default = "default_threshold")]
        threshold: f64,
        /// Zero bits appended so the width fits the encoder.
        #[serde(default)]
        pad_bits: usize,
        #[serde(default = "yes")]
        remove_contradictions: bool,
    },
}

fn default_images() -> PathBuf {
    PathBuf::from("mnist/t10k-36-images-idx3-ubyte")
}
fn default_labels() -> PathBuf {
    PathBuf::from("mnist/t10k-36-labels-idx1-ubyte")
}
fn default_digits() -> [u8; 2] {
    [3, 6]
}
fn default_side() -> usize {
    4
}
fn default_threshold() -> f64 {
    0.5
}
fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum Protocol {
    /// Stratified k-fold cross-validation.
    Kfold {
        #[serde(default = "five")]
        k: usize,
    },
    /// Seeded disjoint train/test draw.
    Holdout { train: usize, test: usize },
    /// Train and evaluate on every row.
    Full,
}

fn five() -> usize {
    5
}

impl Default for Protocol {
    fn default() -> Self {
        Protocol::Kfold { k: 5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    #[serde(default = "ten")]
    pub candidates: usize,
    #[serde(default = "fifth")]
    pub holdout: f64,
}

fn ten() -> usize {
    10
}
fn fifth() -> f64 {
    0.2
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { candidates: 10, holdout: 0.2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum CodeConfig {
    /// The `(n, 1)` cube code, `n <= 3`.
    Cube { n: usize },
    /// A numerically optimized `(n, m)` code.
    Optimized {
        n: usize,
        #[serde(default = "two")]
        m: usize,
        #[serde(default)]
        seed: u64,
        #[serde(default = "restarts")]
        restarts: usize,
        #[serde(default = "iterations")]
        iterations: usize,
    },
    /// A codebook JSON file.
    File { path: PathBuf },
}

fn two() -> usize {
    2
}
fn restarts() -> usize {
    8
}
fn iterations() -> usize {
    200
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum PartConfig {
    Qrac {
        code: CodeConfig,
        slots: Vec<usize>,
        #[serde(default = "one")]
        copies: usize,
    },
    Zz {
        slots: Vec<usize>,
        #[serde(default = "two")]
        reps: usize,
    },
    Basis { slots: Vec<usize> },
    Latent {
        #[serde(default = "one")]
        count: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        state: Option<Vec<BlochVector>>,
    },
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzConfig {
    pub kind: AnsatzKind,
    pub depth: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entangler: Option<Vec<(usize, usize)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub readout: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(s)?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Checks everything that can be checked without data or training.
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(Error::Schema(format!("experiment name {:?} is not a plain file name", self.name)));
        }
        if self.seeds.is_empty() {
            return Err(Error::Schema("no seeds".into()));
        }
        if let Some(s) = &self.permutation_search {
            if s.candidates == 0 || !(s.holdout > 0.0 && s.holdout < 1.0) {
                return Err(Error::Schema("permutation search needs candidates >= 1 and holdout in (0, 1)".into()));
            }
        }
        match self.protocol {
            Protocol::Kfold { k } if k < 2 => return Err(Error::Schema(format!("k = {k} folds"))),
            Protocol::Holdout { train, test } if train == 0 || test == 0 => {
                return Err(Error::Schema("holdout sizes must be positive".into()))
            }
            _ => {}
        }
        if let EvalMode::Shots { count: 0, .. } = self.eval {
            return Err(Error::Schema("shot count must be positive".into()));
        }
        if self.train.optimizer.max_iter() == 0 {
            return Err(Error::Schema("optimizer budget is zero".into()));
        }
        match shape_qubits(&self.encoder)? {
            Some(qubits) => self.check_qubits(qubits),
            None => Ok(()),
        }
    }

    /// Checks that depend on the encoder's qubit count.
    pub fn check_qubits(&self, qubits: usize) -> Result<()> {
        if let Some(q) = self.qubits {
            if q != qubits {
                return Err(Error::Schema(format!("config declares {q} qubits, encoder uses {qubits}")));
            }
        }
        self.ansatz_spec(qubits).validate()?;
        self.label.values(qubits)?;
        Ok(())
    }

    /// Highest slot index plus one per kind, from the encoder parts.
    pub fn slot_counts(&self) -> (usize, usize) {
        let mut bits = 0;
        let mut reals = 0;
        for p in &self.encoder {
            match p {
                PartConfig::Qrac { slots, .. } | PartConfig::Basis { slots } => {
                    bits = bits.max(slots.iter().max().map_or(0, |m| m + 1))
                }
                PartConfig::Zz { slots, .. } => reals = reals.max(slots.iter().max().map_or(0, |m| m + 1)),
                PartConfig::Latent { .. } => {}
            }
        }
        (bits, reals)
    }

    pub fn ansatz_spec(&self, n_qubits: usize) -> AnsatzSpec {
        AnsatzSpec {
            kind: self.ansatz.kind,
            n_qubits,
            depth: self.ansatz.depth,
            entangler: self.ansatz.entangler.clone(),
            readout: self.ansatz.readout,
        }
    }
}

/// Qubit count implied by the parts without building any codebook; `None`
/// when a file code leaves it unknown until loaded.
fn shape_qubits(parts: &[PartConfig]) -> Result<Option<usize>> {
    let mut q = 0;
    let mut known = true;
    for p in parts {
        q += match p {
            PartConfig::Qrac { code, copies, slots } => {
                if *copies == 0 {
                    return Err(Error::Schema("codebook copies must be >= 1".into()));
                }
                let (n, m) = match code {
                    CodeConfig::Cube { n } => (*n, 1),
                    CodeConfig::Optimized { n, m, .. } => (*n, *m),
                    CodeConfig::File { .. } => {
                        known = false;
                        (slots.len(), 0)
                    }
                };
                if n != slots.len() {
                    return Err(Error::Schema(format!("{n}-bit code assigned {} slots", slots.len())));
                }
                copies * m
            }
            PartConfig::Zz { slots, .. } | PartConfig::Basis { slots } => slots.len(),
            PartConfig::Latent { count, .. } => *count,
        };
    }
    Ok(known.then_some(q))
}

/// Builds the codebook a part refers to; `root` resolves relative file paths.
pub fn build_code(code: &CodeConfig, root: &Path) -> Result<Codebook> {
    match code {
        CodeConfig::Cube { n } => one_qubit_codebook(*n),
        CodeConfig::Optimized { n, m, seed, restarts, iterations } => optimize_codebook(*n, *m, *seed, *restarts, *iterations),
        CodeConfig::File { path } => {
            let p = if path.is_absolute() { path.clone() } else { root.join(path) };
            Codebook::from_json(&std::fs::read_to_string(p)?)
        }
    }
}

/// Resolved encoder parts, built once per experiment.
pub fn build_encoder(parts: &[PartConfig], n_bits: usize, n_reals: usize, root: &Path) -> Result<Encoder> {
    let mut out = Vec::with_capacity(parts.len());
    for p in parts {
        out.push(match p {
            PartConfig::Qrac { code, slots, copies } => {
                let mut c = build_code(code, root)?;
                if *copies > 1 {
                    c = duplicate_codebook(&c, *copies)?;
                }
                FeaturePart::Qrac { codebook: c, slots: slots.clone() }
            }
            PartConfig::Zz { slots, reps } => FeaturePart::Zz { slots: slots.clone(), reps: *reps },
            PartConfig::Basis { slots } => FeaturePart::Basis { slots: slots.clone() },
            PartConfig::Latent { count, state } => FeaturePart::Latent { count: *count, state: state.clone() },
        });
    }
    compose_encoder(out, n_bits, n_reals)
}

/// File name and schema of a built-in table.
pub fn builtin_table(source: &str) -> Result<(&'static str, Schema)> {
    match source {
        "breast_cancer" => Ok(("breast-cancer.csv", data::breast_cancer_schema())),
        "heart_disease" => Ok(("heart.csv", data::heart_disease_schema())),
        "titanic" => Ok(("titanic.csv", data::titanic_schema())),
        other => Err(Error::Schema(format!("unknown table source {other:?}"))),
    }
}
