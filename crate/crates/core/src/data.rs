//! Dataset ingestion, preprocessing, fold planning and synthetic generators.
//!
//! Tabular data flows through three stages: [`load_csv`] parses a file into a
//! [`Table`] of coded values (categorical levels become their index), a
//! [`Preprocessor`] is fitted on training rows only, and
//! [`Preprocessor::transform`] turns any rows into a [`Dataset`] of bit and
//! real slots.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::featmap::Sample;
use crate::qrac::index_to_bits;
use crate::{Error, Result};

pub const DATA_DIR_ENV: &str = "QRACVQC_DATA_DIR";

/// Dataset directory: explicit override, then `QRACVQC_DATA_DIR`, then `data`.
pub fn data_dir(explicit: Option<&Path>) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    std::env::var_os(DATA_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("data"))
}

/// Labelled samples; labels are -1 or +1.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub samples: Vec<Sample>,
    pub labels: Vec<i8>,
}

impl Dataset {
    pub fn new(samples: Vec<Sample>, labels: Vec<i8>) -> Result<Self> {
        if samples.len() != labels.len() {
            return Err(Error::Shape(format!("{} samples but {} labels", samples.len(), labels.len())));
        }
        if let Some(l) = labels.iter().find(|&&l| l != 1 && l != -1) {
            return Err(Error::Data(format!("label {l} is not -1 or +1")));
        }
        Ok(Self { samples, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            samples: idx.iter().map(|&i| self.samples[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// `(negatives, positives)`.
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.labels.iter().filter(|&&l| l > 0).count();
        (self.len() - pos, pos)
    }

    pub fn n_bits(&self) -> usize {
        self.samples.first().map_or(0, |s| s.bits.len())
    }
}

// ---------------------------------------------------------------------------
// CSV tables

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum ColumnKind {
    /// Coded as the index of the value in `levels`.
    Categorical { levels: Vec<String> },
    /// Parsed as a number.
    Numeric,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: ColumnKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schema {
    pub label: String,
    /// Raw label values mapped to +1; every other value maps to -1.
    pub positive: Vec<String>,
    pub columns: Vec<ColumnSpec>,
    #[serde(default = "default_missing")]
    pub missing: Vec<String>,
    /// Drop rows with a missing value in any file column, not only the used ones.
    #[serde(default)]
    pub drop_any_missing: bool,
}

fn default_missing() -> Vec<String> {
    vec!["?".into(), String::new()]
}

impl Schema {
    pub fn column(&self, name: &str) -> Result<(usize, &ColumnSpec)> {
        self.columns
            .iter()
            .enumerate()
            .find(|(_, c)| c.name == name)
            .ok_or_else(|| Error::Schema(format!("unknown column {name:?}")))
    }
}

/// Parsed rows; `values[r][c]` follows `schema.columns` order.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub schema: Schema,
    pub values: Vec<Vec<f64>>,
    pub labels: Vec<i8>,
    pub parsed: usize,
    pub dropped: usize,
}

impl Table {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.labels.iter().filter(|&&l| l > 0).count();
        (self.len() - pos, pos)
    }
}

/// Reads a comma-separated file with a header row. Rows with a missing value
/// in a schema column or the label (or anywhere, with `drop_any_missing`) are
/// dropped and counted.
pub fn load_csv(path: &Path, schema: &Schema) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_path(path)?;
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let find = |name: &str| {
        header.iter().position(|h| h == name).ok_or_else(|| Error::Schema(format!("column {name:?} not in {}", path.display())))
    };
    let label_col = find(&schema.label)?;
    let cols = schema.columns.iter().map(|c| find(&c.name)).collect::<Result<Vec<_>>>()?;
    let mut table = Table { schema: schema.clone(), values: Vec::new(), labels: Vec::new(), parsed: 0, dropped: 0 };
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::Parse { line, message: e.to_string() })?;
        table.parsed += 1;
        let is_missing = |v: &str| schema.missing.iter().any(|m| m == v.trim());
        let missing = if schema.drop_any_missing {
            rec.iter().any(is_missing)
        } else {
            is_missing(&rec[label_col]) || cols.iter().any(|&c| is_missing(&rec[c]))
        };
        if missing {
            table.dropped += 1;
            continue;
        }
        let mut row = Vec::with_capacity(cols.len());
        for (spec, &c) in schema.columns.iter().zip(&cols) {
            let raw = rec[c].trim();
            let v = match &spec.kind {
                ColumnKind::Categorical { levels } => levels.iter().position(|l| l == raw).ok_or_else(|| Error::Parse {
                    line,
                    message: format!("value {raw:?} is not a level of {}", spec.name),
                })? as f64,
                ColumnKind::Numeric => raw.parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    message: format!("value {raw:?} of {} is not a number", spec.name),
                })?,
            };
            row.push(v);
        }
        table.values.push(row);
        let y = rec[label_col].trim();
        table.labels.push(if schema.positive.iter().any(|p| p == y) { 1 } else { -1 });
    }
    Ok(table)
}

// ---------------------------------------------------------------------------
// Built-in schemas

fn levels(v: &[&str]) -> ColumnKind {
    ColumnKind::Categorical { levels: v.iter().map(|s| s.to_string()).collect() }
}

fn col(name: &str, kind: ColumnKind) -> ColumnSpec {
    ColumnSpec { name: name.into(), kind }
}

pub fn breast_cancer_schema() -> Schema {
    Schema {
        label: "class".into(),
        positive: vec!["recurrence-events".into()],
        columns: vec![
            col("menopause", levels(&["lt40", "ge40", "premeno"])),
            col(
                "tumor-size",
                levels(&["0-4", "5-9", "10-14", "15-19", "20-24", "25-29", "30-34", "35-39", "40-44", "45-49", "50-54", "55-59"]),
            ),
            col("node-caps", levels(&["no", "yes"])),
            col("deg-malig", levels(&["1", "2", "3"])),
        ],
        missing: default_missing(),
        drop_any_missing: true,
    }
}

pub fn heart_disease_schema() -> Schema {
    Schema {
        label: "target".into(),
        positive: vec!["1".into()],
        columns: vec![col("cp", ColumnKind::Numeric), col("ca", ColumnKind::Numeric), col("thal", ColumnKind::Numeric), col("oldpeak", ColumnKind::Numeric)],
        missing: default_missing(),
        drop_any_missing: false,
    }
}

pub fn titanic_schema() -> Schema {
    Schema {
        label: "Survived".into(),
        positive: vec!["1".into()],
        columns: vec![
            col("Sex", levels(&["male", "female"])),
            col("Pclass", levels(&["1", "2", "3"])),
            col("Age", ColumnKind::Numeric),
            col("Fare", ColumnKind::Numeric),
        ],
        missing: default_missing(),
        drop_any_missing: false,
    }
}

// ---------------------------------------------------------------------------
// Bit encodings

/// Big-endian fixed-width binary representation.
pub fn ordinal_encode(value: usize, width: usize) -> Result<Vec<u8>> {
    if width == 0 || width >= usize::BITS as usize || value >= 1usize << width {
        return Err(Error::Encoding(format!("value {value} does not fit in {width} bits")));
    }
    Ok(index_to_bits(value, width))
}

pub fn ordinal_decode(bits: &[u8]) -> usize {
    crate::qrac::bits_to_index(bits)
}

/// Length-`cardinality` indicator vector with a single 1 at `value`.
pub fn one_hot_encode(value: usize, cardinality: usize) -> Result<Vec<u8>> {
    if value >= cardinality {
        return Err(Error::Encoding(format!("value {value} outside 0..{cardinality}")));
    }
    let mut v = vec![0u8; cardinality];
    v[value] = 1;
    Ok(v)
}

pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Argument("median of an empty column".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Ok(if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / 2.0 })
}

/// Bits `value > median`, plus the threshold for reuse on other splits.
pub fn median_binarize(column: &[f64]) -> Result<(Vec<u8>, f64)> {
    let t = median(column)?;
    Ok((column.iter().map(|&v| u8::from(v > t)).collect(), t))
}

/// Linear-interpolated quantile (`q` in `[0, 1]`).
pub fn quantile(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Argument("quantile of an empty column".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    Ok(v[lo] + (v[hi] - v[lo]) * (pos - lo as f64))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum Encoding {
    /// Coded value as `width` big-endian bits.
    Ordinal { width: usize },
    /// One bit per level.
    OneHot,
    /// One bit: coded value equals `value`.
    Indicator { value: f64 },
    /// One bit: value above the training median.
    MedianBinarize,
    /// Bin index among `2^width` training-quantile bins, as bits.
    QuantileOrdinal { width: usize },
    /// Coded value as a real.
    Raw,
    /// Min-max rescaling fitted on training rows, mapped to `[lo, hi]`.
    Rescale {
        #[serde(default)]
        lo: f64,
        #[serde(default = "two_pi")]
        hi: f64,
    },
    /// Bin index among `bins` training-quantile bins, as a real.
    QuantileIndex { bins: usize },
}

fn two_pi() -> f64 {
    2.0 * std::f64::consts::PI
}

impl Encoding {
    pub fn is_real(&self) -> bool {
        matches!(self, Encoding::Raw | Encoding::Rescale { .. } | Encoding::QuantileIndex { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureSpec {
    pub column: String,
    pub encoding: Encoding,
    /// Emit the bits of a bit encoding as 0/1 reals instead.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub as_reals: bool,
}

impl FeatureSpec {
    pub fn new(column: &str, encoding: Encoding) -> Self {
        Self { column: column.to_string(), encoding, as_reals: false }
    }

    pub fn reals(column: &str, encoding: Encoding) -> Self {
        Self { column: column.to_string(), encoding, as_reals: true }
    }
}

/// Statistic fitted for one feature, tagged with the split that produced it.
#[derive(Clone, Debug, PartialEq)]
enum Fitted {
    None,
    Threshold(f64),
    Range(f64, f64),
    Cuts(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Preprocessor {
    features: Vec<(usize, Encoding, Fitted)>,
    cardinality: Vec<usize>,
    as_reals: Vec<bool>,
    /// Name of the split the statistics were computed on.
    pub fitted_on: String,
    pub fitted_rows: Vec<usize>,
}

fn cuts(values: &[f64], bins: usize) -> Result<Vec<f64>> {
    (1..bins).map(|k| quantile(values, k as f64 / bins as f64)).collect()
}

fn bin_of(cuts: &[f64], v: f64) -> usize {
    cuts.iter().filter(|&&c| v > c).count()
}

impl Preprocessor {
    /// Fits per-feature statistics on `rows` of `table` (the training split).
    pub fn fit(table: &Table, rows: &[usize], features: &[FeatureSpec], split: &str) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Data("cannot fit preprocessing on zero rows".into()));
        }
        let mut out = Vec::new();
        let mut cardinality = Vec::new();
        for f in features {
            if f.as_reals && f.encoding.is_real() {
                return Err(Error::Schema(format!("{} already has a real encoding", f.column)));
            }
            let (c, spec) = table.schema.column(&f.column)?;
            let col: Vec<f64> = rows.iter().map(|&r| table.values[r][c]).collect();
            let card = match &spec.kind {
                ColumnKind::Categorical { levels } => levels.len(),
                ColumnKind::Numeric => table.values.iter().map(|r| r[c]).fold(0.0, f64::max) as usize + 1,
            };
            let fitted = match &f.encoding {
                Encoding::Ordinal { width } => {
                    if (*width as u32) < usize::BITS && card > 1usize << width {
                        return Err(Error::Schema(format!("{} has {card} levels; {width} bits are too few", f.column)));
                    }
                    Fitted::None
                }
                Encoding::MedianBinarize => Fitted::Threshold(median(&col)?),
                Encoding::Rescale { .. } => {
                    let lo = col.iter().cloned().fold(f64::INFINITY, f64::min);
                    let hi = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    Fitted::Range(lo, hi)
                }
                Encoding::QuantileOrdinal { width } => Fitted::Cuts(cuts(&col, 1usize << width)?),
                Encoding::QuantileIndex { bins } => Fitted::Cuts(cuts(&col, *bins)?),
                _ => Fitted::None,
            };
            cardinality.push(card);
            out.push((c, f.encoding.clone(), fitted));
        }
        let as_reals = features.iter().map(|f| f.as_reals).collect();
        Ok(Self { features: out, cardinality, as_reals, fitted_on: split.to_string(), fitted_rows: rows.to_vec() })
    }

    fn width(&self, k: usize) -> usize {
        match &self.features[k].1 {
            Encoding::Ordinal { width } | Encoding::QuantileOrdinal { width } => *width,
            Encoding::OneHot => self.cardinality[k],
            Encoding::Indicator { .. } | Encoding::MedianBinarize => 1,
            _ => 0,
        }
    }

    pub fn n_bits(&self) -> usize {
        (0..self.features.len()).filter(|&k| !self.as_reals[k]).map(|k| self.width(k)).sum()
    }

    pub fn n_reals(&self) -> usize {
        (0..self.features.len())
            .map(|k| if self.features[k].1.is_real() { 1 } else if self.as_reals[k] { self.width(k) } else { 0 })
            .sum()
    }

    /// Median threshold of the `k`-th feature, if it is median-binarized.
    pub fn threshold(&self, k: usize) -> Option<f64> {
        match self.features.get(k)?.2 {
            Fitted::Threshold(t) => Some(t),
            _ => None,
        }
    }

    pub fn transform(&self, table: &Table, rows: &[usize]) -> Result<Dataset> {
        let mut samples = Vec::with_capacity(rows.len());
        for &r in rows {
            let mut s = Sample::default();
            for (k, (c, enc, fitted)) in self.features.iter().enumerate() {
                let card = self.cardinality[k];
                let v = table.values[r][*c];
                let mut bits = Vec::new();
                let as_index = || -> Result<usize> {
                    if v < 0.0 || v.fract() != 0.0 {
                        return Err(Error::Encoding(format!("value {v} is not a category index")));
                    }
                    Ok(v as usize)
                };
                match (enc, fitted) {
                    (Encoding::Ordinal { width }, _) => bits = ordinal_encode(as_index()?, *width)?,
                    (Encoding::OneHot, _) => bits = one_hot_encode(as_index()?, card)?,
                    (Encoding::Indicator { value }, _) => bits.push(u8::from(v == *value)),
                    (Encoding::MedianBinarize, Fitted::Threshold(t)) => bits.push(u8::from(v > *t)),
                    (Encoding::QuantileOrdinal { width }, Fitted::Cuts(cs)) => bits = ordinal_encode(bin_of(cs, v), *width)?,
                    (Encoding::Raw, _) => s.reals.push(v),
                    (Encoding::Rescale { lo, hi }, Fitted::Range(a, b)) => {
                        let t = if b > a { (v - a) / (b - a) } else { 0.0 };
                        s.reals.push(lo + (hi - lo) * t);
                    }
                    (Encoding::QuantileIndex { .. }, Fitted::Cuts(cs)) => s.reals.push(bin_of(cs, v) as f64),
                    _ => unreachable!("fit pairs every encoding with its statistic"),
                }
                if self.as_reals[k] {
                    s.reals.extend(bits.iter().map(|&b| b as f64));
                } else {
                    s.bits.extend(bits);
                }
            }
            samples.push(s);
        }
        Dataset::new(samples, rows.iter().map(|&r| table.labels[r]).collect())
    }
}

// ---------------------------------------------------------------------------
// Images

#[derive(Clone, Debug, PartialEq)]
pub struct ImageSet {
    pub rows: usize,
    pub cols: usize,
    /// Row-major pixels normalized to `[0, 1]`.
    pub images: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
}

fn be_u32(b: &[u8], at: usize) -> Result<u32> {
    b.get(at..at + 4)
        .map(|s| u32::from_be_bytes([s[0], s[1], s[2], s[3]]))
        .ok_or_else(|| Error::Format("truncated IDX header".into()))
}

/// Reads an IDX image/label pair, keeping only labels in `keep` when given.
pub fn load_idx_images(images: &Path, labels: &Path, keep: Option<&[u8]>) -> Result<ImageSet> {
    let ib = std::fs::read(images)?;
    let lb = std::fs::read(labels)?;
    if be_u32(&ib, 0)? != 0x0000_0803 {
        return Err(Error::Format(format!("{} is not an IDX image file", images.display())));
    }
    if be_u32(&lb, 0)? != 0x0000_0801 {
        return Err(Error::Format(format!("{} is not an IDX label file", labels.display())));
    }
    let (n, rows, cols) = (be_u32(&ib, 4)? as usize, be_u32(&ib, 8)? as usize, be_u32(&ib, 12)? as usize);
    let nl = be_u32(&lb, 4)? as usize;
    if nl != n {
        return Err(Error::Format(format!("{n} images but {nl} labels")));
    }
    let px = rows * cols;
    if ib.len() != 16 + n * px || lb.len() != 8 + n {
        return Err(Error::Format("IDX payload size does not match its header".into()));
    }
    let mut set = ImageSet { rows, cols, images: Vec::new(), labels: Vec::new() };
    for i in 0..n {
        let y = lb[8 + i];
        if keep.is_some_and(|k| !k.contains(&y)) {
            continue;
        }
        set.images.push(ib[16 + i * px..16 + (i + 1) * px].iter().map(|&p| p as f64 / 255.0).collect());
        set.labels.push(y);
    }
    Ok(set)
}

/// Bilinear resampling with half-pixel centres: output pixel `i` samples the
/// input at `(i + 0.5) * in / out - 0.5`, clamped to the image.
pub fn bilinear_resize(img: &[f64], rows: usize, cols: usize, out_rows: usize, out_cols: usize) -> Result<Vec<f64>> {
    if img.len() != rows * cols || rows == 0 || cols == 0 {
        return Err(Error::Shape(format!("image has {} pixels, expected {rows}x{cols}", img.len())));
    }
    let axis = |i: usize, n_in: usize, n_out: usize| {
        let x = ((i as f64 + 0.5) * n_in as f64 / n_out as f64 - 0.5).clamp(0.0, (n_in - 1) as f64);
        let lo = x.floor() as usize;
        (lo, (lo + 1).min(n_in - 1), x - lo as f64)
    };
    let mut out = Vec::with_capacity(out_rows * out_cols);
    for r in 0..out_rows {
        let (r0, r1, fr) = axis(r, rows, out_rows);
        for c in 0..out_cols {
            let (c0, c1, fc) = axis(c, cols, out_cols);
            let top = img[r0 * cols + c0] * (1.0 - fc) + img[r0 * cols + c1] * fc;
            let bot = img[r1 * cols + c0] * (1.0 - fc) + img[r1 * cols + c1] * fc;
            out.push(top * (1.0 - fr) + bot * fr);
        }
    }
    Ok(out)
}

/// 28x28 to 4x4.
pub fn bilinear_downsample(img: &[f64]) -> Result<Vec<f64>> {
    bilinear_resize(img, 28, 28, 4, 4)
}

pub fn binarize(img: &[f64], threshold: f64) -> Vec<u8> {
    img.iter().map(|&p| u8::from(p > threshold)).collect()
}

/// Downsampled, binarized images as bit samples; `positive` maps to +1.
pub fn images_to_dataset(set: &ImageSet, out_side: usize, threshold: f64, positive: u8) -> Result<Dataset> {
    let samples = set
        .images
        .iter()
        .map(|im| Ok(Sample::bits(binarize(&bilinear_resize(im, set.rows, set.cols, out_side, out_side)?, threshold))))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(samples, set.labels.iter().map(|&y| if y == positive { 1 } else { -1 }).collect())
}

/// Drops every row whose inputs also occur with the opposite label.
pub fn remove_contradictions(d: &Dataset) -> Dataset {
    let mut seen: HashMap<&[u8], (bool, bool)> = HashMap::new();
    for (s, &y) in d.samples.iter().zip(&d.labels) {
        let e = seen.entry(&s.bits).or_default();
        if y > 0 {
            e.1 = true;
        } else {
            e.0 = true;
        }
    }
    let keep: Vec<usize> = (0..d.len()).filter(|&i| !matches!(seen[d.samples[i].bits.as_slice()], (true, true))).collect();
    d.subset(&keep)
}

// ---------------------------------------------------------------------------
// Resampling and folds

/// Resamples the minority class with replacement until both classes match.
pub fn oversample_minority(d: &Dataset, seed: u64) -> Result<Dataset> {
    let (neg, pos) = d.class_counts();
    if neg == 0 || pos == 0 {
        return Err(Error::Argument("oversampling needs both classes present".into()));
    }
    let minority: i8 = if pos < neg { 1 } else { -1 };
    let pool: Vec<usize> = (0..d.len()).filter(|&i| d.labels[i] == minority).collect();
    let mut idx: Vec<usize> = (0..d.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..neg.abs_diff(pos) {
        idx.push(pool[rng.random_range(0..pool.len())]);
    }
    Ok(d.subset(&idx))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub assignments: Vec<usize>,
    pub stratified: bool,
    pub seed: u64,
}

impl FoldPlan {
    /// `(train rows, test rows)` for fold `f`, each in ascending order.
    pub fn split(&self, f: usize) -> (Vec<usize>, Vec<usize>) {
        let (test, train): (Vec<usize>, Vec<usize>) = (0..self.assignments.len()).partition(|&i| self.assignments[i] == f);
        (train, test)
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &a in &self.assignments {
            s[a] += 1;
        }
        s
    }
}

/// Seeded shuffle, then round-robin assignment; when stratified, the shuffled
/// rows are grouped by class before dealing so each fold keeps the ratio.
pub fn kfold(labels: &[i8], k: usize, stratified: bool, seed: u64) -> Result<FoldPlan> {
    if k < 2 || k > labels.len() {
        return Err(Error::Argument(format!("cannot make {k} folds from {} rows", labels.len())));
    }
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    if stratified {
        order.sort_by_key(|&i| labels[i]);
    }
    let mut assignments = vec![0; labels.len()];
    for (pos, &i) in order.iter().enumerate() {
        assignments[i] = pos % k;
    }
    Ok(FoldPlan { k, assignments, stratified, seed })
}

/// Seeded split into `(first, second)` with `n_first` rows in the first part.
pub fn shuffle_split(n: usize, n_first: usize, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if n_first > n {
        return Err(Error::Argument(format!("cannot take {n_first} of {n} rows")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let second = order.split_off(n_first);
    Ok((order, second))
}

// ---------------------------------------------------------------------------
// Synthetic data

/// All `2^n` bitstrings labelled `(-1)^(XOR of the bits at indices)`.
/// Indices are 0-based positions into the bitstring.
pub fn xor_dataset(n: usize, indices: &[usize]) -> Result<Dataset> {
    if n == 0 || n > 20 {
        return Err(Error::Argument(format!("xor dataset width {n} outside 1..=20")));
    }
    if indices.is_empty() || indices.iter().any(|&i| i >= n) {
        return Err(Error::Argument(format!("label indices {indices:?} invalid for {n} bits")));
    }
    let rows: Vec<Vec<u8>> = (0..1usize << n).map(|x| index_to_bits(x, n)).collect();
    let labels = rows.iter().map(|b| if indices.iter().map(|&i| b[i]).sum::<u8>() % 2 == 0 { 1 } else { -1 }).collect();
    Dataset::new(rows.into_iter().map(Sample::bits).collect(), labels)
}

/// `count` distinct label indices drawn with `seed`.
pub fn random_indices(n: usize, count: usize, seed: u64) -> Result<Vec<usize>> {
    if count == 0 || count > n {
        return Err(Error::Argument(format!("cannot draw {count} of {n} indices")));
    }
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    all.truncate(count);
    all.sort_unstable();
    Ok(all)
}

/// Positive ("blue") codewords of every separability pattern, keyed by
/// type `a-b-c`, as bitstrings of length `a`.
const PATTERNS_JSON: &str = include_str!("../fixtures/patterns.json");

pub fn pattern_table() -> Result<Vec<(String, Vec<String>)>> {
    let map: serde_json::Map<String, serde_json::Value> = serde_json::from_str(PATTERNS_JSON)?;
    map.into_iter()
        .map(|(k, v)| Ok((k, serde_json::from_value::<Vec<String>>(v)?)))
        .collect()
}

pub fn pattern_types() -> Vec<String> {
    pattern_table().expect("fixture parses").into_iter().map(|(k, _)| k).collect()
}

/// All `2^a` bitstrings of an `(a, 1)` code, labelled +1 on the pattern's
/// positive set and -1 elsewhere.
pub fn pattern_dataset(kind: &str) -> Result<Dataset> {
    let table = pattern_table()?;
    let (_, blue) = table.iter().find(|(k, _)| k == kind).ok_or_else(|| Error::Argument(format!("unknown pattern type {kind:?}")))?;
    let a: usize = kind.split('-').next().and_then(|s| s.parse().ok()).ok_or_else(|| Error::Format(format!("bad type {kind}")))?;
    let rows: Vec<Vec<u8>> = (0..1usize << a).map(|x| index_to_bits(x, a)).collect();
    let labels = rows
        .iter()
        .map(|b| {
            let s: String = b.iter().map(|v| if *v == 0 { '0' } else { '1' }).collect();
            if blue.contains(&s) {
                1
            } else {
                -1
            }
        })
        .collect();
    Dataset::new(rows.into_iter().map(Sample::bits).collect(), labels)
}

pub fn check_permutation(perm: &[usize]) -> Result<()> {
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
            return Err(Error::Argument(format!("{perm:?} is not a permutation")));
        }
    }
    Ok(())
}

/// Reorders every row's bits: `new[k] = old[perm[k]]`.
pub fn permute_bits(d: &Dataset, perm: &[usize]) -> Result<Dataset> {
    check_permutation(perm)?;
    if d.samples.iter().any(|s| s.bits.len() != perm.len()) {
        return Err(Error::Argument(format!("permutation of {} positions does not match the rows", perm.len())));
    }
    let samples = d
        .samples
        .iter()
        .map(|s| Sample { bits: perm.iter().map(|&p| s.bits[p]).collect(), reals: s.reals.clone() })
        .collect();
    Dataset::new(samples, d.labels.clone())
}

pub fn inverse_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (k, &p) in perm.iter().enumerate() {
        inv[p] = k;
    }
    inv
}

pub fn random_permutation(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}
