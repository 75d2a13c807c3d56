//! The variational classifier `f(x) = <Phi(x)| W(theta)^dag g W(theta) |Phi(x)> + b`.
//!
//! Predictions take the sign of `f`, with `f = 0` mapped to +1. Class
//! probabilities satisfy `p+ - p- = f - b`. Training always uses exact
//! expectations; the shot-sampling mode only affects evaluation.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{template, AnsatzSpec, Template};
use crate::data::Dataset;
use crate::featmap::{product, Encoder, Sample};
use crate::optim::{self, GradientMode, OptimizerConfig};
use crate::star::{Qubit, StarPlan};
use crate::statevec::StateVector;
use crate::{Error, Result};

pub const PROB_CLAMP: f64 = 1e-12;

/// Label function `g(z) in {-1, +1}` over measurement outcomes.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum LabelFn {
    /// `(-1)^popcount(z)`.
    #[default]
    Parity,
    /// `(-1)^(bit of qubit q)`.
    Qubit { q: usize },
    /// Explicit table over all `2^n` outcomes.
    Table { values: Vec<i8> },
}

impl LabelFn {
    pub fn values(&self, n_qubits: usize) -> Result<Vec<f64>> {
        let dim = 1usize << n_qubits;
        let sign = |b: bool| if b { -1.0 } else { 1.0 };
        match self {
            LabelFn::Parity => Ok((0..dim).map(|z: usize| sign(z.count_ones() % 2 == 1)).collect()),
            LabelFn::Qubit { q } => {
                if *q >= n_qubits {
                    return Err(Error::Index { index: *q, size: n_qubits });
                }
                let m = 1usize << (n_qubits - 1 - q);
                Ok((0..dim).map(|z| sign(z & m != 0)).collect())
            }
            LabelFn::Table { values } => {
                if values.len() != dim || values.iter().any(|&v| v != 1 && v != -1) {
                    return Err(Error::Argument(format!("label table needs {dim} entries in {{-1, +1}}")));
                }
                Ok(values.iter().map(|&v| v as f64).collect())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum EvalMode {
    #[default]
    Exact,
    Shots { count: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum Loss {
    #[default]
    CrossEntropy,
    /// Mean `|f - y|`, or with `temperature` the smooth surrogate
    /// `2 sigmoid(-y f / temperature)`.
    EmpiricalRisk {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        temperature: Option<f64>,
    },
}

impl Loss {
    /// Per-sample loss and its derivative with respect to `f`.
    pub fn term(&self, f: f64, b: f64, y: i8) -> (f64, f64) {
        let y = y as f64;
        match self {
            Loss::CrossEntropy => {
                let pp = (1.0 + f - b) / 2.0;
                let (pp_c, pm_c) = (pp.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP), (1.0 - pp).clamp(PROB_CLAMP, 1.0 - PROB_CLAMP));
                let (wp, wm) = ((1.0 + y) / 2.0, (1.0 - y) / 2.0);
                let v = -(wm * pm_c.ln() + wp * pp_c.ln());
                let dp = if pp > PROB_CLAMP && pp < 1.0 - PROB_CLAMP { 1.0 } else { 0.0 };
                (v, -dp * (wp / pp_c - wm / pm_c) / 2.0)
            }
            Loss::EmpiricalRisk { temperature: None } => ((f - y).abs(), (f - y).signum()),
            Loss::EmpiricalRisk { temperature: Some(t) } => {
                let s = 1.0 / (1.0 + (y * f / t).exp());
                (2.0 * s, -2.0 * s * (1.0 - s) * y / t)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelDoc", into = "ModelDoc")]
pub struct VqcModel {
    encoder: Encoder,
    ansatz: AnsatzSpec,
    pub theta: Vec<f64>,
    label: LabelFn,
    pub bias: f64,
    pub eval: EvalMode,
    template: Template,
    g: Vec<f64>,
    star: Option<StarPlan>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    encoder: Encoder,
    ansatz: AnsatzSpec,
    theta: Vec<f64>,
    #[serde(default)]
    label: LabelFn,
    #[serde(default)]
    bias: f64,
    #[serde(default)]
    eval: EvalMode,
}

impl TryFrom<ModelDoc> for VqcModel {
    type Error = Error;
    fn try_from(d: ModelDoc) -> Result<Self> {
        let mut m = VqcModel::new(d.encoder, d.ansatz, d.label)?;
        m.set_theta(d.theta)?;
        m.bias = d.bias;
        m.eval = d.eval;
        Ok(m)
    }
}

impl From<VqcModel> for ModelDoc {
    fn from(m: VqcModel) -> Self {
        ModelDoc { encoder: m.encoder, ansatz: m.ansatz, theta: m.theta, label: m.label, bias: m.bias, eval: m.eval }
    }
}

impl VqcModel {
    /// Model with all angles zero, `b = 0` and exact evaluation.
    pub fn new(encoder: Encoder, ansatz: AnsatzSpec, label: LabelFn) -> Result<Self> {
        if encoder.n_qubits() != ansatz.n_qubits {
            return Err(Error::Shape(format!(
                "encoder produces {} qubits, ansatz acts on {}",
                encoder.n_qubits(),
                ansatz.n_qubits
            )));
        }
        let template = template(&ansatz)?;
        let g = label.values(ansatz.n_qubits)?;
        let star = match (ansatz.readout, &label) {
            (Some(r), LabelFn::Qubit { q }) if *q == r => StarPlan::new(&template, r),
            _ => None,
        };
        Ok(Self { theta: vec![0.0; template.n_params()], encoder, ansatz, label, bias: 0.0, eval: EvalMode::Exact, template, g, star })
    }

    pub fn encoder(&self) -> &Encoder {
        &self.encoder
    }

    pub fn ansatz(&self) -> &AnsatzSpec {
        &self.ansatz
    }

    pub fn label(&self) -> &LabelFn {
        &self.label
    }

    pub fn template(&self) -> &Template {
        &self.template
    }

    pub fn n_params(&self) -> usize {
        self.template.n_params()
    }

    pub fn set_theta(&mut self, theta: Vec<f64>) -> Result<()> {
        if theta.len() != self.n_params() {
            return Err(Error::Shape(format!("expected {} parameters, got {}", self.n_params(), theta.len())));
        }
        self.theta = theta;
        Ok(())
    }

    /// Angles drawn uniformly from `[-pi, pi)`.
    pub fn randomize(&mut self, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pi = std::f64::consts::PI;
        self.theta = (0..self.n_params()).map(|_| rng.random_range(-pi..pi)).collect();
    }

    /// `W(theta)|Phi(x)>`.
    pub fn output_state(&self, x: &Sample) -> Result<StateVector> {
        let mut s = self.encoder.encode(x)?;
        self.template.apply(&self.theta, &mut s)?;
        Ok(s)
    }

    fn exact_mean(&self, s: &StateVector) -> f64 {
        s.amps().iter().zip(&self.g).map(|(a, w)| w * a.norm_sqr()).sum()
    }

    /// Product-input qubits for the readout-star path, when it applies.
    fn star_input(&self, factors: &[StateVector]) -> Option<(&StarPlan, Vec<Qubit>)> {
        let plan = self.star.as_ref()?;
        plan.qubits(factors).map(|q| (plan, q))
    }

    fn mean_g(&self, x: &Sample) -> Result<f64> {
        if self.eval == EvalMode::Exact && self.star.is_some() {
            if let Some((plan, q)) = self.star_input(&self.encoder.factors(x)?) {
                return plan.expect_z(&self.theta, &q);
            }
        }
        let s = self.output_state(x)?;
        match self.eval {
            EvalMode::Exact => Ok(self.exact_mean(&s)),
            EvalMode::Shots { count, seed } => {
                let counts = s.sample_counts(count, sample_seed(seed, x))?;
                Ok(counts.iter().zip(&self.g).map(|(&c, w)| c as f64 * w).sum::<f64>() / count as f64)
            }
        }
    }
}

/// Per-sample seed so that different inputs draw independent shot records.
fn sample_seed(seed: u64, x: &Sample) -> u64 {
    let mut h = DefaultHasher::new();
    seed.hash(&mut h);
    x.bits.hash(&mut h);
    for r in &x.reals {
        r.to_bits().hash(&mut h);
    }
    h.finish()
}

pub fn decision_value(model: &VqcModel, x: &Sample) -> Result<f64> {
    Ok(model.mean_g(x)? + model.bias)
}

/// `(p-, p+)`.
pub fn class_probabilities(model: &VqcModel, x: &Sample) -> Result<(f64, f64)> {
    let m = model.mean_g(x)?;
    let pp = (1.0 + m) / 2.0;
    Ok((1.0 - pp, pp))
}

pub fn predict(model: &VqcModel, x: &Sample) -> Result<i8> {
    Ok(sign_label(decision_value(model, x)?))
}

pub fn sign_label(f: f64) -> i8 {
    if f >= 0.0 {
        1
    } else {
        -1
    }
}

fn nonempty(d: &Dataset) -> Result<()> {
    if d.is_empty() {
        return Err(Error::Argument("dataset is empty".into()));
    }
    Ok(())
}

/// Decision values for every row, in row order.
pub fn decision_values(model: &VqcModel, d: &Dataset) -> Result<Vec<f64>> {
    d.samples.par_iter().map(|x| decision_value(model, x)).collect()
}

pub fn predictions(model: &VqcModel, d: &Dataset) -> Result<Vec<i8>> {
    Ok(decision_values(model, d)?.into_iter().map(sign_label).collect())
}

pub fn accuracy(model: &VqcModel, d: &Dataset) -> Result<f64> {
    nonempty(d)?;
    let p = predictions(model, d)?;
    Ok(p.iter().zip(&d.labels).filter(|(a, b)| a == b).count() as f64 / d.len() as f64)
}

pub fn loss(model: &VqcModel, d: &Dataset, kind: Loss) -> Result<f64> {
    nonempty(d)?;
    let f = decision_values(model, d)?;
    Ok(f.iter().zip(&d.labels).map(|(&f, &y)| kind.term(f, model.bias, y).0).sum::<f64>() / d.len() as f64)
}

pub fn empirical_risk(model: &VqcModel, d: &Dataset) -> Result<f64> {
    loss(model, d, Loss::EmpiricalRisk { temperature: None })
}

pub fn cross_entropy(model: &VqcModel, d: &Dataset) -> Result<f64> {
    loss(model, d, Loss::CrossEntropy)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub optimizer: OptimizerConfig,
    pub loss: Loss,
    /// Mini-batch size for gradient optimizers; full batch when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<usize>,
    /// Seed for mini-batch shuffling.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { optimizer: OptimizerConfig::default(), loss: Loss::CrossEntropy, batch_size: None, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainTrace {
    pub losses: Vec<f64>,
    pub theta: Vec<f64>,
    pub iterations: usize,
    pub wall_time_secs: f64,
}

/// Encoded training inputs, kept dense when small and as product factors
/// otherwise.
enum Encoded {
    Dense(StateVector),
    Factors(Vec<StateVector>),
    Star(Vec<Qubit>),
}

impl Encoded {
    fn state(&self) -> StateVector {
        match self {
            Encoded::Dense(s) => s.clone(),
            Encoded::Factors(f) => product(f).expect("factors were validated"),
            Encoded::Star(q) => {
                let f: Vec<StateVector> = q.iter().map(|a| StateVector::from_amplitudes(a.to_vec()).expect("one qubit")).collect();
                product(&f).expect("factors were validated")
            }
        }
    }
}

const DENSE_CACHE_QUBITS: usize = 12;

struct Prepared<'a> {
    model: &'a VqcModel,
    inputs: Vec<Encoded>,
    labels: &'a [i8],
    loss: Loss,
}

impl<'a> Prepared<'a> {
    fn new(model: &'a VqcModel, d: &'a Dataset, loss: Loss) -> Result<Self> {
        let dense = model.encoder.n_qubits() <= DENSE_CACHE_QUBITS;
        let inputs = d
            .samples
            .iter()
            .map(|x| {
                let f = model.encoder.factors(x)?;
                Ok(match model.star_input(&f) {
                    Some((_, q)) => Encoded::Star(q),
                    None if dense => Encoded::Dense(product(&f)?),
                    None => Encoded::Factors(f),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { model, inputs, labels: &d.labels, loss })
    }

    fn f(&self, theta: &[f64], i: usize) -> f64 {
        if let (Encoded::Star(q), Some(plan)) = (&self.inputs[i], &self.model.star) {
            return plan.expect_z(theta, q).expect("validated shapes") + self.model.bias;
        }
        let mut s = self.inputs[i].state();
        self.model.template.apply(theta, &mut s).expect("validated shapes");
        self.model.exact_mean(&s) + self.model.bias
    }

    fn value(&self, theta: &[f64], idx: &[usize]) -> f64 {
        let terms: Vec<f64> = idx.par_iter().map(|&i| self.loss.term(self.f(theta, i), self.model.bias, self.labels[i]).0).collect();
        terms.iter().sum::<f64>() / idx.len() as f64
    }

    fn value_and_grad(&self, theta: &[f64], idx: &[usize], mode: GradientMode) -> (f64, Vec<f64>) {
        if let GradientMode::FiniteDifference { h } = mode {
            let v = self.value(theta, idx);
            return (v, optim::finite_difference_gradient(|t| self.value(t, idx), theta, h));
        }
        let per: Vec<(f64, Vec<f64>)> = idx
            .par_iter()
            .map(|&i| {
                let (fv, df) = match mode {
                    // The star path has no adjoint form; the shift rule is exact.
                    _ if matches!(self.inputs[i], Encoded::Star(_)) => {
                        (self.f(theta, i), optim::parameter_shift_gradient(|t| self.f(t, i), theta))
                    }
                    GradientMode::Adjoint => {
                        let (m, g) = self.model.template.adjoint_gradient(theta, &self.inputs[i].state(), &self.model.g).expect("validated shapes");
                        (m + self.model.bias, g)
                    }
                    _ => (self.f(theta, i), optim::parameter_shift_gradient(|t| self.f(t, i), theta)),
                };
                let (l, dl) = self.loss.term(fv, self.model.bias, self.labels[i]);
                (l, df.into_iter().map(|g| g * dl).collect())
            })
            .collect();
        let n = idx.len() as f64;
        let mut grad = vec![0.0; theta.len()];
        let mut v = 0.0;
        for (l, g) in per {
            v += l;
            for (a, b) in grad.iter_mut().zip(g) {
                *a += b;
            }
        }
        (v / n, grad.into_iter().map(|g| g / n).collect())
    }
}

/// Fits `model.theta` on `d`, starting from the current angles.
pub fn train(model: &mut VqcModel, d: &Dataset, cfg: &TrainConfig) -> Result<TrainTrace> {
    nonempty(d)?;
    let start = Instant::now();
    let prep = Prepared::new(model, d, cfg.loss)?;
    let all: Vec<usize> = (0..d.len()).collect();
    let theta0 = model.theta.clone();
    let result = match &cfg.optimizer {
        OptimizerConfig::Spsa(c) => optim::spsa_minimize(|t| prep.value(t, &all), &theta0, c),
        OptimizerConfig::NelderMead(c) => optim::nelder_mead_minimize(|t| prep.value(t, &all), &theta0, c),
        OptimizerConfig::Adam(c) => {
            let batch = cfg.batch_size.unwrap_or(d.len()).clamp(1, d.len());
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut order = all.clone();
            let mut pos = order.len();
            optim::adam_minimize(
                |t| {
                    if batch == order.len() {
                        return prep.value_and_grad(t, &order, c.gradient);
                    }
                    if pos + batch > order.len() {
                        order.shuffle(&mut rng);
                        pos = 0;
                    }
                    let idx = &order[pos..pos + batch];
                    pos += batch;
                    prep.value_and_grad(t, idx, c.gradient)
                },
                &theta0,
                c,
            )
        }
    }?;
    drop(prep);
    model.theta = result.theta.clone();
    Ok(TrainTrace {
        iterations: result.trace.len(),
        losses: result.trace,
        theta: result.theta,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

impl VqcModel {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
