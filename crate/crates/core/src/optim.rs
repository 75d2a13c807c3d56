//! Optimizers for the variational loop.
//!
//! Objectives are plain closures `&[f64] -> f64`. Every optimizer records one
//! loss value per iteration and fails with [`Error::Divergence`] (carrying the
//! partial trace) as soon as the objective returns a non-finite value.

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct OptResult {
    pub theta: Vec<f64>,
    pub value: f64,
    /// Objective value after each iteration.
    pub trace: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpsaConfig {
    pub a: f64,
    pub c: f64,
    pub alpha: f64,
    pub gamma: f64,
    /// Stability constant; 10% of `max_iter` when absent.
    #[serde(rename = "A", skip_serializing_if = "Option::is_none")]
    pub big_a: Option<f64>,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for SpsaConfig {
    fn default() -> Self {
        Self { a: 0.1, c: 0.1, alpha: 0.602, gamma: 0.101, big_a: None, max_iter: 200, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NelderMeadConfig {
    /// Offset of the initial simplex vertices along each axis.
    pub scale: f64,
    /// Stop once the simplex diameter falls below this.
    pub xtol: f64,
    /// Stop once the spread of vertex values falls below this.
    pub ftol: f64,
    pub max_iter: usize,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        Self { scale: 0.5, xtol: 1e-10, ftol: 1e-14, max_iter: 200 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum GradientMode {
    ParameterShift,
    /// Adjoint (reverse-mode) differentiation of the simulated circuit.
    Adjoint,
    FiniteDifference { h: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub gradient: GradientMode,
    pub max_iter: usize,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self { lr: 0.01, beta1: 0.9, beta2: 0.999, eps: 1e-8, gradient: GradientMode::ParameterShift, max_iter: 200 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum OptimizerConfig {
    Spsa(SpsaConfig),
    NelderMead(NelderMeadConfig),
    Adam(AdamConfig),
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig::Spsa(SpsaConfig::default())
    }
}

impl OptimizerConfig {
    pub fn max_iter(&self) -> usize {
        match self {
            OptimizerConfig::Spsa(c) => c.max_iter,
            OptimizerConfig::NelderMead(c) => c.max_iter,
            OptimizerConfig::Adam(c) => c.max_iter,
        }
    }

    pub fn set_max_iter(&mut self, n: usize) {
        match self {
            OptimizerConfig::Spsa(c) => c.max_iter = n,
            OptimizerConfig::NelderMead(c) => c.max_iter = n,
            OptimizerConfig::Adam(c) => c.max_iter = n,
        }
    }
}

fn finite(v: f64, iteration: usize, trace: &[f64]) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Divergence { iteration, trace: trace.to_vec() })
    }
}

fn check_budget(max_iter: usize) -> Result<()> {
    if max_iter == 0 {
        return Err(Error::Argument("iteration budget must be at least 1".into()));
    }
    Ok(())
}

/// Simultaneous-perturbation gradient estimate with Rademacher directions.
pub fn spsa_gradient<F: FnMut(&[f64]) -> f64>(f: &mut F, theta: &[f64], c: f64, rng: &mut ChaCha8Rng) -> (Vec<f64>, f64, f64) {
    let delta: Vec<f64> = theta.iter().map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
    let plus: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t + c * d).collect();
    let minus: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t - c * d).collect();
    let (fp, fm) = (f(&plus), f(&minus));
    let g = delta.iter().map(|d| (fp - fm) / (2.0 * c * d)).collect();
    (g, fp, fm)
}

/// SPSA with gains `a_k = a / (A + k + 1)^alpha`, `c_k = c / (k + 1)^gamma`.
/// Returns the best parameters seen among the iterates.
pub fn spsa_minimize<F: FnMut(&[f64]) -> f64>(mut f: F, theta0: &[f64], cfg: &SpsaConfig) -> Result<OptResult> {
    check_budget(cfg.max_iter)?;
    if cfg.c == 0.0 || !cfg.c.is_finite() {
        return Err(Error::Argument("SPSA perturbation size c must be nonzero and finite".into()));
    }
    if ![cfg.a, cfg.alpha, cfg.gamma].iter().all(|v| v.is_finite()) {
        return Err(Error::Argument("SPSA hyperparameters must be finite".into()));
    }
    let big_a = cfg.big_a.unwrap_or(0.1 * cfg.max_iter as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut theta = theta0.to_vec();
    let mut trace = Vec::with_capacity(cfg.max_iter);
    let mut best = (finite(f(&theta), 0, &trace)?, theta.clone());
    for k in 0..cfg.max_iter {
        let ak = cfg.a / (big_a + k as f64 + 1.0).powf(cfg.alpha);
        let ck = cfg.c / (k as f64 + 1.0).powf(cfg.gamma);
        let (g, fp, fm) = spsa_gradient(&mut f, &theta, ck, &mut rng);
        finite(fp, k, &trace)?;
        finite(fm, k, &trace)?;
        for (t, gi) in theta.iter_mut().zip(&g) {
            *t -= ak * gi;
        }
        let v = finite(f(&theta), k, &trace)?;
        trace.push(v);
        if v < best.0 {
            best = (v, theta.clone());
        }
    }
    Ok(OptResult { theta: best.1, value: best.0, trace })
}

/// Nelder-Mead with reflection 1, expansion 2, contraction 0.5, shrink 0.5.
pub fn nelder_mead_minimize<F: FnMut(&[f64]) -> f64>(mut f: F, theta0: &[f64], cfg: &NelderMeadConfig) -> Result<OptResult> {
    check_budget(cfg.max_iter)?;
    let n = theta0.len();
    if n == 0 {
        return Err(Error::Argument("Nelder-Mead needs at least one dimension".into()));
    }
    let mut trace = Vec::new();
    let mut simplex: Vec<(f64, Vec<f64>)> = Vec::with_capacity(n + 1);
    simplex.push((finite(f(theta0), 0, &trace)?, theta0.to_vec()));
    for i in 0..n {
        let mut v = theta0.to_vec();
        v[i] += cfg.scale;
        simplex.push((finite(f(&v), 0, &trace)?, v));
    }
    let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect() };
    for k in 0..cfg.max_iter {
        simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
        let centroid: Vec<f64> = (0..n).map(|j| simplex[..n].iter().map(|v| v.1[j]).sum::<f64>() / n as f64).collect();
        let worst = simplex[n].clone();
        // x_r = c + (c - x_worst)
        let xr = lerp(&centroid, &worst.1, -1.0);
        let fr = finite(f(&xr), k, &trace)?;
        if fr < simplex[0].0 {
            let xe = lerp(&centroid, &worst.1, -2.0);
            let fe = finite(f(&xe), k, &trace)?;
            simplex[n] = if fe < fr { (fe, xe) } else { (fr, xr) };
        } else if fr < simplex[n - 1].0 {
            simplex[n] = (fr, xr);
        } else {
            let (xc, fc) = if fr < worst.0 {
                let xc = lerp(&centroid, &xr, 0.5);
                let fc = finite(f(&xc), k, &trace)?;
                (xc, fc)
            } else {
                let xc = lerp(&centroid, &worst.1, 0.5);
                let fc = finite(f(&xc), k, &trace)?;
                (xc, fc)
            };
            if fc < fr.min(worst.0) {
                simplex[n] = (fc, xc);
            } else {
                let best = simplex[0].1.clone();
                for v in simplex.iter_mut().skip(1) {
                    v.1 = lerp(&best, &v.1, 0.5);
                    v.0 = finite(f(&v.1), k, &trace)?;
                }
            }
        }
        simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
        trace.push(simplex[0].0);
        let diameter = simplex[1..]
            .iter()
            .map(|v| v.1.iter().zip(&simplex[0].1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if diameter < cfg.xtol || simplex[n].0 - simplex[0].0 < cfg.ftol {
            break;
        }
    }
    let (value, theta) = simplex.swap_remove(0);
    Ok(OptResult { theta, value, trace })
}

/// Adam on an objective that returns its value and gradient.
pub fn adam_minimize<F: FnMut(&[f64]) -> (f64, Vec<f64>)>(mut f: F, theta0: &[f64], cfg: &AdamConfig) -> Result<OptResult> {
    check_budget(cfg.max_iter)?;
    if !(0.0..1.0).contains(&cfg.beta1) || !(0.0..1.0).contains(&cfg.beta2) {
        return Err(Error::Argument("Adam moment decay rates must lie in [0, 1)".into()));
    }
    if !(cfg.lr.is_finite() && cfg.eps.is_finite() && cfg.eps > 0.0) {
        return Err(Error::Argument("Adam learning rate and epsilon must be finite, epsilon positive".into()));
    }
    let n = theta0.len();
    let mut theta = theta0.to_vec();
    let (mut m, mut v) = (vec![0.0; n], vec![0.0; n]);
    let mut trace = Vec::with_capacity(cfg.max_iter);
    let mut best = (f64::INFINITY, theta.clone());
    for k in 0..cfg.max_iter {
        let (value, grad) = f(&theta);
        finite(value, k, &trace)?;
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::Divergence { iteration: k, trace });
        }
        if value < best.0 {
            best = (value, theta.clone());
        }
        trace.push(value);
        let t = (k + 1) as i32;
        let (c1, c2) = (1.0 - cfg.beta1.powi(t), 1.0 - cfg.beta2.powi(t));
        for j in 0..n {
            m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * grad[j];
            v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * grad[j] * grad[j];
            theta[j] -= cfg.lr * (m[j] / c1) / ((v[j] / c2).sqrt() + cfg.eps);
        }
    }
    let last = f(&theta).0;
    if last.is_finite() && last <= best.0 {
        best = (last, theta);
    }
    Ok(OptResult { theta: best.1, value: best.0, trace })
}

/// `d f / d theta_k = [f(theta + pi/2 e_k) - f(theta - pi/2 e_k)] / 2`.
///
/// Valid when each parameter enters exactly one gate `exp(-i theta G / 2)`
/// with `G^2 = I`; see [`crate::ansatz::Template::parameter_shift_gradient`]
/// for the checked form.
pub fn parameter_shift_gradient<F: FnMut(&[f64]) -> f64>(mut f: F, theta: &[f64]) -> Vec<f64> {
    let s = std::f64::consts::FRAC_PI_2;
    let mut t = theta.to_vec();
    (0..theta.len())
        .map(|k| {
            t[k] = theta[k] + s;
            let p = f(&t);
            t[k] = theta[k] - s;
            let m = f(&t);
            t[k] = theta[k];
            (p - m) / 2.0
        })
        .collect()
}

pub fn finite_difference_gradient<F: FnMut(&[f64]) -> f64>(mut f: F, theta: &[f64], h: f64) -> Vec<f64> {
    let mut t = theta.to_vec();
    (0..theta.len())
        .map(|k| {
            t[k] = theta[k] + h;
            let p = f(&t);
            t[k] = theta[k] - h;
            let m = f(&t);
            t[k] = theta[k];
            (p - m) / (2.0 * h)
        })
        .collect()
}

/// Writes `iteration,loss` rows, iterations counted from 1.
pub fn write_trace_csv(trace: &[f64], path: &Path) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "iteration,loss")?;
    for (k, v) in trace.iter().enumerate() {
        writeln!(w, "{},{}", k + 1, v)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    #[test]
    fn spsa_examples() {
        let cfg = SpsaConfig { a: 1.0, ..SpsaConfig::default() };
        let r = spsa_minimize(|t| (t[0] - 3.0).powi(2), &[0.0], &cfg).unwrap();
        assert!((r.theta[0] - 3.0).abs() < 0.1);
        assert_eq!(r.trace.len(), 200);
        let r = spsa_minimize(|t| t[0] * t[0] + t[1] * t[1], &[1.0, -1.0], &cfg).unwrap();
        assert!(r.value < 1e-2);
        let bad = SpsaConfig { c: 0.0, ..SpsaConfig::default() };
        assert!(matches!(spsa_minimize(|t| t[0], &[0.0], &bad), Err(Error::Argument(_))));
        let same = spsa_minimize(|t| (t[0] - 1.0).powi(2) + t[1].sin(), &[0.3, 0.2], &SpsaConfig::default()).unwrap();
        assert_eq!(same, spsa_minimize(|t| (t[0] - 1.0).powi(2) + t[1].sin(), &[0.3, 0.2], &SpsaConfig::default()).unwrap());
    }

    #[test]
    fn spsa_default_gains_are_slow_on_the_scalar_quadratic() {
        let r = spsa_minimize(|t| (t[0] - 3.0).powi(2), &[0.0], &SpsaConfig::default()).unwrap();
        assert!((r.theta[0] - 3.0).abs() > 0.1);
    }

    #[test]
    fn spsa_divergence_carries_trace() {
        let mut calls = 0;
        let r = spsa_minimize(
            |t| {
                calls += 1;
                if calls > 10 { f64::NAN } else { t[0] * t[0] }
            },
            &[1.0],
            &SpsaConfig::default(),
        );
        match r {
            Err(Error::Divergence { iteration, trace }) => assert_eq!(trace.len(), iteration),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn spsa_estimate_is_unbiased_on_linear_objectives() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let trials = 10_000;
        // One dimension: the estimate is exact for every draw.
        let mut line = |t: &[f64]| -1.7 * t[0];
        let mean = (0..trials).map(|_| spsa_gradient(&mut line, &[0.4], 0.1, &mut rng).0[0]).sum::<f64>() / trials as f64;
        assert!((mean + 1.7).abs() < 0.01 * 1.7);

        // Several dimensions: cross terms a_j D_j / D_i average out; the
        // standard error of the mean is sqrt(sum_{j != i} a_j^2 / trials).
        let slope = [0.7, -1.3, 2.0];
        let mut f = |t: &[f64]| t.iter().zip(&slope).map(|(a, b)| a * b).sum::<f64>();
        let mut avg = [0.0; 3];
        for _ in 0..trials {
            let (g, _, _) = spsa_gradient(&mut f, &[0.1, 0.2, 0.3], 0.1, &mut rng);
            for j in 0..3 {
                avg[j] += g[j] / trials as f64;
            }
        }
        for i in 0..3 {
            let var: f64 = (0..3).filter(|&j| j != i).map(|j| slope[j] * slope[j]).sum();
            let se = (var / trials as f64).sqrt();
            assert!((avg[i] - slope[i]).abs() < 4.0 * se, "{avg:?}");
        }
    }

    #[test]
    fn nelder_mead_examples() {
        let cfg = NelderMeadConfig::default();
        let r = nelder_mead_minimize(|t| (t[0] - 2.0).powi(2), &[0.0], &cfg).unwrap();
        assert!((r.theta[0] - 2.0).abs() < 1e-6);
        let cfg = NelderMeadConfig { max_iter: 500, ..NelderMeadConfig::default() };
        let r = nelder_mead_minimize(rosenbrock, &[-1.2, 1.0], &cfg).unwrap();
        assert!(r.value < 1e-3, "{}", r.value);
        let one = NelderMeadConfig { max_iter: 1, ..NelderMeadConfig::default() };
        assert_eq!(nelder_mead_minimize(rosenbrock, &[-1.2, 1.0], &one).unwrap().trace.len(), 1);
        let trace = &nelder_mead_minimize(rosenbrock, &[-1.2, 1.0], &cfg).unwrap().trace;
        assert!(trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn adam_examples() {
        let bowl = |t: &[f64]| (t.iter().map(|v| v * v).sum::<f64>(), t.iter().map(|v| 2.0 * v).collect::<Vec<_>>());
        let cfg = AdamConfig { lr: 0.1, max_iter: 300, ..AdamConfig::default() };
        let r = adam_minimize(bowl, &[1.0, -0.5], &cfg).unwrap();
        let gnorm = r.theta.iter().map(|v| 4.0 * v * v).sum::<f64>().sqrt();
        assert!(gnorm < 1e-4, "{gnorm}");
        let flat = adam_minimize(|t| (1.0, vec![0.0; t.len()]), &[0.4, 0.5], &cfg).unwrap();
        assert_eq!(flat.theta, vec![0.4, 0.5]);
        let bad = AdamConfig { beta2: 1.0, ..AdamConfig::default() };
        assert!(matches!(adam_minimize(bowl, &[1.0], &bad), Err(Error::Argument(_))));
    }

    #[test]
    fn shift_rule_on_cosine() {
        for th in [-2.0, 0.3, 1.9] {
            let g = parameter_shift_gradient(|t| t[0].cos(), &[th]);
            assert!((g[0] + f64::sin(th)).abs() < 1e-10);
        }
        assert_eq!(parameter_shift_gradient(|_| 4.2, &[0.1, 0.2]), vec![0.0, 0.0]);
    }

    #[test]
    fn trace_csv() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        write_trace_csv(&[0.5, 0.25], &p).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "iteration,loss\n1,0.5\n2,0.25\n");
    }
}
