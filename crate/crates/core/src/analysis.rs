//! Geometric separability of one-qubit codeword labelings.
//!
//! A one-qubit classifier with a fixed measurement and a bias can only draw a
//! plane through the Bloch ball, so its best accuracy on a labelled point set
//! is the best accuracy of `sign(n . v - t)` over unit axes `n` and
//! thresholds `t`.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{pattern_dataset, pattern_types};
use crate::qrac::{one_qubit_codebook, BlochVector};
use crate::{Error, Result};

pub const DEFAULT_GRID: usize = 4096;

/// Types no plane separates.
pub const KNOWN_INSEPARABLE: [&str; 8] = ["2-2-2", "3-2-2", "3-2-3", "3-3-2", "3-3-3", "3-4-3", "3-4-4", "3-4-5"];

const TIE: f64 = 1e-12;
const REFINE_ROUNDS: usize = 12;
const REFINE_SAMPLES: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternResult {
    pub kind: String,
    pub best_accuracy: f64,
    pub separable: bool,
    /// Measurement axis; `+1` is predicted where `axis . v > threshold`.
    pub axis: [f64; 3],
    pub threshold: f64,
}

/// `n` near-uniform unit vectors on the sphere.
pub fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = dot(&v, &v).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Best number of correct points along `axis` over every threshold interval,
/// predicting +1 above the threshold.
fn best_on_axis(points: &[([f64; 3], i8)], axis: &[f64; 3]) -> (usize, f64) {
    let mut proj: Vec<(f64, i8)> = points.iter().map(|(v, y)| (dot(axis, v), *y)).collect();
    proj.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = proj.len();
    let total_pos = proj.iter().filter(|p| p.1 > 0).count();
    let (mut pos_below, mut neg_below) = (0usize, 0usize);
    let mut best = (total_pos, proj[0].0 - 1.0);
    let mut i = 0;
    while i < n {
        let v = proj[i].0;
        while i < n && proj[i].0 - v <= TIE {
            if proj[i].1 > 0 {
                pos_below += 1;
            } else {
                neg_below += 1;
            }
            i += 1;
        }
        let t = if i < n { (proj[i - 1].0 + proj[i].0) / 2.0 } else { proj[n - 1].0 + 1.0 };
        let correct = neg_below + total_pos - pos_below;
        if correct > best.0 {
            best = (correct, t);
        }
    }
    best
}

fn best_either_way(points: &[([f64; 3], i8)], axis: &[f64; 3]) -> (usize, [f64; 3], f64) {
    let (a, ta) = best_on_axis(points, axis);
    let neg = [-axis[0], -axis[1], -axis[2]];
    let (b, tb) = best_on_axis(points, &neg);
    if b > a {
        (b, neg, tb)
    } else {
        (a, *axis, ta)
    }
}

/// Best accuracy of a plane separating labelled Bloch vectors, searched over
/// a Fibonacci grid of `grid` axes followed by local refinement.
pub fn best_axis_accuracy(points: &[(BlochVector, i8)], grid: usize) -> Result<PatternResult> {
    if points.is_empty() {
        return Err(Error::Argument("no points to separate".into()));
    }
    if grid < 64 * 64 {
        return Err(Error::Argument(format!("axis grid of {grid} directions is below 4096")));
    }
    let pts: Vec<([f64; 3], i8)> = points.iter().map(|(v, y)| (v.as_array(), *y)).collect();
    let n = pts.len();
    let (mut correct, mut axis, mut threshold) = fibonacci_sphere(grid)
        .par_iter()
        .map(|a| best_either_way(&pts, a))
        .reduce(|| (0, [0.0, 0.0, 1.0], 0.0), |x, y| if y.0 > x.0 { y } else { x });
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut radius = 0.1;
    for _ in 0..REFINE_ROUNDS {
        if correct == n {
            break;
        }
        for _ in 0..REFINE_SAMPLES {
            let cand = unit([
                axis[0] + radius * (rng.random::<f64>() - 0.5),
                axis[1] + radius * (rng.random::<f64>() - 0.5),
                axis[2] + radius * (rng.random::<f64>() - 0.5),
            ]);
            let (c, a, t) = best_either_way(&pts, &cand);
            if c > correct {
                (correct, axis, threshold) = (c, a, t);
            }
        }
        radius *= 0.5;
    }
    Ok(PatternResult { kind: String::new(), best_accuracy: correct as f64 / n as f64, separable: correct == n, axis, threshold })
}

/// Labelled Bloch vectors of a pattern type on the `(a, 1)` cube code.
pub fn pattern_points(kind: &str) -> Result<Vec<(BlochVector, i8)>> {
    let d = pattern_dataset(kind)?;
    let code = one_qubit_codebook(d.n_bits())?;
    d.samples
        .iter()
        .zip(&d.labels)
        .map(|(s, &y)| {
            let b = code.codeword(&s.bits)?.bloch()?;
            Ok((BlochVector::new(b[0], b[1], b[2]), y))
        })
        .collect()
}

pub fn classify_patterns() -> Result<Vec<PatternResult>> {
    classify_patterns_with_grid(DEFAULT_GRID)
}

pub fn classify_patterns_with_grid(grid: usize) -> Result<Vec<PatternResult>> {
    pattern_types()
        .into_iter()
        .map(|kind| {
            let mut r = best_axis_accuracy(&pattern_points(&kind)?, grid)?;
            r.kind = kind;
            Ok(r)
        })
        .collect()
}

/// Types reported inseparable, in fixture order.
pub fn inseparable_types(results: &[PatternResult]) -> Vec<String> {
    results.iter().filter(|r| !r.separable).map(|r| r.kind.clone()).collect()
}

/// CSV with columns `type,best_accuracy,separable`.
pub fn write_pattern_report<W: Write>(out: W, results: &[PatternResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["type", "best_accuracy", "separable"])?;
    for r in results {
        w.write_record([r.kind.clone(), format!("{:.6}", r.best_accuracy), r.separable.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
