use proptest::prelude::*;
use qracvqc::analysis::{best_axis_accuracy, pattern_points, DEFAULT_GRID, KNOWN_INSEPARABLE};
use qracvqc::ansatz::AnsatzSpec;
use qracvqc::data::pattern_dataset;
use qracvqc::featmap::{compose_encoder, FeaturePart};
use qracvqc::optim::{AdamConfig, GradientMode, OptimizerConfig};
use qracvqc::qrac::{duplicate_codebook, one_qubit_codebook, BlochVector};
use qracvqc::vqc::{accuracy, train, LabelFn, Loss, TrainConfig, VqcModel};

fn rotate(v: BlochVector, axis: [f64; 3], angle: f64) -> BlochVector {
    // Rodrigues' formula.
    let k = {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        [axis[0] / n, axis[1] / n, axis[2] / n]
    };
    let p = v.as_array();
    let cross = [k[1] * p[2] - k[2] * p[1], k[2] * p[0] - k[0] * p[2], k[0] * p[1] - k[1] * p[0]];
    let d = k[0] * p[0] + k[1] * p[1] + k[2] * p[2];
    let (c, s) = (angle.cos(), angle.sin());
    let r: Vec<f64> = (0..3).map(|i| p[i] * c + cross[i] * s + k[i] * d * (1.0 - c)).collect();
    BlochVector::new(r[0], r[1], r[2])
}

fn unit() -> impl Strategy<Value = BlochVector> {
    (-1.0f64..1.0, -3.14f64..3.14).prop_map(|(z, phi)| {
        let r = (1.0 - z * z).sqrt();
        BlochVector::new(r * phi.cos(), r * phi.sin(), z)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn rotations_do_not_change_accuracy(idx in 0usize..15, axis in prop::array::uniform3(-1.0f64..1.0), angle in -3.14f64..3.14) {
        prop_assume!(axis.iter().map(|a| a * a).sum::<f64>() > 1e-2);
        let kind = qracvqc::data::pattern_types()[idx].clone();
        let pts = pattern_points(&kind).unwrap();
        let rotated: Vec<_> = pts.iter().map(|(v, y)| (rotate(*v, axis, angle), *y)).collect();
        let a = best_axis_accuracy(&pts, DEFAULT_GRID).unwrap().best_accuracy;
        let b = best_axis_accuracy(&rotated, DEFAULT_GRID).unwrap().best_accuracy;
        prop_assert!((a - b).abs() < 1e-6, "{kind}: {a} vs {b}");
    }

    #[test]
    fn three_points_are_always_separable(p in prop::collection::vec((unit(), prop_oneof![Just(1i8), Just(-1i8)]), 1..=3)) {
        prop_assert_eq!(best_axis_accuracy(&p, DEFAULT_GRID).unwrap().best_accuracy, 1.0);
    }
}

fn trained_accuracy(kind: &str, copies: usize, latent: bool) -> f64 {
    let d = pattern_dataset(kind).unwrap();
    let a = d.n_bits();
    let code = duplicate_codebook(&one_qubit_codebook(a).unwrap(), copies).unwrap();
    let mut parts = vec![FeaturePart::Qrac { codebook: code, slots: (0..a).collect() }];
    if latent {
        parts.push(FeaturePart::Latent { count: 1, state: None });
    }
    let enc = compose_encoder(parts, a, 0).unwrap();
    let n = enc.n_qubits();
    let label = if latent { LabelFn::Qubit { q: 0 } } else { LabelFn::Parity };
    let cfg = TrainConfig {
        optimizer: OptimizerConfig::Adam(AdamConfig { lr: 0.1, gradient: GradientMode::Adjoint, max_iter: 300, ..AdamConfig::default() }),
        loss: Loss::EmpiricalRisk { temperature: Some(0.1) },
        ..TrainConfig::default()
    };
    (0..8)
        .map(|seed| {
            let mut m = VqcModel::new(enc.clone(), AnsatzSpec::ryrz(n, 2), label.clone()).unwrap();
            m.randomize(seed);
            train(&mut m, &d, &cfg).unwrap();
            accuracy(&m, &d).unwrap()
        })
        .fold(0.0, f64::max)
}

#[test]
fn extra_qubits_never_hurt() {
    for kind in KNOWN_INSEPARABLE {
        let one = trained_accuracy(kind, 1, false);
        assert!(trained_accuracy(kind, 2, false) >= one, "{kind} copies");
        assert!(trained_accuracy(kind, 1, true) >= one, "{kind} latent");
    }
}
