use proptest::prelude::*;
use qracvqc::optim::{adam_minimize, nelder_mead_minimize, spsa_minimize, AdamConfig, NelderMeadConfig, SpsaConfig};

fn objective(t: &[f64]) -> f64 {
    t.iter().enumerate().map(|(i, v)| (v - i as f64 * 0.3).powi(2) + 0.2 * (3.0 * v).sin()).sum()
}

fn gradient(t: &[f64]) -> (f64, Vec<f64>) {
    let g = t.iter().enumerate().map(|(i, v)| 2.0 * (v - i as f64 * 0.3) + 0.6 * (3.0 * v).cos()).collect();
    (objective(t), g)
}

fn improvements_never_rise(trace: &[f64]) -> bool {
    let mut best = f64::INFINITY;
    let events: Vec<f64> = trace
        .iter()
        .filter_map(|&v| {
            if v < best {
                best = v;
                Some(v)
            } else {
                None
            }
        })
        .collect();
    events.windows(2).all(|w| w[1] <= w[0])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn optimizers_repeat_exactly(seed in any::<u64>(), theta0 in prop::collection::vec(-2.0f64..2.0, 1..5)) {
        let spsa = SpsaConfig { a: 0.5, seed, max_iter: 60, ..SpsaConfig::default() };
        let a = spsa_minimize(objective, &theta0, &spsa).unwrap();
        let b = spsa_minimize(objective, &theta0, &spsa).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(improvements_never_rise(&a.trace));
        prop_assert!(a.trace.iter().all(|&v| a.value <= v));

        let nm = NelderMeadConfig { max_iter: 60, ..NelderMeadConfig::default() };
        let a = nelder_mead_minimize(objective, &theta0, &nm).unwrap();
        prop_assert_eq!(&a, &nelder_mead_minimize(objective, &theta0, &nm).unwrap());
        prop_assert!(improvements_never_rise(&a.trace));

        let adam = AdamConfig { lr: 0.05, max_iter: 60, ..AdamConfig::default() };
        let a = adam_minimize(gradient, &theta0, &adam).unwrap();
        prop_assert_eq!(&a, &adam_minimize(gradient, &theta0, &adam).unwrap());
        prop_assert!(a.trace.iter().all(|&v| a.value <= v));
    }
}
