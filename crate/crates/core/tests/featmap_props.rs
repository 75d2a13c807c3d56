use num_complex::Complex64;
use proptest::prelude::*;
use qracvqc::featmap::{compose_encoder, zz_phase_gate, FeaturePart, Sample};
use qracvqc::qrac::{one_qubit_codebook, BlochVector};
use qracvqc::statevec::{Circuit, Gate, StateVector};

/// Reduced density matrix of the last qubit.
fn last_qubit_rho(s: &StateVector) -> [[Complex64; 2]; 2] {
    let mut rho = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (i, a) in s.amps().iter().enumerate().step_by(2) {
        let b = s.amps()[i + 1];
        rho[0][0] += a * a.conj();
        rho[0][1] += a * b.conj();
        rho[1][0] += b * a.conj();
        rho[1][1] += b * b.conj();
    }
    rho
}

proptest! {
    #[test]
    fn first_half_repetition_has_flat_magnitudes(x in prop::collection::vec(0.0f64..6.3, 1..=5)) {
        let d = x.len();
        let mut c = Circuit::new(d);
        for q in 0..d {
            c.push(Gate::H(q)).unwrap();
        }
        c.push(zz_phase_gate(&x).unwrap()).unwrap();
        let s = c.run().unwrap();
        let m = (2f64).powf(-(d as f64) / 2.0);
        for a in s.amps() {
            prop_assert!((a.norm() - m).abs() < 1e-12);
        }
    }

    #[test]
    fn encoders_are_deterministic(bits in prop::collection::vec(0u8..2, 3), reals in prop::collection::vec(-3.0f64..3.0, 2)) {
        let e = compose_encoder(
            vec![
                FeaturePart::Qrac { codebook: one_qubit_codebook(3).unwrap(), slots: vec![0, 1, 2] },
                FeaturePart::Zz { slots: vec![0, 1], reps: 2 },
            ],
            3,
            2,
        )
        .unwrap();
        let s = Sample { bits, reals };
        prop_assert_eq!(e.encode(&s).unwrap(), e.encode(&s.clone()).unwrap());
    }

    #[test]
    fn latent_reduced_state_ignores_inputs(
        a in prop::collection::vec(0u8..2, 3),
        b in prop::collection::vec(0u8..2, 3),
        theta in 0.0f64..3.14,
        phi in -3.14f64..3.14,
    ) {
        let v = BlochVector::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
        let e = compose_encoder(
            vec![
                FeaturePart::Qrac { codebook: one_qubit_codebook(3).unwrap(), slots: vec![0, 1, 2] },
                FeaturePart::Latent { count: 1, state: Some(vec![v]) },
            ],
            3,
            0,
        )
        .unwrap();
        let ra = last_qubit_rho(&e.encode(&Sample::bits(a)).unwrap());
        let rb = last_qubit_rho(&e.encode(&Sample::bits(b)).unwrap());
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((ra[i][j] - rb[i][j]).norm() < 1e-12);
            }
        }
    }
}
