use proptest::prelude::*;
use qracvqc::qrac::{
    concat_codebook, duplicate_codebook, encode, helstrom_success, index_to_bits, min_success, nayak_check,
    one_qubit_codebook, optimize_codebook, trace_distance, Codebook,
};

fn provided() -> Vec<Codebook> {
    let mut v: Vec<Codebook> = (1..=3).map(|n| one_qubit_codebook(n).unwrap()).collect();
    v.push(concat_codebook(vec![(vec![0, 2, 4], one_qubit_codebook(3).unwrap()), (vec![1, 3], one_qubit_codebook(2).unwrap())]).unwrap());
    v.push(duplicate_codebook(&one_qubit_codebook(2).unwrap(), 2).unwrap());
    v.push(optimize_codebook(3, 2, 7, 4, 150).unwrap());
    v
}

#[test]
fn every_code_beats_guessing_and_respects_nayak() {
    for c in provided() {
        let p = min_success(&c).unwrap();
        assert!(p > 0.5);
        assert!(nayak_check(c.n_bits(), c.m_qubits(), p).unwrap());
    }
}

#[test]
fn cube_codes_are_symmetric() {
    for n in 1..=3 {
        let c = one_qubit_codebook(n).unwrap();
        let expected = 0.5 * (1.0 + 1.0 / (n as f64).sqrt());
        for i in 0..n {
            assert!((helstrom_success(&c, i).unwrap() - expected).abs() < 1e-9);
        }
    }
}

#[test]
fn encoding_is_injective() {
    for c in provided() {
        let n = c.n_bits();
        let states: Vec<_> = (0..1usize << n).map(|x| encode(&c, &index_to_bits(x, n)).unwrap()).collect();
        for i in 0..states.len() {
            for j in i + 1..states.len() {
                assert!(trace_distance(&states[i], &states[j]) > 1e-9, "{i} {j}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn concatenated_blocks_keep_their_success(perm in Just((0..6).collect::<Vec<usize>>()).prop_shuffle(), split in 1usize..=3) {
        let first: Vec<usize> = perm[..split].to_vec();
        let second: Vec<usize> = perm[split..split + 3].to_vec();
        let rest: Vec<usize> = perm[split + 3..].to_vec();
        let mut parts = vec![(first.clone(), one_qubit_codebook(first.len()).unwrap()), (second.clone(), one_qubit_codebook(3).unwrap())];
        if !rest.is_empty() {
            parts.push((rest.clone(), one_qubit_codebook(rest.len()).unwrap()));
        }
        let c = concat_codebook(parts.clone()).unwrap();
        for (bits, sub) in &parts {
            for (k, &b) in bits.iter().enumerate() {
                prop_assert!((helstrom_success(&c, b).unwrap() - helstrom_success(sub, k).unwrap()).abs() < 1e-10);
            }
        }
    }
}
