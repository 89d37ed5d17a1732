use aqec_core::channel::{amplitude_damping_set, pauli_kraus_set};
use aqec_core::code::{builtin, leung4, perfect5, repetition, shor9};
use aqec_core::combinatorics::multinomial;
use aqec_core::connection::{
    build_connection, compressed_connection, compression_matrix, f_kernel, macwilliams_matrix, reduced_aux,
};
use aqec_core::enumerator::{aqec_residuals, aux_vector, compute_enumerators, compute_sl_enumerators, pi_phi, pi_vector};
use aqec_core::pauli::{enumerate_by_weight, group_size};
use aqec_core::OrbitClass;
use aqec_validation::{max_abs_diff, random_code, random_dicke};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `F` summed by brute force over Pauli errors of weight `i`, using
/// `E sigma E^dag = +-sigma` and `tr(sigma tau) = 2^n delta`.
fn f_brute(i: usize, class: &OrbitClass, n: usize) -> f64 {
    let rep = class.representative();
    let signed: i64 = enumerate_by_weight(n, i)
        .unwrap()
        .map(|e| e.commutation_sign(&rep).unwrap() as i64)
        .sum();
    class.size() as f64 * signed as f64 / 2f64.powi(n as i32)
}

#[test]
fn f_kernel_matches_brute_force() {
    for n in 1..=7 {
        for class in OrbitClass::all(n) {
            for i in 0..=n {
                let want = f_brute(i, &class, n);
                let got = f_kernel(i, class.x, class.y, class.z, n).unwrap();
                assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0), "n={n} i={i} {class:?}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn compressed_a_rows_are_orbit_sizes() {
    for n in 1..=8 {
        let cc = compressed_connection(n).unwrap();
        for (k, c) in cc.classes.iter().enumerate() {
            for i in 0..=n {
                let want = if i == c.weight() {
                    multinomial(n as u64, c.x as u64, c.y as u64, c.z as u64).unwrap() as f64
                } else {
                    0.0
                };
                assert_eq!(cc.h_a[(i, k)], want);
            }
        }
    }
}

#[test]
fn compression_reproduces_full_aux() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 1..=6 {
        let code = random_dicke(&mut rng, n, 1 + n % 3, false).to_code().unwrap();
        let w = compression_matrix(n).unwrap();
        let lifted = w.mul_vec(&pi_phi(&code).unwrap()).unwrap();
        let full = aux_vector(&code).unwrap();
        assert!(max_abs_diff(&lifted, full.values()) < 1e-9, "n={n}");
    }
}

#[test]
fn connection_reproduces_sl_enumerators() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=3 {
        for m in 1..=2 {
            let code = random_code(&mut rng, n, m);
            let cm = build_connection(&pauli_kraus_set(n, n).unwrap()).unwrap();
            let aux = reduced_aux(aux_vector(&code).unwrap().values());
            let sl = compute_sl_enumerators(&code).unwrap();
            let mf = m as f64;
            let a: Vec<f64> = cm.m_a.mul_vec(&aux).unwrap().iter().map(|v| v / (mf * mf)).collect();
            let b: Vec<f64> = cm.m_b.mul_vec(&aux).unwrap().iter().map(|v| v / mf).collect();
            assert!(max_abs_diff(&a, &sl.a) < 1e-9);
            assert!(max_abs_diff(&b, &sl.b) < 1e-9);
        }
    }
}

#[test]
fn macwilliams_holds_for_builtins() {
    for code in [leung4(), perfect5(), shor9(), repetition(3).unwrap(), builtin("repetition(5)").unwrap()] {
        let n = code.num_qubits();
        let sl = compute_sl_enumerators(&code).unwrap();
        let mw = macwilliams_matrix(n, code.dimension() as f64).unwrap();
        let b = &mw * nalgebra::DVector::from_vec(sl.a.clone());
        assert!(max_abs_diff(b.as_slice(), &sl.b) < 1e-9, "n={n}");
    }
}

#[test]
fn pauli_partition_sums_to_group() {
    for n in 1..=4 {
        let ks = pauli_kraus_set(n, n).unwrap();
        assert_eq!(ks.class_sizes().iter().sum::<usize>(), group_size(n));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gap_and_connection_on_random_codes(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=3, gamma in 0.01f64..0.99) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = m.min(1 << n);
        let code = random_code(&mut rng, n, m);
        let ks = amplitude_damping_set(n, gamma).unwrap();
        let e = compute_enumerators(&code, &ks).unwrap();
        let r = aqec_residuals(&code, &ks).unwrap();
        prop_assert!(max_abs_diff(&e.differences(), &r) < 1e-9);
        let cm = build_connection(&ks).unwrap();
        let aux = reduced_aux(aux_vector(&code).unwrap().values());
        let mf = m as f64;
        let a: Vec<f64> = cm.m_a.mul_vec(&aux).unwrap().iter().map(|v| v / (mf * mf)).collect();
        let b: Vec<f64> = cm.m_b.mul_vec(&aux).unwrap().iter().map(|v| v / mf).collect();
        prop_assert!(max_abs_diff(&a, &e.a) < 1e-9);
        prop_assert!(max_abs_diff(&b, &e.b) < 1e-9);
    }

    #[test]
    fn compression_on_random_dicke_codes(seed in any::<u64>(), n in 1usize..=7, m in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = m.min(n + 1);
        let code = random_dicke(&mut rng, n, m, false).to_code().unwrap();
        let sl = compute_sl_enumerators(&code).unwrap();
        let cc = compressed_connection(n).unwrap();
        let pi = nalgebra::DVector::from_vec(pi_vector(&code).unwrap().values().to_vec());
        let mf = m as f64;
        let a = &cc.h_a * &pi / (mf * mf);
        let b = &cc.h_b * &pi / mf;
        prop_assert!(max_abs_diff(a.as_slice(), &sl.a) < 1e-8);
        prop_assert!(max_abs_diff(b.as_slice(), &sl.b) < 1e-8);
    }
}
