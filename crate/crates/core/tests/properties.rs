use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use finqm::cyclic::EigenRange;
use finqm::dynamics::{evolve_oscillator, oscillator_generator};
use finqm::heisenberg::{schrodinger_matrix, HeisenbergElement};
use finqm::io::{parse_state_json, StateFile};
use finqm::metaplectic::weil;
use finqm::oracle::JacobiElement;
use finqm::sl2::{decompose, Sl2};
use finqm::wigner::{fourier_wigner, heisenberg_covariance_check, wigner, StateVector};
use finqm::{Cyclotomic, PrimeField, Scalar};

const PRIMES: [u64; 5] = [3, 5, 7, 11, 13];

fn setup(seed: u64, idx: usize) -> (PrimeField, ChaCha8Rng) {
    (PrimeField::new(PRIMES[idx]).unwrap(), ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decomposition_reproduces_matrix(seed in any::<u64>(), idx in 0usize..5) {
        let (f, mut rng) = setup(seed, idx);
        let g = Sl2::random(f, &mut rng);
        prop_assert_eq!(decompose(&g).evaluate(f).unwrap(), g);
    }

    #[test]
    fn weil_is_unitary_homomorphism(seed in any::<u64>(), idx in 0usize..4, w in 1i64..13) {
        let (f, mut rng) = setup(seed, idx);
        let omega = f.elem(w);
        prop_assume!(!omega.is_zero());
        let (g1, g2) = (Sl2::random(f, &mut rng), Sl2::random(f, &mut rng));
        let w1 = weil::<Complex64>(&g1, omega).unwrap().matrix;
        let w2 = weil::<Complex64>(&g2, omega).unwrap().matrix;
        let w12 = weil::<Complex64>(&g1.mul(&g2), omega).unwrap().matrix;
        prop_assert!(w1.matmul(&w2).max_residual(&w12) < 1e-9);
        prop_assert!(w1.unitarity_residual() < 1e-9);
    }

    #[test]
    fn schrodinger_is_a_representation(seed in any::<u64>(), idx in 0usize..5, w in 1i64..13) {
        let (f, mut rng) = setup(seed, idx);
        let omega = f.elem(w);
        prop_assume!(!omega.is_zero());
        let (x, y) = (HeisenbergElement::random(f, &mut rng), HeisenbergElement::random(f, &mut rng));
        let ux = schrodinger_matrix::<Complex64>(&x, omega).unwrap();
        let uy = schrodinger_matrix::<Complex64>(&y, omega).unwrap();
        let uxy = schrodinger_matrix::<Complex64>(&x.mul(&y), omega).unwrap();
        prop_assert!(ux.matmul(&uy).max_residual(&uxy) < 1e-9);
    }

    #[test]
    fn jacobi_product_matches_matrix_model(seed in any::<u64>(), idx in 0usize..5) {
        let (f, mut rng) = setup(seed, idx);
        let (a, b) = (JacobiElement::random(f, &mut rng), JacobiElement::random(f, &mut rng));
        let (ma, mb) = (a.to_matrix(), b.to_matrix());
        let mut prod = [[f.zero(); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    prod[i][j] += ma[i][k] * mb[k][j];
                }
            }
        }
        prop_assert_eq!(JacobiElement::from_matrix(&prod).unwrap(), a.mul(&b));
        prop_assert_eq!(a.mul(&a.inverse()), JacobiElement::identity(f));
    }

    #[test]
    fn wigner_marginals_and_fourier_transform(seed in any::<u64>(), idx in 0usize..5) {
        let (f, mut rng) = setup(seed, idx);
        let n = f.modulus() as f64;
        let st = StateVector::random(f.one(), &mut rng).unwrap();
        let t = wigner(&st);
        prop_assert!(t.imag_residual() < 1e-12);
        for (r, m) in t.position_marginal().iter().enumerate() {
            prop_assert!((m - n * st.amplitudes()[r].norm_sqr()).norm() < 1e-10);
        }
        // A(q, p) = (1/N) sum_{r,s} e(rq + sp) W(r, s)
        let a = fourier_wigner(&st);
        for q in f.elements() {
            for p in f.elements() {
                let want = t.pair(|r, s| finqm::scalar::char_fe(r * q + s * p));
                prop_assert!((a.get(q, p) - want).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn heisenberg_shifts_phase_space(seed in any::<u64>(), idx in 0usize..5) {
        let (f, mut rng) = setup(seed, idx);
        let st = StateVector::random(f.elem(2), &mut rng).unwrap();
        let h = HeisenbergElement::random(f, &mut rng);
        prop_assert!(heisenberg_covariance_check(&h, &st).unwrap() < 1e-10);
    }

    #[test]
    fn oscillator_orbit_closes(seed in any::<u64>(), idx in 0usize..3) {
        let (f, mut rng) = setup(seed, idx);
        let g = oscillator_generator(f, None).unwrap();
        let st = StateVector::random(f.one(), &mut rng).unwrap();
        let (end, traj) = evolve_oscillator(&st, &g, g.order, EigenRange::Canonical).unwrap();
        prop_assert!(end.max_residual(&st) < 1e-9);
        prop_assert_eq!(traj.len() as u64, g.order + 1);
        let n0 = st.norm_sqr().re;
        for s in &traj {
            let nn: f64 = s.amplitudes.iter().map(|[re, im]| re * re + im * im).sum();
            prop_assert!((nn - n0).abs() < 1e-10);
        }
    }

    #[test]
    fn state_files_round_trip(seed in any::<u64>(), idx in 0usize..5) {
        let (f, mut rng) = setup(seed, idx);
        let st = StateVector::random(f.elem(-1), &mut rng).unwrap();
        let text = serde_json::to_string(&StateFile::from_state(&st)).unwrap();
        let back = parse_state_json(&text, true).unwrap();
        prop_assert_eq!(back.omega(), st.omega());
        prop_assert!(back.max_residual(&st) == 0.0);
    }
}

#[test]
fn exact_and_float_backends_agree() {
    let f = PrimeField::new(5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..10 {
        let g = Sl2::random(f, &mut rng);
        let we = weil::<Cyclotomic>(&g, f.elem(3)).unwrap().matrix.to_complex();
        let wf = weil::<Complex64>(&g, f.elem(3)).unwrap().matrix;
        assert!(we.max_residual(&wf) < 1e-12);
        let st = StateVector::<Cyclotomic>::random_integer(f.elem(3), &mut rng, 3).unwrap();
        let te = wigner(&st);
        let tf = wigner(&st.to_complex());
        for (a, b) in te.values().iter().zip(tf.values()) {
            assert!((a.to_complex() - b).norm() < 1e-10);
        }
    }
}
