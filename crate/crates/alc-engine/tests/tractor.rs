#![allow(clippy::needless_range_loop)]

use num::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use alc_engine::rational::{q, Q};
use alc_engine::tractor::{self, NilpotentParam, TractorS2V};

fn scaled(p: &NilpotentParam, s: &Q) -> NilpotentParam {
    NilpotentParam {
        x: p.x.iter().map(|v| v * s).collect(),
        y: p.y.iter().map(|r| r.iter().map(|v| v * s).collect()).collect(),
    }
}

fn sample(seed: u64, n: usize) -> (NilpotentParam, TractorS2V) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (tractor::random_param(&mut rng, n, 4), tractor::random_s2v(&mut rng, n, 4, true))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn fifth_iterate_vanishes(seed in any::<u64>(), n in 2usize..7) {
        let (p, f) = sample(seed, n);
        let it = tractor::iterates(&p, &f, 5).unwrap();
        prop_assert!(it[5].is_zero());
    }

    #[test]
    fn normal_solution_is_symmetric(seed in any::<u64>(), n in 2usize..6) {
        let (p, f) = sample(seed, n);
        let eta = tractor::normal_solution(&p, &f).unwrap();
        for a in 0..n {
            for b in 0..n {
                prop_assert_eq!(&eta[a][b], &eta[b][a]);
            }
        }
    }

    // exp(sX) exp(tX) = exp((s+t)X) along a ray in the nilradical.
    #[test]
    fn exponential_is_a_one_parameter_group(seed in any::<u64>(), n in 2usize..6, s in -4i64..5, t in -4i64..5) {
        let (p, f) = sample(seed, n);
        let (s, t) = (q(s), q(t));
        let lhs = tractor::exp_action(&scaled(&p, &s), &tractor::exp_action(&scaled(&p, &t), &f).unwrap()).unwrap();
        let rhs = tractor::exp_action(&scaled(&p, &(&s + &t)), &f).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn action_is_linear(seed in any::<u64>(), n in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = tractor::random_param(&mut rng, n, 4);
        let f = tractor::random_s2v(&mut rng, n, 4, false);
        let g = tractor::random_s2v(&mut rng, n, 4, false);
        let mut sum = f.clone();
        sum.axpy(&Q::one(), &g);
        let mut rhs = tractor::nilpotent_action(&p, &f).unwrap();
        rhs.axpy(&Q::one(), &tractor::nilpotent_action(&p, &g).unwrap());
        prop_assert_eq!(tractor::nilpotent_action(&p, &sum).unwrap(), rhs);
    }

    // The displayed polynomial and the exponential differ exactly in the
    // coefficient of x^a x^b psi^c_c.
    #[test]
    fn closed_form_residual(seed in any::<u64>(), n in 2usize..6) {
        let (p, f) = sample(seed, n);
        let eta = tractor::normal_solution(&p, &f).unwrap();
        let mut c = tractor::closed_form_coefficients();
        c[5] = q(1);
        prop_assert_eq!(&eta, &tractor::closed_form_with(&p, &f, &c));
        let disp = tractor::closed_form(&p, &f);
        let tr = f.trace_psi() / q(2);
        for a in 0..n {
            for b in 0..n {
                prop_assert_eq!(&eta[a][b] - &disp[a][b], &p.x[a] * &p.x[b] * &tr);
            }
        }
    }
}

#[test]
fn zero_parameter_is_identity() {
    let (p, f) = sample(3, 4);
    let zero = scaled(&p, &Q::zero());
    assert_eq!(tractor::exp_action(&zero, &f).unwrap(), f);
    assert_eq!(tractor::normal_solution(&zero, &f).unwrap(), f.nu);
}

#[test]
fn fitted_coefficients_are_stable() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a = tractor::fit_coefficients(&mut rng, 3, 6).unwrap().unwrap();
    let b = tractor::fit_coefficients(&mut rng, 5, 6).unwrap().unwrap();
    assert_eq!(a, b);
    let shown = tractor::closed_form_coefficients();
    let differ: Vec<usize> = (0..9).filter(|&i| a[i] != shown[i]).collect();
    assert_eq!(differ, vec![5]);
}

#[test]
fn mismatched_sizes_are_rejected() {
    let (p, _) = sample(1, 3);
    let (_, f) = sample(1, 4);
    assert!(tractor::nilpotent_action(&p, &f).is_err());
}
