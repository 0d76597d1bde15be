#![allow(clippy::needless_range_loop)]

use num::Zero;
use proptest::prelude::*;

use alc_engine::bgg1;
use alc_engine::classify;
use alc_engine::parabolic::ParabolicData;
use alc_engine::rational::{q, qf, Q};

fn pd(spec: &str) -> ParabolicData {
    classify::parabolic_data(spec).unwrap()
}

fn qv(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| q(x)).collect()
}

// Form on fundamental weights from the Cartan matrix: (w_i, w_j) = (A^-1)_{ji} d_j,
// with d the symmetrizer. Equal to the library's form up to one overall scale.
fn form_oracle(p: &ParabolicData, u: &[Q], v: &[Q]) -> Q {
    let rs = &p.rs;
    let l = rs.rank();
    let a: Vec<Vec<Q>> = (0..l).map(|i| (0..l).map(|j| q(rs.cartan[i][j])).collect()).collect();
    let inv = alc_engine::linalg::inverse(&a).unwrap();
    let mut s = Q::zero();
    for i in 0..l {
        for j in 0..l {
            s += &u[i] * &v[j] * &inv[j][i] * q(rs.symmetrizer[j]);
        }
    }
    s
}

#[test]
fn casimir_matches_cartan_matrix_oracle() {
    for spec in ["B3:x@1", "C3:x@2", "G2:x@2", "F4:x@3"] {
        let p = pd(spec);
        let r = p.rank();
        let mut e1 = vec![Q::zero(); r];
        e1[0] = q(1);
        let scale = p.rs.ip(&e1, &e1) / form_oracle(&p, &e1, &e1);
        let cas = |nu: &[Q]| -> Q {
            let sh: Vec<Q> = nu.iter().zip(&p.rho_prime).map(|(a, b)| a + b * q(2)).collect();
            form_oracle(&p, nu, &sh)
        };
        let lam: Vec<Q> = (0..r).map(|i| q(i as i64 % 3)).collect();
        let a: Vec<Q> = (0..r).map(|i| q(1 - i as i64)).collect();
        let mu: Vec<Q> = (0..r).map(|i| q(2 * i as i64 - 1)).collect();
        let want = (cas(&mu) - cas(&lam) - cas(&a)) * qf(1, 2) * scale;
        assert_eq!(bgg1::casimir_direct(&p, &lam, &mu, &a), want, "{spec}");
    }
}

// Projective structures: V_alpha (x) S^2 h has Cartan product with zero coefficient after the -2 w_1 twist.
#[test]
fn projective_central_weight() {
    for n in 2..=6 {
        let p = pd(&format!("A{n}:x@1"));
        let mut disp = vec![0i64; n];
        disp[n - 1] = 2;
        disp[0] = -2;
        let lam = qv(&disp);
        let (lam_levi, _) = p.central_projection(&lam);
        let va = bgg1::v_alpha_label(&p, 0);
        let mu = p.levi_part(&lam.iter().zip(&va).map(|(x, y)| x + y).collect::<Vec<_>>());
        let cw = bgg1::solve_central_weight(&p, &lam_levi, &[(0, mu)], &[]).unwrap();
        let full: Vec<Q> = lam_levi.iter().zip(&cw.weight).map(|(x, y)| x + y).collect();
        assert!(p.rs.ip(&full, &qv(&p.rs.simple_root_weight(0))).is_zero(), "A{n}");
    }
}

#[test]
fn conflicting_targets_are_reported() {
    let p = pd("A3:x@1");
    let lam = p.central_projection(&qv(&[0, 0, 2])).0;
    let t1 = p.levi_part(&qv(&[0, 1, 2]));
    let t2 = p.levi_part(&qv(&[0, 0, 1]));
    let r = bgg1::solve_central_weight(&p, &lam, &[(0, t1), (0, t2)], &[]);
    assert!(matches!(r, Err(alc_engine::EngineError::Consistency(_))), "{r:?}");
    let r = bgg1::solve_central_weight(&p, &lam, &[], &[]);
    assert!(matches!(r, Err(alc_engine::EngineError::Singular(_))));
}

fn spec() -> impl Strategy<Value = &'static str> {
    prop_oneof![Just("A4:x@2"), Just("B3:x@3"), Just("C4:x@1"), Just("D5:x@2,5"), Just("G2:x@1"), Just("F4:x@2,4")]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Casimir coefficient = Levi part + (lam^0, a^0) whenever mu^0 = lam^0 + a^0.
    #[test]
    fn casimir_split_form(s in spec(), l in proptest::collection::vec(-3i64..4, 5), a in proptest::collection::vec(-3i64..4, 5), d in proptest::collection::vec(-3i64..4, 5)) {
        let p = pd(s);
        let r = p.rank();
        let (lam, a, d) = (qv(&l[..r]), qv(&a[..r]), qv(&d[..r]));
        let delta = p.levi_part(&d);
        let mu: Vec<Q> = lam.iter().zip(&a).zip(&delta).map(|((x, y), z)| x + y + z).collect();
        let v = bgg1::casimir_coefficient(&p, &lam, &mu, &a).unwrap();
        prop_assert_eq!(&v.value, &(&v.levi_part + &v.central_part));
        let (_, l0) = p.central_projection(&lam);
        let (_, a0) = p.central_projection(&a);
        prop_assert_eq!(&v.central_part, &p.rs.ip(&p.central_to_weight(&l0), &p.central_to_weight(&a0)));
        // a central mismatch is rejected
        let mut off = mu.clone();
        off[p.sigma0[0]] += q(1);
        prop_assert!(bgg1::casimir_coefficient(&p, &lam, &off, &a).is_err());
    }
}
