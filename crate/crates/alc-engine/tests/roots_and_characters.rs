use std::sync::Arc;

use proptest::prelude::*;

use alc_engine::charalg;
use alc_engine::parabolic::{self, ParabolicData};
use alc_engine::rootsys::{build_root_system, DynkinType, Family};

fn pd(spec: &str) -> ParabolicData {
    let (t, s) = parabolic::parse_diagram(spec).unwrap();
    parabolic::grading(Arc::new(build_root_system(t).unwrap()), &s).unwrap()
}

// Dimensions of the simple Lie algebras, from the classification tables.
#[test]
fn algebra_dimensions() {
    let known = [
        (Family::A, 1, 3),
        (Family::A, 5, 35),
        (Family::B, 3, 21),
        (Family::C, 4, 36),
        (Family::D, 5, 45),
        (Family::E, 6, 78),
        (Family::E, 7, 133),
        (Family::E, 8, 248),
        (Family::F, 4, 52),
        (Family::G, 2, 14),
    ];
    for (f, l, dim) in known {
        let t = DynkinType::new(f, l).unwrap();
        let rs = build_root_system(t).unwrap();
        assert_eq!(2 * rs.positive_roots.len() + l, dim, "{t}");
    }
}

#[test]
fn bad_types_are_rejected() {
    assert!(DynkinType::new(Family::D, 3).is_err());
    assert!(DynkinType::new(Family::E, 9).is_err());
    assert!(parabolic::parse_diagram("A3:x@4").is_err());
    assert!(parabolic::parse_diagram("A3").is_err());
}

// Levi modules of A_4 crossed at 1 are sl_4 modules; hook-length dimensions.
#[test]
fn freudenthal_dimensions_match_hook_formula() {
    let p = pd("A4:x@1");
    // fundamental sl_4 modules: 4, 6, 4; adjoint 15; S^2 of standard 10
    for (lam, d) in [([0, 1, 0, 0], 4), ([0, 0, 1, 0], 6), ([0, 1, 0, 1], 15), ([0, 2, 0, 0], 10), ([3, 0, 1, 1], 20)] {
        let ch = charalg::freudenthal(&p, &lam).unwrap();
        assert_eq!(charalg::character_dim(&ch), d, "{lam:?}");
        assert_eq!(p.levi_dim(&lam), d);
    }
}

#[test]
fn dual_character_negates_weights() {
    let p = pd("B3:x@1");
    let ch = charalg::freudenthal(&p, &[0, 1, 0]).unwrap();
    let du = charalg::dual_character(&ch);
    for (w, m) in ch.iter() {
        let neg: Vec<i64> = w.iter().map(|x| -x).collect();
        assert_eq!(du.get(&neg), Some(m));
    }
}

#[test]
fn not_dominant_is_an_error() {
    let p = pd("A4:x@1");
    assert!(charalg::freudenthal(&p, &[0, -1, 0, 0]).is_err());
}

fn small_weight(len: usize) -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::vec(0i64..3, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // dim(V x W) = dim V dim W, and every component is Levi dominant.
    #[test]
    fn tensor_dimensions_multiply(a in small_weight(3), b in small_weight(3), spec in prop_oneof![
        Just("B4:x@1"), Just("C4:x@1"), Just("A4:x@1"), Just("G2:x@1")
    ]) {
        let p = pd(spec);
        let fix = |w: &[i64]| -> Vec<i64> {
            let mut out = vec![0; p.rank()];
            for (i, &j) in p.levi.iter().enumerate() {
                out[j] = w[i % w.len()];
            }
            out[p.sigma0[0]] = w[0] - 1;
            out
        };
        let (la, lb) = (fix(&a), fix(&b));
        let d = charalg::tensor_decompose(&p, &la, &lb).unwrap();
        prop_assert_eq!(d.dim(&p), p.levi_dim(&la) * p.levi_dim(&lb));
        for l in d.entries.keys() {
            prop_assert!(p.is_levi_dominant(&l.weight));
        }
    }

    // The Weyl formula and Freudenthal's recursion agree on the full Levi.
    #[test]
    fn weyl_dimension_matches_freudenthal(w in small_weight(4), spec in prop_oneof![
        Just("D5:x@5"), Just("F4:x@1"), Just("E6:x@1"), Just("C5:x@5")
    ]) {
        let p = pd(spec);
        let mut lam = vec![0; p.rank()];
        for (i, &j) in p.levi.iter().enumerate() {
            lam[j] = w[i % 4] % 2;
        }
        let ch = charalg::freudenthal(&p, &lam).unwrap();
        prop_assert_eq!(charalg::character_dim(&ch), p.levi_dim(&lam));
    }
}
