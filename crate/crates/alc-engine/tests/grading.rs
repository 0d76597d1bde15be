use proptest::prelude::*;

use alc_engine::classify;
use alc_engine::parabolic;

fn growth(spec: &str) -> Vec<usize> {
    classify::parabolic_data(spec).unwrap().growth_vector()
}

// Hand counts of roots by crossed height.
#[test]
fn known_growth_vectors() {
    assert_eq!(growth("A5:x@1"), vec![5]);
    assert_eq!(growth("A5:x@1,2"), vec![5, 9]);
    assert_eq!(growth("C4:x@1"), vec![6, 7]);
    assert_eq!(growth("B3:x@3"), vec![3, 6]);
    assert_eq!(growth("G2:x@1"), vec![2, 3, 5]);
    assert_eq!(growth("E6:x@1"), vec![16]);
    // contact grading of G2 at the long node
    assert_eq!(growth("G2:x@2"), vec![4, 5]);
}

#[test]
fn render_marks_crosses() {
    let pd = classify::parabolic_data("G2:x@1").unwrap();
    let pic = parabolic::render(&pd, None);
    assert!(pic.contains('x'), "{pic}");
}

#[test]
fn automorphisms_of_d4() {
    let rs = classify::parabolic_data("D4:x@1").unwrap().rs;
    assert_eq!(parabolic::diagram_automorphisms(&rs).len(), 6);
    let (c, autos) = parabolic::canonical_sigma0(&rs, &[3]);
    assert_eq!(c, vec![0]);
    // stabilizer of node 1 swaps the two spin nodes
    assert_eq!(autos.len(), 2);
}

fn diagram() -> impl Strategy<Value = String> {
    (0usize..7, 1usize..4, any::<u64>()).prop_map(|(f, r, bits)| {
        let (t, l) = match f {
            0 => ("A", 2 + r),
            1 => ("B", 2 + r),
            2 => ("C", 2 + r),
            3 => ("D", 3 + r),
            4 => ("E", 5 + r),
            5 => ("F", 4),
            _ => ("G", 2),
        };
        let mut nodes: Vec<usize> = (0..l).filter(|i| bits >> i & 1 == 1).map(|i| i + 1).collect();
        if nodes.is_empty() {
            nodes.push(1 + (bits as usize >> 8) % l);
        }
        let n: Vec<String> = nodes.iter().map(|x| x.to_string()).collect();
        format!("{t}{l}:x@{}", n.join(","))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // g = g_- + g_0 + g_+ with g_{-k} and g_k of equal dimension.
    #[test]
    fn grading_dimensions_add_up(spec in diagram()) {
        let pd = classify::parabolic_data(&spec).unwrap();
        let neg: usize = pd.grading.values().sum();
        prop_assert_eq!(2 * neg + pd.dim_g0(), pd.dynkin().dim());
        prop_assert_eq!(*pd.growth_vector().last().unwrap(), neg);
        prop_assert_eq!(pd.grading.len(), pd.depth);
        // the socle g_{-1} carries one simple root per cross
        prop_assert!(pd.grading[&1] >= pd.sigma0.len());
    }

    // Central and Levi parts recombine.
    #[test]
    fn central_projection_splits(spec in diagram(), w in proptest::collection::vec(-3i64..4, 8)) {
        let pd = classify::parabolic_data(&spec).unwrap();
        let w: Vec<_> = w[..pd.rank()].iter().map(|&x| alc_engine::rational::q(x)).collect();
        let (levi, c) = pd.central_projection(&w);
        let back: Vec<_> = levi.iter().zip(pd.central_to_weight(&c)).map(|(a, b)| a + b).collect();
        prop_assert_eq!(&back, &w);
        for b in &pd.central_basis {
            prop_assert!(num::Zero::is_zero(&pd.rs.ip(&levi, b)));
        }
    }
}
