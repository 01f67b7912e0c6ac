use ndarray::Array2;
use proptest::prelude::*;

use rsgda::filters::{high_pass_unscaled, low_pass_unscaled, structure_laplacian};
use rsgda::graph::hop_homophily;
use rsgda::io::{generate_synthetic, SyntheticSpec};
use rsgda::model::losses::{
    alignment_loss, correlation_reduction_loss, cross_entropy, kl_divergence, reconstruction_loss, softmax_rows,
};
use rsgda::reconstruct::{reconstruct, sparsify_top_k, HomophilicSolveConfig};
use rsgda::{Graph, GraphMatrix};

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Array2<f64>> {
    prop::collection::vec(-5.0..5.0f64, rows * cols).prop_map(move |v| Array2::from_shape_vec((rows, cols), v).unwrap())
}

fn small_graph() -> impl Strategy<Value = Graph> {
    (4usize..14, 0.0..1.0f64, 0u64..1000).prop_map(|(n, h, seed)| {
        generate_synthetic(&SyntheticSpec {
            n,
            classes: 2,
            dim: 3,
            homophily: h,
            mean_degree: 2.0,
            seed,
            ..SyntheticSpec::default()
        })
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reconstructed_structures_keep_their_invariants(g in small_graph(), topk in 1usize..4) {
        let s = reconstruct(&g, &HomophilicSolveConfig { outer_iters: 3, ..Default::default() }, topk).unwrap();
        prop_assert!(s.validate(topk).is_ok(), "{:?}", s.validate(topk));
        prop_assert_eq!(s.a_e.max_abs_asymmetry(), 0.0);
        let thresholded = sparsify_top_k(&s.a_o, topk);
        for i in 0..g.n() {
            prop_assert!(thresholded.get(i, i) == 0.0);
        }
        prop_assert!(thresholded.nnz() <= 2 * topk * g.n());
    }

    #[test]
    fn filters_are_linear_in_features(g in small_graph(), k in 0usize..4, alpha in -3.0..3.0f64, seed in 0u64..100) {
        let l = structure_laplacian(g.adjacency()).unwrap();
        let x = g.features().clone();
        let y = x.mapv(|v| (v * 7.0 + seed as f64).sin());
        let combo = &x * alpha + &y;
        for f in [low_pass_unscaled, high_pass_unscaled] {
            let lhs = f(&l, combo.view(), k);
            let rhs = f(&l, x.view(), k) * alpha + f(&l, y.view(), k);
            let gap = (&lhs - &rhs).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            prop_assert!(gap < 1e-9, "gap {}", gap);
        }
    }

    #[test]
    fn laplacian_spectrum_stays_in_unit_band(g in small_graph()) {
        // eigenvalues of the self-loop normalized Laplacian lie in [0, 2)
        let l = structure_laplacian(g.adjacency()).unwrap().to_dense();
        let n = l.nrows();
        let eig = nalgebra::SymmetricEigen::new(nalgebra::DMatrix::from_fn(n, n, |i, j| l[[i, j]]));
        for &v in eig.eigenvalues.iter() {
            prop_assert!(v > -1e-12 && v < 2.0, "eigenvalue {}", v);
        }
    }

    #[test]
    fn loss_terms_are_nonnegative(
        he in matrix(6, 4), ho in matrix(6, 4), he_t in matrix(5, 4), ho_t in matrix(5, 4),
        target in matrix(6, 3), decoded in matrix(6, 3), beta in 1.0..4.0f64,
    ) {
        prop_assert!(correlation_reduction_loss(he.view(), ho.view()) >= 0.0);
        prop_assert!(reconstruction_loss(target.view(), decoded.view(), beta) >= 0.0);
        prop_assert!(alignment_loss(he.view(), he_t.view(), ho.view(), ho_t.view()) >= 0.0);
        let labels: Vec<usize> = (0..6).map(|i| i % 4).collect();
        prop_assert!(cross_entropy(he.view(), &labels) >= 0.0);
    }

    #[test]
    fn softmax_rows_are_distributions(x in matrix(4, 5)) {
        let p = softmax_rows(x.view());
        for row in p.rows() {
            prop_assert!((row.sum() - 1.0).abs() < 1e-12);
            prop_assert!(row.iter().all(|&v| v > 0.0));
        }
        prop_assert!(kl_divergence(p.row(0), p.row(0)).abs() < 1e-12);
        prop_assert!(kl_divergence(p.row(0), p.row(1)) >= 0.0);
    }

    #[test]
    fn top_k_keeps_at_most_k_selections_per_row(entries in prop::collection::vec((0usize..8, 0usize..8, 0.01..1.0f64), 1..40), k in 1usize..4) {
        let a = GraphMatrix::from_triplets(8, entries.into_iter().filter(|(i, j, _)| i != j).collect());
        let s = sparsify_top_k(&a, k);
        prop_assert_eq!(s.max_abs_asymmetry(), 0.0);
        prop_assert!(s.nnz() <= 2 * k * 8);
        prop_assert!(s.triplets().iter().all(|t| t.2 == 1.0 && t.0 != t.1));
    }
}

#[test]
fn generator_homophily_is_monotone_in_h() {
    let mut previous = -1.0;
    for h in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let mean = (0..10u64)
            .map(|seed| {
                let g = generate_synthetic(&SyntheticSpec { homophily: h, seed, ..SyntheticSpec::default() }).unwrap();
                hop_homophily(&g, 1).unwrap()
            })
            .sum::<f64>()
            / 10.0;
        assert!(mean >= previous, "h={h}: {mean} < {previous}");
        previous = mean;
    }
}
