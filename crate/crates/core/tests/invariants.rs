mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use specgan_core::analysis::{fit_pca2, project, separation_table, svm_accuracy, svm_train, SvmConfig};
use specgan_core::dataio::{normalize_reflectance, split, SplitAxis, SplitSpec};
use specgan_core::gan::init_networks;
use specgan_core::numerics::{dot, mlp_forward, Matrix, OutputActivation};
use specgan_core::{GanConfig, SpectraTable};

fn matrix(rows: usize, cols: usize, lo: f64, hi: f64) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(lo..hi, rows * cols).prop_map(move |v| Matrix::from_vec(rows, cols, v).unwrap())
}

/// Labeled grid table with coordinates; every third pixel unlabeled.
fn grid_table(side: u32, bands: usize, seed: u64) -> SpectraTable {
    let mut rng = common::rng(seed);
    let n = (side * side) as usize;
    let spectra = common::random_matrix(&mut rng, n, bands, 1.0);
    let labels = (0..n).map(|i| if i % 3 == 2 { 0 } else { (i % 2) as u16 + 1 }).collect();
    let coords = (0..side).flat_map(|r| (0..side).map(move |c| (r, c))).collect();
    SpectraTable::new(spectra, labels, Some(coords), 2, BTreeMap::new()).unwrap()
}

fn labeled_table(spectra: Matrix, labels: Vec<u16>, n_classes: u16) -> SpectraTable {
    SpectraTable::new(spectra, labels, None, n_classes, BTreeMap::new()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn forward_is_pure_and_finite(seed in any::<u64>(), x in matrix(5, 6, -1e3, 1e3)) {
        let net = common::random_net(&mut common::rng(seed), &[6, 9, 9, 3], OutputActivation::Sigmoid);
        let (a, _) = mlp_forward(&net, &x).unwrap();
        let (b, _) = mlp_forward(&net, &x).unwrap();
        prop_assert!(a.is_finite());
        prop_assert_eq!(a.as_slice(), b.as_slice());
    }

    #[test]
    fn random_split_is_a_disjoint_cover_of_labeled_rows(seed in any::<u64>(), fraction in 0.05f64..0.95) {
        let t = grid_table(9, 3, seed);
        let s = split(&t, &SplitSpec::RandomFraction { fraction, seed }).unwrap();
        let train: BTreeSet<_> = s.train_rows.iter().copied().collect();
        let test: BTreeSet<_> = s.test_rows.iter().copied().collect();
        prop_assert!(train.is_disjoint(&test));
        let union: Vec<_> = train.union(&test).copied().collect();
        prop_assert_eq!(union, t.labeled_indices());
    }

    #[test]
    fn spatial_split_partitions_every_pixel(seed in any::<u64>(), side in 3u32..12, by_row in any::<bool>()) {
        let t = grid_table(side, 2, seed);
        let axis = if by_row { SplitAxis::Row } else { SplitAxis::Column };
        let s = split(&t, &SplitSpec::spatial_halves(&t, axis).unwrap()).unwrap();
        let mut all: Vec<_> = s.train_rows.iter().chain(&s.test_rows).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..t.n_rows()).collect::<Vec<_>>());
        prop_assert!(s.train_rows.iter().all(|r| !s.test_rows.contains(r)));
    }

    #[test]
    fn normalization_is_idempotent_and_monotone(x in matrix(6, 4, -50.0, 5e4)) {
        let t = labeled_table(x, vec![0; 6], 0);
        let (once, _) = normalize_reflectance(&t).unwrap();
        let (twice, _) = normalize_reflectance(&once).unwrap();
        for (a, b) in once.spectra().as_slice().iter().zip(twice.spectra().as_slice()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        let raw = t.spectra().as_slice();
        let out = once.spectra().as_slice();
        for i in 0..raw.len() {
            for j in 0..raw.len() {
                if raw[i] < raw[j] {
                    prop_assert!(out[i] <= out[j]);
                }
            }
        }
    }

    #[test]
    fn generated_spectra_stay_in_unit_range(seed in any::<u64>(), class in 1u16..=3) {
        let cfg = GanConfig { latent_dim: 5, hidden_width: 12, seed, ..GanConfig::default() };
        let ckpt = init_networks(7, 3, &cfg).unwrap();
        let fake = ckpt.sample(class, 40, seed ^ 1).unwrap();
        prop_assert!(fake.spectra().as_slice().iter().all(|v| (0.0..=1.0).contains(v)));
        prop_assert!(fake.synthetic().iter().all(|&s| s));
    }

    #[test]
    fn pca_components_are_orthonormal_and_ordered(x in matrix(30, 5, -2.0, 2.0)) {
        let pca = fit_pca2(&x).unwrap();
        let (u, v) = (&pca.component_1, &pca.component_2);
        prop_assert!((dot(u, u) - 1.0).abs() < 1e-9);
        prop_assert!((dot(v, v) - 1.0).abs() < 1e-9);
        prop_assert!(dot(u, v).abs() < 1e-9);
        prop_assert!(pca.explained_variance.0 >= pca.explained_variance.1);

        let coords = project(&pca, &x).unwrap();
        let var = |c: usize| {
            let m = (0..coords.rows()).map(|r| coords.get(r, c)).sum::<f64>() / coords.rows() as f64;
            (0..coords.rows()).map(|r| (coords.get(r, c) - m).powi(2)).sum::<f64>() / coords.rows() as f64
        };
        prop_assert!(var(0) >= var(1) - 1e-9);
    }

    #[test]
    fn svm_accuracy_is_a_fraction(seed in any::<u64>(), x in matrix(24, 3, 0.0, 1.0)) {
        let labels = (0..24).map(|i| (i % 3) as u16 + 1).collect();
        let t = labeled_table(x, labels, 3);
        let model = svm_train(&t, &SvmConfig { seed, ..SvmConfig::default() }).unwrap();
        let acc = svm_accuracy(&model, &t).unwrap();
        prop_assert!((0.0..=1.0).contains(&acc));
    }

    #[test]
    fn separable_training_data_is_fit_exactly(seed in any::<u64>(), gap in 0.5f64..3.0) {
        let mut rng = common::rng(seed);
        let noise = common::random_matrix(&mut rng, 30, 2, 0.2);
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|i| {
                let shift = if i < 15 { -gap } else { gap };
                vec![noise.get(i, 0) + shift, noise.get(i, 1)]
            })
            .collect();
        let labels = (0..30).map(|i| if i < 15 { 1 } else { 2 }).collect();
        let t = labeled_table(Matrix::from_rows(&rows).unwrap(), labels, 2);
        let model = svm_train(&t, &SvmConfig { seed, ..SvmConfig::default() }).unwrap();
        prop_assert_eq!(svm_accuracy(&model, &t).unwrap(), 1.0);
    }

    #[test]
    fn identical_real_and_fake_give_a_symmetric_grid(seed in any::<u64>(), x in matrix(40, 3, 0.0, 1.0)) {
        let labels: Vec<u16> = (0..40).map(|i| (i % 2) as u16 + 1).collect();
        let t = labeled_table(x, labels, 2);
        let halves = split(&t, &SplitSpec::RandomFraction { fraction: 0.5, seed }).unwrap();
        let g = separation_table(&halves.train, &halves.test, &halves.train, &halves.test, &SvmConfig {
            seed,
            ..SvmConfig::default()
        })
        .unwrap();
        prop_assert_eq!(g.real_real, g.fake_fake);
        prop_assert_eq!(g.real_fake, g.fake_real);
    }
}
