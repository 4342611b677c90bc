use std::sync::Arc;

use proptest::prelude::*;

use emtauc::analysis::spearman_rho;
use emtauc::auc::{auc_metric, decision_values, evaluate, loss_fraction, pairwise_loss_count, Weights};
use emtauc::data::{
    class_sample_size, parse_libsvm_str, scale_features, stratified_kfold, stratified_sample, Dataset, DatasetView,
    Instance, Label,
};
use emtauc::env::{CostLedger, SamplingRate, TaskId};

/// Sparse instances with increasing indices, both classes present.
fn dataset_strategy(max_n: usize, max_dim: u32) -> impl Strategy<Value = Dataset> {
    let value = prop_oneof![
        (-8i32..=8).prop_map(|v| v as f64 / 4.0),
        -1e3f64..1e3,
    ];
    let instance = (
        proptest::collection::btree_map(1..=max_dim, value, 0..max_dim as usize),
        any::<bool>(),
    )
        .prop_map(|(features, pos)| Instance {
            features: features.into_iter().collect(),
            label: if pos { Label::Positive } else { Label::Negative },
        });
    proptest::collection::vec(instance, 2..max_n).prop_filter_map("needs both classes", move |mut inst| {
        inst[0].label = Label::Positive;
        inst[1].label = Label::Negative;
        Dataset::new(inst, max_dim as usize).ok()
    })
}

fn oracle_losses(fp: &[f64], fn_: &[f64]) -> u64 {
    let mut n = 0;
    for &p in fp {
        for &q in fn_ {
            if p <= q {
                n += 1;
            }
        }
    }
    n
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn libsvm_round_trip(ds in dataset_strategy(30, 6)) {
        let back = parse_libsvm_str(&ds.to_libsvm()).unwrap();
        prop_assert_eq!(back.instances(), ds.instances());
    }

    #[test]
    fn scaling_is_idempotent_and_bounded(ds in dataset_strategy(30, 6)) {
        let once = scale_features(&ds);
        let twice = scale_features(&once);
        prop_assert_eq!(&once, &twice);
        for inst in once.instances() {
            for &(_, v) in &inst.features {
                prop_assert!((-1.0..=1.0).contains(&v) && v != 0.0);
            }
        }
    }

    #[test]
    fn loss_count_matches_double_loop(
        fp in proptest::collection::vec(-5i32..5, 1..60),
        fn_ in proptest::collection::vec(-5i32..5, 1..60),
    ) {
        let fp: Vec<f64> = fp.into_iter().map(f64::from).collect();
        let fn_: Vec<f64> = fn_.into_iter().map(f64::from).collect();
        prop_assert_eq!(pairwise_loss_count(&fp, &fn_).unwrap(), oracle_losses(&fp, &fn_));
    }

    #[test]
    fn auc_complements_loss_and_ignores_scale(
        ds in dataset_strategy(40, 5),
        w in proptest::collection::vec(-1.0f64..1.0, 5),
    ) {
        let view = DatasetView::full(Arc::new(ds));
        let w = Weights(w);
        let auc = auc_metric(&w, &view).unwrap();
        let loss = loss_fraction(&w, &view).unwrap();
        prop_assert!((auc + loss - 1.0).abs() <= f64::EPSILON);
        prop_assert!((0.0..=1.0).contains(&auc));
        let (fp, fn_) = decision_values(&w, &view).unwrap();
        let e = evaluate(&w, &view, 0.125).unwrap();
        prop_assert_eq!(e.loss_count, oracle_losses(&fp, &fn_));
        prop_assert_eq!(e.pairs, (fp.len() * fn_.len()) as u64);
        // Powers of two scale every product exactly.
        for c in [0.25, 1.0, 1024.0] {
            prop_assert_eq!(auc_metric(&w.scaled(c), &view).unwrap(), auc);
        }
    }

    #[test]
    fn spearman_symmetric_and_rank_based(
        pairs in proptest::collection::vec((-100i32..100, -100i32..100), 3..40),
    ) {
        let a: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
        let b: Vec<f64> = pairs.iter().map(|p| p.1 as f64).collect();
        let (Ok(ab), Ok(ba)) = (spearman_rho(&a, &b), spearman_rho(&b, &a)) else {
            return Ok(()); // a constant column
        };
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!((-1.0..=1.0).contains(&ab));
        let ta: Vec<f64> = a.iter().map(|x| (x / 50.0).exp()).collect();
        let tb: Vec<f64> = b.iter().map(|x| x * x * x + 7.0).collect();
        prop_assert!((spearman_rho(&ta, &tb).unwrap() - ab).abs() < 1e-12);
    }

    #[test]
    fn stratified_sample_keeps_class_sizes(
        ds in dataset_strategy(60, 3),
        rate in prop_oneof![Just(0.1), Just(0.25), Just(0.5), Just(1.0)],
        seed in any::<u64>(),
    ) {
        let ds = Arc::new(ds);
        let v = stratified_sample(&ds, rate, seed).unwrap();
        prop_assert_eq!(v.n_pos(), class_sample_size(rate, ds.positives().len()));
        prop_assert_eq!(v.n_neg(), class_sample_size(rate, ds.negatives().len()));
        prop_assert!(v.positives().iter().all(|&i| ds.instance(i).label == Label::Positive));
        prop_assert!(v.negatives().iter().all(|&i| ds.instance(i).label == Label::Negative));
        let again = stratified_sample(&ds, rate, seed).unwrap();
        prop_assert_eq!(again.selected(), v.selected());
    }

    #[test]
    fn kfold_partitions_each_class_evenly(ds in dataset_strategy(80, 2), k in 2usize..6, seed in any::<u64>()) {
        prop_assume!(ds.positives().len() >= k && ds.negatives().len() >= k);
        let split = stratified_kfold(&ds, k, seed).unwrap();
        let mut seen = vec![0; ds.len()];
        for f in 0..k {
            let test = split.test_indices(f);
            let train = split.train_indices(f);
            prop_assert_eq!(test.len() + train.len(), ds.len());
            for &i in &test {
                seen[i] += 1;
            }
            for class in [ds.positives(), ds.negatives()] {
                let in_fold = test.iter().filter(|i| class.contains(i)).count();
                prop_assert!(in_fold == class.len() / k || in_fold == class.len() / k + 1);
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn ledger_spend_is_exact(
        rate in prop_oneof![Just(0.1), Just(0.2), Just(0.5), Just(1.0)],
        order in proptest::collection::vec(any::<bool>(), 0..400),
    ) {
        let s = SamplingRate::new(rate).unwrap();
        let mut ledger = CostLedger::new(1e9, s).unwrap();
        for &expensive in &order {
            ledger.charge(if expensive { TaskId::Expensive } else { TaskId::Cheap }).unwrap();
        }
        let m = order.iter().filter(|&&e| e).count() as u128;
        let n = order.len() as u128 - m;
        let inv = (10.0 / rate).round() as u128; // 1/s = inv / 10
        let want = num_rational::Ratio::new(100 * n + inv * inv * m, 100);
        prop_assert_eq!(ledger.spent(), want);
    }
}
