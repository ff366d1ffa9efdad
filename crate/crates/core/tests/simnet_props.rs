use parseval_mpc::protocol::{ProtocolKind, ViewComponent};
use parseval_mpc::simnet::{
    independence_test, run_trials, trial_seed, Binning, SimConfig, SimError, ViewHistogram,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn batches_are_reproducible(seed in any::<u64>(), a in 0u64..101, b in 0u64..101) {
        let mut cfg = SimConfig::new(ProtocolKind::TwoPartyExact, 101, vec![a as f64, b as f64]);
        cfg.seed = seed;
        cfg.trials = 5;
        let x: Vec<String> = run_trials(&cfg).unwrap().iter().map(|t| t.to_json()).collect();
        let y: Vec<String> = run_trials(&cfg).unwrap().iter().map(|t| t.to_json()).collect();
        prop_assert_eq!(x, y);
    }

    #[test]
    fn trial_seeds_do_not_collide_within_a_batch(base in any::<u64>()) {
        let mut seeds: Vec<u64> = (0..256).map(|i| trial_seed(base, i)).collect();
        seeds.sort_unstable();
        seeds.dedup();
        prop_assert_eq!(seeds.len(), 256);
    }

    #[test]
    fn histogram_counts_add_up(values in prop::collection::vec(0u64..70_000, 1..500), split in 0usize..500) {
        let binning = Binning::for_prime(70_001);
        let split = split.min(values.len());
        let mut whole = ViewHistogram::new(ViewComponent::A0, binning);
        let mut left = ViewHistogram::new(ViewComponent::A0, binning);
        let mut right = ViewHistogram::new(ViewComponent::A0, binning);
        for (i, v) in values.iter().enumerate() {
            whole.record(*v);
            if i < split { left.record(*v) } else { right.record(*v) }
        }
        prop_assert_eq!(whole.bins.iter().sum::<u64>(), whole.total);
        // Merging is order-independent.
        let mut lr = left.clone();
        lr.merge(&right).unwrap();
        let mut rl = right.clone();
        rl.merge(&left).unwrap();
        prop_assert_eq!(&lr, &whole);
        prop_assert_eq!(&rl, &whole);
    }
}

#[test]
fn large_batch_reconstructs() {
    let mut cfg = SimConfig::new(ProtocolKind::TwoPartyExact, 101, vec![12.0, 34.0]);
    cfg.trials = 10_000;
    cfg.seed = 2024;
    let ts = run_trials(&cfg).unwrap();
    assert_eq!(ts.len(), 10_000);
    assert!(ts.iter().all(|t| t.reconstructed_field().unwrap().value() == 12 * 34 % 101));
}

#[test]
fn same_generator_split_is_not_rejected_often() {
    // Both samples come from one generator: p-values should be roughly
    // uniform, so rejections at 0.01 stay rare.
    use rand::{Rng, SeedableRng};
    let mut rejections = 0;
    for r in 0..100 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(trial_seed(77, r));
        let b = Binning::for_prime(101);
        let mut x = ViewHistogram::new(ViewComponent::A0, b);
        let mut y = ViewHistogram::new(ViewComponent::A0, b);
        for _ in 0..20_000 {
            x.record(rng.gen_range(0..101));
            y.record(rng.gen_range(0..101));
        }
        if independence_test(&x, &y).unwrap().p_value < 0.01 {
            rejections += 1;
        }
    }
    assert!(rejections <= 6, "{rejections} rejections in 100");
}

#[test]
fn incompatible_binnings_are_an_error() {
    let x = ViewHistogram::new(ViewComponent::A0, Binning::for_prime(101));
    let y = ViewHistogram::new(ViewComponent::A0, Binning::for_prime(1_000_003));
    assert_eq!(independence_test(&x, &y), Err(SimError::IncompatibleHistograms));
}
