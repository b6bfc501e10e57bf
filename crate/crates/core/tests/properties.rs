//! Randomized checks of the library's structural invariants.

use omegalab::learn::{
    gradient_check, make_dataset, metrics_from_predictions, train_logistic, Dataset, FeatureConfig, LinearModel,
    Split, SplitMix64, Task, TrainConfig, Which,
};
use omegalab::levin::{
    decode, enumerate_mass, gamma_len, shortest_program, toy_complexity, toy_complexity_bruteforce, BitString,
    Dyadic, Machine,
};
use omegalab::maxent::{maxent_geometric, poisson_pmf, total_variation, DiscretePmf};
use omegalab::sieve::{omega_upto, sieve_omega_range, sieve_omega_segment, sieve_primes, trial_division_omega};
use omegalab::stats::{erdos_kac_report, ks_distance_to_normal, MomentLedger};
use proptest::prelude::*;

fn bits(v: &[bool]) -> BitString {
    BitString::from_bits(v.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn segments_compose(a in 2u64..200_000, len1 in 0u64..5_000, len2 in 0u64..5_000) {
        let base = sieve_primes(1_000).unwrap();
        let (b, c) = (a + len1, a + len1 + len2);
        let mut left = sieve_omega_segment(a, b, &base, true).unwrap();
        left.extend(sieve_omega_segment(b, c, &base, true).unwrap()).unwrap();
        prop_assert_eq!(left, sieve_omega_segment(a, c, &base, true).unwrap());
    }

    #[test]
    fn segments_match_trial_division(lo in 2u64..100_000, len in 1u64..400) {
        let base = sieve_primes(400).unwrap();
        let hi = (lo + len).min(100_001);
        let seg = sieve_omega_segment(lo, hi, &base, true).unwrap();
        for (i, n) in (lo..hi).enumerate() {
            let (w, big) = trial_division_omega(n).unwrap();
            prop_assert_eq!(u32::from(seg.omega()[i]), w);
            prop_assert_eq!(u32::from(seg.big_omega().unwrap()[i]), big);
            prop_assert!((1..=15).contains(&w) && big >= w);
        }
    }

    #[test]
    fn any_schedule_gives_identical_bits(lo in 2u64..50_000, len in 1u64..30_000, seg in 1u64..6_000, workers in 1usize..5) {
        let base = sieve_primes(300).unwrap();
        let whole = sieve_omega_segment(lo, lo + len, &base, false).unwrap();
        prop_assert_eq!(sieve_omega_range(lo, lo + len, &base, seg, workers, false).unwrap(), whole);
    }

    #[test]
    fn prime_set_membership(n in 0u64..1_000_000) {
        let ps = sieve_primes(1_000_000).unwrap();
        let prime = n >= 2 && trial_division_omega(n).unwrap().1 == 1;
        prop_assert_eq!(ps.contains(n), prime);
    }

    #[test]
    fn ledger_merge_is_associative_and_commutative(cuts in prop::collection::btree_set(3u64..20_000, 2)) {
        let cuts: Vec<u64> = cuts.into_iter().collect();
        let omega = omega_upto(20_000, 4096, 1).unwrap();
        let part = |lo: u64, hi: u64| {
            let mut l = MomentLedger::new();
            l.accumulate_counts(lo, &omega.omega()[(lo - 2) as usize..(hi - 2) as usize]).unwrap();
            l
        };
        let (a, b, c) = (part(2, cuts[0]), part(cuts[0], cuts[1]), part(cuts[1], 20_001));
        let left = a.merge(&b).unwrap().merge(&c).unwrap();
        let right = a.merge(&b.merge(&c).unwrap()).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(a.merge(&b).unwrap(), b.merge(&a).unwrap());
        prop_assert_eq!(left, part(2, 20_001));
        prop_assert!(a.merge(&a).is_err());
    }

    #[test]
    fn ledger_sums_match_histogram(n in 16u64..30_000) {
        let omega = omega_upto(n, 1024, 1).unwrap();
        let mut l = MomentLedger::new();
        l.accumulate(&omega).unwrap();
        let h = l.histogram();
        let count: u64 = h.iter().sum();
        let s1: u128 = h.iter().enumerate().map(|(k, &c)| k as u128 * u128::from(c)).sum();
        let s2: u128 = h.iter().enumerate().map(|(k, &c)| (k * k) as u128 * u128::from(c)).sum();
        prop_assert_eq!((l.count(), l.sum_omega(), l.sum_omega_sq()), (count, s1, s2));
        prop_assert_eq!(l.mean().unwrap(), s1 as f64 / count as f64);
        let r = erdos_kac_report(&l, 41).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.ks_distance));
        for (_, f) in &r.hardy_ramanujan.chebyshev_fractions {
            prop_assert!((0.0..=1.0).contains(f));
        }
    }

    #[test]
    fn ks_ignores_segment_order(seed in any::<u64>(), pieces in 2usize..8) {
        let n = 50_000u64;
        let omega = omega_upto(n, 1 << 16, 1).unwrap();
        let step = (n - 1) / pieces as u64 + 1;
        let bounds: Vec<(u64, u64)> = (0..pieces as u64)
            .map(|i| (2 + i * step, (2 + (i + 1) * step).min(n + 1)))
            .filter(|(lo, hi)| lo < hi)
            .collect();
        let order = omegalab::learn::permutation(bounds.len(), seed);
        let mut l = MomentLedger::new();
        for &i in &order {
            let (lo, hi) = bounds[i];
            l.accumulate_counts(lo, &omega.omega()[(lo - 2) as usize..(hi - 2) as usize]).unwrap();
        }
        let mut sequential = MomentLedger::new();
        sequential.accumulate(&omega).unwrap();
        prop_assert_eq!(ks_distance_to_normal(&l).unwrap(), ks_distance_to_normal(&sequential).unwrap());
    }

    #[test]
    fn total_variation_is_a_metric(
        a in prop::collection::vec(0u64..1000, 1..12),
        b in prop::collection::vec(0u64..1000, 1..12),
        c in prop::collection::vec(0u64..1000, 1..12),
    ) {
        prop_assume!(a.iter().any(|&x| x > 0) && b.iter().any(|&x| x > 0) && c.iter().any(|&x| x > 0));
        let (a, b, c) = (
            DiscretePmf::from_histogram(&a).unwrap(),
            DiscretePmf::from_histogram(&b).unwrap(),
            DiscretePmf::from_histogram(&c).unwrap(),
        );
        let ab = total_variation(&a, &b);
        prop_assert_eq!(ab, total_variation(&b, &a));
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!(ab <= total_variation(&a, &c) + total_variation(&c, &b) + 1e-12);
        prop_assert_eq!(total_variation(&a, &a), 0.0);
    }

    #[test]
    fn poisson_recurrence_matches_direct_formula(lambda in 0.01f64..5.0, k in 0u64..=30) {
        let pmf = poisson_pmf(lambda, 60).unwrap();
        let ln_fact: f64 = (1..=k).map(|i| (i as f64).ln()).sum();
        let direct = (k as f64 * lambda.ln() - lambda - ln_fact).exp();
        prop_assert!((pmf.prob(k) - direct).abs() <= 1e-12 * direct);
    }

    #[test]
    fn geometric_truncation_keeps_mass(mean in 0.0f64..20.0) {
        let g = maxent_geometric(mean, 1e-9).unwrap();
        let total = g.total_mass();
        prop_assert!(total >= 1.0 - 1e-9 && total <= 1.0 + 1e-12);
        prop_assert!(g.probabilities.iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn prefix_free_decoders_consume_everything(program in prop::collection::vec(any::<bool>(), 0..48)) {
        for m in [Machine::U1, Machine::U2] {
            if let Ok(d) = decode(m, &program) {
                prop_assert_eq!(d.consumed, program.len());
            }
        }
    }

    #[test]
    fn u0_ignores_trailing_bits(x in prop::collection::vec(any::<bool>(), 0..12), tail in prop::collection::vec(any::<bool>(), 0..12)) {
        let mut p = shortest_program(Machine::U1, &bits(&x)).unwrap().bits().to_vec();
        p.extend(&tail);
        prop_assert_eq!(decode(Machine::U0, &p).unwrap().output, bits(&x));
    }

    #[test]
    fn complexity_bounds_and_witnesses(x in prop::collection::vec(any::<bool>(), 0..64)) {
        let x = bits(&x);
        let k1 = toy_complexity(Machine::U1, &x).unwrap();
        prop_assert!(k1 <= x.len() as u32 + gamma_len(x.len() as u64 + 1) + 1);
        for m in [Machine::U1, Machine::U2] {
            let p = shortest_program(m, &x).unwrap();
            prop_assert_eq!(p.len() as u32, toy_complexity(m, &x).unwrap());
            prop_assert_eq!(decode(m, p.bits()).unwrap().output, x.clone());
        }
    }

    #[test]
    fn closed_form_agrees_with_search(x in prop::collection::vec(any::<bool>(), 0..7), cutoff in 8u32..17) {
        let x = bits(&x);
        for m in [Machine::U1, Machine::U2] {
            if let Some(k) = toy_complexity_bruteforce(m, &x, cutoff).unwrap() {
                prop_assert_eq!(k, toy_complexity(m, &x).unwrap());
            }
        }
    }

    #[test]
    fn metrics_stay_in_range(pairs in prop::collection::vec((0.0f64..=1.0, any::<bool>()), 1..200)) {
        let (p, y): (Vec<f64>, Vec<bool>) = pairs.into_iter().unzip();
        let m = metrics_from_predictions(&p, &y).unwrap();
        prop_assert!((0.0..=1.0).contains(&m.accuracy));
        prop_assert!((0.0..=1.0).contains(&m.balanced_accuracy));
        prop_assert!((-1.0..=1.0).contains(&m.mcc));
        prop_assert!(m.log_loss_bits >= 0.0);
        prop_assert!((0.5..=1.0).contains(&m.baseline_accuracy));
    }

    #[test]
    fn datasets_partition_and_label_correctly(n in 16u64..3_000, seed in any::<u64>(), shuffle: bool) {
        let primes = sieve_primes(n).unwrap();
        let omega = omega_upto(n, 1024, 1).unwrap();
        let split = if shuffle { Split::Shuffle { seed, train_frac: 0.8 } } else { Split::Range { train_frac: 0.8 } };
        for task in [Task::Prime, Task::EkSign] {
            let ds = make_dataset(task, n, split, &primes, Some(&omega), FeatureConfig::default()).unwrap();
            let mut seen = vec![0u8; ds.len()];
            for &i in ds.indices(Which::Train).iter().chain(ds.indices(Which::Test)) {
                seen[i] += 1;
            }
            prop_assert!(seen.iter().all(|&s| s == 1));
            prop_assert_eq!(ds.len() as u64, n - 1);
            for k in 2..=n {
                let expected = match task {
                    Task::Prime => primes.contains(k),
                    Task::EkSign => f64::from(omega.omega_of(k).unwrap()) > (n as f64).ln().ln(),
                };
                prop_assert_eq!(ds.label_of(k), Some(expected));
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences(seed in any::<u64>(), l2 in prop::sample::select(vec![0.0, 0.01, 1.0])) {
        let mut rng = SplitMix64::new(seed);
        let rows: Vec<u64> = (0..64).map(|_| rng.next_u64() & 0xFFFFF).collect();
        let labels: Vec<bool> = (0..64).map(|_| rng.next_u64() % 3 == 0).collect();
        let ds = Dataset::from_rows(rows, labels, 20, (0..64).collect(), Vec::new()).unwrap();
        let mut model = LinearModel::zeros(20, TrainConfig { l2, ..TrainConfig::default() });
        for w in model.weights.iter_mut() {
            *w = (rng.next_u64() % 2001) as f64 / 1000.0 - 1.0;
        }
        prop_assert!(gradient_check(&ds, &model, 1e-5).unwrap() < 1e-4);
    }

    #[test]
    fn training_is_reproducible(seed in any::<u64>(), batch in prop::sample::select(vec![0usize, 7, 32])) {
        let mut rng = SplitMix64::new(seed);
        let rows: Vec<u64> = (0..100).map(|_| rng.next_u64() & 0xFF).collect();
        let labels: Vec<bool> = rows.iter().map(|r| r & 3 == 1).collect();
        let ds = Dataset::from_rows(rows, labels, 8, (0..80).collect(), (80..100).collect()).unwrap();
        let cfg = TrainConfig { lr: 0.5, epochs: 30, l2: 1e-3, batch, seed };
        let a = train_logistic(&ds, cfg).unwrap();
        prop_assert_eq!(&a, &train_logistic(&ds, cfg).unwrap());
        prop_assert!(a.model.weights.iter().all(|w| w.is_finite()));
    }
}

#[test]
fn mass_grows_with_cutoff() {
    for m in [Machine::U1, Machine::U2] {
        let masses: Vec<_> = (0..=18).map(|c| enumerate_mass(m, c).unwrap()).collect();
        for pair in masses.windows(2) {
            assert!(pair[0].total() <= pair[1].total());
            assert!(pair[1].total() <= Dyadic::ONE);
            for (x, mass) in pair[0].iter() {
                assert!(mass <= pair[1].mass(x), "{m} {x}");
            }
        }
    }
}
