use std::collections::BTreeMap;

use nuca_reach::experiment::{self, SamplingParams};
use nuca_reach::oracle::{self, DEFAULT_STG_CAP};
use nuca_reach::tree::{enumerate_full_tree, EdgeId, DEFAULT_TREE_CAP};
use nuca_reach::{decide, Configuration, DecideOptions, MinSteps, Rmt, RuleVector};
use proptest::prelude::*;

fn arb_rv(cells: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = RuleVector> {
    proptest::collection::vec(any::<u8>(), cells).prop_map(|c| RuleVector::from_codes(&c).unwrap())
}

fn all_pairs(n: usize) -> impl Iterator<Item = (Configuration, Configuration)> {
    (0..1u128 << n).flat_map(move |s| {
        (0..1u128 << n).map(move |d| (Configuration::from_index(s, n), Configuration::from_index(d, n)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn leaves_are_the_image(rv in arb_rv(1..=10)) {
        let full = enumerate_full_tree(&rv, DEFAULT_TREE_CAP).unwrap();
        let image = oracle::reachable_states(&rv, DEFAULT_STG_CAP).unwrap();
        prop_assert_eq!(full.leaf_count, image.len());
        let leaves: Vec<_> = full.reachable_states();
        prop_assert_eq!(leaves, image.into_iter().collect::<Vec<_>>());
    }

    #[test]
    fn single_target_trees_have_two_links_per_target(rv in arb_rv(2..=8)) {
        let full = enumerate_full_tree(&rv, DEFAULT_TREE_CAP).unwrap();
        prop_assume!(full.levels.iter().all(|l| l.multi_target_entries() == 0));
        for level in &full.levels {
            let mut incoming: BTreeMap<EdgeId, Vec<Rmt>> = BTreeMap::new();
            for (_, label) in level.edges() {
                for (r, t) in label.links() {
                    incoming.entry(t).or_default().push(r);
                }
            }
            for (target, rmts) in incoming {
                if level.is_last() {
                    prop_assert_eq!(rmts.len(), 1, "target {}", target);
                } else {
                    prop_assert_eq!(rmts.len(), 2, "target {}", target);
                    prop_assert!(rmts[0].is_sibling_of(rmts[1]).unwrap());
                }
            }
        }
    }

    #[test]
    fn shortcuts_do_not_change_answers(rv in arb_rv(1..=6)) {
        let plain = DecideOptions { shortcuts_enabled: false, ..DecideOptions::default() };
        for (s, d) in all_pairs(rv.len()) {
            let fast = decide(&rv, &s, &d, DecideOptions::default()).unwrap();
            let slow = decide(&rv, &s, &d, plain).unwrap();
            prop_assert_eq!(fast.outcome.min_steps(), slow.outcome.min_steps());
        }
    }

    #[test]
    fn explored_edges_stay_in_bounds(rv in arb_rv(1..=7)) {
        let n = rv.len() as u64;
        let bound = (1u64 << (n + 1)) - 2;
        for (s, d) in all_pairs(rv.len()) {
            let dec = decide(&rv, &s, &d, DecideOptions::default()).unwrap();
            prop_assert!(dec.explored_edges <= bound);
            if dec.outcome.is_reachable() {
                prop_assert!(dec.explored_edges >= 2 * n);
            }
        }
    }

    #[test]
    fn strict_mode_matches_oracle(rv in arb_rv(1..=6)) {
        let strict = DecideOptions { min_steps_required: MinSteps::One, ..DecideOptions::default() };
        for (s, d) in all_pairs(rv.len()) {
            let got = decide(&rv, &s, &d, strict).unwrap().outcome.min_steps();
            let want = oracle::oracle_decide(&rv, &s, &d, MinSteps::One).unwrap().min_t;
            prop_assert_eq!(got, want, "{} {} -> {}", rv, s, d);
        }
    }
}

#[test]
fn experiment_is_schedule_independent() {
    let params = SamplingParams { pilot_size: 30, rel_err: 0.2, ..SamplingParams::default() };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| experiment::avg_explored_edges(6, &params).unwrap())
    };
    let serial = run(1);
    let parallel = run(4);
    assert_eq!(serial, parallel);
    assert!(serial.converged);
}
