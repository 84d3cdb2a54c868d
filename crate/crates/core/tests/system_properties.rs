use pireg::systems::{per_flow_worst_case_delay, worst_case_delay};
use pireg::verify::gen::{self, TraceShape};
use pireg::verify::{check_shaping_for_free, shaping_for_free, ShapingMode};
use pireg::{Ext, FifoSystem, PacketSequence};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn systems_are_fifo(seed in any::<u64>(), flows in 1usize..=3) {
        let mut r = rng(seed);
        let sys: FifoSystem = gen::system(&mut r);
        let seq: PacketSequence = gen::trace(&mut r, &TraceShape::multi_flow(12, flows));
        let out = sys.apply(&seq).unwrap();
        prop_assert_eq!(out.lengths(), seq.lengths());
        prop_assert_eq!(out.flows(), seq.flows());
        for n in 0..seq.len() {
            prop_assert!(out.dates()[n] >= seq.dates()[n]);
        }
        prop_assert!(out.dates().windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(sys.apply(&seq).unwrap(), out);
    }

    #[test]
    fn jitter_stays_within_bound(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d_max = gen::rational::<pireg::Rat, _>(&mut r, 0..=6, 2);
        let seq: PacketSequence = gen::trace(&mut r, &TraceShape::single_flow(12));
        let out = FifoSystem::bounded_jitter(seed, d_max.clone()).unwrap().apply(&seq).unwrap();
        if !seq.is_empty() {
            prop_assert!(worst_case_delay(&seq, &out).unwrap() <= Ext::Finite(d_max));
        }
    }

    #[test]
    fn per_flow_shaping_is_free(seed in any::<u64>(), flows in 1usize..=3) {
        let mut r = rng(seed);
        let ids: Vec<u32> = (1..=flows as u32).collect();
        let ops = gen::operator_map(&mut r, &ids);
        let input = gen::regular_trace(&mut r, &ops, &TraceShape::multi_flow(10, flows)).unwrap();
        let sys: FifoSystem = gen::system(&mut r);
        let report = check_shaping_for_free(&sys, &ops, &input, ShapingMode::PerFlow).unwrap();
        prop_assert!(report.passed(), "{} {:?}", report, sys);
    }

    #[test]
    fn interleaved_shaping_is_free(seed in any::<u64>(), flows in 1usize..=3) {
        let mut r = rng(seed);
        let ids: Vec<u32> = (1..=flows as u32).collect();
        let ops = gen::operator_map(&mut r, &ids);
        let input = gen::regular_trace(&mut r, &ops, &TraceShape::multi_flow(10, flows)).unwrap();
        let sys: FifoSystem = gen::system(&mut r);
        let out = shaping_for_free(&sys, &ops, &input, ShapingMode::Interleaved).unwrap();
        prop_assert_eq!(&out.system_delay, &out.combined_delay);
        // Each flow is delayed at most as much as the worst packet overall.
        for d in out.combined_per_flow.values() {
            prop_assert!(Ext::Finite(d.clone()) <= out.system_delay);
        }
    }
}

#[test]
fn two_flow_delays() {
    let s = pireg::scenario::two_flow();
    let d = s.system.apply(&s.input).unwrap();
    let per = per_flow_worst_case_delay(&s.input, &d).unwrap();
    assert_eq!(per[&1], pireg::scalar::int(5));
    assert_eq!(per[&2], pireg::scalar::int(3));
    let out = shaping_for_free(&s.system, &s.ops, &s.input, ShapingMode::Interleaved).unwrap();
    // Flow 2 is held back to the overall bound.
    assert_eq!(out.combined_per_flow[&2], pireg::scalar::int(5));
    assert!(out.holds(ShapingMode::Interleaved));
    assert!(!out.holds(ShapingMode::PerFlow));
}
