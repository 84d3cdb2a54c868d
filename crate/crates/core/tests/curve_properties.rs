use num_traits::Zero;
use pireg::scalar::{int, Scalar};
use pireg::verify::{gen, inverse_lemma_failures};
use pireg::{Curve, Ext, PacketSequence, Rat};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_rat() -> impl Strategy<Value = Rat> {
    (1i64..=12, 1i64..=4).prop_map(|(n, d)| Rat::new(n.into(), d.into()))
}

fn fin(v: Rat) -> Ext<Rat> {
    Ext::Finite(v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn inverse_identities_hold(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f: Curve = gen::curve(&mut r, false);
        let pts = gen::sample_points(&mut r, &f, 20);
        let failures = inverse_lemma_failures(&f, &pts).unwrap();
        prop_assert!(failures.is_empty(), "{f:?}: {failures:?}");
    }

    #[test]
    fn curves_are_wide_sense_increasing(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f: Curve = gen::curve(&mut r, false);
        let pts = gen::sample_points(&mut r, &f, 20);
        for w in pts.windows(2) {
            let a = f.eval(&w[0]).unwrap();
            prop_assert!(a <= f.right_limit(&w[0]).unwrap());
            prop_assert!(f.right_limit(&w[0]).unwrap() <= f.left_limit(&w[1]).unwrap());
            prop_assert!(f.left_limit(&w[1]).unwrap() <= f.eval(&w[1]).unwrap());
        }
    }

    #[test]
    fn affine_inverse_closed_form(rate in small_rat(), burst in small_rat(), y in small_rat()) {
        let f = Curve::affine(rate.clone(), burst.clone()).unwrap();
        let lower = if y <= burst { Rat::zero() } else { (y.clone() - burst.clone()) / rate.clone() };
        let upper = if y < burst { Rat::zero() } else { (y.clone() - burst) / rate };
        prop_assert_eq!(f.lower_pseudo_inverse().eval(&y).unwrap(), fin(lower));
        prop_assert_eq!(f.upper_pseudo_inverse().eval(&y).unwrap(), fin(upper));
    }

    #[test]
    fn staircase_inverse_closed_form(tau in small_rat(), b in small_rat(), y in small_rat()) {
        let f = Curve::staircase(tau.clone(), b.clone()).unwrap();
        let k = Scalar::ceil(&(y.clone() / b.clone())) - int(1);
        let lower = tau.clone() * Scalar::max_of(k, Rat::zero());
        let upper = tau * Scalar::floor(&(y.clone() / b));
        prop_assert_eq!(f.lower_pseudo_inverse().eval(&y).unwrap(), fin(lower));
        prop_assert_eq!(f.upper_pseudo_inverse().eval(&y).unwrap(), fin(upper));
        prop_assert_eq!(f.lower_pseudo_inverse().eval(&Rat::zero()).unwrap(), fin(Rat::zero()));
    }

    #[test]
    fn arrival_time_function_matches_definition(seed in any::<u64>()) {
        let mut r = rng(seed);
        let seq: PacketSequence = gen::trace(&mut r, &gen::TraceShape::single_flow(8));
        let t = seq.arrival_time_function().unwrap();
        let total: u64 = seq.lengths().iter().sum();
        for k in 0..=2 * total + 2 {
            let x = Rat::new((k as i64).into(), 2.into());
            prop_assert_eq!(t.eval(&x).unwrap(), seq.arrival_time_at(&x));
        }
    }

    #[test]
    fn cumulative_arrivals_count_earlier_packets(seed in any::<u64>()) {
        let mut r = rng(seed);
        let seq: PacketSequence = gen::trace(&mut r, &gen::TraceShape::single_flow(8));
        let curve = seq.cumulative_arrivals().unwrap();
        for d in seq.dates() {
            let t = d.finite().unwrap().clone();
            let before: u64 = seq.dates().iter().zip(seq.lengths()).filter(|(a, _)| **a < *d).map(|(_, l)| l).sum();
            let upto: u64 = seq.dates().iter().zip(seq.lengths()).filter(|(a, _)| **a <= *d).map(|(_, l)| l).sum();
            prop_assert_eq!(curve.eval(&t).unwrap(), fin(int(before as i64)));
            prop_assert_eq!(curve.right_limit(&t).unwrap(), fin(int(upto as i64)));
        }
    }
}

#[test]
fn float_instances_agree_on_simple_curves() {
    let f = pireg::curves::Curve::<f64>::affine(2.0, 1.0).unwrap();
    assert_eq!(f.eval(&3.0).unwrap(), Ext::Finite(7.0));
    assert_eq!(f.lower_pseudo_inverse().eval(&5.0).unwrap(), Ext::Finite(2.0));
    let s = pireg::curves::Curve::<f32>::staircase(2.0, 3.0).unwrap();
    assert_eq!(s.eval(&4.5).unwrap(), Ext::Finite(9.0));
}
