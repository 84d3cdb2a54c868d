//! Random instances for property tests and campaigns.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::curves::{Breakpoint, Curve, Tail};
use crate::error::Result;
use crate::ext::Ext;
use crate::operators::RegulationOperator;
use crate::regulators::{minimal_interleaved_regulate, InterleavedRegulator};
use crate::scalar::Scalar;
use crate::systems::FifoSystem;
use crate::traces::{FlowId, PacketSequence};

/// `k / d` with `k` drawn from `numerators` and `d` from `1..=max_den`.
pub fn rational<T: Scalar, R: Rng + ?Sized>(rng: &mut R, numerators: RangeInclusive<i64>, max_den: i64) -> T {
    let k = rng.random_range(numerators);
    let d = rng.random_range(1..=max_den);
    T::from_int(k) / T::from_int(d)
}

fn positive<T: Scalar, R: Rng + ?Sized>(rng: &mut R, max_num: i64, max_den: i64) -> T {
    rational(rng, 1..=max_num, max_den)
}

/// Shape of random traces.
#[derive(Clone, Debug)]
pub struct TraceShape {
    pub packets: RangeInclusive<usize>,
    pub lengths: RangeInclusive<u64>,
    pub flows: Vec<FlowId>,
    /// Chance that a packet shares its predecessor's date.
    pub simultaneous: f64,
}

impl TraceShape {
    pub fn single_flow(max_packets: usize) -> Self {
        TraceShape {
            packets: 0..=max_packets,
            lengths: 1..=4,
            flows: vec![1],
            simultaneous: 0.3,
        }
    }

    pub fn multi_flow(max_packets: usize, flows: usize) -> Self {
        TraceShape {
            flows: (1..=flows as FlowId).collect(),
            ..TraceShape::single_flow(max_packets)
        }
    }
}

/// Dates are cumulative sums of nonnegative rational gaps starting at 0.
pub fn trace<T: Scalar, R: Rng + ?Sized>(rng: &mut R, shape: &TraceShape) -> PacketSequence<T> {
    let len = rng.random_range(shape.packets.clone());
    let mut date = T::zero();
    let mut dates = Vec::with_capacity(len);
    for n in 0..len {
        if n > 0 && !rng.random_bool(shape.simultaneous) {
            date = date + positive::<T, _>(rng, 8, 3);
        }
        dates.push(date.clone());
    }
    let lengths = (0..len).map(|_| rng.random_range(shape.lengths.clone())).collect();
    let flows = (0..len).map(|_| *shape.flows.choose(rng).expect("flows nonempty")).collect();
    PacketSequence::new(dates, lengths, flows).expect("generated trace is valid")
}

/// A random wide-sense increasing curve with jumps. With `origin_zero` the
/// curve is `0` at `0`. Some curves saturate at `+inf` and some repeat
/// periodically.
pub fn curve<T: Scalar, R: Rng + ?Sized>(rng: &mut R, origin_zero: bool) -> Curve<T> {
    let choices = [(0, 1), (1, 2), (1, 1), (2, 1), (3, 1)];
    let k = rng.random_range(1..=4);
    let slopes: Vec<T> = (0..k)
        .map(|_| {
            let (a, b) = *choices.choose(rng).unwrap();
            T::from_int(a) / T::from_int(b)
        })
        .collect();
    let mut points: Vec<Breakpoint<T>> = Vec::with_capacity(k);
    let mut x = T::zero();
    for (i, s) in slopes.into_iter().enumerate() {
        if i > 0 {
            x = x + positive::<T, _>(rng, 4, 2);
        }
        let left = match points.last() {
            None if origin_zero => T::zero(),
            None => rational(rng, 0..=2, 1),
            Some(p) => {
                let Ext::Finite(r) = &p.right else { unreachable!() };
                r.clone() + p.slope.clone() * (x.clone() - p.x.clone())
            }
        };
        let jump = |rng: &mut R| {
            if rng.random_bool(0.5) {
                T::zero()
            } else {
                rational(rng, 1..=3, 2)
            }
        };
        let value = if i == 0 { left } else { left + jump(rng) };
        let right = value.clone() + jump(rng);
        points.push(Breakpoint::new(x.clone(), Ext::Finite(value), Ext::Finite(right), s));
    }
    let roll = rng.random_range(0..8);
    if roll == 0 {
        // Saturate after the last breakpoint.
        let last = points.last_mut().unwrap();
        last.right = Ext::PosInf;
        return Curve::new(points, Tail::Affine).expect("generated curve is valid");
    }
    if roll <= 3 {
        let from = rng.random_range(0..points.len());
        let last = points.last().unwrap();
        let period = last.x.clone() - points[from].x.clone() + positive::<T, _>(rng, 3, 2);
        let end = points[from].x.clone() + period.clone();
        let Ext::Finite(r) = &last.right else { unreachable!() };
        let wrap = r.clone() + last.slope.clone() * (end - last.x.clone());
        let Ext::Finite(v) = &points[from].value else { unreachable!() };
        let needed = T::max_of(wrap - v.clone(), T::zero());
        let increment = needed + rational::<T, _>(rng, 0..=2, 1);
        let increment = if increment.is_zero() { T::one() } else { increment };
        let tail = Tail::Periodic {
            from,
            period,
            increment,
        };
        return Curve::new(points, tail).expect("generated periodic curve is valid");
    }
    Curve::new(points, Tail::Affine).expect("generated curve is valid")
}

/// `affine(r, b)` or `staircase(tau, b)` with random parameters.
pub fn sigma<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> Curve<T> {
    if rng.random_bool(0.5) {
        Curve::affine(positive(rng, 4, 3), positive(rng, 6, 2)).expect("valid")
    } else {
        Curve::staircase(positive(rng, 4, 2), T::from_int(rng.random_range(1..=6))).expect("valid")
    }
}

/// Kinds of operators the generator can build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    MaxPlusLinear,
    GRegulation,
    ArrivalCurve,
    Lrq,
    LeakyBucket,
    Staircase,
    TsnPacketRate,
    PacketSpacing,
    PacketBurstiness,
    MaxOf,
}

pub const OPERATOR_KINDS: [OperatorKind; 10] = [
    OperatorKind::MaxPlusLinear,
    OperatorKind::GRegulation,
    OperatorKind::ArrivalCurve,
    OperatorKind::Lrq,
    OperatorKind::LeakyBucket,
    OperatorKind::Staircase,
    OperatorKind::TsnPacketRate,
    OperatorKind::PacketSpacing,
    OperatorKind::PacketBurstiness,
    OperatorKind::MaxOf,
];

pub fn operator_of<T: Scalar, R: Rng + ?Sized>(rng: &mut R, kind: OperatorKind) -> RegulationOperator<T> {
    type Op<T> = RegulationOperator<T>;
    match kind {
        OperatorKind::MaxPlusLinear => {
            // A per-packet charge plus a per-hop spacing.
            let c: T = rational(rng, 0..=3, 2);
            let r: T = positive(rng, 4, 1);
            Op::max_plus_linear(move |m, n, l: &[u64]| {
                let span: u64 = l[m..n].iter().sum();
                Ext::Finite(c.clone() * T::from_count((n - m) as u64) - T::from_count(span) / r.clone())
            })
        }
        OperatorKind::GRegulation => Op::g_regulation(curve(rng, true)).expect("g(0) = 0"),
        OperatorKind::ArrivalCurve => {
            if rng.random_bool(0.5) {
                Op::arrival_curve(sigma(rng))
            } else {
                Op::arrival_curve(curve(rng, false))
            }
        }
        OperatorKind::Lrq => Op::lrq(positive(rng, 4, 2)).expect("valid"),
        OperatorKind::LeakyBucket => Op::leaky_bucket(positive(rng, 4, 2), positive(rng, 6, 1)).expect("valid"),
        OperatorKind::Staircase => {
            Op::staircase(positive(rng, 4, 2), T::from_int(rng.random_range(1..=6))).expect("valid")
        }
        OperatorKind::TsnPacketRate => {
            Op::tsn_packet_rate(rational(rng, 0..=6, 2), rng.random_range(1..=3)).expect("valid")
        }
        OperatorKind::PacketSpacing => Op::packet_spacing(rational(rng, 0..=4, 2)).expect("valid"),
        OperatorKind::PacketBurstiness => {
            Op::packet_burstiness(positive(rng, 3, 2), rng.random_range(1..=3)).expect("valid")
        }
        OperatorKind::MaxOf => {
            let simple = &OPERATOR_KINDS[3..9];
            let a = *simple.choose(rng).unwrap();
            let b = *simple.choose(rng).unwrap();
            Op::max_of(operator_of(rng, a), operator_of(rng, b))
        }
    }
}

pub fn operator<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> RegulationOperator<T> {
    let kind = *OPERATOR_KINDS.choose(rng).unwrap();
    operator_of(rng, kind)
}

pub fn operator_map<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    flows: &[FlowId],
) -> BTreeMap<FlowId, RegulationOperator<T>> {
    flows.iter().map(|&f| (f, operator(rng))).collect()
}

pub fn system<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> FifoSystem<T> {
    match rng.random_range(0..4) {
        0 => FifoSystem::Identity,
        1 => FifoSystem::damper(rational(rng, 0..=6, 2)).expect("valid"),
        2 => {
            let mut windows = Vec::new();
            let mut t: T = rational(rng, 0..=3, 1);
            for _ in 0..rng.random_range(0..=3) {
                let end = t.clone() + positive::<T, _>(rng, 4, 2);
                windows.push((t.clone(), end.clone()));
                t = end + positive::<T, _>(rng, 8, 1);
            }
            FifoSystem::preemptive_server(positive(rng, 3, 1), windows).expect("valid")
        }
        _ => FifoSystem::bounded_jitter(rng.random(), rational(rng, 0..=6, 2)).expect("valid"),
    }
}

/// A random trace made regular for `ops` by passing it through the minimal
/// interleaved regulator. Packets the regulator would hold forever (a
/// constraint that saturates at `+inf`) are dropped from the end.
pub fn regular_trace<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    ops: &BTreeMap<FlowId, RegulationOperator<T>>,
    shape: &TraceShape,
) -> Result<PacketSequence<T>> {
    let out = minimal_interleaved_regulate(ops, &trace(rng, shape))?;
    let k = out.dates().iter().take_while(|d| d.is_finite()).count();
    PacketSequence::from_ext(
        out.dates()[..k].to_vec(),
        out.lengths()[..k].to_vec(),
        out.flows()[..k].to_vec(),
    )
}

/// Another valid regulator output for `input`: each packet is offered to
/// the regulator recursion with a random extra hold time.
pub fn slack_candidate<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    ops: &BTreeMap<FlowId, RegulationOperator<T>>,
    input: &PacketSequence<T>,
) -> Result<PacketSequence<T>> {
    let mut reg = InterleavedRegulator::new(ops.clone());
    for n in 0..input.len() {
        let slack = if rng.random_bool(0.5) {
            T::zero()
        } else {
            rational(rng, 1..=6, 3)
        };
        reg.push(input.dates()[n].shift(&slack), input.lengths()[n], input.flows()[n])?;
    }
    input.with_dates(reg.released().to_vec())
}

/// Every breakpoint of `f` and of both its pseudo-inverses over two periods,
/// plus `extra` random points in the same range, sorted and deduplicated.
pub fn sample_points<T: Scalar, R: Rng + ?Sized>(rng: &mut R, f: &Curve<T>, extra: usize) -> Vec<T> {
    let unrolled = f.unrolled(2);
    let horizon = unrolled.last().expect("nonempty").x.clone() + T::one();
    let top = unrolled
        .iter()
        .flat_map(|p| [p.value.finite().cloned(), p.right.finite().cloned()])
        .flatten()
        .chain(f.eval(&horizon).ok().and_then(Ext::into_finite))
        .fold(T::zero(), T::max_of)
        + T::one();
    let mut pts = f.breakpoints_until(&horizon);
    pts.extend(f.lower_pseudo_inverse().breakpoints_until(&top));
    pts.extend(f.upper_pseudo_inverse().breakpoints_until(&top));
    let range = T::max_of(horizon, top);
    for _ in 0..extra {
        let u = T::from_count(rng.random_range(0..=1000)) / T::from_count(1000);
        pts.push(u * range.clone());
    }
    pts.sort_by(|a, b| a.partial_cmp(b).expect("ordered"));
    pts.dedup();
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_instances_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..300 {
            let c: Curve<BigRational> = curve(&mut rng, false);
            assert!(c.eval(&BigRational::from_integer(3.into())).is_ok());
            let g: Curve<BigRational> = curve(&mut rng, true);
            assert_eq!(g.eval(&BigRational::from_integer(0.into())).unwrap(), Ext::zero());
            let _: FifoSystem<BigRational> = system(&mut rng);
            let ops = operator_map::<BigRational, _>(&mut rng, &[1, 2]);
            let seq = regular_trace(&mut rng, &ops, &TraceShape::multi_flow(8, 2)).unwrap();
            let cand = slack_candidate(&mut rng, &ops, &seq).unwrap();
            assert_eq!(cand.len(), seq.len());
        }
    }
}
