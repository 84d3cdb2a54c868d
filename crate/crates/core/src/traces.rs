//! Packet sequences and the per-flow views inside them.
//!
//! Positions are zero-based throughout: packet `n` of a sequence is
//! `dates()[n]`, and `flow_index(n)` is its zero-based rank inside its flow.

use std::collections::BTreeSet;

use crate::curves::{Breakpoint, Curve, Tail};
use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::scalar::Scalar;

pub type FlowId = u32;

/// A finite prefix of a packet sequence: dates, lengths and flow ids.
///
/// Dates are wide-sense increasing; ties keep their input order.
#[derive(Clone, Debug, PartialEq)]
pub struct PacketSequence<T> {
    dates: Vec<Ext<T>>,
    lengths: Vec<u64>,
    flows: Vec<FlowId>,
}

impl<T: Scalar> PacketSequence<T> {
    /// Builds a sequence from finite dates.
    pub fn new(dates: Vec<T>, lengths: Vec<u64>, flows: Vec<FlowId>) -> Result<Self> {
        PacketSequence::from_ext(dates.into_iter().map(Ext::Finite).collect(), lengths, flows)
    }

    /// Builds a one-flow sequence; every packet belongs to flow 1.
    pub fn single_flow(dates: Vec<T>, lengths: Vec<u64>) -> Result<Self> {
        let flows = vec![1; dates.len()];
        PacketSequence::new(dates, lengths, flows)
    }

    /// Builds a sequence whose dates may be infinite, as regulator outputs
    /// can be.
    pub fn from_ext(dates: Vec<Ext<T>>, lengths: Vec<u64>, flows: Vec<FlowId>) -> Result<Self> {
        if dates.len() != lengths.len() || dates.len() != flows.len() {
            return Err(Error::InvalidSequence(format!(
                "{} dates, {} lengths, {} flows",
                dates.len(),
                lengths.len(),
                flows.len()
            )));
        }
        if let Some(n) = lengths.iter().position(|&l| l == 0) {
            return Err(Error::InvalidSequence(format!("packet {n} has zero length")));
        }
        if let Some(n) = dates.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::InvalidSequence(format!(
                "dates decrease at packet {}",
                n + 1
            )));
        }
        Ok(PacketSequence {
            dates,
            lengths,
            flows,
        })
    }

    pub fn empty() -> Self {
        PacketSequence {
            dates: Vec::new(),
            lengths: Vec::new(),
            flows: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn dates(&self) -> &[Ext<T>] {
        &self.dates
    }

    pub fn lengths(&self) -> &[u64] {
        &self.lengths
    }

    pub fn flows(&self) -> &[FlowId] {
        &self.flows
    }

    /// Same lengths and flows, new dates.
    pub fn with_dates(&self, dates: Vec<Ext<T>>) -> Result<Self> {
        PacketSequence::from_ext(dates, self.lengths.clone(), self.flows.clone())
    }

    /// Flow ids present, in increasing order.
    pub fn flow_ids(&self) -> Vec<FlowId> {
        self.flows.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
    }

    pub fn is_single_flow(&self) -> bool {
        self.flows.windows(2).all(|w| w[0] == w[1])
    }

    /// Rank of packet `n` inside its own flow.
    pub fn flow_index(&self, n: usize) -> Result<usize> {
        let f = *self.flows.get(n).ok_or(Error::IndexOutOfRange {
            index: n,
            len: self.len(),
        })?;
        Ok(self.flows[..n].iter().filter(|&&g| g == f).count())
    }

    /// Position in the sequence of the `i`-th packet of flow `f`.
    pub fn packet_of_flow(&self, f: FlowId, i: usize) -> Result<usize> {
        self.flows
            .iter()
            .enumerate()
            .filter(|(_, &g)| g == f)
            .nth(i)
            .map(|(n, _)| n)
            .ok_or(Error::FlowAbsent { flow: f, count: i + 1 })
    }

    pub fn flow_view(&self, f: FlowId) -> FlowView<'_, T> {
        let index_map = (0..self.len()).filter(|&n| self.flows[n] == f).collect();
        FlowView {
            parent: self,
            flow: f,
            index_map,
        }
    }

    /// `R(t) = sum of L_n over packets with A_n < t`, a left-continuous
    /// staircase.
    pub fn cumulative_arrivals(&self) -> Result<Curve<T>> {
        let mut steps: Vec<(T, u64)> = Vec::new();
        for (d, &l) in self.dates.iter().zip(&self.lengths) {
            let d = match d {
                Ext::Finite(d) if *d >= T::zero() => d,
                other => {
                    return Err(Error::Domain(format!(
                        "cumulative arrivals need nonnegative finite dates, got {other}"
                    )))
                }
            };
            match steps.last_mut() {
                Some((last, total)) if last == d => *total += l,
                _ => steps.push((d.clone(), l)),
            }
        }
        let mut points = Vec::with_capacity(steps.len() + 1);
        let mut total = 0u64;
        if steps.first().is_none_or(|(d, _)| !d.is_zero()) {
            points.push(Breakpoint::new(T::zero(), Ext::zero(), Ext::zero(), T::zero()));
        }
        for (d, l) in steps {
            let before = Ext::Finite(T::from_count(total));
            total += l;
            points.push(Breakpoint::new(
                d,
                before,
                Ext::Finite(T::from_count(total)),
                T::zero(),
            ));
        }
        Curve::new(points, Tail::Affine)
    }

    /// `T = R↑`: the arrival time function.
    pub fn arrival_time_function(&self) -> Result<Curve<T>> {
        Ok(self.cumulative_arrivals()?.upper_pseudo_inverse())
    }

    /// `T(x)` straight from its definition as the earliest date whose
    /// cumulative length exceeds `x`.
    pub fn arrival_time_at(&self, x: &T) -> Ext<T> {
        let mut cum = T::zero();
        for (d, &l) in self.dates.iter().zip(&self.lengths) {
            cum = cum + T::from_count(l);
            if cum > *x {
                return d.clone();
            }
        }
        Ext::PosInf
    }

    /// Merges packets with equal dates into one packet carrying the summed
    /// length. Flow ids are taken from the first packet of each group.
    pub fn aggregate_simultaneous(&self) -> Self {
        let mut out = PacketSequence::empty();
        for n in 0..self.len() {
            if out.dates.last() == Some(&self.dates[n]) {
                *out.lengths.last_mut().unwrap() += self.lengths[n];
            } else {
                out.dates.push(self.dates[n].clone());
                out.lengths.push(self.lengths[n]);
                out.flows.push(self.flows[n]);
            }
        }
        out
    }

    /// Interleaves several sequences by date; on ties, earlier arguments
    /// come first and each argument keeps its own order.
    pub fn merge(parts: &[PacketSequence<T>]) -> Self {
        let mut tagged: Vec<(usize, usize)> = parts
            .iter()
            .enumerate()
            .flat_map(|(k, p)| (0..p.len()).map(move |n| (k, n)))
            .collect();
        tagged.sort_by(|&(ka, na), &(kb, nb)| {
            parts[ka].dates[na]
                .partial_cmp(&parts[kb].dates[nb])
                .expect("dates are ordered")
                .then(ka.cmp(&kb))
                .then(na.cmp(&nb))
        });
        let mut out = PacketSequence::empty();
        for (k, n) in tagged {
            out.dates.push(parts[k].dates[n].clone());
            out.lengths.push(parts[k].lengths[n]);
            out.flows.push(parts[k].flows[n]);
        }
        out
    }
}

/// The packets of one flow inside a larger sequence.
#[derive(Clone, Debug)]
pub struct FlowView<'a, T> {
    parent: &'a PacketSequence<T>,
    flow: FlowId,
    index_map: Vec<usize>,
}

impl<'a, T: Scalar> FlowView<'a, T> {
    pub fn flow(&self) -> FlowId {
        self.flow
    }

    pub fn parent(&self) -> &'a PacketSequence<T> {
        self.parent
    }

    /// Positions of this flow's packets in the parent, increasing.
    pub fn index_map(&self) -> &[usize] {
        &self.index_map
    }

    pub fn len(&self) -> usize {
        self.index_map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index_map.is_empty()
    }

    pub fn dates(&self) -> Vec<Ext<T>> {
        self.index_map
            .iter()
            .map(|&n| self.parent.dates[n].clone())
            .collect()
    }

    pub fn lengths(&self) -> Vec<u64> {
        self.index_map.iter().map(|&n| self.parent.lengths[n]).collect()
    }

    /// The flow as a standalone sequence.
    pub fn to_sequence(&self) -> PacketSequence<T> {
        PacketSequence {
            dates: self.dates(),
            lengths: self.lengths(),
            flows: vec![self.flow; self.len()],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};
    use num_rational::BigRational;

    type Seq = PacketSequence<BigRational>;

    fn fin(v: BigRational) -> Ext<BigRational> {
        Ext::Finite(v)
    }

    fn six_flows() -> Seq {
        Seq::new(
            (0..6).map(int).collect(),
            vec![1; 6],
            vec![3, 4, 1, 2, 1, 3],
        )
        .unwrap()
    }

    #[test]
    fn flow_index_matches_worked_example() {
        let s = six_flows();
        // Packet 5 (one-based) is the second packet of flow 1.
        assert_eq!(s.flow_index(4).unwrap(), 1);
        assert_eq!(s.flow_index(0).unwrap(), 0);
        assert_eq!(s.packet_of_flow(1, 1).unwrap(), 4);
        assert_eq!(s.packet_of_flow(3, 0).unwrap(), 0);
        assert_eq!(s.packet_of_flow(3, 1).unwrap(), 5);
        assert!(s.flow_index(6).is_err());
        assert!(matches!(s.packet_of_flow(7, 0), Err(Error::FlowAbsent { .. })));
        assert!(s.packet_of_flow(4, 1).is_err());
    }

    #[test]
    fn single_flow_indices() {
        let s = Seq::single_flow(vec![int(0); 3], vec![1; 3]).unwrap();
        assert_eq!(s.flow_index(2).unwrap(), 2);
        for i in 0..3 {
            assert_eq!(s.packet_of_flow(1, i).unwrap(), i);
        }
    }

    #[test]
    fn flow_view_extracts_subsequence() {
        let s = six_flows();
        let v = s.flow_view(3);
        assert_eq!(v.index_map(), &[0, 5]);
        assert_eq!(v.dates(), vec![fin(int(0)), fin(int(5))]);
        assert_eq!(s.flow_ids(), vec![1, 2, 3, 4]);
    }

    #[test]
    fn validation() {
        assert!(Seq::single_flow(vec![int(1), int(0)], vec![1, 1]).is_err());
        assert!(Seq::single_flow(vec![int(0)], vec![0]).is_err());
        assert!(Seq::new(vec![int(0)], vec![1, 2], vec![1]).is_err());
    }

    #[test]
    fn cumulative_arrivals_is_left_continuous() {
        let s = Seq::single_flow(vec![int(0), int(5)], vec![2, 1]).unwrap();
        let r = s.cumulative_arrivals().unwrap();
        assert_eq!(r.eval(&int(0)).unwrap(), fin(int(0)));
        assert_eq!(r.eval(&int(5)).unwrap(), fin(int(2)));
        assert_eq!(r.eval(&int(6)).unwrap(), fin(int(3)));
        assert_eq!(r.right_limit(&int(0)).unwrap(), fin(int(2)));
        let empty = Seq::empty().cumulative_arrivals().unwrap();
        assert_eq!(empty.eval(&int(100)).unwrap(), fin(int(0)));
        let neg = Seq::single_flow(vec![int(-1)], vec![1]).unwrap();
        assert!(neg.cumulative_arrivals().is_err());
    }

    #[test]
    fn arrival_time_function_round_trip() {
        let s = Seq::single_flow(vec![int(1), int(1), rat(7, 2), int(6)], vec![2, 1, 3, 1]).unwrap();
        let t = s.arrival_time_function().unwrap();
        for k in 0..30 {
            let x = rat(k, 3);
            assert_eq!(t.eval(&x).unwrap(), s.arrival_time_at(&x), "x = {x}");
        }
        assert_eq!(t.eval(&int(1)).unwrap(), fin(int(1)));
        assert_eq!(t.eval(&int(7)).unwrap(), Ext::PosInf);
        let r = s.cumulative_arrivals().unwrap();
        let back = t.lower_pseudo_inverse();
        for k in 0..30 {
            let x = rat(k, 4);
            assert_eq!(back.eval(&x).unwrap(), r.eval(&x).unwrap(), "x = {x}");
        }
        let empty = Seq::empty().arrival_time_function().unwrap();
        assert_eq!(empty.eval(&int(0)).unwrap(), Ext::PosInf);
        assert_eq!(Seq::empty().arrival_time_at(&int(3)), Ext::PosInf);
    }

    #[test]
    fn aggregation_keeps_cumulative_arrivals() {
        let s = Seq::single_flow(vec![int(0), int(0), int(2), int(2), int(2)], vec![1, 2, 1, 1, 4]).unwrap();
        let a = s.aggregate_simultaneous();
        assert_eq!(a.lengths(), &[3, 6]);
        let r1 = s.cumulative_arrivals().unwrap();
        let r2 = a.cumulative_arrivals().unwrap();
        for k in 0..12 {
            let x = rat(k, 3);
            assert_eq!(r1.eval(&x).unwrap(), r2.eval(&x).unwrap());
            assert_eq!(r1.right_limit(&x).unwrap(), r2.right_limit(&x).unwrap());
        }
    }

    #[test]
    fn merge_is_stable() {
        let a = Seq::new(vec![int(0), int(5)], vec![2, 2], vec![1, 1]).unwrap();
        let b = Seq::new(vec![int(5)], vec![1], vec![2]).unwrap();
        let m = Seq::merge(&[a, b]);
        assert_eq!(m.flows(), &[1, 1, 2]);
    }
}
