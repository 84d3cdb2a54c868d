//! Minimal regulators.
//!
//! The per-flow regulator releases packet `n` at
//! `D[n] = max(A[n], D[n-1], Pi(D, L)[n])`. The interleaved regulator keeps a
//! single FIFO queue for several flows and applies the same rule with the
//! operator and history of the flow the packet belongs to. Both are
//! streaming: a release date is final as soon as it is returned.

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::operators::RegulationOperator;
use crate::scalar::Scalar;
use crate::traces::{FlowId, PacketSequence};

/// Incremental minimal regulator for one flow.
#[derive(Clone, Debug)]
pub struct PerFlowRegulator<T> {
    op: RegulationOperator<T>,
    out_dates: Vec<Ext<T>>,
    out_lengths: Vec<u64>,
}

impl<T: Scalar> PerFlowRegulator<T> {
    pub fn new(op: RegulationOperator<T>) -> Self {
        PerFlowRegulator {
            op,
            out_dates: Vec::new(),
            out_lengths: Vec::new(),
        }
    }

    pub fn operator(&self) -> &RegulationOperator<T> {
        &self.op
    }

    /// Accepts the next packet and returns its release date.
    pub fn push(&mut self, date: Ext<T>, length: u64) -> Ext<T> {
        let n = self.out_dates.len();
        self.out_lengths.push(length);
        let bound = self.op.evaluate_unchecked(&self.out_dates, &self.out_lengths, n);
        let prev = self.out_dates.last().cloned().unwrap_or(Ext::NegInf);
        let d = date.max(prev).max(bound);
        self.out_dates.push(d.clone());
        d
    }

    pub fn released(&self) -> &[Ext<T>] {
        &self.out_dates
    }

    pub fn released_lengths(&self) -> &[u64] {
        &self.out_lengths
    }
}

/// Incremental minimal interleaved regulator.
#[derive(Clone, Debug)]
pub struct InterleavedRegulator<T> {
    ops: BTreeMap<FlowId, RegulationOperator<T>>,
    out_dates: Vec<Ext<T>>,
    views: BTreeMap<FlowId, (Vec<Ext<T>>, Vec<u64>)>,
}

impl<T: Scalar> InterleavedRegulator<T> {
    pub fn new(ops: BTreeMap<FlowId, RegulationOperator<T>>) -> Self {
        InterleavedRegulator {
            ops,
            out_dates: Vec::new(),
            views: BTreeMap::new(),
        }
    }

    /// Earliest date the flow's constraint allows for a packet of `length`
    /// appended to the flow's released history.
    fn flow_bound(&self, flow: FlowId, length: u64) -> Result<Ext<T>> {
        let op = self.ops.get(&flow).ok_or(Error::MissingOperator(flow))?;
        let (dates, lengths) = match self.views.get(&flow) {
            Some((d, l)) => (d.as_slice(), l.as_slice()),
            None => (&[][..], &[][..]),
        };
        let mut lengths = lengths.to_vec();
        lengths.push(length);
        Ok(op.evaluate_unchecked(dates, &lengths, dates.len()))
    }

    fn record(&mut self, release: Ext<T>, length: u64, flow: FlowId) {
        let view = self.views.entry(flow).or_default();
        view.0.push(release.clone());
        view.1.push(length);
        self.out_dates.push(release);
    }

    pub fn push(&mut self, date: Ext<T>, length: u64, flow: FlowId) -> Result<Ext<T>> {
        let bound = self.flow_bound(flow, length)?;
        let prev = self.out_dates.last().cloned().unwrap_or(Ext::NegInf);
        let d = date.max(prev).max(bound);
        self.record(d.clone(), length, flow);
        Ok(d)
    }

    pub fn released(&self) -> &[Ext<T>] {
        &self.out_dates
    }
}

fn check_bindings<T>(ops: &BTreeMap<FlowId, RegulationOperator<T>>, flows: &[FlowId]) -> Result<()> {
    match flows.iter().find(|f| !ops.contains_key(f)) {
        Some(&f) => Err(Error::MissingOperator(f)),
        None => Ok(()),
    }
}

/// Minimal regulator output for a single-flow sequence.
pub fn minimal_regulate<T: Scalar>(
    op: &RegulationOperator<T>,
    seq: &PacketSequence<T>,
) -> Result<PacketSequence<T>> {
    if !seq.is_single_flow() {
        return Err(Error::NotSingleFlow(seq.flow_ids()));
    }
    let mut reg = PerFlowRegulator::new(op.clone());
    let dates = seq
        .dates()
        .iter()
        .zip(seq.lengths())
        .map(|(d, &l)| reg.push(d.clone(), l))
        .collect();
    seq.with_dates(dates)
}

/// Minimal interleaved regulator output.
pub fn minimal_interleaved_regulate<T: Scalar>(
    ops: &BTreeMap<FlowId, RegulationOperator<T>>,
    seq: &PacketSequence<T>,
) -> Result<PacketSequence<T>> {
    check_bindings(ops, seq.flows())?;
    let mut reg = InterleavedRegulator::new(ops.clone());
    for n in 0..seq.len() {
        reg.push(seq.dates()[n].clone(), seq.lengths()[n], seq.flows()[n])?;
    }
    seq.with_dates(reg.out_dates)
}

/// One minimal regulator per flow, each on its own flow view. The result
/// keeps input numbering and need not be increasing.
pub fn per_flow_bank<T: Scalar>(
    ops: &BTreeMap<FlowId, RegulationOperator<T>>,
    seq: &PacketSequence<T>,
) -> Result<Vec<Ext<T>>> {
    check_bindings(ops, seq.flows())?;
    let mut regs: BTreeMap<FlowId, PerFlowRegulator<T>> = BTreeMap::new();
    let mut out = Vec::with_capacity(seq.len());
    for n in 0..seq.len() {
        let f = seq.flows()[n];
        let reg = regs
            .entry(f)
            .or_insert_with(|| PerFlowRegulator::new(ops[&f].clone()));
        out.push(reg.push(seq.dates()[n].clone(), seq.lengths()[n]));
    }
    Ok(out)
}

/// Event-driven simulation of the interleaved regulator as one FIFO queue
/// in which only the head packet is examined. Returns `(release, packet)`
/// in release order.
pub fn head_of_line_schedule<T: Scalar>(
    ops: &BTreeMap<FlowId, RegulationOperator<T>>,
    seq: &PacketSequence<T>,
) -> Result<Vec<(Ext<T>, usize)>> {
    check_bindings(ops, seq.flows())?;
    let mut reg = InterleavedRegulator::new(ops.clone());
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut next_arrival = 0;
    let mut clock = Ext::NegInf;
    let mut schedule = Vec::with_capacity(seq.len());
    while schedule.len() < seq.len() {
        // Admit everything that has arrived by now.
        while next_arrival < seq.len() && seq.dates()[next_arrival] <= clock {
            queue.push_back(next_arrival);
            next_arrival += 1;
        }
        let Some(&head) = queue.front() else {
            clock = seq.dates()[next_arrival].clone();
            continue;
        };
        let eligible = reg.flow_bound(seq.flows()[head], seq.lengths()[head])?;
        if eligible <= clock {
            queue.pop_front();
            reg.record(clock.clone(), seq.lengths()[head], seq.flows()[head]);
            schedule.push((clock.clone(), head));
            continue;
        }
        // Sleep until the head becomes eligible or a new packet arrives,
        // whichever is first; arrivals never unblock the head but are
        // queued at their own time.
        clock = match seq.dates().get(next_arrival) {
            Some(a) if *a < eligible => a.clone(),
            _ => eligible,
        };
    }
    Ok(schedule)
}
