//! FIFO systems and delay measurement.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::scalar::Scalar;
use crate::traces::{FlowId, PacketSequence};

/// Number of equal steps the jitter range is split into.
const JITTER_STEPS: u64 = 4;

/// A FIFO system: every packet leaves no earlier than it arrives, and order
/// is preserved.
#[derive(Clone, Debug, PartialEq)]
pub enum FifoSystem<T> {
    Identity,
    /// Holds every packet for exactly `d`.
    Damper(T),
    /// Work-conserving server at `rate` that stops during each window.
    PreemptiveServer { rate: T, windows: Vec<(T, T)> },
    /// Random delays in `[0, d_max]`, pushed forward where needed to keep
    /// FIFO order.
    BoundedJitterRandom { seed: u64, d_max: T },
}

impl<T: Scalar> FifoSystem<T> {
    pub fn damper(d: T) -> Result<Self> {
        if d < T::zero() {
            return Err(Error::InvalidParameter(format!("damper delay {d} is negative")));
        }
        Ok(FifoSystem::Damper(d))
    }

    /// Windows are closed intervals `[start, end]` with `start < end`; they
    /// may be given in any order but must not overlap or touch.
    pub fn preemptive_server(rate: T, mut windows: Vec<(T, T)>) -> Result<Self> {
        if rate <= T::zero() {
            return Err(Error::InvalidParameter(format!("server rate {rate} is not positive")));
        }
        if let Some((s, e)) = windows.iter().find(|(s, e)| s >= e) {
            return Err(Error::InvalidParameter(format!("empty window [{s},{e}]")));
        }
        windows.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("ordered"));
        for w in windows.windows(2) {
            if w[1].0 <= w[0].1 {
                return Err(Error::InvalidParameter(format!(
                    "windows [{},{}] and [{},{}] overlap",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        Ok(FifoSystem::PreemptiveServer { rate, windows })
    }

    pub fn bounded_jitter(seed: u64, d_max: T) -> Result<Self> {
        if d_max < T::zero() {
            return Err(Error::InvalidParameter(format!("jitter bound {d_max} is negative")));
        }
        Ok(FifoSystem::BoundedJitterRandom { seed, d_max })
    }

    pub fn apply(&self, seq: &PacketSequence<T>) -> Result<PacketSequence<T>> {
        let dates = match self {
            FifoSystem::Identity => seq.dates().to_vec(),
            FifoSystem::Damper(d) => seq.dates().iter().map(|a| a.shift(d)).collect(),
            FifoSystem::PreemptiveServer { rate, windows } => serve(rate, windows, seq)?,
            FifoSystem::BoundedJitterRandom { seed, d_max } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let step = d_max.clone() / T::from_count(JITTER_STEPS);
                let mut prev = Ext::NegInf;
                seq.dates()
                    .iter()
                    .map(|a| {
                        let k = rng.random_range(0..=JITTER_STEPS);
                        let d = a.shift(&(step.clone() * T::from_count(k))).max(prev.clone());
                        prev = d.clone();
                        d
                    })
                    .collect()
            }
        };
        seq.with_dates(dates)
    }
}

/// Completion date of `work` time units of service started at `t`, skipping
/// the (sorted, disjoint) windows.
fn finish<T: Scalar>(mut t: T, mut work: T, windows: &[(T, T)]) -> T {
    for (s, e) in windows {
        if *e <= t {
            continue;
        }
        if *s <= t {
            t = e.clone();
            continue;
        }
        let available = s.clone() - t.clone();
        if work <= available {
            break;
        }
        work = work - available;
        t = e.clone();
    }
    t + work
}

fn serve<T: Scalar>(rate: &T, windows: &[(T, T)], seq: &PacketSequence<T>) -> Result<Vec<Ext<T>>> {
    let mut prev: Option<T> = None;
    let mut out = Vec::with_capacity(seq.len());
    for (a, &l) in seq.dates().iter().zip(seq.lengths()) {
        let a = match a {
            Ext::Finite(a) if *a >= T::zero() => a.clone(),
            other => {
                return Err(Error::Domain(format!(
                    "server input dates must be finite and nonnegative, got {other}"
                )))
            }
        };
        let start = match prev {
            Some(p) if p > a => p,
            _ => a,
        };
        let done = finish(start, T::from_count(l) / rate.clone(), windows);
        out.push(Ext::Finite(done.clone()));
        prev = Some(done);
    }
    Ok(out)
}

fn delay_pairs<'a, T: Scalar>(
    input: &'a PacketSequence<T>,
    output: &'a [Ext<T>],
) -> Result<impl Iterator<Item = (usize, T)> + 'a> {
    if input.len() != output.len() {
        return Err(Error::Mismatch(format!(
            "{} input packets, {} output packets",
            input.len(),
            output.len()
        )));
    }
    let mut delays = Vec::with_capacity(output.len());
    for (n, (a, d)) in input.dates().iter().zip(output).enumerate() {
        match (a, d) {
            (Ext::Finite(a), Ext::Finite(d)) if d >= a => delays.push((n, d.clone() - a.clone())),
            (Ext::Finite(_), Ext::Finite(_)) => {
                return Err(Error::Mismatch(format!("packet {n} leaves before it arrives")))
            }
            _ => return Err(Error::Domain(format!("packet {n} has an infinite date"))),
        }
    }
    Ok(delays.into_iter())
}

/// `D[n] - A[n]` for every packet.
pub fn packet_delays<T: Scalar>(input: &PacketSequence<T>, output: &[Ext<T>]) -> Result<Vec<T>> {
    Ok(delay_pairs(input, output)?.map(|(_, d)| d).collect())
}

/// `max D[n] - A[n]` with output dates given in input numbering; `-inf`
/// for an empty sequence.
pub fn worst_case_delay_dates<T: Scalar>(
    input: &PacketSequence<T>,
    output: &[Ext<T>],
) -> Result<Ext<T>> {
    Ok(Ext::max_all(delay_pairs(input, output)?.map(|(_, d)| Ext::Finite(d))))
}

/// Worst-case delay of each flow, with output dates in input numbering.
pub fn per_flow_worst_case_delay_dates<T: Scalar>(
    input: &PacketSequence<T>,
    output: &[Ext<T>],
) -> Result<BTreeMap<FlowId, T>> {
    let mut out: BTreeMap<FlowId, T> = BTreeMap::new();
    for (n, d) in delay_pairs(input, output)? {
        let f = input.flows()[n];
        match out.get_mut(&f) {
            Some(cur) if *cur >= d => {}
            Some(cur) => *cur = d,
            None => {
                out.insert(f, d);
            }
        }
    }
    Ok(out)
}

fn check_matched<T: Scalar>(input: &PacketSequence<T>, output: &PacketSequence<T>) -> Result<()> {
    if input.lengths() != output.lengths() || input.flows() != output.flows() {
        return Err(Error::Mismatch("lengths or flows differ".into()));
    }
    Ok(())
}

pub fn worst_case_delay<T: Scalar>(
    input: &PacketSequence<T>,
    output: &PacketSequence<T>,
) -> Result<Ext<T>> {
    check_matched(input, output)?;
    worst_case_delay_dates(input, output.dates())
}

pub fn per_flow_worst_case_delay<T: Scalar>(
    input: &PacketSequence<T>,
    output: &PacketSequence<T>,
) -> Result<BTreeMap<FlowId, T>> {
    check_matched(input, output)?;
    per_flow_worst_case_delay_dates(input, output.dates())
}
