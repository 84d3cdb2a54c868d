//! Oracles and checkers for the regularity and regulator results.
//!
//! Checks return a [`CheckReport`] whose text form is
//! `CHECK <name> PASS|FAIL [witness: n=<i> lhs=<v> rhs=<v>]`, with `n`
//! counted from 1. Inputs that do not meet a check's precondition give
//! [`Error::Precondition`] instead of a verdict. All comparisons are exact.

pub mod gen;

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curves::Curve;
use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::operators::{arrival_curve_violation, EnvelopeViolation, Instant, RegulationOperator};
use crate::regulators::{minimal_interleaved_regulate, per_flow_bank};
use crate::scalar::Scalar;
use crate::systems::{per_flow_worst_case_delay_dates, worst_case_delay_dates, FifoSystem};
use crate::traces::{FlowId, PacketSequence};

pub type OperatorMap<T> = BTreeMap<FlowId, RegulationOperator<T>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

/// Packet `index` (zero-based) where `lhs` and `rhs` were compared.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness<T> {
    pub index: usize,
    pub lhs: Ext<T>,
    pub rhs: Ext<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport<T> {
    pub name: String,
    pub verdict: Verdict,
    pub witness: Option<Witness<T>>,
}

impl<T> CheckReport<T> {
    fn new(name: &str, pass: bool, witness: Option<Witness<T>>) -> Self {
        CheckReport {
            name: name.to_string(),
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
            witness,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

impl<T: fmt::Display> fmt::Display for CheckReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        };
        write!(f, "CHECK {} {}", self.name, verdict)?;
        if let Some(w) = &self.witness {
            write!(f, " [witness: n={} lhs={} rhs={}]", w.index + 1, w.lhs, w.rhs)?;
        }
        Ok(())
    }
}

fn finite_dates<T: Scalar>(seq: &PacketSequence<T>) -> Result<Vec<T>> {
    seq.dates()
        .iter()
        .map(|d| match d {
            Ext::Finite(d) if *d >= T::zero() => Ok(d.clone()),
            other => Err(Error::Precondition(format!(
                "dates must be finite and nonnegative, got {other}"
            ))),
        })
        .collect()
}

/// A violated pairwise inequality between packets `m <= n`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairViolation<T> {
    pub m: usize,
    pub n: usize,
    pub lhs: Ext<T>,
    pub rhs: Ext<T>,
}

/// The three formulations of an arrival-curve constraint, each with its
/// first violation if any.
#[derive(Clone, Debug, PartialEq)]
pub struct Theorem1Outcome<T> {
    /// `R(t) - R(s) <= sigma(t - s)` for all `s <= t`.
    pub envelope: Option<EnvelopeViolation<T>>,
    /// `L[m] + ... + L[n] <= sigma+(A[n] - A[m])` for all `m <= n`.
    pub sum_bound: Option<PairViolation<T>>,
    /// `A[n] - A[m] >= sigma_lower_inverse(L[m] + ... + L[n])` for all `m <= n`.
    pub gap_bound: Option<PairViolation<T>>,
}

impl<T> Theorem1Outcome<T> {
    pub fn verdicts(&self) -> [bool; 3] {
        [
            self.envelope.is_none(),
            self.sum_bound.is_none(),
            self.gap_bound.is_none(),
        ]
    }

    pub fn agree(&self) -> bool {
        let v = self.verdicts();
        v[0] == v[1] && v[1] == v[2]
    }
}

/// Scans pairs `m <= n` (by increasing `n`, then decreasing `m`) for the
/// first one where `holds(sum, gap)` fails.
fn first_pair<T: Scalar>(
    dates: &[T],
    lengths: &[u64],
    mut test: impl FnMut(&T, &T) -> Result<Option<(Ext<T>, Ext<T>)>>,
) -> Result<Option<PairViolation<T>>> {
    for n in 0..dates.len() {
        let mut sum = T::zero();
        for m in (0..=n).rev() {
            sum = sum + T::from_count(lengths[m]);
            let gap = dates[n].clone() - dates[m].clone();
            if let Some((lhs, rhs)) = test(&sum, &gap)? {
                return Ok(Some(PairViolation { m, n, lhs, rhs }));
            }
        }
    }
    Ok(None)
}

/// Evaluates all three arrival-curve formulations on a sequence taken as
/// one flow.
pub fn theorem1_conditions<T: Scalar>(
    seq: &PacketSequence<T>,
    sigma: &Curve<T>,
) -> Result<Theorem1Outcome<T>> {
    let dates = finite_dates(seq)?;
    let envelope = arrival_curve_violation(seq, sigma)?;
    let sum_bound = first_pair(&dates, seq.lengths(), |sum, gap| {
        let bound = sigma.right_limit(gap)?;
        let lhs = Ext::Finite(sum.clone());
        Ok((lhs > bound).then_some((lhs, bound)))
    })?;
    let gap_bound = first_pair(&dates, seq.lengths(), |sum, gap| {
        let bound = sigma.lower_inverse_at(sum)?;
        let lhs = Ext::Finite(gap.clone());
        Ok((lhs < bound).then_some((lhs, bound)))
    })?;
    Ok(Theorem1Outcome {
        envelope,
        sum_bound,
        gap_bound,
    })
}

/// Last packet dated at the endpoint of an envelope violation.
fn envelope_index<T: Scalar>(seq: &PacketSequence<T>, v: &EnvelopeViolation<T>) -> usize {
    let t = match &v.t {
        Instant::At(t) | Instant::After(t) => Ext::Finite(t.clone()),
    };
    seq.dates().iter().rposition(|d| *d == t).unwrap_or(0)
}

/// Passes iff the three formulations agree. The witness is the first
/// violation found, if the constraint does not hold.
pub fn check_theorem1<T: Scalar>(seq: &PacketSequence<T>, sigma: &Curve<T>) -> Result<CheckReport<T>> {
    let out = theorem1_conditions(seq, sigma)?;
    let witness = if let Some(p) = out.gap_bound.as_ref().or(out.sum_bound.as_ref()) {
        Some(Witness {
            index: p.n,
            lhs: p.lhs.clone(),
            rhs: p.rhs.clone(),
        })
    } else {
        out.envelope.as_ref().map(|v| Witness {
            index: envelope_index(seq, v),
            lhs: Ext::Finite(v.increase.clone()),
            rhs: v.bound.clone(),
        })
    };
    Ok(CheckReport::new("theorem1", out.agree(), witness))
}

/// `L[m] + ... + L[n-1] <= sigma(A[n] - A[m])` for all `m <= n`. This is
/// implied by the arrival-curve constraint but does not imply it.
pub fn sum_before_bound_holds<T: Scalar>(seq: &PacketSequence<T>, sigma: &Curve<T>) -> Result<bool> {
    let dates = finite_dates(seq)?;
    let lengths = seq.lengths();
    for n in 0..dates.len() {
        let mut sum = T::zero();
        for m in (0..=n).rev() {
            if m < n {
                sum = sum + T::from_count(lengths[m]);
            }
            if Ext::Finite(sum.clone()) > sigma.eval(&(dates[n].clone() - dates[m].clone()))? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Searches small traces for one that meets [`sum_before_bound_holds`]
/// but is not constrained by `sigma`.
pub fn non_equivalence_witness<T: Scalar>(
    curves: &[Curve<T>],
    max_packets: usize,
    max_length: u64,
    max_date: i64,
) -> Result<Option<(PacketSequence<T>, Curve<T>)>> {
    for sigma in curves {
        for k in 1..=max_packets {
            let mut lengths = vec![1u64; k];
            loop {
                let mut dates = vec![0i64; k];
                loop {
                    let seq = PacketSequence::single_flow(
                        dates.iter().map(|&d| T::from_int(d)).collect(),
                        lengths.clone(),
                    )?;
                    if sum_before_bound_holds(&seq, sigma)? && arrival_curve_violation(&seq, sigma)?.is_some() {
                        return Ok(Some((seq, sigma.clone())));
                    }
                    if !next_increasing(&mut dates, max_date) {
                        break;
                    }
                }
                if !next_counter(&mut lengths, 1, max_length) {
                    break;
                }
            }
        }
    }
    Ok(None)
}

fn next_counter(v: &mut [u64], lo: u64, hi: u64) -> bool {
    for x in v.iter_mut().rev() {
        if *x < hi {
            *x += 1;
            return true;
        }
        *x = lo;
    }
    false
}

/// Next nondecreasing vector with entries in `0..=hi`.
fn next_increasing(v: &mut [i64], hi: i64) -> bool {
    for i in (0..v.len()).rev() {
        if v[i] < hi {
            v[i] += 1;
            let x = v[i];
            v[i + 1..].iter_mut().for_each(|y| *y = x);
            return true;
        }
    }
    false
}

/// The sum and gap formulations rewritten with `lambda = sigma_upper_inverse`:
/// `sum <= lambda_upper_inverse(gap)` and `gap >= lambda-(sum)`. For a
/// left-continuous `sigma` they agree with the originals.
pub fn dual_conditions<T: Scalar>(seq: &PacketSequence<T>, sigma: &Curve<T>) -> Result<[bool; 2]> {
    let dates = finite_dates(seq)?;
    let lambda = sigma.upper_pseudo_inverse();
    let sum_ok = first_pair(&dates, seq.lengths(), |sum, gap| {
        let bound = lambda.upper_inverse_at(gap)?;
        let lhs = Ext::Finite(sum.clone());
        Ok((lhs > bound).then_some((lhs, bound)))
    })?
    .is_none();
    let gap_ok = first_pair(&dates, seq.lengths(), |sum, gap| {
        let bound = lambda.left_limit(sum)?;
        let lhs = Ext::Finite(gap.clone());
        Ok((lhs < bound).then_some((lhs, bound)))
    })?
    .is_none();
    Ok([sum_ok, gap_ok])
}

fn bound_ops<T: Scalar>(ops: &OperatorMap<T>, seq: &PacketSequence<T>) -> Result<()> {
    match seq.flows().iter().find(|f| !ops.contains_key(f)) {
        Some(&f) => Err(Error::MissingOperator(f)),
        None => Ok(()),
    }
}

/// First packet (global index) whose flow view breaks its constraint.
fn first_irregular<T: Scalar>(ops: &OperatorMap<T>, seq: &PacketSequence<T>) -> Result<Option<Witness<T>>> {
    bound_ops(ops, seq)?;
    let mut worst: Option<Witness<T>> = None;
    for f in seq.flow_ids() {
        let view = seq.flow_view(f);
        if let Some((i, lhs, rhs)) = ops[&f].first_violation(&view.dates(), &view.lengths()) {
            let index = view.index_map()[i];
            if worst.as_ref().is_none_or(|w| index < w.index) {
                worst = Some(Witness { index, lhs, rhs });
            }
        }
    }
    Ok(worst)
}

/// Every flow view regular under its operator.
pub fn check_regularity<T: Scalar>(ops: &OperatorMap<T>, seq: &PacketSequence<T>) -> Result<CheckReport<T>> {
    let w = first_irregular(ops, seq)?;
    Ok(CheckReport::new("regularity", w.is_none(), w))
}

/// Validity of a candidate regulator output: same packets, no packet
/// released before it arrives, and every flow view regular.
fn check_candidate<T: Scalar>(
    ops: &OperatorMap<T>,
    input: &PacketSequence<T>,
    candidate: &PacketSequence<T>,
) -> Result<()> {
    if input.len() != candidate.len()
        || input.lengths() != candidate.lengths()
        || input.flows() != candidate.flows()
    {
        return Err(Error::Precondition("candidate does not carry the input packets".into()));
    }
    if let Some(n) = (0..input.len()).find(|&n| candidate.dates()[n] < input.dates()[n]) {
        return Err(Error::Precondition(format!(
            "candidate releases packet {} before its arrival",
            n + 1
        )));
    }
    if let Some(w) = first_irregular(ops, candidate)? {
        return Err(Error::Precondition(format!(
            "candidate is not regular at packet {}",
            w.index + 1
        )));
    }
    Ok(())
}

/// Passes iff `candidate` is nowhere earlier than the minimal (interleaved)
/// regulator output. A single-flow input makes this the per-flow case.
pub fn check_minimality<T: Scalar>(
    ops: &OperatorMap<T>,
    input: &PacketSequence<T>,
    candidate: &PacketSequence<T>,
) -> Result<CheckReport<T>> {
    check_candidate(ops, input, candidate)?;
    let minimal = minimal_interleaved_regulate(ops, input)?;
    let w = (0..input.len())
        .find(|&n| candidate.dates()[n] < minimal.dates()[n])
        .map(|n| Witness {
            index: n,
            lhs: candidate.dates()[n].clone(),
            rhs: minimal.dates()[n].clone(),
        });
    Ok(CheckReport::new("minimality", w.is_none(), w))
}

/// Passes iff every output date is exactly
/// `max(A[n], D[n-1], Pi_f(D_f, L_f)[i])` for the packet's flow `f` and
/// rank `i` within it.
pub fn check_local_tightness<T: Scalar>(
    ops: &OperatorMap<T>,
    input: &PacketSequence<T>,
    output: &PacketSequence<T>,
) -> Result<CheckReport<T>> {
    bound_ops(ops, input)?;
    if input.len() != output.len() || input.flows() != output.flows() || input.lengths() != output.lengths() {
        return Err(Error::Mismatch("output does not carry the input packets".into()));
    }
    let mut views: BTreeMap<FlowId, (Vec<Ext<T>>, Vec<u64>)> = BTreeMap::new();
    for n in 0..input.len() {
        let f = input.flows()[n];
        let (dates, lengths) = views.entry(f).or_default();
        lengths.push(input.lengths()[n]);
        let i = dates.len();
        let bound = ops[&f].evaluate(dates, lengths, i)?;
        let prev = if n == 0 { Ext::NegInf } else { output.dates()[n - 1].clone() };
        let expected = input.dates()[n].clone().max(prev).max(bound);
        if output.dates()[n] != expected {
            return Ok(CheckReport::new(
                "local-tightness",
                false,
                Some(Witness {
                    index: n,
                    lhs: output.dates()[n].clone(),
                    rhs: expected,
                }),
            ));
        }
        dates.push(output.dates()[n].clone());
    }
    Ok(CheckReport::new("local-tightness", true, None))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShapingMode {
    /// One minimal regulator per flow; delays compared flow by flow.
    PerFlow,
    /// One minimal interleaved regulator; overall delays compared.
    Interleaved,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShapingOutcome<T> {
    pub system_output: PacketSequence<T>,
    /// Regulator output in input numbering.
    pub regulated: Vec<Ext<T>>,
    pub system_delay: Ext<T>,
    pub combined_delay: Ext<T>,
    pub system_per_flow: BTreeMap<FlowId, T>,
    pub combined_per_flow: BTreeMap<FlowId, T>,
}

impl<T: Scalar> ShapingOutcome<T> {
    pub fn holds(&self, mode: ShapingMode) -> bool {
        match mode {
            ShapingMode::PerFlow => self.system_per_flow == self.combined_per_flow,
            ShapingMode::Interleaved => self.system_delay == self.combined_delay,
        }
    }
}

/// Runs the system, then the regulator, and measures both worst-case
/// delays from the original input.
pub fn shaping_for_free<T: Scalar>(
    sys: &FifoSystem<T>,
    ops: &OperatorMap<T>,
    input: &PacketSequence<T>,
    mode: ShapingMode,
) -> Result<ShapingOutcome<T>> {
    if let Some(w) = first_irregular(ops, input)? {
        return Err(Error::Precondition(format!(
            "input is not regular at packet {}",
            w.index + 1
        )));
    }
    let system_output = sys.apply(input)?;
    let regulated = match mode {
        ShapingMode::PerFlow => per_flow_bank(ops, &system_output)?,
        ShapingMode::Interleaved => minimal_interleaved_regulate(ops, &system_output)?.dates().to_vec(),
    };
    Ok(ShapingOutcome {
        system_delay: worst_case_delay_dates(input, system_output.dates())?,
        combined_delay: worst_case_delay_dates(input, &regulated)?,
        system_per_flow: per_flow_worst_case_delay_dates(input, system_output.dates())?,
        combined_per_flow: per_flow_worst_case_delay_dates(input, &regulated)?,
        system_output,
        regulated,
    })
}

pub fn check_shaping_for_free<T: Scalar>(
    sys: &FifoSystem<T>,
    ops: &OperatorMap<T>,
    input: &PacketSequence<T>,
    mode: ShapingMode,
) -> Result<CheckReport<T>> {
    let out = shaping_for_free(sys, ops, input, mode)?;
    if out.holds(mode) {
        return Ok(CheckReport::new("shaping-for-free", true, None));
    }
    // Point at the packet with the largest delay after the regulator.
    let delays = crate::systems::packet_delays(input, &out.regulated)?;
    let flow_delay = |f: FlowId| match mode {
        ShapingMode::PerFlow => out.system_per_flow.get(&f).cloned().map(Ext::Finite),
        ShapingMode::Interleaved => Some(out.system_delay.clone()),
    };
    let index = (0..delays.len())
        .find(|&n| Some(Ext::Finite(delays[n].clone())) > flow_delay(input.flows()[n]))
        .unwrap_or(0);
    let rhs = flow_delay(input.flows()[index]).unwrap_or(Ext::NegInf);
    Ok(CheckReport::new(
        "shaping-for-free",
        false,
        Some(Witness {
            index,
            lhs: Ext::Finite(delays[index].clone()),
            rhs,
        }),
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DominanceOutcome<T> {
    pub interleaved: Vec<Ext<T>>,
    pub bank: Vec<Ext<T>>,
    /// Zero-based packets with a strictly later interleaved release.
    pub strict: Vec<usize>,
}

impl<T: Scalar> DominanceOutcome<T> {
    pub fn first_violation(&self) -> Option<usize> {
        (0..self.bank.len()).find(|&n| self.interleaved[n] < self.bank[n])
    }
}

pub fn dominance<T: Scalar>(ops: &OperatorMap<T>, seq: &PacketSequence<T>) -> Result<DominanceOutcome<T>> {
    let interleaved = minimal_interleaved_regulate(ops, seq)?.dates().to_vec();
    let bank = per_flow_bank(ops, seq)?;
    let strict = (0..bank.len()).filter(|&n| interleaved[n] > bank[n]).collect();
    Ok(DominanceOutcome {
        interleaved,
        bank,
        strict,
    })
}

/// Passes iff the interleaved output is nowhere earlier than the bank's.
pub fn check_dominance<T: Scalar>(ops: &OperatorMap<T>, seq: &PacketSequence<T>) -> Result<CheckReport<T>> {
    let out = dominance(ops, seq)?;
    let w = out.first_violation().map(|n| Witness {
        index: n,
        lhs: out.interleaved[n].clone(),
        rhs: out.bank[n].clone(),
    });
    Ok(CheckReport::new("dominance", w.is_none(), w))
}

/// Randomized causality, shift and monotonicity checks of one operator on
/// the dates and lengths of `seq`.
pub fn check_c_conditions<T: Scalar>(
    op: &RegulationOperator<T>,
    seq: &PacketSequence<T>,
    seed: u64,
    trials: usize,
) -> Result<CheckReport<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dates = seq.dates();
    let lengths = seq.lengths();
    let fail = |index, lhs, rhs| Ok(CheckReport::new("c-conditions", false, Some(Witness { index, lhs, rhs })));
    let base: Vec<Ext<T>> = (0..dates.len())
        .map(|n| op.evaluate(dates, lengths, n))
        .collect::<Result<_>>()?;
    for _ in 0..trials {
        // Shift invariance.
        let h = gen::rational::<T, _>(&mut rng, -8..=8, 4);
        let shifted: Vec<Ext<T>> = dates.iter().map(|d| d.shift(&h)).collect();
        for (n, b) in base.iter().enumerate() {
            let lhs = op.evaluate(&shifted, lengths, n)?;
            let rhs = b.shift(&h);
            if lhs != rhs {
                return fail(n, lhs, rhs);
            }
        }
        // Monotonicity in the dates.
        let mut later: Vec<Ext<T>> = Vec::with_capacity(dates.len());
        for d in dates {
            let bump = gen::rational::<T, _>(&mut rng, 0..=6, 3);
            let prev = later.last().cloned().unwrap_or(Ext::NegInf);
            later.push(d.shift(&bump).max(prev));
        }
        for (n, b) in base.iter().enumerate() {
            let rhs = op.evaluate(&later, lengths, n)?;
            if *b > rhs {
                return fail(n, b.clone(), rhs);
            }
        }
        // Causality: rewrite the future of one packet.
        if dates.is_empty() {
            continue;
        }
        let n = rng.random_range(0..dates.len());
        let mut d2 = dates.to_vec();
        let mut l2 = lengths.to_vec();
        for d in d2.iter_mut().skip(n) {
            *d = Ext::Finite(gen::rational(&mut rng, -20..=20, 2));
        }
        for l in l2.iter_mut().skip(n + 1) {
            *l = rng.random_range(1..=9);
        }
        let lhs = op.evaluate(&d2, &l2, n)?;
        if lhs != base[n] {
            return fail(n, lhs, base[n].clone());
        }
    }
    Ok(CheckReport::new("c-conditions", true, None))
}

/// Checks the pseudo-inverse identities of `f` at every pair of `points`:
///
/// * with `g` the right-continuous version of `f`, `t >= g_lower_inverse(x)`
///   iff `g(t) >= x`;
/// * `f` and its right-continuous version share the lower inverse, `f` and
///   its left-continuous version share the upper inverse;
/// * the left limit of the upper inverse is the lower inverse (for
///   `x > 0`) and the right limit of the lower inverse is the upper inverse;
/// * the inverse curves agree with the pointwise definitions.
///
/// Returns a description of each failure.
pub fn inverse_lemma_failures<T: Scalar>(f: &Curve<T>, points: &[T]) -> Result<Vec<String>> {
    let mut failures = Vec::new();
    let plus = f.right_continuous();
    let minus = f.left_continuous();
    let lower = f.lower_pseudo_inverse();
    let upper = f.upper_pseudo_inverse();
    let plus_lower: Vec<Ext<T>> = points.iter().map(|x| plus.lower_inverse_at(x)).collect::<Result<_>>()?;
    let plus_values: Vec<Ext<T>> = points.iter().map(|t| plus.eval(t)).collect::<Result<_>>()?;
    for (i, x) in points.iter().enumerate() {
        for (t, ft) in points.iter().zip(&plus_values) {
            let by_inverse = Ext::Finite(t.clone()) >= plus_lower[i];
            let by_value = *ft >= Ext::Finite(x.clone());
            if by_inverse != by_value {
                failures.push(format!("right-continuous equivalence fails at t={t}, x={x}"));
            }
        }
        let lo = f.lower_inverse_at(x)?;
        let up = f.upper_inverse_at(x)?;
        if lower.eval(x)? != lo {
            failures.push(format!("lower inverse curve differs from definition at {x}"));
        }
        if upper.eval(x)? != up {
            failures.push(format!("upper inverse curve differs from definition at {x}"));
        }
        if plus_lower[i] != lo {
            failures.push(format!("lower inverse of right-continuous version differs at {x}"));
        }
        if minus.upper_inverse_at(x)? != up {
            failures.push(format!("upper inverse of left-continuous version differs at {x}"));
        }
        if *x > T::zero() && upper.left_limit(x)? != lo {
            failures.push(format!("left limit of upper inverse differs from lower inverse at {x}"));
        }
        if lower.right_limit(x)? != up {
            failures.push(format!("right limit of lower inverse differs from upper inverse at {x}"));
        }
    }
    Ok(failures)
}
