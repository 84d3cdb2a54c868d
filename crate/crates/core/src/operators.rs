//! Regulation operators and regularity checks.
//!
//! An operator maps a single-flow sequence `(A, L)` to a sequence of
//! earliest admissible dates. Every operator here is max-plus linear:
//!
//! ```text
//! Pi(A, L)[n] = max over m < n of ( A[m] + H(m, n, L) )
//! ```
//!
//! so `Pi(A, L)[0] = -inf`, the value at `n` reads only `A[..n]` and
//! `L[..=n]`, shifting `A` shifts the result, and increasing `A` cannot
//! decrease it. A sequence is regular for `Pi` when `A >= Pi(A, L)`.
//!
//! [`RegulationOperator::evaluate`] uses a per-kind fast path;
//! [`RegulationOperator::evaluate_by_coefficients`] takes the max over the
//! closed-form coefficients. Tests hold the two equal.

use std::fmt;
use std::sync::Arc;

use crate::curves::Curve;
use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::scalar::Scalar;
use crate::traces::PacketSequence;

/// User-supplied coefficient table `H(m, n, L)`, with `m < n` zero-based.
/// It must not read `L[j]` for `j > n`.
pub type CoefficientFn<T> = Arc<dyn Fn(usize, usize, &[u64]) -> Ext<T> + Send + Sync>;

#[derive(Clone)]
pub enum RegulationOperator<T> {
    MaxPlusLinear(CoefficientFn<T>),
    /// `A[n] - A[m] >= g(L[m] + ... + L[n-1])`.
    GRegulation(Curve<T>),
    /// Arrival curve `sigma`, evaluated through its lower pseudo-inverse.
    ArrivalCurve {
        sigma: Curve<T>,
        lower_inverse: Curve<T>,
    },
    /// Length rate quotient: `A[n] - A[n-1] >= L[n-1] / rate`.
    Lrq { rate: T },
    LeakyBucket { rate: T, burst: T },
    Staircase { tau: T, burst: T },
    /// At most `packets` packets per window `tau`.
    TsnPacketRate { tau: T, packets: u64 },
    PacketSpacing { tau: T },
    /// At most `rho * t + packets` packets in any window of length `t`.
    PacketBurstiness { rho: T, packets: u64 },
    MaxOf(Box<RegulationOperator<T>>, Box<RegulationOperator<T>>),
}

fn positive<T: Scalar>(v: &T, what: &str) -> Result<()> {
    if *v > T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what} must be positive, got {v}")))
    }
}

fn nonnegative<T: Scalar>(v: &T, what: &str) -> Result<()> {
    if *v >= T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what} must be nonnegative, got {v}")))
    }
}

impl<T: Scalar> RegulationOperator<T> {
    pub fn lrq(rate: T) -> Result<Self> {
        positive(&rate, "rate")?;
        Ok(RegulationOperator::Lrq { rate })
    }

    pub fn leaky_bucket(rate: T, burst: T) -> Result<Self> {
        positive(&rate, "rate")?;
        positive(&burst, "burst")?;
        Ok(RegulationOperator::LeakyBucket { rate, burst })
    }

    pub fn staircase(tau: T, burst: T) -> Result<Self> {
        positive(&tau, "tau")?;
        positive(&burst, "burst")?;
        Ok(RegulationOperator::Staircase { tau, burst })
    }

    pub fn tsn_packet_rate(tau: T, packets: u64) -> Result<Self> {
        nonnegative(&tau, "tau")?;
        if packets == 0 {
            return Err(Error::InvalidParameter("K must be at least 1".into()));
        }
        Ok(RegulationOperator::TsnPacketRate { tau, packets })
    }

    pub fn packet_spacing(tau: T) -> Result<Self> {
        nonnegative(&tau, "tau")?;
        Ok(RegulationOperator::PacketSpacing { tau })
    }

    pub fn packet_burstiness(rho: T, packets: u64) -> Result<Self> {
        positive(&rho, "rho")?;
        if packets == 0 {
            return Err(Error::InvalidParameter("K must be at least 1".into()));
        }
        Ok(RegulationOperator::PacketBurstiness { rho, packets })
    }

    /// Jiang's `(lambda, nu)` constraint, which is packet burstiness with
    /// `rho = lambda` and `K = nu + 1`.
    pub fn lambda_nu(lambda: T, nu: u64) -> Result<Self> {
        RegulationOperator::packet_burstiness(lambda, nu + 1)
    }

    pub fn g_regulation(g: Curve<T>) -> Result<Self> {
        if g.eval(&T::zero())? != Ext::zero() {
            return Err(Error::InvalidParameter("g(0) must be 0".into()));
        }
        Ok(RegulationOperator::GRegulation(g))
    }

    pub fn arrival_curve(sigma: Curve<T>) -> Self {
        let lower_inverse = sigma.lower_pseudo_inverse();
        RegulationOperator::ArrivalCurve {
            sigma,
            lower_inverse,
        }
    }

    pub fn max_of(a: Self, b: Self) -> Self {
        RegulationOperator::MaxOf(Box::new(a), Box::new(b))
    }

    pub fn max_plus_linear<F>(h: F) -> Self
    where
        F: Fn(usize, usize, &[u64]) -> Ext<T> + Send + Sync + 'static,
    {
        RegulationOperator::MaxPlusLinear(Arc::new(h))
    }

    fn check_prefix(dates: &[Ext<T>], lengths: &[u64], n: usize) -> Result<()> {
        if dates.len() < n || lengths.len() <= n {
            Err(Error::InsufficientPrefix { index: n })
        } else {
            Ok(())
        }
    }

    /// `H(m, n, L)` for `m < n`.
    pub fn h_coefficient(&self, m: usize, n: usize, lengths: &[u64]) -> Result<Ext<T>> {
        if m >= n {
            return Err(Error::InvalidParameter(format!(
                "coefficient needs m < n, got m = {m}, n = {n}"
            )));
        }
        if lengths.len() <= n {
            return Err(Error::InsufficientPrefix { index: n });
        }
        let sum = |hi: usize| T::from_count(lengths[m..hi].iter().sum());
        let packets = |k: u64| T::from_int((n - m + 1) as i64 - k as i64);
        Ok(match self {
            RegulationOperator::MaxPlusLinear(h) => h(m, n, &lengths[..=n]),
            RegulationOperator::GRegulation(g) => g.eval(&sum(n))?,
            RegulationOperator::ArrivalCurve { lower_inverse, .. } => {
                lower_inverse.eval(&sum(n + 1))?
            }
            RegulationOperator::Lrq { rate } => {
                if m + 1 == n {
                    Ext::Finite(T::from_count(lengths[m]) / rate.clone())
                } else {
                    Ext::NegInf
                }
            }
            RegulationOperator::LeakyBucket { rate, burst } => {
                Ext::Finite((sum(n + 1) - burst.clone()) / rate.clone())
            }
            RegulationOperator::Staircase { tau, burst } => Ext::Finite(
                tau.clone() * ((sum(n + 1) - burst.clone()) / burst.clone()).ceil(),
            ),
            RegulationOperator::TsnPacketRate { tau, packets: k } => Ext::Finite(
                tau.clone() * (packets(*k) / T::from_count(*k)).ceil(),
            ),
            RegulationOperator::PacketSpacing { tau } => {
                if m + 1 == n {
                    Ext::Finite(tau.clone())
                } else {
                    Ext::NegInf
                }
            }
            RegulationOperator::PacketBurstiness { rho, packets: k } => {
                Ext::Finite(packets(*k) / rho.clone())
            }
            RegulationOperator::MaxOf(a, b) => a
                .h_coefficient(m, n, lengths)?
                .max(b.h_coefficient(m, n, lengths)?),
        })
    }

    /// `max over m < n of dates[m] + H(m, n, L)`, straight from the
    /// coefficients.
    pub fn evaluate_by_coefficients(
        &self,
        dates: &[Ext<T>],
        lengths: &[u64],
        n: usize,
    ) -> Result<Ext<T>> {
        RegulationOperator::check_prefix(dates, lengths, n)?;
        let mut best = Ext::NegInf;
        for (m, date) in dates.iter().enumerate().take(n) {
            best = best.max(date.clone() + self.h_coefficient(m, n, lengths)?);
        }
        Ok(best)
    }

    /// `Pi(A, L)[n]`. Reads `dates[..n]` and `lengths[..=n]`.
    pub fn evaluate(&self, dates: &[Ext<T>], lengths: &[u64], n: usize) -> Result<Ext<T>> {
        RegulationOperator::check_prefix(dates, lengths, n)?;
        if n == 0 {
            return Ok(Ext::NegInf);
        }
        Ok(self.evaluate_unchecked(dates, lengths, n))
    }

    pub(crate) fn evaluate_unchecked(&self, dates: &[Ext<T>], lengths: &[u64], n: usize) -> Ext<T> {
        if n == 0 {
            return Ext::NegInf;
        }
        let prev = &dates[n - 1];
        // Running max over m = n-1 down to 0 with the window sum kept
        // incrementally. `total` is L[m] + ... + L[n].
        let scan = |f: &dyn Fn(usize, &T) -> Ext<T>| {
            let mut best = Ext::NegInf;
            let mut total = T::from_count(lengths[n]);
            for m in (0..n).rev() {
                total = total + T::from_count(lengths[m]);
                best = best.max(dates[m].clone() + f(m, &total));
            }
            best
        };
        match self {
            RegulationOperator::MaxPlusLinear(h) => {
                let l = &lengths[..=n];
                Ext::max_all((0..n).map(|m| dates[m].clone() + h(m, n, l)))
            }
            RegulationOperator::Lrq { rate } => {
                prev.shift(&(T::from_count(lengths[n - 1]) / rate.clone()))
            }
            RegulationOperator::PacketSpacing { tau } => prev.shift(tau),
            RegulationOperator::GRegulation(g) => {
                let last = T::from_count(lengths[n]);
                scan(&|_, total| g.eval(&(total.clone() - last.clone())).expect("sum >= 0"))
            }
            RegulationOperator::ArrivalCurve { lower_inverse, .. } => {
                scan(&|_, total| lower_inverse.eval(total).expect("sum >= 0"))
            }
            RegulationOperator::LeakyBucket { rate, burst } => {
                scan(&|_, total| Ext::Finite((total.clone() - burst.clone()) / rate.clone()))
            }
            RegulationOperator::Staircase { tau, burst } => scan(&|_, total| {
                Ext::Finite(tau.clone() * ((total.clone() - burst.clone()) / burst.clone()).ceil())
            }),
            RegulationOperator::TsnPacketRate { tau, packets } => {
                let k = T::from_count(*packets);
                scan(&|m, _| {
                    let count = T::from_int((n - m + 1) as i64) - k.clone();
                    Ext::Finite(tau.clone() * (count / k.clone()).ceil())
                })
            }
            RegulationOperator::PacketBurstiness { rho, packets } => {
                let k = T::from_count(*packets);
                scan(&|m, _| {
                    Ext::Finite((T::from_int((n - m + 1) as i64) - k.clone()) / rho.clone())
                })
            }
            RegulationOperator::MaxOf(a, b) => a
                .evaluate_unchecked(dates, lengths, n)
                .max(b.evaluate_unchecked(dates, lengths, n)),
        }
    }

    /// The whole sequence `Pi(A, L)`.
    pub fn apply(&self, dates: &[Ext<T>], lengths: &[u64]) -> Result<Vec<Ext<T>>> {
        if dates.len() != lengths.len() {
            return Err(Error::Mismatch(format!(
                "{} dates, {} lengths",
                dates.len(),
                lengths.len()
            )));
        }
        Ok((0..dates.len())
            .map(|n| self.evaluate_unchecked(dates, lengths, n))
            .collect())
    }

    /// First packet where `A[n] < Pi(A, L)[n]`, with both sides.
    pub fn first_violation(
        &self,
        dates: &[Ext<T>],
        lengths: &[u64],
    ) -> Option<(usize, Ext<T>, Ext<T>)> {
        (0..dates.len().min(lengths.len())).find_map(|n| {
            let bound = self.evaluate_unchecked(dates, lengths, n);
            (dates[n] < bound).then(|| (n, dates[n].clone(), bound))
        })
    }

    pub fn is_regular_dates(&self, dates: &[Ext<T>], lengths: &[u64]) -> bool {
        self.first_violation(dates, lengths).is_none()
    }

    /// Regularity of the whole sequence, treated as one flow.
    pub fn is_regular(&self, seq: &PacketSequence<T>) -> bool {
        self.is_regular_dates(seq.dates(), seq.lengths())
    }
}

impl<T: fmt::Debug> fmt::Debug for RegulationOperator<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegulationOperator::MaxPlusLinear(_) => f.write_str("MaxPlusLinear(<table>)"),
            RegulationOperator::GRegulation(g) => f.debug_tuple("GRegulation").field(g).finish(),
            RegulationOperator::ArrivalCurve { sigma, .. } => {
                f.debug_tuple("ArrivalCurve").field(sigma).finish()
            }
            RegulationOperator::Lrq { rate } => write!(f, "Lrq({rate:?})"),
            RegulationOperator::LeakyBucket { rate, burst } => {
                write!(f, "LeakyBucket({rate:?}, {burst:?})")
            }
            RegulationOperator::Staircase { tau, burst } => write!(f, "Staircase({tau:?}, {burst:?})"),
            RegulationOperator::TsnPacketRate { tau, packets } => {
                write!(f, "TsnPacketRate({tau:?}, {packets:?})")
            }
            RegulationOperator::PacketSpacing { tau } => write!(f, "PacketSpacing({tau:?})"),
            RegulationOperator::PacketBurstiness { rho, packets } => {
                write!(f, "PacketBurstiness({rho:?}, {packets:?})")
            }
            RegulationOperator::MaxOf(a, b) => write!(f, "MaxOf({a:?}, {b:?})"),
        }
    }
}

/// One side of an interval endpoint: exactly at a date, or just after it.
#[derive(Clone, Debug, PartialEq)]
pub enum Instant<T> {
    At(T),
    After(T),
}

impl<T: fmt::Display> fmt::Display for Instant<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instant::At(t) => write!(f, "{t}"),
            Instant::After(t) => write!(f, "{t}+"),
        }
    }
}

/// A pair `s <= t` with `R(t) - R(s) > sigma(t - s)` in the limit.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvelopeViolation<T> {
    pub s: Instant<T>,
    pub t: Instant<T>,
    pub increase: T,
    pub bound: Ext<T>,
}

/// Checks `R(t) - R(s) <= sigma(t - s)` for all `0 <= s <= t` directly on
/// the cumulative arrival function.
///
/// `R` only jumps at packet dates, so it is enough to look at every pair of
/// dates `a <= b` and at the four ways of approaching them (`s` at `a` or just
/// after it, `t` at `b` or just after it), using exact one-sided limits of
/// both `R` and `sigma`.
pub fn arrival_curve_violation<T: Scalar>(
    seq: &PacketSequence<T>,
    sigma: &Curve<T>,
) -> Result<Option<EnvelopeViolation<T>>> {
    let r = seq.cumulative_arrivals()?;
    let mut dates: Vec<T> = seq.dates().iter().filter_map(|d| d.finite().cloned()).collect();
    dates.dedup();
    let value = |x: &T| r.eval(x).map(|v| v.into_finite().expect("R is finite"));
    let after = |x: &T| r.right_limit(x).map(|v| v.into_finite().expect("R is finite"));
    for (i, a) in dates.iter().enumerate() {
        for b in &dates[i..] {
            let gap = b.clone() - a.clone();
            let mut candidates = vec![
                (Instant::At(a.clone()), Instant::At(b.clone()), value(b)? - value(a)?, sigma.eval(&gap)?),
                (
                    Instant::At(a.clone()),
                    Instant::After(b.clone()),
                    after(b)? - value(a)?,
                    sigma.right_limit(&gap)?,
                ),
                (
                    Instant::After(a.clone()),
                    Instant::After(b.clone()),
                    after(b)? - after(a)?,
                    sigma.eval(&gap)?,
                ),
            ];
            if gap > T::zero() {
                candidates.push((
                    Instant::After(a.clone()),
                    Instant::At(b.clone()),
                    value(b)? - after(a)?,
                    sigma.left_limit(&gap)?,
                ));
            }
            for (s, t, increase, bound) in candidates {
                if Ext::Finite(increase.clone()) > bound {
                    return Ok(Some(EnvelopeViolation {
                        s,
                        t,
                        increase,
                        bound,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// `true` iff `sigma` is an arrival curve for the sequence.
pub fn arrival_curve_check<T: Scalar>(seq: &PacketSequence<T>, sigma: &Curve<T>) -> Result<bool> {
    Ok(arrival_curve_violation(seq, sigma)?.is_none())
}
