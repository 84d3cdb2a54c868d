//! Wide-sense increasing functions on `[0, inf)` and their pseudo-inverses.
//!
//! A [`Curve`] is piecewise affine with jumps. Each breakpoint stores the
//! value at the abscissa, the limit from the right and the slope of the
//! segment that follows; the limit from the left is implied by the previous
//! segment. After the last breakpoint the curve either keeps its final slope
//! or repeats a pattern with a fixed increment per period, which is how
//! staircases and their inverses stay finite objects.
//!
//! Values live in `[0, +inf]`. Once a curve reaches `+inf` it stays there, so
//! the inverse of a bounded curve is representable.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Breakpoint<T> {
    pub x: T,
    /// `f(x)`.
    pub value: Ext<T>,
    /// `f(x+)`.
    pub right: Ext<T>,
    /// Slope on the open segment starting at `x`.
    pub slope: T,
}

impl<T: Scalar> Breakpoint<T> {
    pub fn new(x: T, value: Ext<T>, right: Ext<T>, slope: T) -> Self {
        Breakpoint {
            x,
            value,
            right,
            slope,
        }
    }

    /// Value of the open segment after this breakpoint, extended affinely to `t`.
    fn segment_at(&self, t: &T) -> Ext<T> {
        match &self.right {
            Ext::Finite(r) => {
                Ext::Finite(r.clone() + self.slope.clone() * (t.clone() - self.x.clone()))
            }
            other => other.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Tail<T> {
    /// The last segment continues with its slope.
    Affine,
    /// For `t >= points[from].x`, `f(t + period) = f(t) + increment`.
    Periodic {
        from: usize,
        period: T,
        increment: T,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Curve<T> {
    points: Vec<Breakpoint<T>>,
    tail: Tail<T>,
}

fn cmp<T: PartialOrd>(a: &T, b: &T) -> Ordering {
    a.partial_cmp(b).expect("scalars are totally ordered")
}

impl<T: Scalar> Curve<T> {
    pub fn new(mut points: Vec<Breakpoint<T>>, tail: Tail<T>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidCurve(m));
        if points.is_empty() {
            return bad("no breakpoints".into());
        }
        if !points[0].x.is_zero() {
            return bad("first breakpoint must be at 0".into());
        }
        for w in points.windows(2) {
            if w[0].x >= w[1].x {
                return bad(format!("abscissae not increasing at {}", w[1].x));
            }
        }
        let mut saturated = false;
        for i in 0..points.len() {
            let p = &points[i];
            if p.value == Ext::NegInf || p.right == Ext::NegInf {
                return bad(format!("-inf value at {}", p.x));
            }
            if p.value < Ext::zero() {
                return bad(format!("negative value at {}", p.x));
            }
            if p.slope < T::zero() {
                return bad(format!("negative slope at {}", p.x));
            }
            if saturated && (p.value.is_finite() || p.right.is_finite()) {
                return bad(format!("finite value after +inf at {}", p.x));
            }
            if i > 0 {
                let left = points[i - 1].segment_at(&p.x);
                if left > p.value {
                    return bad(format!("decreasing jump at {}", p.x));
                }
            }
            if p.value > p.right {
                return bad(format!("right limit below value at {}", p.x));
            }
            if p.right == Ext::PosInf {
                saturated = true;
                points[i].slope = T::zero();
            }
        }

        let tail = match tail {
            Tail::Affine => Tail::Affine,
            Tail::Periodic {
                from,
                period,
                increment,
            } => {
                if from >= points.len() {
                    return bad("periodic start out of range".into());
                }
                if period <= T::zero() || increment < T::zero() {
                    return bad("period must be positive and increment nonnegative".into());
                }
                if saturated {
                    return bad("periodic curve cannot reach +inf".into());
                }
                let start = points[from].x.clone();
                let end = start.clone() + period.clone();
                let last = points.last().unwrap();
                if last.x >= end {
                    return bad("pattern longer than one period".into());
                }
                let wrap_left = last.segment_at(&end);
                let wrap_value = points[from].value.shift(&increment);
                if wrap_left > wrap_value {
                    return bad("pattern does not join monotonically across periods".into());
                }
                if increment.is_zero() {
                    // A monotone pattern with no increment is constant.
                    let v = points[from].value.clone();
                    points.truncate(from + 1);
                    let p = &mut points[from];
                    p.right = v;
                    p.slope = T::zero();
                    Tail::Affine
                } else {
                    Tail::Periodic {
                        from,
                        period,
                        increment,
                    }
                }
            }
        };
        Ok(Curve { points, tail })
    }

    /// Builds a curve from `(x, f(x-), f(x), slope)` tuples.
    ///
    /// The segment after breakpoint `i` has the given slope and ends at the
    /// left limit of breakpoint `i + 1`; after the last breakpoint the curve
    /// starts at `f(x)` and keeps its slope. The left limit of the first
    /// breakpoint is ignored.
    pub fn from_limits(rows: Vec<(T, Ext<T>, Ext<T>, T)>) -> Result<Self> {
        let mut points = Vec::with_capacity(rows.len());
        for (i, (x, _, value, slope)) in rows.iter().enumerate() {
            let right = match rows.get(i + 1) {
                None => value.clone(),
                Some((nx, Ext::Finite(nl), _, _)) => {
                    Ext::Finite(nl.clone() - slope.clone() * (nx.clone() - x.clone()))
                }
                Some((_, other, _, _)) => other.clone(),
            };
            points.push(Breakpoint::new(x.clone(), value.clone(), right, slope.clone()));
        }
        Curve::new(points, Tail::Affine)
    }

    /// `rt + b` for `t > 0` and `0` at `t = 0`.
    pub fn affine(rate: T, burst: T) -> Result<Self> {
        Curve::new(
            vec![Breakpoint::new(T::zero(), Ext::zero(), Ext::Finite(burst), rate)],
            Tail::Affine,
        )
    }

    /// `b * ceil(t / tau)`.
    pub fn staircase(tau: T, b: T) -> Result<Self> {
        if tau <= T::zero() || b <= T::zero() {
            return Err(Error::InvalidCurve("staircase needs tau > 0 and b > 0".into()));
        }
        Curve::new(
            vec![Breakpoint::new(T::zero(), Ext::zero(), Ext::Finite(b.clone()), T::zero())],
            Tail::Periodic {
                from: 0,
                period: tau,
                increment: b,
            },
        )
    }

    /// `t * slope`, continuous.
    pub fn linear(slope: T) -> Result<Self> {
        Curve::new(
            vec![Breakpoint::new(T::zero(), Ext::zero(), Ext::zero(), slope)],
            Tail::Affine,
        )
    }

    pub fn identity() -> Self {
        Curve::linear(T::one()).expect("identity is valid")
    }

    pub fn points(&self) -> &[Breakpoint<T>] {
        &self.points
    }

    pub fn tail(&self) -> &Tail<T> {
        &self.tail
    }

    fn check_domain(t: &T) -> Result<()> {
        if *t < T::zero() {
            Err(Error::Domain(format!("negative abscissa {t}")))
        } else {
            Ok(())
        }
    }

    /// Maps `t` into the stored range. Returns the reduced abscissa and the
    /// value offset to add back. With `open_left`, the reduced abscissa lands
    /// in `(start, start + period]`, which is what left limits need.
    fn reduce(&self, t: &T, open_left: bool) -> (T, T) {
        if let Tail::Periodic {
            from,
            period,
            increment,
        } = &self.tail
        {
            let start = &self.points[*from].x;
            let end = start.clone() + period.clone();
            let beyond = if open_left { *t > end } else { *t >= end };
            if beyond {
                let q = (t.clone() - start.clone()) / period.clone();
                let k = if open_left {
                    q.ceil() - T::one()
                } else {
                    q.floor()
                };
                return (
                    t.clone() - k.clone() * period.clone(),
                    k * increment.clone(),
                );
            }
        }
        (t.clone(), T::zero())
    }

    /// Index of the last breakpoint with `x <= t`.
    fn index_le(&self, t: &T) -> usize {
        self.points.partition_point(|p| p.x <= *t) - 1
    }

    pub fn eval(&self, t: &T) -> Result<Ext<T>> {
        Curve::check_domain(t)?;
        let (t, off) = self.reduce(t, false);
        let p = &self.points[self.index_le(&t)];
        let v = if p.x == t {
            p.value.clone()
        } else {
            p.segment_at(&t)
        };
        Ok(v.shift(&off))
    }

    pub fn right_limit(&self, t: &T) -> Result<Ext<T>> {
        Curve::check_domain(t)?;
        let (t, off) = self.reduce(t, false);
        let p = &self.points[self.index_le(&t)];
        let v = if p.x == t {
            p.right.clone()
        } else {
            p.segment_at(&t)
        };
        Ok(v.shift(&off))
    }

    pub fn left_limit(&self, t: &T) -> Result<Ext<T>> {
        if *t <= T::zero() {
            return Err(Error::Domain(format!("left limit needs t > 0, got {t}")));
        }
        let (t, off) = self.reduce(t, true);
        let i = self.points.partition_point(|p| p.x < t) - 1;
        Ok(self.points[i].segment_at(&t).shift(&off))
    }

    pub fn one_sided_limit(&self, t: &T, side: Side) -> Result<Ext<T>> {
        match side {
            Side::Left => self.left_limit(t),
            Side::Right => self.right_limit(t),
        }
    }

    /// Breakpoints of the transient part followed by `periods` copies of the
    /// pattern and the first breakpoint of the next copy.
    pub fn unrolled(&self, periods: usize) -> Vec<Breakpoint<T>> {
        match &self.tail {
            Tail::Affine => self.points.clone(),
            Tail::Periodic {
                from,
                period,
                increment,
            } => {
                let mut out = self.points[..*from].to_vec();
                let mut dx = T::zero();
                let mut dy = T::zero();
                for _ in 0..periods {
                    for p in &self.points[*from..] {
                        out.push(Breakpoint::new(
                            p.x.clone() + dx.clone(),
                            p.value.shift(&dy),
                            p.right.shift(&dy),
                            p.slope.clone(),
                        ));
                    }
                    dx = dx + period.clone();
                    dy = dy + increment.clone();
                }
                let p = &self.points[*from];
                out.push(Breakpoint::new(
                    p.x.clone() + dx,
                    p.value.shift(&dy),
                    p.right.shift(&dy),
                    p.slope.clone(),
                ));
                out
            }
        }
    }

    /// Abscissae of all breakpoints up to and including `horizon`.
    pub fn breakpoints_until(&self, horizon: &T) -> Vec<T> {
        match &self.tail {
            Tail::Affine => self
                .points
                .iter()
                .map(|p| p.x.clone())
                .filter(|x| x <= horizon)
                .collect(),
            Tail::Periodic { from, period, .. } => {
                let mut out: Vec<T> = self.points[..*from].iter().map(|p| p.x.clone()).collect();
                let mut dx = T::zero();
                'outer: loop {
                    for p in &self.points[*from..] {
                        let x = p.x.clone() + dx.clone();
                        if x > *horizon {
                            break 'outer;
                        }
                        out.push(x);
                    }
                    dx = dx + period.clone();
                }
                out
            }
        }
    }

    /// First abscissa where the curve reaches `y` (`>= y`, or `> y` when
    /// `strict`), scanning breakpoints and the open segments between them.
    fn first_crossing(pieces: &[Breakpoint<T>], y: &T, strict: bool) -> Ext<T> {
        let target = Ext::Finite(y.clone());
        let hits = |v: &Ext<T>| if strict { *v > target } else { *v >= target };
        for (i, p) in pieces.iter().enumerate() {
            if hits(&p.value) {
                return Ext::Finite(p.x.clone());
            }
            let next = pieces.get(i + 1).map(|q| &q.x);
            let r = match &p.right {
                Ext::Finite(r) => r,
                _ => return Ext::Finite(p.x.clone()),
            };
            if p.slope.is_zero() {
                if hits(&p.right) {
                    return Ext::Finite(p.x.clone());
                }
                continue;
            }
            let cross = p.x.clone() + (y.clone() - r.clone()) / p.slope.clone();
            if next.is_none_or(|nx| cross < *nx) {
                return Ext::Finite(T::max_of(p.x.clone(), cross));
            }
        }
        Ext::PosInf
    }

    /// `inf{ s >= 0 : f(s) >= y }` evaluated at one point.
    pub fn lower_inverse_at(&self, y: &T) -> Result<Ext<T>> {
        Curve::check_domain(y)?;
        Ok(self.crossing_at(y, false))
    }

    /// `inf{ s >= 0 : f(s) > y }` evaluated at one point.
    ///
    /// This equals `sup{ s >= 0 : f(s) <= y }` whenever `f(0) <= y`, and it
    /// stays in `[0, +inf]` otherwise.
    pub fn upper_inverse_at(&self, y: &T) -> Result<Ext<T>> {
        Curve::check_domain(y)?;
        Ok(self.crossing_at(y, true))
    }

    fn crossing_at(&self, y: &T, strict: bool) -> Ext<T> {
        match &self.tail {
            Tail::Affine => Curve::first_crossing(&self.points, y, strict),
            Tail::Periodic {
                from,
                period,
                increment,
            } => {
                let base = self.points[*from]
                    .value
                    .finite()
                    .expect("periodic values are finite")
                    .clone();
                // Above the pattern start the inverse repeats with the roles
                // of period and increment swapped.
                let k = if strict {
                    if *y >= base {
                        ((y.clone() - base) / increment.clone()).floor()
                    } else {
                        T::zero()
                    }
                } else if *y > base {
                    ((y.clone() - base) / increment.clone()).ceil() - T::one()
                } else {
                    T::zero()
                };
                let reduced = y.clone() - k.clone() * increment.clone();
                Curve::first_crossing(&self.unrolled(2), &reduced, strict)
                    .shift(&(k * period.clone()))
            }
        }
    }

    /// Builds a curve from pointwise evaluation of a pseudo-inverse. Between
    /// consecutive critical ordinates the inverse is affine, so two interior
    /// samples per gap pin it down exactly.
    fn inverse_curve(&self, strict: bool) -> Curve<T> {
        let sample = |y: &T| self.crossing_at(y, strict);
        let (pieces, periodic) = match &self.tail {
            Tail::Affine => (self.points.clone(), None),
            Tail::Periodic {
                from,
                period,
                increment,
            } => {
                let base = self.points[*from].value.finite().unwrap().clone();
                let start = base + increment.clone();
                (
                    self.unrolled(3),
                    Some((start, increment.clone(), period.clone())),
                )
            }
        };

        let mut ys: Vec<T> = vec![T::zero()];
        for (i, p) in pieces.iter().enumerate() {
            ys.extend(p.value.finite().cloned());
            ys.extend(p.right.finite().cloned());
            if i > 0 {
                ys.extend(pieces[i - 1].segment_at(&p.x).into_finite());
            }
        }
        if let Some((start, inc, _)) = &periodic {
            let end = start.clone() + inc.clone();
            ys.retain(|y| *y < end);
            ys.push(start.clone());
        }
        ys.sort_by(cmp);
        ys.dedup();

        let three = T::from_count(3);
        let mut points: Vec<Breakpoint<T>> = Vec::with_capacity(ys.len());
        for (i, y) in ys.iter().enumerate() {
            let (m1, m2) = match (ys.get(i + 1), &periodic) {
                (Some(next), _) => {
                    let step = (next.clone() - y.clone()) / three.clone();
                    (y.clone() + step.clone(), y.clone() + step.clone() + step)
                }
                (None, Some((start, inc, _))) => {
                    let step = (start.clone() + inc.clone() - y.clone()) / three.clone();
                    (y.clone() + step.clone(), y.clone() + step.clone() + step)
                }
                (None, None) => (y.clone() + T::one(), y.clone() + T::one() + T::one()),
            };
            let value = sample(y);
            let (right, slope) = match (sample(&m1), sample(&m2)) {
                (Ext::Finite(v1), Ext::Finite(v2)) => {
                    let slope = (v2 - v1.clone()) / (m2 - m1.clone());
                    (Ext::Finite(v1 - slope.clone() * (m1 - y.clone())), slope)
                }
                _ => (Ext::PosInf, T::zero()),
            };
            let saturated = right == Ext::PosInf;
            points.push(Breakpoint::new(y.clone(), value, right, slope));
            if saturated {
                break;
            }
        }

        let tail = match periodic {
            None => Tail::Affine,
            Some((start, inc, period)) => Tail::Periodic {
                from: ys.iter().position(|y| *y == start).unwrap(),
                period: inc,
                increment: period,
            },
        };
        Curve::new(points, tail).expect("pseudo-inverse of a valid curve is valid")
    }

    /// `f↓(x) = inf{ s >= 0 : f(s) >= x }`.
    pub fn lower_pseudo_inverse(&self) -> Curve<T> {
        self.inverse_curve(false)
    }

    /// `f↑(x) = inf{ s >= 0 : f(s) > x }`.
    pub fn upper_pseudo_inverse(&self) -> Curve<T> {
        self.inverse_curve(true)
    }

    /// The right-continuous version `f+`.
    pub fn right_continuous(&self) -> Curve<T> {
        let mut c = self.clone();
        for p in &mut c.points {
            p.value = p.right.clone();
        }
        c
    }

    /// The left-continuous version `f-`, with `f-(0) = f(0)`.
    pub fn left_continuous(&self) -> Curve<T> {
        let (mut points, tail) = match &self.tail {
            Tail::Affine => (self.points.clone(), Tail::Affine),
            Tail::Periodic {
                period, increment, ..
            } => {
                // The first copy of the pattern is entered from the transient,
                // later copies from the end of the previous one; keep the first
                // copy as transient so every repeated start sees the same limit.
                let mut pts = self.unrolled(2);
                pts.pop();
                (
                    pts,
                    Tail::Periodic {
                        from: self.points.len(),
                        period: period.clone(),
                        increment: increment.clone(),
                    },
                )
            }
        };
        for i in 1..points.len() {
            points[i].value = points[i - 1].segment_at(&points[i].x);
        }
        Curve::new(points, tail).expect("left-continuous version is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};
    use num_rational::BigRational;

    type C = Curve<BigRational>;
    type E = Ext<BigRational>;

    fn fin(v: BigRational) -> E {
        Ext::Finite(v)
    }

    #[test]
    fn affine_values() {
        let c = C::affine(int(1), int(2)).unwrap();
        assert_eq!(c.eval(&int(0)).unwrap(), fin(int(0)));
        assert_eq!(c.eval(&int(3)).unwrap(), fin(int(5)));
        assert_eq!(c.right_limit(&int(0)).unwrap(), fin(int(2)));
        assert!(c.eval(&int(-1)).is_err());
    }

    #[test]
    fn staircase_values() {
        let c = C::staircase(int(10), int(3)).unwrap();
        assert_eq!(c.eval(&int(10)).unwrap(), fin(int(3)));
        assert_eq!(c.eval(&(int(10) + rat(1, 100))).unwrap(), fin(int(6)));
        assert_eq!(c.right_limit(&int(10)).unwrap(), fin(int(6)));
        assert_eq!(c.left_limit(&int(10)).unwrap(), fin(int(3)));
        assert_eq!(c.left_limit(&int(20)).unwrap(), fin(int(6)));
        assert_eq!(c.eval(&int(0)).unwrap(), fin(int(0)));
        assert_eq!(c.eval(&int(25)).unwrap(), fin(int(9)));
        for k in 0..40i64 {
            let t = rat(k, 3);
            let expect = int(3) * (t.clone() / int(10)).ceil();
            assert_eq!(c.eval(&t).unwrap(), fin(expect));
            let expect_plus = int(3) * (t.clone() / int(10) + int(1)).floor();
            assert_eq!(c.right_limit(&t).unwrap(), fin(expect_plus));
        }
    }

    #[test]
    fn left_limit_at_zero_is_a_domain_error() {
        let c = C::identity();
        assert!(c.one_sided_limit(&int(0), Side::Left).is_err());
        assert_eq!(c.one_sided_limit(&int(2), Side::Left).unwrap(), fin(int(2)));
    }

    #[test]
    fn rejects_malformed_curves() {
        let bp = |x: i64, v: i64, r: i64, s: i64| {
            Breakpoint::new(int(x), fin(int(v)), fin(int(r)), int(s))
        };
        assert!(C::new(vec![], Tail::Affine).is_err());
        assert!(C::new(vec![bp(1, 0, 0, 0)], Tail::Affine).is_err());
        assert!(C::new(vec![bp(0, 2, 1, 0)], Tail::Affine).is_err());
        assert!(C::new(vec![bp(0, 0, 0, -1)], Tail::Affine).is_err());
        assert!(C::new(vec![bp(0, 0, 5, 0), bp(1, 4, 4, 0)], Tail::Affine).is_err());
        assert!(C::new(vec![bp(0, 0, 0, 0), bp(0, 0, 0, 0)], Tail::Affine).is_err());
    }

    #[test]
    fn lower_inverse_closed_forms() {
        let lb = C::affine(int(1), int(2)).unwrap().lower_pseudo_inverse();
        assert_eq!(lb.eval(&int(5)).unwrap(), fin(int(3)));
        assert_eq!(lb.eval(&int(1)).unwrap(), fin(int(0)));
        let sc = C::staircase(int(10), int(3)).unwrap().lower_pseudo_inverse();
        assert_eq!(sc.eval(&int(7)).unwrap(), fin(int(20)));
        assert_eq!(sc.eval(&int(0)).unwrap(), fin(int(0)));
        let id = C::identity().lower_pseudo_inverse();
        assert_eq!(id.eval(&rat(7, 2)).unwrap(), fin(rat(7, 2)));
    }

    #[test]
    fn upper_inverse_examples() {
        let lb = C::affine(int(1), int(2)).unwrap().upper_pseudo_inverse();
        assert_eq!(lb.eval(&int(1)).unwrap(), fin(int(0)));
        assert_eq!(lb.eval(&int(3)).unwrap(), fin(int(1)));
        let sc = C::staircase(int(10), int(3)).unwrap().upper_pseudo_inverse();
        assert_eq!(sc.eval(&int(3)).unwrap(), fin(int(10)));
        assert_eq!(C::identity().upper_pseudo_inverse().eval(&int(4)).unwrap(), fin(int(4)));
    }

    #[test]
    fn inverse_of_bounded_curve_saturates() {
        // f = 0 at 0, 1 on (0, 2], +inf beyond.
        let c = C::new(
            vec![
                Breakpoint::new(int(0), fin(int(0)), fin(int(1)), int(0)),
                Breakpoint::new(int(2), fin(int(1)), E::PosInf, int(0)),
            ],
            Tail::Affine,
        )
        .unwrap();
        let inv = c.lower_pseudo_inverse();
        assert_eq!(inv.eval(&int(1)).unwrap(), fin(int(0)));
        assert_eq!(inv.eval(&int(50)).unwrap(), fin(int(2)));

        let flat = C::affine(int(0), int(4)).unwrap();
        let inv = flat.lower_pseudo_inverse();
        assert_eq!(inv.eval(&int(4)).unwrap(), fin(int(0)));
        assert_eq!(inv.eval(&rat(9, 2)).unwrap(), E::PosInf);
        let up = flat.upper_pseudo_inverse();
        assert_eq!(up.eval(&int(4)).unwrap(), E::PosInf);
        assert_eq!(up.eval(&int(3)).unwrap(), fin(int(0)));
    }

    #[test]
    fn from_limits_reads_left_limits() {
        // Truncated staircase written out by hand.
        let c = C::from_limits(vec![
            (int(0), fin(int(0)), fin(int(0)), int(0)),
            (int(10), fin(int(3)), fin(int(3)), int(0)),
            (int(20), fin(int(6)), fin(int(6)), int(0)),
        ])
        .unwrap();
        assert_eq!(c.eval(&int(5)).unwrap(), fin(int(3)));
        assert_eq!(c.eval(&int(10)).unwrap(), fin(int(3)));
        assert_eq!(c.eval(&int(15)).unwrap(), fin(int(6)));
        assert_eq!(c.eval(&int(30)).unwrap(), fin(int(6)));
    }

    #[test]
    fn periodic_with_zero_increment_is_normalized() {
        let c = C::new(
            vec![Breakpoint::new(int(0), fin(int(2)), fin(int(2)), int(0))],
            Tail::Periodic {
                from: 0,
                period: int(3),
                increment: int(0),
            },
        )
        .unwrap();
        assert_eq!(c.tail(), &Tail::Affine);
        assert_eq!(c.eval(&int(100)).unwrap(), fin(int(2)));
    }

    #[test]
    fn one_sided_versions() {
        let c = C::staircase(int(10), int(3)).unwrap();
        let plus = c.right_continuous();
        let minus = c.left_continuous();
        for k in 0..30i64 {
            let t = rat(k, 2);
            assert_eq!(plus.eval(&t).unwrap(), c.right_limit(&t).unwrap());
            if k > 0 {
                assert_eq!(minus.eval(&t).unwrap(), c.left_limit(&t).unwrap());
            }
        }
    }

    #[test]
    fn works_with_floats() {
        let c: Curve<f64> = Curve::staircase(10.0, 3.0).unwrap();
        assert_eq!(c.eval(&25.0).unwrap(), Ext::Finite(9.0));
        assert_eq!(c.lower_pseudo_inverse().eval(&7.0).unwrap(), Ext::Finite(20.0));
    }
}
