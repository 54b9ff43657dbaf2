//! Periodic piecewise-linear travel-time functions.
//!
//! A [`Ttf`] maps a departure time to a travel time. It is stored as a list of
//! breakpoints inside one period `[0, period)` and interpolated linearly,
//! wrapping from the last breakpoint to the first one shifted by one period.
//! A single breakpoint therefore denotes a constant function.
//!
//! All operations are pure and return new functions. Results are normalized by
//! merging breakpoints that are (numerically) collinear with their neighbours.

use std::fmt;

use thiserror::Error;

/// Planning period used when nothing else is specified: one day in seconds.
pub const DEFAULT_PERIOD: f64 = 86_400.0;

/// Breakpoints closer than this are merged.
const TIME_EPS: f64 = 1e-9;
/// Relative tolerance for dropping a collinear breakpoint.
const COLLINEAR_TOL: f64 = 1e-12;
/// Arrival times may decrease by at most this much along a segment.
const FIFO_TOL: f64 = 1e-9;
/// `f` has to be below `g` by more than this to count as undercutting it.
pub const UNDERCUT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TtfError {
    #[error("a travel-time function needs at least one breakpoint")]
    Empty,
    #[error("period must be finite and positive, got {0}")]
    InvalidPeriod(f64),
    #[error("breakpoint {index}: time {at} outside [0, {period})")]
    TimeOutOfRange { index: usize, at: f64, period: f64 },
    #[error("breakpoint {index}: times must be strictly increasing")]
    Unsorted { index: usize },
    #[error("breakpoint {index}: value {val} must be finite and non-negative")]
    InvalidValue { index: usize, val: f64 },
    #[error("period mismatch: {0} vs {1}")]
    PeriodMismatch(f64, f64),
    #[error("approximation factor must be non-negative, got {0}")]
    NegativeEpsilon(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub at: f64,
    pub val: f64,
}

impl Point {
    pub const fn new(at: f64, val: f64) -> Self {
        Point { at, val }
    }
}

#[inline]
fn lerp(a: Point, b: Point, t: f64) -> f64 {
    let dt = b.at - a.at;
    if dt <= 0.0 {
        return a.val;
    }
    a.val + (b.val - a.val) * ((t - a.at) / dt)
}

#[inline]
fn wrap(tau: f64, period: f64) -> f64 {
    let t = tau.rem_euclid(period);
    if t >= period {
        0.0
    } else {
        t
    }
}

/// A window of departure times. Interpreted modulo the period when attached to
/// a shortcut; `end` may exceed the period for windows that wrap around.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeInterval {
    pub begin: f64,
    pub end: f64,
}

impl TimeInterval {
    pub fn new(begin: f64, end: f64) -> Self {
        debug_assert!(begin <= end);
        TimeInterval { begin, end }
    }

    pub fn len(&self) -> f64 {
        self.end - self.begin
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.begin
    }

    /// Membership test modulo `period`.
    pub fn contains(&self, tau: f64, period: f64) -> bool {
        if self.len() >= period {
            return true;
        }
        let shifted = self.begin + (tau - self.begin).rem_euclid(period);
        shifted >= self.begin && shifted <= self.end
    }
}

/// A periodic, continuous, piecewise-linear travel-time function.
#[derive(Clone, PartialEq)]
pub struct Ttf {
    points: Vec<Point>,
    period: f64,
    min: f64,
    max: f64,
}

impl fmt::Debug for Ttf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Ttf")
            .field("period", &self.period)
            .field("points", &self.points.iter().map(|p| (p.at, p.val)).collect::<Vec<_>>())
            .finish()
    }
}

impl Ttf {
    /// Builds a function from breakpoints. Checks structure only; use
    /// [`Ttf::is_fifo`] to check the no-overtaking property.
    pub fn new(points: Vec<Point>, period: f64) -> Result<Ttf, TtfError> {
        if !(period.is_finite() && period > 0.0) {
            return Err(TtfError::InvalidPeriod(period));
        }
        if points.is_empty() {
            return Err(TtfError::Empty);
        }
        for (index, p) in points.iter().enumerate() {
            if !(p.at >= 0.0 && p.at < period) {
                return Err(TtfError::TimeOutOfRange { index, at: p.at, period });
            }
            if !(p.val.is_finite() && p.val >= 0.0) {
                return Err(TtfError::InvalidValue { index, val: p.val });
            }
            if index > 0 && points[index - 1].at >= p.at {
                return Err(TtfError::Unsorted { index });
            }
        }
        Ok(Self::from_valid(points, period))
    }

    /// Convenience constructor from `(time, value)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)], period: f64) -> Result<Ttf, TtfError> {
        Ttf::new(pairs.iter().map(|&(at, val)| Point { at, val }).collect(), period)
    }

    pub fn constant(val: f64, period: f64) -> Ttf {
        assert!(val.is_finite() && val >= 0.0, "invalid constant travel time {val}");
        assert!(period.is_finite() && period > 0.0, "invalid period {period}");
        Ttf { points: vec![Point::new(0.0, val)], period, min: val, max: val }
    }

    pub fn zero(period: f64) -> Ttf {
        Ttf::constant(0.0, period)
    }

    fn from_valid(points: Vec<Point>, period: f64) -> Ttf {
        let (min, max) = points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.val), hi.max(p.val)));
        Ttf { points, period, min, max }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.points.len() == 1
    }

    /// Value at `tau`, taken modulo the period. Binary search over breakpoints.
    pub fn eval(&self, tau: f64) -> f64 {
        let pts = &self.points;
        if pts.len() == 1 {
            return pts[0].val;
        }
        let t = wrap(tau, self.period);
        let i = pts.partition_point(|p| p.at <= t);
        let first = pts[0];
        let last = pts[pts.len() - 1];
        if i == 0 {
            lerp(Point::new(last.at - self.period, last.val), first, t)
        } else if i == pts.len() {
            lerp(last, Point::new(first.at + self.period, first.val), t)
        } else {
            lerp(pts[i - 1], pts[i], t)
        }
    }

    /// Arrival time when departing at `tau` (not reduced modulo the period).
    #[inline]
    pub fn arrival(&self, tau: f64) -> f64 {
        tau + self.eval(tau)
    }

    pub fn global_min(&self) -> f64 {
        self.min
    }

    pub fn global_max(&self) -> f64 {
        self.max
    }

    /// Time-averaged value over one period.
    pub fn mean(&self) -> f64 {
        let c = self.closed();
        let area: f64 = c.windows(2).map(|w| 0.5 * (w[0].val + w[1].val) * (w[1].at - w[0].at)).sum();
        area / self.period
    }

    /// Minimum over departures in `[begin, end]`.
    pub fn min_over(&self, begin: f64, end: f64) -> f64 {
        self.extremum_over(begin, end, f64::min, self.min)
    }

    /// Maximum over departures in `[begin, end]`.
    pub fn max_over(&self, begin: f64, end: f64) -> f64 {
        self.extremum_over(begin, end, f64::max, self.max)
    }

    fn extremum_over(&self, begin: f64, end: f64, pick: fn(f64, f64) -> f64, global: f64) -> f64 {
        if self.is_constant() || !(end - begin < self.period) {
            return global;
        }
        if end <= begin {
            return self.eval(begin);
        }
        let a = wrap(begin, self.period);
        let b = a + (end - begin);
        let mut best = pick(self.eval(a), self.eval(b));
        for p in &self.points {
            for at in [p.at, p.at + self.period] {
                if at > a && at < b {
                    best = pick(best, p.val);
                }
            }
        }
        best
    }

    /// FIFO check: along every segment, including the one wrapping around the
    /// period, departing later never means arriving earlier.
    pub fn is_fifo(&self) -> bool {
        let c = self.closed();
        c.windows(2).all(|w| (w[1].at + w[1].val) - (w[0].at + w[0].val) >= -FIFO_TOL)
    }

    fn value_at_zero(&self) -> f64 {
        let first = self.points[0];
        if first.at == 0.0 || self.points.len() == 1 {
            return first.val;
        }
        let last = self.points[self.points.len() - 1];
        lerp(Point::new(last.at - self.period, last.val), first, 0.0)
    }

    /// Breakpoints over the closed interval `[0, period]`, starting at 0 and
    /// ending at `period` with the same value.
    fn closed(&self) -> Vec<Point> {
        let v0 = self.value_at_zero();
        let mut c = Vec::with_capacity(self.points.len() + 2);
        if self.points[0].at > 0.0 {
            c.push(Point::new(0.0, v0));
        }
        c.extend_from_slice(&self.points);
        c.push(Point::new(self.period, v0));
        c
    }

    /// Normalizes a closed breakpoint list (as produced by `closed`) into a
    /// function: clusters of nearly equal times are merged and collinear
    /// breakpoints are dropped, also across the period boundary.
    fn from_closed(mut c: Vec<Point>, period: f64) -> Ttf {
        debug_assert!(c.len() >= 2);
        for p in c.iter_mut() {
            p.val = p.val.max(0.0);
        }
        let v0 = c[0].val;

        let mut pts: Vec<Point> = Vec::with_capacity(c.len());
        for &p in &c[..c.len() - 1] {
            if p.at >= period - TIME_EPS && !pts.is_empty() {
                break;
            }
            match pts.last() {
                Some(q) if p.at - q.at < TIME_EPS => {}
                _ => pts.push(p),
            }
        }

        let (lo, hi) = pts
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.val), hi.max(p.val)));
        if hi - lo <= COLLINEAR_TOL * (1.0 + hi.abs()) {
            return Ttf::constant(v0, period);
        }

        let mut out: Vec<Point> = Vec::with_capacity(pts.len());
        for p in pts {
            while out.len() >= 2 && collinear(out[out.len() - 2], out[out.len() - 1], p) {
                out.pop();
            }
            out.push(p);
        }
        // across the wrap
        loop {
            let n = out.len();
            if n <= 2 {
                break;
            }
            let last = out[n - 1];
            let first = out[0];
            if collinear(out[n - 2], last, Point::new(first.at + period, first.val)) {
                out.pop();
                continue;
            }
            if collinear(Point::new(last.at - period, last.val), first, out[1]) {
                out.remove(0);
                continue;
            }
            break;
        }
        Ttf::from_valid(out, period)
    }

    fn check_period(&self, other: &Ttf) -> Result<(), TtfError> {
        if self.period == other.period {
            Ok(())
        } else {
            Err(TtfError::PeriodMismatch(self.period, other.period))
        }
    }

    /// Chaining: travel along `self` first, then along `next`.
    /// `r(τ) = self(τ) + next(τ + self(τ))`.
    pub fn link(&self, next: &Ttf) -> Result<Ttf, TtfError> {
        self.check_period(next)?;
        Ok(self.link_unchecked(next))
    }

    pub(crate) fn link_unchecked(&self, next: &Ttf) -> Ttf {
        debug_assert_eq!(self.period, next.period);
        let period = self.period;
        if self.is_constant() && next.is_constant() {
            return Ttf::constant(self.points[0].val + next.points[0].val, period);
        }

        let fc = self.closed();
        let mut taus: Vec<f64> = fc.iter().map(|p| p.at).collect();

        if !next.is_constant() {
            let arr: Vec<f64> = fc.iter().map(|p| p.at + p.val).collect();
            // breakpoints of `next`, unrolled over the arrival range
            let g = &next.points;
            let mut k = (arr[0] / period).floor();
            let mut j = g.partition_point(|p| p.at + k * period <= arr[0]);
            let mut bp = || {
                if j == g.len() {
                    j = 0;
                    k += 1.0;
                }
                let x = g[j].at + k * period;
                j += 1;
                x
            };
            let mut x = bp();
            for i in 0..fc.len() - 1 {
                let (a0, a1) = (arr[i], arr[i + 1]);
                while x <= a0 {
                    x = bp();
                }
                while x < a1 {
                    let t = fc[i].at + (x - a0) * ((fc[i + 1].at - fc[i].at) / (a1 - a0));
                    taus.push(t);
                    x = bp();
                }
            }
            taus.sort_by(f64::total_cmp);
        }

        let mut c: Vec<Point> = Vec::with_capacity(taus.len());
        for t in taus {
            if let Some(q) = c.last() {
                if t - q.at < TIME_EPS {
                    continue;
                }
            }
            let f = self.eval(t);
            c.push(Point::new(t, f + next.eval(t + f)));
        }
        let v0 = c[0].val;
        match c.last_mut() {
            Some(last) if last.at >= period - TIME_EPS => *last = Point::new(period, v0),
            _ => c.push(Point::new(period, v0)),
        }
        Ttf::from_closed(c, period)
    }

    /// Pointwise minimum (lower envelope).
    pub fn minimum(&self, other: &Ttf) -> Result<Ttf, TtfError> {
        self.check_period(other)?;
        Ok(self.minimum_unchecked(other))
    }

    pub(crate) fn minimum_unchecked(&self, other: &Ttf) -> Ttf {
        if self.max <= other.min {
            return self.clone();
        }
        if other.max <= self.min {
            return other.clone();
        }
        let period = self.period;
        let merged = merged_samples(self, other);
        let mut c: Vec<Point> = Vec::with_capacity(merged.len() * 2);
        for w in 0..merged.len() {
            let (t, f, g) = merged[w];
            c.push(Point::new(t, f.min(g)));
            if w + 1 < merged.len() {
                let (t1, f1, g1) = merged[w + 1];
                let (d0, d1) = (f - g, f1 - g1);
                if (d0 < 0.0 && d1 > 0.0) || (d0 > 0.0 && d1 < 0.0) {
                    let frac = d0 / (d0 - d1);
                    let tx = t + (t1 - t) * frac;
                    if tx - t >= TIME_EPS && t1 - tx >= TIME_EPS {
                        c.push(Point::new(tx, f + (f1 - f) * frac));
                    }
                }
            }
        }
        Ttf::from_closed(c, period)
    }

    /// Maximal departure-time windows (within one period) on which `self` is
    /// strictly below `other`. A window wrapping around the period end is
    /// reported once, with `end > period`.
    pub fn undercut_intervals(&self, other: &Ttf) -> Result<Vec<TimeInterval>, TtfError> {
        self.check_period(other)?;
        Ok(self.undercut_unchecked(other))
    }

    pub(crate) fn undercut_unchecked(&self, other: &Ttf) -> Vec<TimeInterval> {
        let period = self.period;
        if self.max < other.min - UNDERCUT_TOL {
            return vec![TimeInterval::new(0.0, period)];
        }
        if self.min >= other.max - UNDERCUT_TOL {
            return Vec::new();
        }
        let merged = merged_samples(self, other);
        let mut out: Vec<TimeInterval> = Vec::new();
        let mut open: Option<f64> = None;
        for w in 0..merged.len() {
            let (t, f, g) = merged[w];
            let d = g - f - UNDERCUT_TOL;
            if w == 0 && d > 0.0 {
                open = Some(t);
            }
            if w + 1 == merged.len() {
                break;
            }
            let (t1, f1, g1) = merged[w + 1];
            let d1 = g1 - f1 - UNDERCUT_TOL;
            let cross = || t + (t1 - t) * (d / (d - d1));
            match (d > 0.0, d1 > 0.0) {
                (true, false) => {
                    let b = open.take().unwrap_or(t);
                    out.push(TimeInterval::new(b, cross()));
                }
                (false, true) => open = Some(if d < 0.0 { cross() } else { t }),
                _ => {}
            }
        }
        if let Some(b) = open {
            out.push(TimeInterval::new(b, period));
        }
        out.retain(|iv| iv.len() > 0.0);
        if out.len() >= 2 && out[0].begin <= 0.0 && out[out.len() - 1].end >= period {
            let first = out.remove(0);
            let last = out.last_mut().unwrap();
            last.end = first.end + period;
        }
        out
    }

    /// Upper and lower bounds within a factor `1 + epsilon` of `self`.
    pub fn approximate(&self, epsilon: f64) -> Result<BoundPair, TtfError> {
        if !(epsilon >= 0.0) {
            return Err(TtfError::NegativeEpsilon(epsilon));
        }
        if epsilon == 0.0 || self.is_constant() {
            return Ok(BoundPair::exact(self.clone()));
        }
        let factor = 1.0 + epsilon;
        let upper = self.corridor_fit(|v| v, |v| v * factor, Side::Upper);
        let lower = self.corridor_fit(|v| v / factor, |v| v, Side::Lower);
        Ok(BoundPair { lower, upper })
    }

    /// Greedy FIFO polyline through the corridor `[lo(f), hi(f)]` with
    /// vertices at the breakpoint times of `self`. Falls back to `self` if the
    /// result would not be smaller.
    fn corridor_fit(&self, lo_of: impl Fn(f64) -> f64, hi_of: impl Fn(f64) -> f64, side: Side) -> Ttf {
        let c = self.closed();
        let n = c.len();
        let t: Vec<f64> = c.iter().map(|p| p.at).collect();
        let lo: Vec<f64> = c.iter().map(|p| lo_of(p.val)).collect();
        let hi: Vec<f64> = c.iter().map(|p| hi_of(p.val)).collect();

        // top[j]: highest value at t[j] from which the rest stays reachable
        // with slopes >= -1 below `hi`
        let mut top = hi.clone();
        for j in (0..n - 1).rev() {
            top[j] = top[j].min(top[j + 1] + (t[j + 1] - t[j]));
        }
        let target = match side {
            Side::Upper => lo.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            Side::Lower => hi.iter().cloned().fold(f64::INFINITY, f64::min),
        };
        let y0 = target.min(top[0]).max(lo[0]);
        top[n - 1] = y0;
        for j in (0..n - 1).rev() {
            top[j] = hi[j].min(top[j + 1] + (t[j + 1] - t[j]));
        }

        let mut out = vec![Point::new(0.0, y0)];
        let (mut i, mut yi) = (0usize, y0);
        while i < n - 1 {
            let (mut smin, mut smax) = (-1.0f64, f64::INFINITY);
            let mut reach: Option<(usize, f64, f64)> = None;
            for k in i + 1..n {
                let dt = t[k] - t[i];
                let (l, h) = if k == n - 1 { (y0, y0) } else { (lo[k], top[k]) };
                let nmin = smin.max((l - yi) / dt);
                let nmax = smax.min((h - yi) / dt);
                if nmin > nmax + 1e-15 {
                    break;
                }
                smin = nmin;
                smax = nmax.max(nmin);
                reach = Some((k, smin, smax));
            }
            let (j, yj) = match reach {
                Some((j, _, _)) if j == n - 1 => (j, y0),
                Some((j, smin, smax)) => {
                    let s = match side {
                        Side::Upper => smin,
                        Side::Lower => smax,
                    };
                    (j, (yi + s * (t[j] - t[i])).clamp(lo[j], top[j]))
                }
                None => (i + 1, if i + 1 == n - 1 { y0 } else { top[i + 1] }),
            };
            out.push(Point::new(t[j], yj));
            i = j;
            yi = yj;
        }

        let fit = Ttf::from_closed(out, self.period);
        let sound = fit.is_fifo()
            && probe_times(self, &fit).into_iter().all(|tau| {
                let (v, a) = (self.eval(tau), fit.eval(tau));
                let tol = 1e-9 * (1.0 + v);
                a >= lo_of(v) - tol && a <= hi_of(v) + tol
            });
        if sound && fit.len() <= self.len() {
            fit
        } else {
            self.clone()
        }
    }

    /// Maximum absolute difference to `other`, exact for piecewise-linear
    /// functions (evaluated on the union of breakpoints).
    pub fn max_deviation(&self, other: &Ttf) -> f64 {
        probe_times(self, other)
            .into_iter()
            .map(|t| (self.eval(t) - other.eval(t)).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy)]
enum Side {
    Upper,
    Lower,
}

#[inline]
fn collinear(a: Point, b: Point, c: Point) -> bool {
    (b.val - lerp(a, c, b.at)).abs() <= COLLINEAR_TOL * (1.0 + b.val.abs())
}

/// Union of breakpoint times of both functions over `[0, period]`.
fn probe_times(f: &Ttf, g: &Ttf) -> Vec<f64> {
    let mut times: Vec<f64> = f.points.iter().chain(g.points.iter()).map(|p| p.at).collect();
    times.push(0.0);
    times.push(f.period);
    times.sort_by(f64::total_cmp);
    times.dedup();
    times
}

/// `(time, f, g)` at the union of breakpoints over `[0, period]`, with both
/// functions linear between consecutive entries.
fn merged_samples(f: &Ttf, g: &Ttf) -> Vec<(f64, f64, f64)> {
    let fc = f.closed();
    let gc = g.closed();
    let mut out = Vec::with_capacity(fc.len() + gc.len());
    let (mut i, mut j) = (0, 0);
    while i < fc.len() && j < gc.len() {
        let (a, b) = (fc[i], gc[j]);
        let next = if (a.at - b.at).abs() < TIME_EPS {
            i += 1;
            j += 1;
            (a.at, a.val, b.val)
        } else if a.at < b.at {
            i += 1;
            (a.at, a.val, lerp(gc[j - 1], b, a.at))
        } else {
            j += 1;
            (b.at, lerp(fc[i - 1], a, b.at), b.val)
        };
        match out.last() {
            Some(&(t, _, _)) if next.0 - t < TIME_EPS => {}
            _ => out.push(next),
        }
    }
    out
}

/// A lower and an upper bound on some travel-time function.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundPair {
    pub lower: Ttf,
    pub upper: Ttf,
}

impl BoundPair {
    pub fn exact(f: Ttf) -> BoundPair {
        BoundPair { lower: f.clone(), upper: f }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn period(&self) -> f64 {
        self.lower.period
    }

    pub fn link(&self, next: &BoundPair) -> BoundPair {
        BoundPair { lower: self.lower.link_unchecked(&next.lower), upper: self.upper.link_unchecked(&next.upper) }
    }

    pub fn minimum(&self, other: &BoundPair) -> BoundPair {
        BoundPair {
            lower: self.lower.minimum_unchecked(&other.lower),
            upper: self.upper.minimum_unchecked(&other.upper),
        }
    }

    pub fn len(&self) -> usize {
        self.lower.len() + self.upper.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty() && self.upper.is_empty()
    }

    /// Segment-wise check that `lower <= upper` everywhere.
    pub fn is_ordered(&self) -> bool {
        probe_times(&self.lower, &self.upper)
            .into_iter()
            .all(|t| self.lower.eval(t) <= self.upper.eval(t) + 1e-9)
    }

    /// Re-approximates both sides with a factor `1 + epsilon`, keeping the
    /// outer bound: the result still encloses everything this pair encloses.
    pub fn coarsen(&self, epsilon: f64) -> BoundPair {
        match (self.lower.approximate(epsilon), self.upper.approximate(epsilon)) {
            (Ok(l), Ok(u)) => BoundPair { lower: l.lower, upper: u.upper },
            _ => self.clone(),
        }
    }
}
