//! Finite unions of real intervals with rational endpoints.

use super::SetValuedError;
use crate::rational::{self, midpoint, Rat};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A closed interval `[lo, hi]`, possibly a single point.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub lo: Rat,
    pub hi: Rat,
}

impl Interval {
    pub fn new(lo: Rat, hi: Rat) -> Result<Self, SetValuedError> {
        if lo > hi {
            return Err(SetValuedError::InvalidInterval(rational::format(&lo), rational::format(&hi)));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: Rat) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn contains(&self, x: &Rat) -> bool {
        &self.lo <= x && x <= &self.hi
    }
}

impl Serialize for Interval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq([rational::format(&self.lo), rational::format(&self.hi)])
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = Vec::<String>::deserialize(d)?;
        let parsed: Vec<Rat> =
            raw.iter().map(|s| rational::parse(s).map_err(D::Error::custom)).collect::<Result<_, _>>()?;
        match parsed.as_slice() {
            [x] => Ok(Interval::point(x.clone())),
            [lo, hi] => Interval::new(lo.clone(), hi.clone()).map_err(D::Error::custom),
            _ => Err(D::Error::custom("an interval is [lo, hi] or [x]")),
        }
    }
}

/// A non-empty compact subset of the line: sorted, pairwise separated closed intervals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CompactSet {
    intervals: Vec<Interval>,
}

impl CompactSet {
    /// Sorts and merges overlapping or touching intervals.
    pub fn new(mut intervals: Vec<Interval>) -> Result<Self, SetValuedError> {
        if intervals.is_empty() {
            return Err(SetValuedError::EmptySection);
        }
        intervals.sort();
        let mut out: Vec<Interval> = Vec::with_capacity(intervals.len());
        for iv in intervals {
            match out.last_mut() {
                Some(last) if iv.lo <= last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => out.push(iv),
            }
        }
        Ok(CompactSet { intervals: out })
    }

    pub fn point(x: Rat) -> Self {
        CompactSet { intervals: vec![Interval::point(x)] }
    }

    pub fn interval(lo: Rat, hi: Rat) -> Result<Self, SetValuedError> {
        Ok(CompactSet { intervals: vec![Interval::new(lo, hi)?] })
    }

    pub fn from_points<I: IntoIterator<Item = Rat>>(pts: I) -> Result<Self, SetValuedError> {
        CompactSet::new(pts.into_iter().map(Interval::point).collect())
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn min(&self) -> &Rat {
        &self.intervals[0].lo
    }

    pub fn max(&self) -> &Rat {
        &self.intervals[self.intervals.len() - 1].hi
    }

    pub fn hull(&self) -> CompactSet {
        CompactSet { intervals: vec![Interval { lo: self.min().clone(), hi: self.max().clone() }] }
    }

    pub fn is_interval(&self) -> bool {
        self.intervals.len() == 1
    }

    pub fn is_singleton(&self) -> bool {
        self.is_interval() && self.intervals[0].lo == self.intervals[0].hi
    }

    pub fn contains(&self, x: &Rat) -> bool {
        self.intervals.iter().any(|iv| iv.contains(x))
    }

    pub fn union(&self, other: &CompactSet) -> CompactSet {
        let mut all = self.intervals.clone();
        all.extend(other.intervals.iter().cloned());
        CompactSet::new(all).expect("non-empty")
    }

    pub fn is_subset(&self, other: &CompactSet) -> bool {
        other.to_realset().contains_compact(self)
    }

    /// Largest absolute value attained.
    pub fn sup_abs(&self) -> Rat {
        rational::max(&rational::abs(self.min()), &rational::abs(self.max()))
    }

    pub fn to_realset(&self) -> RealSet {
        RealSet::new(self.intervals.iter().map(|iv| Span::closed(iv.lo.clone(), iv.hi.clone())).collect())
    }

    /// `{y : |y - k| < eps for some k}` (open) or `≤ eps` (closed).
    pub fn fatten(&self, eps: &Rat, closed: bool) -> RealSet {
        RealSet::new(
            self.intervals
                .iter()
                .map(|iv| Span { lo: &iv.lo - eps, hi: &iv.hi + eps, lo_closed: closed, hi_closed: closed })
                .collect(),
        )
    }

    /// Some point of `self` outside `other`, if any.
    pub fn point_outside(&self, other: &CompactSet) -> Option<Rat> {
        let outside = self.to_realset().intersection(&other.to_realset().complement_within(self.min(), self.max()));
        outside.spans().first().map(Span::sample)
    }
}

impl fmt::Display for CompactSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, iv) in self.intervals.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            if iv.lo == iv.hi {
                write!(f, "{{{}}}", rational::format(&iv.lo))?;
            } else {
                write!(f, "[{}, {}]", rational::format(&iv.lo), rational::format(&iv.hi))?;
            }
        }
        Ok(())
    }
}

impl Serialize for CompactSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.intervals.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CompactSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        CompactSet::new(Vec::<Interval>::deserialize(d)?).map_err(D::Error::custom)
    }
}

/// One connected piece of a [`RealSet`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Span {
    pub lo: Rat,
    pub hi: Rat,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Span {
    pub fn closed(lo: Rat, hi: Rat) -> Self {
        Span { lo, hi, lo_closed: true, hi_closed: true }
    }

    pub fn open(lo: Rat, hi: Rat) -> Self {
        Span { lo, hi, lo_closed: false, hi_closed: false }
    }

    pub fn point(x: Rat) -> Self {
        Span::closed(x.clone(), x)
    }

    fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rat) -> bool {
        (self.lo < *x || (self.lo_closed && self.lo == *x)) && (*x < self.hi || (self.hi_closed && self.hi == *x))
    }

    /// A point of the span: the left end when it belongs, otherwise the midpoint.
    pub fn sample(&self) -> Rat {
        if self.lo_closed {
            self.lo.clone()
        } else {
            midpoint(&self.lo, &self.hi)
        }
    }

    fn contains_interval(&self, iv: &Interval) -> bool {
        self.contains(&iv.lo) && self.contains(&iv.hi)
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            return write!(f, "{{{}}}", rational::format(&self.lo));
        }
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            rational::format(&self.lo),
            rational::format(&self.hi),
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

#[derive(Serialize, Deserialize)]
struct SpanWire {
    lo: String,
    hi: String,
    lo_closed: bool,
    hi_closed: bool,
}

impl Serialize for Span {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SpanWire {
            lo: rational::format(&self.lo),
            hi: rational::format(&self.hi),
            lo_closed: self.lo_closed,
            hi_closed: self.hi_closed,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Span {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let w = SpanWire::deserialize(d)?;
        Ok(Span {
            lo: rational::parse(&w.lo).map_err(D::Error::custom)?,
            hi: rational::parse(&w.hi).map_err(D::Error::custom)?,
            lo_closed: w.lo_closed,
            hi_closed: w.hi_closed,
        })
    }
}

/// A finite union of intervals of any kind (open, closed, half-open, points),
/// kept in canonical form: sorted, disjoint and with no two spans that could merge.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RealSet {
    spans: Vec<Span>,
}

impl RealSet {
    pub fn empty() -> Self {
        RealSet { spans: Vec::new() }
    }

    pub fn new(spans: Vec<Span>) -> Self {
        let mut spans: Vec<Span> = spans.into_iter().filter(|s| !s.is_empty()).collect();
        spans.sort_by(|a, b| a.lo.cmp(&b.lo).then(b.lo_closed.cmp(&a.lo_closed)));
        let mut out: Vec<Span> = Vec::with_capacity(spans.len());
        for s in spans {
            match out.last_mut() {
                Some(cur) if s.lo < cur.hi || (s.lo == cur.hi && (cur.hi_closed || s.lo_closed)) => {
                    if s.hi > cur.hi {
                        cur.hi = s.hi;
                        cur.hi_closed = s.hi_closed;
                    } else if s.hi == cur.hi {
                        cur.hi_closed |= s.hi_closed;
                    }
                }
                _ => out.push(s),
            }
        }
        RealSet { spans: out }
    }

    pub fn closed_interval(lo: Rat, hi: Rat) -> Self {
        RealSet::new(vec![Span::closed(lo, hi)])
    }

    pub fn open_interval(lo: Rat, hi: Rat) -> Self {
        RealSet::new(vec![Span::open(lo, hi)])
    }

    pub fn spans(&self) -> &[Span] {
        &self.spans
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn contains(&self, x: &Rat) -> bool {
        self.spans.iter().any(|s| s.contains(x))
    }

    pub fn union(&self, other: &RealSet) -> RealSet {
        RealSet::new(self.spans.iter().chain(other.spans.iter()).cloned().collect())
    }

    pub fn intersection(&self, other: &RealSet) -> RealSet {
        let mut out = Vec::new();
        for a in &self.spans {
            for b in &other.spans {
                let (lo, lo_closed) = match a.lo.cmp(&b.lo) {
                    std::cmp::Ordering::Less => (b.lo.clone(), b.lo_closed),
                    std::cmp::Ordering::Greater => (a.lo.clone(), a.lo_closed),
                    std::cmp::Ordering::Equal => (a.lo.clone(), a.lo_closed && b.lo_closed),
                };
                let (hi, hi_closed) = match a.hi.cmp(&b.hi) {
                    std::cmp::Ordering::Less => (a.hi.clone(), a.hi_closed),
                    std::cmp::Ordering::Greater => (b.hi.clone(), b.hi_closed),
                    std::cmp::Ordering::Equal => (a.hi.clone(), a.hi_closed && b.hi_closed),
                };
                out.push(Span { lo, hi, lo_closed, hi_closed });
            }
        }
        RealSet::new(out)
    }

    /// `[a, b] \ self`.
    pub fn complement_within(&self, a: &Rat, b: &Rat) -> RealSet {
        let clipped = self.intersection(&RealSet::closed_interval(a.clone(), b.clone()));
        let mut out = Vec::new();
        let mut lo = a.clone();
        let mut lo_closed = true;
        for s in clipped.spans {
            out.push(Span { lo, hi: s.lo.clone(), lo_closed, hi_closed: !s.lo_closed });
            lo = s.hi;
            lo_closed = !s.hi_closed;
        }
        out.push(Span { lo, hi: b.clone(), lo_closed, hi_closed: true });
        RealSet::new(out)
    }

    pub fn closure(&self) -> RealSet {
        RealSet::new(self.spans.iter().map(|s| Span::closed(s.lo.clone(), s.hi.clone())).collect())
    }

    pub fn is_subset(&self, other: &RealSet) -> bool {
        &self.intersection(other) == self
    }

    pub fn contains_compact(&self, k: &CompactSet) -> bool {
        k.intervals().iter().all(|iv| self.spans.iter().any(|s| s.contains_interval(iv)))
    }

    /// Openness relative to the closed domain `[a, b]`.
    pub fn is_open_in(&self, a: &Rat, b: &Rat) -> bool {
        self.spans
            .iter()
            .all(|s| (!s.lo_closed || s.lo == *a) && (!s.hi_closed || s.hi == *b) && (!s.is_point() || a == b))
    }

    /// All span endpoints, sorted.
    pub fn endpoints(&self) -> Vec<Rat> {
        let mut pts: Vec<Rat> = self.spans.iter().flat_map(|s| [s.lo.clone(), s.hi.clone()]).collect();
        pts.sort();
        pts.dedup();
        pts
    }
}

impl fmt::Display for RealSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.spans.is_empty() {
            return write!(f, "∅");
        }
        for (i, s) in self.spans.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl Serialize for RealSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.spans.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RealSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(RealSet::new(Vec::<Span>::deserialize(d)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn compact_sets_merge() {
        let k = CompactSet::new(vec![
            Interval::new(int(2), int(3)).unwrap(),
            Interval::new(int(0), int(1)).unwrap(),
            Interval::point(int(1)),
        ])
        .unwrap();
        assert_eq!(k.intervals().len(), 2);
        let touching =
            CompactSet::new(vec![Interval::new(int(0), int(1)).unwrap(), Interval::new(int(1), int(2)).unwrap()])
                .unwrap();
        assert!(touching.is_interval());
        assert!(CompactSet::new(vec![]).is_err());
        assert!(Interval::new(int(1), int(0)).is_err());
    }

    #[test]
    fn open_spans_do_not_merge_at_a_shared_endpoint() {
        let s = RealSet::new(vec![Span::open(int(0), int(1)), Span::open(int(1), int(2))]);
        assert_eq!(s.spans().len(), 2);
        assert!(!s.contains(&int(1)));
        let t = RealSet::new(vec![Span::open(int(0), int(1)), Span::point(int(1)), Span::open(int(1), int(2))]);
        assert_eq!(t, RealSet::open_interval(int(0), int(2)));
    }

    #[test]
    fn complement_flips_endpoints() {
        let u = RealSet::open_interval(rat(-1, 2), rat(1, 2));
        let c = u.complement_within(&int(-1), &int(2));
        assert_eq!(c, RealSet::new(vec![Span::closed(int(-1), rat(-1, 2)), Span::closed(rat(1, 2), int(2))]));
        assert_eq!(c.complement_within(&int(-1), &int(2)), u);
        assert!(u.is_open_in(&int(-1), &int(2)));
        assert!(!c.is_open_in(&int(-1), &int(2)));
    }

    #[test]
    fn relative_openness_at_domain_ends() {
        let s = RealSet::new(vec![Span { lo: int(-1), hi: int(0), lo_closed: true, hi_closed: false }]);
        assert!(s.is_open_in(&int(-1), &int(2)));
        assert!(!RealSet::new(vec![Span::point(int(0))]).is_open_in(&int(-1), &int(2)));
    }

    #[test]
    fn point_outside() {
        let k = CompactSet::interval(int(0), int(2)).unwrap();
        let l = CompactSet::new(vec![Interval::new(int(0), int(1)).unwrap(), Interval::point(int(2))]).unwrap();
        let p = k.point_outside(&l).unwrap();
        assert!(k.contains(&p) && !l.contains(&p));
        assert_eq!(l.point_outside(&k), None);
    }

    #[test]
    fn wire_format() {
        let k = CompactSet::new(vec![Interval::new(int(0), int(1)).unwrap(), Interval::point(int(2))]).unwrap();
        let json = serde_json::to_string(&k).unwrap();
        assert_eq!(json, r#"[["0","1"],["2","2"]]"#);
        assert_eq!(serde_json::from_str::<CompactSet>(&json).unwrap(), k);
        assert_eq!(serde_json::from_str::<CompactSet>(r#"[["3/2"]]"#).unwrap(), CompactSet::point(rat(3, 2)));
    }
}
