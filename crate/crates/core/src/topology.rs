//! Finite topological spaces, ideals of closed sets, and the cover classes the
//! selection games are played over.
//!
//! Points are `0..n` with `n <= 16`; subsets are bitmasks ([`PointSet`]).

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

pub const MAX_POINTS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TopologyError {
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("set {0} is not open")]
    NotOpen(PointSet),
    #[error("trivial cover: the family contains the empty set or the whole space")]
    TrivialCover,
    #[error("invalid ideal: {0}")]
    InvalidIdeal(String),
    #[error("{0} is not contained in any member of the cofinal family")]
    NotCofinal(PointSet),
    #[error("point {0} out of range")]
    PointOutOfRange(usize),
}

/// A subset of the points of a finite space.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PointSet(pub u32);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    pub fn full(n: usize) -> Self {
        if n >= 32 {
            PointSet(u32::MAX)
        } else {
            PointSet((1u32 << n) - 1)
        }
    }

    pub fn singleton(x: usize) -> Self {
        PointSet(1 << x)
    }

    pub fn from_points<I: IntoIterator<Item = usize>>(pts: I) -> Self {
        PointSet(pts.into_iter().fold(0, |acc, p| acc | (1 << p)))
    }

    pub fn contains(self, x: usize) -> bool {
        self.0 >> x & 1 == 1
    }

    pub fn is_subset(self, other: PointSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: PointSet) -> Self {
        PointSet(self.0 | other.0)
    }

    pub fn intersection(self, other: PointSet) -> Self {
        PointSet(self.0 & other.0)
    }

    pub fn minus(self, other: PointSet) -> Self {
        PointSet(self.0 & !other.0)
    }

    pub fn complement(self, n: usize) -> Self {
        PointSet(!self.0 & PointSet::full(n).0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.contains(i))
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for PointSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for PointSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pts = Vec::<usize>::deserialize(d)?;
        if let Some(&p) = pts.iter().find(|&&p| p >= MAX_POINTS) {
            return Err(serde::de::Error::custom(format!("point {p} out of range")));
        }
        Ok(PointSet::from_points(pts))
    }
}

/// A finite topological space given by its complete lattice of open sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSpace {
    n: usize,
    opens: Vec<PointSet>,
}

impl FiniteSpace {
    pub fn new(n: usize, opens: impl IntoIterator<Item = PointSet>) -> Result<Self, TopologyError> {
        if n > MAX_POINTS {
            return Err(TopologyError::InvalidSpace(format!("{n} points exceeds {MAX_POINTS}")));
        }
        let full = PointSet::full(n);
        let mut opens: Vec<PointSet> = opens.into_iter().collect();
        opens.sort();
        opens.dedup();
        if let Some(bad) = opens.iter().find(|u| !u.is_subset(full)) {
            return Err(TopologyError::InvalidSpace(format!("{bad} is not a subset of the points")));
        }
        if opens.binary_search(&PointSet::EMPTY).is_err() || opens.binary_search(&full).is_err() {
            return Err(TopologyError::InvalidSpace("opens must contain the empty set and the whole space".into()));
        }
        for (i, &u) in opens.iter().enumerate() {
            for &v in &opens[i + 1..] {
                if opens.binary_search(&u.union(v)).is_err() {
                    return Err(TopologyError::InvalidSpace(format!("{u} ∪ {v} is not open")));
                }
                if opens.binary_search(&u.intersection(v)).is_err() {
                    return Err(TopologyError::InvalidSpace(format!("{u} ∩ {v} is not open")));
                }
            }
        }
        Ok(FiniteSpace { n, opens })
    }

    pub fn discrete(n: usize) -> Self {
        FiniteSpace::new(n, (0..1u32 << n).map(PointSet)).expect("discrete topology")
    }

    pub fn indiscrete(n: usize) -> Self {
        FiniteSpace::new(n, [PointSet::EMPTY, PointSet::full(n)]).expect("indiscrete topology")
    }

    /// Points `{0, 1}` with `{1}` the only non-trivial open set.
    pub fn sierpinski() -> Self {
        FiniteSpace::new(2, [PointSet(0), PointSet(0b10), PointSet(0b11)]).expect("Sierpiński space")
    }

    pub fn point_count(&self) -> usize {
        self.n
    }

    pub fn full(&self) -> PointSet {
        PointSet::full(self.n)
    }

    pub fn opens(&self) -> &[PointSet] {
        &self.opens
    }

    pub fn is_discrete(&self) -> bool {
        self.opens.len() == 1 << self.n
    }

    pub fn is_open(&self, s: PointSet) -> bool {
        self.opens.binary_search(&s).is_ok()
    }

    pub fn is_closed(&self, s: PointSet) -> bool {
        self.is_open(s.complement(self.n))
    }

    pub fn closed_sets(&self) -> Vec<PointSet> {
        let mut c: Vec<_> = self.opens.iter().map(|u| u.complement(self.n)).collect();
        c.sort();
        c
    }

    pub fn closure(&self, s: PointSet) -> PointSet {
        // complement of the union of opens missing s
        let outside =
            self.opens.iter().filter(|u| u.intersection(s).is_empty()).fold(PointSet::EMPTY, |acc, &u| acc.union(u));
        outside.complement(self.n)
    }

    pub fn interior(&self, s: PointSet) -> PointSet {
        self.opens.iter().filter(|u| u.is_subset(s)).fold(PointSet::EMPTY, |acc, &u| acc.union(u))
    }

    /// Smallest open set containing `x`.
    pub fn minimal_neighborhood(&self, x: usize) -> PointSet {
        self.opens.iter().filter(|u| u.contains(x)).fold(self.full(), |acc, &u| acc.intersection(u))
    }

    /// The proper non-empty open sets.
    pub fn proper_opens(&self) -> Vec<PointSet> {
        let full = self.full();
        self.opens.iter().copied().filter(|&u| !u.is_empty() && u != full).collect()
    }

    /// Proper open supersets of `a`.
    pub fn neighborhoods_of(&self, a: PointSet) -> Vec<PointSet> {
        self.proper_opens().into_iter().filter(|u| a.is_subset(*u)).collect()
    }

    pub fn point_neighborhoods(&self, x: usize) -> Vec<PointSet> {
        self.neighborhoods_of(PointSet::singleton(x))
    }

    /// All non-empty subsets whose closure is the whole space.
    pub fn dense_sets(&self) -> Vec<PointSet> {
        let full = self.full();
        (1..=full.0).map(PointSet).filter(|&s| self.closure(s) == full).collect()
    }

    /// All non-empty subsets clustering at `x`.
    pub fn cluster_sets(&self, x: usize) -> Vec<PointSet> {
        (1..=self.full().0).map(PointSet).filter(|&s| self.closure(s).contains(x)).collect()
    }

    fn check_point(&self, x: usize) -> Result<(), TopologyError> {
        if x < self.n {
            Ok(())
        } else {
            Err(TopologyError::PointOutOfRange(x))
        }
    }
}

fn check_family(space: &FiniteSpace, family: &[PointSet]) -> Result<(), TopologyError> {
    let full = space.full();
    for &u in family {
        if u.is_empty() || u == full {
            return Err(TopologyError::TrivialCover);
        }
        if !space.is_open(u) {
            return Err(TopologyError::NotOpen(u));
        }
    }
    Ok(())
}

fn union_of(family: &[PointSet]) -> PointSet {
    family.iter().fold(PointSet::EMPTY, |acc, &u| acc.union(u))
}

/// True iff `family` covers the space and every member of `ideal` lies inside
/// a single member of `family`.
pub fn is_a_cover(space: &FiniteSpace, ideal: &[PointSet], family: &[PointSet]) -> Result<bool, TopologyError> {
    is_large_a_cover(space, ideal, family, 1)
}

/// Multiset version of the large-cover condition: every ideal member must be
/// contained in at least `threshold` entries of `family`.
pub fn is_large_a_cover(
    space: &FiniteSpace,
    ideal: &[PointSet],
    family: &[PointSet],
    threshold: usize,
) -> Result<bool, TopologyError> {
    check_family(space, family)?;
    if union_of(family) != space.full() {
        return Ok(false);
    }
    Ok(ideal.iter().all(|&a| family.iter().filter(|u| a.is_subset(**u)).count() >= threshold))
}

/// Tail surrogate for co-finite containment: an `ideal`-cover in which every
/// entry from index `tail` onward contains every ideal member.
pub fn is_gamma_a_cover(
    space: &FiniteSpace,
    ideal: &[PointSet],
    family: &[PointSet],
    tail: usize,
) -> Result<bool, TopologyError> {
    if !is_a_cover(space, ideal, family)? {
        return Ok(false);
    }
    Ok(family.iter().skip(tail).all(|&u| ideal.iter().all(|a| a.is_subset(u))))
}

/// Replicates every entry `k` times. An `ideal`-cover replicated `k` times is a
/// large cover at threshold `k`.
pub fn replicate(family: &[PointSet], k: usize) -> Vec<PointSet> {
    family.iter().flat_map(|&u| std::iter::repeat_n(u, k)).collect()
}

pub fn is_closed_discrete(space: &FiniteSpace, s: PointSet) -> bool {
    space.is_closed(s) && s.iter().all(|x| space.minimal_neighborhood(x).intersection(s) == PointSet::singleton(x))
}

pub fn clusters_at(space: &FiniteSpace, s: PointSet, x: usize) -> bool {
    space.closure(s).contains(x)
}

pub fn is_dense(space: &FiniteSpace, s: PointSet) -> bool {
    space.closure(s) == space.full()
}

/// Smallest open `V` (by size, then bit order) with `a ⊆ V ⊆ cl(V) ⊆ u`.
pub fn normality_witness(space: &FiniteSpace, a: PointSet, u: PointSet) -> Option<PointSet> {
    let mut candidates: Vec<PointSet> =
        space.opens().iter().copied().filter(|&v| a.is_subset(v) && space.closure(v).is_subset(u)).collect();
    candidates.sort_by_key(|v| (v.len(), v.0));
    candidates.first().copied()
}

pub fn is_a_normal(space: &FiniteSpace, ideal: &[PointSet]) -> bool {
    ideal
        .iter()
        .all(|&a| space.opens().iter().filter(|u| a.is_subset(**u)).all(|&u| normality_witness(space, a, u).is_some()))
}

/// Elements of `family` not strictly contained in another element.
pub fn maximal_elements(family: &[PointSet]) -> Vec<PointSet> {
    let mut out: Vec<PointSet> =
        family.iter().copied().filter(|&a| !family.iter().any(|&b| b != a && a.is_subset(b))).collect();
    out.sort();
    out.dedup();
    out
}

/// Least size of a subfamily of `a` such that every member of `b` is
/// contained in one of its members.
pub fn cofinality(a: &[PointSet], b: &[PointSet]) -> Result<usize, TopologyError> {
    if b.is_empty() {
        return Ok(0);
    }
    // Any cofinal subfamily can be pushed up to maximal elements without growing.
    let tops = maximal_elements(a);
    let mut covers_of = Vec::with_capacity(b.len());
    for &s in b {
        let mask: u64 = tops.iter().enumerate().filter(|(_, t)| s.is_subset(**t)).fold(0, |m, (i, _)| m | 1 << i);
        if mask == 0 {
            return Err(TopologyError::NotCofinal(s));
        }
        covers_of.push(mask);
    }
    covers_of.sort_unstable();
    covers_of.dedup();
    let m = tops.len();
    for k in 1..=m {
        if choose_cover(&covers_of, m, k, 0, 0) {
            return Ok(k);
        }
    }
    unreachable!("the full family of maximal elements is cofinal")
}

fn choose_cover(needs: &[u64], m: usize, k: usize, start: usize, chosen: u64) -> bool {
    if needs.iter().all(|&need| need & chosen != 0) {
        return true;
    }
    if k == 0 {
        return false;
    }
    (start..m).any(|i| choose_cover(needs, m, k - 1, i + 1, chosen | 1 << i))
}

/// An ideal of closed sets, adapted to finite spaces:
/// members are closed, non-empty and proper; the family is closed downward
/// under non-empty closed subsets; `A ∪ B` is a member whenever it is proper;
/// and `cl{x}` is a member for every point whose closure is proper.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealFamily {
    members: Vec<PointSet>,
}

impl IdealFamily {
    pub fn new(space: &FiniteSpace, members: impl IntoIterator<Item = PointSet>) -> Result<Self, TopologyError> {
        let mut members: Vec<PointSet> = members.into_iter().collect();
        members.sort();
        members.dedup();
        let full = space.full();
        let bad = |msg: String| Err(TopologyError::InvalidIdeal(msg));
        if members.is_empty() {
            return bad("empty family".into());
        }
        for &a in &members {
            if a.is_empty() || a == full || !a.is_subset(full) {
                return bad(format!("{a} is empty or not proper"));
            }
            if !space.is_closed(a) {
                return bad(format!("{a} is not closed"));
            }
        }
        let has = |s: PointSet| members.binary_search(&s).is_ok();
        for &a in &members {
            for &b in &members {
                let u = a.union(b);
                if u != full && !has(u) {
                    return bad(format!("{a} ∪ {b} missing"));
                }
            }
            for c in space.closed_sets() {
                if !c.is_empty() && c.is_subset(a) && !has(c) {
                    return bad(format!("closed subset {c} of {a} missing"));
                }
            }
        }
        for x in 0..space.point_count() {
            let c = space.closure(PointSet::singleton(x));
            if c != full && !has(c) {
                return bad(format!("closure {c} of point {x} missing"));
            }
        }
        Ok(IdealFamily { members })
    }

    pub fn members(&self) -> &[PointSet] {
        &self.members
    }
}

impl std::ops::Deref for IdealFamily {
    type Target = [PointSet];
    fn deref(&self) -> &[PointSet] {
        &self.members
    }
}

/// Every topology on `n` points, in increasing order of the bitmask encoding
/// of their open families.
pub fn enumerate_topologies(n: usize) -> Vec<FiniteSpace> {
    assert!(n <= 4, "enumeration is exponential in 2^n");
    let full = PointSet::full(n);
    let middle: Vec<PointSet> = (1..full.0).map(PointSet).collect();
    let mut out = Vec::new();
    for mask in 0u64..1 << middle.len() {
        let mut opens = vec![PointSet::EMPTY, full];
        opens.extend(middle.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &s)| s));
        if let Ok(space) = FiniteSpace::new(n, opens) {
            out.push(space);
        }
    }
    out
}

pub fn enumerate_ideals(space: &FiniteSpace) -> Vec<IdealFamily> {
    let full = space.full();
    let candidates: Vec<PointSet> = space.closed_sets().into_iter().filter(|&c| !c.is_empty() && c != full).collect();
    assert!(candidates.len() <= 16);
    (1u32..1 << candidates.len())
        .filter_map(|mask| {
            let members = candidates.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &c)| c);
            IdealFamily::new(space, members).ok()
        })
        .collect()
}

/// Cover classes and point classes, evaluated on a sequence of selected items.
/// Items are open sets (bitmasks) for the cover classes and point indices for
/// the point classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum CoverClass {
    /// Non-trivial open covers.
    OpenCover,
    ACover {
        ideal: Vec<PointSet>,
    },
    /// Multiplicity surrogate for covers with infinitely many members around each ideal member.
    LargeACover {
        ideal: Vec<PointSet>,
        threshold: usize,
    },
    /// Tail surrogate for covers that eventually contain each ideal member.
    GammaACover {
        ideal: Vec<PointSet>,
        tail: usize,
    },
    /// `target ⊆ ⋃_{n ≥ tail} U_n`.
    TailCovers {
        target: PointSet,
        tail: usize,
    },
    Dense,
    ClosedDiscrete,
    ClusterAt {
        point: usize,
    },
    /// Every selection from index `tail` on lies in each neighborhood of `point`.
    ConvergesTo {
        point: usize,
        tail: usize,
    },
}

impl CoverClass {
    pub fn items_are_points(&self) -> bool {
        matches!(
            self,
            CoverClass::Dense
                | CoverClass::ClosedDiscrete
                | CoverClass::ClusterAt { .. }
                | CoverClass::ConvergesTo { .. }
        )
    }

    pub fn validate(&self, space: &FiniteSpace) -> Result<(), TopologyError> {
        match self {
            CoverClass::ClusterAt { point } | CoverClass::ConvergesTo { point, .. } => space.check_point(*point),
            _ => Ok(()),
        }
    }

    pub fn holds(&self, space: &FiniteSpace, items: &[u32]) -> bool {
        let sets = || items.iter().map(|&i| PointSet(i)).collect::<Vec<_>>();
        let points = || items.iter().fold(PointSet::EMPTY, |acc, &i| acc.union(PointSet::singleton(i as usize)));
        match self {
            CoverClass::OpenCover => is_a_cover(space, &[], &sets()).unwrap_or(false),
            CoverClass::ACover { ideal } => is_a_cover(space, ideal, &sets()).unwrap_or(false),
            CoverClass::LargeACover { ideal, threshold } => {
                is_large_a_cover(space, ideal, &sets(), *threshold).unwrap_or(false)
            }
            CoverClass::GammaACover { ideal, tail } => is_gamma_a_cover(space, ideal, &sets(), *tail).unwrap_or(false),
            CoverClass::TailCovers { target, tail } => {
                target.is_subset(union_of(&sets().into_iter().skip(*tail).collect::<Vec<_>>()))
            }
            CoverClass::Dense => is_dense(space, points()),
            CoverClass::ClosedDiscrete => is_closed_discrete(space, points()),
            CoverClass::ClusterAt { point } => clusters_at(space, points(), *point),
            CoverClass::ConvergesTo { point, tail } => {
                let nbhd = space.minimal_neighborhood(*point);
                items.iter().skip(*tail).all(|&i| nbhd.contains(i as usize))
            }
        }
    }
}
