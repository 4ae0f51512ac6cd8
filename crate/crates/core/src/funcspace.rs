//! Finite universes of minimal cusco maps: value lattices over a finite
//! discrete space, or registered piecewise maps over an interval.

use crate::rational::{self, pow2_neg, Rat};
use crate::setvalued::{
    ball_membership, is_minimal_cusco, vietoris_preimage, CompactSet, Entourage, RealSet, SetValuedError, SetValuedMap,
    Verdict,
};
use crate::topology::{FiniteSpace, PointSet};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error("function grids over a finite space need a discrete space")]
    NotDiscrete,
    #[error("the grid has no zero member")]
    NoZero,
    #[error("member `{0}` is not a minimal cusco map")]
    NotMinimalCusco(String),
    #[error("member `{0}` lives on a different domain")]
    DomainMismatch(String),
    #[error("region {0} is not in the registered ideal")]
    NotInIdeal(String),
    #[error("no member with index {0}")]
    UnknownMember(usize),
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error("region kind does not match the grid")]
    RegionKind,
    #[error(transparent)]
    SetValued(#[from] SetValuedError),
}

/// A member of an ideal: a set of points or a compact subset of the interval.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Region {
    Points(PointSet),
    Compact(CompactSet),
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Region::Points(p) => write!(f, "{p}"),
            Region::Compact(k) => write!(f, "{k}"),
        }
    }
}

/// A subset of the base, as produced by preimages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Subset {
    Points(PointSet),
    Reals(RealSet),
}

impl Subset {
    pub fn contains_region(&self, r: &Region) -> bool {
        match (self, r) {
            (Subset::Points(s), Region::Points(a)) => a.is_subset(*s),
            (Subset::Reals(s), Region::Compact(k)) => s.contains_compact(k),
            _ => false,
        }
    }

    pub fn as_points(&self) -> Option<PointSet> {
        match self {
            Subset::Points(p) => Some(*p),
            Subset::Reals(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Member {
    /// Values at the points `0..n` of a discrete space.
    Values(Vec<Rat>),
    Map(SetValuedMap),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Base {
    Finite(FiniteSpace),
    Interval { lo: Rat, hi: Rat },
}

/// A finite stock of minimal cusco maps over a fixed base, in registration
/// order, together with the ideal used for the uniform neighborhoods.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionGrid {
    base: Base,
    members: Vec<Member>,
    ids: Vec<String>,
    ideal: Vec<Region>,
    zero: usize,
}

fn check_ideal_kind(base: &Base, ideal: &[Region]) -> Result<(), GridError> {
    let ok = ideal.iter().all(|r| match (base, r) {
        (Base::Finite(s), Region::Points(p)) => p.is_subset(s.full()),
        (Base::Interval { lo, hi }, Region::Compact(k)) => k.min() >= lo && k.max() <= hi,
        _ => false,
    });
    if ok {
        Ok(())
    } else {
        Err(GridError::RegionKind)
    }
}

impl FunctionGrid {
    /// Every function from the points of the discrete `space` into `values`.
    /// Members are ordered lexicographically with point 0 most significant.
    pub fn lattice(space: FiniteSpace, values: &[Rat], ideal: Vec<Region>) -> Result<Self, GridError> {
        if !space.is_discrete() {
            return Err(GridError::NotDiscrete);
        }
        let mut vals = values.to_vec();
        vals.sort();
        vals.dedup();
        if !vals.iter().any(Zero::is_zero) {
            return Err(GridError::NoZero);
        }
        check_ideal_kind(&Base::Finite(space.clone()), &ideal)?;
        let n = space.point_count();
        let mut members = vec![Vec::new()];
        for _ in 0..n {
            members = members
                .into_iter()
                .flat_map(|m: Vec<Rat>| {
                    vals.iter().map(move |v| {
                        let mut m = m.clone();
                        m.push(v.clone());
                        m
                    })
                })
                .collect();
        }
        let ids = members.iter().map(|m| values_id(m)).collect();
        let zero = members.iter().position(|m| m.iter().all(Zero::is_zero)).expect("zero is a value");
        Ok(FunctionGrid {
            base: Base::Finite(space),
            members: members.into_iter().map(Member::Values).collect(),
            ids,
            ideal,
            zero,
        })
    }

    /// Registered maps over `[lo, hi]`. The zero map is added in front when missing.
    pub fn maps(lo: Rat, hi: Rat, named: Vec<(String, SetValuedMap)>, ideal: Vec<Region>) -> Result<Self, GridError> {
        let base = Base::Interval { lo: lo.clone(), hi: hi.clone() };
        check_ideal_kind(&base, &ideal)?;
        let zero_map = SetValuedMap::constant(lo.clone(), hi.clone(), CompactSet::point(Rat::zero()))?;
        let mut members = Vec::new();
        let mut ids = Vec::new();
        for (id, m) in named {
            if m.domain() != (&lo, &hi) {
                return Err(GridError::DomainMismatch(id));
            }
            if is_minimal_cusco(&m)? == Verdict::No {
                return Err(GridError::NotMinimalCusco(id));
            }
            members.push(Member::Map(m));
            ids.push(id);
        }
        let zero = match members.iter().position(|m| matches!(m, Member::Map(phi) if phi.same_map(&zero_map))) {
            Some(z) => z,
            None => {
                members.insert(0, Member::Map(zero_map));
                ids.insert(0, "0".to_string());
                0
            }
        };
        Ok(FunctionGrid { base, members, ids, ideal, zero })
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn member(&self, i: usize) -> Result<&Member, GridError> {
        self.members.get(i).ok_or(GridError::UnknownMember(i))
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|s| s == id)
    }

    /// Index of the member with the given values (discrete grids).
    pub fn index_of_values(&self, values: &[Rat]) -> Option<usize> {
        self.members.iter().position(|m| matches!(m, Member::Values(v) if v == values))
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn ideal(&self) -> &[Region] {
        &self.ideal
    }

    pub fn whole(&self) -> Subset {
        match &self.base {
            Base::Finite(s) => Subset::Points(s.full()),
            Base::Interval { lo, hi } => Subset::Reals(RealSet::closed_interval(lo.clone(), hi.clone())),
        }
    }

    pub fn neighborhood(&self, center: usize, a: Region, epsilon: Rat) -> Result<FunctionNeighborhood, GridError> {
        self.member(center)?;
        if !epsilon.is_positive() {
            return Err(GridError::NonPositiveEpsilon);
        }
        if !self.ideal.contains(&a) {
            return Err(GridError::NotInIdeal(a.to_string()));
        }
        Ok(FunctionNeighborhood { center, a, epsilon })
    }

    /// `psi ∈ [phi; a, eps]`: the two maps are within the open Hausdorff `eps` on `a`.
    pub fn in_ball(&self, phi: usize, psi: usize, a: &Region, epsilon: &Rat) -> Result<bool, GridError> {
        match (self.member(phi)?, self.member(psi)?, a) {
            (Member::Values(f), Member::Values(g), Region::Points(a)) => {
                Ok(a.iter().all(|x| rational::abs(&(&f[x] - &g[x])) < *epsilon))
            }
            (Member::Map(f), Member::Map(g), Region::Compact(k)) => {
                Ok(ball_membership(f, g, k, &Entourage::open(epsilon.clone())?)?)
            }
            _ => Err(GridError::RegionKind),
        }
    }

    /// `{x : Φ(x) ⊆ (-2^{-n}, 2^{-n})}`
    pub fn small_preimage(&self, member: usize, n: u32) -> Result<Subset, GridError> {
        let e = pow2_neg(n);
        Ok(match self.member(member)? {
            Member::Values(v) => Subset::Points(PointSet::from_points(
                v.iter().enumerate().filter(|(_, y)| rational::abs(y) < e).map(|(x, _)| x),
            )),
            Member::Map(phi) => Subset::Reals(vietoris_preimage(phi, &[(-e.clone(), e)])?.0),
        })
    }

    /// Grid members lying in the ball, in registration order.
    pub fn neighborhood_members(&self, nbhd: &FunctionNeighborhood) -> Result<Vec<usize>, GridError> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            if self.in_ball(nbhd.center, i, &nbhd.a, &nbhd.epsilon)? {
                out.push(i);
            }
        }
        Ok(out)
    }

    /// Neighborhoods of zero over `regions × epsilons`.
    pub fn zero_tests(&self, regions: &[Region], epsilons: &[Rat]) -> Result<Vec<FunctionNeighborhood>, GridError> {
        let mut out = Vec::new();
        for a in regions {
            for e in epsilons {
                out.push(self.neighborhood(self.zero, a.clone(), e.clone())?);
            }
        }
        Ok(out)
    }

    /// Every test neighborhood contains one of the members.
    pub fn cluster_at_zero(&self, members: &[usize], tests: &[FunctionNeighborhood]) -> Result<bool, GridError> {
        for t in tests {
            let mut hit = false;
            for &m in members {
                if self.in_ball(t.center, m, &t.a, &t.epsilon)? {
                    hit = true;
                    break;
                }
            }
            if !hit {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Separation at radius 1 on `b`: no member lies in another's ball, and
    /// every member from position `tail` on stays out of the ball around zero.
    /// Only registered members are checked, not the whole function space.
    pub fn closed_discrete_surrogate(&self, members: &[usize], b: &Region, tail: usize) -> Result<bool, GridError> {
        let one = Rat::from_integer(1.into());
        for (i, &p) in members.iter().enumerate() {
            for &q in &members[i + 1..] {
                if self.in_ball(p, q, b, &one)? || self.in_ball(q, p, b, &one)? {
                    return Ok(false);
                }
            }
        }
        for &m in members.iter().skip(tail) {
            if self.in_ball(self.zero, m, b, &one)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn values_id(v: &[Rat]) -> String {
    let parts: Vec<String> = v.iter().map(rational::format).collect();
    format!("({})", parts.join(","))
}

/// `[center; a, epsilon]`
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FunctionNeighborhood {
    pub center: usize,
    pub a: Region,
    #[serde(with = "rational::serde_rat")]
    pub epsilon: Rat,
}

/// Grid-level win conditions on a sequence of selected members.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum GridCondition {
    /// Every `[0; a, eps]` with `a` in `regions` and `eps` in the menu contains a selection.
    ClusterAtZero {
        regions: Vec<Region>,
        #[serde(with = "rational::serde_rat_vec")]
        epsilons: Vec<Rat>,
    },
    /// Every selection from position `tail` on lies in every test neighborhood.
    ConvergesToZero {
        regions: Vec<Region>,
        #[serde(with = "rational::serde_rat_vec")]
        epsilons: Vec<Rat>,
        tail: usize,
    },
    /// Some `b` in `regions` separates the selections.
    ClosedDiscrete { regions: Vec<Region>, tail: usize },
}

impl GridCondition {
    pub fn holds(&self, grid: &FunctionGrid, items: &[u32]) -> Result<bool, GridError> {
        let members: Vec<usize> = items.iter().map(|&i| i as usize).collect();
        match self {
            GridCondition::ClusterAtZero { regions, epsilons } => {
                grid.cluster_at_zero(&members, &grid.zero_tests(regions, epsilons)?)
            }
            GridCondition::ConvergesToZero { regions, epsilons, tail } => {
                for t in grid.zero_tests(regions, epsilons)? {
                    for &m in members.iter().skip(*tail) {
                        if !grid.in_ball(t.center, m, &t.a, &t.epsilon)? {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
            GridCondition::ClosedDiscrete { regions, tail } => {
                for b in regions {
                    if grid.closed_discrete_surrogate(&members, b, *tail)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::setvalued::{convexify, graph_closure, PiecewiseFn};

    fn pts(p: &[usize]) -> Region {
        Region::Points(PointSet::from_points(p.iter().copied()))
    }

    fn pm1_grid() -> FunctionGrid {
        FunctionGrid::lattice(
            FiniteSpace::discrete(2),
            &[int(-1), int(0), int(1)],
            vec![pts(&[0]), pts(&[1]), pts(&[0, 1])],
        )
        .unwrap()
    }

    #[test]
    fn lattice_shape() {
        let g = pm1_grid();
        assert_eq!(g.len(), 9);
        assert_eq!(g.id(g.zero()), "(0,0)");
        assert_eq!(g.id(0), "(-1,-1)");
        assert_eq!(g.index_of("(1,-1)"), Some(6));
        assert_eq!(FunctionGrid::lattice(FiniteSpace::discrete(2), &[int(1)], vec![]), Err(GridError::NoZero));
        assert_eq!(FunctionGrid::lattice(FiniteSpace::sierpinski(), &[int(0)], vec![]), Err(GridError::NotDiscrete));
    }

    #[test]
    fn neighborhood_examples() {
        let g = pm1_grid();
        let all = g.neighborhood(g.zero(), pts(&[0, 1]), int(5)).unwrap();
        assert_eq!(g.neighborhood_members(&all).unwrap().len(), 9);
        let tight = g.neighborhood(g.zero(), pts(&[0, 1]), rat(1, 2)).unwrap();
        assert_eq!(g.neighborhood_members(&tight).unwrap(), vec![g.zero()]);
        let wide = g.neighborhood(g.zero(), pts(&[0]), rat(3, 2)).unwrap();
        assert_eq!(g.neighborhood_members(&wide).unwrap().len(), 9);
        assert!(matches!(g.neighborhood(g.zero(), pts(&[]), int(1)), Err(GridError::NotInIdeal(_))));
        assert_eq!(g.neighborhood(g.zero(), pts(&[0]), int(0)), Err(GridError::NonPositiveEpsilon));
    }

    #[test]
    fn preimages_on_grid() {
        let g = pm1_grid();
        for n in 0..4 {
            assert_eq!(g.small_preimage(g.zero(), n).unwrap(), g.whole());
        }
        let m = g.index_of("(1,0)").unwrap();
        assert_eq!(g.small_preimage(m, 0).unwrap(), Subset::Points(PointSet::singleton(1)));
    }

    #[test]
    fn preimage_of_hull_indicator() {
        let phi = convexify(&graph_closure(&PiecewiseFn::indicator(int(-1), int(2), int(0), int(1)).unwrap()));
        let g = FunctionGrid::maps(int(-1), int(2), vec![("hull".into(), phi)], vec![]).unwrap();
        assert_eq!(g.zero(), 0);
        let w = g.small_preimage(1, 1).unwrap();
        let expected = RealSet::new(vec![
            crate::setvalued::Span { lo: int(-1), hi: int(0), lo_closed: true, hi_closed: false },
            crate::setvalued::Span { lo: int(1), hi: int(2), lo_closed: false, hi_closed: true },
        ]);
        assert_eq!(w, Subset::Reals(expected));
        assert_eq!(g.small_preimage(0, 3).unwrap(), g.whole());
    }

    #[test]
    fn non_cusco_members_rejected() {
        let f = PiecewiseFn::indicator(int(-1), int(2), int(0), int(1)).unwrap();
        let r = FunctionGrid::maps(int(-1), int(2), vec![("closure".into(), graph_closure(&f))], vec![]);
        assert_eq!(r, Err(GridError::NotMinimalCusco("closure".into())));
    }

    #[test]
    fn clustering_examples() {
        let g = pm1_grid();
        let tests = g.zero_tests(&[pts(&[0]), pts(&[1])], &[int(1), rat(1, 2)]).unwrap();
        assert!(g.cluster_at_zero(&[g.zero()], &tests).unwrap());
        let far = [g.index_of("(1,1)").unwrap(), g.index_of("(-1,1)").unwrap()];
        assert!(!g.cluster_at_zero(&far, &tests).unwrap());
        let split = [g.index_of("(0,1)").unwrap(), g.index_of("(1,0)").unwrap()];
        assert!(g.cluster_at_zero(&split, &tests).unwrap());
    }

    #[test]
    fn closed_discrete_examples() {
        let g = FunctionGrid::lattice(
            FiniteSpace::discrete(2),
            &[int(0), int(1), int(2), int(3)],
            vec![pts(&[0]), pts(&[1])],
        )
        .unwrap();
        let three = g.index_of("(3,3)").unwrap();
        for b in [pts(&[0]), pts(&[1])] {
            assert!(g.closed_discrete_surrogate(&[g.zero(), three], &b, 1).unwrap());
            assert!(!g.closed_discrete_surrogate(&[three, three], &b, 0).unwrap());
        }
        // values n off the shrinking set, zero on it
        let seq: Vec<usize> = (0..4).map(|n| g.index_of_values(&[int(0), int(n)]).unwrap()).collect();
        assert!(g.closed_discrete_surrogate(&seq, &pts(&[1]), 1).unwrap());
        assert!(!g.closed_discrete_surrogate(&seq, &pts(&[0]), 1).unwrap());
    }

    #[test]
    fn grid_conditions() {
        let g = pm1_grid();
        let cond = GridCondition::ClusterAtZero { regions: vec![pts(&[0]), pts(&[1])], epsilons: vec![int(1)] };
        assert!(cond.holds(&g, &[g.zero() as u32]).unwrap());
        let conv = GridCondition::ConvergesToZero { regions: vec![pts(&[0, 1])], epsilons: vec![int(1)], tail: 1 };
        assert!(conv.holds(&g, &[0, g.zero() as u32]).unwrap());
        assert!(!conv.holds(&g, &[g.zero() as u32, 0]).unwrap());
    }
}
