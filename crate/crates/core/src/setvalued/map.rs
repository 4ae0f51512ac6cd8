//! Set-valued maps `[a, b] → K(ℝ)` whose graphs are finite unions of affine bands.

use super::piecewise::{check_breaks, locate, merge_breaks, Affine, Locate, PiecewiseFn};
use super::realset::{CompactSet, Interval};
use super::SetValuedError;
use crate::rational::{self, midpoint, Rat};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

/// The region between two affine functions on a cell.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Band {
    pub lower: Affine,
    pub upper: Affine,
}

impl Band {
    pub fn single(f: Affine) -> Self {
        Band { lower: f.clone(), upper: f }
    }

    pub fn at(&self, x: &Rat) -> Interval {
        Interval { lo: self.lower.eval(x), hi: self.upper.eval(x) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetValuedMap {
    #[serde(with = "rational::serde_rat_vec")]
    breakpoints: Vec<Rat>,
    cells: Vec<Vec<Band>>,
    sections: Vec<CompactSet>,
}

impl SetValuedMap {
    pub fn new(
        breakpoints: Vec<Rat>,
        cells: Vec<Vec<Band>>,
        sections: Vec<CompactSet>,
    ) -> Result<Self, SetValuedError> {
        check_breaks(&breakpoints)?;
        if cells.len() + 1 != breakpoints.len() || sections.len() != breakpoints.len() {
            return Err(SetValuedError::InvalidMap("cell/section count does not match breakpoints".into()));
        }
        for (i, bands) in cells.iter().enumerate() {
            let (l, r) = (&breakpoints[i], &breakpoints[i + 1]);
            if bands.is_empty() {
                return Err(SetValuedError::EmptySection);
            }
            for b in bands {
                if b.lower.eval(l) > b.upper.eval(l) || b.lower.eval(r) > b.upper.eval(r) {
                    return Err(SetValuedError::InvalidMap(format!("band lower above upper on cell {i}")));
                }
            }
            for w in bands.windows(2) {
                let gl = w[1].lower.eval(l) - w[0].upper.eval(l);
                let gr = w[1].lower.eval(r) - w[0].upper.eval(r);
                if gl < Rat::zero() || gr < Rat::zero() || (gl.is_zero() && gr.is_zero()) {
                    return Err(SetValuedError::InvalidMap(format!("bands cross or overlap on cell {i}")));
                }
            }
        }
        Ok(SetValuedMap { breakpoints, cells, sections })
    }

    pub fn validated(self) -> Result<Self, SetValuedError> {
        SetValuedMap::new(self.breakpoints, self.cells, self.sections)
    }

    /// `x ↦ k` on `[a, b]`.
    pub fn constant(a: Rat, b: Rat, k: CompactSet) -> Result<Self, SetValuedError> {
        let bands = k
            .intervals()
            .iter()
            .map(|iv| Band { lower: Affine::constant(iv.lo.clone()), upper: Affine::constant(iv.hi.clone()) })
            .collect();
        SetValuedMap::new(vec![a, b], vec![bands], vec![k.clone(), k])
    }

    /// The single-valued map `x ↦ {f(x)}` (not closed up).
    pub fn from_function(f: &PiecewiseFn) -> Self {
        SetValuedMap {
            breakpoints: f.breakpoints().to_vec(),
            cells: f.cells().iter().map(|c| vec![Band::single(c.clone())]).collect(),
            sections: f.values().iter().map(|v| CompactSet::point(v.clone())).collect(),
        }
    }

    pub fn breakpoints(&self) -> &[Rat] {
        &self.breakpoints
    }

    pub fn cells(&self) -> &[Vec<Band>] {
        &self.cells
    }

    pub fn sections(&self) -> &[CompactSet] {
        &self.sections
    }

    pub fn domain(&self) -> (&Rat, &Rat) {
        (&self.breakpoints[0], &self.breakpoints[self.breakpoints.len() - 1])
    }

    pub fn locate(&self, x: &Rat) -> Option<Locate> {
        locate(&self.breakpoints, x)
    }

    pub(crate) fn band_section(&self, cell: usize, x: &Rat) -> CompactSet {
        CompactSet::new(self.cells[cell].iter().map(|b| b.at(x)).collect()).expect("bands are non-empty")
    }

    pub fn section(&self, x: &Rat) -> Option<CompactSet> {
        Some(match self.locate(x)? {
            Locate::Break(i) => self.sections[i].clone(),
            Locate::Cell(i) => self.band_section(i, x),
        })
    }

    /// Limit set from the left at breakpoint `i`.
    pub fn left_limit(&self, i: usize) -> Option<CompactSet> {
        (i > 0).then(|| self.band_section(i - 1, &self.breakpoints[i]))
    }

    pub fn right_limit(&self, i: usize) -> Option<CompactSet> {
        (i + 1 < self.breakpoints.len()).then(|| self.band_section(i, &self.breakpoints[i]))
    }

    pub fn refine(&self, points: &[Rat]) -> SetValuedMap {
        let (a, b) = self.domain();
        let breaks = merge_breaks([self.breakpoints.as_slice(), points], a, b);
        let mut cells = Vec::with_capacity(breaks.len() - 1);
        for w in breaks.windows(2) {
            match self.locate(&midpoint(&w[0], &w[1])) {
                Some(Locate::Cell(i)) => cells.push(self.cells[i].clone()),
                _ => unreachable!("midpoint of a refined cell is interior"),
            }
        }
        let sections = breaks.iter().map(|x| self.section(x).expect("in domain")).collect();
        SetValuedMap { breakpoints: breaks, cells, sections }
    }

    /// Drops breakpoints where both sides carry the same bands and the section is what they give.
    pub fn simplify(&self) -> SetValuedMap {
        let mut breaks = vec![self.breakpoints[0].clone()];
        let mut cells = vec![self.cells[0].clone()];
        let mut sections = vec![self.sections[0].clone()];
        for i in 1..self.breakpoints.len() - 1 {
            let x = &self.breakpoints[i];
            let same =
                *cells.last().expect("non-empty") == self.cells[i] && self.band_section(i, x) == self.sections[i];
            if same {
                continue;
            }
            breaks.push(x.clone());
            sections.push(self.sections[i].clone());
            cells.push(self.cells[i].clone());
        }
        breaks.push(self.breakpoints[self.breakpoints.len() - 1].clone());
        sections.push(self.sections[self.sections.len() - 1].clone());
        SetValuedMap { breakpoints: breaks, cells, sections }
    }

    /// Sectionwise equality on the whole domain.
    pub fn same_map(&self, other: &SetValuedMap) -> bool {
        if self.domain() != other.domain() {
            return false;
        }
        self.refine(&other.breakpoints) == other.refine(&self.breakpoints)
    }

    /// `x ↦ min Φ(x)`
    pub fn min_selection(&self) -> PiecewiseFn {
        PiecewiseFn::new(
            self.breakpoints.clone(),
            self.cells.iter().map(|bands| bands[0].lower.clone()).collect(),
            self.sections.iter().map(|s| s.min().clone()).collect(),
        )
        .expect("same shape")
    }

    /// `x ↦ max Φ(x)`
    pub fn max_selection(&self) -> PiecewiseFn {
        PiecewiseFn::new(
            self.breakpoints.clone(),
            self.cells.iter().map(|bands| bands[bands.len() - 1].upper.clone()).collect(),
            self.sections.iter().map(|s| s.max().clone()).collect(),
        )
        .expect("same shape")
    }

    /// True iff every section (on cells and at breakpoints) is a closed interval.
    pub fn has_interval_sections(&self) -> bool {
        self.cells.iter().all(|b| b.len() == 1) && self.sections.iter().all(CompactSet::is_interval)
    }

    /// All affine functions bounding bands on cell `i`.
    pub(crate) fn cell_functions(&self, i: usize) -> impl Iterator<Item = &Affine> {
        self.cells[i].iter().flat_map(|b| [&b.lower, &b.upper])
    }
}

/// The closure of the graph of `f`, as a set-valued map.
pub fn graph_closure(f: &PiecewiseFn) -> SetValuedMap {
    let sections = (0..f.breakpoints().len())
        .map(|i| {
            let pts = [Some(f.values()[i].clone()), f.left_limit(i), f.right_limit(i)];
            CompactSet::from_points(pts.into_iter().flatten()).expect("non-empty")
        })
        .collect();
    SetValuedMap {
        breakpoints: f.breakpoints().to_vec(),
        cells: f.cells().iter().map(|c| vec![Band::single(c.clone())]).collect(),
        sections,
    }
}

/// Replaces every section by its interval hull.
pub fn convexify(phi: &SetValuedMap) -> SetValuedMap {
    SetValuedMap {
        breakpoints: phi.breakpoints.clone(),
        cells: phi
            .cells
            .iter()
            .map(|bands| vec![Band { lower: bands[0].lower.clone(), upper: bands[bands.len() - 1].upper.clone() }])
            .collect(),
        sections: phi.sections.iter().map(CompactSet::hull).collect(),
    }
}

/// Points of `[lo, hi]` at which the truth of any predicate built from order
/// comparisons among the band functions of `maps` (each shifted by every
/// element of `shifts`) and the constants `consts` can change. Between two
/// consecutive returned points such a predicate is constant.
pub(crate) fn critical_points(maps: &[&SetValuedMap], shifts: &[Rat], consts: &[Rat], lo: &Rat, hi: &Rat) -> Vec<Rat> {
    let lists: Vec<&[Rat]> = maps.iter().map(|m| m.breakpoints()).collect();
    let breaks = merge_breaks(lists, lo, hi);
    let mut out = breaks.clone();
    for w in breaks.windows(2) {
        let mid = midpoint(&w[0], &w[1]);
        let mut funcs: Vec<Affine> = consts.iter().map(|c| Affine::constant(c.clone())).collect();
        for m in maps {
            if let Some(Locate::Cell(i)) = m.locate(&mid) {
                for f in m.cell_functions(i) {
                    funcs.extend(shifts.iter().map(|s| f.shifted(s)));
                }
            }
        }
        funcs.sort_by(|a, b| a.slope.cmp(&b.slope).then(a.intercept.cmp(&b.intercept)));
        funcs.dedup();
        for (j, f) in funcs.iter().enumerate() {
            for g in &funcs[j + 1..] {
                if let Some(x) = f.crossing(g) {
                    if x > w[0] && x < w[1] {
                        out.push(x);
                    }
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Critical points together with the midpoints between consecutive ones.
pub(crate) fn with_midpoints(crit: &[Rat]) -> Vec<Rat> {
    let mut out = Vec::with_capacity(crit.len() * 2);
    for (i, x) in crit.iter().enumerate() {
        if i > 0 {
            out.push(midpoint(&crit[i - 1], x));
        }
        out.push(x.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn indicator() -> PiecewiseFn {
        PiecewiseFn::indicator(int(-1), int(2), int(0), int(1)).unwrap()
    }

    #[test]
    fn closure_of_indicator() {
        let m = graph_closure(&indicator());
        let zero_one = CompactSet::from_points([int(0), int(1)]).unwrap();
        assert_eq!(m.section(&int(0)), Some(zero_one.clone()));
        assert_eq!(m.section(&int(1)), Some(zero_one));
        assert_eq!(m.section(&rat(1, 2)), Some(CompactSet::point(int(1))));
        assert_eq!(m.section(&int(-1)), Some(CompactSet::point(int(0))));
        assert_eq!(m.section(&int(2)), Some(CompactSet::point(int(0))));
    }

    #[test]
    fn closure_of_continuous_affine_is_pointwise() {
        let f = PiecewiseFn::affine(int(0), int(1), Affine::new(int(3), int(-1))).unwrap().refine(&[rat(1, 3)]);
        let m = graph_closure(&f);
        for s in m.sections() {
            assert!(s.is_singleton());
        }
        assert!(m.same_map(&SetValuedMap::from_function(&f)));
    }

    #[test]
    fn closure_at_a_jump() {
        let f = PiecewiseFn::new(
            vec![int(0), rat(1, 2), int(1)],
            vec![Affine::constant(int(0)), Affine::constant(int(1))],
            vec![int(0), int(1), int(1)],
        )
        .unwrap();
        assert_eq!(graph_closure(&f).section(&rat(1, 2)), Some(CompactSet::from_points([int(0), int(1)]).unwrap()));
    }

    #[test]
    fn convexify_sections() {
        let m = convexify(&graph_closure(&indicator()));
        assert_eq!(m.section(&int(0)), Some(CompactSet::interval(int(0), int(1)).unwrap()));
        assert_eq!(m.section(&rat(1, 2)), Some(CompactSet::point(int(1))));
        let k = CompactSet::from_points([int(1), rat(3, 2), int(2)]).unwrap();
        let c = convexify(&SetValuedMap::constant(int(0), int(1), k).unwrap());
        assert_eq!(c.section(&rat(1, 2)), Some(CompactSet::interval(int(1), int(2)).unwrap()));
        assert_eq!(convexify(&c), c);
    }

    #[test]
    fn band_validation() {
        let up = Affine::new(int(1), int(0));
        let flat = Affine::constant(rat(1, 2));
        // bands cross at x = 1/2
        let crossing = SetValuedMap::new(
            vec![int(0), int(1)],
            vec![vec![Band::single(flat.clone()), Band::single(up.clone())]],
            vec![CompactSet::point(int(0)), CompactSet::point(int(1))],
        );
        assert!(crossing.is_err());
        let inverted = SetValuedMap::new(
            vec![int(0), int(1)],
            vec![vec![Band { lower: up, upper: flat }]],
            vec![CompactSet::point(int(0)), CompactSet::point(int(1))],
        );
        assert!(inverted.is_err());
    }

    #[test]
    fn selections() {
        let m = convexify(&graph_closure(&indicator()));
        let hi = m.max_selection();
        let lo = m.min_selection();
        assert_eq!(hi.eval(&int(0)), Some(int(1)));
        assert_eq!(lo.eval(&int(0)), Some(int(0)));
        assert_eq!(hi.eval(&rat(3, 2)), Some(int(0)));
    }

    #[test]
    fn critical_points_include_crossings() {
        let m = SetValuedMap::from_function(&PiecewiseFn::affine(int(0), int(4), Affine::new(int(1), int(0))).unwrap());
        let crit = critical_points(&[&m], &[int(0)], &[int(1), int(3)], &int(0), &int(4));
        assert_eq!(crit, vec![int(0), int(1), int(3), int(4)]);
        assert_eq!(with_midpoints(&crit).len(), 7);
    }
}
