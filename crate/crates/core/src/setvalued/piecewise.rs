//! Piecewise-affine real functions on a closed interval.

use super::SetValuedError;
use crate::rational::{self, int, Rat};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

/// `x ↦ slope·x + intercept`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Affine {
    pub slope: Rat,
    pub intercept: Rat,
}

impl Affine {
    pub fn new(slope: Rat, intercept: Rat) -> Self {
        Affine { slope, intercept }
    }

    pub fn constant(c: Rat) -> Self {
        Affine { slope: Rat::zero(), intercept: c }
    }

    /// The affine function through `(x0, y0)` and `(x1, y1)`.
    pub fn through(x0: &Rat, y0: &Rat, x1: &Rat, y1: &Rat) -> Self {
        let slope = (y1 - y0) / (x1 - x0);
        let intercept = y0 - &slope * x0;
        Affine { slope, intercept }
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        &self.slope * x + &self.intercept
    }

    pub fn shifted(&self, c: &Rat) -> Self {
        Affine { slope: self.slope.clone(), intercept: &self.intercept + c }
    }

    /// The unique crossing point, if the two lines are not parallel.
    pub fn crossing(&self, other: &Affine) -> Option<Rat> {
        let ds = &self.slope - &other.slope;
        if ds.is_zero() {
            None
        } else {
            Some((&other.intercept - &self.intercept) / ds)
        }
    }
}

impl Serialize for Affine {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq([rational::format(&self.slope), rational::format(&self.intercept)])
    }
}

impl<'de> Deserialize<'de> for Affine {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = Vec::<String>::deserialize(d)?;
        match raw.as_slice() {
            [c] => Ok(Affine::constant(rational::parse(c).map_err(D::Error::custom)?)),
            [m, b] => Ok(Affine::new(
                rational::parse(m).map_err(D::Error::custom)?,
                rational::parse(b).map_err(D::Error::custom)?,
            )),
            _ => Err(D::Error::custom("an affine function is [slope, intercept] or [constant]")),
        }
    }
}

/// Where a point sits relative to a breakpoint list.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Locate {
    Break(usize),
    /// Inside the open cell `(x_i, x_{i+1})`.
    Cell(usize),
}

pub(crate) fn locate(breaks: &[Rat], x: &Rat) -> Option<Locate> {
    if x < &breaks[0] || x > &breaks[breaks.len() - 1] {
        return None;
    }
    Some(match breaks.binary_search(x) {
        Ok(i) => Locate::Break(i),
        Err(i) => Locate::Cell(i - 1),
    })
}

pub(crate) fn check_breaks(breaks: &[Rat]) -> Result<(), SetValuedError> {
    if breaks.len() < 2 {
        return Err(SetValuedError::InvalidMap("need at least two breakpoints".into()));
    }
    if breaks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SetValuedError::InvalidMap("breakpoints must increase strictly".into()));
    }
    Ok(())
}

/// Sorted union of breakpoint lists restricted to `[lo, hi]`, with both ends included.
pub(crate) fn merge_breaks<'a>(lists: impl IntoIterator<Item = &'a [Rat]>, lo: &Rat, hi: &Rat) -> Vec<Rat> {
    let mut all: Vec<Rat> = vec![lo.clone(), hi.clone()];
    for l in lists {
        all.extend(l.iter().filter(|x| *x >= lo && *x <= hi).cloned());
    }
    all.sort();
    all.dedup();
    all
}

/// A total function on `[x_0, x_k]`: affine on each open cell, with its own
/// value at every breakpoint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiecewiseFn {
    #[serde(with = "rational::serde_rat_vec")]
    breakpoints: Vec<Rat>,
    cells: Vec<Affine>,
    #[serde(with = "rational::serde_rat_vec")]
    values: Vec<Rat>,
}

impl PiecewiseFn {
    pub fn new(breakpoints: Vec<Rat>, cells: Vec<Affine>, values: Vec<Rat>) -> Result<Self, SetValuedError> {
        check_breaks(&breakpoints)?;
        if cells.len() + 1 != breakpoints.len() || values.len() != breakpoints.len() {
            return Err(SetValuedError::InvalidMap("cell/value count does not match breakpoints".into()));
        }
        Ok(PiecewiseFn { breakpoints, cells, values })
    }

    /// Re-validates after deserialization.
    pub fn validated(self) -> Result<Self, SetValuedError> {
        PiecewiseFn::new(self.breakpoints, self.cells, self.values)
    }

    pub fn constant(a: Rat, b: Rat, c: Rat) -> Result<Self, SetValuedError> {
        PiecewiseFn::new(vec![a, b], vec![Affine::constant(c.clone())], vec![c.clone(), c])
    }

    pub fn affine(a: Rat, b: Rat, f: Affine) -> Result<Self, SetValuedError> {
        let values = vec![f.eval(&a), f.eval(&b)];
        PiecewiseFn::new(vec![a, b], vec![f], values)
    }

    /// Indicator of the closed interval `[p, q]` on the domain `[a, b]`.
    pub fn indicator(a: Rat, b: Rat, p: Rat, q: Rat) -> Result<Self, SetValuedError> {
        if !(a <= p && p <= q && q <= b && a < b) {
            return Err(SetValuedError::InvalidMap("indicator interval must sit inside the domain".into()));
        }
        let mut breaks = vec![a, p.clone(), q.clone(), b];
        breaks.dedup();
        let inside = |x: &Rat| &p <= x && x <= &q;
        let cells = breaks
            .windows(2)
            .map(|w| Affine::constant(if inside(&rational::midpoint(&w[0], &w[1])) { int(1) } else { int(0) }))
            .collect();
        let values = breaks.iter().map(|x| if inside(x) { int(1) } else { int(0) }).collect();
        PiecewiseFn::new(breaks, cells, values)
    }

    pub fn breakpoints(&self) -> &[Rat] {
        &self.breakpoints
    }

    pub fn cells(&self) -> &[Affine] {
        &self.cells
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn domain(&self) -> (&Rat, &Rat) {
        (&self.breakpoints[0], &self.breakpoints[self.breakpoints.len() - 1])
    }

    pub fn locate(&self, x: &Rat) -> Option<Locate> {
        locate(&self.breakpoints, x)
    }

    pub fn eval(&self, x: &Rat) -> Option<Rat> {
        Some(match self.locate(x)? {
            Locate::Break(i) => self.values[i].clone(),
            Locate::Cell(i) => self.cells[i].eval(x),
        })
    }

    /// Limit from the left at breakpoint `i` (`None` at the left end).
    pub fn left_limit(&self, i: usize) -> Option<Rat> {
        (i > 0).then(|| self.cells[i - 1].eval(&self.breakpoints[i]))
    }

    pub fn right_limit(&self, i: usize) -> Option<Rat> {
        (i + 1 < self.breakpoints.len()).then(|| self.cells[i].eval(&self.breakpoints[i]))
    }

    /// Affine formula active on the open cell containing `x` (which must not be a breakpoint).
    pub fn cell_at(&self, x: &Rat) -> Option<&Affine> {
        match self.locate(x)? {
            Locate::Cell(i) => Some(&self.cells[i]),
            Locate::Break(_) => None,
        }
    }

    /// Same function with extra breakpoints inserted.
    pub fn refine(&self, points: &[Rat]) -> PiecewiseFn {
        let (a, b) = self.domain();
        let breaks = merge_breaks([self.breakpoints.as_slice(), points], a, b);
        let mut cells = Vec::with_capacity(breaks.len() - 1);
        for w in breaks.windows(2) {
            let mid = rational::midpoint(&w[0], &w[1]);
            cells.push(self.cell_at(&mid).expect("midpoint lies in a cell").clone());
        }
        let values = breaks.iter().map(|x| self.eval(x).expect("in domain")).collect();
        PiecewiseFn { breakpoints: breaks, cells, values }
    }

    /// Drops breakpoints where nothing happens.
    pub fn simplify(&self) -> PiecewiseFn {
        let mut breaks = vec![self.breakpoints[0].clone()];
        let mut cells: Vec<Affine> = vec![self.cells[0].clone()];
        let mut values = vec![self.values[0].clone()];
        for i in 1..self.breakpoints.len() - 1 {
            let x = &self.breakpoints[i];
            let last = cells.last().expect("non-empty");
            if *last == self.cells[i] && last.eval(x) == self.values[i] {
                continue;
            }
            breaks.push(x.clone());
            values.push(self.values[i].clone());
            cells.push(self.cells[i].clone());
        }
        breaks.push(self.breakpoints[self.breakpoints.len() - 1].clone());
        values.push(self.values[self.values.len() - 1].clone());
        PiecewiseFn { breakpoints: breaks, cells, values }
    }

    /// Pointwise equality on the whole domain.
    pub fn same_function(&self, other: &PiecewiseFn) -> bool {
        if self.domain() != other.domain() {
            return false;
        }
        let l = self.refine(&other.breakpoints);
        let r = other.refine(&self.breakpoints);
        l == r
    }

    /// Adds a constant to every cell formula and value.
    pub fn shifted(&self, c: &Rat) -> PiecewiseFn {
        PiecewiseFn {
            breakpoints: self.breakpoints.clone(),
            cells: self.cells.iter().map(|f| f.shifted(c)).collect(),
            values: self.values.iter().map(|v| v + c).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn indicator_values_and_limits() {
        let f = PiecewiseFn::indicator(int(-1), int(2), int(0), int(1)).unwrap();
        assert_eq!(f.eval(&rat(-1, 2)), Some(int(0)));
        assert_eq!(f.eval(&int(0)), Some(int(1)));
        assert_eq!(f.eval(&rat(1, 2)), Some(int(1)));
        assert_eq!(f.eval(&int(3)), None);
        assert_eq!(f.left_limit(1), Some(int(0)));
        assert_eq!(f.right_limit(1), Some(int(1)));
        assert_eq!(f.left_limit(0), None);
        assert_eq!(f.right_limit(3), None);
    }

    #[test]
    fn refine_and_simplify_round_trip() {
        let f = PiecewiseFn::affine(int(0), int(4), Affine::new(rat(1, 2), int(1))).unwrap();
        let g = f.refine(&[int(1), int(3), int(7)]);
        assert_eq!(g.breakpoints().len(), 4);
        assert!(f.same_function(&g));
        assert_eq!(g.simplify(), f);
    }

    #[test]
    fn crossing_points() {
        let a = Affine::new(int(1), int(0));
        let b = Affine::constant(int(2));
        assert_eq!(a.crossing(&b), Some(int(2)));
        assert_eq!(b.crossing(&Affine::constant(int(3))), None);
        assert_eq!(Affine::through(&int(0), &int(0), &int(2), &int(1)), Affine::new(rat(1, 2), int(0)));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(PiecewiseFn::new(vec![int(0)], vec![], vec![int(0)]).is_err());
        assert!(PiecewiseFn::new(vec![int(1), int(0)], vec![Affine::constant(int(0))], vec![int(0), int(0)]).is_err());
        assert!(PiecewiseFn::new(vec![int(0), int(1)], vec![], vec![int(0), int(0)]).is_err());
    }
}
