//! Decision procedures on piecewise maps: semicontinuity, minimality,
//! Vietoris preimages and the uniform entourages `hΔ_ε`.

use super::map::{convexify, critical_points, graph_closure, with_midpoints, SetValuedMap};
use super::piecewise::PiecewiseFn;
use super::realset::{CompactSet, RealSet, Span};
use super::SetValuedError;
use crate::rational::{self, midpoint, Rat};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// `Δ_ε` (open) or its closed counterpart.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entourage {
    #[serde(with = "rational::serde_rat")]
    pub epsilon: Rat,
    #[serde(default)]
    pub closed: bool,
}

impl Entourage {
    pub fn open(epsilon: Rat) -> Result<Self, SetValuedError> {
        Entourage::new(epsilon, false)
    }

    pub fn closed(epsilon: Rat) -> Result<Self, SetValuedError> {
        Entourage::new(epsilon, true)
    }

    pub fn new(epsilon: Rat, closed: bool) -> Result<Self, SetValuedError> {
        if !epsilon.is_positive() {
            return Err(SetValuedError::NonPositiveEpsilon(rational::format(&epsilon)));
        }
        Ok(Entourage { epsilon, closed })
    }
}

/// `K ⊆ E[L]` and `L ⊆ E[K]`.
pub fn h_entourage_within(k: &CompactSet, l: &CompactSet, e: &Entourage) -> bool {
    l.fatten(&e.epsilon, e.closed).contains_compact(k) && k.fatten(&e.epsilon, e.closed).contains_compact(l)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    #[serde(with = "rational::serde_rat")]
    pub x: Rat,
    #[serde(with = "rational::serde_rat")]
    pub value: Rat,
}

/// Closed graph test: every one-sided limit set must sit inside the section.
#[allow(clippy::result_large_err)]
pub fn is_usco(phi: &SetValuedMap) -> Result<(), Witness> {
    for (i, x) in phi.breakpoints().iter().enumerate() {
        let section = &phi.sections()[i];
        for lim in [phi.left_limit(i), phi.right_limit(i)].into_iter().flatten() {
            if let Some(v) = lim.point_outside(section) {
                return Err(Witness { x: x.clone(), value: v });
            }
        }
    }
    Ok(())
}

/// Vietoris continuity: at each breakpoint both one-sided limit sets equal the section.
pub fn is_continuous(phi: &SetValuedMap) -> Result<(), Rat> {
    for (i, x) in phi.breakpoints().iter().enumerate() {
        let section = &phi.sections()[i];
        for lim in [phi.left_limit(i), phi.right_limit(i)].into_iter().flatten() {
            if &lim != section {
                return Err(x.clone());
            }
        }
    }
    Ok(())
}

/// At every breakpoint the value must agree with a one-sided limit.
pub fn is_quasicontinuous(f: &PiecewiseFn) -> Result<(), Rat> {
    for (i, x) in f.breakpoints().iter().enumerate() {
        let v = &f.values()[i];
        let ok = f.left_limit(i).as_ref() == Some(v) || f.right_limit(i).as_ref() == Some(v);
        if !ok {
            return Err(x.clone());
        }
    }
    Ok(())
}

/// Affine pieces on bounded cells always have finite one-sided limits.
pub fn is_subcontinuous(_f: &PiecewiseFn) -> bool {
    true
}

/// Outcome of testing one canonical selection against a map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelectionTest {
    pub quasicontinuous: bool,
    pub subcontinuous: bool,
    pub regenerates: bool,
}

impl SelectionTest {
    pub fn passes(&self) -> bool {
        self.quasicontinuous && self.subcontinuous && self.regenerates
    }
}

pub fn test_selection(f: &PiecewiseFn, phi: &SetValuedMap, convex: bool) -> SelectionTest {
    let closure = graph_closure(f);
    let regenerated = if convex { convexify(&closure) } else { closure };
    SelectionTest {
        quasicontinuous: is_quasicontinuous(f).is_ok(),
        subcontinuous: is_subcontinuous(f),
        regenerates: regenerated.same_map(phi),
    }
}

fn require_usco(phi: &SetValuedMap) -> Result<(), SetValuedError> {
    is_usco(phi).map_err(|w| SetValuedError::NotUsco { x: rational::format(&w.x), value: rational::format(&w.value) })
}

/// Minimal usco iff the min-selection is quasicontinuous, subcontinuous and its
/// graph closure is the map.
pub fn is_minimal_usco(phi: &SetValuedMap) -> Result<bool, SetValuedError> {
    require_usco(phi)?;
    Ok(test_selection(&phi.min_selection(), phi, false).passes())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    No,
    Undecided,
}

/// Minimal cusco test through the max-selection, cross-checked with the
/// min-selection. Disagreement yields [`Verdict::Undecided`].
pub fn is_minimal_cusco(phi: &SetValuedMap) -> Result<Verdict, SetValuedError> {
    require_usco(phi)?;
    if !phi.has_interval_sections() {
        return Ok(Verdict::No);
    }
    let by_max = test_selection(&phi.max_selection(), phi, true).passes();
    let by_min = test_selection(&phi.min_selection(), phi, true).passes();
    Ok(match (by_max, by_min) {
        (true, true) => Verdict::Yes,
        (false, false) => Verdict::No,
        _ => Verdict::Undecided,
    })
}

/// Exact `sup |Φ|` over the domain.
pub fn bounded_on_compact(phi: &SetValuedMap) -> Result<Rat, SetValuedError> {
    require_usco(phi)?;
    let bp = phi.breakpoints();
    let mut bound = Rat::zero();
    for s in phi.sections() {
        bound = rational::max(&bound, &s.sup_abs());
    }
    for (i, bands) in phi.cells().iter().enumerate() {
        for b in bands {
            for x in [&bp[i], &bp[i + 1]] {
                bound = rational::max(&bound, &b.lower.eval(x).abs());
                bound = rational::max(&bound, &b.upper.eval(x).abs());
            }
        }
    }
    Ok(bound)
}

/// `{x : Φ(x) ⊆ ⋃ basics and Φ(x) meets every basic}` and whether it is open in the domain.
pub fn vietoris_preimage(phi: &SetValuedMap, basics: &[(Rat, Rat)]) -> Result<(RealSet, bool), SetValuedError> {
    if basics.is_empty() {
        return Err(SetValuedError::InvalidMap("at least one basic open set is required".into()));
    }
    if let Some((lo, hi)) = basics.iter().find(|(lo, hi)| lo >= hi) {
        return Err(SetValuedError::InvalidInterval(rational::format(lo), rational::format(hi)));
    }
    let opens: Vec<RealSet> = basics.iter().map(|(lo, hi)| RealSet::open_interval(lo.clone(), hi.clone())).collect();
    let union = opens.iter().fold(RealSet::empty(), |acc, u| acc.union(u));
    let consts: Vec<Rat> = basics.iter().flat_map(|(lo, hi)| [lo.clone(), hi.clone()]).collect();
    let (a, b) = phi.domain();
    let crit = critical_points(&[phi], &[Rat::zero()], &consts, a, b);
    let holds = |x: &Rat| {
        let s = phi.section(x).expect("in domain");
        union.contains_compact(&s) && opens.iter().all(|u| !u.intersection(&s.to_realset()).is_empty())
    };
    let mut spans = Vec::new();
    for (i, x) in crit.iter().enumerate() {
        if holds(x) {
            spans.push(Span::point(x.clone()));
        }
        if let Some(next) = crit.get(i + 1) {
            if holds(&midpoint(x, next)) {
                spans.push(Span::open(x.clone(), next.clone()));
            }
        }
    }
    let set = RealSet::new(spans);
    let open = set.is_open_in(a, b);
    Ok((set, open))
}

fn check_same_domain(phi: &SetValuedMap, psi: &SetValuedMap) -> Result<(), SetValuedError> {
    if phi.domain() != psi.domain() {
        return Err(SetValuedError::DomainMismatch);
    }
    Ok(())
}

fn check_region(phi: &SetValuedMap, a: &CompactSet) -> Result<(), SetValuedError> {
    let (lo, hi) = phi.domain();
    if a.min() < lo || a.max() > hi {
        return Err(SetValuedError::DomainMismatch);
    }
    Ok(())
}

/// Exact test of `pred(Φ(x), Ψ(x))` for every `x` in `region`, for predicates
/// built from order comparisons among band values shifted by `shifts`.
/// Returns the first failing point.
pub(crate) fn first_failure_on(
    phi: &SetValuedMap,
    psi: &SetValuedMap,
    region: &CompactSet,
    shifts: &[Rat],
    pred: impl Fn(&CompactSet, &CompactSet) -> bool,
) -> Option<Rat> {
    for iv in region.intervals() {
        let crit = critical_points(&[phi, psi], shifts, &[], &iv.lo, &iv.hi);
        for x in with_midpoints(&crit) {
            let s = phi.section(&x).expect("region inside domain");
            let t = psi.section(&x).expect("region inside domain");
            if !pred(&s, &t) {
                return Some(x);
            }
        }
    }
    None
}

fn entourage_shifts(e: &Entourage) -> Vec<Rat> {
    vec![Rat::zero(), e.epsilon.clone(), -e.epsilon.clone()]
}

/// `Ψ ∈ [Φ; A, ε]`: the sections are `hE`-close at every point of `a`.
pub fn ball_membership(
    phi: &SetValuedMap,
    psi: &SetValuedMap,
    a: &CompactSet,
    e: &Entourage,
) -> Result<bool, SetValuedError> {
    check_same_domain(phi, psi)?;
    check_region(phi, a)?;
    Ok(first_failure_on(phi, psi, a, &entourage_shifts(e), |s, t| h_entourage_within(s, t, e)).is_none())
}

/// Sectionwise equality on `a`.
pub fn agree_on(phi: &SetValuedMap, psi: &SetValuedMap, a: &CompactSet) -> Result<bool, SetValuedError> {
    check_same_domain(phi, psi)?;
    check_region(phi, a)?;
    Ok(first_failure_on(phi, psi, a, &[Rat::zero()], |s, t| s == t).is_none())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Propagation {
    /// The closed-entourage relation holds on every open cell of the common refinement.
    pub hypothesis: bool,
    /// It holds at every breakpoint too.
    pub conclusion: bool,
    #[serde(with = "opt_rat")]
    pub witness: Option<Rat>,
}

impl Propagation {
    pub fn holds(&self) -> bool {
        !self.hypothesis || self.conclusion
    }
}

mod opt_rat {
    use crate::rational::{format, Rat};
    use serde::Serializer;
    pub fn serialize<S: Serializer>(x: &Option<Rat>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => s.serialize_some(&format(v)),
            None => s.serialize_none(),
        }
    }
}

/// If `hE` (closed `E`) relates the sections on the dense set of cell
/// interiors, it must relate them at the breakpoints as well.
pub fn dense_propagation_check(
    phi: &SetValuedMap,
    psi: &SetValuedMap,
    e: &Entourage,
) -> Result<Propagation, SetValuedError> {
    if !e.closed {
        return Err(SetValuedError::OpenEntourage);
    }
    check_same_domain(phi, psi)?;
    let (a, b) = phi.domain();
    let crit = critical_points(&[phi, psi], &entourage_shifts(e), &[], a, b);
    let mut breaks: Vec<Rat> = phi.breakpoints().iter().chain(psi.breakpoints()).cloned().collect();
    breaks.sort();
    breaks.dedup();
    let related =
        |x: &Rat| h_entourage_within(&phi.section(x).expect("in domain"), &psi.section(x).expect("in domain"), e);
    let hypothesis = with_midpoints(&crit).iter().filter(|x| breaks.binary_search(x).is_err()).all(related);
    let witness = breaks.iter().find(|x| !related(x)).cloned();
    Ok(Propagation { hypothesis, conclusion: witness.is_none(), witness })
}
