//! Gluing selections along open sets.

use super::analysis::agree_on;
use super::map::{convexify, graph_closure, SetValuedMap};
use super::piecewise::{merge_breaks, PiecewiseFn};
use super::realset::{CompactSet, RealSet, Span};
use super::SetValuedError;
use crate::rational::{midpoint, Rat};
use serde::Serialize;

fn domain_set(a: &Rat, b: &Rat) -> RealSet {
    RealSet::closed_interval(a.clone(), b.clone())
}

/// `f` on the closure of `u` (taken in the domain), `g` elsewhere.
pub fn patch(f: &PiecewiseFn, g: &PiecewiseFn, u: &RealSet) -> Result<PiecewiseFn, SetValuedError> {
    if f.domain() != g.domain() {
        return Err(SetValuedError::DomainMismatch);
    }
    let (a, b) = g.domain();
    let cl_u = u.intersection(&domain_set(a, b)).closure();
    let ends = cl_u.endpoints();
    let breaks = merge_breaks([f.breakpoints(), g.breakpoints(), ends.as_slice()], a, b);
    let mut cells = Vec::with_capacity(breaks.len() - 1);
    for w in breaks.windows(2) {
        let mid = midpoint(&w[0], &w[1]);
        let src = if cl_u.contains(&mid) { f } else { g };
        cells.push(src.cell_at(&mid).expect("interior point").clone());
    }
    let values =
        breaks.iter().map(|x| if cl_u.contains(x) { f.eval(x) } else { g.eval(x) }.expect("in domain")).collect();
    Ok(PiecewiseFn::new(breaks, cells, values)?.simplify())
}

/// An open `V` (relative to the domain) with `a ⊆ V ⊆ cl(V) ⊆ u`, built by
/// moving halfway from each component of `a` toward the boundary of the
/// component of `u` around it.
pub fn separating_open(a: &CompactSet, u: &RealSet, domain: (&Rat, &Rat)) -> Option<RealSet> {
    let u = u.intersection(&domain_set(domain.0, domain.1));
    let mut pieces = Vec::new();
    for iv in a.intervals() {
        let span = u.spans().iter().find(|s| s.contains(&iv.lo) && s.contains(&iv.hi))?;
        let (lo, lo_closed) =
            if span.lo_closed { (span.lo.clone(), true) } else { (midpoint(&span.lo, &iv.lo), false) };
        let (hi, hi_closed) =
            if span.hi_closed { (span.hi.clone(), true) } else { (midpoint(&iv.hi, &span.hi), false) };
        pieces.push(Span { lo, hi, lo_closed, hi_closed });
    }
    Some(RealSet::new(pieces))
}

#[derive(Clone, Debug, Serialize)]
pub struct AgreePatch {
    pub psi: SetValuedMap,
    pub selection: PiecewiseFn,
    pub agrees_on_a: bool,
    pub constant_off_u: bool,
}

/// Builds `g = y0` on `cl(X \ cl v)` and the max-selection of `phi` elsewhere,
/// and returns the hull of its graph closure together with the two checked
/// postconditions.
pub fn cusco_agree_patch(
    phi: &SetValuedMap,
    a: &CompactSet,
    u: &RealSet,
    v: &RealSet,
    y0: &Rat,
) -> Result<AgreePatch, SetValuedError> {
    let (lo, hi) = phi.domain();
    let dom = domain_set(lo, hi);
    let v = v.intersection(&dom);
    let u = u.intersection(&dom);
    if !v.is_open_in(lo, hi) || !u.is_open_in(lo, hi) {
        return Err(SetValuedError::ChainViolation("u and v must be open".into()));
    }
    if !v.contains_compact(a) {
        return Err(SetValuedError::ChainViolation(format!("{a} is not inside {v}")));
    }
    let cl_v = v.closure();
    if !cl_v.is_subset(&u) {
        return Err(SetValuedError::ChainViolation(format!("cl {v} is not inside {u}")));
    }
    let outside = cl_v.complement_within(lo, hi);
    let constant = PiecewiseFn::constant(lo.clone(), hi.clone(), y0.clone())?;
    let selection = patch(&constant, &phi.max_selection(), &outside)?;
    let psi = convexify(&graph_closure(&selection));
    let agrees_on_a = agree_on(phi, &psi, a)?;
    let constant_off_u = constant_on(&selection, &u.complement_within(lo, hi), y0);
    Ok(AgreePatch { psi, selection, agrees_on_a, constant_off_u })
}

/// `f ≡ c` on the set `s`.
pub fn constant_on(f: &PiecewiseFn, s: &RealSet, c: &Rat) -> bool {
    s.spans().iter().all(|span| {
        let mut pts: Vec<Rat> = f.breakpoints().iter().filter(|x| span.contains(x)).cloned().collect();
        pts.push(span.sample());
        if span.hi_closed {
            pts.push(span.hi.clone());
        }
        pts.sort();
        pts.dedup();
        let mut probes = pts.clone();
        probes.extend(pts.windows(2).map(|w| midpoint(&w[0], &w[1])));
        // open ends: probe just inside, between the end and the nearest point
        if !span.lo_closed {
            probes.push(midpoint(&span.lo, &pts[0]));
        }
        if !span.hi_closed {
            probes.push(midpoint(&pts[pts.len() - 1], &span.hi));
        }
        probes.iter().filter(|x| span.contains(x)).all(|x| f.eval(x).as_ref() == Some(c))
    })
}
