//! The sawtooth with plateaus accumulating at 1, its graph closure, and the
//! map obtained by adding the midpoint of every vertical section.
//!
//! On `a_n = n/(n+1)`, `b_n = (n+1)/(n+2)`, `mid_n = (a_n + b_n)/2` the function
//! ramps linearly from 0 up to 1 on `(a_n, mid_n)` and sits at 2 on `[mid_n, b_n]`.
//! The analysis runs on the truncation `[0, b_N]` (with `f(0) = 0`) and handles
//! the accumulation point 1 by a template argument: every piece has the same
//! value set, so the cluster set at 1 is the closure of that set.

use super::analysis::{is_minimal_usco, is_usco, Witness};
use super::map::{graph_closure, Band, SetValuedMap};
use super::piecewise::{Affine, PiecewiseFn};
use super::realset::{CompactSet, Interval};
use crate::rational::{self, int, midpoint, rat, Rat};
use num_traits::Zero;
use serde::Serialize;

/// The closed-form family truncated after piece `n_trunc`. `growth` raises the
/// ramp top and the plateau of piece `n` by `growth · n`; the standard map has
/// `growth = 0`.
#[derive(Clone, Debug)]
pub struct SequenceMap {
    pub n_trunc: usize,
    pub growth: Rat,
}

pub fn a(n: usize) -> Rat {
    rat(n as i64, n as i64 + 1)
}

pub fn b(n: usize) -> Rat {
    rat(n as i64 + 1, n as i64 + 2)
}

pub fn mid(n: usize) -> Rat {
    midpoint(&a(n), &b(n))
}

impl SequenceMap {
    pub fn new(n_trunc: usize) -> Self {
        SequenceMap { n_trunc, growth: Rat::zero() }
    }

    pub fn growing(n_trunc: usize, growth: Rat) -> Self {
        SequenceMap { n_trunc, growth }
    }

    fn ramp_top(&self, n: usize) -> Rat {
        int(1) + &self.growth * int(n as i64)
    }

    fn plateau(&self, n: usize) -> Rat {
        int(2) + &self.growth * int(n as i64)
    }

    pub fn function(&self) -> PiecewiseFn {
        let mut breaks = Vec::new();
        let mut cells = Vec::new();
        let mut values = Vec::new();
        for n in 0..=self.n_trunc {
            breaks.push(a(n));
            values.push(if n == 0 { Rat::zero() } else { self.plateau(n - 1) });
            cells.push(Affine::through(&a(n), &Rat::zero(), &mid(n), &self.ramp_top(n)));
            breaks.push(mid(n));
            values.push(self.plateau(n));
            cells.push(Affine::constant(self.plateau(n)));
        }
        breaks.push(b(self.n_trunc));
        values.push(self.plateau(self.n_trunc));
        PiecewiseFn::new(breaks, cells, values).expect("well-formed sawtooth")
    }

    /// Bounded one-sided data near the accumulation point.
    pub fn is_subcontinuous(&self) -> bool {
        self.growth.is_zero()
    }
}

/// Adds `(min + max)/2` to every section of a map with single-curve cells.
pub fn add_midpoints(phi: &SetValuedMap) -> SetValuedMap {
    let sections = phi.sections().iter().map(|s| s.union(&CompactSet::point(midpoint(s.min(), s.max())))).collect();
    let cells: Vec<Vec<Band>> = phi
        .cells()
        .iter()
        .map(|bands| {
            assert!(bands.iter().all(|b| b.lower == b.upper), "midpoint augmentation expects curves");
            bands.clone()
        })
        .collect();
    SetValuedMap::new(phi.breakpoints().to_vec(), cells, sections).expect("same shape")
}

/// Values taken by `phi` on the closed stretch `[lo, hi]` (both breakpoints).
fn values_on(phi: &SetValuedMap, lo: &Rat, hi: &Rat) -> CompactSet {
    let bp = phi.breakpoints();
    let mut parts: Vec<Interval> = Vec::new();
    for (i, x) in bp.iter().enumerate() {
        if x >= lo && x <= hi {
            parts.extend(phi.sections()[i].intervals().iter().cloned());
        }
        if i + 1 < bp.len() && x >= lo && &bp[i + 1] <= hi {
            for band in &phi.cells()[i] {
                let ys =
                    [band.lower.eval(x), band.lower.eval(&bp[i + 1]), band.upper.eval(x), band.upper.eval(&bp[i + 1])];
                let lo_y = ys.iter().min().expect("four values").clone();
                let hi_y = ys.iter().max().expect("four values").clone();
                parts.push(Interval { lo: lo_y, hi: hi_y });
            }
        }
    }
    CompactSet::new(parts).expect("non-empty stretch")
}

#[derive(Clone, Debug, Serialize)]
pub struct SectionRow {
    pub n: usize,
    #[serde(with = "rational::serde_rat")]
    pub a_n: Rat,
    #[serde(with = "rational::serde_rat")]
    pub mid_n: Rat,
    pub fbar_at_a: CompactSet,
    pub fbar_at_mid: CompactSet,
    pub g_at_a: CompactSet,
    pub g_at_mid: CompactSet,
}

#[derive(Clone, Debug, Serialize)]
pub struct SawtoothReport {
    pub n_trunc: usize,
    pub rows: Vec<SectionRow>,
    /// All section formulas hold for `1 ≤ n ≤ N` at `a_n` and `0 ≤ n ≤ N` at `mid_n`.
    pub sections_verified: bool,
    pub section_failures: Vec<String>,
    /// Every piece `[a_n, b_n]` of the closure takes the same values.
    pub uniform_pieces: bool,
    pub limit_section: CompactSet,
    pub g_cluster_set_at_limit: CompactSet,
    pub fbar_minimal_usco: bool,
    pub fbar_with_limit_usco: bool,
    pub g_truncation_usco: bool,
    pub g_with_limit_usco: bool,
    pub witness: Option<Witness>,
    pub witness_sequence: Vec<Witness>,
    pub subcontinuous: bool,
}

pub fn analyze(n_trunc: usize) -> SawtoothReport {
    analyze_map(&SequenceMap::new(n_trunc.max(1)))
}

pub fn analyze_map(seq: &SequenceMap) -> SawtoothReport {
    let n_trunc = seq.n_trunc;
    let f = seq.function();
    let fbar = graph_closure(&f);
    let g = add_midpoints(&fbar);

    let zero_two = CompactSet::from_points([int(0), int(2)]).expect("points");
    let one_two = CompactSet::from_points([int(1), int(2)]).expect("points");
    let zero_one_two = CompactSet::from_points([int(0), int(1), int(2)]).expect("points");
    let mid_expected = CompactSet::from_points([int(1), rat(3, 2), int(2)]).expect("points");

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for n in 0..=n_trunc {
        let (an, mn) = (a(n), mid(n));
        let row = SectionRow {
            n,
            fbar_at_a: fbar.section(&an).expect("in domain"),
            fbar_at_mid: fbar.section(&mn).expect("in domain"),
            g_at_a: g.section(&an).expect("in domain"),
            g_at_mid: g.section(&mn).expect("in domain"),
            a_n: an,
            mid_n: mn,
        };
        if n >= 1 && row.fbar_at_a != zero_two {
            failures.push(format!("fbar(a_{n}) = {}", row.fbar_at_a));
        }
        if n >= 1 && row.g_at_a != zero_one_two {
            failures.push(format!("G(a_{n}) = {}", row.g_at_a));
        }
        if row.fbar_at_mid != one_two {
            failures.push(format!("fbar(mid_{n}) = {}", row.fbar_at_mid));
        }
        if row.g_at_mid != mid_expected {
            failures.push(format!("G(mid_{n}) = {}", row.g_at_mid));
        }
        rows.push(row);
    }

    let piece_values: Vec<CompactSet> = (0..=n_trunc).map(|n| values_on(&fbar, &a(n), &b(n))).collect();
    let g_piece_values: Vec<CompactSet> = (0..=n_trunc).map(|n| values_on(&g, &a(n), &b(n))).collect();
    let uniform_pieces =
        piece_values.windows(2).all(|w| w[0] == w[1]) && g_piece_values.windows(2).all(|w| w[0] == w[1]);
    // With identical pieces, every neighbourhood of 1 sees the whole piece value set.
    let limit_section = piece_values[n_trunc].clone();
    let g_cluster = g_piece_values[n_trunc].clone();
    // the section declared at 1: the closed ramp sweep plus the plateau value
    let declared =
        CompactSet::new(vec![Interval { lo: Rat::zero(), hi: seq.ramp_top(0) }, Interval::point(seq.plateau(0))])
            .expect("non-empty");
    let g_at_limit = declared.union(&CompactSet::point(midpoint(declared.min(), declared.max())));

    let witness = if uniform_pieces {
        g_cluster.point_outside(&g_at_limit).map(|value| Witness { x: int(1), value })
    } else {
        None
    };
    let witness_sequence = match &witness {
        Some(w) => (0..=n_trunc.min(4)).map(|n| Witness { x: mid(n), value: w.value.clone() }).collect(),
        None => Vec::new(),
    };

    SawtoothReport {
        n_trunc,
        sections_verified: failures.is_empty(),
        section_failures: failures,
        fbar_minimal_usco: is_minimal_usco(&fbar).unwrap_or(false),
        fbar_with_limit_usco: uniform_pieces && is_usco(&fbar).is_ok() && limit_section.is_subset(&declared),
        g_truncation_usco: is_usco(&g).is_ok(),
        g_with_limit_usco: uniform_pieces && is_usco(&g).is_ok() && g_cluster.is_subset(&g_at_limit),
        uniform_pieces,
        limit_section,
        g_cluster_set_at_limit: g_cluster,
        witness,
        witness_sequence,
        subcontinuous: seq.is_subcontinuous(),
        rows,
    }
}
