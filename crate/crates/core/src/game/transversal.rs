//! Minimal hitting sets of a family of moves.

use super::Item;
use std::collections::BTreeSet;

/// All inclusion-minimal sets of items meeting every edge, sorted. Built edge
/// by edge: extend each partial transversal that misses the new edge by one of
/// its items, then drop non-minimal sets.
pub fn minimal_transversals(edges: &[Vec<Item>]) -> Vec<Vec<Item>> {
    let mut current: Vec<BTreeSet<Item>> = vec![BTreeSet::new()];
    for edge in edges {
        let mut next: Vec<BTreeSet<Item>> = Vec::new();
        for t in &current {
            if edge.iter().any(|x| t.contains(x)) {
                next.push(t.clone());
            } else {
                for &x in edge {
                    let mut u = t.clone();
                    u.insert(x);
                    next.push(u);
                }
            }
        }
        next.sort();
        next.dedup();
        next.sort_by_key(|s| s.len());
        let mut kept: Vec<BTreeSet<Item>> = Vec::with_capacity(next.len());
        for s in next {
            if !kept.iter().any(|k| k.is_subset(&s)) {
                kept.push(s);
            }
        }
        current = kept;
    }
    let mut out: Vec<Vec<Item>> = current.into_iter().map(|s| s.into_iter().collect()).collect();
    out.sort();
    out
}
