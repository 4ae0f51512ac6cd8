//! Exact set-valued calculus on compact real intervals.

pub mod analysis;
pub mod map;
pub mod patch;
pub mod piecewise;
pub mod realset;
pub mod sawtooth;

pub use analysis::{
    agree_on, ball_membership, bounded_on_compact, dense_propagation_check, h_entourage_within, is_continuous,
    is_minimal_cusco, is_minimal_usco, is_quasicontinuous, is_subcontinuous, is_usco, test_selection,
    vietoris_preimage, Entourage, Propagation, SelectionTest, Verdict, Witness,
};
pub use map::{convexify, graph_closure, Band, SetValuedMap};
pub use patch::{constant_on, cusco_agree_patch, patch, separating_open, AgreePatch};
pub use piecewise::{Affine, Locate, PiecewiseFn};
pub use realset::{CompactSet, Interval, RealSet, Span};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SetValuedError {
    #[error("empty section")]
    EmptySection,
    #[error("invalid interval [{0}, {1}]")]
    InvalidInterval(String, String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("domains do not match")]
    DomainMismatch,
    #[error("not usco: limit value {value} at x = {x} is missing from the section")]
    NotUsco { x: String, value: String },
    #[error("chain a ⊆ v ⊆ cl(v) ⊆ u violated: {0}")]
    ChainViolation(String),
    #[error("dense propagation needs a closed entourage")]
    OpenEntourage,
    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(String),
}
