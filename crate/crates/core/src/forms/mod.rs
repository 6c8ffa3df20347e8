//! Discrete exterior calculus on periodic structured grids.
//!
//! Forms are collocated: every component of a k-form is sampled at the grid
//! nodes. The exterior derivative uses centered differences, which commute
//! across axes and are skew-adjoint under the uniform node sum. As a result
//! `d∘d = 0`, `∫ da = 0` and `⟨da, b⟩ = (-1)^{k+1} ⟨a, db⟩` hold up to
//! rounding. Wedge, Hodge star, index raising/lowering and contraction are
//! pointwise and exact. The pointwise wedge does not satisfy the Leibniz rule,
//! so product rules only hold up to the truncation error of the differences.
//!
//! Centered differences annihilate the checkerboard mode `(-1)^j` on even
//! grids. Fields in the checks are band-limited, so the mode never enters.
//!
//! Flat tori have nonzero de Rham cohomology. Reduced states are always
//! built as `d` of something, so harmonic forms never appear in the gauge
//! quotient.

mod basis;
mod form;
mod grid;
mod snapshot;

pub use basis::{binomial, parity_sign};
pub use form::{Form, VectorField};
pub use grid::Grid;
pub use snapshot::FormSnapshot;
