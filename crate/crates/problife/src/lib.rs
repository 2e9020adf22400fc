//! Engines and tooling for ProbLife, a probabilistic Game of Life.
//!
//! In ProbLife each rule carries a probability: `survive[n]` is the chance
//! that a living cell with exactly `n` living neighbours stays alive, and
//! `birth[n]` the chance that a dead cell with `n` living neighbours comes to
//! life. Cells hold aliveness probabilities in `[0, 1]` instead of binary
//! states; with all probabilities set to 0 or 1 the classic game is recovered
//! exactly.
//!
//! Three engines share the same ruleset and grid types:
//!
//! - [`meanfield`] — the closed-form per-cell update: the neighbour-count
//!   distribution (a Poisson binomial over the eight neighbour marginals)
//!   mixed through the survival/birth tables. Deterministic and fast, exact
//!   for the first two transitions from a binary start.
//! - [`exact`] — enumeration of the full probability distribution over
//!   binary grids; the ground-truth oracle for small grids.
//! - [`sampler`] — reproducible Monte Carlo sampling of binary trajectories
//!   and marginal estimation.
//!
//! [`render`] turns grids into gradient-colored PPM images, mapping low
//! aliveness to blue, 0.5 to green and 1 to red.

pub mod exact;
pub mod grid;
pub mod meanfield;
pub mod render;
pub mod rules;
pub mod sampler;

pub use grid::{BoundaryPolicy, GridState};
pub use rules::Ruleset;
