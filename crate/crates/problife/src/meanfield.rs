//! The closed-form cell update: Poisson-binomial neighbour counts mixed
//! through the survival/birth tables.
//!
//! Each cell's next value is
//!
//! ```text
//! C'(x,y) = sum over n of  N(x,y,n) * ( survive[n]*C(x,y) + birth[n]*(1 - C(x,y)) )
//! ```
//!
//! where `N(x,y,n)` is the probability that exactly `n` of the eight
//! neighbours are alive, treating the neighbour values as independent
//! Bernoulli marginals. The independence assumption is exact for the first
//! two transitions from a binary start (generation-1 cells are mutually
//! independent) and an approximation afterwards; the [`crate::exact`] engine
//! quantifies the divergence.
//!
//! Neighbours are scanned in row-major offset order and the sum over `n`
//! ascends, so outputs are bit-identical across runs and thread counts.

use crate::grid::{BoundaryPolicy, GridError, GridState, NEIGHBOR_OFFSETS};
use crate::rules::{Ruleset, NEIGHBOR_COUNTS};

/// Distribution of the number of living neighbours of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborPMF {
    probs: [f64; NEIGHBOR_COUNTS],
}

impl NeighborPMF {
    /// Probability of exactly `n` living neighbours.
    #[inline]
    pub fn prob(&self, n: usize) -> f64 {
        self.probs[n]
    }

    pub fn probs(&self) -> &[f64; NEIGHBOR_COUNTS] {
        &self.probs
    }
}

/// Poisson-binomial distribution of the living-neighbour count at `(x, y)`,
/// by the standard dynamic-programming convolution: start from the point
/// mass at 0 and fold each neighbour in as an independent Bernoulli.
pub fn neighbor_pmf(
    state: &GridState,
    x: usize,
    y: usize,
    boundary: BoundaryPolicy,
) -> Result<NeighborPMF, GridError> {
    if x >= state.width() || y >= state.height() {
        return Err(GridError::OutOfBounds {
            x,
            y,
            width: state.width(),
            height: state.height(),
        });
    }
    Ok(pmf_unchecked(state, x, y, boundary))
}

#[inline]
fn pmf_unchecked(state: &GridState, x: usize, y: usize, boundary: BoundaryPolicy) -> NeighborPMF {
    let mut probs = [0.0; NEIGHBOR_COUNTS];
    probs[0] = 1.0;
    for (i, &(dx, dy)) in NEIGHBOR_OFFSETS.iter().enumerate() {
        let p = state.neighbor_value(x, y, dx, dy, boundary);
        // In-place convolution; k runs downward so probs[k-1] is still the
        // previous iteration's value.
        for k in (1..=i + 1).rev() {
            probs[k] = probs[k] * (1.0 - p) + probs[k - 1] * p;
        }
        probs[0] *= 1.0 - p;
    }
    NeighborPMF { probs }
}

/// Advances the grid one generation. Pure: the input state is unchanged.
pub fn step(state: &GridState, rules: &Ruleset, boundary: BoundaryPolicy) -> GridState {
    let width = state.width();
    let height = state.height();
    let mut values = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            let pmf = pmf_unchecked(state, x, y, boundary);
            let own = state.value(x, y);
            let mut next = 0.0;
            for n in 0..NEIGHBOR_COUNTS {
                next += pmf.probs[n] * (rules.survival(n) * own + rules.birth(n) * (1.0 - own));
            }
            // The sum is a convex combination of values in [0, 1]; clamp
            // shaves f64 round-off at the endpoints.
            values.push(next.clamp(0.0, 1.0));
        }
    }
    GridState::from_raw(width, height, state.generation() + 1, values)
}

/// Runs `steps` generations, returning the trajectory including the start:
/// element `k` is at generation `state.generation() + k`.
pub fn run(
    state: &GridState,
    rules: &Ruleset,
    steps: u64,
    boundary: BoundaryPolicy,
) -> Vec<GridState> {
    let mut states = Vec::with_capacity(steps as usize + 1);
    states.push(state.clone());
    for _ in 0..steps {
        let next = step(states.last().unwrap(), rules, boundary);
        states.push(next);
    }
    states
}

/// Smallest index `k` with `max_abs_diff(states[k], states[k+1]) <= eps`,
/// if any. All states must share dimensions.
pub fn find_fixed_point(states: &[GridState], eps: f64) -> Option<usize> {
    states.windows(2).position(|pair| {
        pair[0]
            .max_abs_diff(&pair[1])
            .expect("trajectory states share dimensions")
            <= eps
    })
}
