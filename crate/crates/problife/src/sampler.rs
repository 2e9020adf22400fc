//! Monte Carlo sampling of binary trajectories and marginal estimation.
//!
//! # Random stream contract
//!
//! Draws are counter-based so trajectories are independent, reproducible,
//! and identical at any thread count. With `mix64` the splitmix64 finalizer
//! (xor-shift/multiply avalanche) and `GOLDEN` = 0x9E3779B97F4A7C15:
//!
//! ```text
//! base            = mix64(seed + GOLDEN)
//! key(trajectory) = mix64(base ^ (trajectory * 0xA0761D6478BD642F))
//! draw t          = mix64(key + (t+1) * GOLDEN)        (t = 0, 1, 2, ...)
//! unit draw       = (draw >> 11) * 2^-53               (uniform in [0, 1))
//! ```
//!
//! Draw consumption order: if the start grid is not binary, one draw per
//! cell in row-major order samples generation 0; every [`sample_step`] then
//! consumes exactly one draw per cell in row-major order (also for cells
//! whose firing probability is 0 or 1, keeping the stream aligned across
//! rulesets).

use rayon::prelude::*;

use crate::grid::{BoundaryPolicy, GridState, NEIGHBOR_OFFSETS};
use crate::rules::Ruleset;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const STREAM_SALT: u64 = 0xA076_1D64_78BD_642F;

/// splitmix64 finalizer.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The per-trajectory random stream described in the module docs.
#[derive(Debug, Clone)]
pub struct TrajectoryRng {
    key: u64,
    counter: u64,
}

impl TrajectoryRng {
    pub fn new(seed: u64, trajectory: u64) -> Self {
        let base = mix64(seed.wrapping_add(GOLDEN));
        Self {
            key: mix64(base ^ trajectory.wrapping_mul(STREAM_SALT)),
            counter: 0,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter += 1;
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform draw in `[0, 1)` from the top 53 bits.
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Marginal estimates from `samples` independent trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleEstimate {
    /// Per-cell fraction of trajectories alive at this generation.
    pub means: GridState,
    /// Per-cell binomial standard error `sqrt(m(1-m)/samples)`.
    pub stderr: GridState,
    pub samples: u64,
}

/// Samples one transition of a binary grid: each cell independently fires
/// with probability `survive[n]` (alive) or `birth[n]` (dead), `n` its exact
/// living-neighbour count. Consumes one draw per cell in row-major order.
pub fn sample_step(
    world: &GridState,
    rules: &Ruleset,
    boundary: BoundaryPolicy,
    rng: &mut TrajectoryRng,
) -> GridState {
    debug_assert!(world.is_binary(), "sample_step requires a binary grid");
    let width = world.width();
    let height = world.height();
    let mut values = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            let mut n = 0;
            for &(dx, dy) in &NEIGHBOR_OFFSETS {
                if world.neighbor_value(x, y, dx, dy, boundary) == 1.0 {
                    n += 1;
                }
            }
            let fire = if world.value(x, y) == 1.0 {
                rules.survival(n)
            } else {
                rules.birth(n)
            };
            let alive = rng.next_unit() < fire;
            values.push(if alive { 1.0 } else { 0.0 });
        }
    }
    GridState::from_raw(width, height, world.generation() + 1, values)
}

/// One sampled binary trajectory of `steps + 1` grids, deterministic in
/// `(seed, index)`. A non-binary start is first sampled cell-wise Bernoulli
/// as generation-0 randomness.
pub fn sample_trajectory(
    start: &GridState,
    rules: &Ruleset,
    steps: u64,
    boundary: BoundaryPolicy,
    seed: u64,
    index: u64,
) -> Vec<GridState> {
    let mut rng = TrajectoryRng::new(seed, index);
    let first = sample_start(start, &mut rng);
    let mut states = Vec::with_capacity(steps as usize + 1);
    states.push(first);
    for _ in 0..steps {
        let next = sample_step(states.last().unwrap(), rules, boundary, &mut rng);
        states.push(next);
    }
    states
}

fn sample_start(start: &GridState, rng: &mut TrajectoryRng) -> GridState {
    if start.is_binary() {
        return start.clone();
    }
    let values = start
        .values()
        .iter()
        .map(|&p| if rng.next_unit() < p { 1.0 } else { 0.0 })
        .collect();
    GridState::from_raw(start.width(), start.height(), start.generation(), values)
}

/// Final-generation marginal estimate from `samples` trajectories.
///
/// Trajectories run in parallel; per-cell alive counts are integers, so the
/// reduction is order-insensitive and the estimate is byte-identical at any
/// thread count.
pub fn estimate_marginals(
    start: &GridState,
    rules: &Ruleset,
    steps: u64,
    samples: u64,
    boundary: BoundaryPolicy,
    seed: u64,
) -> SampleEstimate {
    assert!(samples >= 1, "at least one trajectory is required");
    let cells = start.cells();
    let counts = (0..samples)
        .into_par_iter()
        .fold(
            || vec![0u64; cells],
            |mut acc, index| {
                let final_state = final_sampled_state(start, rules, steps, boundary, seed, index);
                for (slot, &v) in acc.iter_mut().zip(final_state.values()) {
                    *slot += (v == 1.0) as u64;
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; cells],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    estimate_from_counts(start, &counts, samples, start.generation() + steps)
}

/// Marginal estimates for every generation `0..=steps`.
///
/// Memory grows with `steps`; the default [`estimate_marginals`] keeps only
/// the final generation.
pub fn estimate_marginals_history(
    start: &GridState,
    rules: &Ruleset,
    steps: u64,
    samples: u64,
    boundary: BoundaryPolicy,
    seed: u64,
) -> Vec<SampleEstimate> {
    assert!(samples >= 1, "at least one trajectory is required");
    let cells = start.cells();
    let generations = steps as usize + 1;
    let counts = (0..samples)
        .into_par_iter()
        .fold(
            || vec![0u64; cells * generations],
            |mut acc, index| {
                let trajectory = sample_trajectory(start, rules, steps, boundary, seed, index);
                for (g, state) in trajectory.iter().enumerate() {
                    let slots = &mut acc[g * cells..(g + 1) * cells];
                    for (slot, &v) in slots.iter_mut().zip(state.values()) {
                        *slot += (v == 1.0) as u64;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; cells * generations],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    (0..generations)
        .map(|g| {
            estimate_from_counts(
                start,
                &counts[g * cells..(g + 1) * cells],
                samples,
                start.generation() + g as u64,
            )
        })
        .collect()
}

fn final_sampled_state(
    start: &GridState,
    rules: &Ruleset,
    steps: u64,
    boundary: BoundaryPolicy,
    seed: u64,
    index: u64,
) -> GridState {
    let mut rng = TrajectoryRng::new(seed, index);
    let mut state = sample_start(start, &mut rng);
    for _ in 0..steps {
        state = sample_step(&state, rules, boundary, &mut rng);
    }
    state
}

fn estimate_from_counts(
    start: &GridState,
    counts: &[u64],
    samples: u64,
    generation: u64,
) -> SampleEstimate {
    let means: Vec<f64> = counts.iter().map(|&c| c as f64 / samples as f64).collect();
    let stderr: Vec<f64> = means
        .iter()
        .map(|&m| (m * (1.0 - m) / samples as f64).sqrt())
        .collect();
    SampleEstimate {
        means: GridState::from_raw(start.width(), start.height(), generation, means),
        stderr: GridState::from_raw(start.width(), start.height(), generation, stderr),
        samples,
    }
}
