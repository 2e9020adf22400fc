//! Exact inference over the full distribution of binary grids.
//!
//! The update semantics: conditioned on one binary previous world, each
//! cell's next state is an independent Bernoulli with success `survive[n]`
//! if the cell was alive and `birth[n]` if dead, where `n` is its exact
//! living-neighbour count in that world. Evolving a [`WorldDistribution`]
//! sums this per-world product distribution over all source worlds, which
//! makes per-cell marginals exact at any horizon — the ground truth the
//! mean-field engine is compared against.
//!
//! Enumeration costs O(4^N) per step for N cells, so evolution is guarded by
//! a cell limit (default [`DEFAULT_CELL_LIMIT`]). The implementation is
//! intentionally plain enumeration: an oracle that is obviously correct on
//! small grids, not a scalable inference engine.

use thiserror::Error;

use crate::grid::{BoundaryPolicy, GridState, NEIGHBOR_OFFSETS};
use crate::rules::Ruleset;

/// Default maximum number of cells accepted by [`evolve_distribution`].
pub const DEFAULT_CELL_LIMIT: usize = 12;

/// Probability mass over binary grids. World identifiers pack one bit per
/// cell in row-major order (bit `k` = cell `k`); worlds with zero probability
/// are omitted and entries are kept in ascending identifier order.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldDistribution {
    width: usize,
    height: usize,
    mass: Vec<(u64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExactError {
    #[error(
        "grid has {cells} cells, exceeding the exact-inference limit of {limit}; \
         use the sampler instead or raise the limit"
    )]
    CellLimitExceeded { cells: usize, limit: usize },
    #[error("grid has {cells} cells; exact world enumeration supports at most 63")]
    GridTooLarge { cells: usize },
}

impl WorldDistribution {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cells(&self) -> usize {
        self.width * self.height
    }

    /// Worlds with nonzero probability, ascending by identifier.
    pub fn worlds(&self) -> &[(u64, f64)] {
        &self.mass
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().map(|&(_, p)| p).sum()
    }

    /// Probability of one specific binary world.
    pub fn prob_of(&self, world: u64) -> f64 {
        self.mass
            .binary_search_by_key(&world, |&(w, _)| w)
            .map(|i| self.mass[i].1)
            .unwrap_or(0.0)
    }
}

/// The product distribution induced by treating each cell value as an
/// independent Bernoulli: world `w` has probability
/// `prod over cells of (value if bit set, else 1 - value)`.
///
/// A binary grid yields a point mass on that world. Panics if the grid has
/// more than 63 cells (world identifiers are u64 bit masks); evolution is
/// infeasible far below that anyway.
pub fn initial_distribution(state: &GridState) -> WorldDistribution {
    let cells = state.cells();
    assert!(
        cells <= 63,
        "exact world enumeration supports at most 63 cells, got {cells}"
    );
    let mut mass = Vec::new();
    collect_worlds(state.values(), cells, 0, 1.0, &mut mass);
    WorldDistribution {
        width: state.width(),
        height: state.height(),
        mass,
    }
}

/// Depth-first over cells from the most significant bit down, dead branch
/// first, so worlds come out in ascending identifier order.
fn collect_worlds(values: &[f64], cell: usize, id: u64, prob: f64, mass: &mut Vec<(u64, f64)>) {
    if cell == 0 {
        mass.push((id, prob));
        return;
    }
    let c = cell - 1;
    let v = values[c];
    if v < 1.0 {
        collect_worlds(values, c, id, prob * (1.0 - v), mass);
    }
    if v > 0.0 {
        collect_worlds(values, c, id | (1 << c), prob * v, mass);
    }
}

/// Exact next-generation distribution.
///
/// For every source world, per-cell firing probabilities are computed from
/// the ruleset and the world's exact neighbour counts, and the resulting
/// product distribution is accumulated into the successor table. Total mass
/// is preserved; zero-probability successors are dropped (no epsilon
/// pruning). Source worlds are processed in ascending identifier order so
/// accumulation is bit-reproducible.
pub fn evolve_distribution(
    dist: &WorldDistribution,
    rules: &Ruleset,
    boundary: BoundaryPolicy,
    cell_limit: usize,
) -> Result<WorldDistribution, ExactError> {
    let cells = dist.cells();
    if cells > cell_limit {
        return Err(ExactError::CellLimitExceeded {
            cells,
            limit: cell_limit,
        });
    }
    if cells > 63 {
        return Err(ExactError::GridTooLarge { cells });
    }

    let width = dist.width;
    let height = dist.height;
    let mut next = vec![0.0f64; 1usize << cells];
    let mut fire = vec![0.0f64; cells];

    for &(world, prob) in &dist.mass {
        for y in 0..height {
            for x in 0..width {
                let cell = y * width + x;
                let n = neighbor_count(world, width, height, x, y, boundary);
                fire[cell] = if world & (1 << cell) != 0 {
                    rules.survival(n)
                } else {
                    rules.birth(n)
                };
            }
        }
        scatter_successors(&fire, cells, 0, prob, &mut next);
    }

    let mass = next
        .into_iter()
        .enumerate()
        .filter(|&(_, p)| p != 0.0)
        .map(|(id, p)| (id as u64, p))
        .collect();
    Ok(WorldDistribution {
        width,
        height,
        mass,
    })
}

/// Adds `prob * prod(fire or 1-fire)` to every successor world, skipping
/// zero-probability branches. Depth-first with prefix products, most
/// significant cell first, dead branch first: successors of one source are
/// visited in ascending identifier order.
fn scatter_successors(fire: &[f64], cell: usize, id: u64, prob: f64, next: &mut [f64]) {
    if cell == 0 {
        next[id as usize] += prob;
        return;
    }
    let c = cell - 1;
    let q = fire[c];
    if q < 1.0 {
        scatter_successors(fire, c, id, prob * (1.0 - q), next);
    }
    if q > 0.0 {
        scatter_successors(fire, c, id | (1 << c), prob * q, next);
    }
}

#[inline]
fn neighbor_count(
    world: u64,
    width: usize,
    height: usize,
    x: usize,
    y: usize,
    boundary: BoundaryPolicy,
) -> usize {
    let mut count = 0;
    for &(dx, dy) in &NEIGHBOR_OFFSETS {
        let nx = x as i64 + dx;
        let ny = y as i64 + dy;
        let idx = match boundary {
            BoundaryPolicy::Dead => {
                if nx < 0 || ny < 0 || nx >= width as i64 || ny >= height as i64 {
                    continue;
                }
                ny as usize * width + nx as usize
            }
            BoundaryPolicy::Toroidal => {
                let nx = nx.rem_euclid(width as i64) as usize;
                let ny = ny.rem_euclid(height as i64) as usize;
                ny * width + nx
            }
        };
        if world & (1 << idx) != 0 {
            count += 1;
        }
    }
    count
}

/// Per-cell `P(alive)`: the sum of the masses of all worlds in which the
/// cell's bit is set. The generation index comes from the caller's context.
pub fn exact_marginals(dist: &WorldDistribution, generation: u64) -> GridState {
    let cells = dist.cells();
    let mut values = vec![0.0f64; cells];
    for &(world, prob) in &dist.mass {
        for (cell, value) in values.iter_mut().enumerate() {
            if world & (1 << cell) != 0 {
                *value += prob;
            }
        }
    }
    for value in &mut values {
        *value = value.clamp(0.0, 1.0);
    }
    GridState::from_raw(dist.width, dist.height, generation, values)
}
