//! 1D-to-2D embedding: +-1 / +-N shifts, segment decoding into (x, y),
//! zero-overlap verification and an independent dense 2D oracle.

use std::collections::BTreeMap;

use crate::coins::CoinOperator;
use crate::error::{Error, Result};
use crate::matrix::{C64, CoinVec, coin_norm_sq};
use crate::walk::{evolve, ShiftVector, WalkConfig, WalkState};

/// Which coin-state pair carries the x-axis (+-1) and which the y-axis (+-N).
///
/// `PolarizationY` is the default ShiftVector assignment: H+/H- move x,
/// V+/V- move y.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisAssignment {
    /// H+/H- -> x by +-1, V+/V- -> y by +-1 (times N in the 1D embedding).
    PolarizationY,
    /// V+/V- -> x, H+/H- -> y.
    PolarizationX,
}

/// Parameters of the embedded walk.
#[derive(Debug, Clone, Copy)]
pub struct EmbeddingParams {
    /// Segment length; odd, >= 3.
    pub n: i64,
    pub steps: u32,
    pub axis_assignment: AxisAssignment,
}

impl EmbeddingParams {
    pub fn new(n: i64, steps: u32) -> Result<Self> {
        if n < 3 || n % 2 == 0 {
            return Err(Error::EvenSegmentLength(n));
        }
        let budget = (n - 1) / 2;
        if i64::from(steps) > budget {
            return Err(Error::StepBudgetExceeded {
                steps: i64::from(steps),
                max: budget,
            });
        }
        Ok(Self {
            n,
            steps,
            axis_assignment: AxisAssignment::PolarizationY,
        })
    }

    pub fn step_budget(&self) -> i64 {
        (self.n - 1) / 2
    }
}

/// Sparse 2D probability distribution, lexicographically ordered.
pub type Grid2DDistribution = BTreeMap<(i64, i64), f64>;

/// The 1D shift vector realizing the embedding: (+1, -1, +N, -N) permuted by
/// the axis assignment.
pub fn embedded_shifts(p: &EmbeddingParams) -> Result<ShiftVector> {
    if p.n < 3 || p.n % 2 == 0 {
        return Err(Error::EvenSegmentLength(p.n));
    }
    Ok(match p.axis_assignment {
        AxisAssignment::PolarizationY => ShiftVector([1, -1, p.n, -p.n]),
        AxisAssignment::PolarizationX => ShiftVector([p.n, -p.n, 1, -1]),
    })
}

/// Decodes a 1D position into segment coordinates: y is the nearest integer
/// to n/N with halves rounded toward zero, x the remainder.
pub fn decode_position(n: i64, segment: i64) -> (i64, i64) {
    // round-half-toward-zero nearest integer of n/segment
    let y = if n >= 0 {
        (2 * n + segment - 1) / (2 * segment)
    } else {
        -((2 * (-n) + segment - 1) / (2 * segment))
    };
    (n - segment * y, y)
}

/// Per-step overlap verification: every occupied 1D position must decode to
/// an x within the segment half-width, so no two (x, y) cells can collapse
/// onto one time bin. Returns the offending (step, position) on failure.
pub fn overlap_check(p: &EmbeddingParams, trajectory: &[WalkState]) -> std::result::Result<(), (usize, i64)> {
    let half = p.step_budget();
    for (t, s) in trajectory.iter().enumerate() {
        for (&n, _) in s.positions() {
            let (x, _) = decode_position(n, p.n);
            if x.abs() > half {
                return Err((t, n));
            }
        }
    }
    Ok(())
}

/// Runs the 1D walk under the embedded shifts and decodes the final
/// distribution onto the (x, y) grid, verifying zero overlap at every step.
pub fn run_embedded_2d(
    coin: &CoinOperator,
    initial: &CoinVec,
    p: &EmbeddingParams,
) -> Result<Grid2DDistribution> {
    let budget = p.step_budget();
    if i64::from(p.steps) > budget {
        return Err(Error::StepBudgetExceeded {
            steps: i64::from(p.steps),
            max: budget,
        });
    }
    let mut cfg = WalkConfig::new(coin.clone(), *initial, p.steps)?;
    cfg.shifts = embedded_shifts(p)?;
    let states = evolve(&cfg)?;
    if let Err((step, position)) = overlap_check(p, &states) {
        return Err(Error::Config(format!(
            "segment overlap at step {step}, position {position}"
        )));
    }
    let mut grid = Grid2DDistribution::new();
    let last = states.last().expect("steps + 1 states");
    for (&n, v) in last.positions() {
        let cell = decode_position(n, p.n);
        *grid.entry(cell).or_insert(0.0) += coin_norm_sq(v);
    }
    Ok(grid)
}

/// Direct 2D walk used as an independent correctness witness: dense array
/// over the reachable square, with the +-1 coin pair moving x and the +-N
/// pair moving y.
pub fn oracle_2d_walk(
    coin: &CoinOperator,
    initial: &CoinVec,
    steps: u32,
    axis_assignment: AxisAssignment,
) -> Grid2DDistribution {
    let r = steps as usize;
    let width = 2 * r + 1;
    let zero = C64::new(0.0, 0.0);
    // dense layout: [x][y][coin]
    let mut amps = vec![vec![[zero; 4]; width]; width];
    amps[r][r] = *initial;
    // (dx, dy) per coin index
    let moves: [(i64, i64); 4] = match axis_assignment {
        AxisAssignment::PolarizationY => [(1, 0), (-1, 0), (0, 1), (0, -1)],
        AxisAssignment::PolarizationX => [(0, 1), (0, -1), (1, 0), (-1, 0)],
    };
    for _ in 0..steps {
        let mut next = vec![vec![[zero; 4]; width]; width];
        for (ix, col) in amps.iter().enumerate() {
            for (iy, v) in col.iter().enumerate() {
                if v.iter().all(|a| a.re == 0.0 && a.im == 0.0) {
                    continue;
                }
                let flipped = coin.matrix.apply_coin(v);
                for (j, amp) in flipped.iter().enumerate() {
                    let (dx, dy) = moves[j];
                    let nx = (ix as i64 + dx) as usize;
                    let ny = (iy as i64 + dy) as usize;
                    next[nx][ny][j] += amp;
                }
            }
        }
        amps = next;
    }
    let mut grid = Grid2DDistribution::new();
    for (ix, col) in amps.iter().enumerate() {
        for (iy, v) in col.iter().enumerate() {
            let p = coin_norm_sq(v);
            if p > 0.0 {
                grid.insert((ix as i64 - r as i64, iy as i64 - r as i64), p);
            }
        }
    }
    grid
}
