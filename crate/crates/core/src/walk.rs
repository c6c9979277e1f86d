//! Sparse discrete-time evolution: coin application, conditional shift,
//! midpoint recentering and probability distributions.

use std::collections::BTreeMap;

use crate::coins::{sagnac_swap, CoinOperator};
use crate::error::{Error, Result};
use crate::matrix::{coin_norm_sq, C64, CoinVec, TOL_ALGEBRAIC};

/// Per-coin-state integer displacement, indexed by the coin basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftVector(pub [i64; 4]);

impl ShiftVector {
    /// Default assignment: (+1, -1, +2, -2) for (H+, H-, V+, V-).
    pub fn default_steps() -> Self {
        ShiftVector([1, -1, 2, -2])
    }

    /// Unbiased walks have shifts summing to zero.
    pub fn is_unbiased(&self) -> bool {
        self.0.iter().sum::<i64>() == 0
    }

    pub fn min(&self) -> i64 {
        *self.0.iter().min().expect("4 entries")
    }

    pub fn max(&self) -> i64 {
        *self.0.iter().max().expect("4 entries")
    }
}

/// Sparse walker state: position -> coin amplitudes.
#[derive(Debug, Clone)]
pub struct WalkState {
    amplitudes: BTreeMap<i64, CoinVec>,
    step_index: u32,
    midpoint_offset: i64,
}

impl WalkState {
    /// A walker localized at `position` with the given coin state.
    pub fn localized(position: i64, coin: CoinVec) -> Result<Self> {
        let norm = coin_norm_sq(&coin);
        if (norm - 1.0).abs() > TOL_ALGEBRAIC {
            return Err(Error::NotNormalized(norm.sqrt()));
        }
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(position, coin);
        Ok(Self {
            amplitudes,
            step_index: 0,
            midpoint_offset: 0,
        })
    }

    pub fn step_index(&self) -> u32 {
        self.step_index
    }

    pub fn midpoint_offset(&self) -> i64 {
        self.midpoint_offset
    }

    pub fn positions(&self) -> impl Iterator<Item = (&i64, &CoinVec)> {
        self.amplitudes.iter()
    }

    pub fn total_probability(&self) -> f64 {
        self.amplitudes.values().map(coin_norm_sq).sum()
    }

    pub fn support(&self) -> Option<(i64, i64)> {
        let lo = self.amplitudes.keys().next()?;
        let hi = self.amplitudes.keys().next_back()?;
        Some((*lo, *hi))
    }
}

/// Full walk configuration.
#[derive(Debug, Clone)]
pub struct WalkConfig {
    pub coin: CoinOperator,
    /// Apply the Sagnac swap to each coin outcome before shifting, as the
    /// as-built loop does; equivalent to evolving with the modified coin.
    pub apply_sagnac_swap: bool,
    pub shifts: ShiftVector,
    pub steps: u32,
    pub initial_position: i64,
    pub initial_coin: CoinVec,
    /// Keep the attainable-support midpoint at zero by translating each
    /// step. Off by default: the mathematics stays in unbiased coordinates
    /// and distributions are translation-equivalent either way.
    pub recenter: bool,
}

impl WalkConfig {
    pub fn new(coin: CoinOperator, initial_coin: CoinVec, steps: u32) -> Result<Self> {
        let norm = coin_norm_sq(&initial_coin);
        if (norm - 1.0).abs() > TOL_ALGEBRAIC {
            return Err(Error::NotNormalized(norm.sqrt()));
        }
        Ok(Self {
            coin,
            apply_sagnac_swap: false,
            shifts: ShiftVector::default_steps(),
            steps,
            initial_position: 0,
            initial_coin,
            recenter: false,
        })
    }

    pub fn initial_state(&self) -> Result<WalkState> {
        WalkState::localized(self.initial_position, self.initial_coin)
    }
}

/// Attainable-support center after `t` steps, with fractional midpoints
/// rounded toward zero.
fn support_center(shifts: &ShiftVector, t: i64) -> i64 {
    (shifts.min() + shifts.max()) * t / 2
}

/// One walk step: coin, optional Sagnac swap, then the conditional shift.
pub fn step(s: &WalkState, cfg: &WalkConfig) -> WalkState {
    let swap = sagnac_swap().matrix;
    let mut next: BTreeMap<i64, CoinVec> = BTreeMap::new();
    for (&n, v) in &s.amplitudes {
        let mut w = cfg.coin.matrix.apply_coin(v);
        if cfg.apply_sagnac_swap {
            w = swap.apply_coin(&w);
        }
        for (j, amp) in w.iter().enumerate() {
            if amp.re == 0.0 && amp.im == 0.0 {
                continue;
            }
            let entry = next
                .entry(n + cfg.shifts.0[j])
                .or_insert([C64::new(0.0, 0.0); 4]);
            entry[j] += amp;
        }
    }
    let mut out = WalkState {
        amplitudes: next,
        step_index: s.step_index + 1,
        midpoint_offset: s.midpoint_offset,
    };
    if cfg.recenter {
        let t0 = i64::from(s.step_index);
        let delta = support_center(&cfg.shifts, t0 + 1) - support_center(&cfg.shifts, t0);
        out = recenter(&out, delta);
    }
    out
}

/// Evolves the configured walk, returning one state per step including t=0.
pub fn evolve(cfg: &WalkConfig) -> Result<Vec<WalkState>> {
    let mut states = Vec::with_capacity(cfg.steps as usize + 1);
    states.push(cfg.initial_state()?);
    for _ in 0..cfg.steps {
        let next = step(states.last().expect("non-empty"), cfg);
        states.push(next);
    }
    Ok(states)
}

/// Per-position probability: squared amplitudes summed over coin states.
pub fn position_distribution(s: &WalkState) -> BTreeMap<i64, f64> {
    s.amplitudes
        .iter()
        .map(|(&n, v)| (n, coin_norm_sq(v)))
        .collect()
}

/// Per-coin-state probability summed over positions.
pub fn coin_marginal(s: &WalkState) -> [f64; 4] {
    let mut out = [0.0; 4];
    for v in s.amplitudes.values() {
        for (j, amp) in v.iter().enumerate() {
            out[j] += amp.norm_sqr();
        }
    }
    out
}

/// Translates every position by `-offset`, accumulating the midpoint
/// bookkeeping; the distribution is translation-equivalent.
pub fn recenter(s: &WalkState, offset: i64) -> WalkState {
    if offset == 0 {
        return s.clone();
    }
    WalkState {
        amplitudes: s
            .amplitudes
            .iter()
            .map(|(&n, v)| (n - offset, *v))
            .collect(),
        step_index: s.step_index,
        midpoint_offset: s.midpoint_offset + offset,
    }
}
