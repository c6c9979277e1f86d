//! Dense reference implementation of the 1D walk, independent of the sparse
//! engine: a flat array over the reachable window, re-deriving the coin-shift
//! recursion from scratch.

use std::collections::BTreeMap;

use coinwalk::coins::CoinOperator;
use coinwalk::matrix::{coin_norm_sq, C64, CoinVec};

/// Evolves `steps` walk steps densely and returns the position distribution.
pub fn oracle_1d_distribution(
    coin: &CoinOperator,
    initial: &CoinVec,
    shifts: [i64; 4],
    steps: u32,
) -> BTreeMap<i64, f64> {
    let t = i64::from(steps);
    let lo = t * shifts.iter().copied().min().unwrap().min(0);
    let hi = t * shifts.iter().copied().max().unwrap().max(0);
    let len = (hi - lo + 1) as usize;
    let zero = C64::new(0.0, 0.0);
    let mut amps = vec![[zero; 4]; len];
    amps[(-lo) as usize] = *initial;
    for _ in 0..steps {
        let mut next = vec![[zero; 4]; len];
        for (i, v) in amps.iter().enumerate() {
            if v.iter().all(|a| a.re == 0.0 && a.im == 0.0) {
                continue;
            }
            let w = coin.matrix.apply_coin(v);
            for (j, amp) in w.iter().enumerate() {
                let ni = (i as i64 + shifts[j]) as usize;
                next[ni][j] += amp;
            }
        }
        amps = next;
    }
    let mut dist = BTreeMap::new();
    for (i, v) in amps.iter().enumerate() {
        let p = coin_norm_sq(v);
        if p > 0.0 {
            dist.insert(lo + i as i64, p);
        }
    }
    dist
}

/// Entrywise comparison of two sparse distributions over the union of keys.
pub fn max_dist_diff(a: &BTreeMap<i64, f64>, b: &BTreeMap<i64, f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for k in a.keys().chain(b.keys()) {
        let x = a.get(k).copied().unwrap_or(0.0);
        let y = b.get(k).copied().unwrap_or(0.0);
        worst = worst.max((x - y).abs());
    }
    worst
}
