//! Ground-truth constructions of the joint law that share nothing with the
//! closed form: a forward dynamic program over `(X, K)` and brute-force
//! enumeration of every step sequence.

use std::collections::HashMap;
use std::thread;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::dyadic::DyadicProb;
use crate::error::{check_site, Result, WalkError};
use crate::exactwalk::JointTable;

/// Largest `N` accepted by [`enumerate_joint`].
pub const MAX_ENUMERATION_STEPS: u32 = 20;

/// Layer `n` of the forward recurrence. Cells hold path counts; the
/// probability of a cell is `count / 2^n`.
#[derive(Debug, Clone)]
pub struct DpState {
    step: u32,
    horizon: u32,
    site: i64,
    // Indexed by (x + horizon) * (horizon + 1) + k.
    counts: Vec<BigUint>,
}

impl DpState {
    /// The walk at the origin with no visits, able to advance `horizon` steps.
    pub fn new(site: i64, horizon: u32) -> Result<Self> {
        check_site(site)?;
        let width = 2 * horizon as usize + 1;
        let mut counts = vec![BigUint::zero(); width * (horizon as usize + 1)];
        let origin = Self::index_for(horizon, 0, 0);
        counts[origin] = BigUint::from(1u32);
        Ok(DpState {
            step: 0,
            horizon,
            site,
            counts,
        })
    }

    fn index_for(horizon: u32, x: i64, k: u32) -> usize {
        (x + horizon as i64) as usize * (horizon as usize + 1) + k as usize
    }

    fn index(&self, x: i64, k: u32) -> usize {
        Self::index_for(self.horizon, x, k)
    }

    pub fn step(&self) -> u32 {
        self.step
    }

    /// Moves every path one step left and one step right; arriving at the
    /// marked site bumps the visit count.
    pub fn advance(&mut self) {
        assert!(self.step < self.horizon, "DP advanced past its horizon");
        let mut next = vec![BigUint::zero(); self.counts.len()];
        let n = self.step as i64;
        for x in (-n..=n).step_by(2) {
            for k in 0..=self.step {
                let c = &self.counts[self.index(x, k)];
                if c.is_zero() {
                    continue;
                }
                for nx in [x - 1, x + 1] {
                    let nk = if nx == self.site { k + 1 } else { k };
                    let i = self.index(nx, nk);
                    next[i] += c;
                }
            }
        }
        self.counts = next;
        self.step += 1;
    }

    pub fn probability(&self, x: i64, k: u32) -> DyadicProb {
        if x.unsigned_abs() > self.step as u64 || k > self.step {
            return DyadicProb::zero();
        }
        DyadicProb::from_count(self.counts[self.index(x, k)].clone(), self.step as u64)
    }

    /// Total probability of the layer.
    pub fn mass(&self) -> DyadicProb {
        let total: BigUint = self.counts.iter().sum();
        DyadicProb::from_count(total, self.step as u64)
    }

    pub fn to_table(&self) -> JointTable {
        let n = self.step as i64;
        let cells = (-n..=n).flat_map(|x| (0..=self.step).map(move |k| (x, k)));
        JointTable::from_entries(
            self.step,
            self.site,
            cells.map(|(x, k)| ((x, k), self.probability(x, k))),
        )
    }
}

/// Joint table by running the forward recurrence for `N` steps.
pub fn dp_joint(steps: u32, site: i64) -> Result<JointTable> {
    let mut state = DpState::new(site, steps)?;
    for _ in 0..steps {
        state.advance();
    }
    Ok(state.to_table())
}

/// Terminal `(X, K)` of the path whose `i`-th step is `+1` iff bit `i` of
/// `path` is set.
fn walk_path(path: u32, steps: u32, site: i64) -> (i64, u32) {
    let mut x = 0i64;
    let mut k = 0u32;
    for i in 0..steps {
        x += if path >> i & 1 == 1 { 1 } else { -1 };
        if x == site {
            k += 1;
        }
    }
    (x, k)
}

fn count_paths(range: std::ops::Range<u32>, steps: u32, site: i64) -> HashMap<(i64, u32), u64> {
    let mut counts = HashMap::new();
    for path in range {
        *counts.entry(walk_path(path, steps, site)).or_insert(0) += 1;
    }
    counts
}

/// Joint table by walking all `2^N` equally likely step sequences.
pub fn enumerate_joint(steps: u32, site: i64) -> Result<JointTable> {
    check_site(site)?;
    if steps > MAX_ENUMERATION_STEPS {
        return Err(WalkError::EnumerationTooLarge {
            n: steps,
            max: MAX_ENUMERATION_STEPS,
        });
    }
    let paths = 1u32 << steps;
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(8) as u32;
    let chunk = paths.div_ceil(workers).max(1);
    let partials: Vec<HashMap<(i64, u32), u64>> = thread::scope(|s| {
        let handles: Vec<_> = (0..paths)
            .step_by(chunk as usize)
            .map(|start| {
                let end = (start + chunk).min(paths);
                s.spawn(move || count_paths(start..end, steps, site))
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut merged: HashMap<(i64, u32), u64> = HashMap::new();
    for part in partials {
        for (cell, c) in part {
            *merged.entry(cell).or_insert(0) += c;
        }
    }
    Ok(JointTable::from_entries(
        steps,
        site,
        merged
            .into_iter()
            .map(|(cell, c)| (cell, DyadicProb::from_count(c, steps as u64))),
    ))
}
