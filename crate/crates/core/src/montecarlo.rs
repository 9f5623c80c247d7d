//! Direct simulation of the walk with visit counting, and goodness-of-fit
//! statistics against the exact joint table.
//!
//! Trials are cut into fixed-size blocks and block `b` always draws from
//! ChaCha8 stream `b` of the user seed. Workers take blocks round-robin and
//! merge counts by addition, so the histogram depends only on
//! `(N, Z, trials, seed)` and not on the number of workers.

use std::collections::BTreeMap;
use std::thread;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{check_site, Result, WalkError};
use crate::exactwalk::JointTable;

/// Trials per random stream.
pub const TRIALS_PER_BLOCK: u64 = 1 << 14;

/// Cells with a smaller expected count are pooled before the chi-square
/// statistic is formed.
pub const MIN_EXPECTED_COUNT: f64 = 5.0;

/// Empirical counts over `(X, K)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram2D {
    steps: u32,
    site: i64,
    seed: u64,
    trials: u64,
    counts: BTreeMap<(i64, u32), u64>,
}

impl Histogram2D {
    pub fn empty(steps: u32, site: i64, seed: u64) -> Self {
        Histogram2D {
            steps,
            site,
            seed,
            trials: 0,
            counts: BTreeMap::new(),
        }
    }

    /// A histogram from explicit counts; `trials` is their sum.
    pub fn from_counts(
        steps: u32,
        site: i64,
        seed: u64,
        counts: impl IntoIterator<Item = ((i64, u32), u64)>,
    ) -> Self {
        let mut h = Self::empty(steps, site, seed);
        for (cell, c) in counts {
            h.add(cell, c);
        }
        h
    }

    fn add(&mut self, cell: (i64, u32), count: u64) {
        if count > 0 {
            *self.counts.entry(cell).or_insert(0) += count;
            self.trials += count;
        }
    }

    /// Adds another histogram's counts. Order of merging does not matter.
    pub fn merge(&mut self, other: &Histogram2D) {
        for (&cell, &c) in &other.counts {
            self.add(cell, c);
        }
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    pub fn site(&self) -> i64 {
        self.site
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn count(&self, position: i64, visits: u32) -> u64 {
        self.counts.get(&(position, visits)).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, u32, u64)> + '_ {
        self.counts.iter().map(|(&(x, k), &c)| (x, k, c))
    }
}

/// Runs `trials` walks of block `block` of the stream family `seed`.
fn simulate_block(steps: u32, site: i64, seed: u64, block: u64, trials: u64, into: &mut Histogram2D) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    for _ in 0..trials {
        let mut x = 0i64;
        let mut k = 0u32;
        let mut left = steps;
        while left > 0 {
            let mut bits = rng.next_u64();
            let take = left.min(64);
            for _ in 0..take {
                x += if bits & 1 == 1 { 1 } else { -1 };
                bits >>= 1;
                if x == site {
                    k += 1;
                }
            }
            left -= take;
        }
        into.add((x, k), 1);
    }
}

/// Simulates `trials` independent walks of `N` steps on `workers` threads.
pub fn simulate(steps: u32, site: i64, trials: u64, seed: u64, workers: usize) -> Result<Histogram2D> {
    check_site(site)?;
    if trials == 0 {
        return Err(WalkError::NoTrials);
    }
    if workers == 0 {
        return Err(WalkError::NoWorkers);
    }
    let blocks = trials.div_ceil(TRIALS_PER_BLOCK);
    let block_len = |b: u64| TRIALS_PER_BLOCK.min(trials - b * TRIALS_PER_BLOCK);
    let workers = (workers as u64).min(blocks);

    let partials: Vec<Histogram2D> = thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                s.spawn(move || {
                    let mut h = Histogram2D::empty(steps, site, seed);
                    for b in (w..blocks).step_by(workers as usize) {
                        simulate_block(steps, site, seed, b, block_len(b), &mut h);
                    }
                    h
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("simulation worker panicked")).collect()
    });

    let mut total = Histogram2D::empty(steps, site, seed);
    for p in &partials {
        total.merge(p);
    }
    Ok(total)
}

/// Goodness of fit of a histogram to the exact law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GofReport {
    /// `1/2 sum |empirical - exact|`.
    pub tv: f64,
    pub chi_square: f64,
    pub dof: usize,
    /// Upper tail probability of `chi_square` under chi-square(`dof`).
    pub p_value: f64,
}

/// Compares empirical frequencies with the exact table. Cells with expected
/// count below [`MIN_EXPECTED_COUNT`] are pooled with any observed cells the
/// table gives probability zero; a pool still below the threshold is folded
/// into the smallest retained cell.
pub fn gof_compare(h: &Histogram2D, exact: &JointTable) -> Result<GofReport> {
    if h.steps != exact.steps() || h.site != exact.site() {
        return Err(WalkError::ParameterMismatch {
            hist_n: h.steps,
            hist_z: h.site,
            table_n: exact.steps(),
            table_z: exact.site(),
        });
    }
    if h.trials == 0 || h.iter().all(|(x, k, _)| exact.get(x, k).is_zero()) {
        return Err(WalkError::EmptyOverlap);
    }
    let trials = h.trials as f64;

    let mut tv = 0.0;
    // (observed, expected) per retained cell.
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
    for (x, k, p) in exact.iter() {
        let p = p.to_f64();
        let observed = h.count(x, k) as f64;
        tv += (observed / trials - p).abs();
        let expected = p * trials;
        if expected >= MIN_EXPECTED_COUNT {
            cells.push((observed, expected));
        } else {
            pooled_obs += observed;
            pooled_exp += expected;
        }
    }
    for (x, k, c) in h.iter() {
        if exact.get(x, k).is_zero() {
            tv += c as f64 / trials;
            pooled_obs += c as f64;
        }
    }
    if pooled_obs > 0.0 || pooled_exp > 0.0 {
        if pooled_exp >= MIN_EXPECTED_COUNT || cells.is_empty() {
            cells.push((pooled_obs, pooled_exp));
        } else {
            let smallest = cells
                .iter_mut()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("non-empty");
            smallest.0 += pooled_obs;
            smallest.1 += pooled_exp;
        }
    }

    let chi_square: f64 = cells
        .iter()
        .map(|&(o, e)| if e > 0.0 { (o - e) * (o - e) / e } else { f64::INFINITY })
        .sum();
    let dof = cells.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64)
            .map(|d| d.sf(chi_square))
            .unwrap_or(f64::NAN)
    };
    Ok(GofReport {
        tv: 0.5 * tv,
        chi_square,
        dof,
        p_value,
    })
}
