use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{ModelSpec, Region};

/// Default burn-in as a fraction of the horizon.
pub const BURN_IN_FRACTION: f64 = 0.2;

/// Time-average tail counts pooled over independent replications.
///
/// Replication `r` draws from `ChaCha8Rng::seed_from_u64(seed)` switched to
/// stream `r`, so streams never overlap and each replication is reproducible
/// on its own.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimResult {
    pub replications: usize,
    pub horizon: u64,
    pub burn_in: u64,
    pub seed: u64,
    /// Stream index of each replication.
    pub streams: Vec<u64>,
    /// `tail_counts[k-1][n]`: post-burn-in steps with `L_k >= n`, summed over replications.
    pub tail_counts: [Vec<u64>; 2],
    pub total_transitions: u64,
}

impl SimResult {
    pub fn counted_steps(&self) -> u64 {
        self.replications as u64 * (self.horizon - self.burn_in)
    }

    /// Empirical `P(L_k >= n)`.
    pub fn tail_probability(&self, k: usize) -> Vec<f64> {
        let total = self.counted_steps() as f64;
        self.tail_counts[k - 1].iter().map(|&c| c as f64 / total).collect()
    }

    /// Largest level whose tail count is at least `min_count`.
    pub fn reliable_level(&self, k: usize, min_count: u64) -> usize {
        self.tail_counts[k - 1]
            .iter()
            .rposition(|&c| c >= min_count)
            .unwrap_or(0)
    }
}

/// Cumulative probabilities and the matching jumps.
type JumpTable = (Vec<f64>, Vec<(i64, i64)>);

struct Sampler {
    tables: [JumpTable; 4],
}

impl Sampler {
    fn new(model: &ModelSpec) -> Sampler {
        let table = |r: Region| {
            let mut acc = 0.0;
            let mut cdf = Vec::new();
            let mut jumps = Vec::new();
            for a in model.kernel(r).atoms() {
                acc += a.p;
                cdf.push(acc);
                jumps.push((a.dx, a.dy));
            }
            (cdf, jumps)
        };
        Sampler {
            tables: [
                table(Region::Interior),
                table(Region::Face1),
                table(Region::Face2),
                table(Region::Origin),
            ],
        }
    }

    #[inline]
    fn step(&self, i: i64, j: i64, u: f64) -> (i64, i64) {
        let r = match (i > 0, j > 0) {
            (true, true) => 0,
            (true, false) => 1,
            (false, true) => 2,
            (false, false) => 3,
        };
        let (cdf, jumps) = &self.tables[r];
        let idx = cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1);
        let (dx, dy) = jumps[idx];
        (i + dx, j + dy)
    }
}

fn add_level(hist: &mut Vec<u64>, level: i64) {
    let l = level as usize;
    if l >= hist.len() {
        hist.resize(l + 1, 0);
    }
    hist[l] += 1;
}

/// Simulates `replications` copies of the walk from the origin for `horizon` steps.
pub fn simulate(model: &ModelSpec, replications: usize, horizon: u64, seed: u64) -> SimResult {
    simulate_with_burn_in(model, replications, horizon, seed, BURN_IN_FRACTION)
}

pub fn simulate_with_burn_in(
    model: &ModelSpec,
    replications: usize,
    horizon: u64,
    seed: u64,
    burn_in_fraction: f64,
) -> SimResult {
    let sampler = Sampler::new(model);
    let burn_in = ((horizon as f64) * burn_in_fraction.clamp(0.0, 1.0)).floor() as u64;
    let streams: Vec<u64> = (0..replications as u64).collect();
    let hists: Vec<[Vec<u64>; 2]> = streams
        .par_iter()
        .map(|&stream| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            let mut h: [Vec<u64>; 2] = [Vec::new(), Vec::new()];
            let (mut i, mut j) = (0i64, 0i64);
            for t in 0..horizon {
                (i, j) = sampler.step(i, j, rng.gen::<f64>());
                if t >= burn_in {
                    add_level(&mut h[0], i);
                    add_level(&mut h[1], j);
                }
            }
            h
        })
        .collect();
    let mut tail_counts: [Vec<u64>; 2] = [Vec::new(), Vec::new()];
    for h in &hists {
        for k in 0..2 {
            if h[k].len() > tail_counts[k].len() {
                tail_counts[k].resize(h[k].len(), 0);
            }
            for (acc, c) in tail_counts[k].iter_mut().zip(&h[k]) {
                *acc += c;
            }
        }
    }
    for counts in &mut tail_counts {
        for n in (0..counts.len().saturating_sub(1)).rev() {
            counts[n] += counts[n + 1];
        }
    }
    SimResult {
        replications,
        horizon,
        burn_in,
        seed,
        streams,
        tail_counts,
        total_transitions: replications as u64 * horizon,
    }
}
