//! Simulated parameter-server rounds: partitioning, broadcast/reduce and a
//! ledger of what would have crossed the network.

use rayon::prelude::*;
use serde::Serialize;

use crate::bregman::shuffled_indices;
use crate::error::{Error, Result};
use crate::problem::SparseDataset;

/// Bytes per transmitted coordinate.
pub const BYTES_PER_COORD: u64 = 8;

/// `m` workers, each owning a contiguous block of a seeded permutation of the rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkerPool {
    seed: u64,
    order: Vec<usize>,
    bounds: Vec<(usize, usize)>,
    parallel: bool,
}

impl WorkerPool {
    pub fn new(n_samples: usize, m: usize, seed: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Input("need at least one worker".into()));
        }
        if m > n_samples {
            return Err(Error::Input(format!("{m} workers but only {n_samples} samples")));
        }
        let order = shuffled_indices(n_samples, seed);
        let (base, extra) = (n_samples / m, n_samples % m);
        let mut bounds = Vec::with_capacity(m);
        let mut start = 0;
        for j in 0..m {
            let len = base + usize::from(j < extra);
            bounds.push((start, start + len));
            start += len;
        }
        Ok(Self {
            seed,
            order,
            bounds,
            parallel: true,
        })
    }

    /// Runs worker tasks one after another instead of on the thread pool.
    pub fn sequential(mut self) -> Self {
        self.parallel = false;
        self
    }

    pub fn m(&self) -> usize {
        self.bounds.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn shard(&self, j: usize) -> &[usize] {
        let (a, b) = self.bounds[j];
        &self.order[a..b]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.bounds.iter().map(|(a, b)| b - a).collect()
    }

    pub fn total(&self) -> usize {
        self.order.len()
    }
}

/// Seed-shuffled, balanced split of a dataset's rows.
pub fn partition(data: &SparseDataset, m: usize, seed: u64) -> Result<WorkerPool> {
    WorkerPool::new(data.len(), m, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RoundCharge {
    pub round: usize,
    pub bytes: u64,
}

/// Running account of communication.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CommLedger {
    pub rounds: usize,
    pub bytes_up: u64,
    pub bytes_down: u64,
    pub per_round: Vec<RoundCharge>,
}

impl CommLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// One broadcast of a `d`-vector to `m` workers and one `d`-vector back from each.
    pub fn charge(&mut self, m: usize, d: usize) {
        let one_way = m as u64 * d as u64 * BYTES_PER_COORD;
        self.rounds += 1;
        self.bytes_down += one_way;
        self.bytes_up += one_way;
        self.per_round.push(RoundCharge {
            round: self.rounds,
            bytes: 2 * one_way,
        });
    }

    pub fn total_bytes(&self) -> u64 {
        self.bytes_up + self.bytes_down
    }
}

/// Sends `point` to every worker, runs `task(worker, point)` on each and
/// returns the results in ascending worker order. Any failure aborts the round
/// without charging it.
pub fn broadcast_gather<T, F>(
    pool: &WorkerPool,
    ledger: &mut CommLedger,
    point: &[f64],
    task: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, &[f64]) -> Result<T> + Sync,
{
    let run = |j: usize| {
        task(j, point).map_err(|e| match e {
            Error::WorkerFailed { .. } => e,
            other => Error::WorkerFailed {
                worker: j,
                msg: other.to_string(),
            },
        })
    };
    let results: Vec<Result<T>> = if pool.parallel {
        (0..pool.m()).into_par_iter().map(run).collect()
    } else {
        (0..pool.m()).map(run).collect()
    };
    let out = results.into_iter().collect::<Result<Vec<T>>>()?;
    ledger.charge(pool.m(), point.len());
    Ok(out)
}

/// [`broadcast_gather`] followed by the plain average of the returned vectors,
/// folded in ascending worker order.
pub fn broadcast_reduce<F>(
    pool: &WorkerPool,
    ledger: &mut CommLedger,
    point: &[f64],
    task: F,
) -> Result<Vec<f64>>
where
    F: Fn(usize, &[f64]) -> Result<Vec<f64>> + Sync,
{
    let parts = broadcast_gather(pool, ledger, point, task)?;
    let d = point.len();
    let mut acc = vec![0.0; d];
    for (j, p) in parts.iter().enumerate() {
        if p.len() != d {
            return Err(Error::WorkerFailed {
                worker: j,
                msg: format!("returned {} coordinates, expected {d}", p.len()),
            });
        }
        for (a, v) in acc.iter_mut().zip(p) {
            *a += v;
        }
    }
    let inv = 1.0 / parts.len() as f64;
    Ok(acc.into_iter().map(|a| a * inv).collect())
}
