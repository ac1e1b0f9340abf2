use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::density::PointDensity;
use crate::error::{Error, Result};
use crate::kernel::{StepLog, Transition};
use crate::point::JointPoint;

pub type ChainRng = ChaCha8Rng;

/// Stream `stream` of the counter-based generator keyed by `seed`; chain i
/// of a run uses stream i.
pub fn chain_rng(seed: u64, stream: u64) -> ChainRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Acceptance statistics of one leaf kernel across a run.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelStats {
    pub count: usize,
    pub accepted: usize,
    pub min_prob: f64,
    pub sum_prob: f64,
}

impl Default for KernelStats {
    fn default() -> Self {
        Self { count: 0, accepted: 0, min_prob: f64::INFINITY, sum_prob: 0.0 }
    }
}

impl KernelStats {
    pub fn mean_prob(&self) -> f64 {
        self.sum_prob / self.count as f64
    }
}

#[derive(Clone, Debug, Default)]
pub struct ChainTrace {
    /// Target block after each step; auxiliaries are dropped.
    pub x: Vec<Vec<f64>>,
    pub tags: Vec<Vec<i64>>,
    /// True when every leaf kernel of the step accepted.
    pub accepted: Vec<bool>,
    /// Per-leaf statistics, indexed by position within a step.
    pub kernels: Vec<KernelStats>,
    /// Wall time of the sampling loop.
    pub elapsed: Duration,
}

impl ChainTrace {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        self.x.iter().map(|r| r[i]).collect()
    }
}

/// Runs `n` steps from `init` on stream 0 of `seed`.
pub fn run_chain(
    t: &dyn Transition,
    target: &dyn PointDensity,
    init: &JointPoint,
    n: usize,
    seed: u64,
) -> Result<ChainTrace> {
    run_chain_stream(t, target, init, n, seed, 0)
}

pub fn run_chain_stream(
    t: &dyn Transition,
    target: &dyn PointDensity,
    init: &JointPoint,
    n: usize,
    seed: u64,
    stream: u64,
) -> Result<ChainTrace> {
    let lp = target.log_density(init);
    if !lp.is_finite() {
        return Err(Error::InvalidDensity(format!("initial log-density is {lp}")));
    }
    let mut rng = chain_rng(seed, stream);
    let mut z = init.clone();
    let mut log = StepLog::default();
    let mut trace = ChainTrace {
        x: Vec::with_capacity(n),
        tags: Vec::with_capacity(n),
        accepted: Vec::with_capacity(n),
        ..Default::default()
    };
    let start = Instant::now();
    for _ in 0..n {
        log.clear();
        t.step(&mut z, &mut rng, &mut log)?;
        if trace.kernels.len() < log.entries.len() {
            trace.kernels.resize(log.entries.len(), KernelStats::default());
        }
        for (s, a) in trace.kernels.iter_mut().zip(&log.entries) {
            s.count += 1;
            s.accepted += a.accepted as usize;
            s.min_prob = s.min_prob.min(a.prob);
            s.sum_prob += a.prob;
        }
        trace.accepted.push(log.all_accepted());
        trace.x.push(z.x.clone());
        trace.tags.push(z.tags.clone());
    }
    trace.elapsed = start.elapsed();
    Ok(trace)
}

/// Independent chains, chain i on stream i, one after another.
pub fn run_chains_sequential(
    t: &dyn Transition,
    target: &dyn PointDensity,
    inits: &[JointPoint],
    n: usize,
    seed: u64,
) -> Result<Vec<ChainTrace>> {
    inits
        .iter()
        .enumerate()
        .map(|(i, z)| run_chain_stream(t, target, z, n, seed, i as u64))
        .collect()
}

/// Independent chains spread over at most `jobs` threads (all cores when
/// `None`). Results are ordered by chain index and identical to the
/// sequential run.
#[cfg(feature = "parallel")]
pub fn run_chains(
    t: &dyn Transition,
    target: &dyn PointDensity,
    inits: &[JointPoint],
    n: usize,
    seed: u64,
    jobs: Option<usize>,
) -> Result<Vec<ChainTrace>> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| {
        inits
            .par_iter()
            .enumerate()
            .map(|(i, z)| run_chain_stream(t, target, z, n, seed, i as u64))
            .collect()
    })
}

#[cfg(not(feature = "parallel"))]
pub fn run_chains(
    t: &dyn Transition,
    target: &dyn PointDensity,
    inits: &[JointPoint],
    n: usize,
    seed: u64,
    _jobs: Option<usize>,
) -> Result<Vec<ChainTrace>> {
    run_chains_sequential(t, target, inits, n, seed)
}
