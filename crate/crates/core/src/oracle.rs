//! Ancestral forward sampler used as a stochastic cross-check of the exact
//! engine.
//!
//! Draws are split into fixed-size shards. Shard `k` uses a ChaCha20
//! generator seeded from the run seed on stream `k`, so counts do not
//! depend on how shards are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::exact::JointTable;
use crate::scm::{cell_count, NodeAssignment, StructuralParams};

/// Identifier of the generator, recorded in reports.
pub const RNG_ALGORITHM: &str = "chacha20/seed_from_u64/stream-per-shard";

/// Draws per shard.
pub const SHARD_SIZE: u64 = 1 << 16;

/// Cells whose standardized residual exceeds this are flagged.
pub const Z_THRESHOLD: f64 = 5.0;

/// Occurrence counts of every joint assignment in one sampling run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleBatch {
    pub n: u64,
    pub seed: u64,
    /// Fixed exposure level, when sampled under `do(X = level)`.
    pub intervention: Option<usize>,
    n_levels: usize,
    counts: Vec<u64>,
}

impl SampleBatch {
    pub fn n_levels(&self) -> usize {
        self.n_levels
    }

    pub fn count(&self, assignment: &NodeAssignment) -> u64 {
        self.counts[assignment.index(self.n_levels)]
    }

    /// `(assignment, count)` for every cell, in index order.
    pub fn counts(&self) -> impl Iterator<Item = (NodeAssignment, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &c)| (NodeAssignment::from_index(i, self.n_levels), c))
    }

    /// Empirical frequency of `event`.
    pub fn frequency(&self, event: impl Fn(&NodeAssignment) -> bool) -> f64 {
        let hits: u64 = self
            .counts()
            .filter(|(a, _)| event(a))
            .map(|(_, c)| c)
            .sum();
        hits as f64 / self.n as f64
    }
}

/// Conditional probabilities tabulated once per run.
struct Equations {
    p_w: f64,
    cum_x: Vec<f64>,
    p_v: Vec<[f64; 2]>,
    p_f: Vec<[[f64; 2]; 2]>,
    p_a: [[[f64; 2]; 2]; 2],
}

impl Equations {
    fn new(params: &StructuralParams) -> Self {
        let n = params.n_levels();
        let mut acc = 0.0;
        let cum_x = params
            .p_x
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        let b = [false, true];
        Equations {
            p_w: params.p_w,
            cum_x,
            p_v: (0..n).map(|x| b.map(|w| params.p_v(x, w))).collect(),
            p_f: (0..n)
                .map(|x| b.map(|v| b.map(|w| params.p_f(x, v, w))))
                .collect(),
            p_a: b.map(|f| b.map(|v| b.map(|w| params.p_a(f, v, w)))),
        }
    }

    fn draw_level(&self, u: f64) -> usize {
        // the last level absorbs any rounding shortfall in the cumulative sum
        self.cum_x
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.cum_x.len() - 1)
    }
}

fn run_shard(
    eq: &Equations,
    rng: &mut ChaCha20Rng,
    draws: u64,
    fixed: Option<usize>,
    counts: &mut [u64],
) {
    let n_levels = eq.cum_x.len();
    for _ in 0..draws {
        let w = rng.gen::<f64>() < eq.p_w;
        let x = match fixed {
            Some(level) => level,
            None => eq.draw_level(rng.gen::<f64>()),
        };
        let wi = usize::from(w);
        let v = rng.gen::<f64>() < eq.p_v[x][wi];
        let vi = usize::from(v);
        let f = rng.gen::<f64>() < eq.p_f[x][vi][wi];
        let a = rng.gen::<f64>() < eq.p_a[usize::from(f)][vi][wi];
        counts[NodeAssignment { w, x, v, f, a }.index(n_levels)] += 1;
    }
}

/// Draws `n` joint samples, optionally under `do(X = intervention)`.
/// Deterministic in `(params, n, seed, intervention)`.
pub fn sample(
    params: &StructuralParams,
    n: u64,
    seed: u64,
    intervention: Option<usize>,
) -> Result<SampleBatch> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    params.validate()?;
    if let Some(level) = intervention {
        params.check_level(level)?;
    }
    let eq = Equations::new(params);
    let n_levels = params.n_levels();
    let mut counts = vec![0u64; cell_count(n_levels)];
    let shards = n.div_ceil(SHARD_SIZE);
    for shard in 0..shards {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(shard);
        let draws = SHARD_SIZE.min(n - shard * SHARD_SIZE);
        run_shard(&eq, &mut rng, draws, intervention, &mut counts);
    }
    Ok(SampleBatch {
        n,
        seed,
        intervention,
        n_levels,
        counts,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellCheck {
    pub assignment: NodeAssignment,
    pub expected: f64,
    pub observed: u64,
    pub z: f64,
}

/// Per-cell binomial z-scores of a batch against an exact table.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub n: u64,
    pub seed: u64,
    pub rng: &'static str,
    pub cells: Vec<CellCheck>,
}

impl ComparisonReport {
    pub fn max_abs_z(&self) -> f64 {
        self.cells.iter().map(|c| c.z.abs()).fold(0.0, f64::max)
    }

    pub fn flagged(&self) -> impl Iterator<Item = &CellCheck> {
        self.cells.iter().filter(|c| c.z.abs() > Z_THRESHOLD)
    }

    pub fn passed(&self) -> bool {
        self.flagged().next().is_none()
    }
}

/// Standardized residual `(k - n p) / sqrt(n p (1 - p))`.
pub fn binomial_z(observed: u64, n: u64, p: f64) -> f64 {
    let n = n as f64;
    let expected = n * p;
    let sd = (n * p * (1.0 - p)).sqrt();
    let diff = observed as f64 - expected;
    if sd > 0.0 {
        diff / sd
    } else if diff == 0.0 {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    }
}

/// Compares every cell of `batch` with `table`.
pub fn compare(batch: &SampleBatch, table: &JointTable) -> Result<ComparisonReport> {
    if batch.n_levels != table.n_levels() {
        return Err(Error::InvalidParams(format!(
            "batch has {} exposure levels, table has {}",
            batch.n_levels,
            table.n_levels()
        )));
    }
    if batch.intervention != table.intervention() {
        return Err(Error::InvalidParams(
            "batch and table were generated under different interventions".into(),
        ));
    }
    let cells = table
        .cells()
        .iter()
        .map(|&(assignment, expected)| {
            let observed = batch.count(&assignment);
            CellCheck {
                assignment,
                expected,
                observed,
                z: binomial_z(observed, batch.n, expected),
            }
        })
        .collect();
    Ok(ComparisonReport {
        n: batch.n,
        seed: batch.seed,
        rng: RNG_ALGORITHM,
        cells,
    })
}
