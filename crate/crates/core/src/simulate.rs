//! Seeded Monte Carlo engine: draw without-replacement samples over a
//! grid of (N, k) cells, apply the estimator catalog, and accumulate
//! descriptive statistics.
//!
//! Determinism contract: output is a pure function of
//! [`SimulationConfig`]. Each cell draws from its own ChaCha substream
//! keyed by `(seed, N, k)` through a SplitMix64 mix, so cells can run on
//! any number of threads without changing a digit.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::estimators::estimate;
use crate::model::{EstimatorId, SerialSample};

/// Cap on per-cell raw-estimate retention.
pub const RETENTION_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("infeasible cell: need 1 <= k <= N, got N = {n}, k = {k}")]
    Infeasible { n: u64, k: u64 },
    #[error("{0} must be nonempty")]
    EmptyList(&'static str),
    #[error("reps must be >= 2, got {0}")]
    RepsTooSmall(u64),
    #[error("raw-estimate retention is capped at {limit} reps per cell, got {reps}")]
    RetentionCap { reps: u64, limit: u64 },
}

/// A grid-run request: every (N, k) pair becomes one cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulationConfig {
    pub n_values: Vec<u64>,
    pub k_values: Vec<u64>,
    /// Replications per cell; at least 2 so the sample variance exists.
    pub reps: u64,
    pub seed: u64,
    pub estimators: Vec<EstimatorId>,
}

impl Default for SimulationConfig {
    /// The stock comparison grid: N in {100, 300, 1000} crossed with
    /// k in {5, 15, 30}, 100k replications, seed 42, full catalog.
    fn default() -> Self {
        SimulationConfig {
            n_values: vec![100, 300, 1000],
            k_values: vec![5, 15, 30],
            reps: 100_000,
            seed: 42,
            estimators: EstimatorId::ALL.to_vec(),
        }
    }
}

impl SimulationConfig {
    /// Rejects empty lists, reps < 2, and any (N, k) pair with k > N.
    /// Infeasible pairs are an error, never silently skipped.
    pub fn validate(&self) -> Result<(), SimError> {
        if self.n_values.is_empty() {
            return Err(SimError::EmptyList("N values"));
        }
        if self.k_values.is_empty() {
            return Err(SimError::EmptyList("k values"));
        }
        if self.estimators.is_empty() {
            return Err(SimError::EmptyList("estimators"));
        }
        if self.reps < 2 {
            return Err(SimError::RepsTooSmall(self.reps));
        }
        for &(n, k) in &self.cells() {
            if k == 0 || k > n {
                return Err(SimError::Infeasible { n, k });
            }
        }
        Ok(())
    }

    /// Cells in run order: N ascending, then k ascending, deduplicated.
    pub fn cells(&self) -> Vec<(u64, u64)> {
        let mut ns = self.n_values.clone();
        ns.sort_unstable();
        ns.dedup();
        let mut ks = self.k_values.clone();
        ks.sort_unstable();
        ks.dedup();
        let mut cells = Vec::with_capacity(ns.len() * ks.len());
        for &n in &ns {
            for &k in &ks {
                cells.push((n, k));
            }
        }
        cells
    }
}

/// Empirical descriptive statistics for one estimator in one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryStats {
    pub n: u64,
    pub k: u64,
    pub estimator: EstimatorId,
    pub reps: u64,
    pub mean: f64,
    /// `mean - N`.
    pub bias: f64,
    /// Sample variance, divisor `reps - 1`.
    pub variance: f64,
    /// Mean of `(estimate - N)^2`.
    pub mse: f64,
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

/// Retained per-replication estimates for one (cell, estimator).
#[derive(Debug, Clone, PartialEq)]
pub struct RawEstimates {
    pub n: u64,
    pub k: u64,
    pub estimator: EstimatorId,
    pub values: Vec<f64>,
}

/// One cell's results: stats per estimator in canonical order, plus raw
/// estimates when retention was requested.
#[derive(Debug, Clone, PartialEq)]
pub struct CellOutput {
    pub stats: Vec<SummaryStats>,
    pub raw: Vec<RawEstimates>,
}

/// Whole-grid results, rows ordered N ascending, k ascending, estimator
/// canonical.
#[derive(Debug, Clone, PartialEq)]
pub struct GridOutput {
    pub rows: Vec<SummaryStats>,
    pub raw: Vec<RawEstimates>,
}

fn splitmix_next(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 64-bit substream key for a cell: SplitMix64 steps folding in the run
/// seed, then N, then k.
pub fn substream_seed(seed: u64, n: u64, k: u64) -> u64 {
    let h = splitmix_next(seed);
    let h = splitmix_next(h ^ n);
    splitmix_next(h ^ k)
}

/// Deterministic per-cell random stream (ChaCha12, 256-bit state).
pub fn cell_rng(seed: u64, n: u64, k: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(substream_seed(seed, n, k))
}

/// Draws a uniformly distributed k-subset of `{1..N}` by Floyd's
/// algorithm: k range draws regardless of N, every subset with
/// probability `1/C(N,k)`. Value order is the insertion order, which is
/// deterministic given the stream state.
pub fn draw_sample<R: Rng + ?Sized>(
    n: u64,
    k: u64,
    rng: &mut R,
) -> Result<SerialSample, SimError> {
    if k == 0 || k > n {
        return Err(SimError::Infeasible { n, k });
    }
    let mut values: Vec<u64> = Vec::with_capacity(k as usize);
    for j in (n - k + 1)..=n {
        let t = rng.gen_range(1..=j);
        if values.contains(&t) {
            values.push(j);
        } else {
            values.push(t);
        }
    }
    Ok(SerialSample::new(values).expect("Floyd's algorithm yields distinct positive labels"))
}

/// Empirical quantile on a sorted slice: linear interpolation at
/// `h = p * (len - 1)`.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 < sorted.len() {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    } else {
        sorted[lo]
    }
}

fn summarize(n: u64, k: u64, estimator: EstimatorId, values: &[f64]) -> SummaryStats {
    let reps = values.len() as u64;
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let variance =
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (values.len() - 1) as f64;
    let mse = values.iter().map(|v| (v - nf) * (v - nf)).sum::<f64>() / values.len() as f64;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    SummaryStats {
        n,
        k,
        estimator,
        reps,
        mean,
        bias: mean - nf,
        variance,
        mse,
        min: sorted[0],
        q25: quantile(&sorted, 0.25),
        median: quantile(&sorted, 0.5),
        q75: quantile(&sorted, 0.75),
        max: sorted[sorted.len() - 1],
    }
}

/// Runs one (N, k) cell: `reps` draws from the cell substream, every
/// requested estimator applied to each draw. The stream depends only on
/// `(seed, N, k)`, so adding or removing estimators does not change the
/// samples drawn.
pub fn run_cell(
    n: u64,
    k: u64,
    reps: u64,
    estimators: &[EstimatorId],
    seed: u64,
    retain_raw: bool,
) -> Result<CellOutput, SimError> {
    if k == 0 || k > n {
        return Err(SimError::Infeasible { n, k });
    }
    if reps < 2 {
        return Err(SimError::RepsTooSmall(reps));
    }
    if estimators.is_empty() {
        return Err(SimError::EmptyList("estimators"));
    }
    if retain_raw && reps > RETENTION_LIMIT {
        return Err(SimError::RetentionCap {
            reps,
            limit: RETENTION_LIMIT,
        });
    }

    let mut ids = estimators.to_vec();
    ids.sort();
    ids.dedup();

    let mut rng = cell_rng(seed, n, k);
    let mut estimates: Vec<Vec<f64>> = vec![Vec::with_capacity(reps as usize); ids.len()];
    for _ in 0..reps {
        let sample = draw_sample(n, k, &mut rng)?;
        for (slot, &id) in estimates.iter_mut().zip(ids.iter()) {
            slot.push(estimate(id, &sample));
        }
    }

    let stats = ids
        .iter()
        .zip(&estimates)
        .map(|(&id, vals)| summarize(n, k, id, vals))
        .collect();
    let raw = if retain_raw {
        ids.iter()
            .zip(estimates)
            .map(|(&id, values)| RawEstimates {
                n,
                k,
                estimator: id,
                values,
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(CellOutput { stats, raw })
}

/// Runs every cell of the grid. Cells execute in parallel; because each
/// cell has its own substream and results are assembled in cell order,
/// the output is identical for any thread count.
pub fn run_grid(config: &SimulationConfig, retain_raw: bool) -> Result<GridOutput, SimError> {
    run_grid_with(config, retain_raw, &|_, _| {})
}

/// [`run_grid`] with a completion callback per cell (called from worker
/// threads; used by the CLI for progress lines).
pub fn run_grid_with(
    config: &SimulationConfig,
    retain_raw: bool,
    on_cell_done: &(dyn Fn(u64, u64) + Sync),
) -> Result<GridOutput, SimError> {
    config.validate()?;
    let cells = config.cells();
    let outputs: Result<Vec<CellOutput>, SimError> = cells
        .par_iter()
        .map(|&(n, k)| {
            let out = run_cell(n, k, config.reps, &config.estimators, config.seed, retain_raw)?;
            on_cell_done(n, k);
            Ok(out)
        })
        .collect();
    let mut rows = Vec::new();
    let mut raw = Vec::new();
    for cell in outputs? {
        rows.extend(cell.stats);
        raw.extend(cell.raw);
    }
    Ok(GridOutput { rows, raw })
}
