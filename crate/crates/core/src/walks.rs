//! Transition matrices and hitting times.
//!
//! Transition matrices are column-stochastic: entry `(i, j)` is the
//! probability of stepping from `j` to `i`, i.e. `a_ij / Σ_l a_lj`. The
//! hitting-time vector of a substochastic `M` is `𝟙ᵀ (I − M)⁻¹`, and the
//! expected time to reach `v` from `u` is entry `u` of that vector for the
//! transition matrix with row and column `v` removed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::numerics::{self, Lu, Matrix, PerronData};

/// Walks longer than this abort the simulation.
pub const WALK_STEP_LIMIT: u64 = 1_000_000_000;
/// Monte Carlo work is split into this many independently seeded batches,
/// regardless of the thread count, so results do not depend on scheduling.
pub const MC_BATCHES: u64 = 64;
pub const MC_RNG: &str = "chacha8";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkKind {
    Simple,
    Merw,
}

impl WalkKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            WalkKind::Simple => "simple",
            WalkKind::Merw => "merw",
        }
    }
}

impl std::str::FromStr for WalkKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simple" => Ok(WalkKind::Simple),
            "merw" => Ok(WalkKind::Merw),
            _ => Err(Error::BadParams(format!("unknown walk `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Full,
    Quotient,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    matrix: Matrix,
    kind: WalkKind,
}

impl TransitionMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn kind(&self) -> WalkKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    /// Probability of stepping from `from` to `to`.
    pub fn prob(&self, to: usize, from: usize) -> f64 {
        self.matrix[(to, from)]
    }

    /// Largest deviation of a column sum from 1.
    pub fn stochasticity_error(&self) -> f64 {
        self.matrix
            .column_sums()
            .iter()
            .fold(0.0, |m, s| m.max((s - 1.0).abs()))
    }
}

/// `T(M)`: divides each column by its sum.
pub fn normalize_columns(m: &Matrix) -> Result<Matrix> {
    let sums = m.column_sums();
    if let Some(j) = sums.iter().position(|&s| !(s > 0.0)) {
        return Err(Error::InvalidGraph(format!("column {j} has no outgoing weight")));
    }
    Ok(Matrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)] / sums[j]))
}

pub fn transition_simple(g: &Graph) -> Result<TransitionMatrix> {
    Ok(TransitionMatrix {
        matrix: normalize_columns(g.adjacency())?,
        kind: WalkKind::Simple,
    })
}

/// `T(D_ν A)`.
pub fn transition_merw(g: &Graph, p: &PerronData) -> Result<TransitionMatrix> {
    if p.nu.len() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            found: p.nu.len(),
        });
    }
    let a = g.adjacency();
    let weighted = Matrix::from_fn(a.rows(), a.cols(), |i, j| p.nu[i] * a[(i, j)]);
    Ok(TransitionMatrix {
        matrix: normalize_columns(&weighted)?,
        kind: WalkKind::Merw,
    })
}

pub fn transition(g: &Graph, kind: WalkKind) -> Result<TransitionMatrix> {
    match kind {
        WalkKind::Simple => transition_simple(g),
        WalkKind::Merw => transition_merw(g, &numerics::perron(g)?),
    }
}

/// `−𝟙ᵀ(M − I)⁻¹`: the column sums of `(I − M)⁻¹`, obtained from one
/// factorization of `(I − M)ᵀ`.
pub fn hitting_vector(m: &Matrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    let n = m.rows();
    let system = Matrix::from_fn(n, n, |i, j| f64::from(u8::from(i == j)) - m[(j, i)]);
    let lu = Lu::factor(&system)?;
    Ok(lu.solve(&vec![1.0; n]))
}

/// Expected hitting times to `target` from every vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingReport {
    pub target: usize,
    pub method: Method,
    pub walk: WalkKind,
    pub times: Vec<f64>,
    /// Largest first-step equation residual over the non-target vertices.
    pub residual: f64,
}

/// Inserts a zero at `target` into a vector indexed by the other vertices.
pub(crate) fn reinsert_target(reduced: Vec<f64>, target: usize) -> Vec<f64> {
    let mut times = reduced;
    times.insert(target, 0.0);
    times
}

/// `max_u |h_u − 1 − Σ_x T[x,u]·h_x|` over `u ≠ target`, with `h_target = 0`.
pub fn first_step_residual(t: &Matrix, target: usize, times: &[f64]) -> f64 {
    let n = t.rows();
    (0..n)
        .filter(|&u| u != target)
        .map(|u| {
            let expected: f64 = 1.0
                + (0..n)
                    .filter(|&x| x != target)
                    .map(|x| t[(x, u)] * times[x])
                    .sum::<f64>();
            (times[u] - expected).abs()
        })
        .fold(0.0, f64::max)
}

pub fn hit_with(t: &TransitionMatrix, target: usize) -> Result<HittingReport> {
    let n = t.n();
    if target >= n {
        return Err(Error::IndexOutOfRange { index: target, n });
    }
    let times = if n == 1 {
        vec![0.0]
    } else {
        reinsert_target(hitting_vector(&t.matrix.without(target))?, target)
    };
    let residual = first_step_residual(&t.matrix, target, &times);
    Ok(HittingReport {
        target,
        method: Method::Full,
        walk: t.kind,
        times,
        residual,
    })
}

/// Hitting times to `target` by a direct solve on the whole chain.
pub fn hit_full(g: &Graph, target: usize, kind: WalkKind) -> Result<HittingReport> {
    g.check_vertex(target)?;
    hit_with(&transition(g, kind)?, target)
}

/// All-pairs hitting matrix: entry `(v, u)` is the time from `u` to `v`.
pub fn hitting_matrix(t: &TransitionMatrix) -> Result<Matrix> {
    let n = t.n();
    let rows = (0..n)
        .into_par_iter()
        .map(|v| hit_with(t, v).map(|r| r.times))
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(&rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub target: usize,
    pub source: usize,
    pub walk: WalkKind,
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
    pub rng: String,
}

/// Cumulative distributions of each column, for inverse-CDF sampling.
struct Sampler {
    cumulative: Vec<Vec<(f64, usize)>>,
}

impl Sampler {
    fn new(t: &Matrix) -> Self {
        let n = t.rows();
        let cumulative = (0..n)
            .map(|j| {
                let mut acc = 0.0;
                (0..n)
                    .filter(|&i| t[(i, j)] > 0.0)
                    .map(|i| {
                        acc += t[(i, j)];
                        (acc, i)
                    })
                    .collect()
            })
            .collect();
        Sampler { cumulative }
    }

    fn step(&self, from: usize, rng: &mut ChaCha8Rng) -> usize {
        let col = &self.cumulative[from];
        let total = col.last().map_or(1.0, |c| c.0);
        let r = rng.random::<f64>() * total;
        let k = col.partition_point(|&(c, _)| c <= r);
        col[k.min(col.len() - 1)].1
    }
}

fn walk_length(sampler: &Sampler, source: usize, target: usize, rng: &mut ChaCha8Rng) -> Result<u64> {
    let mut at = source;
    let mut steps = 0u64;
    while at != target {
        if steps >= WALK_STEP_LIMIT {
            return Err(Error::WalkLimitExceeded {
                limit: WALK_STEP_LIMIT,
            });
        }
        at = sampler.step(at, rng);
        steps += 1;
    }
    Ok(steps)
}

/// Estimates the hitting time from `source` to `target` by simulation.
///
/// The samples are split into [`MC_BATCHES`] batches; batch `b` draws from
/// ChaCha8 seeded with `seed` on stream `b`, so a given seed reproduces the
/// estimate exactly.
pub fn hit_monte_carlo_with(
    t: &TransitionMatrix,
    target: usize,
    source: usize,
    samples: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    let n = t.n();
    for x in [target, source] {
        if x >= n {
            return Err(Error::IndexOutOfRange { index: x, n });
        }
    }
    if samples == 0 {
        return Err(Error::BadParams("samples must be at least 1".into()));
    }
    let sampler = Sampler::new(&t.matrix);
    let batches = MC_BATCHES.min(samples);
    let partials = (0..batches)
        .into_par_iter()
        .map(|b| {
            let count = samples / batches + u64::from(b < samples % batches);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let mut sum = 0.0f64;
            let mut sum_sq = 0.0f64;
            for _ in 0..count {
                let len = walk_length(&sampler, source, target, &mut rng)? as f64;
                sum += len;
                sum_sq += len * len;
            }
            Ok((sum, sum_sq))
        })
        .collect::<Result<Vec<_>>>()?;
    let (sum, sum_sq) = partials
        .iter()
        .fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let count = samples as f64;
    let mean = sum / count;
    let stderr = if samples > 1 {
        let var = ((sum_sq - count * mean * mean) / (count - 1.0)).max(0.0);
        (var / count).sqrt()
    } else {
        0.0
    };
    Ok(MonteCarloEstimate {
        target,
        source,
        walk: t.kind,
        mean,
        stderr,
        samples,
        seed,
        rng: MC_RNG.to_string(),
    })
}

pub fn hit_monte_carlo(
    g: &Graph,
    target: usize,
    source: usize,
    kind: WalkKind,
    samples: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    g.check_vertex(target)?;
    g.check_vertex(source)?;
    hit_monte_carlo_with(&transition(g, kind)?, target, source, samples, seed)
}
