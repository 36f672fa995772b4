//! Equitable and weight-equitable partitions, their quotient matrices, and
//! hitting times read off the quotient.
//!
//! Quotient matrices use the column convention: for `u` in block `j`, entry
//! `(i, j)` counts the neighbours of `u` inside block `i` (or, for the weight
//! kind, sums `ν_v / ν_u` over those neighbours). With this layout `T(Q)` is
//! the block-level transition matrix and the hitting time from block `i` to
//! the centre block is `H(T(Q)₋₀)ᵢ`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::numerics::{self, Matrix, PerronData};
use crate::walks::{
    self, first_step_residual, hitting_vector, normalize_columns, HittingReport, Method, WalkKind,
};

/// Relative tolerance for comparing weight-intersection numbers.
pub const WEIGHT_TOLERANCE: f64 = 1e-9;

pub(crate) fn approx_eq(x: f64, y: f64, tol: f64) -> bool {
    x == y || (x - y).abs() <= tol * x.abs().max(y.abs())
}

/// Ordered blocks covering `0..n`. Block order is significant: quotient
/// matrices are indexed by it, and a centred partition keeps its centre as
/// the singleton block 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    #[serde(skip_serializing_if = "Option::is_none")]
    center: Option<usize>,
    blocks: Vec<Vec<usize>>,
    #[serde(skip)]
    n: usize,
}

impl Partition {
    /// Validates and normalizes `blocks`: empty blocks are dropped and each
    /// block is sorted.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Partition> {
        let mut seen = vec![false; n];
        let mut out = Vec::with_capacity(blocks.len());
        for mut block in blocks {
            if block.is_empty() {
                continue;
            }
            block.sort_unstable();
            for &v in &block {
                if v >= n {
                    return Err(Error::IndexOutOfRange { index: v, n });
                }
                if std::mem::replace(&mut seen[v], true) {
                    return Err(Error::InvalidPartition(format!("vertex {v} appears twice")));
                }
            }
            out.push(block);
        }
        if let Some(v) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidPartition(format!("vertex {v} is not covered")));
        }
        Ok(Partition {
            center: None,
            blocks: out,
            n,
        })
    }

    /// A partition whose first block is the singleton `{center}`.
    pub fn centered(n: usize, blocks: Vec<Vec<usize>>) -> Result<Partition> {
        let mut p = Partition::new(n, blocks)?;
        match p.blocks.first().map(Vec::as_slice) {
            Some(&[o]) => {
                p.center = Some(o);
                Ok(p)
            }
            _ => Err(Error::InvalidPartition(
                "first block of a centred partition must be a singleton".into(),
            )),
        }
    }

    pub fn singletons(n: usize) -> Partition {
        Partition {
            center: None,
            blocks: (0..n).map(|v| vec![v]).collect(),
            n,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn center(&self) -> Option<usize> {
        self.center
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    /// `result[v]` is the index of the block containing `v`.
    pub fn block_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for (i, block) in self.blocks.iter().enumerate() {
            for &v in block {
                out[v] = i;
            }
        }
        out
    }

    /// Spreads per-block values onto vertices.
    pub fn lift(&self, per_block: &[f64]) -> Vec<f64> {
        let block_of = self.block_of();
        block_of.iter().map(|&b| per_block[b]).collect()
    }

    pub fn from_json(text: &str, n: usize) -> Result<Partition> {
        #[derive(Deserialize)]
        struct Doc {
            center: Option<usize>,
            blocks: Vec<Vec<usize>>,
        }
        let doc: Doc = serde_json::from_str(text)?;
        Partition::from_parts(n, doc.center, doc.blocks)
    }

    pub fn from_parts(n: usize, center: Option<usize>, blocks: Vec<Vec<usize>>) -> Result<Partition> {
        match center {
            None => Partition::new(n, blocks),
            Some(o) => {
                let p = Partition::centered(n, blocks)?;
                if p.center == Some(o) {
                    Ok(p)
                } else {
                    Err(Error::InvalidPartition(format!(
                        "centre {o} is not the first block"
                    )))
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuotientKind {
    Equitable,
    Weight,
}

impl std::str::FromStr for QuotientKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equitable" => Ok(QuotientKind::Equitable),
            "weight" => Ok(QuotientKind::Weight),
            _ => Err(Error::BadParams(format!("unknown partition kind `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientMatrix {
    pub kind: QuotientKind,
    pub matrix: Matrix,
    pub block_sizes: Vec<usize>,
    /// Per-block Perron entries, when ν is constant on every block.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu_block: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda1: Option<f64>,
}

impl QuotientMatrix {
    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    /// `T(Q)`, the transition matrix of the simple walk on the quotient graph.
    pub fn transition(&self) -> Result<Matrix> {
        normalize_columns(&self.matrix)
    }

    /// Quotient graph as a directed weighted [`Graph`].
    pub fn graph(&self) -> Result<Graph> {
        Graph::from_adjacency(self.matrix.clone(), true)
    }
}

/// Two vertices of block `column_block` whose (weight-)counts into block
/// `block` differ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub block: usize,
    pub column_block: usize,
    pub u: usize,
    pub v: usize,
    pub value_u: f64,
    pub value_v: f64,
}

/// `counts[(i, u)]`: weight of `u`'s neighbours inside block `i`, optionally
/// scaled by `ν_v / ν_u`.
fn block_counts(g: &Graph, block_of: &[usize], m: usize, nu: Option<&[f64]>) -> Matrix {
    let n = g.n();
    let a = g.adjacency();
    let mut counts = Matrix::zeros(m, n);
    for u in 0..n {
        for v in 0..n {
            let w = a[(v, u)];
            if w == 0.0 {
                continue;
            }
            counts[(block_of[v], u)] += match nu {
                Some(nu) => w * nu[v],
                None => w,
            };
        }
        if let Some(nu) = nu {
            for i in 0..m {
                counts[(i, u)] /= nu[u];
            }
        }
    }
    counts
}

fn check_constant(
    p: &Partition,
    counts: &Matrix,
    same: impl Fn(f64, f64) -> bool,
) -> std::result::Result<Matrix, Witness> {
    let m = p.len();
    let mut q = Matrix::zeros(m, m);
    for (j, block) in p.blocks().iter().enumerate() {
        let r = block[0];
        for i in 0..m {
            q[(i, j)] = counts[(i, r)];
        }
        for &u in &block[1..] {
            for i in 0..m {
                if !same(counts[(i, u)], counts[(i, r)]) {
                    return Err(Witness {
                        block: i,
                        column_block: j,
                        u: r,
                        v: u,
                        value_u: counts[(i, r)],
                        value_v: counts[(i, u)],
                    });
                }
            }
        }
    }
    Ok(q)
}

/// Per-block ν values if ν is constant on every block.
pub fn block_nu(p: &Partition, perron: &PerronData) -> Option<Vec<f64>> {
    p.blocks()
        .iter()
        .map(|block| {
            let x = perron.nu[block[0]];
            block
                .iter()
                .all(|&v| approx_eq(perron.nu[v], x, WEIGHT_TOLERANCE))
                .then_some(x)
        })
        .collect()
}

/// Verifies that `p` is equitable and returns its integer quotient matrix.
///
/// # Panics
///
/// If `p` is not a partition of `g`'s vertex set.
pub fn check_equitable(g: &Graph, p: &Partition) -> std::result::Result<QuotientMatrix, Witness> {
    assert_eq!(p.n(), g.n(), "partition and graph sizes differ");
    let counts = block_counts(g, &p.block_of(), p.len(), None);
    let matrix = check_constant(p, &counts, |a, b| a == b)?;
    Ok(QuotientMatrix {
        kind: QuotientKind::Equitable,
        matrix,
        block_sizes: p.block_sizes(),
        nu_block: None,
        lambda1: None,
    })
}

/// Same as [`check_equitable`], additionally recording per-block ν.
pub fn check_equitable_with_nu(
    g: &Graph,
    p: &Partition,
    perron: &PerronData,
) -> std::result::Result<QuotientMatrix, Witness> {
    let mut q = check_equitable(g, p)?;
    q.nu_block = block_nu(p, perron);
    q.lambda1 = Some(perron.lambda1);
    Ok(q)
}

/// Verifies that `p` is weight-equitable and returns `B*`, whose columns sum
/// to `λ₁`.
///
/// # Panics
///
/// If `p` is not a partition of `g`'s vertex set.
pub fn check_weight_equitable(
    g: &Graph,
    p: &Partition,
    perron: &PerronData,
) -> std::result::Result<QuotientMatrix, Witness> {
    assert_eq!(p.n(), g.n(), "partition and graph sizes differ");
    let counts = block_counts(g, &p.block_of(), p.len(), Some(&perron.nu));
    let matrix = check_constant(p, &counts, |a, b| approx_eq(a, b, WEIGHT_TOLERANCE))?;
    Ok(QuotientMatrix {
        kind: QuotientKind::Weight,
        matrix,
        block_sizes: p.block_sizes(),
        nu_block: block_nu(p, perron),
        lambda1: Some(perron.lambda1),
    })
}

pub fn check(
    g: &Graph,
    p: &Partition,
    kind: QuotientKind,
    perron: &PerronData,
) -> std::result::Result<QuotientMatrix, Witness> {
    match kind {
        QuotientKind::Equitable => check_equitable_with_nu(g, p, perron),
        QuotientKind::Weight => check_weight_equitable(g, p, perron),
    }
}

/// `D_ν B D_ν⁻¹` for an equitable quotient whose blocks carry constant ν:
/// entry `(i, j)` is `(ν_i / ν_j)·b_ij`.
pub fn weight_from_equitable(b: &Matrix, nu_block: &[f64]) -> Matrix {
    Matrix::from_fn(b.rows(), b.cols(), |i, j| nu_block[i] / nu_block[j] * b[(i, j)])
}

/// Lexicographic order that treats coordinates within tolerance as equal.
fn cmp_signature(a: &[f64], b: &[f64], tol: f64) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if !approx_eq(*x, *y, tol) {
            return x.total_cmp(y);
        }
    }
    a.len().cmp(&b.len())
}

struct Cell {
    members: Vec<usize>,
    distance: usize,
    round: usize,
    signature: Vec<f64>,
}

impl Cell {
    fn cmp_key(&self, other: &Cell, tol: f64) -> Ordering {
        self.distance
            .cmp(&other.distance)
            .then(self.round.cmp(&other.round))
            .then_with(|| cmp_signature(&self.signature, &other.signature, tol))
            .then(self.members[0].cmp(&other.members[0]))
    }
}

/// Coarsest (weight-)equitable partition refining `{{o}, V∖{o}}`.
///
/// Blocks are split by their (weight-)count signature into the current
/// blocks until nothing splits. Block order is canonical: by distance from
/// `o`, then the round in which the block was created, then its signature
/// (parent block first), then its smallest vertex. The order does not depend
/// on vertex labels, so isomorphic centred graphs get identical quotients.
pub fn coarsest_stabilized(
    g: &Graph,
    o: usize,
    kind: QuotientKind,
    perron: Option<&PerronData>,
) -> Result<Partition> {
    g.check_vertex(o)?;
    let n = g.n();
    let owned;
    let nu = match kind {
        QuotientKind::Equitable => None,
        QuotientKind::Weight => Some(match perron {
            Some(p) => p.nu.as_slice(),
            None => {
                owned = numerics::perron(g)?;
                owned.nu.as_slice()
            }
        }),
    };
    let tol = match kind {
        QuotientKind::Equitable => 0.0,
        QuotientKind::Weight => WEIGHT_TOLERANCE,
    };
    let dist: Vec<usize> = g
        .distances_from(o)
        .into_iter()
        .map(|d| d.unwrap_or(usize::MAX))
        .collect();
    let min_dist = |members: &[usize]| members.iter().map(|&v| dist[v]).min().unwrap_or(0);

    let rest: Vec<usize> = (0..n).filter(|&v| v != o).collect();
    let mut cells = vec![Cell {
        members: vec![o],
        distance: 0,
        round: 0,
        signature: vec![0.0],
    }];
    if !rest.is_empty() {
        cells.push(Cell {
            distance: min_dist(&rest),
            members: rest,
            round: 0,
            signature: vec![1.0],
        });
    }

    for round in 1.. {
        let mut block_of = vec![0; n];
        for (i, c) in cells.iter().enumerate() {
            for &v in &c.members {
                block_of[v] = i;
            }
        }
        let m = cells.len();
        let counts = block_counts(g, &block_of, m, nu);
        let signature = |u: usize| -> Vec<f64> { (0..m).map(|i| counts[(i, u)]).collect() };

        let mut next = Vec::with_capacity(cells.len());
        let mut changed = false;
        for (parent, cell) in cells.into_iter().enumerate() {
            let mut groups: Vec<(Vec<f64>, Vec<usize>)> = Vec::new();
            for &u in &cell.members {
                let sig = signature(u);
                match groups
                    .iter_mut()
                    .find(|(rep, _)| cmp_signature(rep, &sig, tol) == Ordering::Equal)
                {
                    Some((_, members)) => members.push(u),
                    None => groups.push((sig, vec![u])),
                }
            }
            if groups.len() == 1 {
                next.push(cell);
                continue;
            }
            changed = true;
            for (sig, members) in groups {
                let mut signature = Vec::with_capacity(sig.len() + 1);
                signature.push(parent as f64);
                signature.extend(sig);
                next.push(Cell {
                    distance: min_dist(&members),
                    members,
                    round,
                    signature,
                });
            }
        }
        next.sort_by(|a, b| a.cmp_key(b, tol));
        cells = next;
        if !changed {
            break;
        }
    }
    Partition::centered(n, cells.into_iter().map(|c| c.members).collect())
}

/// Hitting times from every block to block 0 on the quotient graph; entry 0
/// is 0.
pub fn quotient_hitting_times(q: &QuotientMatrix) -> Result<Vec<f64>> {
    let t = q.transition()?;
    if t.rows() == 1 {
        return Ok(vec![0.0]);
    }
    let mut h = hitting_vector(&t.without(0))?;
    h.insert(0, 0.0);
    Ok(h)
}

/// Hitting time from any vertex of `block` to the centre, read off the
/// quotient: `H` for an equitable quotient, `H_m` for a weight quotient.
pub fn hit_via_quotient(q: &QuotientMatrix, block: usize) -> Result<f64> {
    if block >= q.size() {
        return Err(Error::IndexOutOfRange {
            index: block,
            n: q.size(),
        });
    }
    Ok(quotient_hitting_times(q)?[block])
}

/// Result of routing a hitting-time query through the coarsest stabilized
/// partition at the target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuotientRoute {
    pub report: HittingReport,
    pub partition: Partition,
    pub quotient: QuotientMatrix,
}

/// Hitting times to `target` for the given walk via the coarsest stabilized
/// partition: equitable for the simple walk, weight-equitable for MERW.
pub fn hit_quotient(g: &Graph, target: usize, walk: WalkKind) -> Result<QuotientRoute> {
    g.check_vertex(target)?;
    let perron = numerics::perron(g)?;
    let kind = match walk {
        WalkKind::Simple => QuotientKind::Equitable,
        WalkKind::Merw => QuotientKind::Weight,
    };
    let partition = coarsest_stabilized(g, target, kind, Some(&perron))?;
    let quotient = check(g, &partition, kind, &perron).map_err(|w| {
        Error::CrossCheck(format!(
            "refinement output is not {kind:?}: block {} column {} vertices {} and {}",
            w.block, w.column_block, w.u, w.v
        ))
    })?;
    let times = partition.lift(&quotient_hitting_times(&quotient)?);
    let t = match walk {
        WalkKind::Simple => walks::transition_simple(g)?,
        WalkKind::Merw => walks::transition_merw(g, &perron)?,
    };
    let residual = first_step_residual(t.matrix(), target, &times);
    Ok(QuotientRoute {
        report: HittingReport {
            target,
            method: Method::Quotient,
            walk,
            times,
            residual,
        },
        partition,
        quotient,
    })
}
