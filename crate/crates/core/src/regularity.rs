//! Structured graph classes whose hitting times reduce to small quotients:
//! distance-regularized and pseudo-distance-regular vertices, graphs that are
//! weakly (weight-)f-equitable for a label function `f`, the neighbourhood
//! criterion for adjacent hitting times, and cones over regular graphs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{self, Graph};
use crate::numerics::{self, Matrix, PerronData};
use crate::partitions::{
    self, approx_eq, check_equitable, check_weight_equitable, coarsest_stabilized, weight_from_equitable,
    Partition, QuotientKind, QuotientMatrix, Witness, WEIGHT_TOLERANCE,
};
use crate::walks::{hitting_vector, normalize_columns, WalkKind};

/// Tolerance on the agreement between the closed-form and computed `λ₁` of
/// a cone.
pub const CONE_LAMBDA_TOLERANCE: f64 = 1e-9;

/// Outcome of a structural check: the certified object or a counterexample.
pub type Verdict<T, W = Witness> = std::result::Result<T, W>;

// ---------------------------------------------------------------------------
// Distance partitions and intersection arrays
// ---------------------------------------------------------------------------

/// `{Γ₀(v), Γ₁(v), …, Γ_d(v)}`, ordered by distance from `v`.
pub fn distance_partition(g: &Graph, v: usize) -> Result<Partition> {
    g.check_vertex(v)?;
    let dist = g.distances_from(v);
    let d = dist.iter().flatten().copied().max().unwrap_or(0);
    let mut blocks = vec![Vec::new(); d + 1];
    for (u, du) in dist.iter().enumerate() {
        let du = du.ok_or(Error::DisconnectedGraph)?;
        blocks[du].push(u);
    }
    Partition::centered(g.n(), blocks)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrayKind {
    /// Integer counts of a distance-regularized vertex.
    Integer,
    /// Weight-intersection numbers of a pseudo-distance-regular vertex.
    Pseudo,
}

/// `c₁..c_d`, `a₁..a_d`, `b₀..b_{d−1}` of a vertex, laid out as the
/// tridiagonal quotient of its distance partition: column `i` holds
/// `c_i` (row `i−1`), `a_i` (row `i`) and `b_i` (row `i+1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionArray {
    pub kind: ArrayKind,
    pub d: usize,
    pub c: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda1: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub class_sizes: Vec<usize>,
}

impl IntersectionArray {
    /// Array of a distance-regular graph from `{b₀, …, b_{d−1}; c₁, …, c_d}`.
    pub fn distance_regular(b: &[f64], c: &[f64]) -> Result<IntersectionArray> {
        if b.len() != c.len() || b.is_empty() {
            return Err(Error::BadParams(
                "intersection array needs d values of b and of c".into(),
            ));
        }
        let k = b[0];
        let d = b.len();
        let a = (1..=d)
            .map(|i| k - c[i - 1] - if i < d { b[i] } else { 0.0 })
            .collect();
        let arr = IntersectionArray {
            kind: ArrayKind::Integer,
            d,
            c: c.to_vec(),
            a,
            b: b.to_vec(),
            lambda1: None,
            class_sizes: Vec::new(),
        };
        arr.validate()?;
        Ok(arr)
    }

    fn from_tridiagonal(q: &QuotientMatrix, kind: ArrayKind) -> IntersectionArray {
        let m = &q.matrix;
        let d = m.rows() - 1;
        IntersectionArray {
            kind,
            d,
            c: (1..=d).map(|i| m[(i - 1, i)]).collect(),
            a: (1..=d).map(|i| m[(i, i)]).collect(),
            b: (0..d).map(|i| m[(i + 1, i)]).collect(),
            lambda1: q.lambda1,
            class_sizes: q.block_sizes.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::BadParams(format!("intersection array: {msg}")));
        if self.c.len() != self.d || self.a.len() != self.d || self.b.len() != self.d {
            return bad("lengths must equal d");
        }
        if self.d > 0 && !(self.c[0] > 0.0) {
            return bad("c1 must be positive");
        }
        if self.tridiagonal().entries().any(|x| x < 0.0 || !x.is_finite()) {
            return bad("entries must be non-negative");
        }
        Ok(())
    }

    pub fn tridiagonal(&self) -> Matrix {
        let mut m = Matrix::zeros(self.d + 1, self.d + 1);
        for i in 1..=self.d {
            m[(i - 1, i)] = self.c[i - 1];
            m[(i, i)] = self.a[i - 1];
            m[(i, i - 1)] = self.b[i - 1];
        }
        m
    }

    /// Hitting times from each distance class to the vertex on `T(B)`.
    fn hitting_times(&self) -> Result<Vec<f64>> {
        let t = normalize_columns(&self.tridiagonal())?;
        let mut h = hitting_vector(&t.without(0))?;
        h.insert(0, 0.0);
        Ok(h)
    }

    fn check_distance(&self, i: usize) -> Result<()> {
        if (1..=self.d).contains(&i) {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                n: self.d + 1,
            })
        }
    }
}

/// Intersection array of `v` if its distance partition is equitable.
pub fn intersection_array(g: &Graph, v: usize) -> Result<Verdict<IntersectionArray>> {
    let p = distance_partition(g, v)?;
    Ok(check_equitable(g, &p).map(|q| IntersectionArray::from_tridiagonal(&q, ArrayKind::Integer)))
}

/// Pseudo-intersection numbers of `v` if its distance partition is
/// weight-equitable.
pub fn pseudo_intersection(
    g: &Graph,
    v: usize,
    perron: &PerronData,
) -> Result<Verdict<IntersectionArray>> {
    let p = distance_partition(g, v)?;
    Ok(check_weight_equitable(g, &p, perron)
        .map(|q| IntersectionArray::from_tridiagonal(&q, ArrayKind::Pseudo)))
}

/// Simple-walk hitting time to a distance-regularized vertex from distance
/// `i`. When every vertex of the graph is distance-regularized this is also
/// the MERW hitting time.
pub fn hit_distance_regularized(array: &IntersectionArray, i: usize) -> Result<f64> {
    if array.kind != ArrayKind::Integer {
        return Err(Error::BadParams("expected an integer intersection array".into()));
    }
    array.check_distance(i)?;
    Ok(array.hitting_times()?[i])
}

/// MERW hitting time to a pseudo-distance-regular vertex from distance `i`.
///
/// The columns of `B*` sum to `λ₁`, so `T(B*) = B*/λ₁`.
pub fn hit_pseudo(array: &IntersectionArray, i: usize) -> Result<f64> {
    array.check_distance(i)?;
    Ok(array.hitting_times()?[i])
}

// ---------------------------------------------------------------------------
// Label functions
// ---------------------------------------------------------------------------

/// A labelling `f : V × V → alphabet`. Diagonal labels are colours,
/// off-diagonal labels are relations, and the two sets must be disjoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelFunction {
    labels: Vec<Vec<usize>>,
    alphabet: Vec<String>,
}

/// How [`LabelFunction::distance`] colours the diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagonalColoring {
    /// Every vertex is its own colour.
    PerVertex,
    /// Vertices are coloured by degree.
    ByDegree,
    /// One colour for all vertices.
    Single,
}

impl LabelFunction {
    pub fn new(labels: Vec<Vec<usize>>, alphabet: Vec<String>) -> Result<LabelFunction> {
        let n = labels.len();
        let bad = |msg: String| Err(Error::InvalidLabelFunction(msg));
        if n == 0 {
            return bad("empty label matrix".into());
        }
        for (i, row) in labels.iter().enumerate() {
            if row.len() != n {
                return bad(format!("row {i} has {} labels, expected {n}", row.len()));
            }
            if let Some(&x) = row.iter().find(|&&x| x >= alphabet.len()) {
                return bad(format!("label index {x} outside the alphabet"));
            }
        }
        let mut is_color = vec![false; alphabet.len()];
        for (i, row) in labels.iter().enumerate() {
            is_color[row[i]] = true;
        }
        for (i, row) in labels.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                if i != j && is_color[x] {
                    return bad(format!(
                        "label `{}` is used both as a colour and as a relation",
                        alphabet[x]
                    ));
                }
            }
        }
        Ok(LabelFunction { labels, alphabet })
    }

    /// Builds a label function from string labels; the alphabet is taken in
    /// order of first appearance unless given.
    pub fn from_strings(labels: &[Vec<String>], alphabet: Option<Vec<String>>) -> Result<LabelFunction> {
        let mut alphabet = alphabet.unwrap_or_default();
        let mut index: BTreeMap<String, usize> =
            alphabet.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        if index.len() != alphabet.len() {
            return Err(Error::InvalidLabelFunction("alphabet has duplicates".into()));
        }
        let fixed = !alphabet.is_empty();
        let mut rows = Vec::with_capacity(labels.len());
        for row in labels {
            let mut out = Vec::with_capacity(row.len());
            for s in row {
                let idx = match index.get(s) {
                    Some(&i) => i,
                    None if fixed => return Err(Error::UnknownLabel(s.clone())),
                    None => {
                        alphabet.push(s.clone());
                        index.insert(s.clone(), alphabet.len() - 1);
                        alphabet.len() - 1
                    }
                };
                out.push(idx);
            }
            rows.push(out);
        }
        LabelFunction::new(rows, alphabet)
    }

    /// Distance labels `1..=D` off the diagonal.
    pub fn distance(g: &Graph, coloring: DiagonalColoring) -> Result<LabelFunction> {
        let n = g.n();
        let dists: Vec<Vec<usize>> = (0..n)
            .map(|o| {
                g.distances_from(o)
                    .into_iter()
                    .map(|d| d.ok_or(Error::DisconnectedGraph))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let diameter = dists.iter().flatten().copied().max().unwrap_or(0);
        let mut alphabet: Vec<String> = (1..=diameter).map(|d| d.to_string()).collect();
        let colors: Vec<String> = (0..n)
            .map(|v| match coloring {
                DiagonalColoring::PerVertex => format!("v{v}"),
                DiagonalColoring::ByDegree => format!("deg{}", g.degree(v)),
                DiagonalColoring::Single => "c".to_string(),
            })
            .collect();
        let mut color_index = BTreeMap::new();
        for c in &colors {
            if !color_index.contains_key(c) {
                alphabet.push(c.clone());
                color_index.insert(c.clone(), alphabet.len() - 1);
            }
        }
        let labels = (0..n)
            .map(|o| {
                (0..n)
                    .map(|u| {
                        if o == u {
                            color_index[&colors[o]]
                        } else {
                            dists[o][u] - 1
                        }
                    })
                    .collect()
            })
            .collect();
        LabelFunction::new(labels, alphabet)
    }

    /// Single-colour labels read off the coarsest stabilized partition at
    /// each vertex: `f(o, u) = "b{i}"` when `u` lies in block `i`.
    pub fn from_refinement(
        g: &Graph,
        kind: QuotientKind,
        perron: Option<&PerronData>,
    ) -> Result<LabelFunction> {
        let n = g.n();
        let parts = (0..n)
            .map(|o| coarsest_stabilized(g, o, kind, perron))
            .collect::<Result<Vec<_>>>()?;
        let max_blocks = parts.iter().map(Partition::len).max().unwrap_or(1);
        let mut alphabet: Vec<String> = (1..max_blocks).map(|i| format!("b{i}")).collect();
        alphabet.push("c".to_string());
        let color = alphabet.len() - 1;
        let labels = parts
            .iter()
            .map(|p| {
                p.block_of()
                    .into_iter()
                    .map(|b| if b == 0 { color } else { b - 1 })
                    .collect()
            })
            .collect();
        LabelFunction::new(labels, alphabet)
    }

    /// `f⁺` on the cone over the base graph: the apex (index `n`) gets a new
    /// colour `a0`, and every pair involving the apex gets a new relation `a1`.
    pub fn cone_extension(&self) -> LabelFunction {
        let n = self.n();
        let mut alphabet = self.alphabet.clone();
        let fresh = |stem: &str, alphabet: &[String]| {
            let mut name = stem.to_string();
            while alphabet.contains(&name) {
                name.push('\'');
            }
            name
        };
        let a1 = fresh("a1", &alphabet);
        alphabet.push(a1);
        let a1 = alphabet.len() - 1;
        let a0 = fresh("a0", &alphabet);
        alphabet.push(a0);
        let a0 = alphabet.len() - 1;
        let labels = (0..=n)
            .map(|v| {
                (0..=n)
                    .map(|u| match (v == n, u == n) {
                        (true, true) => a0,
                        (false, false) => self.labels[v][u],
                        _ => a1,
                    })
                    .collect()
            })
            .collect();
        LabelFunction { labels, alphabet }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn label(&self, o: usize, u: usize) -> &str {
        &self.alphabet[self.labels[o][u]]
    }

    fn color_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.alphabet.len()];
        for (i, row) in self.labels.iter().enumerate() {
            mask[row[i]] = true;
        }
        mask
    }

    pub fn color_set(&self) -> Vec<&str> {
        let mask = self.color_mask();
        self.alphabet
            .iter()
            .zip(&mask)
            .filter(|(_, &c)| c)
            .map(|(s, _)| s.as_str())
            .collect()
    }

    /// Off-diagonal labels, in alphabet order.
    pub fn relation_set(&self) -> Vec<&str> {
        let mask = self.color_mask();
        let mut used = vec![false; self.alphabet.len()];
        for (i, row) in self.labels.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                if i != j {
                    used[x] = true;
                }
            }
        }
        self.alphabet
            .iter()
            .enumerate()
            .filter(|&(x, _)| used[x] && !mask[x])
            .map(|(_, s)| s.as_str())
            .collect()
    }

    /// `P_o`: the colour class of `o` first, then one block per relation
    /// label in alphabet order (empty classes dropped), with block labels.
    pub fn partition_at(&self, o: usize) -> (Vec<usize>, Vec<Vec<usize>>) {
        let color = self.labels[o][o];
        let mut by_label: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (u, &x) in self.labels[o].iter().enumerate() {
            by_label.entry(x).or_default().push(u);
        }
        let mut labels = vec![color];
        let mut blocks = vec![by_label.remove(&color).unwrap_or_default()];
        for (x, members) in by_label {
            labels.push(x);
            blocks.push(members);
        }
        (labels, blocks)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let labels: Vec<Vec<&str>> = self
            .labels
            .iter()
            .map(|row| row.iter().map(|&x| self.alphabet[x].as_str()).collect())
            .collect();
        serde_json::json!({ "labels": labels, "alphabet": self.alphabet })
    }

    /// Parses `{"labels": [[...]], "alphabet": [...]}`; labels may be strings
    /// or integers.
    pub fn from_json(text: &str) -> Result<LabelFunction> {
        #[derive(Deserialize)]
        struct Doc {
            labels: Vec<Vec<serde_json::Value>>,
            alphabet: Option<Vec<serde_json::Value>>,
        }
        fn key(v: &serde_json::Value) -> Result<String> {
            match v {
                serde_json::Value::String(s) => Ok(s.clone()),
                serde_json::Value::Number(x) => Ok(x.to_string()),
                other => Err(Error::Parse(format!("label must be a string or integer, got {other}"))),
            }
        }
        let doc: Doc = serde_json::from_str(text)?;
        let labels = doc
            .labels
            .iter()
            .map(|row| row.iter().map(key).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let alphabet = doc
            .alphabet
            .map(|a| a.iter().map(key).collect::<Result<Vec<_>>>())
            .transpose()?;
        LabelFunction::from_strings(&labels, alphabet)
    }
}

// ---------------------------------------------------------------------------
// Weakly (weight-)f-equitable graphs
// ---------------------------------------------------------------------------

/// Quotient shared by all vertices of one colour.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabeledQuotient {
    pub color: String,
    /// Row/column labels: the colour, then the relation labels present.
    pub labels: Vec<String>,
    /// Vertex whose partition produced this quotient.
    pub representative: usize,
    /// `B(c)` (equitable kind) or `B*(c)` (weight kind).
    pub quotient: QuotientMatrix,
    /// `B*(c)`, the quotient driving MERW.
    pub weight: Matrix,
}

impl LabeledQuotient {
    fn hitting_times(&self, walk: WalkKind) -> Result<Vec<f64>> {
        let m = match walk {
            WalkKind::Simple => {
                if self.quotient.kind != QuotientKind::Equitable {
                    return Err(Error::BadParams(
                        "simple-walk times need an equitable structure".into(),
                    ));
                }
                &self.quotient.matrix
            }
            WalkKind::Merw => &self.weight,
        };
        let t = normalize_columns(m)?;
        let mut h = if t.rows() > 1 {
            hitting_vector(&t.without(0))?
        } else {
            Vec::new()
        };
        h.insert(0, 0.0);
        Ok(h)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeaklyEquitable {
    pub kind: QuotientKind,
    pub quotients: Vec<LabeledQuotient>,
}

impl WeaklyEquitable {
    pub fn quotient(&self, color: &str) -> Option<&LabeledQuotient> {
        self.quotients.iter().find(|q| q.color == color)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum FFailure {
    /// The colour class of `vertex` is not `{vertex}`.
    NotCentered { vertex: usize, size: usize },
    /// `P_vertex` is not (weight-)equitable.
    NotEquitable { vertex: usize, witness: Witness },
    /// Two vertices of the same colour have different quotients.
    QuotientMismatch { color: String, first: usize, second: usize },
}

fn same_quotient(a: &LabeledQuotient, b: &LabeledQuotient, kind: QuotientKind) -> bool {
    if a.labels != b.labels {
        return false;
    }
    let close = |x: &Matrix, y: &Matrix| x.entries().zip(y.entries()).all(|(p, q)| approx_eq(p, q, WEIGHT_TOLERANCE));
    let primary = match kind {
        QuotientKind::Equitable => a.quotient.matrix == b.quotient.matrix,
        QuotientKind::Weight => close(&a.quotient.matrix, &b.quotient.matrix),
    };
    primary && close(&a.weight, &b.weight)
}

/// Checks that every `P_o` is centred on `o` and (weight-)equitable, and
/// that the quotient depends only on the colour `f(o, o)`. Quotients are
/// compared as matrices under the label indexing, not up to isomorphism.
pub fn check_weakly_f_equitable(
    g: &Graph,
    f: &LabelFunction,
    kind: QuotientKind,
    perron: &PerronData,
) -> Result<Verdict<WeaklyEquitable, FFailure>> {
    if f.n() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            found: f.n(),
        });
    }
    let mut by_color: BTreeMap<usize, LabeledQuotient> = BTreeMap::new();
    for o in 0..g.n() {
        let (labels, blocks) = f.partition_at(o);
        if blocks[0].len() != 1 {
            return Ok(Err(FFailure::NotCentered {
                vertex: o,
                size: blocks[0].len(),
            }));
        }
        let p = Partition::centered(g.n(), blocks)?;
        let checked = match kind {
            QuotientKind::Equitable => partitions::check_equitable_with_nu(g, &p, perron),
            QuotientKind::Weight => check_weight_equitable(g, &p, perron),
        };
        let quotient = match checked {
            Ok(q) => q,
            Err(witness) => return Ok(Err(FFailure::NotEquitable { vertex: o, witness })),
        };
        let weight = match kind {
            QuotientKind::Weight => quotient.matrix.clone(),
            QuotientKind::Equitable => {
                let nu = quotient.nu_block.as_ref().ok_or_else(|| {
                    Error::CrossCheck(format!(
                        "Perron vector is not constant on the blocks of equitable P_{o}"
                    ))
                })?;
                weight_from_equitable(&quotient.matrix, nu)
            }
        };
        let lq = LabeledQuotient {
            color: f.alphabet[labels[0]].clone(),
            labels: labels.iter().map(|&x| f.alphabet[x].clone()).collect(),
            representative: o,
            quotient,
            weight,
        };
        match by_color.get(&labels[0]) {
            Some(first) if !same_quotient(first, &lq, kind) => {
                return Ok(Err(FFailure::QuotientMismatch {
                    color: lq.color,
                    first: first.representative,
                    second: o,
                }))
            }
            Some(_) => {}
            None => {
                by_color.insert(labels[0], lq);
            }
        }
    }
    Ok(Ok(WeaklyEquitable {
        kind,
        quotients: by_color.into_values().collect(),
    }))
}

/// Hitting time to any vertex of colour `color` from a vertex it labels
/// `label`, read off that colour's quotient.
pub fn hit_weakly_f_equitable(
    s: &WeaklyEquitable,
    color: &str,
    label: &str,
    walk: WalkKind,
) -> Result<f64> {
    let q = s
        .quotient(color)
        .ok_or_else(|| Error::UnknownLabel(color.to_string()))?;
    let idx = q
        .labels
        .iter()
        .position(|l| l == label)
        .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
    Ok(q.hitting_times(walk)?[idx])
}

/// Hitting time from `u` to `v` through the certified structure.
pub fn hit_pair(
    s: &WeaklyEquitable,
    f: &LabelFunction,
    v: usize,
    u: usize,
    walk: WalkKind,
) -> Result<f64> {
    hit_weakly_f_equitable(s, f.label(v, v), f.label(v, u), walk)
}

// ---------------------------------------------------------------------------
// Adjacent hitting times from the neighbourhood block
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RaoOutcome {
    Applicable { value: f64, edges: usize, degree: usize },
    NotApplicable,
}

impl RaoOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            RaoOutcome::Applicable { value, .. } => Some(*value),
            RaoOutcome::NotApplicable => None,
        }
    }
}

/// `2e/k − 1` for every neighbour of `v`, provided the neighbourhood of `v`
/// is a single block of the coarsest stabilized equitable partition at `v`.
pub fn rao_hitting(g: &Graph, v: usize) -> Result<RaoOutcome> {
    if g.is_directed() {
        return Err(Error::InvalidGraph("expected an undirected graph".into()));
    }
    let p = coarsest_stabilized(g, v, QuotientKind::Equitable, None)?;
    let neighbors: Vec<usize> = g.neighbors(v).collect();
    if !p.blocks().iter().any(|b| *b == neighbors) {
        return Ok(RaoOutcome::NotApplicable);
    }
    let edges = g.edge_count();
    let degree = neighbors.len();
    Ok(RaoOutcome::Applicable {
        value: 2.0 * edges as f64 / degree as f64 - 1.0,
        edges,
        degree,
    })
}

// ---------------------------------------------------------------------------
// Cones over regular graphs
// ---------------------------------------------------------------------------

/// Per-label hitting tables on the cone over an f-equitable base.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeTables {
    /// Row/column labels of `B⁺`: the base colour, the base relations, then
    /// the apex relation.
    pub labels: Vec<String>,
    pub b_plus: Matrix,
    /// `D_ν B⁺ D_ν⁻¹`.
    pub b_star: Matrix,
    /// Simple-walk hitting time to a base vertex from each label class.
    pub simple: Vec<f64>,
    /// MERW hitting time to a base vertex from each label class.
    pub merw: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeHitting {
    pub n: usize,
    pub k: usize,
    /// `k/2 + √(n + k²/4)`.
    pub lambda1: f64,
    pub to_apex_simple: f64,
    pub to_apex_merw: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tables: Option<ConeTables>,
    /// The cone's label function, when tables were requested.
    #[serde(skip)]
    pub f_plus: Option<LabelFunction>,
}

impl ConeHitting {
    /// `(H, H_m)` from `u` to `v` on the cone, apex at index `n`.
    pub fn lookup(&self, v: usize, u: usize) -> Option<(f64, f64)> {
        if v == u {
            return Some((0.0, 0.0));
        }
        if v == self.n {
            return Some((self.to_apex_simple, self.to_apex_merw));
        }
        let (tables, f) = (self.tables.as_ref()?, self.f_plus.as_ref()?);
        let idx = tables.labels.iter().position(|l| l == f.label(v, u))?;
        Some((tables.simple[idx], tables.merw[idx]))
    }
}

/// Closed-form hitting times on the cone over a `k`-regular graph, plus the
/// per-label tables built from the bordered quotient `B⁺` when `f` makes the
/// base f-equitable.
pub fn cone_hitting(base: &Graph, f: Option<&LabelFunction>) -> Result<ConeHitting> {
    let k = base.regular_degree().ok_or(Error::NotRegular)?;
    let n = base.n();
    let (kf, nf) = (k as f64, n as f64);
    let lambda1 = kf / 2.0 + (nf + kf * kf / 4.0).sqrt();

    let cone = graphs::cone(base)?;
    let computed = numerics::perron(&cone)?.lambda1;
    if (computed - lambda1).abs() > CONE_LAMBDA_TOLERANCE {
        return Err(Error::CrossCheck(format!(
            "cone λ₁ closed form {lambda1} vs power iteration {computed}"
        )));
    }

    let mut out = ConeHitting {
        n,
        k,
        lambda1,
        to_apex_simple: kf + 1.0,
        to_apex_merw: lambda1 * lambda1 / nf,
        tables: None,
        f_plus: None,
    };
    let Some(f) = f else {
        return Ok(out);
    };

    let structure = match check_weakly_f_equitable(base, f, QuotientKind::Equitable, &numerics::perron(base)?)? {
        Ok(s) => s,
        Err(failure) => {
            return Err(Error::InvalidLabelFunction(format!(
                "base is not f-equitable: {failure:?}"
            )))
        }
    };
    let [base_q] = structure.quotients.as_slice() else {
        return Err(Error::InvalidLabelFunction(
            "cone tables need a single-colour label function".into(),
        ));
    };
    let b = &base_q.quotient.matrix;
    let sizes = &base_q.quotient.block_sizes;
    let r = b.rows();
    let b_plus = Matrix::from_fn(r + 1, r + 1, |i, j| match (i < r, j < r) {
        (true, true) => b[(i, j)],
        (true, false) => sizes[i] as f64,
        (false, true) => 1.0,
        (false, false) => 0.0,
    });
    let mut nu = vec![1.0; r + 1];
    nu[r] = lambda1 - kf;
    let b_star = weight_from_equitable(&b_plus, &nu);

    let times = |m: &Matrix| -> Result<Vec<f64>> {
        let mut h = hitting_vector(&normalize_columns(m)?.without(0))?;
        h.insert(0, 0.0);
        Ok(h)
    };
    let f_plus = f.cone_extension();
    let mut labels = base_q.labels.clone();
    labels.push(f_plus.label(0, n).to_string());
    out.tables = Some(ConeTables {
        labels,
        simple: times(&b_plus)?,
        merw: times(&b_star)?,
        b_plus,
        b_star,
    });
    out.f_plus = Some(f_plus);
    Ok(out)
}

// ---------------------------------------------------------------------------
// Single-colour weight structures
// ---------------------------------------------------------------------------

/// Empirical check that a single-colour weakly weight-f-equitable structure
/// is in fact f-equitable: ν constant and the equitable check passing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingleColorVerdict {
    /// `f` has exactly one colour.
    pub applicable: bool,
    pub weight_certified: bool,
    pub nu_constant: bool,
    pub equitable_certified: bool,
}

impl SingleColorVerdict {
    /// False only for a certified weight structure without the conclusion.
    pub fn consistent(&self) -> bool {
        !(self.applicable && self.weight_certified) || (self.nu_constant && self.equitable_certified)
    }
}

pub fn check_weight_f_equitable_implies_f_equitable(
    g: &Graph,
    f: &LabelFunction,
    perron: &PerronData,
) -> Result<SingleColorVerdict> {
    let applicable = f.color_set().len() == 1;
    let mut verdict = SingleColorVerdict {
        applicable,
        weight_certified: false,
        nu_constant: false,
        equitable_certified: false,
    };
    if !applicable {
        return Ok(verdict);
    }
    verdict.weight_certified = check_weakly_f_equitable(g, f, QuotientKind::Weight, perron)?.is_ok();
    let first = perron.nu[0];
    verdict.nu_constant = perron.nu.iter().all(|&x| approx_eq(x, first, WEIGHT_TOLERANCE));
    verdict.equitable_certified = check_weakly_f_equitable(g, f, QuotientKind::Equitable, perron)?.is_ok();
    Ok(verdict)
}
