//! Symmetric association schemes and hitting times in their relation graphs.
//!
//! A scheme is a family of 0/1 matrices `A₀ = I, A₁, …, A_d` that sum to the
//! all-ones matrix and whose products stay in their span:
//! `A_i A_j = Σ_k p_ij^k A_k`. For a vertex `v`, the relations `f(v, ·)`
//! partition the vertex set, and that partition is equitable for every
//! union of relation graphs. Its quotient for `G_r` has entry
//! `(a, b) = p_{a r}^b`: a vertex `u` with `f(v, u) = b` has `p_{a r}^b`
//! neighbours `w` in `G_r` with `f(v, w) = a`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{self, json_number, Graph};
use crate::numerics::Matrix;
use crate::walks::{hitting_vector, normalize_columns};

/// Agreement required between the closed-form adjacent hitting time and the
/// quotient solve.
pub const ADJACENT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssociationScheme {
    pub n: usize,
    /// Class count `d`; there are `d + 1` relations.
    pub d: usize,
    #[serde(skip)]
    relations: Vec<Vec<u8>>,
    /// `p[i][j][k] = p_ij^k`.
    pub p: Vec<Vec<Vec<i64>>>,
}

/// First axiom found to fail, with the offending entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum SchemeFailure {
    Empty,
    Shape { relation: usize, rows: usize, cols: usize },
    NotZeroOne { relation: usize, u: usize, v: usize },
    FirstNotIdentity { u: usize, v: usize },
    /// Entry `(u, v)` is covered by `count` relations instead of one.
    NotPartition { u: usize, v: usize, count: usize },
    NotSymmetric { relation: usize, u: usize, v: usize },
    EmptyRelation { relation: usize },
    /// `A_i A_j` is not `Σ_k p_ij^k A_k` at `(u, v)`.
    NotClosed { i: usize, j: usize, u: usize, v: usize, product: i64, expected: i64 },
    NotCommutative { i: usize, j: usize, k: usize },
}

impl AssociationScheme {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn relation(&self, i: usize) -> Matrix {
        let n = self.n;
        Matrix::from_fn(n, n, |u, v| f64::from(self.relations[i][u * n + v]))
    }

    pub fn intersection_number(&self, i: usize, j: usize, k: usize) -> i64 {
        self.p[i][j][k]
    }

    /// `f(u, v)`: the relation containing `(u, v)`.
    pub fn label(&self, u: usize, v: usize) -> usize {
        let idx = u * self.n + v;
        self.relations
            .iter()
            .position(|r| r[idx] == 1)
            .expect("relations cover every pair")
    }

    fn check_relation(&self, i: usize) -> Result<()> {
        if i > self.d {
            return Err(Error::IndexOutOfRange {
                index: i,
                n: self.d + 1,
            });
        }
        Ok(())
    }

    /// Graph whose adjacency is `Σ_{x ∈ e} A_x`.
    pub fn union_graph(&self, e: &[usize]) -> Result<Graph> {
        let mut adj = Matrix::zeros(self.n, self.n);
        for &x in e {
            self.check_relation(x)?;
            if x == 0 {
                return Err(Error::BadParams("relation 0 is the identity".into()));
            }
            for u in 0..self.n {
                for v in 0..self.n {
                    adj[(u, v)] += f64::from(self.relations[x][u * self.n + v]);
                }
            }
        }
        if adj.entries().any(|w| w > 1.0) {
            return Err(Error::BadParams("relation indices must be distinct".into()));
        }
        Graph::from_adjacency(adj, false).map_err(|err| match err {
            Error::DisconnectedGraph => Error::DisconnectedRelation(e.first().copied().unwrap_or(0)),
            other => other,
        })
    }

    /// `P^(r)`, with entry `(a, b) = p_{a r}^b`.
    pub fn relation_quotient(&self, r: usize) -> Result<Matrix> {
        self.check_relation(r)?;
        let m = self.d + 1;
        Ok(Matrix::from_fn(m, m, |a, b| self.p[a][r][b] as f64))
    }

    /// `Σ_x P^(e_x)`.
    pub fn union_quotient(&self, e: &[usize]) -> Result<Matrix> {
        let m = self.d + 1;
        let mut q = Matrix::zeros(m, m);
        for &x in e {
            let px = self.relation_quotient(x)?;
            for a in 0..m {
                for b in 0..m {
                    q[(a, b)] += px[(a, b)];
                }
            }
        }
        Ok(q)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let n = self.n;
        let relations: Vec<serde_json::Value> = self
            .relations
            .iter()
            .map(|r| {
                (0..n)
                    .map(|u| {
                        (0..n)
                            .map(|v| serde_json::Value::Number(json_number(f64::from(r[u * n + v]))))
                            .collect::<serde_json::Value>()
                    })
                    .collect()
            })
            .collect();
        serde_json::json!({ "n": n, "relations": relations })
    }

    pub fn from_json(text: &str) -> Result<Verdict> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Relations {
            Matrices(Vec<Vec<Vec<f64>>>),
            Labels(Vec<Vec<f64>>),
        }
        #[derive(Deserialize)]
        struct Doc {
            n: Option<usize>,
            relations: Relations,
        }
        let doc: Doc = serde_json::from_str(text)?;
        let mats = match doc.relations {
            Relations::Matrices(ms) => ms
                .iter()
                .map(|rows| Matrix::from_rows(rows))
                .collect::<Result<Vec<_>>>()?,
            Relations::Labels(rows) => {
                let labels = rows
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|&x| {
                                if x >= 0.0 && x.fract() == 0.0 {
                                    Ok(x as usize)
                                } else {
                                    Err(Error::Parse(format!("bad relation label {x}")))
                                }
                            })
                            .collect::<Result<Vec<usize>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                relations_from_labels(&labels)?
            }
        };
        if let (Some(n), Some(first)) = (doc.n, mats.first()) {
            if first.rows() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: first.rows(),
                });
            }
        }
        validate_scheme(&mats)
    }
}

pub type Verdict = std::result::Result<AssociationScheme, SchemeFailure>;

/// Splits an `n × n` label matrix into one 0/1 matrix per label `0..=max`.
pub fn relations_from_labels(labels: &[Vec<usize>]) -> Result<Vec<Matrix>> {
    let n = labels.len();
    if labels.iter().any(|row| row.len() != n) {
        return Err(Error::Parse("label matrix must be square".into()));
    }
    let top = labels.iter().flatten().copied().max().unwrap_or(0);
    Ok((0..=top)
        .map(|x| Matrix::from_fn(n, n, |u, v| if labels[u][v] == x { 1.0 } else { 0.0 }))
        .collect())
}

fn int_product(a: &[u8], b: &[u8], n: usize) -> Vec<i64> {
    let mut out = vec![0i64; n * n];
    for u in 0..n {
        for w in 0..n {
            if a[u * n + w] == 0 {
                continue;
            }
            for v in 0..n {
                out[u * n + v] += i64::from(b[w * n + v]);
            }
        }
    }
    out
}

/// Checks the axioms of a symmetric association scheme and computes its
/// intersection numbers. Each `p_ij^k` is read from one entry of `A_i A_j`
/// and the full identity is then verified in integer arithmetic.
pub fn validate_scheme(relations: &[Matrix]) -> Result<Verdict> {
    let Some(first) = relations.first() else {
        return Ok(Err(SchemeFailure::Empty));
    };
    let n = first.rows();
    let mut rel = Vec::with_capacity(relations.len());
    for (i, a) in relations.iter().enumerate() {
        if a.rows() != n || a.cols() != n {
            return Ok(Err(SchemeFailure::Shape {
                relation: i,
                rows: a.rows(),
                cols: a.cols(),
            }));
        }
        let mut bits = Vec::with_capacity(n * n);
        for u in 0..n {
            for v in 0..n {
                match a[(u, v)] {
                    0.0 => bits.push(0u8),
                    1.0 => bits.push(1u8),
                    _ => return Ok(Err(SchemeFailure::NotZeroOne { relation: i, u, v })),
                }
            }
        }
        rel.push(bits);
    }

    for u in 0..n {
        for v in 0..n {
            if rel[0][u * n + v] != u8::from(u == v) {
                return Ok(Err(SchemeFailure::FirstNotIdentity { u, v }));
            }
            let count = rel.iter().filter(|r| r[u * n + v] == 1).count();
            if count != 1 {
                return Ok(Err(SchemeFailure::NotPartition { u, v, count }));
            }
        }
    }
    for (i, r) in rel.iter().enumerate() {
        if !r.contains(&1) {
            return Ok(Err(SchemeFailure::EmptyRelation { relation: i }));
        }
        for u in 0..n {
            for v in 0..u {
                if r[u * n + v] != r[v * n + u] {
                    return Ok(Err(SchemeFailure::NotSymmetric { relation: i, u, v }));
                }
            }
        }
    }

    let m = rel.len();
    // One representative pair per relation.
    let reps: Vec<usize> = rel
        .iter()
        .map(|r| r.iter().position(|&x| x == 1).expect("relation is non-empty"))
        .collect();
    let mut p = vec![vec![vec![0i64; m]; m]; m];
    for i in 0..m {
        for j in 0..m {
            let prod = int_product(&rel[i], &rel[j], n);
            for k in 0..m {
                p[i][j][k] = prod[reps[k]];
            }
            for idx in 0..n * n {
                let expected: i64 = (0..m).map(|k| p[i][j][k] * i64::from(rel[k][idx])).sum();
                if prod[idx] != expected {
                    return Ok(Err(SchemeFailure::NotClosed {
                        i,
                        j,
                        u: idx / n,
                        v: idx % n,
                        product: prod[idx],
                        expected,
                    }));
                }
            }
        }
    }
    for i in 0..m {
        for j in 0..i {
            if let Some(k) = (0..m).find(|&k| p[i][j][k] != p[j][i][k]) {
                return Ok(Err(SchemeFailure::NotCommutative { i, j, k }));
            }
        }
    }
    Ok(Ok(AssociationScheme {
        n,
        d: m - 1,
        relations: rel,
        p,
    }))
}

/// Hitting time to a vertex from class `j` on the quotient `q`, normalized
/// by `T(·)` first: `P^(r)` has column sums equal to the valency of `G_r`,
/// not one.
fn quotient_hitting(q: &Matrix, j: usize) -> Result<f64> {
    if j == 0 || j >= q.rows() {
        return Err(Error::IndexOutOfRange {
            index: j,
            n: q.rows(),
        });
    }
    let t = normalize_columns(q)?;
    Ok(hitting_vector(&t.without(0))?[j - 1])
}

/// Hitting time in `G_i` to `v` from any `u` with `f(v, u) = j`.
pub fn hit_relation_graph(s: &AssociationScheme, i: usize, j: usize) -> Result<f64> {
    hit_t_distance_regular(s, &[i], j)
}

/// Hitting time in the union graph `Σ_{x ∈ e} A_x` from class `j`, using the
/// quotient with entries `q_ab = Σ_x p_{a e_x}^b`.
pub fn hit_t_distance_regular(s: &AssociationScheme, e: &[usize], j: usize) -> Result<f64> {
    if e.is_empty() {
        return Err(Error::BadParams("empty relation set".into()));
    }
    s.union_graph(e)?;
    quotient_hitting(&s.union_quotient(e)?, j)
}

/// `|V| − 1`, the hitting time between adjacent vertices of a connected
/// relation graph, checked against the quotient solve.
pub fn scheme_adjacent_hitting(s: &AssociationScheme, i: usize) -> Result<f64> {
    let value = (s.n - 1) as f64;
    let solved = hit_relation_graph(s, i, i)?;
    if (solved - value).abs() > ADJACENT_TOLERANCE {
        return Err(Error::CrossCheck(format!(
            "adjacent hitting time {solved} in relation {i}, expected {value}"
        )));
    }
    Ok(value)
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

fn expect_valid(verdict: Verdict) -> Result<AssociationScheme> {
    verdict.map_err(|w| Error::CrossCheck(format!("catalog scheme fails {w:?}")))
}

/// `{I, J − I}` on `n ≥ 2` points.
pub fn trivial(n: usize) -> Result<AssociationScheme> {
    if n < 2 {
        return Err(Error::BadParams("trivial scheme needs n >= 2".into()));
    }
    let labels: Vec<Vec<usize>> = (0..n).map(|u| (0..n).map(|v| usize::from(u != v)).collect()).collect();
    expect_valid(validate_scheme(&relations_from_labels(&labels)?)?)
}

/// The distance scheme of `g`, which exists iff `g` is distance-regular.
pub fn distance_scheme(g: &Graph) -> Result<Verdict> {
    let labels = (0..g.n())
        .map(|u| {
            g.distances_from(u)
                .into_iter()
                .map(|d| d.ok_or(Error::DisconnectedGraph))
                .collect::<Result<Vec<usize>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    validate_scheme(&relations_from_labels(&labels)?)
}

/// Hamming scheme `H(d, 2)` on binary words of length `d`.
pub fn hamming(d: usize) -> Result<AssociationScheme> {
    if !(1..=4).contains(&d) {
        return Err(Error::BadParams("Hamming scheme H(d,2) is bundled for 1 <= d <= 4".into()));
    }
    expect_valid(distance_scheme(&graphs::generate("hypercube", &[d])?)?)
}

/// Johnson scheme `J(v, k)` on `k`-subsets of a `v`-set; relation
/// `k − |A ∩ B|`. Subsets are ordered by their bitmask.
pub fn johnson(v: usize, k: usize) -> Result<AssociationScheme> {
    if k == 0 || 2 * k > v || v > 16 {
        return Err(Error::BadParams(format!("Johnson scheme J({v},{k}) is not supported")));
    }
    let subsets: Vec<u32> = (0u32..1 << v).filter(|s| s.count_ones() as usize == k).collect();
    let labels: Vec<Vec<usize>> = subsets
        .iter()
        .map(|a| subsets.iter().map(|b| k - (a & b).count_ones() as usize).collect())
        .collect();
    expect_valid(validate_scheme(&relations_from_labels(&labels)?)?)
}

pub fn petersen() -> Result<AssociationScheme> {
    expect_valid(distance_scheme(&graphs::generate("petersen", &[])?)?)
}

/// Looks up a bundled scheme by name: `trivial N`, `hamming D`,
/// `johnson V K` or `petersen`.
pub fn catalog(name: &str, params: &[usize]) -> Result<AssociationScheme> {
    match (name, params) {
        ("trivial", [n]) => trivial(*n),
        ("hamming", [d]) => hamming(*d),
        ("johnson", [v, k]) => johnson(*v, *k),
        ("petersen", []) => petersen(),
        ("trivial" | "hamming" | "johnson" | "petersen", _) => {
            Err(Error::BadParams(format!("wrong parameters for scheme `{name}`")))
        }
        _ => Err(Error::UnknownFamily(name.to_string())),
    }
}

/// Every bundled scheme.
pub fn bundled() -> Result<Vec<(String, AssociationScheme)>> {
    let mut out = Vec::new();
    for n in 2..=10 {
        out.push((format!("trivial-{n}"), trivial(n)?));
    }
    for d in 1..=4 {
        out.push((format!("hamming-{d}"), hamming(d)?));
    }
    out.push(("johnson-4-2".to_string(), johnson(4, 2)?));
    out.push(("petersen".to_string(), petersen()?));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walks::{hit_full, WalkKind};

    #[test]
    fn trivial_scheme_numbers() {
        for n in 3..=8 {
            let s = trivial(n).unwrap();
            assert_eq!(s.d, 1);
            assert_eq!(s.intersection_number(1, 1, 1), n as i64 - 2);
            assert_eq!(s.intersection_number(1, 1, 0), n as i64 - 1);
            assert!((hit_relation_graph(&s, 1, 1).unwrap() - (n - 1) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn unnormalized_quotient_gives_wrong_answer() {
        // Without T(·) the reduced matrix [[n−2]] is not substochastic and the
        // series diverges; for n = 5 the formula returns a negative number.
        let s = trivial(5).unwrap();
        let raw = s.relation_quotient(1).unwrap().without(0);
        let h = hitting_vector(&raw).unwrap();
        assert!(h[0] < 0.0);
        assert!((hit_relation_graph(&s, 1, 1).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn cube_scheme_matches_distance_quotient() {
        let s = hamming(3).unwrap();
        assert_eq!(s.d, 3);
        let q = s.relation_quotient(1).unwrap();
        assert_eq!(
            q.to_rows(),
            vec![
                vec![0.0, 1.0, 0.0, 0.0],
                vec![3.0, 0.0, 2.0, 0.0],
                vec![0.0, 2.0, 0.0, 3.0],
                vec![0.0, 0.0, 1.0, 0.0],
            ]
        );
        assert!((hit_relation_graph(&s, 1, 3).unwrap() - 10.0).abs() < 1e-12);
        assert!((scheme_adjacent_hitting(&s, 1).unwrap() - 7.0).abs() < 1e-12);
    }

    #[test]
    fn cycle_alone_is_not_a_scheme() {
        let c5 = graphs::generate("cycle", &[5]).unwrap();
        let verdict = validate_scheme(&[Matrix::identity(5), c5.adjacency().clone()]).unwrap();
        assert!(matches!(verdict, Err(SchemeFailure::NotPartition { count: 0, .. })));
    }

    #[test]
    fn non_distance_regular_graph_has_no_distance_scheme() {
        let p4 = graphs::generate("path", &[4]).unwrap();
        assert!(matches!(distance_scheme(&p4).unwrap(), Err(SchemeFailure::NotClosed { .. })));
    }

    #[test]
    fn disconnected_relation_is_reported() {
        // In Q3, words at distance 2 form two components (even and odd weight).
        let s = hamming(3).unwrap();
        assert!(matches!(hit_relation_graph(&s, 2, 2), Err(Error::DisconnectedRelation(2))));
        assert!(matches!(scheme_adjacent_hitting(&s, 2), Err(Error::DisconnectedRelation(2))));
    }

    #[test]
    fn relation_and_union_graphs_match_full_solve() {
        for (name, s) in bundled().unwrap() {
            let sets: Vec<Vec<usize>> = (1..=s.d).map(|i| vec![i]).chain([(1..=s.d).collect()]).collect();
            for e in sets {
                let Ok(g) = s.union_graph(&e) else { continue };
                let full = hit_full(&g, 0, WalkKind::Simple).unwrap();
                for u in 1..s.n {
                    let j = s.label(0, u);
                    let h = hit_t_distance_regular(&s, &e, j).unwrap();
                    assert!((h - full.times[u]).abs() < 1e-8, "{name} {e:?} u={u}");
                }
            }
        }
    }

    #[test]
    fn johnson_and_petersen() {
        let j = johnson(4, 2).unwrap();
        assert_eq!((j.n, j.d), (6, 2));
        assert_eq!(j.intersection_number(1, 1, 0), 4);
        assert!((scheme_adjacent_hitting(&petersen().unwrap(), 1).unwrap() - 9.0).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip_in_both_shapes() {
        let s = johnson(4, 2).unwrap();
        let text = s.to_json_value().to_string();
        assert_eq!(AssociationScheme::from_json(&text).unwrap().unwrap(), s);
        let labels: Vec<Vec<usize>> = (0..s.n).map(|u| (0..s.n).map(|v| s.label(u, v)).collect()).collect();
        let text = serde_json::json!({ "n": s.n, "relations": labels }).to_string();
        assert_eq!(AssociationScheme::from_json(&text).unwrap().unwrap(), s);
    }
}
