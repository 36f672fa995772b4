//! Graph representation, generators and file formats.
//!
//! Input graphs are undirected, simple and connected with a 0/1 adjacency
//! matrix. Quotient graphs reuse [`Graph`] with `directed = true`, real
//! weights and possibly loops.

use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Matrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adj: Matrix,
    directed: bool,
    labels: Option<Vec<String>>,
}

/// An ordered (target, source) pair: the walk starts at `source` and stops on
/// first reaching `target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexPair {
    pub target: usize,
    pub source: usize,
}

impl VertexPair {
    pub fn new(g: &Graph, target: usize, source: usize) -> Result<Self> {
        g.check_vertex(target)?;
        g.check_vertex(source)?;
        Ok(VertexPair { target, source })
    }
}

impl Graph {
    /// Builds a simple undirected graph on `n` vertices from an edge list.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        let mut adj = Matrix::zeros(n, n);
        let mut seen = HashSet::with_capacity(edges.len());
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::IndexOutOfRange { index: x, n });
                }
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::DuplicateEdge(u, v));
            }
            adj[(u, v)] = 1.0;
            adj[(v, u)] = 1.0;
        }
        let g = Graph {
            adj,
            directed: false,
            labels: None,
        };
        g.require_connected()?;
        Ok(g)
    }

    /// Builds a graph from an explicit adjacency matrix.
    ///
    /// Undirected graphs must be symmetric 0/1 with zero diagonal. Directed
    /// graphs (quotients) may carry any non-negative weights, loops included.
    /// Either way the graph must be (strongly) connected.
    pub fn from_adjacency(adj: Matrix, directed: bool) -> Result<Graph> {
        if !adj.is_square() {
            return Err(Error::DimensionMismatch {
                expected: adj.rows(),
                found: adj.cols(),
            });
        }
        if adj.rows() == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        if adj.entries().any(|a| !(a >= 0.0) || !a.is_finite()) {
            return Err(Error::InvalidGraph(
                "adjacency entries must be finite and non-negative".into(),
            ));
        }
        if !directed {
            if !adj.is_symmetric() {
                return Err(Error::InvalidGraph("undirected adjacency is not symmetric".into()));
            }
            if adj.entries().any(|a| a != 0.0 && a != 1.0) {
                return Err(Error::InvalidGraph("undirected adjacency must be 0/1".into()));
            }
            if (0..adj.rows()).any(|i| adj[(i, i)] != 0.0) {
                return Err(Error::InvalidGraph("undirected graph has a loop".into()));
            }
        }
        let g = Graph {
            adj,
            directed,
            labels: None,
        };
        g.require_connected()?;
        Ok(g)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Graph> {
        if labels.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.adj.rows()
    }

    pub fn adjacency(&self) -> &Matrix {
        &self.adj
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: v,
                n: self.n(),
            })
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[(u, v)] != 0.0
    }

    /// Out-neighbours of `u` (for undirected graphs, simply the neighbours).
    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj
            .row(u)
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0.0)
            .map(|(v, _)| v)
    }

    /// Weighted degree (row sum).
    pub fn degree(&self, u: usize) -> f64 {
        self.adj.row(u).iter().sum()
    }

    pub fn degrees(&self) -> Vec<f64> {
        (0..self.n()).map(|u| self.degree(u)).collect()
    }

    /// Number of undirected edges (input graphs only).
    pub fn edge_count(&self) -> usize {
        let twice: f64 = self.adj.entries().sum();
        (twice / 2.0).round() as usize
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut out = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Breadth-first distances from `source` following out-edges; `None` for
    /// unreachable vertices.
    pub fn distances_from(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap_or(0);
            for v in self.neighbors(u) {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        let forward = self.distances_from(0).iter().all(Option::is_some);
        if !forward || !self.directed {
            return forward;
        }
        Graph {
            adj: self.adj.transpose(),
            directed: true,
            labels: None,
        }
        .distances_from(0)
        .iter()
        .all(Option::is_some)
    }

    fn require_connected(&self) -> Result<()> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(Error::DisconnectedGraph)
        }
    }

    /// `Some(k)` if every vertex has degree `k`.
    pub fn regular_degree(&self) -> Option<usize> {
        let degs = self.degrees();
        let k = degs[0];
        degs.iter().all(|&d| d == k).then_some(k as usize)
    }

    /// Two-colouring of a bipartite graph, `None` otherwise.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let mut side: Vec<Option<bool>> = vec![None; self.n()];
        side[0] = Some(false);
        let mut queue = VecDeque::from([0]);
        while let Some(u) = queue.pop_front() {
            let s = side[u]?;
            for v in self.neighbors(u) {
                match side[v] {
                    None => {
                        side[v] = Some(!s);
                        queue.push_back(v);
                    }
                    Some(t) if t == s => return None,
                    Some(_) => {}
                }
            }
        }
        side.into_iter().collect()
    }

    /// Bipartite with constant degree on each side (regular bipartite
    /// graphs count as biregular).
    pub fn is_biregular(&self) -> bool {
        let Some(side) = self.bipartition() else {
            return false;
        };
        let degs = self.degrees();
        [false, true].iter().all(|&s| {
            let mut it = (0..self.n()).filter(|&v| side[v] == s).map(|v| degs[v]);
            match it.next() {
                Some(first) => it.all(|d| d == first),
                None => true,
            }
        })
    }

    /// Length of a shortest cycle, `None` for forests.
    pub fn girth(&self) -> Option<usize> {
        let n = self.n();
        let mut best: Option<usize> = None;
        for s in 0..n {
            let mut dist = vec![usize::MAX; n];
            let mut parent = vec![usize::MAX; n];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for v in self.neighbors(u) {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        parent[v] = u;
                        queue.push_back(v);
                    } else if parent[u] != v {
                        let len = dist[u] + dist[v] + 1;
                        best = Some(best.map_or(len, |b| b.min(len)));
                    }
                }
            }
        }
        best
    }
}

/// Graph families with a frozen vertex ordering.
///
/// * `Cycle(n)`: `0..n` around the cycle.
/// * `Complete(n)`.
/// * `CompleteBipartite(a, b)`: `0..a` on one side, `a..a+b` on the other.
/// * `Hypercube(d)`: binary-counter order, `u ~ v` iff they differ in one bit.
/// * `Petersen`: outer 5-cycle `0..5`, spokes `i ~ i+5`, inner pentagram
///   `5+i ~ 5+(i+2)%5`.
/// * `Star(m)`: centre `0`, leaves `1..=m`.
/// * `Path(n)`: `0..n` along the path.
/// * `Wheel(n)`: the cone over `Cycle(n)`; rim `0..n`, apex `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Cycle(usize),
    Complete(usize),
    CompleteBipartite(usize, usize),
    Hypercube(usize),
    Petersen,
    Star(usize),
    Path(usize),
    Wheel(usize),
}

impl Family {
    /// Parses a family name and its integer parameters.
    pub fn parse(name: &str, params: &[usize]) -> Result<Family> {
        let arity = |k: usize| -> Result<()> {
            if params.len() == k {
                Ok(())
            } else {
                Err(Error::BadParams(format!(
                    "{name} expects {k} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        let fam = match name.to_ascii_lowercase().as_str() {
            "cycle" => {
                arity(1)?;
                Family::Cycle(params[0])
            }
            "complete" => {
                arity(1)?;
                Family::Complete(params[0])
            }
            "complete_bipartite" | "complete-bipartite" | "bipartite" => {
                arity(2)?;
                Family::CompleteBipartite(params[0], params[1])
            }
            "hypercube" => {
                arity(1)?;
                Family::Hypercube(params[0])
            }
            "petersen" => {
                arity(0)?;
                Family::Petersen
            }
            "star" => {
                arity(1)?;
                Family::Star(params[0])
            }
            "path" => {
                arity(1)?;
                Family::Path(params[0])
            }
            "wheel" => {
                arity(1)?;
                Family::Wheel(params[0])
            }
            _ => return Err(Error::UnknownFamily(name.to_string())),
        };
        Ok(fam)
    }

    pub fn name(&self) -> String {
        match *self {
            Family::Cycle(n) => format!("C{n}"),
            Family::Complete(n) => format!("K{n}"),
            Family::CompleteBipartite(a, b) => format!("K{a},{b}"),
            Family::Hypercube(d) => format!("Q{d}"),
            Family::Petersen => "Petersen".to_string(),
            Family::Star(m) => format!("K1,{m}"),
            Family::Path(n) => format!("P{n}"),
            Family::Wheel(n) => format!("W{n}"),
        }
    }

    /// Regular families.
    pub fn is_regular(&self) -> bool {
        match *self {
            Family::Cycle(_) | Family::Complete(_) | Family::Hypercube(_) | Family::Petersen => true,
            Family::CompleteBipartite(a, b) => a == b,
            Family::Path(n) => n == 2,
            Family::Star(m) => m == 1,
            Family::Wheel(n) => n == 3,
        }
    }

    /// Families that are distance-regular for every valid parameter.
    pub fn is_distance_regular(&self) -> bool {
        match *self {
            Family::Cycle(_)
            | Family::Complete(_)
            | Family::Hypercube(_)
            | Family::Petersen
            | Family::CompleteBipartite(..) => self.is_regular(),
            Family::Path(n) => n == 2,
            Family::Star(m) => m == 1,
            Family::Wheel(n) => n == 3,
        }
    }

    pub fn generate(&self) -> Result<Graph> {
        match *self {
            Family::Cycle(n) => {
                if n < 3 {
                    return Err(Error::BadParams(format!("cycle needs n >= 3, got {n}")));
                }
                Graph::from_edges(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>())
            }
            Family::Complete(n) => {
                if n < 2 {
                    return Err(Error::BadParams(format!("complete graph needs n >= 2, got {n}")));
                }
                let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
                Graph::from_edges(n, &edges)
            }
            Family::CompleteBipartite(a, b) => {
                if a < 1 || b < 1 {
                    return Err(Error::BadParams(format!(
                        "complete bipartite graph needs a, b >= 1, got {a}, {b}"
                    )));
                }
                let edges: Vec<_> = (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v))).collect();
                Graph::from_edges(a + b, &edges)
            }
            Family::Hypercube(d) => {
                if !(1..=16).contains(&d) {
                    return Err(Error::BadParams(format!("hypercube needs 1 <= d <= 16, got {d}")));
                }
                let n = 1usize << d;
                let edges: Vec<_> = (0..n)
                    .flat_map(|u| (0..d).map(move |bit| (u, u ^ (1 << bit))))
                    .filter(|&(u, v)| u < v)
                    .collect();
                Graph::from_edges(n, &edges)
            }
            Family::Petersen => {
                let mut edges = Vec::with_capacity(15);
                for i in 0..5 {
                    edges.push((i, (i + 1) % 5));
                    edges.push((i, i + 5));
                    edges.push((5 + i, 5 + (i + 2) % 5));
                }
                Graph::from_edges(10, &edges)
            }
            Family::Star(m) => {
                if m < 1 {
                    return Err(Error::BadParams("star needs m >= 1".into()));
                }
                Graph::from_edges(m + 1, &(1..=m).map(|v| (0, v)).collect::<Vec<_>>())
            }
            Family::Path(n) => {
                if n < 2 {
                    return Err(Error::BadParams(format!("path needs n >= 2, got {n}")));
                }
                Graph::from_edges(n, &(0..n - 1).map(|i| (i, i + 1)).collect::<Vec<_>>())
            }
            Family::Wheel(n) => cone(&Family::Cycle(n).generate()?),
        }
    }
}

/// Generates a family instance by name.
pub fn generate(family: &str, params: &[usize]) -> Result<Graph> {
    Family::parse(family, params)?.generate()
}

/// The cone over `g`: a new apex with index `g.n()` joined to every vertex.
pub fn cone(g: &Graph) -> Result<Graph> {
    if g.is_directed() {
        return Err(Error::InvalidGraph("cone requires an undirected graph".into()));
    }
    let n = g.n();
    let mut edges = g.edges();
    edges.extend((0..n).map(|v| (v, n)));
    Graph::from_edges(n + 1, &edges)
}

/// Every instance swept by the verification suites.
pub fn verification_families() -> Vec<Family> {
    let mut out = Vec::new();
    out.extend((3..=12).map(Family::Cycle));
    out.extend((2..=8).map(Family::Complete));
    for a in 1..=5 {
        for b in a..=5 {
            out.push(Family::CompleteBipartite(a, b));
        }
    }
    out.extend((2..=4).map(Family::Hypercube));
    out.push(Family::Petersen);
    out.extend((2..=8).map(Family::Path));
    out.extend((4..=8).map(Family::Wheel));
    out.extend((1..=6).map(Family::Star));
    out
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

/// Parses the edge-list format: one `u v` pair per line, `#` comments, and an
/// optional `n <count>` header (otherwise `n` is the largest index plus one).
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse = |s: &str| {
            usize::from_str(s)
                .map_err(|_| Error::Parse(format!("line {}: bad integer `{s}`", lineno + 1)))
        };
        match fields.as_slice() {
            ["n", count] => {
                if n.is_some() || !edges.is_empty() {
                    return Err(Error::Parse(format!(
                        "line {}: `n` header must come first",
                        lineno + 1
                    )));
                }
                n = Some(parse(count)?);
            }
            [u, v] => edges.push((parse(u)?, parse(v)?)),
            _ => {
                return Err(Error::Parse(format!(
                    "line {}: expected `u v` or `n <count>`",
                    lineno + 1
                )))
            }
        }
    }
    let n = match n {
        Some(n) => n,
        None => edges
            .iter()
            .map(|&(u, v)| u.max(v) + 1)
            .max()
            .ok_or_else(|| Error::Parse("edge list is empty".into()))?,
    };
    Graph::from_edges(n, &edges)
}

pub fn to_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "n {}", g.n());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    directed: bool,
    adj: Vec<Vec<serde_json::Number>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

/// Renders integral weights as JSON integers so 0/1 matrices stay exact.
pub(crate) fn json_number(x: f64) -> serde_json::Number {
    if x.fract() == 0.0 && x.abs() < 9.0e15 {
        serde_json::Number::from(x as i64)
    } else {
        serde_json::Number::from_f64(x).unwrap_or_else(|| serde_json::Number::from(0))
    }
}

pub fn to_json_value(g: &Graph) -> serde_json::Value {
    let doc = GraphJson {
        n: g.n(),
        directed: g.is_directed(),
        adj: g
            .adjacency()
            .to_rows()
            .into_iter()
            .map(|row| row.into_iter().map(json_number).collect())
            .collect(),
        labels: g.labels.clone(),
    };
    serde_json::to_value(doc).expect("graph serializes")
}

pub fn to_json(g: &Graph) -> String {
    serde_json::to_string(&to_json_value(g)).expect("graph serializes")
}

pub fn from_json_value(value: &serde_json::Value) -> Result<Graph> {
    let doc: GraphJson = serde_json::from_value(value.clone())?;
    if doc.adj.len() != doc.n {
        return Err(Error::DimensionMismatch {
            expected: doc.n,
            found: doc.adj.len(),
        });
    }
    let rows: Vec<Vec<f64>> = doc
        .adj
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    x.as_f64()
                        .ok_or_else(|| Error::Parse(format!("bad adjacency entry {x}")))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let adj = Matrix::from_rows(&rows)?;
    if adj.cols() != doc.n {
        return Err(Error::DimensionMismatch {
            expected: doc.n,
            found: adj.cols(),
        });
    }
    let g = Graph::from_adjacency(adj, doc.directed)?;
    match doc.labels {
        Some(labels) => g.with_labels(labels),
        None => Ok(g),
    }
}

pub fn from_json(text: &str) -> Result<Graph> {
    from_json_value(&serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_is_k2() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        assert_eq!(g.adjacency().to_rows(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn isolated_vertex_is_disconnected() {
        assert_eq!(Graph::from_edges(3, &[(0, 1)]), Err(Error::DisconnectedGraph));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            Graph::from_edges(2, &[(0, 2)]),
            Err(Error::IndexOutOfRange { index: 2, n: 2 })
        );
        assert_eq!(
            Graph::from_edges(2, &[(0, 1), (1, 0)]),
            Err(Error::DuplicateEdge(1, 0))
        );
        assert!(matches!(
            Graph::from_edges(2, &[(0, 0), (0, 1)]),
            Err(Error::InvalidGraph(_))
        ));
    }

    #[test]
    fn cube_from_edges_is_cubic() {
        let edges: Vec<_> = (0..8usize)
            .flat_map(|u| [1, 2, 4].map(|b| (u, u ^ b)))
            .filter(|(u, v)| u < v)
            .collect();
        let g = Graph::from_edges(8, &edges).unwrap();
        assert_eq!(g.regular_degree(), Some(3));
    }

    #[test]
    fn generated_sizes() {
        let c5 = generate("cycle", &[5]).unwrap();
        assert_eq!((c5.n(), c5.regular_degree()), (5, Some(2)));
        let q3 = generate("hypercube", &[3]).unwrap();
        assert_eq!((q3.n(), q3.edge_count()), (8, 12));
        let p = generate("petersen", &[]).unwrap();
        assert_eq!((p.n(), p.edge_count(), p.regular_degree()), (10, 15, Some(3)));
    }

    #[test]
    fn petersen_girth_by_exhaustive_search() {
        // Independent check: no triangle and no 4-cycle among all vertex
        // tuples, but some 5-cycle exists.
        let p = Family::Petersen.generate().unwrap();
        let e = |a: usize, b: usize| p.has_edge(a, b);
        let n = p.n();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if a != c && e(a, b) && e(b, c) {
                        assert!(!e(c, a), "triangle {a} {b} {c}");
                        for d in 0..n {
                            if d != b && e(c, d) {
                                assert!(!e(d, a), "4-cycle {a} {b} {c} {d}");
                            }
                        }
                    }
                }
            }
        }
        assert!(e(0, 1) && e(1, 2) && e(2, 3) && e(3, 4) && e(4, 0));
        assert_eq!(p.girth(), Some(5));
    }

    #[test]
    fn unknown_family_and_bad_params() {
        assert!(matches!(generate("moebius", &[4]), Err(Error::UnknownFamily(_))));
        assert!(matches!(generate("cycle", &[2]), Err(Error::BadParams(_))));
        assert!(matches!(generate("cycle", &[]), Err(Error::BadParams(_))));
    }

    #[test]
    fn cones() {
        let k4 = cone(&generate("cycle", &[3]).unwrap()).unwrap();
        assert_eq!(k4, generate("complete", &[4]).unwrap());
        let k3 = cone(&generate("complete", &[2]).unwrap()).unwrap();
        assert_eq!(k3, generate("complete", &[3]).unwrap());
        let w = cone(&generate("cycle", &[5]).unwrap()).unwrap();
        assert_eq!(w.n(), 6);
        assert_eq!(w.degree(5), 5.0);
        assert!((0..5).all(|v| w.degree(v) == 3.0));
    }

    #[test]
    fn every_family_is_valid() {
        for fam in verification_families() {
            let g = fam.generate().unwrap();
            assert!(g.is_connected(), "{}", fam.name());
            assert!(g.adjacency().is_symmetric(), "{}", fam.name());
            assert_eq!(g.regular_degree().is_some(), fam.is_regular(), "{}", fam.name());
        }
    }

    #[test]
    fn edge_list_header_and_comments() {
        let g = parse_edge_list("# triangle\nn 3\n0 1\n1 2 # last\n2 0\n").unwrap();
        assert_eq!(g, generate("complete", &[3]).unwrap());
        let h = parse_edge_list("0 1\n1 2\n").unwrap();
        assert_eq!(h.n(), 3);
        assert!(matches!(parse_edge_list("0 1 2\n"), Err(Error::Parse(_))));
    }

    #[test]
    fn json_renders_integers_exactly() {
        let g = generate("path", &[2]).unwrap();
        assert_eq!(to_json(&g), r#"{"n":2,"directed":false,"adj":[[0,1],[1,0]]}"#);
    }

    #[test]
    fn biregularity() {
        assert!(generate("star", &[3]).unwrap().is_biregular());
        assert!(generate("complete_bipartite", &[2, 5]).unwrap().is_biregular());
        assert!(!generate("path", &[4]).unwrap().is_biregular());
        assert!(!generate("cycle", &[5]).unwrap().is_biregular());
    }
}
