//! Reference solvers and random instances shared by the integration tests.
//!
//! The oracles here deliberately avoid the library's solver: the simple walk
//! is solved in exact rational arithmetic, and MERW by Gauss-Seidel sweeps on
//! the first-step equations with an independently computed Perron vector.

#![allow(dead_code)]

use hitwalk_core::graphs::Graph;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

/// Exact simple-walk hitting times to `target`, from the integer system
/// `deg(u)·h_u − Σ_{x ~ u, x ≠ target} h_x = deg(u)` for `u ≠ target`.
pub fn exact_simple(g: &Graph, target: usize) -> Vec<BigRational> {
    let n = g.n();
    let others: Vec<usize> = (0..n).filter(|&u| u != target).collect();
    let m = others.len();
    let pos = |x: usize| others.iter().position(|&y| y == x);
    let mut a = vec![vec![BigRational::zero(); m + 1]; m];
    for (r, &u) in others.iter().enumerate() {
        let deg = g.neighbors(u).count() as i64;
        a[r][r] = BigRational::from_integer(BigInt::from(deg));
        for x in g.neighbors(u) {
            if let Some(c) = pos(x) {
                a[r][c] -= BigRational::one();
            }
        }
        a[r][m] = BigRational::from_integer(BigInt::from(deg));
    }
    for col in 0..m {
        let piv = (col..m).find(|&r| !a[r][col].is_zero()).expect("system is nonsingular");
        a.swap(col, piv);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x = &*x / &p;
        }
        for r in 0..m {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..=m {
                    let delta = &f * &a[col][c];
                    a[r][c] -= delta;
                }
            }
        }
    }
    let mut out = vec![BigRational::zero(); n];
    for (r, &u) in others.iter().enumerate() {
        out[u] = a[r][m].clone();
    }
    out
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().expect("finite rational")
}

/// Perron vector of `A` by plain power iteration on `A + I`, normalized to
/// unit length.
pub fn reference_perron(g: &Graph) -> (f64, Vec<f64>) {
    let n = g.n();
    let a = g.adjacency();
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut lambda = 0.0;
    for _ in 0..1_000_000 {
        let mut y: Vec<f64> = (0..n).map(|i| x[i] + (0..n).map(|j| a[(i, j)] * x[j]).sum::<f64>()).collect();
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        y.iter_mut().for_each(|v| *v /= norm);
        let change = x.iter().zip(&y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        x = y;
        let ax: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[(i, j)] * x[j]).sum()).collect();
        lambda = ax.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>();
        if change < 1e-14 {
            break;
        }
    }
    (lambda, x)
}

/// MERW hitting times to `target` by Gauss-Seidel on
/// `h_u = 1 + Σ_x P(u → x) h_x`, where `P(u → x) = ν_x / Σ_{y ~ u} ν_y`.
pub fn iterative_merw(g: &Graph, target: usize) -> Vec<f64> {
    let n = g.n();
    let (_, nu) = reference_perron(g);
    let nbrs: Vec<Vec<usize>> = (0..n).map(|u| g.neighbors(u).collect()).collect();
    let mut h = vec![0.0; n];
    for _ in 0..10_000_000 {
        let mut delta: f64 = 0.0;
        for u in 0..n {
            if u == target {
                continue;
            }
            let total: f64 = nbrs[u].iter().map(|&x| nu[x]).sum();
            let next = 1.0 + nbrs[u].iter().map(|&x| nu[x] * h[x]).sum::<f64>() / total;
            delta = delta.max((next - h[u]).abs());
            h[u] = next;
        }
        let scale = h.iter().copied().fold(1.0, f64::max);
        if delta <= 1e-14 * scale {
            break;
        }
    }
    h
}

/// Relative-or-absolute closeness used when comparing with the oracles.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

/// A random spanning tree on `n` vertices plus each remaining pair with
/// probability `p`.
pub fn random_connected(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut adj = vec![vec![false; n]; n];
    for i in 1..n {
        let j = rng.random_range(0..i);
        let (u, v) = (order[i], order[j]);
        adj[u][v] = true;
        adj[v][u] = true;
    }
    for u in 0..n {
        for v in 0..u {
            if !adj[u][v] && rng.random_bool(p) {
                adj[u][v] = true;
                adj[v][u] = true;
            }
        }
    }
    from_bool(&adj)
}

/// A connected circulant `C_n(S)` with a random jump set.
pub fn random_circulant(rng: &mut impl Rng, n: usize) -> Graph {
    loop {
        let jumps: Vec<usize> = (1..=n / 2).filter(|_| rng.random_bool(0.35)).collect();
        if jumps.is_empty() {
            continue;
        }
        let mut adj = vec![vec![false; n]; n];
        for u in 0..n {
            for &s in &jumps {
                let v = (u + s) % n;
                adj[u][v] = true;
                adj[v][u] = true;
            }
        }
        let g = from_bool_unchecked(&adj);
        if let Some(g) = g {
            return g;
        }
    }
}

/// A connected simple `k`-regular graph from the pairing model (retrying
/// until the pairing is simple and connected).
pub fn random_regular(rng: &mut impl Rng, n: usize, k: usize) -> Graph {
    assert!((n * k).is_multiple_of(2) && k < n);
    loop {
        let mut points: Vec<usize> = (0..n * k).map(|i| i / k).collect();
        points.shuffle(rng);
        let mut adj = vec![vec![false; n]; n];
        let mut ok = true;
        for pair in points.chunks(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v || adj[u][v] {
                ok = false;
                break;
            }
            adj[u][v] = true;
            adj[v][u] = true;
        }
        if ok {
            if let Some(g) = from_bool_unchecked(&adj) {
                return g;
            }
        }
    }
}

fn edges_of(adj: &[Vec<bool>]) -> Vec<(usize, usize)> {
    let n = adj.len();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if adj[u][v] {
                edges.push((u, v));
            }
        }
    }
    edges
}

fn from_bool(adj: &[Vec<bool>]) -> Graph {
    Graph::from_edges(adj.len(), &edges_of(adj)).expect("connected by construction")
}

fn from_bool_unchecked(adj: &[Vec<bool>]) -> Option<Graph> {
    Graph::from_edges(adj.len(), &edges_of(adj)).ok()
}

/// Largest `|x|` in a slice of rationals, as a float.
pub fn max_abs(xs: &[BigRational]) -> f64 {
    xs.iter().map(|x| to_f64(&x.abs())).fold(0.0, f64::max)
}
