//! Named consistency checks between the shortcut formulas and the direct
//! absorbing-chain solve, run on one graph or on the family suite.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::{self, Graph};
use crate::numerics::{self, Matrix, PerronData};
use crate::partitions::{
    self, check_equitable_with_nu, check_weight_equitable, coarsest_stabilized, quotient_hitting_times,
    weight_from_equitable, Partition, QuotientKind,
};
use crate::regularity::{self, DiagonalColoring, LabelFunction, RaoOutcome};
use crate::schemes;
use crate::walks::{hit_full, hitting_matrix, transition_merw, transition_simple, WalkKind};

/// Tolerance for hitting-time agreement.
pub const HIT_TOLERANCE: f64 = 1e-8;
/// Tolerance for quotient-matrix identities.
pub const MATRIX_TOLERANCE: f64 = 1e-9;
/// Tolerance for `‖T_merw − T_simple‖∞`.
pub const TRANSITION_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckName {
    /// `B* = D_ν B D_ν⁻¹` on equitable partitions with block-constant ν.
    EqRw,
    /// Equitable quotient hitting times against the simple-walk solve.
    StabHt,
    /// Weight quotient hitting times against the MERW solve.
    StabHtW,
    /// Intersection-array hitting times against both solves.
    DbrgHt,
    /// `2e/k − 1` for adjacent pairs where the neighbourhood is one block.
    GenR,
    /// Closed forms on the cone over a regular graph.
    Cone,
    /// MERW equals the simple walk on regular and biregular graphs.
    MerwEqSimple,
    /// Distance-scheme relation hitting times against the solve.
    Scheme,
}

impl CheckName {
    pub const ALL: [CheckName; 8] = [
        CheckName::EqRw,
        CheckName::StabHt,
        CheckName::StabHtW,
        CheckName::DbrgHt,
        CheckName::GenR,
        CheckName::Cone,
        CheckName::MerwEqSimple,
        CheckName::Scheme,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckName::EqRw => "eqRw",
            CheckName::StabHt => "stabHt",
            CheckName::StabHtW => "stabHtW",
            CheckName::DbrgHt => "dbrgHT",
            CheckName::GenR => "genR",
            CheckName::Cone => "cone",
            CheckName::MerwEqSimple => "merw-eq-simple",
            CheckName::Scheme => "scheme",
        }
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::BadParams(format!("unknown check `{s}`")))
    }
}

impl Serialize for CheckName {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub check: CheckName,
    pub graph: String,
    pub status: Status,
    /// Largest deviation seen across all compared quantities.
    pub max_residual: f64,
    pub tolerance: f64,
    /// Number of compared quantities.
    pub compared: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
}

/// A graph under test, optionally with a partition to use instead of the
/// coarsest refinement, and a quotient matrix it is claimed to produce.
#[derive(Debug, Clone)]
pub struct Subject {
    pub name: String,
    pub graph: Graph,
    pub partition: Option<Partition>,
    pub quotient: Option<Matrix>,
}

impl Subject {
    pub fn new(name: impl Into<String>, graph: Graph) -> Subject {
        Subject {
            name: name.into(),
            graph,
            partition: None,
            quotient: None,
        }
    }

    /// Reads a graph JSON document that may also carry `"partition"` and
    /// `"quotient"` fields.
    pub fn from_json(name: impl Into<String>, text: &str) -> Result<Subject> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let graph = graphs::from_json_value(&value)?;
        let partition = match value.get("partition") {
            Some(p) => Some(Partition::from_json(&p.to_string(), graph.n())?),
            None => None,
        };
        let quotient = match value.get("quotient") {
            Some(q) => Some(serde_json::from_value::<Matrix>(q.clone())?),
            None => None,
        };
        Ok(Subject {
            name: name.into(),
            graph,
            partition,
            quotient,
        })
    }
}

struct Tally {
    check: CheckName,
    tolerance: f64,
    max_residual: f64,
    compared: usize,
    value: Option<f64>,
    witness: Option<serde_json::Value>,
}

impl Tally {
    fn new(check: CheckName, tolerance: f64) -> Tally {
        Tally {
            check,
            tolerance,
            max_residual: 0.0,
            compared: 0,
            value: None,
            witness: None,
        }
    }

    /// Records `|got − want|`, keeping the first out-of-tolerance pair as the
    /// witness.
    fn compare(&mut self, got: f64, want: f64, context: impl FnOnce() -> serde_json::Value) {
        let diff = (got - want).abs();
        let diff = if diff.is_nan() { f64::INFINITY } else { diff };
        self.compared += 1;
        self.max_residual = self.max_residual.max(diff);
        if diff > self.tolerance && self.witness.is_none() {
            let mut w = context();
            if let serde_json::Value::Object(map) = &mut w {
                map.insert("got".into(), serde_json::json!(got));
                map.insert("expected".into(), serde_json::json!(want));
            }
            self.witness = Some(w);
        }
    }

    fn fail(&mut self, witness: serde_json::Value) {
        if self.witness.is_none() {
            self.witness = Some(witness);
        }
        self.max_residual = f64::INFINITY;
    }

    fn finish(self, graph: &str) -> CheckResult {
        let status = if self.witness.is_some() {
            Status::Fail
        } else if self.compared == 0 {
            Status::NotApplicable
        } else {
            Status::Pass
        };
        CheckResult {
            check: self.check,
            graph: graph.to_string(),
            status,
            max_residual: self.max_residual,
            tolerance: self.tolerance,
            compared: self.compared,
            value: self.value,
            witness: self.witness,
        }
    }
}

pub fn run_check(check: CheckName, s: &Subject) -> Result<CheckResult> {
    let tally = match check {
        CheckName::EqRw => eq_rw(s)?,
        CheckName::StabHt => stab_ht(s, WalkKind::Simple)?,
        CheckName::StabHtW => stab_ht(s, WalkKind::Merw)?,
        CheckName::DbrgHt => dbrg_ht(s)?,
        CheckName::GenR => gen_r(s)?,
        CheckName::Cone => cone(s)?,
        CheckName::MerwEqSimple => merw_eq_simple(s)?,
        CheckName::Scheme => scheme(s)?,
    };
    Ok(tally.finish(&s.name))
}

pub fn run_checks(checks: &[CheckName], subjects: &[Subject]) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for s in subjects {
        for &c in checks {
            out.push(run_check(c, s)?);
        }
    }
    Ok(out)
}

/// One subject per graph of the family sweep.
pub fn family_subjects() -> Result<Vec<Subject>> {
    graphs::verification_families()
        .into_iter()
        .map(|f| Ok(Subject::new(f.name(), f.generate()?)))
        .collect()
}

/// Partitions to examine: the supplied one, or the coarsest at every centre.
fn partitions_for(s: &Subject, kind: QuotientKind, perron: &PerronData) -> Result<Vec<Partition>> {
    match &s.partition {
        Some(p) => Ok(vec![p.clone()]),
        None => (0..s.graph.n())
            .map(|o| coarsest_stabilized(&s.graph, o, kind, Some(perron)))
            .collect(),
    }
}

fn witness_json(w: &partitions::Witness) -> serde_json::Value {
    serde_json::to_value(w).unwrap_or(serde_json::Value::Null)
}

fn eq_rw(s: &Subject) -> Result<Tally> {
    let g = &s.graph;
    let perron = numerics::perron(g)?;
    let mut t = Tally::new(CheckName::EqRw, MATRIX_TOLERANCE);
    for p in partitions_for(s, QuotientKind::Equitable, &perron)? {
        let b = match check_equitable_with_nu(g, &p, &perron) {
            Ok(b) => b,
            Err(w) => {
                t.fail(serde_json::json!({ "not_equitable": witness_json(&w) }));
                continue;
            }
        };
        let Some(nu) = &b.nu_block else { continue };
        let predicted = weight_from_equitable(&b.matrix, nu);
        match check_weight_equitable(g, &p, &perron) {
            Ok(bs) => {
                for i in 0..predicted.rows() {
                    for j in 0..predicted.cols() {
                        t.compare(bs.matrix[(i, j)], predicted[(i, j)], || {
                            serde_json::json!({ "center": p.center(), "row": i, "column": j })
                        });
                    }
                }
            }
            Err(w) => t.fail(serde_json::json!({ "not_weight_equitable": witness_json(&w) })),
        }
    }
    Ok(t)
}

fn stab_ht(s: &Subject, walk: WalkKind) -> Result<Tally> {
    let g = &s.graph;
    let (check, kind) = match walk {
        WalkKind::Simple => (CheckName::StabHt, QuotientKind::Equitable),
        WalkKind::Merw => (CheckName::StabHtW, QuotientKind::Weight),
    };
    let perron = numerics::perron(g)?;
    let mut t = Tally::new(check, HIT_TOLERANCE);
    for p in partitions_for(s, kind, &perron)? {
        let Some(o) = p.center() else {
            t.fail(serde_json::json!({ "error": "partition has no centre" }));
            continue;
        };
        let mut q = match partitions::check(g, &p, kind, &perron) {
            Ok(q) => q,
            Err(w) => {
                t.fail(serde_json::json!({ "center": o, "not_stabilized": witness_json(&w) }));
                continue;
            }
        };
        if let Some(claimed) = &s.quotient {
            if claimed.rows() != q.matrix.rows() || claimed.cols() != q.matrix.cols() {
                t.fail(serde_json::json!({
                    "quotient_shape": [claimed.rows(), claimed.cols()],
                    "expected_shape": [q.matrix.rows(), q.matrix.cols()],
                }));
                continue;
            }
            for i in 0..claimed.rows() {
                for j in 0..claimed.cols() {
                    if !partitions::approx_eq(claimed[(i, j)], q.matrix[(i, j)], MATRIX_TOLERANCE) {
                        t.fail(serde_json::json!({
                            "quotient_entry": [i, j],
                            "claimed": claimed[(i, j)],
                            "computed": q.matrix[(i, j)],
                        }));
                    }
                }
            }
            q.matrix = claimed.clone();
        }
        let times = p.lift(&quotient_hitting_times(&q)?);
        let full = hit_full(g, o, walk)?;
        for (u, (a, b)) in times.iter().zip(&full.times).enumerate() {
            t.compare(*a, *b, || serde_json::json!({ "target": o, "source": u }));
        }
    }
    Ok(t)
}

fn dbrg_ht(s: &Subject) -> Result<Tally> {
    let g = &s.graph;
    let mut t = Tally::new(CheckName::DbrgHt, HIT_TOLERANCE);
    let arrays = (0..g.n())
        .map(|v| regularity::intersection_array(g, v))
        .collect::<Result<Vec<_>>>()?;
    // MERW agrees with the simple walk only when every vertex is
    // distance-regularized; a lone regularized vertex (a path end, a wheel
    // apex) gives the simple-walk identity alone.
    let whole_graph = arrays.iter().all(|a| a.is_ok());
    let mut fulls = None;
    for (v, array) in arrays.into_iter().enumerate() {
        let Ok(array) = array else {
            continue;
        };
        let (simple, merw) = match &fulls {
            Some(x) => x,
            None => fulls.insert((
                hitting_matrix(&transition_simple(g)?)?,
                hitting_matrix(&transition_merw(g, &numerics::perron(g)?)?)?,
            )),
        };
        let dist = g.distances_from(v);
        for (u, du) in dist.iter().enumerate() {
            let du = du.ok_or(Error::DisconnectedGraph)?;
            if du == 0 {
                continue;
            }
            let h = regularity::hit_distance_regularized(&array, du)?;
            t.compare(h, simple[(v, u)], || serde_json::json!({ "target": v, "source": u, "walk": "simple" }));
            if whole_graph {
                t.compare(h, merw[(v, u)], || serde_json::json!({ "target": v, "source": u, "walk": "merw" }));
            }
            if du == array.d && t.value.is_none() {
                t.value = Some(h);
            }
        }
    }
    Ok(t)
}

fn gen_r(s: &Subject) -> Result<Tally> {
    let g = &s.graph;
    let mut t = Tally::new(CheckName::GenR, HIT_TOLERANCE);
    for v in 0..g.n() {
        let RaoOutcome::Applicable { value, .. } = regularity::rao_hitting(g, v)? else {
            continue;
        };
        t.value.get_or_insert(value);
        let full = hit_full(g, v, WalkKind::Simple)?;
        for u in g.neighbors(v) {
            t.compare(value, full.times[u], || serde_json::json!({ "target": v, "source": u }));
        }
    }
    Ok(t)
}

fn cone(s: &Subject) -> Result<Tally> {
    let base = &s.graph;
    let mut t = Tally::new(CheckName::Cone, HIT_TOLERANCE);
    if base.regular_degree().is_none() || base.is_directed() {
        return Ok(t);
    }
    let f = LabelFunction::distance(base, DiagonalColoring::Single)?;
    let closed = match regularity::cone_hitting(base, Some(&f)) {
        Ok(c) => c,
        // Not distance-regular: only the to-apex closed forms apply.
        Err(Error::InvalidLabelFunction(_)) => regularity::cone_hitting(base, None)?,
        Err(e) => return Err(e),
    };
    t.value = Some(closed.to_apex_merw);
    let g = graphs::cone(base)?;
    let simple = hitting_matrix(&transition_simple(&g)?)?;
    let merw = hitting_matrix(&transition_merw(&g, &numerics::perron(&g)?)?)?;
    for v in 0..g.n() {
        for u in 0..g.n() {
            let Some((hs, hm)) = closed.lookup(v, u) else { continue };
            t.compare(hs, simple[(v, u)], || serde_json::json!({ "target": v, "source": u, "walk": "simple" }));
            t.compare(hm, merw[(v, u)], || serde_json::json!({ "target": v, "source": u, "walk": "merw" }));
        }
    }
    Ok(t)
}

fn merw_eq_simple(s: &Subject) -> Result<Tally> {
    let g = &s.graph;
    let mut t = Tally::new(CheckName::MerwEqSimple, HIT_TOLERANCE);
    if !(g.regular_degree().is_some() || g.is_biregular()) {
        return Ok(t);
    }
    let ts = transition_simple(g)?;
    let tm = transition_merw(g, &numerics::perron(g)?)?;
    let gap = ts.matrix().max_abs_diff(tm.matrix());
    if gap > TRANSITION_TOLERANCE {
        t.fail(serde_json::json!({ "transition_gap": gap, "tolerance": TRANSITION_TOLERANCE }));
    }
    let hs = hitting_matrix(&ts)?;
    let hm = hitting_matrix(&tm)?;
    for v in 0..g.n() {
        for u in 0..g.n() {
            t.compare(hm[(v, u)], hs[(v, u)], || serde_json::json!({ "target": v, "source": u }));
        }
    }
    Ok(t)
}

fn scheme(s: &Subject) -> Result<Tally> {
    let g = &s.graph;
    let mut t = Tally::new(CheckName::Scheme, HIT_TOLERANCE);
    let Ok(scheme) = schemes::distance_scheme(g)? else {
        return Ok(t);
    };
    for i in 1..=scheme.d() {
        let Ok(gi) = scheme.union_graph(&[i]) else { continue };
        let full = hit_full(&gi, 0, WalkKind::Simple)?;
        for u in 1..g.n() {
            let j = scheme.label(0, u);
            let h = schemes::hit_relation_graph(&scheme, i, j)?;
            t.compare(h, full.times[u], || serde_json::json!({ "relation": i, "source": u }));
        }
        let adjacent = schemes::scheme_adjacent_hitting(&scheme, i);
        match adjacent {
            Ok(value) => {
                if i == 1 {
                    t.value = Some(value);
                }
            }
            Err(Error::CrossCheck(msg)) => t.fail(serde_json::json!({ "relation": i, "error": msg })),
            Err(e) => return Err(e),
        }
    }
    Ok(t)
}

/// Per-check roll-up over many graphs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub check: CheckName,
    pub status: Status,
    pub graphs: usize,
    pub passed: usize,
    pub failed: usize,
    pub max_residual: f64,
}

pub fn summarize(checks: &[CheckName], results: &[CheckResult]) -> Vec<CheckSummary> {
    checks
        .iter()
        .map(|&check| {
            let rows: Vec<&CheckResult> = results.iter().filter(|r| r.check == check).collect();
            let passed = rows.iter().filter(|r| r.status == Status::Pass).count();
            let failed = rows.iter().filter(|r| r.status == Status::Fail).count();
            let max_residual = rows
                .iter()
                .filter(|r| r.status != Status::NotApplicable)
                .map(|r| r.max_residual)
                .fold(0.0, f64::max);
            let status = if failed > 0 {
                Status::Fail
            } else if passed > 0 {
                Status::Pass
            } else {
                Status::NotApplicable
            };
            CheckSummary {
                check,
                status,
                graphs: rows.len(),
                passed,
                failed,
                max_residual,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn subject(family: &str, params: &[usize]) -> Subject {
        Subject::new(family, graphs::generate(family, params).unwrap())
    }

    #[test]
    fn names_round_trip() {
        for c in CheckName::ALL {
            assert_eq!(c.as_str().parse::<CheckName>().unwrap(), c);
        }
        assert!("nope".parse::<CheckName>().is_err());
    }

    #[test]
    fn all_checks_pass_on_petersen() {
        let s = subject("petersen", &[]);
        for c in CheckName::ALL {
            let r = run_check(c, &s).unwrap();
            assert_eq!(r.status, Status::Pass, "{c}: {r:?}");
            assert!(r.max_residual < 1e-8);
        }
    }

    #[test]
    fn lone_regularized_vertex_compares_simple_walk_only() {
        // The ends of P4 are distance-regularized but the inner vertices are
        // not, and MERW there differs from the simple walk (4 + √5 vs 5).
        let s = subject("path", &[4]);
        let r = run_check(CheckName::DbrgHt, &s).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert_eq!(r.compared, 6);
        let simple = hit_full(&s.graph, 0, WalkKind::Simple).unwrap();
        assert!((simple.times[1] - 5.0).abs() < 1e-9);
        let merw = hit_full(&s.graph, 0, WalkKind::Merw).unwrap();
        assert!((merw.times[1] - (4.0 + 5f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn k4_rao_value() {
        let r = run_check(CheckName::GenR, &subject("complete", &[4])).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert!((r.value.unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn inapplicable_checks() {
        let p4 = subject("path", &[4]);
        assert_eq!(run_check(CheckName::Cone, &p4).unwrap().status, Status::NotApplicable);
        assert_eq!(run_check(CheckName::Scheme, &p4).unwrap().status, Status::NotApplicable);
        let wheel = subject("wheel", &[5]);
        assert_eq!(run_check(CheckName::MerwEqSimple, &wheel).unwrap().status, Status::NotApplicable);
    }

    #[test]
    fn non_equitable_partition_fails_with_witness() {
        let mut s = subject("cycle", &[4]);
        s.partition = Some(Partition::centered(4, vec![vec![0], vec![1, 2, 3]]).unwrap());
        let r = run_check(CheckName::StabHt, &s).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert!(r.witness.is_some());
    }

    #[test]
    fn corrupted_quotient_fails() {
        let mut s = subject("hypercube", &[3]);
        s.partition = Some(Partition::centered(8, vec![vec![0], vec![1, 2, 4], vec![3, 5, 6], vec![7]]).unwrap());
        let mut q = Matrix::from_rows(&[
            vec![0.0, 1.0, 0.0, 0.0],
            vec![3.0, 0.0, 2.0, 0.0],
            vec![0.0, 2.0, 0.0, 3.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ])
        .unwrap();
        s.quotient = Some(q.clone());
        assert_eq!(run_check(CheckName::StabHt, &s).unwrap().status, Status::Pass);
        q[(2, 1)] = 1.0;
        s.quotient = Some(q);
        let r = run_check(CheckName::StabHt, &s).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.witness.unwrap()["quotient_entry"], serde_json::json!([2, 1]));
    }
}
