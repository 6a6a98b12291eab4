use serde_json::{json, Map, Value};

use symrig::algebra::LexIndex;
use symrig::gaingraph::GainGraph;
use symrig::matroid::{CombinatorialVerdict, CountingViolation};
use symrig::rigidity::{Flex, IrrepReport};
use symrig::scalar::{rational_to_string, Field, Rational};
use symrig::symmetry::GroupElement;

/// Result of the exhaustive counting oracle for one irrep.
pub enum Counting {
    NotRequested,
    Ok,
    Violated(CountingViolation),
    Skipped(usize),
}

pub fn rationals(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(rational_to_string(x))).collect())
}

pub fn irrep(g: &GroupElement) -> Value {
    json!(g.0)
}

pub fn irrep_report(r: &IrrepReport) -> Value {
    json!({
        "irrep": irrep(&r.irrep),
        "field": r.field,
        "rank": r.rank,
        "trivial": r.trivial,
        "flex": r.flex,
        "rigid": r.rigid,
    })
}

fn ids(graph_ids: impl IntoIterator<Item = symrig::gaingraph::EdgeId>) -> Value {
    Value::Array(graph_ids.into_iter().map(|e| json!(e.0)).collect())
}

fn counting(d: usize, c: &Counting) -> Option<Value> {
    let labels = LexIndex::new(d + 1, 2);
    match c {
        Counting::NotRequested => None,
        Counting::Ok => Some(json!({"status": "ok"})),
        Counting::Skipped(size) => Some(json!({"status": "skipped", "edges": size})),
        Counting::Violated(v) => {
            let alphas: Map<String, Value> = v
                .alphas
                .iter()
                .enumerate()
                .map(|(k, a)| (labels.label(k), json!(a)))
                .collect();
            Some(json!({
                "status": "violated",
                "edges": ids(v.edges.iter().copied()),
                "size": v.size,
                "bound": v.bound,
                "alphas": alphas,
            }))
        }
    }
}

/// The certificate document of one irrep.
pub fn verdict(d: usize, v: &CombinatorialVerdict, c: &Counting) -> Value {
    let decomposition: Map<String, Value> = v
        .labelled_parts(d)
        .into_iter()
        .map(|(label, part)| (label, ids(part)))
        .collect();
    let mut out = json!({
        "irrep": irrep(&v.irrep),
        "target": v.target,
        "rank": v.rank,
        "rigid": v.rigid,
        "deficiency": v.deficiency,
        "edgeCount": v.edge_count,
        "removedLoops": ids(v.removed_loops.iter().copied()),
        "decomposition": decomposition,
        "tightSet": ids(v.tight_set_ids()),
    });
    let obj = out.as_object_mut().expect("object");
    if let Some((edges, target)) = v.count_mismatch() {
        obj.insert("countMismatch".into(), json!({"edges": edges, "target": target}));
    }
    if !v.rigid {
        obj.insert(
            "violation".into(),
            json!({"kind": "rank", "target": v.target, "maxRank": v.rank}),
        );
    }
    if let Some(value) = counting(d, c) {
        obj.insert("counting".into(), value);
    }
    out
}

pub fn flex<T: Field>(graph: &GainGraph, f: &Flex<T>, d: usize) -> Value {
    let labels = LexIndex::new(d + 1, 2);
    let motions: Vec<Value> = (0..f.motions.len())
        .map(|m| {
            let per_vertex: Map<String, Value> = graph
                .vertex_names()
                .iter()
                .enumerate()
                .map(|(v, name)| {
                    let screw: Map<String, Value> = f
                        .screw(m, v)
                        .iter()
                        .enumerate()
                        .map(|(k, x)| (labels.label(k), x.to_json()))
                        .collect();
                    (name.clone(), Value::Object(screw))
                })
                .collect();
            Value::Object(per_vertex)
        })
        .collect();
    json!({
        "irrep": irrep(&f.irrep),
        "field": T::NAME,
        "count": f.motions.len(),
        "motions": motions,
    })
}

pub fn text_irrep(r: &IrrepReport) -> String {
    format!(
        "irrep {}: rank {}, trivial {}, flex {} ({})\n",
        r.irrep, r.rank, r.trivial, r.flex, r.field
    )
}

pub fn text_verdict(v: &CombinatorialVerdict, c: &Counting) -> String {
    let mut s = format!(
        "combinatorial {}: union rank {} of target {}, {}\n",
        v.irrep,
        v.rank,
        v.target,
        if v.rigid { "rigid" } else { "flexible" }
    );
    if let Some((edges, target)) = v.count_mismatch() {
        s.push_str(&format!(
            "  H_g has {edges} edges, target count is {target}\n"
        ));
    }
    match c {
        Counting::Violated(cv) => s.push_str(&format!(
            "  counting condition fails: |F| = {} > {}\n",
            cv.size, cv.bound
        )),
        Counting::Skipped(n) => s.push_str(&format!("  counting oracle skipped ({n} edges)\n")),
        Counting::Ok => s.push_str("  counting condition holds\n"),
        Counting::NotRequested => {}
    }
    s
}
