use serde_json::{json, Map, Value};
use spca_core::conditions::{ConditionReport, Move};
use spca_core::solvers::TraceEntry;

use crate::commands::Instance;

/// The JSON document every command prints: provenance keys followed by the
/// command's own fields.
pub fn run_record(
    command: &str,
    input: &Instance,
    config: Value,
    payload: Value,
    runtime_ms: f64,
) -> Value {
    let mut doc = Map::new();
    doc.insert("command".into(), json!(command));
    doc.insert(
        "argv".into(),
        json!(std::env::args().skip(1).collect::<Vec<_>>()),
    );
    doc.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    doc.insert(
        "input".into(),
        json!({
            "source": input.source,
            "fingerprint": input.fingerprint,
            "n": input.a.dim(),
        }),
    );
    doc.insert("config".into(), config);
    if let Value::Object(fields) = payload {
        doc.extend(fields);
    }
    doc.insert("runtime_ms".into(), json!(runtime_ms));
    Value::Object(doc)
}

pub fn one_based(t: &[usize]) -> Vec<usize> {
    t.iter().map(|i| i + 1).collect()
}

pub fn trace(entries: &[TraceEntry]) -> Value {
    entries
        .iter()
        .map(|t| {
            json!({
                "iteration": t.iteration,
                "value": t.value,
                "kind": t.kind,
                "support": one_based(&t.support),
            })
        })
        .collect()
}

fn move_json(mv: &Move) -> Value {
    match mv {
        Move::Renormalize => json!({"kind": "renormalize"}),
        Move::Ascent => json!({"kind": "ascent"}),
        Move::Add { index } => json!({"kind": "add", "index": index + 1}),
        Move::Swap { remove, add, sign } => {
            json!({"kind": "swap", "remove": remove + 1, "add": add + 1, "sign": sign})
        }
        Move::Sample { coords } => {
            json!({"kind": "sample", "coords": [coords.0 + 1, coords.1 + 1]})
        }
    }
}

pub fn condition(report: &ConditionReport) -> Value {
    let witness = report.witness.as_ref().map(|w| {
        json!({
            "move": move_json(&w.mv),
            "value": w.value,
            "point": w.point,
        })
    });
    json!({
        "holds": report.holds,
        "slack": report.slack,
        "witness": witness,
    })
}
