use std::collections::{BTreeMap, BTreeSet};

use super::trace::{SlotValue, Trace};
use crate::document::ModelDocument;
use crate::dynamics::ElementRef;
use crate::guard::Value;
use crate::model::{Bound, SlotKind};
use crate::report::ValidationReport;

/// Checks machine-verifiable properties of a trace against its document:
/// counter bounds, FIFO queue discipline, exclusive guarded branches and
/// sequence order per lineage.
pub fn check_trace(trace: &Trace, doc: &ModelDocument) -> ValidationReport {
    let mut report = ValidationReport::default();
    let model = &doc.static_model;

    let mut bounds = BTreeMap::new();
    for t in &model.thimacs {
        for s in &t.slots {
            if let SlotKind::Counter { max, .. } = &s.kind {
                let max = match max {
                    Some(Bound::Literal(n)) => Some(*n),
                    Some(Bound::Param(p)) => match doc.params.get(p) {
                        Some(Value::Int(n)) => Some(*n),
                        _ => None,
                    },
                    None => None,
                };
                bounds.insert(format!("{}.{}", t.id, s.name), max);
            }
        }
    }

    let mut queues: BTreeMap<&str, &[String]> = BTreeMap::new();
    for (n, e) in trace.entries.iter().enumerate() {
        if doc.event(&e.event_id).is_none() {
            report.error(
                "UNKNOWN_EVENT",
                format!("entry {n} fires undeclared event `{}`", e.event_id),
                [&e.event_id],
            );
        }
        for (slot, v) in &e.state_snapshot {
            match v {
                SlotValue::Int(x) => {
                    if let Some(max) = bounds.get(slot.as_str()) {
                        if *x < 0 || max.is_some_and(|m| *x > m) {
                            report.error(
                                "COUNTER_BOUNDS",
                                format!("entry {n}: `{slot}` = {x} is out of bounds"),
                                [slot],
                            );
                        }
                    }
                }
                SlotValue::Queue(q) => {
                    let before = queues.get(slot.as_str()).copied().unwrap_or(&[]);
                    // Legal successors drop a prefix and append tokens of the
                    // firing lineage.
                    let ok = (0..=before.len()).any(|k| {
                        let kept = &before[k..];
                        q.starts_with(kept) && q[kept.len()..].iter().all(|t| e.token_ids.contains(t))
                    });
                    if !ok {
                        report.error(
                            "FIFO_ORDER",
                            format!("entry {n}: `{slot}` changed out of FIFO order"),
                            [slot],
                        );
                    }
                    queues.insert(slot, q);
                }
                SlotValue::Bool(_) => {}
            }
        }
    }

    let Some(b) = &doc.behavior else {
        return report;
    };
    let guarded = |id: &str| {
        doc.event(id).is_some_and(|ev| {
            ev.region.elements.iter().any(|e| match e {
                ElementRef::Trigger(a, z) => model
                    .triggers
                    .iter()
                    .any(|t| &t.source == a && &t.target == z && t.guard.is_some()),
                _ => false,
            })
        })
    };
    // Guarded siblings under a common predecessor are alternatives.
    let mut exclusive = BTreeSet::new();
    for p in b.nodes() {
        let succs: Vec<&str> = b.sequence_succs(p).filter(|s| guarded(s)).collect();
        for (i, x) in succs.iter().enumerate() {
            for y in &succs[i + 1..] {
                exclusive.insert((*x.min(y), *x.max(y)));
            }
        }
    }

    let mut fired: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for (n, e) in trace.entries.iter().enumerate() {
        let Some(root) = e.token_ids.first() else {
            continue;
        };
        let seen = fired.entry(root).or_default();
        for p in b.sequence_preds(&e.event_id) {
            if !seen.contains(p) {
                report.error(
                    "SEQUENCE_ORDER",
                    format!("entry {n}: `{}` fired for {root} before `{p}`", e.event_id),
                    [&e.event_id],
                );
            }
        }
        for (x, y) in &exclusive {
            let other = if *x == e.event_id {
                y
            } else if *y == e.event_id {
                x
            } else {
                continue;
            };
            if seen.contains(other) {
                report.error(
                    "EXCLUSIVE_BRANCH",
                    format!("entry {n}: `{x}` and `{y}` both fired for {root}"),
                    [x, y],
                );
            }
        }
        seen.insert(&e.event_id);
    }
    report
}
