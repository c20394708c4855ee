//! A complete model file: static model, events, behavior and parameters.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::dynamics::{check_event, validate_behavior, BehaviorModel, Classification, EffectOp, EventDef};
use crate::guard::{Operand, Value};
use crate::model::{Bound, SlotKind, StaticModel};
use crate::report::ValidationReport;
use crate::validate::validate_static;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ModelDocument {
    #[serde(rename = "static")]
    pub static_model: StaticModel,
    pub events: Vec<EventDef>,
    pub behavior: Option<BehaviorModel>,
    pub params: BTreeMap<String, Value>,
}

impl ModelDocument {
    pub fn event(&self, id: &str) -> Option<&EventDef> {
        self.events.iter().find(|e| e.id == id)
    }

    pub fn canonicalize(&mut self) {
        self.static_model.canonicalize();
        if let Some(b) = &mut self.behavior {
            b.canonicalize();
        }
    }

    pub fn instances(&self) -> impl Iterator<Item = &EventDef> {
        self.events
            .iter()
            .filter(|e| e.classification == Classification::Instance)
    }
}

/// Validates every level of the document and cross-references between them.
pub fn validate_document(doc: &ModelDocument) -> ValidationReport {
    let model = &doc.static_model;
    let mut report = validate_static(model);

    for t in &model.thimacs {
        for s in &t.slots {
            if let SlotKind::Counter {
                max: Some(Bound::Param(p)),
                ..
            } = &s.kind
            {
                if !matches!(doc.params.get(p), Some(Value::Int(_))) {
                    report.error(
                        "UNKNOWN_PARAM",
                        format!("counter bound `${p}` is not an integer parameter"),
                        [&t.id],
                    );
                }
            }
        }
    }
    for tr in &model.triggers {
        for op in tr.guard.iter().flat_map(|g| g.operands()) {
            if let Operand::Param(p) = op {
                if !doc.params.contains_key(p) {
                    report.error(
                        "UNKNOWN_PARAM",
                        format!("guard references undeclared parameter `${p}`"),
                        [&tr.source, &tr.target],
                    );
                }
            }
        }
    }

    let mut ids = BTreeSet::new();
    for ev in &doc.events {
        if !ids.insert(ev.id.as_str()) {
            report.error("DUPLICATE_EVENT", format!("event `{}` declared twice", ev.id), [&ev.id]);
        }
        check_event(model, ev, &mut report);
        for eff in &ev.effects {
            let kind = model.resolve_slot(&eff.slot).map(|(_, s)| &s.kind);
            let fits = match (eff.op, kind) {
                (_, None) => {
                    report.error(
                        "UNDECLARED_SLOT",
                        format!("event `{}` updates undeclared slot `{}`", ev.id, eff.slot),
                        [&ev.id],
                    );
                    continue;
                }
                (EffectOp::Inc | EffectOp::Dec, Some(SlotKind::Counter { .. })) => true,
                (EffectOp::Push | EffectOp::Pop | EffectOp::Peek, Some(SlotKind::Queue)) => true,
                (EffectOp::Set | EffectOp::Clear, Some(SlotKind::Flag { .. })) => true,
                _ => false,
            };
            if !fits {
                report.error(
                    "EFFECT_KIND_MISMATCH",
                    format!("`{}` cannot be applied to slot `{}`", eff.op.as_str(), eff.slot),
                    [&ev.id],
                );
            }
        }
    }
    for ev in &doc.events {
        if let Some(rel) = &ev.relates {
            for end in [&rel.from, &rel.to] {
                let is_instance = doc
                    .event(end)
                    .is_some_and(|e| e.classification == Classification::Instance);
                if !is_instance {
                    report.error(
                        "UNKNOWN_INSTANCE",
                        format!("event `{}` relates `{end}`, which is not an instance", ev.id),
                        [&ev.id],
                    );
                }
            }
        }
    }

    if let Some(b) = &doc.behavior {
        report.merge(validate_behavior(b, &doc.events));
    }
    report
}
