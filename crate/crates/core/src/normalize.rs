//! Expansion of Simplified-form models back to Full form.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{ActionKind, ActionRef, FlowArc, Form, Stage, StaticModel, ThimacId};
use crate::validate::validate_static;

/// Re-inserts the release/transfer/receive chain behind every
/// inter-thimac flow and the create stage of every source thimac.
///
/// Full-form input is returned unchanged once it validates.
pub fn normalize(model: &StaticModel) -> Result<StaticModel> {
    let report = validate_static(model);
    if !report.ok {
        return Err(Error::NotValid(Box::new(report)));
    }
    if model.form == Form::Full {
        return Ok(model.clone().canonicalized());
    }

    let mut out = StaticModel {
        thimacs: model.thimacs.clone(),
        flows: Vec::new(),
        triggers: model.triggers.clone(),
        form: Form::Full,
    };
    let mut seen = BTreeSet::new();
    let mut push = |out: &mut StaticModel, arc: FlowArc| {
        let key = (arc.source.clone(), arc.target.clone(), arc.thing_label.clone());
        if seen.insert(key) {
            out.flows.push(arc);
        }
    };

    for f in &model.flows {
        if f.source.thimac == f.target.thimac {
            push(&mut out, f.clone());
            continue;
        }
        let (a, b) = (&f.source.thimac, &f.target.thimac);
        for (t, k) in [
            (a, ActionKind::Release),
            (a, ActionKind::Transfer),
            (b, ActionKind::Transfer),
            (b, ActionKind::Receive),
        ] {
            ensure_stage(&mut out, t, k);
        }
        let path = [
            f.source.clone(),
            ActionRef {
                thimac: a.clone(),
                kind: ActionKind::Release,
            },
            ActionRef {
                thimac: a.clone(),
                kind: ActionKind::Transfer,
            },
            ActionRef {
                thimac: b.clone(),
                kind: ActionKind::Transfer,
            },
            ActionRef {
                thimac: b.clone(),
                kind: ActionKind::Receive,
            },
            f.target.clone(),
        ];
        for (i, w) in path.windows(2).enumerate() {
            push(
                &mut out,
                FlowArc {
                    source: w[0].clone(),
                    target: w[1].clone(),
                    thing_label: f.thing_label.clone(),
                    annotation: if i == 0 { f.annotation } else { None },
                },
            );
        }
    }

    let sources: BTreeSet<ThimacId> = model
        .flows
        .iter()
        .map(|f| f.source.thimac.clone())
        .chain(model.triggers.iter().map(|t| t.source.thimac.clone()))
        .collect();
    let standalone: Vec<ThimacId> = model
        .thimacs
        .iter()
        .filter(|t| t.stages.is_empty() && model.children(&t.id).next().is_none())
        .map(|t| t.id.clone())
        .collect();
    for id in sources.iter().chain(&standalone) {
        ensure_stage(&mut out, id, ActionKind::Create);
    }

    out.canonicalize();
    Ok(out)
}

fn ensure_stage(model: &mut StaticModel, id: &ThimacId, kind: ActionKind) {
    if let Some(t) = model.thimac_mut(id) {
        if !t.has_stage(kind) {
            t.stages.push(Stage::new(kind));
        }
    }
}
