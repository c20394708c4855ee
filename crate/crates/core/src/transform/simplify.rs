use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{legal_simplified_successors, ActionKind, ActionRef, FlowArc, Form, Locality, StaticModel};
use crate::validate::validate_static;

/// Removes release, transfer and receive stages, contracting each path
/// through them into one direct arc between the retained stages at its
/// ends.
///
/// Paths are followed thing-wise: every arc on a contracted path carries the
/// same thing label as its first arc, and a thing crosses at most one
/// transfer-to-transfer hop before it is received. Contractions that would be illegal in
/// simplified form (self-loops, intra-thimac process to process) are
/// dropped. A trigger anchored on a removed stage moves to its thimac's
/// process stage, or create stage, or is dropped if there is neither.
pub fn simplify_static(model: &StaticModel) -> Result<StaticModel> {
    if model.form != Form::Full {
        return Err(Error::NotFullForm);
    }
    let report = validate_static(model);
    if !report.ok {
        return Err(Error::NotValid(Box::new(report)));
    }

    let mut out = model.clone();
    out.form = Form::Simplified;
    for t in &mut out.thimacs {
        t.stages.retain(|s| s.kind.is_retained());
    }

    let mut flows = Vec::new();
    let mut seen = BTreeSet::new();
    for f in model.flows.iter().filter(|f| f.source.kind.is_retained()) {
        let mut targets = Vec::new();
        if f.target.kind.is_retained() {
            targets.push(f.target.clone());
        } else {
            // State: stage reached, and whether the arc into it was a
            // transfer-to-transfer hop between thimacs.
            let mut visited = BTreeSet::new();
            let mut stack = vec![(&f.target, false)];
            while let Some((x, hopped)) = stack.pop() {
                if !visited.insert((x, hopped)) {
                    continue;
                }
                for g in model
                    .flows
                    .iter()
                    .filter(|g| &g.source == x && g.thing_label == f.thing_label)
                {
                    let hop = g.source.kind == ActionKind::Transfer
                        && g.target.kind == ActionKind::Transfer
                        && g.source.thimac != g.target.thimac;
                    if hop && hopped {
                        continue;
                    }
                    if g.target.kind.is_retained() {
                        targets.push(g.target.clone());
                    } else {
                        stack.push((&g.target, hop));
                    }
                }
            }
        }
        for y in targets {
            if !contractible(&f.source, &y) {
                continue;
            }
            if seen.insert((f.source.clone(), y.clone(), f.thing_label.clone())) {
                flows.push(FlowArc {
                    source: f.source.clone(),
                    target: y,
                    thing_label: f.thing_label.clone(),
                    annotation: f.annotation,
                });
            }
        }
    }
    out.flows = flows;

    let anchor = |r: &ActionRef| -> Option<ActionRef> {
        if r.kind.is_retained() {
            return Some(r.clone());
        }
        let t = model.thimac(&r.thimac)?;
        [ActionKind::Process, ActionKind::Create]
            .into_iter()
            .find(|k| t.has_stage(*k))
            .map(|k| ActionRef::new(r.thimac.as_str(), k))
    };
    out.triggers = model
        .triggers
        .iter()
        .filter_map(|t| {
            let mut t = t.clone();
            t.source = anchor(&t.source)?;
            t.target = anchor(&t.target)?;
            Some(t)
        })
        .collect();

    out.canonicalize();
    out.triggers.dedup();
    Ok(out)
}

fn contractible(x: &ActionRef, y: &ActionRef) -> bool {
    let locality = if x.thimac == y.thimac {
        Locality::Intra
    } else {
        Locality::Cross
    };
    x != y && legal_simplified_successors(x.kind).contains(&(y.kind, locality))
}
