//! Well-formedness checks for static models.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::guard::Operand;
use crate::model::{
    legal_simplified_successors, legal_successors, ActionKind, ActionRef, Form, Locality, StaticModel, ThimacId,
};
use crate::report::ValidationReport;

pub fn validate_static(model: &StaticModel) -> ValidationReport {
    let mut report = ValidationReport::default();
    if model.thimacs.is_empty() {
        report.warning("EMPTY_MODEL", "model declares no thimacs", std::iter::empty::<String>());
    }
    check_thimacs(model, &mut report);
    check_nesting(model, &mut report);
    check_flows(model, &mut report);
    check_triggers(model, &mut report);
    check_reachability(model, &mut report);
    report
}

fn check_thimacs(model: &StaticModel, report: &mut ValidationReport) {
    let mut seen = HashSet::new();
    for t in &model.thimacs {
        if !seen.insert(&t.id) {
            report.error("DUPLICATE_THIMAC", format!("thimac `{}` declared twice", t.id), [&t.id]);
        }
        let expected = match &t.parent {
            Some(p) => p.child(&t.name),
            None => ThimacId::new(t.name.clone()),
        };
        if t.name.is_empty() || expected != t.id {
            report.error(
                "BAD_THIMAC_ID",
                format!("thimac id `{}` does not match its name and parent", t.id),
                [&t.id],
            );
        }
        let mut kinds = HashSet::new();
        for s in &t.stages {
            if !kinds.insert(s.kind) {
                report.error(
                    "DUPLICATE_STAGE",
                    format!("thimac `{}` declares {} twice", t.id, s.kind),
                    [ActionRef {
                        thimac: t.id.clone(),
                        kind: s.kind,
                    }],
                );
            }
            if model.form == Form::Simplified && !s.kind.is_retained() {
                report.error(
                    "ELIDED_STAGE_PRESENT",
                    format!("simplified model keeps a {} stage in `{}`", s.kind, t.id),
                    [&t.id],
                );
            }
        }
        let mut slots = HashSet::new();
        for s in &t.slots {
            if !slots.insert(&s.name) {
                report.error(
                    "DUPLICATE_SLOT",
                    format!("slot `{}` declared twice in `{}`", s.name, t.id),
                    [&t.id],
                );
            }
        }
        if t.stages.is_empty() && model.children(&t.id).next().is_none() {
            report.warning(
                "EMPTY_THIMAC",
                format!("thimac `{}` has no actions and no subthimacs", t.id),
                [&t.id],
            );
        }
    }
}

fn check_nesting(model: &StaticModel, report: &mut ValidationReport) {
    let parents: BTreeMap<&ThimacId, Option<&ThimacId>> =
        model.thimacs.iter().map(|t| (&t.id, t.parent.as_ref())).collect();
    for t in &model.thimacs {
        if let Some(p) = &t.parent {
            if !parents.contains_key(p) {
                report.error(
                    "DANGLING_REF",
                    format!("parent `{p}` of `{}` is not declared", t.id),
                    [&t.id],
                );
            }
        }
        // Walk up; a walk longer than the thimac count means a cycle.
        let mut cur = t.parent.as_ref();
        let mut steps = 0;
        while let Some(p) = cur {
            if p == &t.id || steps > parents.len() {
                report.error(
                    "NESTING_CYCLE",
                    format!("thimac `{}` is nested inside itself", t.id),
                    [&t.id],
                );
                break;
            }
            cur = parents.get(p).copied().flatten();
            steps += 1;
        }
    }
}

fn endpoint_ok(model: &StaticModel, r: &ActionRef, report: &mut ValidationReport) -> bool {
    if model.has_stage(r) {
        return true;
    }
    let what = if model.thimac(&r.thimac).is_none() {
        "undeclared thimac"
    } else {
        "undeclared stage"
    };
    report.error("DANGLING_REF", format!("arc endpoint `{r}` names an {what}"), [r]);
    false
}

fn locality(a: &ActionRef, b: &ActionRef) -> Locality {
    if a.thimac == b.thimac {
        Locality::Intra
    } else {
        Locality::Cross
    }
}

fn check_flows(model: &StaticModel, report: &mut ValidationReport) {
    let mut seen = HashSet::new();
    for f in &model.flows {
        if !seen.insert((&f.source, &f.target, &f.thing_label)) {
            report.error(
                "DUPLICATE_ARC",
                format!("flow {} -> {} declared twice", f.source, f.target),
                [&f.source, &f.target],
            );
        }
        let ok_s = endpoint_ok(model, &f.source, report);
        let ok_t = endpoint_ok(model, &f.target, report);
        if !(ok_s && ok_t) {
            continue;
        }
        let table = match model.form {
            Form::Full => legal_successors(f.source.kind),
            Form::Simplified => legal_simplified_successors(f.source.kind),
        };
        let loc = locality(&f.source, &f.target);
        let kinds: BTreeSet<ActionKind> = table.iter().map(|(k, _)| *k).collect();
        if !kinds.contains(&f.target.kind) {
            report.error(
                "ILLEGAL_FLOW",
                format!("{} cannot flow into {}", f.source.kind, f.target.kind),
                [&f.source, &f.target],
            );
        } else if !table.contains(&(f.target.kind, loc)) {
            let msg = match loc {
                Locality::Cross => "intra-thimac flow crosses thimacs",
                Locality::Intra => "cross-thimac flow stays within one thimac",
            };
            report.error("ARC_LOCALITY", msg, [&f.source, &f.target]);
        }
    }
}

fn check_triggers(model: &StaticModel, report: &mut ValidationReport) {
    let mut seen = HashSet::new();
    for t in &model.triggers {
        if !seen.insert((&t.source, &t.target, &t.label)) {
            report.error(
                "DUPLICATE_ARC",
                format!("trigger {} --> {} declared twice", t.source, t.target),
                [&t.source, &t.target],
            );
        }
        let ok_s = endpoint_ok(model, &t.source, report);
        let ok_t = endpoint_ok(model, &t.target, report);
        if ok_s && ok_t && t.source.thimac == t.target.thimac {
            report.error(
                "TRIGGER_NOT_CROSSING",
                "trigger must connect two distinct thimacs",
                [&t.source, &t.target],
            );
        }
        if !matches!(t.target.kind, ActionKind::Create | ActionKind::Process) {
            report.error(
                "ILLEGAL_TRIGGER_TARGET",
                format!("trigger cannot land on a {} stage", t.target.kind),
                [&t.target],
            );
        }
        let Some(guard) = &t.guard else { continue };
        for op in guard.operands() {
            let missing = match op {
                Operand::Attr(a) if !model.declares_attribute(a) => Some(format!("attribute `{a}`")),
                Operand::Slot(s) if model.resolve_slot(s).is_none() => Some(format!("slot `{s}`")),
                _ => None,
            };
            if let Some(what) = missing {
                report.error(
                    "UNDECLARED_GUARD_REF",
                    format!("guard references undeclared {what}"),
                    [&t.source, &t.target],
                );
            }
        }
    }
}

fn check_reachability(model: &StaticModel, report: &mut ValidationReport) {
    let inbound: HashSet<&ActionRef> = model
        .flows
        .iter()
        .map(|f| &f.target)
        .chain(model.triggers.iter().map(|t| &t.target))
        .collect();
    for r in model.stage_refs() {
        if r.kind != ActionKind::Create && !inbound.contains(&r) {
            report.warning(
                "UNREACHABLE_STAGE",
                format!("stage `{r}` has no inbound flow or trigger"),
                [&r],
            );
        }
    }
}
