use std::collections::BTreeSet;
use std::fmt::Write;

use super::is_plain_name;
use crate::document::{validate_document, ModelDocument};
use crate::dynamics::{Classification, EdgeKind, ElementRef, EventDef};
use crate::error::{Error, Result};
use crate::guard::Value;
use crate::model::{ActionRef, Bound, Form, SlotKind, StaticModel, Thimac, ThimacId};

/// Writes a valid document in canonical form. Parsing the output yields a
/// document equal to the canonicalized input.
pub fn serialize(doc: &ModelDocument) -> Result<String> {
    let mut report = validate_document(doc);
    let mut doc = doc.clone();
    doc.canonicalize();
    check_names(&doc, &mut report);
    if !report.ok {
        return Err(Error::NotValid(Box::new(report)));
    }

    let mut out = String::new();
    if !doc.params.is_empty() {
        out.push_str("params {\n");
        for (k, v) in &doc.params {
            let _ = writeln!(out, "  {k} = {}", literal(v));
        }
        out.push_str("}\n\n");
    }
    write_static(&doc.static_model, &mut out);
    if !doc.events.is_empty() {
        out.push_str("\nevents {\n");
        for ev in &doc.events {
            write_event(ev, &mut out);
        }
        out.push_str("}\n");
    }
    if let Some(b) = &doc.behavior {
        out.push_str("\nbehavior {\n");
        for c in &b.components {
            let _ = writeln!(out, "  component {} {{", c.name);
            let mut linked = BTreeSet::new();
            for e in b.edges.iter().filter(|e| c.members.contains(&e.from)) {
                let op = match e.kind {
                    EdgeKind::Sequence => "->",
                    EdgeKind::Repeat => "=>",
                };
                let _ = writeln!(out, "    {} {op} {}", e.from, e.to);
                linked.insert(&e.from);
                linked.insert(&e.to);
            }
            for m in c.members.iter().filter(|m| !linked.contains(m)) {
                let _ = writeln!(out, "    {m}");
            }
            out.push_str("  }\n");
        }
        out.push_str("}\n");
    }
    Ok(out)
}

fn check_names(doc: &ModelDocument, report: &mut crate::report::ValidationReport) {
    let mut bad = Vec::new();
    for t in &doc.static_model.thimacs {
        if !is_plain_name(&t.name) {
            bad.push(t.id.to_string());
        }
        bad.extend(
            t.slots
                .iter()
                .filter(|s| !is_plain_name(&s.name))
                .map(|s| s.name.clone()),
        );
        bad.extend(t.attributes.iter().filter(|a| !is_plain_name(a)).cloned());
    }
    for ev in &doc.events {
        if !is_plain_name(&ev.id) {
            bad.push(ev.id.clone());
        }
    }
    bad.extend(doc.params.keys().filter(|k| !is_plain_name(k)).cloned());
    if let Some(b) = &doc.behavior {
        bad.extend(
            b.components
                .iter()
                .filter(|c| !is_plain_name(&c.name))
                .map(|c| c.name.clone()),
        );
    }
    for name in bad {
        report.error(
            "UNWRITABLE_NAME",
            format!("`{name}` cannot be written as a name"),
            [&name],
        );
    }
}

pub(crate) fn quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        match c {
            '"' => q.push_str("\\\""),
            '\\' => q.push_str("\\\\"),
            '\n' => q.push_str("\\n"),
            '\t' => q.push_str("\\t"),
            '\r' => q.push_str("\\r"),
            c => q.push(c),
        }
    }
    q.push('"');
    q
}

fn label(s: &str) -> String {
    if is_plain_name(s) {
        s.to_string()
    } else {
        quote(s)
    }
}

fn literal(v: &Value) -> String {
    match v {
        Value::Str(s) => quote(s),
        other => other.to_string(),
    }
}

fn annotation(a: Option<u32>) -> String {
    a.map(|n| format!(" #{n}")).unwrap_or_default()
}

fn write_static(m: &StaticModel, out: &mut String) {
    out.push_str(match m.form {
        Form::Full => "static {\n",
        Form::Simplified => "static simplified {\n",
    });
    for t in m.thimacs.iter().filter(|t| t.parent.is_none()) {
        write_thimac(m, t, 1, out);
    }
    for f in &m.flows {
        let _ = write!(out, "  flow {} -> {}", f.source, f.target);
        if let Some(l) = &f.thing_label {
            let _ = write!(out, " as {}", label(l));
        }
        let _ = writeln!(out, "{}", annotation(f.annotation));
    }
    for t in &m.triggers {
        let _ = write!(
            out,
            "  trigger {} --> {}{}",
            t.source,
            t.target,
            annotation(t.annotation)
        );
        if let Some(l) = &t.label {
            let _ = write!(out, " label {}", quote(l));
        }
        if let Some(g) = &t.guard {
            let _ = write!(out, " when {g}");
        }
        out.push('\n');
    }
    out.push_str("}\n");
}

fn write_thimac(m: &StaticModel, t: &Thimac, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    let _ = write!(out, "{pad}thimac {}", t.name);
    if let Some(c) = &t.class {
        let _ = write!(out, " : {}", label(c));
    }
    let _ = writeln!(out, "{} {{", annotation(t.annotation));
    for s in &t.stages {
        let _ = writeln!(out, "{pad}  {}{}", s.kind, annotation(s.annotation));
    }
    for s in &t.slots {
        match &s.kind {
            SlotKind::Counter { initial, max } => {
                let _ = write!(out, "{pad}  counter {}", s.name);
                if *initial != 0 {
                    let _ = write!(out, " = {initial}");
                }
                match max {
                    Some(Bound::Literal(n)) => {
                        let _ = write!(out, " max {n}");
                    }
                    Some(Bound::Param(p)) => {
                        let _ = write!(out, " max ${p}");
                    }
                    None => {}
                }
                out.push('\n');
            }
            SlotKind::Queue => {
                let _ = writeln!(out, "{pad}  queue {}", s.name);
            }
            SlotKind::Flag { initial } => {
                let _ = write!(out, "{pad}  flag {}", s.name);
                if *initial {
                    out.push_str(" = true");
                }
                out.push('\n');
            }
        }
    }
    if !t.attributes.is_empty() {
        let attrs: Vec<&str> = t.attributes.iter().map(String::as_str).collect();
        let _ = writeln!(out, "{pad}  attr {}", attrs.join(", "));
    }
    let id: &ThimacId = &t.id;
    for c in m.children(id) {
        write_thimac(m, c, depth + 1, out);
    }
    let _ = writeln!(out, "{pad}}}");
}

fn write_event(ev: &EventDef, out: &mut String) {
    let kw = match ev.classification {
        Classification::Event => "event",
        Classification::Instance => "instance",
    };
    let _ = write!(out, "  {kw} {}", ev.id);
    if let Some(l) = &ev.label {
        let _ = write!(out, " {}", quote(l));
    }
    // Arc endpoints are restored by the parser, so they are left implicit.
    let implied: BTreeSet<&ActionRef> = ev
        .region
        .elements
        .iter()
        .flat_map(|e| match e {
            ElementRef::Flow(a, b) | ElementRef::Trigger(a, b) => vec![a, b],
            _ => vec![],
        })
        .collect();
    let elems: Vec<String> = ev
        .region
        .elements
        .iter()
        .filter(|e| !matches!(e, ElementRef::Stage(s) if implied.contains(s)))
        .map(|e| e.to_string())
        .collect();
    match elems.len() {
        0 => out.push_str(" = {}"),
        1 => {
            let _ = write!(out, " = {{ {} }}", elems[0]);
        }
        _ => {
            let _ = write!(out, " = {{\n    {}\n  }}", elems.join(",\n    "));
        }
    }
    if let Some(r) = &ev.relates {
        let op = if r.mutual { "<->" } else { "->" };
        let _ = write!(out, " relates {} {op} {}", r.from, r.to);
    }
    if !ev.effects.is_empty() {
        let effs: Vec<String> = ev
            .effects
            .iter()
            .map(|e| format!("{} {}", e.op.as_str(), e.slot))
            .collect();
        let _ = write!(out, " do {}", effs.join(", "));
    }
    out.push('\n');
}
