//! DOT rendering.
//!
//! Thimacs become nested clusters named `cluster_<thimac id>`; stages are
//! nodes named `<thimac id>.<action>`. Flows are solid edges and triggers
//! dashed. Annotations appear as node or edge `xlabel`s.

use std::fmt::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::document::ModelDocument;
use crate::dynamics::{Classification, EdgeKind, ElementRef};
use crate::error::{Error, Result};
use crate::model::{Form, StaticModel, Thimac};
use crate::normalize::normalize;
use crate::transform::{reduce_dynamic, simplify_static, to_property_graph, PropertyGraph};
use crate::validate::validate_static;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RenderView {
    StaticFull,
    StaticSimplified,
    Dynamic,
    Behavior,
    PropertyGraphView,
}

impl RenderView {
    pub const ALL: [RenderView; 5] = [
        RenderView::StaticFull,
        RenderView::StaticSimplified,
        RenderView::Dynamic,
        RenderView::Behavior,
        RenderView::PropertyGraphView,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RenderView::StaticFull => "static-full",
            RenderView::StaticSimplified => "static-simplified",
            RenderView::Dynamic => "dynamic",
            RenderView::Behavior => "behavior",
            RenderView::PropertyGraphView => "property-graph",
        }
    }
}

impl FromStr for RenderView {
    type Err = String;

    /// Accepts `static-full` as well as `StaticFull`, ignoring case.
    fn from_str(s: &str) -> Result<Self, String> {
        let key: String = s
            .chars()
            .filter(|c| *c != '-' && *c != '_')
            .flat_map(char::to_lowercase)
            .collect();
        RenderView::ALL
            .into_iter()
            .find(|v| {
                let name: String = format!("{v:?}").to_lowercase();
                name == key || v.as_str().replace('-', "") == key
            })
            .ok_or_else(|| format!("unknown view `{s}`"))
    }
}

#[derive(Debug, Clone, Copy)]
pub enum RenderInput<'a> {
    Document(&'a ModelDocument),
    Graph(&'a PropertyGraph),
}

/// Renders `input` for `view`. Documents are converted to the view's form
/// first: simplified for `StaticSimplified`, full for `StaticFull`, and
/// reduced to a graph for `PropertyGraphView`.
pub fn render(input: RenderInput<'_>, view: RenderView) -> Result<String> {
    let bad = |why: String| Error::InvalidViewInput(format!("{}: {why}", view.as_str()));
    match (input, view) {
        (RenderInput::Graph(g), RenderView::PropertyGraphView) => {
            g.check().map_err(|e| bad(e.to_string()))?;
            Ok(graph_dot(g))
        }
        (RenderInput::Graph(_), _) => Err(bad("a property graph has no static model".into())),
        (RenderInput::Document(doc), view) => {
            let model = &doc.static_model;
            let report = validate_static(model);
            if !report.ok {
                return Err(bad("the static model is not valid".into()));
            }
            match view {
                RenderView::StaticFull => {
                    let full = match model.form {
                        Form::Full => model.clone().canonicalized(),
                        Form::Simplified => normalize(model).map_err(|e| bad(e.to_string()))?,
                    };
                    Ok(static_dot(&full, "static", ""))
                }
                RenderView::StaticSimplified => {
                    let simple = match model.form {
                        Form::Simplified => model.clone().canonicalized(),
                        Form::Full => simplify_static(model).map_err(|e| bad(e.to_string()))?,
                    };
                    Ok(static_dot(&simple, "simplified", ""))
                }
                RenderView::Dynamic => Ok(dynamic_dot(doc)),
                RenderView::Behavior => behavior_dot(doc).ok_or_else(|| bad("no behavior model".into())),
                RenderView::PropertyGraphView => {
                    let sk = reduce_dynamic(model, &doc.events);
                    let g = to_property_graph(&sk).map_err(|e| bad(e.to_string()))?;
                    Ok(graph_dot(&g))
                }
            }
        }
    }
}

fn q(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

const HEADER: &str = "  compound=true;\n  node [shape=box, style=rounded, fontsize=10];\n  edge [fontsize=9];\n";

/// Writes the static drawing; `extra` is appended before the closing brace.
fn static_dot(m: &StaticModel, name: &str, extra: &str) -> String {
    let mut out = format!("digraph {} {{\n{HEADER}", q(name));
    for t in m.thimacs.iter().filter(|t| t.parent.is_none()) {
        cluster(m, t, 1, &mut out);
    }
    for f in &m.flows {
        let mut attrs = Vec::new();
        if let Some(l) = &f.thing_label {
            attrs.push(format!("label={}", q(l)));
        }
        if let Some(a) = f.annotation {
            attrs.push(format!("xlabel={}", q(&a.to_string())));
        }
        let _ = write!(out, "  {} -> {}", q(&f.source.to_string()), q(&f.target.to_string()));
        if !attrs.is_empty() {
            let _ = write!(out, " [{}]", attrs.join(", "));
        }
        out.push_str(";\n");
    }
    for t in &m.triggers {
        let mut attrs = vec!["style=dashed".to_string()];
        let mut text = t.label.clone().unwrap_or_default();
        if let Some(g) = &t.guard {
            if !text.is_empty() {
                text.push('\n');
            }
            let _ = write!(text, "[{g}]");
        }
        if !text.is_empty() {
            attrs.push(format!("label={}", q(&text)));
        }
        if let Some(a) = t.annotation {
            attrs.push(format!("xlabel={}", q(&a.to_string())));
        }
        let _ = writeln!(
            out,
            "  {} -> {} [{}];",
            q(&t.source.to_string()),
            q(&t.target.to_string()),
            attrs.join(", ")
        );
    }
    out.push_str(extra);
    out.push_str("}\n");
    out
}

fn cluster(m: &StaticModel, t: &Thimac, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    let mut label = t.name.clone();
    if let Some(c) = t.class.as_ref().filter(|c| **c != t.name) {
        let _ = write!(label, " : {c}");
    }
    if let Some(a) = t.annotation {
        let _ = write!(label, " ({a})");
    }
    let _ = writeln!(out, "{pad}subgraph {} {{", q(&format!("cluster_{}", t.id)));
    let _ = writeln!(out, "{pad}  label={};", q(&label));
    for s in &t.stages {
        let _ = write!(
            out,
            "{pad}  {} [label={}",
            q(&format!("{}.{}", t.id, s.kind)),
            q(s.kind.as_str())
        );
        if let Some(a) = s.annotation {
            let _ = write!(out, ", xlabel={}", q(&a.to_string()));
        }
        out.push_str("];\n");
    }
    for c in m.children(&t.id) {
        cluster(m, c, depth + 1, out);
    }
    let _ = writeln!(out, "{pad}}}");
}

/// The static drawing overlaid with one note per event or instance, joined
/// by dotted lines to the stages of its region.
fn dynamic_dot(doc: &ModelDocument) -> String {
    let m = doc.static_model.clone().canonicalized();
    let mut extra = String::new();
    for ev in &doc.events {
        let node = format!("event:{}", ev.id);
        let shape = match ev.classification {
            Classification::Event => "note",
            Classification::Instance => "component",
        };
        let mut label = ev.id.clone();
        if let Some(l) = &ev.label {
            let _ = write!(label, "\n{l}");
        }
        let _ = writeln!(
            extra,
            "  {} [shape={shape}, style=filled, fillcolor=lightyellow, label={}];",
            q(&node),
            q(&label)
        );
        for e in &ev.region.elements {
            let target = match e {
                ElementRef::Stage(s) => s.to_string(),
                _ => continue,
            };
            let _ = writeln!(
                extra,
                "  {} -> {} [style=dotted, arrowhead=none];",
                q(&node),
                q(&target)
            );
        }
    }
    static_dot(&m, "dynamic", &extra)
}

fn behavior_dot(doc: &ModelDocument) -> Option<String> {
    let b = doc.behavior.as_ref()?;
    let mut out = String::from("digraph \"behavior\" {\n  rankdir=LR;\n  node [shape=box, fontsize=10];\n");
    for c in &b.components {
        let _ = writeln!(out, "  subgraph {} {{", q(&format!("cluster_{}", c.name)));
        let _ = writeln!(out, "    label={};", q(&c.name));
        for ev in doc.events.iter().filter(|e| c.members.contains(&e.id)) {
            let mut label = ev.id.clone();
            if let Some(l) = &ev.label {
                let _ = write!(label, "\n{l}");
            }
            let _ = writeln!(out, "    {} [label={}];", q(&ev.id), q(&label));
        }
        for m in c.members.iter().filter(|m| doc.event(m).is_none()) {
            let _ = writeln!(out, "    {};", q(m));
        }
        out.push_str("  }\n");
    }
    for e in &b.edges {
        let style = match e.kind {
            EdgeKind::Sequence => "",
            EdgeKind::Repeat => " [style=dashed, constraint=false]",
        };
        let _ = writeln!(out, "  {} -> {}{style};", q(&e.from), q(&e.to));
    }
    out.push_str("}\n");
    Some(out)
}

fn graph_dot(g: &PropertyGraph) -> String {
    let g = g.clone().canonicalized();
    let mut out = String::from("digraph \"graph\" {\n  node [shape=ellipse, fontsize=10];\n  edge [fontsize=9];\n");
    for n in &g.nodes {
        let label = format!("{}\n:{}", n.name(), n.labels.join(":"));
        let _ = writeln!(out, "  {} [label={}];", q(&n.id), q(&label));
    }
    for r in &g.rels {
        let _ = writeln!(out, "  {} -> {} [label={}];", q(&r.start), q(&r.end), q(&r.rel_type));
    }
    out.push_str("}\n");
    out
}
