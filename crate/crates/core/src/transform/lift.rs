use std::collections::{BTreeMap, BTreeSet};

use super::graph::PropertyGraph;
use crate::document::ModelDocument;
use crate::dsl::is_plain_name;
use crate::dynamics::{Classification, ElementRef, EventDef, Region, Relates};
use crate::error::Result;
use crate::model::{ActionKind, ActionRef, FlowArc, Form, Stage, StaticModel, Thimac, ThimacId};
use crate::report::Diagnostic;
use crate::report::ValidationReport;

/// A property graph split into its class level (the static model) and its
/// particulars (instances and the events relating them).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftReport {
    pub static_model: StaticModel,
    pub instances: Vec<EventDef>,
    pub events: Vec<EventDef>,
    /// Places where the graph mixes class and instance level.
    pub mixing_diagnostics: Vec<Diagnostic>,
}

impl LiftReport {
    pub fn to_document(&self) -> ModelDocument {
        ModelDocument {
            static_model: self.static_model.clone(),
            events: self.instances.iter().chain(&self.events).cloned().collect(),
            behavior: None,
            params: BTreeMap::new(),
        }
    }
}

/// Lifts with every relationship type treated as an ordinary channel.
pub fn lift_property_graph(pg: &PropertyGraph) -> Result<LiftReport> {
    lift_with_containment(pg, &BTreeSet::new())
}

/// Lifts a property graph. Relationship types in `containment` become
/// nesting of the target class inside the source class where that keeps
/// nesting a tree; all other types become flow channels.
pub fn lift_with_containment(pg: &PropertyGraph, containment: &BTreeSet<String>) -> Result<LiftReport> {
    pg.check()?;
    let pg = pg.clone().canonicalized();
    let mixing = mixing_diagnostics(&pg);

    let label_of: BTreeMap<&str, &str> = pg.nodes.iter().map(|n| (n.id.as_str(), n.labels[0].as_str())).collect();
    let labels: BTreeSet<&str> = label_of.values().copied().collect();
    let triples: BTreeSet<(&str, &str, &str)> = pg
        .rels
        .iter()
        .map(|r| {
            (
                r.rel_type.as_str(),
                label_of[r.start.as_str()],
                label_of[r.end.as_str()],
            )
        })
        .collect();

    let mut names = Names::default();
    let class_name: BTreeMap<&str, String> = labels.iter().map(|l| (*l, names.fresh(l))).collect();

    // Containment nesting, kept acyclic with one parent per class.
    let mut parent: BTreeMap<&str, &str> = BTreeMap::new();
    let mut nested = BTreeSet::new();
    for &(ty, s, t) in &triples {
        if !containment.contains(ty) || s == t || parent.contains_key(t) {
            continue;
        }
        let mut up = Some(s);
        let mut cycle = false;
        while let Some(x) = up {
            if x == t {
                cycle = true;
                break;
            }
            up = parent.get(x).copied();
        }
        if !cycle {
            parent.insert(t, s);
            nested.insert((ty, s, t));
        }
    }
    let class_id = |l: &str| -> ThimacId {
        let mut path = vec![class_name[l].clone()];
        let mut up = parent.get(l);
        while let Some(p) = up {
            path.push(class_name[p].clone());
            up = parent.get(p);
        }
        path.reverse();
        ThimacId::new(path.join("."))
    };

    let mut model = StaticModel {
        form: Form::Full,
        ..Default::default()
    };
    for l in &labels {
        let id = class_id(l);
        let mut t = Thimac::new(id.as_str(), parent.get(l).map(|p| class_id(p)));
        t.class = Some(l.to_string());
        t.stages.push(Stage::new(ActionKind::Create));
        model.thimacs.push(t);
    }

    let type_count =
        triples
            .iter()
            .filter(|t| !nested.contains(*t))
            .fold(BTreeMap::<&str, usize>::new(), |mut m, (ty, _, _)| {
                *m.entry(ty).or_default() += 1;
                m
            });
    let mut channel_arcs: BTreeMap<(&str, &str, &str), Vec<ElementRef>> = BTreeMap::new();
    for &(ty, s, t) in &triples {
        let (sid, tid) = (class_id(s), class_id(t));
        if nested.contains(&(ty, s, t)) {
            channel_arcs.insert(
                (ty, s, t),
                vec![
                    ElementRef::Thimac(sid.clone()),
                    ElementRef::Stage(ActionRef::new(sid.as_str(), ActionKind::Create)),
                    ElementRef::Thimac(tid.clone()),
                    ElementRef::Stage(ActionRef::new(tid.as_str(), ActionKind::Create)),
                ],
            );
            continue;
        }
        let base = if type_count[ty] > 1 {
            format!("{ty}_{s}_{t}")
        } else {
            ty.to_string()
        };
        let ch = ThimacId::new(names.fresh(&base));
        let mut cht = Thimac::new(ch.as_str(), None);
        cht.class = Some(ty.to_string());
        model.thimacs.push(cht);

        use ActionKind::*;
        let path = [
            (&sid, Create),
            (&sid, Release),
            (&sid, Transfer),
            (&ch, Transfer),
            (&ch, Receive),
            (&ch, Release),
            (&ch, Transfer),
            (&tid, Transfer),
            (&tid, Receive),
        ];
        for (id, k) in &path {
            let th = model.thimac_mut(id).expect("declared thimac");
            if !th.has_stage(*k) {
                th.stages.push(Stage::new(*k));
            }
        }
        let mut arcs = Vec::new();
        for w in path.windows(2) {
            let a = ActionRef::new(w[0].0.as_str(), w[0].1);
            let b = ActionRef::new(w[1].0.as_str(), w[1].1);
            let f = FlowArc::new(a.clone(), b.clone()).labeled(ty);
            if !model.flows.contains(&f) {
                model.flows.push(f);
            }
            arcs.push(ElementRef::Flow(a, b));
        }
        channel_arcs.insert((ty, s, t), arcs);
    }
    model.canonicalize();

    let mut instance_of = BTreeMap::new();
    let mut instances = Vec::new();
    for (i, n) in pg.nodes.iter().enumerate() {
        let id = format!("I{}", i + 1);
        let create = ActionRef::new(class_id(label_of[n.id.as_str()]).as_str(), ActionKind::Create);
        let label = match n.props.get("name") {
            Some(serde_json::Value::String(s)) => Some(s.clone()),
            _ => None,
        };
        instances.push(EventDef {
            id: id.clone(),
            label,
            region: Region::new([ElementRef::Stage(create)]),
            classification: Classification::Instance,
            effects: Vec::new(),
            relates: None,
        });
        instance_of.insert(n.id.as_str(), id);
    }
    let mut events = Vec::new();
    for (i, r) in pg.rels.iter().enumerate() {
        let key = (
            r.rel_type.as_str(),
            label_of[r.start.as_str()],
            label_of[r.end.as_str()],
        );
        let mut region = Region::new(channel_arcs[&key].clone());
        region.complete_endpoints();
        events.push(EventDef {
            id: format!("E{}", pg.nodes.len() + i + 1),
            label: Some(r.rel_type.clone()),
            region,
            classification: Classification::Event,
            effects: Vec::new(),
            relates: Some(Relates {
                from: instance_of[r.start.as_str()].clone(),
                to: instance_of[r.end.as_str()].clone(),
                mutual: false,
            }),
        });
    }

    Ok(LiftReport {
        static_model: model,
        instances,
        events,
        mixing_diagnostics: mixing,
    })
}

#[derive(Default)]
struct Names(BTreeSet<String>);

impl Names {
    /// A unique thimac name derived from `raw`.
    fn fresh(&mut self, raw: &str) -> String {
        let mut base: String = raw
            .chars()
            .map(|c| if c.is_alphanumeric() || c == '_' { c } else { '_' })
            .collect();
        if !is_plain_name(&base) {
            base = format!("N_{base}");
        }
        let mut name = base.clone();
        let mut k = 2;
        while !self.0.insert(name.clone()) {
            name = format!("{base}_{k}");
            k += 1;
        }
        name
    }
}

fn mixing_diagnostics(pg: &PropertyGraph) -> Vec<Diagnostic> {
    let mut r = ValidationReport::default();
    let mut per_label: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for n in &pg.nodes {
        for l in &n.labels {
            per_label.entry(l).or_default().push(&n.id);
        }
    }
    for n in &pg.nodes {
        if n.labels.len() > 1 {
            r.warning(
                "MULTI_LABEL",
                format!(
                    "node `{}` has labels {}; `{}` is used as its class",
                    n.id,
                    n.labels.join(", "),
                    n.labels[0]
                ),
                [&n.id],
            );
        }
        for l in &n.labels {
            if per_label[l.as_str()].len() == 1 && l == n.name() {
                r.warning(
                    "IDENTITY_AS_TYPE",
                    format!(
                        "node `{}` is the only `{l}` and is named `{l}`: its identity doubles as a type",
                        n.id
                    ),
                    [&n.id],
                );
            }
        }
        for (k, v) in &n.props {
            if let serde_json::Value::String(s) = v {
                if per_label.contains_key(s.as_str()) {
                    r.warning(
                        "PROPERTY_DUPLICATES_LABEL",
                        format!("property `{k}` of node `{}` repeats the label `{s}`", n.id),
                        [&n.id],
                    );
                }
            }
        }
    }
    for rel in pg.rels.iter().filter(|r| r.start == r.end) {
        r.warning(
            "SELF_LOOP",
            format!("relationship `{}` joins node `{}` to itself", rel.id, rel.start),
            [&rel.id],
        );
    }
    r.diagnostics
}
