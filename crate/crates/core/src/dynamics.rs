//! The dynamic level: events and instances as regions of a static model,
//! and behavior models ordering them in time.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ActionKind, ActionRef, StaticModel, ThimacId};
use crate::report::ValidationReport;

/// One addressable element of a static model.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ElementRef {
    Thimac(ThimacId),
    Stage(ActionRef),
    Flow(ActionRef, ActionRef),
    Trigger(ActionRef, ActionRef),
}

impl fmt::Display for ElementRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementRef::Thimac(t) => write!(f, "{t}"),
            ElementRef::Stage(s) => write!(f, "{s}"),
            ElementRef::Flow(a, b) => write!(f, "{a} -> {b}"),
            ElementRef::Trigger(a, b) => write!(f, "{a} --> {b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Region {
    pub elements: BTreeSet<ElementRef>,
}

impl Region {
    pub fn new(elements: impl IntoIterator<Item = ElementRef>) -> Self {
        Region {
            elements: elements.into_iter().collect(),
        }
    }

    /// Adds the endpoint stages of every arc in the region.
    pub fn complete_endpoints(&mut self) {
        let extra: Vec<ElementRef> = self
            .elements
            .iter()
            .flat_map(|e| match e {
                ElementRef::Flow(a, b) | ElementRef::Trigger(a, b) => {
                    vec![ElementRef::Stage(a.clone()), ElementRef::Stage(b.clone())]
                }
                _ => vec![],
            })
            .collect();
        self.elements.extend(extra);
    }

    pub fn stages(&self) -> impl Iterator<Item = &ActionRef> {
        self.elements.iter().filter_map(|e| match e {
            ElementRef::Stage(s) => Some(s),
            _ => None,
        })
    }

    pub fn flows(&self) -> impl Iterator<Item = (&ActionRef, &ActionRef)> {
        self.elements.iter().filter_map(|e| match e {
            ElementRef::Flow(a, b) => Some((a, b)),
            _ => None,
        })
    }

    pub fn triggers(&self) -> impl Iterator<Item = (&ActionRef, &ActionRef)> {
        self.elements.iter().filter_map(|e| match e {
            ElementRef::Trigger(a, b) => Some((a, b)),
            _ => None,
        })
    }

    /// Thimacs the region mentions directly or through a stage.
    pub fn touched_thimacs(&self) -> BTreeSet<&ThimacId> {
        self.elements
            .iter()
            .flat_map(|e| match e {
                ElementRef::Thimac(t) => vec![t],
                ElementRef::Stage(s) => vec![&s.thimac],
                ElementRef::Flow(a, b) | ElementRef::Trigger(a, b) => vec![&a.thimac, &b.thimac],
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Event,
    Instance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EffectOp {
    Inc,
    Dec,
    Push,
    Pop,
    /// Requires a non-empty queue without removing its head.
    Peek,
    Set,
    Clear,
}

impl EffectOp {
    pub const ALL: [EffectOp; 7] = [
        EffectOp::Inc,
        EffectOp::Dec,
        EffectOp::Push,
        EffectOp::Pop,
        EffectOp::Peek,
        EffectOp::Set,
        EffectOp::Clear,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EffectOp::Inc => "inc",
            EffectOp::Dec => "dec",
            EffectOp::Push => "push",
            EffectOp::Pop => "pop",
            EffectOp::Peek => "peek",
            EffectOp::Set => "set",
            EffectOp::Clear => "clear",
        }
    }
}

/// A state-slot mutation applied when an event fires.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Effect {
    pub op: EffectOp,
    /// `Thimac.path.slot`
    pub slot: String,
}

/// Explicit participants of a binary event, used when several instances
/// share a host thimac and the region alone cannot tell them apart.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relates {
    pub from: String,
    pub to: String,
    pub mutual: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventDef {
    pub id: String,
    pub label: Option<String>,
    pub region: Region,
    pub classification: Classification,
    pub effects: Vec<Effect>,
    pub relates: Option<Relates>,
}

impl EventDef {
    pub fn display_label(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.id)
    }

    /// Create stages in the region; for an instance there is exactly one.
    pub fn create_stages(&self) -> impl Iterator<Item = &ActionRef> {
        self.region.stages().filter(|s| s.kind == ActionKind::Create)
    }
}

/// Instance when the region's stages are exactly one create stage.
pub fn classify(region: &Region) -> Classification {
    let stages: Vec<&ActionRef> = region.stages().collect();
    if stages.len() == 1 && stages[0].kind == ActionKind::Create {
        Classification::Instance
    } else {
        Classification::Event
    }
}

fn resolves(model: &StaticModel, e: &ElementRef) -> bool {
    match e {
        ElementRef::Thimac(t) => model.thimac(t).is_some(),
        ElementRef::Stage(s) => model.has_stage(s),
        ElementRef::Flow(a, b) => model.flows.iter().any(|f| &f.source == a && &f.target == b),
        ElementRef::Trigger(a, b) => model.triggers.iter().any(|t| &t.source == a && &t.target == b),
    }
}

/// Weak connectivity over the region's thimacs and stages.
fn is_connected(model: &StaticModel, region: &Region) -> bool {
    let mut nodes: Vec<String> = Vec::new();
    let mut index = BTreeMap::new();
    let mut node = |key: String, nodes: &mut Vec<String>| -> usize {
        *index.entry(key.clone()).or_insert_with(|| {
            nodes.push(key);
            nodes.len() - 1
        })
    };
    let mut edges = Vec::new();
    let thimacs: BTreeSet<&ThimacId> = region
        .elements
        .iter()
        .filter_map(|e| match e {
            ElementRef::Thimac(t) => Some(t),
            _ => None,
        })
        .collect();
    for e in &region.elements {
        match e {
            ElementRef::Thimac(t) => {
                let n = node(format!("t:{t}"), &mut nodes);
                if let Some(p) = model.thimac(t).and_then(|t| t.parent.as_ref()) {
                    if thimacs.contains(p) {
                        let m = node(format!("t:{p}"), &mut nodes);
                        edges.push((n, m));
                    }
                }
            }
            ElementRef::Stage(s) => {
                let n = node(format!("s:{s}"), &mut nodes);
                if thimacs.contains(&s.thimac) {
                    let m = node(format!("t:{}", s.thimac), &mut nodes);
                    edges.push((n, m));
                }
            }
            ElementRef::Flow(a, b) | ElementRef::Trigger(a, b) => {
                let n = node(format!("s:{a}"), &mut nodes);
                let m = node(format!("s:{b}"), &mut nodes);
                edges.push((n, m));
            }
        }
    }
    if nodes.is_empty() {
        return true;
    }
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let root = find(&mut parent, 0);
    (0..nodes.len()).all(|i| find(&mut parent, i) == root)
}

fn check_region(model: &StaticModel, region: &Region) -> Result<()> {
    if region.elements.is_empty() {
        return Err(Error::EmptyRegion);
    }
    if let Some(e) = region.elements.iter().find(|e| !resolves(model, e)) {
        return Err(Error::DanglingRef(e.to_string()));
    }
    if !is_connected(model, region) {
        return Err(Error::DisconnectedRegion);
    }
    Ok(())
}

/// Builds an event or instance over `model`, completing arc endpoints and
/// checking the region invariants.
pub fn make_event(
    model: &StaticModel,
    id: impl Into<String>,
    elements: impl IntoIterator<Item = ElementRef>,
    classification: Classification,
) -> Result<EventDef> {
    let mut region = Region::new(elements);
    region.complete_endpoints();
    check_region(model, &region)?;
    let creates = region.stages().filter(|s| s.kind == ActionKind::Create).count();
    if classification == Classification::Instance && creates != 1 {
        return Err(Error::InstanceWithoutCreate);
    }
    Ok(EventDef {
        id: id.into(),
        label: None,
        region,
        classification,
        effects: Vec::new(),
        relates: None,
    })
}

/// Diagnostics for one already-built event, as reported by document
/// validation.
pub fn check_event(model: &StaticModel, ev: &EventDef, report: &mut ValidationReport) {
    if let Err(e) = check_region(model, &ev.region) {
        let code = e.code().trim_start_matches("E_");
        report.error(code, format!("event `{}`: {e}", ev.id), [&ev.id]);
        return;
    }
    let creates = ev.create_stages().count();
    if ev.classification == Classification::Instance && creates != 1 {
        report.error(
            "INSTANCE_WITHOUT_CREATE",
            format!("instance `{}` must contain exactly one create stage", ev.id),
            [&ev.id],
        );
    }
    let inferred = classify(&ev.region);
    if inferred != ev.classification {
        report.warning(
            "CLASSIFICATION_MISMATCH",
            format!(
                "`{}` is declared {:?} but its region classifies as {:?}",
                ev.id, ev.classification, inferred
            ),
            [&ev.id],
        );
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeKind {
    Sequence,
    Repeat,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BehaviorEdge {
    pub from: String,
    pub to: String,
    pub kind: EdgeKind,
}

/// A parallel process: a named set of events.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub name: String,
    pub members: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BehaviorModel {
    pub components: Vec<Component>,
    pub edges: Vec<BehaviorEdge>,
}

impl BehaviorModel {
    pub fn nodes(&self) -> BTreeSet<&str> {
        self.components
            .iter()
            .flat_map(|c| c.members.iter().map(String::as_str))
            .collect()
    }

    pub fn component_of(&self, event: &str) -> Option<usize> {
        self.components.iter().position(|c| c.members.contains(event))
    }

    pub fn sequence_preds<'a>(&'a self, event: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.edges
            .iter()
            .filter(move |e| e.kind == EdgeKind::Sequence && e.to == event)
            .map(|e| e.from.as_str())
    }

    pub fn sequence_succs<'a>(&'a self, event: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.edges
            .iter()
            .filter(move |e| e.kind == EdgeKind::Sequence && e.from == event)
            .map(|e| e.to.as_str())
    }

    pub fn canonicalize(&mut self) {
        self.edges.sort();
        self.edges.dedup();
    }
}

pub fn validate_behavior(b: &BehaviorModel, events: &[EventDef]) -> ValidationReport {
    let mut report = ValidationReport::default();
    let declared: BTreeSet<&str> = events.iter().map(|e| e.id.as_str()).collect();

    let mut owner: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, c) in b.components.iter().enumerate() {
        for m in &c.members {
            if !declared.contains(m.as_str()) {
                report.error("UNKNOWN_EVENT", format!("behavior names undeclared event `{m}`"), [m]);
            }
            if let Some(prev) = owner.insert(m, i) {
                if prev != i {
                    report.error(
                        "NODE_IN_MULTIPLE_COMPONENTS",
                        format!("`{m}` belongs to more than one component"),
                        [m],
                    );
                }
            }
        }
    }
    for e in &b.edges {
        for end in [&e.from, &e.to] {
            if !declared.contains(end.as_str()) && !owner.contains_key(end.as_str()) {
                report.error("UNKNOWN_EVENT", format!("edge names undeclared event `{end}`"), [end]);
            }
        }
        match (owner.get(e.from.as_str()), owner.get(e.to.as_str())) {
            (Some(a), Some(c)) if a == c => {}
            _ => report.error(
                "EDGE_CROSSES_COMPONENTS",
                format!("edge {} -> {} leaves its component", e.from, e.to),
                [&e.from, &e.to],
            ),
        }
    }

    for c in &b.components {
        if let Some(cycle) = sequence_cycle(b, c) {
            report.error(
                "SEQUENCE_CYCLE",
                format!(
                    "sequence edges form a cycle in component `{}`; use a repeat edge",
                    c.name
                ),
                cycle,
            );
        }
    }

    let nodes = b.nodes();
    for ev in events {
        if !nodes.contains(ev.id.as_str()) {
            report.warning(
                "EVENT_NOT_IN_BEHAVIOR",
                format!("`{}` does not appear in the behavior model", ev.id),
                [&ev.id],
            );
        }
    }
    report
}

/// Returns the members of one sequence cycle inside `c`, if any.
fn sequence_cycle(b: &BehaviorModel, c: &Component) -> Option<Vec<String>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let mut marks: BTreeMap<&str, Mark> = c.members.iter().map(|m| (m.as_str(), Mark::New)).collect();
    fn visit<'a>(
        n: &'a str,
        b: &'a BehaviorModel,
        marks: &mut BTreeMap<&'a str, Mark>,
        stack: &mut Vec<&'a str>,
    ) -> Option<Vec<String>> {
        marks.insert(n, Mark::Active);
        stack.push(n);
        for s in b.sequence_succs(n) {
            match marks.get(s).copied() {
                Some(Mark::Active) => {
                    let start = stack.iter().position(|x| *x == s).unwrap_or(0);
                    return Some(stack[start..].iter().map(|x| x.to_string()).collect());
                }
                Some(Mark::New) => {
                    if let Some(c) = visit(s, b, marks, stack) {
                        return Some(c);
                    }
                }
                _ => {}
            }
        }
        stack.pop();
        marks.insert(n, Mark::Done);
        None
    }
    let members: Vec<&str> = c.members.iter().map(String::as_str).collect();
    for m in members {
        if marks[m] == Mark::New {
            let mut stack = Vec::new();
            if let Some(cycle) = visit(m, b, &mut marks, &mut stack) {
                return Some(cycle);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FlowArc, Thimac};
    use ActionKind::*;

    fn model() -> StaticModel {
        StaticModel {
            thimacs: vec![
                Thimac::new("A", None).with_stages(&[Create, Process]),
                Thimac::new("B", None).with_stages(&[Create]),
            ],
            flows: vec![FlowArc::new(ActionRef::new("A", Create), ActionRef::new("A", Process))],
            ..Default::default()
        }
    }

    #[test]
    fn region_errors() {
        let m = model();
        assert!(matches!(
            make_event(&m, "E1", [], Classification::Event),
            Err(Error::EmptyRegion)
        ));
        assert!(matches!(
            make_event(
                &m,
                "E1",
                [ElementRef::Stage(ActionRef::new("Z", Create))],
                Classification::Event
            ),
            Err(Error::DanglingRef(_))
        ));
        assert!(matches!(
            make_event(
                &m,
                "E1",
                [
                    ElementRef::Stage(ActionRef::new("A", Create)),
                    ElementRef::Stage(ActionRef::new("B", Create))
                ],
                Classification::Event
            ),
            Err(Error::DisconnectedRegion)
        ));
        assert!(matches!(
            make_event(&m, "I1", [ElementRef::Thimac("A".into())], Classification::Instance),
            Err(Error::InstanceWithoutCreate)
        ));
    }

    #[test]
    fn arc_endpoints_are_completed() {
        let m = model();
        let ev = make_event(
            &m,
            "E1",
            [ElementRef::Flow(
                ActionRef::new("A", Create),
                ActionRef::new("A", Process),
            )],
            Classification::Event,
        )
        .unwrap();
        assert_eq!(ev.region.stages().count(), 2);
        assert_eq!(classify(&ev.region), Classification::Event);
    }

    #[test]
    fn classification_rule() {
        let one = Region::new([ElementRef::Stage(ActionRef::new("A", Create))]);
        assert_eq!(classify(&one), Classification::Instance);
        let two = Region::new([
            ElementRef::Stage(ActionRef::new("A", Create)),
            ElementRef::Stage(ActionRef::new("B", Create)),
        ]);
        assert_eq!(classify(&two), Classification::Event);
        let proc_ = Region::new([ElementRef::Stage(ActionRef::new("A", Process))]);
        assert_eq!(classify(&proc_), Classification::Event);
    }

    fn ev(id: &str) -> EventDef {
        EventDef {
            id: id.into(),
            label: None,
            region: Region::default(),
            classification: Classification::Event,
            effects: vec![],
            relates: None,
        }
    }

    fn edge(a: &str, b: &str, kind: EdgeKind) -> BehaviorEdge {
        BehaviorEdge {
            from: a.into(),
            to: b.into(),
            kind,
        }
    }

    #[test]
    fn sequence_cycle_must_be_a_repeat() {
        let events = vec![ev("E9"), ev("E11")];
        let comp = Component {
            name: "B".into(),
            members: ["E9", "E11"].iter().map(|s| s.to_string()).collect(),
        };
        let mut b = BehaviorModel {
            components: vec![comp],
            edges: vec![
                edge("E9", "E11", EdgeKind::Sequence),
                edge("E11", "E9", EdgeKind::Sequence),
            ],
        };
        assert!(validate_behavior(&b, &events).has_code("SEQUENCE_CYCLE"));
        b.edges[1].kind = EdgeKind::Repeat;
        assert!(validate_behavior(&b, &events).ok);
    }

    #[test]
    fn cross_component_edges_and_unknown_events() {
        let events = vec![ev("E1"), ev("E2"), ev("E3")];
        let b = BehaviorModel {
            components: vec![
                Component {
                    name: "A".into(),
                    members: ["E1".to_string()].into(),
                },
                Component {
                    name: "B".into(),
                    members: ["E2".to_string(), "E9".to_string()].into(),
                },
            ],
            edges: vec![edge("E1", "E2", EdgeKind::Sequence)],
        };
        let r = validate_behavior(&b, &events);
        assert!(r.has_code("EDGE_CROSSES_COMPONENTS"));
        assert!(r.has_code("UNKNOWN_EVENT"));
        assert!(r.has_code("EVENT_NOT_IN_BEHAVIOR"));
    }
}
