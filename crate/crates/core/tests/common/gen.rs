//! Random models, documents and property graphs.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use tmkit::dynamics::{
    BehaviorEdge, BehaviorModel, Classification, Component, EdgeKind, Effect, EffectOp, ElementRef, EventDef, Region,
    Relates,
};
use tmkit::guard::{CmpOp, Guard, Operand, Value};
use tmkit::model::{ActionKind, ActionRef, Bound, FlowArc, Form, SlotKind, StateSlot, StaticModel, Thimac, TriggerArc};
use tmkit::transform::{Node, PropertyGraph, Rel};
use tmkit::{validate_document, ModelDocument};

use ActionKind::{Create, Process};

const LABELS: [&str; 3] = ["Person", "City", "Thing"];
const NAMES: [&str; 4] = ["Ann", "Bo", "Cy", "Di"];
const TYPES: [&str; 3] = ["KNOWS", "LIKES", "IN"];

/// Graphs with at most 10 nodes, 20 relationships and no self-loops. Every
/// node has one label and a `name`.
pub fn arb_graph() -> impl Strategy<Value = PropertyGraph> {
    (1usize..=10)
        .prop_flat_map(|n| {
            (
                proptest::collection::vec((0..LABELS.len(), 0..NAMES.len()), n),
                proptest::collection::vec((0..n, 0..n, 0..TYPES.len()), 0..=20),
                0u32..1000,
            )
        })
        .prop_map(|(nodes, rels, salt)| {
            let id = |i: usize| format!("n{}", (i as u32 * 7919 + salt) % 100_003);
            PropertyGraph {
                nodes: nodes
                    .iter()
                    .enumerate()
                    .map(|(i, (l, nm))| Node {
                        id: id(i),
                        labels: vec![LABELS[*l].to_string()],
                        props: [("name".to_string(), serde_json::json!(NAMES[*nm]))].into(),
                    })
                    .collect(),
                rels: rels
                    .iter()
                    .filter(|(a, b, _)| a != b)
                    .enumerate()
                    .map(|(k, (a, b, t))| Rel {
                        id: format!("r{k}"),
                        rel_type: TYPES[*t].to_string(),
                        start: id(*a),
                        end: id(*b),
                        props: Default::default(),
                    })
                    .collect(),
            }
        })
}

/// Simplified models over up to five thimacs. Every flow carries its own
/// thing label so flows stay distinguishable once expanded.
pub fn arb_simplified() -> impl Strategy<Value = StaticModel> {
    (1usize..=5)
        .prop_flat_map(|k| {
            (
                proptest::collection::vec(0u8..3, k),
                proptest::collection::vec((0..k, 0..k, any::<bool>()), 0..10),
                proptest::collection::vec((0..k, any::<bool>(), 0..k, any::<bool>(), any::<bool>()), 0..3),
            )
        })
        .prop_map(|(stages, flows, triggers)| {
            let thimacs: Vec<Thimac> = stages
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let kinds: &[ActionKind] = match s {
                        0 => &[Create],
                        1 => &[Process],
                        _ => &[Create, Process],
                    };
                    Thimac::new(format!("T{i}"), None).with_stages(kinds)
                })
                .collect();
            let has = |i: usize, k: ActionKind| thimacs[i].has_stage(k);
            let mut m = StaticModel {
                thimacs: thimacs.clone(),
                flows: Vec::new(),
                triggers: Vec::new(),
                form: Form::Simplified,
            };
            let mut seen = BTreeSet::new();
            for (a, b, from_create) in flows {
                let sk = if from_create { Create } else { Process };
                if !has(a, sk) || !has(b, Process) || (sk == Process && a == b) || !seen.insert((a, sk, b)) {
                    continue;
                }
                let n = m.flows.len();
                m.flows.push(
                    FlowArc::new(
                        ActionRef::new(format!("T{a}"), sk),
                        ActionRef::new(format!("T{b}"), Process),
                    )
                    .labeled(format!("f{n}")),
                );
            }
            let mut seen = BTreeSet::new();
            for (a, sc, b, tc, labeled) in triggers {
                let sk = if sc { Create } else { Process };
                let tk = if tc { Create } else { Process };
                if a == b || !has(a, sk) || !has(b, tk) || !seen.insert((a, sk, b, tk)) {
                    continue;
                }
                let mut t = TriggerArc::new(ActionRef::new(format!("T{a}"), sk), ActionRef::new(format!("T{b}"), tk));
                if labeled {
                    t.label = Some(format!("go {a}{b}"));
                }
                m.triggers.push(t);
            }
            m
        })
}

fn guard(choice: u8) -> Option<Guard> {
    let ok = || Operand::Attr("ok".into());
    match choice % 5 {
        0 => None,
        1 => Some(Guard::Cmp(CmpOp::Eq, ok(), Operand::Lit(Value::Bool(true)))),
        2 => Some(Guard::Not(Box::new(Guard::Atom(ok())))),
        3 => Some(Guard::And(
            Box::new(Guard::Cmp(
                CmpOp::Lt,
                Operand::Slot("T0.n".into()),
                Operand::Param("cap".into()),
            )),
            Box::new(Guard::Atom(ok())),
        )),
        _ => Some(Guard::Or(
            Box::new(Guard::Cmp(
                CmpOp::Le,
                Operand::Slot("T0.q".into()),
                Operand::Lit(Value::Int(3)),
            )),
            Box::new(Guard::Cmp(
                CmpOp::Ne,
                Operand::Attr("tag".into()),
                Operand::Lit(Value::Str("a \"b\"".into())),
            )),
        )),
    }
}

/// Valid documents with slots, guards, events, instances, effects and a
/// behavior chain, in either form.
pub fn arb_document() -> impl Strategy<Value = ModelDocument> {
    (
        arb_simplified(),
        any::<bool>(),
        proptest::collection::vec(any::<u8>(), 24),
    )
        .prop_map(|(s, full, knobs)| build_document(s, full, &knobs))
        .prop_filter("valid document", |d| validate_document(d).ok)
}

fn build_document(s: StaticModel, full: bool, knobs: &[u8]) -> ModelDocument {
    let mut knob = knobs.iter().copied().cycle();
    let mut m = if full { tmkit::normalize(&s).unwrap_or(s) } else { s };

    let t0 = &mut m.thimacs[0];
    t0.slots.push(StateSlot {
        name: "n".into(),
        kind: SlotKind::Counter {
            initial: 0,
            max: Some(Bound::Param("cap".into())),
        },
    });
    t0.slots.push(StateSlot {
        name: "q".into(),
        kind: SlotKind::Queue,
    });
    t0.slots.push(StateSlot {
        name: "f".into(),
        kind: SlotKind::Flag {
            initial: knob.next().unwrap() % 2 == 0,
        },
    });
    t0.attributes.insert("ok".into());
    t0.attributes.insert("tag".into());
    t0.class = (knob.next().unwrap() % 3 == 0).then(|| "Some Class".to_string());
    if knob.next().unwrap() % 2 == 0 {
        t0.annotation = Some(1);
    }
    for t in &mut m.triggers {
        t.guard = guard(knob.next().unwrap());
    }
    if let Some(f) = m.flows.first_mut() {
        f.annotation = Some(2);
    }

    let mut events = Vec::new();
    for (i, f) in m.flows.iter().enumerate() {
        if knob.next().unwrap() % 3 == 0 {
            continue;
        }
        let mut region = Region::new([ElementRef::Flow(f.source.clone(), f.target.clone())]);
        region.complete_endpoints();
        let effects = match knob.next().unwrap() % 4 {
            0 => vec![Effect {
                op: EffectOp::Inc,
                slot: "T0.n".into(),
            }],
            1 => vec![
                Effect {
                    op: EffectOp::Push,
                    slot: "T0.q".into(),
                },
                Effect {
                    op: EffectOp::Set,
                    slot: "T0.f".into(),
                },
            ],
            _ => Vec::new(),
        };
        events.push(EventDef {
            id: format!("E{i}"),
            label: (i % 2 == 0).then(|| format!("flow number {i}")),
            region,
            classification: Classification::Event,
            effects,
            relates: None,
        });
    }
    for t in m.thimacs.iter().filter(|t| t.has_stage(Create)) {
        if knob.next().unwrap() % 2 == 0 {
            events.push(EventDef {
                id: format!("I{}", &t.id.as_str()[1..]),
                label: Some(format!("{} \"one\"", t.name)),
                region: Region::new([ElementRef::Stage(ActionRef::new(t.id.as_str(), Create))]),
                classification: Classification::Instance,
                effects: Vec::new(),
                relates: None,
            });
        }
    }
    let instances: Vec<String> = events
        .iter()
        .filter(|e| e.classification == Classification::Instance)
        .map(|e| e.id.clone())
        .collect();
    if instances.len() >= 2 {
        if let Some(ev) = events.iter_mut().find(|e| e.classification == Classification::Event) {
            ev.relates = Some(Relates {
                from: instances[0].clone(),
                to: instances[1].clone(),
                mutual: knob.next().unwrap() % 2 == 0,
            });
        }
    }

    let behavior = (!events.is_empty() && knob.next().unwrap() % 4 != 0).then(|| {
        let ids: Vec<String> = events.iter().map(|e| e.id.clone()).collect();
        let mut edges: Vec<BehaviorEdge> = ids
            .windows(2)
            .map(|w| BehaviorEdge {
                from: w[0].clone(),
                to: w[1].clone(),
                kind: EdgeKind::Sequence,
            })
            .collect();
        if ids.len() > 1 {
            edges.push(BehaviorEdge {
                from: ids[ids.len() - 1].clone(),
                to: ids[0].clone(),
                kind: EdgeKind::Repeat,
            });
        }
        BehaviorModel {
            components: vec![Component {
                name: "main".into(),
                members: ids.into_iter().collect(),
            }],
            edges,
        }
    });

    ModelDocument {
        static_model: m,
        events,
        behavior,
        params: BTreeMap::from([
            ("cap".to_string(), Value::Int(2)),
            ("note".to_string(), Value::Str("x y".into())),
        ]),
    }
}
