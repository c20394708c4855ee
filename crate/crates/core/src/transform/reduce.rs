use std::collections::{BTreeMap, BTreeSet};

use serde_json::Value as Json;

use super::graph::{Node, PropertyGraph, Props, Rel};
use crate::dynamics::{Classification, EventDef};
use crate::error::{Error, Result};
use crate::model::{ActionRef, StaticModel, ThimacId};
use crate::report::ValidationReport;

/// A dynamic model with its actions eliminated: instances as nodes and
/// binary events as relationships. Events that cannot be reduced are
/// reported as errors in `diagnostics`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Skeleton {
    pub graph: PropertyGraph,
    pub diagnostics: ValidationReport,
}

/// Reduces events over `model` to a graph skeleton.
///
/// Each instance becomes a node labeled with its host thimac's class. An
/// event's participants come from its `relates` clause, or else from the
/// instance hosts its region touches; two participants give a relationship
/// directed along the region's arcs (two when mutual), one gives a node
/// property, and three or more are unreducible.
pub fn reduce_dynamic(model: &StaticModel, events: &[EventDef]) -> Skeleton {
    let mut sk = Skeleton::default();
    let mut hosts: BTreeMap<&ThimacId, Vec<&str>> = BTreeMap::new();
    let mut nodes: BTreeMap<&str, Node> = BTreeMap::new();
    for ev in events.iter().filter(|e| e.classification == Classification::Instance) {
        let Some(create) = ev.create_stages().next() else {
            continue;
        };
        let label = model
            .thimac(&create.thimac)
            .map(|t| t.class_label().to_string())
            .unwrap_or_else(|| create.thimac.to_string());
        let mut props = Props::new();
        if let Some(l) = &ev.label {
            props.insert("name".into(), Json::String(l.clone()));
        }
        hosts.entry(&create.thimac).or_default().push(&ev.id);
        nodes.insert(
            &ev.id,
            Node {
                id: ev.id.clone(),
                labels: vec![label],
                props,
            },
        );
    }

    for ev in events.iter().filter(|e| e.classification == Classification::Event) {
        let name = ev.display_label().to_string();
        if let Some(r) = &ev.relates {
            let mut pairs = vec![(&r.from, &r.to)];
            if r.mutual {
                pairs.push((&r.to, &r.from));
            }
            emit(&mut sk.graph, ev, &name, &pairs);
            continue;
        }
        let touched: Vec<&ThimacId> = ev
            .region
            .touched_thimacs()
            .into_iter()
            .filter(|t| hosts.contains_key(t))
            .collect();
        if let Some(t) = touched.iter().find(|t| hosts[*t].len() > 1) {
            sk.diagnostics.error(
                "UNREDUCIBLE",
                format!("event `{}` touches `{t}`, which hosts several instances", ev.id),
                [&ev.id],
            );
            continue;
        }
        match touched.as_slice() {
            [] => sk.diagnostics.warning(
                "NO_INSTANCES",
                format!("event `{}` touches no instance and is left out", ev.id),
                [&ev.id],
            ),
            [t] => {
                let node = nodes.get_mut(hosts[*t][0]).expect("instance node");
                node.props.insert(name, Json::Bool(true));
            }
            [a, b] => {
                let (ia, ib) = (hosts[*a][0].to_string(), hosts[*b][0].to_string());
                let ab = reaches(ev, a, b);
                let ba = reaches(ev, b, a);
                let mut pairs = Vec::new();
                if ab {
                    pairs.push((&ia, &ib));
                }
                if ba {
                    pairs.push((&ib, &ia));
                }
                if pairs.is_empty() {
                    sk.diagnostics.error(
                        "UNREDUCIBLE",
                        format!("event `{}` has no direction between `{a}` and `{b}`", ev.id),
                        [&ev.id],
                    );
                } else {
                    emit(&mut sk.graph, ev, &name, &pairs);
                }
            }
            _ => sk.diagnostics.error(
                "UNREDUCIBLE",
                format!("event `{}` touches {} instances", ev.id, touched.len()),
                [&ev.id],
            ),
        }
    }
    sk.graph.nodes = nodes.into_values().collect();
    sk.graph.canonicalize();
    sk
}

fn emit(g: &mut PropertyGraph, ev: &EventDef, rel_type: &str, pairs: &[(&String, &String)]) {
    for (i, (from, to)) in pairs.iter().enumerate() {
        let id = if pairs.len() == 1 {
            ev.id.clone()
        } else {
            format!("{}#{}", ev.id, i + 1)
        };
        g.rels.push(Rel {
            id,
            rel_type: rel_type.to_string(),
            start: from.to_string(),
            end: to.to_string(),
            props: Props::new(),
        });
    }
}

/// Whether some stage of `a` reaches some stage of `b` along the region's
/// flow and trigger arcs.
fn reaches(ev: &EventDef, a: &ThimacId, b: &ThimacId) -> bool {
    let arcs: Vec<(&ActionRef, &ActionRef)> = ev.region.flows().chain(ev.region.triggers()).collect();
    let mut seen: BTreeSet<&ActionRef> = BTreeSet::new();
    let mut stack: Vec<&ActionRef> = ev.region.stages().filter(|s| &s.thimac == a).collect();
    while let Some(x) = stack.pop() {
        if !seen.insert(x) {
            continue;
        }
        for (s, t) in &arcs {
            if *s == x {
                if &t.thimac == b {
                    return true;
                }
                stack.push(t);
            }
        }
    }
    false
}

/// The interchange graph of a skeleton without unreducible events.
pub fn to_property_graph(sk: &Skeleton) -> Result<PropertyGraph> {
    if !sk.diagnostics.ok {
        let ids: Vec<String> = sk.diagnostics.errors().flat_map(|d| d.elements.clone()).collect();
        return Err(Error::Unreducible(ids.join(", ")));
    }
    Ok(sk.graph.clone().canonicalized())
}
