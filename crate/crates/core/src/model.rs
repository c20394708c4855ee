//! The static level of a thinging-machine model: thimacs, their action
//! stages, and the flow/trigger arcs wiring them together.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::guard::Guard;

/// One of the five generic machine actions.
///
/// Arrival and acceptance are folded into `Receive`; the set is closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActionKind {
    Create,
    Process,
    Release,
    Transfer,
    Receive,
}

impl ActionKind {
    pub const ALL: [ActionKind; 5] = [
        ActionKind::Create,
        ActionKind::Process,
        ActionKind::Release,
        ActionKind::Transfer,
        ActionKind::Receive,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ActionKind::Create => "create",
            ActionKind::Process => "process",
            ActionKind::Release => "release",
            ActionKind::Transfer => "transfer",
            ActionKind::Receive => "receive",
        }
    }

    /// Stages that survive simplification.
    pub fn is_retained(self) -> bool {
        matches!(self, ActionKind::Create | ActionKind::Process)
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ActionKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        ActionKind::ALL.into_iter().find(|k| k.as_str() == s).ok_or(())
    }
}

/// Whether an arc stays inside one thimac or crosses into another.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Locality {
    Intra,
    Cross,
}

/// Legal flow successors of a stage in a Full-form model.
pub fn legal_successors(kind: ActionKind) -> BTreeSet<(ActionKind, Locality)> {
    use ActionKind::*;
    use Locality::*;
    let table: &[(ActionKind, Locality)] = match kind {
        Create => &[(Process, Intra), (Release, Intra)],
        Receive => &[(Process, Intra), (Release, Intra)],
        Process => &[(Release, Intra)],
        Release => &[(Transfer, Intra)],
        Transfer => &[(Receive, Intra), (Transfer, Cross)],
    };
    table.iter().copied().collect()
}

/// Legal flow successors in a Simplified-form model, where only create and
/// process stages remain and arrow direction alone carries the flow.
pub fn legal_simplified_successors(kind: ActionKind) -> BTreeSet<(ActionKind, Locality)> {
    use ActionKind::*;
    use Locality::*;
    let table: &[(ActionKind, Locality)] = match kind {
        Create => &[(Process, Intra), (Process, Cross)],
        Process => &[(Process, Cross)],
        _ => &[],
    };
    table.iter().copied().collect()
}

/// Dotted path naming a thimac, e.g. `Shop.Oven`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ThimacId(pub String);

impl ThimacId {
    pub fn new(s: impl Into<String>) -> Self {
        ThimacId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn child(&self, name: &str) -> ThimacId {
        ThimacId(format!("{}.{}", self.0, name))
    }
}

impl fmt::Display for ThimacId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ThimacId {
    fn from(s: &str) -> Self {
        ThimacId(s.to_string())
    }
}

/// Address of one action stage: a thimac and a kind.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ActionRef {
    pub thimac: ThimacId,
    pub kind: ActionKind,
}

impl ActionRef {
    pub fn new(thimac: impl Into<String>, kind: ActionKind) -> Self {
        ActionRef {
            thimac: ThimacId(thimac.into()),
            kind,
        }
    }
}

impl fmt::Display for ActionRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.thimac, self.kind)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub kind: ActionKind,
    pub annotation: Option<u32>,
}

impl Stage {
    pub fn new(kind: ActionKind) -> Self {
        Stage { kind, annotation: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SlotKind {
    /// Integer counter with an optional upper bound (literal or parameter).
    Counter {
        initial: i64,
        max: Option<Bound>,
    },
    /// FIFO queue of token ids, initially empty.
    Queue,
    Flag {
        initial: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bound {
    Literal(i64),
    Param(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSlot {
    pub name: String,
    pub kind: SlotKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thimac {
    pub id: ThimacId,
    pub name: String,
    /// Optional class label; defaults to `name` when rendering graphs.
    pub class: Option<String>,
    pub parent: Option<ThimacId>,
    pub stages: Vec<Stage>,
    pub slots: Vec<StateSlot>,
    /// Token attributes that things of this class carry.
    pub attributes: BTreeSet<String>,
    pub annotation: Option<u32>,
}

impl Thimac {
    pub fn new(id: impl Into<String>, parent: Option<ThimacId>) -> Self {
        let id = ThimacId(id.into());
        let name = id.0.rsplit('.').next().unwrap_or_default().to_string();
        Thimac {
            id,
            name,
            class: None,
            parent,
            stages: Vec::new(),
            slots: Vec::new(),
            attributes: BTreeSet::new(),
            annotation: None,
        }
    }

    pub fn with_stages(mut self, kinds: &[ActionKind]) -> Self {
        self.stages.extend(kinds.iter().map(|k| Stage::new(*k)));
        self
    }

    pub fn has_stage(&self, kind: ActionKind) -> bool {
        self.stages.iter().any(|s| s.kind == kind)
    }

    pub fn slot(&self, name: &str) -> Option<&StateSlot> {
        self.slots.iter().find(|s| s.name == name)
    }

    pub fn class_label(&self) -> &str {
        self.class.as_deref().unwrap_or(&self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowArc {
    pub source: ActionRef,
    pub target: ActionRef,
    pub thing_label: Option<String>,
    pub annotation: Option<u32>,
}

impl FlowArc {
    pub fn new(source: ActionRef, target: ActionRef) -> Self {
        FlowArc {
            source,
            target,
            thing_label: None,
            annotation: None,
        }
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.thing_label = Some(label.into());
        self
    }

    fn sort_key(&self) -> (&ActionRef, &ActionRef, &Option<String>, &Option<u32>) {
        (&self.source, &self.target, &self.thing_label, &self.annotation)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriggerArc {
    pub source: ActionRef,
    pub target: ActionRef,
    pub guard: Option<Guard>,
    pub label: Option<String>,
    pub annotation: Option<u32>,
}

impl TriggerArc {
    pub fn new(source: ActionRef, target: ActionRef) -> Self {
        TriggerArc {
            source,
            target,
            guard: None,
            label: None,
            annotation: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Form {
    #[default]
    Full,
    Simplified,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StaticModel {
    pub thimacs: Vec<Thimac>,
    pub flows: Vec<FlowArc>,
    pub triggers: Vec<TriggerArc>,
    pub form: Form,
}

impl StaticModel {
    pub fn thimac(&self, id: &ThimacId) -> Option<&Thimac> {
        self.thimacs.iter().find(|t| &t.id == id)
    }

    pub fn thimac_mut(&mut self, id: &ThimacId) -> Option<&mut Thimac> {
        self.thimacs.iter_mut().find(|t| &t.id == id)
    }

    pub fn has_stage(&self, r: &ActionRef) -> bool {
        self.thimac(&r.thimac).is_some_and(|t| t.has_stage(r.kind))
    }

    pub fn children<'a>(&'a self, id: &'a ThimacId) -> impl Iterator<Item = &'a Thimac> + 'a {
        self.thimacs.iter().filter(move |t| t.parent.as_ref() == Some(id))
    }

    /// Every declared stage, in thimac then kind order.
    pub fn stage_refs(&self) -> Vec<ActionRef> {
        let mut out: Vec<ActionRef> = self
            .thimacs
            .iter()
            .flat_map(|t| {
                t.stages.iter().map(|s| ActionRef {
                    thimac: t.id.clone(),
                    kind: s.kind,
                })
            })
            .collect();
        out.sort();
        out
    }

    /// Sorts thimacs by id, stages by kind, slots by name and arcs by
    /// (source, target), the order the serializer emits.
    pub fn canonicalize(&mut self) {
        self.thimacs.sort_by(|a, b| a.id.cmp(&b.id));
        for t in &mut self.thimacs {
            t.stages.sort_by_key(|s| s.kind);
            t.slots.sort_by(|a, b| a.name.cmp(&b.name));
        }
        self.flows.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        self.triggers.sort_by(|a, b| {
            (&a.source, &a.target, &a.label, &a.annotation).cmp(&(&b.source, &b.target, &b.label, &b.annotation))
        });
    }

    pub fn canonicalized(mut self) -> Self {
        self.canonicalize();
        self
    }

    /// The thimac that owns a slot reference `Thimac.path.slot`.
    pub fn resolve_slot(&self, path: &str) -> Option<(&Thimac, &StateSlot)> {
        let (owner, slot) = path.rsplit_once('.')?;
        let t = self.thimac(&ThimacId(owner.to_string()))?;
        Some((t, t.slot(slot)?))
    }

    pub fn declares_attribute(&self, name: &str) -> bool {
        self.thimacs.iter().any(|t| t.attributes.contains(name))
    }
}
