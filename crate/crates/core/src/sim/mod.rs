//! Discrete-time simulation of a model's behavior.
//!
//! Time advances in integer ticks. Each behavior component runs one token
//! lineage at a time and fires at most one event per tick; components are
//! polled round-robin starting at `tick mod n`, and ties inside a component
//! go to the event declared first.

mod check;
mod trace;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

pub use check::check_trace;
pub use trace::{SlotValue, Trace, TraceEntry};

use crate::document::{validate_document, ModelDocument};
use crate::dynamics::{EdgeKind, EffectOp, ElementRef, EventDef};
use crate::error::{Error, Result};
use crate::guard::{Guard, GuardEnv, Value};
use crate::model::{ActionKind, SlotKind, ThimacId};

/// A thing injected into the model from outside.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stimulus {
    pub at_tick: u64,
    pub inject: Injection,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Injection {
    /// Id of the thimac whose create stage admits the thing.
    #[serde(rename = "type")]
    pub thimac: String,
    #[serde(default)]
    pub attributes: BTreeMap<String, Value>,
}

impl Stimulus {
    pub fn new(at_tick: u64, thimac: impl Into<String>) -> Self {
        Stimulus {
            at_tick,
            inject: Injection {
                thimac: thimac.into(),
                attributes: BTreeMap::new(),
            },
        }
    }

    pub fn with(mut self, attribute: impl Into<String>, value: Value) -> Self {
        self.inject.attributes.insert(attribute.into(), value);
        self
    }

    pub fn list_from_json(s: &str) -> serde_json::Result<Vec<Stimulus>> {
        serde_json::from_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimLimits {
    pub max_ticks: u64,
}

impl Default for SimLimits {
    fn default() -> Self {
        SimLimits { max_ticks: 10_000 }
    }
}

/// Runs the behavior model until quiescence: a tick in which nothing fires
/// and no stimulus is still due. Hitting `max_ticks` first yields
/// `Error::TickLimit` carrying the partial trace.
pub fn simulate(doc: &ModelDocument, stimuli: &[Stimulus], limits: SimLimits) -> Result<Trace> {
    let report = validate_document(doc);
    if !report.ok {
        return Err(Error::NotValid(Box::new(report)));
    }
    let mut sim = Sim::new(doc, stimuli)?;
    let mut tick = 0u64;
    while tick < limits.max_ticks {
        let fired = sim.step(tick)?;
        if !fired {
            match sim.next_stimulus_after(tick) {
                Some(t) => {
                    tick = t;
                    continue;
                }
                None => return Ok(sim.trace),
            }
        }
        tick += 1;
    }
    Err(Error::TickLimit(Box::new(sim.trace)))
}

#[derive(Debug, Clone)]
enum SlotState {
    Counter(i64),
    Queue(VecDeque<usize>),
    Flag(bool),
}

#[derive(Debug)]
struct Token {
    id: String,
    parent: Option<usize>,
    attributes: BTreeMap<String, Value>,
}

/// How an entry event obtains the thing that starts a lineage.
#[derive(Debug, Clone, PartialEq)]
enum Entry {
    Stimulus(BTreeSet<ThimacId>),
    Queue(String),
    Autonomous,
}

struct Plan<'a> {
    ev: &'a EventDef,
    guards: Vec<&'a Guard>,
    creates: Vec<ThimacId>,
    preds: Vec<&'a str>,
    /// Other successors of this event's predecessors; firing one of them
    /// takes the other branch.
    rivals: Vec<&'a str>,
    terminal: bool,
    entry: Option<Entry>,
}

struct Lineage {
    root: Option<usize>,
    current: Option<usize>,
    fired: BTreeSet<String>,
}

struct ComponentState<'a> {
    events: Vec<Plan<'a>>,
    repeats: bool,
    lineage: Option<Lineage>,
    finished: bool,
    autonomous_done: BTreeSet<String>,
}

struct Sim<'a> {
    doc: &'a ModelDocument,
    slots: BTreeMap<String, SlotState>,
    tokens: Vec<Token>,
    pending: Vec<&'a Stimulus>,
    components: Vec<ComponentState<'a>>,
    trace: Trace,
}

struct Env<'s, 'a> {
    sim: &'s Sim<'a>,
    token: Option<usize>,
    /// Attributes of a stimulus not yet turned into a token.
    pending: Option<&'s BTreeMap<String, Value>>,
}

impl GuardEnv for Env<'_, '_> {
    fn attribute(&self, name: &str) -> Option<Value> {
        if let Some(v) = self.pending.and_then(|a| a.get(name)) {
            return Some(v.clone());
        }
        let mut t = self.token;
        while let Some(i) = t {
            if let Some(v) = self.sim.tokens[i].attributes.get(name) {
                return Some(v.clone());
            }
            t = self.sim.tokens[i].parent;
        }
        None
    }

    fn slot(&self, path: &str) -> Option<Value> {
        Some(match self.sim.slots.get(path)? {
            SlotState::Counter(n) => Value::Int(*n),
            SlotState::Queue(q) => Value::Int(q.len() as i64),
            SlotState::Flag(b) => Value::Bool(*b),
        })
    }

    fn param(&self, name: &str) -> Option<Value> {
        self.sim.doc.params.get(name).cloned()
    }
}

impl<'a> Sim<'a> {
    fn new(doc: &'a ModelDocument, stimuli: &'a [Stimulus]) -> Result<Self> {
        let model = &doc.static_model;
        let mut slots = BTreeMap::new();
        for t in &model.thimacs {
            for s in &t.slots {
                let state = match &s.kind {
                    SlotKind::Counter { initial, .. } => SlotState::Counter(*initial),
                    SlotKind::Queue => SlotState::Queue(VecDeque::new()),
                    SlotKind::Flag { initial } => SlotState::Flag(*initial),
                };
                slots.insert(format!("{}.{}", t.id, s.name), state);
            }
        }

        for s in stimuli {
            let id = ThimacId::new(s.inject.thimac.clone());
            let Some(t) = model.thimac(&id) else {
                return Err(Error::BadStimulus(format!("unknown thimac `{id}`")));
            };
            if !t.has_stage(ActionKind::Create) {
                return Err(Error::BadStimulus(format!("`{id}` has no create stage")));
            }
            if let Some(a) = s.inject.attributes.keys().find(|a| !t.attributes.contains(*a)) {
                return Err(Error::BadStimulus(format!("`{id}` declares no attribute `{a}`")));
            }
        }
        let mut pending: Vec<&Stimulus> = stimuli.iter().collect();
        // Stable sort keeps file order among stimuli due at the same tick.
        pending.sort_by_key(|s| s.at_tick);

        let mut components = Vec::new();
        if let Some(b) = &doc.behavior {
            for c in &b.components {
                let repeats = b
                    .edges
                    .iter()
                    .any(|e| e.kind == EdgeKind::Repeat && c.members.contains(&e.from));
                let events = doc
                    .events
                    .iter()
                    .filter(|e| c.members.contains(&e.id))
                    .map(|ev| plan(doc, ev))
                    .collect();
                components.push(ComponentState {
                    events,
                    repeats,
                    lineage: None,
                    finished: false,
                    autonomous_done: BTreeSet::new(),
                });
            }
        }
        Ok(Sim {
            doc,
            slots,
            tokens: Vec::new(),
            pending,
            components,
            trace: Trace::default(),
        })
    }

    fn next_stimulus_after(&self, tick: u64) -> Option<u64> {
        self.pending.iter().map(|s| s.at_tick).filter(|t| *t > tick).min()
    }

    fn step(&mut self, tick: u64) -> Result<bool> {
        let n = self.components.len();
        let mut fired = false;
        for k in 0..n {
            let c = (tick as usize + k) % n;
            fired |= self.poll(c, tick)?;
        }
        Ok(fired)
    }

    fn guards_hold(
        &self,
        plan: &Plan,
        token: Option<usize>,
        pending: Option<&BTreeMap<String, Value>>,
    ) -> Result<bool> {
        let env = Env {
            sim: self,
            token,
            pending,
        };
        for g in &plan.guards {
            let ok = g
                .eval(&env)
                .map_err(|e| Error::GuardEval(format!("event `{}`: {e}", plan.ev.id)))?;
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn queue_ready(&self, plan: &Plan) -> bool {
        plan.ev
            .effects
            .iter()
            .filter(|e| matches!(e.op, EffectOp::Pop | EffectOp::Peek))
            .all(|e| matches!(self.slots.get(&e.slot), Some(SlotState::Queue(q)) if !q.is_empty()))
    }

    /// Tries to fire one event of component `c`.
    fn poll(&mut self, c: usize, tick: u64) -> Result<bool> {
        if self.components[c].finished {
            return Ok(false);
        }
        let comp = &self.components[c];
        let choice = match &comp.lineage {
            Some(l) => {
                let mut found = None;
                for (i, p) in comp.events.iter().enumerate() {
                    if p.entry.is_some()
                        || l.fired.contains(&p.ev.id)
                        || !p.preds.iter().all(|q| l.fired.contains(*q))
                        || p.rivals.iter().any(|r| l.fired.contains(*r))
                        || !self.queue_ready(p)
                    {
                        continue;
                    }
                    if self.guards_hold(p, l.current, None)? {
                        found = Some((i, None));
                        break;
                    }
                }
                found
            }
            None => {
                let mut found = None;
                for (i, p) in comp.events.iter().enumerate() {
                    let Some(entry) = &p.entry else { continue };
                    if !self.queue_ready(p) {
                        continue;
                    }
                    let bind = match entry {
                        Entry::Stimulus(types) => {
                            let Some(s) = self.pending.iter().position(|s| {
                                s.at_tick <= tick && types.contains(&ThimacId::new(s.inject.thimac.clone()))
                            }) else {
                                continue;
                            };
                            Bind::Stimulus(s)
                        }
                        Entry::Queue(slot) => match self.slots.get(slot) {
                            Some(SlotState::Queue(q)) if !q.is_empty() => Bind::Token(q[0]),
                            _ => continue,
                        },
                        Entry::Autonomous => {
                            if comp.autonomous_done.contains(&p.ev.id) {
                                continue;
                            }
                            Bind::Nothing
                        }
                    };
                    // Guards on an entry see the thing it would bind.
                    let probe = match &bind {
                        Bind::Token(t) => Some(*t),
                        _ => None,
                    };
                    let attrs = match &bind {
                        Bind::Stimulus(s) => Some(&self.pending[*s].inject.attributes),
                        _ => None,
                    };
                    let holds = self.guards_hold(p, probe, attrs)?;
                    if holds {
                        found = Some((i, Some(bind)));
                        break;
                    }
                }
                found
            }
        };
        let Some((i, bind)) = choice else {
            return Ok(false);
        };
        self.fire(c, i, bind, tick)?;
        Ok(true)
    }

    fn new_token(&mut self, parent: Option<usize>, attributes: BTreeMap<String, Value>) -> usize {
        let id = format!("t{}", self.tokens.len() + 1);
        self.tokens.push(Token { id, parent, attributes });
        self.tokens.len() - 1
    }

    fn fire(&mut self, c: usize, i: usize, bind: Option<Bind>, tick: u64) -> Result<()> {
        if let Some(bind) = bind {
            let root = match bind {
                Bind::Stimulus(s) => {
                    let stim = self.pending.remove(s);
                    Some(self.new_token(None, stim.inject.attributes.clone()))
                }
                Bind::Token(t) => Some(t),
                Bind::Nothing => {
                    let id = self.components[c].events[i].ev.id.clone();
                    self.components[c].autonomous_done.insert(id);
                    None
                }
            };
            self.components[c].lineage = Some(Lineage {
                root,
                current: root,
                fired: BTreeSet::new(),
            });
        }

        let ev = self.components[c].events[i].ev;
        let creates = self.components[c].events[i].creates.clone();
        let terminal = self.components[c].events[i].terminal;
        let (root, mut current) = {
            let l = self.components[c].lineage.as_ref().expect("bound lineage");
            (l.root, l.current)
        };

        for eff in &ev.effects {
            let slot = self
                .slots
                .get_mut(&eff.slot)
                .ok_or_else(|| Error::DanglingRef(eff.slot.clone()))?;
            match (eff.op, slot) {
                (EffectOp::Inc, SlotState::Counter(n)) => *n += 1,
                (EffectOp::Dec, SlotState::Counter(n)) => {
                    if *n == 0 {
                        return Err(Error::CapacityUnderflow(eff.slot.clone()));
                    }
                    *n -= 1;
                }
                (EffectOp::Push, SlotState::Queue(q)) => {
                    if let Some(r) = root {
                        q.push_back(r);
                    }
                }
                (EffectOp::Pop, SlotState::Queue(q)) => {
                    q.pop_front();
                }
                (EffectOp::Set, SlotState::Flag(b)) => *b = true,
                (EffectOp::Clear, SlotState::Flag(b)) => *b = false,
                _ => {}
            }
        }
        for _ in &creates {
            current = Some(self.new_token(current, BTreeMap::new()));
        }

        let mut chain = Vec::new();
        let mut t = current;
        while let Some(x) = t {
            chain.push(self.tokens[x].id.clone());
            t = self.tokens[x].parent;
        }
        chain.reverse();
        let state_snapshot = self
            .slots
            .iter()
            .map(|(k, v)| {
                let v = match v {
                    SlotState::Counter(n) => SlotValue::Int(*n),
                    SlotState::Flag(b) => SlotValue::Bool(*b),
                    SlotState::Queue(q) => SlotValue::Queue(q.iter().map(|t| self.tokens[*t].id.clone()).collect()),
                };
                (k.clone(), v)
            })
            .collect();
        self.trace.entries.push(TraceEntry {
            tick,
            event_id: ev.id.clone(),
            token_ids: chain,
            state_snapshot,
        });

        let comp = &mut self.components[c];
        if terminal {
            comp.lineage = None;
            comp.finished = !comp.repeats;
        } else if let Some(l) = &mut comp.lineage {
            l.fired.insert(ev.id.clone());
            l.current = current;
        }
        Ok(())
    }
}

enum Bind {
    Stimulus(usize),
    Token(usize),
    Nothing,
}

fn plan<'a>(doc: &'a ModelDocument, ev: &'a EventDef) -> Plan<'a> {
    let model = &doc.static_model;
    let mut guards = Vec::new();
    let mut creates = Vec::new();
    for e in &ev.region.elements {
        if let ElementRef::Trigger(a, b) = e {
            for t in model.triggers.iter().filter(|t| &t.source == a && &t.target == b) {
                guards.extend(t.guard.as_ref());
            }
            if b.kind == ActionKind::Create {
                creates.push(b.thimac.clone());
            }
        }
    }
    let b = doc.behavior.as_ref();
    let preds: Vec<&str> = b.map(|b| b.sequence_preds(&ev.id).collect()).unwrap_or_default();
    let mut rivals: Vec<&str> = b
        .map(|b| {
            preds
                .iter()
                .flat_map(|p| b.sequence_succs(p))
                .filter(|s| *s != ev.id)
                .collect()
        })
        .unwrap_or_default();
    rivals.sort_unstable();
    rivals.dedup();
    let terminal = b.is_none_or(|b| b.sequence_succs(&ev.id).next().is_none());
    let entry = preds.is_empty().then(|| {
        let types: BTreeSet<ThimacId> = ev.create_stages().map(|s| s.thimac.clone()).collect();
        if !types.is_empty() {
            return Entry::Stimulus(types);
        }
        ev.effects
            .iter()
            .find(|e| matches!(e.op, EffectOp::Pop | EffectOp::Peek))
            .map(|e| Entry::Queue(e.slot.clone()))
            .unwrap_or(Entry::Autonomous)
    });
    Plan {
        ev,
        guards,
        creates,
        preds,
        rivals,
        terminal,
        entry,
    }
}
