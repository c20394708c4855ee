use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

/// Value of one state slot at a point in a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SlotValue {
    Bool(bool),
    Int(i64),
    Queue(Vec<String>),
}

impl std::fmt::Display for SlotValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SlotValue::Bool(b) => write!(f, "{b}"),
            SlotValue::Int(i) => write!(f, "{i}"),
            SlotValue::Queue(q) => write!(f, "[{}]", q.join(",")),
        }
    }
}

/// One fired event. `token_ids` lists the lineage root first; the snapshot
/// holds every slot after the event's effects, keyed `Thimac.slot`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub tick: u64,
    pub event_id: String,
    pub token_ids: Vec<String>,
    pub state_snapshot: BTreeMap<String, SlotValue>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Trace {
    pub entries: Vec<TraceEntry>,
}

impl Trace {
    pub fn event_ids(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.event_id.as_str()).collect()
    }

    /// Tab-separated: tick, event, tokens, `slot=value;...`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("tick\tevent\ttokens\tstate\n");
        for e in &self.entries {
            let state: Vec<String> = e.state_snapshot.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}",
                e.tick,
                e.event_id,
                e.token_ids.join(","),
                state.join(";")
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.entries).expect("trace serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Trace> {
        Ok(Trace {
            entries: serde_json::from_str(s)?,
        })
    }
}
