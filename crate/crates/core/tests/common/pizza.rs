//! Helpers and independent oracles for pizza-shop runs.

use tmkit::guard::Value;
use tmkit::sim::{simulate, SimLimits, Stimulus, Trace};
use tmkit::ModelDocument;

pub fn order(at_tick: u64, payment_ok: bool) -> Stimulus {
    Stimulus::new(at_tick, "Customer.Order").with("payment_ok", Value::Bool(payment_ok))
}

pub fn with_capacity(doc: &ModelDocument, capacity: i64) -> ModelDocument {
    let mut d = doc.clone();
    d.params.insert("oven_capacity".into(), Value::Int(capacity));
    d
}

pub fn run(doc: &ModelDocument, stimuli: &[Stimulus]) -> Trace {
    simulate(doc, stimuli, SimLimits::default()).expect("run quiesces")
}

/// Root token of each firing of `event`, in trace order.
pub fn roots(trace: &Trace, event: &str) -> Vec<String> {
    trace
        .entries
        .iter()
        .filter(|e| e.event_id == event)
        .map(|e| e.token_ids[0].clone())
        .collect()
}

pub fn count(trace: &Trace, event: &str) -> usize {
    trace.entries.iter().filter(|e| e.event_id == event).count()
}

/// Stimuli in the order the shop takes them: by tick, then as listed.
pub fn arrival_order(stimuli: &[Stimulus]) -> Vec<&Stimulus> {
    let mut v: Vec<(usize, &Stimulus)> = stimuli.iter().enumerate().collect();
    v.sort_by_key(|(i, s)| (s.at_tick, *i));
    v.into_iter().map(|(_, s)| s).collect()
}

pub fn accepted(s: &Stimulus) -> bool {
    s.inject.attributes.get("payment_ok") == Some(&Value::Bool(true))
}

/// Replays the orders through a plain FIFO: order tokens are bound to
/// stimuli by their order of creation (E1), accepted orders join the queue
/// and leave it in the same order, so deliveries follow arrival.
pub fn expected_deliveries(trace: &Trace, stimuli: &[Stimulus]) -> Vec<String> {
    let created = roots(trace, "E1");
    let arrivals = arrival_order(stimuli);
    assert_eq!(created.len(), arrivals.len(), "every order is created");
    let mut queue = std::collections::VecDeque::new();
    for (tok, s) in created.iter().zip(arrivals) {
        if accepted(s) {
            queue.push_back(tok.clone());
        }
    }
    queue.into_iter().collect()
}
