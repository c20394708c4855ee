mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use tmkit::guard::Value;
use tmkit::sim::{check_trace, simulate, SimLimits, SlotValue, Stimulus, Trace};
use tmkit::Error;

use common::pizza::{self, order};

fn ids(trace: &Trace) -> Vec<&str> {
    trace.entries.iter().map(|e| e.event_id.as_str()).collect()
}

fn names(v: &[u32]) -> Vec<String> {
    v.iter().map(|i| format!("E{i}")).collect()
}

fn oven(trace: &Trace, i: usize) -> i64 {
    match trace.entries[i].state_snapshot["Shop.Oven.count"] {
        SlotValue::Int(n) => n,
        ref v => panic!("{v:?}"),
    }
}

#[test]
fn accepted_order_runs_the_whole_pipeline() {
    let doc = common::load("pizza.tm");
    let trace = pizza::run(&doc, &[order(0, true)]);
    let mut want = vec![1, 2, 3, 4, 5, 7, 8, 9];
    want.extend(11..=20);
    assert_eq!(ids(&trace), names(&want));
}

#[test]
fn rejected_order_stops_after_rejection() {
    let doc = common::load("pizza.tm");
    let trace = pizza::run(&doc, &[order(0, false)]);
    assert_eq!(ids(&trace), names(&[1, 2, 3, 4, 5, 6]));
}

#[test]
fn deliveries_follow_submission_order() {
    let doc = common::load("pizza.tm");
    let stimuli = Stimulus::list_from_json(&common::read("three_orders.json")).unwrap();
    let trace = pizza::run(&doc, &stimuli);
    let delivered = pizza::roots(&trace, "E20");
    assert_eq!(delivered.len(), 3);
    assert_eq!(delivered, pizza::expected_deliveries(&trace, &stimuli));
}

#[test]
fn five_order_run_passes_trace_checks() {
    let doc = common::load("pizza.tm");
    let stimuli = Stimulus::list_from_json(&common::read("five_orders.json")).unwrap();
    let trace = pizza::run(&doc, &stimuli);
    let report = check_trace(&trace, &doc);
    assert!(report.ok, "{:#?}", report.diagnostics);
    assert!((0..trace.entries.len()).all(|i| (0..=1).contains(&oven(&trace, i))));
    assert_eq!(pizza::count(&trace, "E20"), 4);
    assert_eq!(pizza::count(&trace, "E6"), 1);
}

#[test]
fn empty_trace_is_ok() {
    let doc = common::load("pizza.tm");
    assert!(check_trace(&Trace::default(), &doc).ok);
}

#[test]
fn corrupted_counter_is_reported() {
    let doc = common::load("pizza.tm");
    let mut trace = pizza::run(&doc, &[order(0, true)]);
    let at = trace.entries.iter().position(|e| e.event_id == "E14").unwrap();
    trace.entries[at]
        .state_snapshot
        .insert("Shop.Oven.count".into(), SlotValue::Int(2));
    let report = check_trace(&trace, &doc);
    assert!(!report.ok);
    assert!(report.has_code("COUNTER_BOUNDS"));
}

#[test]
fn corrupted_queue_is_reported() {
    let doc = common::load("pizza.tm");
    let mut trace = pizza::run(&doc, &[order(0, true)]);
    let at = trace.entries.iter().position(|e| e.event_id == "E8").unwrap();
    trace.entries[at]
        .state_snapshot
        .insert("Shop.WorkList.list".into(), SlotValue::Queue(vec!["t99".into()]));
    assert!(check_trace(&trace, &doc).has_code("FIFO_ORDER"));
}

#[test]
fn both_branches_for_one_token_are_reported() {
    let doc = common::load("pizza.tm");
    let mut trace = pizza::run(&doc, &[order(0, false)]);
    let mut extra = trace.entries.last().unwrap().clone();
    extra.event_id = "E7".into();
    extra.tick += 1;
    trace.entries.push(extra);
    assert!(check_trace(&trace, &doc).has_code("EXCLUSIVE_BRANCH"));
}

#[test]
fn out_of_order_events_are_reported() {
    let doc = common::load("pizza.tm");
    let mut trace = pizza::run(&doc, &[order(0, true)]);
    trace.entries.swap(1, 2);
    assert!(check_trace(&trace, &doc).has_code("SEQUENCE_ORDER"));
}

#[test]
fn unknown_event_is_reported() {
    let doc = common::load("pizza.tm");
    let mut trace = pizza::run(&doc, &[order(0, true)]);
    trace.entries[0].event_id = "E99".into();
    assert!(check_trace(&trace, &doc).has_code("UNKNOWN_EVENT"));
}

#[test]
fn tick_limit_returns_partial_trace() {
    let doc = common::load("pizza.tm");
    match simulate(&doc, &[order(0, true)], SimLimits { max_ticks: 5 }) {
        Err(Error::TickLimit(t)) => {
            assert!(!t.entries.is_empty());
            assert!(t.entries.iter().all(|e| e.tick < 5));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn bad_stimuli_are_rejected() {
    let doc = common::load("pizza.tm");
    for s in [
        Stimulus::new(0, "Nowhere"),
        Stimulus::new(0, "Shop.Oven"),
        Stimulus::new(0, "Customer.Order").with("colour", Value::Str("red".into())),
    ] {
        let r = simulate(&doc, std::slice::from_ref(&s), SimLimits::default());
        assert!(matches!(r, Err(Error::BadStimulus(_))), "{s:?}: {r:?}");
    }
}

#[test]
fn invalid_document_is_rejected() {
    let mut doc = common::load("pizza.tm");
    doc.params.clear();
    assert!(matches!(
        simulate(&doc, &[], SimLimits::default()),
        Err(Error::NotValid(_))
    ));
}

#[test]
fn no_stimuli_means_nothing_happens() {
    let doc = common::load("pizza.tm");
    assert!(pizza::run(&doc, &[]).entries.is_empty());
}

#[test]
fn exports_agree() {
    let doc = common::load("pizza.tm");
    let trace = pizza::run(&doc, &[order(0, true), order(1, false)]);
    let back = Trace::from_json(&trace.to_json()).unwrap();
    assert_eq!(back, trace);
    let tsv = trace.to_tsv();
    let mut lines = tsv.lines();
    assert_eq!(lines.next(), Some("tick\tevent\ttokens\tstate"));
    for (line, e) in lines.zip(&trace.entries) {
        let cols: Vec<&str> = line.split('\t').collect();
        assert_eq!(cols.len(), 4);
        assert_eq!(cols[0], e.tick.to_string());
        assert_eq!(cols[1], e.event_id);
        assert_eq!(cols[2], e.token_ids.join(","));
    }
}

fn schedules() -> impl Strategy<Value = (i64, Vec<Stimulus>)> {
    (
        1i64..=3,
        proptest::collection::vec((0u64..20, any::<bool>()), 0..=10)
            .prop_map(|v| v.into_iter().map(|(t, ok)| order(t, ok)).collect()),
    )
}

fn final_oven(trace: &Trace) -> i64 {
    if trace.entries.is_empty() {
        0
    } else {
        oven(trace, trace.entries.len() - 1)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn oven_never_exceeds_capacity((cap, stimuli) in schedules()) {
        let doc = pizza::with_capacity(&common::load("pizza.tm"), cap);
        let trace = pizza::run(&doc, &stimuli);
        for i in 0..trace.entries.len() {
            prop_assert!((0..=cap).contains(&oven(&trace, i)));
        }
        prop_assert!(check_trace(&trace, &doc).ok);
    }

    #[test]
    fn work_list_is_fifo((cap, stimuli) in schedules()) {
        let doc = pizza::with_capacity(&common::load("pizza.tm"), cap);
        let trace = pizza::run(&doc, &stimuli);
        prop_assert_eq!(pizza::roots(&trace, "E11"), pizza::roots(&trace, "E8"));
        prop_assert_eq!(pizza::roots(&trace, "E20"), pizza::expected_deliveries(&trace, &stimuli));
    }

    #[test]
    fn every_accepted_order_is_delivered((cap, stimuli) in schedules()) {
        let doc = pizza::with_capacity(&common::load("pizza.tm"), cap);
        let trace = pizza::run(&doc, &stimuli);
        let accepted = stimuli.iter().filter(|s| pizza::accepted(s)).count();
        prop_assert_eq!(pizza::count(&trace, "E20"), accepted);
    }

    #[test]
    fn each_payment_takes_one_branch((cap, stimuli) in schedules()) {
        let doc = pizza::with_capacity(&common::load("pizza.tm"), cap);
        let trace = pizza::run(&doc, &stimuli);
        let mut branches: BTreeMap<String, usize> = BTreeMap::new();
        for e in trace.entries.iter().filter(|e| e.event_id == "E6" || e.event_id == "E7") {
            *branches.entry(e.token_ids[0].clone()).or_default() += 1;
        }
        let orders = pizza::roots(&trace, "E1");
        prop_assert_eq!(branches.len(), orders.len());
        prop_assert!(branches.values().all(|n| *n == 1));
    }

    #[test]
    fn oven_contents_are_conserved((cap, stimuli) in schedules()) {
        let doc = pizza::with_capacity(&common::load("pizza.tm"), cap);
        let trace = pizza::run(&doc, &stimuli);
        let in_oven = final_oven(&trace);
        prop_assert_eq!(pizza::count(&trace, "E14") as i64, pizza::count(&trace, "E16") as i64 + in_oven);
    }

    #[test]
    fn runs_are_deterministic((cap, stimuli) in schedules()) {
        let doc = pizza::with_capacity(&common::load("pizza.tm"), cap);
        let a = pizza::run(&doc, &stimuli);
        let b = pizza::run(&doc, &stimuli);
        prop_assert_eq!(a.to_tsv(), b.to_tsv());
        prop_assert_eq!(a.to_json(), b.to_json());
    }
}
