mod common;

use std::collections::BTreeSet;

use tmkit::model::{legal_simplified_successors, ActionKind, ActionRef, FlowArc, Form, Locality, StaticModel, Thimac};
use tmkit::{parse, validate_static};

use ActionKind::*;
use Locality::*;

/// The flow table, written out independently of the library.
fn full_table() -> BTreeSet<(ActionKind, ActionKind, Locality)> {
    [
        (Create, Process, Intra),
        (Create, Release, Intra),
        (Receive, Process, Intra),
        (Receive, Release, Intra),
        (Process, Release, Intra),
        (Release, Transfer, Intra),
        (Transfer, Receive, Intra),
        (Transfer, Transfer, Cross),
    ]
    .into()
}

fn one_flow(s: ActionKind, t: ActionKind, loc: Locality, form: Form) -> StaticModel {
    let mut a = Thimac::new("A", None).with_stages(&[s]);
    let target = match loc {
        Intra => {
            if s != t {
                a = a.with_stages(&[t]);
            }
            "A"
        }
        Cross => "B",
    };
    StaticModel {
        thimacs: vec![a, Thimac::new("B", None).with_stages(&ActionKind::ALL)],
        flows: vec![FlowArc::new(ActionRef::new("A", s), ActionRef::new(target, t))],
        triggers: vec![],
        form,
    }
}

#[test]
fn all_flow_pairs_in_both_localities() {
    let table = full_table();
    let kinds: BTreeSet<(ActionKind, ActionKind)> = table.iter().map(|(s, t, _)| (*s, *t)).collect();
    for s in ActionKind::ALL {
        for t in ActionKind::ALL {
            for loc in [Intra, Cross] {
                let r = validate_static(&one_flow(s, t, loc, Form::Full));
                let ok = r.errors().count() == 0;
                if table.contains(&(s, t, loc)) {
                    assert!(ok, "{s} -> {t} {loc:?}: {:?}", r.diagnostics);
                } else if kinds.contains(&(s, t)) {
                    assert!(
                        r.has_code("ARC_LOCALITY") && !r.has_code("ILLEGAL_FLOW"),
                        "{s} -> {t} {loc:?}"
                    );
                } else {
                    assert!(r.has_code("ILLEGAL_FLOW"), "{s} -> {t} {loc:?}: {:?}", r.diagnostics);
                }
            }
        }
    }
}

#[test]
fn simplified_flow_table() {
    let table: BTreeSet<(ActionKind, ActionKind, Locality)> = [
        (Create, Process, Intra),
        (Create, Process, Cross),
        (Process, Process, Cross),
    ]
    .into();
    for s in [Create, Process] {
        for t in [Create, Process] {
            for loc in [Intra, Cross] {
                let lib = legal_simplified_successors(s).contains(&(t, loc));
                assert_eq!(lib, table.contains(&(s, t, loc)));
                let mut m = one_flow(s, t, loc, Form::Simplified);
                for th in &mut m.thimacs {
                    th.stages.retain(|st| matches!(st.kind, Create | Process));
                }
                let ok = validate_static(&m).errors().count() == 0;
                assert_eq!(ok, table.contains(&(s, t, loc)), "{s} -> {t} {loc:?}");
            }
        }
    }
}

fn codes(src: &str) -> BTreeSet<String> {
    let parsed = parse(src).unwrap_or_else(|e| panic!("{e}\n{src}"));
    parsed.report.diagnostics.iter().map(|d| d.code.clone()).collect()
}

#[test]
fn structural_errors() {
    let cases = [
        ("static {\n  thimac A { create }\n  thimac A { create }\n}\n", "DUPLICATE_THIMAC"),
        ("static {\n  thimac A { create create }\n}\n", "DUPLICATE_STAGE"),
        ("static {\n  thimac A { }\n}\n", "EMPTY_THIMAC"),
        ("static {\n  thimac A { create }\n  flow A.create -> B.process\n}\n", "DANGLING_REF"),
        ("static {\n  thimac A { create process }\n  flow A.create -> A.process\n  flow A.create -> A.process\n}\n", "DUPLICATE_ARC"),
        ("static {\n  thimac A { create }\n  thimac B { process }\n  trigger A.create --> B.process when missing\n}\n", "UNDECLARED_GUARD_REF"),
        ("static {\n  thimac A { create }\n  thimac B { release }\n  trigger A.create --> B.release\n}\n", "ILLEGAL_TRIGGER_TARGET"),
        ("static {\n  thimac A { create process }\n  trigger A.create --> A.process\n}\n", "TRIGGER_NOT_CROSSING"),
        ("static simplified {\n  thimac A { create release }\n}\n", "ELIDED_STAGE_PRESENT"),
        ("static {\n  thimac A { create counter n max $cap }\n}\n", "UNKNOWN_PARAM"),
        ("static {\n  thimac A { create process }\n  flow A.create -> A.process\n}\nevents {\n  event E1 = { A.create -> A.process } do inc A.n\n}\n", "UNDECLARED_SLOT"),
        ("static {\n  thimac A { create process queue q }\n  flow A.create -> A.process\n}\nevents {\n  event E1 = { A.create -> A.process } do inc A.q\n}\n", "EFFECT_KIND_MISMATCH"),
        ("static {\n  thimac A { create process }\n  flow A.create -> A.process\n}\nevents {\n  event E1 = { A.create -> A.process }\n  event E1 = { A.process }\n}\n", "DUPLICATE_EVENT"),
        ("static {\n  thimac A { create process }\n  flow A.create -> A.process\n}\nevents {\n  event E1 = { A.create -> A.process }\n}\nbehavior {\n  component c { E1 -> E2 }\n}\n", "UNKNOWN_EVENT"),
        ("static {\n  thimac A { create process }\n  flow A.create -> A.process\n}\nevents {\n  event E1 = { A.create }\n  event E2 = { A.process }\n}\nbehavior {\n  component c { E1 -> E2 -> E1 }\n}\n", "SEQUENCE_CYCLE"),
        ("static {\n  thimac A { create process }\n  flow A.create -> A.process\n}\nevents {\n  event E1 = { A.create }\n  event E2 = { A.process }\n}\nbehavior {\n  component c { E1 }\n  component d { E2 }\n  component e { E1 -> E2 }\n}\n", "NODE_IN_MULTIPLE_COMPONENTS"),
        ("static {\n  thimac A { create process }\n  flow A.create -> A.process\n}\nevents {\n  event E1 = { A.create }\n  event E2 = { A.process }\n}\nbehavior {\n  component c { E1 }\n}\n", "EVENT_NOT_IN_BEHAVIOR"),
    ];
    for (src, code) in cases {
        let got = codes(src);
        assert!(got.contains(code), "expected {code}, got {got:?} for\n{src}");
    }
}

#[test]
fn empty_model_has_one_warning() {
    let parsed = parse("static {\n}\n").unwrap();
    assert!(parsed.report.ok);
    assert_eq!(parsed.report.diagnostics.len(), 1);
    assert!(parsed.report.has_code("EMPTY_MODEL"));
}

#[test]
fn corpus_has_no_errors() {
    for name in common::MODELS {
        let parsed = parse(&common::read(name)).unwrap();
        assert_eq!(
            parsed.report.errors().count(),
            0,
            "{name}: {:#?}",
            parsed.report.diagnostics
        );
    }
}

#[test]
fn validation_is_deterministic() {
    let doc = common::load("pizza.tm");
    assert_eq!(tmkit::validate_document(&doc), tmkit::validate_document(&doc));
}
