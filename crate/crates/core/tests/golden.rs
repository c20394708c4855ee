mod common;

#[test]
fn renders_match_goldens() {
    match common::check_goldens() {
        Ok(n) => assert_eq!(n, 30),
        Err(why) => panic!("{why}; rerun with TM_UPDATE_GOLDEN=1 after an intended change"),
    }
}

#[test]
fn pizza_static_view_shape() {
    let dot = std::fs::read_to_string(common::golden_dir().join("pizza.static-full.dot")).unwrap();
    assert_eq!(dot.matches("subgraph \"cluster_").count(), 12);
    for n in [3, 9, 10, 16] {
        let line = dot
            .lines()
            .find(|l| l.contains(&format!("xlabel=\"{n}\"")) && l.contains("->"))
            .unwrap_or_else(|| panic!("no arc annotated {n}"));
        assert!(line.contains("style=dashed"), "{line}");
    }
}

#[test]
fn every_stage_appears_once() {
    let doc = common::load("pizza.tm");
    let dot = std::fs::read_to_string(common::golden_dir().join("pizza.static-full.dot")).unwrap();
    for r in doc.static_model.stage_refs() {
        let decl = format!("  \"{r}\" [label=");
        assert_eq!(dot.matches(&decl).count(), 1, "{r}");
    }
    for t in &doc.static_model.thimacs {
        assert_eq!(dot.matches(&format!("\"cluster_{}\"", t.id)).count(), 1);
    }
}

#[test]
fn followship_graph_view() {
    let dot = std::fs::read_to_string(common::golden_dir().join("followship.property-graph.dot")).unwrap();
    assert_eq!(dot.matches(":User\"]").count(), 3);
    assert_eq!(dot.matches("[label=\"FOLLOWS\"]").count(), 5);
}
