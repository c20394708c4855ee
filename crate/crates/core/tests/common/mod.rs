#![allow(dead_code)]

pub mod gen;
pub mod iso;
pub mod pizza;

use std::path::PathBuf;

use tmkit::ModelDocument;

pub fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
}

pub fn read(name: &str) -> String {
    std::fs::read_to_string(corpus(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn load(name: &str) -> ModelDocument {
    let parsed = tmkit::parse(&read(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    assert!(parsed.report.ok, "{name}: {:#?}", parsed.report.diagnostics);
    parsed.document
}

pub const MODELS: [&str; 5] = [
    "pizza.tm",
    "followship.tm",
    "followship_simplified.tm",
    "orders.tm",
    "empty.tm",
];

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Every (corpus input, view) rendering as `(file name, contents)`. Views
/// that do not apply to an input record the error code instead.
pub fn golden_renders() -> Vec<(String, String)> {
    use tmkit::render::{render, RenderInput, RenderView};
    let mut out = Vec::new();
    for name in MODELS {
        let doc = load(name);
        let stem = name.trim_end_matches(".tm");
        for view in RenderView::ALL {
            match render(RenderInput::Document(&doc), view) {
                Ok(dot) => out.push((format!("{stem}.{}.dot", view.as_str()), dot)),
                Err(e) => out.push((format!("{stem}.{}.err", view.as_str()), format!("{}\n", e.code()))),
            }
        }
    }
    let g = tmkit::transform::PropertyGraph::from_json(&read("friends.json")).unwrap();
    for view in RenderView::ALL {
        match render(RenderInput::Graph(&g), view) {
            Ok(dot) => out.push((format!("friends.{}.dot", view.as_str()), dot)),
            Err(e) => out.push((format!("friends.{}.err", view.as_str()), format!("{}\n", e.code()))),
        }
    }
    out
}

/// Compares renders with the stored goldens; `TM_UPDATE_GOLDEN=1` rewrites
/// them instead.
pub fn check_goldens() -> Result<usize, String> {
    let dir = golden_dir();
    let first = golden_renders();
    let second = golden_renders();
    if first != second {
        return Err("two renders of the same input differ".into());
    }
    if std::env::var("TM_UPDATE_GOLDEN").as_deref() == Ok("1") {
        std::fs::create_dir_all(&dir).unwrap();
        for (name, text) in &first {
            std::fs::write(dir.join(name), text).unwrap();
        }
    }
    let mut bad = Vec::new();
    for (name, text) in &first {
        match std::fs::read_to_string(dir.join(name)) {
            Ok(stored) if stored == *text => {}
            Ok(_) => bad.push(format!("{name} differs")),
            Err(_) => bad.push(format!("{name} missing")),
        }
    }
    if bad.is_empty() {
        Ok(first.len())
    } else {
        Err(bad.join(", "))
    }
}
