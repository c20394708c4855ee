use std::collections::BTreeSet;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::graph::PropertyGraph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    In,
    Out,
    Both,
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "in" => Ok(Direction::In),
            "out" => Ok(Direction::Out),
            "both" => Ok(Direction::Both),
            _ => Err(format!("unknown direction `{s}` (expected in, out or both)")),
        }
    }
}

/// Names of the nodes joined to `node` by rels of `rel_type`. `node` is
/// matched against node names first and ids second.
pub fn query_neighbors(pg: &PropertyGraph, node: &str, rel_type: &str, dir: Direction) -> Result<BTreeSet<String>> {
    let mut ids: BTreeSet<&str> = pg
        .nodes
        .iter()
        .filter(|n| n.name() == node)
        .map(|n| n.id.as_str())
        .collect();
    if ids.is_empty() {
        ids.extend(pg.node(node).map(|n| n.id.as_str()));
    }
    if ids.is_empty() {
        return Err(Error::NoSuchNode(node.to_string()));
    }
    let mut out = BTreeSet::new();
    for r in pg.rels.iter().filter(|r| r.rel_type == rel_type) {
        let ends = [
            (dir != Direction::Out, &r.end, &r.start),
            (dir != Direction::In, &r.start, &r.end),
        ];
        for (wanted, here, there) in ends {
            if wanted && ids.contains(here.as_str()) {
                if let Some(n) = pg.node(there) {
                    out.insert(n.name().to_string());
                }
            }
        }
    }
    Ok(out)
}
