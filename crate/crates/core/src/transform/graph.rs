use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Props = BTreeMap<String, serde_json::Value>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub labels: Vec<String>,
    #[serde(default)]
    pub props: Props,
}

impl Node {
    /// The `name` property when it is a string, else the id.
    pub fn name(&self) -> &str {
        match self.props.get("name") {
            Some(serde_json::Value::String(s)) => s,
            _ => &self.id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rel {
    pub id: String,
    #[serde(rename = "type")]
    pub rel_type: String,
    pub start: String,
    pub end: String,
    #[serde(default)]
    pub props: Props,
}

/// Labeled property graph in the JSON interchange shape
/// `{"nodes": [...], "rels": [...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PropertyGraph {
    pub nodes: Vec<Node>,
    pub rels: Vec<Rel>,
}

impl PropertyGraph {
    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// Sorts nodes and rels by id and each node's labels alphabetically.
    pub fn canonicalize(&mut self) {
        for n in &mut self.nodes {
            n.labels.sort();
            n.labels.dedup();
        }
        self.nodes.sort_by(|a, b| a.id.cmp(&b.id));
        self.rels.sort_by(|a, b| a.id.cmp(&b.id));
    }

    pub fn canonicalized(mut self) -> Self {
        self.canonicalize();
        self
    }

    /// Unique ids, resolvable rel endpoints, at least one non-empty label
    /// per node and a non-empty type per rel.
    pub fn check(&self) -> Result<()> {
        let mut ids = BTreeSet::new();
        for n in &self.nodes {
            if !ids.insert(n.id.as_str()) {
                return Err(Error::InvalidGraph(format!("duplicate node id `{}`", n.id)));
            }
            if n.labels.is_empty() || n.labels.iter().any(|l| l.is_empty()) {
                return Err(Error::EmptyLabel(n.id.clone()));
            }
        }
        let mut rel_ids = BTreeSet::new();
        for r in &self.rels {
            if !rel_ids.insert(r.id.as_str()) {
                return Err(Error::InvalidGraph(format!("duplicate rel id `{}`", r.id)));
            }
            if r.rel_type.is_empty() {
                return Err(Error::InvalidGraph(format!("rel `{}` has an empty type", r.id)));
            }
            for end in [&r.start, &r.end] {
                if !ids.contains(end.as_str()) {
                    return Err(Error::InvalidGraph(format!(
                        "rel `{}` refers to missing node `{end}`",
                        r.id
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let g: PropertyGraph = serde_json::from_str(s)?;
        g.check()?;
        Ok(g)
    }

    /// Canonical pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.clone().canonicalized()).expect("graph serializes");
        s.push('\n');
        s
    }
}
