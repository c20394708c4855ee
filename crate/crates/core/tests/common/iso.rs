//! Canonical labeling of small property graphs by colour refinement and
//! individualization. Ids are ignored; labels, the `name` property,
//! relationship types and multiplicities are kept.

use std::collections::BTreeMap;

use tmkit::transform::PropertyGraph;

struct G {
    keys: Vec<String>,
    // (from, to, type) -> multiplicity
    edges: BTreeMap<(usize, usize, String), usize>,
}

fn build(pg: &PropertyGraph) -> G {
    let index: BTreeMap<&str, usize> = pg.nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();
    let keys = pg
        .nodes
        .iter()
        .map(|n| {
            let mut labels = n.labels.clone();
            labels.sort();
            labels.dedup();
            let name = match n.props.get("name") {
                Some(serde_json::Value::String(s)) => s.clone(),
                Some(v) => v.to_string(),
                None => String::new(),
            };
            format!("{}|{}", labels.join(":"), name)
        })
        .collect();
    let mut edges = BTreeMap::new();
    for r in &pg.rels {
        *edges
            .entry((index[r.start.as_str()], index[r.end.as_str()], r.rel_type.clone()))
            .or_insert(0) += 1;
    }
    G { keys, edges }
}

/// Replaces each vertex's signature with its rank among distinct signatures.
fn rank<T: Ord + Clone>(sig: &[T]) -> Vec<usize> {
    let mut distinct: Vec<T> = sig.to_vec();
    distinct.sort();
    distinct.dedup();
    sig.iter().map(|s| distinct.binary_search(s).unwrap()).collect()
}

/// A colour with its sorted (direction, type, neighbour colour, count) list.
type Signature = (usize, Vec<(u8, String, usize, usize)>);

fn refine(g: &G, mut colors: Vec<usize>) -> Vec<usize> {
    loop {
        let n = colors.len();
        let mut sig: Vec<Signature> = colors.iter().map(|c| (*c, Vec::new())).collect();
        for ((a, b, t), m) in &g.edges {
            sig[*a].1.push((0, t.clone(), colors[*b], *m));
            sig[*b].1.push((1, t.clone(), colors[*a], *m));
        }
        for s in &mut sig {
            s.1.sort();
        }
        let next = rank(&sig);
        let classes = |c: &[usize]| {
            let mut v = c.to_vec();
            v.sort();
            v.dedup();
            v.len()
        };
        if classes(&next) == classes(&colors) || n == 0 {
            return next;
        }
        colors = next;
    }
}

fn encode(g: &G, colors: &[usize]) -> String {
    let mut order: Vec<usize> = (0..colors.len()).collect();
    order.sort_by_key(|&v| colors[v]);
    let pos: Vec<usize> = {
        let mut p = vec![0; colors.len()];
        for (i, v) in order.iter().enumerate() {
            p[*v] = i;
        }
        p
    };
    let nodes: Vec<&str> = order.iter().map(|&v| g.keys[v].as_str()).collect();
    let mut edges: Vec<(usize, usize, &str, usize)> = g
        .edges
        .iter()
        .map(|((a, b, t), m)| (pos[*a], pos[*b], t.as_str(), *m))
        .collect();
    edges.sort();
    format!("{nodes:?}{edges:?}")
}

fn search(g: &G, colors: Vec<usize>, best: &mut Option<String>) {
    let mut count: BTreeMap<usize, usize> = BTreeMap::new();
    for c in &colors {
        *count.entry(*c).or_insert(0) += 1;
    }
    let Some((&cell, _)) = count.iter().find(|(_, n)| **n > 1) else {
        let e = encode(g, &colors);
        if best.as_ref().is_none_or(|b| e < *b) {
            *best = Some(e);
        }
        return;
    };
    for v in (0..colors.len()).filter(|v| colors[*v] == cell) {
        let split: Vec<(usize, bool)> = colors.iter().enumerate().map(|(u, c)| (*c, u != v)).collect();
        search(g, refine(g, rank(&split)), best);
    }
}

/// A string equal for two graphs exactly when they are isomorphic.
pub fn canonical_form(pg: &PropertyGraph) -> String {
    let g = build(pg);
    let start = refine(&g, rank(&g.keys));
    let mut best = None;
    search(&g, start, &mut best);
    best.unwrap_or_default()
}

pub fn isomorphic(a: &PropertyGraph, b: &PropertyGraph) -> bool {
    a.nodes.len() == b.nodes.len() && a.rels.len() == b.rels.len() && canonical_form(a) == canonical_form(b)
}
