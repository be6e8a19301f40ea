#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use macrs_core::{
    canonical_form, find_cherries, random_network, reduce, CherryKind, Network, VertexId,
};

pub const N1: &str = "((a,((c,((d,e))#H2),(f,#H2))#H1),(b,#H1));";
pub const N3: &str = "((a,(((c,d|e),f))#H1),(b,#H1));";
pub const N4: &str = "((a,c|d|e|f),b);";
pub const N5: &str = "((a,c),b);";

pub fn p(text: &str) -> Network {
    macrs_core::parse(text).unwrap()
}

pub fn canon(n: &Network) -> String {
    canonical_form(n).unwrap()
}

/// A seeded small network with `1..=max_leaves` leaves and at most
/// `max_retics` reticulations.
pub fn small_network(seed: u64, max_leaves: usize, max_retics: usize) -> Network {
    let leaves = 1 + (seed as usize * 7 + 3) % max_leaves;
    let retics = (seed as usize / 3) % (max_retics + 1);
    random_network(seed, leaves, retics.min(leaves - 1)).unwrap()
}

/// Ancestors of every reticulation, reticulations included.
pub fn reticulation_ancestors(n: &Network) -> BTreeSet<VertexId> {
    n.reticulations()
        .into_iter()
        .flat_map(|r| n.above(r).unwrap())
        .collect()
}

/// The edge of `original` removed when the reticulated cherry `(x, y)` is
/// reduced in `current`, a network obtained from `original` by reductions.
pub fn removed_edge(
    original: &Network,
    current: &Network,
    x: &str,
    y: &str,
) -> (VertexId, VertexId) {
    let r = current.parent(current.leaf_of(x).unwrap()).unwrap();
    let py = current.parent(current.leaf_of(y).unwrap()).unwrap();
    let ps = original.parents(r);
    if ps.contains(&py) {
        return (py, r);
    }
    let below = original.reach(py).unwrap();
    let hits: Vec<VertexId> = ps.iter().copied().filter(|q| below.contains(q)).collect();
    assert_eq!(hits.len(), 1, "ambiguous reticulation edge");
    (hits[0], r)
}

pub type EdgeSet = BTreeSet<(VertexId, VertexId)>;

/// Exhaustive search over cherry sequences of `n`. For every set `F` of
/// removed reticulation edges, the networks reached by the shortest
/// sequences removing exactly `F`, keyed by canonical form.
pub fn shortest_by_removed_set(n: &Network) -> BTreeMap<EdgeSet, BTreeMap<String, Network>> {
    type State = (String, EdgeSet);
    let mut seen: BTreeSet<State> = BTreeSet::new();
    let mut best: BTreeMap<EdgeSet, (usize, BTreeMap<String, Network>)> = BTreeMap::new();
    let mut queue = VecDeque::from([(n.clone(), BTreeSet::new(), 0usize)]);
    seen.insert((canon(n), BTreeSet::new()));
    while let Some((cur, f, len)) = queue.pop_front() {
        let entry = best.entry(f.clone()).or_insert((len, BTreeMap::new()));
        if entry.0 == len {
            entry.1.insert(canon(&cur), cur.clone());
        }
        for (pair, kind) in find_cherries(&cur) {
            let (x, y) = (pair.x.as_str(), pair.y.as_str());
            let mut g = f.clone();
            if kind == CherryKind::Reticulated {
                g.insert(removed_edge(n, &cur, x, y));
            }
            let next = reduce(&cur, x, y).unwrap();
            if seen.insert((canon(&next), g.clone())) {
                queue.push_back((next, g, len + 1));
            }
        }
    }
    best.into_iter().map(|(f, (_, ns))| (f, ns)).collect()
}
