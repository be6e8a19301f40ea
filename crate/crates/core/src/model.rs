//! Network values.
//!
//! A [`Graph`] is an arbitrary candidate: any vertices, any edges, any labels.
//! [`validate`] lists everything that keeps it from being a phylogenetic
//! network, and [`Network`] wraps a graph that passed. Networks are never
//! mutated in place; operations build a new graph and wrap it again.
//!
//! Vertex ids are slots in the graph arena. Removing a vertex leaves a hole,
//! so ids of surviving vertices stay the same across reductions.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Characters that delimit the textual network format.
pub const RESERVED_CHARS: [char; 6] = ['(', ')', ',', ';', '|', '#'];

/// A taxon name.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Taxon(String);

impl Taxon {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::InvalidTaxon(name, "empty"));
        }
        if name.chars().any(char::is_whitespace) {
            return Err(Error::InvalidTaxon(name, "contains whitespace"));
        }
        if name.chars().any(|c| RESERVED_CHARS.contains(&c)) {
            return Err(Error::InvalidTaxon(name, "contains a reserved character"));
        }
        Ok(Taxon(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Taxon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Taxon {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Taxon::new(s)
    }
}

impl Borrow<str> for Taxon {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// The label set of a leaf, or the taxa below a vertex.
pub type LabelSet = BTreeSet<Taxon>;

/// Builds a label set from string literals. Panics on invalid names, so it is
/// meant for tests and fixed inputs.
pub fn labels<'a>(names: impl IntoIterator<Item = &'a str>) -> LabelSet {
    names
        .into_iter()
        .map(|n| Taxon::new(n).expect("valid taxon"))
        .collect()
}

/// `a|b|c`, sorted.
pub fn label_string(set: &LabelSet) -> String {
    let mut out = String::new();
    for (i, t) in set.iter().enumerate() {
        if i > 0 {
            out.push('|');
        }
        out.push_str(t.as_str());
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexKind {
    Root,
    Leaf,
    Tree,
    Reticulation,
}

#[derive(Clone, Debug, Default)]
struct Slot {
    parents: Vec<VertexId>,
    children: Vec<VertexId>,
    labels: LabelSet,
}

/// A directed graph with labelled vertices, not necessarily a valid network.
#[derive(Clone, Debug, Default)]
pub struct Graph {
    slots: Vec<Option<Slot>>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self) -> VertexId {
        let id = VertexId(self.slots.len() as u32);
        self.slots.push(Some(Slot::default()));
        id
    }

    pub fn add_leaf(&mut self, labels: LabelSet) -> VertexId {
        let id = self.add_vertex();
        self.slot_mut(id).labels = labels;
        id
    }

    pub fn set_labels(&mut self, v: VertexId, labels: LabelSet) {
        self.slot_mut(v).labels = labels;
    }

    /// Adds the edge `(u, v)`. Duplicates are kept so that validation can
    /// report them.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId) {
        self.slot_mut(u).children.push(v);
        self.slot_mut(v).parents.push(u);
    }

    /// Removes one copy of `(u, v)`; returns whether it was present.
    pub fn remove_edge(&mut self, u: VertexId, v: VertexId) -> bool {
        let Some(pos) = self.slot(u).children.iter().position(|&c| c == v) else {
            return false;
        };
        self.slot_mut(u).children.remove(pos);
        let pos = self
            .slot(v)
            .parents
            .iter()
            .position(|&p| p == u)
            .expect("edge lists out of sync");
        self.slot_mut(v).parents.remove(pos);
        true
    }

    /// Removes `v` and every edge touching it.
    pub fn remove_vertex(&mut self, v: VertexId) {
        let slot = self.slots[v.index()].take().expect("vertex present");
        for p in slot.parents {
            if let Some(Some(ps)) = self.slots.get_mut(p.index()) {
                ps.children.retain(|&c| c != v);
            }
        }
        for c in slot.children {
            if let Some(Some(cs)) = self.slots.get_mut(c.index()) {
                cs.parents.retain(|&p| p != v);
            }
        }
    }

    pub fn contains(&self, v: VertexId) -> bool {
        matches!(self.slots.get(v.index()), Some(Some(_)))
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.slots
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_some())
            .map(|(i, _)| VertexId(i as u32))
    }

    pub fn vertex_count(&self) -> usize {
        self.slots.iter().filter(|s| s.is_some()).count()
    }

    /// One past the largest vertex id ever allocated.
    pub fn id_bound(&self) -> usize {
        self.slots.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices()
            .flat_map(move |u| self.children(u).iter().map(move |&v| (u, v)))
    }

    pub fn edge_count(&self) -> usize {
        self.vertices().map(|v| self.children(v).len()).sum()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.contains(u) && self.children(u).contains(&v)
    }

    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.slot(v).children
    }

    pub fn parents(&self, v: VertexId) -> &[VertexId] {
        &self.slot(v).parents
    }

    pub fn labels(&self, v: VertexId) -> &LabelSet {
        &self.slot(v).labels
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.slot(v).parents.len()
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.slot(v).children.len()
    }

    /// Replaces the edge `(u, old)` by `(u, new)` keeping `u`'s child order.
    pub(crate) fn redirect_child(&mut self, u: VertexId, old: VertexId, new: VertexId) {
        let pos = self
            .slot(u)
            .children
            .iter()
            .position(|&c| c == old)
            .expect("edge present");
        self.slot_mut(u).children[pos] = new;
        self.slot_mut(old).parents.retain(|&p| p != u);
        self.slot_mut(new).parents.push(u);
    }

    /// Suppresses every vertex of in-degree 1 and out-degree 1: the vertex is
    /// removed and its parent is linked directly to its child.
    pub fn suppress_unary(&mut self) {
        let mut work: Vec<VertexId> = self.vertices().collect();
        while let Some(v) = work.pop() {
            if !self.contains(v) || self.in_degree(v) != 1 || self.out_degree(v) != 1 {
                continue;
            }
            let p = self.parents(v)[0];
            let c = self.children(v)[0];
            let pos = self
                .slot(p)
                .children
                .iter()
                .position(|&x| x == v)
                .expect("edge present");
            self.slot_mut(p).children[pos] = c;
            let cpos = self
                .slot(c)
                .parents
                .iter()
                .position(|&x| x == v)
                .expect("edge present");
            self.slot_mut(c).parents[cpos] = p;
            self.slots[v.index()] = None;
            work.push(p);
            work.push(c);
        }
    }

    fn slot(&self, v: VertexId) -> &Slot {
        self.slots
            .get(v.index())
            .and_then(Option::as_ref)
            .unwrap_or_else(|| panic!("vertex {v} is not in the graph"))
    }

    fn slot_mut(&mut self, v: VertexId) -> &mut Slot {
        self.slots
            .get_mut(v.index())
            .and_then(Option::as_mut)
            .unwrap_or_else(|| panic!("vertex {v} is not in the graph"))
    }
}

fn reach_in(g: &Graph, v: VertexId) -> BTreeSet<VertexId> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![v];
    while let Some(u) = stack.pop() {
        if seen.insert(u) {
            stack.extend(g.children(u).iter().copied());
        }
    }
    seen
}

/// One reason a graph is not a network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Empty,
    NoRoot,
    MultipleRoots(Vec<VertexId>),
    Cycle,
    ParallelEdge(VertexId, VertexId),
    SuppressedVertex(VertexId),
    BadDegree {
        vertex: VertexId,
        in_degree: usize,
        out_degree: usize,
    },
    UnlabelledLeaf(VertexId),
    LabelledInternal(VertexId),
    SharedTaxon {
        taxon: Taxon,
        first: VertexId,
        second: VertexId,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "empty graph"),
            Violation::NoRoot => write!(f, "no vertex of in-degree 0"),
            Violation::MultipleRoots(rs) => {
                write!(f, "several vertices of in-degree 0:")?;
                for r in rs {
                    write!(f, " {r}")?;
                }
                Ok(())
            }
            Violation::Cycle => write!(f, "directed cycle"),
            Violation::ParallelEdge(u, v) => write!(f, "parallel edges {u}->{v}"),
            Violation::SuppressedVertex(v) => {
                write!(
                    f,
                    "suppressed-vertex violation at {v} (in-degree 1, out-degree 1)"
                )
            }
            Violation::BadDegree {
                vertex,
                in_degree,
                out_degree,
            } => write!(
                f,
                "degree violation at {vertex} (in-degree {in_degree}, out-degree {out_degree})"
            ),
            Violation::UnlabelledLeaf(v) => write!(f, "leaf {v} has no taxa"),
            Violation::LabelledInternal(v) => write!(f, "internal vertex {v} carries taxa"),
            Violation::SharedTaxon {
                taxon,
                first,
                second,
            } => write!(f, "taxon {taxon} labels both {first} and {second}"),
        }
    }
}

/// Every violated network invariant of a graph; empty iff the graph is a
/// network.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks a candidate graph against the network rules: acyclic, a single
/// root, binary degrees, no in-1/out-1 vertices, no parallel edges, labels
/// exactly on leaves and pairwise disjoint.
pub fn validate(g: &Graph) -> ValidationReport {
    let mut out = Vec::new();
    let n = g.vertex_count();
    if n == 0 {
        out.push(Violation::Empty);
        return ValidationReport { violations: out };
    }

    let roots: Vec<VertexId> = g.vertices().filter(|&v| g.in_degree(v) == 0).collect();
    match roots.len() {
        0 => out.push(Violation::NoRoot),
        1 => {}
        _ => out.push(Violation::MultipleRoots(roots.clone())),
    }

    // Kahn's algorithm; leftovers mean a cycle.
    let mut indeg: BTreeMap<VertexId, usize> = g.vertices().map(|v| (v, g.in_degree(v))).collect();
    let mut queue: VecDeque<VertexId> = roots.iter().copied().collect();
    let mut seen = 0;
    while let Some(u) = queue.pop_front() {
        seen += 1;
        for &c in g.children(u) {
            let d = indeg.get_mut(&c).expect("child present");
            *d -= 1;
            if *d == 0 {
                queue.push_back(c);
            }
        }
    }
    if seen != n {
        out.push(Violation::Cycle);
    }

    for u in g.vertices() {
        let kids = g.children(u);
        for (i, &v) in kids.iter().enumerate() {
            if kids[..i].contains(&v) {
                out.push(Violation::ParallelEdge(u, v));
            }
        }
    }

    for v in g.vertices() {
        let (i, o) = (g.in_degree(v), g.out_degree(v));
        let ok = match (i, o) {
            (0, 2) | (1, 0) | (1, 2) | (2, 1) => true,
            (0, 1) => n == 2,
            (1, 1) => {
                out.push(Violation::SuppressedVertex(v));
                continue;
            }
            _ => false,
        };
        if !ok {
            out.push(Violation::BadDegree {
                vertex: v,
                in_degree: i,
                out_degree: o,
            });
        }
        let is_leaf = o == 0;
        if is_leaf && g.labels(v).is_empty() {
            out.push(Violation::UnlabelledLeaf(v));
        }
        if !is_leaf && !g.labels(v).is_empty() {
            out.push(Violation::LabelledInternal(v));
        }
    }

    let mut owner: BTreeMap<&Taxon, VertexId> = BTreeMap::new();
    for v in g.vertices() {
        for t in g.labels(v) {
            if let Some(&first) = owner.get(t) {
                out.push(Violation::SharedTaxon {
                    taxon: t.clone(),
                    first,
                    second: v,
                });
            } else {
                owner.insert(t, v);
            }
        }
    }

    ValidationReport { violations: out }
}

/// A valid rooted binary phylogenetic network with multi-labelled leaves.
#[derive(Clone, Debug)]
pub struct Network {
    graph: Graph,
    root: VertexId,
    leaf_of: BTreeMap<Taxon, VertexId>,
}

impl Network {
    pub fn new(graph: Graph) -> Result<Self> {
        let report = validate(&graph);
        if !report.is_valid() {
            return Err(Error::InvalidNetwork(report));
        }
        Ok(Self::wrap(graph))
    }

    /// Wraps a graph produced by an operation that preserves validity.
    pub(crate) fn from_valid(graph: Graph) -> Self {
        debug_assert!(
            validate(&graph).is_valid(),
            "operation produced an invalid network: {}",
            validate(&graph)
        );
        Self::wrap(graph)
    }

    fn wrap(graph: Graph) -> Self {
        let root = graph
            .vertices()
            .find(|&v| graph.in_degree(v) == 0)
            .expect("validated network has a root");
        let mut leaf_of = BTreeMap::new();
        for v in graph.vertices() {
            for t in graph.labels(v) {
                leaf_of.insert(t.clone(), v);
            }
        }
        Network {
            graph,
            root,
            leaf_of,
        }
    }

    /// The two-vertex network on one leaf.
    pub fn singleton(labels: LabelSet) -> Result<Self> {
        let mut g = Graph::new();
        let root = g.add_vertex();
        let leaf = g.add_leaf(labels);
        g.add_edge(root, leaf);
        Network::new(g)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.graph.contains(v)
    }

    pub fn kind(&self, v: VertexId) -> VertexKind {
        match (self.graph.in_degree(v), self.graph.out_degree(v)) {
            (0, _) => VertexKind::Root,
            (_, 0) => VertexKind::Leaf,
            (2, _) => VertexKind::Reticulation,
            _ => VertexKind::Tree,
        }
    }

    pub fn is_leaf(&self, v: VertexId) -> bool {
        self.kind(v) == VertexKind::Leaf
    }

    pub fn is_reticulation(&self, v: VertexId) -> bool {
        self.kind(v) == VertexKind::Reticulation
    }

    pub fn children(&self, v: VertexId) -> &[VertexId] {
        self.graph.children(v)
    }

    pub fn parents(&self, v: VertexId) -> &[VertexId] {
        self.graph.parents(v)
    }

    /// The unique parent, if `v` has exactly one.
    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        match self.graph.parents(v) {
            [p] => Some(*p),
            _ => None,
        }
    }

    pub fn labels(&self, v: VertexId) -> &LabelSet {
        self.graph.labels(v)
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.graph.vertices()
    }

    pub fn leaves(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.graph.vertices().filter(|&v| self.is_leaf(v))
    }

    pub fn reticulations(&self) -> Vec<VertexId> {
        self.graph
            .vertices()
            .filter(|&v| self.is_reticulation(v))
            .collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves().count()
    }

    pub fn reticulation_count(&self) -> usize {
        self.graph
            .vertices()
            .filter(|&v| self.is_reticulation(v))
            .count()
    }

    pub fn is_singleton(&self) -> bool {
        self.vertex_count() == 2
    }

    /// All taxa of the network.
    pub fn taxa(&self) -> LabelSet {
        self.leaf_of.keys().cloned().collect()
    }

    /// The leaf whose label set contains `taxon`.
    pub fn leaf_of(&self, taxon: &str) -> Option<VertexId> {
        self.leaf_of.get(taxon).copied()
    }

    fn check(&self, v: VertexId) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    /// Descendants of `v`, including `v`.
    pub fn reach(&self, v: VertexId) -> Result<BTreeSet<VertexId>> {
        self.check(v)?;
        Ok(reach_in(&self.graph, v))
    }

    /// Ancestors of `v`, including `v`.
    pub fn above(&self, v: VertexId) -> Result<BTreeSet<VertexId>> {
        self.check(v)?;
        let mut seen = BTreeSet::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            if seen.insert(u) {
                stack.extend(self.parents(u).iter().copied());
            }
        }
        Ok(seen)
    }

    /// Union of the label sets of the leaves below `v`.
    pub fn taxa_below(&self, v: VertexId) -> Result<LabelSet> {
        Ok(self
            .reach(v)?
            .into_iter()
            .flat_map(|u| self.labels(u).iter().cloned())
            .collect())
    }

    /// Reticulations below `v`, including `v` itself when it is one.
    pub fn reticulations_below(&self, v: VertexId) -> Result<BTreeSet<VertexId>> {
        Ok(self
            .reach(v)?
            .into_iter()
            .filter(|&u| self.is_reticulation(u))
            .collect())
    }

    /// Vertices in an order where every edge points forward.
    pub fn topological_order(&self) -> Vec<VertexId> {
        let mut indeg: Vec<usize> = vec![0; self.graph.id_bound()];
        for v in self.vertices() {
            indeg[v.index()] = self.graph.in_degree(v);
        }
        let mut order = Vec::with_capacity(self.vertex_count());
        let mut queue = VecDeque::from([self.root]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &c in self.children(u) {
                indeg[c.index()] -= 1;
                if indeg[c.index()] == 0 {
                    queue.push_back(c);
                }
            }
        }
        order
    }
}

impl fmt::Display for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::enewick::serialize(self))
    }
}
