//! Agreement under simple cherry reductions only.
//!
//! Simple reductions never touch a reticulation or any of its ancestors, so
//! two networks agree only if their block skeletons match above every
//! reticulation. The table `M[u, v]` holds the leaf count of a largest
//! agreement of the subnetworks rooted at block roots `u` and `v`; blocks
//! are filled children first. A traceback rebuilds the agreed network with
//! each leaf labelled by the taxa its two source leaves share.

use std::collections::{BTreeMap, HashMap};

use crate::decomposition::{Block, ComponentPath, Skeleton};
use crate::error::Result;
use crate::model::{Graph, LabelSet, Network, Taxon, VertexId};

/// Table value standing in for minus infinity.
const NEG: i32 = i32::MIN / 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DpOptions {
    /// Skip the table when the reticulation counts differ, as no agreement
    /// can exist then.
    pub guard_reticulation_counts: bool,
}

impl Default for DpOptions {
    fn default() -> Self {
        DpOptions {
            guard_reticulation_counts: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Choice {
    Impossible,
    /// Both sides reduce to one leaf.
    Collapse,
    /// Two trivial tree vertices, children paired straight or crossed.
    Pair(bool),
    /// Two cycles, component paths paired straight or crossed.
    Cycle(bool),
}

/// Taxa sets as bitsets over the union of both networks' taxa.
struct Universe {
    taxa: Vec<Taxon>,
    index: HashMap<Taxon, usize>,
}

impl Universe {
    fn new(a: &Network, b: &Network) -> Self {
        let mut all = a.taxa();
        all.extend(b.taxa());
        let taxa: Vec<Taxon> = all.into_iter().collect();
        let index = taxa
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Universe { taxa, index }
    }

    fn words(&self) -> usize {
        self.taxa.len().div_ceil(64).max(1)
    }

    fn labels(&self, bits: &[u64]) -> LabelSet {
        let mut out = LabelSet::new();
        for (w, &word) in bits.iter().enumerate() {
            let mut x = word;
            while x != 0 {
                let b = x.trailing_zeros() as usize;
                out.insert(self.taxa[w * 64 + b].clone());
                x &= x - 1;
            }
        }
        out
    }
}

fn meets(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}

fn meet(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

/// Per-vertex facts used by the table.
struct Side<'a> {
    n: &'a Network,
    sk: Skeleton,
    taxa: Vec<Vec<u64>>,
    has_retic: Vec<bool>,
    dense: HashMap<VertexId, usize>,
}

impl<'a> Side<'a> {
    fn new(n: &'a Network, u: &Universe) -> Result<Self> {
        let sk = Skeleton::new(n)?;
        let bound = n.graph().id_bound();
        let mut taxa = vec![vec![0u64; u.words()]; bound];
        let mut has_retic = vec![false; bound];
        for v in n.topological_order().into_iter().rev() {
            let mut bits = vec![0u64; u.words()];
            for t in n.labels(v) {
                let i = u.index[t];
                bits[i / 64] |= 1 << (i % 64);
            }
            let mut r = n.is_reticulation(v);
            for &c in n.children(v) {
                for (b, x) in bits.iter_mut().zip(&taxa[c.index()]) {
                    *b |= x;
                }
                r |= has_retic[c.index()];
            }
            taxa[v.index()] = bits;
            has_retic[v.index()] = r;
        }
        let dense = sk
            .postorder
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect();
        Ok(Side {
            n,
            sk,
            taxa,
            has_retic,
            dense,
        })
    }

    /// The block standing for the whole network; a singleton is its leaf.
    fn top(&self) -> VertexId {
        match self.sk.block(self.sk.root) {
            Block::Unary { child, .. } => *child,
            _ => self.sk.root,
        }
    }

    /// Maps a reticulation to its child; block roots map to themselves.
    fn key(&self, v: VertexId) -> VertexId {
        if self.dense.contains_key(&v) {
            v
        } else if self.n.contains(v) && self.n.is_reticulation(v) {
            self.n.children(v)[0]
        } else {
            v
        }
    }
}

/// The filled table for one pair of networks.
pub struct DpTable<'a> {
    s1: Side<'a>,
    s2: Side<'a>,
    universe: Universe,
    cols: usize,
    values: Vec<i32>,
    choices: Vec<Choice>,
}

impl<'a> DpTable<'a> {
    fn at(&self, u: VertexId, v: VertexId) -> usize {
        self.s1.dense[&u] * self.cols + self.s2.dense[&v]
    }

    fn m(&self, u: VertexId, v: VertexId) -> i32 {
        self.values[self.at(u, v)]
    }

    /// `M[u, v]` for block roots or component bottoms; `None` is minus
    /// infinity or an index outside the table.
    pub fn get(&self, u: VertexId, v: VertexId) -> Option<usize> {
        let (u, v) = (self.s1.key(u), self.s2.key(v));
        if !self.s1.dense.contains_key(&u) || !self.s2.dense.contains_key(&v) {
            return None;
        }
        let x = self.m(u, v);
        (x > 0).then_some(x as usize)
    }

    /// `M` at the two network roots.
    pub fn value(&self) -> Option<usize> {
        self.get(self.s1.top(), self.s2.top())
    }

    fn sum_paths(&self, pairs: &[(&ComponentPath, &ComponentPath)], base: i32) -> i32 {
        let mut total = base;
        for (p, q) in pairs {
            for (&a, &b) in p.pendants.iter().zip(&q.pendants) {
                let x = self.m(a, b);
                if x == NEG || total == NEG {
                    return NEG;
                }
                total += x;
            }
        }
        total
    }

    fn entry(&self, u: VertexId, v: VertexId) -> (i32, Choice) {
        let (s1, s2) = (&self.s1, &self.s2);
        let b1 = s1.sk.block(u);
        let b2 = s2.sk.block(v);
        let trivial = |b: &Block| matches!(b, Block::Leaf(_) | Block::Tree { .. });
        let no_retic = !s1.has_retic[u.index()] && !s2.has_retic[v.index()];
        match (b1, b2) {
            (Block::Leaf(_), _) | (_, Block::Leaf(_)) if trivial(b1) && trivial(b2) => {
                if no_retic && meets(&s1.taxa[u.index()], &s2.taxa[v.index()]) {
                    (1, Choice::Collapse)
                } else {
                    (NEG, Choice::Impossible)
                }
            }
            (Block::Tree { children: c1, .. }, Block::Tree { children: c2, .. }) => {
                let x =
                    |i: usize, j: usize| meets(&s1.taxa[c1[i].index()], &s2.taxa[c2[j].index()]);
                let option = |a: bool, b: bool, pairs: [(VertexId, VertexId); 2], crossed| {
                    if a && b {
                        let (p, q) = (
                            self.m(pairs[0].0, pairs[0].1),
                            self.m(pairs[1].0, pairs[1].1),
                        );
                        if p == NEG || q == NEG {
                            (NEG, Choice::Impossible)
                        } else {
                            (p + q, Choice::Pair(crossed))
                        }
                    } else if (a != b) && no_retic {
                        (1, Choice::Collapse)
                    } else {
                        (NEG, Choice::Impossible)
                    }
                };
                let m1 = option(x(0, 0), x(1, 1), [(c1[0], c2[0]), (c1[1], c2[1])], false);
                let m2 = option(x(0, 1), x(1, 0), [(c1[0], c2[1]), (c1[1], c2[0])], true);
                if m2.0 > m1.0 {
                    m2
                } else {
                    m1
                }
            }
            (
                Block::Cycle {
                    left: l1,
                    right: r1,
                    bottom_child: bc1,
                    ..
                },
                Block::Cycle {
                    left: l2,
                    right: r2,
                    bottom_child: bc2,
                    ..
                },
            ) => {
                let base = self.m(*bc1, *bc2);
                let mut m1 = (NEG, Choice::Impossible);
                let mut m2 = (NEG, Choice::Impossible);
                if l1.len() == l2.len() && r1.len() == r2.len() {
                    let x = self.sum_paths(&[(l1, l2), (r1, r2)], base);
                    if x != NEG {
                        m1 = (x, Choice::Cycle(false));
                    }
                }
                if l1.len() == r2.len() && r1.len() == l2.len() {
                    let x = self.sum_paths(&[(l1, r2), (r1, l2)], base);
                    if x != NEG {
                        m2 = (x, Choice::Cycle(true));
                    }
                }
                if m2.0 > m1.0 {
                    m2
                } else {
                    m1
                }
            }
            _ => (NEG, Choice::Impossible),
        }
    }

    fn fill(&mut self) {
        let rows = self.s1.sk.postorder.clone();
        let cols = self.s2.sk.postorder.clone();
        for &u in &rows {
            if matches!(self.s1.sk.block(u), Block::Unary { .. }) {
                continue;
            }
            for &v in &cols {
                if matches!(self.s2.sk.block(v), Block::Unary { .. }) {
                    continue;
                }
                let (x, c) = self.entry(u, v);
                let i = self.at(u, v);
                self.values[i] = x;
                self.choices[i] = c;
            }
        }
    }
}

/// Fills the table for a pair of level-1 networks.
pub fn dp_table<'a>(n1: &'a Network, n2: &'a Network) -> Result<DpTable<'a>> {
    let universe = Universe::new(n1, n2);
    let s1 = Side::new(n1, &universe)?;
    let s2 = Side::new(n2, &universe)?;
    let rows = s1.sk.postorder.len();
    let cols = s2.sk.postorder.len();
    let mut t = DpTable {
        s1,
        s2,
        universe,
        cols,
        values: vec![NEG; rows * cols],
        choices: vec![Choice::Impossible; rows * cols],
    };
    t.fill();
    Ok(t)
}

/// A largest network reachable from both inputs by simple reductions.
#[derive(Clone, Debug)]
pub struct SimpleAgreement {
    pub network: Network,
    pub leaf_count: usize,
    /// Vertices of the first input kept in the agreement, mapped to their
    /// counterparts in the second. Collapsed parts map by their top vertex.
    pub mapping: BTreeMap<VertexId, VertexId>,
}

struct Builder<'t, 'a> {
    t: &'t DpTable<'a>,
    g: Graph,
    mapping: BTreeMap<VertexId, VertexId>,
}

impl<'t, 'a> Builder<'t, 'a> {
    fn build(&mut self, u: VertexId, v: VertexId) -> VertexId {
        let t = self.t;
        let choice = t.choices[t.at(u, v)];
        self.mapping.insert(u, v);
        match choice {
            Choice::Impossible => unreachable!("traceback follows finite entries"),
            Choice::Collapse => {
                let bits = meet(&t.s1.taxa[u.index()], &t.s2.taxa[v.index()]);
                self.g.add_leaf(t.universe.labels(&bits))
            }
            Choice::Pair(crossed) => {
                let (Block::Tree { children: c1, .. }, Block::Tree { children: c2, .. }) =
                    (t.s1.sk.block(u), t.s2.sk.block(v))
                else {
                    unreachable!("pair choice on tree blocks")
                };
                let c2 = if crossed { [c2[1], c2[0]] } else { *c2 };
                let a = self.build(c1[0], c2[0]);
                let b = self.build(c1[1], c2[1]);
                let x = self.g.add_vertex();
                self.g.add_edge(x, a);
                self.g.add_edge(x, b);
                x
            }
            Choice::Cycle(crossed) => {
                let (
                    Block::Cycle {
                        left: l1,
                        right: r1,
                        bottom: bo1,
                        bottom_child: bc1,
                        ..
                    },
                    Block::Cycle {
                        left: l2,
                        right: r2,
                        bottom: bo2,
                        bottom_child: bc2,
                        ..
                    },
                ) = (t.s1.sk.block(u), t.s2.sk.block(v))
                else {
                    unreachable!("cycle choice on cycle blocks")
                };
                let (l2, r2) = if crossed { (r2, l2) } else { (l2, r2) };
                self.mapping.insert(*bo1, *bo2);
                let below = self.build(*bc1, *bc2);
                let bottom = self.g.add_vertex();
                self.g.add_edge(bottom, below);
                let root = self.g.add_vertex();
                for (p, q) in [(l1, l2), (r1, r2)] {
                    let mut prev = root;
                    for i in 0..p.len() {
                        self.mapping.insert(p.vertices[i], q.vertices[i]);
                        let h = self.build(p.pendants[i], q.pendants[i]);
                        let x = self.g.add_vertex();
                        self.g.add_edge(prev, x);
                        self.g.add_edge(x, h);
                        prev = x;
                    }
                    self.g.add_edge(prev, bottom);
                }
                root
            }
        }
    }
}

/// Largest agreement under simple reductions with default options.
pub fn macrs_simple(n1: &Network, n2: &Network) -> Result<Option<SimpleAgreement>> {
    macrs_simple_with(n1, n2, DpOptions::default())
}

pub fn macrs_simple_with(
    n1: &Network,
    n2: &Network,
    opts: DpOptions,
) -> Result<Option<SimpleAgreement>> {
    if opts.guard_reticulation_counts && n1.reticulation_count() != n2.reticulation_count() {
        // Still reject inputs above level 1.
        Skeleton::new(n1)?;
        Skeleton::new(n2)?;
        return Ok(None);
    }
    let t = dp_table(n1, n2)?;
    let Some(leaves) = t.value() else {
        return Ok(None);
    };
    let (top1, top2) = (t.s1.top(), t.s2.top());
    let mut b = Builder {
        t: &t,
        g: Graph::new(),
        mapping: BTreeMap::new(),
    };
    let top = b.build(top1, top2);
    if b.g.vertex_count() == 1 {
        let root = b.g.add_vertex();
        b.g.add_edge(root, top);
    }
    let network = Network::new(b.g).expect("traceback builds a valid network");
    debug_assert_eq!(network.leaf_count(), leaves);
    Ok(Some(SimpleAgreement {
        network,
        leaf_count: leaves,
        mapping: b.mapping,
    }))
}
