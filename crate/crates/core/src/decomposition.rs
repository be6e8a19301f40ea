//! Bridges, 2-edge-connected components, and the block skeleton of a
//! level-1 network.
//!
//! In a binary network no vertex can lie on two edge-disjoint cycles, so the
//! 2-edge-connected components are exactly the biconnected components.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::{Network, VertexId};

pub type Edge = (VertexId, VertexId);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiconnectedComponent {
    /// Sorted vertex ids.
    pub vertices: Vec<VertexId>,
    /// The vertex without an in-neighbour inside the component.
    pub root: VertexId,
    /// The vertex without an out-neighbour inside the component.
    pub bottom: VertexId,
    pub reticulations: Vec<VertexId>,
}

impl BiconnectedComponent {
    pub fn is_trivial(&self) -> bool {
        self.vertices.len() == 1
    }
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub components: Vec<BiconnectedComponent>,
    pub bridges: BTreeSet<Edge>,
    component_of: Vec<usize>,
}

impl Decomposition {
    /// Index into `components` of the component holding `v`.
    pub fn component_of(&self, v: VertexId) -> usize {
        self.component_of[v.index()]
    }

    pub fn is_bridge(&self, u: VertexId, v: VertexId) -> bool {
        self.bridges.contains(&(u, v))
    }
}

/// Bridges of the underlying undirected graph, oriented along the network.
pub fn bridges(n: &Network) -> BTreeSet<Edge> {
    let g = n.graph();
    let bound = g.id_bound();
    // Undirected adjacency with edge ids so the tree edge back to the DFS
    // parent is skipped by id, not by endpoint.
    let mut adj: Vec<Vec<(VertexId, usize)>> = vec![Vec::new(); bound];
    let edges: Vec<Edge> = g.edges().collect();
    for (i, &(u, v)) in edges.iter().enumerate() {
        adj[u.index()].push((v, i));
        adj[v.index()].push((u, i));
    }

    let mut disc = vec![usize::MAX; bound];
    let mut low = vec![0usize; bound];
    let mut timer = 0;
    let mut out = BTreeSet::new();

    let root = n.root();
    // Stack frames: (vertex, edge id used to enter, next adjacency index).
    let mut stack: Vec<(VertexId, usize, usize)> = vec![(root, usize::MAX, 0)];
    disc[root.index()] = timer;
    low[root.index()] = timer;
    timer += 1;
    while let Some(frame) = stack.last_mut() {
        let (u, via, next) = *frame;
        if next < adj[u.index()].len() {
            frame.2 += 1;
            let (w, eid) = adj[u.index()][next];
            if eid == via {
                continue;
            }
            if disc[w.index()] == usize::MAX {
                disc[w.index()] = timer;
                low[w.index()] = timer;
                timer += 1;
                stack.push((w, eid, 0));
            } else {
                low[u.index()] = low[u.index()].min(disc[w.index()]);
            }
        } else {
            stack.pop();
            if let Some(&(p, _, _)) = stack.last() {
                low[p.index()] = low[p.index()].min(low[u.index()]);
                if low[u.index()] > disc[p.index()] {
                    out.insert(edges[via]);
                }
            }
        }
    }
    out
}

/// Splits the network into 2-edge-connected components.
pub fn decompose(n: &Network) -> Decomposition {
    let bridges = bridges(n);
    let bound = n.graph().id_bound();
    let mut component_of = vec![usize::MAX; bound];
    let mut components = Vec::new();

    let order = n.topological_order();
    let mut pos = vec![0usize; bound];
    for (i, v) in order.iter().enumerate() {
        pos[v.index()] = i;
    }
    for &start in &order {
        if component_of[start.index()] != usize::MAX {
            continue;
        }
        let idx = components.len();
        let mut members = Vec::new();
        let mut stack = vec![start];
        component_of[start.index()] = idx;
        while let Some(u) = stack.pop() {
            members.push(u);
            let down = n.children(u).iter().map(|&c| (u, c, c));
            let up = n.parents(u).iter().map(|&p| (p, u, p));
            for (a, b, w) in down.chain(up) {
                if !bridges.contains(&(a, b)) && component_of[w.index()] == usize::MAX {
                    component_of[w.index()] = idx;
                    stack.push(w);
                }
            }
        }
        members.sort();
        let inside = |v: VertexId| component_of[v.index()] == idx;
        // Components are discovered from their topologically first vertex.
        let root = start;
        let bottom = members
            .iter()
            .copied()
            .filter(|&v| n.children(v).iter().all(|&c| !inside(c)))
            .max_by_key(|&v| pos[v.index()])
            .unwrap_or(start);
        let reticulations = members
            .iter()
            .copied()
            .filter(|&v| n.is_reticulation(v))
            .collect();
        components.push(BiconnectedComponent {
            vertices: members,
            root,
            bottom,
            reticulations,
        });
    }

    Decomposition {
        components,
        bridges,
        component_of,
    }
}

/// Largest number of reticulations in one component.
pub fn level(n: &Network) -> usize {
    decompose(n)
        .components
        .iter()
        .map(|c| c.reticulations.len())
        .max()
        .unwrap_or(0)
}

/// One of the two paths from a component root down to its bottom
/// reticulation, excluding both ends. `pendants[i]` is the child of
/// `vertices[i]` that leaves the component.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ComponentPath {
    pub vertices: Vec<VertexId>,
    pub pendants: Vec<VertexId>,
}

impl ComponentPath {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// The two component paths of a non-trivial level-1 component, starting
/// from the root's children in stored order.
pub fn component_paths(
    n: &Network,
    d: &Decomposition,
    comp: usize,
) -> Result<(ComponentPath, ComponentPath)> {
    let b = &d.components[comp];
    if b.is_trivial() {
        return Err(Error::TrivialComponent(b.root));
    }
    if b.reticulations.len() != 1 {
        return Err(Error::NotLevel1(b.reticulations.len()));
    }
    let bottom = b.reticulations[0];
    let kids = n.children(b.root);
    if kids.len() != 2 {
        return Err(Error::TrivialComponent(b.root));
    }
    let walk = |first: VertexId| -> Result<ComponentPath> {
        let mut path = ComponentPath::default();
        let mut cur = first;
        while cur != bottom {
            let ch = n.children(cur);
            let (inner, outer): (Vec<VertexId>, Vec<VertexId>) =
                ch.iter().partition(|&&c| d.component_of(c) == comp);
            if inner.len() != 1 || outer.len() != 1 || path.len() > b.vertices.len() {
                return Err(Error::NotLevel1(b.reticulations.len()));
            }
            path.vertices.push(cur);
            path.pendants.push(outer[0]);
            cur = inner[0];
        }
        Ok(path)
    };
    Ok((walk(kids[0])?, walk(kids[1])?))
}

/// A component of the skeleton, keyed by its root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Block {
    Leaf(VertexId),
    /// The root of the singleton network.
    Unary {
        root: VertexId,
        child: VertexId,
    },
    /// A trivial tree vertex (or a trivial network root).
    Tree {
        vertex: VertexId,
        children: [VertexId; 2],
    },
    Cycle {
        root: VertexId,
        left: ComponentPath,
        right: ComponentPath,
        bottom: VertexId,
        bottom_child: VertexId,
    },
}

impl Block {
    /// Roots of the blocks directly below this one.
    pub fn sub_roots(&self) -> Vec<VertexId> {
        match self {
            Block::Leaf(_) => Vec::new(),
            Block::Unary { child, .. } => vec![*child],
            Block::Tree { children, .. } => children.to_vec(),
            Block::Cycle {
                left,
                right,
                bottom_child,
                ..
            } => left
                .pendants
                .iter()
                .chain(&right.pendants)
                .copied()
                .chain([*bottom_child])
                .collect(),
        }
    }
}

/// The tree of blocks of a level-1 network.
#[derive(Clone, Debug)]
pub struct Skeleton {
    pub root: VertexId,
    pub blocks: BTreeMap<VertexId, Block>,
    /// Block roots, children before parents.
    pub postorder: Vec<VertexId>,
}

impl Skeleton {
    pub fn new(n: &Network) -> Result<Self> {
        let d = decompose(n);
        let lvl = d
            .components
            .iter()
            .map(|c| c.reticulations.len())
            .max()
            .unwrap_or(0);
        if lvl > 1 {
            return Err(Error::NotLevel1(lvl));
        }
        let mut blocks = BTreeMap::new();
        for (i, c) in d.components.iter().enumerate() {
            let v = c.root;
            let block = if !c.is_trivial() {
                let (left, right) = component_paths(n, &d, i)?;
                let bottom = c.reticulations[0];
                Block::Cycle {
                    root: v,
                    left,
                    right,
                    bottom,
                    bottom_child: n.children(bottom)[0],
                }
            } else {
                match n.children(v) {
                    [] => Block::Leaf(v),
                    [c] => Block::Unary { root: v, child: *c },
                    [a, b] => Block::Tree {
                        vertex: v,
                        children: [*a, *b],
                    },
                    _ => unreachable!("validated networks are binary"),
                }
            };
            blocks.insert(v, block);
        }

        let mut postorder = Vec::with_capacity(blocks.len());
        let mut stack = vec![(n.root(), false)];
        while let Some((v, expanded)) = stack.pop() {
            if expanded {
                postorder.push(v);
                continue;
            }
            stack.push((v, true));
            for c in blocks[&v].sub_roots().into_iter().rev() {
                stack.push((c, false));
            }
        }
        Ok(Skeleton {
            root: n.root(),
            blocks,
            postorder,
        })
    }

    pub fn block(&self, root: VertexId) -> &Block {
        &self.blocks[&root]
    }
}
