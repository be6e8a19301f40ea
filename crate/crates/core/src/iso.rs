//! Canonical forms and isomorphism witnesses for level-1 networks.
//!
//! Every block of the skeleton is encoded bottom-up. Tree vertices order
//! their two children by encoding. A cycle is written as its two component
//! paths, each as nested `(pendant,rest)` pairs ending in `#H`; the path with
//! the smaller encoding comes first and carries the bottom's child. The
//! orders picked here also drive [`crate::enewick::serialize`], so the
//! serialized text is a canonical form.

use std::collections::{BTreeMap, HashMap};

use crate::decomposition::{Block, ComponentPath, Skeleton};
use crate::error::Result;
use crate::model::{label_string, LabelSet, Network, VertexId};

/// A vertex bijection between two networks that preserves edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsomorphismWitness {
    pub mapping: BTreeMap<VertexId, VertexId>,
}

struct Encoder<'a> {
    sk: &'a Skeleton,
    n: &'a Network,
    shape: bool,
    enc: HashMap<VertexId, String>,
    /// Cycle roots whose stored right path comes first.
    swapped: HashMap<VertexId, bool>,
}

fn path_encoding(enc: &HashMap<VertexId, String>, path: &ComponentPath, tail: &str) -> String {
    let mut s = String::new();
    for p in &path.pendants {
        s.push('(');
        s.push_str(&enc[p]);
        s.push(',');
    }
    s.push_str(tail);
    for _ in &path.pendants {
        s.push(')');
    }
    s
}

impl<'a> Encoder<'a> {
    fn new(n: &'a Network, sk: &'a Skeleton, shape: bool) -> Self {
        let mut e = Encoder {
            sk,
            n,
            shape,
            enc: HashMap::new(),
            swapped: HashMap::new(),
        };
        for &v in &sk.postorder {
            let s = e.block(v);
            e.enc.insert(v, s);
        }
        e
    }

    fn block(&mut self, v: VertexId) -> String {
        match self.sk.block(v) {
            Block::Leaf(l) => {
                if self.shape {
                    "*".into()
                } else {
                    label_string(self.n.labels(*l))
                }
            }
            Block::Unary { child, .. } => format!("({})", self.enc[child]),
            Block::Tree { children, .. } => {
                let a = &self.enc[&children[0]];
                let b = &self.enc[&children[1]];
                let (x, y) = if a <= b { (a, b) } else { (b, a) };
                format!("({x},{y})")
            }
            Block::Cycle {
                root,
                left,
                right,
                bottom_child,
                ..
            } => {
                let pl = path_encoding(&self.enc, left, "#H");
                let pr = path_encoding(&self.enc, right, "#H");
                let swap = pr < pl;
                self.swapped.insert(*root, swap);
                let first = if swap { right } else { left };
                let tail = format!("({})#H", self.enc[bottom_child]);
                format!(
                    "({},{})",
                    path_encoding(&self.enc, first, &tail),
                    if swap { pl } else { pr }
                )
            }
        }
    }
}

/// The child order used by canonical serialization, or `None` when the
/// network is above level 1.
pub(crate) fn canonical_child_order(n: &Network) -> Option<HashMap<VertexId, Vec<VertexId>>> {
    let sk = Skeleton::new(n).ok()?;
    let e = Encoder::new(n, &sk, false);
    let mut order = HashMap::new();
    for block in sk.blocks.values() {
        match block {
            Block::Leaf(_) => {}
            Block::Unary { root, child } => {
                order.insert(*root, vec![*child]);
            }
            Block::Tree { vertex, children } => {
                let mut c = children.to_vec();
                c.sort_by(|a, b| e.enc[a].cmp(&e.enc[b]));
                order.insert(*vertex, c);
            }
            Block::Cycle {
                root,
                left,
                right,
                bottom,
                ..
            } => {
                let head = |p: &ComponentPath| p.vertices.first().copied().unwrap_or(*bottom);
                let (first, second) = if e.swapped[root] {
                    (right, left)
                } else {
                    (left, right)
                };
                order.insert(*root, vec![head(first), head(second)]);
                for path in [left, right] {
                    for (i, (&v, &h)) in path.vertices.iter().zip(&path.pendants).enumerate() {
                        let next = path.vertices.get(i + 1).copied().unwrap_or(*bottom);
                        order.insert(v, vec![h, next]);
                    }
                }
            }
        }
    }
    Some(order)
}

/// Canonical text of a level-1 network; equal iff strongly isomorphic.
pub fn canonical_form(n: &Network) -> Result<String> {
    Skeleton::new(n)?;
    Ok(crate::enewick::serialize(n))
}

/// Canonical encoding with every leaf replaced by `*`. Weakly isomorphic
/// networks share a shape form.
pub fn shape_form(n: &Network) -> Result<String> {
    let sk = Skeleton::new(n)?;
    let e = Encoder::new(n, &sk, true);
    Ok(e.enc[&sk.root].clone())
}

type LeafTest = fn(&LabelSet, &LabelSet) -> bool;

struct Matcher<'a> {
    a: &'a Network,
    b: &'a Network,
    sa: &'a Skeleton,
    sb: &'a Skeleton,
    leaf_ok: LeafTest,
    memo: HashMap<(VertexId, VertexId), bool>,
}

impl<'a> Matcher<'a> {
    fn paths_ok(&mut self, p: &ComponentPath, q: &ComponentPath) -> bool {
        p.len() == q.len()
            && p.pendants
                .iter()
                .zip(&q.pendants)
                .all(|(&x, &y)| self.ok(x, y))
    }

    /// Orientation (0 straight, 1 crossed) that matches the two blocks.
    fn choice(&mut self, x: VertexId, y: VertexId) -> Option<usize> {
        let (sa, sb, a, b) = (self.sa, self.sb, self.a, self.b);
        match (sa.block(x), sb.block(y)) {
            (Block::Leaf(l1), Block::Leaf(l2)) => {
                (self.leaf_ok)(a.labels(*l1), b.labels(*l2)).then_some(0)
            }
            (Block::Unary { child: c1, .. }, Block::Unary { child: c2, .. }) => {
                self.ok(*c1, *c2).then_some(0)
            }
            (Block::Tree { children: c1, .. }, Block::Tree { children: c2, .. }) => {
                let (c1, c2) = (*c1, *c2);
                if self.ok(c1[0], c2[0]) && self.ok(c1[1], c2[1]) {
                    Some(0)
                } else if self.ok(c1[0], c2[1]) && self.ok(c1[1], c2[0]) {
                    Some(1)
                } else {
                    None
                }
            }
            (
                Block::Cycle {
                    left: l1,
                    right: r1,
                    bottom_child: b1,
                    ..
                },
                Block::Cycle {
                    left: l2,
                    right: r2,
                    bottom_child: b2,
                    ..
                },
            ) => {
                if !self.ok(*b1, *b2) {
                    return None;
                }
                if self.paths_ok(l1, l2) && self.paths_ok(r1, r2) {
                    Some(0)
                } else if self.paths_ok(l1, r2) && self.paths_ok(r1, l2) {
                    Some(1)
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    fn ok(&mut self, x: VertexId, y: VertexId) -> bool {
        if let Some(&r) = self.memo.get(&(x, y)) {
            return r;
        }
        let r = self.choice(x, y).is_some();
        self.memo.insert((x, y), r);
        r
    }

    fn build(&mut self, x: VertexId, y: VertexId, out: &mut BTreeMap<VertexId, VertexId>) {
        let crossed = self.choice(x, y).expect("pair was matched") == 1;
        match (self.sa.block(x).clone(), self.sb.block(y).clone()) {
            (Block::Leaf(l1), Block::Leaf(l2)) => {
                out.insert(l1, l2);
            }
            (
                Block::Unary {
                    root: r1,
                    child: c1,
                },
                Block::Unary {
                    root: r2,
                    child: c2,
                },
            ) => {
                out.insert(r1, r2);
                self.build(c1, c2, out);
            }
            (
                Block::Tree {
                    vertex: v1,
                    children: c1,
                },
                Block::Tree {
                    vertex: v2,
                    children: c2,
                },
            ) => {
                out.insert(v1, v2);
                let c2 = if crossed { [c2[1], c2[0]] } else { c2 };
                self.build(c1[0], c2[0], out);
                self.build(c1[1], c2[1], out);
            }
            (
                Block::Cycle {
                    root: ro1,
                    left: l1,
                    right: r1,
                    bottom: bo1,
                    bottom_child: b1,
                },
                Block::Cycle {
                    root: ro2,
                    left: l2,
                    right: r2,
                    bottom: bo2,
                    bottom_child: b2,
                },
            ) => {
                out.insert(ro1, ro2);
                out.insert(bo1, bo2);
                let (l2, r2) = if crossed { (r2, l2) } else { (l2, r2) };
                for (p, q) in [(&l1, &l2), (&r1, &r2)] {
                    for i in 0..p.len() {
                        out.insert(p.vertices[i], q.vertices[i]);
                        self.build(p.pendants[i], q.pendants[i], out);
                    }
                }
                self.build(b1, b2, out);
            }
            _ => unreachable!("pair was matched"),
        }
    }
}

fn witness(a: &Network, b: &Network, leaf_ok: LeafTest) -> Result<Option<IsomorphismWitness>> {
    let sa = Skeleton::new(a)?;
    let sb = Skeleton::new(b)?;
    if a.vertex_count() != b.vertex_count() {
        return Ok(None);
    }
    let mut m = Matcher {
        a,
        b,
        sa: &sa,
        sb: &sb,
        leaf_ok,
        memo: HashMap::new(),
    };
    if !m.ok(sa.root, sb.root) {
        return Ok(None);
    }
    let mut mapping = BTreeMap::new();
    m.build(sa.root, sb.root, &mut mapping);
    Ok(Some(IsomorphismWitness { mapping }))
}

/// A bijection mapping every leaf to a leaf with the same label set.
pub fn strongly_isomorphic(a: &Network, b: &Network) -> Result<Option<IsomorphismWitness>> {
    if canonical_form(a)? != canonical_form(b)? {
        return Ok(None);
    }
    witness(a, b, |x, y| x == y)
}

/// A bijection mapping every leaf to a leaf with an overlapping label set.
pub fn weakly_isomorphic(a: &Network, b: &Network) -> Result<Option<IsomorphismWitness>> {
    if shape_form(a)? != shape_form(b)? {
        return Ok(None);
    }
    witness(a, b, |x, y| !x.is_disjoint(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enewick::parse;
    use crate::model::VertexKind;

    const N1: &str = "((a,((c,((d,e))#H2),(f,#H2))#H1),(b,#H1));";
    const N4: &str = "((a,c|d|e|f),b);";
    const N5: &str = "((a,c),b);";

    /// Exhaustive bijection search with degree pruning.
    fn brute_iso(a: &Network, b: &Network, strong: bool) -> bool {
        let va: Vec<VertexId> = a.vertices().collect();
        let vb: Vec<VertexId> = b.vertices().collect();
        if va.len() != vb.len() {
            return false;
        }
        let compatible = |x: VertexId, y: VertexId| {
            a.kind(x) == b.kind(y)
                && a.children(x).len() == b.children(y).len()
                && (a.kind(x) != VertexKind::Leaf
                    || if strong {
                        a.labels(x) == b.labels(y)
                    } else {
                        !a.labels(x).is_disjoint(b.labels(y))
                    })
        };
        #[allow(clippy::too_many_arguments)]
        fn go(
            i: usize,
            va: &[VertexId],
            vb: &[VertexId],
            used: &mut Vec<bool>,
            map: &mut HashMap<VertexId, VertexId>,
            a: &Network,
            b: &Network,
            compatible: &dyn Fn(VertexId, VertexId) -> bool,
        ) -> bool {
            if i == va.len() {
                return a
                    .graph()
                    .edges()
                    .all(|(u, v)| b.graph().has_edge(map[&u], map[&v]));
            }
            for j in 0..vb.len() {
                if used[j] || !compatible(va[i], vb[j]) {
                    continue;
                }
                used[j] = true;
                map.insert(va[i], vb[j]);
                if go(i + 1, va, vb, used, map, a, b, compatible) {
                    return true;
                }
                used[j] = false;
                map.remove(&va[i]);
            }
            false
        }
        let mut used = vec![false; vb.len()];
        go(
            0,
            &va,
            &vb,
            &mut used,
            &mut HashMap::new(),
            a,
            b,
            &compatible,
        )
    }

    fn check_witness(a: &Network, b: &Network, w: &IsomorphismWitness) {
        assert_eq!(w.mapping.len(), a.vertex_count());
        let image: std::collections::BTreeSet<_> = w.mapping.values().collect();
        assert_eq!(image.len(), b.vertex_count());
        for (u, v) in a.graph().edges() {
            assert!(b.graph().has_edge(w.mapping[&u], w.mapping[&v]));
        }
        assert_eq!(a.edge_count(), b.edge_count());
    }

    #[test]
    fn n1_identity() {
        let n = parse(N1).unwrap();
        let w = strongly_isomorphic(&n, &n).unwrap().unwrap();
        check_witness(&n, &n, &w);
        assert!(w.mapping.iter().all(|(a, b)| a == b));
    }

    #[test]
    fn n4_n5() {
        let n4 = parse(N4).unwrap();
        let n5 = parse(N5).unwrap();
        assert!(strongly_isomorphic(&n4, &n5).unwrap().is_none());
        let w = weakly_isomorphic(&n4, &n5).unwrap().unwrap();
        check_witness(&n4, &n5, &w);
        let big = n4.leaf_of("d").unwrap();
        assert_eq!(w.mapping[&big], n5.leaf_of("c").unwrap());
    }

    #[test]
    fn n4_swapped_children() {
        let n4 = parse(N4).unwrap();
        let swapped = parse("(b,(c|d|e|f,a));").unwrap();
        assert!(brute_iso(&n4, &swapped, true));
        let w = strongly_isomorphic(&n4, &swapped).unwrap().unwrap();
        check_witness(&n4, &swapped, &w);
    }

    #[test]
    fn singletons() {
        let x = parse("(x);").unwrap();
        let y = parse("(y);").unwrap();
        assert!(weakly_isomorphic(&x, &y).unwrap().is_none());
        assert!(weakly_isomorphic(&x, &x).unwrap().is_some());
    }

    #[test]
    fn cycle_orientation_is_canonical() {
        let a = parse("((a,(b)#H1),(c,(d,#H1)));").unwrap();
        let b = parse("((c,(d,(b)#H1)),(a,#H1));").unwrap();
        assert_eq!(canonical_form(&a).unwrap(), canonical_form(&b).unwrap());
        let w = strongly_isomorphic(&a, &b).unwrap().unwrap();
        check_witness(&a, &b, &w);
    }

    #[test]
    fn weak_requires_consistent_mapping() {
        // Shapes agree, but no bijection pairs every leaf with an overlap.
        let a = parse("((a|b,c),d);").unwrap();
        let b = parse("((a,b),c|d);").unwrap();
        assert_eq!(shape_form(&a).unwrap(), shape_form(&b).unwrap());
        assert_eq!(
            weakly_isomorphic(&a, &b).unwrap().is_some(),
            brute_iso(&a, &b, false)
        );
    }

    #[test]
    fn level_two_is_rejected() {
        let n = parse("((a,(#H1,(b)#H2)),((c)#H1,#H2));").unwrap();
        assert!(strongly_isomorphic(&n, &n).is_err());
    }

    #[test]
    fn canonical_matches_brute_force_on_small_networks() {
        let mut nets = Vec::new();
        for seed in 0..60u64 {
            let leaves = 1 + (seed as usize % 4);
            let retics = (seed as usize / 4) % 3;
            if let Ok(n) = crate::generate::random_network(seed, leaves, retics.min(leaves - 1)) {
                if n.vertex_count() <= 12 {
                    nets.push(n);
                }
            }
        }
        for a in &nets {
            for b in &nets {
                if a.vertex_count() != b.vertex_count() || a.taxa() != b.taxa() {
                    continue;
                }
                let fast = canonical_form(a).unwrap() == canonical_form(b).unwrap();
                assert_eq!(fast, brute_iso(a, b, true), "{a} vs {b}");
                let weak = weakly_isomorphic(a, b).unwrap().is_some();
                assert_eq!(weak, brute_iso(a, b, false), "{a} vs {b}");
                assert!(!fast || weak);
            }
        }
    }
}
