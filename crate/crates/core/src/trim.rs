//! Reticulation-trimmed subnetworks.
//!
//! A set `F` of reticulation edges is trimmed by cutting each edge `(u, v)`
//! and collapsing what hangs below `u` and below `v` into single leaves.
//! Edges are processed lowest first. A set is rejected when some collapsed
//! part still contains a reticulation, since no cherry sequence could have
//! reduced it to a leaf without cutting further edges.

use std::collections::BTreeSet;

use crate::decomposition::Edge;
use crate::error::{Error, Result};
use crate::model::{label_string, Graph, Network, VertexId};

/// A set of reticulation edges, sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReticulationEdgeSet {
    pub edges: Vec<Edge>,
}

impl ReticulationEdgeSet {
    pub fn new(mut edges: Vec<Edge>) -> Self {
        edges.sort();
        edges.dedup();
        ReticulationEdgeSet { edges }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// No two edges share an endpoint.
    pub fn is_disjoint(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.edges
            .iter()
            .all(|&(u, v)| seen.insert(u) && seen.insert(v))
    }

    /// Each edge as (taxa below its tail, taxa below its head), sorted.
    pub fn fingerprints(&self, n: &Network) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> =
            self.edges.iter().map(|&e| edge_fingerprint(n, e)).collect();
        out.sort();
        out
    }
}

/// (taxa below the tail, taxa below the head), each joined with `|`.
pub fn edge_fingerprint(n: &Network, (u, v): Edge) -> (String, String) {
    let below = |x: VertexId| {
        n.taxa_below(x)
            .map(|s| label_string(&s))
            .unwrap_or_default()
    };
    (below(u), below(v))
}

/// Streams every disjoint subset of reticulation edges: for each
/// reticulation, none of its in-edges or exactly one.
pub struct CandidateSets {
    parents: Vec<(VertexId, [VertexId; 2])>,
    counter: Vec<u8>,
    done: bool,
}

impl Iterator for CandidateSets {
    type Item = ReticulationEdgeSet;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if self.done {
                return None;
            }
            let edges: Vec<Edge> = self
                .counter
                .iter()
                .zip(&self.parents)
                .filter(|(&c, _)| c > 0)
                .map(|(&c, &(r, ps))| (ps[c as usize - 1], r))
                .collect();
            // Odometer step, least significant digit first.
            self.done = true;
            for digit in self.counter.iter_mut() {
                if *digit < 2 {
                    *digit += 1;
                    self.done = false;
                    break;
                }
                *digit = 0;
            }
            let set = ReticulationEdgeSet::new(edges);
            if set.is_disjoint() {
                return Some(set);
            }
        }
    }
}

pub fn candidate_sets(n: &Network) -> CandidateSets {
    let parents: Vec<(VertexId, [VertexId; 2])> = n
        .reticulations()
        .into_iter()
        .map(|r| {
            let mut ps = [n.parents(r)[0], n.parents(r)[1]];
            ps.sort();
            (r, ps)
        })
        .collect();
    CandidateSets {
        counter: vec![0; parents.len()],
        parents,
        done: false,
    }
}

fn check_set(n: &Network, f: &ReticulationEdgeSet) -> Result<()> {
    for &(u, v) in &f.edges {
        if !n.contains(u) || !n.contains(v) || !n.children(u).contains(&v) {
            return Err(Error::InvalidEdgeSet(format!("{u}->{v} is not an edge")));
        }
        if !n.is_reticulation(v) {
            return Err(Error::InvalidEdgeSet(format!("{v} is not a reticulation")));
        }
    }
    if !f.is_disjoint() {
        return Err(Error::InvalidEdgeSet("edges share an endpoint".into()));
    }
    Ok(())
}

/// Orders `f` so that an edge comes after every edge whose endpoints are
/// reachable from its own endpoints. Ties go to the smaller edge.
pub fn topological_sort_f(n: &Network, f: &ReticulationEdgeSet) -> Vec<Edge> {
    let k = f.len();
    let reach: Vec<BTreeSet<VertexId>> = f
        .edges
        .iter()
        .map(|&(u, v)| {
            let mut r = n.reach(u).unwrap_or_default();
            r.extend(n.reach(v).unwrap_or_default());
            r
        })
        .collect();
    // below[i][j]: edge j lies below edge i, so j goes first.
    let below = |i: usize, j: usize| {
        let (a, b) = f.edges[j];
        i != j && (reach[i].contains(&a) || reach[i].contains(&b))
    };
    let mut waiting: Vec<usize> = (0..k)
        .map(|i| (0..k).filter(|&j| below(i, j)).count())
        .collect();
    let mut placed = vec![false; k];
    let mut order = Vec::with_capacity(k);
    while order.len() < k {
        let Some(i) = (0..k).find(|&i| !placed[i] && waiting[i] == 0) else {
            // Mutually reachable edges; the maker rejects such sets anyway.
            order.extend((0..k).filter(|&i| !placed[i]));
            break;
        };
        placed[i] = true;
        order.push(i);
        for (h, w) in waiting.iter_mut().enumerate() {
            if below(h, i) {
                *w -= 1;
            }
        }
    }
    order.into_iter().map(|i| f.edges[i]).collect()
}

fn reach_in(g: &Graph, v: VertexId) -> Vec<VertexId> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![v];
    while let Some(u) = stack.pop() {
        if seen.insert(u) {
            stack.extend(g.children(u).iter().copied());
        }
    }
    seen.into_iter().collect()
}

/// Replaces the part hanging below `v` by a single leaf carrying its taxa.
fn collapse_below(g: &mut Graph, parent: VertexId, v: VertexId) {
    if g.out_degree(v) == 0 {
        return;
    }
    let part = reach_in(g, v);
    let mut taxa = crate::model::LabelSet::new();
    for &x in &part {
        taxa.extend(g.labels(x).iter().cloned());
    }
    for &x in &part {
        g.remove_vertex(x);
    }
    let leaf = g.add_leaf(taxa);
    g.add_edge(parent, leaf);
}

/// The reticulation-trimmed subnetwork of `n` with respect to `f`, or
/// `None` if `f` does not admit one.
pub fn rt_subnet_maker(n: &Network, f: &ReticulationEdgeSet) -> Result<Option<Network>> {
    check_set(n, f)?;
    if f.is_empty() {
        return Ok(Some(n.clone()));
    }
    let mut g = n.graph().clone();
    for (u, v) in topological_sort_f(n, f) {
        if !g.has_edge(u, v) || g.in_degree(u) > 1 || g.in_degree(v) != 2 {
            return Ok(None);
        }
        let Some(&cu) = g.children(u).iter().find(|&&c| c != v) else {
            return Ok(None);
        };
        let cv = g.children(v)[0];
        let has_retic = |g: &Graph, x: VertexId| reach_in(g, x).iter().any(|&y| g.in_degree(y) > 1);
        if has_retic(&g, cu) || has_retic(&g, cv) {
            return Ok(None);
        }
        g.remove_edge(u, v);
        collapse_below(&mut g, u, cu);
        collapse_below(&mut g, v, cv);
    }
    g.suppress_unary();
    Ok(Network::new(g).ok())
}

/// Every admitting set with its trimmed subnetwork, in candidate order.
pub fn trimmed_subnetworks(
    n: &Network,
) -> impl Iterator<Item = (ReticulationEdgeSet, Network)> + '_ {
    candidate_sets(n).filter_map(move |f| {
        rt_subnet_maker(n, &f)
            .expect("candidate sets are valid")
            .map(|t| (f, t))
    })
}

pub fn reticulation_trimmed_subnetworks(n: &Network) -> Vec<(ReticulationEdgeSet, Network)> {
    trimmed_subnetworks(n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enewick::parse;
    use crate::generate::chain_network;
    use crate::iso::strongly_isomorphic;

    const N1: &str = "((a,((c,((d,e))#H2),(f,#H2))#H1),(b,#H1));";

    struct Fig {
        n: Network,
        u: VertexId,
        v: VertexId,
        w: VertexId,
        x: VertexId,
        r1: VertexId,
        r2: VertexId,
    }

    fn fig() -> Fig {
        let n = parse(N1).unwrap();
        let p = |t: &str| n.parent(n.leaf_of(t).unwrap()).unwrap();
        let (u, v, w, x) = (p("a"), p("b"), p("c"), p("f"));
        let r1 = *n
            .children(u)
            .iter()
            .find(|&&c| n.is_reticulation(c))
            .unwrap();
        let r2 = *n
            .children(w)
            .iter()
            .find(|&&c| n.is_reticulation(c))
            .unwrap();
        Fig {
            n,
            u,
            v,
            w,
            x,
            r1,
            r2,
        }
    }

    fn same(a: &Network, text: &str) -> bool {
        strongly_isomorphic(a, &parse(text).unwrap())
            .unwrap()
            .is_some()
    }

    const N3: &str = "((a,(((c,d|e),f))#H1),(b,#H1));";
    const N4: &str = "((a,c|d|e|f),b);";

    #[test]
    fn nine_candidates_on_n1() {
        let f = fig();
        let sets: Vec<_> = candidate_sets(&f.n).collect();
        assert_eq!(sets.len(), 9);
        assert!(sets.iter().all(ReticulationEdgeSet::is_disjoint));
        assert!(sets.contains(&ReticulationEdgeSet::default()));
    }

    #[test]
    fn tree_and_single_reticulation() {
        let t = parse("((a,b),c);").unwrap();
        assert_eq!(candidate_sets(&t).count(), 1);
        let one = parse("((a,(b)#H1),(c,#H1));").unwrap();
        assert_eq!(candidate_sets(&one).count(), 3);
    }

    #[test]
    fn lower_edge_first() {
        let f = fig();
        let set = ReticulationEdgeSet::new(vec![(f.v, f.r1), (f.x, f.r2)]);
        assert_eq!(
            topological_sort_f(&f.n, &set),
            vec![(f.x, f.r2), (f.v, f.r1)]
        );
        assert!(topological_sort_f(&f.n, &ReticulationEdgeSet::default()).is_empty());
    }

    #[test]
    fn maker_on_figure_sets() {
        let f = fig();
        let make =
            |edges: Vec<Edge>| rt_subnet_maker(&f.n, &ReticulationEdgeSet::new(edges)).unwrap();
        assert!(same(&make(vec![(f.x, f.r2)]).unwrap(), N3));
        assert!(same(&make(vec![(f.x, f.r2), (f.v, f.r1)]).unwrap(), N4));
        assert!(make(vec![(f.v, f.r1)]).is_none());
        assert!(make(vec![(f.u, f.r1)]).is_none());
        assert!(same(
            &make(vec![(f.w, f.r2)]).unwrap(),
            "((a,(((f,d|e),c))#H1),(b,#H1));"
        ));
        assert_eq!(make(vec![]).unwrap().to_string(), f.n.to_string());
    }

    #[test]
    fn seven_trimmed_subnetworks_of_n1() {
        let f = fig();
        let all = reticulation_trimmed_subnetworks(&f.n);
        assert_eq!(all.len(), 7);
        let by_r = |r: usize| {
            all.iter()
                .filter(|(_, t)| t.reticulation_count() == r)
                .count()
        };
        assert_eq!((by_r(2), by_r(1), by_r(0)), (1, 2, 4));
    }

    #[test]
    fn bad_sets_are_errors() {
        let f = fig();
        let both = ReticulationEdgeSet::new(vec![(f.u, f.r1), (f.v, f.r1)]);
        assert!(matches!(
            rt_subnet_maker(&f.n, &both),
            Err(Error::InvalidEdgeSet(_))
        ));
        let a = f.n.leaf_of("a").unwrap();
        let not_retic = ReticulationEdgeSet::new(vec![(f.u, a)]);
        assert!(rt_subnet_maker(&f.n, &not_retic).is_err());
    }

    #[test]
    fn fingerprints_name_edges_by_taxa() {
        let f = fig();
        let set = ReticulationEdgeSet::new(vec![(f.x, f.r2)]);
        assert_eq!(
            set.fingerprints(&f.n),
            vec![("d|e|f".to_string(), "d|e".to_string())]
        );
    }

    #[test]
    fn chain_counts_are_linear() {
        for k in 1..=5 {
            let n = chain_network(k);
            assert_eq!(candidate_sets(&n).count(), 3usize.pow(k as u32));
            assert_eq!(trimmed_subnetworks(&n).count(), k + 1, "k = {k}");
        }
    }
}
