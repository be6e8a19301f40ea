//! Brute-force reference: every cherry-reduced subnetwork of a small
//! network, and the largest one two networks have in common.

use std::collections::{BTreeMap, VecDeque};

use crate::cherry::{find_cherries, reduce, CherryPair, CherrySequence};
use crate::error::{Error, Result};
use crate::iso::{canonical_form, shape_form, weakly_isomorphic};
use crate::model::Network;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_leaves: usize,
    pub max_retics: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_leaves: 8,
            max_retics: 3,
        }
    }
}

impl OracleLimits {
    fn check(&self, n: &Network) -> Result<()> {
        if n.leaf_count() > self.max_leaves {
            return Err(Error::OracleLimit(format!(
                "{} leaves exceed the limit of {}",
                n.leaf_count(),
                self.max_leaves
            )));
        }
        if n.reticulation_count() > self.max_retics {
            return Err(Error::OracleLimit(format!(
                "{} reticulations exceed the limit of {}",
                n.reticulation_count(),
                self.max_retics
            )));
        }
        Ok(())
    }
}

/// Every network reachable by a cherry sequence, keyed by canonical form,
/// each with one sequence reaching it.
#[derive(Clone, Debug, Default)]
pub struct CrsCatalog {
    pub entries: BTreeMap<String, (Network, CherrySequence)>,
}

impl CrsCatalog {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, canonical: &str) -> bool {
        self.entries.contains_key(canonical)
    }

    pub fn networks(&self) -> impl Iterator<Item = &Network> {
        self.entries.values().map(|(n, _)| n)
    }
}

/// Breadth-first closure of `n` under single cherry reductions.
pub fn all_crs(n: &Network, limits: OracleLimits) -> Result<CrsCatalog> {
    limits.check(n)?;
    let mut cat = CrsCatalog::default();
    cat.entries
        .insert(canonical_form(n)?, (n.clone(), CherrySequence::default()));
    let mut queue = VecDeque::from([(n.clone(), CherrySequence::default())]);
    while let Some((cur, seq)) = queue.pop_front() {
        for (pair, _) in find_cherries(&cur) {
            let next = reduce(&cur, pair.x.as_str(), pair.y.as_str())?;
            let key = canonical_form(&next)?;
            if cat.contains(&key) {
                continue;
            }
            let mut items = seq.items.clone();
            items.push(CherryPair {
                x: pair.x.clone(),
                y: pair.y.clone(),
            });
            let witness = CherrySequence::new(items);
            cat.entries.insert(key, (next.clone(), witness.clone()));
            queue.push_back((next, witness));
        }
    }
    Ok(cat)
}

/// `a` with every leaf relabelled by the taxa it shares with its image.
fn intersect_labels(a: &Network, b: &Network) -> Result<Option<Network>> {
    let Some(w) = weakly_isomorphic(a, b)? else {
        return Ok(None);
    };
    let mut g = a.graph().clone();
    for l in a.leaves() {
        let shared = a
            .labels(l)
            .intersection(b.labels(w.mapping[&l]))
            .cloned()
            .collect();
        g.set_labels(l, shared);
    }
    Ok(Some(Network::new(g)?))
}

/// The largest network weakly isomorphic to a cherry-reduced subnetwork of
/// each input, with leaves labelled by the shared taxa. Among equally large
/// answers the smallest canonical form wins.
pub fn oracle_macrs(
    n1: &Network,
    n2: &Network,
    limits: OracleLimits,
) -> Result<Option<(usize, Network)>> {
    let c1 = all_crs(n1, limits)?;
    let c2 = all_crs(n2, limits)?;
    let group = |c: &CrsCatalog| -> Result<BTreeMap<String, Vec<Network>>> {
        let mut out: BTreeMap<String, Vec<Network>> = BTreeMap::new();
        for n in c.networks() {
            out.entry(shape_form(n)?).or_default().push(n.clone());
        }
        Ok(out)
    };
    let g1 = group(&c1)?;
    let g2 = group(&c2)?;
    let mut shared: Vec<(usize, &String)> = g1
        .iter()
        .filter(|(s, _)| g2.contains_key(*s))
        .map(|(s, ns)| (ns[0].vertex_count(), s))
        .collect();
    shared.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(b.1)));

    let mut best: Option<(usize, String, Network)> = None;
    for (size, shape) in shared {
        if best.as_ref().is_some_and(|b| b.0 > size) {
            break;
        }
        for a in &g1[shape] {
            for b in &g2[shape] {
                if let Some(star) = intersect_labels(a, b)? {
                    let key = canonical_form(&star)?;
                    if best.as_ref().is_none_or(|(_, k, _)| key < *k) {
                        best = Some((size, key, star));
                    }
                }
            }
        }
    }
    Ok(best.map(|(v, _, n)| (v, n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enewick::parse;
    use crate::iso::strongly_isomorphic;

    const N1: &str = "((a,((c,((d,e))#H2),(f,#H2))#H1),(b,#H1));";

    fn p(t: &str) -> Network {
        parse(t).unwrap()
    }

    #[test]
    fn singleton_catalog() {
        assert_eq!(
            all_crs(&p("(a);"), OracleLimits::default()).unwrap().len(),
            1
        );
    }

    #[test]
    fn cherry_tree_catalog() {
        let cat = all_crs(&p("(a,b);"), OracleLimits::default()).unwrap();
        assert_eq!(cat.len(), 2);
        assert!(cat.contains("(a|b);"));
    }

    #[test]
    fn n1_catalog_contains_the_chain() {
        let cat = all_crs(&p(N1), OracleLimits::default()).unwrap();
        for t in [
            "((a,((c,(d|e)#H2),(f,#H2))#H1),(b,#H1));",
            "((a,(((c,d|e),f))#H1),(b,#H1));",
            "((a,c|d|e|f),b);",
        ] {
            let want = p(t);
            assert!(
                cat.networks()
                    .any(|n| strongly_isomorphic(n, &want).unwrap().is_some()),
                "{t}"
            );
        }
        // Closed under single reductions.
        for n in cat.networks() {
            for (pair, _) in find_cherries(n) {
                let next = reduce(n, pair.x.as_str(), pair.y.as_str()).unwrap();
                assert!(cat.contains(&canonical_form(&next).unwrap()));
            }
        }
    }

    #[test]
    fn witnesses_reproduce_entries() {
        let n = p(N1);
        let cat = all_crs(&n, OracleLimits::default()).unwrap();
        for (key, (_, seq)) in &cat.entries {
            let got = crate::cherry::apply_sequence(&n, seq).unwrap();
            assert_eq!(&canonical_form(&got).unwrap(), key);
        }
    }

    #[test]
    fn limits() {
        let small = OracleLimits {
            max_leaves: 3,
            max_retics: 3,
        };
        assert!(matches!(all_crs(&p(N1), small), Err(Error::OracleLimit(_))));
    }

    #[test]
    fn figure_pairs() {
        let l = OracleLimits::default();
        let (v, _) = oracle_macrs(&p("((a,c|d|e|f),b);"), &p("((a,c),b);"), l)
            .unwrap()
            .unwrap();
        assert_eq!(v, 5);
        let n1 = p(N1);
        let (v, n) = oracle_macrs(&n1, &n1, l).unwrap().unwrap();
        assert_eq!(v, 15);
        assert!(strongly_isomorphic(&n, &n1).unwrap().is_some());
        assert!(oracle_macrs(&p("(a,b);"), &p("(c,d);"), l)
            .unwrap()
            .is_none());
    }
}
