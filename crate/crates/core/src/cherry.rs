//! Cherries, cherry reductions, and cherry sequences.
//!
//! Leaves are referenced by taxon: a pair `(x, y)` resolves to the leaves
//! whose label sets contain `x` and `y` at the time it is applied.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{Network, Taxon, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CherryKind {
    Simple,
    /// The parent of `x` is a reticulation fed by the parent of `y`.
    Reticulated,
    NotACherry,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CherryPair {
    pub x: Taxon,
    pub y: Taxon,
}

impl CherryPair {
    pub fn new(x: &str, y: &str) -> Result<Self> {
        Ok(CherryPair {
            x: Taxon::new(x)?,
            y: Taxon::new(y)?,
        })
    }
}

impl fmt::Display for CherryPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

/// An ordered list of pairs; pairs that are not cherries when reached leave
/// the network unchanged.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CherrySequence {
    pub items: Vec<CherryPair>,
}

impl CherrySequence {
    pub fn new(items: Vec<CherryPair>) -> Self {
        CherrySequence { items }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

impl fmt::Display for CherrySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.items {
            writeln!(f, "{p}")?;
        }
        Ok(())
    }
}

/// One `x,y` pair per line. Surrounding brackets or parentheses and blank
/// lines are ignored.
impl FromStr for CherrySequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut items = Vec::new();
        let mut offset = 0;
        for line in s.split_inclusive('\n') {
            let here = offset;
            offset += line.len();
            let body = line
                .trim()
                .trim_start_matches(['[', '('])
                .trim_end_matches([']', ')']);
            if body.trim().is_empty() {
                continue;
            }
            let Some((x, y)) = body.split_once(',') else {
                return Err(Error::Syntax {
                    position: here,
                    message: format!("expected 'taxon,taxon', found {:?}", line.trim()),
                });
            };
            items.push(CherryPair::new(x.trim(), y.trim())?);
        }
        Ok(CherrySequence { items })
    }
}

fn resolve(n: &Network, taxon: &str) -> Result<VertexId> {
    n.leaf_of(taxon)
        .ok_or_else(|| Error::UnknownTaxon(taxon.to_string()))
}

fn kind_of(n: &Network, lx: VertexId, ly: VertexId) -> CherryKind {
    if lx == ly {
        return CherryKind::NotACherry;
    }
    let (Some(px), Some(py)) = (n.parent(lx), n.parent(ly)) else {
        return CherryKind::NotACherry;
    };
    if px == py {
        CherryKind::Simple
    } else if n.is_reticulation(px) && n.children(py).contains(&px) {
        CherryKind::Reticulated
    } else {
        CherryKind::NotACherry
    }
}

/// The kind of the ordered pair `(x, y)`.
pub fn classify(n: &Network, x: &str, y: &str) -> Result<CherryKind> {
    Ok(kind_of(n, resolve(n, x)?, resolve(n, y)?))
}

/// Reduces `(x, y)` if it is a cherry; otherwise returns `n` unchanged.
pub fn reduce(n: &Network, x: &str, y: &str) -> Result<Network> {
    let lx = resolve(n, x)?;
    let ly = resolve(n, y)?;
    Ok(reduce_leaves(n, lx, ly).unwrap_or_else(|| n.clone()))
}

/// Reduces the cherry formed by two leaves, or `None` if they form none.
pub(crate) fn reduce_leaves(n: &Network, lx: VertexId, ly: VertexId) -> Option<Network> {
    let kind = kind_of(n, lx, ly);
    let mut g = n.graph().clone();
    match kind {
        CherryKind::NotACherry => return None,
        CherryKind::Simple => {
            let mut merged = g.labels(ly).clone();
            merged.extend(g.labels(lx).iter().cloned());
            g.set_labels(ly, merged);
            g.remove_vertex(lx);
        }
        CherryKind::Reticulated => {
            let px = n.parent(lx).expect("leaf has a parent");
            let py = n.parent(ly).expect("leaf has a parent");
            g.remove_edge(py, px);
        }
    }
    g.suppress_unary();
    Some(Network::from_valid(g))
}

/// Left fold of [`reduce`] over the sequence.
pub fn apply_sequence(n: &Network, s: &CherrySequence) -> Result<Network> {
    let mut cur = n.clone();
    for p in &s.items {
        cur = reduce(&cur, p.x.as_str(), p.y.as_str())?;
    }
    Ok(cur)
}

/// Every ordered cherry, each leaf named by its smallest taxon, sorted by
/// the label sets of the two leaves.
pub fn find_cherries(n: &Network) -> Vec<(CherryPair, CherryKind)> {
    let mut found = Vec::new();
    for ly in n.leaves() {
        let Some(py) = n.parent(ly) else { continue };
        for &c in n.children(py) {
            let lx = if n.is_leaf(c) {
                c
            } else if n.is_reticulation(c) && n.is_leaf(n.children(c)[0]) {
                n.children(c)[0]
            } else {
                continue;
            };
            let kind = kind_of(n, lx, ly);
            if kind != CherryKind::NotACherry {
                found.push((n.labels(lx), n.labels(ly), kind));
            }
        }
    }
    found.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    found
        .into_iter()
        .map(|(x, y, k)| {
            let pair = CherryPair {
                x: x.first().expect("leaves are labelled").clone(),
                y: y.first().expect("leaves are labelled").clone(),
            };
            (pair, k)
        })
        .collect()
}

/// Greedily reduces the first available cherry until one leaf is left.
/// Returns the sequence used, or `None` if the reduction gets stuck.
pub fn is_orchard(n: &Network) -> Option<CherrySequence> {
    // Reduces in place. Label sets are disjoint, so ordering leaves by their
    // smallest taxon orders cherries exactly as `find_cherries` does.
    let mut g = n.graph().clone();
    let mut name: BTreeMap<VertexId, Taxon> = n
        .leaves()
        .map(|l| (l, n.labels(l).first().expect("leaves are labelled").clone()))
        .collect();
    let mut seq = Vec::new();
    while name.len() > 1 {
        let mut best: Option<(&Taxon, &Taxon, VertexId, VertexId)> = None;
        for (&ly, ty) in &name {
            let py = g.parents(ly)[0];
            for &c in g.children(py) {
                let lx = if g.out_degree(c) == 0 {
                    c
                } else if g.in_degree(c) == 2 && g.out_degree(g.children(c)[0]) == 0 {
                    g.children(c)[0]
                } else {
                    continue;
                };
                if lx == ly {
                    continue;
                }
                let tx = &name[&lx];
                if best.is_none_or(|(bx, by, _, _)| (tx, ty) < (bx, by)) {
                    best = Some((tx, ty, lx, ly));
                }
            }
        }
        let (tx, ty, lx, ly) = best?;
        seq.push(CherryPair {
            x: tx.clone(),
            y: ty.clone(),
        });
        let px = g.parents(lx)[0];
        if g.in_degree(px) == 2 {
            g.remove_edge(g.parents(ly)[0], px);
        } else {
            let tx = name.remove(&lx).expect("leaf is named");
            if tx < name[&ly] {
                name.insert(ly, tx);
            }
            g.remove_vertex(lx);
        }
        g.suppress_unary();
    }
    Some(CherrySequence::new(seq))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enewick::parse;
    use crate::iso::strongly_isomorphic;
    use crate::model::labels;
    use std::collections::BTreeSet;

    const N1: &str = "((a,((c,((d,e))#H2),(f,#H2))#H1),(b,#H1));";

    fn n1() -> Network {
        parse(N1).unwrap()
    }

    fn seq(pairs: &[(&str, &str)]) -> CherrySequence {
        CherrySequence::new(
            pairs
                .iter()
                .map(|(x, y)| CherryPair::new(x, y).unwrap())
                .collect(),
        )
    }

    fn same(a: &Network, b: &Network) -> bool {
        strongly_isomorphic(a, b).unwrap().is_some()
    }

    #[test]
    fn classify_figure_pairs() {
        let n1 = n1();
        assert_eq!(classify(&n1, "d", "e").unwrap(), CherryKind::Simple);
        let n2 = reduce(&n1, "d", "e").unwrap();
        assert_eq!(classify(&n2, "e", "f").unwrap(), CherryKind::Reticulated);
        assert_eq!(classify(&n2, "f", "e").unwrap(), CherryKind::NotACherry);
        assert!(matches!(
            classify(&n1, "q", "e"),
            Err(Error::UnknownTaxon(_))
        ));
    }

    #[test]
    fn reductions_follow_the_figure() {
        let n1 = n1();
        let n2 = reduce(&n1, "d", "e").unwrap();
        let e = n2.leaf_of("e").unwrap();
        assert_eq!(n2.labels(e), &labels(["d", "e"]));
        assert_eq!(n2.leaf_of("d"), Some(e));
        let r2 = n2.parent(e).unwrap();
        assert_eq!(n2.taxa_below(r2).unwrap(), labels(["d", "e"]));

        let n3 = reduce(&n2, "e", "f").unwrap();
        assert_eq!(n3.reticulation_count(), 1);
        assert!(same(
            &n3,
            &parse("((a,(((c,d|e),f))#H1),(b,#H1));").unwrap()
        ));
        assert_eq!(n3.reticulations_below(n3.root()).unwrap().len(), 1);

        let n4 = apply_sequence(&n3, &seq(&[("c", "e"), ("f", "e"), ("e", "b")])).unwrap();
        assert!(same(&n4, &parse("((a,c|d|e|f),b);").unwrap()));
        assert!(same(
            &n3,
            &apply_sequence(&n1, &seq(&[("d", "e"), ("e", "f")])).unwrap()
        ));
    }

    #[test]
    fn non_cherry_is_identity() {
        let n1 = n1();
        let out = reduce(&n1, "a", "c").unwrap();
        assert_eq!(out.to_string(), n1.to_string());
        assert_eq!(
            apply_sequence(&n1, &seq(&[])).unwrap().to_string(),
            n1.to_string()
        );
    }

    #[test]
    fn cherries_of_figure_networks() {
        let n1 = n1();
        let pairs: Vec<String> = find_cherries(&n1)
            .iter()
            .map(|(p, _)| p.to_string())
            .collect();
        assert_eq!(pairs, vec!["d,e", "e,d"]);
        assert!(find_cherries(&parse("(a);").unwrap()).is_empty());

        let n3 = parse("((a,(((c,d|e),f))#H1),(b,#H1));").unwrap();
        let found = find_cherries(&n3);
        assert!(found
            .iter()
            .any(|(p, k)| p.to_string() == "c,d" && *k == CherryKind::Simple));
        assert!(found
            .iter()
            .all(|(p, k)| classify(&n3, p.x.as_str(), p.y.as_str()).unwrap() == *k));
    }

    #[test]
    fn cherry_scan_matches_pair_scan() {
        for seed in 0..30 {
            let n = crate::generate::random_network(seed, 2 + seed as usize % 6, seed as usize % 3)
                .unwrap();
            let mut expect = BTreeSet::new();
            for a in n.leaves() {
                for b in n.leaves() {
                    let k = kind_of(&n, a, b);
                    if k != CherryKind::NotACherry {
                        expect.insert((n.labels(a).clone(), n.labels(b).clone(), k as u8));
                    }
                }
            }
            let got: BTreeSet<_> = find_cherries(&n)
                .into_iter()
                .map(|(p, k)| {
                    let a = n.labels(n.leaf_of(p.x.as_str()).unwrap()).clone();
                    let b = n.labels(n.leaf_of(p.y.as_str()).unwrap()).clone();
                    (a, b, k as u8)
                })
                .collect();
            assert_eq!(got, expect);
        }
    }

    #[test]
    fn orchard_witness() {
        let n1 = n1();
        let w = is_orchard(&n1).unwrap();
        // Five leaves merge away and two reticulation edges are cut.
        assert_eq!(w.len(), 7);
        assert!(apply_sequence(&n1, &w).unwrap().is_singleton());
        assert!(is_orchard(&parse("(a);").unwrap()).unwrap().is_empty());
    }

    #[test]
    fn orchard_witness_matches_reduction_by_first_cherry() {
        for seed in 0..60 {
            let n =
                crate::generate::random_network(seed, 1 + seed as usize % 10, seed as usize % 4)
                    .unwrap_or_else(|_| crate::generate::random_network(seed, 5, 1).unwrap());
            let mut cur = n.clone();
            let mut want = Vec::new();
            while let Some((pair, _)) = find_cherries(&cur).into_iter().next() {
                cur = reduce(&cur, pair.x.as_str(), pair.y.as_str()).unwrap();
                want.push(pair);
            }
            assert!(cur.is_singleton());
            assert_eq!(
                is_orchard(&n).unwrap(),
                CherrySequence::new(want),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn sequence_text() {
        let s: CherrySequence = "[d,e]\n\n(e, f)\nc,e\n".parse().unwrap();
        assert_eq!(s, seq(&[("d", "e"), ("e", "f"), ("c", "e")]));
        assert_eq!(s.to_string(), "d,e\ne,f\nc,e\n");
        assert!("d e".parse::<CherrySequence>().is_err());
    }
}
