mod common;

use std::collections::{BTreeSet, VecDeque};

use common::{canon, p, reticulation_ancestors, shortest_by_removed_set, small_network, N1};
use macrs_core::{
    all_crs, candidate_sets, chain_network, find_cherries, macrs_simple_with, reduce,
    rt_subnet_maker, strongly_isomorphic, trimmed_subnetworks, CherryKind, CherryPair, DpOptions,
    Network, OracleLimits, VertexId,
};

/// Canonical forms reachable from `n` by simple reductions only.
fn simple_closure(n: &Network) -> BTreeSet<String> {
    let mut seen = BTreeSet::from([canon(n)]);
    let mut queue = VecDeque::from([n.clone()]);
    while let Some(cur) = queue.pop_front() {
        for (pair, kind) in find_cherries(&cur) {
            if kind != CherryKind::Simple {
                continue;
            }
            let next = reduce(&cur, pair.x.as_str(), pair.y.as_str()).unwrap();
            if seen.insert(canon(&next)) {
                queue.push_back(next);
            }
        }
    }
    seen
}

/// Cherries of `n` used by some sequence reaching `target` from `n`.
fn cherries_used_towards(n: &Network, target: &str) -> BTreeSet<CherryPair> {
    let mut seen = BTreeSet::new();
    let mut out = BTreeSet::new();
    let mut queue = VecDeque::from([(n.clone(), BTreeSet::<CherryPair>::new())]);
    let start: BTreeSet<CherryPair> = find_cherries(n).into_iter().map(|(p, _)| p).collect();
    while let Some((cur, used)) = queue.pop_front() {
        if canon(&cur) == target {
            out.extend(used.iter().cloned());
        }
        for (pair, _) in find_cherries(&cur) {
            let next = reduce(&cur, pair.x.as_str(), pair.y.as_str()).unwrap();
            let mut u = used.clone();
            if start.contains(&pair) {
                u.insert(pair);
            }
            if seen.insert((canon(&next), u.clone())) {
                queue.push_back((next, u));
            }
        }
    }
    out
}

#[test]
fn any_contained_cherry_can_lead_a_complete_sequence() {
    let mut complete = 0;
    for seed in 0..30 {
        let n = small_network(seed, 6, 2);
        let singleton = macrs_core::Network::singleton(n.taxa()).unwrap();
        let target = canon(&singleton);
        for pair in cherries_used_towards(&n, &target) {
            let m = reduce(&n, pair.x.as_str(), pair.y.as_str()).unwrap();
            let reach = all_crs(&m, OracleLimits::default()).unwrap();
            assert!(reach.contains(&target), "seed {seed} {n}: {pair}");
            complete += 1;
        }
    }
    assert!(complete > 30);
}

#[test]
fn partial_sequences_may_not_reorder() {
    // (b,a) is reticulated at the start but simple once the edge above b
    // from the left is cut, so only the later use reaches the target.
    let n = p("((((d)#H1,(c,#H1)),(b)#H2),(a,#H2));");
    let target = canon(&p("(a|b,c|d);"));
    let pair = CherryPair::new("b", "a").unwrap();
    assert!(cherries_used_towards(&n, &target).contains(&pair));
    let m = reduce(&n, "b", "a").unwrap();
    assert!(!all_crs(&m, OracleLimits::default())
        .unwrap()
        .contains(&target));
}

#[test]
fn simple_sequences_keep_reticulation_ancestors() {
    for seed in 0..50 {
        let n = small_network(seed, 8, 3);
        let keep = reticulation_ancestors(&n);
        // Every simple sequence of length at most four.
        let mut frontier = vec![n.clone()];
        for _ in 0..4 {
            let mut next = Vec::new();
            for cur in &frontier {
                for (pair, kind) in find_cherries(cur) {
                    if kind != CherryKind::Simple {
                        continue;
                    }
                    let m = reduce(cur, pair.x.as_str(), pair.y.as_str()).unwrap();
                    for v in &keep {
                        assert!(m.contains(*v), "seed {seed}: {v} removed by {pair}");
                    }
                    assert_eq!(m.reticulation_count(), n.reticulation_count());
                    next.push(m);
                }
            }
            frontier = next;
        }
    }
}

#[test]
fn trimmed_subnetworks_are_unique_and_minimal() {
    let mut nets = vec![p(N1), chain_network(2)];
    nets.extend((0..40).map(|s| small_network(s, 6, 2)));
    for n in &nets {
        let search = shortest_by_removed_set(n);
        for (f, reached) in &search {
            let first = reached.values().next().unwrap();
            for other in reached.values() {
                assert!(
                    strongly_isomorphic(first, other).unwrap().is_some(),
                    "{n}: {f:?}"
                );
            }
        }
        for f in candidate_sets(n) {
            let key: BTreeSet<(VertexId, VertexId)> = f.edges.iter().copied().collect();
            if let Some(t) = rt_subnet_maker(n, &f).unwrap() {
                let reached = search
                    .get(&key)
                    .unwrap_or_else(|| panic!("{n}: {f:?} unreachable"));
                let found = reached.values().next().unwrap();
                assert!(
                    strongly_isomorphic(&t, found).unwrap().is_some(),
                    "{n}: {f:?}"
                );
            }
        }
    }
}

#[test]
fn every_reduced_subnetwork_comes_from_a_trimmed_one() {
    let mut nets = vec![p(N1), chain_network(3)];
    nets.extend((0..40).map(|s| small_network(s, 7, 2)));
    for n in &nets {
        let from_trims: BTreeSet<String> = trimmed_subnetworks(n)
            .flat_map(|(_, t)| simple_closure(&t))
            .collect();
        for key in all_crs(n, OracleLimits::default()).unwrap().entries.keys() {
            assert!(from_trims.contains(key), "{n}: {key}");
        }
    }
}

#[test]
fn traceback_is_a_bijection_on_reticulation_ancestors() {
    let mut checked = 0;
    for seed in 0..600u64 {
        let leaves = 3 + seed as usize % 5;
        let a = macrs_core::random_network(seed, leaves, 1 + seed as usize % 2).unwrap();
        let b = macrs_core::random_network(seed + 1000, a.leaf_count(), a.reticulation_count())
            .unwrap();
        for (_, ta) in trimmed_subnetworks(&a) {
            for (_, tb) in trimmed_subnetworks(&b) {
                let Some(s) = macrs_simple_with(&ta, &tb, DpOptions::default()).unwrap() else {
                    continue;
                };
                let above1 = reticulation_ancestors(&ta);
                let above2 = reticulation_ancestors(&tb);
                let image: BTreeSet<VertexId> = above1.iter().map(|v| s.mapping[v]).collect();
                assert_eq!(image, above2, "{ta} vs {tb}");
                for &u in &above1 {
                    for &c in ta.children(u) {
                        if above1.contains(&c) {
                            assert!(
                                tb.graph().has_edge(s.mapping[&u], s.mapping[&c]),
                                "{ta} vs {tb}"
                            );
                        }
                    }
                }
                if !above1.is_empty() {
                    checked += 1;
                }
            }
        }
    }
    assert!(checked >= 80, "only {checked} pairs with reticulations");
}
