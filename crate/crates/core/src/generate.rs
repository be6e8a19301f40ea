//! Seeded generators for level-1 orchard networks.
//!
//! [`random_network`] runs cherry reductions backwards from a singleton: a
//! simple expansion gives leaf `y` a new sibling `x`, and a reticulated
//! expansion subdivides the edges above `x` and `y` with `r` and `s` and adds
//! the edge `(s, r)`. Every output can be reduced again by undoing those
//! steps in reverse order, so it is orchard.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decomposition::level;
use crate::error::{Error, Result};
use crate::model::{Graph, LabelSet, Network, Taxon, VertexId};

const RESTARTS: u64 = 1000;
const PAIR_TRIES: usize = 64;

/// `a`..`z`, then `t26`, `t27`, and so on.
pub fn taxon_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("t{i}")
    }
}

fn single(name: String) -> LabelSet {
    LabelSet::from([Taxon::new(name).expect("generated names are valid")])
}

/// Subdivides the edge above `v` with a fresh vertex and returns it.
fn subdivide_above(g: &mut Graph, v: VertexId) -> VertexId {
    let p = g.parents(v)[0];
    let m = g.add_vertex();
    g.redirect_child(p, v, m);
    g.add_edge(m, v);
    m
}

/// Renames the leaves with a seeded permutation of the first `k` names.
fn relabel(g: &mut Graph, rng: &mut ChaCha8Rng) {
    let leaves: Vec<VertexId> = g.vertices().filter(|&v| g.out_degree(v) == 0).collect();
    let mut names: Vec<usize> = (0..leaves.len()).collect();
    names.shuffle(rng);
    for (leaf, i) in leaves.into_iter().zip(names) {
        g.set_labels(leaf, single(taxon_name(i)));
    }
}

fn attempt(rng: &mut ChaCha8Rng, leaves: usize, retics: usize) -> Option<Network> {
    let mut g = Graph::new();
    let root = g.add_vertex();
    let first = g.add_leaf(single("x0".into()));
    g.add_edge(root, first);
    let mut leaf_ids = vec![first];
    let (mut simple_left, mut retic_left) = (leaves - 1, retics);

    while simple_left + retic_left > 0 {
        let want_retic = leaf_ids.len() >= 2
            && retic_left > 0
            && rng.gen_range(0..simple_left + retic_left) < retic_left;
        let mut done = false;
        if want_retic {
            for _ in 0..PAIR_TRIES {
                let x = *leaf_ids.choose(rng)?;
                let y = *leaf_ids.choose(rng)?;
                if x == y {
                    continue;
                }
                let mut h = g.clone();
                let r = subdivide_above(&mut h, x);
                let s = subdivide_above(&mut h, y);
                h.add_edge(s, r);
                let Ok(n) = Network::new(h.clone()) else {
                    continue;
                };
                if level(&n) <= 1 {
                    g = h;
                    retic_left -= 1;
                    done = true;
                    break;
                }
            }
        }
        if !done {
            if simple_left == 0 {
                return None;
            }
            let y = *leaf_ids.choose(rng)?;
            let x = g.add_leaf(single(format!("x{}", leaf_ids.len())));
            if g.vertex_count() == 3 {
                g.add_edge(root, x);
            } else {
                let t = subdivide_above(&mut g, y);
                g.add_edge(t, x);
            }
            leaf_ids.push(x);
            simple_left -= 1;
        }
    }
    relabel(&mut g, rng);
    Network::new(g).ok()
}

/// A random binary level-1 orchard network with exactly `leaves` leaves and
/// `retics` reticulations, determined by `seed`.
pub fn random_network(seed: u64, leaves: usize, retics: usize) -> Result<Network> {
    if leaves == 0 {
        return Err(Error::Generation("at least one leaf is required".into()));
    }
    if retics > leaves - 1 {
        return Err(Error::Generation(format!(
            "{retics} reticulations need at least {} leaves",
            retics + 1
        )));
    }
    for restart in 0..RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(
            seed.wrapping_add(restart.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        );
        if let Some(n) = attempt(&mut rng, leaves, retics) {
            return Ok(n);
        }
    }
    Err(Error::Generation(format!(
        "no level-1 network with {leaves} leaves and {retics} reticulations found"
    )))
}

/// Two networks for differential testing, each with up to `max_leaves`
/// leaves and `max_retics` reticulations. Both draw their taxa from the
/// front of the same alphabet, so they always share `a`.
pub fn random_pair(seed: u64, max_leaves: usize, max_retics: usize) -> Result<(Network, Network)> {
    if max_leaves == 0 {
        return Err(Error::Generation("at least one leaf is required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let one = |rng: &mut ChaCha8Rng| {
        let leaves = rng.gen_range(1..=max_leaves);
        let retics = rng.gen_range(0..=max_retics.min(leaves - 1));
        random_network(rng.gen(), leaves, retics)
    };
    let a = one(&mut rng)?;
    let b = one(&mut rng)?;
    Ok((a, b))
}

/// `k` triangles stacked in a path: component `i` has root `p_i`, tree
/// vertex `q_i` over leaf `a_i`, and reticulation `r_i` fed by `p_i` and
/// `q_i`, with `r_i` feeding `p_{i+1}`. The last reticulation feeds leaf `z`.
pub fn chain_network(k: usize) -> Network {
    let mut g = Graph::new();
    let mut top = g.add_vertex();
    for i in 0..k {
        let q = g.add_vertex();
        let a = g.add_leaf(single(format!("a{i}")));
        let r = g.add_vertex();
        g.add_edge(top, q);
        g.add_edge(top, r);
        g.add_edge(q, a);
        g.add_edge(q, r);
        if i + 1 < k {
            let next = g.add_vertex();
            g.add_edge(r, next);
            top = next;
        } else {
            let z = g.add_leaf(single("z".into()));
            g.add_edge(r, z);
        }
    }
    if k == 0 {
        let z = g.add_leaf(single("z".into()));
        g.add_edge(top, z);
    }
    Network::new(g).expect("chain networks are valid")
}

/// Benchmark instance: `retics` disjoint gadgets `((x,a),(y,b))` in which
/// the vertex above `y` also feeds a reticulation above `x`, joined with the
/// remaining leaves into a random tree. Each gadget's reticulation can be
/// kept or trimmed from either side.
pub fn bench_network(seed: u64, leaves: usize, retics: usize) -> Result<Network> {
    if leaves < 4 * retics || leaves == 0 {
        return Err(Error::Generation(format!(
            "{retics} gadgets need at least {} leaves",
            (4 * retics).max(1)
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new();
    let mut next_name = 0;
    let mut leaf = |g: &mut Graph| {
        let v = g.add_leaf(single(taxon_name(next_name)));
        next_name += 1;
        v
    };
    let mut parts: Vec<VertexId> = Vec::new();
    for _ in 0..retics {
        let top = g.add_vertex();
        let t1 = g.add_vertex();
        let t2 = g.add_vertex();
        let s = g.add_vertex();
        let r = g.add_vertex();
        let (x, a, y, b) = (leaf(&mut g), leaf(&mut g), leaf(&mut g), leaf(&mut g));
        g.add_edge(top, t1);
        g.add_edge(top, t2);
        g.add_edge(t1, a);
        g.add_edge(t1, r);
        g.add_edge(t2, b);
        g.add_edge(t2, s);
        g.add_edge(s, y);
        g.add_edge(s, r);
        g.add_edge(r, x);
        parts.push(top);
    }
    for _ in 4 * retics..leaves {
        parts.push(leaf(&mut g));
    }
    while parts.len() > 1 {
        parts.shuffle(&mut rng);
        let a = parts.pop().expect("two parts");
        let b = parts.pop().expect("two parts");
        let t = g.add_vertex();
        g.add_edge(t, a);
        g.add_edge(t, b);
        parts.push(t);
    }
    if g.vertex_count() == 1 {
        let root = g.add_vertex();
        g.add_edge(root, parts[0]);
    }
    Network::new(g)
}
