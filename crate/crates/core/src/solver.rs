//! Maximum agreement cherry-reduced subnetworks.
//!
//! Every cherry-reduced subnetwork is reachable by simple reductions from
//! some reticulation-trimmed subnetwork, so it suffices to run the simple
//! agreement table on every pair of trimmed subnetworks of the two inputs
//! and keep the largest result.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use crate::cherry::is_orchard;
use crate::decomposition::level;
use crate::dp::{macrs_simple_with, DpOptions, SimpleAgreement};
use crate::enewick::serialize;
use crate::error::{Error, Result};
use crate::model::Network;
use crate::trim::{trimmed_subnetworks, ReticulationEdgeSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverOptions {
    /// Only pair trimmed subnetworks with equal reticulation counts.
    pub use_r_filter: bool,
    /// Worker threads; 0 or 1 runs on the calling thread.
    pub threads: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            use_r_filter: true,
            threads: 1,
        }
    }
}

pub type Fingerprint = (String, String);

#[derive(Clone, Debug)]
pub struct MacrsResult {
    pub network: Network,
    pub v1: usize,
    pub v2: usize,
    pub v_star: usize,
    pub leaf_count: usize,
    pub reticulation_count: usize,
    pub f1: ReticulationEdgeSet,
    pub f2: ReticulationEdgeSet,
    pub f1_fingerprints: Vec<Fingerprint>,
    pub f2_fingerprints: Vec<Fingerprint>,
}

/// Checks that a network is a valid solver input.
pub fn check_input(n: &Network) -> Result<()> {
    let l = level(n);
    if l > 1 {
        return Err(Error::NotLevel1(l));
    }
    if is_orchard(n).is_none() {
        return Err(Error::NotOrchard);
    }
    Ok(())
}

struct Trimmed {
    f: ReticulationEdgeSet,
    fingerprints: Vec<Fingerprint>,
    network: Network,
}

struct Candidate {
    v_star: usize,
    canonical: String,
    f1: ReticulationEdgeSet,
    f2: ReticulationEdgeSet,
    fp1: Vec<Fingerprint>,
    fp2: Vec<Fingerprint>,
    agreement: SimpleAgreement,
}

impl Candidate {
    /// Larger networks first, then canonical text, then edge fingerprints.
    fn better_than(&self, other: &Candidate) -> bool {
        other
            .v_star
            .cmp(&self.v_star)
            .then_with(|| self.canonical.cmp(&other.canonical))
            .then_with(|| self.fp1.cmp(&other.fp1))
            .then_with(|| self.fp2.cmp(&other.fp2))
            == Ordering::Less
    }
}

fn pick(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if b.better_than(&a) { b } else { a }),
        (a, None) => a,
        (None, b) => b,
    }
}

fn best_for(t1: &Trimmed, list2: &[Trimmed], opts: SolverOptions) -> Result<Option<Candidate>> {
    let dp = DpOptions {
        guard_reticulation_counts: opts.use_r_filter,
    };
    let r1 = t1.network.reticulation_count();
    let mut best: Option<Candidate> = None;
    for t2 in list2 {
        if opts.use_r_filter && t2.network.reticulation_count() != r1 {
            continue;
        }
        let Some(agreement) = macrs_simple_with(&t1.network, &t2.network, dp)? else {
            continue;
        };
        let v_star = agreement.network.vertex_count();
        if best.as_ref().is_some_and(|b| b.v_star > v_star) {
            continue;
        }
        let c = Candidate {
            v_star,
            canonical: serialize(&agreement.network),
            f1: t1.f.clone(),
            f2: t2.f.clone(),
            fp1: t1.fingerprints.clone(),
            fp2: t2.fingerprints.clone(),
            agreement,
        };
        best = pick(best, Some(c));
    }
    Ok(best)
}

fn trimmed(n: &Network) -> impl Iterator<Item = Trimmed> + Send + '_ {
    trimmed_subnetworks(n).map(move |(f, network)| Trimmed {
        fingerprints: f.fingerprints(n),
        f,
        network,
    })
}

/// A maximum agreement cherry-reduced subnetwork of `n1` and `n2`, or
/// `None` if the inputs share no taxon.
pub fn macrs(n1: &Network, n2: &Network, opts: SolverOptions) -> Result<Option<MacrsResult>> {
    check_input(n1)?;
    check_input(n2)?;
    let list2: Vec<Trimmed> = trimmed(n2).collect();

    let best = if opts.threads <= 1 {
        let mut best = None;
        for t1 in trimmed(n1) {
            best = pick(best, best_for(&t1, &list2, opts)?);
        }
        best
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| Error::ThreadPool(e.to_string()))?;
        pool.install(|| {
            trimmed(n1)
                .par_bridge()
                .map(|t1| best_for(&t1, &list2, opts))
                .try_reduce(|| None, |a, b| Ok(pick(a, b)))
        })?
    };

    Ok(best.map(|c| MacrsResult {
        v1: n1.vertex_count(),
        v2: n2.vertex_count(),
        v_star: c.v_star,
        leaf_count: c.agreement.leaf_count,
        reticulation_count: c.agreement.network.reticulation_count(),
        network: c.agreement.network,
        f1: c.f1,
        f2: c.f2,
        f1_fingerprints: c.fp1,
        f2_fingerprints: c.fp2,
    }))
}

/// Flat record of a result, ready for JSON output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub v1: usize,
    pub v2: usize,
    pub v_star: usize,
    pub leaf_count: usize,
    pub reticulation_count: usize,
    /// `v1 - v_star` and `v2 - v_star`.
    pub deltas: [usize; 2],
    pub network: String,
    pub f1: Vec<[String; 2]>,
    pub f2: Vec<[String; 2]>,
}

pub fn summarize(r: &MacrsResult) -> Summary {
    let pairs = |fp: &[Fingerprint]| fp.iter().map(|(a, b)| [a.clone(), b.clone()]).collect();
    Summary {
        v1: r.v1,
        v2: r.v2,
        v_star: r.v_star,
        leaf_count: r.leaf_count,
        reticulation_count: r.reticulation_count,
        deltas: [r.v1 - r.v_star, r.v2 - r.v_star],
        network: serialize(&r.network),
        f1: pairs(&r.f1_fingerprints),
        f2: pairs(&r.f2_fingerprints),
    }
}
