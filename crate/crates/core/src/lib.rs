//! Maximum agreement cherry-reduced subnetworks of two binary level-1
//! orchard phylogenetic networks.
//!
//! The solver enumerates the reticulation-trimmed subnetworks of both
//! inputs, runs a cubic dynamic program on every pair, and keeps the largest
//! agreement. A brute-force oracle over all cherry-reduced subnetworks is
//! included for checking results on small inputs.

pub mod cherry;
pub mod decomposition;
pub mod dp;
pub mod enewick;
pub mod error;
pub mod generate;
pub mod iso;
pub mod model;
pub mod oracle;
pub mod solver;
pub mod trim;

pub use cherry::{
    apply_sequence, classify, find_cherries, is_orchard, reduce, CherryKind, CherryPair,
    CherrySequence,
};
pub use decomposition::{
    component_paths, decompose, level, BiconnectedComponent, ComponentPath, Decomposition,
};
pub use dp::{macrs_simple, macrs_simple_with, DpOptions, DpTable, SimpleAgreement};
pub use enewick::{parse, serialize};
pub use error::{Error, Result};
pub use generate::{bench_network, chain_network, random_network, random_pair};
pub use iso::{
    canonical_form, shape_form, strongly_isomorphic, weakly_isomorphic, IsomorphismWitness,
};
pub use model::{
    labels, validate, Graph, LabelSet, Network, Taxon, ValidationReport, VertexId, Violation,
};
pub use oracle::{all_crs, oracle_macrs, CrsCatalog, OracleLimits};
pub use solver::{macrs, summarize, MacrsResult, SolverOptions, Summary};
pub use trim::{
    candidate_sets, reticulation_trimmed_subnetworks, rt_subnet_maker, topological_sort_f,
    trimmed_subnetworks, ReticulationEdgeSet,
};
