use thiserror::Error;

use crate::model::{ValidationReport, VertexId};

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid taxon {0:?}: {1}")]
    InvalidTaxon(String, &'static str),

    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),

    #[error("no leaf is labelled by taxon {0:?}")]
    UnknownTaxon(String),

    #[error("invalid network: {0}")]
    InvalidNetwork(ValidationReport),

    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("reticulation tag #H{tag} occurs {uses} time(s); expected one defining occurrence and one reference")]
    TagUsage { tag: u64, uses: usize },

    #[error("taxon {0:?} labels more than one leaf")]
    DuplicateTaxon(String),

    #[error("network has level {0}; only level-1 networks are supported")]
    NotLevel1(usize),

    #[error("network is not orchard")]
    NotOrchard,

    #[error("component rooted at {0} is trivial")]
    TrivialComponent(VertexId),

    #[error("invalid reticulation edge set: {0}")]
    InvalidEdgeSet(String),

    #[error("oracle limit exceeded: {0}")]
    OracleLimit(String),

    #[error("cannot generate network: {0}")]
    Generation(String),

    #[error("cannot start worker threads: {0}")]
    ThreadPool(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
