//! Exact computations on specializations of one-parameter families of
//! Galois extensions of ℚ(t): branch data, inertia predictions at primes,
//! searches for specializations with prescribed local behaviour, and their
//! independent verification by p-adic and mod-p factorization.

pub mod arith;
pub mod beckmann;
pub mod cli;
pub mod family;
pub mod ffact;
pub mod grunwald;
pub mod padic;
pub mod par;
pub mod permgrp;
pub mod poly;
pub mod survey;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Arith(#[from] arith::ArithError),
    #[error(transparent)]
    Family(#[from] family::FamilyError),
    #[error(transparent)]
    Beckmann(#[from] beckmann::BeckmannError),
    #[error(transparent)]
    Grunwald(#[from] grunwald::GrunwaldError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// 2 for malformed input, 1 for a computation that could not succeed.
    pub fn exit_code(&self) -> i32 {
        use grunwald::GrunwaldError as G;
        match self {
            Error::Grunwald(G::NoResidueFound { .. } | G::TargetNotFound { .. } | G::NoWitness(_)) => 1,
            Error::Beckmann(beckmann::BeckmannError::Contradiction { .. }) => 1,
            Error::Family(family::FamilyError::ManifestInconsistent { .. } | family::FamilyError::Undetermined(_)) => 1,
            _ => 2,
        }
    }
}
