#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Problem gallery, JSON experiment configs, trace/report writers and the
//! parameter sweep behind the `shqp` binary.

pub mod config;
pub mod experiment;
pub mod gallery;
pub mod output;
pub mod sweep;

use config::ConfigError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Solver(#[from] shqp_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Usage problems (bad flags, unknown names, invalid configs) versus
    /// failures during a run.
    pub fn is_usage(&self) -> bool {
        matches!(self, Self::Config(_) | Self::Usage(_))
    }
}
