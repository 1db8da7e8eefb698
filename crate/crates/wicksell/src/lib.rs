//! File formats, experiment harnesses and the command line for
//! `wicksell-core`.

pub mod cli;
pub mod experiments;
pub mod ingest;
pub mod output;
pub mod verify;
