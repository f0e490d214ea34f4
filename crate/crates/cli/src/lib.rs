//! File formats, reports, and the command-line front end for the CAD
//! analysis toolkit. The algorithms live in `cadkit-core`; this crate adds
//! JSONL/TSV corpus loading, the simulation verification battery, CSV/JSON
//! report emission, split directories, and run manifests.

pub mod cli;
pub mod config;
pub mod corpus_io;
pub mod manifest;
pub mod record;
pub mod report;
pub mod simulate;
pub mod split_io;
