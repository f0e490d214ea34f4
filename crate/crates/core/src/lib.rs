//! Core algorithms for studying counterfactually-augmented data (CAD):
//! a linear Gaussian simulator with closed-form and least-squares learners,
//! a rule-based perturbation-type classifier for seed/edited text pairs,
//! label-skew auditors, and reproducible split builders.
//!
//! The crate is `no_std` (with `alloc`); all I/O, file formats, and the
//! command-line front end live in the companion `cadkit` crate.

#![no_std]

#[macro_use]
extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod audit;
pub mod classify;
pub mod diff;
pub mod gaussian;
pub mod linalg;
pub mod pair;
pub mod pos;
pub mod split;
pub mod token;

pub use classify::PerturbationType;
pub use gaussian::{EditVector, GaussianSpec, LabeledSample, LinearModel};
pub use pair::{Corpus, Example, ExamplePair, Label, Task};
