//! Conditional tabular GAN augmentation for small two-class tables.
//!
//! The crate is `no_std` (it needs `alloc`) and holds every algorithm of the
//! toolkit: table handling and splitting, variational Gaussian mixture
//! fitting with mode-specific normalization, a small dense-network kernel,
//! the conditional GAN itself, the classical baseline classifiers with grid
//! search, weighted metrics with the baseline-vs-augmented experiment
//! harness, and the vegetation-index / power-line distance feature math.
//!
//! File formats, CSV ingestion and the command-line front end live in the
//! `tabsyn` companion crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod baselines;
pub mod demo;
mod error;
pub mod eval;
pub mod features;
pub mod gan;
pub mod mode_norm;
pub mod neural;
pub mod random;
pub mod table;

pub use error::{Error, Result};
pub use table::{Column, ColumnKind, DataTable, Row, SplitSpec, TableSchema, Value};
