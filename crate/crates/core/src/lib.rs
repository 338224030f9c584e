//! Layer-decoupling metrics, probe classifiers and neuron-group interventions
//! over labeled hidden-state matrices.
//!
//! Everything in this crate is pure computation over in-memory matrices and
//! builds without `std`; file formats, reports and the command-line driver
//! live in the companion `hslab` crate.
//!
//! The typical flow is:
//!
//! 1. score each layer with [`metrics::scdi`] and pick the lowest S-CDI layer,
//! 2. train a [`probe::ProbeModel`] on it,
//! 3. split neurons into dominance groups with [`neuron::compute_rds`] and
//!    [`neuron::partition_neurons`],
//! 4. measure group importance with [`neuron::intervene`] and [`neuron::gic`].

#![no_std]

extern crate alloc;

pub mod dataset;
pub mod error;
pub mod matrix;
pub mod metrics;
pub mod mutual_info;
pub mod neuron;
pub mod probe;
pub mod seed;
pub mod synthetic;

pub use dataset::{pair_by_id, split, PairedActivations, PairingDiagnostics, SplitSpec};
pub use error::{Error, Result};
pub use matrix::{LabeledMatrix, Matrix, NeuronSet};
pub use metrics::{scdi, ScdiConfig, ScdiReport};
pub use mutual_info::MiConfig;
pub use neuron::{NeuronGroup, NeuronPartition, RdsScores};
pub use probe::{Confusion, EvalReport, ProbeConfig, ProbeModel};
pub use synthetic::PlantSpec;
