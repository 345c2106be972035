//! Core library for the builder action prediction toolkit: voxel world
//! semantics, the action algebra, evaluation metrics, perspective geometry,
//! shape-based target generation, dialogue simulators and dataset I/O.

pub mod actions;
pub mod dataset;
pub mod geometry;
pub mod metrics;
pub mod shapes;
pub mod simulator;
pub mod world;
