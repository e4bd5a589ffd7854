//! Anisotropic Delaunay meshing of 4D space-time domains.
//!
//! The crate builds pentatope (4-simplex) meshes by incremental point
//! insertion into a subdivided bounding tesseract, evaluates orientation and
//! in-hypersphere predicates under a metric tensor without decomposing it,
//! scores elements with three algebraic quality heuristics and improves
//! meshes with a catalog of bistellar flips. A 2D module checks the
//! roughness-minimality property of the anisotropic Delaunay triangulation.
//!
//! Batch work (audits, quality sweeps, randomized trials, studies) runs on
//! rayon when the `parallel` feature is enabled; every batch entry point takes
//! an [`Execution`] so the sequential path stays available at runtime.

pub mod bounding;
pub mod error;
pub mod flips;
pub mod geometry;
pub mod harness;
pub mod insertion;
pub mod mesh;
pub mod par;
pub mod predicates;
pub mod quadrature;
pub mod quality;
pub mod roughness2d;

pub use error::{Error, Result};
pub use geometry::{Metric4, MetricField, Point4, Vector4};
pub use mesh::Mesh4;
pub use par::Execution;
