//! Disk-anchor arrangements (DANCAR) for directed graphs.
//!
//! Each node `v` gets an anchor point `x_v` and a disk `D(c_v, r_v)` in
//! `R^k`; the edge `v -> w` is read off as "`x_w` lies in `D(c_v, r_v)`".
//! Because containment is between a disk and a point rather than between
//! two disks, the relation need not be transitive or acyclic.
//!
//! The crate covers the graph plumbing ([`graph`]), the model and its
//! losses ([`embedding`], [`loss`], [`reconstruct`]), stochastic training
//! ([`trainer`]), closed-form constructions ([`analytic`]), evaluation
//! ([`eval`]), SVG output ([`viz`]) and file formats ([`io`], [`params`]).

pub mod analytic;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod graph;
pub mod io;
pub mod loss;
pub mod params;
pub mod reconstruct;
pub mod trainer;
pub mod viz;

pub use embedding::{DancarEmbedding, Model, MIN_RADIUS};
pub use error::{Error, Result};
pub use eval::{Direction, EvalReport};
pub use graph::{DirectedGraph, Edge, NegativeMode, NodeId};
pub use loss::{Gradients, LossBatch, LossBreakdown};
pub use params::Hyperparams;
pub use reconstruct::Scan;
pub use trainer::{train, TrainReport};
