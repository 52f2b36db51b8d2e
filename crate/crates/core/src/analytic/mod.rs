//! Closed-form constructions: exact tree layouts, Poincaré-ball import and
//! the bipartite doubling that removes cycles.

mod bipartite;
mod poincare;
mod tree;

pub use bipartite::transform_to_bipartite;
pub use poincare::{import_poincare, poincare_ball_to_euclidean, poincare_distance, PoincarePoint};
pub use tree::{embed_tree, TreeLayoutConstants};
