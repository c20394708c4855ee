//! Property-graph transformations: simplification of static models,
//! reduction of dynamic models to graph skeletons, lifting graphs back to
//! models, and neighborhood queries.

mod graph;
mod lift;
mod query;
mod reduce;
mod simplify;

pub use graph::{Node, PropertyGraph, Props, Rel};
pub use lift::{lift_property_graph, lift_with_containment, LiftReport};
pub use query::{query_neighbors, Direction};
pub use reduce::{reduce_dynamic, to_property_graph, Skeleton};
pub use simplify::simplify_static;
