//! Groupoids internal to finite graphs.
//!
//! Finite graphs stand in for manifolds, graph maps (which may collapse
//! edges) for smooth maps. On top of that the crate implements functors,
//! natural transformations, essential equivalences and weak pullbacks,
//! generalized maps as spans, bibundles and the correspondence between the
//! two, the fundamental groupoid as a finite presentation with bounded word
//! rewriting, essential 1-homotopy equivalences and the nerve.

pub mod bibundle;
pub mod builtins;
pub mod cli;
pub mod fpgroup;
pub mod fractions;
pub mod graph;
pub mod groupoid;
pub mod homotopy;
pub mod io;
pub mod nerve;
pub mod par;
pub(crate) mod search;
pub mod snf;
pub mod span;
pub mod tribool;

pub use graph::{Cell, EdgePath, FiberProduct, Graph, GraphError, GraphMap};
pub use tribool::TriBool;
