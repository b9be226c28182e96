//! Intersection graphs of subgroups of finite groups.

pub mod burnside;
pub mod complexes;
pub mod corpus;
pub mod domgraph;
pub mod error;
pub mod group;
pub mod lattice;
pub mod setcover;
pub mod suite;
pub mod theorems;

pub use domgraph::{gamma_exact, intersection_graph, GammaValue, IntersectionGraph};
pub use error::{Error, Result};
pub use group::{build_group, parse_group_spec, GroupSpec, GroupTable, DEFAULT_ELEMENT_CAP};
pub use lattice::{enumerate_subgroups, Budget, Lattice, Subgroup};
pub use setcover::SearchLimits;
