//! Disguised toric systems: realization cones, parametrizations of the
//! realizations on a target graph, and membership decisions.

pub mod closed;
pub mod cone;
pub mod domain;
pub mod family;
pub mod param;
pub mod search;

pub use closed::disguised_membership_rectangle;
pub use cone::{double_description, pi_cone, source_cone, ConeDescription, Relation};
pub use family::{rectangle_shape, RectangleShape};
pub use param::{
    check_faithful, check_parametrization, generic_parametrization, identity_parametrization,
    pullback_toric, rectangle_parametrization, rectangle_symbolic, triangle_parametrization,
    Constraint, ParamEvidence, ParamFlags, Parametrization, Pullback,
};
pub use search::{
    default_parametrization, disguised_search, subgraph_union_sweep, Budget, SameDynamics,
    SearchReport, Verdict, Witness,
};
