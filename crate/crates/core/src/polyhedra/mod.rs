//! Exact polyhedral computation in small dimension.

pub mod cone;
pub mod hrep;
pub mod lp;
pub mod vrep;

pub use cone::{normal_cone_at, recession_cone, PolytopeHull};
pub use hrep::{h_contains, HPolyhedron, LinearInequality, Relation};
pub use lp::{lp_solve, LpOutcome, LpStatus, Sense};
pub use vrep::{vertices_and_rays, VPolyhedron};
