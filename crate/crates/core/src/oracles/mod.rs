//! Independent routes to the transform, used to validate the closed forms.

pub mod compare;
pub mod double_quad;
pub mod ode;
pub mod region;

pub use compare::{compare_routes, CompareOptions, GridPoint, OracleReport, PointOutcome, RouteId};
pub use double_quad::{kernel_constant_term, sawtooth, v_double_quadrature};
pub use ode::{default_mode_truncation, evolve_bogoliubov_ode, evolve_transform, Evolution, OdeMethod, StepControl};
pub use region::{region_partition, v_region_integration, RegionSpec};
