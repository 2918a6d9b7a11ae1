//! Particle creation in a one-dimensional cavity whose wall moves inward at
//! constant speed for a finite time.
//!
//! The stable quasiparticles of the contracting cavity are related to the
//! instantaneous modes by a time-independent Bogoliubov transformation, so the
//! whole in -> out transform and the mean particle number in every final mode
//! come in closed form. This crate evaluates those closed forms and checks
//! them against independent numerical routes: quadrature of the mode
//! overlaps, a two-dimensional integral of the pre-summed kernel, region
//! integration, and direct Heisenberg evolution in a truncated mode basis.
//!
//! ```
//! use dce::{CavityParams, ModeIndex, Speed, Squeeze, mean_particle_number};
//!
//! let p = CavityParams::new(Speed::Gamma(10.0), Squeeze::Theta(0.5)).unwrap();
//! let n1 = mean_particle_number(ModeIndex::new(1).unwrap(), p.d(), p.theta(), 1e-10).unwrap();
//! assert!(n1.value > 0.0 && n1.tail_bound <= 1e-10);
//! ```

// `!(x > 0.0)` is deliberate: NaN must fail the domain checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bogoliubov;
pub mod cavity;
pub mod cli;
pub mod error;
pub mod milne;
pub mod oracles;
pub mod quadrature;
pub mod spectrum;
pub mod summation;
pub mod transform;

pub use bogoliubov::{
    alpha_beta, bogoliubov_block, bogoliubov_matrices, coefficient_envelope, generator_matrices, nonadiabatic_couplings,
    stable_particle_energy, BogoliubovMatrices, CouplingMatrices, GeneratorMatrices, UnitarityCheck, MAX_TRUNCATION,
};
pub use cavity::{chi_of_t, derived_mode, params_from, CavityParams, DerivedModeQuantities, ModeIndex, Speed, Squeeze};
pub use error::{Error, Result};
pub use milne::{gram_matrix, kg_inner_product, milne_mode_value, MilneMode};
pub use quadrature::{integrate, romberg, Integral, Pair, QuadValue, QuadratureConfig};
pub use spectrum::{
    cluster_interference, count_local_maxima, exact_maximum_search, leading_log_estimate, linear_grid, maxima_positions,
    mean_particle_number, plateau_estimate, scan_theta, spectrum, zero_positions, ClusterKinematics, Interference,
    MaximumSearch, ParticleNumber, ScanRow, SpectrumEntry, SpectrumResult, ZeroPosition,
};
pub use summation::CompensatedSum;
pub use transform::{
    closed_form_matrices, mode_phase, series_tail_bound, transform_matrices, u_closed, uv_series, v_closed, PhaseKernel,
    Route, RouteTag, SeriesEntry, TransformMatrices,
};
