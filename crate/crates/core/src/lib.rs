//! Occurrence-probability models for the propagation paths of air-to-ground
//! (A2G) radio links in stochastic urban scenarios.
//!
//! An urban scenario is described by the three ITU-R P.1410-style parameters
//! `{alpha, beta, gamma}`: built-up area fraction, building density per km²,
//! and the Rayleigh scale of building heights. On top of that description the
//! crate computes, in closed form, the probability that each of the three
//! dominant A2G paths exists for a given link geometry:
//!
//! - **LoS** — the direct path, clear when no building reaches into the first
//!   Fresnel zone ([`los_probability`]);
//! - **GS** — the ground-specular reflection, analysed through the mirror-image
//!   transmitter construction ([`gs_probability`]);
//! - **BS** — single-bounce building scattering, requiring one building to
//!   enter the first Fresnel zone while the incident and scattered sub-rays
//!   stay clear ([`bs_probability`]).
//!
//! Two independent Monte Carlo oracles live in [`montecarlo`]: a model-faithful
//! sampler whose expectation equals the closed forms exactly, and a desk-scale
//! geometric simulator that builds explicit grid cities and tests path
//! existence by clearance checks. [`analysis`] adds link-planning utilities:
//! sweeps, maximum communication distance at a probability threshold, and the
//! scattering optimal-distance search.
//!
//! All model evaluations are pure functions of their inputs and safe to call
//! concurrently.

#![forbid(unsafe_code)]

pub mod analysis;
pub mod bs;
pub mod error;
pub mod fresnel;
pub mod gs;
pub mod los;
pub mod montecarlo;
pub mod scenario;

pub use analysis::{
    bs_optimal_distance, elevation_to_distance, evaluate_paths, mcd, sweep, BsOptFlag, BsOptimum,
    LinkTemplate, McdFlag, McdResult, PathProbabilities, SweepAxis, SweepTable,
};
pub use bs::{bs_breakdown, bs_probability, BsCandidate, BsMode};
pub use error::ModelError;
pub use fresnel::{ellipsoid_semiaxes, fresnel_radius, slant_cosine, LinkGeometry, FRESNEL_ORDER};
pub use gs::{
    gs_breakdown, gs_geometry, gs_probability, reflection_point, GsClearance, GsGeometry,
};
pub use los::{los_breakdown, los_clearance_height, los_factor, los_probability, LosClearance};
pub use montecarlo::{
    generate_scene, geometric_path_check, mc_geometric, mc_model_faithful, Building, McEstimate,
    PathFlags, PathKind, Point3, UrbanScene,
};
pub use scenario::{rayleigh_cdf, rayleigh_pdf, ScenarioParams, ScenarioPreset};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
