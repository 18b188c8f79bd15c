//! Steering of qubit B by projective measurements on qubit A.

mod assemblage;
mod colgen;
mod lhs;
mod measurements;
pub mod socp;
mod strategies;

pub use assemblage::{assemblage, Assemblage, ASSEMBLAGE_TOL};
pub use lhs::{
    classification_ladder, lhs_feasibility, noise_robustness, noise_robustness_bisection,
    noise_robustness_of_assemblage, steerability_classify, ClassifyBudget, LhsCertificate,
    LhsVerdict, SteerEvidence, SteerVerdict, Steerability, SteeringWitness, BISECTION_TOL,
    ENUMERATION_MAX_SETTINGS,
    Q_ZERO_TOL, WITNESS_MARGIN,
};
pub use measurements::{
    dodecahedron_measurements, icosahedron_measurements, octahedron_measurements,
    spiral_measurements, MeasurementSet,
};
pub use strategies::{deterministic_strategies, StrategyTable, MAX_STRATEGIES};
