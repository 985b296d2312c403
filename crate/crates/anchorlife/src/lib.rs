//! Creep lifetime analysis for adhesive anchors under sustained load.
//!
//! The toolkit turns recorded displacement histories of sustained-load
//! (creep) tests into lifetime predictions:
//!
//! 1. [`ingest`] parses specimen CSV records and campaign manifests.
//! 2. [`kinetics`] estimates creep rates, segments the three creep stages,
//!    and extracts the minimum creep rate and the failure time of each
//!    specimen (intersection of the secondary and tertiary regression
//!    lines in log-log space).
//! 3. [`lifetime`] fits the Monkman-Grant family of failure criteria
//!    `ln(rate_min) = n ln(t_f) + c` and scores predictions.
//! 4. [`stressrate`] maps sustained loads to bond stresses and fits the
//!    Norton-Bailey power law and the Prandtl-Garofalo hyperbolic-sine law
//!    relating stress to minimum creep rate.
//! 5. [`ttf`] composes a stress-rate law with a Monkman-Grant fit into a
//!    stress versus time-to-failure curve with Monte-Carlo uncertainty
//!    bands and extracts sustained-load strengths for a target life.
//! 6. [`synth`] generates three-stage creep curves with known ground truth
//!    so every estimator can be verified end to end.
//!
//! All operations are pure functions over immutable inputs and are
//! deterministic for a fixed seed.

pub mod cli;
pub mod ingest;
pub mod kinetics;
pub mod lifetime;
mod linalg;
pub mod plot;
pub mod regress;
pub mod stressrate;
pub mod synth;
pub mod ttf;
