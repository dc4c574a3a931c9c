//! Moment and concentration bounds for partial sums of weakly dependent
//! random fields on the lattice, together with the machinery to verify them:
//!
//! - [`lattice`]: dyadic projections, the multiscale total order, predecessor
//!   sets, cells, and exact cell-cardinality identities.
//! - [`frames`]: frame bands, the framed-set partition of a box, and
//!   sum-preserving compression of product sets.
//! - [`bounds`]: the bound functional, the moment / sub-Gaussian
//!   inequalities, closed-form rates over cubes, and band-width optimization.
//! - [`fields`]: synthetic Rademacher-driven fields with certified decay
//!   envelopes, samplable at scale and exactly enumerable when small.
//! - [`oracle`]: exact conditional expectations on enumerated outcome
//!   spaces; weak-dependence coefficients, the martingale decomposition and
//!   its difference property, compression checks.
//! - [`mc`]: reproducible seeded Monte Carlo estimation of sum norms,
//!   sub-Gaussian diagnostics, and rate regressions.
//! - [`verify`]: named pass/fail suites over all of the above.
//! - [`cli`]: the `fieldconc` command-line surface (CSV reports).
//!
//! See the crate examples for runnable walkthroughs of each capability.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod fields;
pub mod frames;
pub mod lattice;
pub mod mc;
pub mod oracle;
pub mod verify;

pub use error::{Error, Result};
