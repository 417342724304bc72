//! Computable objects for weighted Banach spaces of entire functions
//! `H∞_v(ℂ) = { f entire : sup_z v(|z|) |f(z)| < ∞ }`.
//!
//! The crate provides
//!
//! * [`weights`]: radial weights, peak radii `r_m` and monomial norms,
//! * [`lusky`]: the block ratios `A(m, n)`, `B(m, n)` and Lusky block sequences,
//! * [`series`]: coefficient sequences with solid-core, solid-hull and sup-norm
//!   evaluation,
//! * [`vallee_poussin`]: de la Vallée-Poussin type ramp operators,
//! * [`multipliers`]: `ℓ^J(p, q)` norms and multiplier profiles into `ℓ_p`,
//! * [`verify`]: numeric certification sweeps of the supporting inequalities,
//! * [`cli`]: the `solidhull` command-line front end.
//!
//! Every norm is returned as a natural logarithm, with `-inf` encoding zero.

pub mod certificate;
pub mod cli;
pub mod error;
pub mod json;
pub mod logspace;
pub mod lusky;
pub mod multipliers;
pub mod optimize;
pub mod series;
pub mod vallee_poussin;
pub mod verify;
pub mod weights;

pub use certificate::CertificateReport;
pub use error::{Error, Result};
pub use lusky::{closed_form_exp_weight, construct_sequence, LuskyConfig, LuskySequence};
pub use series::{BlockNormProfile, CoefficientSequence, Coefficients, LogPolar};
pub use weights::{monomial_norm_log, r_peak, PeakRadius, Weight};
