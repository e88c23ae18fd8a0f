#![forbid(unsafe_code)]

//! Numerical laboratory for Hardy-space operator models.
//!
//! The crate works with analytic functions on the unit disk represented by
//! truncated Taylor series, and with the operators that act on them: the
//! unilateral shift, analytic Toeplitz operators, compressed shifts on model
//! spaces, and two-component vector models. On top of those it builds probes
//! for the phenomena this library exists to measure: inner-outer structure,
//! quotient representations h/h0, Fredholm index ladders, confluence of
//! vector models, corona-style similarity certificates, and witnesses for
//! non-closable densely defined transformations.
//!
//! Entry points by capability (each has a runnable example under `examples/`):
//!
//! * [`hardy`] - coefficient series, boundary grids, Cauchy kernels.
//! * [`inner_outer`] - Blaschke/singular inner functions, outer functions
//!   from a boundary modulus, polynomial inner-outer splitting, inner gcd.
//! * [`model_ops`] - operator matrices with trust bookkeeping, model bases,
//!   compressions, numeric kernels, Fredholm probes, quotient solving, left
//!   inverses and eigenvector fields.
//! * [`theta`] - two-component inner columns, their model spaces, the
//!   quasiaffinity to the shift, confluence/cyclicity/similarity tests.
//! * [`probes`] - closability scenarios, rational strict-cyclicity
//!   witnesses, biorthogonality and spectral-picture suites.
//! * [`runner`] - config-driven entry point used by the thin `hardylab`
//!   binary; produces versioned JSON/CSV reports.

pub mod error;
pub mod hardy;
pub mod inner_outer;
pub mod linalg;
pub mod model_ops;
pub mod probes;
pub mod rational;
pub mod report;
pub mod roots;
pub mod runner;
pub mod theta;

pub use error::Error;
pub use hardy::{BoundarySamples, CoefSeries, DiskPoint};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
