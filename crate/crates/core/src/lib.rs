//! Wasserstein and total-variation bounds between Levy processes.
//!
//! A process is described by its triplet `(b, sigma, nu)` with truncation
//! function `1{|x| <= 1}`. The [`bounds`] module evaluates upper bounds on
//! `W_p` and TV distances between marginals or increment vectors, the
//! [`fourier`] module computes Toscani-Fourier lower bounds, and
//! [`empirical`] certifies bounds against Monte Carlo estimates.

pub mod bounds;
pub mod empirical;
pub mod error;
pub mod fourier;
pub mod measures;
pub mod quad;
pub mod rng;
pub mod special;

pub use bounds::{BoundReport, ConstantPolicy, Direction, Theorem};
pub use error::{Error, Result};
pub use measures::{Atom, DensityMeasure, JumpLaw, LevyMeasure, LevyTriplet, StablePower, TruncationView};
pub use rng::CounterRng;
