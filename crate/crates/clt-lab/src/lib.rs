//! Exact central-limit-theorem distances and their asymptotic constants.
//!
//! `clt-lab` computes, for a finite-support law `P` with exact rational atom
//! positions, the exact law of the standardized sum of `n` i.i.d. copies of
//! `P` (by discrete self-convolution on the lattice of `P`), and from it the
//! two supremum distances to the standard normal law:
//!
//! * the Kolmogorov distance `sup_x |F_n(x) - Phi(x)|` over half-lines, and
//! * the interval distance `sup_I |P_n(I) - N(I)|` over all intervals, which
//!   equals `sup D - inf D` for the deviation `D = F_n - Phi`.
//!
//! On top of the finite-n machinery the crate evaluates the closed-form
//! `n -> infinity` limits of `sqrt(n)` times both distances (driven by the
//! lattice span `h`, the standard deviation `sigma`, and the third central
//! moment `alpha`), verifies the sawtooth-corrected expansion of `F_n`,
//! checks the separation inequality `eta * beta_s <= 2 * beta_{s+1}` with its
//! exact equality classification, and searches over laws for the extremal
//! normalized limits: `sqrt(2/pi)` for intervals, attained exactly at
//! symmetric two-point laws, and `(sqrt(10)+3)/(6 sqrt(2 pi))` for
//! half-lines, attained at two-point laws with mass spread `sqrt(10)-3`.
//!
//! A smooth (non-lattice) companion family of standardized Erlang sums
//! exercises the `h = 0` branch of the interval limit through the
//! regularized incomplete gamma function.
//!
//! The `clt-lab` binary exposes each piece as a subcommand; see the crate
//! README for the law-file and CSV schemas.

pub mod asymptotics;
pub mod cli;
pub mod convolve;
pub mod deviation;
pub mod extremal;
pub mod gamma;
pub mod law;
pub mod lawfile;
pub mod lawgen;
pub mod normal;
pub mod rational;
pub mod vonmises;

mod sum;

pub use law::{Law, LawError, MomentSet};
pub use rational::Rational;
