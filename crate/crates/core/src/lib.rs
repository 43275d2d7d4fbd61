//! Numerical laboratory for relativistic Lévy-Schrödinger mechanics.
//!
//! The crate is organized around the logarithmic characteristic eta(u) of a
//! symmetric Lévy process (natural units hbar = c = 1):
//!
//! - [`levy`]: characteristic exponents, Bessel-kernel jump densities,
//!   measure validation and the relativistic dispersion relation.
//! - [`propagation`]: spectral (Fourier-multiplier) evolution of wave
//!   functions and transition densities, with a real-space
//!   integro-differential oracle.
//! - [`jumps`]: compound-Poisson sampling of the pure-jump process with
//!   small-jump Gaussian compensation and empirical characteristic
//!   functions.
//! - [`spectrum`]: the cubic cutoff polynomial f(x) with f(1) = 0, its root
//!   structure x - f(x) = 1, and the induced three-mass spectrum.
//! - [`qft`]: momentum-space modified Klein-Gordon/Dirac propagators,
//!   power counting, Wick-rotated self-energy estimation, geometric
//!   resummation and the propagator pole search.
//!
//! Data-parallel inner loops (path sampling, quadrature panels, per-mode
//! maps) run on rayon by default; build with `--no-default-features` for
//! the sequential fallback. Outputs are bit-identical either way.

// `!(x > 0.0)` is the validation idiom throughout: it rejects NaN along
// with zero and negative values, which `x <= 0.0` would not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
mod exec;
pub mod jumps;
pub mod levy;
pub mod propagation;
pub mod qft;
pub mod quad;
pub mod special;
pub mod spectrum;

pub use error::{Error, Result};
