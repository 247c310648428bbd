//! Gaussian quadrature and polynomial approximation for ridge functions.
//!
//! A ridge function `f(x) = g(aᵀx)` on the uniform hypercube `[-1,1]^m`
//! integrates like a function of one variable: `∫ f p dx = ∫ g(u) q(u) du`,
//! where `q` is the density of `u = aᵀx`. This crate
//!
//! 1. discretizes `q` by repeated convolution of box densities ([`density`]),
//! 2. builds orthonormal polynomials for it with Lanczos ([`orthopoly`]),
//! 3. turns the Jacobi matrix into a Gauss rule ([`quadrature`]),
//! 4. maps each node back to a point of the hypercube and fits a
//!    pseudospectral expansion of `g` from `d+1` evaluations of `f` ([`ridge`]),
//! 5. and, for functions that are only nearly ridge functions, estimates the
//!    conditional mean on each node's slice by hit-and-run sampling
//!    ([`nearridge`]).
//!
//! ```
//! use ridgequad::{ridge_pseudospectral, RidgeDirection};
//!
//! let a = RidgeDirection::ones(4)?;
//! let fit = ridge_pseudospectral(|x| a.project(x).powi(2), &a, 2001, 4)?;
//! // E[(aᵀx)²] = 1/3 for a unit direction.
//! assert!((fit.integral() - 1.0 / 3.0).abs() < 1e-5);
//! # Ok::<(), ridgequad::Error>(())
//! ```

// `!(a < b)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod density;
pub mod diagnostics;
pub mod error;
pub mod export;
pub mod models;
pub mod nearridge;
pub mod orthopoly;
pub mod par;
pub mod quadrature;
pub mod ridge;

pub use density::{convolve_density, DensityGrid, RidgeDirection};
pub use error::{Error, Result};
pub use nearridge::{near_ridge_pseudospectral, BudgetAllocation, ConditionalSampleSet, NearRidgeFit};
pub use orthopoly::{lanczos_recurrence, stieltjes_recurrence, DiscreteMeasure, JacobiMatrix};
pub use quadrature::{gauss_rule, QuadratureRule};
pub use ridge::{map_node, ridge_pseudospectral, PseudospectralExpansion, RidgeRule};
