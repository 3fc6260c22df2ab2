//! Percolation laboratory.
//!
//! A library (plus `percolab` CLI) for lattice percolation models at desk
//! scale: Bernoulli bond/site percolation, the FK random-cluster model and
//! its Potts coupling, the loop O(n) model on hexagonal domains, exact
//! parafermionic observables, and sharp-threshold diagnostics. Every
//! stochastic estimator is backed by an exact small-instance enumeration
//! oracle, and every exactly known constant is reproduced by the `verify`
//! suite.
//!
//! Entry points by topic:
//! - [`lattice`]: finite graphs (rectangles, boxes, hexagonal domains, duals)
//! - [`percolation`]: sampling, union-find clusters, crossing/one-arm
//!   estimators and the enumeration oracle
//! - [`fk`]: random-cluster weights, heat-bath sampling, duality algebra
//! - [`potts`]: the cluster/color coupling between FK and Potts
//! - [`loop_model`]: even subgraphs, plaquette dynamics, face bijection
//! - [`parafermion`]: winding, contour integrals, self-avoiding walk counts
//! - [`sharpness`]: influence sums, exploration revealment, S-curves,
//!   mixing and dynamical percolation
//! - [`verify`]: the acceptance checklist run by `percolab verify`

pub mod cluster;
pub mod config;
pub mod error;
pub mod fk;
pub mod lattice;
pub mod loop_model;
pub mod parafermion;
pub mod percolation;
pub mod potts;
pub mod rng;
pub mod sharpness;
pub mod stats;
pub mod unionfind;
pub mod verify;

pub use error::{Error, Result};
