//! Numerical laboratory for the random-step-size tug-of-war with noise.
//!
//! The crate is organised around the value function of the game:
//!
//! * [`domain`] discretises the playing field and its exterior boundary strip,
//! * [`dpp`] holds the mean-value operator, its monotone fixed-point solver and
//!   the analytic sanity checks (boundedness, comparison, Lipschitz scans),
//! * [`game`] simulates the game itself, on the lattice for value estimation and
//!   in the continuum for the cancellation coupling,
//! * [`walks`] and [`barriers`] cover the auxiliary cylinder / line walks and the
//!   explicit barrier functions used to control them,
//! * [`reference`] supplies exact reference solutions and convergence studies,
//! * [`runner`] is the configuration-driven front end used by the `twng` binary.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod barriers;
pub mod config;
pub mod domain;
pub mod dpp;
pub mod error;
pub mod game;
pub mod quadrature;
pub mod reference;
pub mod rng;
pub mod runner;
pub mod stats;
pub mod vecmath;
pub mod walks;

pub use domain::{DiscreteDomain, DomainSpec, RegionLabel, Shape};
pub use dpp::{GameParams, SolveReport, ValueField};
pub use error::{Error, Result};
