//! Permutations of the natural numbers that steer, disrupt or certify the
//! convergence of conditionally convergent series.
//!
//! * [`series_core`] — term sources, lazy permutations, trajectories, verdicts,
//!   and the back-and-forth coding of permutations.
//! * [`rearrangers`] — Riemann's greedy rearrangements and order-preserving shuffles.
//! * [`steinitz`] — polygonal confinement of vectors and a steering rearranger
//!   for vector series.
//! * [`adversaries`] — padding with zeros, escape functions, flips, jumbling, mixing.
//! * [`stochastic`] — random-sign Monte Carlo.
//! * [`adfamily`] — almost-disjoint sign sets and their signed-block series.

pub mod adfamily;
pub mod adversaries;
pub mod rearrangers;
pub mod series_core;
pub mod steinitz;
pub mod stochastic;

pub use series_core::*;
