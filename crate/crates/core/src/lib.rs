//! Multi-objective district-energy optimization with NSGA-II, augmented by a
//! conditional GAN trained on the GA's solution archive.
//!
//! Modules build on each other bottom-up:
//!
//! * [`district`]: decision encoding, constraints and the reference model;
//! * [`moo`]: NSGA-II and the solution archive;
//! * [`nn`]: dense networks, batch normalization, dropout, Adam and BCE;
//! * [`cgan`]: normalization, adversarial training, label grids, generation;
//! * [`metrics`]: scaling, hypervolume and improvement percentages;
//! * [`harness`]: experiment orchestration and artifact output.

pub mod cgan;
pub mod district;
pub mod harness;
pub mod metrics;
pub mod moo;
pub mod nn;
