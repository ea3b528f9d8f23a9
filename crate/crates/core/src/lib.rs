//! Syndrome-based belief-propagation decoding of sparse quantum stabilizer
//! codes over the depolarizing channel.
//!
//! The crate provides GF(4) arithmetic, stabilizer codes and their
//! constructions, the standard GF(4) sum-product decoder, two feedback
//! strategies wrapped around it (random prior perturbation and the
//! frustrated-check reset), and a Monte-Carlo harness reporting block error
//! rates and average iteration counts.

pub mod bp;
pub mod channel;
pub mod feedback;
pub mod gf4;
pub mod sim;
pub mod stabilizer;
