//! Oracles shared by the integration test targets.

#![allow(dead_code)]

pub mod coupling;
pub mod dense;
pub mod gradcheck;
