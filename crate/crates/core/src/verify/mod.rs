//! Verification tooling: initial data, identities, studies and rate fits.

pub mod config;
pub mod data;
pub mod null;
pub mod pairing;
pub mod presets;
pub mod probe;
pub mod random;
pub mod rates;
pub mod squared;
pub mod studies;
pub mod suites;
