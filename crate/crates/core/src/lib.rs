//! Relay placement for connected multi-robot teams.

pub mod channel;
pub mod cnn_runtime;
pub mod expert;
pub mod geometry;
pub mod imaging;
pub mod netgraph;
pub mod pipeline;
