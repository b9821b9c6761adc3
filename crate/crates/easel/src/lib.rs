//! eaSEL service and tooling: model providers, the pipelined generation
//! flow, file formats, session storage, and the HTTP API. The algorithms
//! themselves live in `easel-core`, re-exported here as [`core`].

pub use easel_core as core;

pub mod config;
pub mod embedding;
pub mod evaluate;
pub mod formats;
pub mod pipeline;
pub mod provider;
pub mod service;
pub mod sessions;
pub mod store;
