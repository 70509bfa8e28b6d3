#![no_std]
extern crate alloc;

pub mod articulator;
pub mod error;
pub mod eval;
pub mod geom;
pub mod ingest;
pub mod lip_geometry;
pub mod lipprint;
pub mod pipeline;
pub mod raster;
pub mod texture;
pub mod verifier;

pub use error::{Error, Result};
