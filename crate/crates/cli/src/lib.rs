//! Configuration loading, the end-to-end verification pipeline, example
//! generators and SVG plots.

pub mod config;
pub mod examples;
pub mod pipeline;
pub mod plot;

/// Process exit codes.
pub mod exit {
    pub const VERIFIED: i32 = 0;
    pub const VIOLATED: i32 = 1;
    pub const INPUT_ERROR: i32 = 2;
}
