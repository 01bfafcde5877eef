//! Command-line plumbing around `cdef_core`: Y4M streams, a DCT degrader to
//! produce test reconstructions, PSNR, and the end-to-end pipeline.

pub mod bench;
pub mod degrade;
pub mod metrics;
pub mod pipeline;
pub mod testimage;
pub mod y4m;
