//! IO, file formats, experiment harness and CLI plumbing around
//! `specsub-core`.

pub mod experiments;
pub mod gen;
pub mod meta;
pub mod mtx;
pub mod threads;
pub mod trace;
