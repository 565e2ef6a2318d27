//! Exact computations with Cameron-Liebler sets of `k`-spaces in `PG(n,q)`.
//!
//! Layers, bottom up: [`exactmath`] (closed-form counts and bounds), [`gfq`]
//! (finite fields), [`projspace`] (enumerated geometries), [`matrix`] and
//! [`scheme`] (exact linear algebra on the Grassmann scheme), [`clset`]
//! (families and the battery of equivalent definitions), [`search`]
//! (exhaustive classification), and [`format`], [`cache`], [`cli`] for files
//! and the command line.

pub mod cache;
pub mod cli;
pub mod clset;
pub mod error;
pub mod exactmath;
pub mod format;
pub mod gfq;
pub mod matrix;
pub mod projspace;
pub mod scheme;
pub mod search;

pub use error::{Error, Result};
pub use exactmath::SchemeParams;
