//! Exact arithmetic for cyclotomic Gauss sums, Stickelberger ideals and
//! finite-level Iwasawa data, with a verification harness.

pub mod arith;
pub mod charsum;
pub mod config;
pub mod cyclotomic;
pub mod error;
pub mod fq;
pub mod group_ring;
pub mod iwasawa;
pub mod lattice;
pub mod padic;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
