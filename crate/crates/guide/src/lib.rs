//! The `twoion` book, compiled so that `cargo test --doc` runs every listing.
//!
//! Each chapter becomes an empty module so that a failing doctest names the
//! chapter it came from.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/couplings.md")]
pub mod couplings {}
#[doc = include_str!("../../../book/src/dynamics.md")]
pub mod dynamics {}
#[doc = include_str!("../../../book/src/oracle.md")]
pub mod oracle {}
#[doc = include_str!("../../../book/src/gates.md")]
pub mod gates {}
#[doc = include_str!("../../../book/src/entanglement.md")]
pub mod entanglement {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
