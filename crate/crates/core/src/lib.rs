//! Intersigned Gauss codes for generic immersed curves on closed surfaces.
//!
//! The crate parses the code notations ([`codec`]), computes canonical forms
//! for every isomorphism group ([`isomorphism`]), realizes a code as a
//! cellular embedding and traces its faces ([`topology`]), decides
//! orientability and two-colorability by mod-2 cohomology ([`gf2`],
//! [`classify`]), and rewrites link codes under Reidemeister moves
//! ([`moves`]). Brute-force reference implementations live in [`oracle`].

pub mod classify;
pub mod cli;
pub mod codec;
pub mod error;
pub mod gf2;
pub mod isomorphism;
pub mod moves;
pub mod oracle;
pub mod topology;

pub use codec::{AnyCode, GaussWord, IntersignedGaussCode, IntersignedLinkCode, Sign, SignedGaussCode};
pub use error::{Error, Result};
