//! Exact computation in the ring of integral piecewise exponential
//! functions on a rational fan.
//!
//! - [`lattice`]: Smith normal form, saturation, quotient lattices.
//! - [`laurent`]: the group ring `Z[M]` and localization sums.
//! - [`fan`]: cones, fans, stellar subdivision, resolution.
//! - [`pexp`]: piecewise exponential functions, pullback and descent.
//! - [`ktheory`]: localization, pairings with orbit closures, duality.
//! - [`io`] and [`cli`]: JSON documents and the `pexp` command.

pub mod cli;
pub mod corpus;
pub mod fan;
pub mod io;
pub mod ktheory;
pub mod lattice;
pub mod laurent;
pub mod pexp;
