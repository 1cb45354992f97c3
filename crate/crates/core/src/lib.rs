//! Uniformly resolvable decompositions of the complete graph `K_v` into one
//! perfect matching and `s = (v-2)(n+1)/2n` spanning `n`-star factors, for odd
//! `n >= 3` and `v = 2(n+1) mod n(n+1)`.
//!
//! The pipeline runs bottom-up: [`params`] derives the instance constants,
//! [`almost`] builds an almost star factor on `g = v/(n+1)` points, [`lift`]
//! blows it up to a base factor on `v` vertices and develops it cyclically,
//! and [`arrays`] records the differences used so far and turns the rest into
//! the remaining factors. [`verify`] checks any result from scratch and
//! [`oracle`] searches tiny instances exhaustively.

pub mod almost;
pub mod arrays;
pub mod error;
pub mod io;
pub mod lift;
pub mod oracle;
pub mod params;
pub mod verify;

pub use arrays::{construct_urd, Decomposition};
pub use error::{Congruence, Error, Result};
pub use params::{derive_params, enumerate_admissible, Params, Star, Vertex};
pub use verify::{verify_urd, VerificationReport};
