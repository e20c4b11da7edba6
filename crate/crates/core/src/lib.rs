//! Exact-arithmetic laboratory for Vinogradov-type mean value estimates:
//! closed-form exponents, brute-force and meet-in-the-middle solution
//! counting, congruence-class censuses, the efficient-congruencing
//! iteration replay, and Waring-count cross-checks.

pub mod congruence;
pub mod counting;
pub mod error;
pub mod exponents;
pub mod iteration;
pub mod params;
pub mod rational;
pub mod verify;
pub mod waring;

pub use error::{Error, Result};
pub use params::VinogradovParams;
pub use rational::Rat;
