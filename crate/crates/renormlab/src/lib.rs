//! Numerical and combinatorial machinery for the real and complex quadratic
//! family `f_c(z) = z^2 + c`: iteration and periodic orbits, shuffle
//! permutations and signed return-type semigroups, principal nests with
//! cascade/essential-period analysis, superattracting and parabolic parameter
//! solving, the real renormalization operator, and Fatou/Douady coordinates
//! with transit phases.
//!
//! The crate is organized around pure functions of immutable values; every
//! solver exposes its residual tolerances and iteration budgets.

pub mod dynamics;
pub mod experiment;
pub mod fatou;
pub mod nest;
pub mod renorm;
pub mod shuffle;
pub mod solver;

pub use dynamics::{fixed_points, iterate, periodic_orbit, real_intervals, QuadParam};
pub use shuffle::{validate_shuffle, Shuffle};
