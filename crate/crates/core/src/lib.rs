//! Generalized closure relations for deformed orthogonal-polynomial systems.

pub mod opalg;
pub mod families;
pub mod recurrence;
pub mod sampling;
pub mod spectral;
pub mod closure;
pub mod heisenberg;
