//! Per-family data, undeformed and deformed eigenpolynomials, and the
//! similarity-transformed Hamiltonians.

pub mod classical;
pub mod deformed;
pub mod energy;
pub mod params;
pub mod plugin;

pub use classical::{classical_h_tilde, classical_poly, classical_poly_symbolic};
pub use deformed::{
    ansatz_h_tilde, build_h_tilde, build_x, builtin_deformed, classical, conjugation_h_tilde, proportionality,
    single_step_rule, DeformedFamily, FamilyError, PRule, Route, Source, VALIDATE_N,
};
pub use energy::{classical_h_step, energy, h_ratio, virtual_energy};
pub use params::{Family, MultiIndex, MultiIndexError, ParamError, ParamSet, VType};
pub use plugin::{build_plugin, encode_plugin, load_family_plugin, parse_plugin, Plugin, PluginFile};
