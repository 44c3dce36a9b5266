//! The target Hamiltonian systems, their parameters and the reductions
//! that produce them.

mod hamiltonian;
mod params;
mod reduction;

pub use hamiltonian::{h4, h5, h6, hamiltonian, prefactor, scaled_hamiltonian, time_partial, vector_field};
pub use params::{PainleveParams, PhasePoint, RawReduction, SystemId};
pub use reduction::{
    normalization_form, normalization_weights, params_from_reduction, params_to_reduction, pfaffian_log_derivative, Reduction,
};

#[cfg(test)]
mod tests;
