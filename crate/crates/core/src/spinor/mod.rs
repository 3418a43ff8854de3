//! Dirac and Pauli matrices, spectral projections and densities.

mod density;
mod matrices;
mod projection;

pub use density::{
    charge_density, current_density, density_expansions, limit_current, pauli_current,
    spin_density, total_charge,
};
pub use matrices::{
    alpha_dot_mul, alpha_mul, dirac_matrices, gamma0_mul, inner, pauli_matrices, sigma_dot_mul,
    sigma_mul, spin_mul, DiracMatrices,
};
pub(crate) use projection::check_eps;
pub use projection::{
    alpha_field, alpha_grad, dirac_symbol_mul, embed_lower, embed_upper, kg_split, lower, modulate,
    pi_eps, pi_eps_mode, pi_zero, projection_remainders, upper, Branch,
};
