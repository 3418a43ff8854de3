//! Scaled Dirac–Maxwell system in Coulomb gauge:
//!
//! ```text
//! i∂ₜψ = −iε⁻¹α^j∂_jψ + ε⁻²γ⁰ψ − A_jα^jψ − A₀ψ
//! ΔA₀ = ρ,   ε²∂ₜ²A − ΔA = ε𝒫J
//! ```
//!
//! with `ρ = ⟨ψ,ψ⟩` and `J_k = ε⁻¹⟨α^kψ,ψ⟩`.

mod fields;
mod kernels;
mod picard;
mod step;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fourier::{self, check_same, Lattice, ScalarField, SpinorField, VectorField};
use crate::spinor::check_eps;

pub use fields::{
    build_u, build_u_from_trajectory, compute_eb, dirac_time_derivative, electric_potential,
    projected_current, remainder_r, UTrajectory,
};
pub use kernels::{free_dirac_step, potential_kick, wave_step};
pub use picard::{picard_solve, PicardResult};
pub use step::{
    dm_strang_step, simulate_dm, simulate_dm_with, step_count, DiagnosticsRow, DmTrajectory,
    SimOptions,
};

/// Largest spectral divergence accepted for a magnetic potential.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-8;

/// State `(t, ψ, A, ε∂ₜA)`; `A₀` is derived from `ψ` whenever needed.
#[derive(Clone, Debug)]
pub struct DmState {
    pub t: f64,
    pub eps: f64,
    pub psi: SpinorField,
    pub a: VectorField,
    pub eps_dt_a: VectorField,
}

impl DmState {
    pub fn new(psi: SpinorField, a: VectorField, eps_dt_a: VectorField, eps: f64) -> Result<Self> {
        check_eps(eps)?;
        check_same(psi.lattice(), a.lattice())?;
        check_same(psi.lattice(), eps_dt_a.lattice())?;
        for f in [&a, &eps_dt_a] {
            let d = fourier::divergence_defect(f);
            if d > DIVERGENCE_TOLERANCE {
                return Err(Error::NotDivergenceFree(d));
            }
        }
        Ok(Self {
            t: 0.0,
            eps,
            psi,
            a,
            eps_dt_a,
        })
    }

    /// Spinor data with vanishing magnetic potential.
    pub fn from_spinor(psi: SpinorField, eps: f64) -> Result<Self> {
        let l = psi.lattice().clone();
        Self::new(psi, VectorField::zeros(&l), VectorField::zeros(&l), eps)
    }

    pub fn lattice(&self) -> &Lattice {
        self.psi.lattice()
    }

    /// `A₀ = Δ⁻¹ρ` (mean of `ρ` removed).
    pub fn a0(&self, dealias: bool) -> ScalarField {
        electric_potential(&self.psi, dealias)
    }
}

/// Per-step settings. `dt` may be negative (backward steps).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepConfig {
    pub dt: f64,
    /// Restrict densities to the 2/3-rule band before they feed `A₀` and `A`.
    #[serde(default)]
    pub dealias: bool,
    /// Upper bound on `|dt|` needed to resolve the potentials.
    #[serde(default)]
    pub dt_max: Option<f64>,
}

impl StepConfig {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            dealias: false,
            dt_max: None,
        }
    }

    pub fn with_dealias(mut self, on: bool) -> Self {
        self.dealias = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.dt.is_finite() || self.dt == 0.0 {
            return Err(invalid("dt", format!("must be finite and nonzero (got {})", self.dt)));
        }
        if let Some(m) = self.dt_max {
            if self.dt.abs() > m {
                return Err(invalid("dt", format!("|dt| = {} exceeds dt_max = {m}", self.dt.abs())));
            }
        }
        Ok(())
    }
}
