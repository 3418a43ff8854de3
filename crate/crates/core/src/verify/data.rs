//! Initial-data families for the experiments.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dm::DmState;
use crate::error::{invalid, Result};
use crate::fourier::{self, Lattice, SpinorField, TwoSpinorField, VectorField};
use crate::spinor::{self, Branch};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataFamily {
    /// `ψ₀ = 0`.
    Zero,
    /// Spatially constant `ψ₀ = c·(1, 0, 0, 0)`.
    Stationary,
    /// `ψ₀ = (v₊, v₋) + ε w`: converging data with both branches populated.
    Converging,
    /// `ψ₀ = Π₊^ε (v₊, 0)`: no negative-energy part.
    PositiveEnergy,
    /// `ψ₀ = (v₊, εv₊)`: lower component of exact order `ε`.
    Counterexample,
    /// `ψ₀ = (v₊, −½iεσ·∇v₊)`: lower component from the constraint.
    Constraint,
}

/// A smooth periodic bump `amp·Π_j exp(κ(cos(x_j − c_j) − 1))` with
/// `κ = 1/width²`, modulated by `e^{im·x}` and carrying a fixed 2-spinor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Profile {
    pub amplitude: f64,
    pub width: f64,
    /// Center as a fraction of the period on each axis.
    #[serde(default = "Profile::default_center")]
    pub center: [f64; 3],
    /// Integer momentum `m`.
    #[serde(default)]
    pub momentum: [i64; 3],
    /// 2-spinor polarization as `[[re, im], [re, im]]`.
    pub spin: [[f64; 2]; 2],
}

impl Profile {
    fn default_center() -> [f64; 3] {
        [0.5; 3]
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude.is_finite()) {
            return Err(invalid("amplitude", "must be finite"));
        }
        if !(self.width > 0.0) {
            return Err(invalid("width", format!("must be positive (got {})", self.width)));
        }
        Ok(())
    }

    /// Sample on the lattice and keep only the 2/3-rule band.
    pub fn sample(&self, lattice: &Lattice) -> TwoSpinorField {
        let kappa = 1.0 / (self.width * self.width);
        let period = lattice.period();
        let dk = lattice.frequency_spacing();
        let spin = self.spin.map(|[re, im]| Complex64::new(re, im));
        let f = TwoSpinorField::from_fn(lattice, |x| {
            let mut env = self.amplitude;
            let mut phase = 0.0;
            for j in 0..3 {
                let c = self.center[j] * period;
                env *= (kappa * ((dk * (x[j] - c)).cos() - 1.0)).exp();
                phase += dk * self.momentum[j] as f64 * x[j];
            }
            let p = Complex64::from_polar(env, phase);
            [p * spin[0], p * spin[1]]
        });
        f.dealiased()
    }
}

/// Divergence-free magnetic data `amp·(sin x₂, sin x₃, sin x₁)` (in units of
/// the lattice frequency spacing).
pub fn magnetic_profile(lattice: &Lattice, amp: f64) -> VectorField {
    let dk = lattice.frequency_spacing();
    VectorField::from_fn(lattice, |x| {
        [
            amp * (dk * x[1]).sin(),
            amp * (dk * x[2]).sin(),
            amp * (dk * x[0]).sin(),
        ]
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSpec {
    pub family: DataFamily,
    /// Upper profile `v₊` (unused by `zero`; amplitude only for `stationary`).
    #[serde(default = "DataSpec::default_plus")]
    pub plus: Profile,
    /// Lower profile `v₋` for the converging family.
    #[serde(default = "DataSpec::default_minus")]
    pub minus: Profile,
    /// Perturbation `w = (w_up, w_down)` for the converging family.
    #[serde(default = "DataSpec::default_minus")]
    pub perturbation: Profile,
    /// Amplitude of the initial magnetic potential.
    #[serde(default)]
    pub magnetic_amplitude: f64,
}

impl DataSpec {
    fn default_plus() -> Profile {
        Profile {
            amplitude: 1.0,
            width: 0.6,
            center: [0.5; 3],
            momentum: [1, 0, 0],
            spin: [[1.0, 0.0], [0.0, 0.5]],
        }
    }

    fn default_minus() -> Profile {
        Profile {
            amplitude: 0.5,
            width: 0.7,
            center: [0.35, 0.6, 0.5],
            momentum: [0, -1, 0],
            spin: [[0.0, 1.0], [1.0, 0.0]],
        }
    }

    pub fn new(family: DataFamily) -> Self {
        Self {
            family,
            plus: Self::default_plus(),
            minus: Self::default_minus(),
            perturbation: Self::default_minus(),
            magnetic_amplitude: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.plus.validate()?;
        self.minus.validate()?;
        self.perturbation.validate()?;
        if !self.magnetic_amplitude.is_finite() {
            return Err(invalid("magnetic_amplitude", "must be finite"));
        }
        Ok(())
    }

    /// Initial spinor `ψ₀^ε`.
    pub fn spinor(&self, lattice: &Lattice, eps: f64) -> Result<SpinorField> {
        self.validate()?;
        spinor::check_eps(eps)?;
        let v = || self.plus.sample(lattice);
        Ok(match self.family {
            DataFamily::Zero => SpinorField::zeros(lattice),
            DataFamily::Stationary => {
                let c = Complex64::new(self.plus.amplitude, 0.0);
                SpinorField::from_fn(lattice, |_| [c, ZERO, ZERO, ZERO])
            }
            DataFamily::Converging => {
                let vp = v();
                let vm = self.minus.sample(lattice);
                let w = self.perturbation.sample(lattice);
                SpinorField::from_index_fn(lattice, |i| {
                    let (a, b, c) = (vp.at(i), vm.at(i), w.at(i));
                    [
                        a[0] + eps * c[0],
                        a[1] + eps * c[1],
                        b[0] + eps * c[1],
                        b[1] + eps * c[0],
                    ]
                })
            }
            DataFamily::PositiveEnergy => {
                let up = spinor::embed_upper(&v());
                spinor::pi_eps(&up, eps, Branch::Plus)?
            }
            DataFamily::Counterexample => {
                let vp = v();
                vp.map_points(|_, a| [a[0], a[1], eps * a[0], eps * a[1]])
            }
            DataFamily::Constraint => {
                let vp = v();
                // −½iεσ·∇v has symbol ½ε(σ·ξ)v̂
                let low: TwoSpinorField = vp.map_modes(|_, xi, a| {
                    let s = spinor::sigma_dot_mul(xi, a);
                    s.map(|z| 0.5 * eps * z)
                });
                vp.map_points(|i, a| {
                    let b = low.at(i);
                    [a[0], a[1], b[0], b[1]]
                })
            }
        })
    }

    /// Limit data `(v₀⁺, v₀⁻) = lim_{ε→0} (upper Π₊^εψ₀^ε, lower Π₋^εψ₀^ε)`.
    pub fn limit_data(&self, lattice: &Lattice) -> Result<(TwoSpinorField, TwoSpinorField)> {
        self.validate()?;
        let zero = TwoSpinorField::zeros(lattice);
        Ok(match self.family {
            DataFamily::Zero => (zero.clone(), zero),
            DataFamily::Stationary => {
                let c = Complex64::new(self.plus.amplitude, 0.0);
                (TwoSpinorField::from_fn(lattice, |_| [c, ZERO]), zero)
            }
            DataFamily::Converging => (self.plus.sample(lattice), self.minus.sample(lattice)),
            DataFamily::PositiveEnergy | DataFamily::Counterexample | DataFamily::Constraint => {
                (self.plus.sample(lattice), zero)
            }
        })
    }

    pub fn magnetic(&self, lattice: &Lattice) -> VectorField {
        if self.magnetic_amplitude == 0.0 {
            VectorField::zeros(lattice)
        } else {
            magnetic_profile(lattice, self.magnetic_amplitude)
        }
    }

    /// Full initial state; the initial `ε∂ₜA` vanishes.
    pub fn initial_state(&self, lattice: &Lattice, eps: f64) -> Result<DmState> {
        let psi = self.spinor(lattice, eps)?;
        let a = fourier::leray_project(&self.magnetic(lattice));
        DmState::new(psi, a, VectorField::zeros(lattice), eps)
    }
}
