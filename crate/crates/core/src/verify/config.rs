//! Experiment configuration shared by the convergence studies.

use serde::{Deserialize, Serialize};

use super::data::{DataFamily, DataSpec};
use super::pairing::Bump;
use crate::error::{invalid, Result};
use crate::fourier::Lattice;

/// Time step, fixed or scaled with ε as `base·ε^power`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DtSchedule {
    Fixed(f64),
    Scaled { base: f64, power: f64 },
}

impl DtSchedule {
    pub fn at(&self, eps: f64) -> f64 {
        match *self {
            DtSchedule::Fixed(dt) => dt,
            DtSchedule::Scaled { base, power } => base * eps.powf(power),
        }
    }
}

/// Which theorem's hypotheses the data must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Data converging in `H¹`; errors only have to decrease.
    Thm2,
    /// `ψ₀ = (v₀⁺, 0) + O(ε)`; first-order spinor convergence.
    Thm3,
    /// `Π₋ψ₀ = O(ε²)`; second-order Pauli approximation.
    Thm4,
}

impl Regime {
    fn admits(self, family: DataFamily) -> bool {
        use DataFamily::*;
        match self {
            Regime::Thm2 => true,
            Regime::Thm3 => matches!(family, Zero | Stationary | PositiveEnergy | Counterexample | Constraint),
            Regime::Thm4 => matches!(family, Zero | Stationary | PositiveEnergy | Constraint),
        }
    }
}

fn default_period() -> f64 {
    2.0 * std::f64::consts::PI
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    #[serde(default = "default_period")]
    pub period: f64,
    /// Strictly decreasing list of ε.
    pub eps: Vec<f64>,
    pub t_final: f64,
    pub dt: DtSchedule,
    pub regime: Regime,
    pub data: DataSpec,
    /// Errors are taken as sup over every `sample_every`-th step.
    #[serde(default = "one")]
    pub sample_every: usize,
    #[serde(default)]
    pub dealias: bool,
    /// Test function for the weak pairing of the current.
    #[serde(default)]
    pub bump: Option<Bump>,
}

impl ExperimentConfig {
    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::new(self.n, self.period).map_err(|_| {
            invalid("n", format!("grid size must be even and >= 4 (got {})", self.n))
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.lattice()?;
        if !(self.period > 0.0 && self.period.is_finite()) {
            return Err(invalid("period", "must be positive"));
        }
        if self.eps.is_empty() {
            return Err(invalid("eps", "list is empty"));
        }
        if self.eps.iter().any(|e| !(*e > 0.0 && *e <= 1.0)) {
            return Err(invalid("eps", "values must lie in (0, 1]"));
        }
        if self.eps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(invalid("eps", "list must be strictly decreasing"));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(invalid("t_final", "must be positive"));
        }
        for &e in &self.eps {
            let dt = self.dt.at(e);
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(invalid("dt", format!("must be positive (got {dt} at eps = {e})")));
            }
            if dt > self.t_final {
                return Err(invalid("dt", format!("exceeds t_final at eps = {e}")));
            }
        }
        if self.sample_every == 0 {
            return Err(invalid("sample_every", "must be at least 1"));
        }
        self.data.validate()?;
        if !self.regime.admits(self.data.family) {
            return Err(invalid(
                "data.family",
                format!("{:?} data violate the hypotheses of regime {:?}", self.data.family, self.regime),
            ));
        }
        if let Some(b) = &self.bump {
            b.validate(self.t_final)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        ExperimentConfig {
            n: 8,
            period: default_period(),
            eps: vec![0.4, 0.2, 0.1],
            t_final: 0.1,
            dt: DtSchedule::Fixed(0.01),
            regime: Regime::Thm3,
            data: DataSpec::new(DataFamily::PositiveEnergy),
            sample_every: 1,
            dealias: false,
            bump: None,
        }
    }

    #[test]
    fn validation_names_the_field() {
        assert!(base().validate().is_ok());
        let mut c = base();
        c.n = 9;
        assert!(c.validate().unwrap_err().to_string().contains("`n`"));
        let mut c = base();
        c.eps = vec![0.1, 0.2, 0.4];
        assert!(c.validate().unwrap_err().to_string().contains("`eps`"));
        let mut c = base();
        c.regime = Regime::Thm4;
        c.data = DataSpec::new(DataFamily::Counterexample);
        assert!(c.validate().unwrap_err().to_string().contains("data.family"));
    }

    #[test]
    fn scaled_schedule() {
        let s = DtSchedule::Scaled { base: 0.1, power: 2.0 };
        assert!((s.at(0.5) - 0.025).abs() < 1e-15);
        let parsed: DtSchedule = serde_json::from_str("0.01").unwrap();
        assert_eq!(parsed, DtSchedule::Fixed(0.01));
    }
}
