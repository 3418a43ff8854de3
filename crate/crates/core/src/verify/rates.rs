//! Rate fitting and the rate report.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{invalid, Result};

/// A fitted rate, or `undefined` when an error vanished or was not finite.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Rate {
    Value(f64),
    Undefined,
}

impl Rate {
    pub fn value(self) -> Option<f64> {
        match self {
            Rate::Value(v) => Some(v),
            Rate::Undefined => None,
        }
    }
}

impl Serialize for Rate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Rate::Value(v) => s.serialize_f64(*v),
            Rate::Undefined => s.serialize_str("undefined"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateFit {
    pub rate: Rate,
    /// Root-mean-square residual of the least-squares line in `log₂`.
    pub residual: Option<f64>,
}

/// Least-squares slope of `log₂ err` against `log₂ ε`. Needs at least three
/// points.
pub fn fit_rate(eps: &[f64], err: &[f64]) -> Result<RateFit> {
    if eps.len() != err.len() {
        return Err(invalid("errors", "one error per eps value is required"));
    }
    if eps.len() < 3 {
        return Err(invalid(
            "eps",
            format!("a rate needs at least 3 eps values (got {})", eps.len()),
        ));
    }
    if err.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Ok(RateFit {
            rate: Rate::Undefined,
            residual: None,
        });
    }
    let x: Vec<f64> = eps.iter().map(|e| e.log2()).collect();
    let y: Vec<f64> = err.iter().map(|e| e.log2()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(invalid("eps", "values must be distinct"));
    }
    let slope = sxy / sxx;
    let ss: f64 = x
        .iter()
        .zip(&y)
        .map(|(a, b)| {
            let r = b - (my + slope * (a - mx));
            r * r
        })
        .sum();
    Ok(RateFit {
        rate: Rate::Value(slope),
        residual: Some((ss / n).sqrt()),
    })
}

/// `true` when the sequence strictly decreases, or is identically zero.
pub fn decreasing(values: &[f64]) -> bool {
    values.iter().all(|v| *v == 0.0) || values.windows(2).all(|w| w[1] < w[0])
}

/// Errors per ε and per norm, with fitted rates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateReport {
    pub study: String,
    pub eps: Vec<f64>,
    /// Step actually used for each ε.
    pub dt: Vec<f64>,
    pub steps: Vec<usize>,
    /// Norm name → error per ε.
    pub errors: BTreeMap<String, Vec<f64>>,
    pub fits: BTreeMap<String, RateFit>,
    /// `"<norm>_rate"` → fitted rate, flattened into the top level.
    #[serde(flatten)]
    pub rates: BTreeMap<String, Rate>,
    /// Norm name → whether the errors decrease along the ε list.
    pub monotone: BTreeMap<String, bool>,
    /// Extra per-ε values that are reported but not fitted.
    pub extra: BTreeMap<String, Vec<f64>>,
}

impl RateReport {
    pub fn new(study: impl Into<String>, eps: Vec<f64>) -> Self {
        Self {
            study: study.into(),
            eps,
            dt: Vec::new(),
            steps: Vec::new(),
            errors: BTreeMap::new(),
            fits: BTreeMap::new(),
            rates: BTreeMap::new(),
            monotone: BTreeMap::new(),
            extra: BTreeMap::new(),
        }
    }

    /// Record a fitted norm.
    pub fn add(&mut self, name: &str, values: Vec<f64>) -> Result<()> {
        let fit = fit_rate(&self.eps, &values)?;
        self.rates.insert(format!("{name}_rate"), fit.rate);
        self.fits.insert(name.to_string(), fit);
        self.monotone.insert(name.to_string(), decreasing(&values));
        self.errors.insert(name.to_string(), values);
        Ok(())
    }

    pub fn rate(&self, name: &str) -> Option<f64> {
        self.fits.get(name).and_then(|f| f.rate.value())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// One row per ε, then `rate` and `residual` rows.
    pub fn to_csv(&self) -> String {
        let names: Vec<&String> = self.errors.keys().collect();
        let mut out = String::from("eps");
        for n in &names {
            let _ = write!(out, ",{n}");
        }
        out.push('\n');
        for (i, e) in self.eps.iter().enumerate() {
            let _ = write!(out, "{e:e}");
            for n in &names {
                let _ = write!(out, ",{:e}", self.errors[*n][i]);
            }
            out.push('\n');
        }
        let fmt = |v: Option<f64>| v.map_or_else(|| "undefined".to_string(), |x| format!("{x:e}"));
        out.push_str("rate");
        for n in &names {
            let _ = write!(out, ",{}", fmt(self.fits[*n].rate.value()));
        }
        out.push_str("\nresidual");
        for n in &names {
            let _ = write!(out, ",{}", fmt(self.fits[*n].residual));
        }
        out.push('\n');
        out
    }
}
