//! Time-dependent coefficient profiles and the system specification.
//!
//! A [`SystemSpec`] holds the pair (nu(t), h2(t)) defining the
//! time-dependent-mass Hamiltonian `H = (1/2) e^{-2 nu} P^2 + h2 e^{2 nu} X^2`
//! together with the time origin. The drift coefficient `h(t) = -2 nu_dot(t)`
//! and the oscillator stiffness `g2(t') = h2(t(t')) e^{4 nu(t(t'))}` are
//! derived quantities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{cubic_hermite, cubic_hermite_deriv, locate_panel, pchip_slopes};
use crate::timemap::TimeMap;

/// One scalar real function of time, with an analytic derivative.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileFamily {
    Constant {
        value: f64,
    },
    Linear {
        slope: f64,
        intercept: f64,
    },
    /// `base + amplitude * sin(omega * t + phase)`.
    SinusoidalModulation {
        base: f64,
        amplitude: f64,
        omega: f64,
        phase: f64,
    },
    /// Coefficients in ascending powers of `t`.
    Polynomial {
        coeffs: Vec<f64>,
    },
    /// Monotone cubic interpolation of sampled data.
    Tabulated {
        times: Vec<f64>,
        values: Vec<f64>,
        slopes: Vec<f64>,
    },
}

/// A real function of time restricted to a closed domain.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeProfile {
    family: ProfileFamily,
    domain: (f64, f64),
}

impl TimeProfile {
    pub fn constant(value: f64) -> TimeProfile {
        TimeProfile {
            family: ProfileFamily::Constant { value },
            domain: (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn linear(slope: f64, intercept: f64) -> TimeProfile {
        TimeProfile {
            family: ProfileFamily::Linear { slope, intercept },
            domain: (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn sinusoidal(base: f64, amplitude: f64, omega: f64, phase: f64) -> TimeProfile {
        TimeProfile {
            family: ProfileFamily::SinusoidalModulation {
                base,
                amplitude,
                omega,
                phase,
            },
            domain: (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn polynomial(coeffs: Vec<f64>) -> TimeProfile {
        TimeProfile {
            family: ProfileFamily::Polynomial { coeffs },
            domain: (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Build a tabulated profile; sample times must be strictly increasing.
    pub fn tabulated(times: Vec<f64>, values: Vec<f64>) -> Result<TimeProfile> {
        if times.len() != values.len() {
            return Err(Error::Invalid {
                what: "tabulated profile",
                why: format!(
                    "times ({}) and values ({}) differ in length",
                    times.len(),
                    values.len()
                ),
            });
        }
        if times.len() < 2 {
            return Err(Error::Invalid {
                what: "tabulated profile",
                why: "need at least two samples".into(),
            });
        }
        if !times.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::Invalid {
                what: "tabulated profile",
                why: "sample times must be strictly increasing".into(),
            });
        }
        if times.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Invalid {
                what: "tabulated profile",
                why: "non-finite sample".into(),
            });
        }
        let slopes = pchip_slopes(&times, &values);
        let domain = (times[0], *times.last().unwrap());
        Ok(TimeProfile {
            family: ProfileFamily::Tabulated {
                times,
                values,
                slopes,
            },
            domain,
        })
    }

    /// Restrict the profile to a closed interval.
    pub fn with_domain(mut self, lo: f64, hi: f64) -> Result<TimeProfile> {
        if !(hi > lo) {
            return Err(Error::Invalid {
                what: "profile domain",
                why: format!("need lo < hi, got [{lo}, {hi}]"),
            });
        }
        self.domain = (lo, hi);
        Ok(self)
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    fn check_domain(&self, t: f64, what: &'static str) -> Result<f64> {
        let (lo, hi) = self.domain;
        let tol = if lo.is_finite() && hi.is_finite() {
            1e-9 * (hi - lo).max(1.0)
        } else {
            0.0
        };
        if t < lo - tol || t > hi + tol || !t.is_finite() {
            return Err(Error::OutOfDomain { what, t, lo, hi });
        }
        Ok(t.clamp(lo, hi))
    }

    /// Value at `t`; errors outside the domain.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let t = self.check_domain(t, "profile")?;
        let v = match &self.family {
            ProfileFamily::Constant { value } => *value,
            ProfileFamily::Linear { slope, intercept } => slope * t + intercept,
            ProfileFamily::SinusoidalModulation {
                base,
                amplitude,
                omega,
                phase,
            } => base + amplitude * (omega * t + phase).sin(),
            ProfileFamily::Polynomial { coeffs } => {
                coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
            }
            ProfileFamily::Tabulated {
                times,
                values,
                slopes,
            } => {
                let i = locate_panel(times, t);
                cubic_hermite(
                    t,
                    times[i],
                    times[i + 1],
                    values[i],
                    values[i + 1],
                    slopes[i],
                    slopes[i + 1],
                )
            }
        };
        if !v.is_finite() {
            return Err(Error::Invalid {
                what: "profile value",
                why: format!("non-finite value at t = {t}"),
            });
        }
        Ok(v)
    }

    /// Derivative at `t` (analytic per family; piecewise-cubic for tabulated data).
    pub fn deriv(&self, t: f64) -> Result<f64> {
        let t = self.check_domain(t, "profile derivative")?;
        Ok(match &self.family {
            ProfileFamily::Constant { .. } => 0.0,
            ProfileFamily::Linear { slope, .. } => *slope,
            ProfileFamily::SinusoidalModulation {
                amplitude,
                omega,
                phase,
                ..
            } => amplitude * omega * (omega * t + phase).cos(),
            ProfileFamily::Polynomial { coeffs } => {
                let mut acc = 0.0;
                for (k, c) in coeffs.iter().enumerate().skip(1).rev() {
                    acc = acc * t + k as f64 * c;
                }
                acc
            }
            ProfileFamily::Tabulated {
                times,
                values,
                slopes,
            } => {
                let i = locate_panel(times, t);
                cubic_hermite_deriv(
                    t,
                    times[i],
                    times[i + 1],
                    values[i],
                    values[i + 1],
                    slopes[i],
                    slopes[i + 1],
                )
            }
        })
    }
}

/// Serialized form: `{"family": "...", "params": {...}, "domain": [a, b]}`.
#[derive(Debug, Serialize, Deserialize)]
struct ProfileDoc {
    family: String,
    #[serde(default)]
    params: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    domain: Option<[f64; 2]>,
}

fn param_f64(params: &serde_json::Value, key: &str) -> Result<f64> {
    params
        .get(key)
        .and_then(|v| v.as_f64())
        .ok_or_else(|| Error::Parse(format!("missing or non-numeric parameter `{key}`")))
}

fn param_f64_or(params: &serde_json::Value, key: &str, default: f64) -> Result<f64> {
    match params.get(key) {
        None => Ok(default),
        Some(v) => v
            .as_f64()
            .ok_or_else(|| Error::Parse(format!("non-numeric parameter `{key}`"))),
    }
}

fn param_vec(params: &serde_json::Value, key: &str) -> Result<Vec<f64>> {
    let arr = params
        .get(key)
        .and_then(|v| v.as_array())
        .ok_or_else(|| Error::Parse(format!("missing array parameter `{key}`")))?;
    arr.iter()
        .map(|v| {
            v.as_f64()
                .ok_or_else(|| Error::Parse(format!("non-numeric entry in `{key}`")))
        })
        .collect()
}

impl TimeProfile {
    /// Parse from the JSON document format described in the README.
    pub fn from_json_value(value: &serde_json::Value) -> Result<TimeProfile> {
        let doc: ProfileDoc = serde_json::from_value(value.clone())
            .map_err(|e| Error::Parse(format!("profile document: {e}")))?;
        let profile = match doc.family.as_str() {
            "constant" => TimeProfile::constant(param_f64(&doc.params, "value")?),
            "linear" => TimeProfile::linear(
                param_f64(&doc.params, "slope")?,
                param_f64_or(&doc.params, "intercept", 0.0)?,
            ),
            "sinusoidal-modulation" => TimeProfile::sinusoidal(
                param_f64_or(&doc.params, "base", 0.0)?,
                param_f64(&doc.params, "amplitude")?,
                param_f64(&doc.params, "omega")?,
                param_f64_or(&doc.params, "phase", 0.0)?,
            ),
            "polynomial" => TimeProfile::polynomial(param_vec(&doc.params, "coeffs")?),
            "tabulated" => TimeProfile::tabulated(
                param_vec(&doc.params, "times")?,
                param_vec(&doc.params, "values")?,
            )?,
            other => {
                return Err(Error::Parse(format!("unknown profile family `{other}`")));
            }
        };
        match doc.domain {
            Some([lo, hi]) => profile.with_domain(lo, hi),
            None => Ok(profile),
        }
    }

    pub fn from_json(text: &str) -> Result<TimeProfile> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("profile JSON: {e}")))?;
        TimeProfile::from_json_value(&value)
    }

    /// Serialize into the JSON document format.
    pub fn to_json_value(&self) -> serde_json::Value {
        let (family, params) = match &self.family {
            ProfileFamily::Constant { value } => ("constant", serde_json::json!({"value": value})),
            ProfileFamily::Linear { slope, intercept } => (
                "linear",
                serde_json::json!({"slope": slope, "intercept": intercept}),
            ),
            ProfileFamily::SinusoidalModulation {
                base,
                amplitude,
                omega,
                phase,
            } => (
                "sinusoidal-modulation",
                serde_json::json!({"base": base, "amplitude": amplitude, "omega": omega, "phase": phase}),
            ),
            ProfileFamily::Polynomial { coeffs } => {
                ("polynomial", serde_json::json!({"coeffs": coeffs}))
            }
            ProfileFamily::Tabulated { times, values, .. } => (
                "tabulated",
                serde_json::json!({"times": times, "values": values}),
            ),
        };
        let mut doc = serde_json::json!({"family": family, "params": params});
        let (lo, hi) = self.domain;
        if lo.is_finite() && hi.is_finite() {
            doc["domain"] = serde_json::json!([lo, hi]);
        }
        doc
    }

    /// Read a tabulated profile from two-column CSV text (`time,value` rows).
    pub fn tabulated_from_csv(text: &str) -> Result<TimeProfile> {
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split(',');
            let parse = |s: Option<&str>| -> Result<f64> {
                s.map(str::trim)
                    .filter(|s| !s.is_empty())
                    .ok_or_else(|| {
                        Error::Parse(format!("line {}: expected two columns", lineno + 1))
                    })?
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            };
            let t = parse(fields.next());
            let v = parse(fields.next());
            match (t, v) {
                (Ok(t), Ok(v)) => {
                    times.push(t);
                    values.push(v);
                }
                // Allow a single header row.
                (Err(_), _) | (_, Err(_)) if lineno == 0 => continue,
                (Err(e), _) | (_, Err(e)) => return Err(e),
            }
        }
        TimeProfile::tabulated(times, values)
    }
}

/// The pair (nu(t), h2(t)) plus time origin; fully determines all three frames.
#[derive(Debug, Clone)]
pub struct SystemSpec {
    pub nu: TimeProfile,
    pub h2: TimeProfile,
    pub t0: f64,
}

impl SystemSpec {
    pub fn new(nu: TimeProfile, h2: TimeProfile, t0: f64) -> Result<SystemSpec> {
        let spec = SystemSpec { nu, h2, t0 };
        let (lo, hi) = spec.domain();
        if !(lo <= t0 && t0 <= hi) {
            return Err(Error::Invalid {
                what: "system spec",
                why: format!("t0 = {t0} outside the common profile domain [{lo}, {hi}]"),
            });
        }
        Ok(spec)
    }

    /// Intersection of the two profile domains.
    pub fn domain(&self) -> (f64, f64) {
        let (a0, a1) = self.nu.domain();
        let (b0, b1) = self.h2.domain();
        (a0.max(b0), a1.min(b1))
    }

    pub fn nu_at(&self, t: f64) -> Result<f64> {
        self.nu.eval(t)
    }

    pub fn nu_dot(&self, t: f64) -> Result<f64> {
        self.nu.deriv(t)
    }

    /// The TQ drift coefficient `h(t) = -2 nu_dot(t)`.
    pub fn h_drift(&self, t: f64) -> Result<f64> {
        Ok(-2.0 * self.nu.deriv(t)?)
    }

    pub fn h2_at(&self, t: f64) -> Result<f64> {
        self.h2.eval(t)
    }

    /// The TO stiffness expressed at the TM time: `h2(t) e^{4 nu(t)}`.
    pub fn g2_at_t(&self, t: f64) -> Result<f64> {
        Ok(self.h2.eval(t)? * (4.0 * self.nu.eval(t)?).exp())
    }

    /// `g2(t') = h2(t(t')) e^{4 nu(t(t'))}` via the inverse time map.
    pub fn g2_of_tprime(&self, map: &TimeMap, tprime: f64) -> Result<f64> {
        let t = map.inverse(tprime)?;
        self.g2_at_t(t)
    }

    /// Parse `{"nu": {...}, "h2": {...}, "t0": ...}`.
    pub fn from_json(text: &str) -> Result<SystemSpec> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("spec JSON: {e}")))?;
        SystemSpec::from_json_value(&value)
    }

    pub fn from_json_value(value: &serde_json::Value) -> Result<SystemSpec> {
        let nu = value
            .get("nu")
            .ok_or_else(|| Error::Parse("spec missing `nu`".into()))?;
        let h2 = value
            .get("h2")
            .ok_or_else(|| Error::Parse("spec missing `h2`".into()))?;
        let t0 = value.get("t0").and_then(|v| v.as_f64()).unwrap_or(0.0);
        SystemSpec::new(
            TimeProfile::from_json_value(nu)?,
            TimeProfile::from_json_value(h2)?,
            t0,
        )
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "nu": self.nu.to_json_value(),
            "h2": self.h2.to_json_value(),
            "t0": self.t0,
        })
    }
}
