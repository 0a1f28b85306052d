//! Bounded radial symbols `b(r)` on the unit disk.
//!
//! Symbols are evaluated in the variable `t = r²`, which is the variable of
//! the moment integrals. [`RadialFunction`] is the interface the quadrature
//! routines consume; symbols, Berezin profiles and tabulated transforms all
//! implement it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::Linear;

/// A real radial function `f`, seen through `t ↦ f(√t)` on `[0, 1]`.
pub trait RadialFunction: Sync {
    /// `f(√t)` for `t ∈ [0, 1]`.
    fn eval_t(&self, t: f64) -> f64;

    /// Points of `(0, 1)` where `t ↦ f(√t)` or its derivative jumps.
    fn breakpoints_t(&self) -> Vec<f64> {
        Vec::new()
    }

    /// `lim_{t → 1} f(√t)`, when it exists.
    fn boundary_value(&self) -> Option<f64> {
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SymbolKind {
    Constant {
        c: f64,
    },
    /// `b(r) = r^{2s}`.
    Power {
        s: f64,
    },
    /// `b = values[j]` for `breakpoints[j] <= r² < breakpoints[j+1]`.
    Piecewise {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    /// `b(r) = sin(β ln(1/(1 - r²)))`.
    LogOscillation {
        beta: f64,
    },
    /// Linear interpolation of samples taken at radii `r`.
    Tabulated {
        interp: Linear,
    },
}

/// A radial symbol together with its declared sup bound `‖b‖_∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SymbolInput", into = "SymbolWire")]
pub struct RadialSymbol {
    kind: SymbolKind,
    sup_bound: f64,
}

/// Output shape: one object per variant, tagged by `variant`.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub(crate) enum SymbolWire {
    Constant {
        c: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        sup_bound: Option<f64>,
    },
    Power {
        s: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        sup_bound: Option<f64>,
    },
    Piecewise {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        sup_bound: Option<f64>,
    },
    LogOscillation {
        beta: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        sup_bound: Option<f64>,
    },
    Tabulated {
        r: Vec<f64>,
        values: Vec<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        sup_bound: Option<f64>,
    },
}

/// Input shape: a flat object, so that decoding errors keep the path of the
/// offending field. Which fields are required depends on `variant`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct SymbolInput {
    variant: String,
    c: Option<f64>,
    s: Option<f64>,
    breakpoints: Option<Vec<f64>>,
    values: Option<Vec<f64>>,
    beta: Option<f64>,
    r: Option<Vec<f64>>,
    sup_bound: Option<f64>,
}

impl SymbolInput {
    fn take<T>(value: Option<T>, name: &str, variant: &str) -> Result<T> {
        value.ok_or_else(|| Error::Domain(format!("variant `{variant}` requires field `{name}`")))
    }

    fn reject_extra(&self, allowed: &[&str]) -> Result<()> {
        let present = [
            ("c", self.c.is_some()),
            ("s", self.s.is_some()),
            ("breakpoints", self.breakpoints.is_some()),
            ("values", self.values.is_some()),
            ("beta", self.beta.is_some()),
            ("r", self.r.is_some()),
        ];
        for (name, set) in present {
            if set && !allowed.contains(&name) {
                return Err(Error::Domain(format!(
                    "field `{name}` does not belong to variant `{}`",
                    self.variant
                )));
            }
        }
        Ok(())
    }
}

impl TryFrom<SymbolInput> for RadialSymbol {
    type Error = Error;

    fn try_from(input: SymbolInput) -> Result<Self> {
        let v = input.variant.clone();
        let kind = match v.as_str() {
            "constant" => {
                input.reject_extra(&["c"])?;
                SymbolKind::Constant {
                    c: SymbolInput::take(input.c, "c", &v)?,
                }
            }
            "power" => {
                input.reject_extra(&["s"])?;
                SymbolKind::Power {
                    s: SymbolInput::take(input.s, "s", &v)?,
                }
            }
            "piecewise" => {
                input.reject_extra(&["breakpoints", "values"])?;
                SymbolKind::Piecewise {
                    breakpoints: SymbolInput::take(input.breakpoints, "breakpoints", &v)?,
                    values: SymbolInput::take(input.values, "values", &v)?,
                }
            }
            "log_oscillation" => {
                input.reject_extra(&["beta"])?;
                SymbolKind::LogOscillation {
                    beta: SymbolInput::take(input.beta, "beta", &v)?,
                }
            }
            "tabulated" => {
                input.reject_extra(&["r", "values"])?;
                let r = SymbolInput::take(input.r, "r", &v)?;
                check_tabulated(&r)?;
                SymbolKind::Tabulated {
                    interp: Linear::new(r, SymbolInput::take(input.values, "values", &v)?)?,
                }
            }
            other => {
                return Err(Error::Domain(format!(
                    "unknown variant `{other}`; expected constant, power, piecewise, log_oscillation or tabulated"
                )))
            }
        };
        RadialSymbol::with_bound(kind, input.sup_bound)
    }
}

impl From<RadialSymbol> for SymbolWire {
    fn from(symbol: RadialSymbol) -> Self {
        let sup_bound = Some(symbol.sup_bound);
        match symbol.kind {
            SymbolKind::Constant { c } => SymbolWire::Constant { c, sup_bound },
            SymbolKind::Power { s } => SymbolWire::Power { s, sup_bound },
            SymbolKind::Piecewise {
                breakpoints,
                values,
            } => SymbolWire::Piecewise {
                breakpoints,
                values,
                sup_bound,
            },
            SymbolKind::LogOscillation { beta } => SymbolWire::LogOscillation { beta, sup_bound },
            SymbolKind::Tabulated { interp } => SymbolWire::Tabulated {
                r: interp.knots().to_vec(),
                values: interp.values().to_vec(),
                sup_bound,
            },
        }
    }
}

fn check_tabulated(r: &[f64]) -> Result<()> {
    if r.len() < 2 {
        return Err(Error::Domain(
            "tabulated symbol needs at least two samples".into(),
        ));
    }
    if r[0] < 0.0 || r[r.len() - 1] > 1.0 {
        return Err(Error::Domain("tabulated radii must lie in [0, 1]".into()));
    }
    Ok(())
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite, got {v}")))
    }
}

impl RadialSymbol {
    /// Validates `kind` and attaches a sup bound; `None` derives the bound
    /// from the symbol's description.
    pub fn with_bound(kind: SymbolKind, sup_bound: Option<f64>) -> Result<Self> {
        let natural = match &kind {
            SymbolKind::Constant { c } => {
                finite("c", *c)?;
                c.abs()
            }
            SymbolKind::Power { s } => {
                finite("s", *s)?;
                if *s < 0.0 {
                    return Err(Error::Domain(format!("power s must be >= 0, got {s}")));
                }
                1.0
            }
            SymbolKind::Piecewise {
                breakpoints,
                values,
            } => {
                if breakpoints.len() < 2 || values.len() + 1 != breakpoints.len() {
                    return Err(Error::Domain(format!(
                        "piecewise symbol needs J+1 breakpoints for J values, got {} and {}",
                        breakpoints.len(),
                        values.len()
                    )));
                }
                if breakpoints[0] != 0.0 || breakpoints[breakpoints.len() - 1] != 1.0 {
                    return Err(Error::Domain(
                        "piecewise breakpoints must run from 0 to 1".into(),
                    ));
                }
                if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(Error::Domain(
                        "piecewise breakpoints must be strictly increasing".into(),
                    ));
                }
                for &v in values {
                    finite("piecewise value", v)?;
                }
                values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            }
            SymbolKind::LogOscillation { beta } => {
                finite("beta", *beta)?;
                1.0
            }
            SymbolKind::Tabulated { interp } => {
                interp.values().iter().fold(0.0f64, |m, v| m.max(v.abs()))
            }
        };
        let sup_bound = match sup_bound {
            Some(b) if b.is_finite() && b >= 0.0 => b,
            Some(b) => return Err(Error::Domain(format!("sup_bound must be >= 0, got {b}"))),
            None => natural,
        };
        Ok(Self { kind, sup_bound })
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::with_bound(SymbolKind::Constant { c }, None)
    }

    /// `b(r) = r^{2s}`.
    pub fn power(s: f64) -> Result<Self> {
        Self::with_bound(SymbolKind::Power { s }, None)
    }

    /// Piecewise constant in `t = r²`.
    pub fn piecewise(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::with_bound(
            SymbolKind::Piecewise {
                breakpoints,
                values,
            },
            None,
        )
    }

    /// Indicator of `{r² >= a}`.
    pub fn indicator_from(a: f64) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::Domain(format!(
                "indicator threshold must lie in (0, 1), got {a}"
            )));
        }
        Self::piecewise(vec![0.0, a, 1.0], vec![0.0, 1.0])
    }

    pub fn log_oscillation(beta: f64) -> Result<Self> {
        Self::with_bound(SymbolKind::LogOscillation { beta }, None)
    }

    pub fn tabulated(r: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_tabulated(&r)?;
        Self::with_bound(
            SymbolKind::Tabulated {
                interp: Linear::new(r, values)?,
            },
            None,
        )
    }

    pub fn kind(&self) -> &SymbolKind {
        &self.kind
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    /// `b(r)` for `r ∈ [0, 1)`.
    pub fn eval(&self, r: f64) -> f64 {
        match &self.kind {
            SymbolKind::Tabulated { interp } => interp.eval(r),
            _ => self.eval_t(r * r),
        }
    }

    /// Spot-checks `|b| <= sup_bound` on a uniform grid of `samples` radii
    /// in `[0, 1)`; returns the largest excess found (zero if none).
    pub fn sup_bound_excess(&self, samples: usize) -> f64 {
        let samples = samples.max(2);
        (0..samples)
            .map(|i| self.eval(i as f64 / samples as f64).abs() - self.sup_bound)
            .fold(0.0f64, f64::max)
    }
}

impl RadialFunction for RadialSymbol {
    fn eval_t(&self, t: f64) -> f64 {
        match &self.kind {
            SymbolKind::Constant { c } => *c,
            SymbolKind::Power { s } => t.powf(*s),
            SymbolKind::Piecewise {
                breakpoints,
                values,
            } => {
                let j = breakpoints.partition_point(|&b| b <= t);
                values[j.saturating_sub(1).min(values.len() - 1)]
            }
            SymbolKind::LogOscillation { beta } => {
                if t >= 1.0 {
                    // No limit at the boundary; the value there is immaterial.
                    0.0
                } else {
                    (-beta * (-t).ln_1p()).sin()
                }
            }
            SymbolKind::Tabulated { interp } => interp.eval(t.max(0.0).sqrt()),
        }
    }

    fn breakpoints_t(&self) -> Vec<f64> {
        match &self.kind {
            SymbolKind::Piecewise { breakpoints, .. } => {
                breakpoints[1..breakpoints.len() - 1].to_vec()
            }
            SymbolKind::Tabulated { interp } => interp
                .knots()
                .iter()
                .map(|r| r * r)
                .filter(|&t| t > 0.0 && t < 1.0)
                .collect(),
            _ => Vec::new(),
        }
    }

    fn boundary_value(&self) -> Option<f64> {
        match &self.kind {
            SymbolKind::Constant { c } => Some(*c),
            SymbolKind::Power { .. } => Some(1.0),
            SymbolKind::Piecewise { values, .. } => values.last().copied(),
            SymbolKind::LogOscillation { .. } => None,
            SymbolKind::Tabulated { interp } => interp.values().last().copied(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_per_variant() {
        assert_eq!(RadialSymbol::constant(2.5).unwrap().eval(0.3), 2.5);
        assert!((RadialSymbol::power(1.0).unwrap().eval(0.5) - 0.25).abs() < 1e-16);
        let ind = RadialSymbol::indicator_from(0.5).unwrap();
        assert_eq!(ind.eval_t(0.49), 0.0);
        assert_eq!(ind.eval_t(0.5), 1.0);
        assert_eq!(ind.eval_t(1.0), 1.0);
        let osc = RadialSymbol::log_oscillation(1.0).unwrap();
        let r: f64 = 0.8;
        assert!((osc.eval(r) - (1.0 / (1.0 - r * r)).ln().sin()).abs() < 1e-14);
        let tab = RadialSymbol::tabulated(vec![0.0, 1.0], vec![0.0, 2.0]).unwrap();
        assert!((tab.eval(0.25) - 0.5).abs() < 1e-16);
        assert_eq!(tab.sup_bound(), 2.0);
    }

    #[test]
    fn json_round_trip_and_defaults() {
        let s: RadialSymbol = serde_json::from_str(r#"{"variant": "power", "s": 2.0}"#).unwrap();
        assert_eq!(s.sup_bound(), 1.0);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"variant":"power","s":2.0,"sup_bound":1.0}"#);
        let back: RadialSymbol = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn invalid_descriptions_rejected() {
        assert!(RadialSymbol::power(-1.0).is_err());
        assert!(RadialSymbol::piecewise(vec![0.0, 0.6, 0.5, 1.0], vec![1.0, 2.0, 3.0]).is_err());
        assert!(RadialSymbol::piecewise(vec![0.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(serde_json::from_str::<RadialSymbol>(r#"{"variant": "power"}"#).is_err());
        assert!(
            serde_json::from_str::<RadialSymbol>(r#"{"variant": "power", "s": 1, "c": 2}"#)
                .is_err()
        );
        assert!(serde_json::from_str::<RadialSymbol>(r#"{"variant": "cubic", "s": 1}"#).is_err());
        assert!(
            serde_json::from_str::<RadialSymbol>(r#"{"variant": "power", "s": 1, "x": 0}"#)
                .is_err()
        );
        assert!(serde_json::from_str::<RadialSymbol>(
            r#"{"variant": "constant", "c": 1, "sup_bound": -1}"#
        )
        .is_err());
    }

    #[test]
    fn declared_bound_spot_check() {
        let s = RadialSymbol::with_bound(SymbolKind::Constant { c: 2.0 }, Some(1.5)).unwrap();
        assert!((s.sup_bound_excess(10) - 0.5).abs() < 1e-15);
        assert_eq!(
            RadialSymbol::log_oscillation(2.0)
                .unwrap()
                .sup_bound_excess(100),
            0.0
        );
    }
}
