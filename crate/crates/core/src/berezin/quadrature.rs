//! Symbol-side k-Berezin transform by quadrature over the disk.
//!
//! With `w = φ_r(ξ)` the disk automorphism exchanging `0` and `r`,
//!
//! ```text
//! B_k(b)(r) = ∫_D b(|φ_r(ξ)|) (k+1)(1-|ξ|²)^k dA(ξ)
//!           = ∫_0^1 b(√t) K_k(r, t) dt,
//! K_k(r, t) = (k+1)(1-r²)^{k+2}(1-t)^k · (1/2π) ∫_0^{2π} |1 - r√t e^{iθ}|^{-2(k+2)} dθ.
//! ```
//!
//! The radial integral runs on Gauss–Legendre panels whose breaks include
//! the symbol's own breakpoints. The angular mean is either summed in
//! closed form, `(1-a²)^{1-2s} Σ_{m<s} C(s-1, m)² a^{2m}` with `s = k+2`
//! and `a = r√t`, or approximated by the periodic trapezoid rule, which
//! keeps the transform a genuine two-dimensional quadrature. The trapezoid
//! rule needs on the order of `1/(1-a)` nodes, so it is only practical away
//! from the boundary. Exponentials are formed in log space.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binomial::ln_binomial;
use crate::error::{Error, Result};
use crate::interp::LocalCubic;
use crate::quadrature::{even_periodic_mean, merge_breakpoints, Integrator, QuadratureConfig};
use crate::symbol::RadialFunction;

use super::profile::R_MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngularRule {
    #[default]
    ClosedForm,
    Trapezoid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TransformConfig {
    pub radial: QuadratureConfig,
    pub angular_rule: AngularRule,
    /// Trapezoid rule only.
    pub angular_rel_tol: f64,
    /// Trapezoid rule only.
    pub angular_max_nodes: usize,
}

impl Default for TransformConfig {
    fn default() -> Self {
        Self {
            radial: QuadratureConfig::default(),
            angular_rule: AngularRule::ClosedForm,
            angular_rel_tol: 1e-13,
            angular_max_nodes: 1 << 22,
        }
    }
}

impl TransformConfig {
    pub fn trapezoid() -> Self {
        Self {
            angular_rule: AngularRule::Trapezoid,
            ..Self::default()
        }
    }
}

/// Evaluates `K_k(r, t)`.
pub struct KernelEvaluator {
    k: usize,
    r: f64,
    log_prefactor: f64,
    rule: AngularRule,
    /// `2 ln C(k+1, m)` for `m = 0..=k+1`.
    log_coeffs: Vec<f64>,
    rel_tol: f64,
    max_nodes: usize,
}

impl KernelEvaluator {
    pub fn new(k: usize, r: f64, cfg: &TransformConfig) -> Result<Self> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::Domain(format!("radius must lie in [0, 1), got {r}")));
        }
        let kf = k as f64;
        Ok(Self {
            k,
            r,
            log_prefactor: (kf + 1.0).ln() + (kf + 2.0) * (-r * r).ln_1p(),
            rule: cfg.angular_rule,
            log_coeffs: (0..=k as u64 + 1)
                .map(|m| 2.0 * ln_binomial(k as u64 + 1, m))
                .collect(),
            rel_tol: cfg.angular_rel_tol,
            max_nodes: cfg.angular_max_nodes,
        })
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let kf = self.k as f64;
        let mut log_pre = self.log_prefactor;
        if self.k > 0 {
            if t >= 1.0 {
                return Ok(0.0);
            }
            log_pre += kf * (-t).ln_1p();
        }
        let t = t.clamp(0.0, 1.0);
        if self.rule == AngularRule::ClosedForm {
            return Ok(self.closed_form(log_pre, t));
        }
        let a = self.r * t.sqrt();
        let s = kf + 2.0;
        let est = even_periodic_mean(
            |theta| {
                let q = (1.0 - a) * (1.0 - a) + 2.0 * a * (1.0 - theta.cos());
                (log_pre - s * q.ln()).exp()
            },
            self.rel_tol,
            self.max_nodes,
        )?;
        Ok(est.value)
    }

    fn closed_form(&self, log_pre: f64, t: f64) -> f64 {
        let r2 = self.r * self.r;
        let a2 = r2 * t;
        // 1 - r²t written so that neither factor cancels near the boundary.
        let gap = (1.0 - r2) + r2 * (1.0 - t);
        let ln_a2 = a2.ln();
        let terms =
            self.log_coeffs
                .iter()
                .enumerate()
                .map(|(m, c)| if m == 0 { *c } else { c + m as f64 * ln_a2 });
        let peak = terms.clone().fold(f64::NEG_INFINITY, f64::max);
        let ln_poly = peak + terms.map(|x| (x - peak).exp()).sum::<f64>().ln();
        let s = self.k as f64 + 2.0;
        (log_pre + (1.0 - 2.0 * s) * gap.ln() + ln_poly).exp()
    }
}

/// `B_k(f)(r)` for a real radial function `f`.
pub fn berezin_of_radial_symbol<F: RadialFunction + ?Sized>(
    f: &F,
    k: usize,
    r: f64,
    cfg: &TransformConfig,
) -> Result<f64> {
    let integrator = Integrator::new(cfg.radial)?;
    transform_with(f, k, r, cfg, &integrator)
}

fn transform_with<F: RadialFunction + ?Sized>(
    f: &F,
    k: usize,
    r: f64,
    cfg: &TransformConfig,
    integrator: &Integrator,
) -> Result<f64> {
    let kernel = KernelEvaluator::new(k, r, cfg)?;
    let breaks = f.breakpoints_t();
    let peak = [r * r];
    let pts = merge_breakpoints(&[&breaks, &peak], 0.0, 1.0);
    // Kernel failures are rare (only at the node cap); surface the first.
    let failure = std::sync::Mutex::new(None);
    let est = integrator.integrate(
        |t| match kernel.eval(t) {
            Ok(kv) => f.eval_t(t) * kv,
            Err(e) => {
                failure.lock().expect("poisoned").get_or_insert(e);
                0.0
            }
        },
        &pts,
    )?;
    if let Some(e) = failure.into_inner().expect("poisoned") {
        return Err(e);
    }
    Ok(est.value)
}

/// `B_k(f)` at several radii, in parallel, sharing one configuration.
pub fn berezin_of_radial_symbol_at<F: RadialFunction + ?Sized>(
    f: &F,
    k: usize,
    radii: &[f64],
    cfg: &TransformConfig,
) -> Result<Vec<f64>> {
    let integrator = Integrator::new(cfg.radial)?;
    radii
        .par_iter()
        .map(|&r| transform_with(f, k, r, cfg, &integrator))
        .collect()
}

/// Default number of tabulation knots.
pub const TABLE_POINTS: usize = 160;

/// `B_k(f)` tabulated on `[0, R_MAX²]` in the variable `t = r²`, with knots
/// uniform in `ln(1 - t)`. Between the last knot and `t = 1` the table is
/// joined linearly to the boundary limit of `f` (the transform has the same
/// limit), or held constant when `f` has none.
#[derive(Debug, Clone)]
pub struct TabulatedTransform {
    k: usize,
    interp: LocalCubic,
    t_max: f64,
    last: f64,
    boundary: f64,
}

impl TabulatedTransform {
    pub fn new<F: RadialFunction + ?Sized>(
        f: &F,
        k: usize,
        points: usize,
        cfg: &TransformConfig,
    ) -> Result<Self> {
        if points < 4 {
            return Err(Error::Domain(format!(
                "tabulation needs at least 4 knots, got {points}"
            )));
        }
        let t_max = R_MAX * R_MAX;
        let s_max = -(1.0 - t_max).ln();
        let knots: Vec<f64> = (0..points)
            .map(|i| {
                let s = s_max * i as f64 / (points - 1) as f64;
                -(-s).exp_m1()
            })
            .collect();
        let last_knot = knots[points - 1];
        let radii: Vec<f64> = knots.iter().map(|t| t.sqrt()).collect();
        let values = berezin_of_radial_symbol_at(f, k, &radii, cfg)?;
        let last = values[values.len() - 1];
        let boundary = f.boundary_value().unwrap_or(last);
        Ok(Self {
            k,
            interp: LocalCubic::new(knots, values)?,
            t_max: last_knot,
            last,
            boundary,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

impl RadialFunction for TabulatedTransform {
    fn eval_t(&self, t: f64) -> f64 {
        if t <= self.t_max {
            self.interp.eval(t)
        } else {
            let w = ((t - self.t_max) / (1.0 - self.t_max)).min(1.0);
            self.last + w * (self.boundary - self.last)
        }
    }

    fn breakpoints_t(&self) -> Vec<f64> {
        vec![self.t_max]
    }

    fn boundary_value(&self) -> Option<f64> {
        Some(self.boundary)
    }
}
