//! Operator-side k-Berezin transform of a radial operator as a power series
//! in `x = r²`:
//!
//! ```text
//! B_k(S)(r) = (k+1)(1-x)^{k+2} Σ_m C(m+k+1, m)² D_m x^m,
//! D_m = Σ_{j<=k} C(k, j) (-1)^j λ_{m+j} / (m+j+1).
//! ```
//!
//! The window is extended by its last value `c`. Splitting `S = cI + (S - cI)`
//! and using `B_k(cI) = c`, the remainder has finitely many nonzero
//! eigenvalues, so the profile is `c` plus a polynomial times
//! `(1-x)^{k+2}`. When the window is longer than the series needs, the
//! polynomial is truncated at the first order whose geometric tail bound at
//! `R_MAX` is below the requested tolerance.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::binomial::binomial;
use crate::error::{Error, Result};
use crate::sequences::EigenvalueSequence;
use crate::symbol::RadialFunction;

/// Radius at which truncation tail bounds are certified.
pub const R_MAX: f64 = 0.995;

/// Orders beyond this are never considered when sizing the series.
const MAX_ORDER: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProfileOptions {
    /// Bound on the dropped series tail at `R_MAX`.
    pub tol: f64,
    /// Refuse to extend a window that is too short instead of warning.
    pub strict_window: bool,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            strict_window: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerezinProfile {
    pub k: usize,
    /// The value `c` the window was extended with; also `lim_{r→1}`.
    pub tail_value: Complex64,
    /// `a_m = C(m+k+1, m)² D_m` for the operator `S - cI`.
    pub coefficients: Vec<Complex64>,
    /// Number of coefficients kept.
    pub truncation_order: usize,
    /// Order the tail bound asks for.
    pub needed_order: usize,
    pub truncation_tol: f64,
    /// Bound on the dropped terms at `R_MAX` (zero when nothing was dropped).
    pub tail_bound: f64,
    /// Whether coefficients depend on entries past the window.
    pub window_extended: bool,
}

/// Value, first and second derivative in `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
}

/// Smallest `M` such that the terms `m >= M` are bounded by `tol` at
/// `x = R_MAX²`, using `|D_m| <= 2^k ‖λ - c‖_∞ / (m+1)`.
fn needed_order(k: usize, amplitude: f64, tol: f64) -> Result<(usize, f64)> {
    if amplitude == 0.0 {
        return Ok((0, 0.0));
    }
    let x = R_MAX * R_MAX;
    let kf = k as f64;
    let base = (kf + 1.0).ln() + (kf + 2.0) * (1.0 - x).ln() + kf * 2f64.ln() + amplitude.ln();
    // ln C(m+k+1, k+1), updated incrementally in m.
    let mut ln_binom = 0.0;
    for m in 0..MAX_ORDER {
        let mf = m as f64;
        let ln_term = base + 2.0 * ln_binom - (mf + 1.0).ln() + mf * x.ln();
        let ratio = (mf + kf + 2.0).powi(2) / ((mf + 1.0) * (mf + 2.0)) * x;
        if ratio < 1.0 {
            let bound = ln_term.exp() / (1.0 - ratio);
            if bound <= tol {
                return Ok((m, bound));
            }
        }
        ln_binom += ((mf + kf + 2.0) / (mf + 1.0)).ln();
    }
    Err(Error::Tolerance {
        what: "Berezin series truncation".into(),
        requested: tol,
        achieved: f64::INFINITY,
        estimate: f64::NAN,
    })
}

impl BerezinProfile {
    /// Builds the series profile of `B_k(S)` for the radial operator with
    /// eigenvalue window `lambda`.
    pub fn new(lambda: &EigenvalueSequence, k: usize, opts: &ProfileOptions) -> Result<Self> {
        if !(opts.tol > 0.0) {
            return Err(Error::Domain(format!(
                "truncation tolerance must be positive, got {}",
                opts.tol
            )));
        }
        let len = lambda.len();
        let c = lambda.last();
        let shifted: Vec<Complex64> = lambda.values().iter().map(|v| v - c).collect();
        let amplitude = shifted.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let (needed, bound) = needed_order(k, amplitude, opts.tol)?;
        let window_extended = needed > 0 && needed + k > len;
        if window_extended {
            if opts.strict_window {
                return Err(Error::StrictWindow {
                    needed: needed + k,
                    got: len,
                });
            }
            log::warn!(
                "k = {k}: series needs {} eigenvalues, window has {len}; extending by the last value",
                needed + k
            );
        }
        let order = needed.min(len);
        let tail_bound = if needed < len { bound } else { 0.0 };
        let binom_k: Vec<f64> = (0..=k).map(|j| binomial(k as u64, j as u64)).collect();
        let coefficients = (0..order)
            .map(|m| {
                let mut d = Complex64::new(0.0, 0.0);
                for (j, b) in binom_k.iter().enumerate() {
                    let idx = m + j;
                    if idx >= len {
                        break;
                    }
                    let term = shifted[idx] * (b / (idx as f64 + 1.0));
                    if j % 2 == 0 {
                        d += term;
                    } else {
                        d -= term;
                    }
                }
                let w = binomial((m + k + 1) as u64, m as u64);
                d * (w * w)
            })
            .collect();
        Ok(Self {
            k,
            tail_value: c,
            coefficients,
            truncation_order: order,
            needed_order: needed,
            truncation_tol: opts.tol,
            tail_bound,
            window_extended,
        })
    }

    /// `g(x) = Σ a_m x^m` with its first two derivatives (Horner).
    fn polynomial_jet(&self, x: f64) -> Jet {
        let zero = Complex64::new(0.0, 0.0);
        let (mut p, mut dp, mut ddp) = (zero, zero, zero);
        for &a in self.coefficients.iter().rev() {
            ddp = ddp * x + 2.0 * dp;
            dp = dp * x + p;
            p = p * x + a;
        }
        Jet {
            value: p,
            d1: dp,
            d2: ddp,
        }
    }

    /// `f(x) = B_k(S)` as a function of `x = r²` with its derivatives.
    pub fn jet_x(&self, x: f64) -> Jet {
        let g = self.polynomial_jet(x);
        let kf = self.k as f64;
        let s = 1.0 - x;
        let w = kf + 1.0;
        let p2 = s.powi(self.k as i32 + 2);
        let p1 = s.powi(self.k as i32 + 1);
        let p0 = s.powi(self.k as i32);
        Jet {
            value: self.tail_value + w * p2 * g.value,
            d1: w * (-(kf + 2.0) * p1 * g.value + p2 * g.d1),
            d2: w
                * ((kf + 2.0) * (kf + 1.0) * p0 * g.value - 2.0 * (kf + 2.0) * p1 * g.d1
                    + p2 * g.d2),
        }
    }

    pub fn eval_x(&self, x: f64) -> Complex64 {
        self.jet_x(x).value
    }

    /// `B_k(S)(r)`. The tail bound is certified for `r <= R_MAX`; when the
    /// series was not truncated the value is exact for the extended window
    /// on all of `[0, 1]`.
    pub fn eval(&self, r: f64) -> Complex64 {
        self.eval_x(r * r)
    }

    /// `Δ̃ B_k(S)(r) = (1-x)² (x f''(x) + f'(x))` with `Δ = ∂∂̄`.
    pub fn invariant_laplacian(&self, r: f64) -> Complex64 {
        let x = r * r;
        let j = self.jet_x(x);
        (1.0 - x) * (1.0 - x) * (x * j.d2 + j.d1)
    }

    /// Real or imaginary part as a [`RadialFunction`].
    pub fn part(&self, imaginary: bool) -> ProfilePart<'_> {
        ProfilePart {
            profile: self,
            imaginary,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ProfilePart<'a> {
    profile: &'a BerezinProfile,
    imaginary: bool,
}

impl RadialFunction for ProfilePart<'_> {
    fn eval_t(&self, t: f64) -> f64 {
        let v = self.profile.eval_x(t);
        if self.imaginary {
            v.im
        } else {
            v.re
        }
    }

    fn boundary_value(&self) -> Option<f64> {
        let c = self.profile.tail_value;
        Some(if self.imaginary { c.im } else { c.re })
    }
}

/// Convenience wrapper around [`BerezinProfile::new`].
pub fn berezin_of_radial_operator(
    lambda: &EigenvalueSequence,
    k: usize,
    opts: &ProfileOptions,
) -> Result<BerezinProfile> {
    BerezinProfile::new(lambda, k, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_unit_profile() {
        let one = EigenvalueSequence::from_real(&[1.0; 10]).unwrap();
        for k in 0..4 {
            let p = BerezinProfile::new(&one, k, &ProfileOptions::default()).unwrap();
            assert!(p.coefficients.is_empty());
            assert!(!p.window_extended);
            for r in [0.0, 0.5, 0.99] {
                assert_eq!(p.eval(r), Complex64::new(1.0, 0.0));
            }
        }
    }

    #[test]
    fn origin_value_is_first_eigenvalue() {
        let l =
            EigenvalueSequence::from_real_fn(40, |n| (n as f64 + 1.0) / (n as f64 + 2.0)).unwrap();
        let p = BerezinProfile::new(&l, 0, &ProfileOptions::default()).unwrap();
        assert!((p.eval(0.0).re - 0.5).abs() < 1e-15);
        assert!(p.window_extended);
        let strict = ProfileOptions {
            strict_window: true,
            ..ProfileOptions::default()
        };
        assert!(matches!(
            BerezinProfile::new(&l, 0, &strict),
            Err(Error::StrictWindow { .. })
        ));
    }

    #[test]
    fn long_window_is_truncated_within_tolerance() {
        let l = EigenvalueSequence::from_real_fn(20_000, |n| 1.0 / (n as f64 + 1.0)).unwrap();
        let p = BerezinProfile::new(&l, 1, &ProfileOptions::default()).unwrap();
        assert!(!p.window_extended);
        assert!(p.truncation_order < 20_000);
        assert!(p.tail_bound <= 1e-12);
    }

    #[test]
    fn jet_matches_finite_differences() {
        let l = EigenvalueSequence::from_real_fn(30, |n| ((n as f64 + 1.0).ln()).sin()).unwrap();
        let p = BerezinProfile::new(&l, 2, &ProfileOptions::default()).unwrap();
        let x = 0.4;
        let h = 1e-5;
        let j = p.jet_x(x);
        let fd1 = (p.eval_x(x + h) - p.eval_x(x - h)) / (2.0 * h);
        let fd2 = (p.eval_x(x + h) - 2.0 * p.eval_x(x) + p.eval_x(x - h)) / (h * h);
        assert!((j.d1 - fd1).norm() < 1e-7);
        assert!((j.d2 - fd2).norm() < 1e-3);
    }
}
