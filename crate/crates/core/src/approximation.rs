//! Greedy construction of a sequence with controlled second differences
//! close to a given sequence with bounded first-difference seminorm.
//!
//! Past a prefix cutoff each step is `y_n = y_{n-1} + δ_n`, where `δ_n` is
//! the point of
//!
//! ```text
//! I_n = [-1/n, 1/n] ∩ [(y_{n-1} - y_{n-2}) - C/n², (y_{n-1} - y_{n-2}) + C/n²]
//! ```
//!
//! closest to `x_n - y_{n-1}`. For a real `x` with `‖x‖_{d1} <= 1` the result
//! satisfies `‖x - y‖_∞ <= 5ε`. The parameter `C` and the block length
//! `m(C, n)` used in that estimate are exposed for inspection.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequences::{d1_seminorm, EigenvalueSequence};
use crate::summation::NeumaierSum;

/// Proven deviation factor: `‖x - y‖_∞ <= DEVIATION_FACTOR · ε` for
/// normalised real input.
pub const DEVIATION_FACTOR: f64 = 5.0;

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::Domain(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    Ok(())
}

/// `C(ε) = max(5, 4 + 8/ε)`, so that `4/(C-4) <= ε/2`.
pub fn choose_c(epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    Ok((4.0 + 8.0 / epsilon).max(5.0))
}

fn check_c_n(c: f64, n: u64) -> Result<()> {
    if !(c.is_finite() && c > 4.0) {
        return Err(Error::Precondition(format!("C must exceed 4, got {c}")));
    }
    if (n as f64) < c || n == 0 {
        return Err(Error::Precondition(format!(
            "n = {n} must be at least C = {c}"
        )));
    }
    Ok(())
}

/// The unique `m >= n+1` with `Σ_{k=n+1}^{m} C/k² <= 1/n < Σ_{k=n+1}^{m+1} C/k²`.
pub fn find_m(c: f64, n: u64) -> Result<u64> {
    check_c_n(c, n)?;
    let budget = 1.0 / n as f64;
    let mut partial = NeumaierSum::new();
    let mut m = n;
    loop {
        let k = (m + 1) as f64;
        let mut next = partial;
        next.add(c / (k * k));
        if next.value() > budget {
            return Ok(m);
        }
        partial = next;
        m += 1;
    }
}

/// `E(C, n) = Σ_{p=n+1}^{m} (1/n - Σ_{k=n+1}^{p} C/k²)` for `m = m(C, n)`.
pub fn e_value(c: f64, n: u64, m: u64) -> Result<f64> {
    let expected = find_m(c, n)?;
    if m != expected {
        return Err(Error::Precondition(format!(
            "m = {m} is not m(C = {c}, n = {n}) = {expected}"
        )));
    }
    let budget = 1.0 / n as f64;
    let mut inner = NeumaierSum::new();
    let mut outer = NeumaierSum::new();
    for p in (n + 1)..=m {
        let k = p as f64;
        inner.add(c / (k * k));
        outer.add(budget - inner.value());
    }
    Ok(outer.value())
}

/// `Σ_{k=n+1}^{m} 1/k`.
pub fn harmonic_block(n: u64, m: u64) -> f64 {
    ((n + 1)..=m)
        .map(|k| 1.0 / k as f64)
        .collect::<NeumaierSum>()
        .value()
}

/// Block length, bracket and error terms for one `(C, n)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockDiagnostics {
    pub c: f64,
    pub n: u64,
    pub m: u64,
    /// `r` with `m = C n / (C - r)`; informational only.
    pub r: f64,
    pub bracket_low: f64,
    pub bracket_high: f64,
    pub in_bracket: bool,
    pub e_value: f64,
    pub harmonic_block: f64,
}

pub fn block_diagnostics(c: f64, n: u64) -> Result<BlockDiagnostics> {
    let m = find_m(c, n)?;
    let nf = n as f64;
    let mf = m as f64;
    let bracket_low = c * nf / (c - 1.0);
    let bracket_high = c * nf / (c - 4.0);
    Ok(BlockDiagnostics {
        c,
        n,
        m,
        r: c * (mf - nf) / mf,
        bracket_low,
        bracket_high,
        in_bracket: bracket_low <= mf && mf <= bracket_high,
        e_value: e_value(c, n, m)?,
        harmonic_block: harmonic_block(n, m),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproximationParams {
    pub epsilon: f64,
    pub c: f64,
    /// Entries `n <= prefix_cutoff` are copied from the input.
    pub prefix_cutoff: usize,
}

impl ApproximationParams {
    pub fn for_epsilon(epsilon: f64) -> Result<Self> {
        let c = choose_c(epsilon)?;
        let cutoff = (2.0 / epsilon).max(c).ceil();
        Ok(Self {
            epsilon,
            c,
            prefix_cutoff: cutoff as usize,
        })
    }
}

/// Per-clause outcome of re-checking a constructed `y` against `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproximationAudit {
    /// Index of the first constrained entry, `prefix_cutoff + 1`.
    pub first_constrained: usize,
    /// `|y_n - y_{n-1}| <= 1/n` for each constrained `n` (normalised units).
    pub delta_ok: Vec<bool>,
    /// `|Δ²_{n-2}(y)| <= C/n²` for each constrained `n` (normalised units).
    pub curvature_ok: Vec<bool>,
    pub delta_pass: bool,
    pub curvature_pass: bool,
    /// Every admissible interval `I_n` was nonempty.
    pub interval_nonempty: bool,
    /// Steps where the sign of `x - y` changed but the next deviation
    /// exceeded `2/(n+1)`.
    pub sign_flip_violations: usize,
    pub sup_deviation: f64,
    pub deviation_bound: f64,
    pub within_bound: bool,
    pub all_pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproximationResult {
    pub y: EigenvalueSequence,
    pub params: ApproximationParams,
    /// Window d1 seminorm of the input.
    pub input_d1: f64,
    /// Divisor applied before the construction (`max(1, input_d1)`).
    pub scale: f64,
    pub sup_deviation: f64,
    /// `5 ε · scale`, times `√2` for complex input.
    pub deviation_bound: f64,
    pub audit: ApproximationAudit,
}

/// Closed-form projection of `target` onto `[lo, hi]`.
fn clamp_step(target: f64, lo: f64, hi: f64) -> f64 {
    target.max(lo).min(hi)
}

fn step_interval(prev_step: f64, n: usize, c: f64) -> (f64, f64) {
    let nf = n as f64;
    let slope = 1.0 / nf;
    let curvature = c / (nf * nf);
    (
        (-slope).max(prev_step - curvature),
        slope.min(prev_step + curvature),
    )
}

fn project_real(x: &[f64], params: &ApproximationParams) -> Result<Vec<f64>> {
    let mut y = x.to_vec();
    for n in (params.prefix_cutoff + 1)..x.len() {
        let prev_step = y[n - 1] - y[n - 2];
        let (lo, hi) = step_interval(prev_step, n, params.c);
        if lo > hi {
            return Err(Error::Invariant(format!(
                "admissible step interval empty at n = {n}: [{lo:e}, {hi:e}]"
            )));
        }
        let delta = clamp_step(x[n] - y[n - 1], lo, hi);
        y[n] = y[n - 1] + delta;
    }
    Ok(y)
}

/// Runs the greedy construction. Real and imaginary parts are handled
/// independently; inputs with window d1 seminorm `D > 1` are divided by `D`
/// first and scaled back afterwards.
pub fn project_to_d2(x: &EigenvalueSequence, epsilon: f64) -> Result<ApproximationResult> {
    check_epsilon(epsilon)?;
    if x.len() < 3 {
        return Err(Error::WindowTooShort {
            needed: 3,
            got: x.len(),
        });
    }
    let params = ApproximationParams::for_epsilon(epsilon)?;
    let input_d1 = d1_seminorm(x)?.value;
    let scale = input_d1.max(1.0);

    let normalise = |v: Vec<f64>| -> Vec<f64> { v.into_iter().map(|t| t / scale).collect() };
    let y_re = project_real(&normalise(x.re()), &params)?;
    let y_im = if x.is_real() {
        vec![0.0; x.len()]
    } else {
        project_real(&normalise(x.im()), &params)?
    };
    let y = EigenvalueSequence::new(
        y_re.iter()
            .zip(&y_im)
            .map(|(&re, &im)| Complex64::new(re * scale, im * scale))
            .collect(),
    )?;

    let mut result = ApproximationResult {
        y,
        params,
        input_d1,
        scale,
        sup_deviation: 0.0,
        deviation_bound: deviation_bound(&params, scale, x.is_real()),
        audit: empty_audit(&params),
    };
    let audit = verify_approximation(x, &result)?;
    result.sup_deviation = audit.sup_deviation;
    result.audit = audit;
    Ok(result)
}

fn deviation_bound(params: &ApproximationParams, scale: f64, real: bool) -> f64 {
    let per_part = DEVIATION_FACTOR * params.epsilon * scale;
    if real {
        per_part
    } else {
        per_part * std::f64::consts::SQRT_2
    }
}

fn empty_audit(params: &ApproximationParams) -> ApproximationAudit {
    ApproximationAudit {
        first_constrained: params.prefix_cutoff + 1,
        delta_ok: vec![],
        curvature_ok: vec![],
        delta_pass: true,
        curvature_pass: true,
        interval_nonempty: true,
        sign_flip_violations: 0,
        sup_deviation: 0.0,
        deviation_bound: 0.0,
        within_bound: true,
        all_pass: true,
    }
}

struct PartAudit {
    delta_ok: Vec<bool>,
    curvature_ok: Vec<bool>,
    interval_nonempty: bool,
    sign_flip_violations: usize,
}

// Differences of stored values carry rounding of a few ulps of the operands.
fn rounding_slack(values: &[f64]) -> f64 {
    8.0 * f64::EPSILON * values.iter().map(|v| v.abs()).sum::<f64>()
}

fn audit_part(x: &[f64], y: &[f64], params: &ApproximationParams) -> PartAudit {
    let first = params.prefix_cutoff + 1;
    let mut out = PartAudit {
        delta_ok: Vec::new(),
        curvature_ok: Vec::new(),
        interval_nonempty: true,
        sign_flip_violations: 0,
    };
    for n in first.max(2)..y.len() {
        let nf = n as f64;
        let slack = rounding_slack(&[y[n], y[n - 1], y[n - 2]]);
        let step = y[n] - y[n - 1];
        let prev_step = y[n - 1] - y[n - 2];
        out.delta_ok.push(step.abs() <= 1.0 / nf + slack);
        out.curvature_ok
            .push((step - prev_step).abs() <= params.c / (nf * nf) + slack);
        let (lo, hi) = step_interval(prev_step, n, params.c);
        if lo > hi + slack {
            out.interval_nonempty = false;
        }
    }
    for n in params.prefix_cutoff..y.len().saturating_sub(1) {
        let before = x[n] - y[n];
        let after = x[n + 1] - y[n + 1];
        let flipped = (before < 0.0 && after >= 0.0) || (before > 0.0 && after <= 0.0);
        let slack = rounding_slack(&[x[n + 1], y[n + 1]]);
        if flipped && after.abs() > 2.0 / (n as f64 + 1.0) + slack {
            out.sign_flip_violations += 1;
        }
    }
    out
}

/// Recomputes every constraint of the construction from `x` and
/// `result.y`, in the normalised units the construction used.
pub fn verify_approximation(
    x: &EigenvalueSequence,
    result: &ApproximationResult,
) -> Result<ApproximationAudit> {
    if x.len() != result.y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: result.y.len(),
        });
    }
    let params = &result.params;
    let scale = result.scale;
    let part = |v: Vec<f64>| -> Vec<f64> { v.into_iter().map(|t| t / scale).collect() };

    let mut audit = empty_audit(params);
    let parts = if x.is_real() && result.y.is_real() {
        vec![(x.re(), result.y.re())]
    } else {
        vec![(x.re(), result.y.re()), (x.im(), result.y.im())]
    };
    let mut first = true;
    for (xs, ys) in parts {
        let a = audit_part(&part(xs), &part(ys), params);
        if first {
            audit.delta_ok = a.delta_ok;
            audit.curvature_ok = a.curvature_ok;
            first = false;
        } else {
            for (acc, ok) in audit.delta_ok.iter_mut().zip(a.delta_ok) {
                *acc &= ok;
            }
            for (acc, ok) in audit.curvature_ok.iter_mut().zip(a.curvature_ok) {
                *acc &= ok;
            }
        }
        audit.interval_nonempty &= a.interval_nonempty;
        audit.sign_flip_violations += a.sign_flip_violations;
    }
    audit.first_constrained = params.prefix_cutoff.max(1) + 1;
    audit.delta_pass = audit.delta_ok.iter().all(|&b| b);
    audit.curvature_pass = audit.curvature_ok.iter().all(|&b| b);
    audit.sup_deviation = x
        .values()
        .iter()
        .zip(result.y.values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    audit.deviation_bound = result.deviation_bound;
    audit.within_bound = audit.sup_deviation <= audit.deviation_bound;
    audit.all_pass = audit.delta_pass
        && audit.curvature_pass
        && audit.interval_nonempty
        && audit.sign_flip_violations == 0
        && audit.within_bound;
    Ok(audit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn choose_c_examples() {
        assert_relative_eq!(choose_c(0.1).unwrap(), 84.0, epsilon = 1e-12);
        assert_eq!(choose_c(2.0).unwrap(), 8.0);
        assert_eq!(choose_c(100.0).unwrap(), 5.0);
        assert!(matches!(choose_c(0.0), Err(Error::Domain(_))));
        assert!(matches!(choose_c(-1.0), Err(Error::Domain(_))));
        assert!(matches!(choose_c(f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn find_m_small_case() {
        assert_eq!(find_m(8.0, 8).unwrap(), 9);
        assert!(matches!(find_m(8.0, 7), Err(Error::Precondition(_))));
        assert!(matches!(find_m(4.0, 8), Err(Error::Precondition(_))));
    }

    #[test]
    fn e_value_small_case() {
        let e = e_value(8.0, 8, 9).unwrap();
        assert_relative_eq!(e, 1.0 / 8.0 - 8.0 / 81.0, epsilon = 1e-15);
        assert!(matches!(e_value(8.0, 8, 10), Err(Error::Precondition(_))));
    }

    #[test]
    fn bracket_is_diagnostic_only() {
        let d = block_diagnostics(8.0, 8).unwrap();
        assert_eq!(d.m, 9);
        assert!(!d.in_bracket);
        assert!(d.r < 1.0);
    }

    #[test]
    fn params_cutoff() {
        let p = ApproximationParams::for_epsilon(0.1).unwrap();
        assert_eq!(p.prefix_cutoff, 84);
        let p = ApproximationParams::for_epsilon(0.01).unwrap();
        assert_eq!(p.prefix_cutoff, 804);
        let p = ApproximationParams::for_epsilon(1.0).unwrap();
        assert_eq!(p.prefix_cutoff, 12);
    }

    #[test]
    fn constant_input_is_fixed_point() {
        let x = EigenvalueSequence::from_real(&[0.7; 500]).unwrap();
        let r = project_to_d2(&x, 0.1).unwrap();
        assert_eq!(r.y, x);
        assert_eq!(r.sup_deviation, 0.0);
        assert!(r.audit.all_pass);
    }

    #[test]
    fn rejects_bad_inputs() {
        let x = EigenvalueSequence::from_real(&[0.0; 10]).unwrap();
        assert!(matches!(project_to_d2(&x, 0.0), Err(Error::Domain(_))));
        let short = EigenvalueSequence::from_real(&[0.0; 2]).unwrap();
        assert!(matches!(
            project_to_d2(&short, 0.1),
            Err(Error::WindowTooShort { .. })
        ));
    }

    #[test]
    fn corrupted_step_fails_delta_clause() {
        let x = EigenvalueSequence::from_real_fn(400, |n| ((n + 1) as f64).ln().sin()).unwrap();
        let mut r = project_to_d2(&x, 0.1).unwrap();
        assert!(r.audit.all_pass);
        let idx = 200;
        let mut values = r.y.clone().into_values();
        values[idx] += 3.0 / idx as f64;
        r.y = EigenvalueSequence::new(values).unwrap();
        let audit = verify_approximation(&x, &r).unwrap();
        assert!(!audit.delta_pass);
        assert!(!audit.delta_ok[idx - audit.first_constrained]);
        assert!(!audit.all_pass);
    }

    #[test]
    fn identity_on_alternating_fails_curvature_clause() {
        let x =
            EigenvalueSequence::from_real_fn(300, |n| if n % 2 == 0 { 1.0 } else { -1.0 }).unwrap();
        let mut r = project_to_d2(&x, 0.1).unwrap();
        assert!(r.audit.all_pass);
        r.y = x.clone();
        r.scale = 1.0;
        let audit = verify_approximation(&x, &r).unwrap();
        assert!(!audit.curvature_pass);
    }

    #[test]
    fn length_mismatch_is_reported() {
        let x = EigenvalueSequence::from_real(&[0.0; 10]).unwrap();
        let r = project_to_d2(&x, 0.5).unwrap();
        let shorter = x.prefix(9);
        assert!(matches!(
            verify_approximation(&shorter, &r),
            Err(Error::LengthMismatch { left: 9, right: 10 })
        ));
    }

    #[test]
    fn complex_input_handled_per_part() {
        let x = EigenvalueSequence::from_fn(2000, |n| {
            let t = ((n + 1) as f64).ln();
            Complex64::new(t.sin(), t.cos())
        })
        .unwrap();
        let r = project_to_d2(&x, 0.1).unwrap();
        assert!(r.audit.all_pass, "{:?}", r.audit.sup_deviation);
        assert_relative_eq!(
            r.deviation_bound,
            0.5 * std::f64::consts::SQRT_2,
            epsilon = 1e-12
        );
    }
}
