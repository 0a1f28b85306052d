//! Eigenvalue sequences of radial Toeplitz operators.
//!
//! The Toeplitz operator with radial symbol `b` is diagonal with
//! `λ_n = (n+1) ∫_0^1 b(√t) t^n dt`. The substitution `u = t^{n+1}` turns
//! this into `∫_0^1 b(u^{1/(n+1)}) du`, so the weight no longer piles up at
//! `t = 1` as `n` grows.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::check::{all_hold, Clause};
use crate::error::{Error, Result};
use crate::quadrature::{Integrator, QuadratureConfig};
use crate::sequences::{d2_seminorm, difference_slice, EigenvalueSequence};
use crate::symbol::{RadialFunction, RadialSymbol, SymbolKind};

/// `λ_n` for `n < len` by adaptive quadrature in the substituted variable.
pub fn eigenvalues_of_radial<F: RadialFunction + ?Sized>(
    f: &F,
    len: usize,
    integrator: &Integrator,
) -> Result<Vec<f64>> {
    let breaks = f.breakpoints_t();
    (0..len)
        .into_par_iter()
        .map(|n| {
            let p = (n + 1) as f64;
            let mut pts = vec![0.0];
            for &t in &breaks {
                let u = t.powf(p);
                if u > 0.0 && u < 1.0 {
                    pts.push(u);
                }
            }
            pts.push(1.0);
            pts.sort_by(f64::total_cmp);
            pts.dedup();
            let integrand = |u: f64| {
                let t = if u > 0.0 { (u.ln() / p).exp() } else { 0.0 };
                f.eval_t(t)
            };
            Ok(integrator.integrate(integrand, &pts)?.value)
        })
        .collect()
}

fn piecewise_eigenvalue(breakpoints: &[f64], values: &[f64], n: usize) -> f64 {
    let p = (n + 1) as i32;
    values
        .iter()
        .enumerate()
        .map(|(j, c)| c * (breakpoints[j + 1].powi(p) - breakpoints[j].powi(p)))
        .sum()
}

/// Eigenvalue window `λ_0 .. λ_{len-1}` of the Toeplitz operator `T_b`.
/// Piecewise-constant symbols use exact antiderivatives; every other
/// variant goes through quadrature.
pub fn eigenvalues_of_symbol(
    b: &RadialSymbol,
    len: usize,
    config: &QuadratureConfig,
) -> Result<EigenvalueSequence> {
    if len == 0 {
        return Err(Error::WindowTooShort { needed: 1, got: 0 });
    }
    let values = match b.kind() {
        SymbolKind::Piecewise {
            breakpoints,
            values,
        } => (0..len)
            .map(|n| piecewise_eigenvalue(breakpoints, values, n))
            .collect(),
        _ => eigenvalues_of_radial(b, len, &Integrator::new(*config)?)?,
    };
    EigenvalueSequence::from_real(&values)
}

/// `max_n |λ_n|`, the norm of the diagonal operator restricted to the
/// window.
pub fn sup_norm_estimate(lambda: &EigenvalueSequence) -> f64 {
    lambda.sup_norm().value
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LconReport {
    /// `sup_t |G(t)| / (1 - t)` over the grid, `G(t) = ∫_t^1 b(√x) dx`.
    pub constant: f64,
    pub argmax_t: f64,
    pub grid_points: usize,
}

/// The sample points: `i / grid` for `i < grid` together with
/// `1 - 2^{-j}` for `j = 1..=52`.
pub fn lcon_grid(grid: usize) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..grid).map(|i| i as f64 / grid as f64).collect();
    pts.extend((1..=52).map(|j| 1.0 - 0.5f64.powi(j)));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn tail_integral(b: &RadialSymbol, t: f64, integrator: &Integrator) -> Result<f64> {
    if let SymbolKind::Piecewise {
        breakpoints,
        values,
    } = b.kind()
    {
        return Ok(values
            .iter()
            .enumerate()
            .map(|(j, c)| c * (breakpoints[j + 1] - breakpoints[j].max(t)).max(0.0))
            .sum());
    }
    let mut pts = vec![t];
    pts.extend(b.breakpoints_t().into_iter().filter(|&p| p > t));
    pts.push(1.0);
    Ok(integrator.integrate(|x| b.eval_t(x), &pts)?.value)
}

/// The constant of the averaged-symbol condition
/// `|∫_t^1 b(√x) dx| <= C (1 - t)`, estimated on [`lcon_grid`].
pub fn lcon_constant(
    b: &RadialSymbol,
    grid: usize,
    config: &QuadratureConfig,
) -> Result<LconReport> {
    if grid < 2 {
        return Err(Error::Domain(format!(
            "lcon grid must have at least 2 points, got {grid}"
        )));
    }
    let integrator = Integrator::new(*config)?;
    let pts = lcon_grid(grid);
    let ratios: Vec<f64> = pts
        .par_iter()
        .map(|&t| Ok(tail_integral(b, t, &integrator)?.abs() / (1.0 - t)))
        .collect::<Result<_>>()?;
    let (i, constant) =
        ratios.iter().copied().enumerate().fold(
            (0, 0.0),
            |best, (i, v)| if v > best.1 { (i, v) } else { best },
        );
    Ok(LconReport {
        constant,
        argmax_t: pts[i],
        grid_points: pts.len(),
    })
}

pub const LCON_CHECK_GRID: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorollaryReport {
    pub len: usize,
    pub lcon: LconReport,
    pub sup_bound: f64,
    pub sup_norm: f64,
    pub d2: f64,
    pub d2_argmax: usize,
    /// `max_{1 <= n <= N-2} (n+2)² |Δ²_{n-1} λ|`.
    pub shifted_d2: f64,
    pub shifted_d2_argmax: usize,
    pub tol: f64,
    pub clauses: Vec<Clause>,
    pub all_pass: bool,
}

/// Computes `λ(b)` on a window of `len` entries and checks
/// `‖λ‖_∞ <= C`, `‖λ‖_{d2} <= 10 C` and
/// `(n+2)² |Δ²_{n-1} λ| <= 8 ‖b‖_∞`, each up to `10 · abs_tol · len`.
/// Failures are reported in the clauses, not as errors.
pub fn corollary_bounds_check(
    b: &RadialSymbol,
    len: usize,
    config: &QuadratureConfig,
) -> Result<CorollaryReport> {
    if len < 3 {
        return Err(Error::WindowTooShort {
            needed: 3,
            got: len,
        });
    }
    let lambda = eigenvalues_of_symbol(b, len, config)?;
    let lcon = lcon_constant(b, LCON_CHECK_GRID, config)?;
    let tol = 10.0 * config.abs_tol * len as f64;
    let sup_norm = sup_norm_estimate(&lambda);
    let d2 = d2_seminorm(&lambda)?;
    let values = lambda.values();
    let (mut shifted_d2, mut shifted_d2_argmax) = (0.0, 1);
    for n in 1..len - 1 {
        let w = (n + 2) as f64;
        let v = w * w * difference_slice(values, 2, n - 1).norm();
        if v > shifted_d2 {
            shifted_d2 = v;
            shifted_d2_argmax = n;
        }
    }
    let clauses = vec![
        Clause::at_most("sup_norm <= C", sup_norm, lcon.constant + tol),
        Clause::at_most("d2 <= 10 C", d2.value, 10.0 * lcon.constant + tol),
        Clause::at_most(
            "(n+2)^2 |D2_(n-1)| <= 8 sup_bound",
            shifted_d2,
            8.0 * b.sup_bound() + tol,
        ),
    ];
    Ok(CorollaryReport {
        len,
        lcon,
        sup_bound: b.sup_bound(),
        sup_norm,
        d2: d2.value,
        d2_argmax: d2.argmax,
        shifted_d2,
        shifted_d2_argmax,
        tol,
        all_pass: all_hold(&clauses),
        clauses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn constant_symbol_has_unit_moments() {
        let l = eigenvalues_of_symbol(&RadialSymbol::constant(1.0).unwrap(), 20, &cfg()).unwrap();
        for v in l.values() {
            assert!((v.re - 1.0).abs() < 1e-13);
        }
        assert!((sup_norm_estimate(&l) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn power_symbol_matches_beta_integral() {
        let l = eigenvalues_of_symbol(&RadialSymbol::power(1.0).unwrap(), 30, &cfg()).unwrap();
        for (n, v) in l.values().iter().enumerate() {
            let exact = (n as f64 + 1.0) / (n as f64 + 2.0);
            assert!((v.re - exact).abs() < 1e-10, "n = {n}: {}", v.re - exact);
        }
        assert!((sup_norm_estimate(&l) - 30.0 / 31.0).abs() < 1e-10);
    }

    #[test]
    fn indicator_uses_exact_formula() {
        let l =
            eigenvalues_of_symbol(&RadialSymbol::indicator_from(0.3).unwrap(), 10, &cfg()).unwrap();
        for (n, v) in l.values().iter().enumerate() {
            assert!((v.re - (1.0 - 0.3f64.powi(n as i32 + 1))).abs() < 1e-15);
        }
    }

    #[test]
    fn sup_norm_of_explicit_window() {
        let l = EigenvalueSequence::from_real(&[3.0, -1.0, 0.0]).unwrap();
        assert_eq!(sup_norm_estimate(&l), 3.0);
    }

    #[test]
    fn lcon_examples() {
        let one = lcon_constant(&RadialSymbol::constant(1.0).unwrap(), 64, &cfg()).unwrap();
        assert!((one.constant - 1.0).abs() < 1e-12);
        let ind = lcon_constant(&RadialSymbol::indicator_from(0.5).unwrap(), 64, &cfg()).unwrap();
        assert!((ind.constant - 1.0).abs() < 1e-12);
        let sq = lcon_constant(&RadialSymbol::power(1.0).unwrap(), 64, &cfg()).unwrap();
        assert!(sq.constant < 1.0 && sq.constant > 1.0 - 1e-9);
        assert!(lcon_constant(&RadialSymbol::constant(1.0).unwrap(), 1, &cfg()).is_err());
    }

    #[test]
    fn bounds_hold_for_constant_and_indicator() {
        for b in [
            RadialSymbol::constant(1.0).unwrap(),
            RadialSymbol::indicator_from(0.5).unwrap(),
        ] {
            let r = corollary_bounds_check(&b, 100, &cfg()).unwrap();
            assert!(r.all_pass, "{r:?}");
            assert!((r.lcon.constant - 1.0).abs() < 1e-12);
        }
    }
}
