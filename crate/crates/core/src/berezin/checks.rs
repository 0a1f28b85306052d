//! Diagnostics built on the Berezin transforms: convergence of the Toeplitz
//! iterates, the invariant-Laplacian identities, commutation of transforms,
//! and agreement of the operator-side series with the symbol-side integral.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laplacian::gamma_of_lambda;
use crate::moments::eigenvalues_of_symbol;
use crate::sequences::EigenvalueSequence;
use crate::symbol::{RadialFunction, RadialSymbol};

use super::kernel::{iterate_with_kernel, IterateKernel, IterateOptions};
use super::profile::{BerezinProfile, ProfileOptions};
use super::quadrature::{berezin_of_radial_symbol_at, TabulatedTransform, TransformConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub k: usize,
    /// `max_{m<N} |λ_m(T_{B_k(S)}) - λ_m|`.
    pub deviation: f64,
    pub deviation_argmax: usize,
    /// `max_{m<N} |λ_m(T_{B_k(S)})|`.
    pub sup_norm: f64,
    /// `max |γ|` of the iterate's window: the radial stand-in for
    /// `‖T_{Δ̃ B_k(S)}‖`.
    pub gamma_proxy: f64,
    pub max_tail_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub len: usize,
    pub input_sup_norm: f64,
    pub rows: Vec<ConvergenceRow>,
    pub initial_deviation: f64,
    pub final_deviation: f64,
    /// `final / initial`; zero when the initial deviation is zero.
    pub ratio: f64,
    pub monotone_nonincreasing: bool,
    /// Every iterate's window sup is at most the input sup (up to `1e-10`).
    pub contraction_holds: bool,
    pub window_extended: bool,
}

/// Deviation of `T_{B_k(S)}` from `S` on the first `len` eigenvalues, for
/// `k = 0..=k_max`.
pub fn convergence_report(
    lambda: &EigenvalueSequence,
    k_max: usize,
    len: usize,
    opts: &IterateOptions,
) -> Result<ConvergenceReport> {
    if len == 0 || len > lambda.len() {
        return Err(Error::Range(format!(
            "comparison length {len} must lie in 1..={}",
            lambda.len()
        )));
    }
    let rows: Vec<ConvergenceRow> = (0..=k_max)
        .into_par_iter()
        .map(|k| {
            let kernel = IterateKernel::new(k, len, lambda.len());
            let it = iterate_with_kernel(&kernel, lambda, opts)?;
            let (mut deviation, mut deviation_argmax) = (0.0, 0);
            for (m, (a, b)) in it.values.values().iter().zip(lambda.values()).enumerate() {
                let d = (a - b).norm();
                if d > deviation {
                    deviation = d;
                    deviation_argmax = m;
                }
            }
            let gamma_proxy = if len >= 2 {
                gamma_of_lambda(&it.values)?.sup_norm()
            } else {
                0.0
            };
            Ok(ConvergenceRow {
                k,
                deviation,
                deviation_argmax,
                sup_norm: it.values.sup_norm().value,
                gamma_proxy,
                max_tail_mass: it.max_tail_mass,
            })
        })
        .collect::<Result<_>>()?;
    let input_sup_norm = lambda.sup_norm().value;
    let initial_deviation = rows[0].deviation;
    let final_deviation = rows[rows.len() - 1].deviation;
    let ratio = if initial_deviation > 0.0 {
        final_deviation / initial_deviation
    } else {
        0.0
    };
    let monotone_nonincreasing = rows
        .windows(2)
        .all(|w| w[1].deviation <= w[0].deviation * (1.0 + 1e-12) + 1e-15);
    let contraction_holds = rows.iter().all(|r| r.sup_norm <= input_sup_norm + 1e-10);
    let spread = lambda
        .values()
        .iter()
        .map(|v| (v - lambda.last()).norm())
        .fold(0.0, f64::max);
    let window_extended = spread > 0.0 && rows.iter().any(|r| r.max_tail_mass > opts.tail_tol);
    if window_extended {
        let worst = rows.iter().map(|r| r.max_tail_mass).fold(0.0, f64::max);
        log::warn!(
            "up to {worst:.3e} of the kernel mass lies past the window of {}; extending by the last value",
            lambda.len()
        );
    }
    Ok(ConvergenceReport {
        len,
        input_sup_norm,
        rows,
        initial_deviation,
        final_deviation,
        ratio,
        monotone_nonincreasing,
        contraction_holds,
        window_extended,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityRow {
    pub r: f64,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: String,
    pub k: usize,
    pub rows: Vec<IdentityRow>,
    pub max_residual: f64,
    pub window_extended: bool,
}

fn identity_report(
    identity: &str,
    k: usize,
    radii: &[f64],
    window_extended: bool,
    lhs: impl Fn(f64) -> Complex64,
    rhs: impl Fn(f64) -> Complex64,
) -> Result<IdentityReport> {
    check_radii(radii)?;
    let rows: Vec<IdentityRow> = radii
        .iter()
        .map(|&r| {
            let (l, h) = (lhs(r), rhs(r));
            IdentityRow {
                r,
                lhs: l,
                rhs: h,
                residual: (l - h).norm(),
            }
        })
        .collect();
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(IdentityReport {
        identity: identity.to_string(),
        k,
        rows,
        max_residual,
        window_extended,
    })
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::Domain(
            "at least one sample radius is required".into(),
        ));
    }
    if let Some(r) = radii.iter().find(|r| !(0.0..1.0).contains(*r)) {
        return Err(Error::Domain(format!("sample radius {r} outside [0, 1)")));
    }
    Ok(())
}

/// `Δ̃ B_k(S)` against `(k+1)(k+2)(B_k(S) - B_{k+1}(S))`.
pub fn laplacian_identity_check(
    lambda: &EigenvalueSequence,
    k: usize,
    radii: &[f64],
    opts: &ProfileOptions,
) -> Result<IdentityReport> {
    let pk = BerezinProfile::new(lambda, k, opts)?;
    let pk1 = BerezinProfile::new(lambda, k + 1, opts)?;
    let w = ((k + 1) * (k + 2)) as f64;
    identity_report(
        "laplacian_of_profile = (k+1)(k+2)(B_k - B_(k+1))",
        k,
        radii,
        pk.window_extended || pk1.window_extended,
        |r| pk.invariant_laplacian(r),
        |r| w * (pk.eval(r) - pk1.eval(r)),
    )
}

/// The window extended by `extra` copies of its last value.
fn padded(lambda: &EigenvalueSequence, extra: usize) -> EigenvalueSequence {
    lambda.extended(lambda.len() + extra, lambda.last())
}

/// `Δ̃ B_k(S)` against `B_k(Δ̃S)`, where `Δ̃S` has eigenvalues `γ(λ)`.
/// The window is padded so that `γ` of the extended operator is finitely
/// supported and fully captured.
pub fn laplacian_commutes_check(
    lambda: &EigenvalueSequence,
    k: usize,
    radii: &[f64],
    opts: &ProfileOptions,
) -> Result<IdentityReport> {
    let pk = BerezinProfile::new(lambda, k, opts)?;
    let gamma = gamma_of_lambda(&padded(lambda, 3))?;
    let gamma_seq = EigenvalueSequence::new(gamma.values().to_vec())?;
    let pg = BerezinProfile::new(&gamma_seq, k, opts)?;
    identity_report(
        "laplacian_of_profile = B_k(gamma operator)",
        k,
        radii,
        pk.window_extended || pg.window_extended,
        |r| pk.invariant_laplacian(r),
        |r| pg.eval(r),
    )
}

/// `Δ̃ B_0(S)(r)` against `(1-r²)² Σ_n γ_n (n+1) r^{2n}`.
pub fn gamma_series_check(
    lambda: &EigenvalueSequence,
    radii: &[f64],
    opts: &ProfileOptions,
) -> Result<IdentityReport> {
    let p0 = BerezinProfile::new(lambda, 0, opts)?;
    let gamma = gamma_of_lambda(&padded(lambda, 2))?;
    let series = |r: f64| {
        let x = r * r;
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, g) in gamma.values().iter().enumerate().rev() {
            acc = acc * x + g * (n as f64 + 1.0);
        }
        (1.0 - x) * (1.0 - x) * acc
    };
    identity_report(
        "laplacian_of_B0 = (1-r^2)^2 sum gamma_n (n+1) r^(2n)",
        0,
        radii,
        p0.window_extended,
        |r| p0.invariant_laplacian(r),
        series,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValidationRow {
    pub k: usize,
    pub r: f64,
    pub series: f64,
    pub quadrature: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValidationReport {
    pub window: usize,
    pub rows: Vec<CrossValidationRow>,
    pub max_residual: f64,
}

/// Series transform of `T_b` (eigenvalues on a window of `window` entries)
/// against the symbol-side integral of `b`, for each `k` and radius.
pub fn cross_validate(
    b: &RadialSymbol,
    ks: &[usize],
    radii: &[f64],
    window: usize,
    profile_opts: &ProfileOptions,
    cfg: &TransformConfig,
) -> Result<CrossValidationReport> {
    check_radii(radii)?;
    let lambda = eigenvalues_of_symbol(b, window, &cfg.radial)?;
    let mut rows = Vec::new();
    for &k in ks {
        let profile = BerezinProfile::new(&lambda, k, profile_opts)?;
        let quad = berezin_of_radial_symbol_at(b, k, radii, cfg)?;
        for (&r, q) in radii.iter().zip(quad) {
            let s = profile.eval(r).re;
            rows.push(CrossValidationRow {
                k,
                r,
                series: s,
                quadrature: q,
                residual: (s - q).abs(),
            });
        }
    }
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(CrossValidationReport {
        window,
        rows,
        max_residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutativityRow {
    pub r: f64,
    /// `B_k(B_j(b))(r)`.
    pub outer_k: f64,
    /// `B_j(B_k(b))(r)`.
    pub outer_j: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutativityReport {
    pub j: usize,
    pub k: usize,
    pub table_points: usize,
    pub rows: Vec<CommutativityRow>,
    pub max_residual: f64,
}

/// `B_k(B_j(f))` against `B_j(B_k(f))` by nested quadrature: each inner
/// transform is tabulated once and shared across radii.
pub fn commutativity_check<F: RadialFunction + ?Sized>(
    f: &F,
    j: usize,
    k: usize,
    radii: &[f64],
    table_points: usize,
    cfg: &TransformConfig,
) -> Result<CommutativityReport> {
    if j == k {
        return Err(Error::Domain(format!(
            "commutativity check needs j != k, got {j} twice"
        )));
    }
    check_radii(radii)?;
    let inner_j = TabulatedTransform::new(f, j, table_points, cfg)?;
    let inner_k = TabulatedTransform::new(f, k, table_points, cfg)?;
    let outer_k = berezin_of_radial_symbol_at(&inner_j, k, radii, cfg)?;
    let outer_j = berezin_of_radial_symbol_at(&inner_k, j, radii, cfg)?;
    let rows: Vec<CommutativityRow> = radii
        .iter()
        .zip(outer_k.into_iter().zip(outer_j))
        .map(|(&r, (a, b))| CommutativityRow {
            r,
            outer_k: a,
            outer_j: b,
            residual: (a - b).abs(),
        })
        .collect();
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(CommutativityReport {
        j,
        k,
        table_points,
        rows,
        max_residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingRow {
    pub n: usize,
    pub r: f64,
    pub value: f64,
    /// `|B_n(f)(r) - f(r)|`.
    pub residual: f64,
}

/// `B_n(f)` against `f` for each `n` and radius; with `f = B_0(S)` this is
/// the pointwise convergence `B_n(B_0(S)) → B_0(S)`.
pub fn smoothing_sweep<F: RadialFunction + ?Sized>(
    f: &F,
    ns: &[usize],
    radii: &[f64],
    cfg: &TransformConfig,
) -> Result<Vec<SmoothingRow>> {
    check_radii(radii)?;
    let per_n: Vec<Vec<f64>> = ns
        .par_iter()
        .map(|&n| berezin_of_radial_symbol_at(f, n, radii, cfg))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(ns.len() * radii.len());
    for (&n, values) in ns.iter().zip(per_n) {
        for (&r, v) in radii.iter().zip(values) {
            rows.push(SmoothingRow {
                n,
                r,
                value: v,
                residual: (v - f.eval_t(r * r)).abs(),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    const RADII: [f64; 4] = [0.0, 0.3, 0.6, 0.9];

    fn harmonic(n: usize) -> EigenvalueSequence {
        EigenvalueSequence::from_real_fn(n, |k| 1.0 / (k as f64 + 1.0)).unwrap()
    }

    #[test]
    fn constant_operator_converges_immediately() {
        let c = EigenvalueSequence::from_real(&[0.3; 20]).unwrap();
        let r = convergence_report(&c, 5, 20, &IterateOptions::default()).unwrap();
        assert!(r.rows.iter().all(|row| row.deviation < 1e-14));
    }

    #[test]
    fn harmonic_iterates_converge() {
        let r = convergence_report(&harmonic(50), 30, 50, &IterateOptions::default()).unwrap();
        assert!(r.final_deviation < 0.5 * r.initial_deviation);
        assert!(r.contraction_holds);
        assert!(r.monotone_nonincreasing);
    }

    #[test]
    fn laplacian_identities_on_harmonic() {
        let l = harmonic(200);
        let o = ProfileOptions::default();
        assert!(
            laplacian_identity_check(&l, 0, &RADII, &o)
                .unwrap()
                .max_residual
                < 1e-7
        );
        assert!(
            laplacian_commutes_check(&l, 1, &RADII, &o)
                .unwrap()
                .max_residual
                < 1e-6
        );
        assert!(gamma_series_check(&l, &RADII, &o).unwrap().max_residual < 1e-7);
    }

    #[test]
    fn identity_for_constant_is_zero() {
        let c = EigenvalueSequence::from_real(&[2.0; 10]).unwrap();
        let rep = laplacian_identity_check(&c, 3, &RADII, &ProfileOptions::default()).unwrap();
        assert!(rep.max_residual == 0.0);
        assert!(rep.rows.iter().all(|r| r.lhs.norm() == 0.0));
    }

    #[test]
    fn commutativity_requires_distinct_orders() {
        let b = RadialSymbol::constant(1.0).unwrap();
        assert!(commutativity_check(&b, 1, 1, &[0.5], 16, &TransformConfig::default()).is_err());
    }
}
