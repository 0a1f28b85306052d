//! Eigenvalues of the Toeplitz iterate `T_{B_k(S)}` through an exact kernel.
//!
//! Integrating the series profile against `(m+1) t^m` term by term gives
//! Beta integrals, so `λ_m(T_{B_k(S)}) = Σ_n A_{mn} λ_n` with
//!
//! ```text
//! A_{mn} = (m+1)(k+1)/(n+1) Σ_{j<=min(k,n)} (-1)^j C(k,j) C(n-j+k+1, k+1)²
//!          · (p-j)! (k+2)! / (p-j+k+3)!,      p = m + n.
//! ```
//!
//! The alternating sum cancels catastrophically in floating point (the
//! ratio of the absolute sum to the result exceeds `1e40` at `k = 30`), so
//! each entry is formed over a common denominator in big-integer arithmetic
//! and rounded once. The matrix is symmetric with non-negative entries and
//! unit row sums; the window is extended by its last value through the row
//! mass that falls outside it.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequences::EigenvalueSequence;
use crate::summation::ComplexNeumaierSum;

fn product(lo: u64, hi: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in lo..=hi {
        acc *= i;
    }
    acc
}

/// Nearest `f64` to `num / den` (to within an ulp or two).
fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift_n = num.bits().saturating_sub(64);
    let shift_d = den.bits().saturating_sub(64);
    let n = (num >> shift_n).to_u64().expect("fits in 64 bits") as f64;
    let d = (den >> shift_d).to_u64().expect("fits in 64 bits") as f64;
    let e = shift_n as i64 - shift_d as i64;
    let mut v = n / d;
    // Scale in steps so intermediate powers of two stay finite.
    let mut e = e;
    while e > 0 {
        let step = e.min(1000);
        v *= 2f64.powi(step as i32);
        e -= step;
    }
    while e < 0 {
        let step = (-e).min(1000);
        v /= 2f64.powi(step as i32);
        e += step;
    }
    v
}

/// One kernel entry `A_{mn}` for the k-th iterate.
pub fn kernel_entry(k: usize, m: usize, n: usize) -> f64 {
    let (k, m, n) = (k as u64, m as u64, n as u64);
    let p = m + n;
    let big_j = k.min(n);
    let denominator = product(p - big_j + 1, p + k + 3) * (n + 1);

    let mut lower = product(p - big_j + 1, p);
    let mut upper = BigUint::one();
    let mut choose_k = BigUint::one();
    // C(q, k+1) with q = n - j + k + 1.
    let mut choose_q = product(n + 1, n + k + 1) / product(1, k + 1);
    let mut positive = BigUint::zero();
    let mut negative = BigUint::zero();
    for j in 0..=big_j {
        let term = &choose_k * &choose_q * &choose_q * &lower * &upper;
        if j % 2 == 0 {
            positive += term;
        } else {
            negative += term;
        }
        if j == big_j {
            break;
        }
        lower /= p - j;
        upper *= p - j + k + 3;
        choose_k = choose_k * (k - j) / (j + 1);
        let q = n - j + k + 1;
        choose_q = choose_q * (n - j) / q;
    }
    let prefactor = product(1, k + 2) * ((m + 1) * (k + 1));
    if positive >= negative {
        ratio_to_f64(&((positive - negative) * &prefactor), &denominator)
    } else {
        -ratio_to_f64(&((negative - positive) * &prefactor), &denominator)
    }
}

/// The `rows × cols` leading block of the kernel, with each row's mass
/// outside the block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterateKernel {
    pub k: usize,
    pub rows: usize,
    pub cols: usize,
    entries: Vec<f64>,
    pub tail_mass: Vec<f64>,
}

impl IterateKernel {
    pub fn new(k: usize, rows: usize, cols: usize) -> Self {
        let square = rows.min(cols);
        // Symmetry: compute the upper triangle of the square block once.
        let upper: Vec<Vec<f64>> = (0..square)
            .into_par_iter()
            .map(|m| (m..square).map(|n| kernel_entry(k, m, n)).collect())
            .collect();
        let entries: Vec<f64> = (0..rows)
            .into_par_iter()
            .flat_map_iter(|m| {
                let upper = &upper;
                (0..cols).map(move |n| {
                    if m < square && n < square {
                        let (a, b) = if m <= n { (m, n) } else { (n, m) };
                        upper[a][b - a]
                    } else {
                        kernel_entry(k, m, n)
                    }
                })
            })
            .collect();
        let tail_mass = entries
            .chunks(cols.max(1))
            .take(rows)
            .map(|row| 1.0 - row.iter().sum::<f64>())
            .collect();
        Self {
            k,
            rows,
            cols,
            entries,
            tail_mass,
        }
    }

    pub fn entry(&self, m: usize, n: usize) -> f64 {
        self.entries[m * self.cols + n]
    }

    pub fn row(&self, m: usize) -> &[f64] {
        &self.entries[m * self.cols..(m + 1) * self.cols]
    }

    pub fn max_tail_mass(&self) -> f64 {
        self.tail_mass.iter().copied().fold(0.0, f64::max)
    }

    /// `Σ_{n<cols} A_{mn} λ_n + λ_{cols-1} · tail_m` for `m < rows`.
    pub fn apply(&self, lambda: &EigenvalueSequence) -> Result<Vec<Complex64>> {
        if lambda.len() != self.cols {
            return Err(Error::LengthMismatch {
                left: lambda.len(),
                right: self.cols,
            });
        }
        let l = lambda.values();
        let c = lambda.last();
        Ok((0..self.rows)
            .map(|m| {
                let mut acc = ComplexNeumaierSum::new();
                for (a, v) in self.row(m).iter().zip(l) {
                    acc.add(v * *a);
                }
                acc.add(c * self.tail_mass[m]);
                acc.value()
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IterateOptions {
    /// Row mass beyond the window above which the result counts as relying
    /// on the extension.
    pub tail_tol: f64,
    pub strict_window: bool,
}

impl Default for IterateOptions {
    fn default() -> Self {
        Self {
            tail_tol: 1e-12,
            strict_window: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterateResult {
    pub k: usize,
    pub values: EigenvalueSequence,
    pub max_tail_mass: f64,
    pub window_extended: bool,
}

/// `λ_m(T_{B_k(S)})` for `m < len`, with `S` the radial operator whose
/// eigenvalue window `lambda` is extended by its last value.
pub fn berezin_iterate_eigenvalues(
    lambda: &EigenvalueSequence,
    k: usize,
    len: usize,
    opts: &IterateOptions,
) -> Result<IterateResult> {
    if len == 0 {
        return Err(Error::WindowTooShort { needed: 1, got: 0 });
    }
    let kernel = IterateKernel::new(k, len, lambda.len());
    let result = iterate_with_kernel(&kernel, lambda, opts)?;
    if result.window_extended {
        log::warn!(
            "k = {k}: up to {:.3e} of the kernel mass lies past the window; extending by the last value",
            result.max_tail_mass
        );
    }
    Ok(result)
}

pub(crate) fn iterate_with_kernel(
    kernel: &IterateKernel,
    lambda: &EigenvalueSequence,
    opts: &IterateOptions,
) -> Result<IterateResult> {
    let max_tail_mass = kernel.max_tail_mass();
    let spread = lambda
        .values()
        .iter()
        .map(|v| (v - lambda.last()).norm())
        .fold(0.0, f64::max);
    let window_extended = max_tail_mass > opts.tail_tol && spread > 0.0;
    if window_extended {
        if opts.strict_window {
            return Err(Error::StrictWindow {
                needed: lambda.len() + 1,
                got: lambda.len(),
            });
        }
    }
    Ok(IterateResult {
        k: kernel.k,
        values: EigenvalueSequence::new(kernel.apply(lambda)?)?,
        max_tail_mass,
        window_extended,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn berezin_kernel_closed_form() {
        // k = 0: A_{mn} = 2(m+1)(n+1) / ((p+1)(p+2)(p+3)).
        for m in 0..6 {
            for n in 0..6 {
                let p = (m + n) as f64;
                let exact =
                    2.0 * (m as f64 + 1.0) * (n as f64 + 1.0) / ((p + 1.0) * (p + 2.0) * (p + 3.0));
                assert!((kernel_entry(0, m, n) - exact).abs() < 1e-16);
            }
        }
    }

    #[test]
    fn symmetric_nonnegative_unit_rows() {
        for k in [1, 4, 17] {
            let kern = IterateKernel::new(k, 8, 3000);
            for m in 0..8 {
                for n in 0..8 {
                    assert!((kern.entry(m, n) - kern.entry(n, m)).abs() <= 1e-15);
                    assert!(kern.entry(m, n) >= 0.0);
                }
                assert!(
                    kern.tail_mass[m] > -1e-13 && kern.tail_mass[m] < 0.1,
                    "k={k} m={m}"
                );
            }
        }
    }

    #[test]
    fn identity_is_fixed() {
        let one = EigenvalueSequence::from_real(&[1.0; 12]).unwrap();
        for k in [0, 5, 30] {
            let r = berezin_iterate_eigenvalues(&one, k, 12, &IterateOptions::default()).unwrap();
            assert!(!r.window_extended);
            for v in r.values.values() {
                assert!((v.re - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn ratio_rounding() {
        let num = BigUint::from(1u64) << 2000;
        let den = (BigUint::from(3u64)) << 2000;
        assert!((ratio_to_f64(&num, &den) - 1.0 / 3.0).abs() < 1e-16);
    }
}
