//! Finite-difference calculus on sequence windows.
//!
//! Everything here works on a finite window `x_0 .. x_{N-1}`. Seminorms are
//! suprema over the indices the window supports, so they are lower bounds
//! for the corresponding quantities of any infinite continuation.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binomial::binomial;
use crate::error::{Error, Result};

/// Above this order `difference` switches from the signed binomial sum to
/// repeated first differences.
pub const DIRECT_SUM_MAX_ORDER: usize = 8;

/// A finite window `λ_0 .. λ_{N-1}` standing for the diagonal of a radial
/// operator. Never empty, never NaN or infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SequenceWire", into = "SequenceWire")]
pub struct EigenvalueSequence {
    values: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct SequenceWire {
    pub(crate) values: Vec<Complex64>,
}

impl TryFrom<SequenceWire> for EigenvalueSequence {
    type Error = Error;

    fn try_from(wire: SequenceWire) -> Result<Self> {
        EigenvalueSequence::new(wire.values)
    }
}

impl From<EigenvalueSequence> for SequenceWire {
    fn from(seq: EigenvalueSequence) -> Self {
        SequenceWire { values: seq.values }
    }
}

impl EigenvalueSequence {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::WindowTooShort { needed: 1, got: 0 });
        }
        if let Some(index) = values
            .iter()
            .position(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { values })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Window of length `len` with `x_n = f(n)`.
    pub fn from_fn(len: usize, f: impl Fn(usize) -> Complex64) -> Result<Self> {
        Self::new((0..len).map(f).collect())
    }

    pub fn from_real_fn(len: usize, f: impl Fn(usize) -> f64) -> Result<Self> {
        Self::new((0..len).map(|n| Complex64::new(f(n), 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn get(&self, n: usize) -> Option<Complex64> {
        self.values.get(n).copied()
    }

    pub fn last(&self) -> Complex64 {
        self.values[self.values.len() - 1]
    }

    pub fn re(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn im(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.im).collect()
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    /// Leading `len` entries; `len` is clamped to `1..=N`.
    pub fn prefix(&self, len: usize) -> Self {
        let len = len.clamp(1, self.len());
        Self {
            values: self.values[..len].to_vec(),
        }
    }

    /// Pads with `value` up to `len` entries (no-op when already that long).
    pub fn extended(&self, len: usize, value: Complex64) -> Self {
        let mut values = self.values.clone();
        if values.len() < len {
            values.resize(len, value);
        }
        Self { values }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// `max_n |x_n|` with its index.
    pub fn sup_norm(&self) -> Seminorm {
        argmax(self.values.iter().map(|v| v.norm()))
    }
}

/// A window supremum together with the index where it is attained (first
/// index on ties).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Seminorm {
    pub value: f64,
    pub argmax: usize,
}

fn argmax(values: impl Iterator<Item = f64>) -> Seminorm {
    let mut best = Seminorm {
        value: 0.0,
        argmax: 0,
    };
    for (i, v) in values.enumerate() {
        if v > best.value {
            best = Seminorm {
                value: v,
                argmax: i,
            };
        }
    }
    best
}

pub(crate) fn difference_slice(x: &[Complex64], m: usize, n: usize) -> Complex64 {
    let window = &x[n..=n + m];
    if m <= DIRECT_SUM_MAX_ORDER {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, v) in window.iter().enumerate() {
            let c = binomial(m as u64, j as u64);
            // (-1)^m (-1)^j = (-1)^(m - j)
            if (m - j) % 2 == 0 {
                acc += v * c;
            } else {
                acc -= v * c;
            }
        }
        acc
    } else {
        let mut work = window.to_vec();
        for order in 0..m {
            for i in 0..(m - order) {
                work[i] = work[i + 1] - work[i];
            }
        }
        work[0]
    }
}

/// `Δ^m_n x = (-1)^m Σ_j C(m, j) (-1)^j x_{n+j}`; needs `n + m <= N - 1`.
pub fn difference(x: &EigenvalueSequence, m: usize, n: usize) -> Result<Complex64> {
    let last = n.checked_add(m).filter(|&l| l < x.len());
    if last.is_none() {
        return Err(Error::Range(format!(
            "difference of order {m} at n = {n} needs index {} but the window has {} entries",
            n.saturating_add(m),
            x.len()
        )));
    }
    Ok(difference_slice(x.values(), m, n))
}

/// `max_{0 <= n <= N-2} (n+1) |Δ¹_n x|`.
pub fn d1_seminorm(x: &EigenvalueSequence) -> Result<Seminorm> {
    let v = x.values();
    if v.len() < 2 {
        return Err(Error::WindowTooShort {
            needed: 2,
            got: v.len(),
        });
    }
    Ok(argmax(
        v.windows(2)
            .enumerate()
            .map(|(n, w)| (n as f64 + 1.0) * (w[1] - w[0]).norm()),
    ))
}

/// `max_{0 <= n <= N-3} (n+2)^2 |Δ²_n x|`.
pub fn d2_seminorm(x: &EigenvalueSequence) -> Result<Seminorm> {
    let v = x.values();
    if v.len() < 3 {
        return Err(Error::WindowTooShort {
            needed: 3,
            got: v.len(),
        });
    }
    Ok(argmax(v.windows(3).enumerate().map(|(n, w)| {
        let weight = (n as f64 + 2.0).powi(2);
        weight * (w[0] - 2.0 * w[1] + w[2]).norm()
    })))
}

/// Window sup norm, the two difference seminorms and, optionally, the
/// largest Hausdorff grid value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeminormReport {
    pub len: usize,
    pub sup_norm: f64,
    pub sup_argmax: usize,
    pub d1: f64,
    pub d1_argmax: usize,
    pub d2: f64,
    pub d2_argmax: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hausdorff_max: Option<f64>,
}

pub fn seminorm_report(
    x: &EigenvalueSequence,
    hausdorff: Option<(usize, usize)>,
) -> Result<SeminormReport> {
    let sup = x.sup_norm();
    let d1 = d1_seminorm(x)?;
    let d2 = d2_seminorm(x)?;
    let hausdorff_max = match hausdorff {
        Some((m_max, k_max)) => Some(hausdorff_grid(x, m_max, k_max)?.max),
        None => None,
    };
    Ok(SeminormReport {
        len: x.len(),
        sup_norm: sup.value,
        sup_argmax: sup.argmax,
        d1: d1.value,
        d1_argmax: d1.argmax,
        d2: d2.value,
        d2_argmax: d2.argmax,
        hausdorff_max,
    })
}

fn check_hausdorff_indices(len: usize, m: usize, k: usize) -> Result<()> {
    if m > k {
        return Err(Error::Range(format!(
            "Hausdorff index m = {m} exceeds k = {k}"
        )));
    }
    if k >= len {
        return Err(Error::Range(format!(
            "Hausdorff index k = {k} outside a window of {len} entries"
        )));
    }
    Ok(())
}

fn hausdorff_unchecked(lambda: &[Complex64], m: usize, k: usize) -> f64 {
    let start = k - m;
    let mu: Vec<Complex64> = (start..=k).map(|n| lambda[n] / (n as f64 + 1.0)).collect();
    let diff = difference_slice(&mu, m, 0);
    (k as f64 + 1.0) * binomial(k as u64, m as u64) * diff.norm()
}

/// `(k+1) C(k, m) |Δ^m_{k-m} μ|` with `μ_n = λ_n / (n+1)`.
pub fn hausdorff_value(lambda: &EigenvalueSequence, m: usize, k: usize) -> Result<f64> {
    check_hausdorff_indices(lambda.len(), m, k)?;
    Ok(hausdorff_unchecked(lambda.values(), m, k))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HausdorffRowMax {
    pub m: usize,
    pub value: f64,
    pub argmax_k: usize,
}

/// Hausdorff values `H(m, k)` for `0 <= m <= m_max`, `m <= k <= k_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HausdorffGrid {
    pub m_max: usize,
    pub k_max: usize,
    /// `rows[m][k - m] = H(m, k)`.
    pub rows: Vec<Vec<f64>>,
    pub row_max: Vec<HausdorffRowMax>,
    pub max: f64,
}

impl HausdorffGrid {
    pub fn get(&self, m: usize, k: usize) -> Option<f64> {
        if m > k {
            return None;
        }
        self.rows.get(m).and_then(|row| row.get(k - m)).copied()
    }
}

pub fn hausdorff_grid(
    lambda: &EigenvalueSequence,
    m_max: usize,
    k_max: usize,
) -> Result<HausdorffGrid> {
    check_hausdorff_indices(lambda.len(), m_max, k_max)?;
    let values = lambda.values();
    let rows: Vec<Vec<f64>> = (0..=m_max)
        .into_par_iter()
        .map(|m| {
            (m..=k_max)
                .map(|k| hausdorff_unchecked(values, m, k))
                .collect()
        })
        .collect();
    let row_max: Vec<HausdorffRowMax> = rows
        .iter()
        .enumerate()
        .map(|(m, row)| {
            let best = argmax(row.iter().copied());
            HausdorffRowMax {
                m,
                value: best.value,
                argmax_k: m + best.argmax,
            }
        })
        .collect();
    let max = row_max.iter().map(|r| r.value).fold(0.0, f64::max);
    Ok(HausdorffGrid {
        m_max,
        k_max,
        rows,
        row_max,
        max,
    })
}
