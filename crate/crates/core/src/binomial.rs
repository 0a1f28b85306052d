//! Binomial coefficients.
//!
//! Rows up to `n = 64` come from an exact integer Pascal triangle. Past that
//! the coefficient is formed in floating point: by the multiplicative formula
//! when the smaller of `k`, `n - k` is modest, and through `ln Γ` otherwise.

use std::sync::OnceLock;

use statrs::function::gamma::ln_gamma;

/// Largest row held exactly.
pub const EXACT_ROWS: u64 = 64;

const MULTIPLICATIVE_MAX_K: u64 = 128;

fn pascal() -> &'static Vec<Vec<u64>> {
    static TABLE: OnceLock<Vec<Vec<u64>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut rows: Vec<Vec<u64>> = Vec::with_capacity(EXACT_ROWS as usize + 1);
        rows.push(vec![1]);
        for n in 1..=EXACT_ROWS as usize {
            let prev = &rows[n - 1];
            let mut row = vec![1u64; n + 1];
            for k in 1..n {
                row[k] = prev[k - 1] + prev[k];
            }
            rows.push(row);
        }
        rows
    })
}

/// Exact `C(n, k)` for `n <= 64`; `None` above that.
pub fn binomial_exact(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    if n > EXACT_ROWS {
        return None;
    }
    Some(pascal()[n as usize][k as usize])
}

/// `C(n, k)` as `f64`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    if let Some(exact) = binomial_exact(n, k) {
        return exact as f64;
    }
    let k = k.min(n - k);
    if k <= MULTIPLICATIVE_MAX_K {
        let mut acc = 1.0f64;
        for i in 1..=k {
            acc *= (n - k + i) as f64 / i as f64;
        }
        return acc.round_if_integral();
    }
    ln_binomial(n, k).exp()
}

/// `ln C(n, k)` for `k <= n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    assert!(k <= n, "ln_binomial: k > n");
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

trait RoundIfIntegral {
    fn round_if_integral(self) -> Self;
}

impl RoundIfIntegral for f64 {
    // Below 2^53 every integer is representable, so the nearest one is the
    // exact coefficient.
    fn round_if_integral(self) -> Self {
        if self < 9.007_199_254_740_992e15 {
            self.round()
        } else {
            self
        }
    }
}
